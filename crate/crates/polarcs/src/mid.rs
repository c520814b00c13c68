//! Per-coordinate mutual information dimension under the recursive
//! transform, and the good/bad coordinate split it induces.
//!
//! For a sparse source in which each coordinate is nonzero with probability
//! `p`, coordinate `0 <= i < 2^n` of the transformed vector carries
//! information dimension `d_i`, computed by the erasure-style recursion
//!
//! ```text
//!   level 0:         [1 - p]
//!   v  ->  (v * v, 2v - v * v)      at children (2i, 2i + 1)
//! ```
//!
//! applied `n` times. The values polarize: as `n` grows almost every `d_i`
//! approaches 0 or 1, and the fraction approaching 1 tends to `1 - p`. The
//! coordinates with the largest `d_i` are the ones worth measuring; they
//! select the rows kept by [`crate::sensing::SensingSystem`].

use crate::error::Error;
use crate::linalg::compensated_sum;
use crate::transform::MAX_N;
use crate::Result;

/// Information dimensions of all `2^n` coordinates at sparsity `p`.
#[derive(Debug, Clone)]
pub struct MidProfile {
    n: u32,
    p: f64,
    values: Vec<f64>,
}

/// How far polarization has progressed, relative to a threshold `delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationStats {
    /// Fraction of coordinates with dimension `>= 1 - delta`.
    pub fraction_high: f64,
    /// Fraction of coordinates with dimension `<= delta`.
    pub fraction_low: f64,
    /// Fraction still strictly between the two cutoffs.
    pub fraction_unpolarized: f64,
}

impl MidProfile {
    /// Run the recursion to depth `n` for nonzero probability `p`.
    pub fn compute(n: u32, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) || p.is_nan() {
            return Err(Error::param("p", "must lie in [0, 1]"));
        }
        if n > MAX_N {
            return Err(Error::SizeLimit(format!(
                "profile depth n = {n} exceeds the cap of {MAX_N}"
            )));
        }
        let mut values = vec![1.0 - p];
        for _ in 0..n {
            let mut next = Vec::with_capacity(values.len() * 2);
            for &v in &values {
                next.push(v * v);
                next.push(2.0 * v - v * v);
            }
            values = next;
        }
        Ok(MidProfile { n, p, values })
    }

    /// Recursion depth.
    pub fn depth(&self) -> u32 {
        self.n
    }

    /// Design sparsity the profile was computed for.
    pub fn sparsity(&self) -> f64 {
        self.p
    }

    /// Per-coordinate dimensions, index order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Indices of the `count` largest dimensions, in ascending index order.
    /// Ties are broken toward the smaller index so the selection is
    /// deterministic.
    pub fn select_good(&self, count: usize) -> Result<Vec<usize>> {
        let m = self.values.len();
        if count > m {
            return Err(Error::param(
                "count",
                "cannot select more coordinates than the profile has",
            ));
        }
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| {
            self.values[b]
                .partial_cmp(&self.values[a])
                .expect("dimensions are never NaN")
                .then(a.cmp(&b))
        });
        let mut good: Vec<usize> = order[..count].to_vec();
        good.sort_unstable();
        Ok(good)
    }

    /// Split all indices into the `count` best (good) and the rest (bad),
    /// both in ascending index order.
    pub fn partition(&self, count: usize) -> Result<(Vec<usize>, Vec<usize>)> {
        let good = self.select_good(count)?;
        let mut in_good = vec![false; self.values.len()];
        for &i in &good {
            in_good[i] = true;
        }
        let bad = (0..self.values.len()).filter(|&i| !in_good[i]).collect();
        Ok((good, bad))
    }

    /// Mass balance: the dimensions always sum to `2^n * (1 - p)`.
    /// Summed compensated so the invariant holds to near machine precision
    /// even at large depths.
    pub fn total_dimension(&self) -> f64 {
        compensated_sum(self.values.iter().copied())
    }

    /// Count how much of the profile has polarized past `delta`.
    pub fn polarization_stats(&self, delta: f64) -> Result<PolarizationStats> {
        if !(0.0..0.5).contains(&delta) {
            return Err(Error::param("delta", "must lie in [0, 0.5)"));
        }
        let m = self.values.len() as f64;
        let high = self.values.iter().filter(|&&v| v >= 1.0 - delta).count() as f64;
        let low = self.values.iter().filter(|&&v| v <= delta).count() as f64;
        Ok(PolarizationStats {
            fraction_high: high / m,
            fraction_low: low / m,
            fraction_unpolarized: (m - high - low) / m,
        })
    }
}
