//! Monte Carlo estimation of information dimension through mesh
//! quantization: quantize samples to a grid of pitch `1/m`, take the
//! plug-in entropy of the occupancy histogram, and divide by `log2 m`.
//!
//! For a scalar law that mixes a discrete part with an absolutely
//! continuous part, the ratio converges to the continuous weight as `m`
//! grows; differences of joint and marginal quantized entropies estimate
//! the mutual information dimension of a channel. Vector-valued estimates
//! use the product mesh and report the raw joint dimension (not divided by
//! the number of coordinates).
//!
//! The estimator is a verification instrument, not a performance component.
//! Its one sharp edge is saturation: the plug-in entropy of `n` samples
//! cannot resolve a histogram whose occupied-cell count approaches `n`
//! (every continuous component of dimension `d` occupies on the order of
//! `m^d` cells). Estimates carry a `saturated` flag based on the
//! first-order bias of the plug-in entropy; treat flagged values as lower
//! bounds on resolution, and prefer coarser meshes over more samples when
//! the flag fires.

use std::collections::HashMap;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::channel::NoiseModel;
use crate::error::Error;
use crate::rng::Stream;
use crate::Result;

/// Default clipping half-width for unbounded laws, in units of the total
/// standard deviation.
pub const DEFAULT_CLIP: f64 = 8.0;

/// Saturation flag threshold: the first-order plug-in bias, expressed in
/// dimension units, above which an estimate is marked unreliable.
pub const SATURATION_BIAS: f64 = 0.05;

/// Sample-limited flag threshold: when the occupied-cell count reaches
/// this fraction of the sample count, the plug-in entropy is pinned near
/// its ceiling `log2(samples)` and says nothing about the law, however
/// small the first-order bias looks (that bias is divided by `log2 m`, so
/// it *shrinks* as the mesh outgrows the budget).
pub const SAMPLE_LIMITED_FRACTION: f64 = 0.9;

/// A quantized-entropy measurement at one mesh resolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizedEntropyEstimate {
    /// Mesh resolution `m` (cells of pitch `1/m`).
    pub levels: u32,
    /// Sample count behind the histogram.
    pub samples: usize,
    /// Plug-in entropy of the quantized samples, in bits.
    pub entropy_bits: f64,
    /// `entropy_bits / log2(levels)`.
    pub dim_estimate: f64,
    /// Number of distinct occupied cells.
    pub occupied_cells: usize,
    /// True when the histogram is too fine for the sample budget: either
    /// the first-order entropy bias exceeds [`SATURATION_BIAS`] dimensions,
    /// or the occupied cells reach [`SAMPLE_LIMITED_FRACTION`] of the
    /// samples (the entropy is then capped at `log2(samples)` and no
    /// longer measures the law).
    pub saturated: bool,
}

/// A mutual-information-dimension estimate from paired samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MidEstimate {
    pub levels: u32,
    pub samples: usize,
    /// `[H(X) + H(Y) - H(X, Y)] / log2(levels)`.
    pub mid: f64,
    /// Any of the three component histograms was saturated.
    pub saturated: bool,
}

/// The two per-coordinate estimates for one polarization step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneStepMids {
    /// Dimension carried by the first (degraded) coordinate.
    pub first: f64,
    /// Dimension carried by the second (upgraded) coordinate.
    pub second: f64,
    /// Any contributing histogram was saturated; at fine meshes the
    /// four-dimensional joint saturates long before the marginals do.
    pub saturated: bool,
}

fn check_mesh(m: u32, samples: usize, clip: f64) -> Result<()> {
    if m < 2 {
        return Err(Error::param("levels", "mesh needs at least 2 levels"));
    }
    if samples == 0 {
        return Err(Error::param("samples", "need at least one sample"));
    }
    if clip <= 0.0 || !clip.is_finite() {
        return Err(Error::param("clip", "must be positive and finite"));
    }
    Ok(())
}

#[inline]
fn cell(x: f64, m: f64, clip: f64) -> i64 {
    let c = if x.is_nan() { 0.0 } else { x.clamp(-clip, clip) };
    (c * m).floor() as i64
}

/// Plug-in entropy (bits) and occupied-cell count of the product-mesh
/// histogram. Counts are reduced in sorted order so the result is a pure
/// function of the count multiset — independent of hash iteration order,
/// hence exactly symmetric under coordinate permutations.
fn histogram_entropy<const K: usize>(
    points: impl Iterator<Item = [f64; K]>,
    m: u32,
    clip: f64,
) -> (f64, usize, usize) {
    let mf = m as f64;
    let mut counts: HashMap<[i64; K], u64> = HashMap::new();
    let mut n = 0usize;
    for p in points {
        let mut key = [0i64; K];
        for (k, &x) in key.iter_mut().zip(p.iter()) {
            *k = cell(x, mf, clip);
        }
        *counts.entry(key).or_insert(0) += 1;
        n += 1;
    }
    let occupied = counts.len();
    if occupied <= 1 {
        // A degenerate histogram has exactly zero entropy; skipping the
        // arithmetic avoids returning a rounding residue like -2e-16.
        return (0.0, occupied, n);
    }
    let mut sizes: Vec<u64> = counts.into_values().collect();
    sizes.sort_unstable();
    let nf = n as f64;
    let mut acc = 0.0;
    for c in sizes {
        let cf = c as f64;
        acc += cf * cf.log2();
    }
    (nf.log2() - acc / nf, occupied, n)
}

fn make_estimate(m: u32, entropy_bits: f64, occupied: usize, n: usize) -> QuantizedEntropyEstimate {
    let log_m = (m as f64).log2();
    let bias_dims =
        (occupied.saturating_sub(1)) as f64 / (2.0 * n as f64 * std::f64::consts::LN_2) / log_m;
    let sample_limited = occupied as f64 >= SAMPLE_LIMITED_FRACTION * n as f64 && occupied > 1;
    QuantizedEntropyEstimate {
        levels: m,
        samples: n,
        entropy_bits,
        dim_estimate: entropy_bits / log_m,
        occupied_cells: occupied,
        saturated: bias_dims > SATURATION_BIAS || sample_limited,
    }
}

/// Information dimension of a scalar law from samples: quantized entropy
/// over `log2 m`, clipped to `[-clip, clip]`.
pub fn estimate_dim(samples: &[f64], m: u32, clip: f64) -> Result<QuantizedEntropyEstimate> {
    check_mesh(m, samples.len(), clip)?;
    let (h, occ, n) = histogram_entropy(samples.iter().map(|&x| [x]), m, clip);
    Ok(make_estimate(m, h, occ, n))
}

/// Joint information dimension of `K`-dimensional samples on the product
/// mesh. Returns the raw joint dimension (no division by `K`).
pub fn estimate_dim_joint<const K: usize>(
    points: &[[f64; K]],
    m: u32,
    clip: f64,
) -> Result<QuantizedEntropyEstimate> {
    check_mesh(m, points.len(), clip)?;
    let (h, occ, n) = histogram_entropy(points.iter().copied(), m, clip);
    Ok(make_estimate(m, h, occ, n))
}

/// Mutual information dimension between paired scalars, using the
/// symmetric difference form `[H(X) + H(Y) - H(X, Y)] / log2 m`.
pub fn estimate_mid(pairs: &[(f64, f64)], m: u32, clip: f64) -> Result<MidEstimate> {
    check_mesh(m, pairs.len(), clip)?;
    let hx = estimate_dim_joint(
        &pairs.iter().map(|&(x, _)| [x]).collect::<Vec<_>>(),
        m,
        clip,
    )?;
    let hy = estimate_dim_joint(
        &pairs.iter().map(|&(_, y)| [y]).collect::<Vec<_>>(),
        m,
        clip,
    )?;
    let hxy = estimate_dim_joint(
        &pairs.iter().map(|&(x, y)| [x, y]).collect::<Vec<_>>(),
        m,
        clip,
    )?;
    Ok(MidEstimate {
        levels: m,
        samples: pairs.len(),
        mid: (hx.entropy_bits + hy.entropy_bits - hxy.entropy_bits) / (m as f64).log2(),
        saturated: hx.saturated || hy.saturated || hxy.saturated,
    })
}

/// Simulate one polarization step over the additive sparse-noise channel
/// with unit-interval uniform inputs and estimate the two conditional
/// mutual information dimensions:
/// `d(Y1, Y2; X1)` and `d(Y1, Y2, X1; X2)`.
///
/// The inputs are `x1, x2 ~ U[0, 1]` i.i.d., the transmitted pair is
/// `(beta (x1 + x2), x2)`, and each coordinate passes through the channel
/// independently. Meshes of one to four dimensions are involved; the
/// four-dimensional one saturates first, so coarse meshes (around `m = 128`
/// at a million samples) resolve the joint law far better than the fine
/// meshes that scalar estimates prefer.
pub fn estimate_onestep_mids(
    model: &NoiseModel,
    beta: f64,
    m: u32,
    n_samples: usize,
    rng: &mut Stream,
) -> Result<OneStepMids> {
    check_mesh(m, n_samples, DEFAULT_CLIP)?;
    if !beta.is_finite() || beta == 0.0 {
        return Err(Error::param("beta", "must be finite and nonzero"));
    }
    let mut quads: Vec<[f64; 4]> = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let x1 = rng.random::<f64>();
        let x2 = rng.random::<f64>();
        let z = [beta * (x1 + x2), x2];
        let mut y = [0.0f64; 2];
        for (yi, zi) in y.iter_mut().zip(z) {
            let hit = rng.random::<f64>() < model.p;
            let noise: f64 = rng.sample(StandardNormal);
            *yi = if hit { zi + model.sigma * noise } else { zi };
        }
        quads.push([y[0], y[1], x1, x2]);
    }
    let clip = DEFAULT_CLIP;
    let log_m = (m as f64).log2();
    let (h_y, occ_y, _) = histogram_entropy(quads.iter().map(|q| [q[0], q[1]]), m, clip);
    let (h_x1, occ_x1, _) = histogram_entropy(quads.iter().map(|q| [q[2]]), m, clip);
    let (h_x2, occ_x2, _) = histogram_entropy(quads.iter().map(|q| [q[3]]), m, clip);
    let (h_yx1, occ_yx1, _) = histogram_entropy(quads.iter().map(|q| [q[0], q[1], q[2]]), m, clip);
    let (h_all, occ_all, _) = histogram_entropy(quads.iter().copied(), m, clip);

    let any_saturated = [occ_y, occ_x1, occ_x2, occ_yx1, occ_all]
        .iter()
        .any(|&occ| make_estimate(m, 0.0, occ, n_samples).saturated);
    Ok(OneStepMids {
        first: (h_y + h_x1 - h_yx1) / log_m,
        second: (h_yx1 + h_x2 - h_all) / log_m,
        saturated: any_saturated,
    })
}

/// A scalar law mixing point masses with one absolutely continuous
/// component: the textbook testbed for dimension estimation, because the
/// true dimension equals the continuous weight.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureSpec {
    /// Probability of drawing from the continuous component.
    pub weight_continuous: f64,
    /// `(value, probability)` point masses; probabilities must sum to
    /// `1 - weight_continuous`.
    pub atoms: Vec<(f64, f64)>,
    pub continuous: ContinuousLaw,
}

/// Continuous component of a [`MixtureSpec`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContinuousLaw {
    Uniform { lo: f64, hi: f64 },
    Normal { mean: f64, sd: f64 },
}

impl ContinuousLaw {
    fn sample(&self, rng: &mut Stream) -> f64 {
        match *self {
            ContinuousLaw::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            ContinuousLaw::Normal { mean, sd } => {
                mean + sd * rng.sample::<f64, _>(StandardNormal)
            }
        }
    }
}

impl MixtureSpec {
    /// An atom at zero with weight `1 - p` plus a `U[0, 1/8]` continuous
    /// part with weight `p`. The short interval keeps the continuous
    /// histogram well inside the sample budget at the mesh sizes used by
    /// the verification runs, so the estimate tracks `p` without
    /// saturation.
    pub fn unit_atom_with_uniform(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) || p.is_nan() {
            return Err(Error::param("p", "must lie in [0, 1]"));
        }
        Ok(MixtureSpec {
            weight_continuous: p,
            atoms: vec![(0.0, 1.0 - p)],
            continuous: ContinuousLaw::Uniform { lo: 0.0, hi: 0.125 },
        })
    }

    /// Check that the weights form a probability distribution.
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.weight_continuous) {
            return Err(Error::param("weight_continuous", "must lie in [0, 1]"));
        }
        let atom_mass: f64 = self.atoms.iter().map(|&(_, p)| p).sum();
        if self.atoms.iter().any(|&(_, p)| p < 0.0)
            || (atom_mass + self.weight_continuous - 1.0).abs() > 1e-9
        {
            return Err(Error::param("atoms", "probabilities must sum to 1"));
        }
        if let ContinuousLaw::Uniform { lo, hi } = self.continuous {
            let ordered = lo.is_finite() && hi.is_finite() && hi > lo;
            if !ordered {
                return Err(Error::param("continuous", "empty uniform support"));
            }
        }
        Ok(())
    }

    /// Draw one value.
    pub fn sample(&self, rng: &mut Stream) -> f64 {
        let u = rng.random::<f64>();
        if u < self.weight_continuous {
            return self.continuous.sample(rng);
        }
        let mut acc = self.weight_continuous;
        for &(v, p) in &self.atoms {
            acc += p;
            if u < acc {
                return v;
            }
        }
        self.atoms.last().map_or(0.0, |&(v, _)| v)
    }

    /// Draw `n` values.
    pub fn samples(&self, n: usize, rng: &mut Stream) -> Vec<f64> {
        (0..n).map(|_| self.sample(rng)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    #[test]
    fn constant_variable_has_dimension_zero() {
        let xs = vec![0.75; 1000];
        let est = estimate_dim(&xs, 1 << 10, 8.0).unwrap();
        assert_eq!(est.entropy_bits, 0.0);
        assert_eq!(est.dim_estimate, 0.0);
        assert_eq!(est.occupied_cells, 1);
        assert!(!est.saturated);
    }

    #[test]
    fn uniform_law_has_dimension_one() {
        let mut rng = substream(120, 0);
        let xs: Vec<f64> = (0..200_000).map(|_| rng.random::<f64>()).collect();
        for m in [1u32 << 10, 1 << 12] {
            let est = estimate_dim(&xs, m, 8.0).unwrap();
            assert!((est.dim_estimate - 1.0).abs() <= 0.05, "m={m}: {}", est.dim_estimate);
        }
    }

    #[test]
    fn mixture_dimension_tracks_continuous_weight() {
        let mut rng = substream(121, 0);
        for p in [0.1, 0.3] {
            let law = MixtureSpec::unit_atom_with_uniform(p).unwrap();
            law.validate().unwrap();
            let xs = law.samples(150_000, &mut rng);
            let est = estimate_dim(&xs, 1 << 10, 8.0).unwrap();
            assert!(
                (est.dim_estimate - p).abs() <= 0.05,
                "p={p}: {}",
                est.dim_estimate
            );
            assert!(!est.saturated);
        }
    }

    #[test]
    fn refinement_is_stable_for_test_laws() {
        let mut rng = substream(122, 0);
        let law = MixtureSpec::unit_atom_with_uniform(0.3).unwrap();
        let xs = law.samples(200_000, &mut rng);
        let coarse = estimate_dim(&xs, 1 << 10, 8.0).unwrap();
        let fine = estimate_dim(&xs, 1 << 12, 8.0).unwrap();
        assert!((coarse.dim_estimate - fine.dim_estimate).abs() <= 0.05);
    }

    #[test]
    fn identity_channel_has_full_mid() {
        let mut rng = substream(123, 0);
        let pairs: Vec<(f64, f64)> = (0..100_000)
            .map(|_| {
                let x = rng.random::<f64>();
                (x, x)
            })
            .collect();
        let est = estimate_mid(&pairs, 1 << 10, 8.0).unwrap();
        assert!((est.mid - 1.0).abs() <= 0.1, "{}", est.mid);
    }

    #[test]
    fn independent_pairs_have_zero_mid() {
        let mut rng = substream(124, 0);
        let pairs: Vec<(f64, f64)> = (0..100_000)
            .map(|_| (rng.random::<f64>(), rng.random::<f64>()))
            .collect();
        // A coarse mesh keeps the two-dimensional joint well resolved at
        // this sample count.
        let est = estimate_mid(&pairs, 64, 8.0).unwrap();
        assert!(est.mid.abs() <= 0.05, "{}", est.mid);
        assert!(!est.saturated);
    }

    #[test]
    fn mid_is_exactly_symmetric() {
        let mut rng = substream(125, 0);
        let pairs: Vec<(f64, f64)> = (0..50_000)
            .map(|_| {
                let x = rng.random::<f64>();
                let hit = rng.random::<f64>() < 0.2;
                let noise: f64 = rng.sample(StandardNormal);
                (x, if hit { x + noise } else { x })
            })
            .collect();
        let swapped: Vec<(f64, f64)> = pairs.iter().map(|&(x, y)| (y, x)).collect();
        let a = estimate_mid(&pairs, 1 << 10, 8.0).unwrap();
        let b = estimate_mid(&swapped, 1 << 10, 8.0).unwrap();
        assert_eq!(a.mid, b.mid);
    }

    #[test]
    fn saturation_flag_fires_on_undersampled_fine_meshes() {
        let mut rng = substream(126, 0);
        let xs: Vec<f64> = (0..1000).map(|_| rng.random::<f64>()).collect();
        let est = estimate_dim(&xs, 1 << 12, 8.0).unwrap();
        assert!(est.saturated, "occupied {} of {}", est.occupied_cells, est.samples);
    }

    #[test]
    fn onestep_estimates_track_the_recursion_values() {
        // Quick version of the verification run: p = 0.3 targets
        // ((1-p)^2, 1-p^2) = (0.49, 0.91). The mesh is coarser than the
        // full run's to stay unsaturated at a fifth of the samples.
        let mut rng = substream(127, 0);
        let model = NoiseModel::new(0.3, 1.0 / 16.0).unwrap();
        let est =
            estimate_onestep_mids(&model, crate::DEFAULT_BETA, 64, 200_000, &mut rng).unwrap();
        assert!((est.first - 0.49).abs() <= 0.1, "{}", est.first);
        assert!((est.second - 0.91).abs() <= 0.1, "{}", est.second);
    }

    /// Expensive survey of mesh/sample operating points for the one-step
    /// estimator; run manually with `--ignored --nocapture` when retuning.
    #[test]
    #[ignore]
    fn onestep_operating_point_survey() {
        let model = NoiseModel::new(0.3, 1.0 / 16.0).unwrap();
        for (m, n) in [
            (32u32, 200_000usize),
            (64, 200_000),
            (128, 200_000),
            (64, 400_000),
            (128, 1_000_000),
            (256, 1_000_000),
        ] {
            let mut rng = substream(127, 0);
            let est =
                estimate_onestep_mids(&model, crate::DEFAULT_BETA, m, n, &mut rng).unwrap();
            println!(
                "m={m:4} n={n:8} first={:.4} second={:.4} saturated={}",
                est.first, est.second, est.saturated
            );
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(estimate_dim(&[1.0], 1, 8.0).is_err());
        assert!(estimate_dim(&[], 16, 8.0).is_err());
        assert!(estimate_dim(&[1.0], 16, 0.0).is_err());
        assert!(MixtureSpec::unit_atom_with_uniform(1.5).is_err());
        let bad = MixtureSpec {
            weight_continuous: 0.5,
            atoms: vec![(0.0, 0.2)],
            continuous: ContinuousLaw::Uniform { lo: 0.0, hi: 1.0 },
        };
        assert!(bad.validate().is_err());
        let mut rng = substream(128, 0);
        let model = NoiseModel::new(0.5, 1.0).unwrap();
        assert!(estimate_onestep_mids(&model, 0.0, 64, 10, &mut rng).is_err());
    }
}
