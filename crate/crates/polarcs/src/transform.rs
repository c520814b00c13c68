//! The polarizing transform: Kronecker powers of a 2 x 2 kernel with a
//! bit-reversal column permutation.
//!
//! The kernel is
//!
//! ```text
//!         | beta  beta |
//!   G0 =  |  0     1   |
//! ```
//!
//! and the size-`M = 2^n` transform is `H = G0^(x n) * B_M`, where `G0^(x n)`
//! is the n-fold Kronecker power and `B_M` permutes columns into bit-reversed
//! order. Entries have the closed form
//!
//! ```text
//!   H[i, j] = beta^(n - popcount(i))   if i & !bitrev(j) == 0, else 0,
//! ```
//!
//! i.e. row `i` hits column `j` exactly when the bit pattern of `i` is a
//! subset of the bit-reversed pattern of `j`. Because bit reversal commutes
//! with Kronecker powers of 2 x 2 blocks, the same matrix is equally the
//! *row* bit-reversal of `G0^(x n)`.
//!
//! # Example
//!
//! ```
//! use polarcs::transform::PolarTransform;
//! use nalgebra::DVector;
//!
//! let t = PolarTransform::new(1, polarcs::DEFAULT_BETA).unwrap();
//! let z = t.apply(&DVector::from_vec(vec![1.0, 2.0])).unwrap();
//! assert!((z[0] - 3.0 / 2f64.sqrt()).abs() < 1e-15);
//! assert_eq!(z[1], 2.0);
//! ```

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};

use crate::error::Error;
use crate::Result;

/// Largest supported recursion depth (`M = 2^20` coordinates).
pub const MAX_N: u32 = 20;

/// Largest depth for which the dense matrix is materialized by default.
/// Beyond this, `2^n x 2^n` doubles stop being a reasonable allocation and
/// the butterfly form of [`PolarTransform::apply`] is the only product path.
pub const MAX_DENSE_N: u32 = 13;

/// The 2 x 2 kernel `[[beta, beta], [0, 1]]`.
///
/// `beta` must be finite and nonzero, otherwise the transform would be
/// singular.
pub fn kernel(beta: f64) -> Result<DMatrix<f64>> {
    check_beta(beta)?;
    Ok(DMatrix::from_row_slice(2, 2, &[beta, beta, 0.0, 1.0]))
}

fn check_beta(beta: f64) -> Result<()> {
    if !beta.is_finite() || beta == 0.0 {
        return Err(Error::param("beta", "must be finite and nonzero"));
    }
    Ok(())
}

/// The bit-reversal permutation on `2^n` indices: position `i` maps to the
/// index whose `n`-bit binary expansion is reversed.
pub fn bit_reversal_permutation(n: u32) -> Result<Vec<usize>> {
    if n > MAX_N {
        return Err(Error::SizeLimit(format!(
            "bit reversal for n = {n} exceeds the cap of {MAX_N}"
        )));
    }
    let m = 1usize << n;
    Ok((0..m).map(|i| reverse_bits(i, n)).collect())
}

#[inline]
fn reverse_bits(i: usize, n: u32) -> usize {
    let mut r = 0usize;
    let mut v = i;
    for _ in 0..n {
        r = (r << 1) | (v & 1);
        v >>= 1;
    }
    r
}

/// The full polarizing transform at depth `n`.
///
/// The dense matrix is computed lazily and cached; see
/// [`PolarTransform::dense`]. Applying the transform never requires the
/// dense form.
#[derive(Debug)]
pub struct PolarTransform {
    n: u32,
    beta: f64,
    size: usize,
    dense: OnceLock<DMatrix<f64>>,
}

impl PolarTransform {
    /// Build the depth-`n` transform with kernel weight `beta`.
    pub fn new(n: u32, beta: f64) -> Result<Self> {
        check_beta(beta)?;
        if n > MAX_N {
            return Err(Error::SizeLimit(format!(
                "transform depth n = {n} exceeds the cap of {MAX_N}"
            )));
        }
        Ok(PolarTransform {
            n,
            beta,
            size: 1usize << n,
            dense: OnceLock::new(),
        })
    }

    /// Recursion depth `n`.
    pub fn depth(&self) -> u32 {
        self.n
    }

    /// Number of coordinates `M = 2^n`.
    pub fn size(&self) -> usize {
        self.size
    }

    /// Kernel weight.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Single matrix entry, by the closed form. `O(1)` and exact in powers
    /// of `beta`.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.size && j < self.size);
        let rj = reverse_bits(j, self.n);
        if i & !rj & (self.size - 1) == 0 {
            self.beta.powi((self.n - i.count_ones()) as i32)
        } else {
            0.0
        }
    }

    /// The dense `M x M` matrix. Materialized on first use and cached;
    /// refused above depth [`MAX_DENSE_N`] (use [`PolarTransform::apply`]
    /// there instead).
    pub fn dense(&self) -> Result<&DMatrix<f64>> {
        if self.n > MAX_DENSE_N {
            return Err(Error::SizeLimit(format!(
                "dense transform at n = {} would need {} entries; the cap is n = {}",
                self.n,
                (self.size as u128) * (self.size as u128),
                MAX_DENSE_N
            )));
        }
        Ok(self
            .dense
            .get_or_init(|| DMatrix::from_fn(self.size, self.size, |i, j| self.entry(i, j))))
    }

    /// Multiply by the transform in `O(M log M)` via the butterfly
    /// recursion: bit-reverse the input, then combine pairs
    /// `(top, bottom) -> (beta * (top + bottom), bottom)` over doubling block
    /// sizes.
    pub fn apply(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        if x.len() != self.size {
            return Err(Error::DimensionMismatch {
                context: "transform input length",
                expected: self.size,
                got: x.len(),
            });
        }
        let mut v: Vec<f64> = (0..self.size).map(|j| x[reverse_bits(j, self.n)]).collect();
        let mut half = 1usize;
        while half < self.size {
            let block = half * 2;
            for start in (0..self.size).step_by(block) {
                for i in start..start + half {
                    v[i] = self.beta * (v[i] + v[i + half]);
                }
            }
            half = block;
        }
        Ok(DVector::from_vec(v))
    }

    /// Multiply by the cached dense matrix. Exists so tests can pit the two
    /// product paths against each other; subject to the dense-size cap.
    pub fn apply_dense(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        if x.len() != self.size {
            return Err(Error::DimensionMismatch {
                context: "transform input length",
                expected: self.size,
                got: x.len(),
            });
        }
        Ok(self.dense()? * x)
    }
}
