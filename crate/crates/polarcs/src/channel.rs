//! Sparse-noise channel models and the samplers used by the simulations.
//!
//! Two channels share the same sparsity pattern law: the additive one
//! (`y = x + a * n`, each coordinate corrupted with probability `p`) and the
//! erasing one (`y = n` with probability `p`, else `y = x`, with the erased
//! positions flagged as side information). Both samplers consume randomness
//! coordinate-by-coordinate in a fixed order — one uniform and one normal
//! draw per coordinate — so two channels driven by clones of the same
//! generator see identical corruption patterns.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Error;
use crate::rng::Stream;
use crate::Result;

/// Sparse-noise channel parameters: corruption probability and noise scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    /// Probability that a coordinate is corrupted (noise sparsity).
    pub p: f64,
    /// Standard deviation of the noise draws.
    pub sigma: f64,
}

impl NoiseModel {
    /// Validated constructor: `p` in `[0, 1]`, `sigma > 0`.
    pub fn new(p: f64, sigma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) || p.is_nan() {
            return Err(Error::param("p", "must lie in [0, 1]"));
        }
        if sigma <= 0.0 || !sigma.is_finite() {
            return Err(Error::param("sigma", "must be positive and finite"));
        }
        Ok(NoiseModel { p, sigma })
    }
}

/// A sparse vector with its support recorded explicitly.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector {
    pub values: DVector<f64>,
    /// Indices of the nonzero coordinates, ascending.
    pub support: Vec<usize>,
}

impl SparseVector {
    /// Number of nonzero coordinates.
    pub fn sparsity(&self) -> usize {
        self.support.len()
    }
}

/// Output of the erasing channel: values plus the erasure flags the
/// genie-aided decoder is allowed to see.
#[derive(Debug, Clone, PartialEq)]
pub struct FlaggedOutput {
    pub values: DVector<f64>,
    /// `erased[i]` means `values[i]` is a noise draw, not the input.
    pub erased: Vec<bool>,
}

/// Draw a sparse noise vector of length `m`: each coordinate independently
/// nonzero with probability `model.p`, nonzero values `N(0, sigma^2)`.
pub fn sample_sparse_noise(m: usize, model: &NoiseModel, rng: &mut Stream) -> SparseVector {
    let mut values = DVector::zeros(m);
    let mut support = Vec::new();
    for i in 0..m {
        let hit = rng.random::<f64>() < model.p;
        let noise: f64 = rng.sample(StandardNormal);
        if hit {
            values[i] = model.sigma * noise;
            support.push(i);
        }
    }
    SparseVector { values, support }
}

/// Fixed-cardinality variant for the sweep experiments: exactly `k`
/// nonzeros on a uniformly random support, values `N(0, sigma^2)`.
pub fn sample_sparse_noise_fixed(
    m: usize,
    k: usize,
    sigma: f64,
    rng: &mut Stream,
) -> Result<SparseVector> {
    if k > m {
        return Err(Error::param("k", "support size cannot exceed the length"));
    }
    let mut support: Vec<usize> = rand::seq::index::sample(rng, m, k).into_vec();
    support.sort_unstable();
    let mut values = DVector::zeros(m);
    for &i in &support {
        let noise: f64 = rng.sample(StandardNormal);
        values[i] = sigma * noise;
    }
    Ok(SparseVector { values, support })
}

/// Support size used by the experiments for a target sparsity fraction.
pub fn fixed_support_size(sparsity: f64, m: usize) -> usize {
    (sparsity * m as f64).round() as usize
}

/// Additive sparse-noise channel: `y[i] = x[i] + a_i * sigma * n_i` with
/// `a_i ~ Bernoulli(p)` and `n_i` standard normal, all independent.
pub fn apply_sanc(x: &DVector<f64>, model: &NoiseModel, rng: &mut Stream) -> DVector<f64> {
    DVector::from_fn(x.len(), |i, _| {
        let hit = rng.random::<f64>() < model.p;
        let noise: f64 = rng.sample(StandardNormal);
        if hit {
            x[i] + model.sigma * noise
        } else {
            x[i]
        }
    })
}

/// Erasing sparse-noise channel: each coordinate is replaced by a fresh
/// `N(0, sigma^2)` draw with probability `p` (and flagged), passed clean
/// otherwise.
pub fn apply_saec(x: &DVector<f64>, model: &NoiseModel, rng: &mut Stream) -> FlaggedOutput {
    let mut values = DVector::zeros(x.len());
    let mut erased = vec![false; x.len()];
    for i in 0..x.len() {
        let hit = rng.random::<f64>() < model.p;
        let noise: f64 = rng.sample(StandardNormal);
        if hit {
            values[i] = model.sigma * noise;
            erased[i] = true;
        } else {
            values[i] = x[i];
        }
    }
    FlaggedOutput { values, erased }
}

/// I.i.d. standard normal signal of length `n`.
pub fn sample_signal(n: usize, rng: &mut Stream) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample(StandardNormal))
}
