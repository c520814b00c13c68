//! Monte Carlo error-rate sweeps over noise sparsity or code rate.
//!
//! One sweep fixes a codeword length `M` and a matrix family, then walks a
//! grid of sparsity (or rate) values. At each grid point it runs
//! independent trials: draw a standard-normal signal `x`, a fixed-support
//! sparse noise vector `e`, form `y = A x + e`, decode with the ℓ1
//! regression solver, and declare a codeword error when the per-coordinate
//! average ℓ1 error exceeds a threshold. Solver non-convergence counts as
//! an error and is additionally tallied on its own.
//!
//! Reproducibility is structural, not incidental: every trial draws from a
//! dedicated ChaCha substream keyed by `(master seed, grid point, trial)`,
//! so results are independent of execution order and parallelism degree.

use std::time::Instant;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::channel::{fixed_support_size, sample_signal, sample_sparse_noise_fixed};
use crate::decode::{l1_decode, DecodeStatus, DEFAULT_TOL};
use crate::error::Error;
use crate::mid::MidProfile;
use crate::rng::{substream, sweep_stream_id, MATRIX_STREAM_SLOT};
use crate::sensing::{gaussian_matrix, split_columns};
use crate::transform::PolarTransform;
use crate::Result;

/// Coding-matrix family used by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    /// Good columns of the polarizing transform, selected by the
    /// dimension profile at the design sparsity.
    Polar,
    /// I.i.d. standard normal entries, redrawn per trial unless pinned.
    Gaussian,
}

/// Which parameter the grid walks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// Vary noise sparsity at fixed code rate.
    Sparsity,
    /// Vary code rate at fixed noise sparsity.
    Rate,
}

/// Full description of one sweep.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    /// Codeword length `M` (a power of two for the polar family).
    pub m: usize,
    /// Code rate `N/M`; ignored on rate sweeps where the grid supplies it.
    pub rate: f64,
    /// Explicit signal dimension overriding `rate` (sparsity sweeps only).
    pub explicit_n: Option<usize>,
    /// Noise sparsity; ignored on sparsity sweeps where the grid supplies
    /// it.
    pub sparsity: f64,
    pub matrix: MatrixKind,
    pub axis: SweepAxis,
    /// Grid of sweep values, strictly increasing.
    pub grid: Vec<f64>,
    /// Trials per grid point.
    pub trials: u64,
    /// Master seed; all randomness derives from it.
    pub seed: u64,
    /// Noise standard deviation.
    pub sigma: f64,
    /// Per-coordinate average ℓ1 error above which a trial is an error.
    pub error_threshold: f64,
    /// Design sparsity for the polar good-column selection.
    pub design_p: f64,
    /// Kernel scaling of the polar family.
    pub beta: f64,
    /// Draw one Gaussian matrix per grid point instead of one per trial.
    pub fixed_matrix: bool,
}

/// Sparsity fraction at which the polar good columns are selected when the
/// caller does not say otherwise.
pub const DEFAULT_DESIGN_P: f64 = 0.2;

/// Trials per grid point when the caller does not say otherwise.
pub const DEFAULT_TRIALS: u64 = 500;

/// Codeword-error threshold on the per-coordinate average ℓ1 error.
pub const DEFAULT_ERROR_THRESHOLD: f64 = 1e-4;

impl ExperimentConfig {
    fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::param("m", "codeword length must be positive"));
        }
        if self.matrix == MatrixKind::Polar && !self.m.is_power_of_two() {
            return Err(Error::param(
                "m",
                "polar sweeps need a power-of-two codeword length",
            ));
        }
        if self.trials == 0 {
            return Err(Error::param("trials", "need at least one trial"));
        }
        if self.grid.is_empty() {
            return Err(Error::param("grid", "grid must be nonempty"));
        }
        if self.grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::param("grid", "grid must be strictly increasing"));
        }
        if self.sigma <= 0.0 || !self.sigma.is_finite() {
            return Err(Error::param("sigma", "must be positive and finite"));
        }
        if self.error_threshold <= 0.0 || !self.error_threshold.is_finite() {
            return Err(Error::param("threshold", "must be positive and finite"));
        }
        let (lo, hi) = (self.grid[0], *self.grid.last().unwrap());
        match self.axis {
            SweepAxis::Sparsity => {
                if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) {
                    return Err(Error::param("grid", "sparsity values must lie in [0, 1]"));
                }
            }
            SweepAxis::Rate => {
                if lo <= 0.0 || hi > 1.0 {
                    return Err(Error::param("grid", "rate values must lie in (0, 1]"));
                }
                if !(0.0..=1.0).contains(&self.sparsity) {
                    return Err(Error::param("sparsity", "must lie in [0, 1]"));
                }
            }
        }
        Ok(())
    }

    /// Signal dimension at grid point `value`.
    fn dimension_at(&self, value: f64) -> Result<usize> {
        let n = match self.axis {
            SweepAxis::Sparsity => match self.explicit_n {
                Some(n) => n,
                None => (self.rate * self.m as f64).round() as usize,
            },
            SweepAxis::Rate => (value * self.m as f64).round() as usize,
        };
        if n == 0 || n > self.m {
            return Err(Error::param(
                "rate",
                "signal dimension must lie in 1..=M; adjust rate or N",
            ));
        }
        Ok(n)
    }

    /// Noise sparsity at grid point `value`.
    fn sparsity_at(&self, value: f64) -> f64 {
        match self.axis {
            SweepAxis::Sparsity => value,
            SweepAxis::Rate => self.sparsity,
        }
    }
}

/// One grid point's tally.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    /// The sparsity or rate value of this grid point.
    pub sweep_value: f64,
    pub trials: u64,
    /// Trials whose decode missed the signal (includes solver failures).
    pub errors: u64,
    /// `errors / trials`.
    pub error_rate: f64,
    /// Trials where the solver did not reach its certificate tolerances.
    pub solver_failures: u64,
    /// Wall-clock seconds spent on this grid point (not reproducible).
    pub wall_time_s: f64,
}

/// Build the polar coding matrix for dimension `n_signal`: the transform's
/// good columns per the dimension profile at the design sparsity.
fn polar_coding_matrix(cfg: &ExperimentConfig, n_signal: usize) -> Result<DMatrix<f64>> {
    let depth = cfg.m.trailing_zeros();
    let t = PolarTransform::new(depth, cfg.beta)?;
    let profile = MidProfile::compute(depth, cfg.design_p)?;
    let good = profile.select_good(n_signal)?;
    let (a, _) = split_columns(&t, &good)?;
    Ok(a)
}

/// Run a single grid point of the sweep.
pub fn run_point(cfg: &ExperimentConfig, point: usize) -> Result<ResultRow> {
    cfg.validate()?;
    let value = *cfg
        .grid
        .get(point)
        .ok_or_else(|| Error::param("point", "grid index out of range"))?;
    let n_signal = cfg.dimension_at(value)?;
    let k = fixed_support_size(cfg.sparsity_at(value), cfg.m);

    // Matrices that do not vary across trials are built once up front.
    let shared: Option<DMatrix<f64>> = match cfg.matrix {
        MatrixKind::Polar => Some(polar_coding_matrix(cfg, n_signal)?),
        MatrixKind::Gaussian if cfg.fixed_matrix => {
            let mut rng = substream(cfg.seed, sweep_stream_id(point, MATRIX_STREAM_SLOT));
            Some(gaussian_matrix(cfg.m, n_signal, &mut rng))
        }
        MatrixKind::Gaussian => None,
    };

    let start = Instant::now();
    let (errors, solver_failures) = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = substream(cfg.seed, sweep_stream_id(point, trial));
            let fresh;
            let a = match &shared {
                Some(a) => a,
                None => {
                    fresh = gaussian_matrix(cfg.m, n_signal, &mut rng);
                    &fresh
                }
            };
            let x = sample_signal(n_signal, &mut rng);
            let e = sample_sparse_noise_fixed(cfg.m, k, cfg.sigma, &mut rng)
                .expect("support size bounded by length");
            let y = a * &x + &e.values;
            match l1_decode(a, &y, DEFAULT_TOL) {
                Ok(res) if res.status == DecodeStatus::Success => {
                    let mean_err = (&res.estimate - &x).abs().sum() / n_signal as f64;
                    ((mean_err > cfg.error_threshold) as u64, 0u64)
                }
                // Anything short of a certified solve counts as a codeword
                // error and is tallied as a solver failure besides.
                _ => (1, 1),
            }
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));

    Ok(ResultRow {
        sweep_value: value,
        trials: cfg.trials,
        errors,
        error_rate: errors as f64 / cfg.trials as f64,
        solver_failures,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Run every grid point in order.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    (0..cfg.grid.len()).map(|i| run_point(cfg, i)).collect()
}

/// Parse a `start:end:step` grid description into the inclusive list of
/// values `start, start + step, …` up to `end` (within a half-step-scaled
/// rounding slack).
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let [start, end, step] = parts[..] else {
        return Err(Error::param("grid", "expected start:end:step"));
    };
    let bad = |_| Error::param("grid", "expected three numbers as start:end:step");
    let start: f64 = start.trim().parse().map_err(bad)?;
    let end: f64 = end.trim().parse().map_err(bad)?;
    let step: f64 = step.trim().parse().map_err(bad)?;
    if !step.is_finite() || step <= 0.0 {
        return Err(Error::param("grid", "step must be positive"));
    }
    if end < start {
        return Err(Error::param("grid", "end must not precede start"));
    }
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}
