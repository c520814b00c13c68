//! Decoders: ℓ1 residual regression, basis pursuit, the exhaustive ℓ0
//! oracle, successive-cancellation erasure decoding, and the measurement →
//! channel → decode pipeline tying them together.

mod ipm;
mod l0;
mod sc;

pub use ipm::{basis_pursuit, l1_decode, DEFAULT_TOL};
pub use l0::{l0_oracle, L0_SEARCH_MAX_COLS};
pub use sc::sc_erasure_decode;

use nalgebra::DVector;

use crate::error::Error;
use crate::sensing::SensingSystem;
use crate::Result;

/// How a decode attempt ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeStatus {
    /// Estimate meets the decoder's own optimality/consistency contract.
    Success,
    /// No consistent solution within the search space.
    Infeasible,
    /// An information-bearing coordinate could not be resolved from the
    /// unerased observations.
    ErasureFailure,
    /// Iteration cap reached before the certificate tolerances were met.
    NotConverged,
}

/// Solver diagnostics attached to every decode result. Fields not
/// meaningful for a given decoder are left at their defaults.
#[derive(Debug, Clone, Default)]
pub struct Certificate {
    /// Attained objective value (ℓ1 norm, or support size for the ℓ0
    /// oracle).
    pub objective: f64,
    /// Primal-minus-dual objective at the final iterate.
    pub duality_gap: f64,
    /// Relative feasibility residual of the estimate.
    pub primal_residual: f64,
    /// Dual feasibility violation (stationarity residual for regression,
    /// bound overshoot for pursuit).
    pub dual_residual: f64,
    /// Interior-point iterations spent.
    pub iterations: usize,
    /// Nonzero count of the estimate, when the decoder resolves supports.
    pub support_size: Option<usize>,
    /// Largest `|dual|` off the support (pursuit only); values bounded
    /// away from 1 certify a unique minimizer.
    pub max_inactive_dual: Option<f64>,
    /// Whether the support columns are linearly independent and no larger
    /// than the measurement count.
    pub support_well_posed: Option<bool>,
    /// Unresolved good coordinates (erasure decoding only).
    pub unresolved: usize,
}

/// A decoder's answer: the estimate, how the attempt ended, and the
/// diagnostics backing a `Success`.
#[derive(Debug, Clone)]
pub struct DecodeResult {
    pub estimate: DVector<f64>,
    pub status: DecodeStatus,
    pub certificate: Certificate,
}

impl DecodeResult {
    /// True when the solve succeeded and the dual certificate pins the
    /// minimizer as unique with margin `margin`: every inactive dual
    /// coordinate at most `1 - margin` and an independent support.
    pub fn certified_unique(&self, margin: f64) -> bool {
        self.status == DecodeStatus::Success
            && self.certificate.support_well_posed == Some(true)
            && self
                .certificate
                .max_inactive_dual
                .is_some_and(|g| g <= 1.0 - margin)
    }
}

/// Inner solver used by [`recover_sparse`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecoverMethod {
    /// Lift to an analog observation and run ℓ1 residual regression.
    L1,
    /// Exhaustive sparsest-solution search directly on the measurements.
    L0Oracle,
}

/// Recover the sparse vector `e` from its measurements `y' = F e`.
///
/// The pipeline runs the conversion in four steps: lift `y'` to an analog
/// observation `y` with `F y = y'`; add the frozen contribution (zero here,
/// by the frozen-value convention); decode the signal estimate against the
/// coding matrix (ℓ1 route) or search supports on `F` directly (ℓ0 route);
/// and return the residual `e = y - A x`. Either way `F e = y'` holds to
/// working precision by construction.
pub fn recover_sparse(
    system: &SensingSystem,
    y_prime: &DVector<f64>,
    method: RecoverMethod,
) -> Result<DecodeResult> {
    if y_prime.len() != system.measurement_count() {
        return Err(Error::DimensionMismatch {
            context: "measurement vector length",
            expected: system.measurement_count(),
            got: y_prime.len(),
        });
    }
    match method {
        RecoverMethod::L1 => {
            let y = system.cs_to_analog(y_prime)?;
            let inner = l1_decode(system.coding_matrix(), &y, DEFAULT_TOL)?;
            let estimate = &y - system.coding_matrix() * &inner.estimate;
            Ok(DecodeResult { estimate, ..inner })
        }
        RecoverMethod::L0Oracle => {
            let cap = system.measurement_count().min(system.block_size());
            l0_oracle(system.measurement_matrix(), y_prime, cap)
        }
    }
}
