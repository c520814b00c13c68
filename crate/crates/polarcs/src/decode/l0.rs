//! Brute-force sparsest-solution oracle: exact at desk scale, used as the
//! ground truth the relaxation-based decoders are compared against.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};

use crate::decode::{Certificate, DecodeResult, DecodeStatus};
use crate::error::Error;
use crate::Result;

/// Hard ceiling on the number of columns the exhaustive search accepts.
pub const L0_SEARCH_MAX_COLS: usize = 24;

/// Relative residual below which a support is accepted as consistent.
const CONSISTENCY_TOL: f64 = 1e-9;

/// Find the sparsest `e` with `F e = y'` by scanning supports in order of
/// increasing cardinality up to `l_max`, lexicographically within each
/// cardinality (so ties resolve to the smallest support). Each candidate
/// support is checked by least squares; the first consistent one wins.
/// Returns status `Infeasible` when no support within the cap fits.
pub fn l0_oracle(
    f: &DMatrix<f64>,
    y_prime: &DVector<f64>,
    l_max: usize,
) -> Result<DecodeResult> {
    let (r, c) = (f.nrows(), f.ncols());
    if y_prime.len() != r {
        return Err(Error::DimensionMismatch {
            context: "measurement vector length",
            expected: r,
            got: y_prime.len(),
        });
    }
    if c > L0_SEARCH_MAX_COLS {
        return Err(Error::SizeLimit(format!(
            "exhaustive support search is limited to {L0_SEARCH_MAX_COLS} columns (got {c})"
        )));
    }
    if l_max > c {
        return Err(Error::param("l_max", "search cap exceeds the column count"));
    }

    let accept = CONSISTENCY_TOL * (1.0 + y_prime.norm());

    // Cardinality zero: the zero vector.
    if y_prime.norm() <= accept {
        return Ok(DecodeResult {
            estimate: DVector::zeros(c),
            status: DecodeStatus::Success,
            certificate: Certificate {
                support_size: Some(0),
                ..Certificate::default()
            },
        });
    }

    for k in 1..=l_max {
        for support in (0..c).combinations(k) {
            let sub = f.select_columns(support.iter());
            let svd = sub.svd(true, true);
            let coeffs = match svd.solve(y_prime, 1e-12 * svd.singular_values.max().max(1.0)) {
                Ok(w) => w,
                Err(_) => continue,
            };
            let residual = (y_prime - f.select_columns(support.iter()) * &coeffs).norm();
            if residual <= accept {
                let mut e = DVector::zeros(c);
                for (slot, &j) in support.iter().enumerate() {
                    e[j] = coeffs[slot];
                }
                return Ok(DecodeResult {
                    estimate: e,
                    status: DecodeStatus::Success,
                    certificate: Certificate {
                        objective: k as f64,
                        primal_residual: residual / (1.0 + y_prime.norm()),
                        support_size: Some(k),
                        ..Certificate::default()
                    },
                });
            }
        }
    }

    Ok(DecodeResult {
        estimate: DVector::zeros(c),
        status: DecodeStatus::Infeasible,
        certificate: Certificate::default(),
    })
}
