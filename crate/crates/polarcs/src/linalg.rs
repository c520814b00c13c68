//! Small dense linear-algebra helpers that nalgebra does not expose directly.
//!
//! nalgebra's QR and SVD return thin factors, but the annihilator
//! construction needs the *other* half of the orthogonal basis: the columns
//! that complete `col(A)` to all of R^M. We run the Householder reduction
//! ourselves and accumulate the full Q.

use nalgebra::{DMatrix, DVector};

use crate::error::Error;
use crate::Result;

/// Relative threshold below which a singular value counts as zero.
///
/// Used everywhere a rank decision is made so that all modules agree on what
/// "rank deficient" means.
pub const RANK_REL_TOL: f64 = 1e-10;

/// Numerical rank of `m`: singular values above `RANK_REL_TOL` times the
/// largest one.
pub fn rank(m: &DMatrix<f64>) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().singular_values();
    let max = sv.max();
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_REL_TOL * max).count()
}

/// Householder reduction of `r` to upper-triangular form, in place,
/// returning the unit reflector vectors (`None` where a column was already
/// reduced). The caller reads rank information off the diagonal of `r`.
fn householder_reduce(r: &mut DMatrix<f64>) -> Vec<Option<DVector<f64>>> {
    let (m, n) = r.shape();
    let cols = n.min(m);
    let mut vs = Vec::with_capacity(cols);
    for k in 0..cols {
        // Column-major storage: the pivot column's tail is contiguous, and
        // so is every trailing segment the reflector touches. Working on
        // slices keeps the hot loops free of per-element bounds checks.
        let mut v = DVector::from_column_slice(&r.as_slice()[k * m + k..(k + 1) * m]);
        let alpha = -v[0].signum() * v.norm();
        if alpha == 0.0 {
            vs.push(None); // column already zero below the diagonal
            continue;
        }
        v[0] -= alpha;
        let vnorm = v.norm();
        if vnorm == 0.0 {
            vs.push(None);
            continue;
        }
        v /= vnorm;
        let w = v.as_slice();
        let data = r.as_mut_slice();
        // Apply H = I - 2 v v^T to the trailing block of R.
        for col in k..n {
            let seg = &mut data[col * m + k..col * m + m];
            let mut dot = 0.0;
            for (s, vi) in seg.iter().zip(w) {
                dot += s * vi;
            }
            let scale = 2.0 * dot;
            for (s, vi) in seg.iter_mut().zip(w) {
                *s -= scale * vi;
            }
        }
        vs.push(Some(v));
    }
    vs
}

/// Whether every diagonal entry of the reduced `r` clears the relative
/// rank threshold — the QR analogue of the SVD test in [`rank`].
fn r_diagonal_full_rank(r: &DMatrix<f64>, n: usize) -> bool {
    if n == 0 {
        return true;
    }
    let diag_max = (0..n).map(|k| r[(k, k)].abs()).fold(0.0f64, f64::max);
    diag_max > 0.0 && (0..n).all(|k| r[(k, k)].abs() > RANK_REL_TOL * diag_max)
}

/// Cheap full-column-rank test via an unpivoted Householder reduction: a
/// QR pass costs on the order of `2 M N^2` flops, roughly an order of
/// magnitude less than the SVD behind [`rank`], which matters on the
/// per-call rank checks inside the solvers.
pub fn has_full_column_rank(a: &DMatrix<f64>) -> bool {
    let (m, n) = a.shape();
    if n > m {
        return false;
    }
    let mut r = a.clone();
    householder_reduce(&mut r);
    r_diagonal_full_rank(&r, n)
}

/// Orthonormal basis of the orthogonal complement of `col(a)`, returned as
/// the rows of an `(M - N) x M` matrix.
///
/// Requires `a` (`M x N`, `M >= N`) to have full column rank; rank
/// deficiency is reported as [`Error::DegenerateInput`] since the complement
/// would then have the wrong dimension. For `M == N` the result has zero
/// rows. The basis is the deterministic completion produced by Householder
/// reflections, so equal inputs give bitwise-equal outputs.
pub fn orthonormal_complement(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (m, n) = a.shape();
    if n > m {
        return Err(Error::DimensionMismatch {
            context: "complement requires at least as many rows as columns",
            expected: n,
            got: m,
        });
    }
    let mut r = a.clone();
    let vs = householder_reduce(&mut r);
    if !r_diagonal_full_rank(&r, n) {
        return Err(Error::DegenerateInput(format!(
            "matrix of shape {m}x{n} is column rank deficient; its column space \
             has no well-defined {}-dimensional complement",
            m - n
        )));
    }

    // With Q = H_1 ... H_n, row i of Q^T equals (H_1 (... (H_n e_i)))^T,
    // so the complement rows i = n..m come from applying the reflectors to
    // each tail unit vector in reverse order. Only the M - N rows actually
    // needed are ever formed; the full M x M Q never is.
    let mut out = DMatrix::<f64>::zeros(m - n, m);
    let mut work = DVector::<f64>::zeros(m);
    for row in 0..(m - n) {
        work.fill(0.0);
        work[n + row] = 1.0;
        for (k, v) in vs.iter().enumerate().rev() {
            if let Some(v) = v {
                let w = v.as_slice();
                let seg = &mut work.as_mut_slice()[k..m];
                let mut dot = 0.0;
                for (s, vi) in seg.iter().zip(w) {
                    dot += s * vi;
                }
                let scale = 2.0 * dot;
                for (s, vi) in seg.iter_mut().zip(w) {
                    *s -= scale * vi;
                }
            }
        }
        for c in 0..m {
            out[(row, c)] = work[c];
        }
    }
    Ok(out)
}

/// Minimum-norm least-squares solution of `m x = b` via SVD.
pub fn lstsq(m: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    if m.nrows() != b.len() {
        return Err(Error::DimensionMismatch {
            context: "least-squares right-hand side",
            expected: m.nrows(),
            got: b.len(),
        });
    }
    let svd = m.clone().svd(true, true);
    svd.solve(b, RANK_REL_TOL * svd.singular_values.max())
        .map_err(|e| Error::DegenerateInput(e.to_string()))
}

/// Compensated summation (the Neumaier refinement of Kahan's method); keeps
/// long reductions accurate to a few ulps independent of length, including
/// when partial sums cancel.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;

    fn random_matrix(r: usize, c: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        DMatrix::from_fn(r, c, |_, _| rng.random::<f64>() * 2.0 - 1.0)
    }

    #[test]
    fn complement_annihilates_and_is_orthonormal() {
        for (m, n, seed) in [(6, 3, 1), (12, 5, 2), (9, 9, 3), (7, 1, 4)] {
            let a = random_matrix(m, n, seed);
            let f = orthonormal_complement(&a).unwrap();
            assert_eq!(f.shape(), (m - n, m));
            let fa = &f * &a;
            assert!(fa.amax() < 1e-12, "F*A = {}", fa.amax());
            let gram = &f * f.transpose();
            let eye = DMatrix::<f64>::identity(m - n, m - n);
            assert!((gram - eye).amax() < 1e-12);
        }
    }

    #[test]
    fn complement_is_deterministic() {
        let a = random_matrix(10, 4, 9);
        let f1 = orthonormal_complement(&a).unwrap();
        let f2 = orthonormal_complement(&a).unwrap();
        assert_eq!(f1, f2);
    }

    #[test]
    fn complement_rejects_rank_deficiency() {
        let mut a = random_matrix(6, 3, 5);
        let col = a.column(0).into_owned();
        a.set_column(2, &(2.0 * col));
        assert!(matches!(
            orthonormal_complement(&a),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn rank_thresholds_tiny_directions() {
        let mut a = DMatrix::<f64>::identity(4, 4);
        a[(3, 3)] = 1e-14;
        assert_eq!(rank(&a), 3);
        assert_eq!(rank(&DMatrix::<f64>::zeros(3, 3)), 0);
    }

    #[test]
    fn lstsq_matches_exact_solution() {
        let a = random_matrix(8, 3, 6);
        let x = DVector::from_vec(vec![1.5, -2.0, 0.25]);
        let b = &a * &x;
        let got = lstsq(&a, &b).unwrap();
        assert!((got - x).amax() < 1e-10);
    }

    #[test]
    fn compensated_sum_is_accurate() {
        let xs = vec![1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(xs), 2.0);
        let many = vec![0.1; 10_000_000];
        assert_eq!(compensated_sum(many), 1_000_000.0);
    }
}
