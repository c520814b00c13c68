//! The coding/measurement system derived from a polarizing transform:
//! the good-column coding matrix `A`, the frozen-column matrix `A_b`, and
//! the measurement matrix `F` that annihilates `A`.
//!
//! `F` is the deliverable of the construction: a `(M - N) x M` matrix with
//! orthonormal rows satisfying `F * A = 0`. Measuring `y' = F * e` of a
//! sparse `e` and solving the sparse-recovery problem is equivalent, by the
//! annihilator duality, to transmitting a length-`N` signal through a
//! sparse-corruption channel and decoding it — see
//! [`crate::decode::recover_sparse`] for the conversion pipeline.

use nalgebra::{DMatrix, DVector};

use crate::error::Error;
use crate::linalg::{orthonormal_complement, rank};
use crate::mid::MidProfile;
use crate::rng::{substream, Stream};
use crate::transform::PolarTransform;
use crate::Result;

use itertools::Itertools;
use rand::Rng;
use rand_distr::StandardNormal;

/// The full good/bad split of a transform: coding matrix, frozen columns,
/// and the annihilating measurement matrix. Immutable once built.
#[derive(Debug, Clone)]
pub struct SensingSystem {
    block_size: usize,
    good: Vec<usize>,
    bad: Vec<usize>,
    a: DMatrix<f64>,
    a_b: DMatrix<f64>,
    f: DMatrix<f64>,
}

impl SensingSystem {
    /// Build from a transform and an explicit good-index set.
    pub fn from_transform(t: &PolarTransform, good: &[usize]) -> Result<Self> {
        let (a, a_b) = split_columns(t, good)?;
        let f = annihilator(&a)?;
        let mut good: Vec<usize> = good.to_vec();
        good.sort_unstable();
        let mut in_good = vec![false; t.size()];
        for &i in &good {
            in_good[i] = true;
        }
        let bad = (0..t.size()).filter(|&i| !in_good[i]).collect();
        Ok(SensingSystem {
            block_size: t.size(),
            good,
            bad,
            a,
            a_b,
            f,
        })
    }

    /// Build from design parameters: compute the dimension profile at
    /// sparsity `p`, keep the `dim` best coordinates, and derive the
    /// matrices from a fresh transform of depth `n`.
    pub fn from_design(n: u32, beta: f64, p: f64, dim: usize) -> Result<Self> {
        let t = PolarTransform::new(n, beta)?;
        let profile = MidProfile::compute(n, p)?;
        let good = profile.select_good(dim)?;
        Self::from_transform(&t, &good)
    }

    /// Codeword length `M`.
    pub fn block_size(&self) -> usize {
        self.block_size
    }

    /// Code dimension `N` (number of good coordinates).
    pub fn dimension(&self) -> usize {
        self.good.len()
    }

    /// Number of measurements `M - N` (rows of `F`).
    pub fn measurement_count(&self) -> usize {
        self.f.nrows()
    }

    /// Good indices, ascending.
    pub fn good(&self) -> &[usize] {
        &self.good
    }

    /// Bad (frozen) indices, ascending.
    pub fn bad(&self) -> &[usize] {
        &self.bad
    }

    /// The `M x N` coding matrix (good columns of the transform).
    pub fn coding_matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    /// The `M x (M - N)` frozen-column matrix.
    pub fn frozen_matrix(&self) -> &DMatrix<f64> {
        &self.a_b
    }

    /// The `(M - N) x M` measurement matrix with orthonormal rows.
    pub fn measurement_matrix(&self) -> &DMatrix<f64> {
        &self.f
    }

    /// Compress: `y' = F * e`.
    pub fn measure(&self, e: &DVector<f64>) -> Result<DVector<f64>> {
        if e.len() != self.block_size {
            return Err(Error::DimensionMismatch {
                context: "measurement input length",
                expected: self.block_size,
                got: e.len(),
            });
        }
        Ok(&self.f * e)
    }

    /// Lift a measurement vector back to a length-`M` channel observation
    /// `y` with `F * y = y'`. Any particular solution would do — the signal
    /// component it implicitly assigns is immaterial to recovery — and the
    /// minimum-norm one is fixed for determinism.
    pub fn cs_to_analog(&self, y_prime: &DVector<f64>) -> Result<DVector<f64>> {
        min_norm_preimage(&self.f, y_prime)
    }
}

/// Split the transform's columns into the good set (ascending) and the
/// complement (ascending): `H x0 = A x + A_b x_b`.
pub fn split_columns(
    t: &PolarTransform,
    good: &[usize],
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let m = t.size();
    let mut in_good = vec![false; m];
    for &i in good {
        if i >= m {
            return Err(Error::param("good", "index out of range for this transform"));
        }
        if in_good[i] {
            return Err(Error::param("good", "duplicate index"));
        }
        in_good[i] = true;
    }
    let n_good = good.len();
    let mut a = DMatrix::zeros(m, n_good);
    let mut a_b = DMatrix::zeros(m, m - n_good);
    let (mut ga, mut gb) = (0, 0);
    for (j, &keep) in in_good.iter().enumerate() {
        let col = DVector::from_fn(m, |i, _| t.entry(i, j));
        if keep {
            a.set_column(ga, &col);
            ga += 1;
        } else {
            a_b.set_column(gb, &col);
            gb += 1;
        }
    }
    Ok((a, a_b))
}

/// An orthonormal-row basis of the orthogonal complement of `col(A)`:
/// the `(M - N) x M` matrix `F` with `F * A = 0` and `F * F^T = I`.
/// Deterministic given `A`.
pub fn annihilator(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    orthonormal_complement(a)
}

/// Minimum-Euclidean-norm solution of `F * y = y'` for full-row-rank `F`:
/// `y = F^T (F F^T)^{-1} y'`.
pub fn min_norm_preimage(f: &DMatrix<f64>, y_prime: &DVector<f64>) -> Result<DVector<f64>> {
    if y_prime.len() != f.nrows() {
        return Err(Error::DimensionMismatch {
            context: "preimage right-hand side",
            expected: f.nrows(),
            got: y_prime.len(),
        });
    }
    if f.nrows() == 0 {
        return Ok(DVector::zeros(f.ncols()));
    }
    let gram = f * f.transpose();
    let chol = gram.cholesky().ok_or_else(|| {
        Error::DegenerateInput("preimage requires full row rank".to_string())
    })?;
    Ok(f.transpose() * chol.solve(y_prime))
}

/// Result of a brute-force spark search: either the exact value or a lower
/// bound when the search was capped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spark {
    /// The smallest number of linearly dependent columns.
    Exact(usize),
    /// Every subset up to the cap was independent; spark is at least this.
    AtLeast(usize),
}

/// Hard ceiling on exhaustive column-subset searches.
pub const SPARK_SEARCH_MAX_COLS: usize = 24;

/// Smallest `k` such that some `k` columns of `f` are linearly dependent,
/// found by exhaustive search over subsets of size up to `cap`
/// (rank-tested at the [`crate::linalg::RANK_REL_TOL`] relative
/// threshold). Returns
/// [`Spark::AtLeast`]`(cap + 1)` when all searched subsets were independent.
pub fn spark_bruteforce(f: &DMatrix<f64>, cap: usize) -> Result<Spark> {
    let cols = f.ncols();
    let effective = cap.min(cols);
    if cols > SPARK_SEARCH_MAX_COLS && effective >= cols {
        return Err(Error::SizeLimit(format!(
            "unrestricted spark search is limited to {SPARK_SEARCH_MAX_COLS} columns \
             (got {cols}); pass a smaller cap"
        )));
    }
    // Worst-case subset count before the rows + 1 shortcut below kicks in.
    let mut subsets = 0.0f64;
    let mut c = 1.0f64;
    for k in 1..=effective.min(f.nrows() + 1) {
        c *= (cols - k + 1) as f64 / k as f64;
        subsets += c;
    }
    if subsets > 5e6 {
        return Err(Error::SizeLimit(format!(
            "spark search would test {subsets:.1e} column subsets; lower the cap"
        )));
    }
    // No subset larger than rows + 1 needs testing: any rows + 1 columns
    // are dependent, so the search below always terminates by then.
    for k in 1..=effective {
        if k > f.nrows() {
            return Ok(Spark::Exact(k));
        }
        for subset in (0..cols).combinations(k) {
            let sub = f.select_columns(subset.iter());
            if rank(&sub) < k {
                return Ok(Spark::Exact(k));
            }
        }
    }
    Ok(Spark::AtLeast(effective + 1))
}

/// Specification of a seeded dense Gaussian matrix (the random-ensemble
/// baseline for the experiments).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GaussianMatrixSpec {
    pub rows: usize,
    pub cols: usize,
    pub seed: u64,
}

impl GaussianMatrixSpec {
    /// Materialize the matrix: i.i.d. standard normal entries from the
    /// seeded generator, reproducible across runs.
    pub fn build(&self) -> Result<DMatrix<f64>> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::param("rows/cols", "must be at least 1"));
        }
        let mut rng = substream(self.seed, 0);
        Ok(gaussian_matrix(self.rows, self.cols, &mut rng))
    }
}

/// Dense matrix of i.i.d. standard normal entries drawn from `rng`
/// (row-major draw order).
pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut Stream) -> DMatrix<f64> {
    let data: Vec<f64> = (0..rows * cols).map(|_| rng.sample(StandardNormal)).collect();
    DMatrix::from_row_slice(rows, cols, &data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DEFAULT_BETA;

    fn polar_system(n: u32, p: f64, dim: usize) -> SensingSystem {
        SensingSystem::from_design(n, DEFAULT_BETA, p, dim).unwrap()
    }

    #[test]
    fn split_all_and_none() {
        let t = PolarTransform::new(3, DEFAULT_BETA).unwrap();
        let all: Vec<usize> = (0..8).collect();
        let (a, a_b) = split_columns(&t, &all).unwrap();
        assert_eq!((a.nrows(), a.ncols()), (8, 8));
        assert_eq!(a_b.ncols(), 0);
        assert_eq!(&a, t.dense().unwrap());
        let (a, a_b) = split_columns(&t, &[]).unwrap();
        assert_eq!(a.ncols(), 0);
        assert_eq!(&a_b, t.dense().unwrap());
    }

    #[test]
    fn split_two_by_two() {
        let t = PolarTransform::new(1, DEFAULT_BETA).unwrap();
        let (a, a_b) = split_columns(&t, &[1]).unwrap();
        assert_eq!(a.ncols(), 1);
        assert!((a[(0, 0)] - DEFAULT_BETA).abs() < 1e-15);
        assert_eq!(a[(1, 0)], 1.0);
        assert!((a_b[(0, 0)] - DEFAULT_BETA).abs() < 1e-15);
        assert_eq!(a_b[(1, 0)], 0.0);
    }

    #[test]
    fn split_rejects_bad_indices() {
        let t = PolarTransform::new(2, DEFAULT_BETA).unwrap();
        assert!(split_columns(&t, &[4]).is_err());
        assert!(split_columns(&t, &[1, 1]).is_err());
    }

    #[test]
    fn columns_reassemble_the_transform() {
        let t = PolarTransform::new(4, DEFAULT_BETA).unwrap();
        let sys = polar_system(4, 0.1, 6);
        let h = t.dense().unwrap();
        for (k, &j) in sys.good().iter().enumerate() {
            assert_eq!(sys.coding_matrix().column(k), h.column(j));
        }
        for (k, &j) in sys.bad().iter().enumerate() {
            assert_eq!(sys.frozen_matrix().column(k), h.column(j));
        }
    }

    #[test]
    fn annihilator_basic_cases() {
        // Complement of the first standard basis vector in the plane.
        let a = DMatrix::from_column_slice(2, 1, &[1.0, 0.0]);
        let f = annihilator(&a).unwrap();
        assert_eq!((f.nrows(), f.ncols()), (1, 2));
        assert!(f[(0, 0)].abs() < 1e-14);
        assert!((f[(0, 1)].abs() - 1.0).abs() < 1e-14);

        // Square invertible input has a trivial complement.
        let t = PolarTransform::new(2, DEFAULT_BETA).unwrap();
        let f = annihilator(t.dense().unwrap()).unwrap();
        assert_eq!(f.nrows(), 0);

        // Rank-deficient input is refused.
        let dup = DMatrix::from_column_slice(3, 2, &[1.0, 1.0, 0.0, 1.0, 1.0, 0.0]);
        assert!(matches!(annihilator(&dup), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn system_invariants_across_designs() {
        for n in 1..=6u32 {
            for p in [0.05, 0.1, 0.2] {
                let m = 1usize << n;
                let dim = m - (m / 4).max(1);
                let sys = polar_system(n, p, dim);
                let f = sys.measurement_matrix();
                let fa = f * sys.coding_matrix();
                assert!(fa.amax() <= 1e-10, "n={n} p={p}");
                let gram = f * f.transpose();
                let eye = DMatrix::<f64>::identity(f.nrows(), f.nrows());
                assert!((gram - eye).amax() <= 1e-10);
                assert_eq!(rank(f), m - dim);
            }
        }
    }

    #[test]
    fn preimage_cases() {
        let f = DMatrix::from_row_slice(1, 2, &[0.0, 1.0]);
        let y = min_norm_preimage(&f, &DVector::from_vec(vec![3.0])).unwrap();
        assert_eq!(y.as_slice(), &[0.0, 3.0]);

        let zero = min_norm_preimage(&f, &DVector::zeros(1)).unwrap();
        assert_eq!(zero.as_slice(), &[0.0, 0.0]);

        assert!(min_norm_preimage(&f, &DVector::zeros(2)).is_err());

        let sys = polar_system(4, 0.1, 8);
        let mut rng = substream(3, 0);
        let yp = DVector::from_fn(8, |_, _| rng.sample::<f64, _>(StandardNormal));
        let y = sys.cs_to_analog(&yp).unwrap();
        let back = sys.measure(&y).unwrap();
        assert!((back - &yp).amax() <= 1e-9 * (1.0 + yp.amax()));
    }

    /// For any e, the lifted observation differs from e by an element of
    /// the coding column space, so the measurement of the difference
    /// vanishes.
    #[test]
    fn duality_residual_lives_in_the_code() {
        let sys = polar_system(5, 0.1, 24);
        let mut rng = substream(7, 0);
        let e = DVector::from_fn(32, |_, _| rng.sample::<f64, _>(StandardNormal));
        let yp = sys.measure(&e).unwrap();
        let y = sys.cs_to_analog(&yp).unwrap();
        let diff = &y - &e;
        let proj = sys.measure(&diff).unwrap();
        assert!(proj.norm() <= 1e-9 * diff.norm().max(1.0));
    }

    #[test]
    fn spark_known_cases() {
        // A zero column is dependent on its own.
        let mut z = DMatrix::<f64>::identity(3, 4);
        z.column_mut(3).fill(0.0);
        assert_eq!(spark_bruteforce(&z, 4).unwrap(), Spark::Exact(1));

        // Duplicated identity blocks pair up.
        let eye = DMatrix::<f64>::identity(3, 3);
        let mut ii = DMatrix::zeros(3, 6);
        ii.view_mut((0, 0), (3, 3)).copy_from(&eye);
        ii.view_mut((0, 3), (3, 3)).copy_from(&eye);
        assert_eq!(spark_bruteforce(&ii, 6).unwrap(), Spark::Exact(2));

        // A generic Gaussian fat matrix has full spark = rows + 1.
        let mut rng = substream(11, 0);
        let g = gaussian_matrix(4, 8, &mut rng);
        assert_eq!(spark_bruteforce(&g, 8).unwrap(), Spark::Exact(5));

        // Capped search reports a bound.
        assert_eq!(spark_bruteforce(&g, 3).unwrap(), Spark::AtLeast(4));
    }

    #[test]
    fn spark_refuses_unbounded_large_search() {
        let mut rng = substream(13, 0);
        let wide = gaussian_matrix(4, 30, &mut rng);
        assert!(spark_bruteforce(&wide, 30).is_err());
        // With a modest cap the same matrix is searchable.
        assert_eq!(spark_bruteforce(&wide, 5).unwrap(), Spark::Exact(5));
    }

    #[test]
    fn polar_spark_supports_unique_sparse_recovery() {
        let sys = polar_system(4, 0.1, 8);
        let spark = spark_bruteforce(sys.measurement_matrix(), 16).unwrap();
        // (spark - 1) / 2 >= 1, so 1-sparse vectors are uniquely decodable.
        match spark {
            Spark::Exact(s) => assert!(s >= 3, "spark {s}"),
            Spark::AtLeast(_) => unreachable!("search was uncapped"),
        }
    }

    #[test]
    fn gaussian_matrices_are_seeded() {
        let spec = GaussianMatrixSpec {
            rows: 64,
            cols: 16,
            seed: 42,
        };
        let a = spec.build().unwrap();
        let b = spec.build().unwrap();
        assert_eq!(a, b);
        let c = GaussianMatrixSpec { seed: 43, ..spec }.build().unwrap();
        assert_ne!(a, c);
        assert_eq!(rank(&a), 16);
        assert!(GaussianMatrixSpec {
            rows: 0,
            cols: 1,
            seed: 0
        }
        .build()
        .is_err());
    }
}
