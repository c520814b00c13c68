//! Primal-dual interior-point solvers for the two linear programs behind
//! sparse recovery.
//!
//! Both are Mehrotra predictor-corrector methods specialized to their
//! problem structure, so the per-iteration cost is a single Cholesky
//! factorization of a small normal-equations matrix:
//!
//! * residual regression `min_x ||y - A x||_1` reduces to an `N x N` system
//!   in the signal variables (`A` is `M x N`, tall);
//! * basis pursuit `min ||e||_1 s.t. F e = y'` reduces to an `R x R` system
//!   in the equality multipliers (`F` is `R x C`, wide).
//!
//! They share no code path on purpose: the pipeline identity between the
//! two programs is one of the things the test suite checks, and that check
//! is only meaningful if the routes are independent.
//!
//! Interior-point iterates converge to the analytic center of the optimal
//! face, so the dual vector reported by basis pursuit supports a strict
//! uniqueness test: if every off-support dual coordinate is bounded away
//! from one and the support columns are independent, the minimizer is
//! unique.

use nalgebra::{DMatrix, DVector};

use crate::decode::{Certificate, DecodeResult, DecodeStatus};
use crate::error::Error;
use crate::linalg::{has_full_column_rank, lstsq, rank};
use crate::Result;

/// Default relative tolerance on the duality gap and residuals.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Fraction of the distance to the boundary taken each step.
const STEP_DAMPING: f64 = 0.99;

/// Ratio test: largest step in `[0, 1]` keeping `v + a * dv > 0`.
fn max_step(v: &DVector<f64>, dv: &DVector<f64>) -> f64 {
    let mut a = 1.0f64;
    for i in 0..v.len() {
        if dv[i] < 0.0 {
            a = a.min(-v[i] / dv[i]);
        }
    }
    a
}

fn cholesky_with_ridge(mut m: DMatrix<f64>) -> Option<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
    let n = m.nrows();
    if n == 0 {
        return None;
    }
    let scale = m.trace().abs().max(1.0) / n as f64;
    let mut ridge = 0.0;
    for _ in 0..4 {
        let attempt = if ridge == 0.0 {
            m.clone()
        } else {
            let mut r = m.clone();
            for i in 0..n {
                r[(i, i)] += ridge;
            }
            r
        };
        if let Some(ch) = attempt.cholesky() {
            return Some(ch);
        }
        ridge = if ridge == 0.0 { 1e-14 * scale } else { ridge * 100.0 };
    }
    // Last resort: heavily regularized.
    for i in 0..n {
        m[(i, i)] += 1e-8 * scale;
    }
    m.cholesky()
}

/// Minimize `||y - A x||_1` over `x`.
///
/// `A` must have full column rank and at least as many rows as columns
/// (square systems are allowed: the minimum is then an exact solve). The
/// result carries the estimate `x`, the dual certificate residuals, and the
/// achieved duality gap; `status` is `NotConverged` if the iteration cap
/// `10 (M + N)` is hit first.
pub fn l1_decode(a: &DMatrix<f64>, y: &DVector<f64>, tol: f64) -> Result<DecodeResult> {
    let (m, n) = (a.nrows(), a.ncols());
    if y.len() != m {
        return Err(Error::DimensionMismatch {
            context: "regression right-hand side",
            expected: m,
            got: y.len(),
        });
    }
    if n == 0 || n > m {
        return Err(Error::param(
            "A",
            "regression needs 1 <= columns <= rows",
        ));
    }
    if !has_full_column_rank(a) {
        return Err(Error::DegenerateInput(
            "regression matrix is column rank deficient".to_string(),
        ));
    }
    let max_iter = 10 * (m + n);

    // Interior start: least-squares center, slabs opened by a margin.
    let mut x = lstsq(a, y)?;
    let mut r = y - a * &x;
    let margin = 1.0 + 0.1 * r.amax();
    let mut t = r.map(f64::abs).add_scalar(margin);
    let mut s1 = &t - &r;
    let mut s2 = &t + &r;
    let mut l1 = DVector::from_element(m, 0.5);
    let mut l2 = DVector::from_element(m, 0.5);

    let y_scale = 1.0 + y.amax();
    let mut iterations = 0;
    let mut converged = false;

    for iter in 0..max_iter {
        iterations = iter + 1;
        let nu = &l1 - &l2;
        let stat = a.transpose() * &nu; // dual stationarity residual
        let gap = s1.dot(&l1) + s2.dot(&l2);
        let primal = t.sum();
        if stat.amax() <= tol * y_scale && gap <= tol * (1.0 + primal.abs()) {
            converged = true;
            break;
        }

        // Elimination weights; clamped so late-stage tiny slacks cannot
        // poison the normal equations with infinities.
        let w1 = DVector::from_fn(m, |i, _| (l1[i] / s1[i]).clamp(1e-14, 1e14));
        let w2 = DVector::from_fn(m, |i, _| (l2[i] / s2[i]).clamp(1e-14, 1e14));
        let d = DVector::from_fn(m, |i, _| 4.0 * w1[i] * w2[i] / (w1[i] + w2[i]));

        // N x N Schur complement, factored once per iteration.
        let mut ada = DMatrix::zeros(n, n);
        for i in 0..m {
            let row = a.row(i);
            let di = d[i];
            for p in 0..n {
                let v = di * row[p];
                for q in p..n {
                    ada[(p, q)] += v * row[q];
                }
            }
        }
        for p in 0..n {
            for q in 0..p {
                ada[(p, q)] = ada[(q, p)];
            }
        }
        let chol = match cholesky_with_ridge(ada) {
            Some(c) => c,
            None => break,
        };

        let mu = gap / (2 * m) as f64;
        let solve = |c1: &DVector<f64>, c2: &DVector<f64>| {
            // Reduce the Newton system to the x block, then back-substitute.
            let q = DVector::from_fn(m, |i, _| c1[i] / s1[i] + c2[i] / s2[i]);
            let h = DVector::from_fn(m, |i, _| {
                c1[i] / s1[i] - c2[i] / s2[i] - (w1[i] - w2[i]) / (w1[i] + w2[i]) * q[i]
            });
            let rhs = a.transpose() * DVector::from_fn(m, |i, _| h[i] + nu[i]);
            let dx = chol.solve(&rhs);
            let adx = a * &dx;
            let dt = DVector::from_fn(m, |i, _| {
                (q[i] - (w1[i] - w2[i]) * adx[i]) / (w1[i] + w2[i])
            });
            let ds1 = &dt + &adx;
            let ds2 = &dt - &adx;
            let dl1 = DVector::from_fn(m, |i, _| c1[i] / s1[i] - w1[i] * ds1[i]);
            let dl2 = -&dl1;
            (dx, dt, ds1, ds2, dl1, dl2)
        };

        // Predictor: pure Newton toward complementarity zero.
        let c1a = DVector::from_fn(m, |i, _| -s1[i] * l1[i]);
        let c2a = DVector::from_fn(m, |i, _| -s2[i] * l2[i]);
        let (_, _, ds1a, ds2a, dl1a, dl2a) = solve(&c1a, &c2a);
        let apa = max_step(&s1, &ds1a).min(max_step(&s2, &ds2a));
        let ada_step = max_step(&l1, &dl1a).min(max_step(&l2, &dl2a));
        let mu_aff = {
            let mut acc = 0.0;
            for i in 0..m {
                acc += (s1[i] + apa * ds1a[i]) * (l1[i] + ada_step * dl1a[i]);
                acc += (s2[i] + apa * ds2a[i]) * (l2[i] + ada_step * dl2a[i]);
            }
            acc / (2 * m) as f64
        };
        let sigma = (mu_aff / mu).powi(3).clamp(0.0, 1.0);

        // Corrector: recentered target with the affine cross terms.
        let c1 = DVector::from_fn(m, |i, _| sigma * mu - s1[i] * l1[i] - ds1a[i] * dl1a[i]);
        let c2 = DVector::from_fn(m, |i, _| sigma * mu - s2[i] * l2[i] - ds2a[i] * dl2a[i]);
        let (dx, dt, ds1, ds2, dl1, dl2) = solve(&c1, &c2);

        let ap = STEP_DAMPING * max_step(&s1, &ds1).min(max_step(&s2, &ds2));
        let ad = STEP_DAMPING * max_step(&l1, &dl1).min(max_step(&l2, &dl2));
        let ap = ap.min(1.0);
        let ad = ad.min(1.0);

        x += ap * &dx;
        t += ap * &dt;
        for i in 0..m {
            l1[i] = (l1[i] + ad * dl1[i]).max(1e-300);
            l2[i] = (l2[i] + ad * dl2[i]).max(1e-300);
        }
        // Recompute the slabs from the primal iterate so the geometry stays
        // exact; nudge any roundoff-negative slack back inside.
        r = y - a * &x;
        let floor = 1e-300;
        s1 = DVector::from_fn(m, |i, _| (t[i] - r[i]).max(floor));
        s2 = DVector::from_fn(m, |i, _| (t[i] + r[i]).max(floor));
    }

    let nu = &l1 - &l2;
    let objective = r.map(f64::abs).sum();
    let certificate = Certificate {
        objective,
        duality_gap: objective - nu.dot(y),
        primal_residual: 0.0,
        dual_residual: (a.transpose() * &nu).amax(),
        iterations,
        ..Certificate::default()
    };
    Ok(DecodeResult {
        estimate: x,
        status: if converged {
            DecodeStatus::Success
        } else {
            DecodeStatus::NotConverged
        },
        certificate,
    })
}

/// Minimize `||e||_1` subject to `F e = y'`.
///
/// `F` must have full row rank (orthonormal rows in the systems built here,
/// but any full-row-rank matrix is accepted). The certificate records the
/// largest off-support dual coordinate and whether the support columns are
/// independent, which together certify uniqueness of the minimizer.
pub fn basis_pursuit(f: &DMatrix<f64>, y_prime: &DVector<f64>, tol: f64) -> Result<DecodeResult> {
    let (rrows, c) = (f.nrows(), f.ncols());
    if y_prime.len() != rrows {
        return Err(Error::DimensionMismatch {
            context: "measurement vector length",
            expected: rrows,
            got: y_prime.len(),
        });
    }
    if rrows == 0 {
        // Unconstrained: the norm minimizer is zero.
        return Ok(DecodeResult {
            estimate: DVector::zeros(c),
            status: DecodeStatus::Success,
            certificate: Certificate {
                support_size: Some(0),
                max_inactive_dual: Some(0.0),
                support_well_posed: Some(true),
                ..Certificate::default()
            },
        });
    }
    if !has_full_column_rank(&f.transpose()) {
        return Err(Error::DegenerateInput(
            "measurement matrix is row rank deficient".to_string(),
        ));
    }
    let max_iter = 10 * (rrows + c);

    // Feasible-ish start: split the min-norm preimage, open by a margin.
    let e0 = crate::sensing::min_norm_preimage(f, y_prime)?;
    let delta = 1.0 + 0.1 * e0.amax();
    let mut u = DVector::from_fn(c, |i, _| e0[i].max(0.0) + delta);
    let mut v = DVector::from_fn(c, |i, _| (-e0[i]).max(0.0) + delta);
    let mut nu = DVector::<f64>::zeros(rrows);
    let mut su = DVector::from_element(c, 1.0); // 1 - F^T nu
    let mut sv = DVector::from_element(c, 1.0); // 1 + F^T nu

    let y_scale = 1.0 + y_prime.amax();
    let mut iterations = 0;
    let mut converged = false;

    for iter in 0..max_iter {
        iterations = iter + 1;
        let e = &u - &v;
        let rp = y_prime - f * &e;
        let g = f.transpose() * &nu;
        // Dual slack drift (kept near zero by construction).
        let rdu = DVector::from_fn(c, |i, _| 1.0 - g[i] - su[i]);
        let rdv = DVector::from_fn(c, |i, _| 1.0 + g[i] - sv[i]);
        let gap = u.dot(&su) + v.dot(&sv);
        let objective = u.sum() + v.sum();
        if rp.amax() <= tol * y_scale
            && rdu.amax().max(rdv.amax()) <= tol
            && gap <= tol * (1.0 + objective)
        {
            converged = true;
            break;
        }

        let du_w = DVector::from_fn(c, |i, _| (u[i] / su[i]).clamp(1e-14, 1e14));
        let dv_w = DVector::from_fn(c, |i, _| (v[i] / sv[i]).clamp(1e-14, 1e14));

        // R x R normal equations F (Du + Dv) F^T.
        let mut fdf = DMatrix::zeros(rrows, rrows);
        for j in 0..c {
            let col = f.column(j);
            let wj = du_w[j] + dv_w[j];
            for p in 0..rrows {
                let vpj = wj * col[p];
                for q in p..rrows {
                    fdf[(p, q)] += vpj * col[q];
                }
            }
        }
        for p in 0..rrows {
            for q in 0..p {
                fdf[(p, q)] = fdf[(q, p)];
            }
        }
        let chol = match cholesky_with_ridge(fdf) {
            Some(ch) => ch,
            None => break,
        };

        let mu = gap / (2 * c) as f64;
        let solve = |cu: &DVector<f64>, cv: &DVector<f64>| {
            // cu, cv are the complementarity targets for the (u, su) and
            // (v, sv) pairs. Eliminate slacks, then primal variables.
            let fu = DVector::from_fn(c, |i, _| {
                (cu[i] - u[i] * rdu[i]) / su[i] - (cv[i] - v[i] * rdv[i]) / sv[i]
            });
            let rhs = &rp - f * fu;
            let dnu = chol.solve(&rhs);
            let gdelta = f.transpose() * &dnu;
            let dsu = DVector::from_fn(c, |i, _| rdu[i] - gdelta[i]);
            let dsv = DVector::from_fn(c, |i, _| rdv[i] + gdelta[i]);
            let du = DVector::from_fn(c, |i, _| (cu[i] - u[i] * dsu[i]) / su[i]);
            let dv = DVector::from_fn(c, |i, _| (cv[i] - v[i] * dsv[i]) / sv[i]);
            (du, dv, dnu, dsu, dsv)
        };

        // Predictor.
        let cua = DVector::from_fn(c, |i, _| -u[i] * su[i]);
        let cva = DVector::from_fn(c, |i, _| -v[i] * sv[i]);
        let (dua, dva, _, dsua, dsva) = solve(&cua, &cva);
        let apa = max_step(&u, &dua).min(max_step(&v, &dva));
        let ada = max_step(&su, &dsua).min(max_step(&sv, &dsva));
        let mu_aff = {
            let mut acc = 0.0;
            for i in 0..c {
                acc += (u[i] + apa * dua[i]) * (su[i] + ada * dsua[i]);
                acc += (v[i] + apa * dva[i]) * (sv[i] + ada * dsva[i]);
            }
            acc / (2 * c) as f64
        };
        let sigma = (mu_aff / mu).powi(3).clamp(0.0, 1.0);

        // Corrector.
        let cu = DVector::from_fn(c, |i, _| sigma * mu - u[i] * su[i] - dua[i] * dsua[i]);
        let cv = DVector::from_fn(c, |i, _| sigma * mu - v[i] * sv[i] - dva[i] * dsva[i]);
        let (du, dv, dnu, dsu, dsv) = solve(&cu, &cv);

        let ap = (STEP_DAMPING * max_step(&u, &du).min(max_step(&v, &dv))).min(1.0);
        let ad = (STEP_DAMPING * max_step(&su, &dsu).min(max_step(&sv, &dsv))).min(1.0);

        u += ap * &du;
        v += ap * &dv;
        nu += ad * &dnu;
        for i in 0..c {
            u[i] = u[i].max(1e-300);
            v[i] = v[i].max(1e-300);
            su[i] = (su[i] + ad * dsu[i]).max(1e-300);
            sv[i] = (sv[i] + ad * dsv[i]).max(1e-300);
        }
    }

    let e = &u - &v;
    let g = f.transpose() * &nu;
    let objective = e.map(f64::abs).sum();
    let rp = y_prime - f * &e;

    // Uniqueness diagnostics from the analytic-center dual.
    let support_tol = 1e-8 * (1.0 + e.amax());
    let support: Vec<usize> = (0..c).filter(|&i| e[i].abs() > support_tol).collect();
    let max_inactive = (0..c)
        .filter(|i| !support.contains(i))
        .map(|i| g[i].abs())
        .fold(0.0f64, f64::max);
    let well_posed = support.len() <= rrows && {
        if support.is_empty() {
            true
        } else {
            let sub = f.select_columns(support.iter());
            rank(&sub) == support.len()
        }
    };

    let certificate = Certificate {
        objective,
        duality_gap: objective - y_prime.dot(&nu),
        primal_residual: rp.amax() / y_scale,
        dual_residual: DVector::from_fn(c, |i, _| (g[i].abs() - 1.0).max(0.0)).amax(),
        iterations,
        support_size: Some(support.len()),
        max_inactive_dual: Some(max_inactive),
        support_well_posed: Some(well_posed),
        ..Certificate::default()
    };
    Ok(DecodeResult {
        estimate: e,
        status: if converged {
            DecodeStatus::Success
        } else {
            DecodeStatus::NotConverged
        },
        certificate,
    })
}
