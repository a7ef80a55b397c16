//! Row-wise l1-regularized least squares on trajectory data.
//!
//! For each target row r the negative log-likelihood is the quadratic
//! L(theta) = (1/2) theta* Qhat theta - <theta, ghat_r> + const, with
//! Qhat = (1/n) sum_t F_t F_t* and ghat_r = (1/(n eta)) sum_t F_t
//! (x_r(t+1) - x_r(t)). Features are evaluated at the left endpoint (Ito
//! convention); anything else biases the estimator.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::basis::BasisSet;
use crate::error::{DriftError, Result};
use crate::lyapunov::{op_inf_norm, StationaryCovariance};
use crate::sim::Trajectory;

#[derive(Debug, Clone)]
pub struct NormalEquations {
    pub qhat: DMatrix<f64>,
    pub ghat: DVector<f64>,
    pub n: usize,
    pub eta: f64,
    pub row: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct RlsConfig {
    pub lambda: f64,
    /// Maximum allowed KKT violation at termination.
    pub tol: f64,
    /// Sweep budget for coordinate descent.
    pub max_iter: usize,
    /// Relative coefficient magnitude treated as zero when extracting signs.
    pub zero_threshold: f64,
}

impl RlsConfig {
    pub fn with_lambda(lambda: f64) -> Self {
        RlsConfig { lambda, tol: 1e-8, max_iter: 100_000, zero_threshold: 1e-6 }
    }
}

#[derive(Debug, Clone)]
pub struct RecoveryResult {
    pub theta_hat: DMatrix<f64>,
    pub signed_support: DMatrix<i8>,
    pub per_row_iters: Vec<usize>,
    pub per_row_kkt_residual: Vec<f64>,
    pub lambda_used: f64,
    pub converged: bool,
}

/// Accumulates normal equations for all p target rows in one pass, without
/// storing the trajectory. Qhat is shared across rows; G holds ghat for
/// every row (p x m).
pub struct NormalEqBuilder<'b> {
    basis: &'b BasisSet,
    pub qhat_sum: DMatrix<f64>,
    pub g_sum: DMatrix<f64>,
    pub n: usize,
    pub eta: f64,
    p_out: usize,
    feat: Vec<f64>,
}

impl<'b> NormalEqBuilder<'b> {
    /// `p_out` is the number of target coordinates (p for the linear and
    /// monomial models, p*d velocity coordinates for mass-spring).
    pub fn new(basis: &'b BasisSet, p_out: usize, eta: f64) -> Self {
        NormalEqBuilder {
            basis,
            qhat_sum: DMatrix::zeros(basis.m, basis.m),
            g_sum: DMatrix::zeros(p_out, basis.m),
            n: 0,
            eta,
            p_out,
            feat: vec![0.0; basis.m],
        }
    }

    /// One transition: features at `x`, increments taken from
    /// `target_next[r] - target[r]` for each target coordinate r.
    pub fn push(&mut self, x: &[f64], target: &[f64], target_next: &[f64]) -> Result<()> {
        if target.len() != self.p_out || target_next.len() != self.p_out {
            return Err(DriftError::DimensionMismatch("target length mismatch".into()));
        }
        self.basis.eval_into(x, &mut self.feat)?;
        let m = self.basis.m;
        for a in 0..m {
            let fa = self.feat[a];
            if fa == 0.0 {
                continue;
            }
            for b in a..m {
                self.qhat_sum[(a, b)] += fa * self.feat[b];
            }
            for r in 0..self.p_out {
                self.g_sum[(r, a)] += fa * (target_next[r] - target[r]);
            }
        }
        self.n += 1;
        Ok(())
    }

    /// Normalized (Qhat, G) with Qhat symmetrized from its upper triangle.
    pub fn finish(mut self) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        if self.n == 0 {
            return Err(DriftError::InvalidParameter("no transitions accumulated".into()));
        }
        let m = self.basis.m;
        for a in 0..m {
            for b in 0..a {
                self.qhat_sum[(a, b)] = self.qhat_sum[(b, a)];
            }
        }
        let qhat = self.qhat_sum / self.n as f64;
        let g = self.g_sum / (self.n as f64 * self.eta);
        Ok((qhat, g))
    }
}

/// Builds (Qhat, G) for every target coordinate of a stored trajectory. For
/// mass-spring trajectories the targets are the velocity coordinates.
pub fn build_all_normal_equations(
    traj: &Trajectory,
    basis: &BasisSet,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let n = traj.n();
    if n == 0 {
        return Err(DriftError::InvalidParameter("trajectory has no transitions".into()));
    }
    let width = traj.states.ncols();
    if width != basis.input_len {
        return Err(DriftError::DimensionMismatch(format!(
            "trajectory width {width} does not match basis input length {}",
            basis.input_len
        )));
    }
    let p_out = basis.target_count();
    let offset = basis.target_offset();
    let mut builder = NormalEqBuilder::new(basis, p_out, traj.eta);
    let mut x = vec![0.0; width];
    let mut tgt = vec![0.0; p_out];
    let mut tgt_next = vec![0.0; p_out];
    for t in 0..n {
        for c in 0..width {
            x[c] = traj.states[(t, c)];
        }
        for r in 0..p_out {
            tgt[r] = traj.states[(t, offset + r)];
            tgt_next[r] = traj.states[(t + 1, offset + r)];
        }
        builder.push(&x, &tgt, &tgt_next)?;
    }
    builder.finish()
}

/// Normal equations for a single target row.
pub fn build_normal_equations(
    traj: &Trajectory,
    basis: &BasisSet,
    row: usize,
) -> Result<NormalEquations> {
    let (qhat, g) = build_all_normal_equations(traj, basis)?;
    if row >= g.nrows() {
        return Err(DriftError::InvalidParameter(format!(
            "row {row} out of range for {} targets",
            g.nrows()
        )));
    }
    Ok(NormalEquations {
        qhat,
        ghat: g.row(row).transpose(),
        n: traj.n(),
        eta: traj.eta,
        row,
    })
}

/// The likelihood evaluated as the raw sum over transitions (used as an
/// independent oracle against the quadratic form).
pub fn raw_objective(
    traj: &Trajectory,
    basis: &BasisSet,
    row: usize,
    theta: &DVector<f64>,
) -> Result<f64> {
    let n = traj.n();
    let width = traj.states.ncols();
    let offset = basis.target_offset();
    let mut feat = vec![0.0; basis.m];
    let mut x = vec![0.0; width];
    let mut acc = 0.0;
    for t in 0..n {
        for c in 0..width {
            x[c] = traj.states[(t, c)];
        }
        basis.eval_into(&x, &mut feat)?;
        let proj: f64 = feat.iter().zip(theta.iter()).map(|(f, th)| f * th).sum();
        let dx = traj.states[(t + 1, offset + row)] - traj.states[(t, offset + row)];
        acc += 0.5 * proj * proj - proj * dx / traj.eta;
    }
    Ok(acc / n as f64)
}

fn soft_threshold(z: f64, lambda: f64) -> f64 {
    if z > lambda {
        z - lambda
    } else if z < -lambda {
        z + lambda
    } else {
        0.0
    }
}

/// Largest KKT violation of the l1 objective at theta.
pub fn kkt_violation(ne: &NormalEquations, theta: &DVector<f64>, lambda: f64) -> f64 {
    let grad = &ne.qhat * theta - &ne.ghat;
    let mut worst = 0.0_f64;
    for j in 0..theta.len() {
        let v = if theta[j] != 0.0 {
            (grad[j] + lambda * theta[j].signum()).abs()
        } else {
            (grad[j].abs() - lambda).max(0.0)
        };
        worst = worst.max(v);
    }
    worst
}

/// Cyclic coordinate descent with exact scalar soft-threshold updates.
/// Returns (theta, sweeps, kkt_residual, converged).
pub fn solve_rls(ne: &NormalEquations, cfg: &RlsConfig) -> Result<(DVector<f64>, usize, f64, bool)> {
    solve_rls_from(ne, cfg, DVector::zeros(ne.qhat.nrows()))
}

/// [`solve_rls`] with a warm start, useful when descending a lambda grid.
pub fn solve_rls_from(
    ne: &NormalEquations,
    cfg: &RlsConfig,
    init: DVector<f64>,
) -> Result<(DVector<f64>, usize, f64, bool)> {
    if cfg.tol <= 0.0 || cfg.max_iter == 0 || cfg.lambda < 0.0 {
        return Err(DriftError::InvalidParameter(
            "need tol > 0, max_iter >= 1, lambda >= 0".into(),
        ));
    }
    let m = ne.qhat.nrows();
    if init.len() != m {
        return Err(DriftError::DimensionMismatch("warm start length mismatch".into()));
    }
    let mut theta = init;
    // residual r = Qhat * theta, maintained incrementally
    let mut r = &ne.qhat * &theta;
    let mut sweeps = 0usize;
    let mut converged = false;
    while sweeps < cfg.max_iter {
        sweeps += 1;
        let mut max_delta = 0.0_f64;
        for j in 0..m {
            let qjj = ne.qhat[(j, j)];
            if qjj <= 0.0 {
                continue;
            }
            let old = theta[j];
            // partial residual excluding coordinate j
            let z = ne.ghat[j] - (r[j] - qjj * old);
            let new = soft_threshold(z, cfg.lambda) / qjj;
            if new != old {
                let delta = new - old;
                r.axpy(delta, &ne.qhat.column(j).clone_owned(), 1.0);
                theta[j] = new;
                max_delta = max_delta.max(delta.abs() * qjj);
            }
        }
        if max_delta <= 0.1 * cfg.tol {
            if kkt_violation(ne, &theta, cfg.lambda) <= cfg.tol {
                converged = true;
                break;
            }
        }
    }
    let kkt = kkt_violation(ne, &theta, cfg.lambda);
    if kkt <= cfg.tol {
        converged = true;
    }
    Ok((theta, sweeps, kkt, converged))
}

fn clamp_signs(theta: &DMatrix<f64>, zero_threshold: f64) -> DMatrix<i8> {
    let scale = theta.iter().fold(0.0_f64, |acc, v| acc.max(v.abs())).max(1.0);
    let cut = zero_threshold * scale;
    theta.map(|v| {
        if v > cut {
            1
        } else if v < -cut {
            -1
        } else {
            0
        }
    })
}

/// Row-wise l1 estimation over all target rows of a trajectory.
pub fn recover(traj: &Trajectory, basis: &BasisSet, cfg: &RlsConfig) -> Result<RecoveryResult> {
    let (qhat, g) = build_all_normal_equations(traj, basis)?;
    recover_from_normal_equations(&qhat, &g, traj.n(), traj.eta, cfg)
}

/// Same as [`recover`] but starting from precomputed normal equations.
pub fn recover_from_normal_equations(
    qhat: &DMatrix<f64>,
    g: &DMatrix<f64>,
    n: usize,
    eta: f64,
    cfg: &RlsConfig,
) -> Result<RecoveryResult> {
    let p_out = g.nrows();
    let rows: Result<Vec<_>> = (0..p_out)
        .into_par_iter()
        .map(|r| {
            let ne = NormalEquations {
                qhat: qhat.clone(),
                ghat: g.row(r).transpose(),
                n,
                eta,
                row: r,
            };
            solve_rls(&ne, cfg)
        })
        .collect();
    let rows = rows?;
    let m = qhat.nrows();
    let mut theta_hat = DMatrix::zeros(p_out, m);
    let mut iters = Vec::with_capacity(p_out);
    let mut kkts = Vec::with_capacity(p_out);
    let mut converged = true;
    for (r, (theta, sweeps, kkt, conv)) in rows.into_iter().enumerate() {
        theta_hat.row_mut(r).copy_from(&theta.transpose());
        iters.push(sweeps);
        kkts.push(kkt);
        converged &= conv;
    }
    let signed_support = clamp_signs(&theta_hat, cfg.zero_threshold);
    Ok(RecoveryResult {
        theta_hat,
        signed_support,
        per_row_iters: iters,
        per_row_kkt_residual: kkts,
        lambda_used: cfg.lambda,
        converged,
    })
}

/// Unpenalized least squares followed by the threshold decision rule:
/// |theta| < theta_min/2 -> 0, otherwise sign(theta).
pub fn threshold_estimator(
    traj: &Trajectory,
    basis: &BasisSet,
    theta_min: f64,
) -> Result<RecoveryResult> {
    let (qhat, g) = build_all_normal_equations(traj, basis)?;
    threshold_from_normal_equations(&qhat, &g, theta_min)
}

/// Threshold rule applied to precomputed normal equations.
pub fn threshold_from_normal_equations(
    qhat: &DMatrix<f64>,
    g: &DMatrix<f64>,
    theta_min: f64,
) -> Result<RecoveryResult> {
    if theta_min <= 0.0 {
        return Err(DriftError::InvalidParameter("theta_min must be > 0".into()));
    }
    let lu = qhat.clone().lu();
    let theta_t = lu
        .solve(&g.transpose())
        .ok_or_else(|| DriftError::SingularSystem("unpenalized normal equations".into()))?;
    let theta_hat = theta_t.transpose();
    let half = theta_min / 2.0;
    let signed_support = theta_hat.map(|v| {
        if v > half {
            1
        } else if v < -half {
            -1
        } else {
            0
        }
    });
    let p_out = theta_hat.nrows();
    Ok(RecoveryResult {
        theta_hat,
        signed_support,
        per_row_iters: vec![0; p_out],
        per_row_kkt_residual: vec![0.0; p_out],
        lambda_used: 0.0,
        converged: true,
    })
}

/// The four sufficient conditions for exact signed-support recovery of one
/// row, evaluated at the true coefficients.
#[derive(Debug, Clone, Copy)]
pub struct SufficientConditions {
    /// |Ghat|_inf <= lambda * alpha / 3
    pub score_small: bool,
    /// |Ghat_S|_inf <= theta_min * C_min / (4k) - lambda
    pub score_small_on_support: bool,
    /// op-inf norm of (Qhat - Q0) off-support-to-support block <= (alpha/12) C_min/sqrt(k)
    pub covariance_off_support: bool,
    /// same bound for the on-support block
    pub covariance_on_support: bool,
}

impl SufficientConditions {
    pub fn all(&self) -> bool {
        self.score_small
            && self.score_small_on_support
            && self.covariance_off_support
            && self.covariance_on_support
    }
}

/// Evaluates the recovery conditions for row `ne.row` given the true
/// coefficient row and the exact stationary covariance.
#[allow(clippy::too_many_arguments)]
pub fn proposition1_check(
    ne: &NormalEquations,
    theta0_row: &DVector<f64>,
    q0: &StationaryCovariance,
    lambda: f64,
    alpha: f64,
    c_min: f64,
    theta_min: f64,
    k: usize,
) -> Result<SufficientConditions> {
    let m = ne.qhat.nrows();
    if theta0_row.len() != m || q0.q.nrows() != m {
        return Err(DriftError::DimensionMismatch(
            "theta0/Q0 dimensions do not match the normal equations".into(),
        ));
    }
    if k == 0 {
        return Err(DriftError::EmptySupport { row: ne.row });
    }
    let score = &ne.ghat - &ne.qhat * theta0_row;
    let support: Vec<usize> = (0..m).filter(|&j| theta0_row[j].abs() > 1e-12).collect();
    let comp: Vec<usize> = (0..m).filter(|j| !support.contains(j)).collect();
    let inf = |v: &DVector<f64>| v.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    let sub = |mat: &DMatrix<f64>, rows: &[usize], cols: &[usize]| {
        DMatrix::from_fn(rows.len(), cols.len(), |i, j| mat[(rows[i], cols[j])])
    };
    let score_s = DVector::from_iterator(support.len(), support.iter().map(|&j| score[j]));
    let dq = &ne.qhat - &q0.q;
    let budget = (alpha / 12.0) * c_min / (k as f64).sqrt();
    Ok(SufficientConditions {
        score_small: inf(&score) <= lambda * alpha / 3.0,
        score_small_on_support: inf(&score_s) <= theta_min * c_min / (4.0 * k as f64) - lambda,
        covariance_off_support: comp.is_empty()
            || op_inf_norm(&sub(&dq, &comp, &support)) <= budget,
        covariance_on_support: op_inf_norm(&sub(&dq, &support, &support)) <= budget,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{linear_basis, mass_spring_basis};
    use crate::ensembles::DriftMatrix;
    use crate::lyapunov::{solve_discrete, ModelKind};
    use crate::sim::{sample_stationary_init, simulate_discrete, Trajectory};
    use approx::assert_relative_eq;

    fn toy_ne(qhat: DMatrix<f64>, ghat: DVector<f64>) -> NormalEquations {
        NormalEquations { qhat, ghat, n: 1, eta: 1.0, row: 0 }
    }

    #[test]
    fn constant_trajectory_normal_equations() {
        let c = 3.0;
        let traj = Trajectory {
            states: DMatrix::from_element(5, 1, c),
            eta: 0.5,
            p: 1,
            seed: 0,
            model_tag: "discrete".into(),
        };
        let ne = build_normal_equations(&traj, &linear_basis(1), 0).unwrap();
        assert_relative_eq!(ne.qhat[(0, 0)], c * c, epsilon = 1e-14);
        assert_eq!(ne.ghat[0], 0.0);
    }

    #[test]
    fn gradient_matches_finite_differences_of_raw_sum() {
        let th = DriftMatrix::custom(DMatrix::from_row_slice(
            2,
            2,
            &[-1.0, 0.4, -0.2, -1.2],
        ));
        let x0 = DVector::from_vec(vec![0.5, -0.3]);
        let traj = simulate_discrete(&th, 0.1, 200, &x0, 13).unwrap();
        let basis = linear_basis(2);
        let ne = build_normal_equations(&traj, &basis, 0).unwrap();
        let mut rng = crate::seed::rng(5);
        use rand::Rng;
        for _ in 0..10 {
            let theta = DVector::from_fn(2, |_, _| rng.gen_range(-1.0..1.0));
            let analytic = &ne.qhat * &theta - &ne.ghat;
            let h = 1e-5;
            for j in 0..2 {
                let mut up = theta.clone();
                up[j] += h;
                let mut dn = theta.clone();
                dn[j] -= h;
                let fd = (raw_objective(&traj, &basis, 0, &up).unwrap()
                    - raw_objective(&traj, &basis, 0, &dn).unwrap())
                    / (2.0 * h);
                assert_relative_eq!(analytic[j], fd, max_relative = 1e-6, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn quadratic_form_reproduces_raw_objective() {
        let th = DriftMatrix::custom(DMatrix::from_diagonal_element(2, 2, -1.0));
        let x0 = DVector::from_vec(vec![1.0, 2.0]);
        let traj = simulate_discrete(&th, 0.1, 100, &x0, 3).unwrap();
        let basis = linear_basis(2);
        let ne = build_normal_equations(&traj, &basis, 1).unwrap();
        let theta = DVector::from_vec(vec![0.3, -0.8]);
        let quad = 0.5 * (theta.transpose() * &ne.qhat * &theta)[(0, 0)] - ne.ghat.dot(&theta);
        let raw = raw_objective(&traj, &basis, 1, &theta).unwrap();
        assert_relative_eq!(quad, raw, max_relative = 1e-12);
    }

    #[test]
    fn stationary_qhat_approaches_covariance() {
        let th = DriftMatrix::custom(DMatrix::from_row_slice(
            2,
            2,
            &[-1.0, 0.2, 0.2, -1.0],
        ));
        let eta = 0.1;
        let cov = solve_discrete(&th, eta).unwrap();
        let x0 = sample_stationary_init(&cov, 1).unwrap();
        let n = 200_000;
        let traj = simulate_discrete(&th, eta, n, &x0, 2).unwrap();
        let ne = build_normal_equations(&traj, &linear_basis(2), 0).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                // autocorrelated samples: inflate the iid SE by the mixing time ~1/eta
                let se = ((cov.q[(i, i)] * cov.q[(j, j)] + cov.q[(i, j)].powi(2)) * 10.0
                    / (n as f64 * eta))
                    .sqrt();
                assert!(
                    (ne.qhat[(i, j)] - cov.q[(i, j)]).abs() < 3.0 * se,
                    "({i},{j}): {} vs {}",
                    ne.qhat[(i, j)],
                    cov.q[(i, j)]
                );
            }
        }
    }

    #[test]
    fn full_shrinkage_gives_zero() {
        let ne = toy_ne(
            DMatrix::from_row_slice(2, 2, &[1.0, 0.2, 0.2, 1.0]),
            DVector::from_vec(vec![0.5, -0.4]),
        );
        let cfg = RlsConfig::with_lambda(0.5);
        let (theta, _, _, conv) = solve_rls(&ne, &cfg).unwrap();
        assert!(conv);
        assert_eq!(theta, DVector::zeros(2));
    }

    #[test]
    fn scalar_soft_threshold() {
        let ne = toy_ne(DMatrix::from_element(1, 1, 1.0), DVector::from_element(1, 1.0));
        let (theta, _, _, conv) = solve_rls(&ne, &RlsConfig::with_lambda(0.3)).unwrap();
        assert!(conv);
        assert_relative_eq!(theta[0], 0.7, epsilon = 1e-14);
    }

    #[test]
    fn lambda_zero_matches_dense_solve() {
        let qhat = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.1, 0.3, 1.5, -0.2, 0.1, -0.2, 1.0]);
        let ghat = DVector::from_vec(vec![1.0, -0.5, 0.25]);
        let ne = toy_ne(qhat.clone(), ghat.clone());
        let (theta, _, kkt, conv) = solve_rls(&ne, &RlsConfig::with_lambda(0.0)).unwrap();
        assert!(conv, "kkt={kkt}");
        let oracle = qhat.lu().solve(&ghat).unwrap();
        assert!((theta - oracle).norm() < 1e-8);
    }

    #[test]
    fn kkt_certificate_holds() {
        let qhat = DMatrix::from_row_slice(3, 3, &[2.0, 0.5, 0.2, 0.5, 1.2, 0.1, 0.2, 0.1, 0.9]);
        let ghat = DVector::from_vec(vec![0.7, -0.9, 0.05]);
        let ne = toy_ne(qhat, ghat);
        let cfg = RlsConfig::with_lambda(0.1);
        let (theta, _, kkt, conv) = solve_rls(&ne, &cfg).unwrap();
        assert!(conv);
        assert!(kkt <= cfg.tol);
        assert!(kkt_violation(&ne, &theta, cfg.lambda) <= cfg.tol);
    }

    #[test]
    fn objective_decreases_across_sweeps() {
        // run solver with sweep budgets 1..5 and check objective monotone
        let qhat = DMatrix::from_row_slice(2, 2, &[1.5, 0.6, 0.6, 2.0]);
        let ghat = DVector::from_vec(vec![1.0, -1.0]);
        let obj = |theta: &DVector<f64>| {
            0.5 * (theta.transpose() * &qhat * theta)[(0, 0)] - ghat.dot(theta)
                + 0.2 * theta.iter().map(|v| v.abs()).sum::<f64>()
        };
        let mut prev = obj(&DVector::zeros(2));
        for budget in 1..=5 {
            let ne = toy_ne(qhat.clone(), ghat.clone());
            let cfg = RlsConfig { max_iter: budget, ..RlsConfig::with_lambda(0.2) };
            let (theta, _, _, _) = solve_rls(&ne, &cfg).unwrap();
            let val = obj(&theta);
            assert!(val <= prev + 1e-14, "budget {budget}");
            prev = val;
        }
    }

    #[test]
    fn recover_deterministic_and_huge_lambda_empty() {
        let th = DriftMatrix::custom(DMatrix::from_diagonal_element(3, 3, -1.0));
        let x0 = DVector::from_vec(vec![1.0, 0.5, -0.5]);
        let traj = simulate_discrete(&th, 0.1, 300, &x0, 4).unwrap();
        let basis = linear_basis(3);
        let a = recover(&traj, &basis, &RlsConfig::with_lambda(0.05)).unwrap();
        let b = recover(&traj, &basis, &RlsConfig::with_lambda(0.05)).unwrap();
        assert_eq!(a.theta_hat, b.theta_hat);
        let z = recover(&traj, &basis, &RlsConfig::with_lambda(1e6)).unwrap();
        assert!(z.signed_support.iter().all(|&s| s == 0));
    }

    #[test]
    fn threshold_rule_application() {
        // build normal equations whose lambda=0 solve is exactly theta_hat
        let theta_hat = DVector::from_vec(vec![0.6, -0.2, 0.9]);
        let qhat = DMatrix::identity(3, 3);
        let g = DMatrix::from_row_slice(1, 3, &[0.6, -0.2, 0.9]);
        let res = threshold_from_normal_equations(&qhat, &g, 1.0).unwrap();
        assert_eq!(res.theta_hat.row(0).transpose(), theta_hat);
        assert_eq!(res.signed_support.row(0).iter().copied().collect::<Vec<i8>>(), vec![1, 0, 1]);
    }

    #[test]
    fn prop1_zero_noise_and_exact_covariance() {
        let q0 = StationaryCovariance {
            q: DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.1, 0.8]),
            model: ModelKind::Continuous,
            residual_norm: 0.0,
        };
        let theta0 = DVector::from_vec(vec![-1.0, 0.0]);
        // ghat = qhat theta0 makes the score vanish; qhat = q0 exactly
        let ne = NormalEquations {
            qhat: q0.q.clone(),
            ghat: &q0.q * &theta0,
            n: 10,
            eta: 0.1,
            row: 0,
        };
        let (c_min, alpha, theta_min, k) = (0.9, 0.5, 1.0, 1usize);
        let lam = theta_min * c_min / (4.0 * k as f64) * 0.5;
        let cond = proposition1_check(&ne, &theta0, &q0, lam, alpha, c_min, theta_min, k).unwrap();
        assert!(cond.all());
        // lambda above the support budget breaks condition 2
        let lam_big = theta_min * c_min / (4.0 * k as f64) + 0.01;
        let cond2 =
            proposition1_check(&ne, &theta0, &q0, lam_big, alpha, c_min, theta_min, k).unwrap();
        assert!(!cond2.score_small_on_support);
    }

    #[test]
    fn mass_spring_targets_are_velocities() {
        let basis = mass_spring_basis(2, 1);
        // states [q1, q2, v1, v2]
        let states = DMatrix::from_row_slice(
            3,
            4,
            &[0.0, 1.0, 0.5, -0.5, 0.05, 0.95, 0.4, -0.4, 0.09, 0.91, 0.3, -0.3],
        );
        let traj =
            Trajectory { states, eta: 0.1, p: 2, seed: 0, model_tag: "mass-spring".into() };
        let (qhat, g) = build_all_normal_equations(&traj, &basis).unwrap();
        assert_eq!(qhat.nrows(), basis.m);
        assert_eq!(g.nrows(), 2); // one target row per velocity coordinate
    }
}
