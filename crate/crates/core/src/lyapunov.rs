//! Stationary covariances of the linear models and assumption diagnostics.
//!
//! The continuous model has stationary covariance Q solving
//! `Theta Q + Q Theta* + I = 0`; the discrete model at step eta solves
//! `Theta Q + Q Theta* + eta Theta Q Theta* + I = 0`, equivalently the Stein
//! equation `A Q A* - Q + eta I = 0` with `A = I + eta Theta`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::ensembles::{rho_min, DriftMatrix};
use crate::error::{DriftError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelKind {
    Continuous,
    Discrete { eta: f64 },
}

#[derive(Debug, Clone)]
pub struct StationaryCovariance {
    pub q: DMatrix<f64>,
    pub model: ModelKind,
    pub residual_norm: f64,
}

/// Per-row report on the restricted-convexity and irrepresentability
/// assumptions, plus the stability constants entering the bounds.
#[derive(Debug, Clone, Serialize)]
pub struct AssumptionReport {
    pub row: usize,
    pub support: Vec<usize>,
    pub c_min: f64,
    pub alpha: f64,
    pub rho_min: f64,
    pub d: Option<f64>,
    pub k: usize,
    pub theta_min: f64,
}

/// Solves `Theta Q + Q Theta* + I = 0` by the vectorized Kronecker-sum
/// system. Dense O(p^6); intended for desk scale.
pub fn solve_continuous(theta: &DriftMatrix) -> Result<StationaryCovariance> {
    let th = &theta.entries;
    let p = th.nrows();
    if rho_min(th) <= 0.0 {
        let eig = th.complex_eigenvalues();
        if eig.iter().any(|z| z.re >= 0.0) {
            return Err(DriftError::Unstable);
        }
        // symmetrized part indefinite but spectrum stable: the Lyapunov
        // system is still nonsingular, fall through
    }
    let eye = DMatrix::<f64>::identity(p, p);
    // (I (x) Theta + Theta (x) I) vec(Q) = -vec(I), column-major vec
    let a = eye.kronecker(th) + th.kronecker(&eye);
    let rhs = DVector::from_fn(p * p, |i, _| if i % p == i / p { -1.0 } else { 0.0 });
    let lu = a.lu();
    let v = lu
        .solve(&rhs)
        .ok_or_else(|| DriftError::SingularSystem("continuous Lyapunov solve".into()))?;
    let q_raw = DMatrix::from_column_slice(p, p, v.as_slice());
    let q = (&q_raw + q_raw.transpose()) * 0.5;
    let residual_norm = (th * &q + &q * th.transpose() + &eye).norm();
    Ok(StationaryCovariance { q, model: ModelKind::Continuous, residual_norm })
}

/// Solves the Stein equation `A Q A* - Q + eta I = 0`, A = I + eta*Theta, by
/// squaring: Q_{j+1} = Q_j + A_j Q_j A_j*, A_{j+1} = A_j^2, starting from
/// Q_0 = eta I. Converges geometrically since sigma_max(A) < 1.
pub fn solve_discrete(theta: &DriftMatrix, eta: f64) -> Result<StationaryCovariance> {
    let th = &theta.entries;
    let p = th.nrows();
    if eta <= 0.0 {
        return Err(DriftError::InvalidParameter("eta must be > 0".into()));
    }
    let a0 = DMatrix::<f64>::identity(p, p) + th * eta;
    let sigma_max = a0.singular_values().max();
    if sigma_max >= 1.0 {
        return Err(DriftError::DiscreteUnstable { sigma_max });
    }
    let mut q = DMatrix::<f64>::identity(p, p) * eta;
    let mut a = a0;
    for _ in 0..128 {
        let inc = &a * &q * a.transpose();
        let inc_norm = inc.norm();
        q += inc;
        if inc_norm <= 1e-16 * q.norm() {
            break;
        }
        a = &a * &a;
    }
    let q = (&q + q.transpose()) * 0.5;
    let eye = DMatrix::<f64>::identity(p, p);
    let residual_norm =
        (th * &q + &q * th.transpose() + (th * &q * th.transpose()) * eta + &eye).norm();
    Ok(StationaryCovariance { q, model: ModelKind::Discrete { eta }, residual_norm })
}

/// l-infinity operator norm (max row l1 norm).
pub fn op_inf_norm(m: &DMatrix<f64>) -> f64 {
    (0..m.nrows())
        .map(|i| m.row(i).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Support of a drift row: exact nonzero test for generated matrices, with a
/// 1e-12 floor for matrices loaded from text.
pub fn row_support(theta: &DMatrix<f64>, row: usize) -> Vec<usize> {
    (0..theta.ncols()).filter(|&j| theta[(row, j)].abs() > 1e-12).collect()
}

fn submatrix(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

/// Evaluates the restricted-convexity constant C_min, the irrepresentability
/// margin alpha, and the stability constants for one row of `theta`.
///
/// alpha may come out negative (assumption violated); it is reported, not an
/// error. An empty support row is degenerate: alpha = 1, C_min undefined.
pub fn assumption_report(
    theta: &DriftMatrix,
    cov: &StationaryCovariance,
    row: usize,
    eta: Option<f64>,
) -> Result<AssumptionReport> {
    let th = &theta.entries;
    let p = th.nrows();
    if row >= p {
        return Err(DriftError::InvalidParameter(format!("row {row} out of range for p={p}")));
    }
    if cov.q.nrows() != p {
        return Err(DriftError::DimensionMismatch("covariance does not match theta".into()));
    }
    let support = row_support(th, row);
    let rho = rho_min(th);
    let d = match eta {
        Some(eta) => {
            let a = DMatrix::<f64>::identity(p, p) + th * eta;
            Some((1.0 - a.singular_values().max()) / eta)
        }
        None => None,
    };
    if support.is_empty() {
        return Ok(AssumptionReport {
            row,
            support,
            c_min: f64::NAN,
            alpha: 1.0,
            rho_min: rho,
            d,
            k: 0,
            theta_min: 0.0,
        });
    }
    let comp: Vec<usize> = (0..p).filter(|j| !support.contains(j)).collect();
    let qss = submatrix(&cov.q, &support, &support);
    let c_min = qss.symmetric_eigenvalues().min();
    let alpha = if comp.is_empty() {
        1.0
    } else {
        let qcs = submatrix(&cov.q, &comp, &support);
        let inv = qss
            .clone()
            .try_inverse()
            .ok_or_else(|| DriftError::SingularSystem("on-support covariance block".into()))?;
        1.0 - op_inf_norm(&(qcs * inv))
    };
    let theta_min =
        support.iter().map(|&j| th[(row, j)].abs()).fold(f64::INFINITY, f64::min);
    Ok(AssumptionReport {
        row,
        k: support.len(),
        support,
        c_min,
        alpha,
        rho_min: rho,
        d,
        theta_min,
    })
}
