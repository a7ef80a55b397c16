//! C ABI for drift-matrix generation, Lyapunov solves, simulation, and
//! signed-support estimation.
//!
//! All objects are opaque handles created and destroyed by this library.
//! Every fallible call returns a `DriftrecStatus`; out-parameters are only
//! written on `Ok`. Matrix buffers are row-major `double` arrays.

use nalgebra::DMatrix;

use driftrec::ensembles::{self, DriftMatrix, GraphMode, GraphSpec};
use driftrec::estimator::{recover, RlsConfig};
use driftrec::lyapunov::{assumption_report, solve_continuous, solve_discrete, StationaryCovariance};
use driftrec::basis::linear_basis;
use driftrec::sim::{sample_stationary_init, simulate_discrete, Trajectory};
use driftrec::DriftError;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriftrecStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    Unstable = 3,
    Singular = 4,
    NumericalFailure = 5,
    BudgetExhausted = 6,
    DimensionMismatch = 7,
}

fn status_of(e: &DriftError) -> DriftrecStatus {
    match e {
        DriftError::InvalidParameter(_) | DriftError::Parse(_) => DriftrecStatus::InvalidParameter,
        DriftError::Unstable | DriftError::DiscreteUnstable { .. } => DriftrecStatus::Unstable,
        DriftError::SingularSystem(_) | DriftError::NotPositiveDefinite => DriftrecStatus::Singular,
        DriftError::StabilityBudgetExhausted { .. } | DriftError::GraphBudgetExhausted { .. } => {
            DriftrecStatus::BudgetExhausted
        }
        DriftError::DimensionMismatch(_) | DriftError::EmptySupport { .. } => {
            DriftrecStatus::DimensionMismatch
        }
        _ => DriftrecStatus::NumericalFailure,
    }
}

/// Opaque drift matrix.
pub struct DriftrecMatrix(DriftMatrix);
/// Opaque stationary covariance.
pub struct DriftrecCovariance(StationaryCovariance);
/// Opaque sampled trajectory.
pub struct DriftrecTrajectory(Trajectory);

/// Assumption diagnostics for one row (plain struct, caller-owned).
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct DriftrecAssumptions {
    pub c_min: f64,
    pub alpha: f64,
    pub rho_min: f64,
    /// Discrete stability constant; NaN when no step size was supplied.
    pub d: f64,
    pub support_size: usize,
    pub theta_min: f64,
}

macro_rules! nonnull {
    ($p:expr) => {
        match unsafe { $p.as_ref() } {
            Some(r) => r,
            None => return DriftrecStatus::NullPointer,
        }
    };
}

fn boxed_out<T>(out: *mut *mut T, value: T) -> DriftrecStatus {
    if out.is_null() {
        return DriftrecStatus::NullPointer;
    }
    unsafe { *out = Box::into_raw(Box::new(value)) };
    DriftrecStatus::Ok
}

/// Creates a sparse-shift drift matrix: -shift*I plus Bernoulli(k/p) entries.
#[no_mangle]
pub extern "C" fn driftrec_matrix_sparse_shift(
    p: usize,
    k: usize,
    shift: f64,
    seed: u64,
    out: *mut *mut DriftrecMatrix,
) -> DriftrecStatus {
    match ensembles::gen_sparse_shift(p, k, shift, seed) {
        Ok(m) => boxed_out(out, DriftrecMatrix(m)),
        Err(e) => status_of(&e),
    }
}

/// Creates a signed k-regular drift matrix with entry magnitude theta_min.
#[no_mangle]
pub extern "C" fn driftrec_matrix_signed_regular(
    p: usize,
    k: usize,
    theta_min: f64,
    rho: f64,
    seed: u64,
    out: *mut *mut DriftrecMatrix,
) -> DriftrecStatus {
    match ensembles::gen_signed_regular(p, k, theta_min, rho, seed) {
        Ok(m) => boxed_out(out, DriftrecMatrix(m)),
        Err(e) => status_of(&e),
    }
}

/// Creates a shifted graph-Laplacian drift matrix over a random
/// degree-bounded graph.
#[no_mangle]
pub extern "C" fn driftrec_matrix_laplacian(
    p: usize,
    k: usize,
    m: f64,
    seed: u64,
    out: *mut *mut DriftrecMatrix,
) -> DriftrecStatus {
    let spec = GraphSpec { p, k, mode: GraphMode::BoundedDegreeBernoulli, seed };
    match ensembles::gen_laplacian(&spec, m) {
        Ok(mat) => boxed_out(out, DriftrecMatrix(mat)),
        Err(e) => status_of(&e),
    }
}

/// Wraps caller-supplied row-major data (copied) as a drift matrix.
#[no_mangle]
pub extern "C" fn driftrec_matrix_from_data(
    p: usize,
    data: *const f64,
    out: *mut *mut DriftrecMatrix,
) -> DriftrecStatus {
    if data.is_null() {
        return DriftrecStatus::NullPointer;
    }
    if p == 0 {
        return DriftrecStatus::InvalidParameter;
    }
    let slice = unsafe { std::slice::from_raw_parts(data, p * p) };
    let m = DMatrix::from_row_slice(p, p, slice);
    boxed_out(out, DriftrecMatrix(DriftMatrix::custom(m)))
}

#[no_mangle]
pub extern "C" fn driftrec_matrix_dim(matrix: *const DriftrecMatrix) -> usize {
    match unsafe { matrix.as_ref() } {
        Some(m) => m.0.dim(),
        None => 0,
    }
}

/// Copies the matrix into `out` (row-major, length p*p).
#[no_mangle]
pub extern "C" fn driftrec_matrix_copy_data(
    matrix: *const DriftrecMatrix,
    out: *mut f64,
) -> DriftrecStatus {
    let m = nonnull!(matrix);
    if out.is_null() {
        return DriftrecStatus::NullPointer;
    }
    let p = m.0.dim();
    let dst = unsafe { std::slice::from_raw_parts_mut(out, p * p) };
    for i in 0..p {
        for j in 0..p {
            dst[i * p + j] = m.0.entries[(i, j)];
        }
    }
    DriftrecStatus::Ok
}

#[no_mangle]
pub extern "C" fn driftrec_matrix_free(matrix: *mut DriftrecMatrix) {
    if !matrix.is_null() {
        drop(unsafe { Box::from_raw(matrix) });
    }
}

/// Solves the continuous Lyapunov equation for the stationary covariance.
#[no_mangle]
pub extern "C" fn driftrec_solve_continuous(
    matrix: *const DriftrecMatrix,
    out: *mut *mut DriftrecCovariance,
) -> DriftrecStatus {
    let m = nonnull!(matrix);
    match solve_continuous(&m.0) {
        Ok(c) => boxed_out(out, DriftrecCovariance(c)),
        Err(e) => status_of(&e),
    }
}

/// Solves the discrete-model stationary covariance at step eta.
#[no_mangle]
pub extern "C" fn driftrec_solve_discrete(
    matrix: *const DriftrecMatrix,
    eta: f64,
    out: *mut *mut DriftrecCovariance,
) -> DriftrecStatus {
    let m = nonnull!(matrix);
    match solve_discrete(&m.0, eta) {
        Ok(c) => boxed_out(out, DriftrecCovariance(c)),
        Err(e) => status_of(&e),
    }
}

/// Copies the covariance into `out` (row-major, length p*p).
#[no_mangle]
pub extern "C" fn driftrec_covariance_copy_data(
    cov: *const DriftrecCovariance,
    out: *mut f64,
) -> DriftrecStatus {
    let c = nonnull!(cov);
    if out.is_null() {
        return DriftrecStatus::NullPointer;
    }
    let p = c.0.q.nrows();
    let dst = unsafe { std::slice::from_raw_parts_mut(out, p * p) };
    for i in 0..p {
        for j in 0..p {
            dst[i * p + j] = c.0.q[(i, j)];
        }
    }
    DriftrecStatus::Ok
}

#[no_mangle]
pub extern "C" fn driftrec_covariance_free(cov: *mut DriftrecCovariance) {
    if !cov.is_null() {
        drop(unsafe { Box::from_raw(cov) });
    }
}

/// Evaluates the recovery assumptions for one row. Pass eta <= 0 for the
/// continuous model.
#[no_mangle]
pub extern "C" fn driftrec_check_assumptions(
    matrix: *const DriftrecMatrix,
    cov: *const DriftrecCovariance,
    row: usize,
    eta: f64,
    out: *mut DriftrecAssumptions,
) -> DriftrecStatus {
    let m = nonnull!(matrix);
    let c = nonnull!(cov);
    if out.is_null() {
        return DriftrecStatus::NullPointer;
    }
    let eta_opt = if eta > 0.0 { Some(eta) } else { None };
    match assumption_report(&m.0, &c.0, row, eta_opt) {
        Ok(rep) => {
            unsafe {
                *out = DriftrecAssumptions {
                    c_min: rep.c_min,
                    alpha: rep.alpha,
                    rho_min: rep.rho_min,
                    d: rep.d.unwrap_or(f64::NAN),
                    support_size: rep.k,
                    theta_min: rep.theta_min,
                };
            }
            DriftrecStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Simulates n transitions of the discrete model from a stationary start.
#[no_mangle]
pub extern "C" fn driftrec_simulate_discrete(
    matrix: *const DriftrecMatrix,
    eta: f64,
    n: usize,
    seed: u64,
    out: *mut *mut DriftrecTrajectory,
) -> DriftrecStatus {
    let m = nonnull!(matrix);
    let cov = match solve_discrete(&m.0, eta) {
        Ok(c) => c,
        Err(e) => return status_of(&e),
    };
    let x0 = match sample_stationary_init(&cov, driftrec::seed::mix(seed, 1)) {
        Ok(x) => x,
        Err(e) => return status_of(&e),
    };
    match simulate_discrete(&m.0, eta, n, &x0, seed) {
        Ok(t) => boxed_out(out, DriftrecTrajectory(t)),
        Err(e) => status_of(&e),
    }
}

/// Number of stored states (transitions + 1).
#[no_mangle]
pub extern "C" fn driftrec_trajectory_len(traj: *const DriftrecTrajectory) -> usize {
    match unsafe { traj.as_ref() } {
        Some(t) => t.0.states.nrows(),
        None => 0,
    }
}

/// Copies state row `t` into `out` (length p).
#[no_mangle]
pub extern "C" fn driftrec_trajectory_state(
    traj: *const DriftrecTrajectory,
    t: usize,
    out: *mut f64,
) -> DriftrecStatus {
    let tr = nonnull!(traj);
    if out.is_null() {
        return DriftrecStatus::NullPointer;
    }
    if t >= tr.0.states.nrows() {
        return DriftrecStatus::InvalidParameter;
    }
    let w = tr.0.states.ncols();
    let dst = unsafe { std::slice::from_raw_parts_mut(out, w) };
    for c in 0..w {
        dst[c] = tr.0.states[(t, c)];
    }
    DriftrecStatus::Ok
}

#[no_mangle]
pub extern "C" fn driftrec_trajectory_free(traj: *mut DriftrecTrajectory) {
    if !traj.is_null() {
        drop(unsafe { Box::from_raw(traj) });
    }
}

/// l1-regularized estimation of the signed support from a trajectory under
/// the linear basis. `signs_out` (length p*p, row-major) receives -1/0/+1;
/// `coeffs_out` may be null or length p*p.
#[no_mangle]
pub extern "C" fn driftrec_recover_linear(
    traj: *const DriftrecTrajectory,
    lambda: f64,
    signs_out: *mut i8,
    coeffs_out: *mut f64,
) -> DriftrecStatus {
    let tr = nonnull!(traj);
    if signs_out.is_null() {
        return DriftrecStatus::NullPointer;
    }
    let p = tr.0.p;
    let basis = linear_basis(p);
    let cfg = RlsConfig::with_lambda(lambda);
    match recover(&tr.0, &basis, &cfg) {
        Ok(res) => {
            let signs = unsafe { std::slice::from_raw_parts_mut(signs_out, p * p) };
            for i in 0..p {
                for j in 0..p {
                    signs[i * p + j] = res.signed_support[(i, j)];
                }
            }
            if !coeffs_out.is_null() {
                let coeffs = unsafe { std::slice::from_raw_parts_mut(coeffs_out, p * p) };
                for i in 0..p {
                    for j in 0..p {
                        coeffs[i * p + j] = res.theta_hat[(i, j)];
                    }
                }
            }
            DriftrecStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Smallest eigenvalue of -(Theta + Theta*)/2; positive means stable.
#[no_mangle]
pub extern "C" fn driftrec_stability_margin(
    matrix: *const DriftrecMatrix,
    out: *mut f64,
) -> DriftrecStatus {
    let m = nonnull!(matrix);
    if out.is_null() {
        return DriftrecStatus::NullPointer;
    }
    unsafe { *out = m.0.rho_min() };
    DriftrecStatus::Ok
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    #[test]
    fn round_trip_through_the_c_surface() {
        let mut m: *mut DriftrecMatrix = ptr::null_mut();
        let st = driftrec_matrix_sparse_shift(6, 2, 5.0, 3, &mut m);
        assert_eq!(st, DriftrecStatus::Ok);
        assert_eq!(driftrec_matrix_dim(m), 6);

        let mut margin = 0.0;
        assert_eq!(driftrec_stability_margin(m, &mut margin), DriftrecStatus::Ok);
        assert!(margin > 0.0);

        let mut cov: *mut DriftrecCovariance = ptr::null_mut();
        assert_eq!(driftrec_solve_discrete(m, 0.05, &mut cov), DriftrecStatus::Ok);

        let mut rep = DriftrecAssumptions {
            c_min: 0.0,
            alpha: 0.0,
            rho_min: 0.0,
            d: 0.0,
            support_size: 0,
            theta_min: 0.0,
        };
        assert_eq!(driftrec_check_assumptions(m, cov, 0, 0.05, &mut rep), DriftrecStatus::Ok);
        assert!(rep.support_size >= 1);
        assert!(rep.rho_min > 0.0);

        let mut traj: *mut DriftrecTrajectory = ptr::null_mut();
        assert_eq!(driftrec_simulate_discrete(m, 0.05, 2000, 9, &mut traj), DriftrecStatus::Ok);
        assert_eq!(driftrec_trajectory_len(traj), 2001);
        let mut state = vec![0.0; 6];
        assert_eq!(driftrec_trajectory_state(traj, 2000, state.as_mut_ptr()), DriftrecStatus::Ok);
        assert!(state.iter().all(|v| v.is_finite()));

        let mut signs = vec![0i8; 36];
        let mut coeffs = vec![0.0; 36];
        assert_eq!(
            driftrec_recover_linear(traj, 0.05, signs.as_mut_ptr(), coeffs.as_mut_ptr()),
            DriftrecStatus::Ok
        );
        // diagonal of a sparse-shift matrix is strongly negative; a long run
        // should at least get the diagonal signs right
        for i in 0..6 {
            assert_eq!(signs[i * 6 + i], -1, "diagonal sign at {i}");
        }

        driftrec_trajectory_free(traj);
        driftrec_covariance_free(cov);
        driftrec_matrix_free(m);
    }

    #[test]
    fn null_and_invalid_inputs() {
        assert_eq!(driftrec_matrix_dim(ptr::null()), 0);
        let mut out: *mut DriftrecMatrix = ptr::null_mut();
        assert_eq!(
            driftrec_matrix_sparse_shift(0, 1, 7.0, 0, &mut out),
            DriftrecStatus::InvalidParameter
        );
        assert_eq!(
            driftrec_matrix_from_data(3, ptr::null(), &mut out),
            DriftrecStatus::NullPointer
        );
        // unstable custom matrix rejected by the continuous solve
        let data = [1.0, 0.0, 0.0, 1.0];
        assert_eq!(driftrec_matrix_from_data(2, data.as_ptr(), &mut out), DriftrecStatus::Ok);
        let mut cov: *mut DriftrecCovariance = ptr::null_mut();
        assert_eq!(driftrec_solve_continuous(out, &mut cov), DriftrecStatus::Unstable);
        driftrec_matrix_free(out);
    }

    #[test]
    fn header_is_generated() {
        let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("include/driftrec.h");
        let text = std::fs::read_to_string(header).unwrap();
        assert!(text.contains("driftrec_matrix_sparse_shift"));
        assert!(text.contains("DriftrecStatus"));
    }
}
