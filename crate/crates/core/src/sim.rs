//! Trajectory simulators for the discrete linear model, the continuous model
//! via fine-step Euler-Maruyama with subsampling, and the damped mass-spring
//! network.
//!
//! Noise is always drawn time-major, coordinate-minor, so a subsampled path
//! is bit-identical to the underlying fine path at the kept indices.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::ensembles::DriftMatrix;
use crate::error::{DriftError, Result};
use crate::lyapunov::StationaryCovariance;
use crate::seed;

#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Row t is the state at time t*eta; (n+1) x p (or (n+1) x 2pd for
    /// mass-spring states).
    pub states: DMatrix<f64>,
    pub eta: f64,
    pub p: usize,
    pub seed: u64,
    pub model_tag: String,
}

impl Trajectory {
    /// Number of transitions n.
    pub fn n(&self) -> usize {
        self.states.nrows() - 1
    }
}

#[derive(Debug, Clone)]
pub struct MassSpringParams {
    /// 0/1 symmetric adjacency with zero diagonal.
    pub connectivity: DMatrix<f64>,
    /// Rest lengths, read only where connectivity = 1.
    pub rest_lengths: DMatrix<f64>,
    pub gamma: f64,
    pub sigma: f64,
    /// Spatial dimension.
    pub d: usize,
    /// Substitute zero force on coincident connected masses instead of
    /// erroring.
    pub zero_force: bool,
}

impl MassSpringParams {
    pub fn p(&self) -> usize {
        self.connectivity.nrows()
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.p();
        if self.connectivity.ncols() != p || self.rest_lengths.nrows() != p {
            return Err(DriftError::DimensionMismatch("mass-spring matrices must be p x p".into()));
        }
        if self.connectivity != self.connectivity.transpose() {
            return Err(DriftError::InvalidParameter("connectivity must be symmetric".into()));
        }
        for i in 0..p {
            if self.connectivity[(i, i)] != 0.0 {
                return Err(DriftError::InvalidParameter("connectivity diagonal must be 0".into()));
            }
            for j in 0..p {
                let c = self.connectivity[(i, j)];
                if c != 0.0 && c != 1.0 {
                    return Err(DriftError::InvalidParameter("connectivity must be 0/1".into()));
                }
                if c == 1.0 && self.rest_lengths[(i, j)] < 0.0 {
                    return Err(DriftError::InvalidParameter("rest lengths must be >= 0".into()));
                }
            }
        }
        if self.gamma <= 0.0 || self.sigma < 0.0 || self.d == 0 {
            return Err(DriftError::InvalidParameter(
                "need gamma > 0, sigma >= 0, d >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Draws x(0) ~ N(0, Q) via the lower Cholesky factor of Q.
pub fn sample_stationary_init(cov: &StationaryCovariance, seed: u64) -> Result<DVector<f64>> {
    let chol = cov.q.clone().cholesky().ok_or(DriftError::NotPositiveDefinite)?;
    let mut rng = seed::rng(seed);
    let z = DVector::from_fn(cov.q.nrows(), |_, _| rng.sample::<f64, _>(StandardNormal));
    Ok(chol.l() * z)
}

/// Streaming stepper for x(t+1) = x(t) + eta*Theta*x(t) + w(t), w ~ N(0, eta I).
///
/// Lets callers accumulate statistics over long runs without storing the
/// path.
pub struct DiscreteStepper {
    a: DMatrix<f64>,
    noise_sd: f64,
    pub state: DVector<f64>,
    rng: rand_chacha::ChaCha8Rng,
    step: usize,
}

impl DiscreteStepper {
    pub fn new(theta: &DriftMatrix, eta: f64, x0: DVector<f64>, seed: u64) -> Result<Self> {
        if eta <= 0.0 {
            return Err(DriftError::InvalidParameter("eta must be > 0".into()));
        }
        let p = theta.dim();
        if x0.len() != p {
            return Err(DriftError::DimensionMismatch(format!(
                "x0 has length {}, expected {p}",
                x0.len()
            )));
        }
        Ok(DiscreteStepper {
            a: DMatrix::identity(p, p) + &theta.entries * eta,
            noise_sd: eta.sqrt(),
            state: x0,
            rng: seed::rng(seed),
            step: 0,
        })
    }

    /// Advances one step in place; errors on a non-finite state.
    pub fn advance(&mut self) -> Result<&DVector<f64>> {
        let mut next = &self.a * &self.state;
        for v in next.iter_mut() {
            let w: f64 = self.rng.sample(StandardNormal);
            *v += self.noise_sd * w;
        }
        self.step += 1;
        if next.iter().any(|v| !v.is_finite()) {
            return Err(DriftError::Overflow { step: self.step });
        }
        self.state = next;
        Ok(&self.state)
    }
}

/// Simulates n transitions of the discrete model, storing all n+1 states.
pub fn simulate_discrete(
    theta: &DriftMatrix,
    eta: f64,
    n: usize,
    x0: &DVector<f64>,
    seed: u64,
) -> Result<Trajectory> {
    if n == 0 {
        return Err(DriftError::InvalidParameter("n must be >= 1".into()));
    }
    let p = theta.dim();
    let mut stepper = DiscreteStepper::new(theta, eta, x0.clone(), seed)?;
    let mut states = DMatrix::zeros(n + 1, p);
    states.row_mut(0).copy_from(&x0.transpose());
    for t in 1..=n {
        let x = stepper.advance()?;
        states.row_mut(t).copy_from(&x.transpose());
    }
    Ok(Trajectory { states, eta, p, seed, model_tag: "discrete".into() })
}

/// Simulates the continuous model on [0, T] by Euler-Maruyama at step
/// `eta_fine`, keeping every (eta_sample/eta_fine)-th state. The returned
/// trajectory has step `eta_sample`. `eta_sample` must be an integer
/// multiple of `eta_fine` and divide T; factor 1 reproduces
/// [`simulate_discrete`] exactly.
pub fn simulate_continuous(
    theta: &DriftMatrix,
    t_total: f64,
    eta_sample: f64,
    eta_fine: f64,
    x0: &DVector<f64>,
    seed: u64,
) -> Result<Trajectory> {
    if eta_fine <= 0.0 || eta_sample <= 0.0 || t_total <= 0.0 {
        return Err(DriftError::InvalidParameter("steps and horizon must be > 0".into()));
    }
    let factor_f = eta_sample / eta_fine;
    let factor = factor_f.round() as usize;
    if factor == 0 || (factor_f - factor as f64).abs() > 1e-9 * factor_f {
        return Err(DriftError::InvalidParameter(format!(
            "eta_sample={eta_sample} is not an integer multiple of eta_fine={eta_fine}"
        )));
    }
    let n_f = t_total / eta_sample;
    let n = n_f.round() as usize;
    if n == 0 || (n_f - n as f64).abs() > 1e-9 * n_f {
        return Err(DriftError::InvalidParameter(format!(
            "eta_sample={eta_sample} does not divide T={t_total}"
        )));
    }
    let p = theta.dim();
    let mut stepper = DiscreteStepper::new(theta, eta_fine, x0.clone(), seed)?;
    let mut states = DMatrix::zeros(n + 1, p);
    states.row_mut(0).copy_from(&x0.transpose());
    for t in 1..=n {
        for _ in 0..factor {
            stepper.advance()?;
        }
        states.row_mut(t).copy_from(&stepper.state.transpose());
    }
    Ok(Trajectory {
        states,
        eta: eta_sample,
        p,
        seed,
        model_tag: format!("continuous(eta_fine={eta_fine})"),
    })
}

/// Spring forces -grad U(q) for U(q) = (1/2) sum C_ij (|q_i - q_j| - D_ij)^2.
pub fn spring_forces(params: &MassSpringParams, q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let p = params.p();
    let mut f = DMatrix::zeros(p, params.d);
    for i in 0..p {
        for j in (i + 1)..p {
            if params.connectivity[(i, j)] == 0.0 {
                continue;
            }
            let delta = q.row(i) - q.row(j);
            let dist = delta.norm();
            if dist == 0.0 {
                if params.zero_force {
                    continue;
                }
                return Err(DriftError::CoincidentMasses { i, j });
            }
            let pull = (dist - params.rest_lengths[(i, j)]) / dist;
            let fij = delta * pull;
            let mut ri = f.row_mut(i);
            ri -= &fij;
            let mut rj = f.row_mut(j);
            rj += &fij;
        }
    }
    Ok(f)
}

/// Potential energy of a configuration; companion to [`spring_forces`].
pub fn spring_energy(params: &MassSpringParams, q: &DMatrix<f64>) -> f64 {
    let p = params.p();
    let mut u = 0.0;
    for i in 0..p {
        for j in (i + 1)..p {
            if params.connectivity[(i, j)] == 1.0 {
                let dist = (q.row(i) - q.row(j)).norm();
                u += 0.5 * (dist - params.rest_lengths[(i, j)]).powi(2);
            }
        }
    }
    u
}

/// Simulates the damped mass-spring network with the Euler scheme
/// v <- v + dt*(-gamma*v - grad U(q)) + sigma*sqrt(dt)*xi, then q <- q + dt*v.
/// State rows are the concatenation [q (p*d), v (p*d)].
pub fn simulate_mass_spring(
    params: &MassSpringParams,
    dt: f64,
    t_total: f64,
    q0: &DMatrix<f64>,
    v0: &DMatrix<f64>,
    seed: u64,
) -> Result<Trajectory> {
    params.validate()?;
    if dt <= 0.0 || t_total <= 0.0 {
        return Err(DriftError::InvalidParameter("dt and T must be > 0".into()));
    }
    let p = params.p();
    let d = params.d;
    if q0.nrows() != p || q0.ncols() != d || v0.nrows() != p || v0.ncols() != d {
        return Err(DriftError::DimensionMismatch("q0/v0 must be p x d".into()));
    }
    let n = (t_total / dt).round() as usize;
    if n == 0 {
        return Err(DriftError::InvalidParameter("T/dt must round to >= 1 step".into()));
    }
    let mut rng = seed::rng(seed);
    let noise_sd = params.sigma * dt.sqrt();
    let mut q = q0.clone();
    let mut v = v0.clone();
    let mut states = DMatrix::zeros(n + 1, 2 * p * d);
    let pack = |states: &mut DMatrix<f64>, t: usize, q: &DMatrix<f64>, v: &DMatrix<f64>| {
        for i in 0..p {
            for c in 0..d {
                states[(t, i * d + c)] = q[(i, c)];
                states[(t, p * d + i * d + c)] = v[(i, c)];
            }
        }
    };
    pack(&mut states, 0, &q, &v);
    for t in 1..=n {
        let f = spring_forces(params, &q)?;
        for i in 0..p {
            for c in 0..d {
                let xi: f64 = rng.sample(StandardNormal);
                v[(i, c)] += dt * (-params.gamma * v[(i, c)] + f[(i, c)]) + noise_sd * xi;
            }
        }
        q += &v * dt;
        if q.iter().chain(v.iter()).any(|x| !x.is_finite()) {
            return Err(DriftError::Overflow { step: t });
        }
        pack(&mut states, t, &q, &v);
    }
    Ok(Trajectory {
        states,
        eta: dt,
        p,
        seed,
        model_tag: format!("mass-spring(d={d},gamma={},sigma={})", params.gamma, params.sigma),
    })
}
