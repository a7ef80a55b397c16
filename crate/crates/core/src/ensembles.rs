//! Random drift-matrix ensembles.
//!
//! All generators are pure functions of their parameters and a 64-bit seed.
//! Ensembles that only guarantee stability with high probability are wrapped
//! in a reject-and-retry loop: an unstable draw is discarded and regenerated
//! with a seed derived from `(seed, attempt)`, up to [`STABILITY_RETRIES`]
//! attempts.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{DriftError, Result};
use crate::seed;

/// Retry budget for stability rejection.
pub const STABILITY_RETRIES: usize = 100;

/// Retry budget for graph generation (self-loop / multi-edge / degree rejection).
pub const GRAPH_RETRIES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleKind {
    SparseShift,
    Dense,
    SignedRegular,
    Laplacian,
    Custom,
}

/// A p x p drift matrix together with how it was generated.
#[derive(Debug, Clone)]
pub struct DriftMatrix {
    pub entries: DMatrix<f64>,
    pub kind: EnsembleKind,
    /// Smallest nonzero coefficient magnitude guaranteed by the construction
    /// (0.0 when the ensemble gives no such guarantee).
    pub theta_min: f64,
    pub seed: u64,
}

impl DriftMatrix {
    pub fn custom(entries: DMatrix<f64>) -> Self {
        DriftMatrix { entries, kind: EnsembleKind::Custom, theta_min: 0.0, seed: 0 }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// lambda_min of the symmetrized negation -(Theta + Theta*)/2.
    pub fn rho_min(&self) -> f64 {
        rho_min(&self.entries)
    }

    /// True when -(Theta + Theta*)/2 is positive definite.
    pub fn is_stable(&self) -> bool {
        self.rho_min() > 0.0
    }
}

/// lambda_min of -(A + A*)/2 for a square matrix.
pub fn rho_min(a: &DMatrix<f64>) -> f64 {
    let sym = -(a + a.transpose()) * 0.5;
    sym.symmetric_eigenvalues().min()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphMode {
    UniformRegular,
    BoundedDegreeBernoulli,
}

/// Specification of a random graph on `p` nodes with degree bound `k`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GraphSpec {
    pub p: usize,
    pub k: usize,
    pub mode: GraphMode,
    pub seed: u64,
}

fn retry_stable<F>(seed: u64, mut gen: F) -> Result<DriftMatrix>
where
    F: FnMut(u64) -> Result<DriftMatrix>,
{
    for attempt in 0..STABILITY_RETRIES {
        let s = if attempt == 0 { seed } else { seed::mix(seed, attempt as u64) };
        let m = gen(s)?;
        if m.is_stable() {
            return Ok(m);
        }
    }
    Err(DriftError::StabilityBudgetExhausted { attempts: STABILITY_RETRIES })
}

/// Theta = -shift*I + B, where B has i.i.d. Bernoulli(k/p) entries in {0,1}.
///
/// The diagonal of B may be 1; self-interactions are then shifted by one.
pub fn gen_sparse_shift(p: usize, k: usize, shift: f64, seed: u64) -> Result<DriftMatrix> {
    if p == 0 || k == 0 || k > p {
        return Err(DriftError::InvalidParameter(format!(
            "gen_sparse_shift requires p >= 1 and 0 < k <= p, got p={p}, k={k}"
        )));
    }
    if shift <= 0.0 {
        return Err(DriftError::InvalidParameter("shift must be > 0".into()));
    }
    let prob = k as f64 / p as f64;
    retry_stable(seed, |s| {
        let mut rng = seed::rng(s);
        let mut m = DMatrix::zeros(p, p);
        for i in 0..p {
            for j in 0..p {
                if rng.gen::<f64>() < prob {
                    m[(i, j)] = 1.0;
                }
            }
            m[(i, i)] -= shift;
        }
        Ok(DriftMatrix { entries: m, kind: EnsembleKind::SparseShift, theta_min: 1.0, seed: s })
    })
}

/// Theta = -(rho + sqrt(2))*I + p^{-1/2} * B, where B has i.i.d. standard
/// Gaussian entries, each independently zeroed with probability 1/2.
pub fn gen_dense(p: usize, rho: f64, seed: u64) -> Result<DriftMatrix> {
    if p == 0 {
        return Err(DriftError::InvalidParameter("gen_dense requires p >= 1".into()));
    }
    if rho <= 0.0 {
        return Err(DriftError::InvalidParameter("rho must be > 0".into()));
    }
    let scale = (p as f64).powf(-0.5);
    let diag = rho + 2.0_f64.sqrt();
    retry_stable(seed, |s| {
        let mut rng = seed::rng(s);
        let mut m = DMatrix::zeros(p, p);
        for i in 0..p {
            for j in 0..p {
                let g: f64 = rng.sample(StandardNormal);
                let keep = rng.gen::<bool>();
                if keep {
                    m[(i, j)] = scale * g;
                }
            }
            m[(i, i)] -= diag;
        }
        Ok(DriftMatrix { entries: m, kind: EnsembleKind::Dense, theta_min: 0.0, seed: s })
    })
}

/// Symmetric dense ensemble with guaranteed minimum coefficient magnitude.
///
/// B is symmetric with zero diagonal and upper-triangle entries i.i.d.
/// +-theta_min with probability 1/4 each, 0 with probability 1/2. Then
/// Theta = -(gamma + 2*sqrt(alpha))*I + B/sqrt(p), alpha = theta_min^2/2,
/// with gamma the smallest nonnegative value making lambda_min(-Theta) >= rho.
pub fn gen_dense_symmetric(p: usize, theta_min: f64, rho: f64, seed: u64) -> Result<DriftMatrix> {
    if p == 0 {
        return Err(DriftError::InvalidParameter("gen_dense_symmetric requires p >= 1".into()));
    }
    if theta_min <= 0.0 || rho <= 0.0 {
        return Err(DriftError::InvalidParameter("theta_min and rho must be > 0".into()));
    }
    let alpha = theta_min * theta_min / 2.0;
    let sqrt_p = (p as f64).sqrt();
    let mut rng = seed::rng(seed);
    let mut b = DMatrix::zeros(p, p);
    for i in 0..p {
        for j in (i + 1)..p {
            let u = rng.gen::<f64>();
            let v = if u < 0.25 {
                theta_min
            } else if u < 0.5 {
                -theta_min
            } else {
                0.0
            };
            b[(i, j)] = v;
            b[(j, i)] = v;
        }
    }
    let lam_max = b.symmetric_eigenvalues().max() / sqrt_p;
    let gamma = (rho + lam_max - 2.0 * alpha.sqrt()).max(0.0);
    let mut m = b / sqrt_p;
    let d = gamma + 2.0 * alpha.sqrt();
    for i in 0..p {
        m[(i, i)] -= d;
    }
    Ok(DriftMatrix {
        entries: m,
        kind: EnsembleKind::Dense,
        theta_min: theta_min / sqrt_p,
        seed,
    })
}

/// Signed adjacency of a uniformly random simple k-regular graph, scaled by
/// theta_min, shifted to Theta = -(gamma + 2*theta_min*sqrt(k-1))*I + theta_min*B.
///
/// Each undirected edge carries an independent +-1 sign, so Theta is
/// symmetric. gamma is the smallest nonnegative value such that
/// lambda_max(Theta) <= -rho, computed from lambda_max of the signed
/// adjacency.
pub fn gen_signed_regular(
    p: usize,
    k: usize,
    theta_min: f64,
    rho: f64,
    seed: u64,
) -> Result<DriftMatrix> {
    if k < 3 || k >= p {
        return Err(DriftError::InvalidParameter(format!(
            "gen_signed_regular requires 3 <= k < p, got p={p}, k={k}"
        )));
    }
    if p * k % 2 != 0 {
        return Err(DriftError::InvalidParameter(format!(
            "gen_signed_regular requires p*k even, got p={p}, k={k}"
        )));
    }
    if theta_min <= 0.0 || rho <= 0.0 {
        return Err(DriftError::InvalidParameter("theta_min and rho must be > 0".into()));
    }
    let spec = GraphSpec { p, k, mode: GraphMode::UniformRegular, seed };
    let adj = gen_graph(&spec)?;
    let mut rng = seed::rng(seed::mix(seed, 0x5167)); // sign stream
    let mut b = adj.map(|v| v);
    for i in 0..p {
        for j in (i + 1)..p {
            if b[(i, j)] != 0.0 && rng.gen::<bool>() {
                b[(i, j)] = -1.0;
                b[(j, i)] = -1.0;
            }
        }
    }
    let lam_max_b = b.symmetric_eigenvalues().max();
    let edge = 2.0 * theta_min * ((k - 1) as f64).sqrt();
    let gamma = (rho + theta_min * lam_max_b - edge).max(0.0);
    let mut m = b * theta_min;
    let d = gamma + edge;
    for i in 0..p {
        m[(i, i)] -= d;
    }
    Ok(DriftMatrix { entries: m, kind: EnsembleKind::SignedRegular, theta_min, seed })
}

/// Theta = -m*I + Delta^G, where Delta^G equals the adjacency of `adj`
/// off-diagonal and has -deg(i) on the diagonal.
pub fn gen_laplacian_from_adjacency(adj: &DMatrix<f64>, m: f64) -> Result<DriftMatrix> {
    if m <= 0.0 {
        return Err(DriftError::InvalidParameter("m must be > 0".into()));
    }
    let p = adj.nrows();
    if adj.ncols() != p {
        return Err(DriftError::DimensionMismatch("adjacency must be square".into()));
    }
    let mut out = adj.clone();
    for i in 0..p {
        let deg: f64 = adj.row(i).sum();
        out[(i, i)] = -m - deg;
    }
    Ok(DriftMatrix { entries: out, kind: EnsembleKind::Laplacian, theta_min: 1.0, seed: 0 })
}

/// Theta = -m*I + Delta^G for a graph drawn from `graph`.
pub fn gen_laplacian(graph: &GraphSpec, m: f64) -> Result<DriftMatrix> {
    let adj = gen_graph(graph)?;
    let mut out = gen_laplacian_from_adjacency(&adj, m)?;
    out.seed = graph.seed;
    Ok(out)
}

/// Samples the adjacency matrix of a random graph.
///
/// `uniform-regular` uses the pairing (configuration) model, rejecting
/// matchings with self-loops or multi-edges, which yields an exactly uniform
/// simple k-regular graph. `bounded-degree-bernoulli` draws each edge
/// i.i.d. with probability k/p and rejects draws where any degree exceeds k.
pub fn gen_graph(spec: &GraphSpec) -> Result<DMatrix<f64>> {
    let GraphSpec { p, k, mode, seed } = *spec;
    if p == 0 || k >= p {
        return Err(DriftError::InvalidParameter(format!(
            "graph requires p >= 1 and k < p, got p={p}, k={k}"
        )));
    }
    match mode {
        GraphMode::UniformRegular => {
            if p * k % 2 != 0 {
                return Err(DriftError::InvalidParameter(format!(
                    "regular graph requires p*k even, got p={p}, k={k}"
                )));
            }
            let mut rng = seed::rng(seed);
            'attempt: for _ in 0..GRAPH_RETRIES {
                // pairing model: p*k stubs, uniformly matched
                let mut stubs: Vec<usize> = (0..p * k).map(|s| s / k).collect();
                // Fisher-Yates
                for i in (1..stubs.len()).rev() {
                    let j = rng.gen_range(0..=i);
                    stubs.swap(i, j);
                }
                let mut adj = DMatrix::zeros(p, p);
                for pair in stubs.chunks(2) {
                    let (a, b) = (pair[0], pair[1]);
                    if a == b || adj[(a, b)] != 0.0 {
                        continue 'attempt;
                    }
                    adj[(a, b)] = 1.0;
                    adj[(b, a)] = 1.0;
                }
                return Ok(adj);
            }
            Err(DriftError::GraphBudgetExhausted { attempts: GRAPH_RETRIES })
        }
        GraphMode::BoundedDegreeBernoulli => {
            let prob = k as f64 / p as f64;
            let mut rng = seed::rng(seed);
            'attempt2: for _ in 0..GRAPH_RETRIES {
                let mut adj = DMatrix::zeros(p, p);
                let mut deg = vec![0usize; p];
                for i in 0..p {
                    for j in (i + 1)..p {
                        if rng.gen::<f64>() < prob {
                            adj[(i, j)] = 1.0;
                            adj[(j, i)] = 1.0;
                            deg[i] += 1;
                            deg[j] += 1;
                        }
                    }
                }
                if deg.iter().any(|&d| d > k) {
                    continue 'attempt2;
                }
                return Ok(adj);
            }
            Err(DriftError::GraphBudgetExhausted { attempts: GRAPH_RETRIES })
        }
    }
}

/// Degree sequence of an adjacency matrix.
pub fn degrees(adj: &DMatrix<f64>) -> Vec<usize> {
    (0..adj.nrows()).map(|i| adj.row(i).iter().filter(|&&v| v != 0.0).count()).collect()
}

/// True when the graph given by `adj` is connected (singleton graphs count).
pub fn is_connected(adj: &DMatrix<f64>) -> bool {
    let p = adj.nrows();
    if p == 0 {
        return true;
    }
    let mut seen = vec![false; p];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(i) = stack.pop() {
        for j in 0..p {
            if adj[(i, j)] != 0.0 && !seen[j] {
                seen[j] = true;
                count += 1;
                stack.push(j);
            }
        }
    }
    count == p
}
