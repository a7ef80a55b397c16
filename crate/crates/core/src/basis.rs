//! Feature maps parametrizing the drift: identity (linear model), monomials
//! up to degree two, and the mass-spring displacement basis.

use crate::error::{DriftError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Linear { p: usize },
    Monomial2 { p: usize },
    /// Input states are concatenations [q, v] of length 2*p*d.
    MassSpring { p: usize, d: usize },
}

#[derive(Debug, Clone)]
pub struct BasisSet {
    pub m: usize,
    pub names: Vec<String>,
    /// Expected input state length.
    pub input_len: usize,
    kind: Kind,
}

/// f_j(x) = x_j; m = p.
pub fn linear_basis(p: usize) -> BasisSet {
    assert!(p >= 1);
    BasisSet {
        m: p,
        names: (1..=p).map(|i| format!("x{i}")).collect(),
        input_len: p,
        kind: Kind::Linear { p },
    }
}

/// Constant, coordinates, and cross products x_i*x_j for i < j (squares
/// excluded); m = 1 + p + p(p-1)/2.
pub fn monomial_basis_deg2(p: usize) -> BasisSet {
    assert!(p >= 1);
    let mut names = vec!["1".to_string()];
    names.extend((1..=p).map(|i| format!("x{i}")));
    for i in 1..=p {
        for j in (i + 1)..=p {
            names.push(format!("x{i}*x{j}"));
        }
    }
    BasisSet {
        m: 1 + p + p * (p - 1) / 2,
        names,
        input_len: p,
        kind: Kind::Monomial2 { p },
    }
}

/// Velocities v_i, displacements Delta_ij = q_i - q_j (i < j), and unit
/// displacements Delta_ij/|Delta_ij| (zero vector when |Delta_ij| = 0), one
/// scalar feature per spatial coordinate; m = p*d + d*p*(p-1).
pub fn mass_spring_basis(p: usize, d: usize) -> BasisSet {
    assert!(p >= 1 && d >= 1);
    let mut names = Vec::new();
    for i in 1..=p {
        for c in 1..=d {
            names.push(format!("v{i}[{c}]"));
        }
    }
    for i in 1..=p {
        for j in (i + 1)..=p {
            for c in 1..=d {
                names.push(format!("d{i}{j}[{c}]"));
            }
        }
    }
    for i in 1..=p {
        for j in (i + 1)..=p {
            for c in 1..=d {
                names.push(format!("u{i}{j}[{c}]"));
            }
        }
    }
    BasisSet {
        m: p * d + d * p * (p - 1),
        names,
        input_len: 2 * p * d,
        kind: Kind::MassSpring { p, d },
    }
}

impl BasisSet {
    /// Number of target coordinates a drift estimate predicts: for the
    /// mass-spring basis only the velocity block (second half of the state)
    /// is driven by the parametrized drift, otherwise every coordinate is.
    pub fn target_count(&self) -> usize {
        match self.kind {
            Kind::MassSpring { p, d } => p * d,
            _ => self.input_len,
        }
    }

    /// Offset of the target block inside a state row.
    pub fn target_offset(&self) -> usize {
        self.input_len - self.target_count()
    }

    /// Evaluates all m features at `x` into `out`.
    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        if x.len() != self.input_len {
            return Err(DriftError::DimensionMismatch(format!(
                "state length {} does not match basis input length {}",
                x.len(),
                self.input_len
            )));
        }
        if out.len() != self.m {
            return Err(DriftError::DimensionMismatch("output buffer length mismatch".into()));
        }
        match self.kind {
            Kind::Linear { .. } => out.copy_from_slice(x),
            Kind::Monomial2 { p } => {
                out[0] = 1.0;
                out[1..=p].copy_from_slice(x);
                let mut idx = 1 + p;
                for i in 0..p {
                    for j in (i + 1)..p {
                        out[idx] = x[i] * x[j];
                        idx += 1;
                    }
                }
            }
            Kind::MassSpring { p, d } => {
                let (q, v) = x.split_at(p * d);
                out[..p * d].copy_from_slice(v);
                let pairs = p * (p - 1) / 2;
                let mut pair = 0usize;
                for i in 0..p {
                    for j in (i + 1)..p {
                        let mut norm2 = 0.0;
                        for c in 0..d {
                            let delta = q[i * d + c] - q[j * d + c];
                            out[p * d + pair * d + c] = delta;
                            norm2 += delta * delta;
                        }
                        let inv = if norm2 > 0.0 { norm2.sqrt().recip() } else { 0.0 };
                        for c in 0..d {
                            out[p * d + pairs * d + pair * d + c] =
                                out[p * d + pair * d + c] * inv;
                        }
                        pair += 1;
                    }
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.m];
        self.eval_into(x, &mut out)?;
        Ok(out)
    }
}
