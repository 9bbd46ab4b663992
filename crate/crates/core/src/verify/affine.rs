use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::VerificationReport;
use crate::error::{Error, Result};
use crate::families::AnalyticFamily;
use crate::toric::{RhoGraph, RhoSample};

/// Samples the exact toric potential of a family at `r^i = e^{ρ^i}`.
pub fn rho_graph_from_family(family: &AnalyticFamily, rhos: &[Vec<f64>]) -> Result<RhoGraph> {
    let samples = rhos
        .iter()
        .map(|rho| {
            let r: Vec<f64> = rho.iter().map(|x| x.exp()).collect();
            let jet = family.toric_jet(&r)?;
            Ok(RhoSample { rho: rho.clone(), u: jet.u, u_i: jet.first, u_ij: jet.second })
        })
        .collect::<Result<Vec<_>>>()?;
    RhoGraph::new(samples)
}

/// `det(∂²u/∂ρ²) · exp(Σ (h_j/2) ∂u/∂ρ^j)` against `e^{ρ¹+⋯+ρⁿ}`, relative.
pub fn rho_residual(graph: &RhoGraph, h: &[f64], tol: f64) -> Result<VerificationReport> {
    let n = graph.dim();
    if h.len() != n {
        return Err(Error::ShapeMismatch(format!("{} eigenvalues for a {n}-dimensional graph", h.len())));
    }
    let samples = graph
        .samples
        .iter()
        .map(|s| {
            let hess = DMatrix::from_fn(n, n, |i, j| s.u_ij[i][j]);
            let drift: f64 = h.iter().zip(&s.u_i).map(|(hj, uj)| 0.5 * hj * uj).sum();
            let rhs = s.rho.iter().sum::<f64>().exp();
            let lhs = hess.determinant() * drift.exp();
            let point = s.rho.iter().map(|&x| Complex64::new(x, 0.0)).collect();
            (point, lhs, ((lhs - rhs) / rhs).abs())
        })
        .collect();
    let grid = format!("{} ρ-samples", graph.samples.len());
    Ok(VerificationReport::from_samples("rho", format!("ρ-graph, h={h:?}"), grid, samples, tol))
}

/// `u ↦ u + ε Σ (r^i)²`, a non-solution used as a negative control.
pub fn perturb_rho_graph(graph: &RhoGraph, eps: f64) -> RhoGraph {
    let mut out = graph.clone();
    for s in &mut out.samples {
        for i in 0..s.rho.len() {
            let r2 = (2.0 * s.rho[i]).exp();
            s.u += eps * r2;
            s.u_i[i] += 2.0 * eps * r2;
            s.u_ij[i][i] += 4.0 * eps * r2;
        }
    }
    out
}

/// Affine map of the `(ρ, u)` graph:
/// `ρ̄ = Bρ + b`, `ū = s u + a·Bρ + c`, `∂ū/∂ρ̄ = A ∂u/∂ρ + a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineSymmetry {
    pub s: f64,
    /// Row `i` holds the coefficients of `∂u/∂ρ^j` in `∂ū/∂ρ̄^i`.
    pub a_mat: Vec<Vec<f64>>,
    pub b_mat: Vec<Vec<f64>>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: f64,
}

const CONSTRAINT_TOL: f64 = 1e-12;

impl AffineSymmetry {
    pub fn identity(n: usize) -> Self {
        let eye: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        AffineSymmetry { s: 1.0, a_mat: eye.clone(), b_mat: eye, a: vec![0.0; n], b: vec![0.0; n], c: 0.0 }
    }

    /// `A = B = I`, `s = 1` with the given shift `a` and the uniform `b`
    /// that balances `e^{½h·a} = e^{Σb}`.
    pub fn translation(h: &[f64], a: Vec<f64>) -> Self {
        let n = h.len();
        let shift = 0.5 * h.iter().zip(&a).map(|(x, y)| x * y).sum::<f64>() / n as f64;
        AffineSymmetry { a, b: vec![shift; n], ..Self::identity(n) }
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    fn mat(rows: &[Vec<f64>], n: usize) -> DMatrix<f64> {
        DMatrix::from_fn(n, n, |i, j| rows[i][j])
    }

    /// Checks the four constraints that make the map preserve the equation,
    /// naming the first one that fails.
    pub fn check(&self, h: &[f64]) -> Result<()> {
        let n = h.len();
        let square = |m: &Vec<Vec<f64>>| m.len() == n && m.iter().all(|r| r.len() == n);
        if !square(&self.a_mat) || !square(&self.b_mat) || self.a.len() != n || self.b.len() != n {
            return Err(Error::ShapeMismatch(format!("symmetry does not match dimension {n}")));
        }
        if self.s == 0.0 || !self.s.is_finite() {
            return Err(Error::InvalidParam("s must be a nonzero real".into()));
        }
        let a = Self::mat(&self.a_mat, n);
        let b = Self::mat(&self.b_mat, n);
        let hv = DVector::from_column_slice(h);
        let dev = (a.transpose() * &b - DMatrix::identity(n, n) * self.s).amax();
        if dev > CONSTRAINT_TOL {
            return Err(Error::ConstraintViolation { constraint: "A^T B = s I", deviation: dev });
        }
        let dev = (a.transpose() * &hv - &hv).amax();
        if dev > CONSTRAINT_TOL {
            return Err(Error::ConstraintViolation { constraint: "A^T h = h", deviation: dev });
        }
        let dev = (0..n).map(|j| (b.column(j).sum() - 1.0).abs()).fold(0.0, f64::max);
        if dev > CONSTRAINT_TOL {
            return Err(Error::ConstraintViolation { constraint: "column sums of B = 1", deviation: dev });
        }
        let lhs = (0.5 * hv.dot(&DVector::from_column_slice(&self.a))).exp() * a.determinant();
        let rhs = self.b.iter().sum::<f64>().exp() * b.determinant();
        let dev = (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE);
        if !(dev <= CONSTRAINT_TOL) {
            return Err(Error::ConstraintViolation { constraint: "e^{h.a/2} det A = e^{sum b} det B", deviation: dev });
        }
        Ok(())
    }
}

/// Transforms every sample of the graph; the constraints are checked first.
pub fn apply_affine_symmetry(sym: &AffineSymmetry, graph: &RhoGraph, h: &[f64]) -> Result<RhoGraph> {
    sym.check(h)?;
    let n = h.len();
    if graph.dim() != n && !graph.samples.is_empty() {
        return Err(Error::ShapeMismatch(format!("graph dimension {} vs {n}", graph.dim())));
    }
    let a = AffineSymmetry::mat(&sym.a_mat, n);
    let b = AffineSymmetry::mat(&sym.b_mat, n);
    let b_inv = b.clone().try_inverse().ok_or_else(|| Error::InvalidParam("B is singular".into()))?;
    let av = DVector::from_column_slice(&sym.a);
    let bv = DVector::from_column_slice(&sym.b);
    let samples = graph
        .samples
        .iter()
        .map(|s| {
            let rho = DVector::from_column_slice(&s.rho);
            let grad = DVector::from_column_slice(&s.u_i);
            let hess = DMatrix::from_fn(n, n, |i, j| s.u_ij[i][j]);
            let brho = &b * &rho;
            let new_rho = &brho + &bv;
            let new_grad = &a * &grad + &av;
            let new_hess = &a * hess * &b_inv;
            RhoSample {
                rho: new_rho.iter().copied().collect(),
                u: sym.s * s.u + av.dot(&brho) + sym.c,
                u_i: new_grad.iter().copied().collect(),
                u_ij: (0..n).map(|i| (0..n).map(|j| 0.5 * (new_hess[(i, j)] + new_hess[(j, i)])).collect()).collect(),
            }
        })
        .collect();
    RhoGraph::new(samples)
}
