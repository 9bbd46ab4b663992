//! Kähler geometry in holomorphic coordinates, computed numerically.
//!
//! Conventions: `g = g_{ij̄} dz^i∘dz̄^j`, the Kähler form is
//! `Ω = (i/2) g_{ij̄} dz^i∧dz̄^j`, and the Ricci form
//! `(i/2) R_{ij̄} dz^i∧dz̄^j = −i∂∂̄G` with `G = log det g`, hence
//! `R_{ij̄} = −2 ∂²G/∂z^i∂z̄^j`. Scalar curvature is `2 g^{ij̄} R_{ij̄}` and
//! the Riemannian Laplacian of a function is `4 g^{ij̄} ∂²/∂z^i∂z̄^j`.

mod fd;
mod hermitian;

use std::ops::Deref;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

pub use fd::{FDScheme, FD_STEP_ENV};
pub use hermitian::{HermitianMatrix, MAX_CONDITION};

use crate::error::{Error, Result};

/// A point `(z¹, …, zⁿ)` of `ℂⁿ` with finite coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPoint(Vec<Complex64>);

impl ComplexPoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidParam("a point needs at least one coordinate".into()));
        }
        if coords.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite(format!("{coords:?}")));
        }
        Ok(ComplexPoint(coords))
    }

    /// Convenience constructor from `(re, im)` pairs. Panics on empty or
    /// non-finite input.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Self {
        Self::new(pairs.iter().map(|&(re, im)| Complex64::new(re, im)).collect())
            .expect("invalid point")
    }

    pub fn origin(n: usize) -> Self {
        ComplexPoint(vec![Complex64::new(0.0, 0.0); n.max(1)])
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }

    /// `(|z¹|², …, |zⁿ|²)`, the image under the standard momentum map.
    pub fn moduli_squared(&self) -> Vec<f64> {
        self.0.iter().map(|c| c.norm_sqr()).collect()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }
}

impl Deref for ComplexPoint {
    type Target = [Complex64];
    fn deref(&self) -> &[Complex64] {
        &self.0
    }
}

/// A real-valued function on an open subset of `ℂⁿ`.
pub trait ScalarField: Sync {
    fn dim(&self) -> usize;
    fn value(&self, z: &[Complex64]) -> f64;
    fn contains(&self, _z: &[Complex64]) -> bool {
        true
    }
}

/// A Hermitian metric `g_{ij̄}(z)` on an open subset of `ℂⁿ`.
pub trait MetricField: Sync {
    fn dim(&self) -> usize;
    fn metric(&self, z: &[Complex64]) -> HermitianMatrix;
    fn contains(&self, _z: &[Complex64]) -> bool {
        true
    }
}

impl<T: ScalarField + ?Sized> ScalarField for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, z: &[Complex64]) -> f64 {
        (**self).value(z)
    }
    fn contains(&self, z: &[Complex64]) -> bool {
        (**self).contains(z)
    }
}

impl<T: MetricField + ?Sized> MetricField for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn metric(&self, z: &[Complex64]) -> HermitianMatrix {
        (**self).metric(z)
    }
    fn contains(&self, z: &[Complex64]) -> bool {
        (**self).contains(z)
    }
}

type ScalarFn = Arc<dyn Fn(&[Complex64]) -> f64 + Send + Sync>;
type DomainFn = Arc<dyn Fn(&[Complex64]) -> bool + Send + Sync>;

/// Where a [`PotentialField`] may be evaluated.
#[derive(Clone)]
pub enum Domain {
    Everywhere,
    /// `|z^k| < radii[k]` for every `k`.
    Polydisc(Vec<f64>),
    Predicate(DomainFn),
}

impl Domain {
    pub fn contains(&self, z: &[Complex64]) -> bool {
        match self {
            Domain::Everywhere => true,
            Domain::Polydisc(radii) => z.iter().zip(radii).all(|(c, r)| c.norm() < *r),
            Domain::Predicate(p) => p(z),
        }
    }
}

impl std::fmt::Debug for Domain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Domain::Everywhere => write!(f, "Everywhere"),
            Domain::Polydisc(r) => write!(f, "Polydisc({r:?})"),
            Domain::Predicate(_) => write!(f, "Predicate(..)"),
        }
    }
}

/// A Kähler potential `φ` given by a closure, so that `Ω = (i/2)∂∂̄φ`.
#[derive(Clone)]
pub struct PotentialField {
    dim: usize,
    eval: ScalarFn,
    domain: Domain,
}

impl PotentialField {
    pub fn new(dim: usize, eval: impl Fn(&[Complex64]) -> f64 + Send + Sync + 'static) -> Self {
        PotentialField { dim, eval: Arc::new(eval), domain: Domain::Everywhere }
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// `Σ |z^k|²`, the flat potential.
    pub fn flat(dim: usize) -> Self {
        Self::new(dim, |z| z.iter().map(|c| c.norm_sqr()).sum())
    }
}

impl std::fmt::Debug for PotentialField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PotentialField").field("dim", &self.dim).field("domain", &self.domain).finish()
    }
}

impl ScalarField for PotentialField {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, z: &[Complex64]) -> f64 {
        (self.eval)(z)
    }
    fn contains(&self, z: &[Complex64]) -> bool {
        self.domain.contains(z)
    }
}

/// The metric `∂²φ/∂z^i∂z̄^j` of a potential, evaluated by finite differences.
pub struct MetricFromPotential<P> {
    pub potential: P,
    pub scheme: FDScheme,
}

impl<P: ScalarField> MetricField for MetricFromPotential<P> {
    fn dim(&self) -> usize {
        self.potential.dim()
    }
    fn metric(&self, z: &[Complex64]) -> HermitianMatrix {
        metric_from_potential(&self.potential, z, &self.scheme)
            .unwrap_or_else(|_| HermitianMatrix::from_real_diagonal(&vec![f64::NAN; z.len()]))
    }
    fn contains(&self, z: &[Complex64]) -> bool {
        self.potential.contains(z)
    }
}

/// The flat metric `δ_ij` on `ℂⁿ`.
#[derive(Debug, Clone, Copy)]
pub struct FlatMetric(pub usize);

impl MetricField for FlatMetric {
    fn dim(&self) -> usize {
        self.0
    }
    fn metric(&self, _z: &[Complex64]) -> HermitianMatrix {
        HermitianMatrix::identity(self.0)
    }
}

/// Wirtinger derivatives of a real function at a point.
#[derive(Debug, Clone)]
pub struct WirtingerDerivs {
    /// `∂φ/∂z^k`
    pub grad_z: Vec<Complex64>,
    /// `∂φ/∂z̄^k`
    pub grad_zbar: Vec<Complex64>,
    /// `∂²φ/∂z^i∂z̄^j`
    pub hess_mixed: HermitianMatrix,
}

/// Type-(1,0) components `Z^ℓ` of a vector field `Z = X − iY`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorFieldSample {
    pub components: Vec<Complex64>,
}

/// Log-determinant, Ricci form and scalar curvature at a point.
#[derive(Debug, Clone)]
pub struct RicciResult {
    /// `G = log det g_{ij̄}`
    pub log_det: f64,
    pub ricci: HermitianMatrix,
    pub scalar: f64,
}

fn scalar_eval<F: ScalarField + ?Sized>(field: &F) -> impl Fn(&[Complex64]) -> Result<Vec<f64>> + Sync + '_ {
    move |p: &[Complex64]| Ok(vec![field.value(p)])
}

fn check_dim(expected: usize, z: &[Complex64]) -> Result<()> {
    if z.len() != expected {
        return Err(Error::InvalidParam(format!("point has {} coordinates, field has {expected}", z.len())));
    }
    Ok(())
}

/// Assembles `¼[f_{x_i x_j} + f_{y_i y_j} + i(f_{x_i y_j} − f_{y_i x_j})]`
/// from real second derivatives of a scalar.
fn mixed_from_real(d2: &[Vec<Vec<f64>>], n: usize) -> HermitianMatrix {
    HermitianMatrix::from_fn(n, |i, j| {
        let (xi, yi, xj, yj) = (2 * i, 2 * i + 1, 2 * j, 2 * j + 1);
        Complex64::new(
            0.25 * (d2[xi][xj][0] + d2[yi][yj][0]),
            0.25 * (d2[xi][yj][0] - d2[yi][xj][0]),
        )
    })
}

/// Second-order Wirtinger calculus of `field` at `z`:
/// `∂/∂z = ½(∂/∂x − i∂/∂y)` and `∂/∂z̄ = ½(∂/∂x + i∂/∂y)`.
pub fn wirtinger_derivs<F: ScalarField + ?Sized>(
    field: &F,
    z: &[Complex64],
    scheme: &FDScheme,
) -> Result<WirtingerDerivs> {
    check_dim(field.dim(), z)?;
    let eval = scalar_eval(field);
    let inside = |p: &[Complex64]| field.contains(p);
    let d1 = fd::first_derivatives(&eval, &inside, z, scheme)?;
    let d2 = fd::second_derivatives(&eval, &inside, z, scheme)?;
    let n = z.len();
    let grad_z: Vec<Complex64> =
        (0..n).map(|k| Complex64::new(0.5 * d1[2 * k][0], -0.5 * d1[2 * k + 1][0])).collect();
    let grad_zbar = grad_z.iter().map(|c| c.conj()).collect();
    Ok(WirtingerDerivs { grad_z, grad_zbar, hess_mixed: mixed_from_real(&d2, n) })
}

fn mixed_hessian<F: ScalarField + ?Sized>(field: &F, z: &[Complex64], scheme: &FDScheme) -> Result<HermitianMatrix> {
    let eval = scalar_eval(field);
    let inside = |p: &[Complex64]| field.contains(p);
    let d2 = fd::second_derivatives(&eval, &inside, z, scheme)?;
    Ok(mixed_from_real(&d2, z.len()))
}

/// `g_{ij̄} = ∂²φ/∂z^i∂z̄^j`. Positive definiteness is not enforced; use
/// [`HermitianMatrix::is_positive_definite`] on the result.
pub fn metric_from_potential<F: ScalarField + ?Sized>(
    potential: &F,
    z: &[Complex64],
    scheme: &FDScheme,
) -> Result<HermitianMatrix> {
    check_dim(potential.dim(), z)?;
    mixed_hessian(potential, z, scheme)
}

fn log_det_checked<G: MetricField + ?Sized>(g: &G, p: &[Complex64]) -> Result<f64> {
    let m = g.metric(p);
    m.check_metric()?;
    Ok(m.determinant().ln())
}

/// `G = log det g`, `R_{ij̄} = −2 ∂²G/∂z^i∂z̄^j` and `R = 2 g^{ij̄} R_{ij̄}`.
pub fn ricci_from_metric<G: MetricField + ?Sized>(g: &G, z: &[Complex64], scheme: &FDScheme) -> Result<RicciResult> {
    check_dim(g.dim(), z)?;
    let eval = |p: &[Complex64]| log_det_checked(g, p).map(|v| vec![v]);
    let inside = |p: &[Complex64]| g.contains(p);
    let d2 = fd::second_derivatives(&eval, &inside, z, scheme)?;
    let ricci = mixed_from_real(&d2, z.len()).scale(-2.0);
    let gz = g.metric(z);
    let log_det = gz.determinant().ln();
    let scalar = 2.0 * gz.contract_with_inverse(&ricci)?;
    Ok(RicciResult { log_det, ricci, scalar })
}

/// `Z^ℓ = 2 Σ_j ∂g^{ℓj̄}/∂z̄^j`.
pub fn associated_z<G: MetricField + ?Sized>(g: &G, z: &[Complex64], scheme: &FDScheme) -> Result<VectorFieldSample> {
    check_dim(g.dim(), z)?;
    let n = z.len();
    let eval = |p: &[Complex64]| -> Result<Vec<f64>> {
        let m = g.metric(p);
        m.check_metric()?;
        let up: DMatrix<Complex64> = m.raised_inverse()?;
        Ok(up.iter().flat_map(|c| [c.re, c.im]).collect())
    };
    let inside = |p: &[Complex64]| g.contains(p);
    let d1 = fd::first_derivatives(&eval, &inside, z, scheme)?;
    // nalgebra stores column-major: entry (l, j) sits at index l + n·j.
    let entry = |a: usize, l: usize, j: usize| {
        let idx = 2 * (l + n * j);
        Complex64::new(d1[a][idx], d1[a][idx + 1])
    };
    let components = (0..n)
        .map(|l| {
            (0..n)
                .map(|j| {
                    let dx = entry(2 * j, l, j);
                    let dy = entry(2 * j + 1, l, j);
                    // 2 · ½(∂_x + i∂_y)
                    dx + Complex64::i() * dy
                })
                .sum()
        })
        .collect();
    Ok(VectorFieldSample { components })
}

/// `½(R(g) + g_{ℓk̄}Z^ℓZ̄^k)`, which is the constant `h` on a soliton.
///
/// The contraction `g_{ℓk̄}Z^ℓZ̄^k` equals `2|Z|² = |∇f|²`.
pub fn soliton_constant<G: MetricField + ?Sized>(g: &G, z: &[Complex64], scheme: &FDScheme) -> Result<f64> {
    let ric = ricci_from_metric(g, z, scheme)?;
    let zf = associated_z(g, z, scheme)?;
    let grad_sq = g.metric(z).quadratic_form(&zf.components);
    Ok(0.5 * (ric.scalar + grad_sq))
}

/// The Ricci potential `f = −log det g` in special coordinates (`Υ = dz`).
pub fn ricci_potential_special<G: MetricField + ?Sized>(g: &G, z: &[Complex64]) -> Result<f64> {
    check_dim(g.dim(), z)?;
    let m = g.metric(z);
    m.check_metric()?;
    Ok(-m.determinant().ln())
}

/// Riemannian Laplacian `Δ_g u = 4 g^{ij̄} ∂²u/∂z^i∂z̄^j`.
pub fn laplacian<F, G>(u: &F, g: &G, z: &[Complex64], scheme: &FDScheme) -> Result<f64>
where
    F: ScalarField + ?Sized,
    G: MetricField + ?Sized,
{
    check_dim(u.dim(), z)?;
    let hess = mixed_hessian(u, z, scheme)?;
    let m = g.metric(z);
    m.check_metric()?;
    Ok(4.0 * m.contract_with_inverse(&hess)?)
}
