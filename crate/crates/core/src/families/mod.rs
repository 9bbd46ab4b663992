//! Closed-form gradient Kähler Ricci solitons.
//!
//! Every family is emitted in special coordinates, where `Υ = dz¹∧⋯∧dzⁿ`,
//! `Z = Σ h_k z^k ∂/∂z^k` and the Ricci potential satisfies `f(0) = 0`.
//! For a cigar factor `2|dw|²/(c + h|w|²)` this forces `c = 2`; other values
//! of `c` are accepted and the offset is recorded as
//! [`AnalyticFamily::gauge_shift`], so that `−log det g = f + gauge_shift`.

mod cao;

use num_complex::Complex64;
use serde::Serialize;

pub use cao::{cao_f, cao_f_lower_limit, CaoF, CaoPoint, CaoProfile};

use crate::ckgeom::{HermitianMatrix, MetricField, ScalarField};
use crate::error::{Error, Result};
use crate::special::dilog;

/// Which closed form a family uses, with its parameters.
#[derive(Debug, Clone)]
pub enum FamilyKind {
    Cigar { c: f64, h: f64 },
    Product { c: Vec<f64>, h: Vec<f64> },
    Cao(CaoProfile),
}

/// Parameters of a family in a serializable form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyParams {
    pub family: &'static str,
    pub dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<f64>>,
    pub h: Vec<f64>,
}

/// A closed-form soliton with exact evaluators.
#[derive(Debug, Clone)]
pub struct AnalyticFamily {
    kind: FamilyKind,
    eigenvalues: Vec<f64>,
    soliton_h: f64,
    gauge_shift: f64,
}

/// Hamilton's cigar `2|dw|²/(c + h|w|²)` on `{c + h|w|² > 0}`.
pub fn make_cigar(c: f64, h: f64) -> Result<AnalyticFamily> {
    check_factor(c, h)?;
    Ok(AnalyticFamily {
        kind: FamilyKind::Cigar { c, h },
        eigenvalues: vec![h],
        soliton_h: h,
        gauge_shift: (c / 2.0).ln(),
    })
}

/// Product of cigar factors `Σ_k 2|dw^k|²/(c_k + h_k|w^k|²)`.
pub fn make_product(c: &[f64], h: &[f64]) -> Result<AnalyticFamily> {
    if c.is_empty() || c.len() != h.len() {
        return Err(Error::InvalidParam(format!(
            "product needs equally many c and h values, got {} and {}",
            c.len(),
            h.len()
        )));
    }
    for (&ck, &hk) in c.iter().zip(h) {
        check_factor(ck, hk)?;
    }
    Ok(AnalyticFamily {
        kind: FamilyKind::Product { c: c.to_vec(), h: h.to_vec() },
        eigenvalues: h.to_vec(),
        soliton_h: h.iter().sum(),
        gauge_shift: c.iter().map(|ck| (ck / 2.0).ln()).sum(),
    })
}

/// Cao's `U(n)`-invariant soliton with `Z = h_axis Σ z^k ∂/∂z^k`.
///
/// The divergence of `Z` is `n · h_axis`, which is the soliton constant.
pub fn make_cao(n: usize, h_axis: f64) -> Result<AnalyticFamily> {
    let profile = CaoProfile::new(n, h_axis)?;
    Ok(AnalyticFamily {
        kind: FamilyKind::Cao(profile),
        eigenvalues: vec![h_axis; n],
        soliton_h: n as f64 * h_axis,
        gauge_shift: 0.0,
    })
}

fn check_factor(c: f64, h: f64) -> Result<()> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::InvalidParam(format!("c must be positive, got {c}")));
    }
    if !h.is_finite() {
        return Err(Error::InvalidParam(format!("h must be finite, got {h}")));
    }
    Ok(())
}

/// Cigar factor pieces as functions of `r = |w|²`.
mod factor {
    use super::dilog;

    pub fn metric(c: f64, h: f64, r: f64) -> f64 {
        2.0 / (c + h * r)
    }

    pub fn ricci(c: f64, h: f64, r: f64) -> f64 {
        let d = c + h * r;
        2.0 * c * h / (d * d)
    }

    pub fn ricci_potential(c: f64, h: f64, r: f64) -> f64 {
        (h * r / c).ln_1p()
    }

    /// `u(r) = −(2/h) Li₂(−h r / c)`, so that `(r u')' = 2/(c + h r)`.
    pub fn potential(c: f64, h: f64, r: f64) -> f64 {
        if h == 0.0 {
            2.0 * r / c
        } else {
            -(2.0 / h) * dilog(-h * r / c)
        }
    }

    /// `r u'(r)`
    pub fn euler1(c: f64, h: f64, r: f64) -> f64 {
        if h == 0.0 {
            2.0 * r / c
        } else {
            (2.0 / h) * (h * r / c).ln_1p()
        }
    }

    /// `r (r u')'`
    pub fn euler2(c: f64, h: f64, r: f64) -> f64 {
        2.0 * r / (c + h * r)
    }
}

/// Values of a toric potential `u(r¹, …, rⁿ)` and its Euler derivatives
/// `θ_i = r^i ∂/∂r^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ToricJet {
    pub u: f64,
    /// `θ_i u`
    pub first: Vec<f64>,
    /// `θ_i θ_j u`
    pub second: Vec<Vec<f64>>,
}

impl AnalyticFamily {
    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            FamilyKind::Cigar { .. } => "cigar",
            FamilyKind::Product { .. } => "product",
            FamilyKind::Cao(_) => "cao",
        }
    }

    pub fn params(&self) -> FamilyParams {
        let c = match &self.kind {
            FamilyKind::Cigar { c, .. } => Some(vec![*c]),
            FamilyKind::Product { c, .. } => Some(c.clone()),
            FamilyKind::Cao(_) => None,
        };
        FamilyParams { family: self.name(), dim: self.dim_n(), c, h: self.eigenvalues.clone() }
    }

    fn dim_n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Eigenvalues `(h₁, …, hₙ)` of the linear field `Z`.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// The constant `h = ½(R + |∇f|²)`, the divergence of `Z`.
    pub fn soliton_h(&self) -> f64 {
        self.soliton_h
    }

    /// Offset with `−log det g = f + gauge_shift`; zero in the exact gauge.
    pub fn gauge_shift(&self) -> f64 {
        self.gauge_shift
    }

    /// Factors `(c_k, h_k)` for cigar and product families.
    fn factors(&self) -> Option<Vec<(f64, f64)>> {
        match &self.kind {
            FamilyKind::Cigar { c, h } => Some(vec![(*c, *h)]),
            FamilyKind::Product { c, h } => Some(c.iter().copied().zip(h.iter().copied()).collect()),
            FamilyKind::Cao(_) => None,
        }
    }

    fn radius_sq(z: &[Complex64]) -> f64 {
        z.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn in_domain(&self, z: &[Complex64]) -> bool {
        if z.len() != self.dim_n() {
            return false;
        }
        match &self.kind {
            FamilyKind::Cao(p) => Self::radius_sq(z) < p.r_max(),
            _ => self
                .factors()
                .unwrap()
                .iter()
                .zip(z)
                .all(|(&(c, h), w)| c + h * w.norm_sqr() > 0.0),
        }
    }

    fn require(&self, z: &[Complex64]) -> Result<()> {
        if self.in_domain(z) {
            Ok(())
        } else {
            Err(Error::OutOfDomain(format!("{z:?} is outside the {} domain", self.name())))
        }
    }

    /// Exact metric `g_{ij̄}(z)`.
    pub fn metric_at(&self, z: &[Complex64]) -> Result<HermitianMatrix> {
        self.require(z)?;
        Ok(match &self.kind {
            FamilyKind::Cao(p) => {
                let pt = p.at(Self::radius_sq(z))?;
                HermitianMatrix::from_fn(z.len(), |i, j| {
                    let delta = if i == j { pt.a } else { 0.0 };
                    Complex64::new(delta, 0.0) + z[i].conj() * z[j] * pt.a_prime
                })
            }
            _ => {
                let d: Vec<f64> = self
                    .factors()
                    .unwrap()
                    .iter()
                    .zip(z)
                    .map(|(&(c, h), w)| factor::metric(c, h, w.norm_sqr()))
                    .collect();
                HermitianMatrix::from_real_diagonal(&d)
            }
        })
    }

    /// Closed-form Ricci form; available for cigar and product families.
    pub fn ricci_exact(&self, z: &[Complex64]) -> Result<Option<HermitianMatrix>> {
        self.require(z)?;
        Ok(self.factors().map(|fs| {
            let d: Vec<f64> = fs.iter().zip(z).map(|(&(c, h), w)| factor::ricci(c, h, w.norm_sqr())).collect();
            HermitianMatrix::from_real_diagonal(&d)
        }))
    }

    /// Ricci potential `f`, normalized by `f(0) = 0`.
    pub fn ricci_potential(&self, z: &[Complex64]) -> Result<f64> {
        self.require(z)?;
        match &self.kind {
            // In special coordinates f = −G = (h/2) r a = b.
            FamilyKind::Cao(p) => p.b(Self::radius_sq(z)),
            _ => Ok(self
                .factors()
                .unwrap()
                .iter()
                .zip(z)
                .map(|(&(c, h), w)| factor::ricci_potential(c, h, w.norm_sqr()))
                .sum()),
        }
    }

    /// Kähler potential `φ` with `φ(0) = 0`.
    pub fn potential_at(&self, z: &[Complex64]) -> Result<f64> {
        self.require(z)?;
        match &self.kind {
            FamilyKind::Cao(p) => p.potential(Self::radius_sq(z)),
            _ => Ok(self
                .factors()
                .unwrap()
                .iter()
                .zip(z)
                .map(|(&(c, h), w)| factor::potential(c, h, w.norm_sqr()))
                .sum()),
        }
    }

    /// Exact holomorphic field `Z^k = h_k z^k`.
    pub fn z_field(&self, z: &[Complex64]) -> Vec<Complex64> {
        self.eigenvalues.iter().zip(z).map(|(h, w)| w * *h).collect()
    }

    /// The potential as a [`ScalarField`].
    pub fn potential(&self) -> FamilyPotential<'_> {
        FamilyPotential(self)
    }

    /// Toric potential `u(r)` and Euler derivatives at `r` (all `r^i ≥ 0`).
    pub fn toric_jet(&self, r: &[f64]) -> Result<ToricJet> {
        let n = self.dim_n();
        if r.len() != n || r.iter().any(|&x| !(x >= 0.0)) {
            return Err(Error::InvalidParam(format!("toric point {r:?} invalid for dimension {n}")));
        }
        match &self.kind {
            FamilyKind::Cao(p) => {
                let s: f64 = r.iter().sum();
                let pt = p.at(s)?;
                let u = p.potential(s)?;
                let first = r.iter().map(|ri| ri * pt.a).collect();
                let second = (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| {
                                let d = if i == j { r[i] * pt.a } else { 0.0 };
                                d + r[i] * r[j] * pt.a_prime
                            })
                            .collect()
                    })
                    .collect();
                Ok(ToricJet { u, first, second })
            }
            _ => {
                let fs = self.factors().unwrap();
                for (&(c, h), &ri) in fs.iter().zip(r) {
                    if c + h * ri <= 0.0 {
                        return Err(Error::OutOfDomain(format!("r = {ri} outside c + h r > 0")));
                    }
                }
                let u = fs.iter().zip(r).map(|(&(c, h), &ri)| factor::potential(c, h, ri)).sum();
                let first = fs.iter().zip(r).map(|(&(c, h), &ri)| factor::euler1(c, h, ri)).collect();
                let second = (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| if i == j { factor::euler2(fs[i].0, fs[i].1, r[i]) } else { 0.0 })
                            .collect()
                    })
                    .collect();
                Ok(ToricJet { u, first, second })
            }
        }
    }
}

impl MetricField for AnalyticFamily {
    fn dim(&self) -> usize {
        self.dim_n()
    }
    fn metric(&self, z: &[Complex64]) -> HermitianMatrix {
        self.metric_at(z)
            .unwrap_or_else(|_| HermitianMatrix::from_real_diagonal(&vec![f64::NAN; z.len()]))
    }
    fn contains(&self, z: &[Complex64]) -> bool {
        self.in_domain(z)
    }
}

/// Borrowed view of a family's Kähler potential.
#[derive(Debug, Clone, Copy)]
pub struct FamilyPotential<'a>(&'a AnalyticFamily);

impl ScalarField for FamilyPotential<'_> {
    fn dim(&self) -> usize {
        self.0.dim_n()
    }
    fn value(&self, z: &[Complex64]) -> f64 {
        self.0.potential_at(z).unwrap_or(f64::NAN)
    }
    fn contains(&self, z: &[Complex64]) -> bool {
        self.0.in_domain(z)
    }
}

/// Cigar metric coefficient under Ricci flow, computed two ways.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowComparison {
    /// `2 / (e^{2ht} c + h|w|²)`
    pub evolved: f64,
    /// `e^{−2ht} · g₀(e^{−ht} w)`
    pub pulled_back: f64,
}

/// Evaluates the evolved cigar metric and the pullback of the initial metric
/// by the flow `Φ(−t)(w) = e^{−ht} w`.
pub fn cigar_flow_pullback(c: f64, h: f64, t: f64, w: Complex64) -> Result<FlowComparison> {
    check_factor(c, h)?;
    let r = w.norm_sqr();
    let denom = (2.0 * h * t).exp() * c + h * r;
    let moved = w * (-h * t).exp();
    let denom0 = c + h * moved.norm_sqr();
    if !(denom > 0.0) || !(denom0 > 0.0) {
        return Err(Error::OutOfDomain(format!("w = {w} outside the cigar domain at t = {t}")));
    }
    let evolved = 2.0 / denom;
    let jacobian_sq = (-2.0 * h * t).exp();
    let pulled_back = jacobian_sq * factor::metric(c, h, moved.norm_sqr());
    Ok(FlowComparison { evolved, pulled_back })
}
