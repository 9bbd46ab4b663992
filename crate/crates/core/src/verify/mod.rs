//! Invariant checks on soliton models, each producing a report with a
//! pass verdict, plus the perturbations used as negative controls.

mod affine;
mod checks;
mod growth;

use num_complex::Complex64;
use serde::Serialize;

pub use affine::{apply_affine_symmetry, perturb_rho_graph, rho_graph_from_family, rho_residual, AffineSymmetry};
pub use checks::{
    check_conservation, check_lie_derivative, check_periodic_orbit, check_soliton_residual, ResidualReports,
};
pub use growth::{check_growth, default_radii, DirectionGrowth, GrowthReport};

use crate::ckgeom::{FDScheme, HermitianMatrix, MetricField, ScalarField};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::families::AnalyticFamily;
use crate::toric::{toric_eval, TruncatedSeries};

/// A Kähler metric with potential, Ricci potential and linear field `Z_h`,
/// all in special coordinates.
pub trait SolitonModel: Sync {
    fn label(&self) -> String;
    fn dim(&self) -> usize;
    /// Eigenvalues of `Z = Σ h_k z^k ∂/∂z^k`.
    fn eigenvalues(&self) -> Vec<f64>;
    fn soliton_h(&self) -> f64;
    fn contains(&self, z: &[Complex64]) -> bool;
    fn metric(&self, z: &[Complex64]) -> Result<HermitianMatrix>;
    fn potential(&self, z: &[Complex64]) -> Result<f64>;
    fn ricci_potential(&self, z: &[Complex64]) -> Result<f64>;
    /// Constant with `−log det g = f + gauge_shift`.
    fn gauge_shift(&self) -> f64 {
        0.0
    }
}

impl SolitonModel for AnalyticFamily {
    fn label(&self) -> String {
        let p = self.params();
        match p.c {
            Some(c) => format!("{}(c={c:?}, h={:?})", p.family, p.h),
            None => format!("{}(n={}, h={:?})", p.family, p.dim, p.h),
        }
    }
    fn dim(&self) -> usize {
        self.eigenvalues().len()
    }
    fn eigenvalues(&self) -> Vec<f64> {
        AnalyticFamily::eigenvalues(self).to_vec()
    }
    fn soliton_h(&self) -> f64 {
        AnalyticFamily::soliton_h(self)
    }
    fn contains(&self, z: &[Complex64]) -> bool {
        self.in_domain(z)
    }
    fn metric(&self, z: &[Complex64]) -> Result<HermitianMatrix> {
        self.metric_at(z)
    }
    fn potential(&self, z: &[Complex64]) -> Result<f64> {
        self.potential_at(z)
    }
    fn ricci_potential(&self, z: &[Complex64]) -> Result<f64> {
        AnalyticFamily::ricci_potential(self, z)
    }
    fn gauge_shift(&self) -> f64 {
        AnalyticFamily::gauge_shift(self)
    }
}

/// A truncated toric series `u` evaluated inside its trust region.
#[derive(Debug, Clone)]
pub struct SeriesModel {
    pub u: TruncatedSeries,
    pub h: Vec<f64>,
    pub trust: f64,
}

impl SeriesModel {
    pub fn new(u: TruncatedSeries, h: Vec<f64>, trust: f64) -> Result<Self> {
        if u.nvars() != h.len() {
            return Err(Error::ShapeMismatch(format!("series in {} variables, {} eigenvalues", u.nvars(), h.len())));
        }
        Ok(SeriesModel { u, h, trust })
    }
}

impl SolitonModel for SeriesModel {
    fn label(&self) -> String {
        format!("series(n={}, degree={}, h={:?})", self.u.nvars(), self.u.degree(), self.h)
    }
    fn dim(&self) -> usize {
        self.h.len()
    }
    fn eigenvalues(&self) -> Vec<f64> {
        self.h.clone()
    }
    fn soliton_h(&self) -> f64 {
        self.h.iter().sum()
    }
    fn contains(&self, z: &[Complex64]) -> bool {
        z.len() == self.h.len() && z.iter().all(|w| w.norm_sqr() < self.trust)
    }
    fn metric(&self, z: &[Complex64]) -> Result<HermitianMatrix> {
        Ok(toric_eval(&self.u, &self.h, z, self.trust)?.g)
    }
    fn potential(&self, z: &[Complex64]) -> Result<f64> {
        Ok(toric_eval(&self.u, &self.h, z, self.trust)?.phi)
    }
    fn ricci_potential(&self, z: &[Complex64]) -> Result<f64> {
        Ok(toric_eval(&self.u, &self.h, z, self.trust)?.f)
    }
}

/// Deliberate defects used as negative controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Perturbation {
    /// `g ↦ (1 + 0.1|z|²) g`
    ScaleMetric,
    /// `φ ↦ φ + 0.01|z¹|⁴` (metric is taken from the new potential)
    QuarticPotential,
    /// `f ↦ f/2`
    HalveRicciPotential,
    /// `h ↦ 2h` in the field used to transport the metric
    DoubleEigenvalues,
}

/// A model with one [`Perturbation`] applied.
pub struct Perturbed<'a> {
    pub base: &'a dyn SolitonModel,
    pub kind: Perturbation,
}

impl<'a> Perturbed<'a> {
    pub fn new(base: &'a dyn SolitonModel, kind: Perturbation) -> Self {
        Perturbed { base, kind }
    }
}

impl SolitonModel for Perturbed<'_> {
    fn label(&self) -> String {
        format!("{} perturbed by {:?}", self.base.label(), self.kind)
    }
    fn dim(&self) -> usize {
        self.base.dim()
    }
    fn eigenvalues(&self) -> Vec<f64> {
        let h = self.base.eigenvalues();
        match self.kind {
            Perturbation::DoubleEigenvalues => h.iter().map(|x| 2.0 * x).collect(),
            _ => h,
        }
    }
    fn soliton_h(&self) -> f64 {
        self.base.soliton_h()
    }
    fn contains(&self, z: &[Complex64]) -> bool {
        self.base.contains(z)
    }
    fn metric(&self, z: &[Complex64]) -> Result<HermitianMatrix> {
        let g = self.base.metric(z)?;
        Ok(match self.kind {
            Perturbation::ScaleMetric => g.scale(1.0 + 0.1 * z.iter().map(|w| w.norm_sqr()).sum::<f64>()),
            Perturbation::QuarticPotential => {
                // ∂∂̄ |z¹|⁴ = 4|z¹|² in the (1,1) slot.
                let mut m = g.as_matrix().clone();
                m[(0, 0)] += Complex64::new(0.04 * z[0].norm_sqr(), 0.0);
                HermitianMatrix::from_matrix(m)
            }
            _ => g,
        })
    }
    fn potential(&self, z: &[Complex64]) -> Result<f64> {
        let p = self.base.potential(z)?;
        Ok(match self.kind {
            Perturbation::QuarticPotential => p + 0.01 * z[0].norm_sqr().powi(2),
            _ => p,
        })
    }
    fn ricci_potential(&self, z: &[Complex64]) -> Result<f64> {
        let f = self.base.ricci_potential(z)?;
        Ok(match self.kind {
            Perturbation::HalveRicciPotential => 0.5 * f,
            _ => f,
        })
    }
    fn gauge_shift(&self) -> f64 {
        self.base.gauge_shift()
    }
}

/// [`MetricField`] view of a model; failures surface as NaN entries, which
/// the curvature routines reject.
pub struct ModelMetric<'a>(pub &'a dyn SolitonModel);

impl MetricField for ModelMetric<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn metric(&self, z: &[Complex64]) -> HermitianMatrix {
        self.0
            .metric(z)
            .unwrap_or_else(|_| HermitianMatrix::from_real_diagonal(&vec![f64::NAN; z.len()]))
    }
    fn contains(&self, z: &[Complex64]) -> bool {
        self.0.contains(z)
    }
}

/// [`ScalarField`] view of a model's Kähler potential.
pub struct ModelPotential<'a>(pub &'a dyn SolitonModel);

impl ScalarField for ModelPotential<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn value(&self, z: &[Complex64]) -> f64 {
        self.0.potential(z).unwrap_or(f64::NAN)
    }
    fn contains(&self, z: &[Complex64]) -> bool {
        self.0.contains(z)
    }
}

/// Samples along one complex axis: a rectangle `re × im` in ℂ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxisRange {
    pub re: (f64, f64),
    pub im: (f64, f64),
    pub n_re: usize,
    pub n_im: usize,
}

impl AxisRange {
    fn values(&self) -> Vec<Complex64> {
        let lin = |(a, b): (f64, f64), n: usize, k: usize| if n <= 1 { 0.5 * (a + b) } else { a + (b - a) * k as f64 / (n - 1) as f64 };
        let mut out = Vec::with_capacity(self.n_re * self.n_im);
        for i in 0..self.n_re {
            for j in 0..self.n_im {
                out.push(Complex64::new(lin(self.re, self.n_re, i), lin(self.im, self.n_im, j)));
            }
        }
        out
    }
}

pub const MAX_GRID_POINTS: usize = 1_000_000;

/// Product grid over the complex axes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    pub axes: Vec<AxisRange>,
}

impl GridSpec {
    pub fn new(axes: Vec<AxisRange>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidParam("grid needs at least one axis".into()));
        }
        let total = axes.iter().try_fold(1usize, |acc, a| acc.checked_mul(a.n_re * a.n_im));
        match total {
            Some(t) if t > 0 && t <= MAX_GRID_POINTS => Ok(GridSpec { axes }),
            _ => Err(Error::InvalidParam(format!("grid size must be between 1 and {MAX_GRID_POINTS}"))),
        }
    }

    /// `count` real points on `[−rmax, rmax]` per axis.
    pub fn segment(dim: usize, rmax: f64, count: usize) -> Result<Self> {
        Self::new(vec![AxisRange { re: (-rmax, rmax), im: (0.0, 0.0), n_re: count, n_im: 1 }; dim])
    }

    /// `count × count` points on the square `[−rmax, rmax]²` per axis.
    pub fn square(dim: usize, rmax: f64, count: usize) -> Result<Self> {
        Self::new(vec![AxisRange { re: (-rmax, rmax), im: (-rmax, rmax), n_re: count, n_im: count }; dim])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.n_re * a.n_im).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All grid points, the first axis varying slowest.
    pub fn points(&self) -> Vec<Vec<Complex64>> {
        let per_axis: Vec<Vec<Complex64>> = self.axes.iter().map(AxisRange::values).collect();
        let mut out: Vec<Vec<Complex64>> = vec![Vec::new()];
        for vals in &per_axis {
            out = out.into_iter().flat_map(|p| vals.iter().map(move |v| [p.clone(), vec![*v]].concat())).collect();
        }
        out
    }

    pub fn summary(&self) -> String {
        let parts: Vec<String> = self
            .axes
            .iter()
            .map(|a| format!("[{},{}]x[{},{}]i ({}x{})", a.re.0, a.re.1, a.im.0, a.im.1, a.n_re, a.n_im))
            .collect();
        format!("{} points: {}", self.len(), parts.join(" * "))
    }
}

/// Numerical settings shared by the checks.
#[derive(Debug, Clone, Copy, Default)]
pub struct CheckOptions {
    pub scheme: FDScheme,
    pub exec: Execution,
}

/// One of the worst points of a check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointDeviation {
    /// `[Re z^1, Im z^1, Re z^2, …]`
    pub point: Vec<f64>,
    pub value: f64,
    pub deviation: f64,
}

pub const MAX_DETAILS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub check: String,
    pub subject: String,
    pub grid: String,
    pub points: usize,
    pub max_dev: f64,
    pub mean_dev: f64,
    /// Mean of the sampled quantity.
    pub mean_value: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub details: Vec<PointDeviation>,
}

impl VerificationReport {
    /// Builds a report from `(point, value, deviation)` samples; NaN
    /// deviations count as failures.
    pub fn from_samples(
        check: &str,
        subject: String,
        grid: String,
        samples: Vec<(Vec<Complex64>, f64, f64)>,
        tolerance: f64,
    ) -> Self {
        let points = samples.len();
        let finite = samples.iter().all(|s| s.2.is_finite());
        let max_dev = samples.iter().map(|s| s.2).fold(0.0, |m: f64, d| if d.is_nan() { f64::NAN } else { m.max(d) });
        let max_dev = if finite { max_dev } else { f64::INFINITY };
        let n = points.max(1) as f64;
        let mean_dev = samples.iter().map(|s| s.2).sum::<f64>() / n;
        let mean_value = samples.iter().map(|s| s.1).sum::<f64>() / n;
        let mut order: Vec<usize> = (0..points).collect();
        order.sort_by(|&a, &b| samples[b].2.partial_cmp(&samples[a].2).unwrap_or(std::cmp::Ordering::Equal));
        let details = order
            .into_iter()
            .take(MAX_DETAILS)
            .map(|i| PointDeviation {
                point: samples[i].0.iter().flat_map(|c| [c.re, c.im]).collect(),
                value: samples[i].1,
                deviation: samples[i].2,
            })
            .collect();
        VerificationReport {
            check: check.to_string(),
            subject,
            grid,
            points,
            max_dev,
            mean_dev,
            mean_value,
            tolerance,
            pass: points > 0 && max_dev <= tolerance,
            details,
        }
    }
}
