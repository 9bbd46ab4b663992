use num_complex::Complex64;
use serde::Serialize;

use super::{CheckOptions, GridSpec, ModelMetric, ModelPotential, SolitonModel, VerificationReport};
use crate::ckgeom::{associated_z, ricci_from_metric, soliton_constant, wirtinger_derivs, HermitianMatrix};
use crate::error::{Error, Result};

fn require_dim(model: &dyn SolitonModel, grid: &GridSpec) -> Result<()> {
    if grid.dim() != model.dim() {
        return Err(Error::ShapeMismatch(format!("grid has {} axes, model dimension {}", grid.dim(), model.dim())));
    }
    Ok(())
}

/// `½(R + |∇f|²)` against the soliton constant over the grid.
pub fn check_conservation(
    model: &dyn SolitonModel,
    grid: &GridSpec,
    tol: f64,
    opts: &CheckOptions,
) -> Result<VerificationReport> {
    require_dim(model, grid)?;
    let h = model.soliton_h();
    let metric = ModelMetric(model);
    let samples = opts.exec.try_map(&grid.points(), |z| {
        let c = soliton_constant(&metric, z, &opts.scheme)?;
        Ok::<_, Error>((z.clone(), c, (c - h).abs()))
    })?;
    Ok(VerificationReport::from_samples("conservation", model.label(), grid.summary(), samples, tol))
}

/// The two halves of the Monge–Ampère characterization.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReports {
    /// `|det(φ_{ij̄}) e^{½dφ(X)} e^{gauge} − 1|`
    pub monge_ampere: VerificationReport,
    /// `|dφ(Y)|`
    pub y_invariance: VerificationReport,
}

impl ResidualReports {
    pub fn pass(&self) -> bool {
        self.monge_ampere.pass && self.y_invariance.pass
    }
}

/// `det(φ_{ij̄}) e^{½dφ(X)} = 1` and `dφ(Y) = 0`, with
/// `dφ(X) − i dφ(Y) = Σ h_k z^k ∂φ/∂z^k`.
pub fn check_soliton_residual(
    model: &dyn SolitonModel,
    grid: &GridSpec,
    tol: f64,
    opts: &CheckOptions,
) -> Result<ResidualReports> {
    require_dim(model, grid)?;
    let h = model.eigenvalues();
    let gauge = model.gauge_shift();
    let potential = ModelPotential(model);
    let rows = opts.exec.try_map(&grid.points(), |z| {
        let w = wirtinger_derivs(&potential, z, &opts.scheme)?;
        let s: Complex64 = h.iter().zip(z.iter()).zip(&w.grad_z).map(|((hk, zk), dk)| zk * dk * *hk).sum();
        let lhs = w.hess_mixed.determinant() * (0.5 * s.re + gauge).exp();
        Ok::<_, Error>((z.clone(), lhs, -s.im))
    })?;
    let ma = rows.iter().map(|(z, v, _)| (z.clone(), *v, (v - 1.0).abs())).collect();
    let y = rows.into_iter().map(|(z, _, d)| (z, d, d.abs())).collect();
    Ok(ResidualReports {
        monge_ampere: VerificationReport::from_samples("residual/monge-ampere", model.label(), grid.summary(), ma, tol),
        y_invariance: VerificationReport::from_samples("residual/y-invariance", model.label(), grid.summary(), y, tol),
    })
}

/// Integrates `ż = i Z(z)` with the numerically computed `Z` for time
/// `fraction · 2π/h_axis` from `z0` on the given axis and reports the
/// return error. `fraction = 1` is a full period.
pub fn check_periodic_orbit(
    model: &dyn SolitonModel,
    axis: usize,
    z0: Complex64,
    fraction: f64,
    steps: usize,
    tol: f64,
    opts: &CheckOptions,
) -> Result<VerificationReport> {
    let n = model.dim();
    let h = model.eigenvalues();
    if axis >= n {
        return Err(Error::InvalidParam(format!("axis {axis} out of range for dimension {n}")));
    }
    if z0 == Complex64::new(0.0, 0.0) {
        return Err(Error::InvalidParam("orbit start must be off the origin".into()));
    }
    if !(h[axis] > 0.0) {
        return Err(Error::NonPositiveEigenvalue { index: axis, value: h[axis] });
    }
    if steps == 0 {
        return Err(Error::InvalidParam("need at least one step".into()));
    }
    let metric = ModelMetric(model);
    let rhs = |z: &[Complex64]| -> Result<Vec<Complex64>> {
        Ok(associated_z(&metric, z, &opts.scheme)?.components.into_iter().map(|c| c * Complex64::i()).collect())
    };
    let axpy = |z: &[Complex64], k: &[Complex64], a: f64| -> Vec<Complex64> { z.iter().zip(k).map(|(x, y)| x + y * a).collect() };
    let period = fraction * 2.0 * std::f64::consts::PI / h[axis];
    let dt = period / steps as f64;
    let mut start = vec![Complex64::new(0.0, 0.0); n];
    start[axis] = z0;
    let mut z = start.clone();
    for _ in 0..steps {
        let k1 = rhs(&z)?;
        let k2 = rhs(&axpy(&z, &k1, 0.5 * dt))?;
        let k3 = rhs(&axpy(&z, &k2, 0.5 * dt))?;
        let k4 = rhs(&axpy(&z, &k3, dt))?;
        for i in 0..n {
            z[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (dt / 6.0);
        }
    }
    let err = z.iter().zip(&start).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    let grid = format!("axis {}, z0 = {z0}, T = {period} ({fraction} period), {steps} RK4 steps", axis + 1);
    Ok(VerificationReport::from_samples("orbits", model.label(), grid, vec![(start, err, err)], tol))
}

/// `Ric = L_X g` with `X = Re Z`, whose flow is `z^k ↦ e^{h_k t/2} z^k`;
/// the Lie derivative is a central difference of the pullback in `t`.
pub fn check_lie_derivative(
    model: &dyn SolitonModel,
    grid: &GridSpec,
    eps: f64,
    tol: f64,
    opts: &CheckOptions,
) -> Result<VerificationReport> {
    require_dim(model, grid)?;
    if !(eps > 0.0) {
        return Err(Error::InvalidParam(format!("ε must be positive, got {eps}")));
    }
    let h = model.eigenvalues();
    let n = h.len();
    let metric = ModelMetric(model);
    let pullback = |z: &[Complex64], t: f64| -> Result<HermitianMatrix> {
        let moved: Vec<Complex64> = z.iter().zip(&h).map(|(w, hk)| w * (0.5 * hk * t).exp()).collect();
        if !model.contains(&moved) {
            return Err(Error::DomainTooSmall(format!("flow leaves the domain at {moved:?}")));
        }
        let g = model.metric(&moved)?;
        Ok(HermitianMatrix::from_fn(n, |i, j| g.get(i, j) * (0.5 * (h[i] + h[j]) * t).exp()))
    };
    let samples = opts.exec.try_map(&grid.points(), |z| {
        let ric = ricci_from_metric(&metric, z, &opts.scheme)?.ricci;
        let plus = pullback(z, eps)?;
        let minus = pullback(z, -eps)?;
        let lie = HermitianMatrix::from_fn(n, |i, j| (plus.get(i, j) - minus.get(i, j)) / (2.0 * eps));
        let dev = ric.max_abs_diff(&lie);
        Ok::<_, Error>((z.clone(), ric.max_abs(), dev))
    })?;
    Ok(VerificationReport::from_samples("lie", model.label(), grid.summary(), samples, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::make_cigar;
    use crate::verify::{Perturbation, Perturbed};

    #[test]
    fn cigar_conservation_and_control() {
        let c = make_cigar(2.0, 1.0).unwrap();
        let grid = GridSpec::segment(1, 3.0, 41).unwrap();
        let r = check_conservation(&c, &grid, 1e-6, &CheckOptions::default()).unwrap();
        assert!(r.pass, "{r:?}");
        assert!((r.mean_value - 1.0).abs() < 1e-6);
        let bad = Perturbed::new(&c, Perturbation::ScaleMetric);
        assert!(!check_conservation(&bad, &grid, 1e-6, &CheckOptions::default()).unwrap().pass);
    }

    #[test]
    fn cigar_residual_and_control() {
        let c = make_cigar(2.0, 1.0).unwrap();
        let grid = GridSpec::square(1, 2.0, 9).unwrap();
        let r = check_soliton_residual(&c, &grid, 1e-8, &CheckOptions::default()).unwrap();
        assert!(r.pass(), "{r:?}");
        let bad = Perturbed::new(&c, Perturbation::QuarticPotential);
        let r = check_soliton_residual(&bad, &grid, 1e-8, &CheckOptions::default()).unwrap();
        assert!(r.monge_ampere.max_dev > 1e-3);
    }

    #[test]
    fn gauge_shift_is_absorbed() {
        let c = make_cigar(3.5, 1.0).unwrap();
        let grid = GridSpec::square(1, 1.5, 5).unwrap();
        assert!(check_soliton_residual(&c, &grid, 1e-8, &CheckOptions::default()).unwrap().pass());
    }

    #[test]
    fn cigar_orbit_and_quarter_turn() {
        let c = make_cigar(2.0, 1.0).unwrap();
        let o = CheckOptions::default();
        let r = check_periodic_orbit(&c, 0, Complex64::new(1.0, 0.0), 1.0, 2000, 1e-6, &o).unwrap();
        assert!(r.pass, "{r:?}");
        let q = check_periodic_orbit(&c, 0, Complex64::new(1.0, 0.0), 0.25, 500, 1e-6, &o).unwrap();
        assert!((q.max_dev - 2f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn cigar_lie_and_control() {
        let c = make_cigar(2.0, 1.0).unwrap();
        let grid = GridSpec::square(1, 2.0, 7).unwrap();
        let o = CheckOptions::default();
        assert!(check_lie_derivative(&c, &grid, 1e-4, 1e-5, &o).unwrap().pass);
        let bad = Perturbed::new(&c, Perturbation::DoubleEigenvalues);
        assert!(!check_lie_derivative(&bad, &grid, 1e-4, 1e-5, &o).unwrap().pass);
    }
}
