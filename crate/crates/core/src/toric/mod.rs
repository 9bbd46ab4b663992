//! Toric reduction: the potential `u(r¹, …, rⁿ)` with `r^i = |z^i|²`, the
//! reduced Monge–Ampère equation
//! `det(θ_iθ_j u) · exp(½ Σ h_j θ_j u) = r¹⋯rⁿ` (`θ_i = r^i ∂/∂r^i`),
//! and its order-by-order solution from data on `t = rⁿ = 0`.

mod io;
mod series;

use num_complex::Complex64;

pub use io::{read_series, write_series};
pub use series::{series_det, TruncatedSeries, MAX_DEGREE, MAX_VARS};

use crate::ckgeom::HermitianMatrix;
use crate::error::{Error, Result};

/// Default bound on each `r^i` when evaluating a truncated solution.
pub const DEFAULT_TRUST: f64 = 0.5;

/// Coefficients beyond this size abort the solver.
pub const GROWTH_LIMIT: f64 = 1e12;

/// `det(θ_iθ_j u) · exp(½ Σ h_j θ_j u) − r¹⋯rⁿ`, truncated at the cap of `u`.
pub fn ma_residual(u: &TruncatedSeries, h: &[f64]) -> Result<TruncatedSeries> {
    let n = u.nvars();
    if n > MAX_VARS {
        return Err(Error::DimensionTooLarge(n));
    }
    if h.len() != n {
        return Err(Error::ShapeMismatch(format!("{} eigenvalues for {n} variables", h.len())));
    }
    let d = u.degree();
    let theta: Vec<TruncatedSeries> = (0..n).map(|i| u.euler(i)).collect();
    let hess: Vec<Vec<TruncatedSeries>> = (0..n).map(|i| (0..n).map(|j| theta[j].euler(i)).collect()).collect();
    let det = series_det(&hess, n, d)?;
    let mut drift = TruncatedSeries::zero(n, d)?;
    for (hj, tj) in h.iter().zip(&theta) {
        drift = drift.add(&tj.scale(0.5 * hj))?;
    }
    let mut lhs = det.mul(&drift.exp())?;
    let ones = vec![1u16; n];
    if n <= d {
        let c = lhs.coeff(&ones);
        lhs.set(&ones, c - 1.0)?;
    }
    Ok(lhs)
}

/// `det(δ_ij u_i + r^j u_ij) · exp(½ Σ h_j r^j u_j) − 1`, with `u_i = ∂u/∂r^i`.
///
/// Equals the θ-form residual divided by `r¹⋯rⁿ`; exact through degree `D − 1`.
fn reduced_residual(u: &TruncatedSeries, h: &[f64]) -> Result<TruncatedSeries> {
    let n = u.nvars();
    let d = u.degree();
    let grad: Vec<TruncatedSeries> = (0..n).map(|i| u.partial(i)).collect();
    let m: Vec<Vec<TruncatedSeries>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut e = grad[i].partial(j).shift(j);
                    if i == j {
                        e = e.add(&grad[i]).expect("same shape");
                    }
                    e
                })
                .collect()
        })
        .collect();
    let det = series_det(&m, n, d)?;
    let mut drift = TruncatedSeries::zero(n, d)?;
    for (j, hj) in h.iter().enumerate() {
        drift = drift.add(&grad[j].shift(j).scale(0.5 * hj))?;
    }
    Ok(det.mul(&drift.exp())?.add_constant(-1.0))
}

/// Data on the divisor `t = rⁿ = 0`: `u(r¹, …, r^{n−1}, 0) = v`.
#[derive(Debug, Clone, PartialEq)]
pub struct ToricInitialData {
    v: TruncatedSeries,
    h: Vec<f64>,
}

impl ToricInitialData {
    /// `v` must have `h.len() − 1` variables, `v(0) = 0` and `∂v/∂r^i(0) ≥ 0`.
    pub fn new(v: TruncatedSeries, h: Vec<f64>) -> Result<Self> {
        let n = h.len();
        if n == 0 {
            return Err(Error::InvalidParam("need at least one eigenvalue".into()));
        }
        if n > MAX_VARS {
            return Err(Error::DimensionTooLarge(n));
        }
        if v.nvars() + 1 != n {
            return Err(Error::ShapeMismatch(format!("v has {} variables, expected {}", v.nvars(), n - 1)));
        }
        if let Some(x) = h.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidParam(format!("eigenvalue {x} is not finite")));
        }
        if v.constant_term().abs() > 1e-14 {
            return Err(Error::InvalidInitialData(format!("v(0) = {} but the gauge needs v(0) = 0", v.constant_term())));
        }
        for i in 0..v.nvars() {
            let mut e = vec![0u16; v.nvars()];
            e[i] = 1;
            let slope = v.coeff(&e);
            if slope < 0.0 {
                return Err(Error::InvalidInitialData(format!("∂v/∂r^{} (0) = {slope} is negative", i + 1)));
            }
        }
        Ok(ToricInitialData { v, h })
    }

    /// `v = r¹ + ⋯ + r^{n−1}`; for `n = 1` this is the empty data.
    pub fn flat(h: Vec<f64>, degree: usize) -> Result<Self> {
        let n = h.len().max(1);
        let mut v = TruncatedSeries::zero(n - 1, degree)?;
        for i in 0..n - 1 {
            v = v.add(&TruncatedSeries::variable(n - 1, degree, i)?)?;
        }
        Self::new(v, h)
    }

    /// `v = 0`; only non-degenerate for `n = 1`.
    pub fn zero(h: Vec<f64>, degree: usize) -> Result<Self> {
        let n = h.len().max(1);
        Self::new(TruncatedSeries::zero(n - 1, degree)?, h)
    }

    pub fn v(&self) -> &TruncatedSeries {
        &self.v
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }
}

/// Solves the singular initial value problem to total degree `D`.
///
/// Writes `u = v + Σ_{m≥1} z_m(r′) t^m`. The `t^{m−1}` coefficient of the
/// reduced residual depends on `z_m` only through `m² z_m K E₀`, where
/// `K = det(δ_ij v_i + r^j v_ij)` and `E₀ = exp(½ Σ_{j<n} h_j r^j v_j)`, so
/// each order is a single series division.
pub fn solve_singular_ivp(init: &ToricInitialData, degree: usize) -> Result<TruncatedSeries> {
    if degree < 2 {
        return Err(Error::InvalidParam(format!("degree {degree} < 2")));
    }
    let h = init.h();
    let n = h.len();
    let v = init.v().with_degree(degree)?;

    let grad: Vec<TruncatedSeries> = (0..n - 1).map(|i| v.partial(i)).collect();
    let minor: Vec<Vec<TruncatedSeries>> = (0..n - 1)
        .map(|i| {
            (0..n - 1)
                .map(|j| {
                    let mut e = grad[i].partial(j).shift(j);
                    if i == j {
                        e = e.add(&grad[i]).expect("same shape");
                    }
                    e
                })
                .collect()
        })
        .collect();
    let k = series_det(&minor, n - 1, degree)?;
    if k.constant_term() == 0.0 {
        return Err(Error::DegenerateInitialData(
            "det(δ_ij v_i + r^j v_ij) vanishes at the origin".into(),
        ));
    }
    let mut drift = TruncatedSeries::zero(n - 1, degree)?;
    for j in 0..n - 1 {
        drift = drift.add(&grad[j].shift(j).scale(0.5 * h[j]))?;
    }
    let inv_lead = k.mul(&drift.exp())?.recip()?;

    let mut u = v.embed(n, degree)?;
    for m in 1..=degree {
        let q = reduced_residual(&u, h)?.last_var_coefficient(m - 1)?;
        let z = q.mul(&inv_lead)?.scale(-1.0 / (m * m) as f64).with_degree(degree - m)?;
        if !(z.max_abs_coeff() <= GROWTH_LIMIT) {
            return Err(Error::NonConvergent { order: m, limit: GROWTH_LIMIT });
        }
        u.add_last_var_term(&z.with_degree(degree)?, m)?;
    }
    Ok(u)
}

/// Potential, metric and Ricci potential of a toric solution at `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct ToricEval {
    pub phi: f64,
    pub g: HermitianMatrix,
    pub f: f64,
}

/// Evaluates `φ = u(|z¹|², …)`, `g_{ij̄} = δ_ij u_i + z̄^i z^j u_ij` and
/// `f = ½ Σ h_j r^j u_j`, refusing points with some `r^i > trust`.
pub fn toric_eval(u: &TruncatedSeries, h: &[f64], z: &[Complex64], trust: f64) -> Result<ToricEval> {
    let n = u.nvars();
    if h.len() != n || z.len() != n {
        return Err(Error::ShapeMismatch(format!("{n} variables, {} eigenvalues, point of length {}", h.len(), z.len())));
    }
    let r: Vec<f64> = z.iter().map(|w| w.norm_sqr()).collect();
    if let Some(&bad) = r.iter().find(|&&x| x > trust) {
        return Err(Error::OutOfTrustRegion { r: bad, trust });
    }
    let grad: Vec<TruncatedSeries> = (0..n).map(|i| u.partial(i)).collect();
    let gi: Vec<f64> = grad.iter().map(|s| s.eval(&r)).collect::<Result<_>>()?;
    let mut hess = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let v = grad[i].partial(j).eval(&r)?;
            hess[i][j] = v;
            hess[j][i] = v;
        }
    }
    let g = HermitianMatrix::from_fn(n, |i, j| {
        let d = if i == j { gi[i] } else { 0.0 };
        Complex64::new(d, 0.0) + z[i].conj() * z[j] * hess[i][j]
    });
    let f = 0.5 * (0..n).map(|j| h[j] * r[j] * gi[j]).sum::<f64>();
    Ok(ToricEval { phi: u.eval(&r)?, g, f })
}

/// One point of the graph of `u` in logarithmic coordinates `ρ^i = log r^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct RhoSample {
    pub rho: Vec<f64>,
    pub u: f64,
    /// `∂u/∂ρ^i = θ_i u`
    pub u_i: Vec<f64>,
    /// `∂²u/∂ρ^i∂ρ^j = θ_iθ_j u`
    pub u_ij: Vec<Vec<f64>>,
}

/// Sampled graph `ρ ↦ (u, ∂u/∂ρ, ∂²u/∂ρ²)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RhoGraph {
    pub samples: Vec<RhoSample>,
}

impl RhoGraph {
    pub fn new(samples: Vec<RhoSample>) -> Result<Self> {
        let n = samples.first().map_or(0, |s| s.rho.len());
        for s in &samples {
            if s.rho.len() != n || s.u_i.len() != n || s.u_ij.len() != n || s.u_ij.iter().any(|r| r.len() != n) {
                return Err(Error::ShapeMismatch("inconsistent sample dimensions in ρ-graph".into()));
            }
            for i in 0..n {
                for j in 0..i {
                    let (a, b) = (s.u_ij[i][j], s.u_ij[j][i]);
                    if (a - b).abs() > 1e-12 * (1.0 + a.abs()) {
                        return Err(Error::ShapeMismatch(format!("u_ij not symmetric at ρ = {:?}", s.rho)));
                    }
                }
            }
        }
        Ok(RhoGraph { samples })
    }

    pub fn dim(&self) -> usize {
        self.samples.first().map_or(0, |s| s.rho.len())
    }

    /// Samples a series solution at `r^i = e^{ρ^i}` inside the trust region.
    pub fn from_series(u: &TruncatedSeries, rhos: &[Vec<f64>], trust: f64) -> Result<Self> {
        let n = u.nvars();
        let theta: Vec<TruncatedSeries> = (0..n).map(|i| u.euler(i)).collect();
        let theta2: Vec<Vec<TruncatedSeries>> = (0..n).map(|i| (0..n).map(|j| theta[j].euler(i)).collect()).collect();
        let mut samples = Vec::with_capacity(rhos.len());
        for rho in rhos {
            if rho.len() != n {
                return Err(Error::ShapeMismatch(format!("ρ of length {} for {n} variables", rho.len())));
            }
            let r: Vec<f64> = rho.iter().map(|x| x.exp()).collect();
            if let Some(&bad) = r.iter().find(|&&x| x > trust) {
                return Err(Error::OutOfTrustRegion { r: bad, trust });
            }
            samples.push(RhoSample {
                rho: rho.clone(),
                u: u.eval(&r)?,
                u_i: theta.iter().map(|s| s.eval(&r)).collect::<Result<_>>()?,
                u_ij: theta2.iter().map(|row| row.iter().map(|s| s.eval(&r)).collect::<Result<_>>()).collect::<Result<_>>()?,
            });
        }
        Self::new(samples)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dilog_cigar(degree: usize) -> TruncatedSeries {
        let c: Vec<f64> = (0..=degree)
            .map(|k| if k == 0 { 0.0 } else { 2.0 * (-1f64).powi(k as i32 + 1) * 0.5f64.powi(k as i32) / (k * k) as f64 })
            .collect();
        TruncatedSeries::univariate(&c, degree).unwrap()
    }

    #[test]
    fn residual_of_flat_potential() {
        let u = TruncatedSeries::univariate(&[0.0, 1.0], 4).unwrap();
        let res = ma_residual(&u, &[1.0]).unwrap();
        assert_eq!(res.coeff(&[1]), 0.0);
        assert!((res.coeff(&[2]) - 0.5).abs() < 1e-15);
        assert!((res.coeff(&[3]) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn dilog_cigar_solves_the_equation() {
        let res = ma_residual(&dilog_cigar(8), &[1.0]).unwrap();
        assert!(res.max_abs_coeff() <= 1e-13, "{res:?}");
    }

    #[test]
    fn one_dimensional_solver() {
        let u = solve_singular_ivp(&ToricInitialData::zero(vec![1.0], 3).unwrap(), 3).unwrap();
        assert!((u.coeff(&[1]) - 1.0).abs() < 1e-15);
        assert!((u.coeff(&[2]) + 0.125).abs() < 1e-15);
        assert!((u.coeff(&[3]) - 1.0 / 36.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_and_invalid_data() {
        assert!(matches!(
            solve_singular_ivp(&ToricInitialData::zero(vec![1.0, 1.0], 4).unwrap(), 4),
            Err(Error::DegenerateInitialData(_))
        ));
        let v = TruncatedSeries::univariate(&[0.1, 1.0], 4).unwrap();
        assert!(matches!(ToricInitialData::new(v, vec![1.0, 1.0]), Err(Error::InvalidInitialData(_))));
        let v = TruncatedSeries::univariate(&[0.0, -1.0], 4).unwrap();
        assert!(matches!(ToricInitialData::new(v, vec![1.0, 1.0]), Err(Error::InvalidInitialData(_))));
    }

    #[test]
    fn eval_flat_and_cigar() {
        let u = TruncatedSeries::from_terms(2, 4, [(&[1u16, 0][..], 1.0), (&[0, 1][..], 1.0)]).unwrap();
        let z = [Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.4)];
        let e = toric_eval(&u, &[1.0, 2.0], &z, DEFAULT_TRUST).unwrap();
        assert!(e.g.max_abs_diff(&HermitianMatrix::identity(2)) < 1e-15);
        assert!((e.f - 0.5 * (0.1 + 2.0 * 0.2)).abs() < 1e-15);

        let u = solve_singular_ivp(&ToricInitialData::zero(vec![1.0], 30).unwrap(), 30).unwrap();
        let e = toric_eval(&u, &[1.0], &[Complex64::new(0.5, 0.0)], DEFAULT_TRUST).unwrap();
        assert!((e.f - 1.125f64.ln()).abs() < 1e-10);
        assert!(matches!(
            toric_eval(&u, &[1.0], &[Complex64::new(0.8, 0.0)], DEFAULT_TRUST),
            Err(Error::OutOfTrustRegion { .. })
        ));
    }

    #[test]
    fn rho_graph_symmetry() {
        let u = solve_singular_ivp(&ToricInitialData::flat(vec![1.0, 2.0], 6).unwrap(), 6).unwrap();
        let g = RhoGraph::from_series(&u, &[vec![-2.0, -1.5], vec![-1.0, -3.0]], DEFAULT_TRUST).unwrap();
        assert_eq!(g.dim(), 2);
        assert_eq!(g.samples[0].u_ij[0][1], g.samples[0].u_ij[1][0]);
    }
}
