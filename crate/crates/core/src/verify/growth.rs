use num_complex::Complex64;
use serde::Serialize;

use super::{CheckOptions, SolitonModel};
use crate::error::{Error, Result};

/// 12 geometric radii from 10 to 10⁶.
pub fn default_radii() -> Vec<f64> {
    (0..12).map(|k| 10f64.powf(1.0 + 5.0 * k as f64 / 11.0)).collect()
}

/// Growth of `f` along one ray `s ↦ s·d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionGrowth {
    /// Unit direction as `[Re d^1, Im d^1, …]`.
    pub direction: Vec<f64>,
    pub radii: Vec<f64>,
    /// `f(s·d) / log s`
    pub ratios: Vec<f64>,
    /// Secant slopes `Δf / Δlog s` between consecutive radii.
    pub slopes: Vec<f64>,
    /// Growth rate: the last secant slope. Converges to the same limit as
    /// the ratio but without its `O(1/log s)` offset.
    pub mu_est: f64,
    /// `|∇f|² = g(Z, Z̄)` at each radius.
    pub grad_sq: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthReport {
    pub subject: String,
    pub directions: Vec<DirectionGrowth>,
    /// The bracketed value `2n`.
    pub two_n: f64,
    pub mu_min: f64,
    pub mu_max: f64,
    /// Smallest `|∇f|²` sampled at the largest radius (a sampled `λ₋`).
    pub lambda_min: f64,
    /// `λ̂₋ / max h`, which bounds the lower growth rate from below.
    pub lambda_over_h: f64,
    pub tolerance: f64,
    /// `min μ̂ ≤ 2n + tol`
    pub lower_ok: bool,
    /// `max μ̂ ≥ 2n − tol`
    pub upper_ok: bool,
    /// `λ̂₋ / max h ≤ min μ̂ + tol`
    pub lambda_ok: bool,
    pub pass: bool,
}

/// Samples `f` along rays and tests `min μ̂ ≤ 2n ≤ max μ̂` within `tol`.
pub fn check_growth(
    model: &dyn SolitonModel,
    directions: &[Vec<Complex64>],
    radii: &[f64],
    tol: f64,
    opts: &CheckOptions,
) -> Result<GrowthReport> {
    let n = model.dim();
    let h = model.eigenvalues();
    if let Some((index, &value)) = h.iter().enumerate().find(|(_, x)| !(**x > 0.0)) {
        return Err(Error::NonPositiveEigenvalue { index, value });
    }
    if radii.len() < 2 || radii.windows(2).any(|w| !(w[1] > w[0])) || radii[0] <= 1.0 {
        return Err(Error::InvalidParam("radii must be > 1 and strictly increasing, at least two".into()));
    }
    if directions.is_empty() {
        return Err(Error::InvalidParam("need at least one direction".into()));
    }
    let rows = opts.exec.try_map(directions, |d| {
        if d.len() != n {
            return Err(Error::ShapeMismatch(format!("direction of length {} in dimension {n}", d.len())));
        }
        let norm = d.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::InvalidParam("zero direction".into()));
        }
        let unit: Vec<Complex64> = d.iter().map(|c| c / norm).collect();
        let mut fs = Vec::with_capacity(radii.len());
        let mut grad_sq = Vec::with_capacity(radii.len());
        for &s in radii {
            let z: Vec<Complex64> = unit.iter().map(|c| c * s).collect();
            let f = model.ricci_potential(&z)?;
            if !f.is_finite() {
                return Err(Error::NonFinite(format!("f at {z:?}")));
            }
            let zf: Vec<Complex64> = z.iter().zip(&h).map(|(w, hk)| w * *hk).collect();
            grad_sq.push(model.metric(&z)?.quadratic_form(&zf));
            fs.push(f);
        }
        let ratios: Vec<f64> = fs.iter().zip(radii).map(|(f, s)| f / s.ln()).collect();
        let slopes: Vec<f64> = (1..radii.len()).map(|k| (fs[k] - fs[k - 1]) / (radii[k].ln() - radii[k - 1].ln())).collect();
        Ok(DirectionGrowth {
            direction: unit.iter().flat_map(|c| [c.re, c.im]).collect(),
            radii: radii.to_vec(),
            ratios,
            mu_est: *slopes.last().unwrap(),
            slopes,
            grad_sq,
        })
    })?;
    let two_n = 2.0 * n as f64;
    let mu_min = rows.iter().map(|r| r.mu_est).fold(f64::INFINITY, f64::min);
    let mu_max = rows.iter().map(|r| r.mu_est).fold(f64::NEG_INFINITY, f64::max);
    let lambda_min = rows.iter().map(|r| *r.grad_sq.last().unwrap()).fold(f64::INFINITY, f64::min);
    let h_max = h.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lambda_over_h = lambda_min / h_max;
    let lower_ok = mu_min <= two_n + tol;
    let upper_ok = mu_max >= two_n - tol;
    let lambda_ok = lambda_over_h <= mu_min + tol;
    Ok(GrowthReport {
        subject: model.label(),
        directions: rows,
        two_n,
        mu_min,
        mu_max,
        lambda_min,
        lambda_over_h,
        tolerance: tol,
        lower_ok,
        upper_ok,
        lambda_ok,
        pass: lower_ok && upper_ok && lambda_ok,
    })
}
