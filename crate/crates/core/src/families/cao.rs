//! Cao's `U(n)`-invariant soliton.
//!
//! The metric is `g_{ij̄} = a(r)δ_ij + a'(r) z̄^i z^j` with `r = |z|²`. Writing
//! `b = (h/2) r a`, the profile ODE integrates to `F(b) = ((h/2) r)ⁿ / n` with
//! `F(b) = ∫₀ᵇ sⁿ⁻¹eˢ ds`, and `b(r) = f⁻¹((h/2) r)` where `F = fⁿ/n`.

use crate::error::{Error, Result};
use crate::special::{invert_increasing, CompositeGauss};

const SERIES_RADIUS: f64 = 0.5;
const SERIES_TERMS: usize = 12;
const NEWTON_TOL: f64 = 1e-14;
const NEWTON_MAX_ITER: usize = 50;

/// `F(b)` together with the real `n`-th root `f(b)` satisfying `F = fⁿ/n`
/// and `sign f = sign b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaoF {
    pub big_f: f64,
    pub f: f64,
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Returns `(F(b), f(b), f'(b))`.
fn f_and_derivative(n: usize, b: f64) -> (f64, f64, f64) {
    if b == 0.0 {
        return (0.0, 0.0, 1.0);
    }
    let nf = n as f64;
    if b.abs() < SERIES_RADIUS {
        // n F / bⁿ = n! eᵇ Σ_m (−b)^m / (n+m)!
        let mut term = 1.0 / factorial(n);
        let mut s = term;
        for m in 1..SERIES_TERMS {
            term *= -b / (n + m) as f64;
            s += term;
        }
        let g = factorial(n) * b.exp() * s;
        let ratio = g.powf(-1.0 / nf); // b / f
        let f = b / ratio;
        let big_f = f.powi(n as i32) / nf;
        let df = ratio.powi(n as i32 - 1) * b.exp();
        return (big_f, f, df);
    }
    // (−1)ⁿ (n−1)! (1 − eᵇ Σ_{k<n} (−b)^k / k!)
    let mut poly = 0.0;
    let mut term = 1.0;
    for k in 0..n {
        if k > 0 {
            term *= -b / k as f64;
        }
        poly += term;
    }
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let big_f = sign * factorial(n - 1) * (1.0 - b.exp() * poly);
    let f = b.signum() * (nf * big_f.abs()).powf(1.0 / nf);
    let df = (b / f).powi(n as i32 - 1) * b.exp();
    (big_f, f, df)
}

/// Evaluates `F(b) = (−1)ⁿ(n−1)! eᵇ(e⁻ᵇ − Σ_{k<n}(−b)^k/k!)` and its root `f`.
///
/// Near `b = 0` a 12-term series replaces the closed form, which cancels
/// catastrophically there.
pub fn cao_f(n: usize, b: f64) -> CaoF {
    assert!(n >= 1, "dimension must be at least 1");
    let (big_f, f, _) = f_and_derivative(n, b);
    CaoF { big_f, f }
}

/// The limit `lim_{b→−∞} f(b) = −(n!)^{1/n}`.
pub fn cao_f_lower_limit(n: usize) -> f64 {
    -factorial(n).powf(1.0 / n as f64)
}

/// Values of the profile at one radius `r = |z|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaoPoint {
    pub a: f64,
    pub a_prime: f64,
    pub b: f64,
    pub b_prime: f64,
}

/// The profile `a(r)`, `b(r)` of Cao's soliton for one `(n, h_axis)`.
#[derive(Debug, Clone)]
pub struct CaoProfile {
    n: usize,
    h_axis: f64,
    r_max: f64,
    quad: CompositeGauss,
}

impl CaoProfile {
    pub fn new(n: usize, h_axis: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParam("Cao profile needs n ≥ 1".into()));
        }
        if h_axis == 0.0 || !h_axis.is_finite() {
            return Err(Error::InvalidParam(format!("h_axis must be finite and nonzero, got {h_axis}")));
        }
        let r_max = if h_axis > 0.0 { f64::INFINITY } else { -(2.0 / h_axis) * -cao_f_lower_limit(n) };
        Ok(CaoProfile { n, h_axis, r_max, quad: CompositeGauss::new(20, 4) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h_axis(&self) -> f64 {
        self.h_axis
    }

    /// Supremum of admissible `r`; infinite when `h_axis > 0`.
    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    fn check(&self, r: f64) -> Result<()> {
        if !(r >= 0.0) || r >= self.r_max {
            return Err(Error::OutOfDomain(format!(
                "Cao profile (n = {}, h = {}) needs 0 ≤ r < {}, got r = {r}",
                self.n, self.h_axis, self.r_max
            )));
        }
        Ok(())
    }

    /// `b(r) = f⁻¹((h/2) r)` by safeguarded Newton iteration.
    pub fn b(&self, r: f64) -> Result<f64> {
        self.check(r)?;
        self.invert(0.5 * self.h_axis * r)
    }

    /// Solves `f(b) = y` for any `y` in the range `(−(n!)^{1/n}, ∞)`.
    ///
    /// Negative `y` with `h_axis > 0` corresponds to negative `r`; it is
    /// accepted so the profile can be probed on both sides of `r = 0`.
    pub fn invert(&self, y: f64) -> Result<f64> {
        let n = self.n;
        let nf = n as f64;
        if y == 0.0 {
            return Ok(0.0);
        }
        if y <= cao_f_lower_limit(n) {
            return Err(Error::OutOfDomain(format!("f(b) = {y} is below the range of f")));
        }
        let series_seed = y - y * y / (nf + 1.0);
        let (b, _) = if y > 1.0 {
            // Newton on ln f, which is close to linear for large b.
            let ly = y.ln();
            let seed = (nf * ly - (nf - 1.0) * (nf * ly).max(1.0).ln() - nf.ln()).clamp(0.0, y);
            invert_increasing(
                |b| {
                    let (_, f, df) = f_and_derivative(n, b);
                    (f.ln(), df / f)
                },
                ly,
                0.0,
                y,
                seed,
                NEWTON_TOL,
                NEWTON_MAX_ITER,
            )
        } else if y > 0.0 {
            invert_increasing(
                |b| {
                    let (_, f, df) = f_and_derivative(n, b);
                    (f, df)
                },
                y,
                0.0,
                y,
                series_seed,
                NEWTON_TOL,
                NEWTON_MAX_ITER,
            )
        } else {
            let mut lo = 2.0 * y;
            while f_and_derivative(n, lo).1 >= y {
                lo *= 2.0;
                if lo < -1e6 {
                    return Err(Error::OutOfDomain(format!("f(b) = {y} too close to the lower limit")));
                }
            }
            let seed = if y > -SERIES_RADIUS { series_seed } else { 0.5 * (lo + y) };
            invert_increasing(
                |b| {
                    let (_, f, df) = f_and_derivative(n, b);
                    (f, df)
                },
                y,
                lo,
                y,
                seed,
                NEWTON_TOL,
                NEWTON_MAX_ITER,
            )
        };
        Ok(b)
    }

    /// `a`, `a'`, `b`, `b'` at radius `r`.
    ///
    /// `b' = (h/2)(y/b)ⁿ⁻¹e⁻ᵇ` with `y = (h/2) r`, `a = b/y`, and
    /// `r a' + a = (2/h) b'`.
    pub fn at(&self, r: f64) -> Result<CaoPoint> {
        let b = self.b(r)?;
        Ok(self.point_at_b(r, b))
    }

    fn point_at_b(&self, r: f64, b: f64) -> CaoPoint {
        let h = self.h_axis;
        let y = 0.5 * h * r;
        let n = self.n as i32;
        let (ratio, a) = if b == 0.0 { (1.0, 1.0) } else { (y / b, b / y) };
        let b_prime = 0.5 * h * ratio.powi(n - 1) * (-b).exp();
        let a_prime = if r.abs() * h.abs() < 1e-8 {
            -h / (2.0 * (self.n as f64 + 1.0))
        } else {
            ((2.0 / h) * b_prime - a) / r
        };
        CaoPoint { a, a_prime, b, b_prime }
    }

    /// Radial potential `P(r) = ∫₀ʳ a(s) ds`, so that `φ = P(|z|²)`.
    ///
    /// Substituting `s = (2/h) f(β)` turns this into
    /// `(2/h) ∫₀^{b(r)} (β/f(β))ⁿ e^β dβ`, which needs a single inversion.
    pub fn potential(&self, r: f64) -> Result<f64> {
        let b = self.b(r)?;
        let n = self.n as i32;
        let integral = self.quad.integrate(0.0, b, |beta| {
            let (_, f, _) = f_and_derivative(self.n, beta);
            let ratio = if beta == 0.0 { 1.0 } else { beta / f };
            ratio.powi(n) * beta.exp()
        });
        Ok(2.0 / self.h_axis * integral)
    }

    /// First two Taylor coefficients of `b(r)` at `r = 0`, estimated by
    /// Richardson-extrapolated central differences of the inverter.
    pub fn taylor_coefficients_fd(&self) -> Result<[f64; 2]> {
        let h = self.h_axis;
        let b_signed = |r: f64| self.invert(0.5 * h * r);
        let base = 0.1 / h.abs().max(1.0);
        let levels = 6;
        let mut odd = Vec::with_capacity(levels);
        let mut even = Vec::with_capacity(levels);
        for k in 0..levels {
            let d = base / 2f64.powi(k as i32);
            let (p, m) = (b_signed(d)?, b_signed(-d)?);
            odd.push((p - m) / (2.0 * d));
            even.push((p + m) / (2.0 * d * d));
        }
        Ok([extrapolate_even(odd), extrapolate_even(even)])
    }
}

// Richardson table for estimates with an error expansion in δ², δ⁴, …
fn extrapolate_even(mut t: Vec<f64>) -> f64 {
    let mut factor = 4.0;
    while t.len() > 1 {
        t = t.windows(2).map(|w| w[1] + (w[1] - w[0]) / (factor - 1.0)).collect();
        factor *= 4.0;
    }
    t[0]
}
