//! Central finite differences in the real coordinates `(x¹, y¹, …, xⁿ, yⁿ)`
//! of `ℂⁿ`, with Richardson extrapolation.
//!
//! Real variable `a` is `x^k` for `a = 2k` and `y^k` for `a = 2k + 1`.
//! Outputs are flat real vectors so the same engine differentiates scalar
//! fields and (flattened) complex matrices.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Finite-difference configuration.
///
/// First derivatives use the step `rel_step · max(1, |z|)`. Second
/// derivatives use `sqrt(rel_step) · max(1, |z|)`: with the default
/// `rel_step = 1e-5` a second difference at step `1e-5` would lose about
/// ten digits to cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FDScheme {
    pub rel_step: f64,
    pub order: u8,
    pub richardson_levels: u32,
}

/// Environment variable overriding [`FDScheme::rel_step`].
pub const FD_STEP_ENV: &str = "SOLITON_FD_STEP";

impl Default for FDScheme {
    fn default() -> Self {
        FDScheme { rel_step: 1e-5, order: 2, richardson_levels: 1 }
    }
}

impl FDScheme {
    pub fn new(rel_step: f64, order: u8, richardson_levels: u32) -> Result<Self> {
        if !(rel_step > 0.0 && rel_step.is_finite()) {
            return Err(Error::InvalidParam(format!("rel_step must be positive, got {rel_step}")));
        }
        if order != 2 && order != 4 {
            return Err(Error::InvalidParam(format!("order must be 2 or 4, got {order}")));
        }
        Ok(FDScheme { rel_step, order, richardson_levels })
    }

    /// Default scheme, with `rel_step` taken from `SOLITON_FD_STEP` if set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(FD_STEP_ENV) {
            Ok(s) => {
                let step: f64 = s
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("{FD_STEP_ENV}={s} is not a number")))?;
                let d = FDScheme::default();
                FDScheme::new(step, d.order, d.richardson_levels)
            }
            Err(_) => Ok(FDScheme::default()),
        }
    }

    fn scale(z: &[Complex64]) -> f64 {
        z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt().max(1.0)
    }

    pub fn first_step(&self, z: &[Complex64]) -> f64 {
        self.rel_step * Self::scale(z)
    }

    pub fn second_step(&self, z: &[Complex64]) -> f64 {
        self.rel_step.sqrt() * Self::scale(z)
    }

    /// Largest distance from `z` any stencil point can reach.
    pub fn reach(&self, z: &[Complex64]) -> f64 {
        let w = if self.order == 4 { 2.0 } else { 1.0 };
        w * self.first_step(z).max(self.second_step(z)) * std::f64::consts::SQRT_2
    }
}

pub(crate) type Eval<'a> = dyn Fn(&[Complex64]) -> Result<Vec<f64>> + Sync + 'a;
pub(crate) type Inside<'a> = dyn Fn(&[Complex64]) -> bool + Sync + 'a;

fn shifted(z: &[Complex64], moves: &[(usize, f64)]) -> Vec<Complex64> {
    let mut p = z.to_vec();
    for &(a, s) in moves {
        let k = a / 2;
        if a % 2 == 0 {
            p[k].re += s;
        } else {
            p[k].im += s;
        }
    }
    p
}

struct Probe<'a, 'b> {
    f: &'a Eval<'b>,
    inside: &'a Inside<'b>,
    z: &'a [Complex64],
}

impl Probe<'_, '_> {
    fn at(&self, moves: &[(usize, f64)]) -> Result<Vec<f64>> {
        let p = shifted(self.z, moves);
        if !(self.inside)(&p) {
            return Err(Error::DomainTooSmall(format!("{p:?}")));
        }
        let v = (self.f)(&p)?;
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite(format!("{p:?}")));
        }
        Ok(v)
    }
}

fn axpy(acc: &mut [f64], w: f64, v: &[f64]) {
    for (a, x) in acc.iter_mut().zip(v) {
        *a += w * x;
    }
}

// Central first-difference weights at offsets ±1, ±2 (in units of h).
const FIRST_2: &[(f64, f64)] = &[(1.0, 0.5), (-1.0, -0.5)];
const FIRST_4: &[(f64, f64)] =
    &[(2.0, -1.0 / 12.0), (1.0, 8.0 / 12.0), (-1.0, -8.0 / 12.0), (-2.0, 1.0 / 12.0)];
// Central second-difference weights, including the centre.
const SECOND_2: &[(f64, f64)] = &[(1.0, 1.0), (0.0, -2.0), (-1.0, 1.0)];
const SECOND_4: &[(f64, f64)] = &[
    (2.0, -1.0 / 12.0),
    (1.0, 16.0 / 12.0),
    (0.0, -30.0 / 12.0),
    (-1.0, 16.0 / 12.0),
    (-2.0, -1.0 / 12.0),
];

fn richardson(levels: Vec<Vec<f64>>, order: u8) -> Vec<f64> {
    let mut table = levels;
    let mut power = order as i32;
    while table.len() > 1 {
        let factor = 2f64.powi(power) - 1.0;
        table = table
            .windows(2)
            .map(|w| w[1].iter().zip(&w[0]).map(|(fine, coarse)| fine + (fine - coarse) / factor).collect())
            .collect();
        power += 2;
    }
    table.pop().unwrap_or_default()
}

/// `∂F/∂(real var a)` for every `a`, as `[a][component]`.
pub(crate) fn first_derivatives(
    f: &Eval<'_>,
    inside: &Inside<'_>,
    z: &[Complex64],
    scheme: &FDScheme,
) -> Result<Vec<Vec<f64>>> {
    let probe = Probe { f, inside, z };
    let h0 = scheme.first_step(z);
    let weights = if scheme.order == 4 { FIRST_4 } else { FIRST_2 };
    let nvar = 2 * z.len();
    let mut out = Vec::with_capacity(nvar);
    for a in 0..nvar {
        let mut levels = Vec::new();
        for lvl in 0..=scheme.richardson_levels {
            let h = h0 / 2f64.powi(lvl as i32);
            let mut acc: Vec<f64> = Vec::new();
            for &(off, w) in weights {
                let v = probe.at(&[(a, off * h)])?;
                if acc.is_empty() {
                    acc = vec![0.0; v.len()];
                }
                axpy(&mut acc, w / h, &v);
            }
            levels.push(acc);
        }
        out.push(richardson(levels, scheme.order));
    }
    Ok(out)
}

/// `∂²F/∂a∂b` for all real-variable pairs, as `[a][b][component]`.
pub(crate) fn second_derivatives(
    f: &Eval<'_>,
    inside: &Inside<'_>,
    z: &[Complex64],
    scheme: &FDScheme,
) -> Result<Vec<Vec<Vec<f64>>>> {
    let probe = Probe { f, inside, z };
    let h0 = scheme.second_step(z);
    let nvar = 2 * z.len();
    let centre = probe.at(&[])?;
    let first_w = if scheme.order == 4 { FIRST_4 } else { FIRST_2 };
    let second_w = if scheme.order == 4 { SECOND_4 } else { SECOND_2 };
    let mut out = vec![vec![Vec::new(); nvar]; nvar];
    for a in 0..nvar {
        for b in a..nvar {
            let mut levels = Vec::new();
            for lvl in 0..=scheme.richardson_levels {
                let h = h0 / 2f64.powi(lvl as i32);
                let mut acc = vec![0.0; centre.len()];
                if a == b {
                    for &(off, w) in second_w {
                        if off == 0.0 {
                            axpy(&mut acc, w / (h * h), &centre);
                        } else {
                            axpy(&mut acc, w / (h * h), &probe.at(&[(a, off * h)])?);
                        }
                    }
                } else {
                    for &(oa, wa) in first_w {
                        for &(ob, wb) in first_w {
                            let v = probe.at(&[(a, oa * h), (b, ob * h)])?;
                            axpy(&mut acc, wa * wb / (h * h), &v);
                        }
                    }
                }
                levels.push(acc);
            }
            let d = richardson(levels, scheme.order);
            out[b][a] = d.clone();
            out[a][b] = d;
        }
    }
    Ok(out)
}
