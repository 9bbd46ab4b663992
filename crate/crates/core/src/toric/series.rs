//! Dense truncated power series in `n ≤ 4` real variables.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::exec::Execution;

pub const MAX_VARS: usize = 4;
pub const MAX_DEGREE: usize = 40;

// Below this many monomials a product is cheaper on one thread.
const PARALLEL_THRESHOLD: usize = 200;

/// Monomials of total degree ≤ D, sorted by degree then lexicographically
/// (descending in the first exponent), with a mixed-radix lookup table.
#[derive(Debug)]
pub(crate) struct Layout {
    nvars: usize,
    degree: usize,
    exps: Vec<Vec<u16>>,
    lookup: Vec<u32>,
}

impl Layout {
    fn build(nvars: usize, degree: usize) -> Layout {
        let mut exps = Vec::new();
        for d in 0..=degree {
            let mut cur = vec![0u16; nvars];
            push_of_degree(nvars, 0, d, &mut cur, &mut exps);
        }
        let size = (degree + 1).pow(nvars as u32);
        let mut lookup = vec![u32::MAX; size];
        let mut layout = Layout { nvars, degree, exps, lookup: Vec::new() };
        for (i, e) in layout.exps.iter().enumerate() {
            lookup[layout.key(e)] = i as u32;
        }
        layout.lookup = lookup;
        layout
    }

    fn key(&self, e: &[u16]) -> usize {
        e.iter().fold(0, |acc, &x| acc * (self.degree + 1) + x as usize)
    }

    fn index(&self, e: &[u16]) -> Option<usize> {
        if e.len() != self.nvars || e.iter().map(|&x| x as usize).sum::<usize>() > self.degree {
            return None;
        }
        Some(self.lookup[self.key(e)] as usize)
    }

    fn len(&self) -> usize {
        self.exps.len()
    }
}

fn push_of_degree(n: usize, pos: usize, left: usize, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
    if pos + 1 >= n {
        if n > 0 {
            cur[pos] = left as u16;
            out.push(cur.clone());
            cur[pos] = 0;
        } else if left == 0 {
            out.push(Vec::new());
        }
        return;
    }
    for k in (0..=left).rev() {
        cur[pos] = k as u16;
        push_of_degree(n, pos + 1, left - k, cur, out);
    }
    cur[pos] = 0;
}

type LayoutCache = Mutex<HashMap<(usize, usize), Arc<Layout>>>;

fn layout(nvars: usize, degree: usize) -> Arc<Layout> {
    static CACHE: OnceLock<LayoutCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard.entry((nvars, degree)).or_insert_with(|| Arc::new(Layout::build(nvars, degree))).clone()
}

/// Real polynomial in `(r¹, …, rⁿ)` truncated at total degree `D`.
#[derive(Clone)]
pub struct TruncatedSeries {
    layout: Arc<Layout>,
    coeffs: Vec<f64>,
}

impl std::fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let terms: Vec<_> = self.terms().filter(|(_, c)| *c != 0.0).collect();
        f.debug_struct("TruncatedSeries")
            .field("nvars", &self.nvars())
            .field("degree", &self.degree())
            .field("terms", &terms)
            .finish()
    }
}

impl PartialEq for TruncatedSeries {
    fn eq(&self, other: &Self) -> bool {
        self.nvars() == other.nvars() && self.degree() == other.degree() && self.coeffs == other.coeffs
    }
}

impl TruncatedSeries {
    pub fn zero(nvars: usize, degree: usize) -> Result<Self> {
        if nvars > MAX_VARS {
            return Err(Error::DimensionTooLarge(nvars));
        }
        if degree > MAX_DEGREE {
            return Err(Error::ShapeMismatch(format!("degree {degree} exceeds {MAX_DEGREE}")));
        }
        let layout = layout(nvars, degree);
        let coeffs = vec![0.0; layout.len()];
        Ok(TruncatedSeries { layout, coeffs })
    }

    pub fn constant(nvars: usize, degree: usize, c: f64) -> Result<Self> {
        let mut s = Self::zero(nvars, degree)?;
        s.coeffs[0] = c;
        Ok(s)
    }

    /// The coordinate `r^i` (0-based).
    pub fn variable(nvars: usize, degree: usize, i: usize) -> Result<Self> {
        let mut s = Self::zero(nvars, degree)?;
        if i >= nvars {
            return Err(Error::ShapeMismatch(format!("variable {i} of {nvars}")));
        }
        if degree >= 1 {
            let mut e = vec![0u16; nvars];
            e[i] = 1;
            s.set(&e, 1.0)?;
        }
        Ok(s)
    }

    /// Builds a series from `(exponents, coefficient)` pairs; terms above
    /// the cap are dropped, repeated exponents add up.
    pub fn from_terms<'a>(nvars: usize, degree: usize, terms: impl IntoIterator<Item = (&'a [u16], f64)>) -> Result<Self> {
        let mut s = Self::zero(nvars, degree)?;
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::ShapeMismatch(format!("exponent {e:?} for {nvars} variables")));
            }
            if let Some(i) = s.layout.index(e) {
                s.coeffs[i] += c;
            }
        }
        Ok(s)
    }

    /// One-variable series from its coefficient list `c₀, c₁, …`.
    pub fn univariate(coeffs: &[f64], degree: usize) -> Result<Self> {
        let mut s = Self::zero(1, degree)?;
        for (k, c) in coeffs.iter().enumerate().take(degree + 1) {
            s.coeffs[k] = *c;
        }
        Ok(s)
    }

    pub fn nvars(&self) -> usize {
        self.layout.nvars
    }

    pub fn degree(&self) -> usize {
        self.layout.degree
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `r^e`; zero above the cap.
    pub fn coeff(&self, e: &[u16]) -> f64 {
        self.layout.index(e).map_or(0.0, |i| self.coeffs[i])
    }

    pub fn set(&mut self, e: &[u16], c: f64) -> Result<()> {
        let i = self
            .layout
            .index(e)
            .ok_or_else(|| Error::ShapeMismatch(format!("exponent {e:?} outside degree {}", self.degree())))?;
        self.coeffs[i] = c;
        Ok(())
    }

    pub fn constant_term(&self) -> f64 {
        self.coeffs[0]
    }

    /// All monomials in storage order with their coefficients.
    pub fn terms(&self) -> impl Iterator<Item = (&[u16], f64)> + '_ {
        self.layout.exps.iter().map(Vec::as_slice).zip(self.coeffs.iter().copied())
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.nvars() != other.nvars() || self.degree() != other.degree() {
            return Err(Error::ShapeMismatch(format!(
                "({} vars, degree {}) vs ({} vars, degree {})",
                self.nvars(),
                self.degree(),
                other.nvars(),
                other.degree()
            )));
        }
        Ok(())
    }

    fn map_coeffs(&self, f: impl Fn(&[u16], f64) -> f64) -> Self {
        let coeffs = self.terms().map(|(e, c)| f(e, c)).collect();
        TruncatedSeries { layout: self.layout.clone(), coeffs }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.map_coeffs_indexed(|i, c| c + other.coeffs[i]))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.map_coeffs_indexed(|i, c| c - other.coeffs[i]))
    }

    fn map_coeffs_indexed(&self, f: impl Fn(usize, f64) -> f64) -> Self {
        let coeffs = self.coeffs.iter().enumerate().map(|(i, &c)| f(i, c)).collect();
        TruncatedSeries { layout: self.layout.clone(), coeffs }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map_coeffs(|_, c| c * s)
    }

    pub fn add_constant(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.coeffs[0] += s;
        out
    }

    /// Cauchy product truncated at the cap.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let exec = if self.len() >= PARALLEL_THRESHOLD { Execution::Parallel } else { Execution::Sequential };
        self.mul_with(other, exec)
    }

    /// Cauchy product with an explicit execution mode; every output
    /// coefficient is summed in the same order either way.
    pub fn mul_with(&self, other: &Self, exec: Execution) -> Result<Self> {
        self.check_same(other)?;
        let lay = &self.layout;
        let coeffs = exec.map_range(lay.len(), |idx| {
            let mut acc = 0.0;
            for_each_divisor(&lay.exps[idx], |a, b| {
                let (ia, ib) = (lay.lookup[lay.key(a)] as usize, lay.lookup[lay.key(b)] as usize);
                acc += self.coeffs[ia] * other.coeffs[ib];
            });
            acc
        });
        Ok(TruncatedSeries { layout: lay.clone(), coeffs })
    }

    /// `exp(a)`, via `d·E_d = Σ_k k·A_k·E_{d−k}` on homogeneous parts.
    pub fn exp(&self) -> Self {
        let lay = &self.layout;
        let mut out = vec![0.0; lay.len()];
        out[0] = self.coeffs[0].exp();
        for idx in 1..lay.len() {
            let e = &lay.exps[idx];
            let d: u32 = e.iter().map(|&x| x as u32).sum();
            let mut acc = 0.0;
            for_each_divisor(e, |a, b| {
                let da: u32 = a.iter().map(|&x| x as u32).sum();
                if da > 0 {
                    acc += da as f64 * self.coeffs[lay.lookup[lay.key(a)] as usize] * out[lay.lookup[lay.key(b)] as usize];
                }
            });
            out[idx] = acc / d as f64;
        }
        TruncatedSeries { layout: lay.clone(), coeffs: out }
    }

    /// `1/a`; needs a nonzero constant term.
    pub fn recip(&self) -> Result<Self> {
        let a0 = self.coeffs[0];
        if a0 == 0.0 {
            return Err(Error::DegenerateInitialData("reciprocal of a series with zero constant term".into()));
        }
        let lay = &self.layout;
        let mut out = vec![0.0; lay.len()];
        out[0] = 1.0 / a0;
        for idx in 1..lay.len() {
            let mut acc = 0.0;
            for_each_divisor(&lay.exps[idx], |a, b| {
                if a.iter().any(|&x| x > 0) {
                    acc += self.coeffs[lay.lookup[lay.key(a)] as usize] * out[lay.lookup[lay.key(b)] as usize];
                }
            });
            out[idx] = -acc / a0;
        }
        Ok(TruncatedSeries { layout: lay.clone(), coeffs: out })
    }

    /// Euler operator `θ_i = r^i ∂/∂r^i`: scales each coefficient by its exponent.
    pub fn euler(&self, i: usize) -> Self {
        self.map_coeffs(|e, c| c * e[i] as f64)
    }

    /// `∂/∂r^i`. The top-degree part of the result is unknown and set to zero.
    pub fn partial(&self, i: usize) -> Self {
        let lay = &self.layout;
        let mut out = vec![0.0; lay.len()];
        let mut up = vec![0u16; lay.nvars];
        for (idx, e) in lay.exps.iter().enumerate() {
            let d: usize = e.iter().map(|&x| x as usize).sum();
            if d == lay.degree {
                continue;
            }
            up.copy_from_slice(e);
            up[i] += 1;
            out[idx] = self.coeffs[lay.lookup[lay.key(&up)] as usize] * up[i] as f64;
        }
        TruncatedSeries { layout: lay.clone(), coeffs: out }
    }

    /// Multiplication by `r^i`, truncated.
    pub fn shift(&self, i: usize) -> Self {
        let lay = &self.layout;
        let mut out = vec![0.0; lay.len()];
        let mut up = vec![0u16; lay.nvars];
        for (idx, e) in lay.exps.iter().enumerate() {
            let d: usize = e.iter().map(|&x| x as usize).sum();
            if d < lay.degree {
                up.copy_from_slice(e);
                up[i] += 1;
                out[lay.lookup[lay.key(&up)] as usize] = self.coeffs[idx];
            }
        }
        TruncatedSeries { layout: lay.clone(), coeffs: out }
    }

    /// Same coefficients under a different cap (dropping or zero-filling).
    pub fn with_degree(&self, degree: usize) -> Result<Self> {
        Self::from_terms(self.nvars(), degree, self.terms())
    }

    /// Views the series as one in `nvars` ≥ current variables; the new
    /// variables are appended and do not occur.
    pub fn embed(&self, nvars: usize, degree: usize) -> Result<Self> {
        if nvars < self.nvars() {
            return Err(Error::ShapeMismatch(format!("cannot embed {} variables into {nvars}", self.nvars())));
        }
        let mut out = Self::zero(nvars, degree)?;
        let mut e = vec![0u16; nvars];
        for (src, c) in self.terms() {
            e[..src.len()].copy_from_slice(src);
            if let Some(i) = out.layout.index(&e) {
                out.coeffs[i] = c;
            }
        }
        Ok(out)
    }

    /// Coefficient of `t^m` in the last variable `t`, as a series in the
    /// remaining variables (same cap).
    pub fn last_var_coefficient(&self, m: usize) -> Result<Self> {
        let n = self.nvars();
        if n == 0 {
            return Err(Error::ShapeMismatch("series has no variables".into()));
        }
        let mut out = Self::zero(n - 1, self.degree())?;
        for (e, c) in self.terms() {
            if e[n - 1] as usize == m {
                if let Some(i) = out.layout.index(&e[..n - 1]) {
                    out.coeffs[i] = c;
                }
            }
        }
        Ok(out)
    }

    /// Adds `z(r')·t^m`, where `z` lives in the first `n − 1` variables.
    pub fn add_last_var_term(&mut self, z: &Self, m: usize) -> Result<()> {
        let n = self.nvars();
        if z.nvars() + 1 != n {
            return Err(Error::ShapeMismatch(format!("{} vs {} variables", z.nvars(), n)));
        }
        let mut e = vec![0u16; n];
        for (src, c) in z.terms() {
            if c == 0.0 {
                continue;
            }
            e[..n - 1].copy_from_slice(src);
            e[n - 1] = m as u16;
            if let Some(i) = self.layout.index(&e) {
                self.coeffs[i] += c;
            }
        }
        Ok(())
    }

    /// Value at `r`.
    pub fn eval(&self, r: &[f64]) -> Result<f64> {
        if r.len() != self.nvars() {
            return Err(Error::ShapeMismatch(format!("point of length {} for {} variables", r.len(), self.nvars())));
        }
        let d = self.degree();
        let pows: Vec<Vec<f64>> = r
            .iter()
            .map(|&x| {
                let mut p = vec![1.0; d + 1];
                for k in 1..=d {
                    p[k] = p[k - 1] * x;
                }
                p
            })
            .collect();
        // Highest degree first keeps the small terms from being swamped early.
        let mut sum = 0.0;
        for (e, c) in self.terms().collect::<Vec<_>>().into_iter().rev() {
            if c != 0.0 {
                sum += c * e.iter().zip(&pows).map(|(&k, p)| p[k as usize]).product::<f64>();
            }
        }
        Ok(sum)
    }
}

// Calls f(a, c − a) for every a ≤ c componentwise.
fn for_each_divisor(c: &[u16], mut f: impl FnMut(&[u16], &[u16])) {
    let n = c.len();
    let mut a = vec![0u16; n];
    let mut b = c.to_vec();
    loop {
        f(&a, &b);
        let mut k = 0;
        loop {
            if k == n {
                return;
            }
            if a[k] < c[k] {
                a[k] += 1;
                b[k] -= 1;
                break;
            }
            a[k] = 0;
            b[k] = c[k];
            k += 1;
        }
    }
}

/// Determinant of a small matrix of series by Laplace expansion.
pub fn series_det(m: &[Vec<TruncatedSeries>], nvars: usize, degree: usize) -> Result<TruncatedSeries> {
    let n = m.len();
    if n > MAX_VARS {
        return Err(Error::DimensionTooLarge(n));
    }
    if n == 0 {
        return TruncatedSeries::constant(nvars, degree, 1.0);
    }
    if n == 1 {
        return Ok(m[0][0].clone());
    }
    let mut acc = TruncatedSeries::zero(nvars, degree)?;
    for col in 0..n {
        let minor: Vec<Vec<TruncatedSeries>> =
            m[1..].iter().map(|row| row.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, s)| s.clone()).collect()).collect();
        let term = m[0][col].mul(&series_det(&minor, nvars, degree)?)?;
        acc = if col % 2 == 0 { acc.add(&term)? } else { acc.sub(&term)? };
    }
    Ok(acc)
}
