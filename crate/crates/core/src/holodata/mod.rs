//! Holomorphic data of a soliton germ: the linear field `Z_h`, its flow,
//! the lattice `Λ_h = ℤⁿ ∩ h^⊥` and the resonance count `d_h`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::Ratio;
use serde::Serialize;

use crate::ckgeom::ComplexPoint;
use crate::error::{Error, Result};

pub type Rational = Ratio<i128>;

/// One eigenvalue: exact when given as a rational, otherwise only a real.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Eigenvalue {
    Exact(Rational),
    Real(f64),
}

impl Eigenvalue {
    pub fn value(&self) -> f64 {
        match *self {
            Eigenvalue::Exact(q) => *q.numer() as f64 / *q.denom() as f64,
            Eigenvalue::Real(x) => x,
        }
    }

    pub fn exact(&self) -> Option<Rational> {
        match *self {
            Eigenvalue::Exact(q) => Some(q),
            Eigenvalue::Real(_) => None,
        }
    }
}

impl fmt::Display for Eigenvalue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Eigenvalue::Exact(q) if *q.denom() == 1 => write!(f, "{}", q.numer()),
            Eigenvalue::Exact(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            Eigenvalue::Real(x) => write!(f, "{x}"),
        }
    }
}

/// Parses `3`, `-2/5`, `1.25`, `2e-3`; `sqrt(x)`, `pi` and `e` give inexact reals.
impl FromStr for Eigenvalue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("cannot read eigenvalue {s:?}"));
        match s {
            "pi" => return Ok(Eigenvalue::Real(std::f64::consts::PI)),
            "e" => return Ok(Eigenvalue::Real(std::f64::consts::E)),
            _ => {}
        }
        if let Some(inner) = s.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
            let q: Eigenvalue = inner.parse()?;
            let x = q.value();
            if !(x >= 0.0) {
                return Err(bad());
            }
            // Perfect squares stay exact.
            if let Some(q) = q.exact() {
                if let (Some(a), Some(b)) = (int_sqrt(*q.numer()), int_sqrt(*q.denom())) {
                    return Ok(Eigenvalue::Exact(Rational::new(a, b)));
                }
            }
            return Ok(Eigenvalue::Real(x.sqrt()));
        }
        if let Some((a, b)) = s.split_once('/') {
            let a: i128 = a.trim().parse().map_err(|_| bad())?;
            let b: i128 = b.trim().parse().map_err(|_| bad())?;
            if b == 0 {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            return Ok(Eigenvalue::Exact(Rational::new(a, b)));
        }
        parse_decimal(s).map(Eigenvalue::Exact).ok_or_else(bad)
    }
}

fn int_sqrt(x: i128) -> Option<i128> {
    if x < 0 {
        return None;
    }
    let r = (x as f64).sqrt().round() as i128;
    (r - 1..=r + 1).find(|c| *c >= 0 && c * c == x)
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut num: i128 = if all.is_empty() { 0 } else { all.parse().ok()? };
    let scale = exp - frac_part.len() as i32;
    let mut den: i128 = 1;
    if scale >= 0 {
        num = num.checked_mul(10i128.checked_pow(scale as u32)?)?;
    } else {
        den = 10i128.checked_pow((-scale) as u32)?;
    }
    if neg {
        num = -num;
    }
    Some(Rational::new(num, den))
}

/// The eigenvalues `h = (h₁, …, hₙ)` of `Z_h = Σ h_j z^j ∂/∂z^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenData {
    h: Vec<Eigenvalue>,
}

impl EigenData {
    pub fn new(h: Vec<Eigenvalue>) -> Result<Self> {
        if h.is_empty() {
            return Err(Error::InvalidParam("need at least one eigenvalue".into()));
        }
        if let Some(i) = h.iter().position(|x| !x.value().is_finite()) {
            return Err(Error::InvalidParam(format!("eigenvalue {i} is not finite")));
        }
        Ok(EigenData { h })
    }

    pub fn from_rationals(h: &[(i128, i128)]) -> Result<Self> {
        let mut out = Vec::with_capacity(h.len());
        for &(a, b) in h {
            if b == 0 {
                return Err(Error::InvalidParam(format!("zero denominator in {a}/{b}")));
            }
            out.push(Eigenvalue::Exact(Rational::new(a, b)));
        }
        Self::new(out)
    }

    pub fn from_integers(h: &[i64]) -> Result<Self> {
        Self::new(h.iter().map(|&k| Eigenvalue::Exact(Rational::from_integer(k as i128))).collect())
    }

    /// Inexact reals; fine for the flow, rejected by the lattice computation.
    pub fn from_reals(h: &[f64]) -> Result<Self> {
        Self::new(h.iter().map(|&x| Eigenvalue::Real(x)).collect())
    }

    /// Comma-separated list, e.g. `"1,3/2,0.25"`.
    pub fn parse_list(s: &str) -> Result<Self> {
        let h = s.split(',').map(str::parse).collect::<Result<Vec<Eigenvalue>>>()?;
        Self::new(h)
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    pub fn entries(&self) -> &[Eigenvalue] {
        &self.h
    }

    pub fn values(&self) -> Vec<f64> {
        self.h.iter().map(Eigenvalue::value).collect()
    }

    /// All entries as rationals, or the index of the first inexact one.
    pub fn exact(&self) -> Result<Vec<Rational>> {
        self.h
            .iter()
            .enumerate()
            .map(|(i, x)| x.exact().ok_or(Error::IrrationalInput(i)))
            .collect()
    }
}

/// `z^i ↦ e^{h_i t} z^i`. For imaginary `t` this is the flow of `2Y = 2 Im Z`.
pub fn flow_zh(h: &EigenData, t: Complex64, z: &ComplexPoint) -> Result<ComplexPoint> {
    if z.len() != h.len() {
        return Err(Error::ShapeMismatch(format!("point has {} coordinates, h has {}", z.len(), h.len())));
    }
    let coords = h.values().iter().zip(z.coords()).map(|(hi, zi)| (t * *hi).exp() * zi).collect();
    ComplexPoint::new(coords)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LatticeResult {
    /// Row-style Hermite normal form of a basis of `Λ_h`.
    pub basis: Vec<Vec<i64>>,
    pub rank: usize,
    /// `n − rank`: dimension of the closure of the flow of `Y`.
    pub q_rank: usize,
}

/// Integer basis of `{k ∈ ℤⁿ : k·h = 0}`, computed exactly.
pub fn lattice_basis(h: &EigenData) -> Result<LatticeResult> {
    let q = h.exact()?;
    let n = q.len();
    let lcm = q.iter().fold(1i128, |acc, x| num_integer_lcm(acc, *x.denom()));
    let mut a: Vec<i128> = q.iter().map(|x| x.numer() * (lcm / x.denom())).collect();

    // Unimodular column operations on a, recorded in u, until a = (g, 0, …, 0)
    // up to a permutation; the columns of u that end at zero span the kernel.
    let mut u: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect();
    loop {
        let nonzero: Vec<usize> = (0..n).filter(|&i| a[i] != 0).collect();
        if nonzero.len() <= 1 {
            break;
        }
        let p = *nonzero.iter().min_by_key(|&&i| a[i].abs()).unwrap();
        for &j in &nonzero {
            if j != p {
                let m = a[j].div_euclid(a[p]);
                a[j] -= m * a[p];
                for row in u.iter_mut() {
                    row[j] -= m * row[p];
                }
            }
        }
    }
    let mut rows: Vec<Vec<i128>> = (0..n).filter(|&j| a[j] == 0).map(|j| u.iter().map(|row| row[j]).collect()).collect();
    hermite_normal_form(&mut rows);
    let rank = rows.len();
    let basis = rows
        .into_iter()
        .map(|r| r.into_iter().map(|x| i64::try_from(x).expect("lattice entry overflow")).collect())
        .collect();
    Ok(LatticeResult { basis, rank, q_rank: n - rank })
}

fn num_integer_lcm(a: i128, b: i128) -> i128 {
    fn gcd(mut a: i128, mut b: i128) -> i128 {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a.abs()
    }
    a / gcd(a, b) * b
}

// Row echelon form over ℤ with positive pivots and reduced entries above them.
fn hermite_normal_form(rows: &mut Vec<Vec<i128>>) {
    let n = rows.first().map_or(0, Vec::len);
    let mut top = 0;
    for col in 0..n {
        if top == rows.len() {
            break;
        }
        loop {
            let nz: Vec<usize> = (top..rows.len()).filter(|&r| rows[r][col] != 0).collect();
            if nz.is_empty() {
                break;
            }
            let p = *nz.iter().min_by_key(|&&r| rows[r][col].abs()).unwrap();
            rows.swap(top, p);
            let mut done = true;
            for r in top + 1..rows.len() {
                if rows[r][col] != 0 {
                    let m = rows[r][col].div_euclid(rows[top][col]);
                    for c in 0..n {
                        rows[r][c] -= m * rows[top][c];
                    }
                    done &= rows[r][col] == 0;
                }
            }
            if done {
                break;
            }
        }
        if rows[top][col] == 0 {
            continue;
        }
        if rows[top][col] < 0 {
            rows[top].iter_mut().for_each(|x| *x = -*x);
        }
        let pivot = rows[top][col];
        for r in 0..top {
            let m = rows[r][col].div_euclid(pivot);
            if m != 0 {
                for c in 0..n {
                    rows[r][c] -= m * rows[top][c];
                }
            }
        }
        top += 1;
    }
    rows.truncate(top);
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Resonance {
    /// 0-based index `i` with `k·h = h_i`.
    pub index: usize,
    pub k: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResonanceResult {
    pub pairs: Vec<Resonance>,
    /// Number of pairs `(i, k)`; the dimension of the group `G_h`.
    pub d_h: usize,
}

/// Enumerates all `(i, k)` with `k ∈ ℕⁿ` and `k·h = h_i`, exactly.
pub fn resonances(h: &EigenData) -> Result<ResonanceResult> {
    let q = h.exact()?;
    for (index, x) in q.iter().enumerate() {
        if *x.numer() <= 0 {
            return Err(Error::NonPositiveEigenvalue { index, value: h.entries()[index].value() });
        }
    }
    let mut pairs = Vec::new();
    for (i, target) in q.iter().enumerate() {
        let mut k = vec![0u32; q.len()];
        enumerate(&q, 0, *target, &mut k, &mut |k| pairs.push(Resonance { index: i, k: k.to_vec() }));
    }
    let d_h = pairs.len();
    Ok(ResonanceResult { pairs, d_h })
}

// Visits every k ≥ 0 with Σ_{j ≥ pos} k_j h_j = remaining; k_j ≤ remaining/h_j.
fn enumerate(h: &[Rational], pos: usize, remaining: Rational, k: &mut [u32], visit: &mut impl FnMut(&[u32])) {
    if pos == h.len() {
        if remaining == Rational::from_integer(0) {
            visit(k);
        }
        return;
    }
    let bound = (remaining / h[pos]).floor().to_integer();
    for kj in 0..=bound {
        k[pos] = kj as u32;
        enumerate(h, pos + 1, remaining - h[pos] * Rational::from_integer(kj), k, visit);
    }
    k[pos] = 0;
}
