//! Closed-form series oracles, computed without the toric solver.
#![allow(dead_code)]

use soliton_core::toric::TruncatedSeries;

/// Coefficients of `2 Σ (−1)^{k+1} (r/2)^k / k²`, the cigar potential with c = 2, h = 1.
pub fn dilog_cigar_coeffs(degree: usize) -> Vec<f64> {
    (0..=degree)
        .map(|k| if k == 0 { 0.0 } else { 2.0 * (-1f64).powi(k as i32 + 1) * 0.5f64.powi(k as i32) / (k * k) as f64 })
        .collect()
}

fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let d = a.len();
    let mut out = vec![0.0; d];
    for i in 0..d {
        for j in 0..d - i {
            out[i + j] += a[i] * b[j];
        }
    }
    out
}

// w^p for w(0) = 1 via the binomial recursion: w·(w^p)' = p·w'·w^p.
fn pow_unit(w: &[f64], p: f64) -> Vec<f64> {
    let d = w.len();
    let mut out = vec![0.0; d];
    out[0] = 1.0;
    for k in 1..d {
        let mut acc = 0.0;
        for j in 1..=k {
            acc += (p * j as f64 - (k - j) as f64) * w[j] * out[k - j];
        }
        out[k] = acc / k as f64;
    }
    out
}

/// Compositional inverse of `f(b) = b + f₂b² + …`.
fn revert(f: &[f64]) -> Vec<f64> {
    let d = f.len();
    let mut b = vec![0.0; d];
    if d > 1 {
        b[1] = 1.0;
    }
    for _ in 0..d {
        // b ← y − Σ_{k≥2} f_k b^k
        let mut next = vec![0.0; d];
        if d > 1 {
            next[1] = 1.0;
        }
        let mut pw = b.clone();
        for fk in f.iter().skip(2) {
            pw = mul(&pw, &b);
            for i in 0..d {
                next[i] -= fk * pw[i];
            }
        }
        b = next;
    }
    b
}

/// Coefficients of Cao's radial potential `P(s)` with `P' = a`, `a = b(y)/y`,
/// `y = h s/2` and `b` the inverse of `f(b) = b (n Σ b^k/(k!(n+k)))^{1/n}`.
pub fn cao_potential_coeffs(n: usize, h: f64, degree: usize) -> Vec<f64> {
    let d = degree + 2;
    let mut fact = 1.0;
    let w: Vec<f64> = (0..d)
        .map(|k| {
            if k > 0 {
                fact *= k as f64;
            }
            n as f64 / (fact * (n + k) as f64)
        })
        .collect();
    let root = pow_unit(&w, 1.0 / n as f64);
    let mut f = vec![0.0; d];
    f[1..d].copy_from_slice(&root[..d - 1]);
    let beta = revert(&f);
    let mut p = vec![0.0; degree + 1];
    for k in 1..=degree {
        p[k] = beta[k] * (0.5 * h).powi(k as i32 - 1) / k as f64;
    }
    p
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `Σ p_k (r¹ + r²)^k` as a two-variable series.
pub fn radial_series_2d(p: &[f64], degree: usize) -> TruncatedSeries {
    let mut terms = Vec::new();
    for (k, pk) in p.iter().enumerate().take(degree + 1) {
        for j in 0..=k {
            terms.push((vec![(k - j) as u16, j as u16], pk * binom(k, j)));
        }
    }
    TruncatedSeries::from_terms(2, degree, terms.iter().map(|(e, c)| (e.as_slice(), *c))).unwrap()
}

/// `u(r¹) + u(r²)` for a one-variable coefficient list.
pub fn sum_series_2d(p: &[f64], degree: usize) -> TruncatedSeries {
    let mut terms = Vec::new();
    for (k, pk) in p.iter().enumerate().take(degree + 1) {
        terms.push((vec![k as u16, 0], *pk));
        terms.push((vec![0, k as u16], *pk));
    }
    TruncatedSeries::from_terms(2, degree, terms.iter().map(|(e, c)| (e.as_slice(), *c))).unwrap()
}

/// Largest coefficient difference between two series of the same shape.
pub fn max_diff(a: &TruncatedSeries, b: &TruncatedSeries) -> f64 {
    a.sub(b).unwrap().max_abs_coeff()
}
