//! Scalar special functions and quadrature used by the closed-form families.

use std::f64::consts::PI;

const PI2_6: f64 = PI * PI / 6.0;

/// `B_{2k} / (2k+1)!` for `k = 1..=10`.
const BERNOULLI_OVER_FACTORIAL: [f64; 10] = [
    1.0 / 6.0 / 6.0,
    -1.0 / 30.0 / 120.0,
    1.0 / 42.0 / 5040.0,
    -1.0 / 30.0 / 362_880.0,
    5.0 / 66.0 / 39_916_800.0,
    -691.0 / 2730.0 / 6_227_020_800.0,
    7.0 / 6.0 / 1_307_674_368_000.0,
    -3617.0 / 510.0 / 355_687_428_096_000.0,
    43867.0 / 798.0 / 121_645_100_408_832_000.0,
    -174_611.0 / 330.0 / 51_090_942_171_709_440_000.0,
];

/// Real dilogarithm `Li₂(x) = −∫₀ˣ ln(1−t)/t dt` for `x ≤ 1`.
///
/// Returns NaN for `x > 1`, where the function is complex.
pub fn dilog(x: f64) -> f64 {
    if x.is_nan() || x > 1.0 {
        return f64::NAN;
    }
    if x == 1.0 {
        return PI2_6;
    }
    if x < -1.0 {
        let l = (-x).ln();
        return -PI2_6 - 0.5 * l * l - dilog_core(1.0 / x);
    }
    if x > 0.5 {
        return PI2_6 - x.ln() * (-x).ln_1p() - dilog_core(1.0 - x);
    }
    dilog_core(x)
}

// Bernoulli expansion in u = −ln(1−x); valid for −1 ≤ x ≤ ½ where |u| ≤ ln 2.
fn dilog_core(x: f64) -> f64 {
    let u = -(-x).ln_1p();
    let u2 = u * u;
    let mut sum = u - 0.25 * u2;
    let mut pow = u * u2;
    for c in BERNOULLI_OVER_FACTORIAL {
        sum += c * pow;
        pow *= u2;
    }
    sum
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { x } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Fixed composite Gauss–Legendre rule on `[a, b]`.
///
/// The node layout depends smoothly on the endpoints, so the result is a
/// smooth function of `a` and `b` (unlike adaptive rules); finite
/// differences of the integral with respect to an endpoint stay clean.
#[derive(Debug, Clone)]
pub struct CompositeGauss {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    panels: usize,
}

impl CompositeGauss {
    pub fn new(points: usize, panels: usize) -> Self {
        let (nodes, weights) = gauss_legendre(points);
        CompositeGauss { nodes, weights, panels: panels.max(1) }
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        let width = (b - a) / self.panels as f64;
        let mut total = 0.0;
        for p in 0..self.panels {
            let lo = a + p as f64 * width;
            let mid = lo + 0.5 * width;
            let mut s = 0.0;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                s += w * f(mid + 0.5 * width * x);
            }
            total += 0.5 * width * s;
        }
        total
    }
}

/// Solves `f(x) = target` for increasing `f` on the bracket `[lo, hi]`.
///
/// `eval` returns `(f(x), f'(x))`. Newton steps start from `seed`; any step
/// leaving the current bracket is replaced by bisection. Returns the root and
/// the iteration count.
pub fn invert_increasing(
    eval: impl Fn(f64) -> (f64, f64),
    target: f64,
    mut lo: f64,
    mut hi: f64,
    seed: f64,
    tol: f64,
    max_iter: usize,
) -> (f64, usize) {
    let mut x = seed.clamp(lo, hi);
    for it in 1..=max_iter {
        let (fx, dfx) = eval(x);
        let resid = fx - target;
        if resid == 0.0 {
            return (x, it);
        }
        if resid > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let newton = x - resid / dfx;
        let next = if dfx > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        let step = (next - x).abs();
        x = next;
        if step <= tol * x.abs().max(1e-300) || hi - lo <= tol * x.abs().max(1e-300) {
            return (x, it);
        }
    }
    (x, max_iter)
}
