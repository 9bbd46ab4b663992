use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Condition number above which a metric is treated as singular.
pub const MAX_CONDITION: f64 = 1e12;

/// A Hermitian `n × n` matrix, stored densely.
///
/// Every constructor symmetrizes its input as `(M + M*) / 2`, so the
/// Hermitian property holds exactly rather than up to rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(DMatrix<Complex64>);

impl HermitianMatrix {
    pub fn from_matrix(m: DMatrix<Complex64>) -> Self {
        assert!(m.is_square(), "Hermitian matrix must be square");
        let sym = (&m + m.adjoint()).scale(0.5);
        HermitianMatrix(sym)
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self::from_matrix(DMatrix::from_fn(n, n, f))
    }

    pub fn zeros(n: usize) -> Self {
        HermitianMatrix(DMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        HermitianMatrix(DMatrix::identity(n, n))
    }

    pub fn from_real_diagonal(d: &[f64]) -> Self {
        HermitianMatrix(DMatrix::from_fn(d.len(), d.len(), |i, j| {
            if i == j {
                Complex64::new(d[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn scale(&self, s: f64) -> Self {
        HermitianMatrix(self.0.scale(s))
    }

    /// Real eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.0.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn determinant(&self) -> f64 {
        self.0.determinant().re
    }

    pub fn is_positive_definite(&self) -> bool {
        self.eigenvalues().first().is_some_and(|&l| l > 0.0)
    }

    /// Ratio of the largest to the smallest eigenvalue modulus.
    pub fn condition_number(&self) -> f64 {
        let ev = self.eigenvalues();
        let max = ev.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
        let min = ev.iter().fold(f64::INFINITY, |m, &l| m.min(l.abs()));
        max / min
    }

    /// Fails with `SingularMetric` unless the matrix is positive definite
    /// with condition number at most [`MAX_CONDITION`].
    pub fn check_metric(&self) -> Result<()> {
        let ev = self.eigenvalues();
        let lo = ev[0];
        let hi = ev[ev.len() - 1];
        if !(lo > 0.0) || !hi.is_finite() {
            return Err(Error::SingularMetric(format!("eigenvalues {ev:?}")));
        }
        if hi / lo > MAX_CONDITION {
            return Err(Error::SingularMetric(format!(
                "condition number {:e} exceeds {MAX_CONDITION:e}",
                hi / lo
            )));
        }
        Ok(())
    }

    pub fn inverse(&self) -> Result<HermitianMatrix> {
        self.0
            .clone()
            .try_inverse()
            .map(HermitianMatrix::from_matrix)
            .ok_or_else(|| Error::SingularMetric("matrix is not invertible".into()))
    }

    /// Index-raised inverse `g^{ij̄}`, defined by `Σ_i g^{ij̄} g_{ik̄} = δ_jk`.
    ///
    /// In matrix terms this is the transpose of the ordinary inverse.
    pub fn raised_inverse(&self) -> Result<DMatrix<Complex64>> {
        Ok(self.inverse()?.0.transpose())
    }

    /// `tr(self⁻¹ · other)`, i.e. the full contraction `g^{ij̄} A_{ij̄}`.
    pub fn contract_with_inverse(&self, other: &HermitianMatrix) -> Result<f64> {
        let inv = self.inverse()?;
        Ok((inv.0 * &other.0).trace().re)
    }

    /// `Σ M_{lk̄} v^l conj(v^k)`.
    pub fn quadratic_form(&self, v: &[Complex64]) -> f64 {
        let n = self.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        for l in 0..n {
            for k in 0..n {
                acc += self.0[(l, k)] * v[l] * v[k].conj();
            }
        }
        acc.re
    }

    pub fn max_abs_diff(&self, other: &HermitianMatrix) -> f64 {
        (&self.0 - &other.0).iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, c| m.max(c.norm()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn construction_symmetrizes_exactly() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.3), c(2.0, 1.0), c(2.2, -0.8), c(3.0, -0.1)]);
        let h = HermitianMatrix::from_matrix(m);
        assert_eq!(h.get(0, 1), h.get(1, 0).conj());
        assert_eq!(h.get(0, 0).im, 0.0);
    }

    #[test]
    fn raised_inverse_contracts_to_identity() {
        let h = HermitianMatrix::from_fn(2, |i, j| match (i, j) {
            (0, 0) => c(2.0, 0.0),
            (0, 1) => c(0.5, 0.7),
            (1, 0) => c(0.5, -0.7),
            _ => c(3.0, 0.0),
        });
        let up = h.raised_inverse().unwrap();
        for j in 0..2 {
            for k in 0..2 {
                let s: Complex64 = (0..2).map(|i| up[(i, j)] * h.get(i, k)).sum();
                let want = if j == k { 1.0 } else { 0.0 };
                assert!((s - c(want, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn metric_check_rejects_degenerate_matrices() {
        assert!(HermitianMatrix::from_real_diagonal(&[1.0, -1.0]).check_metric().is_err());
        assert!(HermitianMatrix::from_real_diagonal(&[1.0, 1e-13]).check_metric().is_err());
        assert!(HermitianMatrix::from_real_diagonal(&[1.0, 1e-3]).check_metric().is_ok());
    }
}
