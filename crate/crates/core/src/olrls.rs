//! Online ℓ₂-regularized least squares.
//!
//! Covariance-form recursion started from `P₀ = λ⁻¹I`, `θ̂₀ = 0`, so that after
//! every sample `θ̂ₙ = (Γⁿ + λI)⁻¹ρⁿ` exactly (up to rounding). The restricted
//! variant runs the same recursion on a known support and reports zeros
//! elsewhere.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::stats::Sample;
use crate::OnlineEstimator;

#[derive(Debug, Clone)]
pub struct RlsState<T: Scalar> {
    /// Estimate on the active coordinates.
    active_theta: DVector<T>,
    /// `(Γ + λI)⁻¹` restricted to the active coordinates.
    pmat: DMatrix<T>,
    lambda: f64,
    support: Option<Vec<usize>>,
    full: DVector<T>,
    n: usize,
}

impl<T: Scalar> RlsState<T> {
    pub fn new(p: usize, lambda: f64) -> Result<Self> {
        Self::build(p, lambda, None)
    }

    /// RLS on the coordinates in `support` only (0-based, deduplicated).
    pub fn restricted(p: usize, lambda: f64, support: &[usize]) -> Result<Self> {
        let mut s = support.to_vec();
        s.sort_unstable();
        s.dedup();
        if let Some(&bad) = s.iter().find(|&&i| i >= p) {
            return Err(Error::IndexOutOfRange { index: bad, dim: p });
        }
        Self::build(p, lambda, Some(s))
    }

    fn build(p: usize, lambda: f64, support: Option<Vec<usize>>) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::config(format!(
                "RLS regularization must be positive, got {lambda}"
            )));
        }
        let k = support.as_ref().map_or(p, Vec::len);
        Ok(Self {
            active_theta: DVector::zeros(k),
            pmat: DMatrix::from_diagonal_element(k, k, T::from_real(1.0 / lambda)),
            lambda,
            support,
            full: DVector::zeros(p),
            n: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.full.len()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn support(&self) -> Option<&[usize]> {
        self.support.as_deref()
    }

    pub fn theta(&self) -> &DVector<T> {
        &self.full
    }

    /// Current `(Γ + λI)⁻¹` on the active coordinates.
    pub fn pmat(&self) -> &DMatrix<T> {
        &self.pmat
    }

    pub fn rls_step(&mut self, sample: &Sample<T>) -> Result<&DVector<T>> {
        if sample.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: sample.dim(),
            });
        }
        let h = match &self.support {
            Some(s) => DVector::from_iterator(s.len(), s.iter().map(|&i| sample.h()[i])),
            None => sample.h().clone(),
        };
        let ph = &self.pmat * &h;
        let denom = 1.0 + h.dotc(&ph).real();
        let err = sample.y() - h.dotc(&self.active_theta);
        let gain = ph.unscale(denom);
        self.active_theta.axpy(err, &gain, T::one());

        let k = h.len();
        for j in 0..k {
            let g_j = gain[j].conjugate();
            for i in 0..j {
                let v = self.pmat[(i, j)] - ph[i] * g_j;
                self.pmat[(i, j)] = v;
                self.pmat[(j, i)] = v.conjugate();
            }
            let d = self.pmat[(j, j)].real() - (ph[j] * g_j).real();
            self.pmat[(j, j)] = T::from_real(d);
        }

        match &self.support {
            Some(s) => {
                for (k, &i) in s.iter().enumerate() {
                    self.full[i] = self.active_theta[k];
                }
            }
            None => self.full.copy_from(&self.active_theta),
        }
        self.n += 1;
        Ok(&self.full)
    }
}

impl<T: Scalar> OnlineEstimator<T> for RlsState<T> {
    fn update(&mut self, sample: &Sample<T>) -> Result<()> {
        self.rls_step(sample).map(|_| ())
    }

    fn estimate(&self) -> &DVector<T> {
        &self.full
    }

    fn count(&self) -> usize {
        self.n
    }
}
