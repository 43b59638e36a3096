//! Streaming sufficient statistics and the residual auxiliaries shared by
//! the online estimators.
//!
//! For a history of `n` samples `yₜ = hₜ*θ + wₜ`, stacked as `yₙ = Hₙθ + wₙ`
//! with rows `hₜ*`, the estimators only ever need
//! `Γⁿ = Hₙ*Hₙ`, `ρⁿ = Hₙ*yₙ` and `κⁿ = yₙ*yₙ`, all of which update in
//! `O(p²)` per sample. The residual `zₙ = yₙ − Hₙθ̌` of the current estimate is
//! summarized by `η = ‖zₙ‖²` and `ζ = Hₙ*zₙ`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// One streaming measurement `y = h*θ + w`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample<T: Scalar> {
    y: T,
    h: DVector<T>,
}

impl<T: Scalar> Sample<T> {
    pub fn new(y: T, h: DVector<T>) -> Result<Self> {
        if !y.is_finite() {
            return Err(Error::NonFinite("sample observation"));
        }
        if h.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("sample regressor"));
        }
        Ok(Self { y, h })
    }

    pub fn y(&self) -> T {
        self.y
    }

    pub fn h(&self) -> &DVector<T> {
        &self.h
    }

    pub fn dim(&self) -> usize {
        self.h.len()
    }
}

/// Recursively accumulated `(Γⁿ, ρⁿ, κⁿ)` and the sample count `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SufficientStats<T: Scalar> {
    gamma: DMatrix<T>,
    rho: DVector<T>,
    kappa: f64,
    n: usize,
}

impl<T: Scalar> SufficientStats<T> {
    pub fn zeros(p: usize) -> Self {
        Self {
            gamma: DMatrix::zeros(p, p),
            rho: DVector::zeros(p),
            kappa: 0.0,
            n: 0,
        }
    }

    /// Adds `hh*` to Γ, `h·y` to ρ and `|y|²` to κ.
    ///
    /// Both triangles of Γ are written from the same rank-1 products, so Γ
    /// stays exactly Hermitian.
    pub fn ingest(&mut self, sample: &Sample<T>) -> Result<()> {
        let p = self.dim();
        if sample.dim() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                found: sample.dim(),
            });
        }
        let h = sample.h();
        for j in 0..p {
            let hj_conj = h[j].conjugate();
            for i in 0..j {
                let v = h[i] * hj_conj;
                self.gamma[(i, j)] += v;
                self.gamma[(j, i)] += v.conjugate();
            }
            self.gamma[(j, j)] += T::from_real(h[j].modulus_squared());
        }
        let y = sample.y();
        for i in 0..p {
            self.rho[i] += h[i] * y;
        }
        self.kappa += y.modulus_squared();
        self.n += 1;
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.rho.len()
    }

    /// Number of ingested samples `n`.
    pub fn count(&self) -> usize {
        self.n
    }

    pub fn gamma(&self) -> &DMatrix<T> {
        &self.gamma
    }

    pub fn rho(&self) -> &DVector<T> {
        &self.rho
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// `Γⁿᵢᵢ = ‖cᵢ‖²`, the energy of regressor column `i`.
    pub fn column_energy(&self, i: usize) -> f64 {
        self.gamma[(i, i)].real()
    }

    pub(crate) fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.dim() {
            return Err(Error::IndexOutOfRange {
                index: i,
                dim: self.dim(),
            });
        }
        Ok(())
    }
}

/// Residual summary `η = ‖yₙ − Hₙθ̌‖²`, `ζ = Hₙ*(yₙ − Hₙθ̌)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxState<T: Scalar> {
    eta: f64,
    zeta: DVector<T>,
}

impl<T: Scalar> AuxState<T> {
    /// From-scratch initialization for the estimate `theta`:
    /// `η = κ + θ*Γθ − 2Re{θ*ρ}`, `ζ = ρ − Γθ`.
    pub fn init(stats: &SufficientStats<T>, theta: &DVector<T>) -> Result<Self> {
        if theta.len() != stats.dim() {
            return Err(Error::DimensionMismatch {
                expected: stats.dim(),
                found: theta.len(),
            });
        }
        if theta.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("estimate"));
        }
        let gamma_theta = stats.gamma() * theta;
        let quad = theta.dotc(&gamma_theta).real();
        let cross = theta.dotc(stats.rho()).real();
        let eta = (stats.kappa() + quad - 2.0 * cross).max(0.0);
        let zeta = stats.rho() - gamma_theta;
        Ok(Self { eta, zeta })
    }

    /// Accounts for changing coordinate `i` of the estimate from `old` to
    /// `new` in `O(p)`.
    pub fn apply_coordinate_delta(
        &mut self,
        stats: &SufficientStats<T>,
        i: usize,
        old: T,
        new: T,
    ) -> Result<()> {
        stats.check_index(i)?;
        let delta = old - new;
        if delta == T::zero() {
            return Ok(());
        }
        let energy = stats.column_energy(i);
        self.eta +=
            energy * delta.modulus_squared() + 2.0 * (delta.conjugate() * self.zeta[i]).real();
        self.eta = self.eta.max(0.0);
        self.zeta.axpy(delta, &stats.gamma().column(i), T::one());
        Ok(())
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn zeta(&self) -> &DVector<T> {
        &self.zeta
    }
}
