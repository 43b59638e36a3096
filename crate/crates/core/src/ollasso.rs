//! Online cyclic LASSO for real and complex streams.
//!
//! Each coordinate solves `β r² − (2γ − λ) r` in polar form, giving the
//! complex soft threshold `θ̂ᵢ = max((2γ − λ)/(2β), 0)·e^{j·arg(ρ̃ᵢ)}` with
//! `ρ̃ᵢ = ζᵢ + Γᵢᵢθ̌ᵢ`, `β = Γᵢᵢ`, `γ = |ρ̃ᵢ|`. Unlike the square-root variant
//! this needs neither `η` nor `κ`.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::stats::{Sample, SufficientStats};
use crate::OnlineEstimator;

/// Base of the logarithm in `√(n log p)` schedules (natural log).
pub const LAMBDA_LOG_BASE: f64 = std::f64::consts::E;

/// Rule producing the regularization weight `λₙ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum LambdaSchedule {
    /// `√(2σ²n log p)`; needs the true noise variance.
    Infeasible { noise_variance: f64 },
    /// `√(n log p)`
    Feasible,
    /// `factor·√(n log p)`
    Scaled { factor: f64 },
}

impl LambdaSchedule {
    pub fn lambda(&self, n: usize, p: usize) -> f64 {
        let base = n as f64 * (p as f64).ln() / LAMBDA_LOG_BASE.ln();
        match *self {
            LambdaSchedule::Infeasible { noise_variance } => (2.0 * noise_variance * base).sqrt(),
            LambdaSchedule::Feasible => base.sqrt(),
            LambdaSchedule::Scaled { factor } => factor * base.sqrt(),
        }
    }

    /// True when the schedule relies on knowledge unavailable in practice.
    pub fn is_oracle(&self) -> bool {
        matches!(self, LambdaSchedule::Infeasible { .. })
    }
}

/// Soft-threshold minimizer of coordinate `i` for penalty `lambda`.
pub fn lasso_coordinate_minimize<T: Scalar>(
    stats: &SufficientStats<T>,
    zeta: &DVector<T>,
    theta: &DVector<T>,
    i: usize,
    lambda: f64,
) -> Result<T> {
    stats.check_index(i)?;
    let beta = stats.column_energy(i);
    if beta <= 0.0 {
        return Ok(T::zero());
    }
    let source = zeta[i] + theta[i].scale(beta);
    let r = ((2.0 * source.modulus() - lambda) / (2.0 * beta)).max(0.0);
    Ok(if r == 0.0 {
        T::zero()
    } else {
        source.with_modulus(r)
    })
}

#[derive(Debug, Clone)]
pub struct LassoState<T: Scalar> {
    stats: SufficientStats<T>,
    zeta: DVector<T>,
    theta: DVector<T>,
    schedule: LambdaSchedule,
    sweeps: usize,
}

impl<T: Scalar> LassoState<T> {
    pub fn new(p: usize, schedule: LambdaSchedule) -> Self {
        Self {
            stats: SufficientStats::zeros(p),
            zeta: DVector::zeros(p),
            theta: DVector::zeros(p),
            schedule,
            sweeps: 1,
        }
    }

    pub fn with_sweeps(p: usize, schedule: LambdaSchedule, sweeps: usize) -> Result<Self> {
        if sweeps == 0 {
            return Err(Error::config(
                "OL-LASSO needs at least one sweep per sample",
            ));
        }
        Ok(Self {
            sweeps,
            ..Self::new(p, schedule)
        })
    }

    pub fn dim(&self) -> usize {
        self.theta.len()
    }

    pub fn theta(&self) -> &DVector<T> {
        &self.theta
    }

    pub fn stats(&self) -> &SufficientStats<T> {
        &self.stats
    }

    pub fn zeta(&self) -> &DVector<T> {
        &self.zeta
    }

    pub fn schedule(&self) -> LambdaSchedule {
        self.schedule
    }

    /// `λₙ` at the current sample count.
    pub fn current_lambda(&self) -> f64 {
        self.schedule.lambda(self.stats.count(), self.dim())
    }

    pub fn update_coordinate(&mut self, i: usize, lambda: f64) -> Result<T> {
        let new = lasso_coordinate_minimize(&self.stats, &self.zeta, &self.theta, i, lambda)?;
        let delta = self.theta[i] - new;
        if delta != T::zero() {
            self.zeta
                .axpy(delta, &self.stats.gamma().column(i), T::one());
            self.theta[i] = new;
        }
        Ok(new)
    }

    pub fn process_sample(&mut self, sample: &Sample<T>) -> Result<&DVector<T>> {
        self.stats.ingest(sample)?;
        let lambda = self.current_lambda();
        self.zeta = self.stats.rho() - self.stats.gamma() * &self.theta;
        for _ in 0..self.sweeps {
            for i in 0..self.dim() {
                self.update_coordinate(i, lambda)?;
            }
        }
        Ok(&self.theta)
    }
}

impl<T: Scalar> OnlineEstimator<T> for LassoState<T> {
    fn update(&mut self, sample: &Sample<T>) -> Result<()> {
        self.process_sample(sample).map(|_| ())
    }

    fn estimate(&self) -> &DVector<T> {
        &self.theta
    }

    fn count(&self) -> usize {
        self.stats.count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Complex64;
    use nalgebra::{dvector, Complex};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn schedule_values() {
        let (n, p) = (250usize, 500usize);
        let base = n as f64 * (p as f64).ln();
        assert!((LambdaSchedule::Feasible.lambda(n, p) - base.sqrt()).abs() < 1e-12);
        let inf = LambdaSchedule::Infeasible {
            noise_variance: 0.01,
        };
        assert!((inf.lambda(n, p) - (2.0 * 0.01 * base).sqrt()).abs() < 1e-12);
        let sc = LambdaSchedule::Scaled { factor: 1e-2 };
        assert!((sc.lambda(n, p) - 1e-2 * base.sqrt()).abs() < 1e-12);
        for s in [LambdaSchedule::Feasible, inf, sc] {
            assert!(s.lambda(1, 2) > 0.0);
        }
        assert!(inf.is_oracle() && !LambdaSchedule::Feasible.is_oracle());
    }

    #[test]
    fn kill_branch() {
        let mut stats = SufficientStats::<f64>::zeros(1);
        stats
            .ingest(&Sample::new(1.0, dvector![1.0]).unwrap())
            .unwrap();
        let zeta = stats.rho().clone();
        let theta = DVector::zeros(1);
        // 2γ = 2 ≤ λ
        assert_eq!(
            lasso_coordinate_minimize(&stats, &zeta, &theta, 0, 2.0).unwrap(),
            0.0
        );
        assert!(lasso_coordinate_minimize(&stats, &zeta, &theta, 1, 2.0).is_err());
    }

    #[test]
    fn zero_lambda_is_least_squares() {
        let mut stats = SufficientStats::<f64>::zeros(1);
        for _ in 0..2 {
            stats
                .ingest(&Sample::new(3.0, dvector![1.0]).unwrap())
                .unwrap();
        }
        let zeta = stats.rho().clone();
        let v = lasso_coordinate_minimize(&stats, &zeta, &DVector::zeros(1), 0, 0.0).unwrap();
        assert_eq!(v, 3.0);
    }

    #[test]
    fn real_matches_scalar_soft_threshold() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let p = 5;
        let mut stats = SufficientStats::<f64>::zeros(p);
        for _ in 0..12 {
            let h = DVector::from_fn(p, |_, _| rng.sample(StandardNormal));
            stats
                .ingest(&Sample::new(rng.sample(StandardNormal), h).unwrap())
                .unwrap();
        }
        let theta = DVector::from_fn(p, |_, _| rng.sample::<f64, _>(StandardNormal));
        let zeta = stats.rho() - stats.gamma() * &theta;
        for i in 0..p {
            let lambda = rng.random_range(0.0..6.0);
            // ρ̃ᵢ = ρᵢ − Σ_{j≠i} Γᵢⱼθⱼ
            let rho_t = stats.rho()[i]
                - (0..p)
                    .filter(|&j| j != i)
                    .map(|j| stats.gamma()[(i, j)] * theta[j])
                    .sum::<f64>();
            let g = stats.gamma()[(i, i)];
            let expected = rho_t.signum() * (rho_t.abs() - lambda / 2.0).max(0.0) / g;
            let got = lasso_coordinate_minimize(&stats, &zeta, &theta, i, lambda).unwrap();
            assert!((got - expected).abs() <= 1e-12 * (1.0 + expected.abs()));
        }
    }

    #[test]
    fn all_zero_stream() {
        let mut state = LassoState::<f64>::new(3, LambdaSchedule::Feasible);
        for _ in 0..10 {
            let t = state
                .process_sample(&Sample::new(0.0, DVector::zeros(3)).unwrap())
                .unwrap();
            assert_eq!(t, &DVector::zeros(3));
        }
    }

    #[test]
    fn complex_phase_follows_rho() {
        let mut state = LassoState::<Complex64>::new(1, LambdaSchedule::Scaled { factor: 1e-3 });
        let s = Sample::new(Complex::new(1.0, 1.0), dvector![Complex::new(1.0, 0.0)]).unwrap();
        state.process_sample(&s).unwrap();
        state.process_sample(&s).unwrap();
        let t = state.theta()[0];
        assert!((t.arg() - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
        assert!((state.stats().rho()[0].arg() - t.arg()).abs() < 1e-12);
    }
}
