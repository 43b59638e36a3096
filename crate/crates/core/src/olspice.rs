//! Hyperparameter-free online sparse estimation.
//!
//! At sample `n` the estimator minimizes
//!
//! ```text
//! J(θ) = ‖yₙ − Hₙθ‖₂ + Σᵢ dᵢᵢ|θᵢ|,    dᵢᵢ = √(Γⁿᵢᵢ / n)
//! ```
//!
//! by cyclic coordinate updates. Writing `θᵢ = r·e^{jφ}`, the one-dimensional
//! cost is `√(α + βr² − 2γr) + d·r` with `α = ‖ỹᵢ‖²`, `β = ‖cᵢ‖²`,
//! `γ = |cᵢ*ỹᵢ|`, where `ỹᵢ` is the residual with coordinate `i` removed.
//! It is convex in `r`; its minimizer is
//!
//! ```text
//! r̂ = γ/β − √((αβ − γ²)/(n − 1)) / β   if √(n−1)·γ > √(αβ − γ²),  else 0
//! ```
//!
//! with phase `arg(cᵢ*ỹᵢ)`. All three quantities come from `(Γ, η, ζ)` in
//! `O(1)`, so a full sweep costs `O(p²)` and memory stays constant in `n`.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::stats::{AuxState, Sample, SufficientStats};
use crate::OnlineEstimator;

/// Sweeps per sample unless configured otherwise.
pub const DEFAULT_SWEEPS: usize = 1;

/// The `(α, β, γ)` triple of one coordinate subproblem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoordinateStats {
    /// `‖ỹᵢ‖²`
    pub alpha: f64,
    /// `‖cᵢ‖² = Γⁿᵢᵢ`
    pub beta: f64,
    /// `|cᵢ*ỹᵢ|`
    pub gamma: f64,
}

impl CoordinateStats {
    /// `αβ − γ²`, nonnegative by Cauchy-Schwarz; clamped at zero against
    /// rounding.
    pub fn schwarz_gap(&self) -> f64 {
        (self.alpha * self.beta - self.gamma * self.gamma).max(0.0)
    }

    /// Whether the coordinate survives thresholding at sample count `n`.
    pub fn is_active(&self, n: usize) -> bool {
        n > 1 && self.beta > 0.0 && ((n - 1) as f64).sqrt() * self.gamma > self.schwarz_gap().sqrt()
    }

    /// The minimizing modulus `r̂ ∈ [0, γ/β]`.
    pub fn minimizing_modulus(&self, n: usize) -> f64 {
        if !self.is_active(n) {
            return 0.0;
        }
        let upper = self.gamma / self.beta;
        let shrink = (self.schwarz_gap() / (n - 1) as f64).sqrt() / self.beta;
        (upper - shrink).clamp(0.0, upper)
    }
}

/// Minimizer of the coordinate cost: `r̂·e^{j·arg(phase_source)}`.
///
/// `phase_source` is `cᵢ*ỹᵢ = ζᵢ + Γⁿᵢᵢθ̌ᵢ`. Returns exactly zero when the
/// coordinate is thresholded, unexcited (`β = 0`), or `n ≤ 1`.
pub fn coordinate_minimize<T: Scalar>(cs: CoordinateStats, phase_source: T, n: usize) -> T {
    let r = cs.minimizing_modulus(n);
    if r == 0.0 {
        T::zero()
    } else {
        phase_source.with_modulus(r)
    }
}

/// Online estimator state: statistics, residual auxiliaries and the current
/// estimate θ̌.
#[derive(Debug, Clone)]
pub struct SpiceState<T: Scalar> {
    stats: SufficientStats<T>,
    aux: AuxState<T>,
    theta: DVector<T>,
    sweeps: usize,
}

impl<T: Scalar> SpiceState<T> {
    pub fn new(p: usize) -> Self {
        let stats = SufficientStats::zeros(p);
        let theta = DVector::zeros(p);
        let aux = AuxState::init(&stats, &theta).expect("zero state is consistent");
        Self {
            stats,
            aux,
            theta,
            sweeps: DEFAULT_SWEEPS,
        }
    }

    /// Runs `sweeps ≥ 1` cyclic passes per sample.
    pub fn with_sweeps(p: usize, sweeps: usize) -> Result<Self> {
        if sweeps == 0 {
            return Err(Error::config(
                "OL-SPICE needs at least one sweep per sample",
            ));
        }
        Ok(Self {
            sweeps,
            ..Self::new(p)
        })
    }

    pub fn dim(&self) -> usize {
        self.theta.len()
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    pub fn theta(&self) -> &DVector<T> {
        &self.theta
    }

    pub fn stats(&self) -> &SufficientStats<T> {
        &self.stats
    }

    pub fn aux(&self) -> &AuxState<T> {
        &self.aux
    }

    /// `(α, β, γ)` for coordinate `i` together with `cᵢ*ỹᵢ`.
    pub fn coordinate_stats(&self, i: usize) -> Result<(CoordinateStats, T)> {
        self.stats.check_index(i)?;
        let beta = self.stats.column_energy(i);
        let current = self.theta[i];
        let zeta_i = self.aux.zeta()[i];
        let alpha = (self.aux.eta()
            + beta * current.modulus_squared()
            + 2.0 * (current.conjugate() * zeta_i).real())
        .max(0.0);
        let source = zeta_i + current.scale(beta);
        let cs = CoordinateStats {
            alpha,
            beta,
            gamma: source.modulus(),
        };
        Ok((cs, source))
    }

    /// Minimizes over coordinate `i` holding the others fixed and commits the
    /// result. Returns the new value.
    pub fn update_coordinate(&mut self, i: usize) -> Result<T> {
        let (cs, source) = self.coordinate_stats(i)?;
        let new = coordinate_minimize(cs, source, self.stats.count());
        let old = self.theta[i];
        if new != old {
            self.aux.apply_coordinate_delta(&self.stats, i, old, new)?;
            self.theta[i] = new;
        }
        Ok(new)
    }

    /// One ascending pass over all coordinates.
    pub fn sweep(&mut self) -> Result<()> {
        for i in 0..self.dim() {
            self.update_coordinate(i)?;
        }
        Ok(())
    }

    /// Ingests a sample, re-initializes `(η, ζ)` from the warm-started
    /// estimate and runs the configured number of sweeps.
    pub fn process_sample(&mut self, sample: &Sample<T>) -> Result<&DVector<T>> {
        self.stats.ingest(sample)?;
        if self.stats.count() <= 1 {
            self.theta.fill(T::zero());
            self.aux = AuxState::init(&self.stats, &self.theta)?;
            return Ok(&self.theta);
        }
        self.aux = AuxState::init(&self.stats, &self.theta)?;
        for _ in 0..self.sweeps {
            self.sweep()?;
        }
        Ok(&self.theta)
    }
}

impl<T: Scalar> OnlineEstimator<T> for SpiceState<T> {
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
