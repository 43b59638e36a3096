//! Online sparse parameter estimation from streaming linear measurements.
//!
//! The centerpiece is [`SpiceState`], a hyperparameter-free online estimator
//! that minimizes the weighted square-root LASSO criterion
//! `‖y − Hθ‖₂ + ‖Dθ‖₁` (with `Dᵢᵢ = ‖cᵢ‖/√n`) by cyclic coordinate updates
//! driven entirely by recursively maintained sufficient statistics.
//! [`LassoState`] and [`RlsState`] are the online LASSO and ℓ₂-regularized
//! least-squares baselines; [`oracle`] holds batch reference solvers, and
//! [`scenarios`] plus [`harness`] reproduce Monte Carlo NMSE experiments.
//!
//! Every estimator is generic over the scalar field: `f64` for real-valued
//! streams and [`Complex64`] for complex-valued ones, through one code path.

pub mod error;
pub mod harness;
pub mod ollasso;
pub mod olrls;
pub mod olspice;
pub mod oracle;
pub mod scalar;
pub mod scenarios;
pub mod stats;

pub use nalgebra::{Complex, DMatrix, DVector};

pub use error::{Error, Result};
pub use harness::{
    emit, nmse, run_config, run_experiment, run_trial, snr_sweep, Aggregator, EstimatorSpec,
    LassoTuning, RunConfig, RunOptions, RunSummary, Snapshots, SnrSweep, SummaryAxis, SummaryRow,
    TrialResult,
};
pub use ollasso::{lasso_coordinate_minimize, LambdaSchedule, LassoState};
pub use olrls::RlsState;
pub use olspice::{coordinate_minimize, CoordinateStats, SpiceState};
pub use oracle::{BatchProblem, BatchSolution, CovParams};
pub use scalar::Scalar;
pub use scenarios::{Amplitudes, ScenarioKind, ScenarioSpec, Trial};
pub use stats::{AuxState, Sample, SufficientStats};

/// Double-precision complex scalar.
pub type Complex64 = Complex<f64>;

/// A streaming estimator that refines its estimate one sample at a time.
pub trait OnlineEstimator<T: Scalar>: Send {
    /// Ingests one sample and updates the current estimate.
    fn update(&mut self, sample: &Sample<T>) -> Result<()>;

    /// The current estimate θ̂ₙ.
    fn estimate(&self) -> &DVector<T>;

    /// Number of samples ingested so far.
    fn count(&self) -> usize;
}
