//! Batch reference solvers on explicit `(Hₙ, yₙ)`.
//!
//! These work from the stacked history instead of the recursive statistics
//! and serve as ground truth for the online estimators: a fully converged
//! cyclic solver for the weighted square-root LASSO, a fixed-sweep cyclic
//! LASSO, the closed-form LMMSE estimator, and the covariance-matching costs
//! that tie the two together.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::olspice::{coordinate_minimize, CoordinateStats};
use crate::scalar::Scalar;
use crate::stats::Sample;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_SWEEPS: usize = 100_000;

/// Stacked history `yₙ = Hₙθ + wₙ`; row `t` of `Hₙ` is `hₜ*`.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchProblem<T: Scalar> {
    hmat: DMatrix<T>,
    y: DVector<T>,
}

impl<T: Scalar> BatchProblem<T> {
    pub fn new(hmat: DMatrix<T>, y: DVector<T>) -> Result<Self> {
        if hmat.nrows() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: hmat.nrows(),
                found: y.len(),
            });
        }
        if hmat.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("batch problem"));
        }
        Ok(Self { hmat, y })
    }

    pub fn from_samples(samples: &[Sample<T>]) -> Result<Self> {
        let p = samples.first().map_or(0, Sample::dim);
        if let Some(s) = samples.iter().find(|s| s.dim() != p) {
            return Err(Error::DimensionMismatch {
                expected: p,
                found: s.dim(),
            });
        }
        let hmat = DMatrix::from_fn(samples.len(), p, |t, i| samples[t].h()[i].conjugate());
        let y = DVector::from_iterator(samples.len(), samples.iter().map(Sample::y));
        Ok(Self { hmat, y })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn p(&self) -> usize {
        self.hmat.ncols()
    }

    pub fn hmat(&self) -> &DMatrix<T> {
        &self.hmat
    }

    pub fn y(&self) -> &DVector<T> {
        &self.y
    }

    pub fn residual(&self, theta: &DVector<T>) -> DVector<T> {
        &self.y - &self.hmat * theta
    }

    /// `dᵢᵢ = ‖cᵢ‖/√n`
    pub fn weights(&self) -> DVector<f64> {
        let n = self.n() as f64;
        DVector::from_fn(self.p(), |i, _| {
            (self.hmat.column(i).norm_squared() / n).sqrt()
        })
    }
}

/// `‖y − Hθ‖₂ + Σ dᵢᵢ|θᵢ|`
pub fn weighted_sqrt_lasso_cost<T: Scalar>(prob: &BatchProblem<T>, theta: &DVector<T>) -> f64 {
    let penalty: f64 = prob
        .weights()
        .iter()
        .zip(theta.iter())
        .map(|(d, t)| d * t.modulus())
        .sum();
    prob.residual(theta).norm() + penalty
}

/// `‖y − Hθ‖₂² + λ‖θ‖₁`
pub fn lasso_cost<T: Scalar>(prob: &BatchProblem<T>, theta: &DVector<T>, lambda: f64) -> f64 {
    prob.residual(theta).norm_squared() + lambda * theta.iter().map(|t| t.modulus()).sum::<f64>()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchSolution<T: Scalar> {
    pub theta: DVector<T>,
    pub converged: bool,
    pub sweeps: usize,
}

/// Cyclic minimization of the weighted square-root LASSO from `θ = 0`,
/// until the largest coordinate change in a sweep drops below `tol`.
///
/// Coordinate statistics are formed from the explicit residual
/// `z = y − Hθ`, not from the recursive statistics. Zero columns keep a zero
/// coefficient.
pub fn batch_weighted_sqrt_lasso<T: Scalar>(
    prob: &BatchProblem<T>,
    tol: f64,
    max_sweeps: usize,
) -> BatchSolution<T> {
    let (n, p) = (prob.n(), prob.p());
    let mut theta = DVector::<T>::zeros(p);
    let mut z = prob.y().clone();
    let energies: Vec<f64> = (0..p).map(|i| prob.hmat.column(i).norm_squared()).collect();
    let mut sweeps = 0;
    while sweeps < max_sweeps {
        sweeps += 1;
        let mut max_change = 0.0f64;
        for i in 0..p {
            if energies[i] == 0.0 {
                continue;
            }
            let col = prob.hmat.column(i);
            let old = theta[i];
            // ỹᵢ = z + cᵢθᵢ
            let mut y_tilde = z.clone();
            y_tilde.axpy(old, &col, T::one());
            let source = col.dotc(&y_tilde);
            let cs = CoordinateStats {
                alpha: y_tilde.norm_squared(),
                beta: energies[i],
                gamma: source.modulus(),
            };
            let new = coordinate_minimize(cs, source, n);
            if new != old {
                z.axpy(old - new, &col, T::one());
                theta[i] = new;
                max_change = max_change.max((old - new).modulus());
            }
        }
        if max_change < tol {
            return BatchSolution {
                theta,
                converged: true,
                sweeps,
            };
        }
    }
    BatchSolution {
        theta,
        converged: false,
        sweeps,
    }
}

/// `sweeps` cyclic soft-threshold passes on `‖y − Hθ‖² + λ‖θ‖₁` from `start`,
/// using explicit residuals.
pub fn batch_cyclic_lasso<T: Scalar>(
    prob: &BatchProblem<T>,
    lambda: f64,
    start: &DVector<T>,
    sweeps: usize,
) -> DVector<T> {
    let mut theta = start.clone();
    let mut z = prob.residual(&theta);
    for _ in 0..sweeps {
        for i in 0..prob.p() {
            let col = prob.hmat.column(i);
            let energy = col.norm_squared();
            if energy == 0.0 {
                theta[i] = T::zero();
                continue;
            }
            let old = theta[i];
            let rho_tilde = col.dotc(&z) + old.scale(energy);
            let r = (rho_tilde.modulus() - lambda / 2.0).max(0.0) / energy;
            let new = if r == 0.0 {
                T::zero()
            } else {
                rho_tilde.with_modulus(r)
            };
            z.axpy(old - new, &col, T::one());
            theta[i] = new;
        }
    }
    theta
}

/// Covariance parameters `φ = (diag P, σ²)`, all strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct CovParams {
    pdiag: DVector<f64>,
    sigma2: f64,
}

impl CovParams {
    pub fn new(pdiag: DVector<f64>, sigma2: f64) -> Result<Self> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(sigma2) || !pdiag.iter().all(|&v| positive(v)) {
            return Err(Error::config(
                "covariance parameters must be strictly positive",
            ));
        }
        Ok(Self { pdiag, sigma2 })
    }

    pub fn pdiag(&self) -> &DVector<f64> {
        &self.pdiag
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    /// `c·φ`
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(&self.pdiag * c, self.sigma2 * c)
    }
}

fn check_dims<T: Scalar>(prob: &BatchProblem<T>, cp: &CovParams) -> Result<()> {
    if cp.pdiag.len() != prob.p() {
        return Err(Error::DimensionMismatch {
            expected: prob.p(),
            found: cp.pdiag.len(),
        });
    }
    Ok(())
}

/// `R(φ) = HPH* + σ²I`
pub fn data_covariance<T: Scalar>(prob: &BatchProblem<T>, cp: &CovParams) -> Result<DMatrix<T>> {
    check_dims(prob, cp)?;
    let mut hp = prob.hmat.clone();
    for (i, mut col) in hp.column_iter_mut().enumerate() {
        col.scale_mut(cp.pdiag[i]);
    }
    let mut r = hp * prob.hmat.adjoint();
    for t in 0..prob.n() {
        r[(t, t)] += T::from_real(cp.sigma2);
    }
    Ok(r)
}

/// `R⁻¹y` for HPD `R`.
fn solve_hpd<T: Scalar>(r: DMatrix<T>, y: &DVector<T>, what: &'static str) -> Result<DVector<T>> {
    let chol = r.cholesky().ok_or(Error::Singular(what))?;
    Ok(chol.solve(y))
}

/// LMMSE estimate `PH*(HPH* + σ²I)⁻¹y`.
///
/// The information form `(H*H + σ²P⁻¹)⁻¹H*y` is evaluated as well; a
/// disagreement beyond `1e-6` relative is reported as a singular system.
pub fn lmmse<T: Scalar>(prob: &BatchProblem<T>, cp: &CovParams) -> Result<DVector<T>> {
    let theta = lmmse_covariance_form(prob, cp)?;
    let check = lmmse_information_form(prob, cp)?;
    if (&theta - &check).norm() > 1e-6 * theta.norm().max(check.norm()).max(f64::MIN_POSITIVE) {
        return Err(Error::Singular("lmmse cross-check"));
    }
    Ok(theta)
}

pub fn lmmse_covariance_form<T: Scalar>(
    prob: &BatchProblem<T>,
    cp: &CovParams,
) -> Result<DVector<T>> {
    let r = data_covariance(prob, cp)?;
    let w = solve_hpd(r, prob.y(), "data covariance")?;
    let mut theta = prob.hmat.adjoint() * w;
    for (i, v) in theta.iter_mut().enumerate() {
        *v = v.scale(cp.pdiag[i]);
    }
    Ok(theta)
}

pub fn lmmse_information_form<T: Scalar>(
    prob: &BatchProblem<T>,
    cp: &CovParams,
) -> Result<DVector<T>> {
    check_dims(prob, cp)?;
    let mut info = prob.hmat.adjoint() * &prob.hmat;
    for i in 0..prob.p() {
        info[(i, i)] += T::from_real(cp.sigma2 / cp.pdiag[i]);
    }
    let rhs = prob.hmat.adjoint() * prob.y();
    solve_hpd(info, &rhs, "information matrix")
}

/// `(y*R⁻¹y, tr R)`
fn quadratic_and_trace<T: Scalar>(prob: &BatchProblem<T>, cp: &CovParams) -> Result<(f64, f64)> {
    let r = data_covariance(prob, cp)?;
    let trace = r.diagonal().iter().map(|v| v.real()).sum();
    let w = solve_hpd(r, prob.y(), "data covariance")?;
    Ok((prob.y().dotc(&w).real(), trace))
}

/// `J(φ) = y*R⁻¹y + tr R`, the cost left after concentrating θ out of the
/// augmented LMMSE problem.
pub fn concentrated_cost<T: Scalar>(prob: &BatchProblem<T>, cp: &CovParams) -> Result<f64> {
    let (quad, trace) = quadratic_and_trace(prob, cp)?;
    Ok(quad + trace)
}

/// `J′(φ) = y*R⁻¹y + ‖y‖⁻²·tr R`, the covariance-matching criterion up to an
/// additive constant and a positive factor.
pub fn covmatch_cost<T: Scalar>(prob: &BatchProblem<T>, cp: &CovParams) -> Result<f64> {
    let (quad, trace) = quadratic_and_trace(prob, cp)?;
    Ok(quad + trace / prob.y().norm_squared())
}

/// `‖R^{-1/2}(yy* − R)‖²_F`, with `R^{-1/2}` from an eigendecomposition.
pub fn covmatch_frobenius<T: Scalar>(prob: &BatchProblem<T>, cp: &CovParams) -> Result<f64> {
    let r = data_covariance(prob, cp)?;
    let eig = r.clone().symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| l <= 0.0) {
        return Err(Error::Singular("data covariance"));
    }
    let inv_sqrt = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues
            .iter()
            .map(|&l| T::from_real(1.0 / l.sqrt())),
    );
    let u = &eig.eigenvectors;
    let r_inv_sqrt = u * DMatrix::from_diagonal(&inv_sqrt) * u.adjoint();
    let outer = prob.y() * prob.y().adjoint();
    Ok((r_inv_sqrt * (outer - r)).norm_squared())
}
