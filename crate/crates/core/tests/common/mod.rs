//! Random stream fixtures that keep the full `(y, h)` history for batch checks.

#![allow(dead_code)]

use olspice::{BatchProblem, Complex64, DVector, Sample, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub trait Draw: Scalar {
    fn draw(rng: &mut ChaCha8Rng) -> Self;
}

impl Draw for f64 {
    fn draw(rng: &mut ChaCha8Rng) -> Self {
        rng.sample(StandardNormal)
    }
}

impl Draw for Complex64 {
    /// Circular with unit variance.
    fn draw(rng: &mut ChaCha8Rng) -> Self {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }
}

pub fn random_vector<T: Draw>(rng: &mut ChaCha8Rng, p: usize) -> DVector<T> {
    DVector::from_fn(p, |_, _| T::draw(rng))
}

/// Sparse true parameter with `k` nonzero entries of modulus in `[1, 3]`.
pub fn sparse_theta<T: Draw>(rng: &mut ChaCha8Rng, p: usize, k: usize) -> DVector<T> {
    let mut theta = DVector::zeros(p);
    for _ in 0..k {
        let i = rng.random_range(0..p);
        let r = rng.random_range(1.0..3.0);
        theta[i] = T::draw(rng).with_modulus(r);
    }
    theta
}

/// `y = h*θ + σw` stream of length `n` with Gaussian regressors.
pub fn stream<T: Draw>(
    rng: &mut ChaCha8Rng,
    theta: &DVector<T>,
    n: usize,
    sigma: f64,
) -> Vec<Sample<T>> {
    (0..n)
        .map(|_| {
            let h: DVector<T> = random_vector(rng, theta.len());
            let y = h.dotc(theta) + T::draw(rng).scale(sigma);
            Sample::new(y, h).unwrap()
        })
        .collect()
}

/// Noise level giving the requested SNR for the given parameter energy.
pub fn sigma_for_snr(theta_energy: f64, snr_db: f64) -> f64 {
    (theta_energy / 10f64.powf(snr_db / 10.0)).sqrt()
}

pub fn problem<T: Scalar>(history: &[Sample<T>]) -> BatchProblem<T> {
    BatchProblem::from_samples(history).unwrap()
}

pub fn max_abs_diff<T: Scalar>(a: &DVector<T>, b: &DVector<T>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (*x - *y).modulus())
        .fold(0.0, f64::max)
}

pub fn rel_err<T: Scalar>(a: &DVector<T>, b: &DVector<T>) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

pub fn to_complex(s: &Sample<f64>) -> Sample<Complex64> {
    Sample::new(
        Complex64::new(s.y(), 0.0),
        s.h().map(|v| Complex64::new(v, 0.0)),
    )
    .unwrap()
}
