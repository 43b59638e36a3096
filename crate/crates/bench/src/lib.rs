//! Fixtures shared by the criterion benches.

use olspice::{Complex64, DVector, Sample};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// `n` real samples with i.i.d. Gaussian regressors and a 3-sparse θ.
pub fn real_stream(p: usize, n: usize, seed: u64) -> Vec<Sample<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut theta = DVector::zeros(p);
    for (k, v) in [(p / 10, 1.0), (p / 5, 1.0), (p / 2, 3.0)] {
        theta[k] = v;
    }
    (0..n)
        .map(|_| {
            let h = DVector::from_fn(p, |_, _| rng.sample(StandardNormal));
            let noise: f64 = rng.sample(StandardNormal);
            Sample::new(h.dot(&theta) + 0.1 * noise, h).unwrap()
        })
        .collect()
}

/// `n` complex samples with circular Gaussian regressors.
pub fn complex_stream(p: usize, n: usize, seed: u64) -> Vec<Sample<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = move || Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
    let mut theta = DVector::zeros(p);
    theta[p / 3] = Complex64::new(1.0, -1.0);
    (0..n)
        .map(|_| {
            let h = DVector::from_fn(p, |_, _| draw());
            let y = h.dotc(&theta) + draw() * 0.1;
            Sample::new(y, h).unwrap()
        })
        .collect()
}
