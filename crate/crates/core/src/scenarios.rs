//! Seeded stream generators for the three experiment families.
//!
//! Every trial is a pure function of `(spec, trial_index)`: the parameter
//! draw and the sample stream use separate ChaCha streams derived from the
//! spec's seed, so trials can be generated independently and in parallel.

use std::f64::consts::PI;
use std::path::Path;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::stats::Sample;
use crate::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    /// Real i.i.d. standard-normal regressors.
    IidGaussian,
    /// Real sinusoid dictionary `[cos ωᵢt, sin ωᵢt]` on a uniform grid over `[0, π)`.
    Sinusoids,
    /// Complex 2-D DFT rows at random discrete spatial frequencies.
    Sar,
}

/// Values on the support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Amplitudes {
    /// Fixed values, one per support index (deterministic θ).
    Fixed(Vec<f64>),
    /// Zero-mean unit-variance Gaussian values redrawn every trial.
    Gaussian,
}

/// Full description of a Monte Carlo scenario.
///
/// `support` holds 1-based indices. For [`ScenarioKind::Sinusoids`] they
/// index sinusoids `1..=p/2`; with zero phase, amplitude `aᵢ` lands on the
/// sine coefficient `Bᵢ`. For [`ScenarioKind::Sar`] index `k` is scene cell
/// `((k−1) / G, (k−1) mod G)` on the `G × G` grid, `p = G²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    pub p: usize,
    pub support: Vec<usize>,
    pub amplitudes: Amplitudes,
    /// `+inf` gives a noise-free stream; written as `"inf"` in text formats.
    #[serde(with = "snr_text")]
    pub snr_db: f64,
    pub n_max: usize,
    pub seed: u64,
    pub trials: usize,
}

impl ScenarioSpec {
    /// `p = 500`, `θ₁₀ = θ₂₀ = 1`, `θ₁₄₀ = 3`, 20 dB.
    pub fn iid_sparse() -> Self {
        Self {
            kind: ScenarioKind::IidGaussian,
            p: 500,
            support: vec![10, 20, 140],
            amplitudes: Amplitudes::Fixed(vec![1.0, 1.0, 3.0]),
            snr_db: 20.0,
            n_max: 10_000,
            seed: 1,
            trials: 100,
        }
    }

    /// `θ₁ = … = θ₅₀ = 1`.
    pub fn iid_dense() -> Self {
        Self {
            support: (1..=50).collect(),
            amplitudes: Amplitudes::Fixed(vec![1.0; 50]),
            ..Self::iid_sparse()
        }
    }

    /// Support of [`Self::iid_sparse`] with Gaussian values per trial.
    pub fn iid_stochastic() -> Self {
        Self {
            amplitudes: Amplitudes::Gaussian,
            ..Self::iid_sparse()
        }
    }

    /// `q = 250` sinusoids, `a₁₀ = a₂₀ = 1`, `a₁₄₀ = 3`, zero phases.
    pub fn sinusoids() -> Self {
        Self {
            kind: ScenarioKind::Sinusoids,
            n_max: 1000,
            ..Self::iid_sparse()
        }
    }

    /// 16 × 16 scene with five unit scatterers at 25 dB.
    pub fn sar_desk() -> Self {
        let g = 16;
        let cells = [(3, 4), (3, 11), (8, 8), (12, 2), (13, 13)];
        Self {
            kind: ScenarioKind::Sar,
            p: g * g,
            support: cells.iter().map(|&(x, y)| x * g + y + 1).collect(),
            amplitudes: Amplitudes::Fixed(vec![1.0; cells.len()]),
            snr_db: 25.0,
            n_max: g * g,
            seed: 1,
            trials: 20,
        }
    }

    /// 32 × 32 scene with ten unit scatterers at 25 dB.
    pub fn sar_full() -> Self {
        let g = 32;
        let cells = [
            (5, 6),
            (5, 24),
            (9, 15),
            (12, 9),
            (15, 27),
            (16, 16),
            (20, 4),
            (22, 20),
            (27, 11),
            (28, 28),
        ];
        Self {
            kind: ScenarioKind::Sar,
            p: g * g,
            support: cells.iter().map(|&(x, y)| x * g + y + 1).collect(),
            amplitudes: Amplitudes::Fixed(vec![1.0; cells.len()]),
            snr_db: 25.0,
            n_max: g * g,
            seed: 1,
            trials: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 0 {
            return Err(Error::config("p must be positive"));
        }
        if self.trials == 0 {
            return Err(Error::config("trials must be positive"));
        }
        if self.support.is_empty() {
            return Err(Error::config("support must not be empty"));
        }
        let bound = match self.kind {
            ScenarioKind::Sinusoids => {
                if !self.p.is_multiple_of(2) {
                    return Err(Error::config("sinusoid scenarios need even p = 2q"));
                }
                self.p / 2
            }
            ScenarioKind::Sar => {
                if self.grid_side().is_none() {
                    return Err(Error::config(
                        "SAR scenarios need p = G² for an integer grid side G",
                    ));
                }
                self.p
            }
            ScenarioKind::IidGaussian => self.p,
        };
        if let Some(&bad) = self.support.iter().find(|&&i| i == 0 || i > bound) {
            return Err(Error::config(format!(
                "support index {bad} outside 1..={bound}"
            )));
        }
        let mut sorted = self.support.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.support.len() {
            return Err(Error::config("support indices must be distinct"));
        }
        if let Amplitudes::Fixed(values) = &self.amplitudes {
            if values.len() != self.support.len() {
                return Err(Error::config(format!(
                    "{} amplitudes for {} support indices",
                    values.len(),
                    self.support.len()
                )));
            }
            if values.iter().any(|v| !v.is_finite()) || values.iter().all(|&v| v == 0.0) {
                return Err(Error::config("amplitudes must be finite and not all zero"));
            }
        }
        if self.snr_db.is_nan() || self.snr_db == f64::NEG_INFINITY {
            return Err(Error::config("snr_db must be a number or +inf"));
        }
        if !(self.noise_variance() >= 0.0 && self.noise_variance().is_finite()) {
            return Err(Error::config("noise variance is not finite"));
        }
        Ok(())
    }

    pub fn grid_side(&self) -> Option<usize> {
        let g = (self.p as f64).sqrt().round() as usize;
        (g * g == self.p).then_some(g)
    }

    /// `σ² = minᵢ∈S E|θᵢ|² / 10^{SNR/10}`.
    pub fn noise_variance(&self) -> f64 {
        let min_power = match &self.amplitudes {
            Amplitudes::Fixed(v) => v.iter().map(|a| a * a).fold(f64::INFINITY, f64::min),
            Amplitudes::Gaussian => 1.0,
        };
        min_power / 10f64.powf(self.snr_db / 10.0)
    }

    /// 0-based positions of the nonzero entries of θ.
    pub fn theta_support(&self) -> Vec<usize> {
        match self.kind {
            ScenarioKind::Sinusoids => self.support.iter().map(|&i| 2 * (i - 1) + 1).collect(),
            _ => self.support.iter().map(|&i| i - 1).collect(),
        }
    }

    /// Whether θ is redrawn per trial.
    pub fn is_stochastic(&self) -> bool {
        matches!(self.amplitudes, Amplitudes::Gaussian)
    }

    pub fn is_complex(&self) -> bool {
        self.kind == ScenarioKind::Sar
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let spec: Self =
            toml::from_str(s).map_err(|e| Error::config(format!("scenario TOML: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let spec: Self =
            serde_json::from_str(s).map_err(|e| Error::config(format!("scenario JSON: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    /// Reads a `.json` file as JSON and anything else as TOML.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Self::from_json_str(&text),
            _ => Self::from_toml_str(&text),
        }
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario spec serializes")
    }

    fn rng(&self, trial: usize, lane: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(2 * trial as u64 + lane);
        rng
    }

    /// Support values for `trial`: fixed, or drawn from their own stream.
    fn draw_amplitudes(&self, trial: usize) -> Vec<f64> {
        match &self.amplitudes {
            Amplitudes::Fixed(v) => v.clone(),
            Amplitudes::Gaussian => {
                let mut rng = self.rng(trial, 0);
                self.support
                    .iter()
                    .map(|_| rng.sample(StandardNormal))
                    .collect()
            }
        }
    }

    fn theta<T: Scalar>(&self, trial: usize) -> DVector<T> {
        let mut theta = DVector::zeros(self.p);
        for (&i, a) in self.theta_support().iter().zip(self.draw_amplitudes(trial)) {
            theta[i] = T::from_real(a);
        }
        theta
    }
}

/// Finite SNR values as numbers, infinity as the string `"inf"`, since JSON
/// has no infinite float.
mod snr_text {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if *v == f64::INFINITY {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Text {
        Number(f64),
        Word(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Text::deserialize(d)? {
            Text::Number(v) => Ok(v),
            Text::Word(w) if w == "inf" || w == "+inf" => Ok(f64::INFINITY),
            Text::Word(w) => Err(serde::de::Error::custom(format!(
                "snr_db: expected a number or \"inf\", got {w:?}"
            ))),
        }
    }
}

/// One Monte Carlo realization: true parameters and a lazy sample stream of
/// `n_max` samples.
pub struct Trial<T: Scalar> {
    pub theta: DVector<T>,
    pub support: Vec<usize>,
    pub noise_variance: f64,
    pub samples: Box<dyn Iterator<Item = Sample<T>> + Send>,
}

fn expect_kind(spec: &ScenarioSpec, kind: ScenarioKind) -> Result<()> {
    spec.validate()?;
    if spec.kind != kind {
        return Err(Error::config(format!(
            "expected a {kind:?} scenario, got {:?}",
            spec.kind
        )));
    }
    Ok(())
}

struct RealStream<F> {
    theta: DVector<f64>,
    noise_std: f64,
    rng: ChaCha8Rng,
    t: usize,
    n_max: usize,
    regressor: F,
}

impl<F> Iterator for RealStream<F>
where
    F: FnMut(&mut ChaCha8Rng, usize) -> DVector<f64>,
{
    type Item = Sample<f64>;

    fn next(&mut self) -> Option<Sample<f64>> {
        if self.t >= self.n_max {
            return None;
        }
        self.t += 1;
        let h = (self.regressor)(&mut self.rng, self.t);
        let noise: f64 = self.rng.sample(StandardNormal);
        let y = h.dot(&self.theta) + self.noise_std * noise;
        Some(Sample::new(y, h).expect("generated samples are finite"))
    }
}

pub fn gen_iid(spec: &ScenarioSpec, trial: usize) -> Result<Trial<f64>> {
    expect_kind(spec, ScenarioKind::IidGaussian)?;
    let p = spec.p;
    let theta = spec.theta(trial);
    let stream = RealStream {
        theta: theta.clone(),
        noise_std: spec.noise_variance().sqrt(),
        rng: spec.rng(trial, 1),
        t: 0,
        n_max: spec.n_max,
        regressor: move |rng: &mut ChaCha8Rng, _t: usize| {
            DVector::from_fn(p, |_, _| rng.sample(StandardNormal))
        },
    };
    Ok(Trial {
        theta,
        support: spec.theta_support(),
        noise_variance: spec.noise_variance(),
        samples: Box::new(stream),
    })
}

/// `ωᵢ = (i − 1)π/q`, `i = 1..=q`.
pub fn sinusoid_frequencies(q: usize) -> Vec<f64> {
    (0..q).map(|k| k as f64 * PI / q as f64).collect()
}

/// `hₜ = [cos ω₁t, sin ω₁t, …, cos ω_q t, sin ω_q t]`.
pub fn sinusoid_regressor(freqs: &[f64], t: usize) -> DVector<f64> {
    let mut h = DVector::zeros(2 * freqs.len());
    for (k, w) in freqs.iter().enumerate() {
        let (s, c) = (w * t as f64).sin_cos();
        h[2 * k] = c;
        h[2 * k + 1] = s;
    }
    h
}

pub fn gen_sinusoids(spec: &ScenarioSpec, trial: usize) -> Result<Trial<f64>> {
    expect_kind(spec, ScenarioKind::Sinusoids)?;
    let freqs = sinusoid_frequencies(spec.p / 2);
    let theta = spec.theta(trial);
    let stream = RealStream {
        theta: theta.clone(),
        noise_std: spec.noise_variance().sqrt(),
        rng: spec.rng(trial, 1),
        t: 0,
        n_max: spec.n_max,
        regressor: move |_: &mut ChaCha8Rng, t: usize| sinusoid_regressor(&freqs, t),
    };
    Ok(Trial {
        theta,
        support: spec.theta_support(),
        noise_variance: spec.noise_variance(),
        samples: Box::new(stream),
    })
}

/// Regressor for discrete spatial frequency `(k₁, k₂)/G`.
///
/// The measurement is `y = Σₚ e^{−j2π pᵀφ} θ(p) = h*θ`, so `h` holds the
/// conjugate exponentials `e^{+j2π pᵀφ}`, cell `p = (pₓ, p_y)` at index
/// `pₓ·G + p_y`.
pub fn sar_regressor(grid: usize, k1: usize, k2: usize) -> DVector<Complex64> {
    DVector::from_fn(grid * grid, |idx, _| {
        let (px, py) = (idx / grid, idx % grid);
        // reduce mod G before scaling to keep the phase argument small
        let m = (px * k1 + py * k2) % grid;
        let angle = 2.0 * PI * m as f64 / grid as f64;
        Complex64::from_polar(1.0, angle)
    })
}

struct SarStream {
    grid: usize,
    theta: DVector<Complex64>,
    noise_std: f64,
    rng: ChaCha8Rng,
    t: usize,
    n_max: usize,
}

impl Iterator for SarStream {
    type Item = Sample<Complex64>;

    fn next(&mut self) -> Option<Sample<Complex64>> {
        if self.t >= self.n_max {
            return None;
        }
        self.t += 1;
        let k1 = self.rng.random_range(0..self.grid);
        let k2 = self.rng.random_range(0..self.grid);
        let h = sar_regressor(self.grid, k1, k2);
        let (re, im): (f64, f64) = (
            self.rng.sample(StandardNormal),
            self.rng.sample(StandardNormal),
        );
        let w = Complex64::new(re, im) * (self.noise_std / 2f64.sqrt());
        let y = h.dotc(&self.theta) + w;
        Some(Sample::new(y, h).expect("generated samples are finite"))
    }
}

pub fn gen_sar(spec: &ScenarioSpec, trial: usize) -> Result<Trial<Complex64>> {
    expect_kind(spec, ScenarioKind::Sar)?;
    let grid = spec.grid_side().expect("validated");
    let theta = spec.theta(trial);
    let stream = SarStream {
        grid,
        theta: theta.clone(),
        noise_std: spec.noise_variance().sqrt(),
        rng: spec.rng(trial, 1),
        t: 0,
        n_max: spec.n_max,
    };
    Ok(Trial {
        theta,
        support: spec.theta_support(),
        noise_variance: spec.noise_variance(),
        samples: Box::new(stream),
    })
}
