//! Pulse records and the synthetic scintillator pulse generator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

pub const MIN_PULSE_LEN: usize = 64;
pub const MAX_PULSE_PEAK: f64 = 1.05;

pub const RISE_NS: f64 = 5.0;
pub const FAST_NS: f64 = 30.0;
pub const SLOW_NS: f64 = 270.0;
pub const GAMMA_SLOW_FRACTION: f64 = 0.10;
pub const NEUTRON_SLOW_FRACTION: f64 = 0.25;
pub const SYNTH_SAMPLES: usize = 600;
/// Baseline samples recorded before the pulse starts.
pub const SYNTH_PRETRIGGER: usize = 32;
pub const SYNTH_PERIOD_S: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PulseLabel {
    Neutron,
    Gamma,
}

impl PulseLabel {
    pub fn slow_fraction(self) -> f64 {
        match self {
            PulseLabel::Neutron => NEUTRON_SLOW_FRACTION,
            PulseLabel::Gamma => GAMMA_SLOW_FRACTION,
        }
    }

    pub fn code(self) -> char {
        match self {
            PulseLabel::Neutron => 'n',
            PulseLabel::Gamma => 'g',
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PulseRecord {
    samples: Vec<f64>,
    sample_period: f64,
    label: Option<PulseLabel>,
}

impl PulseRecord {
    pub fn new(samples: Vec<f64>, sample_period: f64, label: Option<PulseLabel>) -> Result<Self> {
        if samples.len() < MIN_PULSE_LEN {
            return Err(Error::InvalidParameter(format!(
                "pulse has {} samples, need {MIN_PULSE_LEN}",
                samples.len()
            )));
        }
        if !(sample_period > 0.0 && sample_period.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sample period {sample_period}"
            )));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite sample".into()));
        }
        let peak = peak_value(&samples);
        if !(peak > 0.0 && peak <= MAX_PULSE_PEAK) {
            return Err(Error::InvalidParameter(format!(
                "peak {peak} outside (0, {MAX_PULSE_PEAK}]"
            )));
        }
        Ok(Self {
            samples,
            sample_period,
            label,
        })
    }

    /// Scales `samples` to unit peak before validating.
    pub fn normalized(
        samples: Vec<f64>,
        sample_period: f64,
        label: Option<PulseLabel>,
    ) -> Result<Self> {
        let peak = peak_value(&samples);
        if !(peak > 0.0 && peak.is_finite()) {
            return Err(Error::DegenerateInput(format!(
                "pulse peak {peak} is not positive"
            )));
        }
        Self::new(
            samples.into_iter().map(|v| v / peak).collect(),
            sample_period,
            label,
        )
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_period(&self) -> f64 {
        self.sample_period
    }

    pub fn label(&self) -> Option<PulseLabel> {
        self.label
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

pub(crate) fn peak_value(samples: &[f64]) -> f64 {
    samples.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Index of the first maximum.
pub fn peak_index(samples: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in samples.iter().enumerate() {
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    best.map(|(i, _)| i)
}

/// Noiseless scintillation shape at `t` ns after onset, unnormalized.
pub fn pulse_shape(t_ns: f64, slow_fraction: f64) -> f64 {
    if t_ns < 0.0 {
        return 0.0;
    }
    (1.0 - slow_fraction) * ((-t_ns / FAST_NS).exp() - (-t_ns / RISE_NS).exp())
        + slow_fraction * (-t_ns / SLOW_NS).exp()
}

/// The noiseless model sampled like the synthetic records: pretrigger
/// zeros, then one sample per nanosecond, scaled to `amplitude` at the
/// peak sample.
pub fn model_pulse(label: PulseLabel, amplitude: f64) -> Vec<f64> {
    let f = label.slow_fraction();
    let raw: Vec<f64> = (0..SYNTH_SAMPLES)
        .map(|k| pulse_shape(k as f64 - SYNTH_PRETRIGGER as f64, f))
        .collect();
    let peak = peak_value(&raw);
    raw.into_iter().map(|v| amplitude * v / peak).collect()
}

/// Balanced synthetic dataset; labels alternate Neutron, Gamma, ...
///
/// Each pulse has a uniform amplitude in [0.5, 1] and white Gaussian noise
/// of `noise_sigma`, and is then rescaled to unit peak.
pub fn synth_pulse_dataset(n: usize, noise_sigma: f64, seed: u64) -> Result<Vec<PulseRecord>> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("dataset size {n} < 2")));
    }
    if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "noise sigma {noise_sigma}"
        )));
    }
    let noise = Normal::new(0.0, noise_sigma).expect("sigma validated");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let label = if i % 2 == 0 {
                PulseLabel::Neutron
            } else {
                PulseLabel::Gamma
            };
            let amplitude = rng.random_range(0.5..=1.0);
            let samples = model_pulse(label, amplitude)
                .into_iter()
                .map(|v| v + noise.sample(&mut rng))
                .collect();
            PulseRecord::normalized(samples, SYNTH_PERIOD_S, Some(label))
        })
        .collect()
}
