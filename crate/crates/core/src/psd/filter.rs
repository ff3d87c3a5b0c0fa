use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Ideal low-pass: bins whose frequency exceeds `cutoff_fraction` of the
/// sampling rate are zeroed.
pub fn fourier_lowpass(samples: &[f64], cutoff_fraction: f64) -> Result<Vec<f64>> {
    if !(cutoff_fraction > 0.0 && cutoff_fraction <= 0.5) {
        return Err(Error::InvalidParameter(format!(
            "cutoff fraction {cutoff_fraction} outside (0, 0.5]"
        )));
    }
    let n = samples.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut planner = FftPlanner::<f64>::new();
    let mut buf: Vec<Complex<f64>> = samples.iter().map(|&v| Complex::new(v, 0.0)).collect();
    planner.plan_fft_forward(n).process(&mut buf);
    for (k, c) in buf.iter_mut().enumerate() {
        let freq = k.min(n - k) as f64 / n as f64;
        if freq > cutoff_fraction {
            *c = Complex::new(0.0, 0.0);
        }
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    Ok(buf.into_iter().map(|c| c.re / n as f64).collect())
}
