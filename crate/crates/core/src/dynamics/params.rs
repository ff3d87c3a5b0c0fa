use super::kernel::{InactivationMode, InactivationProfile, Kernel, MAX_RADIUS};
use crate::error::{Error, Result};

fn non_negative(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be >= 0, got {v}"
        )))
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be > 0, got {v}"
        )))
    }
}

fn at_least_one_iteration(iterations: usize) -> Result<()> {
    if iterations == 0 {
        Err(Error::InvalidParameter("iterations must be >= 1".into()))
    } else {
        Ok(())
    }
}

/// Random-coupled network parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct RcnnParams {
    /// Link strength.
    pub beta: f64,
    /// Link amplitude on the internal activity.
    pub v_u: f64,
    /// Decay of the internal activity.
    pub alpha_u: f64,
    /// Decay of the dynamic threshold.
    pub alpha_theta: f64,
    /// Threshold jump after a spike.
    pub v_theta: f64,
    pub kernel_radius: usize,
    /// Std of the Gaussian link weights.
    pub sigma_g: f64,
    /// Std of the inactivation law.
    pub sigma_d: f64,
    pub inactivation_mode: InactivationMode,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for RcnnParams {
    fn default() -> Self {
        Self {
            beta: 0.4,
            v_u: 1.0,
            alpha_u: 0.5,
            alpha_theta: 0.2,
            v_theta: 20.0,
            kernel_radius: 4,
            sigma_g: 4.0,
            sigma_d: 5.0,
            inactivation_mode: InactivationMode::DistanceIncreasing,
            iterations: 40,
            seed: 0,
        }
    }
}

impl RcnnParams {
    /// Preset for spike-train demos: long runs and a stronger link so that
    /// slow stimulus changes break the neurons' phase locking.
    pub fn encoding_demo() -> Self {
        Self {
            beta: 1.5,
            iterations: 1500,
            ..Self::default()
        }
    }

    /// Preset for ignition-map segmentation. A small threshold step makes
    /// firing counts roughly proportional to the stimulus, and the stronger
    /// link lets regions pull their neighbors along.
    pub fn segmentation() -> Self {
        Self {
            beta: 2.0,
            alpha_u: 1.0,
            v_theta: 2.0,
            ..Self::default()
        }
    }

    /// Preset for 1×L pulse lattices. Only the middle kernel row couples
    /// along a single row, so the link needs a large gain before firing
    /// feeds back on itself; the slow decays give fine rate resolution.
    pub fn pulse_shape() -> Self {
        Self {
            beta: 804.0,
            alpha_u: 0.064,
            alpha_theta: 0.06,
            v_theta: 9.58,
            iterations: 500,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        non_negative("beta", self.beta)?;
        non_negative("v_u", self.v_u)?;
        positive("alpha_u", self.alpha_u)?;
        positive("alpha_theta", self.alpha_theta)?;
        positive("v_theta", self.v_theta)?;
        positive("sigma_g", self.sigma_g)?;
        positive("sigma_d", self.sigma_d)?;
        if self.kernel_radius == 0 || self.kernel_radius > MAX_RADIUS {
            return Err(Error::InvalidParameter(format!(
                "kernel_radius must be in 1..={MAX_RADIUS}, got {}",
                self.kernel_radius
            )));
        }
        at_least_one_iteration(self.iterations)
    }

    pub fn kernel(&self) -> Result<Kernel> {
        Kernel::gaussian(self.kernel_radius, self.sigma_g)
    }

    pub fn profile(&self) -> Result<InactivationProfile> {
        InactivationProfile::new(self.kernel_radius, self.sigma_d, self.inactivation_mode)
    }

    pub(crate) fn coefficients(&self) -> Coefficients {
        Coefficients {
            beta_v: self.beta * self.v_u,
            decay_u: (-self.alpha_u).exp(),
            decay_theta: (-self.alpha_theta).exp(),
            v_theta: self.v_theta,
        }
    }
}

/// Simplified PCNN parameters: a fixed link matrix and no inactivation.
#[derive(Clone, Debug, PartialEq)]
pub struct SpcnnParams {
    pub beta: f64,
    pub v_u: f64,
    pub alpha_u: f64,
    pub alpha_theta: f64,
    pub v_theta: f64,
    pub weights: Kernel,
    pub iterations: usize,
}

impl Default for SpcnnParams {
    fn default() -> Self {
        let r = RcnnParams::default();
        Self {
            beta: r.beta,
            v_u: r.v_u,
            alpha_u: r.alpha_u,
            alpha_theta: r.alpha_theta,
            v_theta: r.v_theta,
            weights: Kernel::spcnn(),
            iterations: r.iterations,
        }
    }
}

impl SpcnnParams {
    pub fn validate(&self) -> Result<()> {
        non_negative("beta", self.beta)?;
        non_negative("v_u", self.v_u)?;
        positive("alpha_u", self.alpha_u)?;
        positive("alpha_theta", self.alpha_theta)?;
        positive("v_theta", self.v_theta)?;
        at_least_one_iteration(self.iterations)
    }
}

/// Full five-field PCNN parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct PcnnParams {
    pub beta: f64,
    pub v_f: f64,
    pub v_l: f64,
    pub v_theta: f64,
    pub alpha_f: f64,
    pub alpha_l: f64,
    pub alpha_theta: f64,
    /// Feedback weights (M).
    pub feed_kernel: Kernel,
    /// Link weights (W).
    pub link_kernel: Kernel,
    pub iterations: usize,
}

impl Default for PcnnParams {
    fn default() -> Self {
        Self {
            beta: 0.2,
            v_f: 0.1,
            v_l: 0.5,
            v_theta: 20.0,
            alpha_f: 0.1,
            alpha_l: 1.0,
            alpha_theta: 0.2,
            feed_kernel: Kernel::pcnn(),
            link_kernel: Kernel::pcnn(),
            iterations: 40,
        }
    }
}

impl PcnnParams {
    pub fn validate(&self) -> Result<()> {
        non_negative("beta", self.beta)?;
        non_negative("v_f", self.v_f)?;
        non_negative("v_l", self.v_l)?;
        positive("v_theta", self.v_theta)?;
        positive("alpha_f", self.alpha_f)?;
        positive("alpha_l", self.alpha_l)?;
        positive("alpha_theta", self.alpha_theta)?;
        at_least_one_iteration(self.iterations)
    }
}

/// Precomputed per-step constants shared by the SPCNN and RCNN updates.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Coefficients {
    pub beta_v: f64,
    pub decay_u: f64,
    pub decay_theta: f64,
    pub v_theta: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        RcnnParams::default().validate().unwrap();
        SpcnnParams::default().validate().unwrap();
        PcnnParams::default().validate().unwrap();
    }

    #[test]
    fn rejects_invalid_values() {
        let p = RcnnParams {
            alpha_u: 0.0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
        let p = RcnnParams {
            kernel_radius: 0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
        let p = RcnnParams {
            iterations: 0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
        let p = PcnnParams {
            alpha_l: -1.0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
    }
}
