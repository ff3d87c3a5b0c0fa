//! Lattice state machines and the iteration engine.

use super::kernel::{effective_weights, InactivationProfile, Kernel};
use super::link::link_field;
use super::params::{Coefficients, PcnnParams, RcnnParams, SpcnnParams};
use crate::error::{Error, Result};
use crate::grid::{Grid, StimulusField};
use crate::spikes::SpikeTrain;

/// Fields of every neuron at iteration `iteration`. `feed` and `link` are
/// only carried by full PCNN runs.
#[derive(Clone, Debug, PartialEq)]
pub struct NeuronState {
    pub u: Grid<f64>,
    pub theta: Grid<f64>,
    pub y: Grid<u8>,
    pub feed: Option<Grid<f64>>,
    pub link: Option<Grid<f64>>,
    pub iteration: usize,
}

impl NeuronState {
    /// `U = θ = Y = 0` at iteration 0.
    pub fn resting(width: usize, height: usize) -> Self {
        Self {
            u: Grid::filled(width, height, 0.0),
            theta: Grid::filled(width, height, 0.0),
            y: Grid::filled(width, height, 0),
            feed: None,
            link: None,
            iteration: 0,
        }
    }

    /// Resting state with zeroed feedback and link fields.
    pub fn resting_pcnn(width: usize, height: usize) -> Self {
        Self {
            feed: Some(Grid::filled(width, height, 0.0)),
            link: Some(Grid::filled(width, height, 0.0)),
            ..Self::resting(width, height)
        }
    }

    pub fn width(&self) -> usize {
        self.u.width()
    }

    pub fn height(&self) -> usize {
        self.u.height()
    }
}

/// Full per-iteration spike record, iteration-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpikeRaster {
    width: usize,
    height: usize,
    iterations: usize,
    bits: Vec<u8>,
}

impl SpikeRaster {
    fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            iterations: 0,
            bits: Vec::new(),
        }
    }

    fn push(&mut self, y: &Grid<u8>) {
        self.bits.extend_from_slice(y.as_slice());
        self.iterations += 1;
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn neurons(&self) -> usize {
        self.width * self.height
    }

    /// Did `neuron` (row-major index) fire at 1-based `iteration`?
    pub fn fired(&self, iteration: usize, neuron: usize) -> bool {
        assert!(iteration >= 1 && iteration <= self.iterations);
        self.bits[(iteration - 1) * self.neurons() + neuron] != 0
    }

    pub fn train(&self, neuron: usize) -> SpikeTrain {
        let fires = (1..=self.iterations)
            .filter(|&n| self.fired(n, neuron))
            .collect();
        SpikeTrain::from_sorted_unchecked(fires)
    }

    pub fn counts(&self) -> Vec<u32> {
        let n = self.neurons();
        let mut counts = vec![0u32; n];
        for frame in self.bits.chunks(n) {
            for (c, &b) in counts.iter_mut().zip(frame) {
                *c += b as u32;
            }
        }
        counts
    }
}

/// Output of a run: ignition counts and, optionally, the raster.
#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub ignition_map: Grid<u32>,
    pub spike_raster: Option<SpikeRaster>,
    pub iterations_run: usize,
}

struct Recorder {
    ignition: Grid<u32>,
    raster: Option<SpikeRaster>,
    iterations: usize,
}

impl Recorder {
    fn new(width: usize, height: usize, record_raster: bool) -> Self {
        Self {
            ignition: Grid::filled(width, height, 0),
            raster: record_raster.then(|| SpikeRaster::new(width, height)),
            iterations: 0,
        }
    }

    fn record(&mut self, y: &Grid<u8>) {
        for (c, &b) in self.ignition.as_mut_slice().iter_mut().zip(y.as_slice()) {
            *c += b as u32;
        }
        if let Some(r) = self.raster.as_mut() {
            r.push(y);
        }
        self.iterations += 1;
    }

    fn finish(self) -> RunResult {
        RunResult {
            ignition_map: self.ignition,
            spike_raster: self.raster,
            iterations_run: self.iterations,
        }
    }
}

fn check_stimulus_dims(state: &NeuronState, stimulus: &StimulusField) -> Result<()> {
    if state.width() != stimulus.width() || state.height() != stimulus.height() {
        return Err(Error::DimensionMismatch(format!(
            "state {}x{} vs stimulus {}x{}",
            state.width(),
            state.height(),
            stimulus.width(),
            stimulus.height()
        )));
    }
    Ok(())
}

/// Shared SPCNN/RCNN update given the link input of this iteration.
fn simplified_update(
    state: &NeuronState,
    stimulus: &StimulusField,
    link: &Grid<f64>,
    c: Coefficients,
) -> Result<NeuronState> {
    let iteration = state.iteration + 1;
    let n = state.u.len();
    let s = stimulus.values().as_slice();
    let l = link.as_slice();
    let (u_prev, theta_prev, y_prev) = (
        state.u.as_slice(),
        state.theta.as_slice(),
        state.y.as_slice(),
    );
    let mut u = Vec::with_capacity(n);
    let mut theta = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let th = c.decay_theta * theta_prev[i] + c.v_theta * y_prev[i] as f64;
        let ui = s[i] * (1.0 + c.beta_v * l[i]) + c.decay_u * u_prev[i];
        if !ui.is_finite() || !th.is_finite() {
            return Err(Error::NumericOverflow { iteration });
        }
        u.push(ui);
        theta.push(th);
        y.push(u8::from(ui > th));
    }
    let (w, h) = (state.width(), state.height());
    Ok(NeuronState {
        u: Grid::from_vec(w, h, u)?,
        theta: Grid::from_vec(w, h, theta)?,
        y: Grid::from_vec(w, h, y)?,
        feed: None,
        link: None,
        iteration,
    })
}

/// One RCNN iteration. `weights` must already carry this iteration's
/// inactivation mask.
///
/// The threshold is refreshed from the previous output before the
/// comparison, and a neuron fires iff `U[n] > θ[n]`.
pub fn rcnn_step(
    state: &NeuronState,
    stimulus: &StimulusField,
    weights: &Kernel,
    params: &RcnnParams,
) -> Result<NeuronState> {
    check_stimulus_dims(state, stimulus)?;
    let link = link_field(&state.y, weights);
    simplified_update(state, stimulus, &link, params.coefficients())
}

/// Run the RCNN with its Gaussian kernel and inactivation law built from
/// `params`.
pub fn run_rcnn(
    stimulus: &StimulusField,
    params: &RcnnParams,
    record_raster: bool,
) -> Result<RunResult> {
    params.validate()?;
    let kernel = params.kernel()?;
    let profile = params.profile()?;
    run_rcnn_with(stimulus, params, &kernel, &profile, record_raster)
}

/// Run the RCNN with an explicit kernel and inactivation profile. The
/// kernel-shape fields of `params` are ignored.
pub fn run_rcnn_with(
    stimulus: &StimulusField,
    params: &RcnnParams,
    kernel: &Kernel,
    profile: &InactivationProfile,
    record_raster: bool,
) -> Result<RunResult> {
    run_frames(
        |_| stimulus,
        stimulus.width(),
        stimulus.height(),
        params,
        kernel,
        profile,
        record_raster,
    )
}

/// Run the RCNN on a time-varying stimulus: iteration `n` sees
/// `frames[n - 1]`.
pub fn run_rcnn_sequence(
    frames: &[StimulusField],
    params: &RcnnParams,
    record_raster: bool,
) -> Result<RunResult> {
    params.validate()?;
    let first = frames
        .first()
        .ok_or_else(|| Error::InvalidParameter("empty frame sequence".into()))?;
    if frames.len() < params.iterations {
        return Err(Error::InvalidParameter(format!(
            "{} frames for {} iterations",
            frames.len(),
            params.iterations
        )));
    }
    if frames
        .iter()
        .any(|f| f.width() != first.width() || f.height() != first.height())
    {
        return Err(Error::DimensionMismatch("frames differ in size".into()));
    }
    let kernel = params.kernel()?;
    let profile = params.profile()?;
    run_frames(
        |n| &frames[n - 1],
        first.width(),
        first.height(),
        params,
        &kernel,
        &profile,
        record_raster,
    )
}

fn run_frames<'a>(
    frame: impl Fn(usize) -> &'a StimulusField,
    width: usize,
    height: usize,
    params: &RcnnParams,
    kernel: &Kernel,
    profile: &InactivationProfile,
    record_raster: bool,
) -> Result<RunResult> {
    params.validate()?;
    if kernel.radius() != profile.radius() {
        return Err(Error::DimensionMismatch(format!(
            "kernel radius {} vs profile radius {}",
            kernel.radius(),
            profile.radius()
        )));
    }
    let mut state = NeuronState::resting(width, height);
    let mut rec = Recorder::new(width, height, record_raster);
    for n in 1..=params.iterations {
        let mask = profile.sample(params.seed, n as u64);
        let weights = effective_weights(kernel, &mask)?;
        state = rcnn_step(&state, frame(n), &weights, params)?;
        rec.record(&state.y);
    }
    Ok(rec.finish())
}

/// One SPCNN iteration with the fixed link matrix.
pub fn spcnn_step(
    state: &NeuronState,
    stimulus: &StimulusField,
    params: &SpcnnParams,
) -> Result<NeuronState> {
    check_stimulus_dims(state, stimulus)?;
    let link = link_field(&state.y, &params.weights);
    let c = Coefficients {
        beta_v: params.beta * params.v_u,
        decay_u: (-params.alpha_u).exp(),
        decay_theta: (-params.alpha_theta).exp(),
        v_theta: params.v_theta,
    };
    simplified_update(state, stimulus, &link, c)
}

pub fn run_spcnn(
    stimulus: &StimulusField,
    params: &SpcnnParams,
    record_raster: bool,
) -> Result<RunResult> {
    params.validate()?;
    let mut state = NeuronState::resting(stimulus.width(), stimulus.height());
    let mut rec = Recorder::new(stimulus.width(), stimulus.height(), record_raster);
    for _ in 0..params.iterations {
        state = spcnn_step(&state, stimulus, params)?;
        rec.record(&state.y);
    }
    Ok(rec.finish())
}

/// One iteration of the five-field PCNN.
pub fn pcnn_step(
    state: &NeuronState,
    stimulus: &StimulusField,
    params: &PcnnParams,
) -> Result<NeuronState> {
    check_stimulus_dims(state, stimulus)?;
    let (w, h) = (state.width(), state.height());
    let zeros = Grid::filled(w, h, 0.0);
    let feed_prev = state.feed.as_ref().unwrap_or(&zeros);
    let link_prev = state.link.as_ref().unwrap_or(&zeros);
    let m = link_field(&state.y, &params.feed_kernel);
    let wl = link_field(&state.y, &params.link_kernel);

    let decay_f = (-params.alpha_f).exp();
    let decay_l = (-params.alpha_l).exp();
    let decay_theta = (-params.alpha_theta).exp();
    let iteration = state.iteration + 1;
    let s = stimulus.values().as_slice();
    let n = w * h;
    let (mut f, mut l, mut u, mut th, mut y) = (
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    );
    #[allow(clippy::needless_range_loop)]
    for i in 0..n {
        let fi = params.v_f * m.as_slice()[i] + s[i] + decay_f * feed_prev.as_slice()[i];
        let li = decay_l * link_prev.as_slice()[i] + params.v_l * wl.as_slice()[i];
        let ui = fi * (1.0 + params.beta * li);
        let ti =
            decay_theta * state.theta.as_slice()[i] + params.v_theta * state.y.as_slice()[i] as f64;
        if !(fi.is_finite() && li.is_finite() && ui.is_finite() && ti.is_finite()) {
            return Err(Error::NumericOverflow { iteration });
        }
        f.push(fi);
        l.push(li);
        u.push(ui);
        th.push(ti);
        y.push(u8::from(ui > ti));
    }
    Ok(NeuronState {
        u: Grid::from_vec(w, h, u)?,
        theta: Grid::from_vec(w, h, th)?,
        y: Grid::from_vec(w, h, y)?,
        feed: Some(Grid::from_vec(w, h, f)?),
        link: Some(Grid::from_vec(w, h, l)?),
        iteration,
    })
}

pub fn run_pcnn(
    stimulus: &StimulusField,
    params: &PcnnParams,
    record_raster: bool,
) -> Result<RunResult> {
    params.validate()?;
    let mut state = NeuronState::resting_pcnn(stimulus.width(), stimulus.height());
    let mut rec = Recorder::new(stimulus.width(), stimulus.height(), record_raster);
    for _ in 0..params.iterations {
        state = pcnn_step(&state, stimulus, params)?;
        rec.record(&state.y);
    }
    Ok(rec.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::kernel::InactivationMask;
    use crate::grid::Image;

    fn zero_field(w: usize, h: usize) -> StimulusField {
        StimulusField::unchecked(Image::filled(w, h, 0.0))
    }

    #[test]
    fn first_iteration_fires_everything_stimulated() {
        let s = StimulusField::uniform(6, 4, 1e-3).unwrap();
        let p = RcnnParams::default();
        let k = Kernel::gaussian(4, 4.0).unwrap();
        let st = rcnn_step(&NeuronState::resting(6, 4), &s, &k, &p).unwrap();
        assert!(st.y.as_slice().iter().all(|&y| y == 1));
        assert!(st.theta.as_slice().iter().all(|&t| t == 0.0));
        assert!(st.u.as_slice().iter().all(|&u| u == 1e-3));
    }

    #[test]
    fn zero_stimulus_is_a_fixed_point() {
        let s = zero_field(5, 5);
        let p = RcnnParams::default();
        let k = Kernel::gaussian(4, 4.0).unwrap();
        let mut st = NeuronState::resting(5, 5);
        for _ in 0..30 {
            st = rcnn_step(&st, &s, &k, &p).unwrap();
            assert!(st.u.as_slice().iter().all(|&v| v == 0.0));
            assert!(st.theta.as_slice().iter().all(|&v| v == 0.0));
            assert!(st.y.as_slice().iter().all(|&v| v == 0));
        }
        let sp = run_spcnn(&s, &SpcnnParams::default(), false).unwrap();
        assert!(sp.ignition_map.as_slice().iter().all(|&c| c == 0));
        let pc = run_pcnn(&s, &PcnnParams::default(), false).unwrap();
        assert!(pc.ignition_map.as_slice().iter().all(|&c| c == 0));
    }

    /// Scalar transcription of the recurrence for one uncoupled neuron.
    fn scalar_fire_times(
        s: f64,
        alpha_u: f64,
        alpha_theta: f64,
        v_theta: f64,
        n: usize,
    ) -> Vec<usize> {
        let (mut u, mut th, mut y) = (0.0f64, 0.0f64, 0.0f64);
        let mut fires = Vec::new();
        for it in 1..=n {
            th = (-alpha_theta).exp() * th + v_theta * y;
            u = s + (-alpha_u).exp() * u;
            y = if u > th { 1.0 } else { 0.0 };
            if y == 1.0 {
                fires.push(it);
            }
        }
        fires
    }

    #[test]
    fn single_neuron_matches_scalar_recurrence() {
        let p = RcnnParams {
            beta: 0.0,
            alpha_u: 0.5,
            alpha_theta: 0.2,
            v_theta: 20.0,
            iterations: 200,
            ..Default::default()
        };
        let s = StimulusField::uniform(1, 1, 1.0).unwrap();
        let run = run_rcnn(&s, &p, true).unwrap();
        let train = run.spike_raster.unwrap().train(0);
        let expect = scalar_fire_times(1.0, 0.5, 0.2, 20.0, 200);
        assert_eq!(train.fires(), expect.as_slice());
        // Hand-derived: U -> 1/(1-e^-0.5) = 2.5415, θ[n] = 20 e^{-0.2 (n-2)} first drops below it at n = 13.
        assert_eq!(&expect[..2], &[1, 13]);
    }

    #[test]
    fn raster_sums_equal_ignition_map() {
        let s =
            StimulusField::from_gray(9, 7, &(0..63).map(|i| (i * 4) as f64).collect::<Vec<_>>())
                .unwrap();
        let p = RcnnParams {
            iterations: 60,
            seed: 3,
            ..Default::default()
        };
        let run = run_rcnn(&s, &p, true).unwrap();
        let raster = run.spike_raster.as_ref().unwrap();
        assert_eq!(raster.counts(), run.ignition_map.as_slice());
        assert_eq!(run.iterations_run, 60);
        assert!(run
            .ignition_map
            .as_slice()
            .iter()
            .all(|&c| c as usize <= 60));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let s = StimulusField::uniform(4, 4, 0.5).unwrap();
        let st = NeuronState::resting(3, 4);
        let k = Kernel::gaussian(1, 1.0).unwrap();
        assert!(matches!(
            rcnn_step(&st, &s, &k, &RcnnParams::default()),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn pcnn_first_iteration_substitution() {
        let s = StimulusField::from_gray(
            3,
            3,
            &[10.0, 50.0, 90.0, 130.0, 170.0, 210.0, 250.0, 30.0, 70.0],
        )
        .unwrap();
        let p = PcnnParams {
            v_f: 0.0,
            v_l: 0.0,
            ..Default::default()
        };
        let st = pcnn_step(&NeuronState::resting_pcnn(3, 3), &s, &p).unwrap();
        assert_eq!(st.feed.as_ref().unwrap(), s.values());
        assert!(st
            .link
            .as_ref()
            .unwrap()
            .as_slice()
            .iter()
            .all(|&v| v == 0.0));
        assert_eq!(&st.u, s.values());
    }

    #[test]
    fn spcnn_weights_through_rcnn_path() {
        let s = StimulusField::from_gray(
            8,
            8,
            &(0..64).map(|i| ((i * 37) % 256) as f64).collect::<Vec<_>>(),
        )
        .unwrap();
        let rp = RcnnParams {
            iterations: 30,
            ..Default::default()
        };
        let sp = SpcnnParams {
            iterations: 30,
            ..Default::default()
        };
        let mut a = NeuronState::resting(8, 8);
        let mut b = NeuronState::resting(8, 8);
        let w = effective_weights(&Kernel::spcnn(), &InactivationMask::all_open(1)).unwrap();
        for _ in 0..30 {
            a = rcnn_step(&a, &s, &w, &rp).unwrap();
            b = spcnn_step(&b, &s, &sp).unwrap();
            assert_eq!(a, b);
        }
    }
}
