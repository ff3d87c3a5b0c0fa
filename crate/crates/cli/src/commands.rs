use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::info;
use rcnn_core::dynamics::{run_rcnn, run_rcnn_sequence, RcnnParams, SpikeRaster};
use rcnn_core::fusion::{fusion_metrics, rcnn_fuse, DEFAULT_LEVELS};
use rcnn_core::psd::{
    class_means, discrimination_factors, fit_fom, Method, PsdConfig, PsdWindow, PulseRecord,
};
use rcnn_core::segmentation::{rcnn_segment, segmentation_metrics, BinaryMask};
use rcnn_core::spikes::{
    classify_encoding, gradient_stimulus, in_video_patch, isi_statistics, synth_video_stimulus,
    Encoding, DEFAULT_BURN_IN, DEFAULT_CV_THRESHOLD,
};

use crate::config::{collect_settings, Resolver};
use crate::error::{CliError, Result};
use crate::pgm::{counts_to_gray, load_gray, load_unit_image, save_gray, save_mask};
use crate::pulses::load_pulses;
use crate::report::{write_report, Report, REPORT_FILE};
use crate::{Command, Common};

/// Collects artifacts and metrics for one command.
struct Run {
    out: PathBuf,
    report: Report,
    started: Instant,
    timing: Option<BTreeMap<String, f64>>,
}

impl Run {
    fn new(command: &str, out: &Path, timing: bool) -> Result<Self> {
        fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
        Ok(Self {
            out: out.to_path_buf(),
            report: Report {
                command: command.to_string(),
                ..Default::default()
            },
            started: Instant::now(),
            timing: timing.then(BTreeMap::new),
        })
    }

    fn artifact(&mut self, name: &str) -> PathBuf {
        self.report.artifacts.push(name.to_string());
        self.out.join(name)
    }

    fn metric(&mut self, name: &str, value: f64) {
        self.report.metrics.insert(name.to_string(), value);
    }

    fn lap(&mut self, stage: &str) {
        if let Some(t) = self.timing.as_mut() {
            t.insert(stage.to_string(), self.started.elapsed().as_secs_f64());
        }
        info!("{} done", stage);
    }

    fn finish(mut self, parameters: BTreeMap<String, serde_json::Value>) -> Result<Report> {
        self.report.parameters = parameters;
        self.report.timing = self.timing.take();
        let path = self.artifact(REPORT_FILE);
        write_report(&self.report, &path)?;
        info!("wrote {}", path.display());
        Ok(self.report)
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn execute(command: &Command, timing: bool) -> Result<Report> {
    match command {
        Command::Segment {
            input,
            truth,
            common,
        } => segment(input, truth.as_deref(), common, timing),
        Command::Fuse { inputs, common } => fuse(inputs, common, timing),
        Command::Psd { input, common } => psd(input, common, timing),
        Command::EncodeDemo { common } => encode_demo(common, timing),
    }
}

fn resolver(common: &Common) -> Result<Resolver> {
    Ok(Resolver::new(collect_settings(
        common.config.as_deref(),
        &common.set,
    )?))
}

fn segment(input: &Path, truth: Option<&Path>, common: &Common, timing: bool) -> Result<Report> {
    let mut r = resolver(common)?;
    let params = r.rcnn(RcnnParams::segmentation(), common.seed)?;
    let parameters = r.finish()?;
    let mut run = Run::new("segment", &common.out, timing)?;

    let gray = load_gray(input)?;
    let truth = truth
        .map(|p| -> Result<BinaryMask> {
            let g = load_gray(p)?;
            Ok(BinaryMask::new(g.map(|&v| u8::from(v >= 128)))?)
        })
        .transpose()?;
    run.lap("load");
    let seg = rcnn_segment(&gray, &params)?;
    run.lap("segment");

    run.metric("threshold", seg.threshold as f64);
    run.metric("flipped", f64::from(u8::from(seg.flipped)));
    run.metric(
        "foreground_fraction",
        seg.mask.foreground_count() as f64 / gray.len() as f64,
    );
    if let Some(truth) = &truth {
        let m = segmentation_metrics(&seg.mask, truth)?;
        run.metric("pa", m.pa);
        run.metric("iou", m.iou);
        run.metric("dice", m.dice);
    }
    let path = run.artifact("mask.pgm");
    save_mask(&seg.mask, &path)?;
    let path = run.artifact("ignition_map.pgm");
    save_gray(&counts_to_gray(&seg.ignition_map), &path)?;
    run.lap("write");
    run.finish(parameters)
}

fn fuse(inputs: &[PathBuf], common: &Common, timing: bool) -> Result<Report> {
    let mut r = resolver(common)?;
    let params = r.rcnn(RcnnParams::default(), common.seed)?;
    let levels: usize = r.value("levels", DEFAULT_LEVELS)?;
    let parameters = r.finish()?;
    let mut run = Run::new("fuse", &common.out, timing)?;

    let images = inputs
        .iter()
        .map(|p| load_unit_image(p))
        .collect::<Result<Vec<_>>>()?;
    run.lap("load");
    let out = rcnn_fuse(&images, &params, levels)?;
    run.lap("fuse");
    let m = fusion_metrics(&out.fused, &images)?;
    for (name, v) in [
        ("es", m.es),
        ("h", m.h),
        ("sd", m.sd),
        ("sf", m.sf),
        ("ff", m.ff),
        ("ssim", m.ssim),
    ] {
        run.metric(name, v);
    }
    run.lap("metrics");
    let path = run.artifact("fused.pgm");
    save_gray(&out.fused.to_gray_levels(), &path)?;
    run.finish(parameters)
}

fn psd(input: &Path, common: &Common, timing: bool) -> Result<Report> {
    let mut r = resolver(common)?;
    let base = PsdConfig::default();
    let method: String = r.value("method", Method::Rcnn.as_str().to_string())?;
    let method: Method = method.parse()?;
    let cfg = PsdConfig {
        cutoff_fraction: r.value("cutoff_fraction", base.cutoff_fraction)?,
        rcnn: r.rcnn(base.rcnn.clone(), common.seed)?,
        window: PsdWindow {
            delay: r.value("window_delay", base.window.delay)?,
            width: r.value("window_width", base.window.width)?,
        },
        short_gate: r.value("short_gate", base.short_gate)?,
        long_gate: r.value("long_gate", base.long_gate)?,
        bins: r.value("bins", base.bins)?,
    };
    let parameters = r.finish()?;
    let mut run = Run::new("psd", &common.out, timing)?;

    let pulses: Vec<PulseRecord> = load_pulses(input)?;
    run.lap("load");
    let factors = discrimination_factors(&pulses, method, &cfg)?;
    run.lap("factors");
    run.metric("pulses", pulses.len() as f64);
    if let Some((n, g)) = class_means(&pulses, &factors) {
        run.metric("mean_neutron", n);
        run.metric("mean_gamma", g);
    }
    let mut text = String::from("index,label,factor\n");
    for (i, (p, f)) in pulses.iter().zip(&factors).enumerate() {
        let label = p.label().map_or(String::new(), |l| l.code().to_string());
        writeln!(text, "{i},{label},{f}").expect("writing to a String");
    }
    let path = run.artifact("factors.csv");
    write_text(&path, &text)?;

    let result = fit_fom(&factors, cfg.bins)?;
    run.lap("fit");
    let fit = &result.fit;
    run.metric("fom", result.fom);
    run.metric("mu1", fit.first.mean);
    run.metric("sigma1", fit.first.sigma);
    run.metric("mu2", fit.second.mean);
    run.metric("sigma2", fit.second.sigma);
    let h = &result.histogram;
    let width = h.bin_width();
    let mut text = String::from("bin_lo,bin_hi,count,fit\n");
    for (i, &c) in h.counts.iter().enumerate() {
        let lo = h.lo + i as f64 * width;
        let fitted = fit.first.eval(h.center(i)) + fit.second.eval(h.center(i));
        writeln!(text, "{lo},{},{c},{fitted}", lo + width).expect("writing to a String");
    }
    let path = run.artifact("histogram.csv");
    write_text(&path, &text)?;
    run.finish(parameters)
}

/// Spike events as `iteration,neuron` rows, iteration-major.
fn raster_csv(raster: &SpikeRaster) -> String {
    let mut text = String::from("iteration,neuron\n");
    for n in 1..=raster.iterations() {
        for i in (0..raster.neurons()).filter(|&i| raster.fired(n, i)) {
            writeln!(text, "{n},{i}").expect("writing to a String");
        }
    }
    text
}

fn encode_demo(common: &Common, timing: bool) -> Result<Report> {
    let mut r = resolver(common)?;
    let params = r.rcnn(RcnnParams::encoding_demo(), common.seed)?;
    let size: usize = r.value("size", 16)?;
    let burn_in: usize = r.value("burn_in", DEFAULT_BURN_IN)?;
    let cv_threshold: f64 = r.value("cv_threshold", DEFAULT_CV_THRESHOLD)?;
    let stimulus: String = r.value("stimulus", "ramp".to_string())?;
    let parameters = r.finish()?;
    let mut run = Run::new("encode-demo", &common.out, timing)?;

    let result = match stimulus.as_str() {
        "ramp" => run_rcnn(&gradient_stimulus(size)?, &params, true)?,
        "video" => {
            let frames = synth_video_stimulus(size, params.iterations + 1)?;
            run_rcnn_sequence(&frames[1..], &params, true)?
        }
        other => {
            return Err(CliError::Config(format!(
                "stimulus = {other:?}: expected \"ramp\" or \"video\""
            )))
        }
    };
    run.lap("simulate");
    let raster = result.spike_raster.expect("raster was requested");
    let mut cvs = Vec::with_capacity(raster.neurons());
    let (mut periodic, mut patch, mut n_patch) = (0usize, 0.0, 0usize);
    for i in 0..raster.neurons() {
        let stats = isi_statistics(&raster.train(i), burn_in)?;
        if classify_encoding(&stats, cv_threshold) == Encoding::Periodic {
            periodic += 1;
        }
        if stimulus == "video" && in_video_patch(size, i / size, i % size) {
            patch += stats.cv;
            n_patch += 1;
        }
        cvs.push(stats.cv);
    }
    let total: f64 = cvs.iter().sum();
    run.metric("mean_cv", total / cvs.len() as f64);
    run.metric("max_cv", cvs.iter().copied().fold(0.0, f64::max));
    run.metric("periodic_fraction", periodic as f64 / cvs.len() as f64);
    run.metric(
        "spikes",
        result
            .ignition_map
            .as_slice()
            .iter()
            .map(|&c| c as f64)
            .sum(),
    );
    if n_patch > 0 {
        let rest = cvs.len() - n_patch;
        run.metric("patch_mean_cv", patch / n_patch as f64);
        run.metric("constant_mean_cv", (total - patch) / rest as f64);
    }
    let path = run.artifact("raster.csv");
    write_text(&path, &raster_csv(&raster))?;
    let path = run.artifact("ignition_map.pgm");
    save_gray(&counts_to_gray(&result.ignition_map), &path)?;
    run.lap("write");
    run.finish(parameters)
}
