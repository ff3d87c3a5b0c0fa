//! Multiscale fusion: each source is decomposed into a Laplacian pyramid,
//! every sub-band drives its own RCNN, and each output coefficient is taken
//! from the source whose neuron fired most often.

mod metrics;
mod pyramid;

pub use metrics::{
    checkerboard, edge_strength, entropy, fusion_metrics, mutual_information, spatial_frequency,
    ssim, standard_deviation, FusionReport,
};
pub use pyramid::{expand, pyramid_decompose, pyramid_reconstruct, reduce, Pyramid};

use rayon::prelude::*;

use crate::dynamics::{run_rcnn, RcnnParams};
use crate::error::{Error, Result};
use crate::grid::{Grid, Image, StimulusField, STIMULUS_FLOOR};
use crate::rng::derive_key;

pub const DEFAULT_LEVELS: usize = 3;

/// Per pixel, the coefficient of the source with the highest ignition
/// count; the lowest source index wins ties.
pub fn fuse_subbands(bands: &[&Image], ignition_maps: &[&Grid<u32>]) -> Result<Image> {
    if bands.len() < 2 {
        return Err(Error::InvalidParameter("need at least two sources".into()));
    }
    if ignition_maps.len() != bands.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} bands vs {} ignition maps",
            bands.len(),
            ignition_maps.len()
        )));
    }
    for (b, m) in bands.iter().zip(ignition_maps) {
        bands[0].ensure_same_dims(b, "sub-band")?;
        bands[0].ensure_same_dims(m, "ignition map")?;
    }
    let (w, h) = bands[0].dims();
    let data = (0..w * h)
        .map(|i| {
            let mut best = 0;
            for s in 1..bands.len() {
                if ignition_maps[s].as_slice()[i] > ignition_maps[best].as_slice()[i] {
                    best = s;
                }
            }
            bands[best].as_slice()[i]
        })
        .collect();
    Grid::from_vec(w, h, data)
}

/// Band stimuli share one scale across sources: `|c| / max|c|`, floored.
pub fn band_stimuli(bands: &[&Image]) -> Result<Vec<StimulusField>> {
    let scale = bands.iter().map(|b| b.max_abs()).fold(0.0, f64::max);
    bands
        .iter()
        .map(|b| {
            let unit = if scale > 0.0 {
                b.map(|v| (v.abs() / scale).max(STIMULUS_FLOOR))
            } else {
                b.map(|_| STIMULUS_FLOOR)
            };
            StimulusField::new(unit)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct FusionOutput {
    pub fused: Image,
    /// Ignition maps indexed `[band][source]`, bands coarse to fine with the
    /// residual last.
    pub ignition_maps: Vec<Vec<Grid<u32>>>,
}

/// Fuse two or more equally sized images on the [0, 1] scale.
///
/// Band `b` (coarse to fine, residual last) runs with the key
/// `derive_key(params.seed, b)`, shared by all sources of that band.
pub fn rcnn_fuse(
    images: &[Image],
    params: &RcnnParams,
    level_count: usize,
) -> Result<FusionOutput> {
    if images.len() < 2 {
        return Err(Error::InvalidParameter("need at least two images".into()));
    }
    for img in images {
        images[0].ensure_same_dims(img, "fusion input")?;
    }
    params.validate()?;
    let pyramids = images
        .iter()
        .map(|img| pyramid_decompose(img, level_count))
        .collect::<Result<Vec<_>>>()?;
    let band_of = |p: &Pyramid, b: usize| -> Image {
        if b < level_count {
            p.bands[b].clone()
        } else {
            p.residual.clone()
        }
    };
    let per_band: Vec<(Image, Vec<Grid<u32>>)> = (0..=level_count)
        .into_par_iter()
        .map(|b| {
            let bands: Vec<Image> = pyramids.iter().map(|p| band_of(p, b)).collect();
            let refs: Vec<&Image> = bands.iter().collect();
            let stimuli = band_stimuli(&refs)?;
            let band_params = RcnnParams {
                seed: derive_key(params.seed, b as u64),
                ..params.clone()
            };
            let maps = stimuli
                .par_iter()
                .map(|s| run_rcnn(s, &band_params, false).map(|r| r.ignition_map))
                .collect::<Result<Vec<_>>>()?;
            let map_refs: Vec<&Grid<u32>> = maps.iter().collect();
            Ok((fuse_subbands(&refs, &map_refs)?, maps))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut ignition_maps = Vec::with_capacity(per_band.len());
    let mut fused_bands = Vec::with_capacity(level_count);
    let mut residual = None;
    for (b, (band, maps)) in per_band.into_iter().enumerate() {
        ignition_maps.push(maps);
        if b < level_count {
            fused_bands.push(band);
        } else {
            residual = Some(band);
        }
    }
    let fused = pyramid_reconstruct(&Pyramid {
        bands: fused_bands,
        residual: residual.expect("residual band is always produced"),
    })?;
    Ok(FusionOutput {
        fused,
        ignition_maps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dominant_source_wins() {
        let a = Grid::filled(4, 3, 1.0);
        let b = Grid::filled(4, 3, -2.0);
        let ma = Grid::filled(4, 3, 5u32);
        let mb = Grid::filled(4, 3, 3u32);
        assert_eq!(fuse_subbands(&[&a, &b], &[&ma, &mb]).unwrap(), a);
        assert_eq!(fuse_subbands(&[&b, &a], &[&mb, &ma]).unwrap(), a);
        // Ties go to the first source.
        assert_eq!(fuse_subbands(&[&b, &a], &[&ma, &ma]).unwrap(), b);
    }

    #[test]
    fn subband_errors() {
        let a = Grid::filled(4, 3, 1.0);
        let m = Grid::filled(4, 3, 1u32);
        assert!(fuse_subbands(&[&a], &[&m]).is_err());
        let small = Grid::filled(3, 3, 1u32);
        assert!(matches!(
            fuse_subbands(&[&a, &a], &[&m, &small]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn shared_scale() {
        let a = Grid::from_vec(2, 1, vec![0.5, -1.0]).unwrap();
        let b = Grid::from_vec(2, 1, vec![2.0, 0.0]).unwrap();
        let s = band_stimuli(&[&a, &b]).unwrap();
        assert_eq!(s[0].values().as_slice(), &[0.25, 0.5]);
        assert_eq!(s[1].values().as_slice(), &[1.0, STIMULUS_FLOOR]);
        let z = Grid::filled(2, 1, 0.0);
        let s = band_stimuli(&[&z, &z]).unwrap();
        assert!(s[0]
            .values()
            .as_slice()
            .iter()
            .all(|&v| v == STIMULUS_FLOOR));
    }

    #[test]
    fn identical_inputs_are_idempotent() {
        let img = Grid::from_fn(24, 16, |r, c| ((r * 5 + c * 9) % 13) as f64 / 12.0);
        let out = rcnn_fuse(&[img.clone(), img.clone()], &RcnnParams::default(), 2).unwrap();
        for (a, b) in out.fused.as_slice().iter().zip(img.as_slice()) {
            assert!((a - b).abs() < 1e-6);
        }
        assert_eq!(out.ignition_maps.len(), 3);
    }
}
