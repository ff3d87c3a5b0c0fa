//! Laplacian pyramid with a 5-tap binomial kernel and clamped borders.

use crate::error::{Error, Result};
use crate::grid::{Grid, Image};

const TAPS: [f64; 5] = [1.0 / 16.0, 4.0 / 16.0, 6.0 / 16.0, 4.0 / 16.0, 1.0 / 16.0];

/// Band-pass levels ordered coarse to fine, plus the low-pass residual.
#[derive(Clone, Debug, PartialEq)]
pub struct Pyramid {
    pub bands: Vec<Image>,
    pub residual: Image,
}

impl Pyramid {
    pub fn level_count(&self) -> usize {
        self.bands.len()
    }

    /// Dimensions of the finest band, i.e. of the source image.
    pub fn dims(&self) -> (usize, usize) {
        self.bands.last().map_or(self.residual.dims(), |b| b.dims())
    }
}

fn clamp_index(i: isize, n: usize) -> usize {
    i.clamp(0, n as isize - 1) as usize
}

fn blur_rows(img: &Image) -> Image {
    let w = img.width();
    Grid::from_fn(w, img.height(), |r, c| {
        TAPS.iter()
            .enumerate()
            .map(|(t, &k)| k * img.get(r, clamp_index(c as isize + t as isize - 2, w)))
            .sum()
    })
}

fn blur_cols(img: &Image) -> Image {
    let h = img.height();
    Grid::from_fn(img.width(), h, |r, c| {
        TAPS.iter()
            .enumerate()
            .map(|(t, &k)| k * img.get(clamp_index(r as isize + t as isize - 2, h), c))
            .sum()
    })
}

/// Blur then keep even rows and columns.
pub fn reduce(img: &Image) -> Image {
    let b = blur_cols(&blur_rows(img));
    Grid::from_fn(img.width().div_ceil(2), img.height().div_ceil(2), |r, c| {
        *b.get(2 * r, 2 * c)
    })
}

/// One-dimensional expansion weights: output `x` draws from the coarse
/// samples `k` with `|x - 2k| <= 2`, out-of-range `k` clamped.
fn expand_taps(x: usize, coarse_len: usize) -> impl Iterator<Item = (usize, f64)> {
    let lo = (x as isize - 2 + 1).div_euclid(2);
    let hi = (x as isize + 2).div_euclid(2);
    (lo..=hi).filter_map(move |k| {
        let t = x as isize - 2 * k + 2;
        (0..5)
            .contains(&t)
            .then(|| (clamp_index(k, coarse_len), 2.0 * TAPS[t as usize]))
    })
}

/// Upsample `img` to `width × height`; constants are preserved.
pub fn expand(img: &Image, width: usize, height: usize) -> Image {
    let rows: Image = Grid::from_fn(width, img.height(), |r, x| {
        expand_taps(x, img.width())
            .map(|(k, w)| w * *img.get(r, k))
            .sum::<f64>()
    });
    Grid::from_fn(width, height, |y, c| {
        expand_taps(y, rows.height())
            .map(|(k, w)| w * *rows.get(k, c))
            .sum::<f64>()
    })
}

pub fn pyramid_decompose(image: &Image, level_count: usize) -> Result<Pyramid> {
    if level_count == 0 {
        return Err(Error::InvalidParameter("level_count must be >= 1".into()));
    }
    let min_side = 1usize
        .checked_shl(level_count as u32)
        .filter(|_| level_count < usize::BITS as usize)
        .ok_or_else(|| Error::InvalidParameter(format!("level_count {level_count} too large")))?;
    if image.width() < min_side || image.height() < min_side {
        return Err(Error::ImageTooSmall(format!(
            "{}x{} image for {level_count} levels needs sides >= {min_side}",
            image.width(),
            image.height()
        )));
    }
    let mut bands = Vec::with_capacity(level_count);
    let mut current = image.clone();
    for _ in 0..level_count {
        let next = reduce(&current);
        let up = expand(&next, current.width(), current.height());
        let band = Grid::from_vec(
            current.width(),
            current.height(),
            current
                .as_slice()
                .iter()
                .zip(up.as_slice())
                .map(|(a, b)| a - b)
                .collect(),
        )?;
        bands.push(band);
        current = next;
    }
    bands.reverse();
    Ok(Pyramid {
        bands,
        residual: current,
    })
}

/// Collapse the pyramid and clamp to [0, 1].
pub fn pyramid_reconstruct(pyr: &Pyramid) -> Result<Image> {
    let mut current = pyr.residual.clone();
    for band in &pyr.bands {
        let (w, h) = band.dims();
        if current.width() != w.div_ceil(2) || current.height() != h.div_ceil(2) {
            return Err(Error::DimensionMismatch(format!(
                "level {}x{} cannot expand to {w}x{h}",
                current.width(),
                current.height()
            )));
        }
        let up = expand(&current, w, h);
        current = Grid::from_vec(
            w,
            h,
            band.as_slice()
                .iter()
                .zip(up.as_slice())
                .map(|(a, b)| a + b)
                .collect(),
        )?;
    }
    Ok(current.map(|&v| v.clamp(0.0, 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(w: usize, h: usize) -> Image {
        Grid::from_fn(w, h, |r, c| ((r * 7 + c * 3) % 11) as f64 / 10.0)
    }

    #[test]
    fn constant_image_has_zero_bands() {
        let img = Grid::filled(20, 12, 0.375);
        let p = pyramid_decompose(&img, 3).unwrap();
        for b in &p.bands {
            assert!(b.as_slice().iter().all(|&v| v.abs() < 1e-15));
        }
        assert!(p
            .residual
            .as_slice()
            .iter()
            .all(|&v| (v - 0.375).abs() < 1e-15));
        assert_eq!(p.residual.dims(), (3, 2));
    }

    #[test]
    fn round_trip_odd_sizes() {
        for (w, h) in [(17, 9), (32, 32), (8, 21)] {
            let img = ramp(w, h);
            let p = pyramid_decompose(&img, 3).unwrap();
            assert_eq!(p.dims(), (w, h));
            let back = pyramid_reconstruct(&p).unwrap();
            for (a, b) in back.as_slice().iter().zip(img.as_slice()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn too_small() {
        assert!(matches!(
            pyramid_decompose(&ramp(7, 16), 3),
            Err(Error::ImageTooSmall(_))
        ));
        assert!(pyramid_decompose(&ramp(8, 8), 0).is_err());
    }

    #[test]
    fn expand_preserves_constants() {
        let e = expand(&Grid::filled(3, 2, 2.0), 6, 4);
        assert!(e.as_slice().iter().all(|&v| (v - 2.0).abs() < 1e-15));
        let e = expand(&Grid::filled(3, 3, 1.0), 5, 5);
        assert!(e.as_slice().iter().all(|&v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn inconsistent_levels_rejected() {
        let mut p = pyramid_decompose(&ramp(16, 16), 2).unwrap();
        p.residual = Grid::filled(3, 3, 0.0);
        assert!(matches!(
            pyramid_reconstruct(&p),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
