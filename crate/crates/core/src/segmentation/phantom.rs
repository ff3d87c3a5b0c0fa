//! Synthetic test images with known ground-truth masks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};

use super::BinaryMask;
use crate::error::{Error, Result};
use crate::grid::Grid;

/// A centered bright disk on a dark background, both with Gaussian gray
/// noise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhantomSpec {
    pub size: usize,
    pub background_mean: f64,
    pub foreground_mean: f64,
    pub sigma: f64,
    /// Disk radius as a fraction of `size`.
    pub radius_fraction: f64,
}

impl Default for PhantomSpec {
    fn default() -> Self {
        Self {
            size: 128,
            background_mean: 64.0,
            foreground_mean: 192.0,
            sigma: 10.0,
            radius_fraction: 0.3,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Phantom {
    pub image: Grid<u8>,
    pub truth: BinaryMask,
}

fn to_level(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

pub fn two_gaussian_phantom(spec: &PhantomSpec, seed: u64) -> Result<Phantom> {
    if spec.size < 4 {
        return Err(Error::InvalidParameter(format!(
            "phantom size {} < 4",
            spec.size
        )));
    }
    if !(spec.sigma >= 0.0 && spec.sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!("sigma {}", spec.sigma)));
    }
    let n = spec.size;
    let center = (n as f64 - 1.0) / 2.0;
    let r = spec.radius_fraction * n as f64;
    let truth = BinaryMask::from_fn(n, n, |row, col| {
        let (dy, dx) = (row as f64 - center, col as f64 - center);
        dx * dx + dy * dy <= r * r
    });
    let noise = Normal::new(0.0, spec.sigma).expect("sigma validated");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let image = Grid::from_fn(n, n, |row, col| {
        let mean = if truth.is_set(row, col) {
            spec.foreground_mean
        } else {
            spec.background_mean
        };
        to_level(mean + noise.sample(&mut rng))
    });
    Ok(Phantom { image, truth })
}

/// Photon-counting noise: each pixel becomes `Poisson(rate · g) / rate`.
/// Smaller rates mean fewer counts and stronger noise.
pub fn add_poisson_noise(image: &Grid<u8>, rate: f64, seed: u64) -> Result<Grid<u8>> {
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "rate {rate} must be positive"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(image.map(|&g| {
        let lambda = rate * g as f64;
        if lambda == 0.0 {
            return 0;
        }
        let k: f64 = Poisson::new(lambda)
            .expect("positive rate")
            .sample(&mut rng);
        to_level(k / rate)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phantom_statistics() {
        let p = two_gaussian_phantom(&PhantomSpec::default(), 4).unwrap();
        let (mut fg, mut nf, mut bg, mut nb) = (0.0, 0.0, 0.0, 0.0);
        for (&g, &m) in p.image.as_slice().iter().zip(p.truth.grid().as_slice()) {
            if m == 1 {
                fg += g as f64;
                nf += 1.0;
            } else {
                bg += g as f64;
                nb += 1.0;
            }
        }
        assert!((fg / nf - 192.0).abs() < 1.0);
        assert!((bg / nb - 64.0).abs() < 1.0);
        let frac = nf / (nf + nb);
        assert!((frac - std::f64::consts::PI * 0.09).abs() < 0.01, "{frac}");
    }

    #[test]
    fn phantom_is_seeded() {
        let s = PhantomSpec::default();
        assert_eq!(
            two_gaussian_phantom(&s, 1).unwrap(),
            two_gaussian_phantom(&s, 1).unwrap()
        );
        assert_ne!(
            two_gaussian_phantom(&s, 1).unwrap(),
            two_gaussian_phantom(&s, 2).unwrap()
        );
    }

    #[test]
    fn poisson_noise_keeps_mean() {
        let img = Grid::filled(64, 64, 100u8);
        let noisy = add_poisson_noise(&img, 0.1, 9).unwrap();
        let mean = noisy.as_slice().iter().map(|&v| v as f64).sum::<f64>() / 4096.0;
        assert!((mean - 100.0).abs() < 2.0, "{mean}");
        assert!(noisy.as_slice().iter().all(|&v| v % 10 == 0));
        assert!(add_poisson_noise(&img, 0.0, 1).is_err());
    }
}
