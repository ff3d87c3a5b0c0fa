//! Factor histograms, double-Gaussian least-squares fit and figure of merit.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub const MIN_FACTORS: usize = 50;
pub const DEFAULT_BINS: usize = 100;
/// FWHM of a Gaussian in units of σ: `2 √(2 ln 2)`.
pub const FWHM_PER_SIGMA: f64 = 2.354_820_045_030_949;

#[derive(Clone, Debug, PartialEq)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
}

impl Histogram {
    /// Equal-width bins spanning `[min, max]` of the data; the maximum
    /// lands in the last bin.
    pub fn from_values(values: &[f64], bins: usize) -> Result<Self> {
        if bins < 2 {
            return Err(Error::InvalidParameter(format!("bins {bins} < 2")));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite factor".into()));
        }
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if hi.is_nan() || lo.is_nan() || hi <= lo {
            return Err(Error::FitFailure("all factors are identical".into()));
        }
        let width = (hi - lo) / bins as f64;
        let mut counts = vec![0u64; bins];
        for &v in values {
            let b = (((v - lo) / width) as usize).min(bins - 1);
            counts[b] += 1;
        }
        Ok(Self { lo, hi, counts })
    }

    pub fn bin_width(&self) -> f64 {
        (self.hi - self.lo) / self.counts.len() as f64
    }

    pub fn center(&self, bin: usize) -> f64 {
        self.lo + (bin as f64 + 0.5) * self.bin_width()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianComponent {
    pub amplitude: f64,
    pub mean: f64,
    pub sigma: f64,
}

impl GaussianComponent {
    pub fn eval(&self, x: f64) -> f64 {
        let z = (x - self.mean) / self.sigma;
        self.amplitude * (-0.5 * z * z).exp()
    }

    pub fn fwhm(&self) -> f64 {
        FWHM_PER_SIGMA * self.sigma
    }
}

/// Two components with `first.mean < second.mean`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DoubleGaussian {
    pub first: GaussianComponent,
    pub second: GaussianComponent,
}

impl DoubleGaussian {
    pub fn fom(&self) -> f64 {
        (self.second.mean - self.first.mean).abs() / (self.first.fwhm() + self.second.fwhm())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiscriminationResult {
    pub factors: Vec<f64>,
    pub histogram: Histogram,
    pub fit: DoubleGaussian,
    pub fom: f64,
}

fn smoothed(counts: &[u64]) -> Vec<f64> {
    let n = counts.len() as isize;
    (0..n)
        .map(|i| {
            let (mut s, mut k) = (0.0, 0.0);
            for j in (i - 2).max(0)..=(i + 2).min(n - 1) {
                s += counts[j as usize] as f64;
                k += 1.0;
            }
            s / k
        })
        .collect()
}

/// The two highest local maxima of the smoothed histogram that are at
/// least `min_sep` bins apart.
fn two_peaks(counts: &[u64]) -> Option<(usize, usize)> {
    let s = smoothed(counts);
    let n = s.len();
    let mut maxima: Vec<usize> = (0..n)
        .filter(|&i| s[i] > 0.0 && (i == 0 || s[i] >= s[i - 1]) && (i + 1 == n || s[i] > s[i + 1]))
        .collect();
    maxima.sort_by(|&a, &b| s[b].total_cmp(&s[a]).then(a.cmp(&b)));
    let min_sep = (n / 20).max(2);
    let first = *maxima.first()?;
    let second = maxima
        .iter()
        .copied()
        .find(|&j| j.abs_diff(first) >= min_sep)?;
    Some((first.min(second), first.max(second)))
}

fn model(p: &[f64; 6], x: f64) -> f64 {
    let g = |a: f64, m: f64, s: f64| a * (-0.5 * ((x - m) / s).powi(2)).exp();
    g(p[0], p[1], p[2]) + g(p[3], p[4], p[5])
}

fn cost(p: &[f64; 6], xs: &[f64], ys: &[f64]) -> f64 {
    xs.iter()
        .zip(ys)
        .map(|(&x, &y)| (model(p, x) - y).powi(2))
        .sum()
}

/// Box constraints keeping both components on the histogram and wider
/// than half a bin.
#[derive(Clone, Copy)]
struct Bounds {
    lo: f64,
    hi: f64,
    min_sigma: f64,
}

impl Bounds {
    fn project(&self, p: &mut [f64; 6]) {
        for k in 0..2 {
            p[3 * k] = p[3 * k].max(0.0);
            p[3 * k + 1] = p[3 * k + 1].clamp(self.lo, self.hi);
            p[3 * k + 2] = p[3 * k + 2].abs().clamp(self.min_sigma, self.hi - self.lo);
        }
    }
}

/// Width of the peak at `i` from its half-maximum crossings, as a σ.
fn half_max_sigma(s: &[f64], i: usize, bin_width: f64) -> f64 {
    let half = 0.5 * s[i];
    let left = (0..i).rev().find(|&j| s[j] < half).map_or(i, |j| i - j);
    let right = (i + 1..s.len())
        .find(|&j| s[j] < half)
        .map_or(s.len() - 1 - i, |j| j - i);
    ((left + right) as f64 * bin_width / FWHM_PER_SIGMA).max(bin_width)
}

/// Levenberg-Marquardt on the six parameters `(A1, μ1, σ1, A2, μ2, σ2)`,
/// each step projected onto `bounds`.
fn levenberg_marquardt(
    mut p: [f64; 6],
    xs: &[f64],
    ys: &[f64],
    bounds: Bounds,
) -> Result<[f64; 6]> {
    let n = xs.len();
    let mut lambda = 1e-3;
    let mut c = cost(&p, xs, ys);
    for _ in 0..500 {
        let mut jac = DMatrix::<f64>::zeros(n, 6);
        let mut resid = DVector::<f64>::zeros(n);
        for (i, &x) in xs.iter().enumerate() {
            for k in 0..2 {
                let (a, m, s) = (p[3 * k], p[3 * k + 1], p[3 * k + 2]);
                let d = x - m;
                let e = (-0.5 * (d / s).powi(2)).exp();
                jac[(i, 3 * k)] = e;
                jac[(i, 3 * k + 1)] = a * e * d / (s * s);
                jac[(i, 3 * k + 2)] = a * e * d * d / (s * s * s);
            }
            resid[i] = ys[i] - model(&p, x);
        }
        let jtj = jac.transpose() * &jac;
        let jtr = jac.transpose() * resid;
        let mut improved = false;
        while lambda < 1e12 {
            let mut a = jtj.clone();
            for d in 0..6 {
                a[(d, d)] += lambda * jtj[(d, d)].max(1e-12);
            }
            let Some(step) = a.lu().solve(&jtr) else {
                lambda *= 10.0;
                continue;
            };
            let mut trial = p;
            for d in 0..6 {
                trial[d] += step[d];
            }
            bounds.project(&mut trial);
            let tc = cost(&trial, xs, ys);
            if tc.is_finite() && tc < c {
                let rel = (c - tc) / c.max(f64::MIN_POSITIVE);
                p = trial;
                c = tc;
                lambda = (lambda / 10.0).max(1e-12);
                improved = true;
                if rel < 1e-12 {
                    return Ok(p);
                }
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            return Ok(p);
        }
    }
    Ok(p)
}

/// Histogram the factors, fit two Gaussians and report
/// `|μ2 − μ1| / (FWHM1 + FWHM2)`.
pub fn fit_fom(factors: &[f64], bins: usize) -> Result<DiscriminationResult> {
    if factors.len() < MIN_FACTORS {
        return Err(Error::InvalidParameter(format!(
            "{} factors, need at least {MIN_FACTORS}",
            factors.len()
        )));
    }
    let histogram = Histogram::from_values(factors, bins)?;
    let (i, j) = two_peaks(&histogram.counts)
        .ok_or_else(|| Error::FitFailure("histogram has a single mode".into()))?;
    let xs: Vec<f64> = (0..bins).map(|b| histogram.center(b)).collect();
    let ys: Vec<f64> = histogram.counts.iter().map(|&c| c as f64).collect();
    let w = histogram.bin_width();
    let s = smoothed(&histogram.counts);
    let bounds = Bounds {
        lo: histogram.lo,
        hi: histogram.hi,
        min_sigma: 0.5 * w,
    };
    let mut start = [
        ys[i].max(1.0),
        xs[i],
        half_max_sigma(&s, i, w),
        ys[j].max(1.0),
        xs[j],
        half_max_sigma(&s, j, w),
    ];
    bounds.project(&mut start);
    let p = levenberg_marquardt(start, &xs, &ys, bounds)?;
    if p.iter().any(|v| !v.is_finite()) {
        return Err(Error::FitFailure("fit diverged".into()));
    }
    let mut comps = [
        GaussianComponent {
            amplitude: p[0],
            mean: p[1],
            sigma: p[2].abs(),
        },
        GaussianComponent {
            amplitude: p[3],
            mean: p[4],
            sigma: p[5].abs(),
        },
    ];
    if comps
        .iter()
        .any(|c| c.sigma.is_nan() || c.sigma <= 0.0 || c.amplitude.is_nan() || c.amplitude <= 0.0)
    {
        return Err(Error::FitFailure("degenerate component".into()));
    }
    if comps[0].mean == comps[1].mean {
        return Err(Error::FitFailure("components share a mean".into()));
    }
    comps.sort_by(|a, b| a.mean.total_cmp(&b.mean));
    let fit = DoubleGaussian {
        first: comps[0],
        second: comps[1],
    };
    Ok(DiscriminationResult {
        factors: factors.to_vec(),
        histogram,
        fom: fit.fom(),
        fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn mixture(seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Normal::new(0.20, 0.01).unwrap();
        let b = Normal::new(0.30, 0.01).unwrap();
        (0..5000)
            .map(|i| {
                if i % 2 == 0 {
                    a.sample(&mut rng)
                } else {
                    b.sample(&mut rng)
                }
            })
            .collect()
    }

    #[test]
    fn known_mixture_fom() {
        let want = 0.10 / (2.0 * FWHM_PER_SIGMA * 0.01);
        let r = fit_fom(&mixture(1), DEFAULT_BINS).unwrap();
        assert!(((r.fom - want) / want).abs() < 0.05, "{} vs {want}", r.fom);
        assert!((r.fit.first.mean - 0.2).abs() < 0.002);
        assert!((r.fit.second.mean - 0.3).abs() < 0.002);
    }

    #[test]
    fn order_free() {
        let v = mixture(2);
        let mut rev = v.clone();
        rev.reverse();
        assert_eq!(fit_fom(&v, 80).unwrap().fom, fit_fom(&rev, 80).unwrap().fom);
    }

    #[test]
    fn identical_factors_fail() {
        assert!(matches!(
            fit_fom(&[0.3; 100], 50),
            Err(Error::FitFailure(_))
        ));
        assert!(fit_fom(&[0.3; 10], 50).is_err());
    }

    #[test]
    fn unimodal_fails() {
        let v: Vec<f64> = (0..1000).map(|i| (i / 20) as f64).collect();
        // Flat histogram: no separated pair of local maxima.
        let r = fit_fom(&v, 50);
        assert!(matches!(r, Err(Error::FitFailure(_))), "{r:?}");
    }

    #[test]
    fn histogram_edges() {
        let h = Histogram::from_values(&[0.0, 1.0, 0.5], 4).unwrap();
        assert_eq!(h.counts, vec![1, 0, 1, 1]);
        assert_eq!(h.center(0), 0.125);
    }
}
