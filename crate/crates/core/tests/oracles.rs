//! Straight-line reimplementations checked against the library.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rcnn_core::dynamics::{
    effective_weights, link_field, pcnn_step, InactivationProfile, Kernel, NeuronState, PcnnParams,
};
use rcnn_core::fusion::{expand, fuse_subbands, pyramid_decompose, reduce};
use rcnn_core::segmentation::{kapur_threshold_counts, otsu_threshold, GrayHistogram};
use rcnn_core::{Grid, Image, StimulusField};

fn conv_oracle(y: &Grid<u8>, k: &Kernel) -> Grid<f64> {
    let (w, h) = y.dims();
    let r = k.radius() as isize;
    let mut out = Grid::filled(w, h, 0.0);
    for row in 0..h as isize {
        for col in 0..w as isize {
            let mut acc = 0.0;
            for a in 0..k.size() {
                for b in 0..k.size() {
                    let (sr, sc) = (row + a as isize - r, col + b as isize - r);
                    if sr >= 0 && sc >= 0 && sr < h as isize && sc < w as isize {
                        acc += k.at(a, b) * f64::from(*y.get(sr as usize, sc as usize));
                    }
                }
            }
            out.set(row as usize, col as usize, acc);
        }
    }
    out
}

fn random_spikes(rng: &mut ChaCha8Rng, w: usize, h: usize, density: f64) -> Grid<u8> {
    Grid::from_fn(w, h, |_, _| u8::from(rng.random_bool(density)))
}

/// Random point-symmetric kernel with a zero center.
fn symmetric_kernel(
    rng: &mut ChaCha8Rng,
    radius: usize,
    mut draw: impl FnMut(&mut ChaCha8Rng) -> f64,
) -> Kernel {
    let n = (2 * radius + 1).pow(2);
    let mut w = vec![0.0; n];
    for i in 0..n / 2 {
        let v = draw(rng);
        w[i] = v;
        w[n - 1 - i] = v;
    }
    Kernel::from_weights(radius, w).unwrap()
}

#[test]
fn link_field_is_exact_on_dyadic_weights() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..40 {
        let radius = rng.random_range(1..=5);
        let (w, h) = (rng.random_range(1..24), rng.random_range(1..24));
        let k = symmetric_kernel(&mut rng, radius, |r| r.random_range(0..64) as f64 / 16.0);
        let y = random_spikes(&mut rng, w, h, 0.4);
        assert_eq!(link_field(&y, &k), conv_oracle(&y, &k));
    }
}

#[test]
fn link_field_matches_masked_gaussian_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for trial in 0..100u64 {
        let radius = rng.random_range(1..=6);
        let sigma = rng.random_range(0.5..6.0);
        let profile =
            InactivationProfile::new(radius, rng.random_range(1.0..6.0), Default::default())
                .unwrap();
        let k = effective_weights(
            &Kernel::gaussian(radius, sigma).unwrap(),
            &profile.sample(trial, 1),
        )
        .unwrap();
        let (w, h) = (rng.random_range(1..40), rng.random_range(1..40));
        let density = rng.random_range(0.05..0.9);
        let y = random_spikes(&mut rng, w, h, density);
        let got = link_field(&y, &k);
        let want = conv_oracle(&y, &k);
        for (g, o) in got.as_slice().iter().zip(want.as_slice()) {
            assert!(
                (g - o).abs() <= 1e-12 * o.abs().max(f64::MIN_POSITIVE),
                "{g} vs {o}"
            );
        }
    }
}

/// The five PCNN fields written out per pixel with their own convolution.
#[test]
fn pcnn_matches_transcribed_update() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (w, h) = (8, 8);
    let s = Grid::from_fn(w, h, |_, _| rng.random_range(0.001..1.0));
    let stim = StimulusField::new(s.clone()).unwrap();
    let p = PcnnParams::default();

    let n = w * h;
    let (mut f, mut l, mut th) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut y = Grid::filled(w, h, 0u8);
    let mut state = NeuronState::resting_pcnn(w, h);
    let mut fired = 0;
    for _ in 0..20 {
        let m = conv_oracle(&y, &p.feed_kernel);
        let wl = conv_oracle(&y, &p.link_kernel);
        let mut u = vec![0.0; n];
        let mut next = vec![0u8; n];
        for i in 0..n {
            f[i] = p.v_f * m.as_slice()[i] + s.as_slice()[i] + (-p.alpha_f).exp() * f[i];
            l[i] = (-p.alpha_l).exp() * l[i] + p.v_l * wl.as_slice()[i];
            u[i] = f[i] * (1.0 + p.beta * l[i]);
            th[i] = (-p.alpha_theta).exp() * th[i] + p.v_theta * f64::from(y.as_slice()[i]);
            next[i] = u8::from(u[i] > th[i]);
        }
        y = Grid::from_vec(w, h, next).unwrap();
        fired += y.as_slice().iter().filter(|&&b| b == 1).count();

        state = pcnn_step(&state, &stim, &p).unwrap();
        assert_eq!(state.feed.as_ref().unwrap().as_slice(), &f[..]);
        assert_eq!(state.link.as_ref().unwrap().as_slice(), &l[..]);
        assert_eq!(state.u.as_slice(), &u[..]);
        assert_eq!(state.theta.as_slice(), &th[..]);
        assert_eq!(state.y, y);
    }
    assert!(fired > n, "the run should exercise firing");
}

fn random_histogram(rng: &mut ChaCha8Rng, len: usize) -> Vec<u64> {
    let sparsity = rng.random_range(0.0..0.9);
    loop {
        let counts: Vec<u64> = (0..len)
            .map(|_| {
                if rng.random_bool(sparsity) {
                    0
                } else {
                    rng.random_range(0..40)
                }
            })
            .collect();
        if counts.iter().filter(|&&c| c > 0).count() >= 2 {
            return counts;
        }
    }
}

/// Between-class variance compared in exact integer arithmetic:
/// `P1 P2 (μ1 - μ2)² = (n2 M1 - n1 M2)² / (N² n1 n2)`.
fn otsu_oracle(counts: &[u64]) -> u8 {
    let total: u64 = counts.iter().sum();
    let moment: u64 = counts.iter().enumerate().map(|(i, &c)| i as u64 * c).sum();
    let mut best: Option<(usize, u128, u128)> = None;
    for t in 0..counts.len() - 1 {
        let n1: u64 = counts[..=t].iter().sum();
        let m1: u64 = counts[..=t]
            .iter()
            .enumerate()
            .map(|(i, &c)| i as u64 * c)
            .sum();
        let n2 = total - n1;
        if n1 == 0 || n2 == 0 {
            continue;
        }
        let diff = (n2 as i128 * m1 as i128 - n1 as i128 * (moment - m1) as i128).unsigned_abs();
        let (num, den) = (diff * diff, n1 as u128 * n2 as u128);
        if best.is_none_or(|(_, bn, bd)| num * bd > bn * den) {
            best = Some((t, num, den));
        }
    }
    best.unwrap().0 as u8
}

#[test]
fn otsu_matches_exact_exhaustive_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..1000 {
        let counts = random_histogram(&mut rng, 256);
        let t = otsu_threshold(&GrayHistogram::from_counts(counts.clone()).unwrap()).unwrap();
        assert_eq!(t, otsu_oracle(&counts), "{counts:?}");
    }
}

fn class_entropy(counts: &[u64]) -> f64 {
    let n: u64 = counts.iter().sum();
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n as f64;
            -p * p.ln()
        })
        .sum()
}

fn kapur_scores(counts: &[u64]) -> Vec<Option<f64>> {
    (0..counts.len() - 1)
        .map(|t| {
            let (lo, hi) = counts.split_at(t + 1);
            (lo.iter().any(|&c| c > 0) && hi.iter().any(|&c| c > 0))
                .then(|| class_entropy(lo) + class_entropy(hi))
        })
        .collect()
}

#[test]
fn kapur_matches_exhaustive_search() {
    // Entropies carry rounding, so two thresholds closer than `eps` count as
    // tied; the smallest member of the top group must be chosen.
    let eps = 1e-9;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..1000 {
        let len = rng.random_range(2..300);
        let counts = random_histogram(&mut rng, len);
        let scores = kapur_scores(&counts);
        let max = scores
            .iter()
            .flatten()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let want = scores
            .iter()
            .position(|s| s.is_some_and(|v| v >= max - eps))
            .unwrap();
        let got = kapur_threshold_counts(&counts).unwrap();
        assert_eq!(got, want, "{counts:?}");
    }
}

const TAPS: [f64; 5] = [1.0 / 16.0, 4.0 / 16.0, 6.0 / 16.0, 4.0 / 16.0, 1.0 / 16.0];

fn clamp(i: isize, n: usize) -> usize {
    i.clamp(0, n as isize - 1) as usize
}

/// Reduce with the full 5×5 outer-product kernel.
fn reduce_oracle(img: &Image) -> Image {
    let (w, h) = img.dims();
    Grid::from_fn(w.div_ceil(2), h.div_ceil(2), |r, c| {
        let mut acc = 0.0;
        for (i, ti) in TAPS.iter().enumerate() {
            for (j, tj) in TAPS.iter().enumerate() {
                let sr = clamp(2 * r as isize + i as isize - 2, h);
                let sc = clamp(2 * c as isize + j as isize - 2, w);
                acc += ti * tj * img.get(sr, sc);
            }
        }
        acc
    })
}

/// Expand: every coarse sample within two fine pixels contributes with
/// weight `4 t t`.
fn expand_oracle(img: &Image, w: usize, h: usize) -> Image {
    let (cw, ch) = img.dims();
    Grid::from_fn(w, h, |y, x| {
        let mut acc = 0.0;
        for k in -1..=(h as isize / 2 + 1) {
            for l in -1..=(w as isize / 2 + 1) {
                let (dy, dx) = (y as isize - 2 * k, x as isize - 2 * l);
                if dy.abs() <= 2 && dx.abs() <= 2 {
                    let wgt = 4.0 * TAPS[(dy + 2) as usize] * TAPS[(dx + 2) as usize];
                    acc += wgt * img.get(clamp(k, ch), clamp(l, cw));
                }
            }
        }
        acc
    })
}

fn max_diff(a: &Image, b: &Image) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[test]
fn pyramid_matches_two_dimensional_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let impulse = Grid::from_fn(64, 64, |r, c| f64::from(u8::from(r == 29 && c == 34)));
    let noise = Grid::from_fn(37, 50, |_, _| rng.random::<f64>());
    for img in [impulse, noise] {
        let pyr = pyramid_decompose(&img, 3).unwrap();
        let mut current = img.clone();
        for level in (0..3).rev() {
            let next = reduce_oracle(&current);
            assert!(max_diff(&reduce(&current), &next) < 1e-12);
            let up = expand_oracle(&next, current.width(), current.height());
            assert!(max_diff(&expand(&next, current.width(), current.height()), &up) < 1e-12);
            let band = Grid::from_fn(current.width(), current.height(), |r, c| {
                current.get(r, c) - up.get(r, c)
            });
            assert!(max_diff(&pyr.bands[level], &band) < 1e-9);
            current = next;
        }
        assert!(max_diff(&pyr.residual, &current) < 1e-9);
    }
}

#[test]
fn fusion_picks_per_pixel_argmax() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let (w, h) = (rng.random_range(1..20), rng.random_range(1..20));
        let bands: Vec<Image> = (0..3)
            .map(|_| Grid::from_fn(w, h, |_, _| rng.random_range(-1.0..1.0)))
            .collect();
        let maps: Vec<Grid<u32>> = (0..3)
            .map(|_| Grid::from_fn(w, h, |_, _| rng.random_range(0..4)))
            .collect();
        let fused = fuse_subbands(
            &bands.iter().collect::<Vec<_>>(),
            &maps.iter().collect::<Vec<_>>(),
        )
        .unwrap();
        for r in 0..h {
            for c in 0..w {
                let top = (0..3).map(|s| *maps[s].get(r, c)).max().unwrap();
                let pick = (0..3).find(|&s| *maps[s].get(r, c) == top).unwrap();
                assert_eq!(fused.get(r, c), bands[pick].get(r, c));
            }
        }
    }
}
