//! Test-only generators and brute-force oracles. Nothing here calls into the
//! library's numeric routines.
#![allow(dead_code)]

use gmmce::{read_pgm, GrayImage, Histogram};
use std::f64::consts::PI;
use std::path::PathBuf;

pub const LEVELS: usize = 256;

/// (mean, std, weight)
pub type Generator = (f64, f64, f64);

pub fn normal(x: f64, mu: f64, sigma: f64) -> f64 {
    let d = x - mu;
    (-(d * d) / (2.0 * sigma * sigma)).exp() / (2.0 * PI * sigma * sigma).sqrt()
}

/// Mixture evaluated at every integer level.
pub fn mixture_bins(components: &[Generator]) -> [f64; LEVELS] {
    let mut bins = [0.0; LEVELS];
    for (i, b) in bins.iter_mut().enumerate() {
        for &(mu, sigma, w) in components {
            *b += w * normal(i as f64, mu, sigma);
        }
    }
    bins
}

pub fn mixture_histogram(components: &[Generator]) -> Histogram {
    Histogram::from_bins(mixture_bins(components)).unwrap()
}

/// Image of `width * height` pixels whose level counts follow the mixture
/// shape (largest-remainder rounding), pixels laid out in level order.
pub fn mixture_image(components: &[Generator], width: u32, height: u32) -> GrayImage {
    let n = (width * height) as usize;
    let shape = mixture_bins(components);
    let total: f64 = shape.iter().sum();
    let exact: Vec<f64> = shape.iter().map(|v| v / total * n as f64).collect();
    let mut counts: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let mut order: Vec<usize> = (0..LEVELS).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (exact[a] - exact[a].floor(), exact[b] - exact[b].floor());
        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
    });
    let short = n - counts.iter().sum::<usize>();
    for &i in order.iter().take(short) {
        counts[i] += 1;
    }
    let pixels = counts
        .iter()
        .enumerate()
        .flat_map(|(level, &c)| std::iter::repeat_n(level as u8, c))
        .collect();
    GrayImage::new(width, height, pixels).unwrap()
}

/// Correlation score of every candidate mean against a normalized Gaussian.
pub fn mean_scores(bins: &[f64; LEVELS], sigma0: f64) -> Vec<f64> {
    (0..LEVELS)
        .map(|center| {
            (0..LEVELS)
                .map(|j| normal(j as f64, center as f64, sigma0) * bins[j])
                .sum()
        })
        .collect()
}

/// Brute-force argmax of the correlation, first index on ties.
pub fn mean_oracle(bins: &[f64; LEVELS], sigma0: f64) -> usize {
    let scores = mean_scores(bins, sigma0);
    let mut best = 0;
    for i in 1..LEVELS {
        if scores[i] > scores[best] {
            best = i;
        }
    }
    best
}

pub fn cdf_oracle(bins: &[f64]) -> Vec<f64> {
    let total: f64 = bins.iter().sum();
    let mut acc = 0.0;
    bins.iter()
        .map(|v| {
            acc += v;
            (acc / total).min(1.0)
        })
        .collect()
}

/// For each source level, scan every destination level from zero.
pub fn matching_oracle(cdf_src: &[f64], cdf_dst: &[f64]) -> Vec<u8> {
    cdf_src
        .iter()
        .map(|&s| (0..LEVELS).find(|&g| cdf_dst[g] >= s).unwrap_or(LEVELS - 1) as u8)
        .collect()
}

pub fn counts(image: &GrayImage) -> [f64; LEVELS] {
    let mut c = [0.0; LEVELS];
    for &p in image.pixels() {
        c[p as usize] += 1.0;
    }
    c
}

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub const REAL_FIXTURES: [&str; 4] = ["moon", "camera_low", "coins_low", "brick"];

pub fn load_fixture(name: &str) -> GrayImage {
    let path = fixture_dir().join(format!("{name}.pgm"));
    read_pgm(&std::fs::read(&path).unwrap()).unwrap()
}

pub const ONE: [Generator; 1] = [(128.0, 6.0, 1e5)];
pub const TWO: [Generator; 2] = [(80.0, 6.0, 5e4), (170.0, 10.0, 5e4)];
pub const THREE: [Generator; 3] = [(60.0, 8.0, 4e4), (128.0, 12.0, 3e4), (200.0, 10.0, 3e4)];
/// Two narrow populations close together, a typical low-contrast shape.
pub const NARROW_PAIR: [Generator; 2] = [(110.0, 4.0, 1.0), (140.0, 4.0, 1.0)];
