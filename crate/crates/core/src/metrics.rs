//! Summary numbers for comparing enhancements.

use crate::gmm::GmmModel;
use crate::histogram::Histogram;
use crate::image_io::GrayImage;
use crate::{Error, Result};

/// Residual of each prefix of `model` against `h`: element `k` uses the
/// first `k` components, for `k = 0..=model.len()`.
pub fn residual_curve(model: &GmmModel, h: &Histogram) -> Vec<f64> {
    (0..=model.len())
        .map(|k| model.truncated(k).residual_sse(h))
        .collect()
}

fn mean(image: &GrayImage) -> f64 {
    image.pixels().iter().map(|&p| f64::from(p)).sum::<f64>() / image.len() as f64
}

/// Absolute difference of mean intensities.
pub fn mean_brightness_error(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    if (a.width(), a.height()) != (b.width(), b.height()) {
        return Err(Error::DimensionMismatch(
            a.width(),
            a.height(),
            b.width(),
            b.height(),
        ));
    }
    Ok((mean(a) - mean(b)).abs())
}

/// Entropy of the normalized histogram, in bits.
pub fn shannon_entropy(h: &Histogram) -> Result<f64> {
    if h.is_empty() {
        return Err(Error::EmptyHistogram);
    }
    let total = h.total();
    Ok(-h
        .bins()
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| {
            let p = v / total;
            p * p.log2()
        })
        .sum::<f64>())
}
