//! Global histogram equalization, the reference method enhancements are
//! compared against.

use crate::histogram::{Histogram, LEVELS};
use crate::image_io::GrayImage;
use crate::transform::{apply_lut, Lut};

/// Table `v -> round(255 * CDF(v))`, halves rounded up.
pub fn equalization_lut(h: &Histogram) -> Lut {
    let Ok(cdf) = h.cdf() else {
        return Lut::identity();
    };
    let table = std::array::from_fn(|i| (255.0 * cdf[i]).round() as u8);
    Lut::from_table(table).expect("a CDF is non-decreasing")
}

/// Classical global histogram equalization.
pub fn histogram_equalize(image: &GrayImage) -> GrayImage {
    apply_lut(image, &equalization_lut(&Histogram::of_image(image)))
}

/// Largest fraction of pixels sharing one level.
pub fn max_bin_fraction(h: &Histogram) -> f64 {
    if h.is_empty() {
        return 0.0;
    }
    h.peak().1 / h.total()
}

/// Reference CDF of a perfectly equalized image under the
/// `round(255 * CDF)` convention: `min(1, (J + 0.5) / 255)`.
pub fn equalized_ramp(level: usize) -> f64 {
    ((level as f64 + 0.5) / (LEVELS - 1) as f64).min(1.0)
}
