//! 256-bin real-valued histograms: counting, box smoothing, CDFs and the
//! significant dynamic range.

use crate::image_io::GrayImage;
use crate::{Error, Result};
use std::fmt::Write as _;

/// Number of intensity levels of an 8-bit image.
pub const LEVELS: usize = 256;

/// Default half-width of the smoothing window (a 5-tap average).
pub const DEFAULT_SMOOTH_N: usize = 2;

/// Default fraction of the pixel count a bin must exceed to count toward
/// the dynamic range.
pub const DEFAULT_SIGNIFICANCE: f64 = 0.001;

/// Frequencies indexed by intensity. Bins are real so that smoothed and
/// partially subtracted histograms stay representable.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    bins: [f64; LEVELS],
    total: f64,
}

/// Inclusive interval `[lo, hi]` of significantly populated intensities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DynamicRange {
    pub lo: u8,
    pub hi: u8,
}

impl DynamicRange {
    pub fn new(lo: u8, hi: u8) -> Option<Self> {
        (lo <= hi).then_some(Self { lo, hi })
    }

    /// `hi - lo` in intensity levels.
    pub fn width(&self) -> u8 {
        self.hi - self.lo
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }
}

impl Default for Histogram {
    fn default() -> Self {
        Self {
            bins: [0.0; LEVELS],
            total: 0.0,
        }
    }
}

impl Histogram {
    /// Builds a histogram from raw bins; every bin must be finite and non-negative.
    pub fn from_bins(bins: [f64; LEVELS]) -> Result<Self> {
        if let Some(index) = bins.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidBin {
                index,
                value: bins[index],
            });
        }
        Ok(Self::from_valid_bins(bins))
    }

    pub(crate) fn from_valid_bins(bins: [f64; LEVELS]) -> Self {
        let total = bins.iter().sum();
        Self { bins, total }
    }

    /// Pixel counts of `image`.
    pub fn of_image(image: &GrayImage) -> Self {
        let mut counts = [0u64; LEVELS];
        for &p in image.pixels() {
            counts[p as usize] += 1;
        }
        Self::from_valid_bins(counts.map(|c| c as f64))
    }

    pub fn bins(&self) -> &[f64; LEVELS] {
        &self.bins
    }

    pub fn get(&self, level: usize) -> f64 {
        self.bins[level]
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total <= 0.0
    }

    /// Largest bin value and its index (smallest index on ties).
    pub fn peak(&self) -> (usize, f64) {
        self.bins
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, v)| {
                if v > best.1 {
                    (i, v)
                } else {
                    best
                }
            })
    }

    /// Centered moving average over `2n + 1` bins, the borders padded by
    /// replicating the first and last bins.
    pub fn smooth(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroSmoothingWidth);
        }
        let width = (2 * n + 1) as f64;
        let padded = |i: isize| self.bins[i.clamp(0, LEVELS as isize - 1) as usize];
        let mut out = [0.0; LEVELS];
        for (i, slot) in out.iter_mut().enumerate() {
            let center = i as isize;
            // Summed window by window so equal neighbourhoods give equal values.
            let sum: f64 = (-(n as isize)..=n as isize)
                .map(|k| padded(center + k))
                .sum();
            *slot = sum / width;
        }
        Ok(Self::from_valid_bins(out))
    }

    /// Normalized cumulative distribution; the last entry is exactly 1.
    pub fn cdf(&self) -> Result<[f64; LEVELS]> {
        if self.is_empty() {
            return Err(Error::EmptyHistogram);
        }
        let mut out = [0.0; LEVELS];
        let mut acc = 0.0;
        for (slot, &v) in out.iter_mut().zip(&self.bins) {
            acc += v;
            *slot = (acc / self.total).min(1.0);
        }
        out[LEVELS - 1] = 1.0;
        Ok(out)
    }

    /// First and last bins holding more than `significance * total`. Falls
    /// back to the plain non-zero support when no bin clears the threshold.
    pub fn dynamic_range(&self, significance: f64) -> Result<DynamicRange> {
        if self.is_empty() {
            return Err(Error::EmptyHistogram);
        }
        if !(0.0..1.0).contains(&significance) {
            return Err(Error::InvalidParam {
                name: "significance",
                value: significance.to_string(),
                expected: "a value in [0, 1)",
            });
        }
        let threshold = significance * self.total;
        let support = |limit: f64| {
            let lo = self.bins.iter().position(|&v| v > limit)?;
            let hi = self.bins.iter().rposition(|&v| v > limit)?;
            Some((lo, hi))
        };
        let (lo, hi) = support(threshold)
            .or_else(|| support(0.0))
            .ok_or(Error::EmptyHistogram)?;
        Ok(DynamicRange {
            lo: lo as u8,
            hi: hi as u8,
        })
    }

    /// CSV with header `intensity,frequency` and one row per level.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("intensity,frequency\n");
        for (i, v) in self.bins.iter().enumerate() {
            let _ = writeln!(out, "{i},{v}");
        }
        out
    }
}

/// Pixel-count histogram of `image`.
pub fn compute_histogram(image: &GrayImage) -> Histogram {
    Histogram::of_image(image)
}
