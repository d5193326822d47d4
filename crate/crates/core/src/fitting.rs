//! Greedy extraction of Gaussian components from a histogram.
//!
//! Each round locates the dominant level by correlating the working
//! histogram with a narrow normalized Gaussian, bounds the component by the
//! nearest local minima of the smoothed histogram, estimates the spread from
//! the median of the drop-ratio inversions inside those bounds, scales the
//! component so that it cancels the histogram at its mean, and subtracts it.
//! Rounds continue until the extracted weight covers `alpha` of the mass.

use crate::gmm::{pdf, GaussianComponent, GmmModel, SIGMA_FLOOR};
use crate::histogram::{Histogram, DEFAULT_SIGNIFICANCE, DEFAULT_SMOOTH_N, LEVELS};
use crate::{Error, Result};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitParams {
    /// Fraction of the histogram mass to explain before stopping.
    pub alpha: f64,
    /// Standard deviation of the mean-search kernel, in levels.
    pub sigma0: f64,
    /// Half-width of the smoothing window.
    pub smooth_n: usize,
    /// Hard cap on the number of components.
    pub max_components: usize,
    /// Minimum bin mass, as a fraction of the total, considered significant.
    pub significance: f64,
}

impl Default for FitParams {
    fn default() -> Self {
        Self {
            alpha: 0.95,
            sigma0: 2.0,
            smooth_n: DEFAULT_SMOOTH_N,
            max_components: 20,
            significance: DEFAULT_SIGNIFICANCE,
        }
    }
}

fn invalid(name: &'static str, value: impl ToString, expected: &'static str) -> Error {
    Error::InvalidParam {
        name,
        value: value.to_string(),
        expected,
    }
}

impl FitParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(invalid("alpha", self.alpha, "a value in (0, 1]"));
        }
        if !(self.sigma0 > 0.0 && self.sigma0.is_finite()) {
            return Err(invalid("sigma0", self.sigma0, "a positive finite value"));
        }
        if self.smooth_n == 0 || self.smooth_n >= LEVELS {
            return Err(invalid("smooth", self.smooth_n, "an integer in [1, 255]"));
        }
        if self.max_components == 0 {
            return Err(invalid(
                "max-components",
                self.max_components,
                "an integer >= 1",
            ));
        }
        if !(0.0..1.0).contains(&self.significance) {
            return Err(invalid(
                "significance",
                self.significance,
                "a value in [0, 1)",
            ));
        }
        Ok(())
    }
}

/// Inclusive window `[lb, ub]` around a component's mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Boundaries {
    pub lb: usize,
    pub ub: usize,
}

/// Level whose neighbourhood correlates best with a normalized Gaussian of
/// standard deviation `sigma0`. Ties go to the lowest level.
pub fn estimate_mean(h: &Histogram, sigma0: f64) -> Result<usize> {
    if h.is_empty() {
        return Err(Error::EmptyHistogram);
    }
    if !(sigma0 > 0.0 && sigma0.is_finite()) {
        return Err(Error::InvalidSigma(sigma0));
    }
    // kernel[d + 255] = N(d | 0, sigma0^2)
    let kernel: Vec<f64> = (0..2 * LEVELS - 1)
        .map(|k| pdf(k as f64 - (LEVELS - 1) as f64, 0.0, sigma0))
        .collect();
    let bins = h.bins();
    let mut best = (0, f64::NEG_INFINITY);
    for center in 0..LEVELS {
        let offset = LEVELS - 1 - center;
        let score: f64 = bins
            .iter()
            .zip(&kernel[offset..offset + LEVELS])
            .map(|(v, k)| v * k)
            .sum();
        if score > best.1 {
            best = (center, score);
        }
    }
    Ok(best.0)
}

/// Maximal run `[start, end]` of bins equal to `bins[i]`.
fn run_around(bins: &[f64; LEVELS], i: usize) -> (usize, usize) {
    let v = bins[i];
    let mut start = i;
    while start > 0 && bins[start - 1] == v {
        start -= 1;
    }
    let mut end = i;
    while end < LEVELS - 1 && bins[end + 1] == v {
        end += 1;
    }
    (start, end)
}

/// A run is a local minimum when it is not higher than what lies on either
/// side of it (histogram ends count as walls).
fn is_minimum_run(bins: &[f64; LEVELS], (start, end): (usize, usize)) -> bool {
    let v = bins[start];
    (start == 0 || bins[start - 1] > v) && (end == LEVELS - 1 || bins[end + 1] > v)
}

/// Nearest local minima of the smoothed histogram on each side of `mu`.
/// A flat minimum resolves to its edge closest to `mu`; with no minimum on
/// a side the histogram end is used.
pub fn find_boundaries(h_s: &Histogram, mu: usize) -> Boundaries {
    let mu = mu.min(LEVELS - 1);
    let bins = h_s.bins();
    let own = run_around(bins, mu);
    if is_minimum_run(bins, own) {
        return Boundaries { lb: mu, ub: mu };
    }

    let mut lb = 0;
    let mut i = own.0;
    while i > 0 {
        let run = run_around(bins, i - 1);
        if is_minimum_run(bins, run) {
            lb = run.1;
            break;
        }
        i = run.0;
    }

    let mut ub = LEVELS - 1;
    let mut i = own.1;
    while i < LEVELS - 1 {
        let run = run_around(bins, i + 1);
        if is_minimum_run(bins, run) {
            ub = run.0;
            break;
        }
        i = run.1;
    }
    Boundaries { lb, ub }
}

/// Drop-ratio inversions `d / sqrt(2 ln(h[mu] / h[mu ± d]))` for every
/// displacement inside `b`, skipping ratios that are not finite or do not
/// exceed one.
pub fn variance_candidates(h_s: &Histogram, mu: usize, b: Boundaries) -> Result<Vec<f64>> {
    if mu >= LEVELS || b.lb > mu || b.ub < mu || b.ub >= LEVELS {
        return Err(invalid(
            "boundaries",
            format!("{b:?} around {mu}"),
            "lb <= mu <= ub <= 255",
        ));
    }
    let peak = h_s.get(mu);
    if peak <= 0.0 {
        return Err(Error::NonPositivePeak { index: mu });
    }
    let forward = (mu + 1..=b.ub).map(|i| (i - mu, h_s.get(i)));
    let backward = (b.lb..mu).rev().map(|i| (mu - i, h_s.get(i)));
    Ok(forward
        .chain(backward)
        .filter_map(|(d, v)| {
            if v <= 0.0 {
                return None;
            }
            let ratio = peak / v;
            (ratio > 1.0 && ratio.is_finite()).then(|| d as f64 / (2.0 * ratio.ln()).sqrt())
        })
        .collect())
}

fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    })
}

/// Median of the drop-ratio candidates, floored at [`SIGMA_FLOOR`].
pub fn estimate_variance(h_s: &Histogram, mu: usize, b: Boundaries) -> Result<f64> {
    let mut candidates = variance_candidates(h_s, mu, b)?;
    Ok(median(&mut candidates).map_or(SIGMA_FLOOR, |s| s.max(SIGMA_FLOOR)))
}

/// Scale that makes `weight * N(mu | mu, sigma^2)` equal the histogram at `mu`.
pub fn estimate_weight(h_s: &Histogram, mu: usize, sigma: f64) -> Result<f64> {
    if !(sigma >= SIGMA_FLOOR && sigma.is_finite()) {
        return Err(Error::InvalidSigma(sigma));
    }
    let peak = h_s.bins().get(mu).copied().unwrap_or(0.0);
    if peak <= 0.0 {
        return Err(Error::NonPositivePeak { index: mu });
    }
    Ok((2.0 * PI).sqrt() * sigma * peak)
}

/// Removes `c` from `h`, clamping bins at zero.
pub fn subtract_component(h: &Histogram, c: &GaussianComponent) -> Histogram {
    let bins = std::array::from_fn(|i| {
        let v = h.get(i);
        let rest = v - c.value_at(i as f64);
        // Rounding residue of an exact cancellation.
        if rest <= 4.0 * f64::EPSILON * v {
            0.0
        } else {
            rest
        }
    });
    Histogram::from_valid_bins(bins)
}

/// Greedy mixture fit of `h_org`.
///
/// The histogram is smoothed once; components are then extracted from the
/// smoothed working copy until their summed weight reaches
/// `alpha * h_org.total()`, `max_components` is reached, or the working
/// histogram's peak drops below `significance * h_org.total()`.
pub fn fit_gmm(h_org: &Histogram, params: &FitParams) -> Result<GmmModel> {
    params.validate()?;
    if h_org.is_empty() {
        return Err(Error::EmptyHistogram);
    }
    let total = h_org.total();
    let mut model = GmmModel::new(params.alpha, total);

    // A single occupied level has no spread to measure: one point-like component.
    let bins = h_org.bins();
    let first = bins.iter().position(|&v| v > 0.0);
    let last = bins.iter().rposition(|&v| v > 0.0);
    if let (Some(a), Some(b)) = (first, last) {
        if a == b {
            model
                .components
                .push(GaussianComponent::new(a as f64, SIGMA_FLOOR, total)?);
            return Ok(model);
        }
    }

    let mut working = h_org.smooth(params.smooth_n)?;
    let mut extracted = 0.0;
    while model.len() < params.max_components && extracted < params.alpha * total {
        let (peak_at, peak) = working.peak();
        if peak <= 0.0 || peak < params.significance * total {
            break;
        }
        let mut mu = estimate_mean(&working, params.sigma0)?;
        if working.get(mu) <= 0.0 {
            mu = peak_at;
        }
        let bounds = find_boundaries(&working, mu);
        let sigma = estimate_variance(&working, mu, bounds)?;
        let weight = estimate_weight(&working, mu, sigma)?.min(total - extracted);
        if weight <= 0.0 {
            break;
        }
        let component = GaussianComponent::new(mu as f64, sigma, weight)?;
        working = subtract_component(&working, &component);
        extracted += weight;
        model.components.push(component);
    }
    Ok(model)
}
