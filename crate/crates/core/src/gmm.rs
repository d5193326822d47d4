//! Gaussian mixtures over the intensity axis.

use crate::histogram::{DynamicRange, Histogram, LEVELS};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Smallest standard deviation a component may have, in intensity levels.
pub const SIGMA_FLOOR: f64 = 0.5;

/// Relative overshoot of the summed weights over the source mass that a
/// model tolerates.
pub const WEIGHT_SLACK: f64 = 0.05;

/// Normal density with mean `mu` and standard deviation `sigma` at `x`.
pub fn gaussian_pdf(x: f64, mu: f64, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidSigma(sigma));
    }
    Ok(pdf(x, mu, sigma))
}

#[inline]
pub(crate) fn pdf(x: f64, mu: f64, sigma: f64) -> f64 {
    let z = (x - mu) / sigma;
    (-0.5 * z * z).exp() / (sigma * (2.0 * PI).sqrt())
}

/// One scaled Gaussian: the weight is in pixel-count units, i.e. the area
/// the component occupies in the histogram.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianComponent {
    pub mu: f64,
    pub sigma: f64,
    pub weight: f64,
}

impl GaussianComponent {
    pub fn new(mu: f64, sigma: f64, weight: f64) -> Result<Self> {
        let c = Self { mu, sigma, weight };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=255.0).contains(&self.mu) {
            return Err(Error::InvalidMean(self.mu));
        }
        if !(self.sigma >= SIGMA_FLOOR && self.sigma.is_finite()) {
            return Err(Error::InvalidSigma(self.sigma));
        }
        if !(self.weight > 0.0 && self.weight.is_finite()) {
            return Err(Error::InvalidWeight(self.weight));
        }
        Ok(())
    }

    /// `weight * N(x | mu, sigma^2)`.
    pub fn value_at(&self, x: f64) -> f64 {
        self.weight * pdf(x, self.mu, self.sigma)
    }
}

/// Components in extraction order together with the fit's coverage target
/// and the mass of the histogram they were fitted to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmmModel {
    pub components: Vec<GaussianComponent>,
    pub alpha: f64,
    pub source_total: f64,
}

impl GmmModel {
    pub fn new(alpha: f64, source_total: f64) -> Self {
        Self {
            components: Vec::new(),
            alpha,
            source_total,
        }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.components.iter().map(|c| c.weight).sum()
    }

    /// The first `k` components (all of them if `k` exceeds the length).
    pub fn truncated(&self, k: usize) -> Self {
        Self {
            components: self.components[..k.min(self.len())].to_vec(),
            alpha: self.alpha,
            source_total: self.source_total,
        }
    }

    /// Mixture value at intensity `level`.
    pub fn evaluate(&self, level: usize) -> f64 {
        let x = level as f64;
        self.components.iter().map(|c| c.value_at(x)).sum()
    }

    /// Mixture sampled at every intensity level.
    pub fn sample(&self) -> [f64; LEVELS] {
        std::array::from_fn(|i| self.evaluate(i))
    }

    /// Sum of squared differences between `h` and the mixture over all bins.
    pub fn residual_sse(&self, h: &Histogram) -> f64 {
        h.bins()
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let d = v - self.evaluate(i);
                d * d
            })
            .sum()
    }

    pub fn validate(&self) -> Result<()> {
        for c in &self.components {
            c.validate()?;
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidParam {
                name: "alpha",
                value: self.alpha.to_string(),
                expected: "a value in (0, 1]",
            });
        }
        if self.total_weight() > self.source_total * (1.0 + WEIGHT_SLACK) {
            return Err(Error::InvalidWeight(self.total_weight()));
        }
        Ok(())
    }
}

/// Serialized form of a fitted model, written by `gmmce fit`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmmDump {
    pub alpha: f64,
    pub source_total: f64,
    pub lo: u8,
    pub hi: u8,
    pub components: Vec<GaussianComponent>,
}

impl GmmDump {
    pub fn new(model: &GmmModel, range: DynamicRange) -> Self {
        Self {
            alpha: model.alpha,
            source_total: model.source_total,
            lo: range.lo,
            hi: range.hi,
            components: model.components.clone(),
        }
    }

    pub fn model(&self) -> GmmModel {
        GmmModel {
            components: self.components.clone(),
            alpha: self.alpha,
            source_total: self.source_total,
        }
    }

    pub fn range(&self) -> Option<DynamicRange> {
        DynamicRange::new(self.lo, self.hi)
    }

    /// Pretty-printed JSON. Floats use the shortest representation that
    /// parses back to the identical value.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("dump is always serializable")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}
