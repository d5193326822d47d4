//! Broadening of a fitted mixture over the full intensity range and the
//! histogram-matching lookup table that realizes it.

use crate::fitting::{fit_gmm, FitParams};
use crate::gmm::{pdf, GmmModel, SIGMA_FLOOR};
use crate::histogram::{DynamicRange, Histogram, LEVELS};
use crate::image_io::GrayImage;
use crate::{Error, Result};
use std::fmt::Write as _;

const MAX_LEVEL: f64 = (LEVELS - 1) as f64;

/// Monotone 256-entry intensity mapping.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Lut {
    table: [u8; LEVELS],
}

impl Lut {
    pub fn identity() -> Self {
        Self {
            table: std::array::from_fn(|i| i as u8),
        }
    }

    /// Wraps `table`, rejecting tables that decrease anywhere.
    pub fn from_table(table: [u8; LEVELS]) -> Option<Self> {
        let lut = Self { table };
        lut.is_monotone().then_some(lut)
    }

    pub fn table(&self) -> &[u8; LEVELS] {
        &self.table
    }

    pub fn is_monotone(&self) -> bool {
        self.table.windows(2).all(|w| w[0] <= w[1])
    }

    pub fn map(&self, level: u8) -> u8 {
        self.table[level as usize]
    }

    /// CSV with header `input,output` and one row per level.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("input,output\n");
        for (i, v) in self.table.iter().enumerate() {
            let _ = writeln!(out, "{i},{v}");
        }
        out
    }
}

fn check_range(range: DynamicRange) -> Result<f64> {
    if range.is_degenerate() {
        return Err(Error::DegenerateRange {
            lo: range.lo,
            hi: range.hi,
        });
    }
    Ok(f64::from(range.width()))
}

/// Means spread linearly so that `lo` lands on 0 and `hi` on 255. Means
/// outside the range are clamped into it first.
pub fn diffuse_means(model: &GmmModel, range: DynamicRange) -> Result<Vec<f64>> {
    let width = check_range(range)?;
    let (lo, hi) = (f64::from(range.lo), f64::from(range.hi));
    Ok(model
        .components
        .iter()
        .map(|c| (c.mu.clamp(lo, hi) - lo) / width * MAX_LEVEL)
        .collect())
}

/// Standard deviations scaled by `256 / (hi - lo)`.
pub fn stretch_variances(model: &GmmModel, range: DynamicRange) -> Result<Vec<f64>> {
    let width = check_range(range)?;
    Ok(model
        .components
        .iter()
        .map(|c| c.sigma * LEVELS as f64 / width)
        .collect())
}

/// Samples `sum_j weights[j] * N(I | means[j], sigmas[j]^2)` at every level.
/// Mass falling outside [0, 255] is dropped.
pub fn build_target_histogram(means: &[f64], sigmas: &[f64], weights: &[f64]) -> Result<Histogram> {
    if means.len() != sigmas.len() || means.len() != weights.len() {
        return Err(Error::LengthMismatch(format!(
            "{} means, {} sigmas, {} weights",
            means.len(),
            sigmas.len(),
            weights.len()
        )));
    }
    if let Some(&s) = sigmas
        .iter()
        .find(|s| !(**s >= SIGMA_FLOOR && s.is_finite()))
    {
        return Err(Error::InvalidSigma(s));
    }
    if let Some(&w) = weights.iter().find(|w| !(**w >= 0.0 && w.is_finite())) {
        return Err(Error::InvalidWeight(w));
    }
    if let Some(&m) = means.iter().find(|m| !m.is_finite()) {
        return Err(Error::InvalidMean(m));
    }
    let bins = std::array::from_fn(|i| {
        let x = i as f64;
        means
            .iter()
            .zip(sigmas)
            .zip(weights)
            .map(|((&m, &s), &w)| w * pdf(x, m, s))
            .sum()
    });
    Histogram::from_bins(bins)
}

fn check_cdf(cdf: &[f64; LEVELS], which: &'static str) -> Result<()> {
    let in_unit = cdf.iter().all(|v| (0.0..=1.0).contains(v));
    let monotone = cdf.windows(2).all(|w| w[0] <= w[1]);
    if in_unit && monotone {
        Ok(())
    } else {
        Err(Error::InvalidCdf { which })
    }
}

/// For each source level, the smallest destination level whose CDF reaches
/// the source CDF.
pub fn histogram_match(cdf_src: &[f64; LEVELS], cdf_dst: &[f64; LEVELS]) -> Result<Lut> {
    check_cdf(cdf_src, "source")?;
    check_cdf(cdf_dst, "destination")?;
    let mut table = [0u8; LEVELS];
    // Both sequences are sorted, so one forward sweep suffices.
    let mut g2 = 0;
    for (slot, &target) in table.iter_mut().zip(cdf_src) {
        while g2 < LEVELS - 1 && cdf_dst[g2] < target {
            g2 += 1;
        }
        *slot = g2 as u8;
    }
    Ok(Lut { table })
}

/// Maps every pixel through `lut`.
pub fn apply_lut(image: &GrayImage, lut: &Lut) -> GrayImage {
    image.map(|p| lut.map(p))
}

/// Output of [`enhance`].
#[derive(Debug, Clone, PartialEq)]
pub struct Enhancement {
    pub image: GrayImage,
    /// Empty when the input was passed through unchanged.
    pub model: GmmModel,
    pub lut: Lut,
    pub range: DynamicRange,
    pub target: Option<Histogram>,
}

impl Enhancement {
    /// True when the input had no usable dynamic range and was returned as is.
    pub fn bypassed(&self) -> bool {
        self.model.is_empty()
    }
}

/// Full enhancement: fit, broaden, match, remap.
///
/// Images whose significant dynamic range is a single level come back
/// unchanged with an empty model and the identity table.
pub fn enhance(image: &GrayImage, params: &FitParams) -> Result<Enhancement> {
    params.validate()?;
    let hist = Histogram::of_image(image);
    let range = hist.dynamic_range(params.significance)?;
    let passthrough = |model: GmmModel| Enhancement {
        image: image.clone(),
        model,
        lut: Lut::identity(),
        range,
        target: None,
    };
    if range.is_degenerate() {
        return Ok(passthrough(GmmModel::new(params.alpha, hist.total())));
    }
    let model = fit_gmm(&hist, params)?;
    if model.is_empty() {
        return Ok(passthrough(model));
    }
    let means = diffuse_means(&model, range)?;
    let sigmas = stretch_variances(&model, range)?;
    let weights: Vec<f64> = model.components.iter().map(|c| c.weight).collect();
    let target = build_target_histogram(&means, &sigmas, &weights)?;
    let lut = histogram_match(&hist.cdf()?, &target.cdf()?)?;
    Ok(Enhancement {
        image: apply_lut(image, &lut),
        model,
        lut,
        range,
        target: Some(target),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gmm::GaussianComponent;
    use proptest::prelude::*;

    fn model_with_means(mus: &[f64]) -> GmmModel {
        GmmModel {
            components: mus
                .iter()
                .map(|&mu| GaussianComponent::new(mu, 3.0, 10.0).unwrap())
                .collect(),
            alpha: 0.95,
            source_total: 1e6,
        }
    }

    #[test]
    fn diffusion_endpoints() {
        let range = DynamicRange::new(40, 140).unwrap();
        let m = model_with_means(&[40.0, 140.0, 90.0, 10.0, 200.0]);
        assert_eq!(
            diffuse_means(&m, range).unwrap(),
            vec![0.0, 255.0, 127.5, 0.0, 255.0]
        );
        assert_eq!(
            diffuse_means(&m, DynamicRange::new(7, 7).unwrap()),
            Err(Error::DegenerateRange { lo: 7, hi: 7 })
        );
    }

    #[test]
    fn stretch_factors() {
        let mut m = model_with_means(&[100.0]);
        assert_eq!(
            stretch_variances(&m, DynamicRange::new(100, 164).unwrap()).unwrap(),
            vec![12.0]
        );
        m.components[0].sigma = 5.0;
        assert_eq!(
            stretch_variances(&m, DynamicRange::new(0, 128).unwrap()).unwrap(),
            vec![10.0]
        );
        let s = stretch_variances(&m, DynamicRange::new(0, 255).unwrap()).unwrap();
        assert!(s[0] >= 5.0 * 256.0 / 255.0);
        assert!(stretch_variances(&m, DynamicRange::new(3, 3).unwrap()).is_err());
    }

    #[test]
    fn target_histogram_shape() {
        let h = build_target_histogram(&[127.5], &[40.0], &[1e4]).unwrap();
        assert_eq!(h.get(127), h.get(128));
        assert!((h.get(100) - h.get(155)).abs() < 1e-12 * h.get(100));

        let a = build_target_histogram(&[60.0], &[8.0], &[300.0]).unwrap();
        let b = build_target_histogram(&[190.0], &[20.0], &[700.0]).unwrap();
        let ab = build_target_histogram(&[60.0, 190.0], &[8.0, 20.0], &[300.0, 700.0]).unwrap();
        for i in 0..LEVELS {
            assert!((ab.get(i) - (a.get(i) + b.get(i))).abs() <= 1e-12 * ab.get(i).max(1e-300));
        }

        assert!(matches!(
            build_target_histogram(&[1.0, 2.0], &[1.0], &[1.0, 1.0]),
            Err(Error::LengthMismatch(_))
        ));
        assert!(build_target_histogram(&[1.0], &[0.1], &[1.0]).is_err());
    }

    #[test]
    fn matching_identity_and_step() {
        let ramp: [f64; LEVELS] = std::array::from_fn(|i| (i as f64 + 1.0) / 256.0);
        assert_eq!(histogram_match(&ramp, &ramp).unwrap(), Lut::identity());

        let step: [f64; LEVELS] = std::array::from_fn(|i| if i >= 100 { 1.0 } else { 0.0 });
        let lut = histogram_match(&step, &ramp).unwrap();
        let mut distinct = lut.table().to_vec();
        distinct.dedup();
        assert!(distinct.len() <= 2);

        let mut bad = ramp;
        bad[10] = 0.9;
        assert_eq!(
            histogram_match(&bad, &ramp),
            Err(Error::InvalidCdf { which: "source" })
        );
        assert_eq!(
            histogram_match(&ramp, &bad),
            Err(Error::InvalidCdf {
                which: "destination"
            })
        );
    }

    #[test]
    fn apply_examples() {
        let img = GrayImage::new(3, 1, vec![0, 100, 255]).unwrap();
        assert_eq!(apply_lut(&img, &Lut::identity()), img);
        let constant = Lut::from_table([9; LEVELS]).unwrap();
        assert_eq!(apply_lut(&img, &constant).pixels(), &[9, 9, 9]);
        assert!(Lut::from_table(std::array::from_fn(|i| 255 - i as u8)).is_none());
    }

    #[test]
    fn lut_csv_layout() {
        let csv = Lut::identity().to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines.len(), 257);
        assert_eq!(lines[0], "input,output");
        assert_eq!(lines[256], "255,255");
    }

    #[test]
    fn constant_image_passes_through() {
        let img = GrayImage::filled(7, 5, 93).unwrap();
        let out = enhance(&img, &FitParams::default()).unwrap();
        assert!(out.bypassed());
        assert_eq!(out.image, img);
        assert_eq!(out.lut, Lut::identity());
    }

    fn cdf_strategy() -> impl Strategy<Value = [f64; LEVELS]> {
        proptest::collection::vec(prop_oneof![Just(0.0), 0.0f64..100.0], LEVELS).prop_map(|v| {
            let mut bins: [f64; LEVELS] = v.try_into().unwrap();
            bins[0] += 1.0;
            Histogram::from_bins(bins).unwrap().cdf().unwrap()
        })
    }

    proptest! {
        #[test]
        fn matching_is_monotone(src in cdf_strategy(), dst in cdf_strategy()) {
            prop_assert!(histogram_match(&src, &dst).unwrap().is_monotone());
        }

        #[test]
        fn diffusion_preserves_order(mus in proptest::collection::vec(0.0f64..=255.0, 1..8),
                                     lo in 0u8..255, span in 1u8..=255) {
            let hi = lo.saturating_add(span);
            prop_assume!(hi > lo);
            let m = model_with_means(&mus);
            let out = diffuse_means(&m, DynamicRange::new(lo, hi).unwrap()).unwrap();
            for i in 0..mus.len() {
                prop_assert!((0.0..=255.0).contains(&out[i]));
                for j in 0..mus.len() {
                    if mus[i] < mus[j] {
                        prop_assert!(out[i] <= out[j]);
                    }
                }
            }
        }
    }
}
