//! Contrast enhancement of low-contrast grayscale images by Gaussian mixture
//! modelling of the intensity histogram.
//!
//! The pipeline fits a mixture greedily to the 256-bin histogram, spreads the
//! component means over the full intensity range, widens the components
//! accordingly, and maps the image onto the broadened histogram through a
//! monotone lookup table.
//!
//! ```
//! use gmmce::{enhance, FitParams, GrayImage};
//!
//! let pixels: Vec<u8> = (0..64u32).map(|i| 100 + (i % 20) as u8).collect();
//! let image = GrayImage::new(8, 8, pixels).unwrap();
//! let out = enhance(&image, &FitParams::default()).unwrap();
//! assert_eq!(out.image.width(), 8);
//! assert!(out.lut.is_monotone());
//! ```

pub mod baselines;
pub mod cli;
mod error;
pub mod fitting;
pub mod gmm;
pub mod histogram;
pub mod image_io;
pub mod metrics;
pub mod transform;

pub use baselines::histogram_equalize;
pub use error::{Error, Result};
pub use fitting::{fit_gmm, Boundaries, FitParams};
pub use gmm::{gaussian_pdf, GaussianComponent, GmmDump, GmmModel, SIGMA_FLOOR};
pub use histogram::{DynamicRange, Histogram, LEVELS};
pub use image_io::{read_pgm, write_pgm, GrayImage, PgmError};
pub use transform::{enhance, Enhancement, Lut};
