//! Command-line front end.
//!
//! Exit codes: 0 success, 1 I/O or processing failure, 2 unreadable PGM,
//! 3 invalid flag value.

use crate::baselines::histogram_equalize;
use crate::fitting::{fit_gmm, FitParams};
use crate::gmm::GmmDump;
use crate::histogram::{DynamicRange, Histogram};
use crate::image_io::{read_pgm, write_pgm, GrayImage, PgmError};
use crate::metrics::{mean_brightness_error, shannon_entropy};
use crate::transform::enhance;
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_FLAG: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "gmmce",
    version,
    about = "Gaussian-mixture contrast enhancement for grayscale PGM images"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enhance an image and write the result as binary PGM.
    Enhance {
        input: PathBuf,
        output: PathBuf,
        #[command(flatten)]
        fit: FitArgs,
        /// Also write the fitted mixture as JSON.
        #[arg(long, value_name = "PATH")]
        dump_gmm: Option<PathBuf>,
        /// Also write the transfer table as CSV.
        #[arg(long, value_name = "PATH")]
        dump_lut: Option<PathBuf>,
    },
    /// Fit a mixture to the image histogram and print it as JSON.
    Fit {
        input: PathBuf,
        #[command(flatten)]
        fit: FitArgs,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Export the image histogram as CSV.
    Histogram {
        input: PathBuf,
        /// Apply a moving average of 2n+1 bins first.
        #[arg(long, value_name = "N")]
        smooth: Option<usize>,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Run the mixture method and plain equalization on each input and
    /// report entropy, brightness shift and runtime as CSV.
    Compare {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        fit: FitArgs,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone)]
struct FitArgs {
    /// Fraction of the histogram mass the mixture must cover, in (0, 1].
    #[arg(long, default_value_t = 0.95)]
    alpha: f64,
    /// Standard deviation of the mean-search kernel, in levels.
    #[arg(long, default_value_t = 2.0)]
    sigma0: f64,
    /// Half-width n of the (2n+1)-bin smoothing window.
    #[arg(long, default_value_t = 2)]
    smooth: usize,
    /// Upper limit on the number of mixture components.
    #[arg(long, default_value_t = 20)]
    max_components: usize,
    /// Bin mass fraction below which levels are ignored.
    #[arg(long, default_value_t = 0.001)]
    significance: f64,
}

impl FitArgs {
    fn params(&self) -> Result<FitParams, CliError> {
        let params = FitParams {
            alpha: self.alpha,
            sigma0: self.sigma0,
            smooth_n: self.smooth,
            max_components: self.max_components,
            significance: self.significance,
        };
        params.validate().map_err(CliError::from_param)?;
        Ok(params)
    }
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Parse { path: PathBuf, source: PgmError },
    #[error("{0}")]
    Flag(String),
    #[error("{}: {source}", path.display())]
    Processing { path: PathBuf, source: crate::Error },
    #[error("{0} of the inputs failed")]
    Partial(usize),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Processing { .. } | CliError::Partial(_) => EXIT_IO,
            CliError::Parse { .. } => EXIT_PARSE,
            CliError::Flag(_) => EXIT_FLAG,
        }
    }

    fn from_param(err: crate::Error) -> Self {
        match err {
            crate::Error::InvalidParam {
                name,
                value,
                expected,
            } => CliError::Flag(format!(
                "invalid value {value} for --{name}: expected {expected}"
            )),
            other => CliError::Flag(other.to_string()),
        }
    }
}

fn load(path: &Path) -> Result<GrayImage, CliError> {
    let bytes = std::fs::read(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })?;
    read_pgm(&bytes).map_err(|source| CliError::Parse {
        path: path.to_owned(),
        source,
    })
}

fn store(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

/// Writes to `path`, or standard output when absent.
fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => store(p, text.as_bytes()),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            }),
    }
}

fn processing(path: &Path) -> impl FnOnce(crate::Error) -> CliError + '_ {
    move |source| CliError::Processing {
        path: path.to_owned(),
        source,
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { EXIT_FLAG } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Enhance {
            input,
            output,
            fit,
            dump_gmm,
            dump_lut,
        } => cmd_enhance(
            &input,
            &output,
            &fit,
            dump_gmm.as_deref(),
            dump_lut.as_deref(),
        ),
        Command::Fit { input, fit, out } => cmd_fit(&input, &fit, out.as_deref()),
        Command::Histogram { input, smooth, out } => cmd_histogram(&input, smooth, out.as_deref()),
        Command::Compare { inputs, fit, out } => cmd_compare(&inputs, &fit, out.as_deref()),
    }
}

fn cmd_enhance(
    input: &Path,
    output: &Path,
    fit: &FitArgs,
    dump_gmm: Option<&Path>,
    dump_lut: Option<&Path>,
) -> Result<(), CliError> {
    let params = fit.params()?;
    let image = load(input)?;
    let result = enhance(&image, &params).map_err(processing(input))?;
    if result.bypassed() {
        eprintln!(
            "warning: {} has no usable dynamic range ({}..{}); written unchanged",
            input.display(),
            result.range.lo,
            result.range.hi
        );
    }
    store(output, &write_pgm(&result.image))?;
    if let Some(path) = dump_gmm {
        store(
            path,
            GmmDump::new(&result.model, result.range)
                .to_json()
                .as_bytes(),
        )?;
    }
    if let Some(path) = dump_lut {
        store(path, result.lut.to_csv().as_bytes())?;
    }
    Ok(())
}

fn cmd_fit(input: &Path, fit: &FitArgs, out: Option<&Path>) -> Result<(), CliError> {
    let params = fit.params()?;
    let image = load(input)?;
    let hist = Histogram::of_image(&image);
    let model = fit_gmm(&hist, &params).map_err(processing(input))?;
    let range: DynamicRange = hist
        .dynamic_range(params.significance)
        .map_err(processing(input))?;
    let mut json = GmmDump::new(&model, range).to_json();
    json.push('\n');
    emit(out, &json)
}

fn cmd_histogram(input: &Path, smooth: Option<usize>, out: Option<&Path>) -> Result<(), CliError> {
    if smooth == Some(0) {
        return Err(CliError::Flag(
            "invalid value 0 for --smooth: expected an integer >= 1".into(),
        ));
    }
    let image = load(input)?;
    let mut hist = Histogram::of_image(&image);
    if let Some(n) = smooth {
        hist = hist.smooth(n).map_err(processing(input))?;
    }
    emit(out, &hist.to_csv())
}

/// One line of the comparison report.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub image: String,
    pub method: &'static str,
    pub entropy_in: f64,
    pub entropy_out: f64,
    pub brightness_error: f64,
    pub runtime_ms: f64,
}

pub const COMPARE_HEADER: &str = "image,method,entropy_in,entropy_out,brightness_error,runtime_ms";

fn compare_one(path: &Path, params: &FitParams) -> Result<Vec<CompareRow>, CliError> {
    let image = load(path)?;
    let entropy_in = shannon_entropy(&Histogram::of_image(&image)).map_err(processing(path))?;

    let start = Instant::now();
    let gmm = enhance(&image, params).map_err(processing(path))?.image;
    let gmm_ms = start.elapsed().as_secs_f64() * 1e3;

    let start = Instant::now();
    let he = histogram_equalize(&image);
    let he_ms = start.elapsed().as_secs_f64() * 1e3;

    let row = |method, out: &GrayImage, runtime_ms| -> Result<CompareRow, CliError> {
        Ok(CompareRow {
            image: path.display().to_string(),
            method,
            entropy_in,
            entropy_out: shannon_entropy(&Histogram::of_image(out)).map_err(processing(path))?,
            brightness_error: mean_brightness_error(&image, out).map_err(processing(path))?,
            runtime_ms,
        })
    };
    Ok(vec![row("gmmce", &gmm, gmm_ms)?, row("he", &he, he_ms)?])
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

fn cmd_compare(inputs: &[PathBuf], fit: &FitArgs, out: Option<&Path>) -> Result<(), CliError> {
    let params = fit.params()?;
    // Collected in input order whatever the completion order.
    let results: Vec<_> = inputs
        .par_iter()
        .map(|path| compare_one(path, &params))
        .collect();

    let mut csv = String::from(COMPARE_HEADER);
    csv.push('\n');
    let mut failed = 0;
    for result in results {
        match result {
            Ok(rows) => {
                for r in rows {
                    let _ = writeln!(
                        csv,
                        "{},{},{},{},{},{}",
                        csv_field(&r.image),
                        r.method,
                        r.entropy_in,
                        r.entropy_out,
                        r.brightness_error,
                        r.runtime_ms
                    );
                }
            }
            Err(err) => {
                eprintln!("error: {err}");
                failed += 1;
            }
        }
    }
    emit(out, &csv)?;
    if failed > 0 {
        return Err(CliError::Partial(failed));
    }
    Ok(())
}
