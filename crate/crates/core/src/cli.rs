//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a checked property fails, 2 caps exhausted,
//! 3 bad input or usage.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use crate::algebra::Poly2;
use crate::berezin::{berezin, BerezinError};
use crate::io::{
    parse_poly, read_documents, BerezinDoc, DefectReportDoc, Document, FitReportDoc, GaugeOpDoc,
    HSeriesDoc, IoError, PoissonSeriesDoc, StarProductDoc,
};
use crate::lie::fit_lie_words;
use crate::quantize::{quantize, QuantizeConfig, QuantizeError};
use crate::starprod::{classify_p2, normalize, NormalizeConfig, StarError, StarProduct};

#[derive(Parser, Debug)]
#[command(
    name = "planestar",
    version,
    about = "Exact star products on the plane"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct Caps {
    /// Initial cap on the operator order per slot
    #[arg(long)]
    max_op_order: Option<u32>,
    /// Initial cap on coefficient degree
    #[arg(long)]
    max_deg: Option<u32>,
    /// Number of cap doublings before giving up
    #[arg(long, default_value_t = 3)]
    escalation_steps: u32,
}

impl Caps {
    fn config(&self, order: usize) -> QuantizeConfig {
        QuantizeConfig {
            order,
            max_op_order: self.max_op_order,
            max_coeff_degree: self.max_deg,
            escalation_steps: self.escalation_steps,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Quantize φ ∂x∧∂y to order N
    Quantize {
        #[arg(long)]
        phi: String,
        #[arg(long)]
        order: usize,
        #[command(flatten)]
        caps: Caps,
    },
    /// Star product of two polynomials
    StarMul {
        #[arg(long)]
        product: PathBuf,
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
    },
    /// Report the associativity defect
    AssocCheck {
        #[arg(long)]
        product: PathBuf,
    },
    /// Gauge a product into the polarized class
    Normalize {
        #[arg(long)]
        product: PathBuf,
        #[arg(long)]
        max_op_order: Option<u32>,
        #[arg(long, default_value_t = 2)]
        escalation_steps: u32,
        #[arg(long, default_value_t = 3)]
        validation_degree: u32,
    },
    /// Recover the Poisson series of a polarized product
    Classify {
        #[arg(long)]
        product: PathBuf,
        #[command(flatten)]
        caps: Caps,
    },
    /// S, density and primitive for φ
    Berezin {
        #[arg(long)]
        phi: String,
        #[arg(long)]
        order: usize,
    },
    /// Fit order k+1 against Lie-derivative words
    FitLie {
        #[arg(long)]
        k: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        samples: Vec<String>,
        #[command(flatten)]
        caps: Caps,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl ToString) -> Self {
        Failure {
            code,
            message: message.to_string(),
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::new(3, e)
    }
}

impl From<QuantizeError> for Failure {
    fn from(e: QuantizeError) -> Self {
        let code = match e {
            QuantizeError::Infeasible { .. } => 2,
            _ => 1,
        };
        Failure::new(code, e)
    }
}

impl From<StarError> for Failure {
    fn from(e: StarError) -> Self {
        match e {
            StarError::Quantize(q) => q.into(),
            StarError::Infeasible { .. } => Failure::new(2, e),
            StarError::OrderMismatch { .. } => Failure::new(3, e),
            _ => Failure::new(1, e),
        }
    }
}

impl From<BerezinError> for Failure {
    fn from(e: BerezinError) -> Self {
        match e {
            BerezinError::Quantize(q) => q.into(),
            BerezinError::ZeroPhi => Failure::new(3, e),
            _ => Failure::new(1, e),
        }
    }
}

fn poly_arg(name: &str, text: &str) -> Result<Poly2, Failure> {
    parse_poly(text).map_err(|e| Failure::new(3, format!("--{name}: {e}")))
}

fn read_product(path: &Path) -> Result<StarProduct, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::new(3, format!("{}: {e}", path.display())))?;
    let doc = read_documents(&text)?
        .into_iter()
        .find_map(|d| match d {
            Document::StarProduct(p) => Some(p),
            _ => None,
        })
        .ok_or(IoError::Missing("star_product"))?;
    Ok(doc.to_product()?)
}

fn execute(cmd: Command, out: &mut String) -> Result<i32, Failure> {
    let mut emit = |d: Document| out.push_str(&d.to_text());
    match cmd {
        Command::Quantize { phi, order, caps } => {
            let phi = poly_arg("phi", &phi)?;
            let q = quantize(&phi, &caps.config(order))?;
            emit(Document::StarProduct(StarProductDoc::from_product(
                &q.product,
            )));
            Ok(0)
        }
        Command::StarMul { product, f, g } => {
            let m = read_product(&product)?;
            let (f, g) = (poly_arg("f", &f)?, poly_arg("g", &g)?);
            emit(Document::HSeries(HSeriesDoc::from_series(
                &m.star_mul(&f, &g),
            )));
            Ok(0)
        }
        Command::AssocCheck { product } => {
            let report = DefectReportDoc::from_product(&read_product(&product)?);
            let code = if report.defects.is_empty() { 0 } else { 1 };
            emit(Document::DefectReport(report));
            Ok(code)
        }
        Command::Normalize {
            product,
            max_op_order,
            escalation_steps,
            validation_degree,
        } => {
            let m = read_product(&product)?;
            let cfg = NormalizeConfig {
                max_op_order,
                escalation_steps,
                validation_degree,
                ..NormalizeConfig::default()
            };
            let n = normalize(&m, &cfg)?;
            emit(Document::GaugeOp(GaugeOpDoc::from_gauge(&n.gauge)));
            emit(Document::StarProduct(StarProductDoc::from_product(
                &n.product,
            )));
            Ok(0)
        }
        Command::Classify { product, caps } => {
            let m = read_product(&product)?;
            let psi = classify_p2(&m, &caps.config(m.order()))?;
            emit(Document::PoissonSeries(PoissonSeriesDoc::from_series(&psi)));
            Ok(0)
        }
        Command::Berezin { phi, order } => {
            let phi = poly_arg("phi", &phi)?;
            emit(Document::BerezinData(BerezinDoc::from_data(&berezin(
                &phi, order,
            )?)));
            Ok(0)
        }
        Command::FitLie { k, samples, caps } => {
            if k == 0 {
                return Err(Failure::new(3, "--k must be at least 1"));
            }
            let samples = samples
                .iter()
                .map(|s| poly_arg("samples", s))
                .collect::<Result<Vec<_>, _>>()?;
            let report = fit_lie_words(&samples, k, &caps.config(k + 1))?;
            let code = if report.status.is_consistent() { 0 } else { 1 };
            emit(Document::FitReport(FitReportDoc::from_report(&report)));
            Ok(code)
        }
    }
}

/// Runs the command line `args` (program name first), writing documents
/// to `out` and diagnostics to `err`; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    3
                }
            };
        }
    };
    let mut text = String::new();
    let code = match execute(cli.command, &mut text) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    };
    if out.write_all(text.as_bytes()).is_err() {
        return 3;
    }
    code
}
