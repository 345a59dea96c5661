//! Command-line harness behind the `supq-weyl` binary.

mod config;
mod suites;

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::Path;

use clap::Parser;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub use config::{Cli, Command, Config, FileConfig, GlobalArgs, RandomKind, Suite, SymbolKind};
pub use suites::{
    check_rng, rotation_example_value, run_verify, CheckRecord, Status, Summary, VerifyReport, CLOSED_TOL, FD_STEP,
    FD_TOL, KERNEL_TOL, ORACLE_DET_FLOOR, ORACLE_TOL,
};

use crate::cmatrix::{re, C64};
use crate::error::{Error, Result};
use crate::fock::{sigma_kernel, FockParams};
use crate::gaussian::{GHRule, DEFAULT_POINT_BUDGET};
use crate::groups::{
    g_exp, random_heis_rng, random_supq, random_supq_rng, supq_exp, GAlgebra, GElement, SUpqAlgebra, SUpqElement, Signature,
    VALIDATION_TOL,
};
use crate::json::{self, WireComplex, WireVector};
use crate::symbols::{
    berezin_pi_closed, berezin_s_kernel, berezin_sigma_closed, dpi_symbols, dsigma_symbols, pi_kernel, weyl_numeric,
    weyl_pi_closed_with, weyl_sigma_closed_with, PolySymbol, QuadSymbol,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;

/// Exit code for an error that stops a subcommand.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Precondition { .. } => EXIT_PRECONDITION,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn execute(cli: &Cli) -> Result<i32> {
    let cfg = Config::resolve(&cli.global)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cfg.jobs {
        pool = pool.num_threads(j);
    }
    let pool = pool
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Verify { suites } => {
            let report = run_verify(&cfg, suites);
            let mut out = open_output(&cfg)?;
            write_report(&report, &mut out)?;
            Ok(report.exit_code())
        }
        Command::Symbol {
            which,
            element,
            points,
            oracle,
        } => {
            let table = cmd_symbol(&cfg, *which, element, points.as_deref(), *oracle)?;
            let mut out = open_output(&cfg)?;
            writeln!(out, "{}", serde_json::to_string(&table)?)?;
            Ok(EXIT_OK)
        }
        Command::Random { kind, scale } => {
            let text = cmd_random(&cfg, *kind, *scale)?;
            let mut out = open_output(&cfg)?;
            writeln!(out, "{text}")?;
            Ok(EXIT_OK)
        }
    })
}

fn open_output(cfg: &Config) -> Result<Box<dyn Write>> {
    Ok(match &cfg.output {
        Some(path) => Box::new(io::BufWriter::new(std::fs::File::create(path)?)),
        None => Box::new(io::stdout().lock()),
    })
}

/// One JSON object per check, ordered by id, then the summary.
pub fn write_report(report: &VerifyReport, out: &mut dyn Write) -> Result<()> {
    #[derive(Serialize)]
    struct SummaryLine<'a> {
        summary: &'a Summary,
    }
    for rec in &report.records {
        writeln!(out, "{}", serde_json::to_string(rec)?)?;
    }
    writeln!(out, "{}", serde_json::to_string(&SummaryLine { summary: &report.summary })?)?;
    out.flush()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// symbol
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct SymbolRow {
    pub z: WireVector,
    pub value: WireComplex,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<WireComplex>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SymbolTable {
    pub which: &'static str,
    pub p: usize,
    pub q: usize,
    pub lambda: f64,
    pub rows: Vec<SymbolRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_residual: Option<f64>,
}

fn which_name(w: SymbolKind) -> &'static str {
    match w {
        SymbolKind::WSigma => "W_sigma",
        SymbolKind::WPi => "W_pi",
        SymbolKind::SSigma => "S_sigma",
        SymbolKind::SPi => "S_pi",
        SymbolKind::DwSigma => "dW_sigma",
        SymbolKind::DwPi => "dW_pi",
    }
}

/// Inline JSON when the text starts like JSON, otherwise a file path.
pub fn read_json_arg<T: serde::de::DeserializeOwned>(arg: &str) -> Result<T> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        Ok(serde_json::from_str(t)?)
    } else {
        Ok(serde_json::from_str(&std::fs::read_to_string(Path::new(arg))?)?)
    }
}

fn validated_supq(k: &SUpqElement, cfg: &Config) -> Result<()> {
    let res = k.validate();
    let tol = cfg.tol(VALIDATION_TOL);
    if !res.passes(tol) {
        return Err(Error::InvalidParameter(format!(
            "element is not in SU(p,q): residual {:.3e} > {tol:.3e}",
            res.max()
        )));
    }
    Ok(())
}

enum Evaluator {
    Quad(QuadSymbol),
    Poly(PolySymbol),
}

impl Evaluator {
    fn eval(&self, z: &[C64]) -> C64 {
        match self {
            Evaluator::Quad(s) => s.eval(z),
            Evaluator::Poly(s) => s.eval(z),
        }
    }
}

type Oracle = Box<dyn Fn(&[C64]) -> Result<C64>>;

fn central_difference<F>(f: F) -> Result<Oracle>
where
    F: Fn(f64) -> Result<QuadSymbol>,
{
    let (plus, minus) = (f(FD_STEP)?, f(-FD_STEP)?);
    Ok(Box::new(move |z| Ok((plus.eval(z) - minus.eval(z)) / (2.0 * FD_STEP))))
}

fn weyl_quadrature(kern: crate::fock::GaussKernel, order: usize) -> Result<Oracle> {
    let rule = GHRule::new(order)?;
    Ok(Box::new(move |z| weyl_numeric(&kern, z, &rule, DEFAULT_POINT_BUDGET)))
}

pub fn cmd_symbol(
    cfg: &Config,
    which: SymbolKind,
    element: &str,
    points: Option<&str>,
    with_oracle: bool,
) -> Result<SymbolTable> {
    let (lambda, eps) = (cfg.lambda, cfg.det_epsilon);
    let fock = |sig: Signature| FockParams::new(sig, lambda, 0);
    let (sig, evaluator, oracle): (Signature, Evaluator, Option<Oracle>) = match which {
        SymbolKind::WSigma | SymbolKind::SSigma => {
            let k: SUpqElement = read_json_arg(element)?;
            validated_supq(&k, cfg)?;
            let sig = k.sig();
            let closed = if which == SymbolKind::WSigma {
                weyl_sigma_closed_with(&k, lambda, eps)?
            } else {
                berezin_sigma_closed(&k, lambda)?
            };
            let oracle = if with_oracle {
                let kern = sigma_kernel(&k, &fock(sig)?)?;
                Some(if which == SymbolKind::WSigma {
                    weyl_quadrature(kern, cfg.quad_order)?
                } else {
                    Box::new(move |z: &[C64]| Ok(berezin_s_kernel(&kern, z))) as Oracle
                })
            } else {
                None
            };
            (sig, Evaluator::Quad(closed), oracle)
        }
        SymbolKind::WPi | SymbolKind::SPi => {
            let g: GElement = read_json_arg(element)?;
            validated_supq(&g.k, cfg)?;
            let sig = g.sig();
            let closed = if which == SymbolKind::WPi {
                weyl_pi_closed_with(&g, lambda, eps)?
            } else {
                berezin_pi_closed(&g, lambda)?
            };
            let oracle = if with_oracle {
                let kern = pi_kernel(&g, &fock(sig)?)?;
                Some(if which == SymbolKind::WPi {
                    weyl_quadrature(kern, cfg.quad_order)?
                } else {
                    Box::new(move |z: &[C64]| Ok(berezin_s_kernel(&kern, z))) as Oracle
                })
            } else {
                None
            };
            (sig, Evaluator::Quad(closed), oracle)
        }
        SymbolKind::DwSigma => {
            let x: SUpqAlgebra = read_json_arg(element)?;
            let (_, w) = dsigma_symbols(&x, lambda);
            let oracle = if with_oracle {
                Some(central_difference(|t| weyl_sigma_closed_with(&supq_exp(&x.scale(t))?, lambda, eps))?)
            } else {
                None
            };
            (x.sig(), Evaluator::Poly(w), oracle)
        }
        SymbolKind::DwPi => {
            let x: GAlgebra = read_json_arg(element)?;
            let (_, w) = dpi_symbols(&x, lambda)?;
            let oracle = if with_oracle {
                Some(central_difference(|t| weyl_pi_closed_with(&g_exp(&x, t)?, lambda, eps))?)
            } else {
                None
            };
            (x.sig(), Evaluator::Poly(w), oracle)
        }
    };
    let n = sig.n();
    let pts: Vec<Vec<C64>> = match points {
        Some(arg) => {
            let wire: Vec<WireVector> = read_json_arg(arg)?;
            wire.iter().map(|v| json::vector_in(v)).collect::<Result<_>>()?
        }
        None => vec![vec![re(0.0); n]],
    };
    if let Some(bad) = pts.iter().find(|z| z.len() != n) {
        return Err(Error::InvalidParameter(format!(
            "points must have {n} coordinates, found one with {}",
            bad.len()
        )));
    }
    let mut rows = Vec::with_capacity(pts.len());
    let mut worst: Option<f64> = None;
    for z in &pts {
        let value = evaluator.eval(z);
        let mut row = SymbolRow {
            z: json::vector_out(z),
            value: json::complex_out(value),
            oracle: None,
            residual: None,
        };
        if let Some(o) = &oracle {
            let ov = o(z)?;
            let r = match which {
                SymbolKind::DwSigma | SymbolKind::DwPi => (value - ov).norm(),
                _ => (value - ov).norm() / ov.norm().max(1e-300),
            };
            row.oracle = Some(json::complex_out(ov));
            row.residual = Some(r);
            worst = Some(worst.map_or(r, |w: f64| w.max(r)));
        }
        rows.push(row);
    }
    Ok(SymbolTable {
        which: which_name(which),
        p: sig.p(),
        q: sig.q(),
        lambda,
        rows,
        max_residual: worst,
    })
}

// ---------------------------------------------------------------------------
// random
// ---------------------------------------------------------------------------

/// Seeded element as a JSON line; validated before it is returned.
pub fn cmd_random(cfg: &Config, kind: RandomKind, scale: f64) -> Result<String> {
    if !(scale >= 0.0) || !scale.is_finite() {
        return Err(Error::InvalidParameter(format!("scale must be >= 0, got {scale}")));
    }
    let sig = cfg.sig();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    Ok(match kind {
        RandomKind::Supq => {
            let k = random_supq(cfg.seed, scale, sig)?;
            validated_supq(&k, cfg)?;
            serde_json::to_string(&k)?
        }
        RandomKind::Heis => serde_json::to_string(&random_heis_rng(&mut rng, scale, sig.n()))?,
        RandomKind::G => {
            let h = random_heis_rng(&mut rng, scale, sig.n());
            let k = random_supq_rng(&mut rng, scale, sig);
            validated_supq(&k, cfg)?;
            serde_json::to_string(&GElement::new(h, k)?)?
        }
    })
}
