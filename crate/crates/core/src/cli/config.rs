use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::FockParams;
use crate::gaussian::DEFAULT_QUAD_ORDER;
use crate::groups::Signature;
use crate::symbols::DET_EPSILON;

#[derive(Debug, Parser)]
#[command(name = "supq-weyl", version, about = "Berezin and complex Weyl symbols of the harmonic representation of SU(p,q)")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Default, Args)]
pub struct GlobalArgs {
    #[arg(long, global = true, env = "SUPQ_WEYL_P")]
    pub p: Option<usize>,
    #[arg(long, global = true, env = "SUPQ_WEYL_Q")]
    pub q: Option<usize>,
    #[arg(long, global = true, env = "SUPQ_WEYL_LAMBDA")]
    pub lambda: Option<f64>,
    /// Fock-space degree cutoff N
    #[arg(long = "fock-degree", visible_alias = "N", global = true, env = "SUPQ_WEYL_FOCK_DEGREE")]
    pub fock_degree: Option<usize>,
    /// Gauss-Hermite order per real dimension
    #[arg(long = "quad-order", visible_alias = "Q", global = true, env = "SUPQ_WEYL_QUAD_ORDER")]
    pub quad_order: Option<usize>,
    #[arg(long, global = true, env = "SUPQ_WEYL_SEED")]
    pub seed: Option<u64>,
    /// Replaces every check tolerance
    #[arg(long, global = true, env = "SUPQ_WEYL_TOLERANCE")]
    pub tolerance: Option<f64>,
    #[arg(long = "det-epsilon", global = true, env = "SUPQ_WEYL_DET_EPSILON")]
    pub det_epsilon: Option<f64>,
    #[arg(long, global = true, env = "SUPQ_WEYL_JOBS")]
    pub jobs: Option<usize>,
    #[arg(long, global = true, env = "SUPQ_WEYL_OUTPUT")]
    pub output: Option<PathBuf>,
    /// JSON file with any of the options above
    #[arg(long, global = true, env = "SUPQ_WEYL_CONFIG")]
    pub config: Option<PathBuf>,
    /// Add wall-clock times to report lines
    #[arg(long, global = true, env = "SUPQ_WEYL_TIMINGS")]
    pub timings: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run verification suites and emit a JSON-lines report
    Verify {
        /// Comma-separated subset of the suites; all when omitted
        #[arg(long, value_delimiter = ',', env = "SUPQ_WEYL_SUITES")]
        suites: Vec<Suite>,
    },
    /// Evaluate a closed-form symbol at points
    Symbol {
        #[arg(long, value_enum)]
        which: SymbolKind,
        /// Inline JSON or a path to a JSON file
        #[arg(long)]
        element: String,
        /// Inline JSON or a path: an array of points, each an array of [re, im]
        #[arg(long)]
        points: Option<String>,
        /// Also evaluate the brute-force oracle and report residuals
        #[arg(long, env = "SUPQ_WEYL_ORACLE")]
        oracle: bool,
    },
    /// Emit a seeded random group element
    Random {
        #[arg(long, value_enum)]
        kind: RandomKind,
        #[arg(long, default_value_t = 0.5)]
        scale: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Groups,
    Lemmas,
    Kernels,
    Berezin,
    Weyl,
    Extended,
    Derivatives,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Groups,
        Suite::Lemmas,
        Suite::Kernels,
        Suite::Berezin,
        Suite::Weyl,
        Suite::Extended,
        Suite::Derivatives,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Groups => "groups",
            Suite::Lemmas => "lemmas",
            Suite::Kernels => "kernels",
            Suite::Berezin => "berezin",
            Suite::Weyl => "weyl",
            Suite::Extended => "extended",
            Suite::Derivatives => "derivatives",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SymbolKind {
    #[value(name = "W_sigma")]
    WSigma,
    #[value(name = "W_pi")]
    WPi,
    #[value(name = "S_sigma")]
    SSigma,
    #[value(name = "S_pi")]
    SPi,
    #[value(name = "dW_sigma")]
    DwSigma,
    #[value(name = "dW_pi")]
    DwPi,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RandomKind {
    Supq,
    Heis,
    G,
}

/// Contents of a `--config` file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub p: Option<usize>,
    pub q: Option<usize>,
    pub lambda: Option<f64>,
    pub fock_degree: Option<usize>,
    pub quad_order: Option<usize>,
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
    pub det_epsilon: Option<f64>,
    pub jobs: Option<usize>,
    pub output: Option<PathBuf>,
    pub timings: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Config {
    pub p: usize,
    pub q: usize,
    pub lambda: f64,
    pub fock_degree: usize,
    pub quad_order: usize,
    pub seed: u64,
    pub tolerance: Option<f64>,
    pub det_epsilon: f64,
    pub jobs: Option<usize>,
    pub output: Option<PathBuf>,
    pub timings: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            p: 1,
            q: 1,
            lambda: 2.0,
            fock_degree: 14,
            quad_order: DEFAULT_QUAD_ORDER,
            seed: 0,
            tolerance: None,
            det_epsilon: DET_EPSILON,
            jobs: None,
            output: None,
            timings: false,
        }
    }
}

fn read_file_config(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

impl Config {
    /// Flags (and their environment variables) over the config file over defaults.
    pub fn resolve(args: &GlobalArgs) -> Result<Self> {
        let file = match &args.config {
            Some(path) => read_file_config(path)?,
            None => FileConfig::default(),
        };
        let d = Config::default();
        let cfg = Config {
            p: args.p.or(file.p).unwrap_or(d.p),
            q: args.q.or(file.q).unwrap_or(d.q),
            lambda: args.lambda.or(file.lambda).unwrap_or(d.lambda),
            fock_degree: args.fock_degree.or(file.fock_degree).unwrap_or(d.fock_degree),
            quad_order: args.quad_order.or(file.quad_order).unwrap_or(d.quad_order),
            seed: args.seed.or(file.seed).unwrap_or(d.seed),
            tolerance: args.tolerance.or(file.tolerance),
            det_epsilon: args.det_epsilon.or(file.det_epsilon).unwrap_or(d.det_epsilon),
            jobs: args.jobs.or(file.jobs),
            output: args.output.clone().or(file.output),
            timings: args.timings || file.timings.unwrap_or(false),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        Signature::new(self.p, self.q)?;
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("lambda must be positive, got {}", self.lambda)));
        }
        if self.quad_order == 0 {
            return Err(Error::InvalidParameter("quad-order must be at least 1".into()));
        }
        if let Some(t) = self.tolerance {
            if !(t > 0.0) || !t.is_finite() {
                return Err(Error::InvalidParameter(format!("tolerance must be positive, got {t}")));
            }
        }
        if !(self.det_epsilon >= 0.0) || !self.det_epsilon.is_finite() {
            return Err(Error::InvalidParameter(format!("det-epsilon must be >= 0, got {}", self.det_epsilon)));
        }
        if self.jobs == Some(0) {
            return Err(Error::InvalidParameter("jobs must be at least 1".into()));
        }
        Ok(())
    }

    pub fn sig(&self) -> Signature {
        Signature::new(self.p, self.q).expect("validated signature")
    }

    pub fn fock_params(&self) -> FockParams {
        FockParams::new(self.sig(), self.lambda, self.fock_degree).expect("validated lambda")
    }

    /// The configured override, or the check's own tolerance.
    pub fn tol(&self, default: f64) -> f64 {
        self.tolerance.unwrap_or(default)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn defaults_are_desk_scale() {
        let c = Config::resolve(&GlobalArgs::default()).unwrap();
        assert_eq!((c.p, c.q, c.lambda, c.fock_degree, c.quad_order), (1, 1, 2.0, 14, 40));
        assert_eq!(c.tol(1e-9), 1e-9);
    }

    #[test]
    fn flags_override_file() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        write!(f, r#"{{"p": 2, "q": 2, "lambda": 1.5, "seed": 9, "tolerance": 1e-7}}"#).unwrap();
        let args = GlobalArgs {
            q: Some(1),
            config: Some(f.path().to_path_buf()),
            ..Default::default()
        };
        let c = Config::resolve(&args).unwrap();
        assert_eq!((c.p, c.q, c.lambda, c.seed), (2, 1, 1.5, 9));
        assert_eq!(c.tol(1e-9), 1e-7);
    }

    #[test]
    fn rejects_bad_values() {
        let bad = [
            GlobalArgs { lambda: Some(-1.0), ..Default::default() },
            GlobalArgs { p: Some(0), ..Default::default() },
            GlobalArgs { quad_order: Some(0), ..Default::default() },
            GlobalArgs { jobs: Some(0), ..Default::default() },
            GlobalArgs { tolerance: Some(f64::NAN), ..Default::default() },
        ];
        for args in &bad {
            assert!(Config::resolve(args).is_err());
        }
        let mut f = tempfile::NamedTempFile::new().unwrap();
        write!(f, r#"{{"lamda": 1.0}}"#).unwrap();
        let args = GlobalArgs { config: Some(f.path().to_path_buf()), ..Default::default() };
        assert!(Config::resolve(&args).is_err());
    }

    #[test]
    fn parses_aliases_and_suites() {
        let cli = Cli::try_parse_from(["supq-weyl", "verify", "--suites", "groups,weyl", "--N", "8", "--Q", "20"]).unwrap();
        assert_eq!(cli.global.fock_degree, Some(8));
        assert_eq!(cli.global.quad_order, Some(20));
        match cli.command {
            Command::Verify { suites } => assert_eq!(suites, vec![Suite::Groups, Suite::Weyl]),
            _ => panic!("wrong subcommand"),
        }
        assert!(Cli::try_parse_from(["supq-weyl", "verify", "--suites", "nope"]).is_err());
    }
}
