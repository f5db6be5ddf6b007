//! `iterperiod`: verification and computation front end.
//!
//! Exit codes: 0 pass, 1 configuration or numerical error, 2 verification failure.

mod config;
mod output;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{parse_panel, parse_y_max, Format, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "iterperiod", version, about = "Iterated period integrals of cusp forms on SL2(Z)")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct Opts {
    /// JSON run configuration; flags override its values
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// letters, e.g. "trivial:10,eta:4"
    #[arg(long, global = true)]
    alphabet: Option<String>,
    /// truncation degree D
    #[arg(long, global = true)]
    degree: Option<usize>,
    #[arg(long, global = true)]
    rtol: Option<f64>,
    #[arg(long, global = true)]
    atol: Option<f64>,
    /// "auto" or an explicit height
    #[arg(long, global = true)]
    y_max: Option<String>,
    #[arg(long, global = true)]
    max_steps: Option<usize>,
    #[arg(long, global = true)]
    precision: Option<String>,
    /// points of the lower half-plane, "re,im;re,im;..."
    #[arg(long, global = true)]
    panel: Option<String>,
    /// report file; stdout when absent
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// residual bound for verification
    #[arg(long, global = true)]
    threshold: Option<f64>,
    /// comma-separated form specs "name" or "c*name"
    #[arg(long, global = true)]
    forms: Option<String>,
    /// endpoints separated by ';': "inf", "cusp:p/q" or "re,im"
    #[arg(long, global = true)]
    endpoints: Option<String>,
    /// collection JSON file for h
    #[arg(long, global = true)]
    collection: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check one identity over the panel
    Verify {
        #[arg(value_enum)]
        identity: Identity,
        /// group element: "a,b,c,d" or a word in S, T, t (= T^-1)
        #[arg(long)]
        gamma: Option<String>,
        #[arg(long)]
        delta: Option<String>,
        /// eta power for eta-example
        #[arg(long)]
        n: Option<u8>,
    },
    /// Moments, L-values and double moments of forms
    Mlv {
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
        max_order: u8,
    },
    /// Peel a cocycle back into a collection and compare
    Roundtrip {
        /// hidden collection JSON
        #[arg(long, conflicts_with_all = ["random", "tabulated"])]
        input: Option<PathBuf>,
        /// random coordinates in [-2, 2] from --seed
        #[arg(long, conflicts_with = "tabulated")]
        random: bool,
        /// tabulated X_S, X_T values
        #[arg(long)]
        tabulated: Option<PathBuf>,
    },
    /// Monomials with nonzero cusp spaces
    Catalog,
    /// Dump Psi(h)_gamma on the panel
    Psi {
        #[arg(long, default_value = "S")]
        gamma: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Identity {
    Cocycle,
    Equivariance,
    Mult,
    Rel2,
    Rel3,
    EtaExample,
    Shuffle,
}

/// Why a run did not produce a passing report.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn config(msg: impl Into<String>) -> Self {
        Failure { code: 1, message: msg.into() }
    }

    pub fn config_err(e: iterperiod::Error) -> Self {
        Failure::config(e.to_string())
    }

    /// Numerical errors exit 1, failed reconstructions exit 2.
    pub fn from_peel(e: iterperiod::Error) -> Self {
        use iterperiod::Error::*;
        let code = match e {
            FitResidual { .. } | IllConditioned { .. } | CocycleCheck { .. } | NotInCatalog(_) => 2,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<iterperiod::Error> for Failure {
    fn from(e: iterperiod::Error) -> Self {
        Failure::config_err(e)
    }
}

fn split_list(s: &str, sep: char) -> Vec<String> {
    s.split(sep).map(str::trim).filter(|p| !p.is_empty()).map(String::from).collect()
}

fn resolve_config(o: &Opts) -> Result<RunConfig, Failure> {
    let mut c = match &o.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    if let Some(v) = &o.alphabet {
        c.alphabet = v.clone();
    }
    if let Some(v) = o.degree {
        c.degree = v;
    }
    if let Some(v) = o.rtol {
        c.quadrature.rtol = v;
    }
    if let Some(v) = o.atol {
        c.quadrature.atol = v;
    }
    if let Some(v) = &o.y_max {
        c.quadrature.y_max = parse_y_max(v)?;
    }
    if let Some(v) = o.max_steps {
        c.quadrature.max_steps = v;
    }
    if let Some(v) = &o.precision {
        c.quadrature.precision = v.clone();
    }
    if let Some(v) = &o.panel {
        c.panel = Some(parse_panel(v)?);
    }
    if let Some(v) = o.format {
        c.format = v;
    }
    if let Some(v) = o.seed {
        c.seed = v;
    }
    if let Some(v) = o.threshold {
        c.threshold = v;
    }
    if let Some(v) = &o.forms {
        c.forms = Some(split_list(v, ','));
    }
    if let Some(v) = &o.endpoints {
        c.endpoints = Some(split_list(v, ';'));
    }
    if let Some(p) = &o.collection {
        c.collection = Some(read_json(p)?);
    }
    c.validate()?;
    Ok(c)
}

pub fn read_json<T: serde::de::DeserializeOwned>(p: &std::path::Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(p).map_err(|e| Failure::config(format!("{}: {e}", p.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::config(format!("{}: {e}", p.display())))
}

fn execute(cli: Cli) -> Result<bool, Failure> {
    let mut cfg = resolve_config(&cli.opts)?;
    let report = match cli.cmd {
        Cmd::Verify { identity, gamma, delta, n } => run::verify(&mut cfg, identity, gamma, delta, n)?,
        Cmd::Mlv { max_order } => run::mlv(&mut cfg, max_order)?,
        Cmd::Roundtrip { input, random, tabulated } => run::roundtrip(&mut cfg, input, random, tabulated)?,
        Cmd::Catalog => run::catalog(&mut cfg)?,
        Cmd::Psi { gamma } => run::psi(&mut cfg, &gamma)?,
    };
    let pass = report.pass;
    output::write(&report, &cfg, cli.opts.out.as_deref())?;
    Ok(pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(2)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
