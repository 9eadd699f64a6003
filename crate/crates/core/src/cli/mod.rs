//! Command-line front end.
//!
//! Every command reads one JSON config (`--config`), unknown fields rejected,
//! and writes a JSON result document to `--out` or stdout. Exit status is 0
//! on success, 2 when a certificate is present and fails, 1 on any usage,
//! parse or domain error.

mod config;
mod sphere;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bjortho::{classify, DEFAULT_TOL};
use crate::duality::{supporting_functionals, Functional};
use crate::error::{Error, Result};
use crate::opnorm::{default_starts, operator_norm, oracle_norm, Operator};
use crate::sip::SipSelection;
use crate::theorems::{
    construct_operator_sip_pair, find_preserved_orthogonal_direction, verify_functional_characterization,
    verify_isometry_characterization, verify_smooth_characterization_with, Certificate, LemmaOptions, T22_TOL,
    T24_TOL,
};

pub use config::{
    ClassifyConfig, DualConfig, OpnormConfig, SipConfig, SphereConfig, VectorConfig, VerifyConfig,
};
pub use sphere::{emit_sphere_csv, SphereRow};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FAILED: i32 = 2;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(name = "sipgeom", version, about = "Semi-inner-products, Birkhoff-James orthogonality and norm attainment")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct CommonArgs {
    /// JSON config file
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// result document (CSV for `sphere`); stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// tolerance override: classification tolerance for `classify` and `verify l22`,
    /// certificate tolerance for the other `verify` theorems
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// norm of a vector
    Norm(CommonArgs),
    /// dual norm of a functional
    Dualnorm(CommonArgs),
    /// vertices of the supporting functional set J(x)
    Support(CommonArgs),
    /// semi-inner-product [x, y] under a selection
    Sip(CommonArgs),
    /// Birkhoff-James classification of y relative to x
    Classify(CommonArgs),
    /// operator norm and attainment set
    Opnorm(CommonArgs),
    /// certificate for one of the characterization theorems
    Verify(CommonArgs),
    /// CSV trace of a 2-D unit sphere
    Sphere(CommonArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Norm(_) => "norm",
            Command::Dualnorm(_) => "dualnorm",
            Command::Support(_) => "support",
            Command::Sip(_) => "sip",
            Command::Classify(_) => "classify",
            Command::Opnorm(_) => "opnorm",
            Command::Verify(_) => "verify",
            Command::Sphere(_) => "sphere",
        }
    }

    fn args(&self) -> &CommonArgs {
        match self {
            Command::Norm(a)
            | Command::Dualnorm(a)
            | Command::Support(a)
            | Command::Sip(a)
            | Command::Classify(a)
            | Command::Opnorm(a)
            | Command::Verify(a)
            | Command::Sphere(a) => a,
        }
    }
}

/// Result of a command before it is written out.
#[derive(Debug, Clone, Serialize)]
pub struct ResultDocument {
    pub command: String,
    pub inputs: Value,
    pub outputs: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    pub metadata: Value,
}

impl ResultDocument {
    pub fn exit_status(&self) -> i32 {
        match &self.certificate {
            Some(c) if !c.pass => EXIT_FAILED,
            _ => EXIT_OK,
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    match run(&cli.command) {
        Ok(status) => status,
        Err(e) => {
            eprintln!("sipgeom: {e}");
            EXIT_ERROR
        }
    }
}

/// Runs a parsed command, writing its output. Returns the exit status.
pub fn run(command: &Command) -> Result<i32> {
    let args = command.args();
    if let Command::Sphere(_) = command {
        let cfg: SphereConfig = config::load(&args.config)?;
        let out = args.out.as_ref().ok_or_else(|| Error::Usage("sphere needs --out <csv path>".into()))?;
        let space = cfg.space()?;
        let op = cfg.operator.as_ref().map(Operator::from_spec).transpose()?;
        emit_sphere_csv(&space, cfg.resolution, op.as_ref(), args.seed, out)?;
        return Ok(EXIT_OK);
    }
    let doc = execute(command)?;
    let text = serde_json::to_string_pretty(&doc).map_err(|e| Error::Usage(e.to_string()))? + "\n";
    write_output(args.out.as_deref(), &text)?;
    Ok(doc.exit_status())
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Builds the result document for every command except `sphere`.
pub fn execute(command: &Command) -> Result<ResultDocument> {
    let args = command.args();
    let seed = args.seed;
    let (inputs, outputs, certificate) = match command {
        Command::Norm(_) => {
            let cfg: VectorConfig = config::load(&args.config)?;
            let space = cfg.space()?;
            (to_value(&cfg), json!({ "norm": space.norm(&cfg.x)? }), None)
        }
        Command::Dualnorm(_) => {
            let cfg: DualConfig = config::load(&args.config)?;
            let space = cfg.space()?;
            (to_value(&cfg), json!({ "dual_norm": space.dual_norm(&cfg.functional)? }), None)
        }
        Command::Support(_) => {
            let cfg: VectorConfig = config::load(&args.config)?;
            let space = cfg.space()?;
            let j = supporting_functionals(&space, &cfg.x)?;
            let outputs = json!({
                "vertices": j.vertices(),
                "singleton": j.is_singleton(),
                "min_euclidean_element": j.min_euclidean_element(),
            });
            (to_value(&cfg), outputs, None)
        }
        Command::Sip(_) => {
            let cfg: SipConfig = config::load(&args.config)?;
            let space = cfg.space()?;
            let sel = match &cfg.selection {
                Some(spec) => SipSelection::from_spec(&space, spec)?,
                None => SipSelection::default_selection(&space),
            };
            let g = sel.functional_for(&cfg.y)?;
            let outputs = json!({ "value": sel.eval(&cfg.x, &cfg.y)?, "functional": g });
            (to_value(&cfg), outputs, None)
        }
        Command::Classify(_) => {
            let cfg: ClassifyConfig = config::load(&args.config)?;
            let space = cfg.space()?;
            let tol = args.tol.unwrap_or(DEFAULT_TOL);
            let c = classify(&space, &cfg.x, &cfg.y, tol)?;
            let outputs = json!({ "classification": c, "cell": c.cell(), "tolerance": tol });
            (to_value(&cfg), outputs, None)
        }
        Command::Opnorm(_) => {
            let cfg: OpnormConfig = config::load(&args.config)?;
            let op = Operator::from_spec(&cfg.operator)?;
            let starts = cfg.starts.unwrap_or_else(|| default_starts(op.domain().dim()));
            let att = operator_norm(&op, starts, seed)?;
            let outputs = json!({ "attainment": att, "oracle_norm": oracle_norm(&op), "starts": starts });
            (to_value(&cfg), outputs, None)
        }
        Command::Verify(_) => {
            let cfg: VerifyConfig = config::load(&args.config)?;
            let cert = verify(&cfg, seed, args.tol)?;
            let outputs = json!({
                "theorem": cert.theorem,
                "pass": cert.pass,
                "residual": cert.residual,
                "tolerance": cert.tolerance,
            });
            (to_value(&cfg), outputs, Some(cert))
        }
        Command::Sphere(_) => return Err(Error::Usage("sphere writes CSV, not a result document".into())),
    };
    Ok(ResultDocument {
        command: command.name().to_string(),
        inputs,
        outputs,
        certificate,
        metadata: json!({ "version": env!("CARGO_PKG_VERSION"), "seed": seed }),
    })
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn retolerance(mut cert: Certificate, tol: Option<f64>) -> Certificate {
    if let Some(t) = tol {
        cert.tolerance = t;
        cert.pass = cert.residual <= t;
    }
    cert
}

fn verify(cfg: &VerifyConfig, seed: u64, tol: Option<f64>) -> Result<Certificate> {
    match cfg {
        VerifyConfig::T21 { space, dim, functional, z, samples } => {
            let space = config::build_space(space, *dim, z.len())?;
            let f = Functional::new(&space, functional.clone())?;
            let cert = verify_functional_characterization(&space, &f, z, samples.unwrap_or(100), seed)?;
            Ok(retolerance(cert, tol))
        }
        VerifyConfig::T22 { operator, z, samples } => {
            let op = Operator::from_spec(operator)?;
            if op.is_zero() {
                return Err(Error::Precondition("operator must be nonzero".into()));
            }
            let norm = operator_norm(&op, default_starts(op.domain().dim()), seed)?.norm_value;
            verify_smooth_characterization_with(&op, z, norm, samples.unwrap_or(100), seed, tol.unwrap_or(T22_TOL))
        }
        VerifyConfig::L22 { operator, z, subspace } => {
            let op = Operator::from_spec(operator)?;
            let mut opts = LemmaOptions { seed, ..LemmaOptions::default() };
            if let Some(t) = tol {
                opts.classify_tol = t;
            }
            Ok(find_preserved_orthogonal_direction(&op, z, subspace.as_deref(), &opts)?.1)
        }
        VerifyConfig::T23 { operator, z, x } => {
            let op = Operator::from_spec(operator)?;
            let opts = LemmaOptions { seed, ..LemmaOptions::default() };
            Ok(retolerance(construct_operator_sip_pair(&op, z, x, &opts)?.certificate, tol))
        }
        VerifyConfig::T24 { operator, pairs } => {
            let op = Operator::from_spec(operator)?;
            verify_isometry_characterization(&op, pairs.unwrap_or(1000), seed, tol.unwrap_or(T24_TOL))
        }
    }
}
