//! Batch front end behind the `kaclab` binary.
//!
//! Settings come from an optional TOML file; command-line flags override it.
//! Exit codes: `0` success, `1` a numerical check failed, `2` bad configuration.

mod commands;
mod config;
pub mod svg;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use commands::{cmd_proptest, cmd_transport, cmd_verify, cmd_zcurve, CmdError};
pub use config::{FamilySpec, GridConfig, RunConfig, DEFAULT_OUT, DEFAULT_SEED, OUT_ENV};

#[derive(Debug, Parser)]
#[command(name = "kaclab", version, about = "Entropy and transport checks on Kac's sphere")]
pub struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides KACLAB_OUT and the config file).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the inequality chain over the N sweep; writes chain.csv, epsilon.csv, epsilon.svg.
    Verify(SweepArgs),
    /// Tabulate log Z_N and λ_N; writes zcurve_N<n>.csv, zcurve_sup.csv, zcurve.svg.
    Zcurve(SweepArgs),
    /// Exact Wasserstein distances of the marginal pair and their bounds; writes transport.csv, tau.csv.
    Transport(SweepArgs),
    /// Seeded randomized suites for the Hölder-type and pointwise inequalities; writes proptest.csv.
    Proptest(PropArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyKind {
    Uniform,
    Bump,
    Gaussian,
    File,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub family: Option<FamilyKind>,
    /// Bump scale parameter.
    #[arg(long = "R")]
    pub r: Option<f64>,
    /// Gaussian variance.
    #[arg(long)]
    pub var: Option<f64>,
    /// Two-column CSV density for the file family.
    #[arg(long)]
    pub path: Option<PathBuf>,
    /// Comma-separated dimensions.
    #[arg(long = "N", value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct PropArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub holder_cases: Option<usize>,
    #[arg(long)]
    pub pointwise_cases: Option<usize>,
}

impl SweepArgs {
    fn apply(&self, cfg: &mut RunConfig) -> Result<(), CmdError> {
        if let Some(kind) = self.family {
            cfg.family = match kind {
                FamilyKind::Uniform => FamilySpec::Uniform,
                FamilyKind::Bump => FamilySpec::Bump { r: self.r.unwrap_or(1.0) },
                FamilyKind::Gaussian => FamilySpec::Gaussian { var: self.var.unwrap_or(1.0) },
                FamilyKind::File => FamilySpec::File {
                    path: self.path.clone().ok_or_else(|| CmdError::Config("--family file needs --path".into()))?,
                },
            };
        } else {
            match &mut cfg.family {
                FamilySpec::Bump { r } => *r = self.r.unwrap_or(*r),
                FamilySpec::Gaussian { var } => *var = self.var.unwrap_or(*var),
                FamilySpec::File { path } => *path = self.path.clone().unwrap_or_else(|| path.clone()),
                FamilySpec::Uniform => {}
            }
        }
        if let Some(n) = &self.n {
            cfg.ns = n.clone();
        }
        let p = &mut cfg.params;
        p.k = self.k.unwrap_or(p.k);
        p.q = self.q.unwrap_or(p.q);
        p.p = self.p.unwrap_or(p.p);
        p.beta = self.beta.unwrap_or(p.beta);
        if cfg.ns.is_empty() {
            return Err(CmdError::Config("empty N list".into()));
        }
        Ok(())
    }
}

impl PropArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        cfg.seed = self.seed.unwrap_or(cfg.seed);
        cfg.holder_cases = self.holder_cases.unwrap_or(cfg.holder_cases);
        cfg.pointwise_cases = self.pointwise_cases.unwrap_or(cfg.pointwise_cases);
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("kaclab: {e}");
            e.exit_code()
        }
    }
}

/// Runs a parsed command; `Ok(false)` means some check failed.
pub fn execute(cli: &Cli) -> Result<bool, CmdError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::from_file(p).map_err(|e| CmdError::Config(format!("{}: {e}", p.display())))?,
        None => RunConfig::default(),
    };
    let out = cfg.resolve_out_dir(cli.out.as_deref());
    std::fs::create_dir_all(&out).map_err(|e| CmdError::Numerical(format!("cannot create {}: {e}", out.display())))?;
    match &cli.command {
        Command::Verify(a) => {
            a.apply(&mut cfg)?;
            cmd_verify(&cfg, &out)
        }
        Command::Zcurve(a) => {
            a.apply(&mut cfg)?;
            cmd_zcurve(&cfg, &out)
        }
        Command::Transport(a) => {
            a.apply(&mut cfg)?;
            cmd_transport(&cfg, &out)
        }
        Command::Proptest(a) => {
            a.apply(&mut cfg);
            cmd_proptest(&cfg, &out)
        }
    }
}
