use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use crate::commands::{cmd_spectrum, cmd_state, cmd_verify, cmd_wigner, Outcome};
use crate::config::{read_config_file, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "qrabi", version, about = "Z3 quantum Rabi models: spectra, Wigner grids, verification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Exact vs first-order low spectrum over a coupling grid -> spectrum.csv
    Spectrum,
    /// Wigner panels of a state over a plane section -> wigner_a{a}_b{b}.csv, meta.txt
    Wigner,
    /// Run the verification suite -> verify.txt, verify.kv; exit 0 iff all checks pass
    Verify,
    /// Dump the amplitudes of a constructed state -> state.csv
    State,
}

/// Settings shared by every command. Flags override `--config` values,
/// which override built-in defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct Opts {
    /// `key = value` file; `#` starts a comment
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// r1, r2, r2p or alt
    #[arg(long, global = true)]
    pub model: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub omega: Option<String>,
    #[arg(long = "b-field", global = true, allow_hyphen_values = true)]
    pub b_field: Option<String>,
    /// Accepts multiples of pi, e.g. 7pi/6
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub phi: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    /// start:stop:steps
    #[arg(long = "lambda-range", global = true)]
    pub lambda_range: Option<String>,
    /// Fock cutoff per mode
    #[arg(long, global = true)]
    pub truncation: Option<String>,
    /// ground, qb1, q2b, b2, mix, q2b-cat, product-2b, z2-even, z2-odd
    #[arg(long, global = true)]
    pub kind: Option<String>,
    /// Sector index 0, 1 or 2
    #[arg(long, global = true)]
    pub k: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    /// diag or fringe
    #[arg(long, global = true)]
    pub section: Option<String>,
    /// Qutrit coordinate b selecting the fringe plane
    #[arg(long = "b-coord", global = true, allow_hyphen_values = true)]
    pub b_coord: Option<String>,
    /// Scale s of the diag section z1 = s w, z2 = s conj(w)
    #[arg(long = "diag-scale", global = true)]
    pub diag_scale: Option<String>,
    #[arg(long, global = true)]
    pub extent: Option<String>,
    #[arg(long, global = true)]
    pub resolution: Option<String>,
    /// Output directory
    #[arg(long, global = true)]
    pub out: Option<String>,
}

impl Opts {
    fn flag_settings(&self) -> Vec<(&'static str, &str)> {
        let pairs: [(&'static str, &Option<String>); 16] = [
            ("model", &self.model),
            ("omega", &self.omega),
            ("b-field", &self.b_field),
            ("phi", &self.phi),
            ("lambda", &self.lambda),
            ("lambda-range", &self.lambda_range),
            ("truncation", &self.truncation),
            ("kind", &self.kind),
            ("k", &self.k),
            ("alpha", &self.alpha),
            ("section", &self.section),
            ("b-coord", &self.b_coord),
            ("diag-scale", &self.diag_scale),
            ("extent", &self.extent),
            ("resolution", &self.resolution),
            ("out", &self.out),
        ];
        pairs
            .into_iter()
            .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
            .collect()
    }

    /// Defaults, then the config file, then flags; validated.
    pub fn resolve(&self) -> Result<RunConfig> {
        let file = match &self.config {
            Some(path) => read_config_file(path)?,
            None => Default::default(),
        };
        let settings = file
            .iter()
            .map(|(k, v)| (k.as_str(), v.as_str()))
            .chain(self.flag_settings());
        Ok(RunConfig::from_settings(settings)?)
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let cfg = cli.opts.resolve().context("invalid configuration")?;
    match cli.command {
        Command::Spectrum => cmd_spectrum(&cfg),
        Command::Wigner => cmd_wigner(&cfg),
        Command::Verify => cmd_verify(&cfg),
        Command::State => cmd_state(&cfg),
    }
}

/// Sizes the global thread pool from `QRABI_THREADS` when set.
pub fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("QRABI_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .with_context(|| format!("QRABI_THREADS must be a positive integer, got `{v}`"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    Ok(())
}
