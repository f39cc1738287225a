//! Batch front end for the `a12` library: parse a run configuration,
//! execute one command and render its report.
//!
//! Settings come from an optional `--config` file, then positional
//! `key=value` arguments, then `--key value` flags; later sources win.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

use std::path::PathBuf;

use clap::Parser;

pub use config::{parse_config, Command, RunConfig, Settings};
pub use error::CliError;
pub use run::{execute, Outcome, SCHEMA_VERSION};

/// Exit status for configuration and usage errors.
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "a12",
    version,
    about = "Checks for (α₁,α₂)-metrics, S-curvature and root systems"
)]
pub struct Cli {
    /// Command (validate-norm, tensors, scurvature, vanishing, keylemma,
    /// kvfcl) followed by key=value settings.
    pub args: Vec<String>,
    /// Config file with key=value lines.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub samples: Option<String>,
    #[arg(long)]
    pub tol: Option<String>,
    /// json or csv.
    #[arg(long)]
    pub format: Option<String>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<String>,
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub algebra: Option<String>,
    #[arg(long)]
    pub datum: Option<String>,
    #[arg(long)]
    pub scalars: Option<String>,
    #[arg(long)]
    pub v2: Option<String>,
    #[arg(long)]
    pub dims: Option<String>,
    #[arg(long = "type")]
    pub root_type: Option<String>,
    #[arg(long)]
    pub strategy: Option<String>,
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long)]
    pub x: Option<String>,
    #[arg(long = "x_prime")]
    pub x_prime: Option<String>,
    #[arg(long = "g_prime")]
    pub g_prime: Option<String>,
}

impl Cli {
    /// Merge the config file, positional settings and flags.
    pub fn settings(&self) -> Result<Settings, CliError> {
        let mut s = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                Settings::parse_text(&text)?
            }
            None => Settings::default(),
        };
        let mut cmdline = Settings::default();
        for (i, arg) in self.args.iter().enumerate() {
            if i == 0 && !arg.contains('=') {
                cmdline.set("command", arg, None)?;
            } else {
                cmdline.set_pair(arg)?;
            }
        }
        let flags = [
            ("seed", &self.seed),
            ("samples", &self.samples),
            ("tol", &self.tol),
            ("format", &self.format),
            ("out", &self.out),
            ("family", &self.family),
            ("algebra", &self.algebra),
            ("datum", &self.datum),
            ("scalars", &self.scalars),
            ("v2", &self.v2),
            ("dims", &self.dims),
            ("type", &self.root_type),
            ("strategy", &self.strategy),
            ("grid", &self.grid),
            ("x", &self.x),
            ("x_prime", &self.x_prime),
            ("g_prime", &self.g_prime),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                cmdline.set(k, v, None)?;
            }
        }
        s.merge(&cmdline);
        Ok(s)
    }
}

/// Parse, execute and render; returns the report text and exit status.
pub fn run(cli: &Cli) -> Result<(String, u8, RunConfig), CliError> {
    let cfg = RunConfig::from_settings(&cli.settings()?)?;
    let outcome = execute(&cfg)?;
    let text = output::render(&outcome.report, cfg.format)?;
    Ok((text, outcome.exit_code, cfg))
}
