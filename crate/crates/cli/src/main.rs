//! `eulerprim`: experiments on Euler characteristics of excursion sets and the validation suite.

mod commands;
mod config;

use clap::{ArgAction, Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INTERNAL: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "eulerprim", version, about = "Euler characteristic integrals of excursion sets")]
pub struct Cli {
    /// Configuration file (`key = value` lines, `[command]` sections); flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Also write the command's table as CSV.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Master seed for every random quantity.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Euler characteristic of {f >= u} by cubical, bicovariogram and Morse counts.
    Ec(EcArgs),
    /// The spatial integral I_f(h) against the level integral of the Euler characteristic.
    Primitive(PrimitiveArgs),
    /// One-dimensional up-crossing identity.
    Kacrice(KacRiceArgs),
    /// Co-area identity for a test function.
    Coarea(CoareaArgs),
    /// Shot-noise characteristic functions, Monte Carlo densities and the stationary limit.
    Shotnoise(ShotnoiseArgs),
    /// Empirical moments of I_f(h) for shot noise against the moment bound.
    Moments(MomentsArgs),
    /// Runs the acceptance suite.
    Validate(ValidateArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Ec(_) => "ec",
            Self::Primitive(_) => "primitive",
            Self::Kacrice(_) => "kacrice",
            Self::Coarea(_) => "coarea",
            Self::Shotnoise(_) => "shotnoise",
            Self::Moments(_) => "moments",
            Self::Validate(_) => "validate",
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct EcArgs {
    /// Field name or descriptor such as `bumps count=1 cx0=0 cy0=0 w0=1 s0=1`.
    #[arg(long, default_value = "two_bump")]
    pub field: String,
    /// Comma-separated levels.
    #[arg(long, default_value = "0.3")]
    pub level: String,
    /// cubical, bicov, morse or all.
    #[arg(long, default_value = "all")]
    pub method: String,
    /// Lattice spacing of the grid methods.
    #[arg(long, default_value_t = 1.0 / 256.0)]
    pub spacing: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct PrimitiveArgs {
    #[arg(long, default_value = "radial_exp")]
    pub field: String,
    /// `bump:a:b[:scale]` or `fourier:t`.
    #[arg(long, default_value = "bump:0.2:0.8")]
    pub testfn: String,
    /// Midpoint cells per side for I_f.
    #[arg(long, default_value_t = 512)]
    pub resolution: usize,
    /// Levels for the level integral.
    #[arg(long, default_value_t = 128)]
    pub levels: usize,
    /// Grid cells per side for the lattice Euler characteristic.
    #[arg(long, default_value_t = 1024)]
    pub ec_resolution: usize,
    /// Euler characteristic method of the level integral.
    #[arg(long, default_value = "cubical")]
    pub method: String,
}

#[derive(Debug, Args, Serialize)]
pub struct KacRiceArgs {
    /// tent, gaussian or two_gaussians.
    #[arg(long, default_value = "tent")]
    pub profile: String,
    #[arg(long, default_value = "bump:0.2:0.8")]
    pub testfn: String,
    #[arg(long, default_value_t = 128)]
    pub levels: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct CoareaArgs {
    #[arg(long, default_value = "two_bump")]
    pub field: String,
    #[arg(long, default_value = "bump:0.2:0.8")]
    pub testfn: String,
    #[arg(long, default_value_t = 512)]
    pub resolution: usize,
    #[arg(long, default_value_t = 128)]
    pub levels: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct ShotnoiseArgs {
    /// gaussian, power3 or mixed.
    #[arg(long, default_value = "gaussian")]
    pub model: String,
    #[arg(long, default_value_t = 1.0)]
    pub intensity: f64,
    /// Comma-separated frequencies.
    #[arg(long, default_value = "0.5,1,2")]
    pub t: String,
    #[arg(long, default_value_t = 10_000)]
    pub reps: usize,
    /// Germ window radius; defaults to five truncation radii.
    #[arg(long)]
    pub window_radius: Option<f64>,
    /// Also evaluate the closed-form stationary density (a few seconds per frequency).
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    pub stationary: bool,
    /// Write the first replicate's germ sample here.
    #[arg(long)]
    pub germs_out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct MomentsArgs {
    #[arg(long, default_value = "gaussian")]
    pub model: String,
    #[arg(long, default_value = "bump:0.2:0.8")]
    pub testfn: String,
    /// Comma-separated moment orders.
    #[arg(long, default_value = "1,2")]
    pub q: String,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    #[arg(long, default_value_t = 3.0)]
    pub window_radius: f64,
    #[arg(long, default_value_t = 1.0)]
    pub intensity: f64,
    /// Midpoint cells per side of the integration square.
    #[arg(long, default_value_t = 256)]
    pub resolution: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct ValidateArgs {
    /// Comma-separated criterion numbers; all when absent.
    #[arg(long)]
    pub only: Option<String>,
}

/// Value-taking global flags, so that their values are not mistaken for the command name.
const GLOBAL_VALUE_FLAGS: [&str; 5] = ["--config", "--output", "--csv", "--workers", "--seed"];

/// `args` with the configuration's global flags inserted after the program name and its command
/// flags after the command name, so that every flag given on the command line comes later and wins.
fn with_config_flags(args: &[String], command: &str, global: Vec<String>, flags: Vec<String>) -> Vec<String> {
    let mut skip = false;
    let mut pos = None;
    for (k, a) in args.iter().enumerate().skip(1) {
        if skip {
            skip = false;
            continue;
        }
        if GLOBAL_VALUE_FLAGS.contains(&a.as_str()) {
            skip = true;
            continue;
        }
        if a == command {
            pos = Some(k);
            break;
        }
    }
    let mut out = args.to_vec();
    if let Some(k) = pos {
        out.splice(k + 1..k + 1, flags);
    }
    out.splice(1..1, global);
    out
}

/// The command tree, with later occurrences of a flag replacing earlier ones.
fn command() -> clap::Command {
    let mut cmd = Cli::command().args_override_self(true);
    let names: Vec<String> = cmd.get_subcommands().map(|s| s.get_name().to_string()).collect();
    for name in names {
        cmd = cmd.mut_subcommand(name, |s| s.args_override_self(true));
    }
    cmd
}

fn parse(args: &[String]) -> Result<Cli, clap::Error> {
    let matches = command().try_get_matches_from(args)?;
    Cli::from_arg_matches(&matches)
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let mut cli = match parse(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    if let Some(path) = cli.config.clone() {
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: cannot read config {}: {e}", path.display());
                return ExitCode::from(EXIT_USAGE);
            }
        };
        let file = match config::ConfigFile::parse(&text) {
            Ok(f) => f,
            Err(e) => {
                eprintln!("error: config {}: {e}", path.display());
                return ExitCode::from(EXIT_USAGE);
            }
        };
        let name = cli.command.name();
        let merged = with_config_flags(&args, name, file.flags_for("global"), file.flags_for(name));
        cli = match parse(&merged) {
            Ok(c) => c,
            Err(e) => {
                let _ = e.print();
                return ExitCode::from(EXIT_USAGE);
            }
        };
    }
    if let Some(n) = cli.workers {
        if n == 0 {
            eprintln!("error: --workers must be at least 1");
            return ExitCode::from(EXIT_USAGE);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(EXIT_INTERNAL);
        }
    }
    ExitCode::from(commands::execute(&cli))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn argv(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn config_flags_go_after_the_command() {
        let a = argv("eulerprim --seed 7 --output ec ec --level 0.5");
        let merged = with_config_flags(&a, "ec", argv("--seed 9"), argv("--level 0.3 --method cubical"));
        assert_eq!(merged, argv("eulerprim --seed 9 --seed 7 --output ec ec --level 0.3 --method cubical --level 0.5"));
        let cli = parse(&merged).unwrap();
        assert_eq!(cli.seed, 7);
        match cli.command {
            Command::Ec(e) => {
                assert_eq!(e.level, "0.5");
                assert_eq!(e.method, "cubical");
            }
            _ => panic!("wrong command"),
        }
    }

    #[test]
    fn cli_definition_is_consistent() {
        command().debug_assert();
    }
}
