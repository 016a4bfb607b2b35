//! `fpshift`: batch driver for the conjugacy, tricolor, exact example and
//! cylinder orbit checks. Reports are JSON on stdout (or `--out`); exit code
//! 0 means every check passed, 1 an input or certification error, 2 a
//! failed verification.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fpshift_core::sampling::DEFAULT_SEED;

#[derive(Parser, Debug)]
#[command(name = "fpshift", version, about = "Rebuild group shifts from fixed-point free maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample-certify a map and print the certificate.
    Certify(MapArgs),
    /// Build the conjugacy and group, then check the group laws and the shift identity.
    Rebuild(SampledArgs),
    /// Emit the three-colour block decomposition and check it.
    Tricolor(SampledArgs),
    /// Build the exact rational example and run its checks.
    Qexample(QexampleArgs),
    /// Orbit of the cylinder map and its accumulation statistics.
    Orbit3(Orbit3Args),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct OutputArgs {
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct MapArgs {
    /// Map expression in `x`, e.g. "x + 0.5 + 0.4*sin(x)".
    #[arg(long = "f", value_name = "EXPR", required_unless_present = "f_file", conflicts_with = "f_file")]
    pub f: Option<String>,
    /// File with one expression per line; blank lines and `#` comments are skipped.
    #[arg(long = "f-file", value_name = "PATH")]
    pub f_file: Option<PathBuf>,
    /// Skip sampling and take the displacement sign from f(0).
    #[arg(long)]
    pub assume_certified: bool,
    /// Half-width of the certification grid.
    #[arg(long, default_value_t = 100.0)]
    pub grid_half_width: f64,
    #[arg(long, default_value_t = 10_000)]
    pub grid_points: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct SampledArgs {
    #[command(flatten)]
    pub map: MapArgs,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Sampling range; for `tricolor` also the range of emitted blocks.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    pub range: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
pub struct QexampleArgs {
    #[arg(long, default_value_t = 6)]
    pub depth: usize,
    /// Longest period looked for in the periodic-point scan.
    #[arg(long, default_value_t = 8)]
    pub max_period: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct Orbit3Args {
    /// Number of steps; the orbit has n + 1 points.
    #[arg(long, default_value_t = 10_000)]
    pub n: usize,
    /// Witness thresholds for the closest pair.
    #[arg(long, num_args = 1.., default_values_t = [0.01])]
    pub eps: Vec<f64>,
    #[arg(long, num_args = 3, value_names = ["X", "Y", "Z"], allow_negative_numbers = true)]
    pub start: Option<Vec<f64>>,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Certify(args) => commands::certify(args),
        Command::Rebuild(args) => commands::rebuild(args),
        Command::Tricolor(args) => commands::tricolor(args),
        Command::Qexample(args) => commands::qexample(args),
        Command::Orbit3(args) => commands::orbit3(args),
    };
    match result {
        Ok(status) => status.into(),
        Err(e) => {
            eprintln!("fpshift: {e:#}");
            commands::Status::InputError.into()
        }
    }
}
