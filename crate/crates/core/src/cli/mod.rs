//! The `faim` command line.
//!
//! Exit codes: 0 on success, 2 for usage and configuration problems, 3 when
//! the data itself cannot be processed (degenerate classes, malformed rows).

mod commands;
mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};

pub use config::{
    load_theta_file, parse_theta_file, parse_theta_triple, resolve_schema, RunConfig, SchemaConfig, ThetaEntry,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;

/// Seed used by `synth` when neither flag nor config sets one.
pub const DEFAULT_SEED: u64 = 42;
/// Grid stepsize used when neither flag nor config sets one.
pub const DEFAULT_STEPSIZE: f64 = 0.01;

#[derive(Debug, Parser)]
#[command(name = "faim", version, about = "Fairness post-processing by optimal transport of scores")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate the two-group bivariate-normal dataset.
    Synth(SynthArgs),
    /// Convert the ProPublica two-year COMPAS export into a dataset CSV.
    PrepareCompas(PrepareCompasArgs),
    /// Fit FAIM, apply it, and write fair scores, the model and transport maps.
    Run(RunArgs),
    /// Compare classification metrics of two scored files.
    Evaluate(EvaluateArgs),
    /// Write histograms and transport maps as TSV for plotting.
    ExportPlots(ExportPlotsArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct SchemaArgs {
    #[arg(long)]
    pub id_col: Option<String>,
    #[arg(long)]
    pub group_col: Option<String>,
    #[arg(long)]
    pub score_col: Option<String>,
    #[arg(long)]
    pub label_col: Option<String>,
    /// Identify rows by position instead of an id column.
    #[arg(long)]
    pub no_id: bool,
}

impl SchemaArgs {
    fn as_config(&self) -> SchemaConfig {
        SchemaConfig {
            id: self.id_col.clone(),
            group: self.group_col.clone(),
            score: self.score_col.clone(),
            label: self.label_col.clone(),
        }
    }
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    /// Number of individuals.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct PrepareCompasArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    /// sex, race or age_cat.
    #[arg(long, default_value = "sex")]
    pub dimension: String,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    #[arg(long)]
    pub stepsize: Option<f64>,
    /// TOML file with one `[group]` table of `a`, `b`, `c` per group.
    #[arg(long)]
    pub thetas: Option<PathBuf>,
    /// The same `a,b,c` weights for every group.
    #[arg(long, conflicts_with = "thetas")]
    pub theta: Option<String>,
    /// Min-max rescale input scores onto [0, 1].
    #[arg(long)]
    pub normalize: bool,
    #[command(flatten)]
    pub schema: SchemaArgs,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub before: PathBuf,
    #[arg(long)]
    pub after: PathBuf,
    /// Predicted positive iff score >= threshold.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Also report each raw-score bin separately.
    #[arg(long)]
    pub per_score: bool,
    /// Bin width for --per-score.
    #[arg(long)]
    pub stepsize: Option<f64>,
    /// Where to write report CSVs; only the text table is printed when absent.
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    #[command(flatten)]
    pub schema: SchemaArgs,
}

#[derive(Debug, Args)]
pub struct ExportPlotsArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    #[arg(long)]
    pub normalize: bool,
    #[command(flatten)]
    pub schema: SchemaArgs,
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_)
        | Error::MissingTheta(_)
        | Error::UnknownGroup(_)
        | Error::InvalidTheta { .. }
        | Error::InvalidGrid(_)
        | Error::InvalidCovariance(_)
        | Error::InvalidInterpolation(_)
        | Error::InvalidWeights(_)
        | Error::MissingColumn(_)
        | Error::EmptyDataset
        | Error::Io { .. } => EXIT_USAGE,
        _ => EXIT_DATA,
    }
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Synth(a) => commands::synth(a, out),
        Command::PrepareCompas(a) => commands::prepare_compas(a, out),
        Command::Run(a) => commands::run(a, out),
        Command::Evaluate(a) => commands::evaluate(a, out),
        Command::ExportPlots(a) => commands::export_plots(a, out),
    }
}

/// Parse `args`, run the command and return the process exit code.
pub fn main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(&cli, &mut lock) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
