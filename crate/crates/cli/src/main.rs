//! `biphasic`: command-line front end for the biphasic unconfined-compression model.

mod commands;
mod error;
mod table;
mod units;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "biphasic", version, about = "Linear biphasic unconfined compression: kernels, moduli, responses")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Roots of the two characteristic equations.
    #[command(allow_negative_numbers = true)]
    Roots(RootsArgs),
    /// Relaxation and creep functions on a time grid.
    #[command(allow_negative_numbers = true)]
    Kernel(KernelArgs),
    /// Storage/loss moduli, compliances and incomplete moduli on a frequency grid.
    #[command(allow_negative_numbers = true)]
    Moduli(ModuliArgs),
    /// Time trace of one loading protocol.
    #[command(allow_negative_numbers = true)]
    Simulate(SimulateArgs),
    /// Half-sine test summary (peaks, contact duration) over a frequency grid.
    #[command(allow_negative_numbers = true)]
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Alpha,
    Beta,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpacingArg {
    Log,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProtocolArg {
    CyclicDisplacement,
    CyclicForce,
    HalfsineDisplacement,
    HalfsineForce,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Output format.
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Output file (standard output when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Leave the generation timestamp out of the metadata header.
    #[arg(long)]
    pub no_timestamp: bool,
}

#[derive(Debug, Args)]
pub struct Truncation {
    /// Number of series terms per spectrum.
    #[arg(short = 'n', long = "n-terms", env = "BIPHASIC_N_TERMS", default_value_t = 200)]
    pub n_terms: usize,
}

/// Material given by a JSON file or by flags; lengths accept m/mm/um,
/// moduli accept pa/kpa/mpa/gpa suffixes.
#[derive(Debug, Args)]
pub struct MaterialArgs {
    /// JSON material file (SI units).
    #[arg(long, conflicts_with_all = ["mu", "lambda", "youngs", "k_perm", "radius", "height"])]
    pub config: Option<PathBuf>,
    /// Shear Lamé constant μ_s.
    #[arg(long, requires = "lambda")]
    pub mu: Option<String>,
    /// Lamé constant λ_s (`inf` for an incompressible matrix).
    #[arg(long)]
    pub lambda: Option<String>,
    /// Young's modulus E_s (use with --nu).
    #[arg(long, conflicts_with_all = ["mu", "lambda"], requires = "nu")]
    pub youngs: Option<String>,
    /// Poisson ratio ν_s (with --youngs).
    #[arg(long)]
    pub nu: Option<f64>,
    /// Permeability k (m⁴/(N·s)).
    #[arg(long)]
    pub k_perm: Option<String>,
    /// Specimen radius a.
    #[arg(long)]
    pub radius: Option<String>,
    /// Sample thickness h.
    #[arg(long)]
    pub height: Option<String>,
}

#[derive(Debug, Args)]
pub struct RootsArgs {
    /// Poisson ratio ν_s.
    #[arg(long)]
    pub nu: f64,
    #[command(flatten)]
    pub truncation: Truncation,
    /// Which characteristic equation.
    #[arg(long, value_enum, default_value = "both")]
    pub family: FamilyArg,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    #[command(flatten)]
    pub material: MaterialArgs,
    #[command(flatten)]
    pub truncation: Truncation,
    /// Dimensionless times `start:step:end` or a list.
    #[arg(long, conflicts_with = "t")]
    pub t_hat: Option<String>,
    /// Times in seconds `start:step:end` or a list.
    #[arg(long)]
    pub t: Option<String>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct FrequencyArgs {
    /// Frequencies in Hz: `start:step:end`, a list, or a single value.
    #[arg(long, conflicts_with_all = ["omega", "fmin"])]
    pub freq: Option<String>,
    /// Angular frequencies in rad/s: `start:step:end`, a list, or a single value.
    #[arg(long, conflicts_with = "fmin")]
    pub omega: Option<String>,
    /// Lowest frequency (Hz) of a generated grid.
    #[arg(long, requires = "fmax")]
    pub fmin: Option<f64>,
    /// Highest frequency (Hz) of a generated grid.
    #[arg(long)]
    pub fmax: Option<f64>,
    /// Points of a generated grid.
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    /// Spacing of a generated grid.
    #[arg(long, value_enum, default_value = "log")]
    pub spacing: SpacingArg,
}

#[derive(Debug, Args)]
pub struct ModuliArgs {
    #[command(flatten)]
    pub material: MaterialArgs,
    #[command(flatten)]
    pub truncation: Truncation,
    #[command(flatten)]
    pub frequency: FrequencyArgs,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub material: MaterialArgs,
    #[command(flatten)]
    pub truncation: Truncation,
    /// Loading protocol.
    #[arg(long, value_enum)]
    pub protocol: ProtocolArg,
    /// Loading frequency in Hz.
    #[arg(long, conflicts_with = "omega", required_unless_present = "omega")]
    pub freq: Option<f64>,
    /// Loading angular frequency in rad/s.
    #[arg(long)]
    pub omega: Option<f64>,
    /// Displacement amplitude w0 (displacement protocols).
    #[arg(long, conflicts_with = "f0")]
    pub w0: Option<String>,
    /// Force amplitude F0 (force protocols).
    #[arg(long = "f0", alias = "F0")]
    pub f0: Option<String>,
    /// Pre-offset w1 or F1 (cyclic protocols only).
    #[arg(long, default_value = "0")]
    pub preoffset: String,
    /// Times in seconds `start:step:end` or a list (automatic grid when omitted).
    #[arg(long)]
    pub t: Option<String>,
    /// Points per loading period of the automatic grid.
    #[arg(long, default_value_t = 40)]
    pub per_period: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub material: MaterialArgs,
    #[command(flatten)]
    pub truncation: Truncation,
    #[command(flatten)]
    pub frequency: FrequencyArgs,
    /// Displacement amplitude w0 of the displacement-controlled test.
    #[arg(long, default_value = "1m")]
    pub w0: String,
    /// Force amplitude F0 of the force-controlled test.
    #[arg(long = "f0", alias = "F0", default_value = "1N")]
    pub f0: String,
    #[command(flatten)]
    pub output: Output,
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Io {
                    path: "<stdout>".into(),
                    message: e.to_string(),
                })
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (table, output) = match cli.command {
        Command::Roots(a) => (commands::roots(&a)?, a.output),
        Command::Kernel(a) => (commands::kernel(&a)?, a.output),
        Command::Moduli(a) => (commands::moduli(&a)?, a.output),
        Command::Simulate(a) => (commands::simulate(&a)?, a.output),
        Command::Sweep(a) => (commands::sweep(&a)?, a.output),
    };
    let mut table = table;
    if !output.no_timestamp {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        table.meta("generated_unix", secs);
    }
    let text = match output.format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    };
    emit(&text, &output.out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::usage("arguments", e.render().to_string().trim().to_string());
            eprintln!("{}", err.record());
            return ExitCode::from(err.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
