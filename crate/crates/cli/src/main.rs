//! `cohdist`: analyze states, compute distillation yields, synthesize
//! channels, and work the majorization lattice from the command line.
//!
//! Exit codes: 0 success, 2 parse/validation failure, 3 dimension overflow,
//! 4 infeasible transformation (the verdict is still printed).

mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cohdist_core::{
    assemble_distillation_channel, can_transform_to, join, majorizes, meet, n_max, DensityMatrix,
    Error as CoreError, ProbVector, PureState,
};

use report::{AnalyzeReport, ChannelExport, LatticeReport, TransformReport};

#[derive(Parser)]
#[command(
    name = "cohdist",
    version,
    about = "Deterministic coherence distillation under strictly incoherent operations"
)]
struct Cli {
    /// Absolute tolerance for structural comparisons (must lie in (0, 1e-3))
    #[arg(long, global = true, env = "COHDIST_TOL", default_value_t = 1e-9)]
    tol: f64,

    /// Cap on the tensored dimension
    #[arg(long = "dim-cap", global = true, default_value_t = 8192)]
    dim_cap: usize,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Block decomposition, comparison-matrix summary, and candidate classes
    Analyze {
        /// Density-matrix JSON file
        statefile: PathBuf,
    },
    /// Maximum number of 2-level maximally coherent states extractable from
    /// the tensor product of the inputs
    Distill {
        /// Density-matrix JSON files
        #[arg(required = true)]
        statefiles: Vec<PathBuf>,
    },
    /// Feasibility of converting a state into a pure target, with optional
    /// channel export
    Transform {
        /// Density-matrix JSON file
        statefile: PathBuf,
        /// Pure-state JSON file
        targetfile: PathBuf,
        /// Write the synthesized channel (verified first) to this path
        #[arg(long = "export-channel")]
        export_channel: Option<PathBuf>,
    },
    /// Majorization order and lattice operations on distribution files
    Lattice {
        #[command(subcommand)]
        op: LatticeOp,
    },
}

#[derive(Subcommand)]
enum LatticeOp {
    /// Does the first distribution majorize the second?
    Majorize { a: PathBuf, b: PathBuf },
    /// Greatest lower bound of the given distributions
    Meet {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Least upper bound of the given distributions
    Join {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<CoreError> for Failure {
    fn from(err: CoreError) -> Self {
        let code = match err {
            CoreError::DimensionOverflow { .. } => 3,
            CoreError::NotTransformable => 4,
            CoreError::NotHermitian { .. }
            | CoreError::NotPsd { .. }
            | CoreError::TraceNotOne { .. }
            | CoreError::InvalidDistribution { .. }
            | CoreError::InvalidPureState { .. }
            | CoreError::InvalidPermutation { .. }
            | CoreError::InvalidProjector { .. }
            | CoreError::DimensionMismatch { .. }
            | CoreError::Parse { .. } => 2,
            _ => 1,
        };
        Failure::new(code, err.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if !(cli.tol > 0.0 && cli.tol < 1e-3) {
        return Err(Failure::new(
            2,
            format!("tol = {} must lie in (0, 1e-3)", cli.tol),
        ));
    }
    if cli.dim_cap < 2 {
        return Err(Failure::new(
            2,
            format!("dim-cap = {} must be at least 2", cli.dim_cap),
        ));
    }
    let tol = cli.tol;
    match cli.command {
        Command::Analyze { statefile } => {
            let rho = read_density(&statefile, tol)?;
            let report = AnalyzeReport::build(&rho, tol)?;
            emit(cli.format, &report, |r| r.render_text(tol))
        }
        Command::Distill { statefiles } => {
            let states = statefiles
                .iter()
                .map(|p| read_density(p, tol))
                .collect::<Result<Vec<_>, _>>()?;
            let report = n_max(&states, tol, cli.dim_cap)?;
            emit(cli.format, &report, report::render_distillation_text)
        }
        Command::Transform {
            statefile,
            targetfile,
            export_channel,
        } => {
            let rho = read_density(&statefile, tol)?;
            let target = read_pure(&targetfile, tol)?;
            let verdict = can_transform_to(&rho, &target, tol)?;
            let feasible = verdict.feasible;
            let channel = if feasible {
                export_channel
                    .map(|path| export_verified_channel(&rho, &target, tol, &path))
                    .transpose()?
            } else {
                None
            };
            let report = TransformReport { verdict, channel };
            emit(cli.format, &report, TransformReport::render_text)?;
            if feasible {
                Ok(())
            } else {
                Err(Failure::new(4, "transformation is infeasible"))
            }
        }
        Command::Lattice { op } => {
            let report = match op {
                LatticeOp::Majorize { a, b } => {
                    let a = read_distribution(&a, tol)?;
                    let b = read_distribution(&b, tol)?;
                    LatticeReport::verdict("majorize", majorizes(&a, &b, tol))
                }
                LatticeOp::Meet { files } => {
                    let set = read_distributions(&files, tol)?;
                    LatticeReport::vector("meet", meet(&set))
                }
                LatticeOp::Join { files } => {
                    let set = read_distributions(&files, tol)?;
                    LatticeReport::vector("join", join(&set))
                }
            };
            emit(cli.format, &report, LatticeReport::render_text)
        }
    }
}

fn emit<T: serde::Serialize>(
    format: Format,
    report: &T,
    text: impl Fn(&T) -> String,
) -> Result<(), Failure> {
    match format {
        Format::Json => {
            let rendered =
                serde_json::to_string_pretty(report).map_err(|e| Failure::new(1, e.to_string()))?;
            println!("{rendered}");
        }
        Format::Text => print!("{}", text(report)),
    }
    Ok(())
}

/// Synthesizes the channel, re-verifies it by application before anything is
/// written, and only then exports it.
fn export_verified_channel(
    rho: &DensityMatrix,
    target: &PureState,
    tol: f64,
    path: &Path,
) -> Result<ChannelExport, Failure> {
    let channel = assemble_distillation_channel(rho, target, tol)?;
    let out = channel.apply(&rho.embedded(channel.input_dim()))?;
    let want = DensityMatrix::from_pure(&target.padded(channel.output_dim()));
    let deviation = out.matrix().frobenius_distance(want.matrix());
    if deviation > 1e-9 {
        return Err(Failure::new(
            1,
            format!("synthesized channel failed verification: output strays {deviation:.3e}"),
        ));
    }
    std::fs::write(path, channel.to_json())
        .map_err(|e| Failure::new(1, format!("cannot write {}: {e}", path.display())))?;
    Ok(ChannelExport {
        exported_to: path.display().to_string(),
        kraus_count: channel.kraus().len(),
        verified_deviation: deviation,
    })
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::new(2, format!("cannot read {}: {e}", path.display())))
}

fn read_density(path: &Path, tol: f64) -> Result<DensityMatrix, Failure> {
    DensityMatrix::parse_json(&read_text(path)?, tol)
        .map_err(|e| Failure::new(2, format!("{}: {e}", path.display())))
}

fn read_pure(path: &Path, tol: f64) -> Result<PureState, Failure> {
    PureState::parse_json(&read_text(path)?, tol)
        .map_err(|e| Failure::new(2, format!("{}: {e}", path.display())))
}

fn read_distribution(path: &Path, tol: f64) -> Result<ProbVector, Failure> {
    ProbVector::parse_json(&read_text(path)?, tol)
        .map_err(|e| Failure::new(2, format!("{}: {e}", path.display())))
}

fn read_distributions(paths: &[PathBuf], tol: f64) -> Result<Vec<ProbVector>, Failure> {
    paths.iter().map(|p| read_distribution(p, tol)).collect()
}
