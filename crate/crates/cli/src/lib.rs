//! Batch front end for analyzing endomorphisms of `Z^m × F_n`.

pub mod commands;
pub mod descriptor;
pub mod error;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use zfree_core::Endomorphism;

use crate::commands::Probe;
use crate::descriptor::{parse_point, Descriptor};
use crate::error::CliError;
use crate::report::{emit, Format, Record};

#[derive(Debug, Parser)]
#[command(name = "zfree", version, about = "Dynamics of endomorphisms of Z^m x F_n and their completions")]
pub struct Cli {
    /// Output as key=value text lines or one JSON object per line.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    /// Step budget for orbit searches.
    #[arg(long, default_value_t = 512)]
    pub budget: usize,
    /// Iterates checked per sample when validating a certificate.
    #[arg(long, default_value_t = 64)]
    pub horizon: usize,
    /// Sample points drawn from a certificate ball (0 skips validation).
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl From<&ProbeArgs> for Probe {
    fn from(a: &ProbeArgs) -> Self {
        Probe { budget: a.budget, horizon: a.horizon, samples: a.samples, seed: a.seed }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full report: uniform continuity, fixed and periodic summaries, listed points.
    Analyze {
        file: PathBuf,
        /// Extra points, in addition to those in the file.
        #[arg(long)]
        point: Vec<String>,
        #[command(flatten)]
        probe: ProbeArgs,
    },
    /// Classify one point as periodic or wandering, or probe its omega-limit.
    ClassifyPoint {
        file: PathBuf,
        #[arg(long)]
        point: String,
        #[command(flatten)]
        probe: ProbeArgs,
    },
    /// Print the trajectory of a point.
    Iterate {
        file: PathBuf,
        #[arg(long)]
        point: String,
        #[arg(long, default_value_t = 8)]
        steps: u64,
    },
    /// Fixed and periodic orbit patterns of the abelian part.
    Orbits { file: PathBuf },
    /// Uniform continuity report with a witness on failure.
    CheckUc { file: PathBuf },
    /// Distance between two points or two words.
    Metric { x: String, y: String },
}

fn load(path: &Path) -> Result<(Descriptor, Endomorphism), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let d = Descriptor::parse(&text)?;
    let e = d.build()?;
    Ok((d, e))
}

pub fn execute(cli: &Cli) -> Result<Vec<Record>, CliError> {
    match &cli.command {
        Command::Analyze { file, point, probe } => {
            let (d, e) = load(file)?;
            let mut points = d.points()?;
            for s in point {
                points.push(parse_point(s)?);
            }
            commands::analyze(&e, &points, probe.into())
        }
        Command::ClassifyPoint { file, point, probe } => {
            let (_, e) = load(file)?;
            Ok(vec![commands::classify(&e, &parse_point(point)?, probe.into())?])
        }
        Command::Iterate { file, point, steps } => {
            let (_, e) = load(file)?;
            commands::iterate(&e, &parse_point(point)?, *steps)
        }
        Command::Orbits { file } => commands::orbits(&load(file)?.1),
        Command::CheckUc { file } => Ok(commands::check_uc(&load(file)?.1)),
        Command::Metric { x, y } => Ok(vec![commands::metric(x, y)?]),
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(&cli) {
        Ok(records) => match emit(out, &records, cli.format) {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(err, "zfree: {e}");
                1
            }
        },
        Err(e) => {
            let _ = writeln!(err, "zfree: {e}");
            e.exit_code()
        }
    }
}
