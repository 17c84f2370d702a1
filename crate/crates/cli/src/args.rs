use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "instnorm", version, about = "Check, verify, ground and plan robot institutions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, value_enum, default_value_t = OutputMode::Human, global = true)]
    pub output: OutputMode,

    /// Write the result to this file instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputMode {
    Human,
    Structured,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether a grounding is admissible.
    Check {
        #[command(flatten)]
        spec: SpecFiles,
        #[arg(short = 'g', long = "grounding", value_name = "GRD")]
        grounding: PathBuf,
    },
    /// Decide whether a trajectory adheres to the institution.
    Verify {
        #[command(flatten)]
        spec: SpecFiles,
        #[arg(short = 'g', long = "grounding", value_name = "GRD")]
        grounding: PathBuf,
        #[arg(short = 't', long = "trajectory", value_name = "TRJ")]
        trajectory: PathBuf,
    },
    /// Enumerate admissible groundings.
    Ground {
        #[command(flatten)]
        spec: SpecFiles,
        /// Stop after this many groundings.
        #[arg(long)]
        limit: Option<usize>,
        /// Ground every act to all behaviors and every art to all objects.
        #[arg(long)]
        maximal: bool,
        /// Grounding fragment whose relations are kept fixed.
        #[arg(long, value_name = "GRD")]
        fix: Option<PathBuf>,
    },
    /// Synthesize an adherent trajectory.
    Plan {
        #[command(flatten)]
        spec: SpecFiles,
        /// Plan under this grounding instead of searching for one.
        #[arg(short = 'g', long = "grounding", value_name = "GRD", conflicts_with = "fix")]
        grounding: Option<PathBuf>,
        /// Grounding fragment whose relations are kept fixed.
        #[arg(long, value_name = "GRD")]
        fix: Option<PathBuf>,
        #[arg(long, num_args = 2, value_names = ["START", "END"], required = true, allow_negative_numbers = true)]
        horizon: Vec<i64>,
        #[arg(long, default_value_t = instnorm::planner::DEFAULT_MAX_SEGMENTS)]
        max_segments: usize,
    },
    /// Print a spec file in canonical form.
    Fmt {
        /// A .inst, .dom, .grd or .trj file.
        file: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct SpecFiles {
    #[arg(short = 'i', long = "institution", value_name = "INST")]
    pub institution: PathBuf,
    #[arg(short = 'd', long = "domain", value_name = "DOM")]
    pub domain: PathBuf,
}
