mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use subcrit::classes::{ClassName, Param};
use subcrit::oracle::Connectivity;
use subcrit::singular::Target;
use subcrit::Flavor;

use output::Format;

/// Counting, growth constants and limit laws for subcritical graph classes.
#[derive(Parser, Debug)]
#[command(name = "subcrit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Working precision in bits.
    #[arg(long, global = true, default_value_t = 256, value_parser = clap::value_parser!(u32).range(64..=4096))]
    prec: u32,
}

#[derive(Args, Debug, Clone)]
struct ClassArgs {
    #[arg(long, required_unless_present = "spec")]
    class: Option<ClassName>,
    #[arg(long, default_value = "labelled")]
    flavor: Flavor,
    /// A spec file defining a user class, used instead of --class.
    #[arg(long, conflicts_with = "class")]
    spec: Option<PathBuf>,
    /// Variable to report for --spec classes (default: first exposed).
    #[arg(long, requires = "spec")]
    var: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Rooted,
    Connected,
    All,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Coefficient table of a class's generating function.
    Coeffs {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long, value_enum, default_value = "rooted")]
        kind: Kind,
        #[arg(short = 'N', default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
    },
    /// Radius of convergence and growth constant, optionally along a schedule of orders.
    Growth {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long, default_value = "graphs")]
        target: Target,
        #[arg(short = 'N', conflicts_with = "schedule", value_parser = clap::value_parser!(u32).range(1..))]
        n: Option<u32>,
        /// Comma-separated, strictly increasing truncation orders.
        #[arg(long, value_delimiter = ',')]
        schedule: Option<Vec<usize>>,
    },
    /// Mean and variance constants of a builtin parameter.
    Limitlaw {
        #[arg(long)]
        class: ClassName,
        #[arg(long, default_value = "labelled")]
        flavor: Flavor,
        #[arg(long)]
        param: Param,
        /// Truncation order of the unlabelled perturbation route.
        #[arg(short = 'N', value_parser = clap::value_parser!(u32).range(1..))]
        n: Option<u32>,
    },
    /// Limiting root-degree distribution of a labelled class.
    Degree {
        #[arg(long)]
        class: ClassName,
        #[arg(long, default_value = "labelled")]
        flavor: Flavor,
        /// Degree cap.
        #[arg(short = 'K', default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
        cap: u32,
        /// Also run the central limit theorem for degree-k vertices.
        #[arg(short = 'k', value_parser = clap::value_parser!(u32).range(1..))]
        k: Option<u32>,
    },
    /// Exhaustive census of a class at a fixed order.
    Oracle {
        #[arg(long)]
        class: ClassName,
        #[arg(short = 'N', default_value_t = 6)]
        n: usize,
        #[arg(long, default_value = "connected")]
        kind: Connectivity,
        /// Cache directory; SUBCRIT_CACHE takes precedence.
        #[arg(long, default_value = ".subcrit-cache")]
        cache_dir: PathBuf,
        #[arg(long)]
        no_cache: bool,
    },
    /// Run the acceptance criteria (all, or the listed ids).
    Check {
        ids: Vec<u8>,
        /// Exit 0 when every failure is a documented known failure.
        #[arg(long)]
        allow_known: bool,
    },
    /// Print, check or export class specifications.
    Spec {
        #[arg(long)]
        class: Option<ClassName>,
        #[arg(long, default_value = "labelled")]
        flavor: Flavor,
        /// Parse, validate and reprint this file.
        #[arg(long, conflicts_with = "class")]
        spec: Option<PathBuf>,
        /// Write every builtin as DIR/<class>-<flavor>.spec.
        #[arg(long, value_name = "DIR", conflicts_with_all = ["class", "spec"])]
        emit: Option<PathBuf>,
    },
}

pub enum Failure {
    Usage(String),
    Compute(String),
    Acceptance(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Compute(_) => 3,
            Failure::Acceptance(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Compute(m) | Failure::Acceptance(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("subcrit: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
