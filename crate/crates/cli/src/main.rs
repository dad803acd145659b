mod commands;
mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use corrcalc::fincat::DEFAULT_CAP;

#[derive(Parser)]
#[command(name = "corrcalc", version, about = "Exact checks on finite categories, spans and correspondences")]
pub struct Cli {
    /// Bound on every enumeration.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP as u64, value_parser = clap::value_parser!(u64).range(1..))]
    pub cap: u64,
    /// Write the report (or diagram, or bicategory) here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Report format; diagrams are always DOT.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Side {
    Left,
    Right,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum VarianceArg {
    Covariant,
    Contravariant,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum MarkingArg {
    None,
    All,
}

#[derive(Subcommand)]
pub enum Command {
    /// Write a built-in category as fincat-v1.
    Fixture {
        /// one, arrow, p2, iso, discrete2, chainN or fsN.
        name: String,
        /// Mark every morphism, or only identities.
        #[arg(long, value_enum)]
        marked: Option<MarkingArg>,
        /// Mark exactly these morphisms (plus identities).
        #[arg(long, value_delimiter = ',', conflicts_with = "marked")]
        mark: Option<Vec<String>>,
    },
    /// Validate the category laws.
    CheckCategory {
        #[arg(long)]
        input: PathBuf,
    },
    /// Validate that the marking contains identities and is closed.
    CheckMarking {
        #[arg(long)]
        input: PathBuf,
    },
    /// Decide whether pullbacks of marked maps exist and are marked.
    CheckBaseChange {
        #[arg(long)]
        input: PathBuf,
    },
    /// Search for an adjoint of a functor.
    FindAdjoint {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Side::Right)]
        side: Side,
    },
    /// Compute the mate of a square of functors.
    Mate {
        #[arg(long)]
        input: PathBuf,
    },
    /// Decide whether a square of functors is Beck-Chevalley.
    CheckBc {
        #[arg(long)]
        input: PathBuf,
    },
    /// Build the bicategory of correspondences and write it as bicat-v1.
    BuildCorr {
        #[arg(long)]
        input: PathBuf,
    },
    /// Compose two spans given as `wrong/right` morphism names.
    ComposeSpans {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        first: String,
        #[arg(long)]
        second: String,
    },
    /// Integrate a family and check the round trip through fibre transport.
    Grothendieck {
        #[arg(long)]
        input: PathBuf,
    },
    /// Find (co)Cartesian lifts for a projection over its target's marking.
    CheckFibration {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = VarianceArg::Contravariant)]
        variance: VarianceArg,
    },
    /// Check the span category over the product of feet is twisted bi-Cartesian.
    CheckTwisted {
        #[arg(long)]
        input: PathBuf,
    },
    /// Check a family for right adjoints and base change.
    CheckBivariant {
        /// A marked category (slice family) or a family file.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        family: Option<PathBuf>,
    },
    /// Extend a bivariant family along the correspondences and check it.
    Spex {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        family: Option<PathBuf>,
    },
    /// Enumerate transformations out of a corepresentable and evaluate.
    YonedaCheck {
        #[arg(long)]
        input: PathBuf,
        /// Object at which to evaluate.
        #[arg(long)]
        at: String,
        /// Family file; defaults to the corepresentable at `--at`.
        #[arg(long)]
        family: Option<PathBuf>,
        /// A bicat-v1 file from `build-corr` to check against.
        #[arg(long)]
        corr: Option<PathBuf>,
    },
    /// Compare extensions to correspondences with bivariant functors.
    Universality {
        #[arg(long)]
        input: PathBuf,
        /// Target bicategory as bicat-v1; defaults to the point and the arrow.
        #[arg(long)]
        target: Option<PathBuf>,
    },
    /// Check the evaluation and coevaluation zigzags of an object.
    SelfDual {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        at: String,
    },
    /// Reindexing on powers of a category with finite products.
    CartesianMonoidal {
        #[arg(long)]
        input: PathBuf,
        /// Largest finite set.
        #[arg(long, default_value_t = 3)]
        size: usize,
    },
    /// Render a category, a span or the category of spans.
    Dot {
        #[arg(long)]
        input: PathBuf,
        /// Render this `wrong/right` span as a roof.
        #[arg(long, conflicts_with = "spans")]
        span: Option<String>,
        /// Render the category of all spans.
        #[arg(long)]
        spans: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    ExitCode::from(commands::run(&cli))
}
