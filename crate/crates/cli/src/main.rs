//! `netwit` command line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error.

mod commands;
mod rational;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use netwit::catalog::Family;
use netwit::report::{emit_report, Format};
use netwit::Error;

use crate::rational::{Rational, RationalList};

#[derive(Parser, Debug)]
#[command(
    name = "netwit",
    version,
    about = "Entanglement witnesses measured through network states"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Witness operators.
    #[command(subcommand)]
    Witness(WitnessCmd),
    /// Network states.
    #[command(subcommand)]
    Network(NetworkCmd),
    /// Structural checks.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Detection runs.
    #[command(subcommand)]
    Protocol(ProtocolCmd),
    /// Searches.
    #[command(subcommand)]
    Scan(ScanCmd),
    /// Graph-state witnesses.
    #[command(subcommand)]
    Graph(GraphCmd),
}

#[derive(Subcommand, Debug)]
enum WitnessCmd {
    /// Build a witness and estimate its product-state floor.
    Build {
        #[command(flatten)]
        fam: FamilyArgs,
        /// Seesaw restarts for the separability floor (0 skips it).
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Subcommand, Debug)]
enum NetworkCmd {
    /// Build a network state and check what it reconstructs.
    Build {
        #[command(flatten)]
        fam: FamilyArgs,
        /// Leave the state matrix out of the report.
        #[arg(long)]
        no_matrix: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Subcommand, Debug)]
enum VerifyCmd {
    /// Compare tr₃[N(η𝟙 − |r⟩⟨r|)] with the scaled transposed target.
    Reconstruction {
        #[command(flatten)]
        fam: FamilyArgs,
        /// Threshold used in the contraction; defaults to the network's own.
        #[arg(long)]
        eta: Option<Rational>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Partial-transpose spectrum of the network state across every cut.
    Ppt {
        #[command(flatten)]
        fam: FamilyArgs,
        /// Cut that must be PPT (label like A2A3:B2B3, or `all`). Repeatable.
        #[arg(long = "require-ppt")]
        require_ppt: Vec<String>,
        /// Cut that must not be PPT. Repeatable.
        #[arg(long = "require-npt")]
        require_npt: Vec<String>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Subcommand, Debug)]
enum ProtocolCmd {
    /// Exact post-selected readout.
    Run {
        #[command(flatten)]
        fam: FamilyArgs,
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Finite-shot sampling of the same readout.
    Shots {
        #[command(flatten)]
        fam: FamilyArgs,
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        shots: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Subcommand, Debug)]
enum ScanCmd {
    /// Search Bell-diagonal qutrit states that are PPT yet seen by the Choi witness.
    ChoiBoundEntangled {
        #[arg(long, default_value_t = 40, value_parser = clap::value_parser!(u64).range(1..=400))]
        resolution: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Subcommand, Debug)]
enum GraphCmd {
    /// Graph witness, network and readout on the graph state itself.
    Demo {
        /// JSON file `{"n": 4, "edges": [[1,2],[2,3],[3,4]]}`; defaults to the four-vertex cluster.
        #[arg(long)]
        graph: Option<PathBuf>,
        /// Comma-separated label bitstrings; defaults to the cluster label set.
        #[arg(long)]
        labels: Option<String>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args, Debug)]
struct FamilyArgs {
    /// two-qubit, decomposable, flip, pbd, reduction, choi, breuer-hall, ghz, cl4.
    #[arg(long)]
    family: Family,
    /// Local dimension.
    #[arg(long)]
    d: Option<usize>,
    /// λ vector for pbd, e.g. 2/3,1/3,0.
    #[arg(long)]
    lambda: Option<RationalList>,
    /// Seed for random inputs (decomposable Q, random states, shots).
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct StateArgs {
    /// psi-minus, phi-plus, ghz, cluster, mixed, random, random-pure.
    #[arg(long, default_value = "random")]
    state: String,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Report path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        }
    }
}

/// Core errors that stem from bad flag values rather than failed checks.
fn is_usage(e: &Error) -> bool {
    matches!(
        e,
        Error::InvalidArgument(_)
            | Error::InvalidLambda(_)
            | Error::InvalidDimension(_)
            | Error::InvalidDims(_)
            | Error::OddDimension(_)
            | Error::InvalidGraph(_)
            | Error::InvalidLabelSet(_)
            | Error::ZeroThreshold
            | Error::DimensionMismatch(_)
    )
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let (report, out) = match commands::dispatch(cli.cmd) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("netwit: {e}");
            return ExitCode::from(if is_usage(&e) { 2 } else { 1 });
        }
    };
    let format = Format::from(out.format);
    let written = match &out.out {
        Some(path) => emit_report(&report, path, format),
        None => report.render(format).map(|s| print!("{s}")),
    };
    if let Err(e) = written {
        eprintln!("netwit: {e}");
        return ExitCode::from(1);
    }
    if report.ok {
        ExitCode::SUCCESS
    } else {
        eprintln!("netwit: verification failed");
        ExitCode::from(1)
    }
}
