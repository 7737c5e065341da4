use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use sepface::Tolerance;
use sepface_cli::commands::{self, CheckKind};
use sepface_cli::{CliError, Outcome};

/// Product vectors, general position, GUPB checks and rank-four PPT entangled states.
///
/// Exit status: 0 when the checked property holds, 1 when it fails, 2 on usage or
/// input errors.
#[derive(Parser)]
#[command(name = "sepface", version)]
struct Cli {
    /// Relative singular-value cutoff for numerical rank.
    #[arg(long, global = true, default_value_t = Tolerance::default().rank_rel)]
    tol_rank: f64,
    /// Eigenvalue floor for positive semidefiniteness.
    #[arg(long, global = true, default_value_t = Tolerance::default().psd_abs)]
    tol_psd: f64,
    /// Residual bound for subspace membership.
    #[arg(long, global = true, default_value_t = Tolerance::default().residual_abs)]
    tol_residual: f64,
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Gp,
    Gupb,
    Independence,
    StateIndependence,
}

#[derive(Subcommand)]
enum Command {
    /// Check a property of the product vectors in a vector file.
    Check { kind: Kind, file: PathBuf },
    /// Enumerate the product vectors of a subspace of a two- or three-qubit space.
    Enumerate {
        file: PathBuf,
        /// Use the orthogonal complement of the span.
        #[arg(long)]
        complement: bool,
        /// Write the product vectors found as a vector file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify that the pure states of the vectors span a simplicial face.
    Face { file: PathBuf },
    /// Build or verify rank-four PPT entangled edge states.
    Pptes {
        #[command(subcommand)]
        command: PptesCommand,
    },
    /// Bundled examples.
    Example {
        #[command(subcommand)]
        command: ExampleCommand,
    },
}

#[derive(Subcommand)]
enum PptesCommand {
    /// Build the boundary state from six product vectors spanning five dimensions.
    Build {
        file: PathBuf,
        /// Five positive weights for the non-distinguished vectors.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        weights: Option<Vec<f64>>,
        /// Write the state as a state file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Which vector (1 to 6) is subtracted; defaults to the last.
        #[arg(long)]
        distinguished: Option<usize>,
    },
    /// Verify a three-qubit state file.
    Verify { file: PathBuf },
}

#[derive(Subcommand)]
enum ExampleCommand {
    List,
    /// Print a named example as a vector file.
    Show {
        name: String,
        /// Emit the auxiliary flat vectors instead of the product vectors.
        #[arg(long)]
        auxiliary: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let tol = Tolerance::new(cli.tol_rank, cli.tol_psd, cli.tol_residual, Tolerance::default().dedupe_fid)?;
    match &cli.command {
        Command::Check { kind, file } => {
            let kind = match kind {
                Kind::Gp => CheckKind::Gp,
                Kind::Gupb => CheckKind::Gupb,
                Kind::Independence => CheckKind::Independence,
                Kind::StateIndependence => CheckKind::StateIndependence,
            };
            commands::check(kind, file, &tol)
        }
        Command::Enumerate { file, complement, out } => commands::enumerate(file, *complement, out.as_deref(), &tol),
        Command::Face { file } => commands::face(file, &tol),
        Command::Pptes { command } => match command {
            PptesCommand::Build {
                file,
                weights,
                out,
                distinguished,
            } => commands::pptes_build(file, weights.as_deref(), *distinguished, out.as_deref(), &tol),
            PptesCommand::Verify { file } => commands::pptes_verify(file, &tol),
        },
        Command::Example { command } => match command {
            ExampleCommand::List => Ok(commands::example_list()),
            ExampleCommand::Show { name, auxiliary, out } => commands::example_show(name, *auxiliary, out.as_deref()),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            let text = if cli.json {
                serde_json::to_string_pretty(&outcome.json).expect("report serializes") + "\n"
            } else {
                outcome.human
            };
            // A closed pipe (e.g. `| head`) is not an error worth a panic.
            let _ = std::io::stdout().write_all(text.as_bytes());
            ExitCode::from(outcome.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
