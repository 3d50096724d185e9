mod commands;
mod report;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Prolongations, distribution ranks and invariance checks for Lie
/// remarkable PDE systems.
#[derive(Parser, Debug)]
#[command(name = "lierem", version)]
struct Cli {
    /// Emit the structured JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

/// `--n/--m/--r`; optional where a catalog entry fixes them.
#[derive(Args, Debug, Clone, Copy)]
pub struct SpecArgs {
    /// Number of independent variables.
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of dependent variables.
    #[arg(long)]
    pub m: Option<usize>,
    /// Jet order.
    #[arg(long)]
    pub r: Option<usize>,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct SampleArgs {
    /// Random points per rank computation.
    #[arg(long, default_value_t = 5, value_parser = positive)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(k) => Ok(k),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Jet space and algebra dimensions.
    Dim {
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Prolong a vector field.
    Prolong {
        #[command(flatten)]
        spec: SpecArgs,
        /// File holding the field.
        #[arg(long, conflicts_with = "expr", required_unless_present = "expr")]
        field: Option<String>,
        /// The field inline, e.g. "x[1]: x[2]; u[1]: u[1]".
        #[arg(short = 'e', long = "expr")]
        expr: Option<String>,
        /// Print only this coefficient, e.g. "u[1;1,2]".
        #[arg(long)]
        coord: Option<String>,
    },
    /// Test every generator of an algebra for invariance of a system.
    Check {
        #[command(flatten)]
        target: commands::SystemArgs,
        /// affine, projective, or a file with one generator per line.
        #[arg(long)]
        algebra: String,
    },
    /// Generic and on-manifold rank of a prolonged algebra.
    Rank {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        algebra: String,
        /// Catalog name or system file for the on-manifold rank.
        #[arg(long)]
        on: Option<String>,
        /// Solved-form chart for a system file ("coord = expr" per line).
        #[arg(long, requires = "on")]
        param: Option<String>,
        #[command(flatten)]
        sampling: SampleArgs,
    },
    /// Hypersurfaces where the distribution rank drops.
    Locus {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        algebra: String,
        /// Instead of extracting the locus, confirm the rank drop on points
        /// of this catalog equation.
        #[arg(long)]
        verify: Option<String>,
        /// Size guard on intermediate polynomials, in terms.
        #[arg(long, default_value_t = 20_000)]
        max_terms: usize,
        #[command(flatten)]
        sampling: SampleArgs,
    },
    /// Decide whether a system is strongly or weakly Lie remarkable.
    Verdict {
        #[command(flatten)]
        target: commands::SystemArgs,
        #[arg(long)]
        algebra: String,
        /// Also confirm the off-manifold condition by locus extraction.
        #[arg(long)]
        locus: bool,
        #[arg(long, default_value_t = 20_000)]
        max_terms: usize,
        #[command(flatten)]
        sampling: SampleArgs,
    },
    /// Print the hierarchy system for (n, m) in input syntax.
    Hierarchy {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
    /// Named equations.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand, Debug)]
enum CatalogAction {
    /// List entries with their reference values.
    List,
    /// Print an entry's equations in input syntax.
    Show { name: String },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let out = match cli.command {
        Command::Dim { spec } => commands::dim(spec),
        Command::Prolong { spec, field, expr, coord } => commands::prolong(spec, field, expr, coord),
        Command::Check { target, algebra } => commands::check(&target, &algebra),
        Command::Rank { spec, algebra, on, param, sampling } => commands::rank(spec, &algebra, on, param, sampling),
        Command::Locus { spec, algebra, verify, max_terms, sampling } => {
            commands::locus(spec, &algebra, verify, max_terms, sampling)
        }
        Command::Verdict { target, algebra, locus, max_terms, sampling } => {
            commands::verdict(&target, &algebra, locus.then_some(max_terms), sampling)
        }
        Command::Hierarchy { n, m } => commands::hierarchy(n, m),
        Command::Catalog { action: CatalogAction::List } => commands::catalog_list(),
        Command::Catalog { action: CatalogAction::Show { name } } => commands::catalog_show(&name),
    };
    match out {
        Ok(report) => {
            if let Err(e) = report.emit(cli.json) {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            ExitCode::from(exit_status(&report))
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

/// 0 on success, 2 when a computed value contradicts a reference value.
fn exit_status(report: &report::Report) -> u8 {
    if report.mismatch {
        2
    } else {
        0
    }
}
