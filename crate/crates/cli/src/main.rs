//! `coxdeform`: command-line front end for Coxeter orbifold deformation
//! computations.

mod commands;
mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "coxdeform", version, about = "Deformations of real projective structures on hyperbolic Coxeter orbifolds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub config: Config,
}

/// Settings shared by every command. All of them are echoed into reports.
#[derive(Args, Debug, Clone)]
pub struct Config {
    /// Residual tolerance: a point is a zero when its largest residual is at
    /// most this, and Newton iterates until the residual norm is below a tenth
    /// of it.
    #[arg(long, global = true, default_value_t = 1e-9, value_parser = positive)]
    pub tol: f64,
    /// Relative singular value threshold for rank decisions.
    #[arg(long = "rank-tol", global = true, default_value_t = 1e-12, value_parser = positive)]
    pub rank_tol: f64,
    /// Master seed for random sampling.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format; `curve` defaults to csv, everything else to json.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Report success even when a rank decision is uncertain.
    #[arg(long, global = true)]
    pub force: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Montecarlo,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Validity, counts, weak orderability and angle conditions of an
    /// orbifold (a JSON file or a bundled name).
    Check { orbifold: String },
    /// Hyperbolic realization: directly from the Gram matrix, or by
    /// continuation from a seed polytope.
    Realize {
        orbifold: String,
        /// Seed polytope, overriding the one named in the input.
        #[arg(long = "seed-name")]
        seed_name: Option<String>,
    },
    /// Realization, hyperbolic point, Jacobian ranks and local deformation
    /// dimension.
    Dim {
        orbifold: String,
        #[arg(long = "seed-name")]
        seed_name: Option<String>,
    },
    /// Conditions, components, classification and normal form of a Cartan
    /// matrix (a JSON file, or a bundled orbifold name for the matrix at its
    /// hyperbolic point).
    Cartan {
        matrix: String,
        /// The group acts on projective `n`-space; defaults to the rank of
        /// the matrix minus one.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Samples the determinant of a two-parameter family and its zero set.
    Curve {
        /// Only `esselmann` is available.
        family: String,
        /// Sample box `xmin,xmax,ymin,ymax`.
        #[arg(long = "box", value_delimiter = ',', num_args = 4, default_values_t = [0.5, 2.0, 0.5, 2.0])]
        bounds: Vec<f64>,
        /// Grid points per axis.
        #[arg(long, default_value_t = 101)]
        res: usize,
    },
    /// Fraction of weakly orderable orbifolds among order assignments
    /// bounded by `d`.
    Stats {
        polytope: String,
        /// Order bounds, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = [7u32])]
        d: Vec<u32>,
        #[arg(long, value_enum, default_value_t = Mode::Montecarlo)]
        mode: Mode,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        Ok(x) => Err(format!("{x} is not a positive number")),
        Err(e) => Err(e.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = commands::run(&cli);
    if let Some(text) = &outcome.report {
        if let Err(e) = output::emit(text, cli.config.out.as_deref()) {
            eprintln!("error: cannot write report: {e}");
            return ExitCode::from(1);
        }
    }
    for line in &outcome.messages {
        eprintln!("{line}");
    }
    ExitCode::from(outcome.status.code())
}
