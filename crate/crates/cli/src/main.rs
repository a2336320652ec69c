use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser, Debug)]
#[command(name = "quaderint", version, about = "Exact box measures, step-function integrals and their companions")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Dyadic refinement depth.
    #[arg(long, global = true, default_value_t = 10)]
    pub depth: u32,
    /// Truncation index (Fourier modes, series terms, powers, abs_poly steps).
    #[arg(long, global = true)]
    pub kmax: Option<u32>,
    /// Exponent p (a rational or `inf`).
    #[arg(long, global = true)]
    pub p: Option<String>,
    /// Second exponent q (Hölder conjugate, or p~ for Jensen).
    #[arg(long, global = true)]
    pub q: Option<String>,
    /// Comparison tolerance.
    #[arg(long, global = true, env = "QUADERINT_TOL", default_value_t = quaderint::DEFAULT_TOL)]
    pub tol: f64,
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the table here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum NormArg {
    One,
    Inf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Suite {
    Hoelder,
    Minkowski,
    Jensen,
    Clarkson,
    ReverseMinkowski,
    QuasiTriangle,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Bracketed integral of an oracle over a box.
    Integrate {
        oracle: PathBuf,
        #[arg(long)]
        domain: String,
        /// Measure document; the volume by default.
        #[arg(long)]
        measure: Option<PathBuf>,
    },
    /// Darboux bracket of an oracle at depths 0..=depth.
    Bracket {
        oracle: PathBuf,
        #[arg(long)]
        domain: String,
    },
    /// Both iterated integrals of a step function and the direct product integral.
    Fubini {
        step: PathBuf,
        #[arg(long)]
        m1: PathBuf,
        #[arg(long)]
        m2: PathBuf,
    },
    /// Inner and outer Jordan measure at depths 0..=depth.
    Jordan {
        /// Set document; omit with --svc.
        set: Option<PathBuf>,
        /// Use the Smith-Volterra-Cantor set of this stage.
        #[arg(long)]
        svc: Option<u32>,
        #[arg(long)]
        measure: Option<PathBuf>,
    },
    /// Integral against a Stieltjes weight over a closed interval.
    Stieltjes {
        oracle: PathBuf,
        weight: PathBuf,
        #[arg(long)]
        domain: String,
    },
    /// Sum of an oracle against a discrete measure.
    Discrete {
        oracle: PathBuf,
        measure: PathBuf,
        /// Externally supplied bound on the omitted tail.
        #[arg(long)]
        tail: Option<f64>,
    },
    /// Lp norm of a step function.
    LpNorm {
        step: PathBuf,
        #[arg(long)]
        measure: Option<PathBuf>,
    },
    /// Randomized inequality suite.
    IneqCheck {
        suite: Suite,
        #[arg(long, default_value_t = 1000)]
        cases: usize,
        #[arg(long, default_value_t = 1)]
        dim: usize,
    },
    /// Gram-Schmidt coefficient table of a family.
    GramSchmidt {
        family: PathBuf,
        /// Write the orthonormal family here as a family document.
        #[arg(long)]
        write_family: Option<PathBuf>,
    },
    /// Fourier coefficients of a step function given in units of pi.
    Fourier {
        step: PathBuf,
        /// Emit Bessel partial sums and Parseval gaps instead.
        #[arg(long)]
        bessel: bool,
    },
    /// Projection of the family's target onto its span.
    Project {
        family: PathBuf,
        #[arg(long, default_value_t = 64)]
        trials: usize,
    },
    /// Banach iteration with the a-priori bound.
    Fixpoint {
        contraction: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
    },
    /// Truncated Neumann series errors and bounds.
    Neumann {
        matrix: PathBuf,
        #[arg(long, value_enum, default_value_t = NormArg::Inf)]
        norm: NormArg,
    },
    /// The sequence ||A^k||^(1/k) and its running infimum.
    Specrad {
        matrix: PathBuf,
        #[arg(long, value_enum, default_value_t = NormArg::Inf)]
        norm: NormArg,
    },
    /// Minkowski gauge of a point for a polytope.
    Gauge {
        halfspaces: PathBuf,
        /// Comma-separated point; overrides the document's point.
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
    },
    /// Grid behaviour of the polynomial approximations of |t|.
    Abspoly,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(outcome) => {
            let written = match &cli.global.out {
                Some(path) => fs::write(path, outcome.table.as_bytes()),
                None => std::io::stdout().write_all(outcome.table.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            match outcome.violation {
                Some(v) => {
                    eprintln!("check failed: {v}");
                    ExitCode::from(1)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
