//! `jetalg`: command-line access to division, standard bases, the Cartan
//! solver, singularity invariants and the jet-level inductions.

mod commands;
mod output;
mod problem;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use jetalg::{Error, ErrorFamily};

use output::{Emitter, Format};

#[derive(Parser, Debug)]
#[command(name = "jetalg", version, about = "Exact local algebra on truncated power series")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Coefficient field: `Q`, `Q_p:<p>` or `F:<p>`.
    #[arg(long, global = true)]
    pub field: Option<String>,
    /// Comma separated variable names.
    #[arg(long, global = true)]
    pub vars: Option<String>,
    /// Truncation degree D; jets are taken modulo m^{D+1}.
    #[arg(long, global = true)]
    pub deg: Option<u32>,
    /// Report format: human readable text or one JSON record per line.
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub out: Format,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Divide F by the divisors, with a norm certificate.
    Divide {
        f: String,
        #[arg(required = true)]
        divisors: Vec<String>,
        /// Certificate parameter in (0, 1).
        #[arg(long, default_value = "1/2")]
        epsilon: String,
        #[arg(long)]
        no_certificate: bool,
    },
    /// Normal form of F modulo the submodule spanned by the generators.
    Nf {
        f: String,
        #[arg(required = true)]
        generators: Vec<String>,
    },
    /// Standard basis with its transcript.
    StdBasis {
        #[arg(required = true)]
        generators: Vec<String>,
    },
    /// Membership of F in the submodule spanned by the generators.
    Member {
        f: String,
        #[arg(required = true)]
        generators: Vec<String>,
    },
    /// Standard monomials of the quotient.
    QuotientBasis {
        #[arg(required = true)]
        generators: Vec<String>,
        /// List standard monomials of m^N/M instead of the free module mod M.
        #[arg(long)]
        maximal: bool,
    },
    /// Order, Milnor and Tjurina numbers and Hessian rank.
    Profile { f: String },
    /// Finite determinacy bounds.
    Determinacy {
        f: String,
        #[arg(long, value_enum, default_value = "right")]
        mode: Mode,
    },
    /// Splitting normal form with its coordinate change.
    Split {
        f: String,
        /// Scale the quadratic part to unit coefficients when roots exist.
        #[arg(long)]
        normalize: bool,
    },
    /// Semiuniversal unfolding of F.
    Unfold { f: String },
    /// Semiuniversal deformation of the complete intersection F1, ..., Fk.
    VersalDef {
        #[arg(required = true)]
        f: Vec<String>,
    },
    /// Bounded linear solver on a TOML problem file.
    CartanSolve { problem: std::path::PathBuf },
    /// Coordinate change carrying F to G.
    JetEquiv {
        f: String,
        g: String,
        #[command(flatten)]
        norms: TraceNorms,
    },
    /// Induce the unfolding G of F from the semiuniversal unfolding of F.
    InduceUnfold {
        f: String,
        g: String,
        /// Parameter names of G, appended after the variables.
        #[arg(long, required = true)]
        params: String,
        #[command(flatten)]
        oracle: OracleArgs,
        #[command(flatten)]
        norms: TraceNorms,
    },
    /// Induce the deformation G of F from the semiuniversal deformation of F.
    InduceDef {
        #[arg(required = true)]
        f: Vec<String>,
        /// One component of G per occurrence.
        #[arg(long = "g", required = true)]
        g: Vec<String>,
        #[arg(long, required = true)]
        params: String,
        /// Constant matrix with G(x, 0) = M0 F, rows separated by `;`.
        #[arg(long)]
        m0: Option<String>,
        #[command(flatten)]
        oracle: OracleArgs,
        #[command(flatten)]
        norms: TraceNorms,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    Right,
    Contact,
}

#[derive(Args, Debug, Clone)]
pub struct TraceNorms {
    /// `rho=…,tau=…,L=…`; radii are one value or `:` separated lists.
    #[arg(long)]
    pub trace_norms: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct OracleArgs {
    /// Drive the induction by the Cartan solver at `rho=…,tau=…`.
    #[arg(long)]
    pub cartan: Option<String>,
}

fn exit_code(family: ErrorFamily) -> u8 {
    match family {
        ErrorFamily::Input => 2,
        ErrorFamily::Arithmetic => 3,
        ErrorFamily::Truncation => 4,
        ErrorFamily::LinearSystem => 5,
        ErrorFamily::Shape => 6,
        ErrorFamily::Solver => 7,
    }
}

fn family_name(family: ErrorFamily) -> &'static str {
    match family {
        ErrorFamily::Input => "input",
        ErrorFamily::Arithmetic => "arithmetic",
        ErrorFamily::Truncation => "truncation",
        ErrorFamily::LinearSystem => "linear_system",
        ErrorFamily::Shape => "shape",
        ErrorFamily::Solver => "solver",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.common.out;
    let mut em = Emitter::new(format);
    match commands::run(&cli.common, &cli.command, &mut em) {
        Ok(()) => {
            print!("{}", em.finish());
            ExitCode::SUCCESS
        }
        Err(err) => report_error(format, &err),
    }
}

fn report_error(format: Format, err: &Error) -> ExitCode {
    let family = err.family();
    let code = exit_code(family);
    if format == Format::Structured {
        let rec = serde_json::json!({
            "record": "error",
            "family": family_name(family),
            "code": code,
            "message": err.to_string(),
        });
        println!("{rec}");
    }
    eprintln!("error ({}): {err}", family_name(family));
    ExitCode::from(code)
}
