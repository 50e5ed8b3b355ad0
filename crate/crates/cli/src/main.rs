//! `hasse-weil`: batch front end for the library.
//!
//! Exit codes: 0 success, 2 parse error, 3 singular curve, 4 precision
//! exhausted, 5 violated precondition.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hasse_weil::Error;

#[derive(Parser, Debug)]
#[command(name = "hasse-weil", version, about = "L-functions, BSD invariants and local factors of elliptic curves over Q")]
struct Cli {
    #[command(flatten)]
    flags: Flags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Flags {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    pub json: bool,
    /// Working precision in decimal digits.
    #[arg(long, global = true, value_name = "DIGITS")]
    pub prec: Option<u32>,
    /// Number of Dirichlet coefficients (default: from the tail bound).
    #[arg(long, global = true, value_name = "N")]
    pub nmax: Option<usize>,
    /// Prime bound for Euler products and prime scans.
    #[arg(long, global = true, value_name = "P")]
    pub pmax: Option<u64>,
    /// Complex argument `a+bi`; repeatable.
    #[arg(long = "s", global = true, value_name = "a+bi", allow_hyphen_values = true)]
    pub s: Vec<String>,
    /// Generator `x,y`; repeatable.
    #[arg(long = "gen", global = true, value_name = "x,y", allow_hyphen_values = true)]
    pub gens: Vec<String>,
    /// Input file.
    #[arg(long, global = true)]
    pub file: Option<PathBuf>,
    /// Largest extension degree for point counts.
    #[arg(long, global = true, value_name = "K")]
    pub kmax: Option<u32>,
}

#[derive(Args, Debug, Clone)]
pub struct CurveArgs {
    /// `a1 a2 a3 a4 a6`, or `a4 a6` for a short model; rationals allowed.
    #[arg(required = true, num_args = 1.., allow_negative_numbers = true)]
    pub coeffs: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Invariants, minimal model, local data, conductor and torsion.
    Analyze(CurveArgs),
    /// L(E, s) with an error bound.
    Lvalue(CurveArgs),
    /// Completed Lambda(E, s) and the functional-equation residual.
    Lambda(CurveArgs),
    /// Root number and analytic rank.
    Rank(CurveArgs),
    /// BSD report; generators via --gen.
    Bsd(CurveArgs),
    /// Trace formula and local zeta checks at good primes up to --pmax.
    Zetacheck(CurveArgs),
    /// Gamma factor, local factors and purity of a realization JSON (--file).
    Motive(MotiveArgs),
    /// Smith normal form of an integer matrix JSON (--file).
    Snf(SnfArgs),
}

#[derive(Args, Debug, Clone)]
pub struct MotiveArgs {
    /// Only print the gamma factor.
    #[arg(long)]
    pub gamma: bool,
    /// Tate twist applied before reporting.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub twist: i32,
}

#[derive(Args, Debug, Clone)]
pub struct SnfArgs {
    /// Read `{"first": B1, "second": B2}` and print the lattice index instead.
    #[arg(long)]
    pub index: bool,
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) => 2,
        Error::SingularCurve => 3,
        Error::PrecisionExhausted(_) => 4,
        _ => 5,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let f = &cli.flags;
    let out = match &cli.command {
        Command::Analyze(c) => commands::analyze(c, f),
        Command::Lvalue(c) => commands::lvalue(c, f),
        Command::Lambda(c) => commands::lambda(c, f),
        Command::Rank(c) => commands::rank(c, f),
        Command::Bsd(c) => commands::bsd(c, f),
        Command::Zetacheck(c) => commands::zetacheck(c, f),
        Command::Motive(m) => commands::motive(m, f),
        Command::Snf(a) => commands::snf(a, f),
    };
    match out {
        Ok(text) => {
            println!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Parse("x".into())), 2);
        assert_eq!(exit_code(&Error::SingularCurve), 3);
        assert_eq!(exit_code(&Error::PrecisionExhausted("x".into())), 4);
        assert_eq!(exit_code(&Error::NotNilpotent), 5);
        assert_eq!(exit_code(&Error::PointNotOnCurve), 5);
    }
}
