//! `leastper`: build, query and analyse least-period automata.
//!
//! Exit codes: 0 success or accept, 1 reject or mismatch, 2 usage or internal
//! error, 3 oracle still growing with the prefix (`verify` only).

mod commands;
mod source;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "leastper",
    version,
    about = "Least periods of automatic sequences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the period, least-period and least-period-set automata.
    Build(BuildArgs),
    /// Test whether an arity-1 automaton accepts n.
    Query { automaton: PathBuf, n: u64 },
    /// List the integers in [from, max] an arity-1 automaton accepts.
    Enumerate {
        automaton: PathBuf,
        #[arg(long)]
        max: u64,
        #[arg(long, default_value_t = 1)]
        from: u64,
        /// List rejected integers instead.
        #[arg(long)]
        complement: bool,
    },
    /// Exact density of the set an arity-1 automaton accepts.
    Density {
        automaton: PathBuf,
        /// Print the full report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Compare the least-period set with brute force over a prefix.
    Verify(VerifyArgs),
    /// Compile a predicate to an automaton.
    Eval(EvalArgs),
}

#[derive(Args)]
pub struct BuildArgs {
    /// Built-in sequence name or a DFAO file.
    pub sequence: String,
    #[arg(long, default_value = "leastper-out")]
    pub out_dir: PathBuf,
    /// Factors must have length at least n + slack.
    #[arg(long, default_value_t = 0)]
    pub slack: u32,
    /// Also write the final automaton read most significant digit first.
    #[arg(long)]
    pub msd: bool,
    /// Write Graphviz files next to the automata.
    #[arg(long)]
    pub dot: bool,
    /// Minimize only after projections.
    #[arg(long)]
    pub lazy: bool,
    /// Reuse stage automata from this directory (default: $LEASTPER_CACHE_DIR).
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// Built-in sequence name.
    pub sequence: String,
    #[arg(long, default_value_t = 256)]
    pub max_n: usize,
    /// Prefix length, as an integer or `2^k`.
    #[arg(long, default_value = "2^16", value_parser = parse_size)]
    pub prefix: usize,
    #[arg(long, default_value_t = 0)]
    pub slack: u32,
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Args)]
pub struct EvalArgs {
    pub predicate: String,
    /// Sequence binding `name=builtin` or `name=file.dfao`; repeatable.
    #[arg(long = "seq", value_name = "NAME=SOURCE")]
    pub seqs: Vec<String>,
    /// Predicate definition `Name(params)=body`, callable as `$Name(...)`; repeatable.
    #[arg(long = "define", value_name = "DEFINITION")]
    pub defines: Vec<String>,
    /// Track order of the result, comma separated; defaults to sorted free variables.
    #[arg(long, value_delimiter = ',')]
    pub free: Option<Vec<String>>,
    /// Numeration base when no sequence is bound.
    #[arg(long, default_value_t = 2)]
    pub base: u32,
    /// Write here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write an arity-1 result as a 0/1 DFAO.
    #[arg(long)]
    pub dfao: bool,
}

fn parse_size(s: &str) -> Result<usize, String> {
    let parsed = match s.split_once('^') {
        Some((b, e)) => {
            let b: usize = b.trim().parse().map_err(|e| format!("{e}"))?;
            let e: u32 = e.trim().parse().map_err(|e| format!("{e}"))?;
            b.checked_pow(e).ok_or("too large")?
        }
        None => s.trim().parse().map_err(|e| format!("{e}"))?,
    };
    if parsed == 0 {
        return Err("must be positive".into());
    }
    Ok(parsed)
}

/// Non-error outcomes of a command.
pub enum Status {
    Yes,
    No,
    NotConverged,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Build(args) => commands::build(&args),
        Command::Query { automaton, n } => commands::query(&automaton, n),
        Command::Enumerate {
            automaton,
            max,
            from,
            complement,
        } => commands::enumerate(&automaton, from, max, complement),
        Command::Density { automaton, json } => commands::density(&automaton, json),
        Command::Verify(args) => commands::verify(&args),
        Command::Eval(args) => commands::eval(&args),
    };
    match result {
        Ok(Status::Yes) => ExitCode::SUCCESS,
        Ok(Status::No) => ExitCode::from(1),
        Ok(Status::NotConverged) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(parse_size("4096"), Ok(4096));
        assert_eq!(parse_size("2^12"), Ok(4096));
        assert!(parse_size("0").is_err());
        assert!(parse_size("2^99").is_err());
    }

    #[test]
    fn cli_is_well_formed() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
