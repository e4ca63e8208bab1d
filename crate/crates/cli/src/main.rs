//! `shiftlab`: counting, entropy bounds, substitutions, boards and pruning
//! machines from the command line. Output is TSV with `#` metadata lines.
//!
//! Exit codes: 0 on success, 1 on bad input or usage, 2 when a budget ran
//! out (any partial table is still printed).

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod cmd;
mod input;
mod out;

use out::Report;

#[derive(Parser, Debug)]
#[command(
    name = "shiftlab",
    version,
    about = "Shifts of finite type: counts, entropy brackets, substitutions, boards and pruning",
    after_help = "Budgets: SHIFTLAB_MAX_STATES overrides the default transfer-matrix state limit; \
                  --max-states on a subcommand overrides both."
)]
struct Cli {
    #[command(subcommand)]
    group: Group,
}

#[derive(Subcommand, Debug)]
enum Group {
    /// Shifts of finite type given by a syntax file
    #[command(subcommand)]
    Sft(cmd::sft::Sft),
    /// Substitution rules and their blocks
    #[command(subcommand)]
    Subst(cmd::subst::Subst),
    /// Index sets, boards and residue positions
    #[command(subcommand)]
    Geom(cmd::geom::Geom),
    /// The base system: marked columns and their densities
    #[command(subcommand)]
    Base(cmd::base::Base),
    /// Turing machines and their board layouts
    #[command(subcommand)]
    Tm(cmd::tm::Tm),
    /// The pruning loop
    #[command(subcommand)]
    Prune(cmd::prune::Prune),
    /// Entropy brackets around a target value
    Realize(cmd::realize::Realize),
}

pub enum Outcome {
    Complete(Report),
    /// Budget ran out after some output was produced.
    Partial(Report, String),
}

fn is_budget(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<shiftlab_core::Error>()
            .is_some_and(shiftlab_core::Error::is_budget)
    })
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    match cli.group {
        Group::Sft(c) => cmd::sft::run(c),
        Group::Subst(c) => cmd::subst::run(c),
        Group::Geom(c) => cmd::geom::run(c),
        Group::Base(c) => cmd::base::run(c),
        Group::Tm(c) => cmd::tm::run(c),
        Group::Prune(c) => cmd::prune::run(c),
        Group::Realize(c) => cmd::realize::run(c),
    }
}

fn emit(r: &Report) {
    let mut stdout = std::io::stdout().lock();
    // a closed pipe is not worth a panic
    let _ = stdout.write_all(r.render().as_bytes());
    let _ = stdout.flush();
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(Outcome::Complete(r)) => {
            emit(&r);
            ExitCode::SUCCESS
        }
        Ok(Outcome::Partial(r, why)) => {
            emit(&r);
            eprintln!("shiftlab: stopped early: {why}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("shiftlab: {e:#}");
            ExitCode::from(if is_budget(&e) { 2 } else { 1 })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_tree_is_consistent() {
        Cli::command().debug_assert();
    }
}
