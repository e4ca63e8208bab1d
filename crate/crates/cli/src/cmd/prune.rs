use anyhow::Result;
use clap::Subcommand;
use shiftlab_core::basex::{delta_exact, LevelColoring};
use shiftlab_core::exact::format_rational;
use shiftlab_core::machine::{delta_gap, prune_run, PruneVerdict};

use super::record_input;
use crate::input;
use crate::out::{bits, rat, rat_cols, Report};
use crate::Outcome;

#[derive(Subcommand, Debug)]
pub enum Prune {
    /// Trace the pruning loop on a level coloring
    Run {
        /// Level bits rho_1 rho_2 ...; `-` for none
        #[arg(long)]
        levels: String,
        /// Target: const:P/Q, list:A,B,... or a JSON target file
        #[arg(long)]
        r: String,
        /// Iterations to run
        #[arg(long = "max-N")]
        max_n: u32,
    },
}

pub fn run(cmd: Prune) -> Result<Outcome> {
    let Prune::Run { levels, r: target, max_n } = cmd;
    let rho = LevelColoring::new(input::bits(&levels)?);
    let t = input::target(&target)?;
    let o = prune_run(&rho, &t.value, max_n)?;
    let mut rep = Report::new("prune run");
    record_input(&mut rep, "target", &t);
    rep.meta("levels", bits(rho.bits()))
        .meta("max_N", max_n)
        .meta("delta_exact", format_rational(&delta_exact(&rho)));
    match o.verdict {
        PruneVerdict::Halted { at } => rep.meta("verdict", format!("halted at {at}")),
        PruneVerdict::Survived { through } => rep.meta("verdict", format!("survived through {through}")),
    };
    let mut cols = vec!["N".to_string()];
    cols.extend(rat_cols("r"));
    cols.extend(rat_cols("delta_N"));
    cols.extend(["rho_prime".to_string(), "max_level".into()]);
    cols.extend(rat_cols("gap"));
    let cols: Vec<&str> = cols.iter().map(String::as_str).collect();
    rep.header(&cols);
    for it in &o.trace {
        let mut row = vec![it.big_n.to_string()];
        row.extend(rat(&it.r));
        row.extend(rat(&it.delta));
        row.extend([(it.rho_prime as u8).to_string(), it.max_level.to_string()]);
        row.extend(rat(&delta_gap(&rho, it)));
        rep.row(row);
    }
    Ok(Outcome::Complete(rep))
}
