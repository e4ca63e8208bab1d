use anyhow::{bail, Result};
use clap::Subcommand;
use shiftlab_core::geometry::board;
use shiftlab_core::machine::{
    board_superimpose, run_bounded, verify_superimposed, CellConfig, Layer, RunOutcome, Superimposition,
    TuringMachine,
};

use super::record_input;
use crate::input;
use crate::out::{bits, Report};
use crate::Outcome;

#[derive(Subcommand, Debug)]
pub enum Tm {
    /// Run a machine for a bounded number of steps and print each configuration
    Run {
        /// Machine file or builtin:NAME (halt-now, right-scanner, walker, bouncer, returner, third-one)
        #[arg(long)]
        machine: String,
        /// Input bits on cells 0, 1, ...; cells past the end read 0
        #[arg(long, default_value = "-")]
        input: String,
        #[arg(long, default_value_t = 64)]
        steps: u64,
    },
    /// Lay the first 4^n configurations over the level-n board
    Board {
        #[arg(long)]
        machine: String,
        #[arg(long)]
        n: u32,
        /// Exactly 4^n input bits, one per node column
        #[arg(long)]
        input: String,
    },
}

fn cell(m: &TuringMachine, c: &CellConfig) -> String {
    let data = m.tape().name(c.data);
    match c.state {
        Some(q) => format!("{data}@{}", m.states()[q]),
        None => data.to_string(),
    }
}

fn cells(m: &TuringMachine, cs: &[CellConfig]) -> String {
    cs.iter().map(|c| cell(m, c)).collect::<Vec<_>>().join(" ")
}

pub fn run(cmd: Tm) -> Result<Outcome> {
    match cmd {
        Tm::Run { machine, input, steps } => {
            let m = input::machine(&machine)?;
            let b = input::bits(&input)?;
            let tm = &m.value;
            let run = run_bounded(tm, &|i| b.get(i).copied().unwrap_or(false), steps, true);
            let mut r = Report::new("tm run");
            record_input(&mut r, "machine", &m);
            r.meta("input", bits(&b)).meta("steps", steps);
            match run.outcome {
                RunOutcome::Halted(t) => r.meta("outcome", format!("halted at {t}")),
                RunOutcome::Running => r.meta("outcome", "running"),
            };
            let width = run
                .history
                .iter()
                .map(|c| c.tape.len().max(c.head + 1))
                .chain([b.len(), 1])
                .max()
                .unwrap_or(1);
            r.header(&["t", "state", "head", "tape"]);
            let sym = |i: usize| tm.bit_symbol(b.get(i).copied().unwrap_or(false));
            for (t, c) in run.history.iter().enumerate() {
                r.row(vec![
                    t.to_string(),
                    tm.states()[c.state].clone(),
                    c.head.to_string(),
                    cells(tm, &c.cells(width, &sym)),
                ]);
            }
            Ok(Outcome::Complete(r))
        }
        Tm::Board { machine, n, input } => {
            let m = input::machine(&machine)?;
            let b = input::bits(&input)?;
            let spec = board(n)?;
            if b.len() != spec.index.len() {
                bail!("level {n} needs {} input bits, got {}", spec.index.len(), b.len());
            }
            let mut r = Report::new("tm board");
            record_input(&mut r, "machine", &m);
            r.meta("n", n).meta("input", bits(&b)).meta("steps", spec.index.len());
            match board_superimpose(&m.value, &spec, &b)? {
                Superimposition::Infeasible { halt_step } => {
                    r.meta("feasible", false).meta("halt_step", halt_step);
                }
                Superimposition::Pattern(p) => {
                    r.meta("feasible", true)
                        .meta("verified", verify_superimposed(&p, &m.value, &spec));
                    r.header(&["x", "y", "layer", "contents"]);
                    let tm = &m.value;
                    let opt = |c: &Option<CellConfig>| c.as_ref().map_or("blank".to_string(), |c| cell(tm, c));
                    for (x, y, l) in p.cells() {
                        let (kind, body) = match l {
                            Layer::Node(c) => ("node", cell(tm, &c)),
                            Layer::Pair(a, b) => ("pair", format!("{} {}", cell(tm, &a), cell(tm, &b))),
                            Layer::Triple(u, v, w) => {
                                ("triple", format!("{} {} {}", opt(&u), cell(tm, &v), opt(&w)))
                            }
                        };
                        r.row(vec![x.to_string(), y.to_string(), kind.into(), body]);
                    }
                }
            }
            Ok(Outcome::Complete(r))
        }
    }
}
