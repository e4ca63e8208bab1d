use anyhow::Result;
use clap::{Subcommand, ValueEnum};
use shiftlab_core::io::render_grid;
use shiftlab_core::substitution::{check_unique_derivation, expand, zero_entropy_bound, Derivation};

use super::record_input;
use crate::input;
use crate::out::{enclosure, enclosure_cols, Report};
use crate::Outcome;

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum BlockFormat {
    /// Rows of space-separated symbol names, top row first
    Grid,
    /// One `x y symbol` line per cell
    Tsv,
}

#[derive(Subcommand, Debug)]
pub enum Subst {
    /// Expand a single symbol n times
    Expand {
        /// Rule file, builtin:2net or 2net
        #[arg(long, default_value = "2net")]
        rule: String,
        /// Seed symbol name
        #[arg(long)]
        seed: String,
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value_t = BlockFormat::Grid)]
        format: BlockFormat,
    },
    /// Check that central squares of depth-d blocks have a single derivation
    CheckDerivation {
        #[arg(long, default_value = "2net")]
        rule: String,
        #[arg(long, default_value_t = 3)]
        depth: u32,
    },
    /// Upper bound on (1/n^2) log2 of the pattern count for window side n
    ZeroBound {
        #[arg(long, default_value = "2net")]
        rule: String,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: u32,
    },
}

pub fn run(cmd: Subst) -> Result<Outcome> {
    match cmd {
        Subst::Expand { rule, seed, n, format } => {
            let rule = input::rule(&rule)?;
            let sym = rule.value.alphabet().symbol(&seed)?;
            let b = expand(&rule.value, sym, n)?;
            let mut r = Report::new("subst expand");
            record_input(&mut r, "rule", &rule);
            r.meta("seed", &seed).meta("n", n).meta("side", b.block.side);
            let alphabet = rule.value.alphabet();
            match format {
                BlockFormat::Grid => r.body(&render_grid(&b.block.to_pattern(alphabet))?),
                BlockFormat::Tsv => {
                    r.header(&["x", "y", "symbol"]);
                    for y in 1..=b.block.side {
                        for x in 1..=b.block.side {
                            let s = shiftlab_core::Symbol(b.block.at(x, y));
                            r.row(vec![x.to_string(), y.to_string(), alphabet.name(s).to_string()]);
                        }
                    }
                }
            }
            Ok(Outcome::Complete(r))
        }
        Subst::CheckDerivation { rule, depth } => {
            let rule = input::rule(&rule)?;
            let d = check_unique_derivation(&rule.value, depth)?;
            let mut r = Report::new("subst check-derivation");
            record_input(&mut r, "rule", &rule);
            r.meta("depth", depth);
            r.header(&["verdict", "squares", "seed", "phase_a", "phase_b"]);
            let phase = |p: &shiftlab_core::Point| {
                p.coords().iter().map(i64::to_string).collect::<Vec<_>>().join(",")
            };
            match d {
                Derivation::UniqueUpTo { squares, .. } => r.row(vec![
                    "unique".into(),
                    squares.to_string(),
                    "-".into(),
                    "-".into(),
                    "-".into(),
                ]),
                Derivation::Ambiguous(a) => {
                    r.row(vec![
                        "ambiguous".into(),
                        "-".into(),
                        rule.value.alphabet().name(a.seed).to_string(),
                        phase(&a.derivations[0].phase),
                        phase(&a.derivations[1].phase),
                    ]);
                    r.body(&render_grid(&a.square)?);
                }
            }
            Ok(Outcome::Complete(r))
        }
        Subst::ZeroBound { rule, n, m } => {
            let rule = input::rule(&rule)?;
            let v = zero_entropy_bound(&rule.value, n, m)?;
            let mut r = Report::new("subst zero-bound");
            record_input(&mut r, "rule", &rule);
            let mut cols = vec!["n".to_string(), "m".into()];
            cols.extend(enclosure_cols("bound"));
            let cols: Vec<&str> = cols.iter().map(String::as_str).collect();
            r.header(&cols);
            let mut row = vec![n.to_string(), m.to_string()];
            row.extend(enclosure(&v));
            r.row(row);
            Ok(Outcome::Complete(r))
        }
    }
}
