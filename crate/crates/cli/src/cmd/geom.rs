use anyhow::Result;
use clap::{Subcommand, ValueEnum};
use shiftlab_core::geometry::{board, board_density, i_set, order_of_five, residue_positions, residue_positions_with_q};

use crate::out::{rat, rat_cols, Report};
use crate::Outcome;

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum BoardFormat {
    /// Character grid with ASCII line symbols, top row first
    Ascii,
    /// Character grid with box-drawing symbols
    Unicode,
    /// One `x y symbol node` line per board cell
    Tsv,
}

#[derive(Subcommand, Debug)]
pub enum Geom {
    /// The index set I_n inside 1..5^n
    Iset {
        #[arg(long)]
        n: u32,
    },
    /// The level-n board with its direction symbols
    Board {
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value_t = BoardFormat::Ascii)]
        format: BoardFormat,
    },
    /// Positions hitting every residue mod 2^N once
    Mseq {
        #[arg(long = "N")]
        big_n: u32,
        /// Use this period instead of the least q with 5^q = 1 mod 2^N
        #[arg(long)]
        q: Option<u64>,
    },
    /// Share of the 5^n square covered by the level-n board
    Density {
        #[arg(long)]
        n: u32,
    },
}

pub fn run(cmd: Geom) -> Result<Outcome> {
    let mut r;
    match cmd {
        Geom::Iset { n } => {
            let set = i_set(n)?;
            r = Report::new("geom iset");
            r.meta("n", n).meta("size", set.len());
            r.header(&["j", "i_j"]);
            for (j, x) in set.iter().enumerate() {
                r.row(vec![(j + 1).to_string(), x.to_string()]);
            }
        }
        Geom::Board { n, format } => {
            let b = board(n)?;
            r = Report::new("geom board");
            r.meta("n", n).meta("side", b.side).meta("cells", b.cell_count());
            match format {
                BoardFormat::Ascii => r.body(&b.render(false)),
                BoardFormat::Unicode => r.body(&b.render(true)),
                BoardFormat::Tsv => {
                    r.header(&["x", "y", "symbol", "node"]);
                    for (x, y) in b.cells() {
                        let sym = b.symbol(x, y).expect("board cell");
                        r.row(vec![
                            x.to_string(),
                            y.to_string(),
                            sym.glyph().to_string(),
                            b.is_node(x, y).to_string(),
                        ]);
                    }
                }
            }
        }
        Geom::Mseq { big_n, q } => {
            let q = q.unwrap_or_else(|| order_of_five(big_n));
            let rs = if q == order_of_five(big_n) {
                residue_positions(big_n)?
            } else {
                residue_positions_with_q(big_n, q)?
            };
            r = Report::new("geom mseq");
            r.meta("N", big_n).meta("q", q);
            r.header(&["t", "position", "index", "residue"]);
            for p in rs {
                r.row(vec![
                    p.t.to_string(),
                    p.position.to_string(),
                    p.index.to_string(),
                    p.residue.to_string(),
                ]);
            }
        }
        Geom::Density { n } => {
            let d = board_density(n)?;
            r = Report::new("geom density");
            let mut cols = vec!["n".to_string(), "cells".into()];
            cols.extend(rat_cols("density"));
            let cols: Vec<&str> = cols.iter().map(String::as_str).collect();
            r.header(&cols);
            let cells = 2 * 4u128.pow(n) * 5u128.pow(n) - 16u128.pow(n);
            let mut row = vec![n.to_string(), cells.to_string()];
            row.extend(rat(&d));
            r.row(row);
        }
    }
    Ok(Outcome::Complete(r))
}
