use anyhow::Result;
use clap::{Subcommand, ValueEnum};
use shiftlab_core::basex::{build_x_pattern, column_frequency, delta_exact, ones_in_columns, LevelColoring};

use crate::input;
use crate::out::{bits, rat, rat_cols, Report};
use crate::Outcome;

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum XFormat {
    /// Three lines per row (bullets, bits, arrows) in ASCII
    Ascii,
    /// The same with Unicode symbols
    Unicode,
    /// One `x y bullet bit arrow` line per cell
    Tsv,
}

#[derive(Subcommand, Debug)]
pub enum Base {
    /// Build the n x n pattern for a level coloring
    Build {
        /// Level bits rho_1 rho_2 ..., e.g. 101; `-` for none
        #[arg(long)]
        levels: String,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = XFormat::Ascii)]
        format: XFormat,
    },
    /// Density sum_n rho_n 2^-n of a level coloring
    Delta {
        #[arg(long)]
        levels: String,
    },
    /// Share of marked columns among the first n
    Freq {
        #[arg(long)]
        levels: String,
        /// Comma-separated column counts
        #[arg(long, value_delimiter = ',')]
        n: Vec<u64>,
    },
}

fn coloring(s: &str) -> Result<LevelColoring> {
    Ok(LevelColoring::new(input::bits(s)?))
}

pub fn run(cmd: Base) -> Result<Outcome> {
    let mut r;
    match cmd {
        Base::Build { levels, n, format } => {
            let rho = coloring(&levels)?;
            let p = build_x_pattern(&rho, n)?;
            r = Report::new("base build");
            r.meta("levels", bits(rho.bits())).meta("n", n);
            match format {
                XFormat::Ascii => r.body(&p.render(false)),
                XFormat::Unicode => r.body(&p.render(true)),
                XFormat::Tsv => {
                    r.header(&["x", "y", "bullet", "bit", "arrow"]);
                    for y in 1..=n {
                        for x in 1..=n {
                            let c = p.get(x, y);
                            r.row(vec![
                                x.to_string(),
                                y.to_string(),
                                (c.bullet as u8).to_string(),
                                (c.bit as u8).to_string(),
                                format!("{:?}", c.arrow).to_lowercase(),
                            ]);
                        }
                    }
                }
            }
        }
        Base::Delta { levels } => {
            let rho = coloring(&levels)?;
            r = Report::new("base delta");
            let mut cols = vec!["levels".to_string()];
            cols.extend(rat_cols("delta"));
            let cols: Vec<&str> = cols.iter().map(String::as_str).collect();
            r.header(&cols);
            let mut row = vec![bits(rho.bits())];
            row.extend(rat(&delta_exact(&rho)));
            r.row(row);
        }
        Base::Freq { levels, n } => {
            let rho = coloring(&levels)?;
            r = Report::new("base freq");
            r.meta("levels", bits(rho.bits()));
            let mut cols = vec!["n".to_string(), "ones".into()];
            cols.extend(rat_cols("freq"));
            let cols: Vec<&str> = cols.iter().map(String::as_str).collect();
            r.header(&cols);
            for n in n {
                let mut row = vec![n.to_string(), ones_in_columns(&rho, n).to_string()];
                row.extend(rat(&column_frequency(&rho, n)?));
                r.row(row);
            }
        }
    }
    Ok(Outcome::Complete(r))
}
