use anyhow::Result;
use clap::Args;
use shiftlab_core::exact::{format_rational, parse_rational};
use shiftlab_core::realization::{density_realization_report, TargetSpec};

use super::record_input;
use crate::input;
use crate::out::{rat, rat_cols, Report};
use crate::Outcome;

#[derive(Args, Debug)]
pub struct Realize {
    /// Target: const:P/Q, list:A,B,... or a JSON target file
    #[arg(long)]
    target: String,
    /// Claimed limit of the target sequence
    #[arg(long)]
    h: Option<String>,
    /// Longest level coloring enumerated
    #[arg(long = "L")]
    max_len: usize,
    /// Pruning iterations
    #[arg(long = "N")]
    big_n: u32,
    /// Comma-separated window sides
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<u64>,
}

pub fn run(cmd: Realize) -> Result<Outcome> {
    let t = input::target(&cmd.target)?;
    let h = cmd.h.as_deref().map(parse_rational).transpose()?;
    let spec = TargetSpec::new(t.value.clone(), h.clone());
    let rows = density_realization_report(&spec, &cmd.n, cmd.max_len, cmd.big_n)?;
    let mut r = Report::new("realize");
    record_input(&mut r, "target", &t);
    r.meta("h", h.as_ref().map_or("-".to_string(), format_rational))
        .meta("L", cmd.max_len)
        .meta("N", cmd.big_n);
    if let Some(first) = rows.first() {
        r.meta("survivors", first.bracket.survivors)
            .meta("max_delta", format_rational(&first.max_delta));
    }
    let mut cols = vec!["n".to_string()];
    cols.extend(rat_cols("lower"));
    cols.extend(rat_cols("upper"));
    cols.extend(rat_cols("gap"));
    cols.extend(["witness".to_string(), "lower_kind".into(), "upper_kind".into()]);
    let cols: Vec<&str> = cols.iter().map(String::as_str).collect();
    r.header(&cols);
    for row in rows {
        let b = &row.bracket;
        let mut cells = vec![b.n.to_string()];
        cells.extend(rat(&b.lower));
        cells.extend(rat(&b.upper));
        match &row.gap {
            Some(g) => cells.extend(rat(g)),
            None => cells.extend(["-".to_string(), "-".into()]),
        }
        cells.push(b.witness.as_ref().map_or("-".into(), |w| w.to_string()));
        cells.push(b.lower_kind.label().into());
        cells.push(b.upper_kind.label().into());
        r.row(cells);
    }
    Ok(Outcome::Complete(r))
}
