use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::Subcommand;
use num_rational::BigRational;
use shiftlab_core::counting::{
    count_box, count_rect_with, sofic_image_count, spectral_entropy_1d, upper_entropy_terms, CountResult,
    Limits,
};
use shiftlab_core::exact::{format_rational, parse_rational};
use shiftlab_core::io::syntax_to_json;
use shiftlab_core::irreducible::{entropy_to_precision, IrreducibleLimits};
use shiftlab_core::recode::recode_detailed;
use shiftlab_core::{Alphabet, BlockMap, Syntax};

use super::{record_input, Budget};
use crate::input;
use crate::out::{enclosure, enclosure_cols, rat, rat_cols, Report};
use crate::Outcome;

#[derive(Subcommand, Debug)]
pub enum Sft {
    /// Count locally admissible colorings of a box
    Count {
        /// Syntax file or builtin:NAME (golden, hard-squares, full:K, full:K:D)
        #[arg(long)]
        def: String,
        /// Side along axis 1
        #[arg(long)]
        n: usize,
        /// Side along axis 2 (2D only, defaults to n)
        #[arg(long)]
        m: Option<usize>,
        /// Print every side from 1 to n
        #[arg(long)]
        upto: bool,
        #[command(flatten)]
        budget: Budget,
    },
    /// Upper entropy terms log2(N_n)/n^d for n = 1..n-max
    EntropyUpper {
        #[arg(long)]
        def: String,
        #[arg(long)]
        n_max: usize,
        #[command(flatten)]
        budget: Budget,
    },
    /// Certified entropy of a one-dimensional syntax from its transfer graph
    #[command(name = "entropy-1d")]
    Entropy1d {
        #[arg(long)]
        def: String,
        /// Largest enclosure width, as p/q or a decimal
        #[arg(long, default_value = "1/1000000000")]
        tol: String,
    },
    /// Two-sided entropy bracket for an irreducible syntax
    EntropyIrreducible {
        #[arg(long)]
        def: String,
        /// Stop once the bracket is narrower than 1/precision
        #[arg(long)]
        precision: usize,
        /// Backtracking nodes per search
        #[arg(long)]
        budget: Option<u64>,
        /// Skip lower terms with more locally admissible cube patterns than this
        #[arg(long)]
        max_patterns: Option<usize>,
        /// Largest term index tried
        #[arg(long)]
        max_terms: Option<usize>,
        /// Largest cube radius used by admissibility decisions
        #[arg(long)]
        n_max: Option<usize>,
        /// Collars examined per admissibility decision
        #[arg(long)]
        collar_limit: Option<usize>,
    },
    /// Count distinct images of admissible boxes under a one-block map
    SoficCount {
        #[arg(long)]
        def: String,
        /// Symbol map as src=dst pairs, e.g. 0=a,1=b,2=b
        #[arg(long)]
        map: String,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        budget: Budget,
    },
    /// Product of two syntaxes, printed as a syntax file
    Product {
        #[arg(long)]
        def: String,
        #[arg(long)]
        with: String,
    },
    /// Add a dimension whose layers are independent copies, printed as a syntax file
    Lift {
        #[arg(long)]
        def: String,
    },
    /// Recode to a one-step syntax, printed as a syntax file
    Recode {
        #[arg(long)]
        def: String,
        /// Print the block contents of each new symbol instead
        #[arg(long)]
        blocks: bool,
        #[arg(long)]
        node_limit: Option<u64>,
    },
}

pub fn run(cmd: Sft) -> Result<Outcome> {
    match cmd {
        Sft::Count { def, n, m, upto, budget } => count(&def, n, m, upto, budget),
        Sft::EntropyUpper { def, n_max, budget } => entropy_upper(&def, n_max, budget),
        Sft::Entropy1d { def, tol } => entropy_1d(&def, &tol),
        Sft::EntropyIrreducible {
            def,
            precision,
            budget,
            max_patterns,
            max_terms,
            n_max,
            collar_limit,
        } => {
            let mut l = IrreducibleLimits::default();
            if let Some(b) = budget {
                l.node_limit = b;
                l.count.node_limit = b;
            }
            if let Some(v) = max_patterns {
                l.max_patterns = v;
            }
            if let Some(v) = max_terms {
                l.max_terms = v;
            }
            if let Some(v) = n_max {
                l.n_max = v;
            }
            if let Some(v) = collar_limit {
                l.collar_limit = v;
            }
            entropy_irreducible(&def, precision, &l)
        }
        Sft::SoficCount { def, map, n, budget } => sofic(&def, &map, n, budget),
        Sft::Product { def, with } => {
            let a = input::syntax(&def)?.value;
            let b = input::syntax(&with)?.value;
            json(&a.product(&b)?)
        }
        Sft::Lift { def } => json(&input::syntax(&def)?.value.lift_dimension()),
        Sft::Recode { def, blocks, node_limit } => recode(&def, blocks, node_limit),
    }
}

fn json(s: &Syntax) -> Result<Outcome> {
    let mut r = Report::default();
    r.body(&syntax_to_json(s));
    Ok(Outcome::Complete(r))
}

fn count_header(r: &mut Report) {
    let mut cols = vec!["n".to_string(), "m".into(), "count".into()];
    cols.extend(enclosure_cols("log2_per_site"));
    let cols: Vec<&str> = cols.iter().map(String::as_str).collect();
    r.header(&cols);
}

fn count_row(n: usize, m: usize, c: &CountResult) -> Vec<String> {
    let mut row = vec![n.to_string(), m.to_string(), c.count.to_string()];
    row.extend(enclosure(&c.log2_per_site));
    row
}

/// `(n, m, count)` for the box: `n` in 1D (m = 1), `n x m` in 2D, the
/// cube of side `n` otherwise.
fn count_one(s: &Syntax, n: usize, m: Option<usize>, budget: &Budget) -> shiftlab_core::Result<(usize, CountResult)> {
    let limits = budget.limits();
    match s.dim() {
        1 => Ok((1, CountResult::new(vec![n], count_box(s, &[n], &limits)?))),
        2 => {
            let m = m.unwrap_or(n);
            Ok((m, count_rect_with(s, n, m, &limits)?))
        }
        d => {
            let dims = vec![n; d];
            Ok((n, CountResult::new(dims.clone(), count_box(s, &dims, &limits)?)))
        }
    }
}

fn count(def: &str, n: usize, m: Option<usize>, upto: bool, budget: Budget) -> Result<Outcome> {
    let s = input::syntax(def)?;
    if n == 0 || m == Some(0) {
        bail!("box sides must be at least 1");
    }
    if m.is_some() && s.value.dim() != 2 {
        bail!("--m applies to two-dimensional syntaxes only");
    }
    let mut r = Report::new("sft count");
    record_input(&mut r, "def", &s);
    budget.record(&mut r);
    r.meta("dimension", s.value.dim());
    count_header(&mut r);
    let sides: Vec<usize> = if upto { (1..=n).collect() } else { vec![n] };
    for side in sides {
        let m_side = if upto { m.map(|_| side) } else { m };
        match count_one(&s.value, side, m_side, &budget) {
            Ok((mm, c)) => r.row(count_row(side, mm, &c)),
            Err(e) if e.is_budget() && r.has_rows() => return Ok(Outcome::Partial(r, e.to_string())),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(Outcome::Complete(r))
}

fn entropy_upper(def: &str, n_max: usize, budget: Budget) -> Result<Outcome> {
    let s = input::syntax(def)?;
    let mut r = Report::new("sft entropy-upper");
    record_input(&mut r, "def", &s);
    budget.record(&mut r);
    let mut cols = vec!["n".to_string(), "count".into()];
    cols.extend(enclosure_cols("u"));
    let cols: Vec<&str> = cols.iter().map(String::as_str).collect();
    r.header(&cols);
    let seq = upper_entropy_terms(&s.value, n_max, &budget.limits());
    if let Some(best) = seq.best() {
        r.meta("best_n", best.n);
    }
    for t in &seq.terms {
        let mut row = vec![t.n.to_string(), t.count.to_string()];
        row.extend(enclosure(&t.bound));
        r.row(row);
    }
    match seq.stopped {
        None => Ok(Outcome::Complete(r)),
        Some(e) if e.is_budget() => Ok(Outcome::Partial(r, e.to_string())),
        Some(e) => Err(e.into()),
    }
}

fn entropy_1d(def: &str, tol: &str) -> Result<Outcome> {
    let s = input::syntax(def)?;
    let tol: BigRational = parse_rational(tol).context("--tol")?;
    let e = spectral_entropy_1d(&s.value, &tol)?;
    let mut r = Report::new("sft entropy-1d");
    record_input(&mut r, "def", &s);
    r.meta("tol", format_rational(&tol));
    let mut cols = enclosure_cols("h");
    cols.extend(rat_cols("width"));
    let cols: Vec<&str> = cols.iter().map(String::as_str).collect();
    r.header(&cols);
    let mut row = enclosure(&e);
    match e.width() {
        Some(w) => row.extend(rat(&w)),
        None => row.extend(["0".to_string(), "0.000000000000".to_string()]),
    }
    r.row(row);
    Ok(Outcome::Complete(r))
}

fn entropy_irreducible(def: &str, precision: usize, l: &IrreducibleLimits) -> Result<Outcome> {
    let s = input::syntax(def)?;
    let res = entropy_to_precision(&s.value, precision, l)?;
    let mut r = Report::new("sft entropy-irreducible");
    record_input(&mut r, "def", &s);
    r.meta("precision", precision)
        .meta("node_limit", l.node_limit)
        .meta("max_patterns", l.max_patterns)
        .meta("max_terms", l.max_terms)
        .meta("n_max", l.n_max)
        .meta("collar_limit", l.collar_limit)
        .meta("max_states", l.count.max_states);
    let [lo, lo_dec] = <[String; 2]>::try_from(rat(&res.lower)).expect("two cells");
    let [hi, hi_dec] = <[String; 2]>::try_from(rat(&res.upper)).expect("two cells");
    r.meta("lower", lo).meta("lower_dec", lo_dec);
    r.meta("upper", hi).meta("upper_dec", hi_dec);
    r.meta("width", format_rational(&res.width));
    match res.lower_from {
        Some((n, rp)) => r.meta("witness_n", n).meta("r_prime", rp),
        None => r.meta("witness_n", "-").meta("r_prime", "-"),
    };
    r.meta("upper_from", res.upper_from).meta("reached", res.reached);

    let mut cols = vec!["k".to_string()];
    cols.extend(enclosure_cols("u"));
    cols.extend(enclosure_cols("s"));
    cols.extend(["r_prime".to_string(), "r_prime_minimal".into()]);
    let cols: Vec<&str> = cols.iter().map(String::as_str).collect();
    r.header(&cols);
    let dash = || vec!["-".to_string(); 4];
    for step in &res.steps {
        let mut row = vec![step.k.to_string()];
        row.extend(step.upper.as_ref().map_or_else(dash, |u| enclosure(&u.bound)));
        match &step.lower {
            Some(t) => {
                row.extend(enclosure(&t.bound));
                row.extend([t.r_prime.to_string(), t.r_prime_minimal.to_string()]);
            }
            None => {
                row.extend(dash());
                row.extend(["-".to_string(), "-".into()]);
            }
        }
        r.row(row);
    }
    if res.reached {
        Ok(Outcome::Complete(r))
    } else {
        Ok(Outcome::Partial(r, format!("precision 1/{precision} not reached within budget")))
    }
}

fn sofic(def: &str, map: &str, n: usize, budget: Budget) -> Result<Outcome> {
    let s = input::syntax(def)?;
    let pairs: Vec<(&str, &str)> = map
        .split(',')
        .map(|p| p.split_once('=').map(|(a, b)| (a.trim(), b.trim())))
        .collect::<Option<_>>()
        .with_context(|| format!("--map `{map}`: expected src=dst pairs"))?;
    let mut targets: Vec<&str> = Vec::new();
    for (_, b) in &pairs {
        if !targets.contains(b) {
            targets.push(b);
        }
    }
    let target = Arc::new(Alphabet::new(targets.iter().copied())?);
    let bm = BlockMap::from_names(s.value.alphabet().clone(), target, pairs)?;
    let c = sofic_image_count(&s.value, &bm, n, &budget.limits())?;
    let mut r = Report::new("sft sofic-count");
    record_input(&mut r, "def", &s);
    budget.record(&mut r);
    r.meta("map", map);
    count_header(&mut r);
    let m = if s.value.dim() == 1 { 1 } else { n };
    r.row(count_row(n, m, &c));
    Ok(Outcome::Complete(r))
}

fn recode(def: &str, blocks: bool, node_limit: Option<u64>) -> Result<Outcome> {
    let s = input::syntax(def)?;
    let rec = recode_detailed(&s.value, node_limit.unwrap_or(Limits::default().node_limit))?;
    if !blocks {
        return json(&rec.syntax);
    }
    let mut r = Report::new("sft recode");
    record_input(&mut r, "def", &s);
    let offsets: Vec<String> = rec
        .window
        .offsets()
        .iter()
        .map(|p| p.coords().iter().map(i64::to_string).collect::<Vec<_>>().join(","))
        .collect();
    r.meta("window", offsets.join(" "));
    r.header(&["symbol", "cells"]);
    let src = s.value.alphabet();
    for (i, cells) in rec.blocks.iter().enumerate() {
        let names: Vec<&str> = cells
            .iter()
            .map(|&c| src.name(shiftlab_core::Symbol(c)))
            .collect();
        r.row(vec![
            rec.syntax.alphabet().name(shiftlab_core::Symbol(i as u32)).to_string(),
            names.join(" "),
        ]);
    }
    Ok(Outcome::Complete(r))
}
