//! TSV reports: `#` metadata lines, one header row, then data rows.

use std::fmt::Write as _;

use num_rational::BigRational;
use shiftlab_core::exact::{decimal, format_rational, Rounding};
use shiftlab_core::Enclosure;

pub const PLACES: usize = 12;

#[derive(Default)]
pub struct Report {
    meta: Vec<(String, String)>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    /// Free-form body printed after the table (grids, JSON).
    body: String,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut r = Report::default();
        r.meta("shiftlab", env!("CARGO_PKG_VERSION"));
        r.meta("command", command);
        r
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn header(&mut self, cols: &[&str]) -> &mut Self {
        self.header = cols.iter().map(|c| c.to_string()).collect();
        self
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert!(self.header.is_empty() || cells.len() == self.header.len());
        self.rows.push(cells);
    }

    pub fn has_rows(&self) -> bool {
        !self.rows.is_empty()
    }

    pub fn body(&mut self, text: &str) {
        self.body.push_str(text);
        if !text.ends_with('\n') {
            self.body.push('\n');
        }
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(s, "# {k}\t{v}");
        }
        if !self.header.is_empty() {
            s.push_str(&self.header.join("\t"));
            s.push('\n');
        }
        for row in &self.rows {
            s.push_str(&row.join("\t"));
            s.push('\n');
        }
        s.push_str(&self.body);
        s
    }
}

/// `p/q` and its nearest 12-place decimal.
pub fn rat(r: &BigRational) -> Vec<String> {
    vec![format_rational(r), decimal(r, PLACES, Rounding::Nearest)]
}

/// Column names `name` and `name_dec`.
pub fn rat_cols(name: &str) -> [String; 2] {
    [name.to_string(), format!("{name}_dec")]
}

/// Lower end rounded down, upper end rounded up; `-inf` for the empty
/// marker.
pub fn enclosure(e: &Enclosure) -> Vec<String> {
    match (e.lo(), e.hi()) {
        (Some(lo), Some(hi)) => vec![
            format_rational(lo),
            decimal(lo, PLACES, Rounding::Floor),
            format_rational(hi),
            decimal(hi, PLACES, Rounding::Ceil),
        ],
        _ => vec!["-inf".into(), "-inf".into(), "-inf".into(), "-inf".into()],
    }
}

pub fn enclosure_cols(name: &str) -> Vec<String> {
    let [lo, lo_dec] = rat_cols(&format!("{name}_lo"));
    let [hi, hi_dec] = rat_cols(&format!("{name}_hi"));
    vec![lo, lo_dec, hi, hi_dec]
}

pub fn bits(b: &[bool]) -> String {
    if b.is_empty() {
        "-".into()
    } else {
        b.iter().map(|&x| if x { '1' } else { '0' }).collect()
    }
}
