//! Text formats: SFT definition files (JSON) and the grid text format for
//! 1D and 2D patterns.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, Symbol};
use crate::error::{Error, Result};
use crate::lattice::{Pattern, Point, Shape};
use crate::syntax::{Mode, Syntax};

/// On-disk form of a syntax. Each pattern is a list of `[offset, symbol]`
/// pairs whose offsets form a translate of `shape`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntaxDef {
    pub alphabet: Vec<String>,
    pub dimension: usize,
    pub shape: Vec<Vec<i64>>,
    pub mode: Mode,
    pub patterns: Vec<Vec<(Vec<i64>, String)>>,
}

impl SyntaxDef {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn build(&self) -> Result<Syntax> {
        let alphabet = Arc::new(Alphabet::new(self.alphabet.iter().cloned())?);
        let d = self.dimension;
        if d == 0 {
            return Err(Error::InvalidDefinition("dimension must be at least 1".into()));
        }
        let point = |v: &[i64]| -> Result<Point> {
            if v.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: v.len(),
                });
            }
            Ok(Point::new(v.to_vec()))
        };
        let shape = Shape::new(d, self.shape.iter().map(|v| point(v)).collect::<Result<Vec<_>>>()?)?;
        let mut pats = Vec::with_capacity(self.patterns.len());
        for cells in &self.patterns {
            let cells = cells
                .iter()
                .map(|(o, s)| Ok((point(o)?, alphabet.symbol(s)?)))
                .collect::<Result<Vec<_>>>()?;
            pats.push(Pattern::new(alphabet.clone(), d, cells)?);
        }
        Syntax::from_patterns(alphabet, shape, self.mode, &pats)
    }

    pub fn of(s: &Syntax) -> Self {
        let a = s.alphabet();
        SyntaxDef {
            alphabet: a.names().to_vec(),
            dimension: s.dim(),
            shape: s.shape().offsets().iter().map(|p| p.0.clone()).collect(),
            mode: s.mode(),
            patterns: s
                .patterns()
                .iter()
                .map(|row| {
                    s.shape()
                        .offsets()
                        .iter()
                        .zip(row)
                        .map(|(p, sym)| (p.0.clone(), a.name(*sym).to_string()))
                        .collect()
                })
                .collect(),
        }
    }
}

pub fn parse_syntax(text: &str) -> Result<Syntax> {
    SyntaxDef::from_json(text)?.build()
}

pub fn syntax_to_json(s: &Syntax) -> String {
    SyntaxDef::of(s).to_json()
}

/// Token for a cell outside the pattern domain in rendered grids.
pub const ABSENT: &str = ".";

/// Parses grid text: one row per line, top row first, symbols separated by
/// single spaces. A single line gives a 1D pattern on `{1..n}`; several
/// lines give a 2D pattern with `(1,1)` at the bottom-left. `.` marks an
/// absent cell unless `.` is a symbol of the alphabet.
pub fn parse_grid(alphabet: &Arc<Alphabet>, text: &str) -> Result<Pattern> {
    let lines: Vec<&str> = text
        .lines()
        .map(|l| l.trim_end_matches('\r'))
        .filter(|l| !l.trim().is_empty())
        .collect();
    if lines.is_empty() {
        return Err(Error::Parse("empty grid".into()));
    }
    let dot_is_symbol = alphabet.symbol(ABSENT).is_ok();
    let h = lines.len() as i64;
    let mut cells = Vec::new();
    for (row, line) in lines.iter().enumerate() {
        let y = h - row as i64;
        for (col, tok) in line.split(' ').enumerate() {
            if tok.is_empty() {
                return Err(Error::Parse(format!(
                    "line {}: symbols must be separated by single spaces",
                    row + 1
                )));
            }
            if tok == ABSENT && !dot_is_symbol {
                continue;
            }
            let s = alphabet.symbol(tok)?;
            let x = col as i64 + 1;
            let p = if lines.len() == 1 {
                Point::new(vec![x])
            } else {
                Point::new(vec![x, y])
            };
            cells.push((p, s));
        }
    }
    let dim = if lines.len() == 1 { 1 } else { 2 };
    Pattern::new(alphabet.clone(), dim, cells)
}

/// Renders a 1D or 2D pattern over its bounding box, top row first.
pub fn render_grid(p: &Pattern) -> Result<String> {
    let lo = p.domain().min_corner();
    let hi = p.domain().max_corner();
    let a = p.alphabet();
    let name = |q: Point| match p.get(&q) {
        Some(s) => a.name(s).to_string(),
        None => ABSENT.to_string(),
    };
    match p.dim() {
        1 => {
            let row: Vec<String> = (lo.0[0]..=hi.0[0]).map(|x| name(Point::new(vec![x]))).collect();
            Ok(row.join(" ") + "\n")
        }
        2 => {
            let mut out = String::new();
            for y in (lo.0[1]..=hi.0[1]).rev() {
                let row: Vec<String> = (lo.0[0]..=hi.0[0])
                    .map(|x| name(Point::new(vec![x, y])))
                    .collect();
                out.push_str(&row.join(" "));
                out.push('\n');
            }
            Ok(out)
        }
        d => Err(Error::DimensionMismatch { expected: 2, found: d }),
    }
}

/// Pattern from symbol names listed in `shape` order.
pub fn pattern_from_names(alphabet: &Arc<Alphabet>, shape: &Shape, names: &[&str]) -> Result<Pattern> {
    let syms = names
        .iter()
        .map(|n| alphabet.symbol(n))
        .collect::<Result<Vec<Symbol>>>()?;
    Pattern::from_shape(alphabet.clone(), shape, &syms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;

    const GOLDEN: &str = r#"{
        "alphabet": ["0", "1"],
        "dimension": 1,
        "shape": [[0], [1]],
        "mode": "forbidden",
        "patterns": [[[[0], "1"], [[1], "1"]]]
    }"#;

    #[test]
    fn golden_definition_round_trips() {
        let s = parse_syntax(GOLDEN).unwrap();
        let g = builtin::golden_mean();
        assert_eq!(s.patterns(), g.patterns());
        assert_eq!(s.mode(), Mode::Forbidden);
        let again = parse_syntax(&syntax_to_json(&s)).unwrap();
        assert_eq!(again.patterns(), s.patterns());
        assert_eq!(again.shape(), s.shape());
    }

    #[test]
    fn translated_patterns_are_accepted() {
        let text = GOLDEN.replace("[[[0], \"1\"], [[1], \"1\"]]", "[[[5], \"1\"], [[6], \"1\"]]");
        assert_eq!(parse_syntax(&text).unwrap().patterns(), builtin::golden_mean().patterns());
    }

    #[test]
    fn bad_definitions() {
        assert!(matches!(parse_syntax("{"), Err(Error::Parse(_))));
        let unknown = GOLDEN.replace("\"1\"], [[1]", "\"7\"], [[1]");
        assert!(matches!(parse_syntax(&unknown), Err(Error::UnknownSymbol(_))));
        let extra = GOLDEN.replace("\"mode\"", "\"colour\": 1, \"mode\"");
        assert!(parse_syntax(&extra).is_err());
        let wrong_dim = GOLDEN.replace("[[0], [1]]", "[[0, 0], [1, 0]]");
        assert!(matches!(parse_syntax(&wrong_dim), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn grid_orientation() {
        let a = Arc::new(Alphabet::numeric(2));
        let p = parse_grid(&a, "1 0\n0 0\n").unwrap();
        assert_eq!(p.dim(), 2);
        assert_eq!(p.get(&Point::new(vec![1, 2])), Some(Symbol(1)));
        assert_eq!(p.get(&Point::new(vec![1, 1])), Some(Symbol(0)));
        assert_eq!(render_grid(&p).unwrap(), "1 0\n0 0\n");
        let w = parse_grid(&a, "0 1 1 0").unwrap();
        assert_eq!(w.dim(), 1);
        assert_eq!(render_grid(&w).unwrap(), "0 1 1 0\n");
        let holes = parse_grid(&a, "1 .\n. 1").unwrap();
        assert_eq!(holes.len(), 2);
        assert_eq!(render_grid(&holes).unwrap(), "1 .\n. 1\n");
        assert!(parse_grid(&a, "1  0").is_err());
    }
}
