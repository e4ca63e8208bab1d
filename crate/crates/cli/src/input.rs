//! Loading definitions from files or `builtin:NAME`, with the sha256 of
//! what was read for the metadata header.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};
use shiftlab_core::io::parse_syntax;
use shiftlab_core::machine::{samples, RSeq, TuringMachine};
use shiftlab_core::substitution::SubstitutionRule;
use shiftlab_core::{builtin, Syntax};

pub struct Loaded<T> {
    pub value: T,
    pub source: String,
    pub sha256: String,
}

fn digest(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Builtins hash their name; files hash their exact bytes.
fn load<T>(
    spec: &str,
    builtin: impl FnOnce(&str) -> shiftlab_core::Result<T>,
    parse: impl FnOnce(&str) -> shiftlab_core::Result<T>,
) -> Result<Loaded<T>> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        return Ok(Loaded {
            value: builtin(name)?,
            source: spec.to_string(),
            sha256: digest(spec.as_bytes()),
        });
    }
    let bytes = fs::read(Path::new(spec)).with_context(|| format!("cannot read `{spec}`"))?;
    let text = String::from_utf8(bytes.clone()).with_context(|| format!("`{spec}` is not UTF-8"))?;
    let value = parse(&text).with_context(|| format!("in `{spec}`"))?;
    Ok(Loaded {
        value,
        source: spec.to_string(),
        sha256: digest(&bytes),
    })
}

pub fn syntax(spec: &str) -> Result<Loaded<Syntax>> {
    load(spec, builtin::by_name, parse_syntax)
}

pub fn rule(spec: &str) -> Result<Loaded<SubstitutionRule>> {
    // the bare builtin name is accepted too
    if spec == "2net" {
        return load("builtin:2net", SubstitutionRule::by_name, SubstitutionRule::from_json);
    }
    load(spec, SubstitutionRule::by_name, SubstitutionRule::from_json)
}

pub fn machine(spec: &str) -> Result<Loaded<TuringMachine>> {
    load(spec, samples::by_name, TuringMachine::from_json)
}

/// `const:P/Q`, `list:A,B,...`, or a JSON file.
pub fn target(spec: &str) -> Result<Loaded<RSeq>> {
    if spec.starts_with("const:") || spec.starts_with("list:") {
        return Ok(Loaded {
            value: spec.parse()?,
            source: spec.to_string(),
            sha256: digest(spec.as_bytes()),
        });
    }
    load(spec, |n| spec_error(n), RSeq::from_json)
}

fn spec_error<T>(name: &str) -> shiftlab_core::Result<T> {
    Err(shiftlab_core::Error::Parse(format!("no builtin target `{name}`")))
}

/// `0101` style bit strings; `-` is the empty string.
pub fn bits(s: &str) -> Result<Vec<bool>> {
    if s == "-" {
        return Ok(Vec::new());
    }
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => anyhow::bail!("`{s}` is not a bit string"),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_and_missing_files() {
        let g = syntax("builtin:golden").unwrap();
        assert_eq!(g.sha256, digest(b"builtin:golden"));
        assert!(syntax("/nonexistent/def.json").is_err());
        assert!(rule("2net").is_ok());
        assert!(machine("builtin:walker").is_ok());
        assert!(target("const:1/2").is_ok());
        assert_eq!(bits("101").unwrap(), [true, false, true]);
        assert!(bits("12").is_err());
    }
}
