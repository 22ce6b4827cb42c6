//! Resolving sequence selectors and reading automaton files.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use leastper::format::{load_dfa, load_dfao};
use leastper::sequences::Builtin;
use leastper::{Dfa, Dfao};

/// A sequence given by built-in name or DFAO file, with a display name.
pub struct Sequence {
    pub name: String,
    pub builtin: Option<Builtin>,
    pub dfao: Dfao,
}

pub fn sequence(selector: &str) -> Result<Sequence> {
    if let Ok(b) = selector.parse::<Builtin>() {
        return Ok(Sequence {
            name: b.name().to_string(),
            builtin: Some(b),
            dfao: b.dfao(),
        });
    }
    let path = Path::new(selector);
    if !path.exists() {
        let names: Vec<&str> = Builtin::ALL.iter().map(|b| b.name()).collect();
        bail!(
            "`{selector}` is neither a file nor a built-in sequence ({})",
            names.join(", ")
        );
    }
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let dfao = load_dfao(&text).with_context(|| format!("parsing {}", path.display()))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "sequence".into());
    Ok(Sequence {
        name,
        builtin: None,
        dfao,
    })
}

pub fn automaton(path: &Path) -> Result<Dfa> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    load_dfa(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn unary(path: &Path) -> Result<Dfa> {
    let a = automaton(path)?;
    if a.arity() != 1 {
        bail!("{} has {} tracks, expected 1", path.display(), a.arity());
    }
    Ok(a)
}

/// Splits `name=source`.
pub fn binding(text: &str) -> Result<(String, Sequence)> {
    let Some((name, source)) = text.split_once('=') else {
        bail!("expected NAME=SOURCE, got `{text}`");
    };
    let name = name.trim();
    if name.is_empty() {
        bail!("empty sequence name in `{text}`");
    }
    Ok((name.to_string(), sequence(source.trim())?))
}
