//! Text formats: words and group-spec files.
//!
//! ```toml
//! [group]
//! rank = 2
//! n = 2
//!
//! [conj]
//! "0,1" = "a1^-1"
//!
//! [zconj]
//! "0" = "a0^-1 a1^1"
//! "1" = "a1^-1"
//! ```

use std::collections::BTreeMap;

use serde::Deserialize;
use thiserror::Error;
use toml::Spanned;

use crate::spec::{GroupSpec, Letter, SpecError, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpecFileError {
    #[error("ParseError at {line}:{col}: {message}")]
    Parse { line: usize, col: usize, message: String },
    #[error("ConstraintError: {0}")]
    Constraint(String),
}

impl SpecFileError {
    pub fn name(&self) -> &'static str {
        match self {
            SpecFileError::Parse { .. } => "ParseError",
            SpecFileError::Constraint(_) => "ConstraintError",
        }
    }
}

/// Error inside a single word, with a byte offset into it.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{message}")]
pub struct WordError {
    pub offset: usize,
    pub message: String,
}

/// Parse whitespace-separated tokens `a<idx>^<int>`, `a<idx>`, `z^<int>` or `z`.
pub fn parse_word(s: &str) -> Result<Word, WordError> {
    let mut out = Vec::new();
    let mut pos = 0;
    for tok in s.split_whitespace() {
        let offset = s[pos..].find(tok).map_or(pos, |i| pos + i);
        pos = offset + tok.len();
        let err = |message: String| WordError { offset, message };
        let (base, exp) = match tok.split_once('^') {
            Some((b, e)) => {
                let e: i64 = e.parse().map_err(|_| err(format!("bad exponent in token '{tok}'")))?;
                (b, e)
            }
            None => (tok, 1),
        };
        let letter = if base == "z" {
            Letter::Z
        } else if let Some(idx) = base.strip_prefix('a') {
            let i: usize = idx.parse().map_err(|_| err(format!("bad generator index in token '{tok}'")))?;
            Letter::A(i)
        } else {
            return Err(err(format!("unknown generator in token '{tok}'")));
        };
        if exp != 0 {
            out.push((letter, exp));
        }
    }
    Ok(Word(out))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    group: GroupSection,
    #[serde(default)]
    conj: BTreeMap<Spanned<String>, Spanned<String>>,
    #[serde(default)]
    zconj: BTreeMap<Spanned<String>, Spanned<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupSection {
    rank: usize,
    #[serde(default)]
    n: u32,
}

fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(before.len(), |nl| before.len() - nl - 1) + 1;
    (line, col)
}

fn parse_error(src: &str, offset: usize, message: impl Into<String>) -> SpecFileError {
    let (line, col) = line_col(src, offset);
    SpecFileError::Parse { line, col, message: message.into() }
}

/// Parse a spec file and enforce every presentation constraint.
pub fn parse_spec_str(src: &str) -> Result<GroupSpec, SpecFileError> {
    let file: SpecFile = toml::from_str(src).map_err(|e| {
        let offset = e.span().map_or(0, |s| s.start);
        parse_error(src, offset, e.message().to_string())
    })?;

    // Value spans include the opening quote.
    let word_at = |v: &Spanned<String>| {
        parse_word(v.get_ref()).map_err(|e| parse_error(src, v.span().start + 1 + e.offset, e.message))
    };

    let mut conj = BTreeMap::new();
    for (k, v) in &file.conj {
        let key = k.get_ref();
        let ij = key.split_once(',').and_then(|(i, j)| Some((i.trim().parse().ok()?, j.trim().parse().ok()?)));
        let Some(ij) = ij else {
            return Err(parse_error(src, k.span().start, format!("conj key '{key}' must be \"i,j\"")));
        };
        conj.insert(ij, word_at(v)?);
    }
    let mut zconj = BTreeMap::new();
    for (k, v) in &file.zconj {
        let key = k.get_ref();
        let Ok(j) = key.trim().parse() else {
            return Err(parse_error(src, k.span().start, format!("zconj key '{key}' must be an index")));
        };
        zconj.insert(j, word_at(v)?);
    }

    let spec = GroupSpec::new(file.group.rank, file.group.n, conj, zconj)
        .map_err(|e: SpecError| SpecFileError::Constraint(e.to_string()))?;
    if let Some(v) = spec.check_consistency().first() {
        return Err(SpecFileError::Constraint(v.to_string()));
    }
    Ok(spec)
}

/// Render a spec back to the file format.
pub fn render_spec(spec: &GroupSpec) -> String {
    let mut s = format!("[group]\nrank = {}\nn = {}\n", spec.rank(), spec.n());
    if !spec.conj_words().is_empty() {
        s.push_str("\n[conj]\n");
        for ((i, j), w) in spec.conj_words() {
            s.push_str(&format!("\"{i},{j}\" = \"{w}\"\n"));
        }
    }
    if !spec.zconj_words().is_empty() {
        s.push_str("\n[zconj]\n");
        for (j, w) in spec.zconj_words() {
            s.push_str(&format!("\"{j}\" = \"{w}\"\n"));
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn words() {
        let w = parse_word("a0^-1  a1^2 z").unwrap();
        assert_eq!(w.0, vec![(Letter::A(0), -1), (Letter::A(1), 2), (Letter::Z, 1)]);
        assert!(parse_word("").unwrap().0.is_empty());
        let e = parse_word("a0 b1^2").unwrap_err();
        assert_eq!(e.offset, 3);
        assert!(parse_word("a0^x").is_err());
    }

    #[test]
    fn klein_bottle() {
        let spec = parse_spec_str("[group]\nrank = 2\nn = 0\n[conj]\n\"0,1\" = \"a1^-1\"\n").unwrap();
        assert_eq!(spec.rank(), 2);
        assert_eq!(spec.n(), 0);
        assert_eq!(spec.epsilon(0, 1), -1);
    }

    #[test]
    fn odd_n_rejected() {
        let e = parse_spec_str("[group]\nrank = 1\nn = 3\n[zconj]\n\"0\" = \"a0^-1\"\n").unwrap_err();
        assert!(matches!(&e, SpecFileError::Constraint(m) if m.contains("n must be 0 or even")), "{e}");
    }

    #[test]
    fn bad_token_position() {
        let src = "[group]\nrank = 2\n[conj]\n\"0,1\" = \"a1^-1 q7\"\n";
        match parse_spec_str(src).unwrap_err() {
            SpecFileError::Parse { line, col, .. } => assert_eq!((line, col), (4, 16)),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn non_triangular_rejected() {
        let src = "[group]\nrank = 2\n[conj]\n\"0,1\" = \"a0^1 a1^-1\"\n";
        assert!(matches!(parse_spec_str(src), Err(SpecFileError::Constraint(_))));
        let src = "[group]\nrank = 2\n[conj]\n\"0,1\" = \"a1^2\"\n";
        assert!(matches!(parse_spec_str(src), Err(SpecFileError::Constraint(_))));
    }

    #[test]
    fn render_roundtrip() {
        let src =
            "[group]\nrank = 2\nn = 2\n[conj]\n\"0,1\" = \"a1^-1\"\n[zconj]\n\"0\" = \"a0^-1 a1\"\n\"1\" = \"a1^-1\"\n";
        let spec = parse_spec_str(src).unwrap();
        let again = parse_spec_str(&render_spec(&spec)).unwrap();
        assert_eq!(again.conj_words(), spec.conj_words());
        assert_eq!(again.zconj_words(), spec.zconj_words());
    }
}
