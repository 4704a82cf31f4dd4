use std::fmt::Write as _;

use super::RefMeta;
use crate::error::{Error, Result};
use crate::syntax::{parse, Formula};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoryEntry {
    pub sentence: Formula,
    pub meta: Option<RefMeta>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theory {
    pub name: String,
    pub entries: Vec<TheoryEntry>,
}

impl Theory {
    pub fn sentences(&self) -> impl Iterator<Item = &Formula> {
        self.entries.iter().map(|e| &e.sentence)
    }
}

fn bad(line: usize, message: impl Into<String>) -> Error {
    Error::TheoryFormat {
        line,
        message: message.into(),
    }
}

/// Drops a `#` comment. A `#` followed by a digit or `{` starts a constant instead.
fn strip_comment(line: &str) -> &str {
    let bytes = line.as_bytes();
    for (i, &c) in bytes.iter().enumerate() {
        if c == b'#' && !matches!(bytes.get(i + 1), Some(b'0'..=b'9' | b'{')) {
            return &line[..i];
        }
    }
    line
}

fn parse_meta(text: &str, line: usize) -> Result<RefMeta> {
    let (mut base, mut n, mut iter) = (None, None, 1);
    for word in text.split_whitespace() {
        let (key, value) = word
            .split_once('=')
            .ok_or_else(|| bad(line, format!("expected key=value, found `{word}`")))?;
        let number = || {
            value
                .parse::<u32>()
                .map_err(|_| bad(line, format!("bad number `{value}`")))
        };
        match key {
            "base" => base = Some(value.to_string()),
            "n" => n = Some(number()?),
            "iter" => iter = number()?,
            _ => return Err(bad(line, format!("unknown annotation key `{key}`"))),
        }
    }
    Ok(RefMeta {
        base: base.ok_or_else(|| bad(line, "@ref needs base="))?,
        n: n.ok_or_else(|| bad(line, "@ref needs n="))?,
        iter,
    })
}

/// Reads a theory file: a `theory <name>` header, then one sentence per line, optionally
/// followed by `@ref base=<name> n=<k> iter=<m>`.
pub fn parse_theory(text: &str) -> Result<Theory> {
    let mut name = None;
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = strip_comment(raw).trim();
        if body.is_empty() {
            continue;
        }
        let Some(_) = &name else {
            let rest = body
                .strip_prefix("theory")
                .filter(|r| r.starts_with(char::is_whitespace))
                .map(str::trim)
                .filter(|r| !r.is_empty() && !r.contains(char::is_whitespace))
                .ok_or_else(|| bad(line, "expected `theory <name>` header"))?;
            name = Some(rest.to_string());
            continue;
        };
        let (formula, meta) = match body.split_once("@ref") {
            Some((f, m)) => (f.trim(), Some(parse_meta(m, line)?)),
            None => (body, None),
        };
        let sentence = parse(formula).map_err(|e| bad(line, e.to_string()))?;
        if !sentence.is_sentence() {
            return Err(bad(line, format!("{sentence} has free variables")));
        }
        entries.push(TheoryEntry { sentence, meta });
    }
    Ok(Theory {
        name: name.ok_or_else(|| bad(1, "expected `theory <name>` header"))?,
        entries,
    })
}

pub fn write_theory(t: &Theory) -> String {
    let mut out = format!("theory {}\n", t.name);
    for e in &t.entries {
        match &e.meta {
            Some(m) => writeln!(
                out,
                "{} @ref base={} n={} iter={}",
                e.sentence, m.base, m.n, m.iter
            ),
            None => writeln!(out, "{}", e.sentence),
        }
        .unwrap();
    }
    out
}
