use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::{ids, Class, Family, SatClass, TruthClass};
use crate::error::{Error, Result};
use crate::eval::Assignment;
use crate::hfset::FinStructure;
use crate::syntax::{parse, parse_prefix, Var};

fn bad(line: usize, message: impl Into<String>) -> Error {
    Error::ClassFormat {
        line,
        message: message.into(),
    }
}

/// Reads a class file. Assignment values are element ids of `m`.
///
/// ```text
/// class sat over stage 2
/// family (mem x y)
/// entry (mem x y) x=0 y=1
/// ```
pub fn parse_class(text: &str, m: &FinStructure) -> Result<Class> {
    let mut kind = None;
    let mut structure = String::new();
    let mut family = Family::default();
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split_once(';').map_or(raw, |(b, _)| b).trim();
        if body.is_empty() {
            continue;
        }
        let (word, rest) = body.split_once(char::is_whitespace).unwrap_or((body, ""));
        let rest = rest.trim();
        match word {
            "class" => {
                if kind.is_some() {
                    return Err(bad(line, "duplicate header"));
                }
                let (k, over) = rest
                    .split_once(char::is_whitespace)
                    .ok_or_else(|| bad(line, "expected `class sat|truth over <ref>`"))?;
                let over = over.trim();
                let reference = over
                    .strip_prefix("over")
                    .ok_or_else(|| bad(line, "expected `over`"))?;
                structure = reference.trim().to_string();
                kind = Some(match k {
                    "sat" => true,
                    "truth" => false,
                    other => return Err(bad(line, format!("unknown class kind `{other}`"))),
                });
            }
            _ if kind.is_none() => return Err(bad(line, "missing `class` header")),
            "family" => {
                let f = parse(rest).map_err(|e| bad(line, e.to_string()))?;
                family.insert(f);
            }
            "entry" => {
                let (f, used) = parse_prefix(rest).map_err(|e| bad(line, e.to_string()))?;
                let mut a = Assignment::new();
                for pair in rest[used..].split_whitespace() {
                    let (v, code) = pair
                        .split_once('=')
                        .ok_or_else(|| bad(line, format!("expected var=code, got `{pair}`")))?;
                    let code: u64 = code
                        .parse()
                        .map_err(|_| bad(line, format!("bad element code `{code}`")))?;
                    let e = m.elem_by_id(code).ok_or_else(|| {
                        bad(line, format!("element {code} is not in the structure"))
                    })?;
                    if a.insert(Var::new(v), e).is_some() {
                        return Err(bad(line, format!("variable `{v}` assigned twice")));
                    }
                }
                entries.push((line, f, a));
            }
            other => return Err(bad(line, format!("unknown directive `{other}`"))),
        }
    }
    match kind {
        None => Err(bad(1, "missing `class` header")),
        Some(true) => Ok(Class::Sat(SatClass {
            family,
            entries: entries.into_iter().map(|(_, f, a)| (f, a)).collect(),
            structure,
        })),
        Some(false) => {
            let mut sentences = BTreeSet::new();
            for (line, f, a) in entries {
                if !a.is_empty() {
                    return Err(bad(line, "truth class entries take no assignment"));
                }
                sentences.insert(f);
            }
            Ok(Class::Truth(TruthClass {
                family,
                sentences,
                structure,
            }))
        }
    }
}

pub fn write_class(m: &FinStructure, c: &Class) -> String {
    let mut out = String::new();
    let (kind, family, structure) = match c {
        Class::Sat(s) => ("sat", &s.family, &s.structure),
        Class::Truth(t) => ("truth", &t.family, &t.structure),
    };
    writeln!(out, "class {kind} over {structure}").unwrap();
    for f in family.iter() {
        writeln!(out, "family {f}").unwrap();
    }
    match c {
        Class::Sat(s) => {
            for (f, a) in &s.entries {
                write!(out, "entry {f}").unwrap();
                for (v, id) in ids(m, a) {
                    write!(out, " {v}={id}").unwrap();
                }
                out.push('\n');
            }
        }
        Class::Truth(t) => {
            for s in &t.sentences {
                writeln!(out, "entry {s}").unwrap();
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::{induced_sat, induced_truth};
    use crate::hfset::stage;

    #[test]
    fn round_trip() {
        let m = stage(2).unwrap();
        let fam = Family::depth(&[Var::new("x"), Var::new("y")], 2);
        for c in [
            Class::Sat(induced_sat(&m, &fam).unwrap()),
            Class::Truth(induced_truth(&m, &fam).unwrap()),
        ] {
            let text = write_class(&m, &c);
            assert_eq!(parse_class(&text, &m).unwrap(), c);
        }
    }

    #[test]
    fn small_file() {
        let m = stage(2).unwrap();
        let text = "class sat over stage 2\n; comment\nfamily (mem x y)\nentry (mem x y) x=0 y=1\n";
        let Class::Sat(s) = parse_class(text, &m).unwrap() else {
            panic!("expected a satisfaction class");
        };
        assert_eq!(s.structure, "stage 2");
        assert_eq!(s.entries.len(), 1);
    }

    #[test]
    fn errors_carry_lines() {
        let m = stage(2).unwrap();
        for (text, line) in [
            ("family (mem x y)", 1),
            ("class sat over stage 2\nentry (mem x y) x=7", 2),
            ("class truth over stage 2\nentry (mem #0 #1) x=0", 2),
            ("class sat over s\nfamily (mem x", 2),
            ("class odd over s", 1),
        ] {
            match parse_class(text, &m) {
                Err(Error::ClassFormat { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }
}
