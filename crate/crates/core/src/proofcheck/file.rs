use std::fmt::Write as _;

use super::{EqSchema, Justification, Line, Proof, PropSchema, QuantSchema};
use crate::error::{Error, Result};
use crate::syntax::{parse, Var};

fn bad(line: usize, message: impl Into<String>) -> Error {
    Error::ProofFormat {
        line,
        message: message.into(),
    }
}

fn justification_text(j: &Justification) -> String {
    match j {
        Justification::Premise => "premise".into(),
        Justification::PropAxiom(s) => format!("{s:?}"),
        Justification::EqAxiom(s) => format!("{s:?}"),
        Justification::QuantAxiom(s) => format!("{s:?}"),
        Justification::Mp(i, j) => format!("mp {i} {j}"),
        Justification::Gen(i, v) => format!("gen {i} {v}"),
    }
}

fn parse_justification(text: &str, line: usize) -> Result<Justification> {
    let words: Vec<&str> = text.split_whitespace().collect();
    let num = |s: &str| -> Result<usize> {
        s.parse()
            .map_err(|_| bad(line, format!("bad line reference `{s}`")))
    };
    Ok(match words.as_slice() {
        ["premise"] => Justification::Premise,
        ["A1"] => Justification::PropAxiom(PropSchema::A1),
        ["A2"] => Justification::PropAxiom(PropSchema::A2),
        ["A3"] => Justification::PropAxiom(PropSchema::A3),
        ["D1"] => Justification::PropAxiom(PropSchema::D1),
        ["D2"] => Justification::PropAxiom(PropSchema::D2),
        ["E1"] => Justification::EqAxiom(EqSchema::E1),
        ["E2"] => Justification::EqAxiom(EqSchema::E2),
        ["Q1"] => Justification::QuantAxiom(QuantSchema::Q1),
        ["Q2"] => Justification::QuantAxiom(QuantSchema::Q2),
        ["Q3"] => Justification::QuantAxiom(QuantSchema::Q3),
        ["mp", i, j] => Justification::Mp(num(i)?, num(j)?),
        ["gen", i, v] => Justification::Gen(num(i)?, Var::new(v)),
        _ => return Err(bad(line, format!("unknown justification `{text}`"))),
    })
}

/// Reads a proof file. Blank lines and lines starting with `;` are skipped.
///
/// ```text
/// proof
/// 1: (mem #0 #1) ; premise
/// 2: (imp (mem #0 #1) (eq #0 #0)) ; premise
/// 3: (eq #0 #0) ; mp 1 2
/// ```
pub fn parse_proof(text: &str) -> Result<Proof> {
    let mut header = false;
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with(';') {
            continue;
        }
        if !header {
            if body != "proof" {
                return Err(bad(n, "missing `proof` header"));
            }
            header = true;
            continue;
        }
        let (number, rest) = body
            .split_once(':')
            .ok_or_else(|| bad(n, "expected `<n>: <formula> ; <justification>`"))?;
        let number: usize = number
            .trim()
            .parse()
            .map_err(|_| bad(n, format!("bad line number `{number}`")))?;
        if number != lines.len() + 1 {
            return Err(bad(
                n,
                format!("expected line {}, found {number}", lines.len() + 1),
            ));
        }
        let (formula, just) = rest
            .rsplit_once(';')
            .ok_or_else(|| bad(n, "missing justification"))?;
        let formula = parse(formula.trim()).map_err(|e| bad(n, e.to_string()))?;
        lines.push(Line {
            formula,
            justification: parse_justification(just.trim(), n)?,
        });
    }
    if !header {
        return Err(bad(1, "missing `proof` header"));
    }
    Ok(Proof { lines })
}

pub fn write_proof(p: &Proof) -> String {
    let mut out = String::from("proof\n");
    for (i, l) in p.lines.iter().enumerate() {
        writeln!(
            out,
            "{}: {} ; {}",
            i + 1,
            l.formula,
            justification_text(&l.justification)
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::proofcheck::{check_proof, prove};

    #[test]
    fn round_trip() {
        let goal = parse("(all x (or (mem x #1) (not (mem x #1))))").unwrap();
        let proof = prove(&BTreeSet::new(), &goal, 10_000).unwrap();
        let text = write_proof(&proof);
        assert_eq!(parse_proof(&text).unwrap(), proof);
    }

    #[test]
    fn small_file() {
        let text = "proof\n; comment\n1: (mem #0 #1) ; premise\n2: (imp (mem #0 #1) (eq #0 #0)) ; premise\n3: (eq #0 #0) ; mp 1 2\n";
        let proof = parse_proof(text).unwrap();
        let premises: BTreeSet<_> = proof.premises();
        assert_eq!(check_proof(&proof, &premises), Ok(()));
    }

    #[test]
    fn errors_carry_lines() {
        for (text, line) in [
            ("1: (eq x x) ; E1", 1),
            ("proof\n2: (eq x x) ; E1", 2),
            ("proof\n1: (eq x x) ; E9", 2),
            ("proof\n1: (eq x x)", 2),
            ("proof\n1: (eq x ; E1", 2),
        ] {
            match parse_proof(text) {
                Err(Error::ProofFormat { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }
}
