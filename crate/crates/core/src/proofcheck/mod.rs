//! A small Hilbert-style proof checker and a bounded prover for easy goals.
//!
//! Propositional axioms over `¬` and `∨`, with `A → B` read as `¬A ∨ B`:
//!
//! ```text
//! A1  B → (C → B)
//! A2  (B → (C → D)) → ((B → C) → (B → D))
//! A3  (¬C → ¬B) → ((¬C → B) → C)
//! D1  (¬B → C) → (B ∨ C)
//! D2  (B ∨ C) → (¬B → C)
//! ```
//!
//! Equality: `E1 t = t` and `E2 s = t → (A → A')` for atoms `A'` obtained from `A` by
//! replacing some occurrences of `s` by `t`. Quantifiers, with `∀v` read as `¬∃v¬`:
//!
//! ```text
//! Q1  φ[t/v] → ∃v φ
//! Q2  ∀v(B → C) → (∃v B → C)     v not free in C
//! Q3  ∀v(B → C) → (B → ∀v C)     v not free in B
//! ```
//!
//! Rules are modus ponens and generalization on a variable free in no premise used.

mod build;
mod file;
mod gref;
mod search;

pub use build::{discharge, prop_atoms, tautology, ProofBuilder};
pub use file::{parse_proof, write_proof};
pub use gref::{check_gref, GrefMode};
pub use search::{prove, prove_with, Prover};

use std::collections::BTreeSet;
use std::fmt;

use crate::syntax::{Formula, Kind, Term, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PropSchema {
    A1,
    A2,
    A3,
    D1,
    D2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EqSchema {
    E1,
    E2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QuantSchema {
    Q1,
    Q2,
    Q3,
}

/// Why a line holds. Line references are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Justification {
    Premise,
    PropAxiom(PropSchema),
    EqAxiom(EqSchema),
    QuantAxiom(QuantSchema),
    /// `Mp(i, j)`: line `j` is `line(i) → this`.
    Mp(usize, usize),
    Gen(usize, Var),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Line {
    pub formula: Formula,
    pub justification: Justification,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Proof {
    pub lines: Vec<Line>,
}

impl Proof {
    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn conclusion(&self) -> Option<&Formula> {
        self.lines.last().map(|l| &l.formula)
    }

    /// Premise formulas actually cited.
    pub fn premises(&self) -> BTreeSet<Formula> {
        self.lines
            .iter()
            .filter(|l| l.justification == Justification::Premise)
            .map(|l| l.formula.clone())
            .collect()
    }
}

/// The first line that fails to check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ProofError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

fn imp(f: &Formula) -> Option<(&Formula, &Formula)> {
    f.as_implication()
}

pub fn is_prop_axiom(f: &Formula, schema: PropSchema) -> bool {
    let matches = || -> Option<bool> {
        let (l, r) = imp(f)?;
        Some(match schema {
            PropSchema::A1 => {
                let (_, b) = imp(r)?;
                b == l
            }
            PropSchema::A2 => {
                let (b, cd) = imp(l)?;
                let (c, d) = imp(cd)?;
                let (bc, bd) = imp(r)?;
                let (b1, c1) = imp(bc)?;
                let (b2, d1) = imp(bd)?;
                b1 == b && b2 == b && c1 == c && d1 == d
            }
            PropSchema::A3 => {
                let (nc, nb) = imp(l)?;
                let (c, b) = (nc.as_not()?, nb.as_not()?);
                let (inner, c2) = imp(r)?;
                let (nc2, b2) = imp(inner)?;
                nc2 == nc && b2 == b && c2 == c
            }
            PropSchema::D1 => {
                let (nb, c) = imp(l)?;
                let Kind::Or(b2, c2) = r.kind() else {
                    return Some(false);
                };
                nb.as_not()? == b2 && c == c2
            }
            PropSchema::D2 => {
                let Kind::Or(b, c) = l.kind() else {
                    return Some(false);
                };
                let (nb, c2) = imp(r)?;
                nb.as_not()? == b && c2 == c
            }
        })
    };
    matches().unwrap_or(false)
}

pub fn is_eq_axiom(f: &Formula, schema: EqSchema) -> bool {
    match schema {
        EqSchema::E1 => matches!(f.kind(), Kind::Eq(a, b) if a == b),
        EqSchema::E2 => {
            let Some((eq, rest)) = imp(f) else {
                return false;
            };
            let Kind::Eq(s, t) = eq.kind() else {
                return false;
            };
            let Some((a, b)) = imp(rest) else {
                return false;
            };
            let ok = |x: &Term, y: &Term| x == y || (x == s && y == t);
            match (a.kind(), b.kind()) {
                (Kind::Mem(a1, a2), Kind::Mem(b1, b2)) | (Kind::Eq(a1, a2), Kind::Eq(b1, b2)) => {
                    ok(a1, b1) && ok(a2, b2)
                }
                (Kind::Pred(p, a1), Kind::Pred(q, b1)) => p == q && ok(a1, b1),
                _ => false,
            }
        }
    }
}

fn candidate_terms(f: &Formula, v: &Var) -> Vec<Term> {
    let mut out = vec![Term::Var(v.clone())];
    f.visit_terms(&mut |t| {
        if !out.contains(t) {
            out.push(t.clone());
        }
    });
    out
}

pub fn is_quant_axiom(f: &Formula, schema: QuantSchema) -> bool {
    let Some((l, r)) = imp(f) else {
        return false;
    };
    match schema {
        QuantSchema::Q1 => {
            let Kind::Exists(v, body) = r.kind() else {
                return false;
            };
            candidate_terms(l, v)
                .into_iter()
                .any(|t| body.substitute_one(v, t) == *l)
        }
        QuantSchema::Q2 | QuantSchema::Q3 => {
            let Some((v, body)) = l.as_forall() else {
                return false;
            };
            let Some((b, c)) = imp(body) else {
                return false;
            };
            let Some((x, y)) = imp(r) else {
                return false;
            };
            if schema == QuantSchema::Q2 {
                matches!(x.kind(), Kind::Exists(w, b2) if w == v && b2 == b)
                    && y == c
                    && !c.has_free(v)
            } else {
                x == b
                    && matches!(y.as_forall(), Some((w, c2)) if w == v && c2 == c)
                    && !b.has_free(v)
            }
        }
    }
}

/// Checks every line; premise lines must cite members of `premises`.
pub fn check_proof(p: &Proof, premises: &BTreeSet<Formula>) -> Result<(), ProofError> {
    let mut deps: Vec<BTreeSet<usize>> = Vec::with_capacity(p.lines.len());
    for (i, line) in p.lines.iter().enumerate() {
        let n = i + 1;
        let err = |message: String| ProofError { line: n, message };
        let earlier = |k: usize| -> Result<&Line, ProofError> {
            if k == 0 || k >= n {
                return Err(err(format!(
                    "reference to line {k} is not to an earlier line"
                )));
            }
            Ok(&p.lines[k - 1])
        };
        let f = &line.formula;
        let used = match &line.justification {
            Justification::Premise => {
                if !premises.contains(f) {
                    return Err(err(format!("{f} is not a premise")));
                }
                BTreeSet::from([n])
            }
            Justification::PropAxiom(s) => {
                if !is_prop_axiom(f, *s) {
                    return Err(err(format!("{f} is not an instance of {s:?}")));
                }
                BTreeSet::new()
            }
            Justification::EqAxiom(s) => {
                if !is_eq_axiom(f, *s) {
                    return Err(err(format!("{f} is not an instance of {s:?}")));
                }
                BTreeSet::new()
            }
            Justification::QuantAxiom(s) => {
                if !is_quant_axiom(f, *s) {
                    return Err(err(format!("{f} is not an instance of {s:?}")));
                }
                BTreeSet::new()
            }
            Justification::Mp(a, b) => {
                let (la, lb) = (earlier(*a)?, earlier(*b)?);
                match imp(&lb.formula) {
                    Some((ante, cons)) if *ante == la.formula && cons == f => {}
                    _ => return Err(err(format!("line {b} is not line {a} implying {f}"))),
                }
                &deps[a - 1] | &deps[b - 1]
            }
            Justification::Gen(a, v) => {
                let la = earlier(*a)?;
                if *f != Formula::forall(v.clone(), la.formula.clone()) {
                    return Err(err(format!("{f} does not generalize line {a} on {v}")));
                }
                if let Some(&q) = deps[a - 1]
                    .iter()
                    .find(|&&q| p.lines[q - 1].formula.has_free(v))
                {
                    return Err(err(format!("{v} is free in premise on line {q}")));
                }
                deps[a - 1].clone()
            }
        };
        deps.push(used);
    }
    Ok(())
}
