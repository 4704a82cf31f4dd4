use std::collections::BTreeMap;

use super::{Formula, Kind, Term, Var};
use crate::error::{Error, Result};
use crate::hfset::HfSet;

/// `∃v0 ∃v1 … φ` over the free variables in canonical order, `v0` outermost.
pub fn ecl(f: &Formula) -> Formula {
    f.free_vars()
        .iter()
        .rev()
        .fold(f.clone(), |acc, v| Formula::exists(v.clone(), acc))
}

/// `∃v0∈x ∃v1∈x … φ`.
pub fn becl(f: &Formula, x: &Var) -> Result<Formula> {
    if f.mentions(x) {
        return Err(Error::VariableOccurs(x.name().to_string()));
    }
    Ok(f.free_vars()
        .iter()
        .rev()
        .fold(f.clone(), |acc, v| Formula::exists_in(v.clone(), x, acc)))
}

/// Left-nested disjunction `((φ0 ∨ φ1) ∨ φ2) …`.
pub fn big_or(fs: &[Formula]) -> Result<Formula> {
    let (first, rest) = fs.split_first().ok_or(Error::EmptySequence)?;
    Ok(rest
        .iter()
        .fold(first.clone(), |acc, f| Formula::or(acc, f.clone())))
}

/// Bounds every quantifier by `x`.
pub fn relativize(f: &Formula, x: &Var) -> Result<Formula> {
    if f.mentions(x) {
        return Err(Error::VariableOccurs(x.name().to_string()));
    }
    fn go(f: &Formula, x: &Var) -> Formula {
        match f.kind() {
            Kind::Not(a) => Formula::not(go(a, x)),
            Kind::Or(a, b) => Formula::or(go(a, x), go(b, x)),
            Kind::Exists(v, a) => Formula::exists_in(v.clone(), x, go(a, x)),
            _ => f.clone(),
        }
    }
    Ok(go(f, x))
}

#[derive(PartialEq)]
enum Slot<'a> {
    Bound(usize),
    Free(&'a Var),
    Const(&'a HfSet),
}

fn slot<'a>(t: &'a Term, env: &[&Var]) -> Slot<'a> {
    match t {
        Term::Const(c) => Slot::Const(c),
        Term::Var(v) => match env.iter().rposition(|b| *b == v) {
            Some(i) => Slot::Bound(i),
            None => Slot::Free(v),
        },
    }
}

fn check_domain<V>(f: &Formula, a: &BTreeMap<Var, V>) -> Result<()> {
    if a.keys().eq(f.free_vars().iter()) {
        Ok(())
    } else {
        Err(Error::AssignmentDomain {
            expected: f.free_vars().iter().map(|v| v.name().to_string()).collect(),
            found: a.keys().map(|v| v.name().to_string()).collect(),
        })
    }
}

/// Whether two formula/assignment pairs agree position by position: same skeleton, bound
/// variables bound by corresponding quantifiers, and each free occurrence on one side
/// receiving the same value as the occurrence in the same place on the other.
pub fn sim_equiv<V: PartialEq>(
    (f0, a0): (&Formula, &BTreeMap<Var, V>),
    (f1, a1): (&Formula, &BTreeMap<Var, V>),
) -> Result<bool> {
    check_domain(f0, a0)?;
    check_domain(f1, a1)?;
    fn terms<V: PartialEq>(
        (s, e0, a0): (&Term, &[&Var], &BTreeMap<Var, V>),
        (t, e1, a1): (&Term, &[&Var], &BTreeMap<Var, V>),
    ) -> bool {
        match (slot(s, e0), slot(t, e1)) {
            (Slot::Bound(i), Slot::Bound(j)) => i == j,
            (Slot::Const(c), Slot::Const(d)) => c == d,
            (Slot::Free(x), Slot::Free(y)) => a0[x] == a1[y],
            _ => false,
        }
    }
    fn go<'a, V: PartialEq>(
        f: &'a Formula,
        g: &'a Formula,
        e0: &mut Vec<&'a Var>,
        e1: &mut Vec<&'a Var>,
        a0: &BTreeMap<Var, V>,
        a1: &BTreeMap<Var, V>,
    ) -> bool {
        match (f.kind(), g.kind()) {
            (Kind::Mem(s0, t0), Kind::Mem(s1, t1)) | (Kind::Eq(s0, t0), Kind::Eq(s1, t1)) => {
                terms((s0, e0, a0), (s1, e1, a1)) && terms((t0, e0, a0), (t1, e1, a1))
            }
            (Kind::Pred(p, s), Kind::Pred(q, t)) => p == q && terms((s, e0, a0), (t, e1, a1)),
            (Kind::Prov(p, b0), Kind::Prov(q, b1)) => p == q && go(b0, b1, e0, e1, a0, a1),
            (Kind::Not(x), Kind::Not(y)) => go(x, y, e0, e1, a0, a1),
            (Kind::Or(x0, y0), Kind::Or(x1, y1)) => {
                go(x0, x1, e0, e1, a0, a1) && go(y0, y1, e0, e1, a0, a1)
            }
            (Kind::Exists(v, x), Kind::Exists(w, y)) => {
                e0.push(v);
                e1.push(w);
                let r = go(x, y, e0, e1, a0, a1);
                e0.pop();
                e1.pop();
                r
            }
            _ => false,
        }
    }
    Ok(go(f0, f1, &mut Vec::new(), &mut Vec::new(), a0, a1))
}
