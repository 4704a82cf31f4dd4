//! First-order formulas over `{¬, ∨, ∃}` with membership, equality, and two kinds of extra
//! atoms: unary predicates (`P`, `Fin`) and provability placeholders applied to a quoted
//! formula.

mod analyze;
mod coding;
pub mod enumerate;
mod parse;
mod subst;
mod transform;

pub use analyze::{Analysis, Levy};
pub use parse::{parse, parse_prefix};
pub use subst::{fresh_for, fresh_var};
pub use transform::{becl, big_or, ecl, relativize, sim_equiv};

use std::cmp::Ordering;
use std::fmt;
use std::hash::{DefaultHasher, Hash, Hasher};
use std::sync::{Arc, OnceLock};

use crate::hfset::HfSet;

/// A variable name. Names of the form `v<i>` sort by index, ahead of every other name.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: &str) -> Var {
        Var(Arc::from(name))
    }

    /// The variable `v<i>`.
    pub fn indexed(i: usize) -> Var {
        Var::new(&format!("v{i}"))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    /// The index `i` when the name is exactly `v<i>` without leading zeros.
    pub fn index(&self) -> Option<usize> {
        let digits = self.0.strip_prefix('v')?;
        if digits.is_empty() || (digits.len() > 1 && digits.starts_with('0')) {
            return None;
        }
        if !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        digits.parse().ok()
    }
}

impl Ord for Var {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.index(), other.index()) {
            (Some(a), Some(b)) => a.cmp(&b),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => self.0.cmp(&other.0),
        }
    }
}

impl PartialOrd for Var {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    Const(HfSet),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Var::new(name))
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }
}

impl From<Var> for Term {
    fn from(v: Var) -> Term {
        Term::Var(v)
    }
}

impl From<&Var> for Term {
    fn from(v: &Var) -> Term {
        Term::Var(v.clone())
    }
}

impl From<HfSet> for Term {
    fn from(c: HfSet) -> Term {
        Term::Const(c)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Const(c) => write!(f, "{c}"),
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Kind {
    Mem(Term, Term),
    Eq(Term, Term),
    /// A unary predicate atom such as `P(t)` or `Fin(t)`.
    Pred(Arc<str>, Term),
    /// A provability placeholder applied to the code of a formula. Its free variables are
    /// those of the quoted formula, which is how `Prov(⌜φ(ẋ)⌝)` depends on `x`.
    Prov(Arc<str>, Formula),
    Not(Formula),
    Or(Formula, Formula),
    Exists(Var, Formula),
}

struct Node {
    kind: Kind,
    free: Box<[Var]>,
    depth: u32,
    hash: u64,
    code: OnceLock<HfSet>,
}

/// An immutable, shared formula with cached free variables, depth and hash.
#[derive(Clone)]
pub struct Formula(Arc<Node>);

fn merge(a: &[Var], b: &[Var]) -> Vec<Var> {
    let mut out: Vec<Var> = a.iter().chain(b).cloned().collect();
    out.sort();
    out.dedup();
    out
}

fn term_vars(ts: &[&Term]) -> Vec<Var> {
    let mut out: Vec<Var> = ts.iter().filter_map(|t| t.as_var().cloned()).collect();
    out.sort();
    out.dedup();
    out
}

impl Formula {
    fn build(kind: Kind) -> Formula {
        let (free, depth) = match &kind {
            Kind::Mem(a, b) | Kind::Eq(a, b) => (term_vars(&[a, b]), 1),
            Kind::Pred(_, t) => (term_vars(&[t]), 1),
            Kind::Prov(_, body) => (body.free_vars().to_vec(), 1),
            Kind::Not(a) => (a.free_vars().to_vec(), a.depth() + 1),
            Kind::Or(a, b) => (
                merge(a.free_vars(), b.free_vars()),
                a.depth().max(b.depth()) + 1,
            ),
            Kind::Exists(v, a) => (
                a.free_vars().iter().filter(|w| *w != v).cloned().collect(),
                a.depth() + 1,
            ),
        };
        let mut h = DefaultHasher::new();
        match &kind {
            Kind::Mem(a, b) => (0u8, a, b).hash(&mut h),
            Kind::Eq(a, b) => (1u8, a, b).hash(&mut h),
            Kind::Pred(p, t) => (2u8, p, t).hash(&mut h),
            Kind::Prov(p, body) => (3u8, p, body.0.hash).hash(&mut h),
            Kind::Not(a) => (4u8, a.0.hash).hash(&mut h),
            Kind::Or(a, b) => (5u8, a.0.hash, b.0.hash).hash(&mut h),
            Kind::Exists(v, a) => (6u8, v, a.0.hash).hash(&mut h),
        }
        Formula(Arc::new(Node {
            kind,
            free: free.into_boxed_slice(),
            depth,
            hash: h.finish(),
            code: OnceLock::new(),
        }))
    }

    pub fn mem(a: impl Into<Term>, b: impl Into<Term>) -> Formula {
        Formula::build(Kind::Mem(a.into(), b.into()))
    }

    pub fn equals(a: impl Into<Term>, b: impl Into<Term>) -> Formula {
        Formula::build(Kind::Eq(a.into(), b.into()))
    }

    pub fn pred(name: &str, t: impl Into<Term>) -> Formula {
        Formula::build(Kind::Pred(Arc::from(name), t.into()))
    }

    pub fn prov(name: &str, body: Formula) -> Formula {
        Formula::build(Kind::Prov(Arc::from(name), body))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Formula) -> Formula {
        Formula::build(Kind::Not(a))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::build(Kind::Or(a, b))
    }

    pub fn exists(v: Var, a: Formula) -> Formula {
        Formula::build(Kind::Exists(v, a))
    }

    /// `¬(¬a ∨ ¬b)`
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::or(Formula::not(a), Formula::not(b)))
    }

    /// `¬a ∨ b`
    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::or(Formula::not(a), b)
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and(
            Formula::implies(a.clone(), b.clone()),
            Formula::implies(b, a),
        )
    }

    /// `¬∃v¬a`
    pub fn forall(v: Var, a: Formula) -> Formula {
        Formula::not(Formula::exists(v, Formula::not(a)))
    }

    /// `∃v (v∈w ∧ a)`
    pub fn exists_in(v: Var, w: impl Into<Term>, a: Formula) -> Formula {
        let guard = Formula::mem(&v, w);
        Formula::exists(v, Formula::and(guard, a))
    }

    /// `∀v (v∈w → a)`
    pub fn forall_in(v: Var, w: impl Into<Term>, a: Formula) -> Formula {
        let guard = Formula::mem(&v, w);
        Formula::forall(v, Formula::implies(guard, a))
    }

    pub fn kind(&self) -> &Kind {
        &self.0.kind
    }

    /// Free variables in canonical order.
    pub fn free_vars(&self) -> &[Var] {
        &self.0.free
    }

    pub fn has_free(&self, v: &Var) -> bool {
        self.0.free.binary_search(v).is_ok()
    }

    /// Nodes on the longest root-to-leaf path; atoms have depth 1.
    pub fn depth(&self) -> u32 {
        self.0.depth
    }

    pub fn is_sentence(&self) -> bool {
        self.0.free.is_empty()
    }

    pub fn is_atomic(&self) -> bool {
        self.0.depth == 1
    }

    pub(crate) fn addr(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn ptr_eq(&self, other: &Formula) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn immediate_subformulas(&self) -> Vec<Formula> {
        match self.kind() {
            Kind::Mem(..) | Kind::Eq(..) | Kind::Pred(..) | Kind::Prov(..) => vec![],
            Kind::Not(a) | Kind::Exists(_, a) => vec![a.clone()],
            Kind::Or(a, b) => {
                if a == b {
                    vec![a.clone()]
                } else {
                    vec![a.clone(), b.clone()]
                }
            }
        }
    }

    /// All subformulas including `self`, each once, children before parents.
    pub fn subformulas(&self) -> Vec<Formula> {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        fn walk(
            f: &Formula,
            seen: &mut std::collections::HashSet<Formula>,
            out: &mut Vec<Formula>,
        ) {
            if seen.contains(f) {
                return;
            }
            for s in f.immediate_subformulas() {
                walk(&s, seen, out);
            }
            seen.insert(f.clone());
            out.push(f.clone());
        }
        walk(self, &mut seen, &mut out);
        out
    }

    /// Constants occurring anywhere, including inside quoted formulas.
    pub fn constants(&self) -> Vec<HfSet> {
        let mut out = std::collections::BTreeSet::new();
        self.visit_terms(&mut |t| {
            if let Term::Const(c) = t {
                out.insert(c.clone());
            }
        });
        out.into_iter().collect()
    }

    pub fn has_constants(&self) -> bool {
        let mut any = false;
        self.visit_terms(&mut |t| any |= matches!(t, Term::Const(_)));
        any
    }

    /// Whether only `∈` and `=` atoms occur.
    pub fn is_pure(&self) -> bool {
        match self.kind() {
            Kind::Mem(..) | Kind::Eq(..) => true,
            Kind::Pred(..) | Kind::Prov(..) => false,
            Kind::Not(a) | Kind::Exists(_, a) => a.is_pure(),
            Kind::Or(a, b) => a.is_pure() && b.is_pure(),
        }
    }

    /// Whether `v` occurs anywhere, free or bound.
    pub fn mentions(&self, v: &Var) -> bool {
        let mut found = false;
        self.visit_vars(&mut |w| found |= w == v);
        found
    }

    pub(crate) fn visit_terms(&self, f: &mut dyn FnMut(&Term)) {
        match self.kind() {
            Kind::Mem(a, b) | Kind::Eq(a, b) => {
                f(a);
                f(b);
            }
            Kind::Pred(_, t) => f(t),
            Kind::Prov(_, body) => body.visit_terms(f),
            Kind::Not(a) | Kind::Exists(_, a) => a.visit_terms(f),
            Kind::Or(a, b) => {
                a.visit_terms(f);
                b.visit_terms(f);
            }
        }
    }

    /// Every variable occurrence, binders included.
    pub(crate) fn visit_vars(&self, f: &mut dyn FnMut(&Var)) {
        if let Kind::Exists(v, _) = self.kind() {
            f(v);
        }
        match self.kind() {
            Kind::Prov(_, body) => body.visit_vars(f),
            Kind::Not(a) | Kind::Exists(_, a) => a.visit_vars(f),
            Kind::Or(a, b) => {
                a.visit_vars(f);
                b.visit_vars(f);
            }
            _ => self.visit_terms(&mut |t| {
                if let Term::Var(v) = t {
                    f(v)
                }
            }),
        }
    }

    /// Matches `¬a ∨ b`, the shape of an implication.
    pub fn as_implication(&self) -> Option<(&Formula, &Formula)> {
        match self.kind() {
            Kind::Or(l, b) => match l.kind() {
                Kind::Not(a) => Some((a, b)),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn as_not(&self) -> Option<&Formula> {
        match self.kind() {
            Kind::Not(a) => Some(a),
            _ => None,
        }
    }

    /// Matches `¬∃v¬a`.
    pub fn as_forall(&self) -> Option<(&Var, &Formula)> {
        match self.as_not()?.kind() {
            Kind::Exists(v, body) => Some((v, body.as_not()?)),
            _ => None,
        }
    }

    /// The s-expression text; [`parse`] reads it back to an identical formula.
    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl PartialEq for Formula {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.hash == other.0.hash
                && self.0.depth == other.0.depth
                && self.0.kind == other.0.kind)
    }
}

impl Eq for Formula {}

impl Hash for Formula {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash)
    }
}

impl Ord for Formula {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.0.kind.cmp(&other.0.kind)
    }
}

impl PartialOrd for Formula {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            Kind::Mem(a, b) => write!(f, "(mem {a} {b})"),
            Kind::Eq(a, b) => write!(f, "(eq {a} {b})"),
            Kind::Pred(p, t) => write!(f, "(pred {p} {t})"),
            Kind::Prov(p, body) => write!(f, "(prov {p} {body})"),
            Kind::Not(a) => write!(f, "(not {a})"),
            Kind::Or(a, b) => write!(f, "(or {a} {b})"),
            Kind::Exists(v, a) => write!(f, "(ex {v} {a})"),
        }
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::str::FromStr for Formula {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Formula, Self::Err> {
        parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv_from_scratch(f: &Formula) -> Vec<Var> {
        let mut out = std::collections::BTreeSet::new();
        fn go(f: &Formula, bound: &mut Vec<Var>, out: &mut std::collections::BTreeSet<Var>) {
            let mut term = |t: &Term, bound: &Vec<Var>| {
                if let Term::Var(v) = t {
                    if !bound.contains(v) {
                        out.insert(v.clone());
                    }
                }
            };
            match f.kind() {
                Kind::Mem(a, b) | Kind::Eq(a, b) => {
                    term(a, bound);
                    term(b, bound);
                }
                Kind::Pred(_, t) => term(t, bound),
                Kind::Prov(_, a) | Kind::Not(a) => go(a, bound, out),
                Kind::Or(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                Kind::Exists(v, a) => {
                    bound.push(v.clone());
                    go(a, bound, out);
                    bound.pop();
                }
            }
        }
        go(f, &mut vec![], &mut out);
        out.into_iter().collect()
    }

    #[test]
    fn var_order() {
        let mut vs = [
            Var::new("x"),
            Var::indexed(10),
            Var::new("a"),
            Var::indexed(2),
        ];
        vs.sort();
        let names: Vec<&str> = vs.iter().map(Var::name).collect();
        assert_eq!(names, ["v2", "v10", "a", "x"]);
        assert_eq!(Var::new("v01").index(), None);
    }

    #[test]
    fn depth_and_free_vars() {
        let f = parse("(ex x (mem x y))").unwrap();
        assert_eq!(f.free_vars(), &[Var::new("y")]);
        assert_eq!(f.depth(), 2);
        assert!(parse("(mem x y)").unwrap().is_atomic());
        let g = parse("(or (not (mem x y)) (ex z (eq z z)))").unwrap();
        assert_eq!(g.depth(), 3);
        for s in g.subformulas() {
            for c in s.immediate_subformulas() {
                assert!(c.depth() < s.depth());
            }
        }
    }

    #[test]
    fn sugar_is_desugared() {
        let f = parse("(all x (mem x y))").unwrap();
        let expected = Formula::not(Formula::exists(
            Var::new("x"),
            Formula::not(Formula::mem(Term::var("x"), Term::var("y"))),
        ));
        assert_eq!(f, expected);
        assert_eq!(f.render(), "(not (ex x (not (mem x y))))");
    }

    mod props {
        use super::*;
        use crate::syntax::enumerate::random_formula;
        use proptest::prelude::*;
        use rand::SeedableRng;

        proptest! {
            #[test]
            fn cached_free_vars_match(seed in any::<u64>(), depth in 1u32..8) {
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let vars = [Var::new("x"), Var::new("y"), Var::new("z")];
                let f = random_formula(&mut rng, &vars, &[HfSet::from_code(1)], depth);
                prop_assert_eq!(f.free_vars().to_vec(), fv_from_scratch(&f));
                prop_assert!(f.depth() >= 1 && f.depth() <= depth);
                prop_assert_eq!(f.is_atomic(), matches!(f.kind(), Kind::Mem(..) | Kind::Eq(..)));
            }
        }
    }
}
