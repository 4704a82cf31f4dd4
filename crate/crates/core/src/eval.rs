//! Tarskian satisfaction over finite structures, elementary diagrams and pointwise reflection.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hfset::{self, Elem, FinStructure, HfSet};
use crate::syntax::{fresh_for, relativize, Formula, Kind, Term, Var};

pub type Assignment = BTreeMap<Var, Elem>;

pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Meaning of the atoms beyond `∈` and `=`.
pub trait Interpretation {
    fn pred(&self, name: &str, e: Elem) -> Option<bool>;

    /// Truth of a provability atom applied to a closed quoted formula.
    fn prov(&self, _name: &str, _quoted: &Formula) -> Option<bool> {
        None
    }
}

/// `Fin` holds of everything, since every element of a finite structure is finite.
pub struct Plain;

impl Interpretation for Plain {
    fn pred(&self, name: &str, _: Elem) -> Option<bool> {
        (name == "Fin").then_some(true)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Short-circuits disjunctions and quantifiers.
    Fast,
    /// Evaluates every branch.
    Oracle,
}

struct Run {
    steps: u64,
    closed: HashMap<usize, bool>,
}

pub struct Evaluator<'a> {
    m: &'a FinStructure,
    mode: Mode,
    budget: u64,
    interp: &'a dyn Interpretation,
}

/// Satisfaction with the default budget in fast mode.
pub fn sat(m: &FinStructure, f: &Formula, a: &Assignment) -> Result<bool> {
    Evaluator::new(m).sat(f, a)
}

/// Truth of a sentence.
pub fn holds(m: &FinStructure, f: &Formula) -> Result<bool> {
    sat(m, f, &Assignment::new())
}

pub(crate) fn check_constants(m: &FinStructure, f: &Formula) -> Result<()> {
    match f.constants().into_iter().find(|c| m.elem_of(c).is_none()) {
        Some(c) => Err(Error::ConstantOutside(c.to_string())),
        None => Ok(()),
    }
}

impl<'a> Evaluator<'a> {
    pub fn new(m: &'a FinStructure) -> Self {
        Evaluator {
            m,
            mode: Mode::Fast,
            budget: DEFAULT_BUDGET,
            interp: &Plain,
        }
    }

    pub fn mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn interpretation(mut self, interp: &'a dyn Interpretation) -> Self {
        self.interp = interp;
        self
    }

    pub fn sat(&self, f: &Formula, a: &Assignment) -> Result<bool> {
        if !a.keys().eq(f.free_vars().iter()) {
            return Err(Error::AssignmentDomain {
                expected: f.free_vars().iter().map(|v| v.name().to_string()).collect(),
                found: a.keys().map(|v| v.name().to_string()).collect(),
            });
        }
        if let Some((_, &e)) = a.iter().find(|(_, &e)| e as usize >= self.m.len()) {
            return Err(Error::Invalid(format!(
                "element {e} is not in the structure"
            )));
        }
        check_constants(self.m, f)?;
        let mut env: Vec<(&Var, Elem)> = a.iter().map(|(v, &e)| (v, e)).collect();
        let mut run = Run {
            steps: 0,
            closed: HashMap::new(),
        };
        self.eval(f, &mut env, &mut run)
    }

    fn term(&self, t: &Term, env: &[(&Var, Elem)]) -> Elem {
        match t {
            Term::Var(v) => {
                env.iter()
                    .rev()
                    .find(|(w, _)| *w == v)
                    .expect("free variable is assigned")
                    .1
            }
            Term::Const(c) => self.m.elem_of(c).expect("constants checked"),
        }
    }

    fn eval<'f>(
        &self,
        f: &'f Formula,
        env: &mut Vec<(&'f Var, Elem)>,
        run: &mut Run,
    ) -> Result<bool> {
        run.steps += 1;
        if run.steps > self.budget {
            return Err(Error::BudgetExceeded(self.budget));
        }
        // Shared closed subformulas are evaluated once per call in fast mode.
        let memo = self.mode == Mode::Fast && f.is_sentence() && !f.is_atomic();
        if memo {
            if let Some(&known) = run.closed.get(&f.addr()) {
                return Ok(known);
            }
        }
        let value = self.clause(f, env, run)?;
        if memo {
            run.closed.insert(f.addr(), value);
        }
        Ok(value)
    }

    fn clause<'f>(
        &self,
        f: &'f Formula,
        env: &mut Vec<(&'f Var, Elem)>,
        run: &mut Run,
    ) -> Result<bool> {
        match f.kind() {
            Kind::Mem(a, b) => Ok(self.m.mem(self.term(a, env), self.term(b, env))),
            Kind::Eq(a, b) => Ok(self.term(a, env) == self.term(b, env)),
            Kind::Pred(p, t) => self
                .interp
                .pred(p, self.term(t, env))
                .ok_or_else(|| Error::Uninterpreted(p.to_string())),
            Kind::Prov(p, body) => {
                let closing: BTreeMap<Var, HfSet> = body
                    .free_vars()
                    .iter()
                    .map(|v| {
                        (
                            v.clone(),
                            self.m.constant(self.term(&Term::Var(v.clone()), env)),
                        )
                    })
                    .collect();
                let quoted = body.close(&closing)?;
                self.interp
                    .prov(p, &quoted)
                    .ok_or_else(|| Error::Uninterpreted(p.to_string()))
            }
            Kind::Not(a) => Ok(!self.eval(a, env, run)?),
            Kind::Or(a, b) => {
                let left = self.eval(a, env, run)?;
                if left && self.mode == Mode::Fast {
                    return Ok(true);
                }
                let right = self.eval(b, env, run)?;
                Ok(left || right)
            }
            Kind::Exists(v, a) => {
                // `∃v(v∈w ∧ φ)` only needs the members of `w`.
                if self.mode == Mode::Fast {
                    if let Some((v, w, rest)) = f.as_bounded_exists() {
                        let bound = self.term(w, env);
                        for &e in self.m.members(bound) {
                            env.push((v, e));
                            let r = self.eval(rest, env, run);
                            env.pop();
                            if !r? {
                                return Ok(true);
                            }
                        }
                        return Ok(false);
                    }
                }
                let mut found = false;
                for e in self.m.elements() {
                    env.push((v, e));
                    let r = self.eval(a, env, run);
                    env.pop();
                    found |= r?;
                    if found && self.mode == Mode::Fast {
                        break;
                    }
                }
                Ok(found)
            }
        }
    }
}

/// A set of sentences over a fixed structure that can be queried for membership.
pub trait TruthSet {
    fn structure(&self) -> &FinStructure;

    /// Whether the sentence lies in the family the set speaks about.
    fn in_scope(&self, s: &Formula) -> bool;

    fn contains(&self, s: &Formula) -> Result<bool>;
}

/// The sentences of bounded depth true in a structure: the elementary diagram when constants
/// are allowed, the theory otherwise.
#[derive(Clone, Debug)]
pub struct TruthClassView {
    m: Arc<FinStructure>,
    depth_bound: u32,
    with_constants: bool,
}

pub fn diagram(m: Arc<FinStructure>, depth_bound: u32, with_constants: bool) -> TruthClassView {
    TruthClassView {
        m,
        depth_bound,
        with_constants,
    }
}

impl TruthClassView {
    pub fn depth_bound(&self) -> u32 {
        self.depth_bound
    }

    pub fn with_constants(&self) -> bool {
        self.with_constants
    }
}

impl TruthSet for TruthClassView {
    fn structure(&self) -> &FinStructure {
        &self.m
    }

    fn in_scope(&self, s: &Formula) -> bool {
        s.is_sentence()
            && s.is_pure()
            && s.depth() <= self.depth_bound
            && if self.with_constants {
                check_constants(&self.m, s).is_ok()
            } else {
                !s.has_constants()
            }
    }

    fn contains(&self, s: &Formula) -> Result<bool> {
        Ok(self.in_scope(s) && holds(&self.m, s)?)
    }
}

fn stage_bounds(n: u32, a: u32) -> Result<()> {
    let cap = hfset::max_stage();
    if !(1 <= a && a <= n && n <= cap) {
        return Err(Error::StageBounds(format!(
            "need 1 <= a <= N <= {cap}, got a = {a}, N = {n}"
        )));
    }
    Ok(())
}

/// Whether `V_a` reflects `φ` inside `V_N`: for every assignment into `V_a`, truth in `V_N`
/// equals truth in `V_a`. Truth in `V_a` is computed on the substructure and again through
/// the relativization to `V_a` inside `V_N`; the two must agree.
pub fn reflects(n: u32, a: u32, f: &Formula) -> Result<bool> {
    stage_bounds(n, a)?;
    if f.has_constants() {
        return Err(Error::Invalid(
            "reflection takes constant-free formulas".into(),
        ));
    }
    let big = hfset::stage(n)?;
    let small = hfset::stage(a)?;
    let bound = crate::syntax::enumerate::assignments;
    let bounder = fresh_for(f, "x");
    let relativized = relativize(f, &bounder)?;
    // V_a as an element of V_N has code 2^|V_a| - 1.
    let va = (a < n).then(|| {
        big.elem_by_id((1u64 << small.len()) - 1)
            .expect("V_a is an element of V_N")
    });
    let values: Vec<Elem> = small.elements().collect();
    let mut all = true;
    for asg in bound(f.free_vars(), &values) {
        let outer = sat(&big, f, &asg)?;
        let inner = sat(&small, f, &asg)?;
        if let Some(va) = va {
            let mut widened = asg.clone();
            if relativized.has_free(&bounder) {
                widened.insert(bounder.clone(), va);
            }
            let via = sat(&big, &relativized, &widened)?;
            assert_eq!(
                inner, via,
                "relativization disagrees with the substructure on {f}"
            );
        }
        all &= outer == inner;
    }
    Ok(all)
}

/// The least `a` with `a0 < a <= N` such that `V_a` reflects `φ` inside `V_N`.
pub fn least_reflecting(n: u32, f: &Formula, a0: u32) -> Result<Option<u32>> {
    stage_bounds(n, n.max(1))?;
    for a in (a0 + 1).max(1)..=n {
        if reflects(n, a, f)? {
            return Ok(Some(a));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hfset::stage;
    use crate::syntax::parse;

    fn p(s: &str) -> Formula {
        parse(s).unwrap()
    }

    #[test]
    fn examples() {
        let v4 = stage(4).unwrap();
        assert!(holds(&v4, &p("(ex x (all y (not (mem y x))))")).unwrap());
        let v1 = stage(1).unwrap();
        assert!(!holds(&v1, &p("(ex x (ex y (not (eq x y))))")).unwrap());
    }

    #[test]
    fn domain_and_constant_errors() {
        let v2 = stage(2).unwrap();
        assert!(matches!(
            sat(&v2, &p("(mem x y)"), &Assignment::new()),
            Err(Error::AssignmentDomain { .. })
        ));
        assert!(matches!(
            holds(&v2, &p("(mem #0 #3)")),
            Err(Error::ConstantOutside(_))
        ));
    }

    #[test]
    fn budget() {
        let v4 = stage(4).unwrap();
        let f = p("(ex x (ex y (ex z (and (mem x y) (mem y z)))))");
        let r = Evaluator::new(&v4)
            .budget(100)
            .mode(Mode::Oracle)
            .sat(&f, &Assignment::new());
        assert_eq!(r, Err(Error::BudgetExceeded(100)));
    }

    #[test]
    fn uninterpreted_predicate() {
        let v2 = stage(2).unwrap();
        assert_eq!(
            holds(&v2, &p("(pred P #0)")),
            Err(Error::Uninterpreted("P".into()))
        );
        assert!(holds(&v2, &p("(pred Fin #1)")).unwrap());
    }

    #[test]
    fn diagram_depth_one() {
        let d = diagram(Arc::new(stage(1).unwrap()), 1, true);
        assert!(!d.contains(&p("(mem #0 #0)")).unwrap());
        assert!(d.contains(&p("(eq #0 #0)")).unwrap());
        assert!(!d.in_scope(&p("(not (mem #0 #0))")));
        let d2 = diagram(Arc::new(stage(1).unwrap()), 2, true);
        assert!(d2.contains(&p("(not (mem #0 #0))")).unwrap());
        let th = diagram(Arc::new(stage(1).unwrap()), 2, false);
        assert!(!th.in_scope(&p("(eq #0 #0)")));
    }

    #[test]
    fn theory_contains_extensionality() {
        let ext = p("(all x (all y (imp (all z (iff (mem z x) (mem z y))) (eq x y))))");
        assert!(ext.depth() > 6);
        let th = diagram(Arc::new(stage(3).unwrap()), ext.depth(), false);
        assert!(th.contains(&ext).unwrap());
    }

    #[test]
    fn reflection_examples() {
        assert!(reflects(4, 1, &p("(ex x (eq x x))")).unwrap());
        let f = p("(ex x (mem z x))");
        assert!(!reflects(4, 3, &f).unwrap());
        assert!(reflects(4, 4, &f).unwrap());
        assert!(reflects(4, 2, &p("(or (mem x y) (eq y x))")).unwrap());
        assert_eq!(
            least_reflecting(4, &p("(ex x (eq x x))"), 0).unwrap(),
            Some(1)
        );
        assert_eq!(least_reflecting(4, &f, 0).unwrap(), Some(4));
        assert!(reflects(6, 1, &f).is_err());
        assert!(reflects(3, 4, &f).is_err());
    }
}
