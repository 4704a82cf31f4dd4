//! The `True_1` and `True_2` formulas written out in the language of set theory, and a
//! structure of sentence codes to evaluate them in.
//!
//! The materialized formulas have two free variables: `phi`, the code under test, and
//! `univ`, a set standing for the universe that existential witnesses range over. Inside a
//! structure of codes the universe has to be explicit, since the code pieces are elements too.

use std::cell::Cell;
use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::hfset::{Elem, FinStructure, HfSet};
use crate::syntax::{Formula, Var};

struct Builder {
    next: Cell<usize>,
}

impl Builder {
    fn fresh(&self) -> Var {
        let i = self.next.get();
        self.next.set(i + 1);
        Var::new(&format!("h{i}"))
    }

    fn empty(&self, u: &Var) -> Formula {
        let t = self.fresh();
        Formula::not(Formula::exists(t.clone(), Formula::mem(&t, u)))
    }

    /// `u` is the von Neumann numeral `n`.
    fn numeral(&self, n: usize, u: &Var) -> Formula {
        if n == 0 {
            return self.empty(u);
        }
        let t = self.fresh();
        let s = self.fresh();
        let s2 = self.fresh();
        let body = Formula::and(
            self.numeral(n - 1, &t),
            Formula::and(
                Formula::forall_in(s.clone(), &t, Formula::mem(&s, u)),
                Formula::forall_in(
                    s2.clone(),
                    u,
                    Formula::or(Formula::equals(&s2, &t), Formula::mem(&s2, &t)),
                ),
            ),
        );
        Formula::exists_in(t, u, body)
    }

    /// `p = {{a}, {a, b}}`.
    fn pair(&self, p: &Var, a: &Var, b: &Var) -> Formula {
        let (u, w, t1, t2, t3) = (
            self.fresh(),
            self.fresh(),
            self.fresh(),
            self.fresh(),
            self.fresh(),
        );
        let single = Formula::and(
            Formula::mem(a, &u),
            Formula::forall_in(t1.clone(), &u, Formula::equals(&t1, a)),
        );
        let double = Formula::and(
            Formula::and(Formula::mem(a, &w), Formula::mem(b, &w)),
            Formula::forall_in(
                t2.clone(),
                &w,
                Formula::or(Formula::equals(&t2, a), Formula::equals(&t2, b)),
            ),
        );
        let only = Formula::forall_in(
            t3.clone(),
            p,
            Formula::or(Formula::equals(&t3, &u), Formula::equals(&t3, &w)),
        );
        Formula::exists_in(
            u.clone(),
            p,
            Formula::exists_in(w, p, Formula::and(single, Formula::and(double, only))),
        )
    }

    /// Binds the components of the pair `p`, bounded by `p`.
    fn unpair(&self, p: &Var, body: impl FnOnce(&Var, &Var) -> Formula) -> Formula {
        let (u, w, a, b) = (self.fresh(), self.fresh(), self.fresh(), self.fresh());
        let inner = Formula::and(self.pair(p, &a, &b), body(&a, &b));
        Formula::exists_in(
            u.clone(),
            p,
            Formula::exists_in(
                a.clone(),
                &u,
                Formula::exists_in(w.clone(), p, Formula::exists_in(b, &w, inner)),
            ),
        )
    }

    /// `p = <tag, q>` for some `q` satisfying `body`.
    fn tagged(&self, p: &Var, tag: usize, body: impl FnOnce(&Var) -> Formula) -> Formula {
        self.unpair(p, |g, q| Formula::and(self.numeral(tag, g), body(q)))
    }

    /// Term code `t` denotes `y`: it is the constant `ẏ`, or the variable `x` when the
    /// substitution `x := v` is in force and `y = v`.
    fn denotes(&self, t: &Var, y: &Var, subst: Option<(&Var, &Var)>) -> Formula {
        let constant = self.tagged(t, 1, |c| Formula::equals(c, y));
        match subst {
            None => constant,
            Some((x, v)) => Formula::or(
                Formula::and(Formula::equals(t, x), Formula::equals(y, v)),
                constant,
            ),
        }
    }

    /// `φ = ⌜ẏ ∘ ż⌝` for the atom with code tag `tag`.
    fn atom_is(
        &self,
        phi: &Var,
        tag: usize,
        y: &Var,
        z: &Var,
        subst: Option<(&Var, &Var)>,
    ) -> Formula {
        self.tagged(phi, tag, |q| {
            self.unpair(q, |t1, t2| {
                Formula::and(self.denotes(t1, y, subst), self.denotes(t2, z, subst))
            })
        })
    }

    /// `True_1(φ)`, or `True_1(φ(v̇))` under a substitution. The cheap semantic conjunct
    /// comes first so the evaluator prunes before decoding.
    fn true1(&self, phi: &Var, subst: Option<(&Var, &Var)>) -> Formula {
        let (y, z) = (self.fresh(), self.fresh());
        let eq = Formula::and(Formula::equals(&y, &z), self.atom_is(phi, 3, &y, &z, subst));
        let mem = Formula::and(Formula::mem(&y, &z), self.atom_is(phi, 2, &y, &z, subst));
        Formula::exists(y, Formula::exists(z.clone(), Formula::or(eq, mem)))
    }

    fn atomic(&self, psi: &Var) -> Formula {
        self.unpair(psi, |g, _| {
            Formula::or(self.numeral(2, g), self.numeral(3, g))
        })
    }

    /// `True_2(φ)`: depth-1 atoms, or depth-2 negations, disjunctions and existentials whose
    /// components are settled by `True_1`.
    fn true2(&self, phi: &Var, univ: &Var) -> Formula {
        let depth1 = Formula::and(self.atomic(phi), self.true1(phi, None));
        let neg = self.tagged(phi, 4, |psi| {
            Formula::and(self.atomic(psi), Formula::not(self.true1(psi, None)))
        });
        let disj = self.tagged(phi, 5, |q| {
            self.unpair(q, |a, b| {
                Formula::and(
                    Formula::and(self.atomic(a), self.atomic(b)),
                    Formula::or(self.true1(a, None), self.true1(b, None)),
                )
            })
        });
        let exist = self.tagged(phi, 6, |q| {
            self.unpair(q, |x, psi| {
                let v = self.fresh();
                Formula::and(
                    self.atomic(psi),
                    Formula::exists_in(v.clone(), univ, self.true1(psi, Some((x, &v)))),
                )
            })
        });
        Formula::or(depth1, Formula::or(neg, Formula::or(disj, exist)))
    }
}

/// The formula `True_k(phi)` for `k` in `{1, 2}`, with free variables `phi` and `univ`.
pub fn materialize_true(k: u32) -> Result<Formula> {
    let b = Builder { next: Cell::new(0) };
    let (phi, univ) = (Var::new("phi"), Var::new("univ"));
    match k {
        1 => Ok(b.true1(&phi, None)),
        2 => Ok(b.true2(&phi, &univ)),
        _ => Err(Error::Invalid(format!(
            "True_{k} is only materialized for k = 1, 2"
        ))),
    }
}

/// A transitive structure holding a standard stage, the stage itself as an element, and the
/// codes of some sentences, with element ids assigned by position.
pub struct CodeStructure {
    pub structure: FinStructure,
    pub universe: Elem,
    index: BTreeMap<HfSet, Elem>,
}

impl CodeStructure {
    pub fn elem(&self, x: &HfSet) -> Option<Elem> {
        self.index.get(x).copied()
    }

    /// The assignment evaluating a materialized formula at `s`.
    pub fn assignment(&self, s: &Formula) -> Option<crate::eval::Assignment> {
        let e = self.elem(&s.code())?;
        Some([(Var::new("phi"), e), (Var::new("univ"), self.universe)].into())
    }
}

pub fn code_structure(m: &FinStructure, sentences: &[Formula]) -> Result<CodeStructure> {
    let stage_set = HfSet::from_elems(m.elements().map(|e| m.constant(e)).collect::<Vec<_>>());
    let mut all: BTreeSet<HfSet> = BTreeSet::new();
    all.insert(stage_set.clone());
    all.extend(stage_set.transitive_closure());
    for s in sentences {
        let c = s.code();
        all.extend(c.transitive_closure());
        all.insert(c);
    }
    let index: BTreeMap<HfSet, Elem> = all
        .iter()
        .enumerate()
        .map(|(i, x)| (x.clone(), i as Elem))
        .collect();
    let mut edges = Vec::new();
    for (x, &i) in &index {
        for y in x.elems() {
            edges.push((index[y] as u64, i as u64));
        }
    }
    let structure = FinStructure::new((0..all.len() as u64).collect(), &edges)?;
    Ok(CodeStructure {
        universe: index[&stage_set],
        structure,
        index,
    })
}
