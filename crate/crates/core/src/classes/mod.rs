//! Satisfaction classes and truth classes as explicit finite data.

mod convert;
mod file;
mod pathology;
mod validate;

pub use convert::{convert, is_extensional, ExtensionalityWitness};
pub use file::{parse_class, write_class};
pub use pathology::{diagonal_formula, diagonal_refute, pathology_d, AckermannCoding, Diagonal};
pub use validate::{validate_class, validate_sat, validate_truth};

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::sync::Arc;

use crate::error::Result;
use crate::eval::{self, Assignment, TruthSet};
use crate::hfset::{Elem, FinStructure, HfSet};
use crate::syntax::enumerate;
use crate::syntax::{Formula, Var};

/// An explicit family of formulas.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Family(BTreeSet<Formula>);

impl Family {
    pub fn new<I: IntoIterator<Item = Formula>>(fs: I) -> Family {
        Family(fs.into_iter().collect())
    }

    /// The smallest family containing `fs` and closed under immediate subformulas.
    pub fn closure<I: IntoIterator<Item = Formula>>(fs: I) -> Family {
        let mut out = BTreeSet::new();
        for f in fs {
            out.extend(f.subformulas());
        }
        Family(out)
    }

    /// `Depth_k` over a variable pool: every constant-free formula of depth at most `k`.
    pub fn depth(vars: &[Var], k: u32) -> Family {
        Family::new(enumerate::up_to(vars, &[], k))
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.0.contains(f)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Formula> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn insert(&mut self, f: Formula) {
        self.0.insert(f);
    }

    pub fn remove(&mut self, f: &Formula) -> bool {
        self.0.remove(f)
    }

    /// Pairs `(member, immediate subformula)` where the subformula is missing.
    pub fn gaps(&self) -> Vec<(Formula, Formula)> {
        let mut out = Vec::new();
        for f in &self.0 {
            for s in f.immediate_subformulas() {
                if !self.0.contains(&s) {
                    out.push((f.clone(), s));
                }
            }
        }
        out
    }

    /// `Sent⁺_F`: every closure of a member by an assignment into `m`.
    pub fn sentences(&self, m: &FinStructure) -> BTreeSet<Formula> {
        let mut out = BTreeSet::new();
        for f in &self.0 {
            for a in assignments(m, f) {
                out.insert(close_elems(m, f, &a));
            }
        }
        out
    }
}

impl FromIterator<Formula> for Family {
    fn from_iter<I: IntoIterator<Item = Formula>>(iter: I) -> Self {
        Family::new(iter)
    }
}

/// `Asn(φ, M)`: every assignment of the free variables of `f` into `m`.
pub fn assignments(m: &FinStructure, f: &Formula) -> Vec<Assignment> {
    let elems: Vec<Elem> = m.elements().collect();
    enumerate::assignments(f.free_vars(), &elems)
}

/// `φ*α` with the constants naming the assigned elements.
pub fn close_elems(m: &FinStructure, f: &Formula, a: &Assignment) -> Formula {
    let consts: BTreeMap<Var, HfSet> = a.iter().map(|(v, &e)| (v.clone(), m.constant(e))).collect();
    f.close(&consts).expect("assignment over free variables")
}

/// An assignment as variable name to element id, for reports and files.
pub fn ids(m: &FinStructure, a: &Assignment) -> BTreeMap<String, u64> {
    a.iter()
        .map(|(v, &e)| (v.name().to_string(), m.id(e)))
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SatClass {
    pub family: Family,
    pub entries: BTreeSet<(Formula, Assignment)>,
    /// Reference to the structure the class lives over, e.g. `stage 3` or a file path.
    pub structure: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TruthClass {
    pub family: Family,
    pub sentences: BTreeSet<Formula>,
    pub structure: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Class {
    Sat(SatClass),
    Truth(TruthClass),
}

/// The satisfaction relation of `m` restricted to `family`.
pub fn induced_sat(m: &FinStructure, family: &Family) -> Result<SatClass> {
    let mut entries = BTreeSet::new();
    for f in family.iter() {
        for a in assignments(m, f) {
            if eval::sat(m, f, &a)? {
                entries.insert((f.clone(), a));
            }
        }
    }
    Ok(SatClass {
        family: family.clone(),
        entries,
        structure: structure_ref(m),
    })
}

/// The sentences of `Sent⁺_F` true in `m`.
pub fn induced_truth(m: &FinStructure, family: &Family) -> Result<TruthClass> {
    let mut sentences = BTreeSet::new();
    for s in family.sentences(m) {
        if eval::holds(m, &s)? {
            sentences.insert(s);
        }
    }
    Ok(TruthClass {
        family: family.clone(),
        sentences,
        structure: structure_ref(m),
    })
}

pub(crate) fn structure_ref(m: &FinStructure) -> String {
    match m.standard_stage() {
        Some(n) => format!("stage {n}"),
        None => "structure".into(),
    }
}

impl TruthClass {
    /// Pairs the class with its structure for membership queries.
    pub fn view(&self, m: Arc<FinStructure>) -> ExplicitTruth {
        let scope: HashSet<Formula> = self.family.sentences(&m).into_iter().collect();
        ExplicitTruth {
            m,
            members: self.sentences.iter().cloned().collect(),
            scope,
        }
    }
}

/// A [`TruthClass`] bound to its structure, with `Sent⁺_F` precomputed.
pub struct ExplicitTruth {
    m: Arc<FinStructure>,
    members: HashSet<Formula>,
    scope: HashSet<Formula>,
}

impl ExplicitTruth {
    pub fn scope(&self) -> impl Iterator<Item = &Formula> {
        self.scope.iter()
    }
}

impl TruthSet for ExplicitTruth {
    fn structure(&self) -> &FinStructure {
        &self.m
    }

    fn in_scope(&self, s: &Formula) -> bool {
        self.scope.contains(s)
    }

    fn contains(&self, s: &Formula) -> Result<bool> {
        Ok(self.members.contains(s))
    }
}
