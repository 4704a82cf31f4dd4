//! A deliberately naive evaluator, written without the kernel's evaluator: direct recursion
//! over the syntax, every quantifier a full loop over the domain, no memoization.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashSet};

use truthkit::{Elem, FinStructure, Formula, Kind, Term, Var};

pub struct Oracle<'m> {
    pub m: &'m FinStructure,
    /// Interpretation of `P`; `Fin` is always true.
    pub p: HashSet<Elem>,
}

impl<'m> Oracle<'m> {
    pub fn new(m: &'m FinStructure) -> Oracle<'m> {
        Oracle {
            m,
            p: HashSet::new(),
        }
    }

    fn term(&self, t: &Term, env: &BTreeMap<Var, Elem>) -> Elem {
        match t {
            Term::Var(v) => env[v],
            Term::Const(c) => self.m.elem_of(c).expect("constant inside the structure"),
        }
    }

    pub fn sat(&self, f: &Formula, env: &BTreeMap<Var, Elem>) -> bool {
        match f.kind() {
            Kind::Mem(a, b) => self.m.mem(self.term(a, env), self.term(b, env)),
            Kind::Eq(a, b) => self.term(a, env) == self.term(b, env),
            Kind::Pred(name, t) => match &**name {
                "P" => self.p.contains(&self.term(t, env)),
                "Fin" => true,
                other => panic!("no interpretation for {other}"),
            },
            Kind::Prov(..) => panic!("the oracle does not ground provability"),
            Kind::Not(a) => !self.sat(a, env),
            Kind::Or(a, b) => {
                let (x, y) = (self.sat(a, env), self.sat(b, env));
                x || y
            }
            Kind::Exists(v, body) => {
                let mut found = false;
                for e in self.m.elements() {
                    let mut inner = env.clone();
                    inner.insert(v.clone(), e);
                    found |= self.sat(body, &inner);
                }
                found
            }
        }
    }

    pub fn holds(&self, s: &Formula) -> bool {
        self.sat(s, &BTreeMap::new())
    }
}
