use std::cell::RefCell;
use std::collections::HashMap;

use super::{Theory, FIN, PROV};
use crate::error::Result;
use crate::eval::{self, Evaluator, Interpretation};
use crate::hfset::{Elem, FinStructure};
use crate::proofcheck::Prover;
use crate::report::{Report, Violation};
use crate::syntax::Formula;

/// Reads `Prov*(ψ)` as "the bounded prover derives `ψ` from the base axioms plus the
/// `True_n` facts about the closed pure subformulas of `ψ` of depth at most `n`".
pub struct Grounding<'m> {
    m: &'m FinStructure,
    base: Vec<Formula>,
    n: u32,
    budget: u64,
    memo: RefCell<HashMap<Formula, bool>>,
}

impl<'m> Grounding<'m> {
    pub fn new(m: &'m FinStructure, base: Vec<Formula>, n: u32, budget: u64) -> Grounding<'m> {
        Grounding {
            m,
            base,
            n,
            budget,
            memo: RefCell::new(HashMap::new()),
        }
    }

    fn premises(&self, quoted: &Formula) -> Vec<Formula> {
        let mut out = self.base.clone();
        for s in quoted.subformulas() {
            if s.is_sentence() && s.is_pure() && s.depth() <= self.n {
                match eval::holds(self.m, &s) {
                    Ok(true) => out.push(s),
                    Ok(false) => out.push(Formula::not(s)),
                    Err(_) => {}
                }
            }
        }
        out
    }

    pub fn provable(&self, quoted: &Formula) -> bool {
        if let Some(b) = self.memo.borrow().get(quoted) {
            return *b;
        }
        let found = Prover::new(self.premises(quoted), self.budget)
            .prove(quoted)
            .is_some();
        self.memo.borrow_mut().insert(quoted.clone(), found);
        found
    }
}

impl Interpretation for Grounding<'_> {
    fn pred(&self, name: &str, _: Elem) -> Option<bool> {
        (name == FIN).then_some(true)
    }

    fn prov(&self, name: &str, quoted: &Formula) -> Option<bool> {
        (name == PROV && quoted.is_sentence()).then(|| self.provable(quoted))
    }
}

/// Evaluates the reflection instances of a theory in `m` with the placeholder grounded by
/// bounded proof search. An instance at iteration `i` may use the plain axioms and every
/// instance of lower iteration. Unannotated axioms false in `m` are noted, not reported.
pub fn check_grounded(m: &FinStructure, theory: &Theory, budget: u64) -> Result<Report> {
    let mut report = Report::new(format!("grounded {}", theory.name));
    report.note("Prov* grounded by bounded proof search");
    for e in theory.entries.iter().filter(|e| e.meta.is_none()) {
        if e.sentence.is_pure() && !eval::holds(m, &e.sentence)? {
            report.note(format!("axiom false in the structure: {}", e.sentence));
        }
    }
    for e in &theory.entries {
        let Some(meta) = &e.meta else { continue };
        let base: Vec<Formula> = theory
            .entries
            .iter()
            .filter(|b| b.meta.as_ref().is_none_or(|bm| bm.iter < meta.iter))
            .map(|b| b.sentence.clone())
            .collect();
        let grounding = Grounding::new(m, base, meta.n, budget);
        report.checked += 1;
        let value = Evaluator::new(m)
            .interpretation(&grounding)
            .sat(&e.sentence, &Default::default())?;
        if !value {
            report.push(Violation::new(
                "REF",
                &e.sentence,
                format!(
                    "false with base {} n={} iter={}",
                    meta.base, meta.n, meta.iter
                ),
            ));
        }
    }
    Ok(report.finish())
}
