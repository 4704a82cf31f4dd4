//! Partial truth predicates `True_k`, depth-bounded families and Mostowski-style truth.

mod materialize;

pub use materialize::{code_structure, materialize_true, CodeStructure};

use std::collections::HashMap;

use crate::classes::{induced_truth, validate_truth, Family};
use crate::error::{Error, Result};
use crate::eval::{self, check_constants, TruthSet, DEFAULT_BUDGET};
use crate::hfset::{FinStructure, HfSet};
use crate::syntax::{Formula, Kind, Term};

/// `Depth_k`: formulas of `∈` and `=` with logical depth at most `k`. `Depth_0` is empty.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DepthFamily {
    pub k: u32,
}

impl DepthFamily {
    pub fn new(k: u32) -> DepthFamily {
        DepthFamily { k }
    }

    pub fn contains(&self, f: &Formula) -> bool {
        f.is_pure() && f.depth() <= self.k
    }
}

fn check_sentence(m: &FinStructure, s: &Formula) -> Result<()> {
    if !s.is_sentence() {
        return Err(Error::NotSentence(
            s.free_vars().iter().map(|v| v.name().to_string()).collect(),
        ));
    }
    if !s.is_pure() {
        return Err(Error::Invalid(format!("{s} uses atoms other than ∈ and =")));
    }
    check_constants(m, s)
}

/// `True_k(σ)` by direct recursion: the atomic clause at depth 1, and for a sentence of depth
/// `r` with `1 < r <= k` the negation, disjunction and existential clauses, each consulting
/// `True_{r-1}` on the components. Existential witnesses range over `m`.
pub fn true_k(m: &FinStructure, k: u32, s: &Formula) -> Result<bool> {
    true_k_traced(m, k, s, &mut |_, _| {})
}

/// [`true_k`], calling `observe(r, ψ)` for each consultation `True_r(ψ)`.
pub fn true_k_traced(
    m: &FinStructure,
    k: u32,
    s: &Formula,
    observe: &mut dyn FnMut(u32, &Formula),
) -> Result<bool> {
    check_sentence(m, s)?;
    if s.depth() > k {
        return Err(Error::DepthExceeded {
            depth: s.depth(),
            bound: k,
        });
    }
    let mut run = TrueK {
        m,
        memo: HashMap::new(),
        observe,
    };
    Ok(run.eval(k, s))
}

struct TrueK<'a, 'o> {
    m: &'a FinStructure,
    memo: HashMap<(u32, Formula), bool>,
    observe: &'o mut dyn FnMut(u32, &Formula),
}

impl TrueK<'_, '_> {
    fn elem(&self, t: &Term) -> crate::hfset::Elem {
        match t {
            Term::Const(c) => self.m.elem_of(c).expect("constants were checked"),
            Term::Var(v) => unreachable!("free variable {v} in a sentence"),
        }
    }

    fn eval(&mut self, k: u32, s: &Formula) -> bool {
        (self.observe)(k, s);
        if let Some(&v) = self.memo.get(&(k, s.clone())) {
            return v;
        }
        let r = s.depth();
        let value = match s.kind() {
            Kind::Mem(a, b) => self.m.mem(self.elem(a), self.elem(b)),
            Kind::Eq(a, b) => self.elem(a) == self.elem(b),
            _ if r > k => false,
            Kind::Not(a) => !self.eval(r - 1, a),
            Kind::Or(a, b) => self.eval(r - 1, a) || self.eval(r - 1, b),
            Kind::Exists(v, body) => {
                let m = self.m;
                m.elements()
                    .any(|e| self.eval(r - 1, &body.substitute_one(v, m.constant(e))))
            }
            Kind::Pred(..) | Kind::Prov(..) => unreachable!("sentence was checked to be pure"),
        };
        self.memo.insert((k, s.clone()), value);
        value
    }
}

/// `Σ_n` partial truth: [`true_k`] restricted to sentences the recognizer places in `Σ_n`.
pub fn true_sigma(m: &FinStructure, n: u32, s: &Formula) -> Result<bool> {
    let levy = s.levy();
    if !levy.within_sigma(n) {
        return Err(Error::LevyClass(format!(
            "{s} is {levy:?}, not within Σ{n}"
        )));
    }
    true_k(m, s.depth(), s)
}

/// Truth via a witnessing truth class: searches `p` upward from the depth of `σ` for a
/// `Depth_p`-truth class containing `σ`, built from the evaluation-induced class over the
/// subformulas of `σ` with constants abstracted. Returns the verdict and the `p` that decided it.
pub fn mostowski_search(m: &FinStructure, s: &Formula) -> Result<(bool, u32)> {
    check_sentence(m, s)?;
    let (open, _) = s.open_constants("c");
    let family = Family::closure([open]);
    let depth = s.depth();
    for p in depth.. {
        let within = DepthFamily::new(p);
        if !family.iter().all(|f| within.contains(f)) {
            continue;
        }
        let t = induced_truth(m, &family)?;
        let report = validate_truth(m, &t, DEFAULT_BUDGET)?;
        if !report.is_clean() {
            return Err(Error::Invalid(format!(
                "induced class is not a truth class:\n{}",
                report.summary()
            )));
        }
        return Ok((t.sentences.contains(s), p));
    }
    unreachable!("the closure family lies in Depth_p for p = depth(σ)")
}

pub fn mostowski_truth(m: &FinStructure, s: &Formula) -> Result<bool> {
    mostowski_search(m, s).map(|(v, _)| v)
}

/// `{σ ∈ s : σ ∈ T}` for a set `s` of sentence codes.
pub fn piecewise_code(t: &dyn TruthSet, s: &HfSet) -> Result<HfSet> {
    let mut kept = Vec::new();
    for x in s.elems() {
        let f = Formula::decode(x)?;
        if !f.is_sentence() {
            return Err(Error::BadCode(format!("{f} is not a sentence")));
        }
        if t.contains(&f)? {
            kept.push(x.clone());
        }
    }
    Ok(HfSet::from_elems(kept))
}

/// Agreement of [`true_k`] with satisfaction on one sentence.
pub fn agrees_with_sat(m: &FinStructure, k: u32, s: &Formula) -> Result<bool> {
    Ok(true_k(m, k, s)? == eval::holds(m, s)?)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::eval::diagram;
    use crate::hfset::stage;
    use crate::syntax::{enumerate, parse, Var};

    fn p(s: &str) -> Formula {
        parse(s).unwrap()
    }

    #[test]
    fn examples() {
        let m = stage(3).unwrap();
        assert!(true_k(&m, 1, &p("(mem #0 #1)")).unwrap());
        assert!(matches!(
            true_k(&m, 1, &p("(not (eq #0 #0))")),
            Err(Error::DepthExceeded { depth: 2, bound: 1 })
        ));
        assert!(matches!(
            true_k(&m, 3, &p("(mem #0 #99)")),
            Err(Error::ConstantOutside(_))
        ));
        assert!(matches!(
            true_k(&m, 3, &p("(mem x #1)")),
            Err(Error::NotSentence(_))
        ));
        assert!(true_k(&m, 3, &p("(ex x (mem x #1))")).unwrap());
        assert!(!true_k(&m, 3, &p("(ex x (mem x #0))")).unwrap());
    }

    #[test]
    fn sweep_depth_three_stage_two() {
        let m = stage(2).unwrap();
        let consts: Vec<HfSet> = m.elements().map(|e| m.constant(e)).collect();
        for s in enumerate::sentences(&[Var::new("x")], &consts, 3) {
            for k in s.depth()..=3 {
                assert!(agrees_with_sat(&m, k, &s).unwrap(), "{s} at k = {k}");
            }
        }
    }

    #[test]
    fn never_leaves_depth_k() {
        let m = stage(2).unwrap();
        let s = p("(not (ex x (or (mem x #1) (not (eq x #0)))))");
        let mut seen = Vec::new();
        true_k_traced(&m, 5, &s, &mut |r, f| {
            assert!(f.depth() <= r && r <= 5);
            seen.push(f.clone());
        })
        .unwrap();
        assert!(seen.len() >= 4);
    }

    #[test]
    fn sigma_filter() {
        let m = stage(2).unwrap();
        assert!(true_sigma(&m, 1, &p("(ex x (mem #0 x))")).unwrap());
        assert!(matches!(
            true_sigma(&m, 1, &p("(all x (ex y (mem x y)))")),
            Err(Error::LevyClass(_))
        ));
    }

    #[test]
    fn depth_family() {
        let f = p("(not (mem x y))");
        assert!(!DepthFamily::new(0).contains(&p("(eq x x)")));
        assert!(!DepthFamily::new(1).contains(&f));
        assert!(DepthFamily::new(2).contains(&f));
        assert!(!DepthFamily::new(5).contains(&p("(pred P x)")));
    }

    #[test]
    fn mostowski_examples() {
        let m = stage(3).unwrap();
        assert_eq!(
            mostowski_search(&m, &p("(not (mem #1 #0))")).unwrap(),
            (true, 2)
        );
        assert_eq!(mostowski_search(&m, &p("(mem #1 #0)")).unwrap(), (false, 1));
        let s = p("(ex x (or (mem x #2) (eq x #3)))");
        assert_eq!(
            mostowski_truth(&m, &s).unwrap(),
            eval::holds(&m, &s).unwrap()
        );
    }

    #[test]
    fn piecewise_examples() {
        let m = Arc::new(stage(2).unwrap());
        let view = diagram(m, 4, true);
        assert_eq!(
            piecewise_code(&view, &HfSet::empty()).unwrap(),
            HfSet::empty()
        );
        let t = p("(eq #0 #0)").code();
        let f = p("(mem #0 #0)").code();
        let both = HfSet::from_elems(vec![t.clone(), f]);
        assert_eq!(
            piecewise_code(&view, &both).unwrap(),
            HfSet::from_elems(vec![t])
        );
        let open = HfSet::from_elems(vec![p("(eq x x)").code()]);
        assert!(matches!(
            piecewise_code(&view, &open),
            Err(Error::BadCode(_))
        ));
        let junk = HfSet::from_elems(vec![HfSet::numeral(3)]);
        assert!(matches!(
            piecewise_code(&view, &junk),
            Err(Error::BadCode(_))
        ));
    }
}
