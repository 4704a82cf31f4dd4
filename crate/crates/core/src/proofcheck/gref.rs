use super::search::Prover;
use super::write_proof;
use crate::classes::TruthClass;
use crate::error::{Error, Result};
use crate::hfset::FinStructure;
use crate::report::{Report, Violation};
use crate::syntax::Formula;

/// Which derivations a truth class must be closed under.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GrefMode {
    /// First-order proofs from the class.
    Full,
    /// Propositional proofs from the class.
    Prop,
    /// First-order proofs from the class together with `extra`, with conclusions of depth
    /// at most `x`.
    DepthBounded { x: u32, extra: Vec<Formula> },
}

/// Closure of `t` under derivability: every sentence of its scope that the prover derives
/// from the premise pool must be in `t`. The search is goal-directed over the scope
/// sentences outside `t`, and each failure carries the proof found. `budget` bounds the
/// length of each proof.
pub fn check_gref(
    m: &FinStructure,
    t: &TruthClass,
    mode: &GrefMode,
    budget: u64,
) -> Result<Report> {
    let (name, premises, bound) = match mode {
        GrefMode::Full => (
            "gref",
            t.sentences.iter().cloned().collect::<Vec<_>>(),
            None,
        ),
        GrefMode::Prop => ("gref-prop", t.sentences.iter().cloned().collect(), None),
        GrefMode::DepthBounded { x, extra } => {
            if let Some(f) = extra.iter().find(|f| !f.is_sentence()) {
                return Err(Error::NotSentence(
                    f.free_vars().iter().map(|v| v.name().to_string()).collect(),
                ));
            }
            let mut pool: Vec<Formula> = t.sentences.iter().cloned().collect();
            pool.extend(extra.iter().cloned());
            ("gref-depth", pool, Some(*x))
        }
    };
    let mut prover = Prover::new(premises, budget);
    if *mode == GrefMode::Prop {
        prover = prover.propositional();
    }
    let mut report = Report::new(name);
    report.note("goal-directed search over scope sentences outside the class");
    for s in t.family.sentences(m) {
        if t.sentences.contains(&s) || bound.is_some_and(|x| s.depth() > x) {
            continue;
        }
        report.checked += 1;
        if let Some(proof) = prover.prove(&s) {
            report.push(Violation::new(
                "GRef",
                &s,
                format!("derivable but not in the class:\n{}", write_proof(&proof)),
            ));
        }
    }
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::{induced_truth, Family};
    use crate::hfset::stage;
    use crate::syntax::{parse, Var};

    #[test]
    fn induced_class_is_closed() {
        let m = stage(2).unwrap();
        let family = Family::depth(&[Var::new("x")], 2);
        let t = induced_truth(&m, &family).unwrap();
        let report = check_gref(&m, &t, &GrefMode::Prop, 10_000).unwrap();
        assert!(report.is_clean(), "{}", report.summary());
        assert!(report.checked > 0);
        let report = check_gref(&m, &t, &GrefMode::Full, 10_000).unwrap();
        assert!(report.is_clean(), "{}", report.summary());
    }

    #[test]
    fn modus_ponens_gap_is_found() {
        let m = stage(2).unwrap();
        let (a, ab, b) = (
            parse("(mem #0 #1)").unwrap(),
            parse("(imp (mem #0 #1) (not (mem #1 #0)))").unwrap(),
            parse("(not (mem #1 #0))").unwrap(),
        );
        let t = TruthClass {
            family: Family::closure([a.clone(), ab.clone()]),
            sentences: [a, ab].into_iter().collect(),
            structure: "stage 2".into(),
        };
        let report = check_gref(&m, &t, &GrefMode::Prop, 10_000).unwrap();
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].formula, b.to_string());
        assert_eq!(report.violations[0].detail.matches(" ; ").count(), 3);
        let bounded = GrefMode::DepthBounded {
            x: 1,
            extra: vec![],
        };
        assert!(check_gref(&m, &t, &bounded, 10_000).unwrap().is_clean());
        let bounded = GrefMode::DepthBounded {
            x: 2,
            extra: vec![],
        };
        assert!(!check_gref(&m, &t, &bounded, 10_000).unwrap().is_clean());
    }
}
