use std::fmt;
use std::str::FromStr;

use super::{big_and, gen_scheme, SchemeTag};
use crate::error::{Error, Result};
use crate::eval::TruthSet;
use crate::report::{Report, Violation};
use crate::syntax::{big_or, enumerate, Formula};

/// Every instance of `tag` whose template has depth at most `depth_bound` must be in `t`.
/// Instances outside the class's scope are reported under the clause `scope`.
pub fn check_internal(t: &dyn TruthSet, tag: SchemeTag, depth_bound: u32) -> Result<Report> {
    let base = tag.base();
    if matches!(base, SchemeTag::Ref | SchemeTag::Con) {
        return Err(Error::Invalid(format!("{tag} is not an internal scheme")));
    }
    let mut report = Report::new(format!("internal {tag}"));
    if base == SchemeTag::Ind {
        report.note("finite ω-fragment");
    }
    for f in enumerate::up_to(&tag.template_vars(), &[], depth_bound) {
        let s = gen_scheme(base, &f)?.sentence;
        report.checked += 1;
        if !t.in_scope(&s) {
            report.push(Violation::new(
                "scope",
                &s,
                "instance outside the class's family",
            ));
        } else if !t.contains(&s)? {
            report.push(Violation::new(tag.to_string(), &s, format!("template {f}")));
        }
    }
    Ok(report.finish())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TruthProperty {
    DcOut,
    DcIn,
    Pi,
    Spi,
}

impl fmt::Display for TruthProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TruthProperty::DcOut => "DC_out",
            TruthProperty::DcIn => "DC_in",
            TruthProperty::Pi => "PI",
            TruthProperty::Spi => "SPI",
        })
    }
}

impl FromStr for TruthProperty {
    type Err = Error;

    fn from_str(s: &str) -> Result<TruthProperty> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "dc_out" => Ok(TruthProperty::DcOut),
            "dc_in" => Ok(TruthProperty::DcIn),
            "pi" => Ok(TruthProperty::Pi),
            "spi" => Ok(TruthProperty::Spi),
            _ => Err(Error::Invalid(format!("unknown property `{s}`"))),
        }
    }
}

fn render_seq(seq: &[Formula]) -> String {
    let items: Vec<String> = seq.iter().map(Formula::render).collect();
    format!("[{}]", items.join(", "))
}

/// Whether `t` satisfies `prop` on each sequence. A sentence outside the class counts as
/// not in it. With `k` the last index:
///
/// - `DC_out`: `T(⋁φi) → ∃i T(φi)`, and `DC_in` the converse;
/// - `PI`: `T(φ0) ∧ ∀i<k T(φi → φi+1) → T(φk)`;
/// - `SPI`: `T(φ0) ∧ ∀1≤j≤k T(⋀_{i<j} φi → φj) → T(φk)`.
pub fn check_truth_property(
    t: &dyn TruthSet,
    prop: TruthProperty,
    sequences: &[Vec<Formula>],
) -> Result<Report> {
    let mut report = Report::new(format!("property {prop}"));
    for seq in sequences {
        let Some(last) = seq.last() else {
            return Err(Error::EmptySequence);
        };
        report.checked += 1;
        let failed = match prop {
            TruthProperty::DcOut | TruthProperty::DcIn => {
                let whole = t.contains(&big_or(seq)?)?;
                let mut some = false;
                for f in seq {
                    if t.contains(f)? {
                        some = true;
                        break;
                    }
                }
                if prop == TruthProperty::DcOut {
                    whole && !some
                } else {
                    some && !whole
                }
            }
            TruthProperty::Pi | TruthProperty::Spi => {
                let mut premises = t.contains(&seq[0])?;
                for j in 1..seq.len() {
                    if !premises {
                        break;
                    }
                    let step = if prop == TruthProperty::Pi {
                        Formula::implies(seq[j - 1].clone(), seq[j].clone())
                    } else {
                        Formula::implies(big_and(&seq[..j])?, seq[j].clone())
                    };
                    premises = t.contains(&step)?;
                }
                premises && !t.contains(last)?
            }
        };
        if failed {
            report.push(Violation::new(
                prop.to_string(),
                render_seq(seq),
                "chain condition fails",
            ));
        }
    }
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::classes::{induced_truth, Family, TruthClass};
    use crate::hfset::stage;
    use crate::syntax::parse;

    fn p(s: &str) -> Formula {
        parse(s).unwrap()
    }

    #[test]
    fn induced_class_has_separation() {
        let m = Arc::new(stage(3).unwrap());
        let tag = SchemeTag::IntSep;
        let instances: Vec<Formula> = enumerate::up_to(&tag.template_vars(), &[], 2)
            .iter()
            .map(|f| gen_scheme(tag, f).unwrap().sentence)
            .collect();
        let t = induced_truth(&m, &Family::closure(instances.clone())).unwrap();
        let report = check_internal(&t.view(m.clone()), tag, 2).unwrap();
        assert!(report.is_clean(), "{}", report.summary());
        assert_eq!(report.checked as usize, instances.len());

        let mut gap = t.clone();
        gap.sentences.remove(&instances[3]);
        let report = check_internal(&gap.view(m.clone()), tag, 2).unwrap();
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].formula, instances[3].to_string());

        let small = induced_truth(&m, &Family::depth(&[], 1)).unwrap();
        let report = check_internal(&small.view(m), tag, 1).unwrap();
        assert!(report.violations.iter().all(|v| v.clause == "scope"));
    }

    #[test]
    fn replacement_fails_in_the_stage_truth_set() {
        // The image of a top-rank element under `v = y` lies outside V_3.
        let m = Arc::new(stage(3).unwrap());
        let truth = crate::eval::diagram(m, u32::MAX, true);
        let report = check_internal(&truth, SchemeTag::IntRepl, 2).unwrap();
        assert_eq!((report.checked, report.violations.len()), (414, 44));
        assert!(report
            .violations
            .iter()
            .any(|v| v.detail.contains("(eq v y)")));
    }

    #[test]
    fn property_failures() {
        let m = Arc::new(stage(2).unwrap());
        let (a, b) = (p("(mem #0 #1)"), p("(mem #1 #0)"));
        let both = big_or(&[a.clone(), a.clone()]).unwrap();
        let t = TruthClass {
            family: Family::closure([both.clone()]),
            sentences: [both].into_iter().collect(),
            structure: "stage 2".into(),
        };
        let view = t.view(m.clone());
        let seqs = vec![vec![a.clone(), a.clone()]];
        let report = check_truth_property(&view, TruthProperty::DcOut, &seqs).unwrap();
        assert_eq!(report.violations.len(), 1);
        assert!(check_truth_property(&view, TruthProperty::DcIn, &seqs)
            .unwrap()
            .is_clean());

        let step = Formula::implies(a.clone(), b.clone());
        let t = TruthClass {
            family: Family::closure([step.clone()]),
            sentences: [a.clone(), step].into_iter().collect(),
            structure: "stage 2".into(),
        };
        let seqs = vec![vec![a, b]];
        let view = t.view(m);
        assert_eq!(
            check_truth_property(&view, TruthProperty::Pi, &seqs)
                .unwrap()
                .violations
                .len(),
            1
        );
        assert_eq!(
            check_truth_property(&view, TruthProperty::Spi, &seqs)
                .unwrap()
                .violations
                .len(),
            1
        );
        assert!(check_truth_property(&view, TruthProperty::Pi, &[vec![]]).is_err());
    }
}
