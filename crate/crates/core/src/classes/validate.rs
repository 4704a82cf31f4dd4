use std::collections::HashSet;

use super::{assignments, close_elems, ids, Class, SatClass, TruthClass};
use crate::error::{Error, Result};
use crate::eval::{self, Assignment, DEFAULT_BUDGET};
use crate::hfset::FinStructure;
use crate::report::{Report, Violation};
use crate::syntax::{Formula, Kind};

struct Budget {
    left: u64,
    total: u64,
}

impl Budget {
    fn spend(&mut self, n: u64) -> Result<()> {
        if n > self.left {
            return Err(Error::BudgetExceeded(self.total));
        }
        self.left -= n;
        Ok(())
    }
}

/// Checks the compositional clauses, reporting every failure with a witness.
///
/// Clause numbering: (1) the family is closed under immediate subformulas, consists of
/// constant-free formulas, and the class only speaks about it; (2) atoms; (3) negation;
/// (4) disjunction; (5) existential quantification.
pub fn validate_class(m: &FinStructure, c: &Class) -> Result<Report> {
    match c {
        Class::Sat(s) => validate_sat(m, s, DEFAULT_BUDGET),
        Class::Truth(t) => validate_truth(m, t, DEFAULT_BUDGET),
    }
}

fn family_clause(report: &mut Report, family: &super::Family) {
    for (f, missing) in family.gaps() {
        report.push(Violation::new(
            "1",
            &f,
            format!("immediate subformula {missing} is not in the family"),
        ));
    }
    for f in family.iter() {
        if f.has_constants() || !f.is_pure() {
            report.push(Violation::new(
                "1",
                f,
                "family member is not a plain formula",
            ));
        }
    }
}

fn is_form(f: &Formula) -> bool {
    !f.has_constants() && f.is_pure()
}

fn restrict(a: &Assignment, f: &Formula) -> Assignment {
    a.iter()
        .filter(|(v, _)| f.has_free(v))
        .map(|(v, &e)| (v.clone(), e))
        .collect()
}

pub fn validate_sat(m: &FinStructure, s: &SatClass, budget: u64) -> Result<Report> {
    let mut report = Report::new("validate-class sat");
    let mut budget = Budget {
        left: budget,
        total: budget,
    };
    family_clause(&mut report, &s.family);
    for (f, a) in &s.entries {
        let total = a.keys().eq(f.free_vars().iter());
        let inside = a.values().all(|&e| (e as usize) < m.len());
        if !s.family.contains(f) {
            report.push(Violation::new("1", f, "entry formula is not in the family"));
        } else if !total || !inside {
            report.push(Violation::new(
                "1",
                f,
                "entry assignment is not total into the structure",
            ));
        }
    }
    let members: HashSet<(&Formula, &Assignment)> = s.entries.iter().map(|(f, a)| (f, a)).collect();
    let member = |f: &Formula, a: &Assignment| members.contains(&(f, a));
    for f in s.family.iter().filter(|f| is_form(f)) {
        for a in assignments(m, f) {
            budget.spend(1)?;
            report.checked += 1;
            let inside = member(f, &a);
            let (clause, expected) = match f.kind() {
                Kind::Mem(..) | Kind::Eq(..) => ("2", eval::sat(m, f, &a)?),
                Kind::Not(g) => ("3", !member(g, &restrict(&a, g))),
                Kind::Or(g, h) => (
                    "4",
                    member(g, &restrict(&a, g)) || member(h, &restrict(&a, h)),
                ),
                Kind::Exists(v, g) => {
                    let mut any = false;
                    if g.has_free(v) {
                        for e in m.elements() {
                            budget.spend(1)?;
                            let mut b = a.clone();
                            b.insert(v.clone(), e);
                            if member(g, &b) {
                                any = true;
                                break;
                            }
                        }
                    } else {
                        any = member(g, &a);
                    }
                    ("5", any)
                }
                Kind::Pred(..) | Kind::Prov(..) => unreachable!("filtered by is_form"),
            };
            if inside != expected {
                let detail = if inside {
                    "pair is in the class but the clause makes it false"
                } else {
                    "pair is missing although the clause makes it true"
                };
                report.push(Violation::new(clause, f, detail).with_assignment(ids(m, &a)));
            }
        }
    }
    Ok(report.finish())
}

pub fn validate_truth(m: &FinStructure, t: &TruthClass, budget: u64) -> Result<Report> {
    let mut report = Report::new("validate-class truth");
    let mut budget = Budget {
        left: budget,
        total: budget,
    };
    family_clause(&mut report, &t.family);
    let scope: HashSet<Formula> = t
        .family
        .iter()
        .filter(|f| is_form(f))
        .flat_map(|f| assignments(m, f).into_iter().map(move |a| (f, a)))
        .map(|(f, a)| close_elems(m, f, &a))
        .collect();
    for s in &t.sentences {
        if !scope.contains(s) {
            report.push(Violation::new(
                "1",
                s,
                "member is not a closure of a family formula",
            ));
        }
    }
    let member = |s: &Formula| t.sentences.contains(s);
    let mut ordered: Vec<&Formula> = scope.iter().collect();
    ordered.sort();
    for s in ordered {
        budget.spend(1)?;
        report.checked += 1;
        let (clause, expected) = match s.kind() {
            Kind::Mem(..) | Kind::Eq(..) => ("2", eval::holds(m, s)?),
            Kind::Not(g) => ("3", !member(g)),
            Kind::Or(g, h) => ("4", member(g) || member(h)),
            Kind::Exists(v, g) => {
                let mut any = false;
                for e in m.elements() {
                    budget.spend(1)?;
                    if member(&g.substitute_one(v, m.constant(e))) {
                        any = true;
                        break;
                    }
                }
                ("5", any)
            }
            Kind::Pred(..) | Kind::Prov(..) => unreachable!("scope is built from plain formulas"),
        };
        let inside = member(s);
        if inside != expected {
            let detail = if inside {
                "sentence is in the class but the clause makes it false"
            } else {
                "sentence is missing although the clause makes it true"
            };
            report.push(Violation::new(clause, s, detail));
        }
    }
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::{induced_sat, induced_truth, Family};
    use crate::hfset::stage;
    use crate::syntax::{parse, Var};

    fn xy() -> Vec<Var> {
        vec![Var::new("x"), Var::new("y")]
    }

    #[test]
    fn induced_classes_pass() {
        let m = stage(3).unwrap();
        let fam = Family::depth(&xy(), 3);
        let s = induced_sat(&m, &fam).unwrap();
        assert!(validate_class(&m, &Class::Sat(s)).unwrap().is_clean());
        let t = induced_truth(&m, &fam).unwrap();
        let r = validate_class(&m, &Class::Truth(t)).unwrap();
        assert!(r.is_clean(), "{}", r.summary());
    }

    #[test]
    fn removed_atom_is_a_clause_two_witness() {
        let m = stage(2).unwrap();
        let fam = Family::depth(&xy(), 2);
        let mut t = induced_truth(&m, &fam).unwrap();
        let atom = parse("(mem #0 #1)").unwrap();
        assert!(t.sentences.remove(&atom));
        let r = validate_class(&m, &Class::Truth(t)).unwrap();
        assert!(r
            .violations
            .iter()
            .any(|v| v.clause == "2" && v.formula == atom.render()));
    }

    #[test]
    fn missing_subformula_is_clause_one() {
        let m = stage(2).unwrap();
        let mut fam = Family::depth(&xy(), 2);
        fam.remove(&parse("(mem x y)").unwrap());
        let s = induced_sat(&m, &fam).unwrap();
        let r = validate_class(&m, &Class::Sat(s)).unwrap();
        assert!(r.clauses().contains(&"1"));
    }

    #[test]
    fn budget_is_honored() {
        let m = stage(3).unwrap();
        let s = induced_sat(&m, &Family::depth(&xy(), 2)).unwrap();
        assert!(matches!(
            validate_sat(&m, &s, 10),
            Err(Error::BudgetExceeded(10))
        ));
    }
}
