use std::collections::{BTreeMap, BTreeSet};

use super::validate::{validate_sat, validate_truth};
use super::{assignments, close_elems, Class, SatClass, TruthClass};
use crate::error::{Error, Result};
use crate::eval::{Assignment, DEFAULT_BUDGET};
use crate::hfset::FinStructure;
use crate::syntax::Formula;

/// Two related pairs with different membership: the first is in the class, the second not.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ExtensionalityWitness {
    pub inside: (Formula, Assignment),
    pub outside: (Formula, Assignment),
}

/// For plain formulas, `(φ0,α0)` and `(φ1,α1)` are related exactly when their closures agree
/// up to the names of bound variables.
fn sim_key(m: &FinStructure, f: &Formula, a: &Assignment) -> Formula {
    close_elems(m, f, a).alpha_normal()
}

/// Related pairs over the family whose membership differs.
pub fn is_extensional(m: &FinStructure, s: &SatClass) -> Vec<ExtensionalityWitness> {
    // Per ∼-class: the pairs inside the class, then the pairs outside it.
    type Split = (Vec<(Formula, Assignment)>, Vec<(Formula, Assignment)>);
    let mut groups: BTreeMap<Formula, Split> = BTreeMap::new();
    for f in s
        .family
        .iter()
        .filter(|f| !f.has_constants() && f.is_pure())
    {
        for a in assignments(m, f) {
            let key = sim_key(m, f, &a);
            let pair = (f.clone(), a);
            let slot = groups.entry(key).or_default();
            if s.entries.contains(&pair) {
                slot.0.push(pair);
            } else {
                slot.1.push(pair);
            }
        }
    }
    let mut out = Vec::new();
    for (inside, outside) in groups.into_values() {
        if let Some(first) = inside.first() {
            for o in outside {
                out.push(ExtensionalityWitness {
                    inside: first.clone(),
                    outside: o,
                });
            }
        }
    }
    out.sort();
    out
}

/// Satisfaction class to truth class and back. The output is validated, and a satisfaction
/// class must be extensional.
pub fn convert(m: &FinStructure, c: &Class) -> Result<Class> {
    match c {
        Class::Sat(s) => {
            let witnesses = is_extensional(m, s);
            if !witnesses.is_empty() {
                return Err(Error::NonExtensional(witnesses.len()));
            }
            let t = TruthClass {
                family: s.family.clone(),
                sentences: s
                    .entries
                    .iter()
                    .map(|(f, a)| close_elems(m, f, a))
                    .collect(),
                structure: s.structure.clone(),
            };
            let r = validate_truth(m, &t, DEFAULT_BUDGET)?;
            if !r.is_clean() {
                return Err(Error::Invalid(format!(
                    "converted truth class fails validation:\n{}",
                    r.summary()
                )));
            }
            Ok(Class::Truth(t))
        }
        Class::Truth(t) => {
            let mut entries = BTreeSet::new();
            for f in t.family.iter() {
                for a in assignments(m, f) {
                    if t.sentences.contains(&close_elems(m, f, &a)) {
                        entries.insert((f.clone(), a));
                    }
                }
            }
            let s = SatClass {
                family: t.family.clone(),
                entries,
                structure: t.structure.clone(),
            };
            let r = validate_sat(m, &s, DEFAULT_BUDGET)?;
            if !r.is_clean() {
                return Err(Error::Invalid(format!(
                    "converted satisfaction class fails validation:\n{}",
                    r.summary()
                )));
            }
            Ok(Class::Sat(s))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::{induced_sat, induced_truth, Family};
    use crate::hfset::stage;
    use crate::syntax::{parse, Var};

    #[test]
    fn induced_is_extensional() {
        let m = stage(2).unwrap();
        let s = induced_sat(&m, &Family::depth(&[Var::new("x"), Var::new("y")], 2)).unwrap();
        assert!(is_extensional(&m, &s).is_empty());
    }

    #[test]
    fn renamed_pair_missing() {
        let m = stage(2).unwrap();
        let f = parse("(mem x y)").unwrap();
        let g = parse("(mem u w)").unwrap();
        let a: Assignment = [(Var::new("x"), 0), (Var::new("y"), 1)].into();
        let s = SatClass {
            family: Family::new([f.clone(), g]),
            entries: [(f, a)].into(),
            structure: "stage 2".into(),
        };
        assert_eq!(is_extensional(&m, &s).len(), 1);
        assert!(matches!(
            convert(&m, &Class::Sat(s)),
            Err(Error::NonExtensional(1))
        ));
    }

    #[test]
    fn singleton_family() {
        let m = stage(2).unwrap();
        let fam = Family::new([parse("(mem x y)").unwrap()]);
        let s = induced_sat(&m, &fam).unwrap();
        assert!(is_extensional(&m, &s).is_empty());
    }

    #[test]
    fn round_trips() {
        let m = stage(2).unwrap();
        let fam = Family::depth(&[Var::new("x"), Var::new("y")], 2);
        let t = induced_truth(&m, &fam).unwrap();
        let s = convert(&m, &Class::Truth(t.clone())).unwrap();
        assert_eq!(s, Class::Sat(induced_sat(&m, &fam).unwrap()));
        assert_eq!(convert(&m, &s).unwrap(), Class::Truth(t));
        let empty = Class::Truth(TruthClass::default());
        assert_eq!(convert(&m, &convert(&m, &empty).unwrap()).unwrap(), empty);
    }
}
