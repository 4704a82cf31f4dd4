//! Exhaustive and random formula generators used by sweeps, checkers and tests.

use rand::Rng;

use super::{Formula, Term, Var};
use crate::hfset::HfSet;

fn terms(vars: &[Var], consts: &[HfSet]) -> Vec<Term> {
    vars.iter()
        .cloned()
        .map(Term::Var)
        .chain(consts.iter().cloned().map(Term::Const))
        .collect()
}

/// `∈` and `=` atoms over the given terms.
pub fn atoms(vars: &[Var], consts: &[HfSet]) -> Vec<Formula> {
    let ts = terms(vars, consts);
    let mut out = Vec::new();
    for a in &ts {
        for b in &ts {
            out.push(Formula::mem(a.clone(), b.clone()));
            out.push(Formula::equals(a.clone(), b.clone()));
        }
    }
    out
}

/// Every formula over the given terms, grouped by exact depth: `layers[d-1]` has depth `d`.
/// Quantifiers bind any variable of the pool, vacuously or not.
pub fn layers(vars: &[Var], consts: &[HfSet], max_depth: u32) -> Vec<Vec<Formula>> {
    layers_from(atoms(vars, consts), vars, max_depth)
}

/// Like [`layers`], starting from an arbitrary atom list.
pub fn layers_from(atoms: Vec<Formula>, vars: &[Var], max_depth: u32) -> Vec<Vec<Formula>> {
    let mut out: Vec<Vec<Formula>> = Vec::new();
    if max_depth == 0 {
        return out;
    }
    out.push(atoms);
    for d in 1..max_depth as usize {
        let top = &out[d - 1];
        let lower: Vec<&Formula> = out[..d - 1].iter().flatten().collect();
        let mut next = Vec::new();
        for a in top {
            next.push(Formula::not(a.clone()));
        }
        for a in top {
            for b in top {
                next.push(Formula::or(a.clone(), b.clone()));
            }
            for b in &lower {
                next.push(Formula::or(a.clone(), (*b).clone()));
                next.push(Formula::or((*b).clone(), a.clone()));
            }
        }
        for v in vars {
            for a in top {
                next.push(Formula::exists(v.clone(), a.clone()));
            }
        }
        out.push(next);
    }
    out
}

/// All formulas of depth at most `max_depth`.
pub fn up_to(vars: &[Var], consts: &[HfSet], max_depth: u32) -> Vec<Formula> {
    layers(vars, consts, max_depth)
        .into_iter()
        .flatten()
        .collect()
}

/// Bounded formulas built with a sugared bounded quantifier counted as one level.
/// `preds` adds `P(t)` atoms for each named predicate.
pub fn delta0_layers(vars: &[Var], preds: &[&str], max_depth: u32) -> Vec<Vec<Formula>> {
    let mut base = atoms(vars, &[]);
    for p in preds {
        for v in vars {
            base.push(Formula::pred(p, v));
        }
    }
    let mut out: Vec<Vec<Formula>> = Vec::new();
    if max_depth == 0 {
        return out;
    }
    out.push(base);
    for d in 1..max_depth as usize {
        let top = &out[d - 1];
        let lower: Vec<&Formula> = out[..d - 1].iter().flatten().collect();
        let mut next = Vec::new();
        for a in top {
            next.push(Formula::not(a.clone()));
            for b in top {
                next.push(Formula::or(a.clone(), b.clone()));
            }
            for b in &lower {
                next.push(Formula::or(a.clone(), (*b).clone()));
                next.push(Formula::or((*b).clone(), a.clone()));
            }
            for v in vars {
                for w in vars.iter().filter(|w| *w != v) {
                    next.push(Formula::exists_in(v.clone(), w, a.clone()));
                }
            }
        }
        out.push(next);
    }
    out
}

/// A random formula of depth at most `max_depth`.
pub fn random_formula<R: Rng>(
    rng: &mut R,
    vars: &[Var],
    consts: &[HfSet],
    max_depth: u32,
) -> Formula {
    let ts = terms(vars, consts);
    let term = |rng: &mut R| ts[rng.gen_range(0..ts.len())].clone();
    if max_depth <= 1 || rng.gen_ratio(1, 4) {
        let (a, b) = (term(rng), term(rng));
        return if rng.gen_bool(0.5) {
            Formula::mem(a, b)
        } else {
            Formula::equals(a, b)
        };
    }
    let shapes = if vars.is_empty() { 2 } else { 3 };
    match rng.gen_range(0..shapes) {
        0 => Formula::not(random_formula(rng, vars, consts, max_depth - 1)),
        1 => Formula::or(
            random_formula(rng, vars, consts, max_depth - 1),
            random_formula(rng, vars, consts, max_depth - 1),
        ),
        _ => {
            let v = vars[rng.gen_range(0..vars.len())].clone();
            Formula::exists(v, random_formula(rng, vars, consts, max_depth - 1))
        }
    }
}

/// Sentences of depth at most `max_depth`: closures of pool formulas by every assignment into
/// `consts`, deduplicated and sorted.
pub fn sentences(vars: &[Var], consts: &[HfSet], max_depth: u32) -> Vec<Formula> {
    let mut out = std::collections::BTreeSet::new();
    for f in up_to(vars, &[], max_depth) {
        for a in assignments(f.free_vars(), consts) {
            out.insert(f.close(&a).expect("assignment over free variables"));
        }
    }
    out.into_iter().collect()
}

/// Every map from `vars` into `values`.
pub fn assignments<T: Clone>(
    vars: &[Var],
    values: &[T],
) -> Vec<std::collections::BTreeMap<Var, T>> {
    let mut out = vec![std::collections::BTreeMap::new()];
    for v in vars {
        out = out
            .into_iter()
            .flat_map(|a| {
                values.iter().map(move |x| {
                    let mut b = a.clone();
                    b.insert(v.clone(), x.clone());
                    b
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layer_sizes() {
        let x = [Var::new("x")];
        let l = layers(&x, &[], 3);
        assert_eq!(l[0].len(), 2);
        // ¬ (2) + ∨ over depth-1 pairs (4) + ∃ (2)
        assert_eq!(l[1].len(), 8);
        for (d, layer) in l.iter().enumerate() {
            assert!(layer.iter().all(|f| f.depth() == d as u32 + 1));
        }
        let mut all: Vec<Formula> = l.into_iter().flatten().collect();
        let n = all.len();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), n);
    }

    #[test]
    fn delta0_generator_is_bounded() {
        let vars = [Var::new("x"), Var::new("y")];
        for f in delta0_layers(&vars, &["P"], 3).into_iter().flatten() {
            assert!(f.is_delta0(), "{f}");
        }
    }

    #[test]
    fn sentence_pool() {
        let consts = [HfSet::empty()];
        let s = sentences(&[Var::new("x")], &consts, 1);
        assert_eq!(s.len(), 2);
        assert!(s.iter().all(Formula::is_sentence));
    }
}
