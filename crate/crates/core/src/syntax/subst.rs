use std::collections::{BTreeMap, BTreeSet};

use super::{Formula, Kind, Term, Var};
use crate::error::{Error, Result};
use crate::hfset::HfSet;

/// A name based on `base` that is not in `avoid`.
pub fn fresh_var(base: &str, avoid: &BTreeSet<Var>) -> Var {
    let plain = Var::new(base);
    if !avoid.contains(&plain) {
        return plain;
    }
    (1..)
        .map(|i| Var::new(&format!("{base}{i}")))
        .find(|v| !avoid.contains(v))
        .unwrap()
}

/// A name based on `base` that does not occur in `f`.
pub fn fresh_for(f: &Formula, base: &str) -> Var {
    fresh_var(base, &f.all_vars())
}

impl Formula {
    /// Every variable occurring in the formula, free or bound.
    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.visit_vars(&mut |v| {
            out.insert(v.clone());
        });
        out
    }

    /// Capture-avoiding simultaneous substitution for free variables.
    pub fn substitute(&self, map: &BTreeMap<Var, Term>) -> Formula {
        if !self.free_vars().iter().any(|v| map.contains_key(v)) {
            return self.clone();
        }
        let sub = |t: &Term| match t {
            Term::Var(v) => map.get(v).cloned().unwrap_or_else(|| t.clone()),
            c => c.clone(),
        };
        match self.kind() {
            Kind::Mem(a, b) => Formula::mem(sub(a), sub(b)),
            Kind::Eq(a, b) => Formula::equals(sub(a), sub(b)),
            Kind::Pred(p, t) => Formula::pred(p, sub(t)),
            Kind::Prov(p, body) => Formula::prov(p, body.substitute(map)),
            Kind::Not(a) => Formula::not(a.substitute(map)),
            Kind::Or(a, b) => Formula::or(a.substitute(map), b.substitute(map)),
            Kind::Exists(v, body) => {
                let mut inner: BTreeMap<Var, Term> = map
                    .iter()
                    .filter(|(k, _)| *k != v && body.has_free(k))
                    .map(|(k, t)| (k.clone(), t.clone()))
                    .collect();
                let captures = inner.values().any(|t| t.as_var() == Some(v));
                if !captures {
                    return Formula::exists(v.clone(), body.substitute(&inner));
                }
                let mut avoid = body.all_vars();
                avoid.extend(inner.keys().cloned());
                avoid.extend(inner.values().filter_map(|t| t.as_var().cloned()));
                let w = fresh_var(v.name(), &avoid);
                inner.insert(v.clone(), Term::Var(w.clone()));
                Formula::exists(w, body.substitute(&inner))
            }
        }
    }

    /// Replaces free occurrences of `v` by `t`.
    pub fn substitute_one(&self, v: &Var, t: impl Into<Term>) -> Formula {
        self.substitute(&BTreeMap::from([(v.clone(), t.into())]))
    }

    /// `φ*α`: replaces each variable in the domain of `α` by the constant it names.
    pub fn close(&self, assignment: &BTreeMap<Var, HfSet>) -> Result<Formula> {
        if let Some(v) = assignment.keys().find(|v| !self.has_free(v)) {
            return Err(Error::NotFree(v.name().to_string()));
        }
        let map = assignment
            .iter()
            .map(|(v, c)| (v.clone(), Term::Const(c.clone())))
            .collect();
        Ok(self.substitute(&map))
    }

    /// Replaces each distinct constant by a fresh variable based on `base`, returning the open
    /// formula and the assignment that closes it back to `self`.
    pub fn open_constants(&self, base: &str) -> (Formula, BTreeMap<Var, HfSet>) {
        let mut avoid = self.all_vars();
        let mut names: BTreeMap<HfSet, Var> = BTreeMap::new();
        for c in self.constants() {
            let v = fresh_var(base, &avoid);
            avoid.insert(v.clone());
            names.insert(c, v);
        }
        let open = self.map_terms(&|t| match t {
            Term::Const(c) => Term::Var(names[c].clone()),
            v => v.clone(),
        });
        (open, names.into_iter().map(|(c, v)| (v, c)).collect())
    }

    fn map_terms(&self, f: &dyn Fn(&Term) -> Term) -> Formula {
        match self.kind() {
            Kind::Mem(a, b) => Formula::mem(f(a), f(b)),
            Kind::Eq(a, b) => Formula::equals(f(a), f(b)),
            Kind::Pred(p, t) => Formula::pred(p, f(t)),
            Kind::Prov(p, body) => Formula::prov(p, body.map_terms(f)),
            Kind::Not(a) => Formula::not(a.map_terms(f)),
            Kind::Or(a, b) => Formula::or(a.map_terms(f), b.map_terms(f)),
            Kind::Exists(v, a) => Formula::exists(v.clone(), a.map_terms(f)),
        }
    }

    /// Renames every bound variable to a name fixed by its binder depth, so that formulas
    /// differing only in bound names become identical.
    pub fn alpha_normal(&self) -> Formula {
        let avoid: BTreeSet<Var> = self.free_vars().iter().cloned().collect();
        let mut names = Vec::new();
        self.alpha_walk(&mut Vec::new(), &avoid, &mut names)
    }

    fn alpha_walk(
        &self,
        env: &mut Vec<(Var, Var)>,
        avoid: &BTreeSet<Var>,
        names: &mut Vec<Var>,
    ) -> Formula {
        let rn = |t: &Term, env: &Vec<(Var, Var)>| match t {
            Term::Var(v) => env
                .iter()
                .rev()
                .find(|(old, _)| old == v)
                .map_or_else(|| t.clone(), |(_, new)| Term::Var(new.clone())),
            c => c.clone(),
        };
        match self.kind() {
            Kind::Mem(a, b) => Formula::mem(rn(a, env), rn(b, env)),
            Kind::Eq(a, b) => Formula::equals(rn(a, env), rn(b, env)),
            Kind::Pred(p, t) => Formula::pred(p, rn(t, env)),
            Kind::Prov(p, body) => Formula::prov(p, body.alpha_walk(env, avoid, names)),
            Kind::Not(a) => Formula::not(a.alpha_walk(env, avoid, names)),
            Kind::Or(a, b) => Formula::or(
                a.alpha_walk(env, avoid, names),
                b.alpha_walk(env, avoid, names),
            ),
            Kind::Exists(v, body) => {
                let depth = env.len();
                while names.len() <= depth {
                    let mut taken = avoid.clone();
                    taken.extend(names.iter().cloned());
                    names.push(fresh_var(&format!("b{}", names.len()), &taken));
                }
                let new = names[depth].clone();
                env.push((v.clone(), new.clone()));
                let body = body.alpha_walk(env, avoid, names);
                env.pop();
                Formula::exists(new, body)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn asg(pairs: &[(&str, u64)]) -> BTreeMap<Var, HfSet> {
        pairs
            .iter()
            .map(|(v, c)| (Var::new(v), HfSet::from_code(*c)))
            .collect()
    }

    #[test]
    fn close_examples() {
        let f = parse("(mem x y)").unwrap();
        assert_eq!(
            f.close(&asg(&[("x", 0), ("y", 1)])).unwrap(),
            parse("(mem #0 #1)").unwrap()
        );
        assert_eq!(f.close(&BTreeMap::new()).unwrap(), f);
        let g = parse("(ex x (mem x y))").unwrap();
        assert_eq!(
            g.close(&asg(&[("y", 0)])).unwrap(),
            parse("(ex x (mem x #0))").unwrap()
        );
        assert_eq!(g.close(&asg(&[("x", 0)])), Err(Error::NotFree("x".into())));
    }

    #[test]
    fn open_constants_round_trip() {
        let s = parse("(ex c (or (mem c #1) (eq #0 #1)))").unwrap();
        let (open, a) = s.open_constants("c");
        assert_eq!(open.free_vars().len(), 2);
        assert!(!open.has_constants());
        assert_eq!(open.close(&a).unwrap(), s);
    }

    #[test]
    fn capture_is_avoided() {
        let f = parse("(ex y (mem x y))").unwrap();
        let g = f.substitute_one(&Var::new("x"), Term::var("y"));
        assert_eq!(g, parse("(ex y1 (mem y y1))").unwrap());
    }

    #[test]
    fn alpha_normal_identifies_renamings() {
        let a = parse("(ex x (ex y (mem x y)))").unwrap();
        let b = parse("(ex u (ex w (mem u w)))").unwrap();
        assert_eq!(a.alpha_normal(), b.alpha_normal());
        let c = parse("(ex b0 (mem b0 b1))").unwrap();
        let n = c.alpha_normal();
        assert_eq!(n.free_vars(), &[Var::new("b1")]);
        assert_ne!(n, parse("(ex b0 (mem b0 b0))").unwrap());
    }

    mod props {
        use super::*;
        use crate::syntax::enumerate::random_formula;
        use proptest::prelude::*;
        use rand::SeedableRng;

        proptest! {
            #[test]
            fn close_composes(seed in any::<u64>(), c1 in 0u64..16, c2 in 0u64..16) {
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let vars = [Var::new("x"), Var::new("y")];
                let f = random_formula(&mut rng, &vars, &[], 5);
                let fv = f.free_vars().to_vec();
                prop_assume!(fv.len() == 2);
                let a = BTreeMap::from([(fv[0].clone(), HfSet::from_code(c1))]);
                let b = BTreeMap::from([(fv[1].clone(), HfSet::from_code(c2))]);
                let mut ab = a.clone();
                ab.extend(b.clone());
                prop_assert_eq!(f.close(&ab).unwrap(), f.close(&a).unwrap().close(&b).unwrap());
            }
        }
    }
}
