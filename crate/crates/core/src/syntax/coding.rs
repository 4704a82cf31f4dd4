//! Formulas as hereditarily finite sets.
//!
//! Every node is a Kuratowski pair `<tag, payload>` with a numeral tag:
//! variable 0, constant 1, `∈` 2, `=` 3, `¬` 4, `∨` 5, `∃` 6, predicate 7, provability 8.
//! Binary payloads are pairs. A variable `v<i>` has payload `i`; any other name, and every
//! predicate symbol, is a list of byte numerals built from nested pairs ending in `∅`.

use std::sync::Arc;

use super::{Formula, Kind, Term, Var};
use crate::error::{Error, Result};
use crate::hfset::HfSet;

fn pair(a: &HfSet, b: &HfSet) -> HfSet {
    HfSet::kuratowski(a, b)
}

fn tagged(tag: usize, payload: HfSet) -> HfSet {
    pair(&HfSet::numeral(tag), &payload)
}

fn bytes(s: &str) -> HfSet {
    s.bytes().rev().fold(HfSet::empty(), |rest, b| {
        pair(&HfSet::numeral(b as usize), &rest)
    })
}

fn unbytes(mut x: HfSet) -> Option<String> {
    let mut out = Vec::new();
    while !x.is_empty() {
        let (b, rest) = x.as_pair()?;
        out.push(u8::try_from(b.as_numeral()?).ok()?);
        x = rest;
    }
    String::from_utf8(out).ok()
}

fn var_code(v: &Var) -> HfSet {
    match v.index() {
        Some(i) => tagged(0, HfSet::numeral(i)),
        None => tagged(0, bytes(v.name())),
    }
}

fn term_code(t: &Term) -> HfSet {
    match t {
        Term::Var(v) => var_code(v),
        Term::Const(c) => tagged(1, c.clone()),
    }
}

fn bad(x: &HfSet) -> Error {
    Error::BadCode(x.to_string())
}

fn untag(x: &HfSet) -> Result<(usize, HfSet)> {
    let (tag, payload) = x.as_pair().ok_or_else(|| bad(x))?;
    Ok((tag.as_numeral().ok_or_else(|| bad(x))?, payload))
}

fn decode_var(x: &HfSet) -> Result<Var> {
    match untag(x)? {
        (0, payload) => {
            if let Some(i) = payload.as_numeral() {
                return Ok(Var::indexed(i));
            }
            let name = unbytes(payload).ok_or_else(|| bad(x))?;
            let v = Var::new(&name);
            // A name spelled `v<i>` is always coded by index.
            if v.index().is_some() || name.is_empty() {
                return Err(bad(x));
            }
            Ok(v)
        }
        _ => Err(bad(x)),
    }
}

fn decode_term(x: &HfSet) -> Result<Term> {
    match untag(x)? {
        (1, c) => Ok(Term::Const(c)),
        _ => decode_var(x).map(Term::Var),
    }
}

fn split(x: &HfSet) -> Result<(HfSet, HfSet)> {
    x.as_pair().ok_or_else(|| bad(x))
}

impl Formula {
    /// The canonical code, computed once per node.
    pub fn code(&self) -> HfSet {
        self.0
            .code
            .get_or_init(|| match self.kind() {
                Kind::Mem(a, b) => tagged(2, pair(&term_code(a), &term_code(b))),
                Kind::Eq(a, b) => tagged(3, pair(&term_code(a), &term_code(b))),
                Kind::Not(a) => tagged(4, a.code()),
                Kind::Or(a, b) => tagged(5, pair(&a.code(), &b.code())),
                Kind::Exists(v, a) => tagged(6, pair(&var_code(v), &a.code())),
                Kind::Pred(p, t) => tagged(7, pair(&bytes(p), &term_code(t))),
                Kind::Prov(p, body) => tagged(8, pair(&bytes(p), &body.code())),
            })
            .clone()
    }

    /// Inverse of [`Formula::code`].
    pub fn decode(x: &HfSet) -> Result<Formula> {
        let (tag, payload) = untag(x)?;
        let sym = |s: HfSet| -> Result<Arc<str>> {
            unbytes(s)
                .filter(|n| !n.is_empty())
                .map(Arc::from)
                .ok_or_else(|| bad(x))
        };
        Ok(match tag {
            2 | 3 => {
                let (a, b) = split(&payload)?;
                let (a, b) = (decode_term(&a)?, decode_term(&b)?);
                if tag == 2 {
                    Formula::mem(a, b)
                } else {
                    Formula::equals(a, b)
                }
            }
            4 => Formula::not(Formula::decode(&payload)?),
            5 => {
                let (a, b) = split(&payload)?;
                Formula::or(Formula::decode(&a)?, Formula::decode(&b)?)
            }
            6 => {
                let (v, a) = split(&payload)?;
                Formula::exists(decode_var(&v)?, Formula::decode(&a)?)
            }
            7 => {
                let (p, t) = split(&payload)?;
                Formula::pred(&sym(p)?, decode_term(&t)?)
            }
            8 => {
                let (p, body) = split(&payload)?;
                Formula::prov(&sym(p)?, Formula::decode(&body)?)
            }
            _ => return Err(bad(x)),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::enumerate::{layers, random_formula};
    use crate::syntax::parse;
    use rand::SeedableRng;
    use std::collections::HashMap;

    #[test]
    fn round_trip_named_and_indexed() {
        for text in [
            "(mem v0 v1)",
            "(ex v3 (or (eq v3 #5) (not (mem x v3))))",
            "(prov Prov* (pred Fin y))",
            "(mem #{#0 #{#1}} abc)",
        ] {
            let f = parse(text).unwrap();
            assert_eq!(Formula::decode(&f.code()).unwrap(), f);
        }
    }

    #[test]
    fn non_codes_are_rejected() {
        assert!(Formula::decode(&HfSet::from_code(5)).is_err());
        assert!(Formula::decode(&HfSet::numeral(3)).is_err());
        let v = var_code(&Var::indexed(0));
        assert!(Formula::decode(&v).is_err());
    }

    #[test]
    fn codes_injective_on_enumeration() {
        let vars = [Var::indexed(0), Var::indexed(1)];
        let all: Vec<Formula> = layers(&vars, &[HfSet::empty()], 3)
            .into_iter()
            .flatten()
            .collect();
        let mut seen: HashMap<HfSet, Formula> = HashMap::new();
        for f in all {
            if let Some(g) = seen.insert(f.code(), f.clone()) {
                panic!("{f} and {g} share a code");
            }
        }
    }

    #[test]
    fn rank_grows_linearly_with_depth() {
        let vars: Vec<Var> = (0..3).map(Var::indexed).collect();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let f = random_formula(&mut rng, &vars, &[], 8);
            assert!(f.code().rank() <= 4 * f.depth() + 5, "{f}");
        }
    }
}
