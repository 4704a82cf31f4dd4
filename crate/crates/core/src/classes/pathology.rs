use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::eval::{self, Assignment};
use crate::hfset::{Elem, FinStructure};
use crate::syntax::{Formula, Var};

/// `D(1,φ) = φ∨φ`, `D(k+1,φ) = D(k,φ) ∨ D(k,φ)`.
pub fn pathology_d(k: u32, f: &Formula) -> Result<Formula> {
    if k == 0 {
        return Err(Error::Invalid("D(k, φ) needs k >= 1".into()));
    }
    Ok((0..k).fold(f.clone(), |acc, _| Formula::or(acc.clone(), acc)))
}

/// For binary `S(x, y)` with free variables `x < y`, the unary `R(x) = ¬S(x, x)`.
pub fn diagonal_formula(s: &Formula) -> Result<(Formula, Var, Var)> {
    let [x, y] = s.free_vars() else {
        return Err(Error::Arity(format!(
            "diagonal needs exactly two free variables, found {}",
            s.free_vars().len()
        )));
    };
    let r = Formula::not(s.substitute_one(y, x));
    Ok((r, x.clone(), y.clone()))
}

/// Codes each formula of a finite pool by the element whose index is the formula's position
/// in the Ackermann order of the pool's codes.
pub struct AckermannCoding {
    index: BTreeMap<Formula, Elem>,
}

impl AckermannCoding {
    pub fn new(pool: &[Formula], m: &FinStructure) -> Result<AckermannCoding> {
        let mut by_code: Vec<&Formula> = pool.iter().collect();
        by_code.sort_by_key(|f| f.code());
        by_code.dedup();
        if by_code.len() > m.len() {
            return Err(Error::CodingOutside(format!(
                "{} formulas into {} elements",
                by_code.len(),
                m.len()
            )));
        }
        Ok(AckermannCoding {
            index: by_code
                .into_iter()
                .enumerate()
                .map(|(i, f)| (f.clone(), i as Elem))
                .collect(),
        })
    }

    /// The pool used for a diagonal argument against `s`.
    pub fn for_diagonal(s: &Formula, m: &FinStructure) -> Result<AckermannCoding> {
        let (r, x, _) = diagonal_formula(s)?;
        let pool = [
            r,
            Formula::equals(&x, &x),
            Formula::mem(&x, &x),
            Formula::not(Formula::equals(&x, &x)),
        ];
        AckermannCoding::new(&pool, m)
    }

    pub fn code(&self, f: &Formula) -> Option<Elem> {
        self.index.get(f).copied()
    }
}

/// The failed instance `S(r, r) ↔ Sat(R, r)` of the claim that `S` defines satisfaction for
/// unary formulas, where `r` codes `R(x) = ¬S(x, x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagonal {
    pub r: Formula,
    pub code: Elem,
    /// `S(r, r)` in the structure.
    pub s_value: bool,
    /// `R(r)` in the structure.
    pub r_value: bool,
}

pub fn diagonal_refute(
    m: &FinStructure,
    s: &Formula,
    coding: &dyn Fn(&Formula) -> Option<Elem>,
) -> Result<Diagonal> {
    let (r, x, y) = diagonal_formula(s)?;
    let code = coding(&r)
        .filter(|&c| (c as usize) < m.len())
        .ok_or_else(|| Error::CodingOutside(r.render()))?;
    let both: Assignment = [(x.clone(), code), (y, code)].into();
    let s_value = eval::sat(m, s, &both)?;
    let r_value = eval::sat(m, &r, &[(x, code)].into())?;
    assert_eq!(r_value, !s_value, "R(r) must be the negation of S(r, r)");
    Ok(Diagonal {
        r,
        code,
        s_value,
        r_value,
    })
}
