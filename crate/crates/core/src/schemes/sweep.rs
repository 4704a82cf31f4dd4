use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use super::{check_arity, SchemeTag};
use crate::error::{Error, Result};
use crate::hfset::{Elem, FinStructure};
use crate::report::{Report, Violation};
use crate::syntax::{Formula, Kind, Term, Var};

/// Most violations a sweep lists; the rest are counted in a note.
const MAX_LISTED: usize = 100;

type Bits = Rc<Vec<u64>>;

/// Extensions of formulas over `M^k` for a fixed variable tuple, computed bottom-up and
/// cached below a depth. Assignment `(e0, …, e(k-1))` sits at index `Σ ei·|M|^i`.
pub struct Extensions<'m> {
    m: &'m FinStructure,
    vars: Vec<Var>,
    size: usize,
    cache: HashMap<Formula, Bits>,
    cache_below: u32,
}

impl<'m> Extensions<'m> {
    pub fn new(m: &'m FinStructure, vars: &[Var], cache_below: u32) -> Result<Extensions<'m>> {
        let size = (m.len() as u64)
            .checked_pow(vars.len() as u32)
            .filter(|s| *s <= 1 << 24)
            .ok_or_else(|| Error::Invalid("extension table too large".into()))?;
        Ok(Extensions {
            m,
            vars: vars.to_vec(),
            size: size as usize,
            cache: HashMap::new(),
            cache_below,
        })
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    fn stride(&self, i: usize) -> usize {
        self.m.len().pow(i as u32)
    }

    /// The value of variable `i` at assignment index `idx`.
    pub fn coord(&self, idx: usize, i: usize) -> Elem {
        (idx / self.stride(i) % self.m.len()) as Elem
    }

    pub fn index(&self, values: &[Elem]) -> usize {
        values
            .iter()
            .enumerate()
            .map(|(i, e)| *e as usize * self.stride(i))
            .sum()
    }

    fn position(&self, v: &Var) -> Result<usize> {
        self.vars
            .iter()
            .position(|w| w == v)
            .ok_or_else(|| Error::Invalid(format!("variable {v} outside the extension tuple")))
    }

    fn term(&self, t: &Term) -> Result<std::result::Result<usize, Elem>> {
        Ok(match t {
            Term::Var(v) => Ok(self.position(v)?),
            Term::Const(c) => Err(self
                .m
                .elem_of(c)
                .ok_or_else(|| Error::ConstantOutside(c.to_string()))?),
        })
    }

    fn words(&self) -> Vec<u64> {
        vec![0; self.size.div_ceil(64)]
    }

    fn tabulate(&self, f: impl Fn(usize) -> bool) -> Vec<u64> {
        let mut out = self.words();
        for idx in 0..self.size {
            if f(idx) {
                out[idx / 64] |= 1 << (idx % 64);
            }
        }
        out
    }

    pub fn get(bits: &[u64], idx: usize) -> bool {
        bits[idx / 64] >> (idx % 64) & 1 == 1
    }

    fn atom(&self, s: &Term, t: &Term, rel: impl Fn(Elem, Elem) -> bool) -> Result<Vec<u64>> {
        let (s, t) = (self.term(s)?, self.term(t)?);
        let value = |side: std::result::Result<usize, Elem>, idx: usize| match side {
            Ok(i) => self.coord(idx, i),
            Err(e) => e,
        };
        Ok(self.tabulate(|idx| rel(value(s, idx), value(t, idx))))
    }

    /// The set of assignments satisfying `f`.
    pub fn ext(&mut self, f: &Formula) -> Result<Bits> {
        if let Some(b) = self.cache.get(f) {
            return Ok(b.clone());
        }
        let m = self.m;
        let bits = match f.kind() {
            Kind::Mem(s, t) => self.atom(s, t, |x, y| m.mem(x, y))?,
            Kind::Eq(s, t) => self.atom(s, t, |x, y| x == y)?,
            Kind::Pred(name, _) | Kind::Prov(name, _) => {
                return Err(Error::Uninterpreted(name.to_string()));
            }
            Kind::Not(a) => {
                let a = self.ext(a)?;
                let mut out: Vec<u64> = a.iter().map(|w| !w).collect();
                if !self.size.is_multiple_of(64) {
                    *out.last_mut().unwrap() &= (1 << (self.size % 64)) - 1;
                }
                out
            }
            Kind::Or(a, b) => {
                let (a, b) = (self.ext(a)?, self.ext(b)?);
                a.iter().zip(b.iter()).map(|(x, y)| x | y).collect()
            }
            Kind::Exists(v, body) => {
                let body = self.ext(body)?;
                let i = self.position(v)?;
                let stride = self.stride(i);
                let mut hit = vec![false; self.size];
                for idx in 0..self.size {
                    if Self::get(&body, idx) {
                        hit[idx - self.coord(idx, i) as usize * stride] = true;
                    }
                }
                self.tabulate(|idx| hit[idx - self.coord(idx, i) as usize * stride])
            }
        };
        let bits = Rc::new(bits);
        if f.depth() < self.cache_below {
            self.cache.insert(f.clone(), bits.clone());
        }
        Ok(bits)
    }
}

/// Membership masks of a structure with at most 64 elements.
struct Masks<'m> {
    m: &'m FinStructure,
    members: Vec<u64>,
    by_members: HashMap<u64, Elem>,
    nat: Vec<bool>,
    empty: Vec<Elem>,
}

impl<'m> Masks<'m> {
    fn new(m: &'m FinStructure) -> Result<Masks<'m>> {
        if m.len() > 64 {
            return Err(Error::Invalid(
                "scheme sweeps need at most 64 elements".into(),
            ));
        }
        let members: Vec<u64> = m
            .elements()
            .map(|y| m.members(y).iter().fold(0, |acc, x| acc | 1 << x))
            .collect();
        let mut by_members = HashMap::new();
        for e in m.elements() {
            by_members.entry(members[e as usize]).or_insert(e);
        }
        let transitive = |u: Elem| {
            m.members(u)
                .iter()
                .all(|&p| members[p as usize] & !members[u as usize] == 0)
        };
        let nat = m
            .elements()
            .map(|u| transitive(u) && m.members(u).iter().all(|&w| transitive(w)))
            .collect();
        let empty = m.elements().filter(|e| members[*e as usize] == 0).collect();
        Ok(Masks {
            m,
            members,
            by_members,
            nat,
            empty,
        })
    }

    /// `s = x ∪ {x}` read inside the structure.
    fn successor(&self, x: Elem, s: Elem) -> bool {
        let (mx, ms) = (self.members[x as usize], self.members[s as usize]);
        ms >> x & 1 == 1 && mx & !ms == 0 && ms & !(mx | 1 << x) == 0
    }
}

type Witness = Vec<(&'static str, Elem)>;

/// Decides one scheme instance from its template's extension. `None` means the instance
/// holds; otherwise the failing parameters.
fn verdict(tag: SchemeTag, ext: &Extensions, masks: &Masks, bits: &[u64]) -> Option<Witness> {
    let m = masks.m;
    let n = m.len() as Elem;
    let at = |vals: &[Elem]| Extensions::get(bits, ext.index(vals));
    // Mask of `y` values with `φ(v, x, y)`.
    let row = |v: Elem, x: Elem| {
        (0..n)
            .filter(|&y| at(&[v, x, y]))
            .fold(0u64, |acc, y| acc | 1 << y)
    };
    let set = |v: Elem| {
        (0..n)
            .filter(|&x| at(&[v, x]))
            .fold(0u64, |acc, x| acc | 1 << x)
    };
    for v in 0..n {
        match tag {
            SchemeTag::Sep => {
                let s = set(v);
                for a in 0..n {
                    if !masks
                        .by_members
                        .contains_key(&(masks.members[a as usize] & s))
                    {
                        return Some(vec![("v", v), ("a", a)]);
                    }
                }
            }
            SchemeTag::Found => {
                let s = set(v);
                if s != 0 && !(0..n).any(|x| s >> x & 1 == 1 && masks.members[x as usize] & s == 0)
                {
                    return Some(vec![("v", v)]);
                }
            }
            SchemeTag::Coll => {
                for a in 0..n {
                    let rows: Vec<u64> = m.members(a).iter().map(|&x| row(v, x)).collect();
                    if rows.iter().all(|r| *r != 0)
                        && !masks
                            .members
                            .iter()
                            .any(|b| rows.iter().all(|r| r & b != 0))
                    {
                        return Some(vec![("v", v), ("a", a)]);
                    }
                }
            }
            SchemeTag::Repl => {
                for a in 0..n {
                    let rows: Vec<u64> = m.members(a).iter().map(|&x| row(v, x)).collect();
                    let image = rows.iter().fold(0, |acc, r| acc | r);
                    if rows.iter().all(|r| r.count_ones() == 1)
                        && !masks.by_members.contains_key(&image)
                    {
                        return Some(vec![("v", v), ("a", a)]);
                    }
                }
            }
            SchemeTag::Ind => {
                let s = set(v);
                let zero = masks.empty.iter().any(|&z| s >> z & 1 == 1);
                let step = (0..n).all(|x| {
                    !masks.nat[x as usize]
                        || s >> x & 1 == 0
                        || (0..n).all(|t| !masks.successor(x, t) || s >> t & 1 == 1)
                });
                if zero && step {
                    if let Some(x) = (0..n).find(|&x| masks.nat[x as usize] && s >> x & 1 == 0) {
                        return Some(vec![("v", v), ("x", x)]);
                    }
                }
            }
            _ => unreachable!("only first-order schemes are swept"),
        }
    }
    None
}

/// Truth of the scheme instances for `templates` in `m`, decided from each template's
/// extension rather than by evaluating the full instance. Templates with equal extensions
/// share one verdict. Induction reads `ω` as the natural numbers present in `m`.
pub fn scheme_sweep(
    m: &FinStructure,
    tag: SchemeTag,
    templates: &[Formula],
    stop_at_first: bool,
) -> Result<Report> {
    let tag = tag.base();
    if !matches!(
        tag,
        SchemeTag::Sep | SchemeTag::Coll | SchemeTag::Repl | SchemeTag::Ind | SchemeTag::Found
    ) {
        return Err(Error::Invalid(format!(
            "{tag} has no extension-level sweep"
        )));
    }
    let vars = tag.template_vars();
    let cache_below = templates.iter().map(Formula::depth).max().unwrap_or(0);
    let mut ext = Extensions::new(m, &vars, cache_below)?;
    let masks = Masks::new(m)?;
    let mut verdicts: HashMap<Bits, Option<Witness>> = HashMap::new();
    let mut report = Report::new(format!("sweep {tag}"));
    if tag == SchemeTag::Ind {
        report.note("finite ω-fragment");
    }
    let mut failing = 0usize;
    for f in templates {
        check_arity(tag, f)?;
        report.checked += 1;
        let bits = ext.ext(f)?;
        let found = verdicts
            .entry(bits.clone())
            .or_insert_with(|| verdict(tag, &ext, &masks, &bits))
            .clone();
        if let Some(witness) = found {
            failing += 1;
            if failing <= MAX_LISTED {
                let ids: BTreeMap<String, u64> = witness
                    .iter()
                    .map(|(name, e)| (name.to_string(), m.id(*e)))
                    .collect();
                report.push(
                    Violation::new(tag.to_string(), f, format!("{tag} instance false"))
                        .with_assignment(ids),
                );
            }
            if stop_at_first {
                break;
            }
        }
    }
    report.note(format!("{} distinct extensions", verdicts.len()));
    if failing > MAX_LISTED {
        report.note(format!(
            "{failing} failing templates, first {MAX_LISTED} listed"
        ));
    }
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{self, Assignment};
    use crate::hfset::stage;
    use crate::schemes::gen_scheme;
    use crate::syntax::{enumerate, parse};

    #[test]
    fn extensions_match_evaluation() {
        let m = stage(3).unwrap();
        let vars = [Var::new("v"), Var::new("x")];
        let mut ext = Extensions::new(&m, &vars, 3).unwrap();
        for f in enumerate::up_to(&vars, &[], 2) {
            let bits = ext.ext(&f).unwrap();
            for a in enumerate::assignments(&vars, &m.elements().collect::<Vec<_>>()) {
                let idx = ext.index(&[a[&vars[0]], a[&vars[1]]]);
                let a: Assignment = a.into_iter().filter(|(v, _)| f.has_free(v)).collect();
                assert_eq!(
                    Extensions::get(&bits, idx),
                    eval::sat(&m, &f, &a).unwrap(),
                    "{f}"
                );
            }
        }
    }

    #[test]
    fn verdicts_match_sentences() {
        for n in 1..=3 {
            let m = stage(n).unwrap();
            for tag in [
                SchemeTag::Sep,
                SchemeTag::Found,
                SchemeTag::Ind,
                SchemeTag::Coll,
                SchemeTag::Repl,
            ] {
                let vars = tag.template_vars();
                let templates = enumerate::up_to(&vars, &[], 2);
                let step = if vars.len() == 3 { 7 } else { 1 };
                let sample: Vec<Formula> = templates.into_iter().step_by(step).collect();
                let report = scheme_sweep(&m, tag, &sample, false).unwrap();
                let failing: Vec<&str> = report
                    .violations
                    .iter()
                    .map(|v| v.formula.as_str())
                    .collect();
                for f in &sample {
                    let s = gen_scheme(tag, f).unwrap().sentence;
                    let truth = eval::holds(&m, &s).unwrap();
                    if report.violations.len() < MAX_LISTED {
                        assert_eq!(
                            truth,
                            !failing.contains(&f.to_string().as_str()),
                            "{tag} {f} in stage {n}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn replacement_fails_at_the_top_rank() {
        let m = stage(2).unwrap();
        let f = parse("(eq y v)").unwrap();
        let report = scheme_sweep(&m, SchemeTag::Repl, std::slice::from_ref(&f), false).unwrap();
        assert_eq!(report.violations.len(), 1);
        let s = gen_scheme(SchemeTag::Repl, &f).unwrap().sentence;
        assert!(!eval::holds(&m, &s).unwrap());
        let m1 = stage(1).unwrap();
        assert!(scheme_sweep(&m1, SchemeTag::Repl, &[f], false)
            .unwrap()
            .is_clean());
    }
}
