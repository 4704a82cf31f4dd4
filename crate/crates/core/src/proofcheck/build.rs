//! Proof construction: a line builder, the deduction theorem, and propositional
//! completeness in the Kalmár style.

use std::collections::{BTreeSet, HashMap};

use super::{
    is_prop_axiom, is_quant_axiom, EqSchema, Justification, Line, Proof, ProofError, PropSchema,
    QuantSchema,
};
use crate::syntax::{Formula, Kind};

fn imp(a: &Formula, b: &Formula) -> Formula {
    Formula::implies(a.clone(), b.clone())
}

fn not(a: &Formula) -> Formula {
    Formula::not(a.clone())
}

/// Appends lines, reusing an earlier line when the same formula is already derived.
#[derive(Default)]
pub struct ProofBuilder {
    lines: Vec<Line>,
    index: HashMap<Formula, usize>,
}

impl ProofBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn formula(&self, line: usize) -> &Formula {
        &self.lines[line - 1].formula
    }

    pub fn find(&self, f: &Formula) -> Option<usize> {
        self.index.get(f).copied()
    }

    pub fn line(&mut self, formula: Formula, justification: Justification) -> usize {
        if let Some(&n) = self.index.get(&formula) {
            return n;
        }
        self.lines.push(Line {
            formula: formula.clone(),
            justification,
        });
        let n = self.lines.len();
        self.index.insert(formula, n);
        n
    }

    pub fn premise(&mut self, f: Formula) -> usize {
        self.line(f, Justification::Premise)
    }

    pub fn prop(&mut self, f: Formula, schema: PropSchema) -> usize {
        debug_assert!(is_prop_axiom(&f, schema), "{f} is not {schema:?}");
        self.line(f, Justification::PropAxiom(schema))
    }

    pub fn eq_axiom(&mut self, f: Formula, schema: EqSchema) -> usize {
        self.line(f, Justification::EqAxiom(schema))
    }

    pub fn quant(&mut self, f: Formula, schema: QuantSchema) -> usize {
        debug_assert!(is_quant_axiom(&f, schema), "{f} is not {schema:?}");
        self.line(f, Justification::QuantAxiom(schema))
    }

    /// Modus ponens from `a` and `a → b`, returning the line of `b`.
    pub fn mp(&mut self, a: usize, ab: usize) -> usize {
        let (ante, cons) = self
            .formula(ab)
            .as_implication()
            .expect("modus ponens needs an implication");
        debug_assert_eq!(ante, self.formula(a));
        let cons = cons.clone();
        self.line(cons, Justification::Mp(a, ab))
    }

    /// From `x`, derives `a → x`.
    pub fn weaken(&mut self, x: usize, a: &Formula) -> usize {
        let fx = self.formula(x).clone();
        let ax = self.prop(imp(&fx, &imp(a, &fx)), PropSchema::A1);
        self.mp(x, ax)
    }

    /// Copies a proof in, returning the line of its conclusion.
    pub fn include(&mut self, p: &Proof) -> usize {
        let mut map = Vec::with_capacity(p.lines.len());
        for l in &p.lines {
            let j = match &l.justification {
                Justification::Mp(a, b) => Justification::Mp(map[a - 1], map[b - 1]),
                Justification::Gen(a, v) => Justification::Gen(map[a - 1], v.clone()),
                other => other.clone(),
            };
            map.push(self.line(l.formula.clone(), j));
        }
        *map.last().expect("included proofs are nonempty")
    }

    /// Includes a closed lemma `a1 → (a2 → … → c)` and discharges its antecedents with
    /// the given lines.
    pub fn apply(&mut self, lemma: &Proof, args: &[usize]) -> usize {
        args.iter()
            .fold(self.include(lemma), |acc, &a| self.mp(a, acc))
    }

    /// The proof ending at `target`. Later lines cannot be cited by earlier ones, so they
    /// are dropped.
    pub fn finish(mut self, target: usize) -> Proof {
        self.lines.truncate(target);
        Proof { lines: self.lines }
    }
}

/// `⊢ B → B`.
pub fn identity(b: &Formula) -> Proof {
    let mut p = ProofBuilder::new();
    let bb = imp(b, b);
    let l1 = p.prop(imp(b, &imp(&bb, b)), PropSchema::A1);
    let l2 = p.prop(
        imp(&imp(b, &imp(&bb, b)), &imp(&imp(b, &bb), &bb)),
        PropSchema::A2,
    );
    let l3 = p.mp(l1, l2);
    let l4 = p.prop(imp(b, &bb), PropSchema::A1);
    let r = p.mp(l4, l3);
    p.finish(r)
}

/// Turns a proof of `C` from premises including `hyp` into a proof of `hyp → C` from the
/// remaining premises. Lines that do not depend on `hyp` are copied unchanged.
pub fn discharge(p: &Proof, hyp: &Formula) -> Result<Proof, ProofError> {
    let mut b = ProofBuilder::new();
    // For each original line: the new line of its formula (independent of `hyp`), or of
    // `hyp → formula`.
    let mut plain: Vec<Option<usize>> = Vec::with_capacity(p.len());
    let mut cond: Vec<Option<usize>> = Vec::with_capacity(p.len());
    let conditional =
        |b: &mut ProofBuilder, plain: &[Option<usize>], cond: &mut [Option<usize>], i: usize| {
            if let Some(c) = cond[i] {
                return c;
            }
            let c = b.weaken(plain[i].expect("line is derived"), hyp);
            cond[i] = Some(c);
            c
        };
    for (k, line) in p.lines.iter().enumerate() {
        let f = &line.formula;
        let (pl, co) = match &line.justification {
            Justification::Premise if f == hyp => (None, Some(b.include(&identity(hyp)))),
            Justification::Mp(i, j) if plain[i - 1].is_some() && plain[j - 1].is_some() => {
                let (i, j) = (plain[i - 1].unwrap(), plain[j - 1].unwrap());
                (Some(b.line(f.clone(), Justification::Mp(i, j))), None)
            }
            Justification::Mp(i, j) => {
                let ci = conditional(&mut b, &plain, &mut cond, i - 1);
                let cj = conditional(&mut b, &plain, &mut cond, j - 1);
                let a = &p.lines[i - 1].formula;
                let a2 = b.prop(
                    imp(&imp(hyp, &imp(a, f)), &imp(&imp(hyp, a), &imp(hyp, f))),
                    PropSchema::A2,
                );
                let m = b.mp(cj, a2);
                (None, Some(b.mp(ci, m)))
            }
            Justification::Gen(i, v) => match plain[i - 1] {
                Some(pi) => (
                    Some(b.line(f.clone(), Justification::Gen(pi, v.clone()))),
                    None,
                ),
                None => {
                    if hyp.has_free(v) {
                        return Err(ProofError {
                            line: k + 1,
                            message: format!("cannot discharge {hyp}: {v} is generalized"),
                        });
                    }
                    let a = &p.lines[i - 1].formula;
                    let g = b.line(
                        Formula::forall(v.clone(), imp(hyp, a)),
                        Justification::Gen(cond[i - 1].unwrap(), v.clone()),
                    );
                    let q3 = b.quant(
                        imp(
                            &Formula::forall(v.clone(), imp(hyp, a)),
                            &imp(hyp, &Formula::forall(v.clone(), a.clone())),
                        ),
                        QuantSchema::Q3,
                    );
                    (None, Some(b.mp(g, q3)))
                }
            },
            other => (Some(b.line(f.clone(), other.clone())), None),
        };
        plain.push(pl);
        cond.push(co);
    }
    let last = p.len().checked_sub(1).ok_or(ProofError {
        line: 0,
        message: "empty proof".into(),
    })?;
    let target = conditional(&mut b, &plain, &mut cond, last);
    Ok(b.finish(target))
}

fn closed(p: ProofBuilder, target: usize, hyps: &[&Formula]) -> Proof {
    let mut proof = p.finish(target);
    for h in hyps {
        proof = discharge(&proof, h).expect("propositional lemmas have no generalization");
    }
    proof
}

/// `⊢ ¬¬B → B`.
pub fn double_negation_elim(b: &Formula) -> Proof {
    let (nb, nnb) = (not(b), not(&not(b)));
    let mut p = ProofBuilder::new();
    let h = p.premise(nnb.clone());
    let w = p.weaken(h, &nb);
    let id = p.include(&identity(&nb));
    let a3 = p.prop(
        imp(&imp(&nb, &nnb), &imp(&imp(&nb, &nb), b)),
        PropSchema::A3,
    );
    let m = p.mp(w, a3);
    let r = p.mp(id, m);
    closed(p, r, &[&nnb])
}

/// `⊢ B → ¬¬B`.
pub fn double_negation_intro(b: &Formula) -> Proof {
    let nnb = not(&not(b));
    let nnnb = not(&nnb);
    let mut p = ProofBuilder::new();
    let h = p.premise(b.clone());
    let l1 = p.include(&double_negation_elim(&not(b)));
    let l2 = p.weaken(h, &nnnb);
    let a3 = p.prop(
        imp(&imp(&nnnb, &not(b)), &imp(&imp(&nnnb, b), &nnb)),
        PropSchema::A3,
    );
    let m = p.mp(l1, a3);
    let r = p.mp(l2, m);
    closed(p, r, &[b])
}

fn contraposition_core(
    p: &mut ProofBuilder,
    b: &Formula,
    c: &Formula,
    nc_nb: usize,
    nc_b: usize,
) -> usize {
    let nc = not(c);
    let a3 = p.prop(
        imp(&imp(&nc, &not(b)), &imp(&imp(&nc, b), c)),
        PropSchema::A3,
    );
    let m = p.mp(nc_nb, a3);
    p.mp(nc_b, m)
}

/// `⊢ ¬B → (B → C)`.
pub fn explosion(b: &Formula, c: &Formula) -> Proof {
    let nb = not(b);
    let mut p = ProofBuilder::new();
    let h1 = p.premise(nb.clone());
    let h2 = p.premise(b.clone());
    let l1 = p.weaken(h1, &not(c));
    let l2 = p.weaken(h2, &not(c));
    let r = contraposition_core(&mut p, b, c, l1, l2);
    closed(p, r, &[b, &nb])
}

/// `⊢ (¬C → ¬B) → (B → C)`.
pub fn contraposition(b: &Formula, c: &Formula) -> Proof {
    let h = imp(&not(c), &not(b));
    let mut p = ProofBuilder::new();
    let h1 = p.premise(h.clone());
    let h2 = p.premise(b.clone());
    let l2 = p.weaken(h2, &not(c));
    let r = contraposition_core(&mut p, b, c, h1, l2);
    closed(p, r, &[b, &h])
}

/// `⊢ (B → C) → (¬C → ¬B)`.
pub fn contrapositive(b: &Formula, c: &Formula) -> Proof {
    let h = imp(b, c);
    let nnb = not(&not(b));
    let mut inner = ProofBuilder::new();
    let hh = inner.premise(h.clone());
    let n = inner.premise(nnb.clone());
    let lb = inner.apply(&double_negation_elim(b), &[n]);
    let lc = inner.mp(lb, hh);
    let r = inner.apply(&double_negation_intro(c), &[lc]);
    let inner = closed(inner, r, &[&nnb]);
    let mut p = ProofBuilder::new();
    let l = p.include(&inner);
    let r = p.apply(&contraposition(&not(c), &not(b)), &[l]);
    closed(p, r, &[&h])
}

/// `⊢ B → (¬C → ¬(B → C))`.
pub fn negated_implication(b: &Formula, c: &Formula) -> Proof {
    let bc = imp(b, c);
    let mut inner = ProofBuilder::new();
    let hb = inner.premise(b.clone());
    let hbc = inner.premise(bc.clone());
    let r = inner.mp(hb, hbc);
    let inner = closed(inner, r, &[&bc]);
    let mut p = ProofBuilder::new();
    let l = p.include(&inner);
    let r = p.apply(&contrapositive(&bc, c), &[l]);
    closed(p, r, &[b])
}

/// `⊢ (B → C) → ((¬B → C) → C)`.
pub fn cases(b: &Formula, c: &Formula) -> Proof {
    let (h1, h2) = (imp(b, c), imp(&not(b), c));
    let mut p = ProofBuilder::new();
    let l1 = p.premise(h1.clone());
    let l2 = p.premise(h2.clone());
    let nc_nb = p.apply(&contrapositive(b, c), &[l1]);
    let nc_nnb = p.apply(&contrapositive(&not(b), c), &[l2]);
    let r = contraposition_core(&mut p, &not(b), c, nc_nnb, nc_nb);
    closed(p, r, &[&h2, &h1])
}

/// Propositional atoms: maximal subformulas whose main connective is not `¬` or `∨`.
pub fn prop_atoms(f: &Formula) -> BTreeSet<Formula> {
    fn go(f: &Formula, out: &mut BTreeSet<Formula>) {
        match f.kind() {
            Kind::Not(a) => go(a, out),
            Kind::Or(a, b) => {
                go(a, out);
                go(b, out);
            }
            _ => {
                out.insert(f.clone());
            }
        }
    }
    let mut out = BTreeSet::new();
    go(f, &mut out);
    out
}

/// Truth value under a partial valuation of the atoms, if determined.
pub fn prop_value(f: &Formula, val: &HashMap<Formula, bool>) -> Option<bool> {
    match f.kind() {
        Kind::Not(a) => prop_value(a, val).map(|v| !v),
        Kind::Or(a, b) => match (prop_value(a, val), prop_value(b, val)) {
            (Some(true), _) | (_, Some(true)) => Some(true),
            (Some(false), Some(false)) => Some(false),
            _ => None,
        },
        _ => val.get(f).copied(),
    }
}

/// Derives `f` or `¬f`, whichever the valuation makes true, from the literals of the atoms
/// it needs. The value of `f` must be determined.
fn kalmar(
    b: &mut ProofBuilder,
    f: &Formula,
    val: &HashMap<Formula, bool>,
    memo: &mut HashMap<Formula, usize>,
) -> usize {
    if let Some(&l) = memo.get(f) {
        return l;
    }
    let known = |g: &Formula| prop_value(g, val);
    let line = match f.kind() {
        Kind::Not(a) => {
            let la = kalmar(b, a, val, memo);
            if known(a) == Some(true) {
                b.apply(&double_negation_intro(a), &[la])
            } else {
                la
            }
        }
        Kind::Or(a, c) => {
            let na = not(a);
            let d1 = b.prop(imp(&imp(&na, c), f), PropSchema::D1);
            if known(c) == Some(true) {
                let lc = kalmar(b, c, val, memo);
                let w = b.weaken(lc, &na);
                b.mp(w, d1)
            } else if known(a) == Some(true) {
                let la = kalmar(b, a, val, memo);
                let nn = b.apply(&double_negation_intro(a), &[la]);
                let w = b.apply(&explosion(&na, c), &[nn]);
                b.mp(w, d1)
            } else {
                let la = kalmar(b, a, val, memo);
                let lc = kalmar(b, c, val, memo);
                let not_imp = b.apply(&negated_implication(&na, c), &[la, lc]);
                let d2 = b.prop(imp(f, &imp(&na, c)), PropSchema::D2);
                b.apply(&contrapositive(f, &imp(&na, c)), &[d2, not_imp])
            }
        }
        _ => match val[f] {
            true => b.premise(f.clone()),
            false => b.premise(not(f)),
        },
    };
    memo.insert(f.clone(), line);
    line
}

/// A proof of the tautology `f` from no premises, splitting on atoms in order. Gives up once
/// an intermediate proof exceeds `max_lines`.
pub fn tautology(f: &Formula, max_lines: usize) -> Option<Proof> {
    let atoms: Vec<Formula> = prop_atoms(f).into_iter().collect();
    fn go(
        f: &Formula,
        atoms: &[Formula],
        val: &mut HashMap<Formula, bool>,
        max_lines: usize,
    ) -> Option<Proof> {
        match prop_value(f, val) {
            Some(true) => {
                let mut b = ProofBuilder::new();
                let r = kalmar(&mut b, f, val, &mut HashMap::new());
                Some(b.finish(r))
            }
            Some(false) => None,
            None => {
                let (p, rest) = atoms.split_first()?;
                val.insert(p.clone(), true);
                let yes = go(f, rest, val, max_lines);
                val.insert(p.clone(), false);
                let no = go(f, rest, val, max_lines);
                val.remove(p);
                let (yes, no) = (discharge(&yes?, p).ok()?, discharge(&no?, &not(p)).ok()?);
                let mut b = ProofBuilder::new();
                let ly = b.include(&yes);
                let ln = b.include(&no);
                let r = b.apply(&cases(p, f), &[ly, ln]);
                (b.len() <= max_lines).then(|| b.finish(r))
            }
        }
    }
    go(f, &atoms, &mut HashMap::new(), max_lines)
}
