//! Bounded proof search: premises, axioms, one-step modus ponens, propositional
//! entailment by truth tables, and one-point quantifier steps. Incomplete for first-order
//! goals; `None` says nothing about provability.

use std::collections::{BTreeSet, HashMap, HashSet};

use super::build::{prop_atoms, tautology, ProofBuilder};
use super::{
    check_proof, is_eq_axiom, is_prop_axiom, is_quant_axiom, EqSchema, Justification, Proof,
    PropSchema, QuantSchema,
};
use crate::syntax::{Formula, Kind, Term};

/// Truth tables are computed for at most this many atoms.
pub const MAX_TABLE_ATOMS: usize = 12;

/// A premise pool indexed by propositional atoms, with search limits.
pub struct Prover {
    /// Longest proof returned.
    pub max_lines: usize,
    /// Atoms considered when selecting premises for a propositional step.
    pub atom_cap: usize,
    /// Nesting of quantifier steps; 0 restricts search to propositional reasoning.
    pub quantifier_depth: u32,
    premises: Vec<Formula>,
    members: HashSet<Formula>,
    atom_ids: HashMap<Formula, usize>,
    premise_atoms: Vec<Vec<usize>>,
    by_atom: Vec<Vec<usize>>,
    constants: Vec<Term>,
}

fn imp(a: &Formula, b: &Formula) -> Formula {
    Formula::implies(a.clone(), b.clone())
}

/// Truth tables over `n` atoms, one bit per valuation.
struct Table {
    words: usize,
    atoms: HashMap<Formula, usize>,
}

impl Table {
    fn atom(&self, i: usize) -> Vec<u64> {
        (0..self.words)
            .map(|w| {
                let mut bits = 0u64;
                for b in 0..64 {
                    let v = (w * 64 + b) as u64;
                    if (v >> i) & 1 == 1 {
                        bits |= 1 << b;
                    }
                }
                bits
            })
            .collect()
    }

    fn eval(&self, f: &Formula) -> Vec<u64> {
        match f.kind() {
            Kind::Not(a) => self.eval(a).into_iter().map(|x| !x).collect(),
            Kind::Or(a, b) => self
                .eval(a)
                .into_iter()
                .zip(self.eval(b))
                .map(|(x, y)| x | y)
                .collect(),
            _ => self.atom(self.atoms[f]),
        }
    }

    fn mask(&self, n: usize) -> Vec<u64> {
        (0..self.words)
            .map(|w| {
                let valid = (1usize << n).saturating_sub(w * 64).min(64);
                if valid == 64 {
                    u64::MAX
                } else {
                    (1u64 << valid) - 1
                }
            })
            .collect()
    }
}

/// Whether `premises` propositionally entail `goal`, with a smallest-by-greedy subset that
/// still does.
fn entailment(premises: &[Formula], goal: &Formula) -> Option<Vec<usize>> {
    let mut atoms: BTreeSet<Formula> = prop_atoms(goal);
    for p in premises {
        atoms.extend(prop_atoms(p));
    }
    if atoms.len() > MAX_TABLE_ATOMS {
        return None;
    }
    let n = atoms.len();
    let table = Table {
        words: (1usize << n).div_ceil(64),
        atoms: atoms.into_iter().enumerate().map(|(i, a)| (a, i)).collect(),
    };
    let mask = table.mask(n);
    let refuted = table.eval(goal);
    let tables: Vec<Vec<u64>> = premises.iter().map(|p| table.eval(p)).collect();
    let countermodels = |keep: &[bool]| -> bool {
        (0..table.words).any(|w| {
            let mut acc = mask[w] & !refuted[w];
            for (t, _) in tables.iter().zip(keep).filter(|(_, &k)| k) {
                acc &= t[w];
            }
            acc != 0
        })
    };
    let mut keep = vec![true; premises.len()];
    if countermodels(&keep) {
        return None;
    }
    for i in 0..premises.len() {
        keep[i] = false;
        if countermodels(&keep) {
            keep[i] = true;
        }
    }
    Some((0..premises.len()).filter(|&i| keep[i]).collect())
}

fn axiom(f: &Formula) -> Option<Justification> {
    use PropSchema::*;
    for s in [A1, A2, A3, D1, D2] {
        if is_prop_axiom(f, s) {
            return Some(Justification::PropAxiom(s));
        }
    }
    for s in [EqSchema::E1, EqSchema::E2] {
        if is_eq_axiom(f, s) {
            return Some(Justification::EqAxiom(s));
        }
    }
    for s in [QuantSchema::Q1, QuantSchema::Q2, QuantSchema::Q3] {
        if is_quant_axiom(f, s) {
            return Some(Justification::QuantAxiom(s));
        }
    }
    None
}

impl Prover {
    pub fn new(premises: impl IntoIterator<Item = Formula>, budget: u64) -> Prover {
        let premises: Vec<Formula> = premises
            .into_iter()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let mut atom_ids = HashMap::new();
        let mut premise_atoms = Vec::with_capacity(premises.len());
        let mut by_atom: Vec<Vec<usize>> = Vec::new();
        let mut constants = BTreeSet::new();
        for (i, p) in premises.iter().enumerate() {
            let mut ids = Vec::new();
            for a in prop_atoms(p) {
                let next = atom_ids.len();
                let id = *atom_ids.entry(a).or_insert(next);
                if id == by_atom.len() {
                    by_atom.push(Vec::new());
                }
                by_atom[id].push(i);
                ids.push(id);
            }
            premise_atoms.push(ids);
            constants.extend(p.constants());
        }
        Prover {
            max_lines: budget.min(usize::MAX as u64) as usize,
            atom_cap: 8,
            quantifier_depth: 2,
            members: premises.iter().cloned().collect(),
            premises,
            atom_ids,
            premise_atoms,
            by_atom,
            constants: constants.into_iter().map(Term::Const).collect(),
        }
    }

    /// Restricts search to propositional reasoning.
    pub fn propositional(mut self) -> Prover {
        self.quantifier_depth = 0;
        self
    }

    pub fn premises(&self) -> &[Formula] {
        &self.premises
    }

    pub fn prove(&self, goal: &Formula) -> Option<Proof> {
        let proof = self.search(goal, self.quantifier_depth)?;
        let premises: BTreeSet<Formula> = proof.premises();
        assert!(premises.iter().all(|p| self.members.contains(p)));
        if let Err(e) = check_proof(&proof, &premises) {
            panic!("prover produced an invalid proof of {goal}: {e}");
        }
        Some(proof)
    }

    fn search(&self, goal: &Formula, depth: u32) -> Option<Proof> {
        if self.max_lines == 0 {
            return None;
        }
        let mut b = ProofBuilder::new();
        if self.members.contains(goal) {
            let r = b.premise(goal.clone());
            return Some(b.finish(r));
        }
        if let Some(j) = axiom(goal) {
            let r = b.line(goal.clone(), j);
            return Some(b.finish(r));
        }
        if let Some(p) = self.modus_ponens(goal) {
            return Some(p);
        }
        if let Some(p) = self.propositional_step(goal) {
            return Some(p);
        }
        if depth > 0 {
            if let Some(p) = self.quantifier_step(goal, depth - 1) {
                return Some(p);
            }
        }
        None
    }

    fn modus_ponens(&self, goal: &Formula) -> Option<Proof> {
        let first = prop_atoms(goal).into_iter().next()?;
        let &id = self.atom_ids.get(&first)?;
        for &i in &self.by_atom[id] {
            let p = &self.premises[i];
            if let Some((a, c)) = p.as_implication() {
                if c == goal && self.members.contains(a) {
                    let mut b = ProofBuilder::new();
                    let la = b.premise(a.clone());
                    let lp = b.premise(p.clone());
                    let r = b.mp(la, lp);
                    return (b.len() <= self.max_lines).then(|| b.finish(r));
                }
            }
        }
        None
    }

    /// Premises sharing atoms with the goal, grown while the atom set stays within the cap.
    fn relevant(&self, goal: &Formula) -> Vec<Formula> {
        let goal_atoms = prop_atoms(goal);
        let mut atoms: BTreeSet<usize> = BTreeSet::new();
        let mut outside = 0;
        for a in &goal_atoms {
            match self.atom_ids.get(a) {
                Some(&id) => {
                    atoms.insert(id);
                }
                None => outside += 1,
            }
        }
        let mut chosen = BTreeSet::new();
        let mut frontier: Vec<usize> = atoms.iter().copied().collect();
        while let Some(a) = frontier.pop() {
            for &i in &self.by_atom[a] {
                if chosen.contains(&i) {
                    continue;
                }
                let new: Vec<usize> = self.premise_atoms[i]
                    .iter()
                    .copied()
                    .filter(|x| !atoms.contains(x))
                    .collect();
                if atoms.len() + outside + new.len() > self.atom_cap {
                    continue;
                }
                chosen.insert(i);
                for x in new {
                    atoms.insert(x);
                    frontier.push(x);
                }
            }
        }
        let mut out: Vec<Formula> = chosen
            .into_iter()
            .map(|i| self.premises[i].clone())
            .collect();
        // Reflexive equations are axioms; offer them as facts.
        for a in goal_atoms {
            if matches!(a.kind(), Kind::Eq(s, t) if s == t) {
                out.push(a);
            }
        }
        out
    }

    fn propositional_step(&self, goal: &Formula) -> Option<Proof> {
        let pool = self.relevant(goal);
        let used = entailment(&pool, goal)?;
        let used: Vec<&Formula> = used.iter().map(|&i| &pool[i]).collect();
        let chain = used.iter().rev().fold(goal.clone(), |acc, p| imp(p, &acc));
        let taut = tautology(&chain, self.max_lines)?;
        let mut b = ProofBuilder::new();
        let mut line = b.include(&taut);
        for p in used {
            let lp = if self.members.contains(p) {
                b.premise(p.clone())
            } else {
                b.eq_axiom(p.clone(), EqSchema::E1)
            };
            line = b.mp(lp, line);
        }
        (b.len() <= self.max_lines).then(|| b.finish(line))
    }

    fn quantifier_step(&self, goal: &Formula, depth: u32) -> Option<Proof> {
        if let Some((v, body)) = goal.as_forall() {
            let sub = self.search(body, depth)?;
            let mut b = ProofBuilder::new();
            let l = b.include(&sub);
            let r = b.line(goal.clone(), Justification::Gen(l, v.clone()));
            let proof = b.finish(r);
            let ok =
                proof.len() <= self.max_lines && check_proof(&proof, &proof.premises()).is_ok();
            return ok.then_some(proof);
        }
        if let Kind::Exists(v, body) = goal.kind() {
            let mut terms: Vec<Term> = self.constants.clone();
            for c in goal.constants() {
                let t = Term::Const(c);
                if !terms.contains(&t) {
                    terms.push(t);
                }
            }
            terms.extend(goal.free_vars().iter().map(|w| Term::Var(w.clone())));
            for t in terms {
                let instance = body.substitute_one(v, t);
                if let Some(sub) = self.search(&instance, depth) {
                    let mut b = ProofBuilder::new();
                    let l = b.include(&sub);
                    let q1 = b.quant(imp(&instance, goal), QuantSchema::Q1);
                    let r = b.mp(l, q1);
                    if b.len() <= self.max_lines {
                        return Some(b.finish(r));
                    }
                }
            }
        }
        None
    }
}

/// A proof of `goal` from `premises` within `budget` lines, if the search finds one. Every
/// returned proof passes [`check_proof`].
pub fn prove(premises: &BTreeSet<Formula>, goal: &Formula, budget: u64) -> Option<Proof> {
    Prover::new(premises.iter().cloned(), budget).prove(goal)
}

/// [`prove`] with a configured prover.
pub fn prove_with(prover: &Prover, goal: &Formula) -> Option<Proof> {
    prover.prove(goal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval;
    use crate::hfset::stage;
    use crate::syntax::parse;

    fn p(s: &str) -> Formula {
        parse(s).unwrap()
    }

    #[test]
    fn trivial_goals() {
        let a = p("(mem #0 #1)");
        let proof = prove(&BTreeSet::from([a.clone()]), &a, 1).unwrap();
        assert_eq!(proof.len(), 1);
        assert!(prove(&BTreeSet::from([a.clone()]), &a, 0).is_none());
        let excluded = p("(or (mem #0 #1) (not (mem #0 #1)))");
        let proof = prove(&BTreeSet::new(), &excluded, 10_000).unwrap();
        assert_eq!(proof.conclusion(), Some(&excluded));
    }

    #[test]
    fn modus_ponens_gap() {
        let (a, b) = (p("(mem #0 #1)"), p("(not (eq #0 #1))"));
        let premises = BTreeSet::from([a.clone(), imp(&a, &b)]);
        let proof = prove(&premises, &b, 100).unwrap();
        assert_eq!(proof.len(), 3);
    }

    #[test]
    fn quantifier_steps() {
        let premises = BTreeSet::from([p("(mem #0 #1)")]);
        let goal = p("(ex x (mem x #1))");
        let proof = prove(&premises, &goal, 1000).unwrap();
        assert_eq!(proof.conclusion(), Some(&goal));
        let goal = p("(all x (eq x x))");
        assert!(prove(&BTreeSet::new(), &goal, 1000).is_some());
        let goal = p("(all x (or (mem x #1) (not (mem x #1))))");
        assert!(prove(&BTreeSet::new(), &goal, 10_000).is_some());
    }

    #[test]
    fn falsehoods_are_not_proved() {
        for goal in ["(ex x (mem x x))", "(mem #1 #0)", "(not (eq #0 #0))"] {
            assert!(
                prove(&BTreeSet::new(), &p(goal), 10_000).is_none(),
                "{goal}"
            );
        }
    }

    #[test]
    fn returned_proofs_are_true_in_the_model() {
        let m = stage(3).unwrap();
        let premises: BTreeSet<Formula> =
            ["(mem #0 #1)", "(imp (mem #0 #1) (mem #1 #2))", "(eq #3 #3)"]
                .iter()
                .map(|s| p(s))
                .collect();
        let prover = Prover::new(premises.iter().cloned(), 10_000);
        for goal in [
            "(mem #1 #2)",
            "(and (mem #0 #1) (mem #1 #2))",
            "(ex x (mem #0 x))",
            "(or (mem #2 #0) (mem #1 #2))",
            "(not (not (mem #1 #2)))",
        ] {
            let goal = p(goal);
            let proof = prover.prove(&goal).unwrap_or_else(|| panic!("{goal}"));
            assert!(proof.premises().iter().all(|q| eval::holds(&m, q).unwrap()));
            assert!(eval::holds(&m, &goal).unwrap());
        }
    }
}
