//! Axiom-scheme instances, the `Δ0^fin` translation, reflection instances with a provability
//! placeholder, and checkers for internal schemes and truth-class correctness properties.

mod check;
mod ground;
mod sweep;
mod theory;

pub use check::{check_internal, check_truth_property, TruthProperty};
pub use ground::{check_grounded, Grounding};
pub use sweep::{scheme_sweep, Extensions};
pub use theory::{parse_theory, write_theory, Theory, TheoryEntry};

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::eval::Interpretation;
use crate::hfset::{Elem, HfSet};
use crate::syntax::{big_or, fresh_var, Formula, Kind, Term, Var};

/// Name of the provability placeholder predicate in reflection instances.
pub const PROV: &str = "Prov*";

/// Name of the finiteness predicate emitted by [`delta0fin`].
pub const FIN: &str = "Fin";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeTag {
    Sep,
    Coll,
    Repl,
    Ind,
    Found,
    Ref,
    Con,
    IntSep,
    IntColl,
    IntRepl,
    IntInd,
}

impl SchemeTag {
    pub const ALL: [SchemeTag; 11] = [
        SchemeTag::Sep,
        SchemeTag::Coll,
        SchemeTag::Repl,
        SchemeTag::Ind,
        SchemeTag::Found,
        SchemeTag::Ref,
        SchemeTag::Con,
        SchemeTag::IntSep,
        SchemeTag::IntColl,
        SchemeTag::IntRepl,
        SchemeTag::IntInd,
    ];

    /// The scheme an internal tag speaks about; other tags map to themselves.
    pub fn base(self) -> SchemeTag {
        match self {
            SchemeTag::IntSep => SchemeTag::Sep,
            SchemeTag::IntColl => SchemeTag::Coll,
            SchemeTag::IntRepl => SchemeTag::Repl,
            SchemeTag::IntInd => SchemeTag::Ind,
            t => t,
        }
    }

    /// Variables a template may have free.
    pub fn template_vars(self) -> Vec<Var> {
        let names: &[&str] = match self.base() {
            SchemeTag::Coll | SchemeTag::Repl => &["v", "x", "y"],
            SchemeTag::Ref | SchemeTag::Con => &["x"],
            _ => &["v", "x"],
        };
        names.iter().map(|n| Var::new(n)).collect()
    }
}

impl fmt::Display for SchemeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SchemeTag::Sep => "Sep",
            SchemeTag::Coll => "Coll",
            SchemeTag::Repl => "Repl",
            SchemeTag::Ind => "Ind",
            SchemeTag::Found => "Found",
            SchemeTag::Ref => "REF",
            SchemeTag::Con => "CON",
            SchemeTag::IntSep => "IntSep",
            SchemeTag::IntColl => "IntColl",
            SchemeTag::IntRepl => "IntRepl",
            SchemeTag::IntInd => "IntInd",
        };
        f.write_str(s)
    }
}

impl FromStr for SchemeTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<SchemeTag> {
        SchemeTag::ALL
            .into_iter()
            .find(|t| t.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Invalid(format!("unknown scheme `{s}`")))
    }
}

/// Where a reflection instance's provability placeholder points: the base theory, the
/// partial truth index and the iteration depth.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RefMeta {
    pub base: String,
    pub n: u32,
    pub iter: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemeInstance {
    pub tag: SchemeTag,
    pub template: Formula,
    pub sentence: Formula,
    pub meta: Option<RefMeta>,
}

/// Hands out variable names that avoid a growing set.
struct Names(BTreeSet<Var>);

impl Names {
    fn avoiding(f: &Formula) -> Names {
        let mut avoid = f.all_vars();
        avoid.extend(["v", "x", "y"].map(Var::new));
        Names(avoid)
    }

    fn fresh(&mut self, base: &str) -> Var {
        let v = fresh_var(base, &self.0);
        self.0.insert(v.clone());
        v
    }
}

fn check_arity(tag: SchemeTag, f: &Formula) -> Result<()> {
    let allowed = tag.template_vars();
    match f.free_vars().iter().find(|v| !allowed.contains(v)) {
        Some(v) => Err(Error::Arity(format!(
            "{tag} templates may use {:?} free, found {v}",
            allowed.iter().map(Var::name).collect::<Vec<_>>()
        ))),
        None => Ok(()),
    }
}

fn empty(z: &Var, names: &mut Names) -> Formula {
    let w = names.fresh("w");
    Formula::not(Formula::exists(w.clone(), Formula::mem(&w, z)))
}

fn transitive(u: &Var, names: &mut Names) -> Formula {
    let (p, q) = (names.fresh("p"), names.fresh("q"));
    Formula::forall_in(
        p.clone(),
        u,
        Formula::forall_in(q.clone(), &p, Formula::mem(&q, u)),
    )
}

/// `u` is a natural number: a transitive set of transitive sets. In a well-founded finite
/// structure these are exactly the von Neumann numerals present.
pub fn natural_number(u: &Var) -> Formula {
    let mut names = Names(BTreeSet::from([u.clone()]));
    nat(u, &mut names)
}

fn nat(u: &Var, names: &mut Names) -> Formula {
    let w = names.fresh("w");
    let outer = transitive(u, names);
    let inner = transitive(&w, names);
    Formula::and(outer, Formula::forall_in(w, u, inner))
}

/// `s = x ∪ {x}`.
fn successor(x: &Var, s: &Var, names: &mut Names) -> Formula {
    let (w1, w2) = (names.fresh("w"), names.fresh("w"));
    Formula::and(
        Formula::mem(x, s),
        Formula::and(
            Formula::forall_in(w1.clone(), x, Formula::mem(&w1, s)),
            Formula::forall_in(
                w2.clone(),
                s,
                Formula::or(Formula::mem(&w2, x), Formula::equals(&w2, x)),
            ),
        ),
    )
}

/// The scheme instance for template `f`. Internal tags produce the instance of their base
/// scheme. Induction is rendered over the natural numbers present: `∀x∈ω` reads
/// `∀x (Nat(x) → …)` and `φ(v, x+1)` reads `∀s (s = x∪{x} → φ(v, s))`.
pub fn gen_scheme(tag: SchemeTag, f: &Formula) -> Result<SchemeInstance> {
    if matches!(tag, SchemeTag::Ref | SchemeTag::Con) {
        return Err(Error::Invalid(format!("{tag} instances come from gen_ref")));
    }
    check_arity(tag, f)?;
    let (v, x, y) = (Var::new("v"), Var::new("x"), Var::new("y"));
    let mut names = Names::avoiding(f);
    let body = match tag.base() {
        SchemeTag::Sep => {
            let (a, b) = (names.fresh("a"), names.fresh("b"));
            Formula::forall(
                a.clone(),
                Formula::exists(
                    b.clone(),
                    Formula::forall(
                        x.clone(),
                        Formula::iff(
                            Formula::mem(&x, &b),
                            Formula::and(Formula::mem(&x, &a), f.clone()),
                        ),
                    ),
                ),
            )
        }
        SchemeTag::Repl => {
            let (a, b, y2) = (names.fresh("a"), names.fresh("b"), names.fresh("y"));
            let unique = Formula::exists(
                y.clone(),
                Formula::and(
                    f.clone(),
                    Formula::forall(
                        y2.clone(),
                        Formula::implies(f.substitute_one(&y, &y2), Formula::equals(&y2, &y)),
                    ),
                ),
            );
            let image = Formula::exists(
                b.clone(),
                Formula::forall(
                    y.clone(),
                    Formula::iff(
                        Formula::mem(&y, &b),
                        Formula::exists_in(x.clone(), &a, f.clone()),
                    ),
                ),
            );
            Formula::forall(
                a.clone(),
                Formula::implies(Formula::forall_in(x.clone(), &a, unique), image),
            )
        }
        SchemeTag::Coll => {
            let (a, b) = (names.fresh("a"), names.fresh("b"));
            let total = Formula::forall_in(x.clone(), &a, Formula::exists(y.clone(), f.clone()));
            let bounded = Formula::exists(
                b.clone(),
                Formula::forall_in(x.clone(), &a, Formula::exists_in(y.clone(), &b, f.clone())),
            );
            Formula::forall(a, Formula::implies(total, bounded))
        }
        SchemeTag::Found => {
            let z = names.fresh("y");
            Formula::implies(
                Formula::exists(x.clone(), f.clone()),
                Formula::exists(
                    x.clone(),
                    Formula::and(
                        f.clone(),
                        Formula::forall_in(z.clone(), &x, Formula::not(f.substitute_one(&x, &z))),
                    ),
                ),
            )
        }
        SchemeTag::Ind => {
            let (z, s) = (names.fresh("z"), names.fresh("s"));
            let zero = Formula::exists(
                z.clone(),
                Formula::and(empty(&z, &mut names), f.substitute_one(&x, &z)),
            );
            let next = Formula::forall(
                s.clone(),
                Formula::implies(successor(&x, &s, &mut names), f.substitute_one(&x, &s)),
            );
            let step = Formula::forall(
                x.clone(),
                Formula::implies(nat(&x, &mut names), Formula::implies(f.clone(), next)),
            );
            let all = Formula::forall(x.clone(), Formula::implies(nat(&x, &mut names), f.clone()));
            Formula::implies(Formula::and(zero, step), all)
        }
        _ => unreachable!("reflection tags were rejected"),
    };
    Ok(SchemeInstance {
        tag,
        template: f.clone(),
        sentence: Formula::forall(v, body),
        meta: None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RefKind {
    Ref,
    Con,
}

/// `REF: ∀x [Prov*(φ(ẋ)) → φ(x)]` or `CON: ∀x [φ(x) → ¬Prov*(¬φ(ẋ))]` for unary `φ`.
/// The placeholder quotes a formula with `x` free, so under an assignment it quotes the
/// closed instance.
pub fn gen_ref(
    base: &str,
    n: u32,
    f: &Formula,
    kind: RefKind,
    iter: u32,
) -> Result<SchemeInstance> {
    if n == 0 || iter == 0 {
        return Err(Error::Invalid(
            "reflection needs n >= 1 and iter >= 1".into(),
        ));
    }
    let [x] = f.free_vars() else {
        return Err(Error::Arity(format!(
            "reflection needs a unary formula, found {} free variables",
            f.free_vars().len()
        )));
    };
    let (tag, body) = match kind {
        RefKind::Ref => (
            SchemeTag::Ref,
            Formula::implies(Formula::prov(PROV, f.clone()), f.clone()),
        ),
        RefKind::Con => (
            SchemeTag::Con,
            Formula::implies(
                f.clone(),
                Formula::not(Formula::prov(PROV, Formula::not(f.clone()))),
            ),
        ),
    };
    Ok(SchemeInstance {
        tag,
        template: f.clone(),
        sentence: Formula::forall(x.clone(), body),
        meta: Some(RefMeta {
            base: base.to_string(),
            n,
            iter,
        }),
    })
}

/// The translation `δ ↦ δ*`: atoms fixed, `¬` and `∨` homomorphic, and
/// `(∃x∈y δ)* = ∃x∈y (Fin(y) ∧ δ*)`.
pub fn delta0fin(d: &Formula) -> Result<Formula> {
    if !d.is_delta0() {
        return Err(Error::NotDelta0(d.render()));
    }
    fn go(d: &Formula) -> Formula {
        match d.kind() {
            Kind::Mem(..) | Kind::Eq(..) | Kind::Pred(..) | Kind::Prov(..) => d.clone(),
            Kind::Not(a) => Formula::not(go(a)),
            Kind::Or(a, b) => Formula::or(go(a), go(b)),
            Kind::Exists(..) => {
                let (v, w, rest) = d.as_bounded_exists().expect("Δ0 was checked");
                // The body is `¬rest`.
                let body = match rest.kind() {
                    Kind::Not(inner) => go(inner),
                    _ => Formula::not(go(rest)),
                };
                Formula::exists_in(
                    v.clone(),
                    w.clone(),
                    Formula::and(Formula::pred(FIN, w.clone()), body),
                )
            }
        }
    }
    Ok(go(d))
}

/// Interprets one unary predicate as a subset of the structure, and `Fin` as everything.
pub struct SubsetPredicate {
    pub name: String,
    pub members: HashSet<Elem>,
}

impl Interpretation for SubsetPredicate {
    fn pred(&self, name: &str, e: Elem) -> Option<bool> {
        if name == self.name {
            Some(self.members.contains(&e))
        } else {
            (name == FIN).then_some(true)
        }
    }
}

/// Left-nested conjunction.
pub fn big_and(fs: &[Formula]) -> Result<Formula> {
    let (first, rest) = fs.split_first().ok_or(Error::EmptySequence)?;
    Ok(rest
        .iter()
        .fold(first.clone(), |acc, f| Formula::and(acc, f.clone())))
}

/// `ψ0 = ¬φ0` and `ψi = ¬φi → ⋁_{j<i} ¬φj`.
pub fn psi_seq(fs: &[Formula]) -> Result<Vec<Formula>> {
    if fs.is_empty() {
        return Err(Error::EmptySequence);
    }
    let negs: Vec<Formula> = fs.iter().map(|f| Formula::not(f.clone())).collect();
    let mut out = vec![negs[0].clone()];
    for i in 1..fs.len() {
        out.push(Formula::implies(negs[i].clone(), big_or(&negs[..i])?));
    }
    Ok(out)
}

/// The variable of [`theta_s`].
pub fn theta_var() -> Var {
    Var::new("x")
}

/// `θ_s(x) = ⋁_{i<k} (x = i ∧ s_i)` with von Neumann numerals as constants.
pub fn theta_s(s: &[Formula]) -> Result<Formula> {
    let x = theta_var();
    let disjuncts: Vec<Formula> = s
        .iter()
        .enumerate()
        .map(|(i, si)| {
            Formula::and(
                Formula::equals(&x, Term::Const(HfSet::numeral(i))),
                si.clone(),
            )
        })
        .collect();
    big_or(&disjuncts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{self, Assignment, Evaluator};
    use crate::hfset::{stage, FinStructure};
    use crate::syntax::{enumerate, parse};

    fn p(s: &str) -> Formula {
        parse(s).unwrap()
    }

    #[test]
    fn sep_shape() {
        let f = p("(mem x v)");
        let s = gen_scheme(SchemeTag::Sep, &f).unwrap().sentence;
        let expected =
            p("(all v (all a (ex b (all x (iff (mem x b) (and (mem x a) (mem x v)))))))");
        assert_eq!(s, expected);
        assert!(s.is_sentence());
    }

    #[test]
    fn coll_and_found_shapes() {
        let f = p("(mem x y)");
        let s = gen_scheme(SchemeTag::Coll, &f).unwrap().sentence;
        let expected = p(
            "(all v (all a (imp (all x (imp (mem x a) (ex y (mem x y)))) (ex b (all x (imp (mem x a) (ex y (and (mem y b) (mem x y)))))))))",
        );
        // forall_in and exists_in sugar may differ from imp/and spelled out; compare semantics.
        let m = stage(3).unwrap();
        assert_eq!(
            eval::holds(&m, &s).unwrap(),
            eval::holds(&m, &expected).unwrap()
        );
        let found = gen_scheme(SchemeTag::Found, &p("(mem v x)"))
            .unwrap()
            .sentence;
        assert!(found.is_sentence());
        assert!(eval::holds(&m, &found).unwrap());
    }

    #[test]
    fn arity_and_fresh_names() {
        assert!(matches!(
            gen_scheme(SchemeTag::Sep, &p("(mem x z)")),
            Err(Error::Arity(_))
        ));
        assert!(gen_scheme(SchemeTag::Coll, &p("(mem x y)")).is_ok());
        assert!(gen_scheme(SchemeTag::Ref, &p("(mem x x)")).is_err());
        let f = p("(ex a (ex b (mem a b)))");
        let s = gen_scheme(SchemeTag::Sep, &f).unwrap().sentence;
        assert!(s.is_sentence());
        assert!(s.all_vars().contains(&Var::new("a1")));
    }

    #[test]
    fn induction_over_numerals() {
        let m = stage(4).unwrap();
        let s = gen_scheme(SchemeTag::Ind, &p("(eq x x)")).unwrap().sentence;
        assert!(eval::holds(&m, &s).unwrap());
        // Only the numerals 0..3 live in stage 4; `x ∈ #2 ∨ ¬…` style templates still hold.
        for f in ["(mem x v)", "(not (mem v x))", "(ex y (mem y x))"] {
            let s = gen_scheme(SchemeTag::Ind, &p(f)).unwrap().sentence;
            assert!(eval::holds(&m, &s).unwrap(), "{f}");
        }
        let nat = natural_number(&Var::new("u"));
        for e in m.elements() {
            let a: Assignment = [(Var::new("u"), e)].into();
            assert_eq!(
                eval::sat(&m, &nat, &a).unwrap(),
                m.constant(e).as_numeral().is_some()
            );
        }
    }

    #[test]
    fn ref_and_con_shapes() {
        let f = p("(mem x #1)");
        let r = gen_ref("ZF", 1, &f, RefKind::Ref, 1).unwrap();
        assert_eq!(
            r.sentence,
            p("(all x (imp (prov Prov* (mem x #1)) (mem x #1)))")
        );
        let c = gen_ref("ZF", 1, &f, RefKind::Con, 1).unwrap();
        assert_eq!(
            c.sentence,
            p("(all x (imp (mem x #1) (not (prov Prov* (not (mem x #1))))))")
        );
        assert_eq!(gen_ref("ZF", 1, &f, RefKind::Ref, 1).unwrap(), r);
        assert!(matches!(
            gen_ref("ZF", 1, &p("(mem x y)"), RefKind::Ref, 1),
            Err(Error::Arity(_))
        ));
    }

    #[test]
    fn delta0fin_clauses() {
        assert_eq!(delta0fin(&p("(pred P x)")).unwrap(), p("(pred P x)"));
        let (x, y) = (Var::new("x"), Var::new("y"));
        let bounded = Formula::exists_in(x.clone(), &y, p("(mem x x)"));
        assert_eq!(
            delta0fin(&bounded).unwrap(),
            Formula::exists_in(x, &y, Formula::and(p("(pred Fin y)"), p("(mem x x)")))
        );
        let d = p("(or (not (mem x y)) (eq x y))");
        assert_eq!(delta0fin(&d).unwrap(), d);
        assert!(matches!(
            delta0fin(&p("(ex x (mem x y))")),
            Err(Error::NotDelta0(_))
        ));
    }

    #[test]
    fn delta0fin_is_faithful_in_stage_two() {
        let m = stage(2).unwrap();
        let vars = [Var::new("x"), Var::new("y")];
        for members in [HashSet::new(), HashSet::from([0]), HashSet::from([0, 1])] {
            let interp = SubsetPredicate {
                name: "P".into(),
                members,
            };
            let ev = Evaluator::new(&m).interpretation(&interp);
            for d in enumerate::delta0_layers(&vars, &["P"], 2).concat() {
                let star = delta0fin(&d).unwrap();
                for a in enumerate::assignments(d.free_vars(), &[0, 1]) {
                    assert_eq!(ev.sat(&d, &a).unwrap(), ev.sat(&star, &a).unwrap(), "{d}");
                }
            }
        }
    }

    #[test]
    fn sequences() {
        let (a, b) = (p("(mem #0 #1)"), p("(eq #0 #1)"));
        assert_eq!(
            psi_seq(std::slice::from_ref(&a)).unwrap(),
            vec![Formula::not(a.clone())]
        );
        assert_eq!(
            psi_seq(&[a.clone(), b.clone()]).unwrap(),
            vec![
                Formula::not(a.clone()),
                Formula::implies(Formula::not(b.clone()), Formula::not(a.clone()))
            ]
        );
        assert_eq!(psi_seq(&[]), Err(Error::EmptySequence));
        let t = theta_s(std::slice::from_ref(&a)).unwrap();
        assert_eq!(t, p("(and (eq x #0) (mem #0 #1))"));
        assert_eq!(theta_s(&[]), Err(Error::EmptySequence));
        let m: FinStructure = stage(3).unwrap();
        let t = theta_s(&[a.clone(), b.clone()]).unwrap();
        for e in m.elements() {
            let value = eval::sat(&m, &t, &[(theta_var(), e)].into()).unwrap();
            assert_eq!(value, m.constant(e).as_numeral() == Some(0));
        }
    }
}
