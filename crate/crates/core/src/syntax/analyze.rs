use std::fmt;

use serde::Serialize;

use super::{Formula, Kind, Term, Var};

/// Syntactic Levy class. The recognizer is conservative: it never claims a class the formula
/// is not literally in, and says `Unclassified` for anything outside the recognized shapes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Levy {
    Delta0,
    Sigma(u32),
    Pi(u32),
    Unclassified,
}

impl fmt::Display for Levy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Levy::Delta0 => write!(f, "Delta0"),
            Levy::Sigma(n) => write!(f, "Sigma{n}"),
            Levy::Pi(n) => write!(f, "Pi{n}"),
            Levy::Unclassified => write!(f, "unclassified"),
        }
    }
}

impl Levy {
    /// Whether a formula of this class is also `Σ_n`.
    pub fn within_sigma(self, n: u32) -> bool {
        match self {
            Levy::Delta0 => true,
            Levy::Sigma(m) => m <= n,
            Levy::Pi(m) => m < n,
            Levy::Unclassified => false,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Analysis {
    #[serde(rename = "freeVars")]
    pub free_vars: Vec<String>,
    pub depth: u32,
    #[serde(rename = "immediateSubformulae")]
    pub immediate_subformulas: Vec<String>,
    #[serde(rename = "levyClass")]
    pub levy_class: String,
    #[serde(rename = "isSentence")]
    pub is_sentence: bool,
}

impl Formula {
    /// Matches `∃v ¬(¬(v∈w) ∨ rest)`, the shape both bounded-quantifier sugars produce.
    /// Returns the bound variable, the bounding term and `rest`.
    pub fn as_bounded_exists(&self) -> Option<(&Var, &Term, &Formula)> {
        let Kind::Exists(v, body) = self.kind() else {
            return None;
        };
        let Kind::Or(guard, rest) = body.as_not()?.kind() else {
            return None;
        };
        let Kind::Mem(Term::Var(x), w) = guard.as_not()?.kind() else {
            return None;
        };
        (x == v && w.as_var() != Some(v)).then_some((v, w, rest))
    }

    /// Every quantifier is bounded.
    pub fn is_delta0(&self) -> bool {
        match self.kind() {
            Kind::Mem(..) | Kind::Eq(..) | Kind::Pred(..) | Kind::Prov(..) => true,
            Kind::Not(a) => a.is_delta0(),
            Kind::Or(a, b) => a.is_delta0() && b.is_delta0(),
            Kind::Exists(..) => match self.as_bounded_exists() {
                Some((_, _, rest)) => rest.is_delta0(),
                None => false,
            },
        }
    }

    pub fn levy(&self) -> Levy {
        if self.is_delta0() {
            return Levy::Delta0;
        }
        match self.kind() {
            Kind::Exists(_, a) => match a.levy() {
                Levy::Delta0 => Levy::Sigma(1),
                Levy::Sigma(n) => Levy::Sigma(n),
                Levy::Pi(n) => Levy::Sigma(n + 1),
                Levy::Unclassified => Levy::Unclassified,
            },
            Kind::Not(a) => match a.levy() {
                Levy::Sigma(n) => Levy::Pi(n),
                Levy::Pi(n) => Levy::Sigma(n),
                _ => Levy::Unclassified,
            },
            _ => Levy::Unclassified,
        }
    }

    pub fn analyze(&self) -> Analysis {
        Analysis {
            free_vars: self
                .free_vars()
                .iter()
                .map(|v| v.name().to_string())
                .collect(),
            depth: self.depth(),
            immediate_subformulas: self
                .immediate_subformulas()
                .iter()
                .map(Formula::render)
                .collect(),
            levy_class: self.levy().to_string(),
            is_sentence: self.is_sentence(),
        }
    }
}
