use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use super::HfSet;
use crate::error::{Error, Result};

/// Index of an element inside a [`FinStructure`].
pub type Elem = u32;

/// Largest stage that will ever be materialized.
pub const STAGE_CAP: u32 = 5;

/// The effective stage cap: [`STAGE_CAP`], lowered by `TK_MAX_STAGE` if set.
pub fn max_stage() -> u32 {
    std::env::var("TK_MAX_STAGE")
        .ok()
        .and_then(|v| v.trim().parse::<u32>().ok())
        .map_or(STAGE_CAP, |v| v.min(STAGE_CAP))
}

/// `tower(0) = 0`, `tower(k+1) = 2^tower(k)`: the size of `V_k`.
pub fn tower(n: u32) -> u64 {
    (0..n).fold(0u64, |acc, _| 1u64.checked_shl(acc as u32).unwrap_or(0))
}

/// A finite structure `(M, E)` interpreting membership.
///
/// Every element has a numeric id. For standard stages the id is the element's Ackermann
/// code, and the element index equals the id. A constant `#n` denotes the element with id `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinStructure {
    ids: Vec<u64>,
    index: HashMap<u64, Elem>,
    members: Vec<Vec<Elem>>,
    stage: Option<u32>,
}

/// The standard structure on `V_n`.
pub fn stage(n: u32) -> Result<FinStructure> {
    let cap = max_stage();
    if n > cap {
        return Err(Error::StageTooLarge { requested: n, cap });
    }
    let size = tower(n);
    let ids: Vec<u64> = (0..size).collect();
    let members = ids
        .iter()
        .map(|&y| {
            (0..64u32.min(size as u32))
                .filter(|&x| y >> x & 1 == 1)
                .collect()
        })
        .collect();
    Ok(FinStructure {
        index: ids.iter().map(|&i| (i, i as Elem)).collect(),
        ids,
        members,
        stage: Some(n),
    })
}

impl FinStructure {
    /// A structure from element ids and `(member, container)` edges between them.
    pub fn new(ids: Vec<u64>, edges: &[(u64, u64)]) -> Result<FinStructure> {
        let mut index = HashMap::new();
        for (i, &id) in ids.iter().enumerate() {
            if index.insert(id, i as Elem).is_some() {
                return Err(Error::Invalid(format!("duplicate element id {id}")));
            }
        }
        let mut members: Vec<BTreeSet<Elem>> = vec![BTreeSet::new(); ids.len()];
        for &(x, y) in edges {
            let (Some(&xi), Some(&yi)) = (index.get(&x), index.get(&y)) else {
                return Err(Error::Invalid(format!(
                    "edge {x} {y} names an unknown element"
                )));
            };
            members[yi as usize].insert(xi);
        }
        Ok(FinStructure {
            ids,
            index,
            members: members
                .into_iter()
                .map(|s| s.into_iter().collect())
                .collect(),
            stage: None,
        })
    }

    /// The transitive set `{x}` ∪ TC(x) for each given set, with true membership.
    /// Ids are Ackermann codes, so every set must have one.
    pub fn transitive(sets: &[HfSet]) -> Result<FinStructure> {
        let mut all = BTreeSet::new();
        for s in sets {
            all.insert(s.clone());
            all.extend(s.transitive_closure());
        }
        let mut ids = Vec::new();
        for s in &all {
            ids.push(
                s.code()
                    .ok_or_else(|| Error::Invalid(format!("set {s} has no 64-bit code")))?,
            );
        }
        let mut edges = Vec::new();
        for s in &all {
            for e in s.elems() {
                edges.push((e.code().unwrap(), s.code().unwrap()));
            }
        }
        FinStructure::new(ids, &edges)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + Clone {
        0..self.ids.len() as Elem
    }

    /// The stage index when this is a standard `V_n`.
    pub fn standard_stage(&self) -> Option<u32> {
        self.stage
    }

    pub fn id(&self, e: Elem) -> u64 {
        self.ids[e as usize]
    }

    pub fn elem_by_id(&self, id: u64) -> Option<Elem> {
        self.index.get(&id).copied()
    }

    /// The element a constant denotes.
    pub fn elem_of(&self, c: &HfSet) -> Option<Elem> {
        c.code().and_then(|id| self.elem_by_id(id))
    }

    /// The constant naming an element.
    pub fn constant(&self, e: Elem) -> HfSet {
        HfSet::from_code(self.id(e))
    }

    /// Whether `x E y`.
    #[inline]
    pub fn mem(&self, x: Elem, y: Elem) -> bool {
        if self.stage.is_some() {
            x < 64 && self.ids[y as usize] >> x & 1 == 1
        } else {
            self.members[y as usize].binary_search(&x).is_ok()
        }
    }

    pub fn members(&self, y: Elem) -> &[Elem] {
        &self.members[y as usize]
    }

    pub fn edge_count(&self) -> usize {
        self.members.iter().map(Vec::len).sum()
    }

    /// Reads the line-oriented structure format.
    pub fn parse(text: &str) -> Result<FinStructure> {
        let mut ids = Vec::new();
        let mut edges = Vec::new();
        let mut standard = None;
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |message: &str| Error::StructureFormat {
                line: n + 1,
                message: message.to_string(),
            };
            let words: Vec<&str> = line.split_whitespace().collect();
            let num = |w: &str| w.parse::<u64>().map_err(|_| bad(&format!("bad id '{w}'")));
            match words.as_slice() {
                ["stage", k] => {
                    let k = num(k)? as u32;
                    if standard.replace(k).is_some() {
                        return Err(bad("more than one stage line"));
                    }
                }
                ["element", id] => ids.push(num(id)?),
                ["edge", x, y] => edges.push((num(x)?, num(y)?)),
                _ => return Err(bad(&format!("unrecognized line '{line}'"))),
            }
        }
        match standard {
            Some(_) if !ids.is_empty() || !edges.is_empty() => Err(Error::StructureFormat {
                line: 0,
                message: "a stage line excludes element and edge lines".into(),
            }),
            Some(k) => stage(k),
            None => FinStructure::new(ids, &edges),
        }
    }

    pub fn to_text(&self) -> String {
        if let Some(n) = self.stage {
            return format!("stage {n}\n");
        }
        let mut out = String::new();
        for &id in &self.ids {
            writeln!(out, "element {id}").unwrap();
        }
        for y in self.elements() {
            for &x in self.members(y) {
                writeln!(out, "edge {} {}", self.id(x), self.id(y)).unwrap();
            }
        }
        out
    }

    /// The structure as a digraph for [`collapse`](super::collapse), nodes named by id.
    pub fn digraph(&self) -> super::Digraph {
        let mut g = super::Digraph::default();
        for &id in &self.ids {
            g.add_node(&id.to_string());
        }
        for y in self.elements() {
            for &x in self.members(y) {
                g.add_edge(&self.id(x).to_string(), &self.id(y).to_string());
            }
        }
        g
    }

    /// Element ids keyed by element, for reports.
    pub fn id_map(&self) -> BTreeMap<Elem, u64> {
        self.elements().map(|e| (e, self.id(e))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(stage(0).unwrap().len(), 0);
        assert_eq!(stage(1).unwrap().len(), 1);
        assert_eq!(stage(3).unwrap().len(), 4);
        assert_eq!(stage(4).unwrap().len(), 16);
        assert_eq!(tower(5), 65536);
    }

    #[test]
    fn stage_cap() {
        assert!(matches!(stage(6), Err(Error::StageTooLarge { .. })));
    }

    #[test]
    fn stage_elements_are_the_low_rank_sets() {
        for n in 0..=4 {
            let m = stage(n).unwrap();
            let got: BTreeSet<HfSet> = m.elements().map(|e| m.constant(e)).collect();
            // Independent enumeration: close {∅} under taking subsets of what is known.
            let mut expected: BTreeSet<HfSet> = BTreeSet::new();
            for _ in 0..n {
                let known: Vec<HfSet> = expected.iter().cloned().collect();
                let mut next = BTreeSet::new();
                for mask in 0u64..(1 << known.len()) {
                    next.insert(HfSet::from_elems(
                        (0..known.len())
                            .filter(|i| mask >> i & 1 == 1)
                            .map(|i| known[i].clone()),
                    ));
                }
                expected = next;
            }
            assert_eq!(got, expected);
            assert!(got.iter().all(|x| x.rank() < n));
        }
    }

    #[test]
    fn membership_is_true_membership_and_transitive() {
        let m = stage(4).unwrap();
        for x in m.elements() {
            for y in m.elements() {
                assert_eq!(m.mem(x, y), m.constant(y).contains(&m.constant(x)));
            }
            for e in m.constant(x).elems() {
                assert!(m.elem_of(e).is_some());
            }
        }
    }

    #[test]
    fn file_round_trip() {
        let m = FinStructure::parse("# two nodes\nelement 0\nelement 1\nedge 0 1\n").unwrap();
        assert!(m.mem(0, 1));
        assert!(!m.mem(1, 0));
        assert_eq!(FinStructure::parse(&m.to_text()).unwrap(), m);
        assert_eq!(FinStructure::parse("stage 2").unwrap(), stage(2).unwrap());
        assert!(FinStructure::parse("edge 0").is_err());
    }

    #[test]
    fn transitive_structure() {
        let m = FinStructure::transitive(&[HfSet::numeral(3)]).unwrap();
        assert_eq!(m.len(), 4);
        let two = m.elem_of(&HfSet::numeral(2)).unwrap();
        let one = m.elem_of(&HfSet::numeral(1)).unwrap();
        assert!(m.mem(one, two));
    }
}
