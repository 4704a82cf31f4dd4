use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::HfSet;
use crate::error::{Error, Result};

/// A finite digraph whose edges read "member → container".
#[derive(Clone, Debug, Default)]
pub struct Digraph {
    names: Vec<String>,
    index: HashMap<String, usize>,
    children: Vec<BTreeSet<usize>>,
}

impl Digraph {
    pub fn add_node(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        self.names.push(name.to_string());
        self.children.push(BTreeSet::new());
        self.index.insert(name.to_string(), self.names.len() - 1);
        self.names.len() - 1
    }

    /// Records `member ∈ container`, adding either node if needed.
    pub fn add_edge(&mut self, member: &str, container: &str) {
        let m = self.add_node(member);
        let c = self.add_node(container);
        self.children[c].insert(m);
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Nodes in an order where every child precedes its parents.
    fn bottom_up(&self) -> Result<Vec<usize>> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            New,
            Open,
            Done,
        }
        let mut mark = vec![Mark::New; self.len()];
        let mut order = Vec::with_capacity(self.len());
        for root in 0..self.len() {
            if mark[root] != Mark::New {
                continue;
            }
            let mut stack = vec![(root, self.children[root].iter())];
            mark[root] = Mark::Open;
            while let Some((node, iter)) = stack.last_mut() {
                let node = *node;
                match iter.next() {
                    Some(&c) => match mark[c] {
                        Mark::Open => return Err(Error::Cycle(self.names[c].clone())),
                        Mark::New => {
                            mark[c] = Mark::Open;
                            stack.push((c, self.children[c].iter()));
                        }
                        Mark::Done => {}
                    },
                    None => {
                        mark[node] = Mark::Done;
                        order.push(node);
                        stack.pop();
                    }
                }
            }
        }
        Ok(order)
    }
}

/// The Mostowski collapse of a well-founded extensional digraph.
pub fn collapse(g: &Digraph) -> Result<BTreeMap<String, HfSet>> {
    let order = g.bottom_up()?;
    let mut seen: HashMap<&BTreeSet<usize>, usize> = HashMap::new();
    for i in 0..g.len() {
        if let Some(&j) = seen.get(&g.children[i]) {
            let (a, b) = (&g.names[j], &g.names[i]);
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            return Err(Error::NotExtensional(a.clone(), b.clone()));
        }
        seen.insert(&g.children[i], i);
    }
    let mut value: Vec<Option<HfSet>> = vec![None; g.len()];
    for node in order {
        let elems = g.children[node]
            .iter()
            .map(|&c| value[c].clone().expect("children collapse first"));
        value[node] = Some(HfSet::from_elems(elems));
    }
    Ok(g.names
        .iter()
        .cloned()
        .zip(value.into_iter().map(Option::unwrap))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hfset::stage;

    #[test]
    fn two_nodes() {
        let mut g = Digraph::default();
        g.add_edge("b", "a");
        let c = collapse(&g).unwrap();
        assert_eq!(c["a"], HfSet::from_code(1));
        assert_eq!(c["b"], HfSet::empty());
    }

    #[test]
    fn childless_twins() {
        let mut g = Digraph::default();
        g.add_node("p");
        g.add_node("q");
        assert_eq!(
            collapse(&g),
            Err(Error::NotExtensional("p".into(), "q".into()))
        );
    }

    #[test]
    fn cycles() {
        let mut g = Digraph::default();
        g.add_edge("a", "b");
        g.add_edge("b", "a");
        assert!(matches!(collapse(&g), Err(Error::Cycle(_))));
        let mut g = Digraph::default();
        g.add_edge("a", "a");
        assert!(matches!(collapse(&g), Err(Error::Cycle(_))));
    }

    #[test]
    fn transitive_sets_collapse_to_themselves() {
        for n in 0..=4 {
            let m = stage(n).unwrap();
            let c = collapse(&m.digraph()).unwrap();
            for e in m.elements() {
                assert_eq!(c[&m.id(e).to_string()], m.constant(e));
            }
        }
        let x = HfSet::kuratowski(&HfSet::numeral(2), &HfSet::from_code(5));
        let m = crate::hfset::FinStructure::transitive(&[x]).unwrap();
        let c = collapse(&m.digraph()).unwrap();
        for e in m.elements() {
            assert_eq!(c[&m.id(e).to_string()], m.constant(e));
        }
    }

    #[test]
    fn collapse_is_idempotent() {
        let mut g = Digraph::default();
        g.add_edge("zero", "one");
        g.add_edge("zero", "two");
        g.add_edge("one", "two");
        g.add_edge("one", "s");
        let first = collapse(&g).unwrap();
        let mut h = Digraph::default();
        for v in first.values() {
            h.add_node(&v.to_string());
            for e in v.elems() {
                h.add_edge(&e.to_string(), &v.to_string());
            }
        }
        let second = collapse(&h).unwrap();
        for v in first.values() {
            assert_eq!(&second[&v.to_string()], v);
        }
    }
}
