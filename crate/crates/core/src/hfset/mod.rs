//! Hereditarily finite sets, the stages `V_n` and finite membership structures.
//!
//! Sets are hash-consed: two structurally equal sets share one allocation, so equality and
//! hashing are pointer operations. Every set carries its rank and, when it fits in a `u64`,
//! its Ackermann code.

mod collapse;
mod structure;

pub use collapse::{collapse, Digraph};
pub use structure::{max_stage, stage, tower, Elem, FinStructure, STAGE_CAP};

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex, OnceLock};

struct Node {
    elems: Box<[HfSet]>,
    rank: u32,
    code: Option<u64>,
}

/// A canonical hereditarily finite set.
#[derive(Clone)]
pub struct HfSet(Arc<Node>);

fn table() -> &'static Mutex<HashMap<Box<[usize]>, HfSet>> {
    static TABLE: OnceLock<Mutex<HashMap<Box<[usize]>, HfSet>>> = OnceLock::new();
    TABLE.get_or_init(Default::default)
}

fn small_codes() -> &'static Vec<HfSet> {
    static SMALL: OnceLock<Vec<HfSet>> = OnceLock::new();
    SMALL.get_or_init(|| {
        let mut out: Vec<HfSet> = Vec::with_capacity(1 << 16);
        for n in 0u64..(1 << 16) {
            let elems = (0..16).filter(|i| n >> i & 1 == 1).map(|i| out[i].clone());
            out.push(HfSet::intern(elems.collect()));
        }
        out
    })
}

impl HfSet {
    /// Interns an already sorted, duplicate-free element list.
    fn intern(elems: Vec<HfSet>) -> HfSet {
        let key: Box<[usize]> = elems.iter().map(HfSet::addr).collect();
        let mut table = table().lock().unwrap();
        if let Some(found) = table.get(&key) {
            return found.clone();
        }
        let rank = elems.iter().map(|e| e.rank() + 1).max().unwrap_or(0);
        let code = elems.iter().try_fold(0u64, |acc, e| match e.code() {
            Some(c) if c < 64 => Some(acc | 1 << c),
            _ => None,
        });
        let set = HfSet(Arc::new(Node {
            elems: elems.into_boxed_slice(),
            rank,
            code,
        }));
        table.insert(key, set.clone());
        set
    }

    fn addr(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn empty() -> HfSet {
        HfSet::from_code(0)
    }

    /// Builds `{e : e in elems}`; order and duplicates in the input are irrelevant.
    pub fn from_elems<I: IntoIterator<Item = HfSet>>(elems: I) -> HfSet {
        let mut v: Vec<HfSet> = elems.into_iter().collect();
        v.sort();
        v.dedup();
        HfSet::intern(v)
    }

    /// Inverse of the Ackermann coding.
    pub fn from_code(code: u64) -> HfSet {
        if code < 1 << 16 {
            return small_codes()[code as usize].clone();
        }
        let elems = (0..64u64)
            .filter(|i| code >> i & 1 == 1)
            .map(HfSet::from_code)
            .collect();
        HfSet::intern(elems)
    }

    pub fn singleton(x: HfSet) -> HfSet {
        HfSet::intern(vec![x])
    }

    pub fn pair_set(x: HfSet, y: HfSet) -> HfSet {
        HfSet::from_elems([x, y])
    }

    /// The Kuratowski pair `{{x},{x,y}}`.
    pub fn kuratowski(x: &HfSet, y: &HfSet) -> HfSet {
        HfSet::pair_set(
            HfSet::singleton(x.clone()),
            HfSet::pair_set(x.clone(), y.clone()),
        )
    }

    /// Splits a Kuratowski pair into its components.
    pub fn as_pair(&self) -> Option<(HfSet, HfSet)> {
        match self.elems() {
            [single] => match single.elems() {
                [x] => Some((x.clone(), x.clone())),
                _ => None,
            },
            [a, b] => {
                let (small, big) = if a.len() == 1 { (a, b) } else { (b, a) };
                let [x] = small.elems() else { return None };
                if big.len() != 2 || !big.contains(x) {
                    return None;
                }
                let y = big.elems().iter().find(|e| *e != x)?;
                Some((x.clone(), y.clone()))
            }
            _ => None,
        }
    }

    /// Right-nested tuple `<a, <b, c>>`; a one-element tuple is the element itself.
    pub fn tuple(items: &[HfSet]) -> HfSet {
        let (last, init) = items.split_last().expect("tuple of at least one element");
        init.iter()
            .rev()
            .fold(last.clone(), |acc, x| HfSet::kuratowski(x, &acc))
    }

    /// The von Neumann numeral for `n`.
    pub fn numeral(n: usize) -> HfSet {
        static NUMERALS: OnceLock<Mutex<Vec<HfSet>>> = OnceLock::new();
        let mut cache = NUMERALS
            .get_or_init(|| Mutex::new(vec![HfSet::empty()]))
            .lock()
            .unwrap();
        while cache.len() <= n {
            let k = cache.last().unwrap().clone();
            let mut elems = k.elems().to_vec();
            elems.push(k.clone());
            cache.push(HfSet::from_elems(elems));
        }
        cache[n].clone()
    }

    /// Recognizes von Neumann numerals.
    pub fn as_numeral(&self) -> Option<usize> {
        let n = self.len();
        if self.rank() as usize != n {
            return None;
        }
        (HfSet::numeral(n) == *self).then_some(n)
    }

    pub fn elems(&self) -> &[HfSet] {
        &self.0.elems
    }

    pub fn len(&self) -> usize {
        self.0.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.elems.is_empty()
    }

    pub fn rank(&self) -> u32 {
        self.0.rank
    }

    /// The Ackermann code, when it fits in 64 bits.
    pub fn code(&self) -> Option<u64> {
        self.0.code
    }

    pub fn contains(&self, x: &HfSet) -> bool {
        self.0.elems.binary_search(x).is_ok()
    }

    pub fn is_subset(&self, other: &HfSet) -> bool {
        self.elems().iter().all(|e| other.contains(e))
    }

    pub fn union(&self, other: &HfSet) -> HfSet {
        HfSet::from_elems(self.elems().iter().chain(other.elems()).cloned())
    }

    /// Transitive closure `self ∪ ⋃self ∪ ⋃⋃self ∪ …`, sorted.
    pub fn transitive_closure(&self) -> Vec<HfSet> {
        let mut seen = std::collections::BTreeSet::new();
        let mut stack: Vec<HfSet> = self.elems().to_vec();
        while let Some(x) = stack.pop() {
            if seen.insert(x.clone()) {
                stack.extend(x.elems().iter().cloned());
            }
        }
        seen.into_iter().collect()
    }
}

impl PartialEq for HfSet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

impl Eq for HfSet {}

impl Hash for HfSet {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.addr().hash(state)
    }
}

/// Ackermann order: compare the binary expansions from the top bit down.
impl Ord for HfSet {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        if let (Some(a), Some(b)) = (self.code(), other.code()) {
            return a.cmp(&b);
        }
        let mut a = self.elems().iter().rev();
        let mut b = other.elems().iter().rev();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(x), Some(y)) if x == y => continue,
                (Some(x), Some(y)) => return x.cmp(y),
            }
        }
    }
}

impl PartialOrd for HfSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Most characters [`HfSet`]'s `Display` writes before eliding the rest with `…`. Shared
/// substructure makes the printed tree exponentially larger than the set's node count.
pub const DISPLAY_LIMIT: usize = 4096;

fn write_limited(x: &HfSet, out: &mut String) -> bool {
    if out.len() > DISPLAY_LIMIT {
        return false;
    }
    match x.code() {
        Some(c) => {
            out.push('#');
            out.push_str(&c.to_string());
        }
        None => {
            out.push_str("#{");
            for (i, e) in x.elems().iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                if !write_limited(e, out) {
                    return false;
                }
            }
            out.push('}');
        }
    }
    true
}

/// `#n` when the code fits, `#{...}` otherwise; both forms parse back. Sets whose printed
/// form exceeds [`DISPLAY_LIMIT`] are cut off.
impl fmt::Display for HfSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        if !write_limited(self, &mut out) {
            out.push('…');
        }
        f.write_str(&out)
    }
}

impl fmt::Debug for HfSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
