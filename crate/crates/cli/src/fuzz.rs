use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use truthkit::classes::{
    assignments, ids, induced_sat, induced_truth, validate_sat, validate_truth, Family,
};
use truthkit::eval::DEFAULT_BUDGET;
use truthkit::report::{Report, Violation};
use truthkit::{FinStructure, Formula, Kind, Result, Var};

#[derive(Default)]
struct Row {
    mutations: usize,
    detected: usize,
    clauses: BTreeMap<String, usize>,
}

/// Detection counts keyed by (operation, connective of the toggled formula).
pub struct FuzzResult {
    pub report: Report,
    rows: BTreeMap<(&'static str, &'static str), Row>,
}

impl FuzzResult {
    pub fn matrix(&self) -> String {
        let clauses: BTreeSet<&String> =
            self.rows.values().flat_map(|r| r.clauses.keys()).collect();
        let mut out = String::from("op\tshape\tmutants\tdetected");
        for c in &clauses {
            write!(out, "\tclause {c}").unwrap();
        }
        out.push('\n');
        for ((op, shape), row) in &self.rows {
            write!(out, "{op}\t{shape}\t{}\t{}", row.mutations, row.detected).unwrap();
            for c in &clauses {
                write!(out, "\t{}", row.clauses.get(*c).copied().unwrap_or(0)).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

fn shape(f: &Formula) -> &'static str {
    match f.kind() {
        Kind::Mem(..) | Kind::Eq(..) | Kind::Pred(..) | Kind::Prov(..) => "atom",
        Kind::Not(_) => "not",
        Kind::Or(..) => "or",
        Kind::Exists(..) => "exists",
    }
}

fn pick(len: usize, count: usize, seed: u64) -> Vec<usize> {
    if count == 0 || count >= len {
        return (0..len).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = sample(&mut rng, len, count).into_vec();
    chosen.sort_unstable();
    chosen
}

/// Toggles single entries of the induced class over `Depth_depth` in `x, y` and validates
/// each mutant. A mutant no clause notices is a violation.
pub fn sweep(
    m: &FinStructure,
    depth: u32,
    count: usize,
    seed: u64,
    truth: bool,
) -> Result<FuzzResult> {
    let family = Family::depth(&[Var::new("x"), Var::new("y")], depth);
    let mut report = Report::new(if truth { "fuzz truth" } else { "fuzz sat" });
    let mut rows: BTreeMap<(&'static str, &'static str), Row> = BTreeMap::new();
    let mut record =
        |report: &mut Report, op: &'static str, f: &Formula, found: &Report, v: Violation| {
            let row = rows.entry((op, shape(f))).or_default();
            row.mutations += 1;
            report.checked += 1;
            if found.is_clean() {
                report.push(v);
            } else {
                row.detected += 1;
                for c in found.clauses() {
                    *row.clauses.entry(c.to_string()).or_default() += 1;
                }
            }
        };
    if truth {
        let base = induced_truth(m, &family)?;
        let universe: Vec<Formula> = family.sentences(m).into_iter().collect();
        for i in pick(universe.len(), count, seed) {
            let s = &universe[i];
            let mut mutant = base.clone();
            let op = if mutant.sentences.remove(s) {
                "delete"
            } else {
                mutant.sentences.insert(s.clone());
                "insert"
            };
            let found = validate_truth(m, &mutant, DEFAULT_BUDGET)?;
            record(
                &mut report,
                op,
                s,
                &found,
                Violation::new("undetected", s, op),
            );
        }
    } else {
        let base = induced_sat(m, &family)?;
        let universe: Vec<_> = family
            .iter()
            .flat_map(|f| assignments(m, f).into_iter().map(move |a| (f.clone(), a)))
            .collect();
        for i in pick(universe.len(), count, seed) {
            let entry = &universe[i];
            let mut mutant = base.clone();
            let op = if mutant.entries.remove(entry) {
                "delete"
            } else {
                mutant.entries.insert(entry.clone());
                "insert"
            };
            let found = validate_sat(m, &mutant, DEFAULT_BUDGET)?;
            let v = Violation::new("undetected", &entry.0, op).with_assignment(ids(m, &entry.1));
            record(&mut report, op, &entry.0, &found, v);
        }
    }
    Ok(FuzzResult {
        report: report.finish(),
        rows,
    })
}
