//! Findings of the checkers, serializable as JSON lines.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

/// One failed check with a concrete witness.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Violation {
    /// The clause, property or scheme that failed.
    pub clause: String,
    /// The witness formula or sentence.
    pub formula: String,
    /// Variable assignment of the witness, as element ids.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assignment: Option<BTreeMap<String, u64>>,
    pub detail: String,
}

impl Violation {
    pub fn new(
        clause: impl Into<String>,
        formula: impl ToString,
        detail: impl Into<String>,
    ) -> Self {
        Violation {
            clause: clause.into(),
            formula: formula.to_string(),
            assignment: None,
            detail: detail.into(),
        }
    }

    pub fn with_assignment(mut self, a: BTreeMap<String, u64>) -> Self {
        self.assignment = Some(a);
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub check: String,
    /// Number of individual checks performed.
    pub checked: u64,
    pub violations: Vec<Violation>,
    /// Remarks that are not failures, such as the semantics a check ran under.
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(check: impl Into<String>) -> Self {
        Report {
            check: check.into(),
            ..Report::default()
        }
    }

    pub fn push(&mut self, v: Violation) {
        self.violations.push(v);
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    /// Sorts and deduplicates the findings so output is reproducible.
    pub fn finish(mut self) -> Self {
        self.violations.sort();
        self.violations.dedup();
        self
    }

    pub fn clauses(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self.violations.iter().map(|v| v.clause.as_str()).collect();
        out.sort();
        out.dedup();
        out
    }

    /// One JSON object per line: a header record, then one record per violation.
    pub fn to_jsonl(&self) -> String {
        #[derive(Serialize)]
        struct Header<'a> {
            record: &'a str,
            check: &'a str,
            checked: u64,
            violations: usize,
            notes: &'a [String],
        }
        #[derive(Serialize)]
        struct Line<'a> {
            record: &'a str,
            #[serde(flatten)]
            violation: &'a Violation,
        }
        let mut out = serde_json::to_string(&Header {
            record: "report",
            check: &self.check,
            checked: self.checked,
            violations: self.violations.len(),
            notes: &self.notes,
        })
        .expect("serializable");
        out.push('\n');
        for v in &self.violations {
            out.push_str(
                &serde_json::to_string(&Line {
                    record: "violation",
                    violation: v,
                })
                .expect("serializable"),
            );
            out.push('\n');
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "{}: {} checked, {} violation(s)\n",
            self.check,
            self.checked,
            self.violations.len()
        );
        for n in &self.notes {
            writeln!(s, "  note: {n}").unwrap();
        }
        for v in self.violations.iter().take(20) {
            write!(s, "  [{}] {}", v.clause, v.formula).unwrap();
            if let Some(a) = &v.assignment {
                let parts: Vec<String> = a.iter().map(|(k, x)| format!("{k}={x}")).collect();
                write!(s, " {{{}}}", parts.join(", ")).unwrap();
            }
            writeln!(s, ": {}", v.detail).unwrap();
        }
        if self.violations.len() > 20 {
            writeln!(s, "  ... {} more", self.violations.len() - 20).unwrap();
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jsonl_shape() {
        let mut r = Report::new("demo");
        r.checked = 2;
        r.push(Violation::new("2", "(mem #0 #0)", "member but false"));
        let text = r.finish().to_jsonl();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        let v: serde_json::Value = serde_json::from_str(lines[1]).unwrap();
        assert_eq!(v["clause"], "2");
        assert_eq!(v["record"], "violation");
    }
}
