//! Deterministic check reports rendered as text tables or `key=value` records.

use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Records,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Pass,
    Inconclusive,
    Fail,
}

impl Status {
    fn word(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Inconclusive => "inconclusive",
            Status::Fail => "fail",
        }
    }
}

/// One law check: `op` names the library operation exercised.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub op: String,
    pub name: String,
    pub passed: usize,
    pub total: usize,
    pub inconclusive: usize,
    pub counterexample: Option<String>,
}

impl Check {
    pub fn status(&self) -> Status {
        if self.passed + self.inconclusive < self.total || self.counterexample.is_some() {
            Status::Fail
        } else if self.inconclusive > 0 || self.total == 0 {
            Status::Inconclusive
        } else {
            Status::Pass
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Line {
    Section(String),
    Info(String, String),
    Check(Check),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    lines: Vec<Line>,
}

/// Accumulates outcomes of one check; the first failure is kept as a counterexample.
#[derive(Debug)]
pub struct Tally {
    check: Check,
}

impl Tally {
    pub fn new(op: &str, name: &str) -> Self {
        Tally {
            check: Check {
                op: op.into(),
                name: name.into(),
                passed: 0,
                total: 0,
                inconclusive: 0,
                counterexample: None,
            },
        }
    }

    /// Records one outcome; `witness` is only rendered on failure.
    pub fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.check.total += 1;
        if ok {
            self.check.passed += 1;
        } else if self.check.counterexample.is_none() {
            self.check.counterexample = Some(witness());
        }
    }

    pub fn ok(&mut self, ok: bool) {
        self.record(ok, || "no witness recorded".into());
    }

    pub fn add_counts(&mut self, (passed, total): (usize, usize), witness: impl FnOnce() -> String) {
        self.check.passed += passed;
        self.check.total += total;
        if passed < total && self.check.counterexample.is_none() {
            self.check.counterexample = Some(witness());
        }
    }

    pub fn unknown(&mut self) {
        self.check.total += 1;
        self.check.inconclusive += 1;
    }

    pub fn error(&mut self, err: impl std::fmt::Display) {
        self.check.total += 1;
        if self.check.counterexample.is_none() {
            self.check.counterexample = Some(format!("error: {err}"));
        }
    }

    pub fn total(&self) -> usize {
        self.check.total
    }

    pub fn finish(self) -> Check {
        self.check
    }
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn section(&mut self, title: impl Into<String>) {
        self.lines.push(Line::Section(title.into()));
    }

    pub fn info(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.lines.push(Line::Info(key.into(), value.into()));
    }

    pub fn push(&mut self, check: Check) {
        self.lines.push(Line::Check(check));
    }

    pub fn add(&mut self, tally: Tally) {
        self.push(tally.finish());
    }

    pub fn extend(&mut self, other: Report) {
        self.lines.extend(other.lines);
    }

    pub fn checks(&self) -> impl Iterator<Item = &Check> {
        self.lines.iter().filter_map(|l| match l {
            Line::Check(c) => Some(c),
            _ => None,
        })
    }

    /// Worst status over all checks; an empty report passes.
    pub fn status(&self) -> Status {
        self.checks().map(Check::status).max().unwrap_or(Status::Pass)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.render_text(),
            Format::Records => self.render_records(),
        }
    }

    fn render_text(&self) -> String {
        let mut out = String::new();
        for line in &self.lines {
            match line {
                Line::Section(t) => {
                    let _ = writeln!(out, "== {t} ==");
                }
                Line::Info(k, v) => {
                    let _ = writeln!(out, "  {k}: {v}");
                }
                Line::Check(c) => {
                    let status = match c.status() {
                        Status::Pass => "PASS",
                        Status::Inconclusive => "????",
                        Status::Fail => "FAIL",
                    };
                    let _ = write!(out, "  {status}  {:<28} {:<52} {}/{}", c.op, c.name, c.passed, c.total);
                    if c.inconclusive > 0 {
                        let _ = write!(out, " ({} inconclusive)", c.inconclusive);
                    }
                    out.push('\n');
                    if let Some(w) = &c.counterexample {
                        let _ = writeln!(out, "        counterexample: {w}");
                    }
                }
            }
        }
        out
    }

    fn render_records(&self) -> String {
        let mut out = String::new();
        let mut section = String::new();
        for line in &self.lines {
            match line {
                Line::Section(t) => section = t.clone(),
                Line::Info(k, v) => {
                    let _ = writeln!(out, "kind=info section={section:?} key={k:?} value={v:?}");
                }
                Line::Check(c) => {
                    let _ = write!(
                        out,
                        "kind=check section={section:?} op={} check={:?} status={} passed={} total={} inconclusive={}",
                        c.op,
                        c.name,
                        c.status().word(),
                        c.passed,
                        c.total,
                        c.inconclusive
                    );
                    if let Some(w) = &c.counterexample {
                        let _ = write!(out, " counterexample={w:?}");
                    }
                    out.push('\n');
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_is_worst_case() {
        let mut r = Report::new();
        let mut t = Tally::new("op", "a");
        t.ok(true);
        r.add(t);
        assert_eq!(r.status(), Status::Pass);
        let mut t = Tally::new("op", "b");
        t.unknown();
        r.add(t);
        assert_eq!(r.status(), Status::Inconclusive);
        let mut t = Tally::new("op", "c");
        t.record(false, || "x".into());
        r.add(t);
        assert_eq!(r.status(), Status::Fail);
        assert!(r.render(Format::Text).contains("counterexample: x"));
        assert!(r.render(Format::Records).contains("status=fail"));
    }
}
