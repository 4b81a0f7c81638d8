//! Seeded, deterministic check suites, one per acceptance criterion.

pub mod allegory;
pub mod common;
pub mod indeterminates;
pub mod kernel;
pub mod logic;
pub mod reflect;

use crate::report::{Format, Report, Tally};
use crate::{run, Command, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Full acceptance sizes; otherwise roughly a tenth.
    pub full_scale: bool,
}

impl SuiteConfig {
    pub fn full(&self) -> bool {
        self.full_scale
    }

    pub fn scaled(&self, n: usize) -> usize {
        if self.full_scale {
            n
        } else {
            n.div_ceil(10).max(1)
        }
    }
}

pub const CRITERIA: [(u8, &str); 9] = [
    (1, "topos kernel laws"),
    (2, "allegory laws"),
    (3, "power allegory"),
    (4, "map extraction"),
    (5, "indeterminates"),
    (6, "internal language"),
    (7, "logical relations"),
    (8, "booleanization"),
    (9, "determinism"),
];

pub fn criterion_name(n: u8) -> Option<&'static str> {
    CRITERIA.iter().find(|(k, _)| *k == n).map(|(_, name)| *name)
}

/// Runs one criterion's suite; unknown numbers give an empty report.
pub fn run_criterion(n: u8, cfg: &SuiteConfig) -> Report {
    match n {
        1 => kernel::run(cfg),
        2 => allegory::laws(cfg),
        3 => allegory::power(cfg),
        4 => allegory::maps(cfg),
        5 => indeterminates::run(cfg),
        6 => logic::run(cfg),
        7 => reflect::logical_relations(cfg),
        8 => reflect::booleanization(cfg),
        9 => determinism(cfg),
        _ => Report::new(),
    }
}

/// Two runs of seeded front-end commands must render byte-identically.
fn determinism(cfg: &SuiteConfig) -> Report {
    let mut report = Report::new();
    let mut tally = Tally::new("run", "identical config and seed give identical reports");
    let configs = [
        RunConfig::builtin(Command::Booleanize, "sierpinski", cfg.seed),
        RunConfig::builtin(Command::CheckAllegory, "sierpinski", cfg.seed),
        RunConfig::builtin(Command::CheckAllegory, "finset", cfg.seed),
        RunConfig {
            format: Format::Records,
            ..RunConfig::builtin(Command::Booleanize, "finset", cfg.seed)
        },
    ];
    for c in configs {
        let (a, b) = (run(&c), run(&c));
        tally.record(a == b && !a.report.is_empty(), || {
            format!("{:?} differs between runs", c.command)
        });
    }
    let sub = SuiteConfig {
        full_scale: false,
        ..*cfg
    };
    let (a, b) = (run_criterion(2, &sub), run_criterion(2, &sub));
    tally.record(a.render(Format::Text) == b.render(Format::Text), || {
        "allegory suite differs".into()
    });
    report.add(tally);
    report
}
