//! Checking of equational refutation traces.
//!
//! A trace is a numbered list of clauses over `*`, `m`, the identity `e` and
//! Skolem constants, each with the ids of the clauses it was derived from.
//! We parse it, validate the derivation graph, screen every clause that does
//! not descend from the negated goal against finite models, and try to
//! re-derive each step from its parents by bounded search.

mod model;
mod parse;
mod replay;
pub mod term;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub use model::{axiom_violation, model_check, Assignment, ClauseFailure, ModelReport, NamedModel};
pub use parse::parse_trace;
pub use replay::{replay_step, ReplayStatus};
use term::{Literal, Show, Symbols};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("step {0} does not exist or is an input step")]
    UnknownStep(u64),
    #[error("model {model} falsifies input clause {step}")]
    ModelRejectsAxioms { model: String, step: u64 },
    #[error("constant `{name}` in step {step} has no interpretation")]
    UnknownConstant { step: u64, name: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofStep {
    pub id: u64,
    pub literals: Vec<Literal>,
    pub labels: Vec<String>,
    pub parents: Vec<u64>,
}

impl ProofStep {
    pub fn is_input(&self) -> bool {
        self.parents.is_empty()
    }

    pub fn has_label(&self, label: &str) -> bool {
        self.labels.iter().any(|l| l == label)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofTrace {
    pub header: Option<String>,
    pub steps: Vec<ProofStep>,
    pub symbols: Symbols,
}

impl ProofTrace {
    pub fn step(&self, id: u64) -> Option<&ProofStep> {
        self.steps.iter().find(|s| s.id == id)
    }

    /// One line per step in the canonical trace layout.
    pub fn unparse(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            out.push_str(&self.unparse_step(s));
            out.push('\n');
        }
        out
    }

    pub fn unparse_step(&self, s: &ProofStep) -> String {
        let mut line = format!(
            "{} {}",
            s.id,
            Show {
                item: &s.literals,
                symbols: &self.symbols
            }
        );
        for l in &s.labels {
            line.push_str(&format!(" # label({l})"));
        }
        let ids: Vec<String> = s.parents.iter().map(|p| p.to_string()).collect();
        line.push_str(&format!(".  [{}].", ids.join(",")));
        line
    }

    /// Ids of steps whose clause mentions any of the named constants.
    pub fn steps_mentioning(&self, names: &[&str]) -> BTreeSet<u64> {
        let consts: Vec<_> = names
            .iter()
            .filter_map(|n| self.symbols.lookup(n))
            .collect();
        self.steps
            .iter()
            .filter(|s| {
                s.literals.iter().any(|lit| {
                    lit.sides().is_some_and(|(l, r)| {
                        consts
                            .iter()
                            .any(|&c| l.contains_const(c) || r.contains_const(c))
                    })
                })
            })
            .map(|s| s.id)
            .collect()
    }
}

impl fmt::Display for ProofTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.unparse())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DagReport {
    pub valid: bool,
    pub violations: Vec<String>,
}

pub fn validate_dag(t: &ProofTrace) -> DagReport {
    let mut violations = Vec::new();
    let mut seen = BTreeSet::new();
    let mut prev: Option<u64> = None;
    for s in &t.steps {
        if let Some(p) = prev {
            if s.id <= p {
                violations.push(format!("step {} does not increase on step {p}", s.id));
            }
        }
        prev = Some(s.id);
        for &p in &s.parents {
            if p >= s.id {
                violations.push(format!(
                    "step {} cites parent {p} which is not earlier",
                    s.id
                ));
            } else if !seen.contains(&p) {
                violations.push(format!("step {} cites missing parent {p}", s.id));
            }
        }
        if s.is_input() && s.literals.contains(&Literal::False) {
            violations.push(format!("input step {} is a bare contradiction", s.id));
        }
        if s.literals.len() > 1 && s.literals.contains(&Literal::False) {
            violations.push(format!("step {} mixes $F with other literals", s.id));
        }
        seen.insert(s.id);
    }
    let terminals: Vec<u64> = t
        .steps
        .iter()
        .filter(|s| s.literals == [Literal::False])
        .map(|s| s.id)
        .collect();
    match terminals.as_slice() {
        [] => violations.push("no terminal contradiction".into()),
        [id] => {
            if t.steps.last().map(|s| s.id) != Some(*id) {
                violations.push(format!("contradiction {id} is not the last step"));
            }
        }
        many => violations.push(format!("multiple contradictions: {many:?}")),
    }
    DagReport {
        valid: violations.is_empty(),
        violations,
    }
}

/// Goal-labelled steps together with everything derived from them.
pub fn goal_ancestry(t: &ProofTrace) -> BTreeSet<u64> {
    let mut out = BTreeSet::new();
    for s in &t.steps {
        if s.has_label("goal") || s.parents.iter().any(|p| out.contains(p)) {
            out.insert(s.id);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReplayRecord {
    pub step: u64,
    pub status: ReplayStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub trace_id: String,
    pub dag_valid: bool,
    pub dag_violations: Vec<String>,
    pub goal_ancestry_ids: Vec<u64>,
    pub model_check: Vec<ModelReport>,
    pub replay: Vec<ReplayRecord>,
    pub verified: usize,
    pub unverified: usize,
    pub pass: bool,
}

pub const DEFAULT_REPLAY_BUDGET: usize = 100_000;

/// Runs every check. Overall pass needs a valid DAG and clean model checks;
/// unverified replays are listed but do not fail the trace.
pub fn check_trace(
    trace_id: &str,
    t: &ProofTrace,
    models: &[NamedModel],
    budget: usize,
) -> Result<CheckReport, ProofError> {
    use rayon::prelude::*;

    let dag = validate_dag(t);
    let ancestry = goal_ancestry(t);
    let model_check = model_check(t, models)?;
    let derived: Vec<u64> = t
        .steps
        .iter()
        .filter(|s| !s.is_input())
        .map(|s| s.id)
        .collect();
    let statuses: Vec<ReplayStatus> = derived
        .par_iter()
        .map(|&id| replay_step(t, id, budget))
        .collect::<Result<_, _>>()?;
    let replay: Vec<ReplayRecord> = derived
        .iter()
        .zip(statuses)
        .map(|(&step, status)| ReplayRecord { step, status })
        .collect();
    let verified = replay.iter().filter(|r| r.status.is_verified()).count();
    let pass = dag.valid && model_check.iter().all(|m| m.pass);
    Ok(CheckReport {
        trace_id: trace_id.to_string(),
        dag_valid: dag.valid,
        dag_violations: dag.violations,
        goal_ancestry_ids: ancestry.into_iter().collect(),
        model_check,
        verified,
        unverified: replay.len() - verified,
        replay,
        pass,
    })
}

/// Lookup of steps by id.
pub(crate) fn index(t: &ProofTrace) -> HashMap<u64, &ProofStep> {
    t.steps.iter().map(|s| (s.id, s)).collect()
}
