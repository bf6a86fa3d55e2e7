//! Command-line front end.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage,
//! parse and domain errors. Structured output is one JSON document.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::finite_models::{
    enumerate, theorem_equivalence_check, EquivalenceReport, ModelError, DEFAULT_BUDGET,
};
use crate::means::{
    mean_axiom_report, medial_defect, pair_grid, selfdist_defect, MeanError, MeanKind, AXIOM_TOL,
    DEFAULT_GRID,
};
use crate::oploop::{associativity_defect, law_suite, moufang_defect, star, StarConfig, StarError};
use crate::proofcheck::{
    axiom_violation, check_trace, parse_trace, CheckReport, NamedModel, ProofError,
    DEFAULT_REPLAY_BUDGET,
};
use crate::report::{fmt17, ser_f64, ser_f64_vec, LawReport};
use crate::theta::{inverse_nome, theta_squared, ThetaError};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

/// Threshold a predicted failure must exceed.
pub const COUNTEREXAMPLE_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "agmloop",
    version,
    about = "Means, the theta-function loop and proof-trace checks"
)]
pub struct RunConfig {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a mean (am, gm, hm, agm).
    #[command(allow_negative_numbers = true)]
    Mean { kind: MeanKind, x: f64, y: f64 },
    /// Evaluate the loop operation.
    #[command(allow_negative_numbers = true)]
    Star { x: f64, y: f64 },
    /// Solve theta(q)^2 = 1/a for the nome q.
    #[command(allow_negative_numbers = true)]
    Nome { a: f64 },
    /// Run the loop-law suite and the AGM mean axioms.
    Laws {
        /// Grid as start:stop:step.
        #[arg(long)]
        grid: Option<GridSpec>,
        /// Relative tolerance for the single-stage laws.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Check the predicted law failures.
    Counterexamples,
    /// Enumerate finite models and check the law equivalences.
    Models {
        #[arg(long, default_value_t = 5)]
        max_order: usize,
    },
    /// Proof-trace tools.
    Proof {
        #[command(subcommand)]
        command: ProofCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum ProofCommand {
    /// Parse, validate, model-check and replay a trace.
    Check {
        file: PathBuf,
        /// Use every enumerated model of this order that satisfies the
        /// trace's input clauses instead of the cyclic models of order 3 and 5.
        #[arg(long)]
        model_order: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_REPLAY_BUDGET)]
        replay_budget: usize,
    },
}

/// Arithmetic grid `start:stop:step`, inclusive of `stop` up to rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec(pub Vec<f64>);

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, step] = parts.as_slice() else {
            return Err(format!("grid `{s}` is not start:stop:step"));
        };
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| format!("grid value `{t}`: {e}"))
        };
        let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
        if !(start.is_finite() && stop.is_finite() && step.is_finite())
            || step <= 0.0
            || start <= 0.0
            || stop < start
        {
            return Err(format!("grid `{s}` needs 0 < start <= stop and step > 0"));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        if count > 64 {
            return Err(format!(
                "grid `{s}` has {count} points; at most 64 are allowed"
            ));
        }
        Ok(GridSpec(
            (0..count).map(|k| start + k as f64 * step).collect(),
        ))
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Mean(#[from] MeanError),
    #[error(transparent)]
    Theta(#[from] ThetaError),
    #[error(transparent)]
    Star(#[from] StarError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Proof(#[from] ProofError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Invalid(String),
}

struct Outcome {
    pass: bool,
    text: String,
    json: String,
}

impl Outcome {
    fn new<T: Serialize>(pass: bool, text: String, doc: &T) -> Outcome {
        let json = serde_json::to_string_pretty(doc).expect("reports serialize");
        Outcome { pass, text, json }
    }
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code. Reports go to standard output or `--output`; diagnostics go to
/// standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_ERROR
            } else {
                EXIT_PASS
            };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match dispatch(&cfg.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
    };
    let mut body = match cfg.format {
        Format::Text => outcome.text,
        Format::Json => outcome.json,
    };
    if !body.ends_with('\n') {
        body.push('\n');
    }
    let written = match &cfg.output {
        Some(path) => std::fs::write(path, &body).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => {
            print!("{body}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return EXIT_ERROR;
    }
    if outcome.pass {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn dispatch(cmd: &Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Mean { kind, x, y } => mean_cmd(*kind, *x, *y),
        Command::Star { x, y } => star_cmd(*x, *y),
        Command::Nome { a } => nome_cmd(*a),
        Command::Laws { grid, tol } => laws_cmd(grid.as_ref(), *tol),
        Command::Counterexamples => counterexamples_cmd(),
        Command::Models { max_order } => models_cmd(*max_order),
        Command::Proof {
            command:
                ProofCommand::Check {
                    file,
                    model_order,
                    replay_budget,
                },
        } => proof_cmd(file, *model_order, *replay_budget),
    }
}

#[derive(Serialize)]
struct MeanDoc {
    kind: MeanKind,
    #[serde(serialize_with = "ser_f64")]
    x: f64,
    #[serde(serialize_with = "ser_f64")]
    y: f64,
    #[serde(serialize_with = "ser_f64")]
    value: f64,
}

fn mean_cmd(kind: MeanKind, x: f64, y: f64) -> Result<Outcome, CliError> {
    let value = kind.eval(x, y)?;
    Ok(Outcome::new(
        true,
        fmt17(value),
        &MeanDoc { kind, x, y, value },
    ))
}

#[derive(Serialize)]
struct StarDoc {
    #[serde(serialize_with = "ser_f64")]
    x: f64,
    #[serde(serialize_with = "ser_f64")]
    y: f64,
    #[serde(serialize_with = "ser_f64")]
    value: f64,
}

fn star_cmd(x: f64, y: f64) -> Result<Outcome, CliError> {
    let value = star(x, y)?;
    Ok(Outcome::new(true, fmt17(value), &StarDoc { x, y, value }))
}

#[derive(Serialize)]
struct NomeDoc {
    #[serde(serialize_with = "ser_f64")]
    a: f64,
    #[serde(serialize_with = "ser_f64")]
    q: f64,
    /// `|a θ²(q) - 1|`
    #[serde(serialize_with = "ser_f64")]
    residual: f64,
}

fn nome_cmd(a: f64) -> Result<Outcome, CliError> {
    let q = inverse_nome(a)?;
    let residual = (a * theta_squared(q)? - 1.0).abs();
    let q = q.value();
    Ok(Outcome::new(true, fmt17(q), &NomeDoc { a, q, residual }))
}

#[derive(Serialize)]
struct LawsDoc {
    #[serde(serialize_with = "ser_f64_vec")]
    grid: Vec<f64>,
    mean_axioms: LawReport,
    loop_laws: LawReport,
    pass: bool,
}

fn law_lines(out: &mut String, title: &str, report: &LawReport) {
    let _ = writeln!(out, "{title}");
    for l in &report.laws {
        let polarity = match l.polarity {
            crate::report::Polarity::ShouldHold => "hold",
            crate::report::Polarity::ShouldFail => "fail",
        };
        let witness: Vec<String> = l.witness.iter().map(|w| format!("{w}")).collect();
        let _ = writeln!(
            out,
            "  {} {:<22} expect {polarity:<4} worst {} at ({}) tol {:e}",
            if l.pass { "PASS" } else { "FAIL" },
            l.law,
            fmt17(l.worst_defect),
            witness.join(", "),
            l.tolerance,
        );
    }
}

fn laws_cmd(grid: Option<&GridSpec>, tol: Option<f64>) -> Result<Outcome, CliError> {
    let defaults = StarConfig::default();
    let grid = grid
        .map(|g| g.0.clone())
        .unwrap_or_else(|| DEFAULT_GRID.to_vec());
    let law_tol = tol.unwrap_or(defaults.law_tol());
    let recovery_tol = defaults.recovery_tol().max(law_tol);
    let cfg = StarConfig::new(law_tol, recovery_tol, grid.clone())?;
    let mean_axioms = mean_axiom_report(
        |a, b| MeanKind::Agm.eval(a, b),
        &pair_grid(&grid),
        AXIOM_TOL,
    )?;
    let loop_laws = law_suite(&cfg)?;
    let pass = mean_axioms.all_pass() && loop_laws.all_pass();

    let mut text = String::new();
    law_lines(&mut text, "AGM mean axioms", &mean_axioms);
    law_lines(&mut text, "loop laws", &loop_laws);
    let _ = write!(
        text,
        "{}",
        if pass {
            "all laws as expected"
        } else {
            "unexpected law outcome"
        }
    );
    Ok(Outcome::new(
        pass,
        text,
        &LawsDoc {
            grid,
            mean_axioms,
            loop_laws,
            pass,
        },
    ))
}

#[derive(Serialize)]
struct Counterexample {
    name: &'static str,
    /// `gate` entries decide the exit code; `info` entries are reported only.
    role: &'static str,
    #[serde(serialize_with = "ser_f64_vec")]
    witness: Vec<f64>,
    #[serde(serialize_with = "ser_f64")]
    defect: f64,
    #[serde(serialize_with = "ser_f64")]
    threshold: f64,
    exceeds: bool,
}

#[derive(Serialize)]
struct CounterexamplesDoc {
    counterexamples: Vec<Counterexample>,
    pass: bool,
}

/// Largest defect over all grid triples, earliest triple on ties.
fn grid_worst(
    f: impl Fn(f64, f64, f64) -> Result<f64, StarError>,
) -> Result<(f64, Vec<f64>), StarError> {
    let mut worst = (f64::NEG_INFINITY, Vec::new());
    for &x in &DEFAULT_GRID {
        for &y in &DEFAULT_GRID {
            for &z in &DEFAULT_GRID {
                let d = f(x, y, z)?.abs();
                if d > worst.0 {
                    worst = (d, vec![x, y, z]);
                }
            }
        }
    }
    Ok(worst)
}

fn counterexamples_cmd() -> Result<Outcome, CliError> {
    let agm = |a: f64, b: f64| MeanKind::Agm.eval(a, b);
    let entry = |name, role, witness: Vec<f64>, defect: f64| Counterexample {
        name,
        role,
        witness,
        defect,
        threshold: COUNTEREXAMPLE_THRESHOLD,
        exceeds: defect.abs() > COUNTEREXAMPLE_THRESHOLD,
    };
    let (assoc, assoc_at) = grid_worst(associativity_defect)?;
    let (mouf, mouf_at) = grid_worst(moufang_defect)?;
    let list = vec![
        entry(
            "agm_medial",
            "gate",
            vec![1.0, 2.0, 3.0, 4.0],
            medial_defect(agm, 1.0, 2.0, 3.0, 4.0)?,
        ),
        entry(
            "agm_selfdist",
            "gate",
            vec![1.0, 2.0, 3.0],
            selfdist_defect(agm, 1.0, 2.0, 3.0)?,
        ),
        entry("star_associative_grid", "gate", assoc_at, assoc),
        entry("star_moufang_grid", "gate", mouf_at, mouf),
        entry(
            "star_associative_123",
            "info",
            vec![1.0, 2.0, 3.0],
            associativity_defect(1.0, 2.0, 3.0)?,
        ),
        entry(
            "star_moufang_123",
            "info",
            vec![1.0, 2.0, 3.0],
            moufang_defect(1.0, 2.0, 3.0)?,
        ),
    ];
    let pass = list.iter().filter(|c| c.role == "gate").all(|c| c.exceeds);

    let mut text = String::new();
    for c in &list {
        let w: Vec<String> = c.witness.iter().map(|v| format!("{v}")).collect();
        let _ = writeln!(
            text,
            "{} {:<22} {:<4} defect {} at ({})",
            if c.exceeds { "FAILS " } else { "HOLDS " },
            c.name,
            c.role,
            fmt17(c.defect),
            w.join(", ")
        );
    }
    let _ = write!(
        text,
        "{}",
        if pass {
            "all predicted failures confirmed"
        } else {
            "a predicted failure was not observed"
        }
    );
    Ok(Outcome::new(
        pass,
        text,
        &CounterexamplesDoc {
            counterexamples: list,
            pass,
        },
    ))
}

#[derive(Serialize)]
struct ModelsDoc {
    orders: Vec<EquivalenceReport>,
    pass: bool,
}

fn models_cmd(max_order: usize) -> Result<Outcome, CliError> {
    if max_order == 0 {
        return Err(CliError::Invalid("--max-order must be at least 1".into()));
    }
    let orders = (1..=max_order)
        .map(theorem_equivalence_check)
        .collect::<Result<Vec<_>, _>>()?;
    let pass = orders.iter().all(|r| r.pass() && !r.truncated);
    let mut text = String::new();
    for r in &orders {
        let _ = writeln!(
            text,
            "{} n={} structures={}{} medial/assoc violations={} selfdist/moufang violations={} cyclic={}",
            if r.pass() && !r.truncated { "PASS" } else { "FAIL" },
            r.order,
            r.structures,
            if r.truncated { " (truncated)" } else { "" },
            r.medial_violations.len(),
            r.moufang_violations.len(),
            r.contains_cyclic,
        );
    }
    Ok(Outcome::new(pass, text, &ModelsDoc { orders, pass }))
}

fn proof_cmd(file: &Path, model_order: Option<usize>, budget: usize) -> Result<Outcome, CliError> {
    let src = std::fs::read_to_string(file).map_err(|source| CliError::Io {
        path: file.to_path_buf(),
        source,
    })?;
    let trace =
        parse_trace(&src).map_err(|e| CliError::Invalid(format!("{}: {e}", file.display())))?;
    let models = match model_order {
        None => vec![NamedModel::cyclic(3)?, NamedModel::cyclic(5)?],
        Some(n) => {
            let en = enumerate(n, DEFAULT_BUDGET)?;
            let mut chosen = Vec::new();
            for (i, g) in en.structures.into_iter().enumerate() {
                let m = NamedModel::new(format!("G{n}.{i}"), g);
                if axiom_violation(&trace, &m)?.is_none() {
                    chosen.push(m);
                }
            }
            if chosen.is_empty() {
                return Err(CliError::Invalid(format!(
                    "no model of order {n} satisfies the input clauses"
                )));
            }
            chosen
        }
    };
    let id = file
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let report = check_trace(&id, &trace, &models, budget)?;
    let text = proof_text(&report);
    Ok(Outcome::new(report.pass, text, &report))
}

fn proof_text(r: &CheckReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "trace {}", r.trace_id);
    let _ = writeln!(
        out,
        "dag: {}",
        if r.dag_valid { "valid" } else { "INVALID" }
    );
    for v in &r.dag_violations {
        let _ = writeln!(out, "  {v}");
    }
    let ids: Vec<String> = r.goal_ancestry_ids.iter().map(|i| i.to_string()).collect();
    let _ = writeln!(out, "goal ancestry: {}", ids.join(","));
    for m in &r.model_check {
        let _ = writeln!(
            out,
            "model {}: {} ({} clauses checked)",
            m.model,
            if m.pass { "pass" } else { "FAIL" },
            m.clauses_checked
        );
        for f in &m.failures {
            let a: Vec<String> = f
                .assignment
                .iter()
                .map(|a| format!("{}={}", a.var, a.value))
                .collect();
            let _ = writeln!(out, "  step {} falsified by {}", f.step, a.join(" "));
        }
    }
    let _ = writeln!(
        out,
        "replay: {} verified, {} unverified",
        r.verified, r.unverified
    );
    for rec in &r.replay {
        let status = match rec.status {
            crate::proofcheck::ReplayStatus::Verified { inferences, nodes } => {
                format!("verified ({inferences} inferences, {nodes} nodes)")
            }
            crate::proofcheck::ReplayStatus::Unverified { nodes } => {
                format!("unverified ({nodes} nodes)")
            }
        };
        let _ = writeln!(out, "  {} {status}", rec.step);
    }
    let _ = write!(out, "{}", if r.pass { "PASS" } else { "FAIL" });
    out
}
