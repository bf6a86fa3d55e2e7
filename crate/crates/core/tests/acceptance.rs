//! Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.
//! Criterion 4a/4b (star defects at (1,2,3)) cannot be met: 1 is the identity
//! of the loop, so both defects vanish identically. They are evaluated and
//! printed as FAIL; `star_defects_at_one_two_three` asserts them and is
//! ignored by default.

mod common;

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use agmloop::finite_models::{theorem_equivalence_check, FiniteMagma};
use agmloop::means::{
    agm, agm_value, default_pair_grid, medial_defect, selfdist_defect, MeanKind, PositivePair,
    PrecisionConfig,
};
use agmloop::oploop::{associativity_defect, law, law_suite, moufang_defect, StarConfig};
use agmloop::proofcheck::{
    check_trace, parse_trace, validate_dag, NamedModel, DEFAULT_REPLAY_BUDGET,
};
use agmloop::theta::{inverse_nome, theta_squared, Nome};
use common::{data_file, oracle, rel, TRACE_MOUFANG, TRACE_SELFDIST};

const AGM_ORACLE_TOL: f64 = 1e-13;
const NOME_ROUNDTRIP_TOL: f64 = 1e-10;
const THETA_AGM_TOL: f64 = 1e-10;
const LAW_TOL: f64 = 1e-9;
const RECOVERY_TOL: f64 = 1e-8;
const FAILURE_THRESHOLD: f64 = 1e-6;

// regression values frozen from the first oracle-checked run
const MEDIAL_AGM_1234: f64 = 2.6951766399652733e-4;
const SELFDIST_AGM_123: f64 = -2.6301996917094711e-4;
const FROZEN_DEFECT_TOL: f64 = 1e-11;
const ASSOC_GRID_WORST: (f64, [f64; 3]) = (4.173_371_124_977_408e-2, [0.5, 0.5, 4.0]);
const MOUFANG_GRID_WORST: (f64, [f64; 3]) = (7.737_204_011_160_614e-2, [0.5, 4.0, 4.0]);
const STRUCTURE_COUNTS: [usize; 5] = [1, 0, 1, 0, 6];

/// Sub-checks that are known to be unattainable.
const KNOWN_RED: [&str; 2] = ["4a", "4b"];

struct Line {
    id: &'static str,
    pass: bool,
    what: String,
}

fn line(id: &'static str, pass: bool, what: impl Into<String>) -> Line {
    Line {
        id,
        pass,
        what: what.into(),
    }
}

fn within(elapsed: Duration, limit_s: u64) -> bool {
    elapsed < Duration::from_secs(limit_s)
}

fn criterion_1() -> Vec<Line> {
    let start = Instant::now();
    let got = agm_value(1.0, 2.0).unwrap();
    let err = rel(got, oracle::agm(1.0, 2.0));
    let mut bad = Vec::new();
    let mut pairs = default_pair_grid();
    for (x, y) in [
        (1e-300, 1e300),
        (5e-324, 1.0),
        (1.0, 1.0 + f64::EPSILON),
        (1e308, 5e307),
    ] {
        pairs.push(PositivePair::new(x, y).unwrap());
    }
    for p in &pairs {
        let t = agm(*p, PrecisionConfig::default()).unwrap();
        bad.extend(t.invariant_violations());
    }
    let elapsed = start.elapsed();
    vec![
        line(
            "1",
            err <= AGM_ORACLE_TOL,
            format!("agm(1,2) vs double-double oracle: rel {err:.3e} (tol {AGM_ORACLE_TOL:e})"),
        ),
        line(
            "1",
            bad.is_empty(),
            format!(
                "trace invariants on {} pairs: {} violations",
                pairs.len(),
                bad.len()
            ),
        ),
        line(
            "1",
            within(elapsed, 1),
            format!("runtime {elapsed:?} (< 1 s)"),
        ),
    ]
}

fn criterion_2() -> Vec<Line> {
    let start = Instant::now();
    let mut worst_q = 0.0f64;
    let mut worst_agm = 0.0f64;
    let mut errors = Vec::new();
    for i in -9..=9 {
        let q = i as f64 / 10.0;
        let t2 = theta_squared(Nome::new(q).unwrap()).unwrap();
        match inverse_nome(1.0 / t2) {
            Ok(back) => worst_q = worst_q.max((back.value() - q).abs()),
            Err(e) => errors.push(format!("q={q}: {e}")),
        }
        if q.abs() <= 0.5 {
            let m = theta_squared(Nome::new(-q).unwrap()).unwrap();
            worst_agm = worst_agm.max((agm_value(t2, m).unwrap() - 1.0).abs());
        }
    }
    let elapsed = start.elapsed();
    vec![
        line(
            "2",
            errors.is_empty() && worst_q <= NOME_ROUNDTRIP_TOL,
            format!("inverse_nome(1/theta^2(q)) roundtrip, q in -0.9..0.9: worst {worst_q:.3e} (tol {NOME_ROUNDTRIP_TOL:e}) {errors:?}"),
        ),
        line(
            "2",
            worst_agm <= THETA_AGM_TOL,
            format!("agm(theta^2(q), theta^2(-q)) = 1, |q| <= 0.5: worst {worst_agm:.3e} (tol {THETA_AGM_TOL:e})"),
        ),
        line("2", within(elapsed, 1), format!("runtime {elapsed:?} (< 1 s)")),
    ]
}

fn criterion_3() -> Vec<Line> {
    let start = Instant::now();
    let report = law_suite(&StarConfig::default()).unwrap();
    let elapsed = start.elapsed();
    let checks: [(&str, &str, f64); 9] = [
        ("identity", law::IDENTITY, LAW_TOL),
        ("squaring strictly increasing", law::SQUARE_INJECTIVE, 0.0),
        ("mean is AGM", law::MEAN_IS_AGM, LAW_TOL),
        (
            "left translation strictly increasing",
            law::CANCELLATION,
            0.0,
        ),
        ("distributive", law::DISTRIBUTIVE, LAW_TOL),
        ("right-factor recovery", law::RIGHT_FACTOR, RECOVERY_TOL),
        ("inverse", law::INVERSE, RECOVERY_TOL),
        ("mean transfer", law::MEAN_TRANSFER, LAW_TOL),
        ("commutative", law::COMMUTATIVE, LAW_TOL),
    ];
    let mut out: Vec<Line> = checks
        .iter()
        .map(|(label, name, tol)| {
            let r = report.get(name).unwrap();
            line(
                "3",
                r.worst_defect <= *tol,
                format!(
                    "{label} [{name}]: worst {:.3e} over {} samples (tol {tol:e})",
                    r.worst_defect, r.samples
                ),
            )
        })
        .collect();
    out.push(line(
        "3",
        within(elapsed, 10),
        format!("runtime {elapsed:?} (< 10 s)"),
    ));
    out
}

fn criterion_4() -> Vec<Line> {
    let agm = |a: f64, b: f64| MeanKind::Agm.eval(a, b);
    let assoc = associativity_defect(1.0, 2.0, 3.0).unwrap();
    let mouf = moufang_defect(1.0, 2.0, 3.0).unwrap();
    let medial = medial_defect(agm, 1.0, 2.0, 3.0, 4.0).unwrap();
    let selfdist = selfdist_defect(agm, 1.0, 2.0, 3.0).unwrap();

    let grid_worst = |f: fn(f64, f64, f64) -> Result<f64, agmloop::oploop::StarError>| {
        let g = agmloop::means::DEFAULT_GRID;
        let mut best = (f64::NEG_INFINITY, [0.0; 3]);
        for &x in &g {
            for &y in &g {
                for &z in &g {
                    let d = f(x, y, z).unwrap();
                    if d > best.0 {
                        best = (d, [x, y, z]);
                    }
                }
            }
        }
        best
    };
    let ga = grid_worst(associativity_defect);
    let gm = grid_worst(moufang_defect);
    let frozen =
        |got: (f64, [f64; 3]), want: (f64, [f64; 3])| got.1 == want.1 && rel(got.0, want.0) <= 1e-9;

    vec![
        line("4a", assoc > FAILURE_THRESHOLD, format!("star associativity defect at (1,2,3): {assoc:.3e} (> {FAILURE_THRESHOLD:e}; 1 is the identity, defect is 0 by construction)")),
        line("4b", mouf > FAILURE_THRESHOLD, format!("star Moufang defect at (1,2,3): {mouf:.3e} (> {FAILURE_THRESHOLD:e}; 1 is the identity, defect is 0 by construction)")),
        line("4c", medial.abs() > FAILURE_THRESHOLD, format!("AGM medial defect at (1,2,3,4): {medial:.6e} (> {FAILURE_THRESHOLD:e})")),
        line("4c", (medial - MEDIAL_AGM_1234).abs() <= FROZEN_DEFECT_TOL, format!("AGM medial defect frozen {MEDIAL_AGM_1234:e} (abs tol {FROZEN_DEFECT_TOL:e})")),
        line("4d", selfdist.abs() > FAILURE_THRESHOLD, format!("AGM self-distributive defect at (1,2,3): {selfdist:.6e} (> {FAILURE_THRESHOLD:e})")),
        line("4d", (selfdist - SELFDIST_AGM_123).abs() <= FROZEN_DEFECT_TOL, format!("AGM self-distributive defect frozen {SELFDIST_AGM_123:e} (abs tol {FROZEN_DEFECT_TOL:e})")),
        line("4e", ga.0 > FAILURE_THRESHOLD && frozen(ga, ASSOC_GRID_WORST), format!("star associativity worst grid defect {:.6e} at {:?}", ga.0, ga.1)),
        line("4e", gm.0 > FAILURE_THRESHOLD && frozen(gm, MOUFANG_GRID_WORST), format!("star Moufang worst grid defect {:.6e} at {:?}", gm.0, gm.1)),
    ]
}

fn criterion_5() -> Vec<Line> {
    let start = Instant::now();
    let reports: Vec<_> = (1..=5)
        .map(|n| theorem_equivalence_check(n).unwrap())
        .collect();
    let elapsed = start.elapsed();
    let counts: Vec<usize> = reports.iter().map(|r| r.structures).collect();
    let violations: usize = reports
        .iter()
        .map(|r| {
            r.medial_violations.len() + r.moufang_violations.len() + r.invariant_failures.len()
        })
        .sum();
    let truncated = reports.iter().any(|r| r.truncated);
    let z3 = FiniteMagma::cyclic(3).unwrap();
    let z5 = FiniteMagma::cyclic(5).unwrap();
    let e3 = agmloop::finite_models::enumerate(3, agmloop::finite_models::DEFAULT_BUDGET).unwrap();
    let e5 = agmloop::finite_models::enumerate(5, agmloop::finite_models::DEFAULT_BUDGET).unwrap();
    vec![
        line("5", violations == 0 && !truncated, format!("medial<=>associative and selfdist<=>moufang over n=1..5: {violations} violations, truncated={truncated}")),
        line("5", counts[1] == 0, format!("n=2 yields {} structures", counts[1])),
        line("5", e3.structures.contains(&z3) && e5.structures.contains(&z5), "mod-3 and mod-5 tables enumerated"),
        line("5", counts == STRUCTURE_COUNTS, format!("structure counts {counts:?} (frozen {STRUCTURE_COUNTS:?})")),
        line("5", within(elapsed, 60), format!("runtime {elapsed:?} (< 60 s)")),
    ]
}

fn criterion_6() -> Vec<Line> {
    let start = Instant::now();
    let models = [
        NamedModel::cyclic(3).unwrap(),
        NamedModel::cyclic(5).unwrap(),
    ];
    let mut out = Vec::new();
    for (file, required) in [
        (TRACE_MOUFANG, &[15u64, 16, 48, 50][..]),
        (TRACE_SELFDIST, &[15, 16, 24][..]),
    ] {
        let text = std::fs::read_to_string(data_file(file)).unwrap();
        let trace = match parse_trace(&text) {
            Ok(t) => t,
            Err(e) => {
                out.push(line("6", false, format!("{file}: parse error {e}")));
                continue;
            }
        };
        let dag = validate_dag(&trace);
        out.push(line(
            "6",
            dag.valid,
            format!(
                "{file}: parsed {} steps, DAG valid ({:?})",
                trace.steps.len(),
                dag.violations
            ),
        ));

        let report = check_trace(file, &trace, &models, DEFAULT_REPLAY_BUDGET).unwrap();
        let ancestry: BTreeSet<u64> = report.goal_ancestry_ids.iter().copied().collect();
        let skolem = trace.steps_mentioning(&["c1", "c2", "c3"]);
        out.push(line(
            "6",
            skolem.is_subset(&ancestry),
            format!("{file}: clauses with c1..c3 {skolem:?} all have goal ancestry"),
        ));
        out.push(line(
            "6",
            report.model_check.iter().all(|m| m.pass),
            format!("{file}: model check against Z3, Z5"),
        ));
        let verified: BTreeSet<u64> = report
            .replay
            .iter()
            .filter(|r| r.status.is_verified())
            .map(|r| r.step)
            .collect();
        let missing: Vec<u64> = required
            .iter()
            .copied()
            .filter(|s| !verified.contains(s))
            .collect();
        out.push(line(
            "6",
            missing.is_empty(),
            format!("{file}: replay verifies {required:?} within {DEFAULT_REPLAY_BUDGET} (missing {missing:?})"),
        ));
        let derived = trace.steps.iter().filter(|s| !s.is_input()).count();
        out.push(line(
            "6",
            report.replay.len() == derived,
            format!(
                "{file}: {derived} derived steps classified: {} verified, {} unverified",
                report.verified, report.unverified
            ),
        ));
    }
    let elapsed = start.elapsed();
    out.push(line(
        "6",
        within(elapsed, 60),
        format!("runtime {elapsed:?} (< 60 s)"),
    ));
    out
}

fn cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_agmloop"))
        .args(args)
        .output()
        .unwrap();
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn criterion_7() -> Vec<Line> {
    let bad_trace =
        std::env::temp_dir().join(format!("agmloop-acceptance-bad-{}.txt", std::process::id()));
    std::fs::write(&bad_trace, "1 x * = y.  [].\n").unwrap();
    let bad = bad_trace.to_str().unwrap();
    let trace = data_file(TRACE_MOUFANG);
    let trace = trace.to_str().unwrap();

    let cases: [(&[&str], i32); 6] = [
        (&["mean", "agm", "1", "2"], 0),
        (&["proof", "check", trace], 0),
        (&["laws", "--tol", "1e-300"], 1),
        (&["mean", "agm", "-1", "2"], 2),
        (&["star", "one", "2"], 2),
        (&["proof", "check", bad], 2),
    ];
    let mut out: Vec<Line> = cases
        .iter()
        .map(|(args, want)| {
            let (code, _) = cli(args);
            line(
                "7",
                code == *want,
                format!("`{}` exits {code} (want {want})", args.join(" ")),
            )
        })
        .collect();
    let _ = std::fs::remove_file(&bad_trace);

    for args in [
        &["--format", "json", "counterexamples"][..],
        &["--format", "json", "proof", "check", trace][..],
    ] {
        let (_, a) = cli(args);
        let (_, b) = cli(args);
        out.push(line(
            "7",
            !a.is_empty() && a == b,
            format!(
                "`{}` byte-identical across runs ({} bytes)",
                args.join(" "),
                a.len()
            ),
        ));
    }
    out
}

#[test]
fn acceptance() {
    let lines: Vec<Line> = [
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
    ]
    .into_iter()
    .flatten()
    .collect();
    for l in &lines {
        let tag = if KNOWN_RED.contains(&l.id) && !l.pass {
            " [known unattainable]"
        } else {
            ""
        };
        println!(
            "{} [{}] {}{tag}",
            if l.pass { "PASS" } else { "FAIL" },
            l.id,
            l.what
        );
    }
    let unexpected: Vec<String> = lines
        .iter()
        .filter(|l| !l.pass && !KNOWN_RED.contains(&l.id))
        .map(|l| format!("[{}] {}", l.id, l.what))
        .collect();
    assert!(
        unexpected.is_empty(),
        "failing criteria:\n{}",
        unexpected.join("\n")
    );
}

#[test]
#[ignore = "unattainable: 1 is the loop identity, so both defects at (1,2,3) are zero"]
fn star_defects_at_one_two_three() {
    assert!(associativity_defect(1.0, 2.0, 3.0).unwrap() > FAILURE_THRESHOLD);
    assert!(moufang_defect(1.0, 2.0, 3.0).unwrap() > FAILURE_THRESHOLD);
}
