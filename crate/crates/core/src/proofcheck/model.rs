//! Soundness screen: evaluate clauses in finite models.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use super::term::{Literal, Op, Sym, Term};
use super::{goal_ancestry, ProofError, ProofStep, ProofTrace};
use crate::finite_models::{derive_mean, FiniteMagma, MeanTable};

/// A finite model: `*` from the table, `m` its derived mean, `e` the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedModel {
    pub name: String,
    pub magma: FiniteMagma,
    pub mean: MeanTable,
}

impl NamedModel {
    pub fn new(name: impl Into<String>, magma: FiniteMagma) -> Self {
        let mean = derive_mean(&magma);
        NamedModel {
            name: name.into(),
            magma,
            mean,
        }
    }

    /// Addition modulo `n`, named `Z{n}`.
    pub fn cyclic(n: usize) -> Result<Self, crate::finite_models::ModelError> {
        Ok(NamedModel::new(format!("Z{n}"), FiniteMagma::cyclic(n)?))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Assignment {
    pub var: String,
    pub value: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClauseFailure {
    pub step: u64,
    pub assignment: Vec<Assignment>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModelReport {
    pub model: String,
    pub pass: bool,
    pub clauses_checked: usize,
    pub failures: Vec<ClauseFailure>,
}

fn eval(t: &Term, model: &NamedModel, env: &HashMap<Sym, usize>) -> usize {
    match t {
        Term::Var(v) | Term::Const(v) => env[v],
        Term::App(Op::Star, l, r) => model.magma.op(eval(l, model, env), eval(r, model, env)),
        Term::App(Op::Mean, l, r) => model.mean.mean(eval(l, model, env), eval(r, model, env)),
    }
}

fn collect_consts(t: &Term, out: &mut BTreeSet<Sym>) {
    match t {
        Term::Const(c) => {
            out.insert(*c);
        }
        Term::Var(_) => {}
        Term::App(_, l, r) => {
            collect_consts(l, out);
            collect_consts(r, out);
        }
    }
}

/// Returns the first assignment falsifying the step's clause, if any.
fn falsify(
    trace: &ProofTrace,
    step: &ProofStep,
    model: &NamedModel,
) -> Result<Option<Vec<Assignment>>, ProofError> {
    let mut vars = Vec::new();
    let mut consts = BTreeSet::new();
    for lit in &step.literals {
        if let Some((l, r)) = lit.sides() {
            l.vars(&mut vars);
            r.vars(&mut vars);
            collect_consts(l, &mut consts);
            collect_consts(r, &mut consts);
        }
    }
    let mut env = HashMap::new();
    for c in consts {
        let name = trace.symbols.name(c);
        match name.as_str() {
            "e" | "1" => env.insert(c, model.magma.identity()),
            _ => {
                return Err(ProofError::UnknownConstant {
                    step: step.id,
                    name,
                })
            }
        };
    }

    let n = model.magma.order();
    let mut values = vec![0usize; vars.len()];
    loop {
        for (v, &x) in vars.iter().zip(&values) {
            env.insert(*v, x);
        }
        let holds = step.literals.iter().any(|lit| match lit {
            Literal::Eq(l, r) => eval(l, model, &env) == eval(r, model, &env),
            Literal::Neq(l, r) => eval(l, model, &env) != eval(r, model, &env),
            Literal::False => false,
        });
        if !holds {
            let assignment = vars
                .iter()
                .zip(&values)
                .map(|(v, &value)| Assignment {
                    var: trace.symbols.name(*v),
                    value,
                })
                .collect();
            return Ok(Some(assignment));
        }
        // odometer over n^k assignments
        let mut k = 0;
        loop {
            if k == values.len() {
                return Ok(None);
            }
            values[k] += 1;
            if values[k] < n {
                break;
            }
            values[k] = 0;
            k += 1;
        }
    }
}

/// First input clause outside goal ancestry that the model falsifies.
pub fn axiom_violation(t: &ProofTrace, model: &NamedModel) -> Result<Option<u64>, ProofError> {
    let ancestry = goal_ancestry(t);
    for s in t
        .steps
        .iter()
        .filter(|s| s.is_input() && !ancestry.contains(&s.id))
    {
        if falsify(t, s, model)?.is_some() {
            return Ok(Some(s.id));
        }
    }
    Ok(None)
}

/// Checks every clause without goal ancestry in every model, after making
/// sure each model satisfies the trace's input clauses.
pub fn model_check(t: &ProofTrace, models: &[NamedModel]) -> Result<Vec<ModelReport>, ProofError> {
    let ancestry = goal_ancestry(t);
    let mut reports = Vec::new();
    for model in models {
        if let Some(step) = axiom_violation(t, model)? {
            return Err(ProofError::ModelRejectsAxioms {
                model: model.name.clone(),
                step,
            });
        }
        let mut failures = Vec::new();
        let mut checked = 0;
        for s in t.steps.iter().filter(|s| !ancestry.contains(&s.id)) {
            checked += 1;
            if let Some(assignment) = falsify(t, s, model)? {
                failures.push(ClauseFailure {
                    step: s.id,
                    assignment,
                });
            }
        }
        reports.push(ModelReport {
            model: model.name.clone(),
            pass: failures.is_empty(),
            clauses_checked: checked,
            failures,
        });
    }
    Ok(reports)
}
