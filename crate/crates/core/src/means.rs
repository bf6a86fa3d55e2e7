//! Classical means (arithmetic, geometric, harmonic), the operations they are
//! compatible with, and the Gauss arithmetic-geometric mean.
//!
//! A mean `m` is compatible with an operation `*` when
//! `m(x,y) * m(x,y) = x * y` for all positive `x`, `y`. The checkers here take
//! any binary function so the same code exercises the classical pairs, AGM,
//! and deliberately broken operations.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::report::{rel_diff, LawAccumulator, LawReport, Polarity};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeanError {
    #[error("arguments must be positive and finite, got ({0}, {1})")]
    Domain(f64, f64),
    #[error("AGM did not converge within {0} iterations")]
    NoConvergence(usize),
    #[error("invalid precision config: {0}")]
    Config(&'static str),
    #[error("{0} has no closed-form classical operation")]
    NotClassical(MeanKind),
}

/// Two positive finite reals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositivePair {
    x: f64,
    y: f64,
}

impl PositivePair {
    pub fn new(x: f64, y: f64) -> Result<Self, MeanError> {
        if is_positive(x) && is_positive(y) {
            Ok(PositivePair { x, y })
        } else {
            Err(MeanError::Domain(x, y))
        }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }
}

fn is_positive(v: f64) -> bool {
    v.is_finite() && v > 0.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionConfig {
    rel_tol: f64,
    max_iterations: usize,
}

impl PrecisionConfig {
    pub fn new(rel_tol: f64, max_iterations: usize) -> Result<Self, MeanError> {
        if !(rel_tol > 0.0 && rel_tol < 1.0) {
            return Err(MeanError::Config("rel_tol must lie in (0, 1)"));
        }
        if max_iterations == 0 {
            return Err(MeanError::Config("max_iterations must be at least 1"));
        }
        Ok(PrecisionConfig {
            rel_tol,
            max_iterations,
        })
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn max_iterations(&self) -> usize {
        self.max_iterations
    }
}

impl Default for PrecisionConfig {
    fn default() -> Self {
        PrecisionConfig {
            rel_tol: 4.0 * f64::EPSILON,
            max_iterations: 64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MeanKind {
    Am,
    Gm,
    Hm,
    Agm,
}

impl MeanKind {
    pub const ALL: [MeanKind; 4] = [MeanKind::Am, MeanKind::Gm, MeanKind::Hm, MeanKind::Agm];

    /// Evaluates the mean. AGM uses the default precision.
    pub fn eval(self, x: f64, y: f64) -> Result<f64, MeanError> {
        let p = PositivePair::new(x, y)?;
        match self {
            MeanKind::Agm => Ok(agm(p, PrecisionConfig::default())?.value),
            kind => classical_mean(kind, p),
        }
    }
}

impl fmt::Display for MeanKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MeanKind::Am => "am",
            MeanKind::Gm => "gm",
            MeanKind::Hm => "hm",
            MeanKind::Agm => "agm",
        };
        f.write_str(s)
    }
}

impl FromStr for MeanKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "am" => Ok(MeanKind::Am),
            "gm" => Ok(MeanKind::Gm),
            "hm" => Ok(MeanKind::Hm),
            "agm" => Ok(MeanKind::Agm),
            other => Err(format!(
                "unknown mean kind `{other}` (expected am, gm, hm, agm)"
            )),
        }
    }
}

pub fn classical_mean(kind: MeanKind, p: PositivePair) -> Result<f64, MeanError> {
    let (x, y) = (p.x, p.y);
    match kind {
        MeanKind::Am => Ok(0.5 * x + 0.5 * y),
        MeanKind::Gm => Ok((x * y).sqrt()),
        MeanKind::Hm => Ok(2.0 * x * y / (x + y)),
        MeanKind::Agm => Err(MeanError::NotClassical(kind)),
    }
}

/// The operation each classical mean is compatible with: `+`, `×`, and
/// `xy/(x+y)`.
pub fn classical_op(kind: MeanKind, p: PositivePair) -> Result<f64, MeanError> {
    let (x, y) = (p.x, p.y);
    match kind {
        MeanKind::Am => Ok(x + y),
        MeanKind::Gm => Ok(x * y),
        MeanKind::Hm => Ok(x * y / (x + y)),
        MeanKind::Agm => Err(MeanError::NotClassical(kind)),
    }
}

/// Iterates of the Gauss AGM iteration, each pair ordered so that `x >= y`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgmTrace {
    pub iterates: Vec<(f64, f64)>,
    pub value: f64,
    pub iterations: usize,
}

/// Slack for comparisons that hold exactly over the reals but can be off by
/// a few ulps once the interval width reaches rounding level.
const TRACE_ULPS: f64 = 4.0 * f64::EPSILON;

impl AgmTrace {
    /// Lists every violated trace invariant: ordering, nesting, quadratic
    /// contraction of widths, and enclosure of the value.
    pub fn invariant_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (n, &(x, y)) in self.iterates.iter().enumerate() {
            if x < y {
                out.push(format!("step {n}: x < y ({x} < {y})"));
            }
            if !(y * (1.0 - TRACE_ULPS) <= self.value && self.value <= x * (1.0 + TRACE_ULPS)) {
                out.push(format!("step {n}: value {} outside [{y}, {x}]", self.value));
            }
        }
        for (n, w) in self.iterates.windows(2).enumerate() {
            let (x0, y0) = w[0];
            let (x1, y1) = w[1];
            if y1 < y0 || x1 > x0 {
                out.push(format!("step {n}: interval does not nest"));
            }
            let width0 = x0 - y0;
            let width1 = x1 - y1;
            let bound = width0 * width0 / (8.0 * y0) + TRACE_ULPS * x1;
            if width1 > bound {
                out.push(format!(
                    "step {n}: width {width1} exceeds contraction bound {bound}"
                ));
            }
        }
        out
    }
}

/// Gauss arithmetic-geometric mean with its full iterate trace.
///
/// The pair is ordered `x >= y` and rescaled by an exact power of two before
/// iterating, which makes the result bit-for-bit symmetric.
pub fn agm(p: PositivePair, cfg: PrecisionConfig) -> Result<AgmTrace, MeanError> {
    let (mut x, mut y) = if p.x >= p.y { (p.x, p.y) } else { (p.y, p.x) };
    // scale about the geometric midpoint so neither x*y nor x/2 leaves range
    let exp = ((0.5 * (x.log2() + y.log2())).floor() as i32).clamp(-1022, 1023);
    let down = 2f64.powi(-exp);
    let up = 2f64.powi(exp);
    x *= down;
    y *= down;

    let mut iterates = vec![(x * up, y * up)];
    let mut iterations = 0;
    while x - y > cfg.rel_tol * x {
        if iterations == cfg.max_iterations {
            return Err(MeanError::NoConvergence(cfg.max_iterations));
        }
        let a = 0.5 * (x + y);
        let prod = x * y;
        // widely separated pairs overflow or underflow the product
        let g = if prod.is_normal() {
            prod.sqrt()
        } else {
            x.sqrt() * y.sqrt()
        };
        // AM >= GM can fail by an ulp at convergence
        (x, y) = if a >= g { (a, g) } else { (g, a) };
        iterations += 1;
        iterates.push((x * up, y * up));
    }
    Ok(AgmTrace {
        iterates,
        value: x * up,
        iterations,
    })
}

pub fn agm_value(x: f64, y: f64) -> Result<f64, MeanError> {
    Ok(agm(PositivePair::new(x, y)?, PrecisionConfig::default())?.value)
}

/// `op(m, m) - op(x, y)` with `m = mean(x, y)`.
pub fn compatibility_defect<M, O>(mean: M, op: O, p: PositivePair) -> Result<f64, MeanError>
where
    M: Fn(f64, f64) -> Result<f64, MeanError>,
    O: Fn(f64, f64) -> Result<f64, MeanError>,
{
    let m = mean(p.x, p.y)?;
    Ok(op(m, m)? - op(p.x, p.y)?)
}

pub fn medial_defect<M>(mean: M, x: f64, y: f64, z: f64, u: f64) -> Result<f64, MeanError>
where
    M: Fn(f64, f64) -> Result<f64, MeanError>,
{
    let lhs = mean(mean(x, y)?, mean(z, u)?)?;
    let rhs = mean(mean(x, z)?, mean(y, u)?)?;
    Ok(lhs - rhs)
}

/// `m(m(x,y), m(x,z)) - m(x, m(y,z))`.
pub fn selfdist_defect<M>(mean: M, x: f64, y: f64, z: f64) -> Result<f64, MeanError>
where
    M: Fn(f64, f64) -> Result<f64, MeanError>,
{
    let lhs = mean(mean(x, y)?, mean(x, z)?)?;
    let rhs = mean(x, mean(y, z)?)?;
    Ok(lhs - rhs)
}

pub const DEFAULT_GRID: [f64; 7] = [0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0];

pub fn default_pair_grid() -> Vec<PositivePair> {
    pair_grid(&DEFAULT_GRID)
}

pub fn pair_grid(values: &[f64]) -> Vec<PositivePair> {
    values
        .iter()
        .flat_map(|&x| values.iter().map(move |&y| PositivePair { x, y }))
        .filter(|p| is_positive(p.x) && is_positive(p.y))
        .collect()
}

pub const AXIOM_TOL: f64 = 1e-12;

/// Checks idempotence, symmetry and cancellation over a grid of pairs.
///
/// Cancellation is tested as strict monotonicity of `y -> m(x, y)` along the
/// sorted distinct `y` values paired with each `x`; the defect is 1 at the
/// first non-increasing step and 0 otherwise.
pub fn mean_axiom_report<M>(
    mean: M,
    grid: &[PositivePair],
    tol: f64,
) -> Result<LawReport, MeanError>
where
    M: Fn(f64, f64) -> Result<f64, MeanError>,
{
    let mut idem = LawAccumulator::new("idempotence", Polarity::ShouldHold, tol);
    let mut sym = LawAccumulator::new("symmetry", Polarity::ShouldHold, tol);
    let mut cancel = LawAccumulator::new("cancellation", Polarity::ShouldHold, tol);

    let mut xs: Vec<f64> = grid.iter().flat_map(|p| [p.x, p.y]).collect();
    sort_dedup(&mut xs);
    for &x in &xs {
        idem.observe(rel_diff(mean(x, x)?, x), &[x]);
    }
    for p in grid {
        sym.observe(rel_diff(mean(p.x, p.y)?, mean(p.y, p.x)?), &[p.x, p.y]);
    }

    let mut firsts: Vec<f64> = grid.iter().map(|p| p.x).collect();
    sort_dedup(&mut firsts);
    for &x in &firsts {
        let mut ys: Vec<f64> = grid.iter().filter(|p| p.x == x).map(|p| p.y).collect();
        sort_dedup(&mut ys);
        let vals = ys
            .iter()
            .map(|&y| mean(x, y))
            .collect::<Result<Vec<_>, _>>()?;
        for (i, w) in vals.windows(2).enumerate() {
            let defect = if w[1] > w[0] { 0.0 } else { 1.0 };
            cancel.observe(defect, &[x, ys[i], ys[i + 1]]);
        }
    }

    Ok(LawReport {
        laws: vec![idem.finish(), sym.finish(), cancel.finish()],
    })
}

fn sort_dedup(v: &mut Vec<f64>) {
    v.sort_by(f64::total_cmp);
    v.dedup();
}
