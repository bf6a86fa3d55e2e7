//! The loop operation `⋆` on positive reals that is compatible with AGM:
//! pick `q` with `θ²(q) = 1/agm(x,y)` and set `x ⋆ y = θ²(-q)/θ²(q)`.
//!
//! The identity element is `1`. Juxtaposition in the distributive and
//! recovery laws is ordinary multiplication of reals.

use rayon::prelude::*;
use thiserror::Error;

use crate::means::{agm_value, MeanError, DEFAULT_GRID};
use crate::report::{rel_diff, LawAccumulator, LawReport, Polarity};
use crate::theta::{inverse_nome, theta_squared, ThetaError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StarError {
    #[error(transparent)]
    Mean(#[from] MeanError),
    #[error(transparent)]
    Theta(#[from] ThetaError),
    #[error("invalid star config: {0}")]
    Config(&'static str),
}

/// `x ⋆ y`, computed as `a·θ²(-q)` with `a = agm(x,y)` and `θ²(q) = 1/a`.
pub fn star(x: f64, y: f64) -> Result<f64, StarError> {
    let a = agm_value(x, y)?;
    let q = inverse_nome(a)?;
    Ok(a * theta_squared(q.negated())?)
}

/// Inverse of `x` under `⋆`: `x·(x⁻¹ ⋆ x⁻¹)`.
pub fn star_inverse(x: f64) -> Result<f64, StarError> {
    let r = 1.0 / x;
    Ok(x * star(r, r)?)
}

/// Solves `x ⋆ y = z` for `y` as `x·(x⁻¹ ⋆ (x⁻¹z))`.
pub fn recover_right_factor(x: f64, z: f64) -> Result<f64, StarError> {
    let r = 1.0 / x;
    Ok(x * star(r, r * z)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StarConfig {
    law_tol: f64,
    recovery_tol: f64,
    grid: Vec<f64>,
}

impl StarConfig {
    pub fn new(law_tol: f64, recovery_tol: f64, grid: Vec<f64>) -> Result<Self, StarError> {
        if !(law_tol > 0.0 && law_tol.is_finite())
            || !(recovery_tol > 0.0 && recovery_tol.is_finite())
        {
            return Err(StarConfig::bad("tolerances must be positive and finite"));
        }
        if grid.is_empty() {
            return Err(StarConfig::bad("grid must be nonempty"));
        }
        if grid.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(StarConfig::bad("grid values must be positive and finite"));
        }
        Ok(StarConfig {
            law_tol,
            recovery_tol,
            grid,
        })
    }

    fn bad(msg: &'static str) -> StarError {
        StarError::Config(msg)
    }

    pub fn law_tol(&self) -> f64 {
        self.law_tol
    }

    pub fn recovery_tol(&self) -> f64 {
        self.recovery_tol
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }
}

impl Default for StarConfig {
    fn default() -> Self {
        StarConfig {
            law_tol: 1e-9,
            recovery_tol: 1e-8,
            grid: DEFAULT_GRID.to_vec(),
        }
    }
}

pub mod law {
    pub const IDENTITY: &str = "identity";
    pub const SQUARE_INJECTIVE: &str = "square_injective";
    pub const MEAN_IS_AGM: &str = "mean_is_agm";
    pub const CANCELLATION: &str = "cancellation";
    pub const DISTRIBUTIVE: &str = "distributive";
    pub const RIGHT_FACTOR: &str = "right_factor_recovery";
    pub const INVERSE: &str = "inverse";
    pub const MEAN_TRANSFER: &str = "mean_transfer";
    pub const COMMUTATIVE: &str = "commutative";
    pub const ASSOCIATIVE: &str = "associative";
    pub const MOUFANG: &str = "moufang";
    pub const SPLIT_MEAN: &str = "split_mean";
    pub const MEDIAL_TRANSFER: &str = "medial_transfer";
}

/// `(x⋆y)⋆z` against `x⋆(y⋆z)`, relative.
pub fn associativity_defect(x: f64, y: f64, z: f64) -> Result<f64, StarError> {
    Ok(rel_diff(star(star(x, y)?, z)?, star(x, star(y, z)?)?))
}

/// `(x⋆x)⋆(y⋆z)` against `(x⋆y)⋆(x⋆z)`, relative.
pub fn moufang_defect(x: f64, y: f64, z: f64) -> Result<f64, StarError> {
    let lhs = star(star(x, x)?, star(y, z)?)?;
    let rhs = star(star(x, y)?, star(x, z)?)?;
    Ok(rel_diff(lhs, rhs))
}

fn tuples(grid: &[f64], k: usize) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t| {
                grid.iter().map(move |&v| {
                    let mut t = t.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    out
}

/// Evaluates `defect` over every k-tuple of the grid in parallel and folds
/// the results in grid order.
fn sweep<F>(acc: &mut LawAccumulator, grid: &[f64], k: usize, defect: F) -> Result<(), StarError>
where
    F: Fn(&[f64]) -> Result<f64, StarError> + Sync,
{
    let points = tuples(grid, k);
    let values: Vec<f64> = points
        .par_iter()
        .map(|t| defect(t))
        .collect::<Result<_, _>>()?;
    for (t, d) in points.iter().zip(values) {
        acc.observe(d, t);
    }
    Ok(())
}

/// Defect 0 if `f` is strictly increasing along `xs`, else 1 at the first
/// non-increasing step.
fn monotone<F>(acc: &mut LawAccumulator, xs: &[f64], prefix: &[f64], f: F) -> Result<(), StarError>
where
    F: Fn(f64) -> Result<f64, StarError>,
{
    let vals = xs.iter().map(|&x| f(x)).collect::<Result<Vec<_>, _>>()?;
    for (i, w) in vals.windows(2).enumerate() {
        let mut witness = prefix.to_vec();
        witness.extend([xs[i], xs[i + 1]]);
        acc.observe(if w[1] > w[0] { 0.0 } else { 1.0 }, &witness);
    }
    Ok(())
}

/// Runs every law over the configured grid.
///
/// Should-hold laws: identity, injectivity of squaring, the mean being AGM,
/// cancellation, distributivity, right-factor recovery, inverses, the mean
/// transfer `agm(1, x⋆y) = agm(x,y)` and commutativity. Should-fail laws:
/// associativity, Moufang, the split-mean identity
/// `agm(x,1) ⋆ agm(1,y) = agm(x,y)` and the medial transfer
/// `agm(x,y) ⋆ agm(z,u) = agm(x,z) ⋆ agm(y,u)`.
pub fn law_suite(cfg: &StarConfig) -> Result<LawReport, StarError> {
    let tol = cfg.law_tol;
    let mut grid = cfg.grid.clone();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let g = grid.as_slice();
    let hold = |name| LawAccumulator::new(name, Polarity::ShouldHold, tol);
    let fail = |name| LawAccumulator::new(name, Polarity::ShouldFail, tol);

    let mut identity = hold(law::IDENTITY);
    sweep(&mut identity, g, 1, |t| {
        Ok(rel_diff(star(1.0, t[0])?, t[0]))
    })?;

    let mut square = hold(law::SQUARE_INJECTIVE);
    monotone(&mut square, g, &[], |x| star(x, x))?;

    let mut mean_is_agm = hold(law::MEAN_IS_AGM);
    sweep(&mut mean_is_agm, g, 2, |t| {
        let a = agm_value(t[0], t[1])?;
        Ok(rel_diff(star(t[0], t[1])?, star(a, a)?))
    })?;

    let mut cancel = hold(law::CANCELLATION);
    for &a in g {
        monotone(&mut cancel, g, &[a], |y| star(a, y))?;
    }

    let mut distributive = hold(law::DISTRIBUTIVE);
    sweep(&mut distributive, g, 3, |t| {
        let (a, x, y) = (t[0], t[1], t[2]);
        Ok(rel_diff(star(a * x, a * y)?, star(a, a * star(x, y)?)?))
    })?;

    let mut recovery =
        LawAccumulator::new(law::RIGHT_FACTOR, Polarity::ShouldHold, cfg.recovery_tol);
    sweep(&mut recovery, g, 2, |t| {
        Ok(rel_diff(
            recover_right_factor(t[0], star(t[0], t[1])?)?,
            t[1],
        ))
    })?;

    let mut inverse = LawAccumulator::new(law::INVERSE, Polarity::ShouldHold, cfg.recovery_tol);
    sweep(&mut inverse, g, 1, |t| {
        Ok(rel_diff(star(t[0], star_inverse(t[0])?)?, 1.0))
    })?;

    let mut transfer = hold(law::MEAN_TRANSFER);
    sweep(&mut transfer, g, 2, |t| {
        Ok(rel_diff(
            agm_value(1.0, star(t[0], t[1])?)?,
            agm_value(t[0], t[1])?,
        ))
    })?;

    let mut commutative = hold(law::COMMUTATIVE);
    sweep(&mut commutative, g, 2, |t| {
        Ok(rel_diff(star(t[0], t[1])?, star(t[1], t[0])?))
    })?;

    let mut assoc = fail(law::ASSOCIATIVE);
    sweep(&mut assoc, g, 3, |t| associativity_defect(t[0], t[1], t[2]))?;

    let mut moufang = fail(law::MOUFANG);
    sweep(&mut moufang, g, 3, |t| moufang_defect(t[0], t[1], t[2]))?;

    let mut split = fail(law::SPLIT_MEAN);
    sweep(&mut split, g, 2, |t| {
        let lhs = star(agm_value(t[0], 1.0)?, agm_value(1.0, t[1])?)?;
        Ok(rel_diff(lhs, agm_value(t[0], t[1])?))
    })?;

    let mut medial = fail(law::MEDIAL_TRANSFER);
    sweep(&mut medial, g, 4, |t| {
        let lhs = star(agm_value(t[0], t[1])?, agm_value(t[2], t[3])?)?;
        let rhs = star(agm_value(t[0], t[2])?, agm_value(t[1], t[3])?)?;
        Ok(rel_diff(lhs, rhs))
    })?;

    Ok(LawReport {
        laws: vec![
            identity.finish(),
            square.finish(),
            mean_is_agm.finish(),
            cancel.finish(),
            distributive.finish(),
            recovery.finish(),
            inverse.finish(),
            transfer.finish(),
            commutative.finish(),
            assoc.finish(),
            moufang.finish(),
            split.finish(),
            medial.finish(),
        ],
    })
}
