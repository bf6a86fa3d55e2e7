//! The Jacobi theta series `θ(q) = 1 + 2 Σ_{n≥1} q^(n²)` and its inverse
//! with respect to `θ²`.
//!
//! Partial sums are accumulated in double-double so that negative nomes,
//! where the alternating series cancels down to values far below one, keep
//! full relative precision.

use serde::Serialize;
use thiserror::Error;

use crate::dd::DoubleDouble;

/// Largest admissible `|q|`.
pub const Q_MAX: f64 = 0.999;
/// Hard cap on the number of series terms (`n = 1..=MAX_TERMS`).
pub const MAX_TERMS: usize = 256;

/// Truncation stops once the tail bound is below this fraction of the sum.
const TAIL_REL: f64 = 1.0 / (1u64 << 56) as f64;
/// Unit roundoff of the double-double accumulator (with headroom).
const DD_EPS: f64 = 1.0 / (1u128 << 100) as f64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ThetaError {
    #[error("nome {0} outside [-{max}, {max}]", max = Q_MAX)]
    NomeOutOfRange(f64),
    #[error("theta({0}) is below the resolution of the series evaluation")]
    Unresolved(f64),
    #[error("target 1/a = {0} is outside the range of theta^2 on the admissible nomes")]
    TargetOutOfRange(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct Nome(f64);

impl Nome {
    pub fn new(q: f64) -> Result<Self, ThetaError> {
        if q.is_finite() && q.abs() <= Q_MAX {
            Ok(Nome(q))
        } else {
            Err(ThetaError::NomeOutOfRange(q))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn negated(self) -> Nome {
        Nome(-self.0)
    }
}

/// A truncated theta sum with certified error bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaValue {
    pub value: f64,
    /// Bound on the omitted tail `2 Σ_{n>N} q^(n²)`.
    pub tail_bound: f64,
    /// Bound on accumulated rounding, including the final rounding to f64.
    pub rounding_bound: f64,
    pub terms_used: usize,
}

impl ThetaValue {
    pub fn error_bound(&self) -> f64 {
        self.tail_bound + self.rounding_bound
    }
}

struct Series {
    sum: DoubleDouble,
    derivative: DoubleDouble,
    abs_sum: f64,
    terms: usize,
    tail_bound: f64,
}

fn tail_after(q_abs: f64, n: usize) -> f64 {
    let k = ((n + 1) * (n + 1)) as i32;
    2.0 * q_abs.powi(k) / (1.0 - q_abs)
}

/// Sums the series and its term-wise derivative `2 Σ n² q^(n²-1)`.
///
/// `q^(n²)` is advanced as `q^((n+1)²) = q^(n²) · q^(2n+1)` entirely in
/// double-double.
fn series(q: f64) -> Series {
    let q_abs = q.abs();
    let qq = DoubleDouble::from_f64(q).mul_f64(q);
    let mut sum = DoubleDouble::ONE;
    let mut derivative = DoubleDouble::ZERO;
    let mut abs_sum = 1.0;
    // pow_m1 = q^(n²-1), step = q^(2n+1)
    let mut pow_m1 = DoubleDouble::ONE;
    let mut step = DoubleDouble::from_f64(q).mul(qq);
    let mut terms = 0;
    let mut tail_bound = tail_after(q_abs, 0);

    while terms < MAX_TERMS && tail_bound > TAIL_REL * sum.to_f64().abs() {
        let n = terms + 1;
        let pow = pow_m1.mul_f64(q);
        sum = sum.add(pow.mul_f64(2.0));
        derivative = derivative.add(pow_m1.mul_f64(2.0 * (n * n) as f64));
        abs_sum += 2.0 * pow.abs().hi;
        pow_m1 = pow_m1.mul(step);
        step = step.mul(qq);
        terms = n;
        tail_bound = tail_after(q_abs, n);
    }

    Series {
        sum,
        derivative,
        abs_sum,
        terms,
        tail_bound,
    }
}

pub fn theta(q: Nome) -> Result<ThetaValue, ThetaError> {
    certify(q.0, &series(q.0))
}

fn certify(q: f64, s: &Series) -> Result<ThetaValue, ThetaError> {
    let value = s.sum.to_f64();
    let rounding_bound =
        (8 * s.terms + 16) as f64 * DD_EPS * s.abs_sum + f64::EPSILON * 0.5 * value.abs();
    let tv = ThetaValue {
        value,
        tail_bound: s.tail_bound,
        rounding_bound,
        terms_used: s.terms,
    };
    if value > tv.error_bound() {
        Ok(tv)
    } else {
        Err(ThetaError::Unresolved(q))
    }
}

pub fn theta_squared(q: Nome) -> Result<f64, ThetaError> {
    let t = theta(q)?.value;
    Ok(t * t)
}

/// `θ²(q) - target` and its derivative `2θθ'`, with unresolved theta
/// treated as zero.
fn residual(q: f64, target: f64) -> (f64, f64, bool) {
    let s = series(q);
    let t = s.sum.to_f64();
    if certify(q, &s).is_ok() {
        let tt = s
            .sum
            .mul(s.sum)
            .add(DoubleDouble::from_f64(-target))
            .to_f64();
        (tt, 2.0 * t * s.derivative.to_f64(), true)
    } else {
        (-target, 0.0, false)
    }
}

const BISECT_WIDTH: f64 = 1e-6;
const FINE_WIDTH: f64 = 1e-14;
const NEWTON_STEPS: usize = 5;

/// Finds the unique nome with `θ²(q) = 1/a`.
///
/// Bisection brackets the root to width `1e-6`; up to five safeguarded
/// Newton steps then polish it. If Newton leaves the bracket or stalls, plain
/// bisection continues down to width `1e-14`.
pub fn inverse_nome(a: f64) -> Result<Nome, ThetaError> {
    if !(a.is_finite() && a > 0.0) {
        return Err(ThetaError::TargetOutOfRange(1.0 / a));
    }
    let target = 1.0 / a;
    if target == 1.0 {
        return Ok(Nome(0.0));
    }
    let upper = theta_squared(Nome(Q_MAX))?;
    if !(target.is_finite() && target <= upper) {
        return Err(ThetaError::TargetOutOfRange(target));
    }

    let (mut lo, mut hi) = (-Q_MAX, Q_MAX);
    while hi - lo > BISECT_WIDTH {
        let mid = 0.5 * (lo + hi);
        if residual(mid, target).0 < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let mut q = 0.5 * (lo + hi);
    let mut converged = false;
    for _ in 0..NEWTON_STEPS {
        let (r, dr, resolved) = residual(q, target);
        if !resolved || dr <= 0.0 {
            break;
        }
        if r == 0.0 {
            converged = true;
            break;
        }
        if r < 0.0 {
            lo = lo.max(q);
        } else {
            hi = hi.min(q);
        }
        let next = q - r / dr;
        // a step below rounding level means q is already the root
        if (next - q).abs() <= 2.0 * f64::EPSILON * q.abs().max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
        if !(next > lo && next < hi) {
            break;
        }
        q = next;
    }

    if !converged {
        while hi - lo > FINE_WIDTH {
            let mid = 0.5 * (lo + hi);
            if residual(mid, target).0 < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        q = 0.5 * (lo + hi);
    }

    let nome = Nome::new(q)?;
    match theta_squared(nome) {
        Ok(t2) if (t2 - target).abs() <= 1e-6 * target => Ok(nome),
        _ => Err(ThetaError::TargetOutOfRange(target)),
    }
}
