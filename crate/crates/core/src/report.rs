//! Law reports shared by the mean and loop verification suites, plus the
//! fixed 17-significant-digit number format used in structured output.

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

/// Whether a law is expected to hold or expected to be violated somewhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    ShouldHold,
    ShouldFail,
}

/// Formats a float with 17 significant digits in scientific notation.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{:.16e}", x)
    } else {
        "null".to_string()
    }
}

pub fn ser_f64<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    let raw = RawValue::from_string(fmt17(*x)).map_err(serde::ser::Error::custom)?;
    raw.serialize(s)
}

pub fn ser_f64_vec<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
    let body: Vec<String> = xs.iter().map(|x| fmt17(*x)).collect();
    let raw = RawValue::from_string(format!("[{}]", body.join(",")))
        .map_err(serde::ser::Error::custom)?;
    raw.serialize(s)
}

/// Outcome of one law over a sample set.
#[derive(Debug, Clone, Serialize)]
pub struct LawRecord {
    pub law: String,
    pub polarity: Polarity,
    pub samples: usize,
    #[serde(serialize_with = "ser_f64")]
    pub worst_defect: f64,
    #[serde(serialize_with = "ser_f64_vec")]
    pub witness: Vec<f64>,
    #[serde(serialize_with = "ser_f64")]
    pub tolerance: f64,
    pub pass: bool,
}

/// Running maximum of a defect over samples.
#[derive(Debug, Clone)]
pub struct LawAccumulator {
    law: String,
    polarity: Polarity,
    tolerance: f64,
    samples: usize,
    worst: f64,
    witness: Vec<f64>,
}

impl LawAccumulator {
    pub fn new(law: impl Into<String>, polarity: Polarity, tolerance: f64) -> Self {
        LawAccumulator {
            law: law.into(),
            polarity,
            tolerance,
            samples: 0,
            worst: 0.0,
            witness: Vec::new(),
        }
    }

    /// Records one sample. NaN counts as an infinite defect. Ties keep the
    /// earliest witness so results do not depend on evaluation order.
    pub fn observe(&mut self, defect: f64, witness: &[f64]) {
        let defect = if defect.is_nan() {
            f64::INFINITY
        } else {
            defect.abs()
        };
        if self.samples == 0 || defect > self.worst {
            self.worst = defect;
            self.witness = witness.to_vec();
        }
        self.samples += 1;
    }

    pub fn finish(self) -> LawRecord {
        let pass = match self.polarity {
            Polarity::ShouldHold => self.worst <= self.tolerance,
            Polarity::ShouldFail => self.worst > self.tolerance,
        };
        LawRecord {
            law: self.law,
            polarity: self.polarity,
            samples: self.samples,
            worst_defect: self.worst,
            witness: self.witness,
            tolerance: self.tolerance,
            pass,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct LawReport {
    pub laws: Vec<LawRecord>,
}

impl LawReport {
    pub fn all_pass(&self) -> bool {
        self.laws.iter().all(|l| l.pass)
    }

    pub fn get(&self, law: &str) -> Option<&LawRecord> {
        self.laws.iter().find(|l| l.law == law)
    }

    pub fn failures(&self) -> impl Iterator<Item = &LawRecord> {
        self.laws.iter().filter(|l| !l.pass)
    }
}

/// Relative difference |a - b| / max(|a|, |b|), zero when both vanish.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn should_fail_passes_only_when_defect_found() {
        let mut acc = LawAccumulator::new("assoc", Polarity::ShouldFail, 1e-9);
        acc.observe(1e-15, &[1.0]);
        assert!(!acc.clone().finish().pass);
        acc.observe(1e-3, &[2.0]);
        let rec = acc.finish();
        assert!(rec.pass);
        assert_eq!(rec.witness, vec![2.0]);
    }

    #[test]
    fn nan_is_a_hold_failure() {
        let mut acc = LawAccumulator::new("x", Polarity::ShouldHold, 1e-9);
        acc.observe(f64::NAN, &[]);
        assert!(!acc.finish().pass);
    }

    #[test]
    fn json_numbers_use_seventeen_digits() {
        let rec = LawAccumulator::new("x", Polarity::ShouldHold, 1e-9).finish();
        let s = serde_json::to_string(&rec).unwrap();
        assert!(s.contains("\"tolerance\":1.0000000000000001e-9"), "{s}");
        assert_eq!(fmt17(0.5), "5.0000000000000000e-1");
    }
}
