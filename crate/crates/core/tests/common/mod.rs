#![allow(dead_code)]

pub mod oracle;

use std::path::PathBuf;

pub fn data_file(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
}

pub const TRACE_MOUFANG: &str = "moufang_implies_selfdist.txt";
pub const TRACE_SELFDIST: &str = "selfdist_implies_moufang.txt";

pub fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}
