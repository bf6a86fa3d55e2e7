//! Exhaustive search over small finite models of a compatible mean/operation
//! pair.
//!
//! A [`FiniteMagma`] is a commutative loop on `{0..n-1}` with identity `0`
//! whose squaring map is a bijection. Its mean is forced: `m(i,j)` is the
//! unique `s` with `s*s = i*j`. On these models mediality of `m` should
//! coincide with associativity of `*`, and self-distributivity of `m` with
//! the Moufang identity `(x*y)*(x*z) = (x*x)*(y*z)`.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub const MAX_ORDER: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("order {0} exceeds the supported maximum {MAX_ORDER}")]
    OrderTooLarge(usize),
    #[error("order must be at least 1")]
    EmptyOrder,
    #[error("invalid table: {0}")]
    InvalidTable(String),
}

/// Cayley table of `*` with identity element 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FiniteMagma {
    order: usize,
    table: Vec<usize>,
}

impl FiniteMagma {
    /// Builds a magma from rows, rejecting anything that breaks the identity,
    /// symmetry, Latin or squaring-bijection properties.
    pub fn from_rows(rows: &[Vec<usize>]) -> Result<Self, ModelError> {
        let n = rows.len();
        if n == 0 {
            return Err(ModelError::EmptyOrder);
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(ModelError::InvalidTable("table is not square".into()));
        }
        let g = FiniteMagma {
            order: n,
            table: rows.concat(),
        };
        let problems = g.invariant_violations();
        if problems.is_empty() {
            Ok(g)
        } else {
            Err(ModelError::InvalidTable(problems.join("; ")))
        }
    }

    /// Addition modulo `n`.
    pub fn cyclic(n: usize) -> Result<Self, ModelError> {
        let rows: Vec<Vec<usize>> = (0..n)
            .map(|i| (0..n).map(|j| (i + j) % n).collect())
            .collect();
        FiniteMagma::from_rows(&rows)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        0
    }

    #[inline]
    pub fn op(&self, i: usize, j: usize) -> usize {
        self.table[i * self.order + j]
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.order).map(|r| r.to_vec()).collect()
    }

    pub fn invariant_violations(&self) -> Vec<String> {
        let n = self.order;
        let mut out = Vec::new();
        if self.table.iter().any(|&v| v >= n) {
            out.push("entry out of range".to_string());
            return out;
        }
        for i in 0..n {
            if self.op(0, i) != i || self.op(i, 0) != i {
                out.push(format!("0 is not an identity at {i}"));
            }
            for j in 0..n {
                if self.op(i, j) != self.op(j, i) {
                    out.push(format!("not symmetric at ({i},{j})"));
                }
            }
            if !is_permutation((0..n).map(|j| self.op(i, j)), n) {
                out.push(format!("row {i} is not a permutation"));
            }
            if !is_permutation((0..n).map(|j| self.op(j, i)), n) {
                out.push(format!("column {i} is not a permutation"));
            }
        }
        if !is_permutation((0..n).map(|i| self.op(i, i)), n) {
            out.push("squaring is not a bijection".to_string());
        }
        out
    }
}

impl fmt::Display for FiniteMagma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.table.chunks(self.order) {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

fn is_permutation(values: impl Iterator<Item = usize>, n: usize) -> bool {
    let mut seen = vec![false; n];
    for v in values {
        if v >= n || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    true
}

/// The mean forced by `m(i,j) * m(i,j) = i * j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MeanTable {
    order: usize,
    table: Vec<usize>,
}

impl MeanTable {
    #[inline]
    pub fn mean(&self, i: usize, j: usize) -> usize {
        self.table[i * self.order + j]
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.order).map(|r| r.to_vec()).collect()
    }

    /// Idempotence, symmetry, cancellation and compatibility with `g`.
    pub fn invariant_violations(&self, g: &FiniteMagma) -> Vec<String> {
        let n = self.order;
        let mut out = Vec::new();
        if g.order() != n {
            out.push("order mismatch".to_string());
            return out;
        }
        for i in 0..n {
            if self.mean(i, i) != i {
                out.push(format!("m({i},{i}) != {i}"));
            }
            if !is_permutation((0..n).map(|j| self.mean(i, j)), n) {
                out.push(format!("row {i} of m is not a permutation"));
            }
            for j in 0..n {
                if self.mean(i, j) != self.mean(j, i) {
                    out.push(format!("m not symmetric at ({i},{j})"));
                }
                let s = self.mean(i, j);
                if g.op(s, s) != g.op(i, j) {
                    out.push(format!("m({i},{j}) * m({i},{j}) != {i} * {j}"));
                }
            }
        }
        out
    }
}

pub fn derive_mean(g: &FiniteMagma) -> MeanTable {
    let n = g.order();
    let mut root = vec![0; n];
    for s in 0..n {
        root[g.op(s, s)] = s;
    }
    let table = (0..n * n).map(|k| root[g.op(k / n, k % n)]).collect();
    MeanTable { order: n, table }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct LawFlags {
    pub associative: bool,
    pub medial: bool,
    pub moufang: bool,
    pub selfdist: bool,
}

pub fn law_flags(g: &FiniteMagma, m: &MeanTable) -> LawFlags {
    let n = g.order();
    let mut f = LawFlags {
        associative: true,
        medial: true,
        moufang: true,
        selfdist: true,
    };
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if g.op(g.op(x, y), z) != g.op(x, g.op(y, z)) {
                    f.associative = false;
                }
                if g.op(g.op(x, y), g.op(x, z)) != g.op(g.op(x, x), g.op(y, z)) {
                    f.moufang = false;
                }
                if m.mean(x, m.mean(y, z)) != m.mean(m.mean(x, y), m.mean(x, z)) {
                    f.selfdist = false;
                }
                if f.medial {
                    for u in 0..n {
                        if m.mean(m.mean(x, y), m.mean(z, u)) != m.mean(m.mean(x, z), m.mean(y, u))
                        {
                            f.medial = false;
                            break;
                        }
                    }
                }
            }
        }
    }
    f
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Enumeration {
    pub order: usize,
    pub structures: Vec<FiniteMagma>,
    /// True when the search stopped because the budget was reached.
    pub truncated: bool,
}

/// Every model of order `n`, in lexicographic order of the row-major table.
///
/// The free cells are the upper triangle `1 <= i <= j < n`; filling them in
/// row-major order determines the full table, so depth-first search with
/// ascending values visits tables lexicographically. Rows are kept
/// duplicate-free and the diagonal is kept duplicate-free as it grows.
pub fn enumerate(n: usize, budget: usize) -> Result<Enumeration, ModelError> {
    if n == 0 {
        return Err(ModelError::EmptyOrder);
    }
    if n > MAX_ORDER {
        return Err(ModelError::OrderTooLarge(n));
    }
    let mut search = Search::new(n, budget);
    search.run(0);
    Ok(Enumeration {
        order: n,
        structures: search.found,
        truncated: search.truncated,
    })
}

struct Search {
    n: usize,
    table: Vec<usize>,
    cells: Vec<(usize, usize)>,
    row_used: Vec<u32>,
    diag_used: u32,
    budget: usize,
    found: Vec<FiniteMagma>,
    truncated: bool,
}

impl Search {
    fn new(n: usize, budget: usize) -> Self {
        let mut table = vec![usize::MAX; n * n];
        let mut row_used = vec![0u32; n];
        for i in 0..n {
            table[i] = i;
            table[i * n] = i;
            row_used[i] |= 1 << i;
            row_used[0] |= 1 << i;
        }
        let cells = (1..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
        // identity squares to itself
        let diag_used = 1;
        Search {
            n,
            table,
            cells,
            row_used,
            diag_used,
            budget,
            found: Vec::new(),
            truncated: false,
        }
    }

    fn run(&mut self, k: usize) {
        if self.truncated {
            return;
        }
        if k == self.cells.len() {
            if self.found.len() == self.budget {
                self.truncated = true;
                return;
            }
            self.found.push(FiniteMagma {
                order: self.n,
                table: self.table.clone(),
            });
            return;
        }
        let (i, j) = self.cells[k];
        let n = self.n;
        for v in 0..n {
            let bit = 1u32 << v;
            if self.row_used[i] & bit != 0 || self.row_used[j] & bit != 0 {
                continue;
            }
            if i == j && self.diag_used & bit != 0 {
                continue;
            }
            self.table[i * n + j] = v;
            self.table[j * n + i] = v;
            self.row_used[i] |= bit;
            self.row_used[j] |= bit;
            if i == j {
                self.diag_used |= bit;
            }
            self.run(k + 1);
            self.row_used[i] &= !bit;
            self.row_used[j] &= !bit;
            if i == j {
                self.diag_used &= !bit;
            }
            if self.truncated {
                return;
            }
        }
        self.table[i * n + j] = usize::MAX;
        self.table[j * n + i] = usize::MAX;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlagCount {
    pub flags: LawFlags,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivalenceReport {
    pub order: usize,
    pub structures: usize,
    pub truncated: bool,
    pub flag_counts: Vec<FlagCount>,
    /// Indices (in enumeration order) where medial != associative.
    pub medial_violations: Vec<usize>,
    /// Indices where selfdist != moufang.
    pub moufang_violations: Vec<usize>,
    /// Indices failing the magma or mean-table invariants on re-check.
    pub invariant_failures: Vec<usize>,
    pub contains_cyclic: bool,
}

impl EquivalenceReport {
    pub fn pass(&self) -> bool {
        self.medial_violations.is_empty()
            && self.moufang_violations.is_empty()
            && self.invariant_failures.is_empty()
    }
}

pub const DEFAULT_BUDGET: usize = 1_000_000;

pub fn theorem_equivalence_check(n: usize) -> Result<EquivalenceReport, ModelError> {
    let en = enumerate(n, DEFAULT_BUDGET)?;
    let cyclic = FiniteMagma::cyclic(n).ok();
    let mut counts: BTreeMap<LawFlags, usize> = BTreeMap::new();
    let mut report = EquivalenceReport {
        order: n,
        structures: en.structures.len(),
        truncated: en.truncated,
        flag_counts: Vec::new(),
        medial_violations: Vec::new(),
        moufang_violations: Vec::new(),
        invariant_failures: Vec::new(),
        contains_cyclic: false,
    };
    for (idx, g) in en.structures.iter().enumerate() {
        let m = derive_mean(g);
        if !g.invariant_violations().is_empty() || !m.invariant_violations(g).is_empty() {
            report.invariant_failures.push(idx);
        }
        let f = law_flags(g, &m);
        *counts.entry(f).or_default() += 1;
        if f.medial != f.associative {
            report.medial_violations.push(idx);
        }
        if f.selfdist != f.moufang {
            report.moufang_violations.push(idx);
        }
        if Some(g) == cyclic.as_ref() {
            report.contains_cyclic = true;
        }
    }
    report.flag_counts = counts
        .into_iter()
        .map(|(flags, count)| FlagCount { flags, count })
        .collect();
    Ok(report)
}
