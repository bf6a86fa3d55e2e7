//! Bounded re-derivation of a step from its cited parents.
//!
//! Moves, each counted as one inference:
//! * paramodulation of a positive unit parent (either orientation, never
//!   from a variable) into the current clause at any non-variable position;
//! * paramodulation of the current clause, when it is a positive unit, into
//!   a parent;
//! * equality resolution, dropping `s != t` when `s` and `t` unify;
//! * unit resolution against unit parents of opposite sign;
//! * denial of a goal equation, read off directly when the target is a
//!   ground instance of its negation.
//!
//! A clause is accepted when it subsumes the target; subsumption matches
//! equations in both orientations, which also covers literal flips.
//! Search is iterative deepening to four inferences, bounded by a budget of
//! generated clauses. Failure to find a derivation makes no claim about the
//! step's validity.

use std::collections::HashMap;

use serde::Serialize;

use super::term::{Literal, Op, Sym, Term, FRESH_BASE};
use super::{index, ProofError, ProofTrace};

pub const MAX_DEPTH: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ReplayStatus {
    Verified { inferences: usize, nodes: usize },
    Unverified { nodes: usize },
}

impl ReplayStatus {
    pub fn is_verified(&self) -> bool {
        matches!(self, ReplayStatus::Verified { .. })
    }
}

type Clause = Vec<Literal>;
type Subst = HashMap<Sym, Term>;

fn walk<'a>(t: &'a Term, s: &'a Subst) -> &'a Term {
    let mut cur = t;
    while let Term::Var(v) = cur {
        match s.get(v) {
            Some(b) => cur = b,
            None => break,
        }
    }
    cur
}

fn occurs(v: Sym, t: &Term, s: &Subst) -> bool {
    match walk(t, s) {
        Term::Var(w) => *w == v,
        Term::Const(_) => false,
        Term::App(_, l, r) => occurs(v, l, s) || occurs(v, r, s),
    }
}

fn unify(a: &Term, b: &Term, s: &mut Subst) -> bool {
    let a = walk(a, s).clone();
    let b = walk(b, s).clone();
    match (&a, &b) {
        (Term::Var(x), Term::Var(y)) if x == y => true,
        (Term::Var(x), t) | (t, Term::Var(x)) => {
            if occurs(*x, t, s) {
                false
            } else {
                s.insert(*x, t.clone());
                true
            }
        }
        (Term::Const(x), Term::Const(y)) => x == y,
        (Term::App(o1, l1, r1), Term::App(o2, l2, r2)) => {
            o1 == o2 && unify(l1, l2, s) && unify(r1, r2, s)
        }
        _ => false,
    }
}

fn apply(t: &Term, s: &Subst) -> Term {
    match walk(t, s) {
        Term::App(op, l, r) => Term::app(*op, apply(l, s), apply(r, s)),
        other => other.clone(),
    }
}

fn apply_clause(c: &[Literal], s: &Subst) -> Clause {
    c.iter().map(|l| l.map_terms(|t| apply(t, s))).collect()
}

/// One-way matching: binds only variables of `pat`; `t` is treated as ground.
fn match_term(pat: &Term, t: &Term, s: &mut Subst) -> bool {
    match (pat, t) {
        (Term::Var(v), _) => match s.get(v) {
            Some(b) => b == t,
            None => {
                s.insert(*v, t.clone());
                true
            }
        },
        (Term::Const(a), Term::Const(b)) => a == b,
        (Term::App(o1, l1, r1), Term::App(o2, l2, r2)) => {
            o1 == o2 && match_term(l1, l2, s) && match_term(r1, r2, s)
        }
        _ => false,
    }
}

fn match_literal(p: &Literal, t: &Literal, s: &Subst) -> Vec<Subst> {
    let pair = match (p, t) {
        (Literal::Eq(a, b), Literal::Eq(c, d)) | (Literal::Neq(a, b), Literal::Neq(c, d)) => {
            (a, b, c, d)
        }
        _ => return Vec::new(),
    };
    let (a, b, c, d) = pair;
    let mut out = Vec::new();
    for (x, y) in [(c, d), (d, c)] {
        let mut s2 = s.clone();
        if match_term(a, x, &mut s2) && match_term(b, y, &mut s2) {
            out.push(s2);
        }
    }
    out
}

/// Whether some instance of `c` is a sub-multiset of `target`.
fn subsumes(c: &[Literal], target: &[Literal], s: &Subst) -> bool {
    let Some((first, rest)) = c.split_first() else {
        return true;
    };
    target.iter().any(|t| {
        match_literal(first, t, s)
            .iter()
            .any(|s2| subsumes(rest, target, s2))
    })
}

/// Drops `$F` and `t != t`, merges duplicates; `None` for tautologies.
fn simplify(c: Clause) -> Option<Clause> {
    let mut out: Clause = Vec::with_capacity(c.len());
    for lit in c {
        match &lit {
            Literal::False => continue,
            Literal::Neq(l, r) if l == r => continue,
            Literal::Eq(l, r) if l == r => return None,
            _ => {}
        }
        if !out.contains(&lit) {
            out.push(lit);
        }
    }
    Some(out)
}

fn clause_size(c: &[Literal]) -> usize {
    c.iter()
        .filter_map(|l| l.sides())
        .map(|(l, r)| l.size() + r.size())
        .sum()
}

/// Rebuilds `t` with each unifiable non-variable subterm replaced by `to`.
fn rewrites(t: &Term, from: &Term, to: &Term, out: &mut Vec<(Term, Subst)>) {
    if t.is_var() {
        return;
    }
    let mut s = Subst::new();
    if unify(from, t, &mut s) {
        out.push((to.clone(), s));
    }
    if let Term::App(op, l, r) = t {
        let mut inner = Vec::new();
        rewrites(l, from, to, &mut inner);
        for (nl, s) in inner.drain(..) {
            out.push((Term::app(*op, nl, (**r).clone()), s));
        }
        rewrites(r, from, to, &mut inner);
        for (nr, s) in inner {
            out.push((Term::app(*op, (**l).clone(), nr), s));
        }
    }
}

/// Paramodulates `from -> to` into every position of `into`.
fn paramodulate(into: &[Literal], from: &Term, to: &Term, out: &mut Vec<Clause>) {
    if from.is_var() {
        return;
    }
    for (i, lit) in into.iter().enumerate() {
        let Some((l, r)) = lit.sides() else { continue };
        let mut found = Vec::new();
        rewrites(l, from, to, &mut found);
        let left_count = found.len();
        rewrites(r, from, to, &mut found);
        for (k, (nt, s)) in found.into_iter().enumerate() {
            let new_lit = if k < left_count {
                rebuild(lit, nt, r.clone())
            } else {
                rebuild(lit, l.clone(), nt)
            };
            let mut c: Clause = into.to_vec();
            c[i] = new_lit;
            out.push(apply_clause(&c, &s));
        }
    }
}

fn rebuild(lit: &Literal, l: Term, r: Term) -> Literal {
    match lit {
        Literal::Eq(..) => Literal::Eq(l, r),
        Literal::Neq(..) => Literal::Neq(l, r),
        Literal::False => Literal::False,
    }
}

fn canonical_key(c: &[Literal]) -> String {
    fn blind(t: &Term, out: &mut String) {
        match t {
            Term::Var(_) => out.push('_'),
            Term::Const(k) => out.push_str(&format!("c{k}")),
            Term::App(op, l, r) => {
                out.push(if *op == Op::Star { '*' } else { 'm' });
                out.push('(');
                blind(l, out);
                out.push(',');
                blind(r, out);
                out.push(')');
            }
        }
    }
    fn named(t: &Term, map: &mut HashMap<Sym, usize>, out: &mut String) {
        match t {
            Term::Var(v) => {
                let n = map.len();
                let k = *map.entry(*v).or_insert(n);
                out.push_str(&format!("v{k}"));
            }
            Term::Const(k) => out.push_str(&format!("c{k}")),
            Term::App(op, l, r) => {
                out.push(if *op == Op::Star { '*' } else { 'm' });
                out.push('(');
                named(l, map, out);
                out.push(',');
                named(r, map, out);
                out.push(')');
            }
        }
    }
    let mut lits: Vec<(String, &Term, &Term, bool)> = c
        .iter()
        .filter_map(|lit| {
            let pos = matches!(lit, Literal::Eq(..));
            lit.sides().map(|(l, r)| {
                let (mut bl, mut br) = (String::new(), String::new());
                blind(l, &mut bl);
                blind(r, &mut br);
                if bl <= br {
                    (format!("{pos}{bl}={br}"), l, r, pos)
                } else {
                    (format!("{pos}{br}={bl}"), r, l, pos)
                }
            })
        })
        .collect();
    lits.sort_by(|a, b| a.0.cmp(&b.0));
    let mut map = HashMap::new();
    let mut out = String::new();
    for (_, l, r, pos) in lits {
        out.push(if pos { '+' } else { '-' });
        named(l, &mut map, &mut out);
        out.push('=');
        named(r, &mut map, &mut out);
        out.push('|');
    }
    out
}

struct Search<'a> {
    parents: Vec<Clause>,
    target: &'a [Literal],
    budget: usize,
    nodes: usize,
    next_fresh: Sym,
    size_cap: usize,
    seen: HashMap<String, usize>,
}

impl Search<'_> {
    fn fresh(&mut self, c: &[Literal]) -> Clause {
        let mut vars = Vec::new();
        for lit in c {
            if let Some((l, r)) = lit.sides() {
                l.vars(&mut vars);
                r.vars(&mut vars);
            }
        }
        let map: HashMap<Sym, Sym> = vars
            .into_iter()
            .map(|v| {
                self.next_fresh += 1;
                (v, self.next_fresh)
            })
            .collect();
        c.iter().map(|l| l.map_terms(|t| t.rename(&map))).collect()
    }

    fn successors(&mut self, c: &[Literal]) -> Vec<Clause> {
        let mut out = Vec::new();
        let parents = self.parents.clone();
        for p in &parents {
            if let [Literal::Eq(..)] = p.as_slice() {
                let p = self.fresh(p);
                let Literal::Eq(l, r) = &p[0] else {
                    unreachable!()
                };
                paramodulate(c, l, r, &mut out);
                paramodulate(c, r, l, &mut out);
            }
        }
        if let [Literal::Eq(l, r)] = c {
            for p in &parents {
                let p = self.fresh(p);
                paramodulate(&p, l, r, &mut out);
                paramodulate(&p, r, l, &mut out);
            }
        }
        for (i, lit) in c.iter().enumerate() {
            if let Literal::Neq(l, r) = lit {
                let mut s = Subst::new();
                if unify(l, r, &mut s) {
                    let mut rest = c.to_vec();
                    rest.remove(i);
                    out.push(apply_clause(&rest, &s));
                }
            }
            for p in &parents {
                let [unit] = p.as_slice() else { continue };
                let opposite = matches!(
                    (lit, unit),
                    (Literal::Neq(..), Literal::Eq(..)) | (Literal::Eq(..), Literal::Neq(..))
                );
                if !opposite {
                    continue;
                }
                let p = self.fresh(p);
                let (Some((a, b)), Some((u, v))) = (lit.sides(), p[0].sides()) else {
                    continue;
                };
                for (x, y) in [(u, v), (v, u)] {
                    let mut s = Subst::new();
                    if unify(a, x, &mut s) && unify(b, y, &mut s) {
                        let mut rest = c.to_vec();
                        rest.remove(i);
                        out.push(apply_clause(&rest, &s));
                    }
                }
            }
        }
        out.into_iter()
            .filter_map(simplify)
            .filter(|c| clause_size(c) <= self.size_cap)
            .collect()
    }

    /// Depth-limited DFS; `Some(depth)` when the target is reached.
    fn dfs(&mut self, c: &[Literal], depth: usize, limit: usize) -> Option<usize> {
        if subsumes(c, self.target, &Subst::new()) {
            return Some(depth);
        }
        if depth == limit || self.nodes >= self.budget {
            return None;
        }
        for next in self.successors(c) {
            if self.nodes >= self.budget {
                return None;
            }
            self.nodes += 1;
            let key = canonical_key(&next);
            let remaining = limit - depth - 1;
            match self.seen.get(&key) {
                Some(&r) if r >= remaining => continue,
                _ => {
                    self.seen.insert(key, remaining);
                }
            }
            if let Some(d) = self.dfs(&next, depth + 1, limit) {
                return Some(d);
            }
        }
        None
    }
}

/// Attempts to re-derive a derived step from its cited parents.
pub fn replay_step(t: &ProofTrace, id: u64, budget: usize) -> Result<ReplayStatus, ProofError> {
    let steps = index(t);
    let step = steps
        .get(&id)
        .filter(|s| !s.is_input())
        .ok_or(ProofError::UnknownStep(id))?;
    let target: Clause = step
        .literals
        .iter()
        .filter(|l| **l != Literal::False)
        .cloned()
        .collect();

    let mut parent_ids = step.parents.clone();
    parent_ids.sort_unstable();
    parent_ids.dedup();
    let parents: Vec<Clause> = parent_ids
        .iter()
        .filter_map(|p| steps.get(p))
        .map(|s| {
            s.literals
                .iter()
                .filter(|l| **l != Literal::False)
                .cloned()
                .collect()
        })
        .collect();

    // negating a goal: `s != t` as an instance of a goal equation `l = r`
    if let [Literal::Neq(a, b)] = target.as_slice() {
        let denied = Literal::Eq(a.clone(), b.clone());
        let is_denial = parent_ids.iter().filter_map(|p| steps.get(p)).any(|s| {
            s.has_label("goal") && matches!(s.literals.as_slice(), [lit @ Literal::Eq(..)] if subsumes(std::slice::from_ref(lit), std::slice::from_ref(&denied), &Subst::new()))
        });
        if is_denial {
            return Ok(ReplayStatus::Verified {
                inferences: 1,
                nodes: 0,
            });
        }
    }

    let max_vars = t
        .steps
        .iter()
        .flat_map(|s| s.literals.iter().filter_map(|l| l.sides()))
        .filter_map(|(l, r)| l.max_var().max(r.max_var()))
        .max()
        .unwrap_or(0);
    let biggest = parents
        .iter()
        .map(|c| clause_size(c))
        .chain([clause_size(&target)])
        .max()
        .unwrap_or(0);
    let mut search = Search {
        parents,
        target: &target,
        budget,
        nodes: 0,
        next_fresh: FRESH_BASE.max(max_vars + 1),
        size_cap: 2 * biggest + 8,
        seen: HashMap::new(),
    };

    for limit in 0..=MAX_DEPTH {
        search.seen.clear();
        let starts: Vec<Clause> = search
            .parents
            .clone()
            .iter()
            .map(|p| search.fresh(p))
            .collect();
        for start in starts {
            if let Some(inferences) = search.dfs(&start, 0, limit) {
                return Ok(ReplayStatus::Verified {
                    inferences,
                    nodes: search.nodes,
                });
            }
        }
        if search.nodes >= budget {
            break;
        }
    }
    Ok(ReplayStatus::Unverified {
        nodes: search.nodes,
    })
}
