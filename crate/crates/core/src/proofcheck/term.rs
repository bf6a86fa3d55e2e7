use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

/// Interned symbol id. Variables and constants share one table per trace.
pub type Sym = u32;

/// Variables created during replay live above this id.
pub const FRESH_BASE: Sym = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Op {
    /// infix `*`
    Star,
    /// prefix `m(_, _)`
    Mean,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Sym),
    Const(Sym),
    App(Op, Box<Term>, Box<Term>),
}

impl Term {
    pub fn app(op: Op, l: Term, r: Term) -> Term {
        Term::App(op, Box::new(l), Box::new(r))
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn vars(&self, out: &mut Vec<Sym>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(*v);
                }
            }
            Term::Const(_) => {}
            Term::App(_, l, r) => {
                l.vars(out);
                r.vars(out);
            }
        }
    }

    pub fn max_var(&self) -> Option<Sym> {
        match self {
            Term::Var(v) => Some(*v),
            Term::Const(_) => None,
            Term::App(_, l, r) => l.max_var().max(r.max_var()),
        }
    }

    pub fn contains_const(&self, c: Sym) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Const(k) => *k == c,
            Term::App(_, l, r) => l.contains_const(c) || r.contains_const(c),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::App(_, l, r) => 1 + l.size() + r.size(),
            _ => 1,
        }
    }

    /// Applies a variable mapping, leaving unmapped variables alone.
    pub fn rename(&self, map: &HashMap<Sym, Sym>) -> Term {
        match self {
            Term::Var(v) => Term::Var(*map.get(v).unwrap_or(v)),
            Term::Const(c) => Term::Const(*c),
            Term::App(op, l, r) => Term::app(*op, l.rename(map), r.rename(map)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Literal {
    Eq(Term, Term),
    Neq(Term, Term),
    /// `$F`
    False,
}

impl Literal {
    pub fn sides(&self) -> Option<(&Term, &Term)> {
        match self {
            Literal::Eq(l, r) | Literal::Neq(l, r) => Some((l, r)),
            Literal::False => None,
        }
    }

    pub fn map_terms(&self, f: impl Fn(&Term) -> Term) -> Literal {
        match self {
            Literal::Eq(l, r) => Literal::Eq(f(l), f(r)),
            Literal::Neq(l, r) => Literal::Neq(f(l), f(r)),
            Literal::False => Literal::False,
        }
    }

    pub fn flipped(&self) -> Literal {
        match self {
            Literal::Eq(l, r) => Literal::Eq(r.clone(), l.clone()),
            Literal::Neq(l, r) => Literal::Neq(r.clone(), l.clone()),
            Literal::False => Literal::False,
        }
    }
}

/// Symbol table shared by every clause of a trace.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Symbols {
    names: Vec<String>,
    index: HashMap<String, Sym>,
}

impl Symbols {
    pub fn intern(&mut self, name: &str) -> Sym {
        if let Some(&s) = self.index.get(name) {
            return s;
        }
        let s = self.names.len() as Sym;
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), s);
        s
    }

    pub fn lookup(&self, name: &str) -> Option<Sym> {
        self.index.get(name).copied()
    }

    pub fn name(&self, s: Sym) -> String {
        match self.names.get(s as usize) {
            Some(n) => n.clone(),
            None => format!("v{}", s.saturating_sub(FRESH_BASE)),
        }
    }

    /// Names starting with `u`..`z` are variables.
    pub fn is_variable_name(name: &str) -> bool {
        matches!(name.chars().next(), Some('u'..='z'))
    }
}

pub struct Show<'a, T> {
    pub item: &'a T,
    pub symbols: &'a Symbols,
}

fn write_operand(f: &mut fmt::Formatter<'_>, t: &Term, syms: &Symbols) -> fmt::Result {
    if matches!(t, Term::App(Op::Star, _, _)) {
        write!(
            f,
            "({})",
            Show {
                item: t,
                symbols: syms
            }
        )
    } else {
        write!(
            f,
            "{}",
            Show {
                item: t,
                symbols: syms
            }
        )
    }
}

impl fmt::Display for Show<'_, Term> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let syms = self.symbols;
        match self.item {
            Term::Var(s) | Term::Const(s) => f.write_str(&syms.name(*s)),
            Term::App(Op::Mean, l, r) => write!(
                f,
                "m({},{})",
                Show {
                    item: &**l,
                    symbols: syms
                },
                Show {
                    item: &**r,
                    symbols: syms
                }
            ),
            Term::App(Op::Star, l, r) => {
                write_operand(f, l, syms)?;
                f.write_str(" * ")?;
                write_operand(f, r, syms)
            }
        }
    }
}

impl fmt::Display for Show<'_, Literal> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let syms = self.symbols;
        match self.item {
            Literal::False => f.write_str("$F"),
            Literal::Eq(l, r) => {
                write!(
                    f,
                    "{} = {}",
                    Show {
                        item: l,
                        symbols: syms
                    },
                    Show {
                        item: r,
                        symbols: syms
                    }
                )
            }
            Literal::Neq(l, r) => {
                write!(
                    f,
                    "{} != {}",
                    Show {
                        item: l,
                        symbols: syms
                    },
                    Show {
                        item: r,
                        symbols: syms
                    }
                )
            }
        }
    }
}

impl fmt::Display for Show<'_, Vec<Literal>> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, lit) in self.item.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(
                f,
                "{}",
                Show {
                    item: lit,
                    symbols: self.symbols
                }
            )?;
        }
        Ok(())
    }
}
