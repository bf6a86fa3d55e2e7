//! Tokenizer and recursive-descent parser for proof traces.
//!
//! ```text
//! line    := INT clause label* "." "[" idlist? "]" "."
//! clause  := literal ("|" literal)*
//! literal := "$F" | term "=" term | term "!=" term
//! term    := factor ("*" factor)*
//! factor  := IDENT | "m" "(" term "," term ")" | "(" term ")"
//! label   := "#" "label" "(" IDENT ")"
//! ```

use super::term::{Literal, Op, Symbols, Term};
use super::{ParseError, ProofStep, ProofTrace};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(u64),
    Ident(String),
    False,
    Eq,
    Neq,
    Star,
    LParen,
    RParen,
    Comma,
    Bar,
    Hash,
    Dot,
    LBrack,
    RBrack,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(n) => format!("integer {n}"),
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::False => "`$F`".into(),
        Tok::Eq => "`=`".into(),
        Tok::Neq => "`!=`".into(),
        Tok::Star => "`*`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Bar => "`|`".into(),
        Tok::Hash => "`#`".into(),
        Tok::Dot => "`.`".into(),
        Tok::LBrack => "`[`".into(),
        Tok::RBrack => "`]`".into(),
    }
}

fn tokenize(text: &str, first_line: usize) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let line_no = first_line + li;
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            let err = |msg: String| ParseError {
                line: line_no,
                col,
                message: msg,
            };
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            let (tok, len) = match c {
                '0'..='9' => {
                    let end = (i..chars.len())
                        .find(|&k| !chars[k].is_ascii_digit())
                        .unwrap_or(chars.len());
                    let s: String = chars[i..end].iter().collect();
                    // a digit run glued to letters is an identifier, e.g. `1a`
                    if end < chars.len() && (chars[end].is_alphabetic() || chars[end] == '_') {
                        return Err(err(format!("malformed token starting with `{s}`")));
                    }
                    let n = s
                        .parse()
                        .map_err(|_| err(format!("integer `{s}` out of range")))?;
                    (Tok::Int(n), end - i)
                }
                c if c.is_alphabetic() || c == '_' => {
                    let end = (i..chars.len())
                        .find(|&k| !(chars[k].is_alphanumeric() || chars[k] == '_'))
                        .unwrap_or(chars.len());
                    (Tok::Ident(chars[i..end].iter().collect()), end - i)
                }
                '$' => {
                    if chars.get(i + 1) == Some(&'F') {
                        (Tok::False, 2)
                    } else {
                        return Err(err("expected `$F`".into()));
                    }
                }
                '!' => {
                    if chars.get(i + 1) == Some(&'=') {
                        (Tok::Neq, 2)
                    } else {
                        return Err(err("expected `!=`".into()));
                    }
                }
                '=' => (Tok::Eq, 1),
                '*' => (Tok::Star, 1),
                '(' => (Tok::LParen, 1),
                ')' => (Tok::RParen, 1),
                ',' => (Tok::Comma, 1),
                '|' => (Tok::Bar, 1),
                '#' => (Tok::Hash, 1),
                '.' => (Tok::Dot, 1),
                '[' => (Tok::LBrack, 1),
                ']' => (Tok::RBrack, 1),
                other => return Err(err(format!("unexpected character `{other}`"))),
            };
            out.push(Spanned {
                tok,
                line: line_no,
                col,
            });
            i += len;
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [Spanned],
    pos: usize,
    symbols: Symbols,
    eof: (usize, usize),
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn error(&self, message: String) -> ParseError {
        let (line, col) = match self.toks.get(self.pos) {
            Some(s) => (s.line, s.col),
            None => self.eof,
        };
        ParseError { line, col, message }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        let found = match self.peek() {
            Some(t) => describe(t),
            None => "end of input".into(),
        };
        self.error(format!("expected {wanted}, found {found}"))
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(&describe(&tok)))
        }
    }

    fn int(&mut self) -> Result<u64, ParseError> {
        match self.peek() {
            Some(Tok::Int(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            _ => Err(self.unexpected("a step id")),
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    fn step(&mut self) -> Result<ProofStep, ParseError> {
        let id = self.int()?;
        let mut literals = vec![self.literal()?];
        while self.peek() == Some(&Tok::Bar) {
            self.pos += 1;
            literals.push(self.literal()?);
        }
        let mut labels = Vec::new();
        while self.peek() == Some(&Tok::Hash) {
            self.pos += 1;
            let kw = self.ident()?;
            if kw != "label" {
                self.pos -= 1;
                return Err(self.error(format!("expected `label`, found `{kw}`")));
            }
            self.expect(Tok::LParen)?;
            labels.push(self.ident()?);
            self.expect(Tok::RParen)?;
        }
        self.expect(Tok::Dot)?;
        self.expect(Tok::LBrack)?;
        let mut parents = Vec::new();
        if self.peek() != Some(&Tok::RBrack) {
            parents.push(self.int()?);
            while self.peek() == Some(&Tok::Comma) {
                self.pos += 1;
                parents.push(self.int()?);
            }
        }
        self.expect(Tok::RBrack)?;
        self.expect(Tok::Dot)?;
        Ok(ProofStep {
            id,
            literals,
            labels,
            parents,
        })
    }

    fn literal(&mut self) -> Result<Literal, ParseError> {
        if self.peek() == Some(&Tok::False) {
            self.pos += 1;
            return Ok(Literal::False);
        }
        let lhs = self.term()?;
        match self.peek() {
            Some(Tok::Eq) => {
                self.pos += 1;
                Ok(Literal::Eq(lhs, self.term()?))
            }
            Some(Tok::Neq) => {
                self.pos += 1;
                Ok(Literal::Neq(lhs, self.term()?))
            }
            _ => Err(self.unexpected("`=` or `!=`")),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let mut t = self.factor()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            t = Term::app(Op::Star, t, self.factor()?);
        }
        Ok(t)
    }

    fn factor(&mut self) -> Result<Term, ParseError> {
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if name == "m" && self.peek() == Some(&Tok::LParen) {
                    self.pos += 1;
                    let l = self.term()?;
                    self.expect(Tok::Comma)?;
                    let r = self.term()?;
                    self.expect(Tok::RParen)?;
                    return Ok(Term::app(Op::Mean, l, r));
                }
                let s = self.symbols.intern(&name);
                Ok(if Symbols::is_variable_name(&name) {
                    Term::Var(s)
                } else {
                    Term::Const(s)
                })
            }
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(Term::Const(self.symbols.intern(&n.to_string())))
            }
            _ => Err(self.unexpected("a term")),
        }
    }
}

pub fn parse_trace(text: &str) -> Result<ProofTrace, ParseError> {
    // optional free-text header: everything before the first line that
    // starts with a step id
    let mut header_lines = Vec::new();
    let mut body_start = None;
    let mut offset = 0;
    for (i, line) in text.split_inclusive('\n').enumerate() {
        if line.trim_start().starts_with(|c: char| c.is_ascii_digit()) {
            body_start = Some((i, offset));
            break;
        }
        header_lines.push(line.trim_end());
        offset += line.len();
    }
    let Some((first_line, byte_offset)) = body_start else {
        return Err(ParseError {
            line: text.lines().count().max(1),
            col: 1,
            message: "trace contains no steps".into(),
        });
    };
    let header = header_lines.iter().any(|l| !l.trim().is_empty()).then(|| {
        header_lines
            .iter()
            .map(|l| l.trim())
            .filter(|l| !l.is_empty())
            .collect::<Vec<_>>()
            .join("\n")
    });

    let body = &text[byte_offset..];
    let toks = tokenize(body, first_line + 1)?;
    let last_line = first_line + body.lines().count().max(1);
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        symbols: Symbols::default(),
        eof: (last_line, 1),
    };
    let mut steps = Vec::new();
    while p.pos < toks.len() {
        steps.push(p.step()?);
    }
    Ok(ProofTrace {
        header,
        steps,
        symbols: p.symbols,
    })
}
