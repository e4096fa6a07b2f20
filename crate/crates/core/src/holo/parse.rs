//! Recursive-descent parser for the expression language.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | base ('^' int)?
//! base   := number | 'i' | 'z'IDX | '(' expr ')'
//!         | 'exp(' expr ')' | 'plog(' expr ')'
//!         | 'hdot(' cvec ')' | 'conj(' const ')'
//! ```
//!
//! Numbers are decimal with an optional exponent and an optional `i`
//! suffix. `cvec` is a comma list of constants, optionally wrapped in its
//! own parentheses. Constant subtrees are folded to literals.

use num_complex::Complex;

use super::expr::Expr;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64, bool),
    Unit,
    Coord(usize),
    Func(&'static str),
    LParen,
    RParen,
    Comma,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    End,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tok::Num(x, _) => write!(f, "number {x}"),
            Tok::Unit => f.write_str("'i'"),
            Tok::Coord(j) => write!(f, "'z{}'", j + 1),
            Tok::Func(name) => write!(f, "'{name}'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::Comma => f.write_str("','"),
            Tok::Plus => f.write_str("'+'"),
            Tok::Minus => f.write_str("'-'"),
            Tok::Star => f.write_str("'*'"),
            Tok::Slash => f.write_str("'/'"),
            Tok::Caret => f.write_str("'^'"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn syntax(pos: usize, msg: impl Into<String>) -> Error {
    Error::Syntax { pos, msg: msg.into() }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let b = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'(' => out.push((Tok::LParen, start)),
            b')' => out.push((Tok::RParen, start)),
            b',' => out.push((Tok::Comma, start)),
            b'+' => out.push((Tok::Plus, start)),
            b'-' => out.push((Tok::Minus, start)),
            b'*' => out.push((Tok::Star, start)),
            b'/' => out.push((Tok::Slash, start)),
            b'^' => out.push((Tok::Caret, start)),
            b'0'..=b'9' | b'.' => {
                while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'.') {
                    i += 1;
                }
                if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
                    let mut j = i + 1;
                    if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
                        j += 1;
                    }
                    if j < b.len() && b[j].is_ascii_digit() {
                        while j < b.len() && b[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let lexeme = &text[start..i];
                let v: f64 = lexeme
                    .parse()
                    .map_err(|_| syntax(start, format!("malformed number `{lexeme}`")))?;
                let imag = i < b.len() && b[i] == b'i' && !b.get(i + 1).is_some_and(|x| x.is_ascii_alphanumeric());
                if imag {
                    i += 1;
                }
                out.push((Tok::Num(v, imag), start));
                continue;
            }
            b'a'..=b'z' | b'A'..=b'Z' => {
                while i < b.len() && b[i].is_ascii_alphabetic() {
                    i += 1;
                }
                let word = &text[start..i];
                let tok = match word {
                    "z" => {
                        let ds = i;
                        while i < b.len() && b[i].is_ascii_digit() {
                            i += 1;
                        }
                        if ds == i {
                            return Err(syntax(start, "expected a coordinate index after `z`"));
                        }
                        let idx: usize = text[ds..i]
                            .parse()
                            .map_err(|_| syntax(ds, "coordinate index too large"))?;
                        if idx == 0 {
                            return Err(syntax(start, "coordinates are 1-based (z1, z2, ...)"));
                        }
                        Tok::Coord(idx)
                    }
                    "i" => Tok::Unit,
                    "exp" => Tok::Func("exp"),
                    "plog" => Tok::Func("plog"),
                    "hdot" => Tok::Func("hdot"),
                    "conj" => Tok::Func("conj"),
                    _ => return Err(syntax(start, format!("unknown identifier `{word}`"))),
                };
                out.push((tok, start));
                continue;
            }
            _ => return Err(syntax(start, format!("unexpected character `{}`", c as char))),
        }
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    dim: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(syntax(self.pos(), format!("expected {what}")))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = fold(lhs + self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    lhs = fold(lhs - self.term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = fold(lhs * self.factor()?);
                }
                Tok::Slash => {
                    self.bump();
                    lhs = fold(lhs / self.factor()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(fold(-self.factor()?));
        }
        let base = self.base()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let neg = if *self.peek() == Tok::Minus {
                self.bump();
                true
            } else {
                false
            };
            let pos = self.pos();
            match self.bump() {
                Tok::Num(v, false) if v.fract() == 0.0 && v <= i32::MAX as f64 => {
                    let n = v as i32;
                    return Ok(fold(base.pow(if neg { -n } else { n })));
                }
                _ => return Err(syntax(pos, "exponent must be an integer")),
            }
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Expr> {
        let pos = self.pos();
        match self.bump() {
            Tok::Num(v, imag) => Ok(Expr::Lit(if imag {
                Complex::new(0.0, v)
            } else {
                Complex::new(v, 0.0)
            })),
            Tok::Unit => Ok(Expr::Lit(Complex::new(0.0, 1.0))),
            Tok::Coord(idx) => {
                if idx > self.dim {
                    Err(Error::IndexOutOfRange { index: idx, dim: self.dim })
                } else {
                    Ok(Expr::Coord(idx - 1))
                }
            }
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Func(name) => {
                self.expect(Tok::LParen, "`(` after function name")?;
                let e = match name {
                    "exp" => fold(self.expr()?.exp()),
                    "plog" => fold(self.expr()?.plog()),
                    "conj" => {
                        let inner_pos = self.pos();
                        let e = self.expr()?;
                        match e {
                            Expr::Lit(c) => Expr::Lit(c.conj()),
                            _ => return Err(Error::ConjNonConstant { pos: inner_pos }),
                        }
                    }
                    "hdot" => Expr::Hdot(self.cvec(pos)?),
                    _ => unreachable!(),
                };
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::End => Err(syntax(pos, "unexpected end of input")),
            t => Err(syntax(pos, format!("unexpected {t}"))),
        }
    }

    fn cvec(&mut self, pos: usize) -> Result<Vec<Complex<f64>>> {
        // `hdot((a, b))`: try the wrapped form first, fall back to a flat list.
        if *self.peek() == Tok::LParen {
            let save = self.at;
            self.bump();
            if let Ok(v) = self.const_list() {
                if *self.peek() == Tok::RParen {
                    self.bump();
                    if *self.peek() == Tok::RParen {
                        return self.check_len(v, pos);
                    }
                }
            }
            self.at = save;
        }
        let v = self.const_list()?;
        self.check_len(v, pos)
    }

    fn const_list(&mut self) -> Result<Vec<Complex<f64>>> {
        let mut out = Vec::new();
        loop {
            let p = self.pos();
            match self.expr()? {
                Expr::Lit(c) => out.push(c),
                _ => return Err(syntax(p, "hdot entries must be constants")),
            }
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                return Ok(out);
            }
        }
    }

    fn check_len(&self, v: Vec<Complex<f64>>, pos: usize) -> Result<Vec<Complex<f64>>> {
        if v.len() == self.dim {
            Ok(v)
        } else {
            Err(syntax(pos, format!("hdot needs {} entries, got {}", self.dim, v.len())))
        }
    }
}

fn fold(e: Expr) -> Expr {
    e.folded()
}

/// Parses `text` as an expression in `dim` variables.
pub fn parse(text: &str, dim: usize) -> Result<Expr> {
    if text.trim().is_empty() {
        return Err(syntax(0, "empty expression"));
    }
    let mut p = Parser { toks: lex(text)?, at: 0, dim };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(syntax(p.pos(), "unexpected trailing input"));
    }
    Ok(e)
}
