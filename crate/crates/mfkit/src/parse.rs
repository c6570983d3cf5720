//! Polynomial expression parser.
//!
//! Grammar: identifiers `[a-zA-Z][a-zA-Z0-9_]*`, integer and rational literals
//! `a/b`, operators `+ - * ^`, parentheses; whitespace insignificant.
//! Example: `x^3 + 3*x*y^2 - 1/2*z^2`.
//!
//! Variables auto-register in first-appearance order unless the caller pins
//! the ring up front.

use crate::error::Error;
use crate::poly::{MultiPoly, PolyRing};
use crate::scalar::{Field, Scalar};
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(u64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse {
            line: self.line,
            col: self.col,
            msg: msg.to_string(),
        }
    }

    fn bump(&mut self) -> u8 {
        let c = self.src[self.pos];
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        c
    }

    fn next_tok(&mut self) -> Result<Option<(Tok, usize, usize)>, Error> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.bump();
        }
        if self.pos >= self.src.len() {
            return Ok(None);
        }
        let (line, col) = (self.line, self.col);
        let c = self.src[self.pos];
        let tok = match c {
            b'+' => {
                self.bump();
                Tok::Plus
            }
            b'-' => {
                self.bump();
                Tok::Minus
            }
            b'*' => {
                self.bump();
                Tok::Star
            }
            b'/' => {
                self.bump();
                Tok::Slash
            }
            b'^' => {
                self.bump();
                Tok::Caret
            }
            b'(' => {
                self.bump();
                Tok::LParen
            }
            b')' => {
                self.bump();
                Tok::RParen
            }
            b'0'..=b'9' => {
                let mut v: u64 = 0;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    v = v
                        .checked_mul(10)
                        .and_then(|v| v.checked_add((self.src[self.pos] - b'0') as u64))
                        .ok_or_else(|| self.err("integer literal too large"))?;
                    self.bump();
                }
                Tok::Num(v)
            }
            c if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.bump();
                }
                Tok::Ident(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
            }
            _ => return Err(self.err(&format!("unexpected character '{}'", c as char))),
        };
        Ok(Some((tok, line, col)))
    }
}

/// Recursive-descent parser building `MultiPoly` values directly.
struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    ring: Arc<PolyRing>,
    ring_fixed: bool,
    field: Field,
}

impl Parser {
    fn err_at(&self, msg: &str) -> Error {
        let (line, col) = self
            .toks
            .get(self.pos)
            .map(|&(_, l, c)| (l, c))
            .unwrap_or_else(|| {
                self.toks
                    .last()
                    .map(|&(_, l, c)| (l, c + 1))
                    .unwrap_or((1, 1))
            });
        Error::Parse {
            line,
            col,
            msg: msg.to_string(),
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _, _)| t)
    }

    fn advance(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn var_poly(&mut self, name: &str) -> Result<MultiPoly, Error> {
        if let Some(i) = self.ring.var_index(name) {
            return Ok(MultiPoly::var(&self.ring, i));
        }
        if self.ring_fixed {
            return Err(self.err_at(&format!("unknown variable '{name}'")));
        }
        // Auto-register: rebuild the ring with the new variable appended and
        // lift nothing (variables only ever grow during a single parse).
        let mut vars = self.ring.vars.clone();
        vars.push(name.to_string());
        self.ring = Arc::new(PolyRing {
            vars,
            weights: None,
        });
        Ok(MultiPoly::var(&self.ring, self.ring.arity() - 1))
    }

    // expr := term (('+'|'-') term)*
    fn expr(&mut self) -> Result<MultiPoly, Error> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.advance();
                    let t = self.term()?;
                    acc = self.relift(acc).add(&self.relift(t));
                }
                Some(Tok::Minus) => {
                    self.advance();
                    let t = self.term()?;
                    acc = self.relift(acc).sub(&self.relift(t));
                }
                _ => return Ok(acc),
            }
        }
    }

    // term := factor (('*'|'/') factor)*   -- '/' only for scalar literals
    fn term(&mut self) -> Result<MultiPoly, Error> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.advance();
                    let t = self.factor()?;
                    acc = self.relift(acc).mul(&self.relift(t));
                }
                Some(Tok::Slash) => {
                    self.advance();
                    let t = self.factor()?;
                    let c = scalar_of(&t)
                        .ok_or_else(|| self.err_at("division only by scalar literals"))?;
                    if c.is_zero() {
                        return Err(self.err_at("division by zero"));
                    }
                    acc = acc.scale(&c.inv());
                }
                _ => return Ok(acc),
            }
        }
    }

    // factor := ('-')* atom ('^' number)?
    fn factor(&mut self) -> Result<MultiPoly, Error> {
        if let Some(Tok::Minus) = self.peek() {
            self.advance();
            let f = self.factor()?;
            return Ok(f.neg());
        }
        let mut base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.advance();
            match self.advance() {
                Some(Tok::Num(n)) => {
                    let n = u32::try_from(n).map_err(|_| self.err_at("exponent too large"))?;
                    base = self.relift(base).pow(n);
                }
                _ => return Err(self.err_at("expected integer exponent after '^'")),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<MultiPoly, Error> {
        let here = self.err_at("expected a term");
        match self.advance() {
            Some(Tok::Num(n)) => Ok(MultiPoly::constant(
                &self.ring,
                self.field
                    .from_i64(i64::try_from(n).map_err(|_| self.err_at("literal too large"))?),
            )),
            Some(Tok::Ident(name)) => self.var_poly(&name),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                match self.advance() {
                    Some(Tok::RParen) => Ok(e),
                    _ => Err(self.err_at("expected ')'")),
                }
            }
            _ => Err(here),
        }
    }

    /// The ring may have grown since `p` was built; lift it into the current one.
    fn relift(&self, p: MultiPoly) -> MultiPoly {
        if p.ring == self.ring {
            return p;
        }
        let map: Vec<usize> = (0..p.ring.arity()).collect();
        p.lift_to(&self.ring, &map)
    }
}

fn scalar_of(p: &MultiPoly) -> Option<Scalar> {
    if p.is_zero() {
        return Some(Scalar::from_int(0));
    }
    if p.terms.len() == 1 {
        if let Some((m, c)) = p.leading() {
            if m.is_one() {
                return Some(c.clone());
            }
        }
    }
    None
}

/// Parses `src` with variables auto-registered in first-appearance order.
pub fn parse_poly(src: &str, field: Field) -> Result<MultiPoly, Error> {
    parse_in(src, field, None)
}

/// Parses `src` against a fixed ring; unknown variables are an error.
pub fn parse_poly_in(src: &str, field: Field, ring: &Arc<PolyRing>) -> Result<MultiPoly, Error> {
    parse_in(src, field, Some(ring.clone()))
}

fn parse_in(src: &str, field: Field, ring: Option<Arc<PolyRing>>) -> Result<MultiPoly, Error> {
    let mut lx = Lexer::new(src);
    let mut toks = Vec::new();
    while let Some(t) = lx.next_tok()? {
        toks.push(t);
    }
    let (ring, fixed) = match ring {
        Some(r) => (r, true),
        None => (PolyRing::new(&[]), false),
    };
    let mut p = Parser {
        toks,
        pos: 0,
        ring,
        ring_fixed: fixed,
        field,
    };
    let out = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err_at("trailing input"));
    }
    Ok(p.relift(out))
}
