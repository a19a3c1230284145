//! Recursive-descent parser for ring element strings.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use super::graded::GradedData;
use super::poly::{Monomial, Poly};
use super::{Ring, RingElem};
use crate::error::{Error, Result};
use crate::field::Field;

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Debug)]
enum Expr {
    Num(BigInt),
    Var(String),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
}

fn tokenize(s: &str) -> Result<Vec<(usize, Token)>> {
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '+' => {
                out.push((i, Token::Plus));
                i += 1
            }
            '-' => {
                out.push((i, Token::Minus));
                i += 1
            }
            '*' => {
                out.push((i, Token::Star));
                i += 1
            }
            '/' => {
                out.push((i, Token::Slash));
                i += 1
            }
            '^' => {
                out.push((i, Token::Caret));
                i += 1
            }
            '(' => {
                out.push((i, Token::LParen));
                i += 1
            }
            ')' => {
                out.push((i, Token::RParen));
                i += 1
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = s[start..i].parse().expect("digits parse");
                out.push((start, Token::Num(n)));
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Token::Ident(s[start..i].to_string())));
            }
            other => {
                return Err(Error::Parse(format!(
                    "unexpected character {other:?} at offset {i} in {s:?}"
                )))
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a str,
    tokens: Vec<(usize, Token)>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn err(&self, what: &str) -> Error {
        let offset = self
            .tokens
            .get(self.pos)
            .map(|(o, _)| *o)
            .unwrap_or(self.src.len());
        Error::Parse(format!("{what} at offset {offset} in {:?}", self.src))
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.pos += 1;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(Token::Slash) => {
                    self.pos += 1;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                // implicit multiplication: "2x", "x y", "3(x+1)"
                Some(Token::Ident(_)) | Some(Token::Num(_)) | Some(Token::LParen) => {
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.power()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(Token::Minus) => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some(Token::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek() == Some(&Token::Caret) {
            self.pos += 1;
            match self.tokens.get(self.pos).cloned() {
                Some((_, Token::Num(n))) => {
                    self.pos += 1;
                    let e: u32 = n.try_into().map_err(|_| self.err("exponent too large"))?;
                    Ok(Expr::Pow(Box::new(base), e))
                }
                _ => Err(self.err("expected a nonnegative integer exponent")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.tokens.get(self.pos).cloned() {
            Some((_, Token::Num(n))) => {
                self.pos += 1;
                Ok(Expr::Num(n))
            }
            Some((_, Token::Ident(name))) => {
                self.pos += 1;
                Ok(Expr::Var(name))
            }
            Some((_, Token::LParen)) => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(&Token::RParen) {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            _ => Err(self.err("expected a number, variable or '('")),
        }
    }
}

fn parse_expr(s: &str) -> Result<Expr> {
    let tokens = tokenize(s)?;
    if tokens.is_empty() {
        return Err(Error::Parse(format!("empty expression {s:?}")));
    }
    let mut p = Parser {
        src: s,
        tokens,
        pos: 0,
    };
    let e = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

/// Parses a polynomial in the free polynomial ring of `g` (no reduction).
pub(super) fn parse_poly(g: &GradedData, s: &str) -> Result<Poly> {
    fn eval(g: &GradedData, e: &Expr, src: &str) -> Result<Poly> {
        let f = &g.base;
        let n = g.nvars();
        Ok(match e {
            Expr::Num(v) => Poly::constant(f, n, f.from_bigint(v)),
            Expr::Var(name) => {
                let i =
                    g.vars.iter().position(|v| v == name).ok_or_else(|| {
                        Error::Parse(format!("unknown variable {name:?} in {src:?}"))
                    })?;
                Poly::monomial(Monomial::var(n, i), f.one())
            }
            Expr::Add(a, b) => eval(g, a, src)?.add(f, &eval(g, b, src)?),
            Expr::Sub(a, b) => eval(g, a, src)?.sub(f, &eval(g, b, src)?),
            Expr::Mul(a, b) => eval(g, a, src)?.mul(f, &eval(g, b, src)?),
            Expr::Neg(a) => eval(g, a, src)?.neg(f),
            Expr::Pow(a, k) => {
                let base = eval(g, a, src)?;
                let mut acc = Poly::constant(f, n, f.one());
                for _ in 0..*k {
                    acc = acc.mul(f, &base);
                }
                acc
            }
            Expr::Div(a, b) => {
                let num = eval(g, a, src)?;
                let den = eval(g, b, src)?;
                match den.terms.as_slice() {
                    [(m, c)] if m.degree() == 0 => num.scale(f, &f.inv(c)),
                    _ => {
                        return Err(Error::Parse(format!(
                            "division by a non-constant or zero in {src:?}"
                        )))
                    }
                }
            }
        })
    }
    eval(g, &parse_expr(s)?, s)
}

pub(super) fn parse_elem(ring: &Ring, s: &str) -> Result<RingElem> {
    fn eval(ring: &Ring, e: &Expr, src: &str) -> Result<RingElem> {
        Ok(match e {
            Expr::Num(v) => ring.from_bigint(v),
            Expr::Var(name) => ring
                .var_by_name(name)
                .ok_or_else(|| Error::Parse(format!("unknown variable {name:?} in {src:?}")))?,
            Expr::Add(a, b) => ring.add(&eval(ring, a, src)?, &eval(ring, b, src)?),
            Expr::Sub(a, b) => ring.sub(&eval(ring, a, src)?, &eval(ring, b, src)?),
            Expr::Mul(a, b) => ring.mul(&eval(ring, a, src)?, &eval(ring, b, src)?),
            Expr::Neg(a) => ring.neg(&eval(ring, a, src)?),
            Expr::Pow(a, k) => ring.pow(&eval(ring, a, src)?, *k),
            Expr::Div(a, b) => {
                let num = eval(ring, a, src)?;
                let den = eval(ring, b, src)?;
                if let (RingElem::Int(x), RingElem::Int(y)) = (&num, &den) {
                    if y.is_zero() || !x.is_multiple_of(y) {
                        return Err(Error::Parse(format!("inexact integer division in {src:?}")));
                    }
                    return Ok(RingElem::Int(x / y));
                }
                let inv = ring
                    .inverse(&den)
                    .ok_or_else(|| Error::Parse(format!("division by a non-unit in {src:?}")))?;
                ring.mul(&num, &inv)
            }
        })
    }
    eval(ring, &parse_expr(s)?, s)
}
