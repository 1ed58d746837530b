//! Sequence expressions `n ↦ f(n)` over the complex numbers.
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := unary (("*" | "/") unary)*
//! unary  := ("-" | "+") unary | power
//! power  := atom ("^" unary)?
//! atom   := number | "n" | "i" | "pi" | func "(" expr ")" | "(" expr ")"
//! func   := exp | sin | cos | sqrt | conj | abs
//! ```

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::C64;

/// Longest accepted source text, in bytes.
pub const MAX_SOURCE_LEN: usize = 4096;

const MAX_DEPTH: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Exp,
    Sin,
    Cos,
    Sqrt,
    Conj,
    Abs,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "exp" => Func::Exp,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            "conj" => Func::Conj,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
            Func::Conj => "conj",
            Func::Abs => "abs",
        }
    }

    fn apply(self, z: C64) -> C64 {
        match self {
            Func::Exp => z.exp(),
            Func::Sin => z.sin(),
            Func::Cos => z.cos(),
            Func::Sqrt => z.sqrt(),
            Func::Conj => z.conj(),
            Func::Abs => C64::new(z.norm(), 0.0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    N,
    I,
    Pi,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

fn power(base: C64, exp: C64) -> C64 {
    if exp.im == 0.0 && exp.re.fract() == 0.0 && exp.re.abs() <= i32::MAX as f64 {
        return base.powi(exp.re as i32);
    }
    if base.im == 0.0 && base.re > 0.0 && exp.im == 0.0 {
        return C64::new(base.re.powf(exp.re), 0.0);
    }
    if base == C64::new(0.0, 0.0) {
        return if exp.re > 0.0 { base } else { C64::new(f64::NAN, f64::NAN) };
    }
    base.powc(exp)
}

impl Expr {
    pub fn eval(&self, n: f64) -> C64 {
        match self {
            Expr::Num(x) => C64::new(*x, 0.0),
            Expr::N => C64::new(n, 0.0),
            Expr::I => C64::new(0.0, 1.0),
            Expr::Pi => C64::new(std::f64::consts::PI, 0.0),
            Expr::Neg(e) => -e.eval(n),
            Expr::Bin(op, a, b) => {
                let (x, y) = (a.eval(n), b.eval(n));
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => {
                        if y == C64::new(0.0, 0.0) {
                            C64::new(f64::NAN, f64::NAN)
                        } else {
                            x / y
                        }
                    }
                    BinOp::Pow => power(x, y),
                }
            }
            Expr::Call(f, e) => f.apply(e.eval(n)),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(x) => write!(f, "{x:?}"),
            Expr::N => f.write_str("n"),
            Expr::I => f.write_str("i"),
            Expr::Pi => f.write_str("pi"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Bin(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    depth: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            position: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn enter(&mut self) -> Result<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.error("expression nested too deeply"));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr> {
        self.enter()?;
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat(b'+') {
                BinOp::Add
            } else if self.eat(b'-') {
                BinOp::Sub
            } else {
                break;
            };
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat(b'*') {
                BinOp::Mul
            } else if self.eat(b'/') {
                BinOp::Div
            } else {
                break;
            };
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        self.enter()?;
        let out = if self.eat(b'-') {
            Expr::Neg(Box::new(self.unary()?))
        } else if self.eat(b'+') {
            self.unary()?
        } else {
            self.power()?
        };
        self.depth -= 1;
        Ok(out)
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.identifier(),
            Some(c) => Err(self.error(format!("unexpected character `{}`", c as char))),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let b = self.bytes;
        let digits = |p: &mut usize| {
            while *p < b.len() && b[*p].is_ascii_digit() {
                *p += 1;
            }
        };
        let mut p = self.pos;
        digits(&mut p);
        if p < b.len() && b[p] == b'.' {
            p += 1;
            digits(&mut p);
        }
        if p < b.len() && (b[p] == b'e' || b[p] == b'E') {
            let mut q = p + 1;
            if q < b.len() && (b[q] == b'+' || b[q] == b'-') {
                q += 1;
            }
            if q < b.len() && b[q].is_ascii_digit() {
                digits(&mut q);
                p = q;
            }
        }
        let text = &self.src[start..p];
        let value: f64 = text
            .parse()
            .map_err(|_| self.error(format!("invalid number `{text}`")))?;
        self.pos = p;
        Ok(Expr::Num(value))
    }

    fn identifier(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.bytes.len() && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_') {
            self.pos += 1;
        }
        let name = &self.src[start..self.pos];
        match name {
            "n" => return Ok(Expr::N),
            "i" => return Ok(Expr::I),
            "pi" => return Ok(Expr::Pi),
            _ => {}
        }
        let Some(func) = Func::from_name(name) else {
            return Err(Error::UnknownIdentifier {
                name: name.to_string(),
                position: start,
            });
        };
        if !self.eat(b'(') {
            return Err(self.error(format!("expected `(` after `{name}`")));
        }
        let arg = self.expr()?;
        if !self.eat(b')') {
            return Err(self.error("expected `)`"));
        }
        Ok(Expr::Call(func, Box::new(arg)))
    }
}

/// A parsed sequence expression together with its source text.
#[derive(Clone, Debug, PartialEq)]
pub struct SeqExpr {
    source: String,
    ast: Expr,
}

impl SeqExpr {
    pub fn parse(text: &str) -> Result<Self> {
        if text.len() > MAX_SOURCE_LEN {
            return Err(Error::Parse {
                position: MAX_SOURCE_LEN,
                message: format!("expression longer than {MAX_SOURCE_LEN} bytes"),
            });
        }
        let mut p = Parser {
            src: text,
            bytes: text.as_bytes(),
            pos: 0,
            depth: 0,
        };
        let ast = p.expr()?;
        if p.peek().is_some() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(SeqExpr {
            source: text.to_string(),
            ast,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn ast(&self) -> &Expr {
        &self.ast
    }

    /// The value at index `n` (1-based).
    pub fn eval(&self, n: usize) -> C64 {
        self.ast.eval(n as f64)
    }

    /// Canonical fully parenthesised form, which parses back to the same tree.
    pub fn canonical(&self) -> String {
        self.ast.to_string()
    }
}

impl fmt::Display for SeqExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl std::str::FromStr for SeqExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SeqExpr::parse(s)
    }
}

impl Serialize for SeqExpr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.source)
    }
}

impl<'de> Deserialize<'de> for SeqExpr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        SeqExpr::parse(&text).map_err(serde::de::Error::custom)
    }
}
