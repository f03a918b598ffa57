//! Piecewise-polynomial functions of one rational variable.
//!
//! Grammar (whitespace allowed between tokens, never inside a literal):
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor (("*" | "/") factor)*
//! factor := rational-literal | "x" | "(" expr ")"
//!         | "ifneg" "(" expr "," expr "," expr ")"
//! ```
//!
//! A literal such as `-3/7` is a single token, so `1/3` is the constant one
//! third while `1 / 3` is a division node. [`Expr`]'s `Display` prints the
//! fully parenthesized form, which parses back to the same tree.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::scalar::{Rational, RationalError};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(Rational),
    Var,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// `then` when `guard(x) < 0`, otherwise `otherwise` (including a zero guard).
    IfNeg {
        guard: Box<Expr>,
        then: Box<Expr>,
        otherwise: Box<Expr>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("{x} lies outside the domain [{lo}, {hi}]")]
    OutOfDomain {
        x: Rational,
        lo: Rational,
        hi: Rational,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unexpected {found:?} at position {position}, expected {expected}")]
    Unexpected {
        position: usize,
        found: char,
        expected: &'static str,
    },
    #[error("unexpected end of input at position {position}, expected {expected}")]
    UnexpectedEnd {
        position: usize,
        expected: &'static str,
    },
    #[error("unknown identifier {name:?} at position {position}")]
    UnknownIdentifier { position: usize, name: String },
    #[error("bad literal at position {position}: {source}")]
    BadLiteral {
        position: usize,
        source: RationalError,
    },
}

/// Anything that can be evaluated exactly at a rational point.
pub trait RationalMap {
    fn apply(&self, x: &Rational) -> Result<Rational, EvalError>;
}

impl RationalMap for Expr {
    fn apply(&self, x: &Rational) -> Result<Rational, EvalError> {
        self.eval(x)
    }
}

impl<F> RationalMap for F
where
    F: Fn(&Rational) -> Result<Rational, EvalError>,
{
    fn apply(&self, x: &Rational) -> Result<Rational, EvalError> {
        self(x)
    }
}

impl Expr {
    pub fn constant(value: Rational) -> Expr {
        Expr::Const(value)
    }

    pub fn add(lhs: Expr, rhs: Expr) -> Expr {
        Expr::Add(Box::new(lhs), Box::new(rhs))
    }

    pub fn sub(lhs: Expr, rhs: Expr) -> Expr {
        Expr::Sub(Box::new(lhs), Box::new(rhs))
    }

    pub fn mul(lhs: Expr, rhs: Expr) -> Expr {
        Expr::Mul(Box::new(lhs), Box::new(rhs))
    }

    pub fn div(lhs: Expr, rhs: Expr) -> Expr {
        Expr::Div(Box::new(lhs), Box::new(rhs))
    }

    pub fn if_neg(guard: Expr, then: Expr, otherwise: Expr) -> Expr {
        Expr::IfNeg {
            guard: Box::new(guard),
            then: Box::new(then),
            otherwise: Box::new(otherwise),
        }
    }

    pub fn parse(text: &str) -> Result<Expr, ParseError> {
        let mut parser = Parser { text, pos: 0 };
        let expr = parser.expr()?;
        parser.skip_ws();
        match parser.peek() {
            None => Ok(expr),
            Some(found) => Err(ParseError::Unexpected {
                position: parser.pos,
                found,
                expected: "operator or end of input",
            }),
        }
    }

    pub fn eval(&self, x: &Rational) -> Result<Rational, EvalError> {
        Ok(match self {
            Expr::Const(c) => c.clone(),
            Expr::Var => x.clone(),
            Expr::Add(l, r) => l.eval(x)? + r.eval(x)?,
            Expr::Sub(l, r) => l.eval(x)? - r.eval(x)?,
            Expr::Mul(l, r) => l.eval(x)? * r.eval(x)?,
            Expr::Div(l, r) => {
                let num = l.eval(x)?;
                let den = r.eval(x)?;
                num.checked_div(&den)
                    .map_err(|_| EvalError::DivisionByZero)?
            }
            Expr::IfNeg {
                guard,
                then,
                otherwise,
            } => {
                if guard.eval(x)?.is_negative() {
                    then.eval(x)?
                } else {
                    otherwise.eval(x)?
                }
            }
        })
    }

    /// Number of nodes on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var => 1,
            Expr::Add(l, r) | Expr::Sub(l, r) | Expr::Mul(l, r) | Expr::Div(l, r) => {
                1 + l.depth().max(r.depth())
            }
            Expr::IfNeg {
                guard,
                then,
                otherwise,
            } => 1 + guard.depth().max(then.depth()).max(otherwise.depth()),
        }
    }
}

impl FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Expr::parse(s)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var => f.write_str("x"),
            Expr::Add(l, r) => write!(f, "({l} + {r})"),
            Expr::Sub(l, r) => write!(f, "({l} - {r})"),
            Expr::Mul(l, r) => write!(f, "({l} * {r})"),
            Expr::Div(l, r) => write!(f, "({l} / {r})"),
            Expr::IfNeg {
                guard,
                then,
                otherwise,
            } => write!(f, "ifneg({guard}, {then}, {otherwise})"),
        }
    }
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn peek_second(&self) -> Option<char> {
        self.text[self.pos..].chars().nth(1)
    }

    fn bump(&mut self) {
        if let Some(c) = self.peek() {
            self.pos += c.len_utf8();
        }
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn expect(&mut self, want: char, expected: &'static str) -> Result<(), ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c == want => {
                self.bump();
                Ok(())
            }
            Some(found) => Err(ParseError::Unexpected {
                position: self.pos,
                found,
                expected,
            }),
            None => Err(ParseError::UnexpectedEnd {
                position: self.pos,
                expected,
            }),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('+') => {
                    self.bump();
                    lhs = Expr::add(lhs, self.term()?);
                }
                Some('-') => {
                    self.bump();
                    lhs = Expr::sub(lhs, self.term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('*') => {
                    self.bump();
                    lhs = Expr::mul(lhs, self.factor()?);
                }
                Some('/') => {
                    self.bump();
                    lhs = Expr::div(lhs, self.factor()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        const EXPECTED: &str = "literal, x, ifneg or '('";
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            None => Err(ParseError::UnexpectedEnd {
                position: start,
                expected: EXPECTED,
            }),
            Some('(') => {
                self.bump();
                let inner = self.expr()?;
                self.expect(')', "')'")?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => self.literal(start),
            Some('+' | '-') if self.peek_second().is_some_and(|c| c.is_ascii_digit()) => {
                self.literal(start)
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                while self.peek().is_some_and(|c| c.is_alphanumeric() || c == '_') {
                    self.bump();
                }
                match &self.text[start..self.pos] {
                    "x" => Ok(Expr::Var),
                    "ifneg" => {
                        self.expect('(', "'(' after ifneg")?;
                        let guard = self.expr()?;
                        self.expect(',', "','")?;
                        let then = self.expr()?;
                        self.expect(',', "','")?;
                        let otherwise = self.expr()?;
                        self.expect(')', "')'")?;
                        Ok(Expr::if_neg(guard, then, otherwise))
                    }
                    name => Err(ParseError::UnknownIdentifier {
                        position: start,
                        name: name.to_string(),
                    }),
                }
            }
            Some(found) => Err(ParseError::Unexpected {
                position: start,
                found,
                expected: EXPECTED,
            }),
        }
    }

    /// `[+-]digits[/digits]`; the slash belongs to the literal only when a
    /// digit follows it immediately.
    fn literal(&mut self, start: usize) -> Result<Expr, ParseError> {
        if matches!(self.peek(), Some('+' | '-')) {
            self.bump();
        }
        self.digits();
        if self.peek() == Some('/') && self.peek_second().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
            self.digits();
        }
        self.text[start..self.pos]
            .parse()
            .map(Expr::Const)
            .map_err(|source| ParseError::BadLiteral {
                position: start,
                source,
            })
    }

    fn digits(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
        }
    }
}
