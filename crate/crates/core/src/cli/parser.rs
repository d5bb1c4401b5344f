//! Field input grammar: `P = <expr> ; Q = <expr>`.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' exponent)*
//! atom  := number | 'x' | 'y' | '(' expr ')'
//! ```
//!
//! Numbers may be integers or decimals (`0.25` is read as `1/4`). Division is
//! only allowed by constants. A quotient of two literals folds into a single
//! rational literal, so `1/2*x` is `Mul(Num(1/2), x)`.

use crate::error::{Error, Result};
use crate::poly::{int, BiPoly, Rational};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
}

/// Expression tree. `Num` is never negative; signs live in `Neg`.
#[derive(Clone, Debug, PartialEq)]
pub enum Ast {
    Num(Rational),
    Var(Var),
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, u32),
}

impl Ast {
    /// Builds `a / b`, folding literal quotients.
    pub fn div(a: Ast, b: Ast) -> Ast {
        match (&a, &b) {
            (Ast::Num(p), Ast::Num(q)) if !q.is_zero() => Ast::Num(p / q),
            _ => Ast::Div(Box::new(a), Box::new(b)),
        }
    }

    pub fn to_poly(&self) -> std::result::Result<BiPoly, String> {
        Ok(match self {
            Ast::Num(q) => BiPoly::constant(q.clone()),
            Ast::Var(Var::X) => BiPoly::x(),
            Ast::Var(Var::Y) => BiPoly::y(),
            Ast::Neg(a) => a.to_poly()?.neg(),
            Ast::Add(a, b) => a.to_poly()?.add(&b.to_poly()?),
            Ast::Sub(a, b) => a.to_poly()?.sub(&b.to_poly()?),
            Ast::Mul(a, b) => a.to_poly()?.mul(&b.to_poly()?),
            Ast::Div(a, b) => {
                let d = b.to_poly()?;
                if d.total_degree().unwrap_or(0) > 0 {
                    return Err("division by a non-constant".into());
                }
                let c = d.coeff(0, 0);
                if c.is_zero() {
                    return Err("division by zero".into());
                }
                a.to_poly()?.scale(&(int(1) / c))
            }
            Ast::Pow(a, n) => a.to_poly()?.pow(*n),
        })
    }

    fn prec(&self) -> u8 {
        match self {
            Ast::Add(..) | Ast::Sub(..) => 1,
            Ast::Mul(..) | Ast::Div(..) => 2,
            Ast::Neg(_) => 3,
            Ast::Pow(..) => 4,
            Ast::Num(q) if !q.is_integer() => 0,
            _ => 5,
        }
    }
}

fn wrap(f: &mut fmt::Formatter<'_>, a: &Ast, paren: bool) -> fmt::Result {
    if paren {
        write!(f, "({a})")
    } else {
        write!(f, "{a}")
    }
}

// Prints with just enough parentheses that re-parsing gives the same tree.
impl fmt::Display for Ast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ast::Num(q) if q.is_integer() => write!(f, "{}", q.numer()),
            Ast::Num(q) => write!(f, "({}/{})", q.numer(), q.denom()),
            Ast::Var(Var::X) => write!(f, "x"),
            Ast::Var(Var::Y) => write!(f, "y"),
            Ast::Neg(a) => {
                write!(f, "-")?;
                wrap(f, a, a.prec() < 3 && a.prec() != 0)
            }
            Ast::Add(a, b) | Ast::Sub(a, b) => {
                let op = if matches!(self, Ast::Add(..)) { "+" } else { "-" };
                wrap(f, a, false)?;
                write!(f, " {op} ")?;
                wrap(f, b, b.prec() == 1)
            }
            Ast::Mul(a, b) | Ast::Div(a, b) => {
                let op = if matches!(self, Ast::Mul(..)) { "*" } else { "/" };
                wrap(f, a, a.prec() == 1)?;
                write!(f, "{op}")?;
                wrap(f, b, b.prec() == 1 || b.prec() == 2)
            }
            Ast::Pow(a, n) => {
                wrap(f, a, a.prec() < 5 && a.prec() != 0)?;
                write!(f, "^{n}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Sym(char),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            let q = decimal(&s).ok_or(Error::Parse { line: l0, col: c0, msg: format!("bad number '{s}'") })?;
            out.push(Token { tok: Tok::Num(q), line: l0, col: c0 });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), line: l0, col: c0 });
            continue;
        }
        if "+-*/^()=;".contains(c) {
            out.push(Token { tok: Tok::Sym(c), line: l0, col: c0 });
            i += 1;
            col += 1;
            continue;
        }
        return Err(Error::Parse { line: l0, col: c0, msg: format!("unexpected character '{c}'") });
    }
    out.push(Token { tok: Tok::End, line, col });
    Ok(out)
}

/// Exact value of a decimal literal such as `12`, `0.25` or `3.`.
pub fn decimal(s: &str) -> Option<Rational> {
    let (ip, fp) = s.split_once('.').unwrap_or((s, ""));
    if (ip.is_empty() && fp.is_empty()) || fp.contains('.') {
        return None;
    }
    let digits = format!("{ip}{fp}");
    let n: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let d = num_traits::pow(BigInt::from(10), fp.len());
    Some(Rational::new(n, d))
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, t: &Token, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { line: t.line, col: t.col, msg: msg.into() })
    }

    fn is_sym(&self, c: char) -> bool {
        self.peek().tok == Tok::Sym(c)
    }

    fn expect(&mut self, c: char) -> Result<()> {
        let t = self.next();
        if t.tok != Tok::Sym(c) {
            return self.err(&t, format!("expected '{c}'"));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Ast> {
        let mut a = self.term()?;
        loop {
            if self.is_sym('+') {
                self.next();
                a = Ast::Add(Box::new(a), Box::new(self.term()?));
            } else if self.is_sym('-') {
                self.next();
                a = Ast::Sub(Box::new(a), Box::new(self.term()?));
            } else {
                return Ok(a);
            }
        }
    }

    fn term(&mut self) -> Result<Ast> {
        let mut a = self.unary()?;
        loop {
            if self.is_sym('*') {
                self.next();
                a = Ast::Mul(Box::new(a), Box::new(self.unary()?));
            } else if self.is_sym('/') {
                let t = self.next();
                let b = self.unary()?;
                if let Ok(d) = b.to_poly() {
                    if d.is_zero() {
                        return self.err(&t, "division by zero");
                    }
                    if d.total_degree().unwrap_or(0) > 0 {
                        return self.err(&t, "division by a non-constant");
                    }
                }
                a = Ast::div(a, b);
            } else {
                return Ok(a);
            }
        }
    }

    fn unary(&mut self) -> Result<Ast> {
        if self.is_sym('-') {
            self.next();
            return Ok(Ast::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Ast> {
        let mut a = self.atom()?;
        while self.is_sym('^') {
            self.next();
            let t = self.peek().clone();
            let neg = self.is_sym('-');
            if neg {
                self.next();
            }
            let e = self.atom()?;
            let v = e.to_poly().map_err(|m| Error::Parse { line: t.line, col: t.col, msg: m })?;
            if v.total_degree().unwrap_or(0) > 0 {
                return self.err(&t, "exponent must be a constant");
            }
            let mut q = v.coeff(0, 0);
            if neg {
                q = -q;
            }
            if q.is_negative() {
                return self.err(&t, "negative exponent");
            }
            if !q.is_integer() {
                return self.err(&t, "fractional exponent");
            }
            let n = q.to_integer().to_u32().filter(|&n| n <= 4096);
            let Some(n) = n else { return self.err(&t, "exponent too large") };
            a = Ast::Pow(Box::new(a), n);
        }
        Ok(a)
    }

    fn atom(&mut self) -> Result<Ast> {
        let t = self.next();
        match &t.tok {
            Tok::Num(q) => Ok(Ast::Num(q.clone())),
            Tok::Ident(s) if s == "x" => Ok(Ast::Var(Var::X)),
            Tok::Ident(s) if s == "y" => Ok(Ast::Var(Var::Y)),
            Tok::Ident(s) => self.err(&t, format!("unknown identifier '{s}'")),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Sym(c) => self.err(&t, format!("unexpected '{c}'")),
            Tok::End => self.err(&t, "unexpected end of input"),
        }
    }

    fn component(&mut self, name: &str) -> Result<Ast> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) if s == name => {}
            _ => return self.err(&t, format!("expected '{name} ='")),
        }
        self.expect('=')?;
        self.expr()
    }
}

/// Parses a single polynomial expression.
pub fn parse_expr(text: &str) -> Result<Ast> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let e = p.expr()?;
    let t = p.peek().clone();
    if t.tok != Tok::End {
        return p.err(&t, "unexpected trailing input");
    }
    Ok(e)
}

/// Parses `P = <expr> ; Q = <expr>` into its two trees.
pub fn parse_field_ast(text: &str) -> Result<(Ast, Ast)> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let a = p.component("P")?;
    p.expect(';')?;
    let b = p.component("Q")?;
    if p.is_sym(';') {
        p.next();
    }
    let t = p.peek().clone();
    if t.tok != Tok::End {
        return p.err(&t, "unexpected trailing input");
    }
    Ok((a, b))
}

/// Parses `P = <expr> ; Q = <expr>` into exact polynomials.
pub fn parse_field(text: &str) -> Result<(BiPoly, BiPoly)> {
    let (a, b) = parse_field_ast(text)?;
    let conv = |e: &Ast| e.to_poly().map_err(|m| Error::Parse { line: 1, col: 1, msg: m });
    Ok((conv(&a)?, conv(&b)?))
}

/// The canonical text form of a field, accepted back by [`parse_field`].
pub fn format_field(p: &BiPoly, q: &BiPoly) -> String {
    format!("P = {p}; Q = {q}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    #[test]
    fn spec_examples() {
        let (p, q) = parse_field("P = x^2 + y; Q = -x^3").unwrap();
        assert_eq!((p.to_string(), q.to_string()), ("x^2 + y".into(), "-x^3".into()));
        let (p, _) = parse_field("P = 1/2*x*y; Q = y^2").unwrap();
        assert_eq!(p.coeff(1, 1), rat(1, 2));
        match parse_field("P = x^(-1); Q = y") {
            Err(Error::Parse { msg, .. }) => assert_eq!(msg, "negative exponent"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn decimals_are_exact() {
        let (p, q) = parse_field("P = 0.25*x; Q = 1.5*y").unwrap();
        assert_eq!(p.coeff(1, 0), rat(1, 4));
        assert_eq!(q.coeff(0, 1), rat(3, 2));
    }

    #[test]
    fn error_positions() {
        match parse_field("P = x +\n  2*z; Q = y") {
            Err(Error::Parse { line, col, msg }) => {
                assert_eq!((line, col), (2, 5));
                assert!(msg.contains("'z'"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_field("P = x; Q = y/x"), Err(Error::Parse { .. })));
        assert!(matches!(parse_field("P = x^(1/2); Q = y"), Err(Error::Parse { .. })));
    }

    #[test]
    fn printing_reparses() {
        for s in ["-x*y", "-(x*y)", "x - (y - 1)", "(1/2)*x^2", "(-x)^3", "x/(2*3)", "--x", "x^2^3"] {
            let a = parse_expr(s).unwrap();
            assert_eq!(parse_expr(&a.to_string()).unwrap(), a, "{s} -> {a}");
        }
    }

    #[test]
    fn canonical_field_text_round_trips() {
        let (p, q) = parse_field("P = 3/7*x^2*y - y^3/2; Q = x^4 - 2").unwrap();
        let (p2, q2) = parse_field(&format_field(&p, &q)).unwrap();
        assert_eq!((p, q), (p2, q2));
    }
}
