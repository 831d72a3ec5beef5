//! Scalar expressions in two variables `u`, `v`.
//!
//! ```text
//! expr    := term (("+" | "-") term)*
//! term    := unary (("*" | "/") unary)*
//! unary   := "-" unary | power
//! power   := primary ("^" unary)?
//! primary := number | "u" | "v" | "pi" | func "(" expr ")" | "(" expr ")"
//! func    := sin | cos | tan | exp | log | sqrt | abs | sign
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-u^2` is
//! `-(u^2)` and `2^3^2` is `2^(3^2)`. `log` is the natural logarithm.
//! `sign` is included so derivatives of `abs` can be printed and reparsed.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("syntax error at byte {offset}: expected {}, found {found}", expected.join(" | "))]
pub struct ParseError {
    pub offset: usize,
    pub expected: Vec<String>,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("domain error in `{subexpr}`: {message}")]
pub struct EvalError {
    pub message: String,
    pub subexpr: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    U,
    V,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Abs,
    Sign,
}

impl Func {
    const ALL: [Func; 8] =
        [Func::Sin, Func::Cos, Func::Tan, Func::Exp, Func::Log, Func::Sqrt, Func::Abs, Func::Sign];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Sign => "sign",
        }
    }

    fn from_name(s: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Pi,
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

// ---------------------------------------------------------------------------
// parsing

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

enum Token {
    Num(f64),
    Ident(String),
    Sym(char),
    End,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    /// Returns the next token and its start offset without consuming it.
    fn peek(&mut self) -> (Token, usize, usize) {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let Some(c) = rest.chars().next() else {
            return (Token::End, start, start);
        };
        if c.is_ascii_digit() || c == '.' {
            let bytes = rest.as_bytes();
            let mut i = 0;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            return match rest[..i].parse::<f64>() {
                Ok(x) => (Token::Num(x), start, start + i),
                Err(_) => (Token::Sym('.'), start, start + i),
            };
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let len = rest
                .find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_'))
                .unwrap_or(rest.len());
            return (Token::Ident(rest[..len].to_string()), start, start + len);
        }
        (Token::Sym(c), start, start + c.len_utf8())
    }

    fn found(&mut self) -> (String, usize) {
        let (tok, start, end) = self.peek();
        let s = match tok {
            Token::End => "end of input".to_string(),
            _ => format!("`{}`", &self.src[start..end]),
        };
        (s, start)
    }

    fn error(&mut self, expected: &[&str]) -> ParseError {
        let (found, offset) = self.found();
        ParseError { offset, expected: expected.iter().map(|s| s.to_string()).collect(), found }
    }

    fn eat_sym(&mut self, sym: char) -> bool {
        let (tok, _, end) = self.peek();
        if matches!(tok, Token::Sym(c) if c == sym) {
            self.pos = end;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat_sym('+') {
                BinOp::Add
            } else if self.eat_sym('-') {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat_sym('*') {
                BinOp::Mul
            } else if self.eat_sym('/') {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat_sym('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.eat_sym('^') {
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        const EXPECTED: &[&str] = &["number", "`u`", "`v`", "`pi`", "function", "`(`", "`-`"];
        let (tok, _, end) = self.peek();
        match tok {
            Token::Num(x) => {
                self.pos = end;
                Ok(Expr::Num(x))
            }
            Token::Ident(name) => {
                let expr = match name.as_str() {
                    "u" => Expr::Var(Var::U),
                    "v" => Expr::Var(Var::V),
                    "pi" => Expr::Pi,
                    other => match Func::from_name(other) {
                        Some(f) => {
                            self.pos = end;
                            if !self.eat_sym('(') {
                                return Err(self.error(&["`(`"]));
                            }
                            let arg = self.expr()?;
                            if !self.eat_sym(')') {
                                return Err(self.error(&["`)`", "operator"]));
                            }
                            return Ok(Expr::Call(f, Box::new(arg)));
                        }
                        None => return Err(self.error(EXPECTED)),
                    },
                };
                self.pos = end;
                Ok(expr)
            }
            Token::Sym('(') => {
                self.pos = end;
                let inner = self.expr()?;
                if !self.eat_sym(')') {
                    return Err(self.error(&["`)`", "operator"]));
                }
                Ok(inner)
            }
            _ => Err(self.error(EXPECTED)),
        }
    }
}

/// Parses a complete expression; trailing input is an error.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { src, pos: 0 };
    let e = p.expr()?;
    let (tok, _, _) = p.peek();
    if !matches!(tok, Token::End) {
        return Err(p.error(&["operator", "end of input"]));
    }
    Ok(e)
}

impl std::str::FromStr for Expr {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

// ---------------------------------------------------------------------------
// printing

impl Expr {
    fn precedence(&self) -> u8 {
        match self {
            Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Num(x) if x.is_sign_negative() => 3,
            Expr::Bin(BinOp::Pow, ..) => 4,
            _ => 5,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        if self.precedence() < min_prec {
            write!(f, "(")?;
            self.write_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Expr::Num(x) => write!(f, "{x}"),
            Expr::Pi => write!(f, "pi"),
            Expr::Var(Var::U) => write!(f, "u"),
            Expr::Var(Var::V) => write!(f, "v"),
            Expr::Neg(e) => {
                write!(f, "-")?;
                e.write_at(f, 3)
            }
            Expr::Call(func, e) => {
                write!(f, "{}(", func.name())?;
                e.write_at(f, 0)?;
                write!(f, ")")
            }
            Expr::Bin(op, l, r) => {
                let (sym, lp, rp) = match op {
                    BinOp::Add => (" + ", 1, 2),
                    BinOp::Sub => (" - ", 1, 2),
                    BinOp::Mul => ("*", 2, 3),
                    BinOp::Div => ("/", 2, 3),
                    BinOp::Pow => ("^", 5, 3),
                };
                l.write_at(f, lp)?;
                write!(f, "{sym}")?;
                r.write_at(f, rp)
            }
        }
    }
}

/// Prints with the minimum parentheses needed to reparse the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

// ---------------------------------------------------------------------------
// evaluation

impl Expr {
    fn domain_error(&self, message: &str) -> EvalError {
        EvalError { message: message.to_string(), subexpr: self.to_string() }
    }

    pub fn eval(&self, u: f64, v: f64) -> Result<f64, EvalError> {
        let x = match self {
            Expr::Num(x) => *x,
            Expr::Pi => std::f64::consts::PI,
            Expr::Var(Var::U) => u,
            Expr::Var(Var::V) => v,
            Expr::Neg(e) => -e.eval(u, v)?,
            Expr::Bin(op, l, r) => {
                let a = l.eval(u, v)?;
                let b = r.eval(u, v)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(self.domain_error("division by zero"));
                        }
                        a / b
                    }
                    BinOp::Pow => {
                        if a < 0.0 && b.fract() != 0.0 {
                            return Err(self.domain_error("negative base with non-integer exponent"));
                        }
                        if a == 0.0 && b < 0.0 {
                            return Err(self.domain_error("zero to a negative power"));
                        }
                        a.powf(b)
                    }
                }
            }
            Expr::Call(func, e) => {
                let a = e.eval(u, v)?;
                match func {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Tan => a.tan(),
                    Func::Exp => a.exp(),
                    Func::Log => {
                        if a <= 0.0 {
                            return Err(self.domain_error("logarithm of a non-positive value"));
                        }
                        a.ln()
                    }
                    Func::Sqrt => {
                        if a < 0.0 {
                            return Err(self.domain_error("square root of a negative value"));
                        }
                        a.sqrt()
                    }
                    Func::Abs => a.abs(),
                    Func::Sign => {
                        if a > 0.0 {
                            1.0
                        } else if a < 0.0 {
                            -1.0
                        } else {
                            0.0
                        }
                    }
                }
            }
        };
        if !x.is_finite() && u.is_finite() && v.is_finite() {
            return Err(self.domain_error("non-finite result"));
        }
        Ok(x)
    }

    pub fn depends_on_vars(&self) -> bool {
        match self {
            Expr::Var(_) => true,
            Expr::Num(_) | Expr::Pi => false,
            Expr::Neg(e) | Expr::Call(_, e) => e.depends_on_vars(),
            Expr::Bin(_, l, r) => l.depends_on_vars() || r.depends_on_vars(),
        }
    }
}

pub fn eval(e: &Expr, u: f64, v: f64) -> Result<f64, EvalError> {
    e.eval(u, v)
}

// ---------------------------------------------------------------------------
// symbolic differentiation

fn num(x: f64) -> Expr {
    Expr::Num(x)
}

fn is_num(e: &Expr, x: f64) -> bool {
    matches!(e, Expr::Num(y) if *y == x)
}

fn add(a: Expr, b: Expr) -> Expr {
    if is_num(&a, 0.0) {
        b
    } else if is_num(&b, 0.0) {
        a
    } else {
        Expr::Bin(BinOp::Add, Box::new(a), Box::new(b))
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    if is_num(&b, 0.0) {
        a
    } else if is_num(&a, 0.0) {
        neg(b)
    } else {
        Expr::Bin(BinOp::Sub, Box::new(a), Box::new(b))
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    if is_num(&a, 0.0) || is_num(&b, 0.0) {
        num(0.0)
    } else if is_num(&a, 1.0) {
        b
    } else if is_num(&b, 1.0) {
        a
    } else {
        Expr::Bin(BinOp::Mul, Box::new(a), Box::new(b))
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    if is_num(&a, 0.0) {
        num(0.0)
    } else if is_num(&b, 1.0) {
        a
    } else {
        Expr::Bin(BinOp::Div, Box::new(a), Box::new(b))
    }
}

fn pow(a: Expr, b: Expr) -> Expr {
    if is_num(&b, 1.0) {
        a
    } else if is_num(&b, 0.0) {
        num(1.0)
    } else {
        Expr::Bin(BinOp::Pow, Box::new(a), Box::new(b))
    }
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Num(0.0) => num(0.0),
        Expr::Neg(inner) => *inner,
        other => Expr::Neg(Box::new(other)),
    }
}

fn call(f: Func, a: Expr) -> Expr {
    Expr::Call(f, Box::new(a))
}

impl Expr {
    /// Structural partial derivative with respect to `var`.
    pub fn derivative(&self, var: Var) -> Expr {
        match self {
            Expr::Num(_) | Expr::Pi => num(0.0),
            Expr::Var(w) => num(if *w == var { 1.0 } else { 0.0 }),
            Expr::Neg(e) => neg(e.derivative(var)),
            Expr::Bin(op, l, r) => {
                let (f, g) = (l.as_ref(), r.as_ref());
                let (df, dg) = (f.derivative(var), g.derivative(var));
                match op {
                    BinOp::Add => add(df, dg),
                    BinOp::Sub => sub(df, dg),
                    BinOp::Mul => add(mul(df, g.clone()), mul(f.clone(), dg)),
                    BinOp::Div => div(
                        sub(mul(df, g.clone()), mul(f.clone(), dg)),
                        pow(g.clone(), num(2.0)),
                    ),
                    BinOp::Pow => {
                        if !g.depends_on_vars() {
                            let reduced = match g {
                                Expr::Num(c) => num(c - 1.0),
                                other => sub(other.clone(), num(1.0)),
                            };
                            mul(mul(g.clone(), pow(f.clone(), reduced)), df)
                        } else {
                            // f^g (g' log f + g f'/f)
                            mul(
                                self.clone(),
                                add(
                                    mul(dg, call(Func::Log, f.clone())),
                                    div(mul(g.clone(), df), f.clone()),
                                ),
                            )
                        }
                    }
                }
            }
            Expr::Call(func, e) => {
                let de = e.derivative(var);
                if is_num(&de, 0.0) {
                    return num(0.0);
                }
                let a = e.as_ref().clone();
                let outer = match func {
                    Func::Sin => call(Func::Cos, a),
                    Func::Cos => neg(call(Func::Sin, a)),
                    Func::Tan => div(num(1.0), pow(call(Func::Cos, a), num(2.0))),
                    Func::Exp => call(Func::Exp, a),
                    Func::Log => div(num(1.0), a),
                    Func::Sqrt => div(num(1.0), mul(num(2.0), call(Func::Sqrt, a))),
                    // subgradient 0 at the kink
                    Func::Abs => call(Func::Sign, a),
                    Func::Sign => return num(0.0),
                };
                mul(outer, de)
            }
        }
    }
}

/// `(∂e/∂u, ∂e/∂v)`.
pub fn gradient(e: &Expr) -> (Expr, Expr) {
    (e.derivative(Var::U), e.derivative(Var::V))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(src: &str, u: f64, v: f64) -> f64 {
        parse(src).unwrap().eval(u, v).unwrap()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(ev("u^2+v^2", 3.0, 4.0), 25.0);
        assert!((ev("sin(pi*u)", 0.5, 0.0) - 1.0).abs() < 1e-15);
        assert_eq!(ev("1+2*3^2", 0.0, 0.0), 19.0);
        assert_eq!(ev("-u^2", 3.0, 0.0), -9.0);
        assert_eq!(ev("2^3^2", 0.0, 0.0), 512.0);
        assert_eq!(ev("8/4/2", 0.0, 0.0), 1.0);
        assert_eq!(ev("2^-1", 0.0, 0.0), 0.5);
        assert_eq!(ev(" 1.5e2 - 2E-1 ", 0.0, 0.0), 149.8);
    }

    #[test]
    fn eval_examples() {
        assert_eq!(ev("u", 3.0, 4.0), 3.0);
        assert_eq!(ev("sqrt(u*u+v*v)", 3.0, 4.0), 5.0);
        let e = parse("1/ (u-1)").unwrap();
        let err = e.eval(1.0, 0.0).unwrap_err();
        assert_eq!(err.message, "division by zero");
        assert_eq!(err.subexpr, "1/(u - 1)");
        assert!(parse("log(u)").unwrap().eval(0.0, 0.0).is_err());
        assert!(parse("sqrt(u)").unwrap().eval(-1.0, 0.0).is_err());
        assert!(parse("u^0.5").unwrap().eval(-1.0, 0.0).is_err());
        assert_eq!(ev("u^3", -2.0, 0.0), -8.0);
    }

    #[test]
    fn syntax_errors_report_offsets() {
        let e = parse("1 + * 2").unwrap_err();
        assert_eq!(e.offset, 4);
        assert!(e.expected.iter().any(|s| s == "number"));
        let e = parse("sin(u").unwrap_err();
        assert_eq!(e.offset, 5);
        assert_eq!(e.found, "end of input");
        let e = parse("foo(u)").unwrap_err();
        assert_eq!(e.offset, 0);
        let e = parse("u v").unwrap_err();
        assert_eq!(e.offset, 2);
        assert!(parse("").is_err());
        assert!(parse("(u").is_err());
    }

    #[test]
    fn gradients() {
        let (du, dv) = gradient(&parse("u^2+v^2").unwrap());
        assert_eq!(du.to_string(), "2*u");
        assert_eq!(dv.to_string(), "2*v");
        let (du, dv) = gradient(&parse("sin(u)").unwrap());
        assert_eq!(du.to_string(), "cos(u)");
        assert_eq!(dv.to_string(), "0");
        let (du, _) = gradient(&parse("abs(u)").unwrap());
        assert_eq!(du.eval(0.0, 0.0).unwrap(), 0.0);
        assert_eq!(du.eval(-2.0, 0.0).unwrap(), -1.0);
    }

    #[test]
    fn variable_exponent_derivative() {
        let e = parse("u^v").unwrap();
        let (du, dv) = gradient(&e);
        let (u, v) = (1.7, 0.6);
        assert!((du.eval(u, v).unwrap() - v * u.powf(v - 1.0)).abs() < 1e-14);
        assert!((dv.eval(u, v).unwrap() - u.powf(v) * u.ln()).abs() < 1e-14);
    }

    #[test]
    fn printing_reparses() {
        for src in ["-(u+v)*2", "(u-v)-(u-v)", "u-(v-u)", "(-2)^2", "(u^2)^3", "u^-v", "-u^2", "u/(v*u)"] {
            let e = parse(src).unwrap();
            let back = parse(&e.to_string()).unwrap();
            assert_eq!(e, back, "{src} -> {e}");
        }
    }
}
