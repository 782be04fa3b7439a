//! Expression language for user-supplied functions.
//!
//! Grammar (lowest to highest precedence):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?          // right associative
//! primary := number | 'x' | 'y' | 'pi' | 'e'
//!          | func '(' expr ')' | '(' expr ')'
//! func    := sin | cos | tan | exp | ln | sqrt
//! ```
//!
//! Numbers are decimal literals with an optional exponent (`1.5`, `.5`, `2e-3`).
//! `-x^2` parses as `-(x^2)` and `2^-x` as `2^(-x)`.

use std::fmt;

use super::dual::{Dual2, Real};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    Y,
}

impl Var {
    pub fn name(self) -> char {
        match self {
            Var::X => 'x',
            Var::Y => 'y',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedConst {
    Pi,
    E,
}

impl NamedConst {
    pub fn value(self) -> f64 {
        match self {
            NamedConst::Pi => std::f64::consts::PI,
            NamedConst::E => std::f64::consts::E,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
}

impl UnaryOp {
    fn function(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => UnaryOp::Sin,
            "cos" => UnaryOp::Cos,
            "tan" => UnaryOp::Tan,
            "exp" => UnaryOp::Exp,
            "ln" => UnaryOp::Ln,
            "sqrt" => UnaryOp::Sqrt,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Tan => "tan",
            UnaryOp::Exp => "exp",
            UnaryOp::Ln => "ln",
            UnaryOp::Sqrt => "sqrt",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
            BinaryOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Named(NamedConst),
    Var(Var),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn unary(op: UnaryOp, a: Expr) -> Self {
        Expr::Unary(op, Box::new(a))
    }

    pub fn binary(op: BinaryOp, a: Expr, b: Expr) -> Self {
        Expr::Binary(op, Box::new(a), Box::new(b))
    }

    /// Number of operator nodes (unary and binary) in the tree.
    pub fn internal_nodes(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Named(_) | Expr::Var(_) => 0,
            Expr::Unary(_, a) => 1 + a.internal_nodes(),
            Expr::Binary(_, a, b) => 1 + a.internal_nodes() + b.internal_nodes(),
        }
    }

    pub fn uses(&self, var: Var) -> bool {
        match self {
            Expr::Var(v) => *v == var,
            Expr::Const(_) | Expr::Named(_) => false,
            Expr::Unary(_, a) => a.uses(var),
            Expr::Binary(_, a, b) => a.uses(var) || b.uses(var),
        }
    }

    /// Evaluates the tree over any [`Real`] carrier, checking every node for
    /// domain violations and non-finite results.
    pub fn eval<T: Real>(&self, env: &Bindings<T>) -> Result<T> {
        let out = match self {
            Expr::Const(c) => T::lift(*c),
            Expr::Named(n) => T::lift(n.value()),
            Expr::Var(v) => env.get(*v).ok_or(Error::Unbound(v.name()))?,
            Expr::Unary(op, a) => {
                let a = a.eval(env)?;
                match op {
                    UnaryOp::Neg => -a,
                    UnaryOp::Sin => a.sin(),
                    UnaryOp::Cos => a.cos(),
                    UnaryOp::Tan => a.tan(),
                    UnaryOp::Exp => a.exp(),
                    UnaryOp::Ln => {
                        if a.primal() <= 0.0 {
                            return Err(self.domain(format!("ln of non-positive value {}", a.primal())));
                        }
                        a.ln()
                    }
                    UnaryOp::Sqrt => {
                        if a.primal() < 0.0 {
                            return Err(self.domain(format!("sqrt of negative value {}", a.primal())));
                        }
                        a.sqrt()
                    }
                }
            }
            Expr::Binary(op, a, b) => {
                let a = a.eval(env)?;
                let b = b.eval(env)?;
                match op {
                    BinaryOp::Add => a + b,
                    BinaryOp::Sub => a - b,
                    BinaryOp::Mul => a * b,
                    BinaryOp::Div => {
                        if b.primal() == 0.0 {
                            return Err(self.domain("division by zero".into()));
                        }
                        a / b
                    }
                    BinaryOp::Pow => {
                        if !b.is_constant() && a.primal() <= 0.0 {
                            return Err(self.domain(format!(
                                "variable exponent needs a positive base, got {}",
                                a.primal()
                            )));
                        }
                        if a.primal() < 0.0 && b.primal().fract() != 0.0 {
                            return Err(self.domain(format!(
                                "negative base {} with fractional exponent {}",
                                a.primal(),
                                b.primal()
                            )));
                        }
                        a.pow(b)
                    }
                }
            }
        };
        if !out.primal().is_finite() {
            return Err(self.domain(format!("non-finite result {}", out.primal())));
        }
        Ok(out)
    }

    fn domain(&self, reason: String) -> Error {
        Error::Domain {
            expr: self.to_string(),
            reason,
        }
    }
}

/// Fully parenthesised rendering; parsing it back yields an identical tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c:?}"),
            Expr::Named(NamedConst::Pi) => f.write_str("pi"),
            Expr::Named(NamedConst::E) => f.write_str("e"),
            Expr::Var(v) => write!(f, "{}", v.name()),
            Expr::Unary(UnaryOp::Neg, a) => write!(f, "(-{a})"),
            Expr::Unary(op, a) => write!(f, "{}({a})", op.name()),
            Expr::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
        }
    }
}

/// Variable assignment for [`Expr::eval`].
#[derive(Debug, Clone, Copy, Default)]
pub struct Bindings<T> {
    pub x: Option<T>,
    pub y: Option<T>,
}

impl<T: Copy> Bindings<T> {
    pub fn x(x: T) -> Self {
        Self { x: Some(x), y: None }
    }

    pub fn xy(x: T, y: T) -> Self {
        Self {
            x: Some(x),
            y: Some(y),
        }
    }

    pub fn get(&self, var: Var) -> Option<T> {
        match var {
            Var::X => self.x,
            Var::Y => self.y,
        }
    }
}

/// Evaluates `expr` with dual-number inputs; the seeded variable carries `d1 = 1`.
pub fn eval_dual(expr: &Expr, point: &Bindings<Dual2>) -> Result<Dual2> {
    let r = expr.eval(point)?;
    if !r.is_finite() {
        return Err(Error::Domain {
            expr: expr.to_string(),
            reason: format!("non-finite derivative {r}"),
        });
    }
    Ok(r)
}

/// Parses `src`, accepting only the listed variables.
pub fn parse_expression(src: &str, vars: &[Var]) -> Result<Expr> {
    if src.trim().is_empty() {
        return Err(Error::Syntax {
            position: 0,
            message: "empty expression".into(),
        });
    }
    let tokens = lex(src)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        vars,
        end: src.len(),
    };
    let e = p.expr()?;
    match p.peek() {
        None => Ok(e),
        Some(t) => Err(Error::Syntax {
            position: t.pos,
            message: format!("unexpected {}", t.tok.describe()),
        }),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Op(c) => format!("`{c}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: usize,
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '+' | '-' | '*' | '/' | '^' => {
                out.push(Token { tok: Tok::Op(c), pos: start });
                i += 1;
            }
            '(' => {
                out.push(Token { tok: Tok::LParen, pos: start });
                i += 1;
            }
            ')' => {
                out.push(Token { tok: Tok::RParen, pos: start });
                i += 1;
            }
            ',' => {
                out.push(Token { tok: Tok::Comma, pos: start });
                i += 1;
            }
            c if c.is_ascii_digit() || c == '.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                // Exponent part, only if followed by digits.
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut k = i + 1;
                    if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                        k += 1;
                    }
                    if k < bytes.len() && bytes[k].is_ascii_digit() {
                        while k < bytes.len() && bytes[k].is_ascii_digit() {
                            k += 1;
                        }
                        i = k;
                    }
                }
                let text = &src[start..i];
                let v: f64 = text.parse().map_err(|_| Error::Syntax {
                    position: start,
                    message: format!("malformed number `{text}`"),
                })?;
                out.push(Token { tok: Tok::Num(v), pos: start });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Ident(src[start..i].to_string()),
                    pos: start,
                });
            }
            _ => {
                return Err(Error::Syntax {
                    position: start,
                    message: format!("unexpected character `{c}`"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    vars: &'a [Var],
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn here(&self) -> usize {
        self.peek().map_or(self.end, |t| t.pos)
    }

    fn eat_op(&mut self, ops: &[char]) -> Option<char> {
        match self.peek() {
            Some(Token { tok: Tok::Op(c), .. }) if ops.contains(c) => {
                let c = *c;
                self.pos += 1;
                Some(c)
            }
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(c) = self.eat_op(&['+', '-']) {
            let rhs = self.term()?;
            let op = if c == '+' { BinaryOp::Add } else { BinaryOp::Sub };
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(c) = self.eat_op(&['*', '/']) {
            let rhs = self.unary()?;
            let op = if c == '*' { BinaryOp::Mul } else { BinaryOp::Div };
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat_op(&['-']).is_some() {
            return Ok(Expr::unary(UnaryOp::Neg, self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if self.eat_op(&['^']).is_some() {
            let exponent = self.unary()?;
            return Ok(Expr::binary(BinaryOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        let position = self.here();
        let Some(t) = self.next() else {
            return Err(Error::Syntax {
                position,
                message: "unexpected end of input".into(),
            });
        };
        match t.tok {
            Tok::Num(v) => Ok(Expr::Const(v)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            Tok::Ident(name) => self.identifier(name, t.pos),
            other => Err(Error::Syntax {
                position: t.pos,
                message: format!("unexpected {}", other.describe()),
            }),
        }
    }

    fn identifier(&mut self, name: String, position: usize) -> Result<Expr> {
        let followed_by_paren = matches!(self.peek(), Some(Token { tok: Tok::LParen, .. }));
        if let Some(op) = UnaryOp::function(&name) {
            if !followed_by_paren {
                return Err(Error::Arity {
                    name,
                    position,
                    expected: 1,
                    found: 0,
                });
            }
            self.pos += 1;
            if matches!(self.peek(), Some(Token { tok: Tok::RParen, .. })) {
                return Err(Error::Arity {
                    name,
                    position,
                    expected: 1,
                    found: 0,
                });
            }
            let mut args = vec![self.expr()?];
            while matches!(self.peek(), Some(Token { tok: Tok::Comma, .. })) {
                self.pos += 1;
                args.push(self.expr()?);
            }
            self.expect_rparen()?;
            if args.len() != 1 {
                return Err(Error::Arity {
                    name,
                    position,
                    expected: 1,
                    found: args.len(),
                });
            }
            return Ok(Expr::unary(op, args.pop().unwrap()));
        }
        let leaf = match name.as_str() {
            "pi" => Expr::Named(NamedConst::Pi),
            "e" => Expr::Named(NamedConst::E),
            "x" if self.vars.contains(&Var::X) => Expr::Var(Var::X),
            "y" if self.vars.contains(&Var::Y) => Expr::Var(Var::Y),
            _ => return Err(Error::UnknownIdentifier { name, position }),
        };
        if followed_by_paren {
            return Err(Error::Arity {
                name,
                position,
                expected: 0,
                found: 1,
            });
        }
        Ok(leaf)
    }

    fn expect_rparen(&mut self) -> Result<()> {
        let position = self.here();
        match self.next() {
            Some(Token { tok: Tok::RParen, .. }) => Ok(()),
            Some(t) => Err(Error::Syntax {
                position: t.pos,
                message: format!("expected `)`, found {}", t.tok.describe()),
            }),
            None => Err(Error::Syntax {
                position,
                message: "expected `)` before end of input".into(),
            }),
        }
    }
}
