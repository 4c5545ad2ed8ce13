//! Field-expression language.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/' | '^') factor)*
//! factor := '-'? atom ('**' '-'? int)?
//! atom   := number | 'pi' | coordinate | blade | ident '(' args ')' | '(' expr ')'
//! ```
//!
//! * `*` is the geometric product and `^` the outer (wedge) product; both
//!   bind like multiplication. `^` is **not** exponentiation: use `**`, which
//!   takes an integer exponent and a scalar-valued base.
//! * `/` divides by a scalar; the divisor must be scalar-valued by
//!   construction (no blades outside scalar functions), checked at parse time.
//! * Coordinates are `x1` .. `x8`; blades are `e1` .. `e8` and
//!   concatenations with strictly increasing digits (`e12`, `e135`), each digit
//!   at most the ambient dimension. Juxtaposition is not multiplication, and
//!   `2e1` is the number 20.
//! * Functions: `sin cos exp log sqrt abs` (scalar arguments only),
//!   `rev(x)` (reversion) and `grade(x, k)` (grade-`k` part).

mod eval;
mod lexer;
mod parser;

use std::fmt;

use thiserror::Error;

use crate::field::Field;
use crate::ga::{blade_name, Multivector};

pub use eval::{EvalError, EvalErrorKind};

/// 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    InvalidNumber(String),
    UnknownIdentifier(String),
    BadBlade(String),
    NonScalarDivisor,
    UnbalancedParen,
    UnexpectedToken { found: String, expected: String },
    WrongArity { func: String, expected: usize, got: usize },
    BadExponent(String),
    TooDeep,
    InvalidDimension(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}", line = pos.line, col = pos.col, message = describe(kind))]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub pos: Pos,
}

impl ParseError {
    pub(crate) fn new(kind: ParseErrorKind, pos: Pos) -> Self {
        Self { kind, pos }
    }
}

fn describe(kind: &ParseErrorKind) -> String {
    match kind {
        ParseErrorKind::UnexpectedChar(c) => format!("unexpected character `{c}`"),
        ParseErrorKind::InvalidNumber(s) => format!("invalid number `{s}`"),
        ParseErrorKind::UnknownIdentifier(s) => format!("unknown identifier `{s}`"),
        ParseErrorKind::BadBlade(s) => {
            format!("invalid blade `{s}` (digits must be strictly increasing and within the ambient dimension)")
        }
        ParseErrorKind::NonScalarDivisor => "division by a non-scalar expression".into(),
        ParseErrorKind::UnbalancedParen => "unbalanced parentheses".into(),
        ParseErrorKind::UnexpectedToken { found, expected } => format!("expected {expected}, found {found}"),
        ParseErrorKind::WrongArity { func, expected, got } => {
            format!("`{func}` takes {expected} argument(s), got {got}")
        }
        ParseErrorKind::BadExponent(s) => format!("exponent must be an integer, found {s}"),
        ParseErrorKind::TooDeep => "expression nested too deeply".into(),
        ParseErrorKind::InvalidDimension(d) => format!("ambient dimension {d} outside 1..=8"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Abs,
    Rev,
}

impl Func {
    pub(crate) fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "rev" => Func::Rev,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Rev => "rev",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Wedge,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Wedge => "^",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    /// 1-based coordinate index.
    Coord(usize),
    /// Basis blade bitmask.
    Blade(usize),
    Neg(Box<Expr>),
    Call(Func, Box<Expr>),
    Grade(Box<Expr>, usize),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
}

impl Expr {
    /// Highest coordinate index referenced, 0 if none.
    pub fn max_coordinate(&self) -> usize {
        match self {
            Expr::Num(_) | Expr::Blade(_) => 0,
            Expr::Coord(k) => *k,
            Expr::Neg(e) | Expr::Call(_, e) | Expr::Grade(e, _) | Expr::Pow(e, _) => e.max_coordinate(),
            Expr::Binary(_, a, b) => a.max_coordinate().max(b.max_coordinate()),
        }
    }
}

/// Fully parenthesised form; parsing it back yields the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(x) => write!(f, "{x}"),
            Expr::Coord(k) => write!(f, "x{k}"),
            Expr::Blade(mask) => write!(f, "{}", blade_name(*mask)),
            Expr::Neg(e) => write!(f, "-({e})"),
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
            Expr::Grade(e, k) => write!(f, "grade({e}, {k})"),
            Expr::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Pow(e, k) => write!(f, "({e})**{k}"),
        }
    }
}

/// A parsed field expression bound to an ambient dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldExpr {
    root: Expr,
    dim: usize,
    source: String,
}

impl FieldExpr {
    pub fn root(&self) -> &Expr {
        &self.root
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn max_coordinate(&self) -> usize {
        self.root.max_coordinate()
    }

    pub fn eval(&self, coords: &[f64]) -> Result<Multivector, EvalError> {
        eval_field(self, coords)
    }
}

impl fmt::Display for FieldExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.fmt(f)
    }
}

impl Field for FieldExpr {
    fn eval(&self, x: &[f64]) -> crate::Result<Multivector> {
        Ok(eval_field(self, x)?)
    }
}

/// Parses `text` as a field over an ambient space of dimension `ambient_dim`.
pub fn parse_field(text: &str, ambient_dim: usize) -> Result<FieldExpr, ParseError> {
    if !(1..=crate::ga::MAX_DIM).contains(&ambient_dim) {
        return Err(ParseError::new(
            ParseErrorKind::InvalidDimension(ambient_dim),
            Pos { line: 1, col: 1 },
        ));
    }
    let root = parser::parse(text, ambient_dim)?;
    Ok(FieldExpr {
        root,
        dim: ambient_dim,
        source: text.to_string(),
    })
}

/// Evaluates `expr` at the given coordinates.
pub fn eval_field(expr: &FieldExpr, coords: &[f64]) -> Result<Multivector, EvalError> {
    eval::eval(&expr.root, expr.dim, coords)
}
