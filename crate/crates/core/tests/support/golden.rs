//! Golden table for the field language: accepted inputs with their values and
//! rejected inputs with the error class and 1-based position.

use geocalc::fieldlang::{EvalErrorKind, ParseErrorKind};

pub enum Expect {
    /// Coordinates to evaluate at, and the expected `(blade, coefficient)` pairs
    /// (all other coefficients zero).
    Value(Vec<f64>, Vec<(usize, f64)>),
    Parse(&'static str, usize, usize),
    Eval(Vec<f64>, &'static str),
}

pub struct Golden {
    pub text: String,
    pub dim: usize,
    pub expect: Expect,
}

pub fn parse_kind(kind: &ParseErrorKind) -> &'static str {
    match kind {
        ParseErrorKind::UnexpectedChar(_) => "char",
        ParseErrorKind::InvalidNumber(_) => "number",
        ParseErrorKind::UnknownIdentifier(_) => "ident",
        ParseErrorKind::BadBlade(_) => "blade",
        ParseErrorKind::NonScalarDivisor => "divisor",
        ParseErrorKind::UnbalancedParen => "paren",
        ParseErrorKind::UnexpectedToken { .. } => "token",
        ParseErrorKind::WrongArity { .. } => "arity",
        ParseErrorKind::BadExponent(_) => "exponent",
        ParseErrorKind::TooDeep => "deep",
        ParseErrorKind::InvalidDimension(_) => "dimension",
    }
}

pub fn eval_kind(kind: &EvalErrorKind) -> &'static str {
    match kind {
        EvalErrorKind::NonScalarArgument(_) => "nonscalar",
        EvalErrorKind::Domain(_) => "domain",
        EvalErrorKind::NonFinite => "nonfinite",
        EvalErrorKind::MissingCoordinate { .. } => "missing",
        EvalErrorKind::DivisionByNonScalar => "divisor",
        EvalErrorKind::Algebra(_) => "algebra",
    }
}

fn ok(text: &str, dim: usize, x: &[f64], want: &[(usize, f64)]) -> Golden {
    Golden {
        text: text.into(),
        dim,
        expect: Expect::Value(x.to_vec(), want.to_vec()),
    }
}

fn perr(text: &str, dim: usize, kind: &'static str, line: usize, col: usize) -> Golden {
    Golden {
        text: text.into(),
        dim,
        expect: Expect::Parse(kind, line, col),
    }
}

fn eerr(text: &str, dim: usize, x: &[f64], kind: &'static str) -> Golden {
    Golden {
        text: text.into(),
        dim,
        expect: Expect::Eval(x.to_vec(), kind),
    }
}

pub fn cases() -> Vec<Golden> {
    let pi = std::f64::consts::PI;
    let deep = format!("{}x1{}", "(".repeat(300), ")".repeat(300));
    vec![
        // accepted
        ok("3", 3, &[0.4], &[(0, 3.0)]),
        ok("x1*e1 + x2*e2", 2, &[1.0, 2.0], &[(1, 1.0), (2, 2.0)]),
        ok("rev(e1*e2)", 2, &[], &[(3, -1.0)]),
        ok("x1 ^ e2", 2, &[3.0, 0.0], &[(2, 3.0)]),
        ok("2*x1*x2*e1 + (x1**2 - x2**2)*e2", 2, &[1.0, 1.0], &[(1, 2.0)]),
        ok("2e1", 2, &[], &[(0, 20.0)]),
        ok("e1^e1", 2, &[], &[]),
        ok("e1*e1", 2, &[], &[(0, 1.0)]),
        ok("e2*e1", 2, &[], &[(3, -1.0)]),
        ok("e1^e2^e3", 3, &[], &[(7, 1.0)]),
        ok("e1*e2*e3*e1*e2*e3", 3, &[], &[(0, -1.0)]),
        ok("grade(e1*e2 + 3, 0)", 2, &[], &[(0, 3.0)]),
        ok("grade(e1*e2 + 3, 2)", 2, &[], &[(3, 1.0)]),
        ok("-x1**2", 1, &[3.0], &[(0, -9.0)]),
        ok("x1**-2", 1, &[2.0], &[(0, 0.25)]),
        ok("1 - 2 - 3", 1, &[], &[(0, -4.0)]),
        ok("8/2/2", 1, &[], &[(0, 2.0)]),
        ok("2^3", 1, &[], &[(0, 6.0)]),
        ok("e1/2", 2, &[], &[(1, 0.5)]),
        ok("abs(-2) + cos(0) + pi", 1, &[], &[(0, 3.0 + pi)]),
        ok("rev(e1^e2^e3)", 3, &[], &[(7, -1.0)]),
        ok("rev(e1 + e12 + 1)", 2, &[], &[(0, 1.0), (1, 1.0), (3, -1.0)]),
        ok("sqrt(4)*exp(0)", 1, &[], &[(0, 2.0)]),
        ok("x8*e8", 8, &[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 5.0], &[(128, 5.0)]),
        ok("(e1 + e2)*(e1 - e2)", 2, &[], &[(3, -2.0)]),
        ok(".5 + 1.5e-1", 1, &[], &[(0, 0.65)]),
        ok("sin(x1)**2 + cos(x1)**2", 1, &[0.7], &[(0, 1.0)]),
        ok("log(exp(x1))/x1", 1, &[2.0], &[(0, 1.0)]),
        ok("x1 +\n  x2 * e135", 5, &[1.0, 2.0], &[(0, 1.0), (21, 2.0)]),
        eerr("(x1*e1)**0", 2, &[4.0], "nonscalar"),
        // rejected while parsing
        perr("e21", 2, "blade", 1, 1),
        perr("e3", 2, "blade", 1, 1),
        perr("e11", 2, "blade", 1, 1),
        perr("x1 + e9", 8, "blade", 1, 6),
        perr("2 e1", 2, "token", 1, 3),
        perr("1/e1", 2, "divisor", 1, 2),
        perr("x1/(e1 + 1)", 2, "divisor", 1, 3),
        perr("(x1 + 1", 1, "paren", 1, 8),
        perr("x1 + 1)", 1, "paren", 1, 7),
        perr("foo(x1)", 1, "ident", 1, 1),
        perr("y1", 1, "ident", 1, 1),
        perr("x0", 1, "ident", 1, 1),
        perr("x9", 8, "ident", 1, 1),
        perr("sin(x1, x2)", 2, "arity", 1, 1),
        perr("grade(e1)", 2, "arity", 1, 1),
        perr("x1 $ 2", 1, "char", 1, 4),
        perr("1e999", 1, "number", 1, 1),
        perr("x1**2.5", 1, "exponent", 1, 5),
        perr("", 1, "token", 1, 1),
        perr("x1 +\n  * 2", 1, "token", 2, 3),
        perr("*2", 1, "token", 1, 1),
        perr("sin()", 1, "paren", 1, 5),
        perr(&deep, 1, "deep", 1, 201),
        perr("x1", 0, "dimension", 1, 1),
        perr("x1", 9, "dimension", 1, 1),
        // rejected while evaluating
        eerr("sin(e1)", 2, &[], "nonscalar"),
        eerr("e1**2", 2, &[], "nonscalar"),
        eerr("log(x1)", 1, &[0.0], "domain"),
        eerr("sqrt(x1 - 2)", 1, &[1.0], "domain"),
        eerr("x1**-1", 1, &[0.0], "domain"),
        eerr("exp(x1)*e1", 1, &[1000.0], "nonfinite"),
        eerr("1/(x1 - x1)", 1, &[1.0], "nonfinite"),
        eerr("x3", 3, &[1.0, 2.0], "missing"),
    ]
}
