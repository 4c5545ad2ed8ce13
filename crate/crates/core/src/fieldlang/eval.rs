use thiserror::Error;

use super::{BinOp, Expr, Func};
use crate::ga::{geometric_product, outer_product, GaError, Multivector};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalErrorKind {
    /// A scalar function or `**` received a value with non-scalar parts.
    NonScalarArgument(&'static str),
    Domain(&'static str),
    NonFinite,
    MissingCoordinate { index: usize, available: usize },
    DivisionByNonScalar,
    Algebra(GaError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{} in `{expr}`", describe(kind))]
pub struct EvalError {
    pub kind: EvalErrorKind,
    /// The offending subexpression, printed fully parenthesised.
    pub expr: String,
}

fn describe(kind: &EvalErrorKind) -> String {
    match kind {
        EvalErrorKind::NonScalarArgument(f) => format!("`{f}` needs a scalar argument"),
        EvalErrorKind::Domain(f) => format!("argument outside the domain of `{f}`"),
        EvalErrorKind::NonFinite => "non-finite value".into(),
        EvalErrorKind::MissingCoordinate { index, available } => {
            format!("coordinate x{index} requested but only {available} given")
        }
        EvalErrorKind::DivisionByNonScalar => "division by a non-scalar value".into(),
        EvalErrorKind::Algebra(e) => e.to_string(),
    }
}

fn fail(kind: EvalErrorKind, e: &Expr) -> EvalError {
    EvalError {
        kind,
        expr: e.to_string(),
    }
}

/// Scalar value of `v`, allowing other parts up to a relative 1e-12.
fn as_scalar(v: &Multivector) -> Option<f64> {
    let s = v.scalar_part();
    let tol = 1e-12 * v.norm().max(f64::MIN_POSITIVE);
    v.is_scalar(tol).then_some(s)
}

pub(crate) fn eval(e: &Expr, dim: usize, x: &[f64]) -> Result<Multivector, EvalError> {
    let value = match e {
        Expr::Num(c) => Multivector::scalar(dim, *c),
        Expr::Coord(k) => match x.get(k - 1) {
            Some(v) => Multivector::scalar(dim, *v),
            None => {
                return Err(fail(
                    EvalErrorKind::MissingCoordinate {
                        index: *k,
                        available: x.len(),
                    },
                    e,
                ))
            }
        },
        Expr::Blade(mask) => Multivector::blade(dim, *mask, 1.0),
        Expr::Neg(a) => -eval(a, dim, x)?,
        Expr::Grade(a, k) => eval(a, dim, x)?
            .grade(*k)
            .map_err(|g| fail(EvalErrorKind::Algebra(g), e))?,
        Expr::Call(Func::Rev, a) => eval(a, dim, x)?.reversion(),
        Expr::Call(func, a) => {
            let v = eval(a, dim, x)?;
            let name = func.name();
            let s = as_scalar(&v).ok_or_else(|| fail(EvalErrorKind::NonScalarArgument(name), e))?;
            let out = match func {
                Func::Sin => s.sin(),
                Func::Cos => s.cos(),
                Func::Exp => s.exp(),
                Func::Abs => s.abs(),
                Func::Log if s > 0.0 => s.ln(),
                Func::Sqrt if s >= 0.0 => s.sqrt(),
                Func::Log | Func::Sqrt => return Err(fail(EvalErrorKind::Domain(name), e)),
                Func::Rev => unreachable!(),
            };
            Multivector::scalar(dim, out)
        }
        Expr::Pow(a, k) => {
            let v = eval(a, dim, x)?;
            let s = as_scalar(&v).ok_or_else(|| fail(EvalErrorKind::NonScalarArgument("**"), e))?;
            if s == 0.0 && *k < 0 {
                return Err(fail(EvalErrorKind::Domain("**"), e));
            }
            Multivector::scalar(dim, s.powi(*k))
        }
        Expr::Binary(op, a, b) => {
            let l = eval(a, dim, x)?;
            let r = eval(b, dim, x)?;
            let alg = |g: GaError| fail(EvalErrorKind::Algebra(g), e);
            match op {
                BinOp::Add => l.try_add(&r).map_err(alg)?,
                BinOp::Sub => l.try_add(&-r).map_err(alg)?,
                BinOp::Mul => geometric_product(&l, &r).map_err(alg)?,
                BinOp::Wedge => outer_product(&l, &r).map_err(alg)?,
                BinOp::Div => {
                    let s = as_scalar(&r).ok_or_else(|| fail(EvalErrorKind::DivisionByNonScalar, e))?;
                    if s == 0.0 {
                        return Err(fail(EvalErrorKind::NonFinite, e));
                    }
                    l.scale(1.0 / s)
                }
            }
        }
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(fail(EvalErrorKind::NonFinite, e))
    }
}
