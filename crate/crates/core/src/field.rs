//! Multivector-valued fields and deterministic accumulation.

use crate::ga::Multivector;
use crate::{Error, Result};

/// A multivector-valued map on points of `R^k`.
///
/// Plain closures `Fn(&[f64]) -> Multivector` are fields; fallible closures
/// can be wrapped in [`TryField`]. Parsed expressions implement it too.
pub trait Field: Sync {
    fn eval(&self, x: &[f64]) -> Result<Multivector>;
}

impl<F> Field for F
where
    F: Fn(&[f64]) -> Multivector + Sync,
{
    fn eval(&self, x: &[f64]) -> Result<Multivector> {
        Ok(self(x))
    }
}

/// Adapter for closures that may fail.
pub struct TryField<F>(pub F);

impl<F> Field for TryField<F>
where
    F: Fn(&[f64]) -> Result<Multivector> + Sync,
{
    fn eval(&self, x: &[f64]) -> Result<Multivector> {
        (self.0)(x)
    }
}

/// Evaluates `f` and rejects NaN/inf with a context label.
pub(crate) fn eval_finite<F: Field + ?Sized>(f: &F, x: &[f64], context: &str) -> Result<Multivector> {
    let value = f.eval(x)?;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite(format!("{context} at {x:?}")))
    }
}

/// Sums `terms` with a balanced binary tree whose shape depends only on the
/// number of terms, so results do not depend on how the terms were produced.
pub(crate) fn pairwise_sum(mut terms: Vec<Multivector>) -> Option<Multivector> {
    if terms.is_empty() {
        return None;
    }
    while terms.len() > 1 {
        let mut next = Vec::with_capacity(terms.len().div_ceil(2));
        let mut it = terms.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(&a + &b),
                None => next.push(a),
            }
        }
        terms = next;
    }
    terms.pop()
}

pub(crate) fn pairwise_sum_f64(mut terms: Vec<f64>) -> f64 {
    if terms.is_empty() {
        return 0.0;
    }
    while terms.len() > 1 {
        terms = terms
            .chunks(2)
            .map(|c| if c.len() == 2 { c[0] + c[1] } else { c[0] })
            .collect();
    }
    terms[0]
}
