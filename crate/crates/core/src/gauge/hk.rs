//! One-dimensional gauge (Henstock-Kurzweil) integration of derivatives.
//!
//! Each level of the schedule builds a tagged partition of `[a, b]` by
//! bisection. Cells whose closure holds a singular point are tagged at that
//! point and accepted once narrow enough; they contribute `|c| * value(s)`.
//! Every other cell is split into the tagged sub-cells of a Gauss-Legendre
//! rule: sub-cell widths are the weights, and by the separation property of
//! Gauss rules each node lies inside its own sub-cell, so the rule is a
//! Riemann sum over a finer tagged partition. A cell is accepted when that
//! sum agrees with the one over its two halves to the level's resolution,
//! and contributes the halves' sum. The implied gauge therefore follows the
//! local oscillation of the integrand, which is what lets derivatives such
//! as that of `x^2 cos(pi/x^2)` be integrated.

use super::{gauss_legendre, IntegrationResult};
use crate::field::pairwise_sum_f64;
use crate::{Error, Result};

/// A point where the integrand is not evaluated; tagged cells use `value`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularPoint {
    pub at: f64,
    pub value: f64,
}

impl SingularPoint {
    /// A singular point whose integrand value is taken to be 0.
    pub fn new(at: f64) -> Self {
        Self { at, value: 0.0 }
    }

    pub fn with_value(mut self, value: f64) -> Self {
        self.value = value;
        self
    }
}

const MAX_LEVELS: usize = 24;
const MAX_DEPTH: usize = 60;
const MIN_DEPTH: usize = 2;
/// Nodes per regular cell.
const CELL_RULE: usize = 8;
/// Sign changes tolerated among the merged samples of one cell.
const MAX_SIGN_CHANGES: usize = 4;
/// Evaluation budget per level; past it the level is cut short.
const MAX_CELLS_PER_LEVEL: usize = 1 << 22;

struct LevelOutcome {
    sum: f64,
    cells: usize,
    complete: bool,
}

/// Integrates `fprime` over `[a, b]` and returns the sum at the first level
/// where three successive levels agree within `tol`.
pub fn hk_integrate_1d<F>(
    fprime: F,
    a: f64,
    b: f64,
    singular_points: &[SingularPoint],
    tol: f64,
) -> Result<IntegrationResult<f64>>
where
    F: Fn(f64) -> f64,
{
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidArgument(format!("need a < b, got [{a}, {b}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let mut sings: Vec<SingularPoint> = singular_points
        .iter()
        .copied()
        .filter(|s| s.at >= a && s.at <= b)
        .collect();
    sings.sort_by(|p, q| p.at.total_cmp(&q.at));
    sings.dedup_by(|p, q| p.at == q.at);

    let mut history = Vec::new();
    let mut cells_used = 0;
    let mut last_complete = true;
    for level in 0..MAX_LEVELS {
        // Resolution quarters and singular-cell width halves per level.
        let rho = 0.25 * 0.25f64.powi(level as i32);
        let eta = (b - a) * 0.5f64.powi(level as i32 + 3);
        let outcome = level_sum(&fprime, a, b, &sings, rho, eta)?;
        cells_used = outcome.cells;
        last_complete = outcome.complete;
        history.push(outcome.sum);
        if !outcome.complete {
            break;
        }
        let len = history.len();
        if len >= 3 {
            let d1 = (history[len - 1] - history[len - 2]).abs();
            let d2 = (history[len - 2] - history[len - 3]).abs();
            if d1 <= tol && d2 <= tol {
                return Ok(IntegrationResult {
                    value: history[len - 1],
                    cells_used,
                    error_estimate: d1,
                    converged: true,
                    history,
                });
            }
        }
    }
    let len = history.len();
    let error_estimate = if len >= 2 && last_complete {
        (history[len - 1] - history[len - 2]).abs()
    } else {
        f64::INFINITY
    };
    Ok(IntegrationResult {
        value: *history.last().expect("at least one level ran"),
        cells_used,
        error_estimate,
        converged: false,
        history,
    })
}

fn sign_changes(samples: &[(f64, f64)]) -> usize {
    let mut prev = 0.0f64;
    let mut changes = 0;
    for &(_, y) in samples {
        if y * prev < 0.0 {
            changes += 1;
        }
        if y != 0.0 {
            prev = y;
        }
    }
    changes
}

fn level_sum<F: Fn(f64) -> f64>(
    fprime: &F,
    a: f64,
    b: f64,
    sings: &[SingularPoint],
    rho: f64,
    eta: f64,
) -> Result<LevelOutcome> {
    let (nodes, weights) = gauss_legendre(CELL_RULE)?;
    let eval = |x: f64| -> Result<f64> {
        let y = fprime(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::NonFinite(format!("integrand at x = {x}")))
        }
    };
    // tagged-sub-cell sum over [lo, hi]; samples are appended to `seen`
    let rule = |lo: f64, hi: f64, seen: &mut Vec<(f64, f64)>| -> Result<f64> {
        let w = hi - lo;
        let mut terms = [0.0; CELL_RULE];
        for k in 0..CELL_RULE {
            let x = lo + w * nodes[k];
            let y = eval(x)?;
            seen.push((x, y));
            terms[k] = w * weights[k] * y;
        }
        Ok(pairwise_sum_f64(terms.to_vec()))
    };
    let mut seen = Vec::with_capacity(3 * CELL_RULE);
    let mut contributions = Vec::new();
    let mut complete = true;
    let mut stack = vec![(a, b, 0usize)];
    while let Some((lo, hi, depth)) = stack.pop() {
        let w = hi - lo;
        let mut inside = sings.iter().filter(|s| s.at >= lo && s.at <= hi);
        let accepted = match (inside.next(), inside.next()) {
            (Some(s), None) => (w <= eta).then_some(w * s.value),
            (Some(_), Some(_)) => None,
            (None, _) if depth < MIN_DEPTH => None,
            (None, _) => {
                let mid = lo + 0.5 * w;
                seen.clear();
                let whole = rule(lo, hi, &mut seen)?;
                let halves = rule(lo, mid, &mut seen)? + rule(mid, hi, &mut seen)?;
                // Three interleaved node sets; an oscillation they alias in
                // common still shows up as sign changes once they are merged.
                seen.sort_by(|p, q| p.0.total_cmp(&q.0));
                let resolved = sign_changes(&seen) <= MAX_SIGN_CHANGES;
                let allowed = rho * w * (1.0 + (halves / w).abs());
                (resolved && (whole - halves).abs() <= allowed).then_some(halves)
            }
        };
        match accepted {
            Some(c) => contributions.push(c),
            None if depth >= MAX_DEPTH || w <= 4.0 * f64::EPSILON * (b - a) => {
                complete = false;
                contributions.push(w * eval(lo + 0.5 * w).unwrap_or(0.0));
            }
            None => {
                let mid = lo + 0.5 * w;
                stack.push((mid, hi, depth + 1));
                stack.push((lo, mid, depth + 1));
            }
        }
        if contributions.len() + stack.len() > MAX_CELLS_PER_LEVEL {
            complete = false;
            break;
        }
    }
    Ok(LevelOutcome {
        cells: contributions.len(),
        sum: pairwise_sum_f64(contributions),
        complete,
    })
}
