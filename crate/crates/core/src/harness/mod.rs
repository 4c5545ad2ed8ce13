//! Verification campaigns: both sides of the fundamental theorem on chains,
//! refinement and shrinking-cube studies, and the Cauchy-Goursat check.
//! Reports carry numbers only; pass/fail policy belongs to the caller.

mod cli;
mod report;
mod scenario;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::chain::{affine_cube, boundary_integral, identity_cube, volume_integral_with, Chain};
use crate::fieldlang::FieldExpr;
use crate::ga::Multivector;
use crate::tangential::{
    monogenic_defect, tangential_derivative_coordinate, tangential_derivative_limit_with, LimitOptions,
};
use crate::{Error, Result};

pub use cli::run_cli;
pub use report::write_csv;
pub use scenario::{build_manifold, load_scenarios, ManifoldSpec, Scenario};

/// Residuals below this are treated as exact when estimating orders.
pub const ORDER_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DerivMode {
    #[default]
    Coordinate,
    Limit,
}

impl fmt::Display for DerivMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DerivMode::Coordinate => "coordinate",
            DerivMode::Limit => "limit",
        })
    }
}

impl FromStr for DerivMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "coordinate" => Ok(DerivMode::Coordinate),
            "limit" => Ok(DerivMode::Limit),
            other => Err(format!("unknown derivative mode `{other}` (use coordinate or limit)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub scenario: String,
    pub n: usize,
    pub m: usize,
    pub field: String,
    pub mode: DerivMode,
    pub quad_order: usize,
    pub lhs: Multivector,
    pub rhs: Multivector,
    pub residual: f64,
    pub rel_residual: f64,
    /// `(level or order, residual)` pairs, oldest first.
    pub history: Vec<(usize, f64)>,
    pub observed_order: Option<f64>,
    pub seconds: f64,
    /// Monogenic defect, for Cauchy-Goursat reports.
    pub defect: Option<f64>,
    /// Set when a precondition check rejected the scenario.
    pub flagged: bool,
    /// Numerical failure that stopped the scenario.
    pub error: Option<String>,
}

impl VerificationReport {
    fn new(scenario: &str, chain: &Chain, field: &FieldExpr, mode: DerivMode, quad_order: usize) -> Self {
        let m = chain.m();
        Self {
            scenario: scenario.to_string(),
            n: chain.n(),
            m,
            field: field.source().to_string(),
            mode,
            quad_order,
            lhs: Multivector::zero(m),
            rhs: Multivector::zero(m),
            residual: f64::INFINITY,
            rel_residual: f64::INFINITY,
            history: Vec::new(),
            observed_order: None,
            seconds: 0.0,
            defect: None,
            flagged: false,
            error: None,
        }
    }

    fn set_sides(&mut self, lhs: Multivector, rhs: Multivector) {
        self.residual = (&lhs - &rhs).norm();
        self.rel_residual = self.residual / rhs.norm().max(1.0);
        self.lhs = lhs;
        self.rhs = rhs;
    }

    fn fail(&mut self, e: Error) {
        self.error = Some(e.to_string());
        self.residual = f64::INFINITY;
        self.rel_residual = f64::INFINITY;
    }

    /// No error, not flagged and `residual <= tol`.
    pub fn within(&self, tol: f64) -> bool {
        self.error.is_none() && !self.flagged && self.residual <= tol
    }
}

/// `log2(r_prev / r_last)` for the last consecutive pair above [`ORDER_FLOOR`].
pub fn observed_order(history: &[(usize, f64)]) -> Option<f64> {
    history
        .windows(2)
        .rev()
        .find(|w| w[0].1 > ORDER_FLOOR && w[1].1 > ORDER_FLOOR && w[0].1.is_finite() && w[1].1.is_finite())
        .map(|w| (w[0].1 / w[1].1).log2())
}

fn check_field(chain: &Chain, field: &FieldExpr) -> Result<()> {
    if field.dim() != chain.m() {
        return Err(Error::InvalidArgument(format!(
            "field is declared over R^{} but the chain lives in R^{}",
            field.dim(),
            chain.m()
        )));
    }
    if field.max_coordinate() > chain.m() {
        return Err(Error::InvalidArgument(format!(
            "field uses x{} but the ambient dimension is {}",
            field.max_coordinate(),
            chain.m()
        )));
    }
    Ok(())
}

/// Both sides of the theorem: `lhs = int dV grad_V F` by the chosen
/// derivative mode, `rhs = int dA F`.
pub fn sides(chain: &Chain, field: &FieldExpr, quad_order: usize, mode: DerivMode) -> Result<(Multivector, Multivector)> {
    check_field(chain, field)?;
    let lhs = volume_integral_with(chain, quad_order, |cube, x, _| match mode {
        DerivMode::Coordinate => tangential_derivative_coordinate(cube, field, x),
        DerivMode::Limit => {
            // keep the shrinking cubes inside the parameter domain
            let room = x.iter().fold(f64::INFINITY, |r, v| r.min(*v).min(1.0 - v));
            let opts = LimitOptions {
                eps0: LimitOptions::default().eps0.min(1.8 * room),
                ..LimitOptions::default()
            };
            Ok(tangential_derivative_limit_with(cube, field, x, opts)?.value)
        }
    })?;
    let rhs = boundary_integral(chain, field, quad_order)?;
    Ok((lhs, rhs))
}

pub fn verify_ftgc(chain: &Chain, field: &FieldExpr, quad_order: usize, mode: DerivMode) -> VerificationReport {
    verify_named("ftgc", chain, field, quad_order, mode)
}

pub fn verify_named(
    id: &str,
    chain: &Chain,
    field: &FieldExpr,
    quad_order: usize,
    mode: DerivMode,
) -> VerificationReport {
    let start = Instant::now();
    let mut report = VerificationReport::new(id, chain, field, mode, quad_order);
    match sides(chain, field, quad_order, mode) {
        Ok((lhs, rhs)) => {
            report.set_sides(lhs, rhs);
            report.history.push((quad_order, report.residual));
        }
        Err(e) => {
            report.fail(e);
            report.history.push((quad_order, f64::INFINITY));
        }
    }
    report.seconds = start.elapsed().as_secs_f64();
    report
}

/// Repeats the verification on `chain.refined(level)` for `level = 0..=levels`.
/// The history holds one residual per level; the sides are the finest level's.
pub fn refinement_study(
    id: &str,
    chain: &Chain,
    field: &FieldExpr,
    quad_order: usize,
    mode: DerivMode,
    levels: usize,
) -> VerificationReport {
    let start = Instant::now();
    let mut report = VerificationReport::new(id, chain, field, mode, quad_order);
    for level in 0..=levels {
        let outcome = chain
            .refined(level)
            .and_then(|c| sides(&c, field, quad_order, mode));
        match outcome {
            Ok((lhs, rhs)) => {
                report.set_sides(lhs, rhs);
                report.history.push((level, report.residual));
            }
            Err(e) => {
                report.fail(e);
                report.history.push((level, f64::INFINITY));
                break;
            }
        }
    }
    report.observed_order = observed_order(&report.history);
    report.seconds = start.elapsed().as_secs_f64();
    report
}

/// One entry of the shrinking-cube study.
#[derive(Debug, Clone, PartialEq)]
pub struct ShrinkingStep {
    pub j: usize,
    pub report: VerificationReport,
    /// `|rhs_j - full-cube boundary integral|`.
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShrinkingStudy {
    pub full_cube: Multivector,
    pub steps: Vec<ShrinkingStep>,
}

impl ShrinkingStudy {
    pub fn gaps(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.gap).collect()
    }

    /// True when the gaps strictly decrease along the j list.
    pub fn gaps_decreasing(&self) -> bool {
        self.steps.windows(2).all(|w| w[1].gap < w[0].gap)
    }

    pub fn max_residual(&self) -> f64 {
        self.steps.iter().map(|s| s.report.residual).fold(0.0, f64::max)
    }
}

/// Verifies the theorem for `f` on the cubes `[1/j, 1 - 1/j]^n` and compares
/// each boundary integral with the one over `[0,1]^n`. `j = 2` gives an empty
/// cube whose two sides are both zero.
pub fn shrinking_cube_study(f: &FieldExpr, n: usize, j_list: &[usize], quad_order: usize) -> Result<ShrinkingStudy> {
    let unit = Chain::single(identity_cube(n)?);
    check_field(&unit, f)?;
    let full_cube = boundary_integral(&unit, f, quad_order)?;
    let mut steps = Vec::with_capacity(j_list.len());
    for &j in j_list {
        if j < 2 {
            return Err(Error::InvalidArgument(format!("shrinking index j must be at least 2, got {j}")));
        }
        let id = format!("shrink_j{j}");
        let lo = 1.0 / j as f64;
        let side = 1.0 - 2.0 * lo;
        let report = if side <= 0.0 {
            let start = Instant::now();
            let mut r = VerificationReport::new(&id, &unit, f, DerivMode::Coordinate, quad_order);
            r.set_sides(Multivector::zero(n), Multivector::zero(n));
            r.history.push((quad_order, 0.0));
            r.seconds = start.elapsed().as_secs_f64();
            r
        } else {
            let cols = (0..n)
                .map(|i| (0..n).map(|r| if r == i { side } else { 0.0 }).collect())
                .collect();
            let cube = affine_cube(cols, vec![lo; n])?.with_label(id.clone());
            verify_named(&id, &Chain::single(cube), f, quad_order, DerivMode::Coordinate)
        };
        let gap = (&report.rhs - &full_cube).norm();
        steps.push(ShrinkingStep { j, report, gap });
    }
    Ok(ShrinkingStudy { full_cube, steps })
}

/// Boundary integral of a field expected to be monogenic, next to its
/// measured defect. The scenario is flagged when the defect exceeds
/// `threshold`; the volume side is the target 0.
pub fn cauchy_goursat_check(
    id: &str,
    chain: &Chain,
    field: &FieldExpr,
    quad_order: usize,
    threshold: f64,
    samples: usize,
) -> VerificationReport {
    let start = Instant::now();
    let mut report = VerificationReport::new(id, chain, field, DerivMode::Coordinate, quad_order);
    let outcome = check_field(chain, field).and_then(|_| {
        let defect = monogenic_defect(chain, field, samples)?;
        let contour = boundary_integral(chain, field, quad_order)?;
        Ok((defect, contour))
    });
    match outcome {
        Ok((defect, contour)) => {
            report.set_sides(Multivector::zero(chain.m()), contour);
            report.defect = Some(defect);
            report.flagged = !(defect <= threshold);
        }
        Err(e) => report.fail(e),
    }
    report.history.push((quad_order, report.residual));
    report.seconds = start.elapsed().as_secs_f64();
    report
}
