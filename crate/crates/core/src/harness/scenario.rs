//! Scenario files and manifold specifications.
//!
//! A scenario is a JSON object (or an array of them):
//!
//! ```json
//! { "id": "cyl", "manifold": "cylinder_patch", "field": "x3*e3",
//!   "order": 6, "mode": "coordinate", "tolerance": 1e-5, "refinements": 0 }
//! ```
//!
//! `manifold` is either a catalog name or a list of component expressions in
//! `x1..xn`; for a list, `n` may be given and otherwise defaults to the
//! highest coordinate used.

use std::str::FromStr;

use serde::Deserialize;

use super::{refinement_study, verify_named, DerivMode, VerificationReport};
use crate::chain::{
    cylinder_patch, default_polar_square, expression_cube, graph_surface_expr, identity_cube, polar_square,
    scaled_cube, Chain, SingularCube,
};
use crate::fieldlang::{parse_field, FieldExpr};
use crate::{Error, Result};

pub const DEFAULT_ORDER: usize = 4;
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
const DEFAULT_GRAPH: &str = "(x1**2 - x2**2)/2";

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ManifoldSpec {
    Named(String),
    Components(Vec<String>),
}

impl FromStr for ManifoldSpec {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(ManifoldSpec::Named(s.to_string()))
    }
}

fn numbers(list: &str, what: &str) -> Result<Vec<f64>> {
    list.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("bad number `{t}` in {what}")))
        })
        .collect()
}

/// Builds the cube named by `spec`.
///
/// Names: `identity_cube:N`, `scaled_cube:f1,f2,..`, `polar_square` or
/// `polar_square:r0,r1,t0,t1`, `cylinder_patch`, `graph_surface` or
/// `graph_surface:<h(x1,x2)>`.
pub fn build_manifold(spec: &ManifoldSpec, n: Option<usize>) -> Result<SingularCube> {
    let name = match spec {
        ManifoldSpec::Components(parts) => {
            if parts.is_empty() {
                return Err(Error::InvalidArgument("manifold component list is empty".into()));
            }
            let n = match n {
                Some(n) => n,
                None => {
                    let mut top = 1;
                    for p in parts {
                        top = top.max(parse_field(p, 8)?.max_coordinate());
                    }
                    top
                }
            };
            return expression_cube(n, parts);
        }
        ManifoldSpec::Named(name) => name.trim(),
    };
    let (head, arg) = match name.split_once(':') {
        Some((h, a)) => (h.trim(), Some(a.trim())),
        None => (name, None),
    };
    match (head, arg) {
        ("identity_cube", arg) => {
            let n = match arg {
                Some(a) => a
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidArgument(format!("bad dimension `{a}` for identity_cube")))?,
                None => n.unwrap_or(2),
            };
            identity_cube(n)
        }
        ("scaled_cube", Some(a)) => scaled_cube(&numbers(a, "scaled_cube")?),
        ("polar_square", None) => Ok(default_polar_square()),
        ("polar_square", Some(a)) => match numbers(a, "polar_square")?.as_slice() {
            [r0, r1, t0, t1] => polar_square(*r0, *r1, *t0, *t1),
            _ => Err(Error::InvalidArgument("polar_square takes r0,r1,t0,t1".into())),
        },
        ("cylinder_patch", None) => Ok(cylinder_patch()),
        ("graph_surface", arg) => graph_surface_expr(arg.unwrap_or(DEFAULT_GRAPH)),
        _ => Err(Error::InvalidArgument(format!("unknown manifold `{name}`"))),
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub id: Option<String>,
    pub manifold: ManifoldSpec,
    /// Parameter dimension for expression-list manifolds.
    #[serde(default)]
    pub n: Option<usize>,
    pub field: String,
    #[serde(default = "default_order")]
    pub order: usize,
    #[serde(default)]
    pub mode: DerivMode,
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub refinements: usize,
}

fn default_order() -> usize {
    DEFAULT_ORDER
}

/// A scenario with its manifold built and field parsed.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub id: String,
    pub chain: Chain,
    pub field: FieldExpr,
    pub scenario: Scenario,
}

impl Scenario {
    pub fn tolerance(&self) -> f64 {
        self.tolerance.unwrap_or(DEFAULT_TOLERANCE)
    }

    /// Builds the manifold and parses the field; configuration errors surface here.
    pub fn prepare(&self, fallback_id: &str) -> Result<Prepared> {
        if self.order == 0 {
            return Err(Error::InvalidOrder(0));
        }
        if let Some(t) = self.tolerance {
            if !(t >= 0.0) {
                return Err(Error::InvalidArgument(format!("tolerance must be non-negative, got {t}")));
            }
        }
        let cube = build_manifold(&self.manifold, self.n)?;
        let field = parse_field(&self.field, cube.m())?;
        let id = self.id.clone().unwrap_or_else(|| fallback_id.to_string());
        Ok(Prepared {
            chain: Chain::single(cube.with_label(id.clone())),
            id,
            field,
            scenario: self.clone(),
        })
    }
}

impl Prepared {
    pub fn run(&self) -> VerificationReport {
        let s = &self.scenario;
        if s.refinements > 0 {
            refinement_study(&self.id, &self.chain, &self.field, s.order, s.mode, s.refinements)
        } else {
            verify_named(&self.id, &self.chain, &self.field, s.order, s.mode)
        }
    }

    pub fn passes(&self, report: &VerificationReport) -> bool {
        report.within(self.scenario.tolerance())
    }
}

/// Parses a scenario file holding one object or an array of objects.
pub fn load_scenarios(text: &str) -> std::result::Result<Vec<Scenario>, serde_json::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(Box<Scenario>),
        Many(Vec<Scenario>),
    }
    Ok(match serde_json::from_str::<OneOrMany>(text)? {
        OneOrMany::One(s) => vec![*s],
        OneOrMany::Many(v) => v,
    })
}
