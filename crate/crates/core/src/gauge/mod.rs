//! Gauge integration on `[0,1]^n`.
//!
//! A gauge is a strictly positive function `delta(x)`. A tagged partition
//! `{(c_j, x_j)}` of the unit cube into closed axis-aligned subcubes is
//! delta-fine when `diam(c_j) <= delta(x_j)` for every cell. Partitions are
//! built by recursive dyadic bisection (Cousin's lemma made constructive), and
//! the directed Riemann sum `v * sum |c_j| f(x_j)` is evaluated on them.
//!
//! The engine can only sample partitions, so agreement of sums across a
//! schedule of shrinking gauges is evidence of integrability, not a proof.

mod gauss;
mod hk;

pub use gauss::{gauss_legendre, gauss_quadrature, BoxRegion};
pub(crate) use gauss::integrate_box;
pub use hk::{hk_integrate_1d, SingularPoint};

use std::sync::Arc;

use rayon::prelude::*;

use crate::field::{pairwise_sum, Field, TryField};
use crate::ga::{pseudoscalar, Multivector};
use crate::{Error, Result};

/// Default cap on bisection depth.
pub const DEFAULT_MAX_DEPTH: usize = 40;

/// Upper bound on the number of cells a single partition may hold.
pub const MAX_PARTITION_CELLS: usize = 1 << 22;

/// Closed axis-aligned cube `corner + [0, side]^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cube {
    corner: Vec<f64>,
    side: f64,
}

impl Cube {
    pub fn new(corner: Vec<f64>, side: f64) -> Result<Self> {
        if !(side > 0.0) || !side.is_finite() {
            return Err(Error::InvalidArgument(format!("cube side must be positive, got {side}")));
        }
        if corner.is_empty() || corner.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument(format!("bad cube corner {corner:?}")));
        }
        Ok(Self { corner, side })
    }

    pub fn unit(n: usize) -> Self {
        Self {
            corner: vec![0.0; n],
            side: 1.0,
        }
    }

    pub fn n(&self) -> usize {
        self.corner.len()
    }

    pub fn corner(&self) -> &[f64] {
        &self.corner
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn diam(&self) -> f64 {
        self.side * (self.n() as f64).sqrt()
    }

    pub fn volume(&self) -> f64 {
        self.side.powi(self.n() as i32)
    }

    pub fn center(&self) -> Vec<f64> {
        self.corner.iter().map(|c| c + 0.5 * self.side).collect()
    }

    /// Closed containment.
    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.n()
            && x
                .iter()
                .zip(&self.corner)
                .all(|(x, c)| *x >= *c && *x <= *c + self.side)
    }

    /// The 2^n vertices.
    pub fn vertices(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..1usize << self.n()).map(move |bits| {
            self.corner
                .iter()
                .enumerate()
                .map(|(d, c)| if bits & (1 << d) != 0 { c + self.side } else { *c })
                .collect()
        })
    }

    /// The 2^n half-size children, in bit order of the offset.
    pub fn children(&self) -> Vec<Cube> {
        let half = 0.5 * self.side;
        (0..1usize << self.n())
            .map(|bits| Cube {
                corner: self
                    .corner
                    .iter()
                    .enumerate()
                    .map(|(d, c)| if bits & (1 << d) != 0 { c + half } else { *c })
                    .collect(),
                side: half,
            })
            .collect()
    }
}

/// A strictly positive function on the integration domain.
#[derive(Clone)]
pub struct Gauge {
    delta: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
}

impl Gauge {
    pub fn new(delta: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self { delta: Arc::new(delta) }
    }

    pub fn constant(value: f64) -> Self {
        Self::new(move |_| value)
    }

    /// Pointwise minimum of two gauges; a partition fine for it is fine for both.
    pub fn min(&self, other: &Gauge) -> Gauge {
        let (a, b) = (self.delta.clone(), other.delta.clone());
        Gauge::new(move |x| a(x).min(b(x)))
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let d = (self.delta)(x);
        if d > 0.0 && !d.is_nan() {
            Ok(d)
        } else {
            Err(Error::NonPositiveGauge { at: x.to_vec(), value: d })
        }
    }
}

impl std::fmt::Debug for Gauge {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("Gauge(..)")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaggedCell {
    pub cube: Cube,
    pub tag: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TaggedPartition {
    pub cells: Vec<TaggedCell>,
}

impl TaggedPartition {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn total_volume(&self) -> f64 {
        crate::field::pairwise_sum_f64(self.cells.iter().map(|c| c.cube.volume()).collect())
    }
}

/// Why a partition failed validation.
#[derive(Debug, Clone, PartialEq)]
pub enum PartitionDefect {
    Empty,
    WrongDimension { cell: usize },
    OutsideDomain { cell: usize },
    TagOutsideCell { cell: usize },
    NotFine { cell: usize, diam: f64, delta: f64 },
    Overlap { first: usize, second: usize },
    VolumeMismatch { total: f64, expected: f64 },
}

/// Checks a partition of `domain` after the fact: tags in their cells, cells
/// inside the domain, pairwise disjoint interiors, volumes summing to the
/// domain volume (which with disjointness implies covering), and
/// delta-fineness when a gauge is given.
pub fn validate_partition(
    partition: &TaggedPartition,
    domain: &Cube,
    gauge: Option<&Gauge>,
) -> std::result::Result<(), PartitionDefect> {
    if partition.is_empty() {
        return Err(PartitionDefect::Empty);
    }
    let n = domain.n();
    let hi = |c: &Cube, d: usize| c.corner[d] + c.side;
    for (i, cell) in partition.cells.iter().enumerate() {
        if cell.cube.n() != n || cell.tag.len() != n {
            return Err(PartitionDefect::WrongDimension { cell: i });
        }
        let inside = (0..n).all(|d| cell.cube.corner[d] >= domain.corner[d] && hi(&cell.cube, d) <= hi(domain, d));
        if !inside {
            return Err(PartitionDefect::OutsideDomain { cell: i });
        }
        if !cell.cube.contains(&cell.tag) {
            return Err(PartitionDefect::TagOutsideCell { cell: i });
        }
        if let Some(g) = gauge {
            let delta = (g.delta)(&cell.tag);
            if !(cell.cube.diam() <= delta) {
                return Err(PartitionDefect::NotFine {
                    cell: i,
                    diam: cell.cube.diam(),
                    delta,
                });
            }
        }
    }
    // Sweep along the first axis; only cells whose x_1 ranges overlap can collide.
    let mut order: Vec<usize> = (0..partition.len()).collect();
    order.sort_by(|&a, &b| partition.cells[a].cube.corner[0].total_cmp(&partition.cells[b].cube.corner[0]));
    for (pos, &a) in order.iter().enumerate() {
        let ca = &partition.cells[a].cube;
        for &b in &order[pos + 1..] {
            let cb = &partition.cells[b].cube;
            if cb.corner[0] >= hi(ca, 0) {
                break;
            }
            let overlap = (0..n).all(|d| ca.corner[d].max(cb.corner[d]) < hi(ca, d).min(hi(cb, d)));
            if overlap {
                return Err(PartitionDefect::Overlap {
                    first: a.min(b),
                    second: a.max(b),
                });
            }
        }
    }
    let total = partition.total_volume();
    let expected = domain.volume();
    if (total - expected).abs() > 1e-12 * expected.max(1.0) {
        return Err(PartitionDefect::VolumeMismatch { total, expected });
    }
    Ok(())
}

/// Builds a delta-fine tagged partition of `domain` by recursive bisection.
///
/// A cell is accepted as soon as it has an admissible tag. Candidates are
/// tried in order: the designated singular point inside the cell (a cell
/// holding one is always tagged there, and one holding several is split),
/// then the centre, then the vertex where the gauge is largest.
pub fn build_delta_fine_partition(
    delta: &Gauge,
    domain: &Cube,
    singular_points: &[Vec<f64>],
    max_depth: usize,
) -> Result<TaggedPartition> {
    build_with_budget(delta, domain, singular_points, max_depth, MAX_PARTITION_CELLS)
}

pub(crate) fn build_with_budget(
    delta: &Gauge,
    domain: &Cube,
    singular_points: &[Vec<f64>],
    max_depth: usize,
    max_cells: usize,
) -> Result<TaggedPartition> {
    if max_depth < 1 {
        return Err(Error::InvalidArgument("max_depth must be at least 1".into()));
    }
    if let Some(bad) = singular_points.iter().find(|s| s.len() != domain.n()) {
        return Err(Error::InvalidArgument(format!("singular point {bad:?} has the wrong dimension")));
    }
    let mut cells = Vec::new();
    // Depth-first with an explicit stack so a runaway branch fails fast.
    let mut stack = vec![(domain.clone(), 0usize)];
    while let Some((cube, depth)) = stack.pop() {
        match admissible_tag(delta, &cube, singular_points)? {
            Some(tag) => {
                cells.push(TaggedCell { cube, tag });
                if cells.len() > max_cells {
                    return Err(Error::CellBudgetExceeded(max_cells));
                }
            }
            None => {
                if depth >= max_depth {
                    return Err(Error::DepthExhausted { depth: max_depth });
                }
                if cells.len() + stack.len() > max_cells {
                    return Err(Error::CellBudgetExceeded(max_cells));
                }
                for child in cube.children().into_iter().rev() {
                    stack.push((child, depth + 1));
                }
            }
        }
    }
    Ok(TaggedPartition { cells })
}

fn admissible_tag(delta: &Gauge, cube: &Cube, singular_points: &[Vec<f64>]) -> Result<Option<Vec<f64>>> {
    let diam = cube.diam();
    let mut inside = singular_points.iter().filter(|s| cube.contains(s));
    if let Some(first) = inside.next() {
        if inside.any(|s| s != first) {
            return Ok(None);
        }
        let d = delta.eval(first)?;
        return Ok((diam <= d).then(|| first.clone()));
    }
    let center = cube.center();
    if diam <= delta.eval(&center)? {
        return Ok(Some(center));
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    for v in cube.vertices() {
        let d = delta.eval(&v)?;
        if best.as_ref().is_none_or(|(b, _)| d > *b) {
            best = Some((d, v));
        }
    }
    let (d, v) = best.expect("a cube has vertices");
    Ok((diam <= d).then_some(v))
}

/// Directed Riemann sum `v * sum_j |c_j| f(x_j)`.
///
/// Cell values are computed in parallel and then reduced by a fixed
/// pairwise tree, so the result is identical for any worker count.
pub fn riemann_sum<F: Field + ?Sized>(partition: &TaggedPartition, f: &F, v: &Multivector) -> Result<Multivector> {
    let terms: Vec<Multivector> = partition
        .cells
        .par_iter()
        .map(|cell| {
            let value = f.eval(&cell.tag)?;
            if !value.is_finite() {
                return Err(Error::NonFinite(format!("integrand at tag {:?}", cell.tag)));
            }
            if value.dim() != v.dim() {
                return Err(crate::ga::GaError::DimensionMismatch {
                    left: v.dim(),
                    right: value.dim(),
                }
                .into());
            }
            Ok(value.scale(cell.cube.volume()))
        })
        .collect::<Result<_>>()?;
    let sum = pairwise_sum(terms).ok_or_else(|| Error::InvalidArgument("empty partition".into()))?;
    Ok(crate::ga::geometric_product(v, &sum)?)
}

/// Outcome of a refinement-schedule integration.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationResult<T> {
    pub value: T,
    pub cells_used: usize,
    /// Last successive difference; evidence, not a bound.
    pub error_estimate: f64,
    pub converged: bool,
    /// Sum produced at each level of the schedule.
    pub history: Vec<T>,
}

/// Largest partition `rp_integrate` will build at a single level.
pub const RP_MAX_CELLS: usize = 1 << 18;

/// Directed gauge integral of `f` over `[0,1]^n` by a schedule of partitions.
///
/// Level `k` uses the gauge `sqrt(n) 2^-k` away from the singular points and
/// `sqrt(n) 4^-k` at them, so the partition is uniform with cells of side
/// `2^-k` plus a cluster of singular-tagged cells. At singular tags the
/// integrand is taken to be zero. The run stops once three successive sums
/// agree within `tol`.
pub fn rp_integrate<F: Field + ?Sized>(
    f: &F,
    n: usize,
    tol: f64,
    singular_points: &[Vec<f64>],
) -> Result<IntegrationResult<Multivector>> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let v = pseudoscalar(n)?;
    let domain = Cube::unit(n);
    let guarded = TryField(|x: &[f64]| {
        if singular_points.iter().any(|s| s.as_slice() == x) {
            Ok(Multivector::zero(n))
        } else {
            f.eval(x)
        }
    });
    let root_n = (n as f64).sqrt();
    let mut history: Vec<Multivector> = Vec::new();
    let mut cells_used = 0;
    let mut k = 0u32;
    loop {
        if (1u64 << (n as u32 * k)) as usize > RP_MAX_CELLS {
            break;
        }
        let h = 0.5f64.powi(k as i32);
        let regular = root_n * h * (1.0 + 1e-12);
        let at_singular = regular * h;
        let sing = singular_points.to_vec();
        let gauge = Gauge::new(move |x| {
            if sing.iter().any(|s| s.as_slice() == x) {
                at_singular
            } else {
                regular
            }
        });
        let partition = build_with_budget(&gauge, &domain, singular_points, 2 * k as usize + 2, 2 * RP_MAX_CELLS)?;
        cells_used = partition.len();
        history.push(riemann_sum(&partition, &guarded, &v)?);
        let len = history.len();
        if len >= 3 {
            let d1 = (&history[len - 1] - &history[len - 2]).norm();
            let d2 = (&history[len - 2] - &history[len - 3]).norm();
            if d1 <= tol && d2 <= tol {
                return Ok(IntegrationResult {
                    value: history[len - 1].clone(),
                    cells_used,
                    error_estimate: d1,
                    converged: true,
                    history,
                });
            }
        }
        k += 1;
    }
    let len = history.len();
    let error_estimate = if len >= 2 {
        (&history[len - 1] - &history[len - 2]).norm()
    } else {
        f64::INFINITY
    };
    Ok(IntegrationResult {
        value: history.last().cloned().unwrap_or_else(|| Multivector::zero(n)),
        cells_used,
        error_estimate,
        converged: false,
        history,
    })
}
