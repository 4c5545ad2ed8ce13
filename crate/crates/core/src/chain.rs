//! Singular n-cubes and chains in `R^m`.
//!
//! A singular cube is a map `phi: [0,1]^n -> R^m`. Its differential, the
//! outermorphism that differential induces, the Jacobian `J = |phi'(v)|` and
//! the unit tangent pseudoscalar `V = phi'(v)/J` are computed pointwise. The
//! boundary integral is assembled face by face with the oriented face
//! tangents `+a_i` on `x_i = 1` and `-a_i` on `x_i = 0`, where `a_i = v e_i`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::field::{eval_finite, pairwise_sum, Field};
use crate::fieldlang::{parse_field, FieldExpr};
use crate::ga::{geometric_product, outer_product, pseudoscalar, Multivector, MAX_DIM};
use crate::gauge::{integrate_box, BoxRegion};
use crate::{Error, Result};

/// Below this the parameterization is treated as degenerate.
pub const JACOBIAN_FLOOR: f64 = 1e-12;
/// Relative finite-difference step for `phi'` when no analytic partials exist.
pub const FD_STEP: f64 = 1e-6;

type MapFn = Arc<dyn Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync>;
type PartialsFn = Arc<dyn Fn(&[f64]) -> Result<Partials> + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smoothness {
    C1,
    C2,
}

/// The `m x n` matrix of partial derivatives, stored by column.
#[derive(Debug, Clone, PartialEq)]
pub struct Partials {
    m: usize,
    cols: Vec<Vec<f64>>,
}

impl Partials {
    /// Builds from columns `d_i phi`, each of length `m`.
    pub fn from_columns(m: usize, cols: Vec<Vec<f64>>) -> Result<Self> {
        if cols.iter().any(|c| c.len() != m) {
            return Err(Error::InvalidArgument(format!("every partials column must have length {m}")));
        }
        if cols.len() > m || m > MAX_DIM {
            return Err(Error::InvalidArgument(format!(
                "need n <= m <= {MAX_DIM}, got n = {}, m = {m}",
                cols.len()
            )));
        }
        Ok(Self { m, cols })
    }

    pub fn identity(n: usize) -> Self {
        let cols = (0..n)
            .map(|i| (0..n).map(|r| if r == i { 1.0 } else { 0.0 }).collect())
            .collect();
        Self { m: n, cols }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.cols.len()
    }

    pub fn column(&self, i: usize) -> &[f64] {
        &self.cols[i]
    }

    /// Column `i` as a vector of the ambient algebra.
    pub fn column_vector(&self, i: usize) -> Multivector {
        Multivector::vector(self.m, &self.cols[i])
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            m: self.m,
            cols: self.cols.iter().map(|c| c.iter().map(|v| v * s).collect()).collect(),
        }
    }

    fn is_finite(&self) -> bool {
        self.cols.iter().flatten().all(|v| v.is_finite())
    }
}

/// A map from the parameter cube `[0,1]^n` into `R^m`.
#[derive(Clone)]
pub struct SingularCube {
    n: usize,
    m: usize,
    phi: MapFn,
    dphi: Option<PartialsFn>,
    smoothness: Smoothness,
    label: String,
}

impl fmt::Debug for SingularCube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SingularCube")
            .field("label", &self.label)
            .field("n", &self.n)
            .field("m", &self.m)
            .field("analytic_partials", &self.dphi.is_some())
            .finish()
    }
}

impl SingularCube {
    pub fn new<P>(n: usize, m: usize, phi: P) -> Result<Self>
    where
        P: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        Self::try_new(n, m, move |x| Ok(phi(x)))
    }

    /// Like [`SingularCube::new`] for a map that can fail.
    pub fn try_new<P>(n: usize, m: usize, phi: P) -> Result<Self>
    where
        P: Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync + 'static,
    {
        if n == 0 || n > m || m > MAX_DIM {
            return Err(Error::InvalidArgument(format!(
                "need 1 <= n <= m <= {MAX_DIM}, got n = {n}, m = {m}"
            )));
        }
        Ok(Self {
            n,
            m,
            phi: Arc::new(phi),
            dphi: None,
            smoothness: Smoothness::C2,
            label: format!("cube{n}in{m}"),
        })
    }

    /// Supplies analytic partials; `dphi(x)` returns the columns `d_i phi(x)`.
    pub fn with_partials<D>(mut self, dphi: D) -> Self
    where
        D: Fn(&[f64]) -> Vec<Vec<f64>> + Send + Sync + 'static,
    {
        let m = self.m;
        self.dphi = Some(Arc::new(move |x| Partials::from_columns(m, dphi(x))));
        self
    }

    pub fn with_smoothness(mut self, s: Smoothness) -> Self {
        self.smoothness = s;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    pub fn has_analytic_partials(&self) -> bool {
        self.dphi.is_some()
    }

    /// `phi(x)`, checked for length and finiteness.
    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::InvalidArgument(format!(
                "parameter point has {} coordinates, cube has n = {}",
                x.len(),
                self.n
            )));
        }
        let y = (self.phi)(x)?;
        if y.len() != self.m {
            return Err(Error::InvalidArgument(format!(
                "map returned {} components, expected m = {}",
                y.len(),
                self.m
            )));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("map `{}` at {x:?}", self.label)));
        }
        Ok(y)
    }

    /// The cube `y -> phi(corner + side * y)`; its partials are `side` times
    /// the parent's, taken from the parent (analytic or finite-difference).
    pub fn restrict(&self, corner: &[f64], side: f64) -> Result<SingularCube> {
        if corner.len() != self.n || !(side > 0.0) || corner.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "bad restriction corner {corner:?} side {side}"
            )));
        }
        let map = move |y: &[f64], corner: &[f64]| -> Vec<f64> {
            corner.iter().zip(y).map(|(c, y)| c + side * y).collect()
        };
        let parent = self.clone();
        let c1 = corner.to_vec();
        let phi = move |y: &[f64]| parent.eval(&map(y, &c1));
        let parent = self.clone();
        let c2 = corner.to_vec();
        let dphi: PartialsFn = Arc::new(move |y: &[f64]| Ok(differential(&parent, &map(y, &c2))?.scaled(side)));
        Ok(SingularCube {
            n: self.n,
            m: self.m,
            phi: Arc::new(phi),
            dphi: Some(dphi),
            smoothness: self.smoothness,
            label: format!("{}|{corner:?}+{side}", self.label),
        })
    }
}

/// Columns `d_i phi(x)`: analytic if supplied, else central differences with
/// step `1e-6 * max(1, |x_i|)`, one-sided second order near the faces.
pub fn differential(cube: &SingularCube, x: &[f64]) -> Result<Partials> {
    if let Some(d) = &cube.dphi {
        let p = d(x)?;
        if p.n() != cube.n {
            return Err(Error::InvalidArgument(format!(
                "analytic partials returned {} columns, expected {}",
                p.n(),
                cube.n
            )));
        }
        if !p.is_finite() {
            return Err(Error::NonFinite(format!("partials of `{}` at {x:?}", cube.label)));
        }
        return Ok(p);
    }
    let mut cols = Vec::with_capacity(cube.n);
    let mut probe = x.to_vec();
    let at = |probe: &mut Vec<f64>, i: usize, t: f64| {
        probe[i] = t;
        let y = cube.eval(probe);
        probe[i] = x[i];
        y
    };
    for i in 0..cube.n {
        let h = FD_STEP * x[i].abs().max(1.0);
        let col: Vec<f64> = if x[i] - h >= 0.0 && x[i] + h <= 1.0 {
            let (p, q) = (at(&mut probe, i, x[i] + h)?, at(&mut probe, i, x[i] - h)?);
            p.iter().zip(&q).map(|(p, q)| (p - q) / (2.0 * h)).collect()
        } else {
            // one-sided, pointing into the cube
            let s = if x[i] + h > 1.0 { -1.0 } else { 1.0 };
            let f0 = cube.eval(x)?;
            let f1 = at(&mut probe, i, x[i] + s * h)?;
            let f2 = at(&mut probe, i, x[i] + 2.0 * s * h)?;
            (0..cube.m)
                .map(|r| s * (-3.0 * f0[r] + 4.0 * f1[r] - f2[r]) / (2.0 * h))
                .collect()
        };
        cols.push(col);
    }
    Partials::from_columns(cube.m, cols)
}

/// Applies the outermorphism of `partials` to a homogeneous element of the
/// parameter algebra: each basis blade maps to the wedge of its columns.
pub fn outermorphism_apply(partials: &Partials, blade: &Multivector) -> Result<Multivector> {
    let n = partials.n();
    if blade.dim() != n {
        return Err(Error::InvalidArgument(format!(
            "blade lives in dimension {}, partials have n = {n}",
            blade.dim()
        )));
    }
    if blade.homogeneous_grade().is_none() {
        return Err(Error::InvalidArgument("outermorphism input must be homogeneous".into()));
    }
    let m = partials.m();
    let mut out = Multivector::zero(m);
    for (mask, &c) in blade.coeffs().iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        out += &blade_image(partials, mask)?.scale(c);
    }
    Ok(out)
}

fn blade_image(partials: &Partials, mask: usize) -> Result<Multivector> {
    let mut img = Multivector::scalar(partials.m(), 1.0);
    for i in 0..partials.n() {
        if mask & (1 << i) != 0 {
            img = outer_product(&img, &partials.column_vector(i))?;
        }
    }
    Ok(img)
}

/// `J = |phi'(v)|`; errors below [`JACOBIAN_FLOOR`].
pub fn jacobian(partials: &Partials) -> Result<f64> {
    let j = blade_image(partials, (1 << partials.n()) - 1)?.norm();
    if j < JACOBIAN_FLOOR || !j.is_finite() {
        return Err(Error::DegenerateJacobian { j, at: Vec::new() });
    }
    Ok(j)
}

/// `a_i = v e_i` in the parameter algebra of dimension `n` (`i` is 0-based).
pub fn face_tangent(n: usize, i: usize) -> Result<Multivector> {
    if i >= n {
        return Err(Error::InvalidArgument(format!("face axis {i} out of range for n = {n}")));
    }
    Ok(geometric_product(&pseudoscalar(n)?, &Multivector::basis_vector(n, i))?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceSide {
    /// `x_i = 0`, oriented by `-a_i`.
    Minus,
    /// `x_i = 1`, oriented by `+a_i`.
    Plus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Face {
    /// 0-based axis.
    pub axis: usize,
    pub side: FaceSide,
}

impl Face {
    /// The `2n` faces of `[0,1]^n`, axis by axis, minus before plus.
    pub fn all(n: usize) -> Vec<Face> {
        (0..n)
            .flat_map(|axis| {
                [FaceSide::Minus, FaceSide::Plus]
                    .into_iter()
                    .map(move |side| Face { axis, side })
            })
            .collect()
    }

    pub fn sign(&self) -> f64 {
        match self.side {
            FaceSide::Minus => -1.0,
            FaceSide::Plus => 1.0,
        }
    }

    /// Inserts the fixed coordinate into a point of the face's `(n-1)`-box.
    pub fn embed(&self, y: &[f64]) -> Vec<f64> {
        let mut x = Vec::with_capacity(y.len() + 1);
        x.extend_from_slice(&y[..self.axis]);
        x.push(match self.side {
            FaceSide::Minus => 0.0,
            FaceSide::Plus => 1.0,
        });
        x.extend_from_slice(&y[self.axis..]);
        x
    }
}

/// Pointwise differential data.
#[derive(Debug, Clone)]
pub struct FrameData {
    pub partials: Partials,
    pub jacobian: f64,
    /// Unit tangent pseudoscalar `V`.
    pub pseudoscalar: Multivector,
    /// `phi'(x, a_i)` for each axis.
    pub face_pushforwards: Vec<Multivector>,
}

impl FrameData {
    /// `phi'(x, v) = J V`.
    pub fn pushed_pseudoscalar(&self) -> Multivector {
        self.pseudoscalar.scale(self.jacobian)
    }
}

pub fn tangent_frame(cube: &SingularCube, x: &[f64]) -> Result<FrameData> {
    let partials = differential(cube, x)?;
    frame_from_partials(partials, x)
}

fn frame_from_partials(partials: Partials, x: &[f64]) -> Result<FrameData> {
    let n = partials.n();
    let pushed = blade_image(&partials, (1 << n) - 1)?;
    let j = pushed.norm();
    if j < JACOBIAN_FLOOR || !j.is_finite() {
        return Err(Error::DegenerateJacobian { j, at: x.to_vec() });
    }
    let face_pushforwards = (0..n)
        .map(|i| outermorphism_apply(&partials, &face_tangent(n, i)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(FrameData {
        pseudoscalar: pushed.scale(1.0 / j),
        jacobian: j,
        partials,
        face_pushforwards,
    })
}

/// A formal sum of cubes with coefficients `+1` or `-1`.
#[derive(Debug, Clone)]
pub struct Chain {
    terms: Vec<(f64, SingularCube)>,
}

impl Chain {
    pub fn new(terms: Vec<(i8, SingularCube)>) -> Result<Self> {
        let Some((_, first)) = terms.first() else {
            return Err(Error::InvalidArgument("a chain needs at least one term".into()));
        };
        let (n, m) = (first.n, first.m);
        for (c, cube) in &terms {
            if *c != 1 && *c != -1 {
                return Err(Error::InvalidArgument(format!("chain coefficient {c} is not +1 or -1")));
            }
            if cube.n != n || cube.m != m {
                return Err(Error::InvalidArgument("chain terms have different dimensions".into()));
            }
        }
        Ok(Self {
            terms: terms.into_iter().map(|(c, k)| (c as f64, k)).collect(),
        })
    }

    pub fn single(cube: SingularCube) -> Self {
        Self {
            terms: vec![(1.0, cube)],
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (f64, &SingularCube)> {
        self.terms.iter().map(|(c, k)| (*c, k))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n(&self) -> usize {
        self.terms[0].1.n
    }

    pub fn m(&self) -> usize {
        self.terms[0].1.m
    }

    /// Splits each cube `levels` times into `2^n` halves per axis.
    pub fn refined(&self, levels: usize) -> Result<Chain> {
        let n = self.n();
        let k = 1usize << levels;
        let side = 1.0 / k as f64;
        let mut terms = Vec::with_capacity(self.len() * k.pow(n as u32));
        for (c, cube) in &self.terms {
            let mut idx = vec![0usize; n];
            loop {
                let corner: Vec<f64> = idx.iter().map(|&i| i as f64 * side).collect();
                terms.push((*c, cube.restrict(&corner, side)?));
                let mut d = 0;
                while d < n {
                    idx[d] += 1;
                    if idx[d] < k {
                        break;
                    }
                    idx[d] = 0;
                    d += 1;
                }
                if d == n {
                    break;
                }
            }
        }
        Ok(Chain { terms })
    }
}

/// `sum_terms c * sum_faces +-int |da| phi'(x, a_i) F(phi(x))`.
pub fn boundary_integral<F: Field + ?Sized>(chain: &Chain, f: &F, order: usize) -> Result<Multivector> {
    let n = chain.n();
    let jobs: Vec<(f64, &SingularCube, Face)> = chain
        .terms
        .iter()
        .flat_map(|(c, cube)| Face::all(n).into_iter().map(move |face| (*c, cube, face)))
        .collect();
    let parts = jobs
        .par_iter()
        .map(|(c, cube, face)| {
            let a = face_tangent(n, face.axis)?;
            let v = integrate_box(&BoxRegion::unit(n - 1), order, |y| {
                let x = face.embed(y);
                let partials = differential(cube, &x)?;
                let frame = frame_from_partials(partials, &x)?;
                let da = outermorphism_apply(&frame.partials, &a)?;
                let value = eval_finite(f, &cube.eval(&x)?, "boundary field")?;
                Ok(geometric_product(&da, &value)?)
            })?;
            Ok(v.scale(c * face.sign()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(pairwise_sum(parts).expect("a cube has faces"))
}

/// `sum_terms c * int |dv| J V G(phi(x))`.
pub fn volume_integral<F: Field + ?Sized>(chain: &Chain, g: &F, order: usize) -> Result<Multivector> {
    volume_integral_with(chain, order, |cube, x, _| eval_finite(g, &cube.eval(x)?, "volume field"))
}

/// Volume integral whose integrand is computed from the cube, the parameter
/// point and the frame there.
pub(crate) fn volume_integral_with<G>(chain: &Chain, order: usize, g: G) -> Result<Multivector>
where
    G: Fn(&SingularCube, &[f64], &FrameData) -> Result<Multivector> + Sync,
{
    let n = chain.n();
    let parts = chain
        .terms
        .par_iter()
        .map(|(c, cube)| {
            let v = integrate_box(&BoxRegion::unit(n), order, |x| {
                let frame = tangent_frame(cube, x)?;
                let value = g(cube, x, &frame)?;
                Ok(geometric_product(&frame.pushed_pseudoscalar(), &value)?)
            })?;
            Ok(v.scale(*c))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(pairwise_sum(parts).expect("chains are non-empty"))
}

// ---- catalog ----

/// `phi(x) = x` on `[0,1]^n` in `R^n`.
pub fn identity_cube(n: usize) -> Result<SingularCube> {
    Ok(SingularCube::new(n, n, |x| x.to_vec())?
        .with_partials(move |_| Partials::identity(n).cols)
        .with_label(format!("identity_cube:{n}")))
}

/// `phi(x) = (f_1 x_1, ..., f_n x_n)`.
pub fn scaled_cube(factors: &[f64]) -> Result<SingularCube> {
    if factors.iter().any(|f| !(*f > 0.0) || !f.is_finite()) {
        return Err(Error::InvalidArgument(format!("scale factors must be positive, got {factors:?}")));
    }
    let n = factors.len();
    let f1 = factors.to_vec();
    let f2 = factors.to_vec();
    Ok(SingularCube::new(n, n, move |x| x.iter().zip(&f1).map(|(x, f)| x * f).collect())?
        .with_partials(move |_| Partials::identity(n).cols.iter().zip(&f2).map(|(c, f)| c.iter().map(|v| v * f).collect()).collect())
        .with_label(format!("scaled_cube:{}", join(factors))))
}

/// `phi(x) = offset + A x` with `A` given by its columns.
pub fn affine_cube(columns: Vec<Vec<f64>>, offset: Vec<f64>) -> Result<SingularCube> {
    let m = offset.len();
    let n = columns.len();
    let p = Partials::from_columns(m, columns)?;
    let cols = p.cols.clone();
    let cube = SingularCube::new(n, m, move |x| {
        let mut y = offset.clone();
        for (xi, col) in x.iter().zip(&cols) {
            for (yr, c) in y.iter_mut().zip(col) {
                *yr += xi * c;
            }
        }
        y
    })?;
    Ok(cube.with_partials(move |_| p.cols.clone()).with_label("affine_cube"))
}

/// `phi(u, v) = (r cos t, r sin t)` with `r = r0 + (r1 - r0) u`, `t = t0 + (t1 - t0) v`.
pub fn polar_square(r0: f64, r1: f64, t0: f64, t1: f64) -> Result<SingularCube> {
    if !(r0 > 0.0 && r1 > r0 && t1 > t0 && (t1 - t0) < 2.0 * PI) {
        return Err(Error::InvalidArgument(format!(
            "polar_square needs 0 < r0 < r1 and 0 < t1 - t0 < 2 pi, got r in [{r0}, {r1}], t in [{t0}, {t1}]"
        )));
    }
    let (dr, dt) = (r1 - r0, t1 - t0);
    Ok(SingularCube::new(2, 2, move |x| {
        let (r, t) = (r0 + dr * x[0], t0 + dt * x[1]);
        vec![r * t.cos(), r * t.sin()]
    })?
    .with_partials(move |x| {
        let (r, t) = (r0 + dr * x[0], t0 + dt * x[1]);
        vec![
            vec![dr * t.cos(), dr * t.sin()],
            vec![-r * dt * t.sin(), r * dt * t.cos()],
        ]
    })
    .with_label(format!("polar_square:{}", join(&[r0, r1, t0, t1]))))
}

pub fn default_polar_square() -> SingularCube {
    polar_square(0.5, 1.5, 0.0, PI / 2.0).expect("valid defaults")
}

/// Quarter cylinder `phi(x1, x2) = (cos(pi x1 / 2), sin(pi x1 / 2), x2)`.
pub fn cylinder_patch() -> SingularCube {
    let w = PI / 2.0;
    SingularCube::new(2, 3, move |x| vec![(w * x[0]).cos(), (w * x[0]).sin(), x[1]])
        .expect("valid dimensions")
        .with_partials(move |x| {
            vec![
                vec![-w * (w * x[0]).sin(), w * (w * x[0]).cos(), 0.0],
                vec![0.0, 0.0, 1.0],
            ]
        })
        .with_label("cylinder_patch")
}

/// Graph `phi(x1, x2) = (x1, x2, h(x1, x2))`; partials by finite differences.
pub fn graph_surface<H>(h: H, label: impl Into<String>) -> SingularCube
where
    H: Fn(f64, f64) -> Result<f64> + Send + Sync + 'static,
{
    SingularCube::try_new(2, 3, move |x| Ok(vec![x[0], x[1], h(x[0], x[1])?]))
        .expect("valid dimensions")
        .with_label(label)
}

/// Graph surface with `h` given as an expression in `x1`, `x2`.
pub fn graph_surface_expr(h: &str) -> Result<SingularCube> {
    let expr = scalar_expr(h, 2)?;
    Ok(graph_surface(
        move |a, b| scalar_value(&expr, &[a, b]),
        format!("graph_surface:{h}"),
    ))
}

/// A cube whose `m` components are scalar expressions in `x1..xn`.
pub fn expression_cube(n: usize, components: &[String]) -> Result<SingularCube> {
    let exprs = components
        .iter()
        .map(|c| scalar_expr(c, n))
        .collect::<Result<Vec<_>>>()?;
    let m = exprs.len();
    for e in &exprs {
        if e.max_coordinate() > n {
            return Err(Error::InvalidArgument(format!(
                "component `{}` uses x{} but the cube has n = {n}",
                e.source(),
                e.max_coordinate()
            )));
        }
    }
    let label = format!("[{}]", components.join(", "));
    Ok(SingularCube::try_new(n, m, move |x| exprs.iter().map(|e| scalar_value(e, x)).collect())?.with_label(label))
}

fn scalar_expr(text: &str, dim: usize) -> Result<FieldExpr> {
    Ok(parse_field(text, dim.max(1))?)
}

fn scalar_value(e: &FieldExpr, x: &[f64]) -> Result<f64> {
    let v = e.eval(x)?;
    if !v.is_scalar(1e-12 * v.norm()) {
        return Err(Error::InvalidArgument(format!("map component `{}` is not scalar-valued", e.source())));
    }
    Ok(v.scalar_part())
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}
