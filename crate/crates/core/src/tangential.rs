//! Tangential derivative estimators.
//!
//! * The limit estimator shrinks a parameter cube `c` of side `eps` around
//!   `x0` and evaluates `rev(V)/J * |c|^-1 * boundary_integral(phi|c, F)`,
//!   then extrapolates in `eps^2`.
//! * The coordinate estimator evaluates `sum_i N_i d_i(F o phi)` with
//!   `N_i = rev(V) phi'(a_i) / J` and Richardson-extrapolated differences.

use rayon::prelude::*;

use crate::chain::{boundary_integral, identity_cube, tangent_frame, Chain, SingularCube};
use crate::field::{eval_finite, Field};
use crate::ga::{geometric_product, Multivector};
use crate::{Error, Result};

pub const DEFAULT_EPS0: f64 = 1e-2;
pub const DEFAULT_LEVELS: usize = 4;
pub const DEFAULT_FACE_ORDER: usize = 4;

/// Largest initial step of the coordinate-mode differences.
const FD_H0: f64 = 1e-2;
const FD_LEVELS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct DerivEstimate {
    pub value: Multivector,
    /// Cube sides, strictly decreasing.
    pub scales_used: Vec<f64>,
    pub extrapolated: bool,
    /// Disagreement between the last two extrapolants.
    pub spread: f64,
    /// Unextrapolated estimates, one per scale.
    pub raw: Vec<Multivector>,
}

/// Shrinking-cube controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitOptions {
    pub eps0: f64,
    pub levels: usize,
    pub face_order: usize,
}

impl Default for LimitOptions {
    fn default() -> Self {
        Self {
            eps0: DEFAULT_EPS0,
            levels: DEFAULT_LEVELS,
            face_order: DEFAULT_FACE_ORDER,
        }
    }
}

/// Extrapolates `seq[k]` taken at `h0 / 2^k`, assuming error terms
/// `h^p0, h^(p0 + dp), ...`. Returns the final value and the spread.
fn richardson(seq: &[Multivector], p0: i32, dp: i32) -> (Multivector, f64) {
    let mut table = seq.to_vec();
    let mut prev = None;
    for j in 0..seq.len() - 1 {
        let factor = 2f64.powi(p0 + dp * j as i32) - 1.0;
        prev = table.last().cloned();
        table = table
            .windows(2)
            .map(|w| &w[1] + &(&w[1] - &w[0]).scale(1.0 / factor))
            .collect();
    }
    let best = table.pop().expect("non-empty sequence");
    let spread = prev.map(|p| (&best - &p).norm()).unwrap_or(0.0);
    (best, spread)
}

fn check_levels(levels: usize, eps0: f64) -> Result<()> {
    if levels == 0 {
        return Err(Error::InvalidArgument("at least one level is needed".into()));
    }
    if !(eps0 > 0.0) || !eps0.is_finite() {
        return Err(Error::InvalidArgument(format!("eps0 must be positive, got {eps0}")));
    }
    Ok(())
}

fn limit_estimate<F: Field + ?Sized>(
    cube: &SingularCube,
    f: &F,
    x0: &[f64],
    opts: LimitOptions,
    check_domain: bool,
) -> Result<DerivEstimate> {
    check_levels(opts.levels, opts.eps0)?;
    let n = cube.n();
    if x0.len() != n {
        return Err(Error::InvalidArgument(format!("point has {} coordinates, expected {n}", x0.len())));
    }
    let frame = tangent_frame(cube, x0)?;
    let pre = frame.pseudoscalar.reversion().scale(1.0 / frame.jacobian);
    let scales: Vec<f64> = (0..opts.levels).map(|k| opts.eps0 / 2f64.powi(k as i32)).collect();
    let raw = scales
        .iter()
        .map(|&eps| {
            let corner: Vec<f64> = x0.iter().map(|x| x - 0.5 * eps).collect();
            if check_domain && corner.iter().any(|c| *c < 0.0 || c + eps > 1.0) {
                return Err(Error::DomainExit {
                    at: x0.to_vec(),
                    reason: format!("cube of side {eps} leaves [0,1]^{n}"),
                });
            }
            let sub = Chain::single(cube.restrict(&corner, eps)?);
            let b = boundary_integral(&sub, f, opts.face_order)?;
            Ok(geometric_product(&pre, &b)?.scale(eps.powi(-(n as i32))))
        })
        .collect::<Result<Vec<_>>>()?;
    let (value, spread) = richardson(&raw, 2, 2);
    Ok(DerivEstimate {
        value,
        scales_used: scales,
        extrapolated: opts.levels > 1,
        spread,
        raw,
    })
}

/// Flat gradient of `f` on `R^n` by shrinking axis-aligned cubes around `x`.
pub fn gradient_flat<F: Field + ?Sized>(f: &F, x: &[f64], eps0: f64, levels: usize) -> Result<DerivEstimate> {
    let cube = identity_cube(x.len())?;
    let opts = LimitOptions {
        eps0,
        levels,
        ..LimitOptions::default()
    };
    limit_estimate(&cube, f, x, opts, false)
}

/// Flat gradient `sum_i e_i d_i f` by extrapolated central differences.
pub fn gradient_flat_coordinate<F: Field + ?Sized>(f: &F, x: &[f64]) -> Result<Multivector> {
    let n = x.len();
    let mut out: Option<Multivector> = None;
    for i in 0..n {
        let d = partial(|p| eval_finite(f, p, "field"), x, i, FD_H0, false)?;
        let term = geometric_product(&Multivector::basis_vector(n, i), &d)?;
        out = Some(match out {
            Some(acc) => acc.try_add(&term)?,
            None => term,
        });
    }
    out.ok_or_else(|| Error::InvalidArgument("empty point".into()))
}

/// Shrinking-cube estimate of the tangential derivative at the interior point `x0`.
pub fn tangential_derivative_limit<F: Field + ?Sized>(
    cube: &SingularCube,
    f: &F,
    x0: &[f64],
    eps0: f64,
    levels: usize,
) -> Result<DerivEstimate> {
    let opts = LimitOptions {
        eps0,
        levels,
        ..LimitOptions::default()
    };
    tangential_derivative_limit_with(cube, f, x0, opts)
}

pub fn tangential_derivative_limit_with<F: Field + ?Sized>(
    cube: &SingularCube,
    f: &F,
    x0: &[f64],
    opts: LimitOptions,
) -> Result<DerivEstimate> {
    limit_estimate(cube, f, x0, opts, true)
}

/// `N_i = rev(V) phi'(x0, a_i) / J`.
pub fn normal_vectors(cube: &SingularCube, x0: &[f64]) -> Result<Vec<Multivector>> {
    let frame = tangent_frame(cube, x0)?;
    let rv = frame.pseudoscalar.reversion();
    frame
        .face_pushforwards
        .iter()
        .map(|pa| Ok(geometric_product(&rv, pa)?.scale(1.0 / frame.jacobian)))
        .collect()
}

/// Coordinate formula `sum_i N_i d_i(F o phi)(x0)`.
pub fn tangential_derivative_coordinate<F: Field + ?Sized>(
    cube: &SingularCube,
    f: &F,
    x0: &[f64],
) -> Result<Multivector> {
    let normals = normal_vectors(cube, x0)?;
    let g = |x: &[f64]| eval_finite(f, &cube.eval(x)?, "field on the cube");
    let mut acc = Multivector::zero(cube.m());
    for (i, ni) in normals.iter().enumerate() {
        let d = partial(g, x0, i, FD_H0, true)?;
        acc += &geometric_product(ni, &d)?;
    }
    Ok(acc)
}

/// `d_i g(x)` by Richardson-extrapolated differences. With `bounded`, central
/// differences stay inside `[0,1]` along axis `i`; points within
/// `1e-6` of an end fall back to one-sided second-order stencils.
pub(crate) fn partial<G>(g: G, x: &[f64], i: usize, h_max: f64, bounded: bool) -> Result<Multivector>
where
    G: Fn(&[f64]) -> Result<Multivector>,
{
    let levels = FD_LEVELS;
    let xi = x[i];
    let inside = bounded && (0.0..=1.0).contains(&xi);
    let room = if inside { xi.min(1.0 - xi) } else { f64::INFINITY };
    let mut probe = x.to_vec();
    let mut at = |t: f64| {
        probe[i] = t;
        g(&probe)
    };
    let mut seq = Vec::with_capacity(levels);
    if room >= 1e-6 {
        let h0 = h_max.min(0.95 * room);
        for k in 0..levels {
            let h = h0 / 2f64.powi(k as i32);
            let d = &at(xi + h)? - &at(xi - h)?;
            seq.push(d.scale(0.5 / h));
        }
        Ok(richardson(&seq, 2, 2).0)
    } else {
        let s = if xi > 0.5 { -1.0 } else { 1.0 };
        let g0 = at(xi)?;
        let h0 = h_max.min(0.45);
        for k in 0..levels {
            let h = h0 / 2f64.powi(k as i32);
            let g1 = at(xi + s * h)?;
            let g2 = at(xi + 2.0 * s * h)?;
            let d = &(&g1.scale(4.0) - &g0.scale(3.0)) - &g2;
            seq.push(d.scale(0.5 * s / h));
        }
        Ok(richardson(&seq, 2, 1).0)
    }
}

/// `i`-th point of the Halton sequence in dimension `n` (bases 2, 3, 5, ...).
pub fn halton_point(index: usize, n: usize) -> Vec<f64> {
    const PRIMES: [usize; 8] = [2, 3, 5, 7, 11, 13, 17, 19];
    PRIMES[..n]
        .iter()
        .map(|&b| {
            let (mut f, mut r, mut k) = (1.0, 0.0, index);
            while k > 0 {
                f /= b as f64;
                r += f * (k % b) as f64;
                k /= b;
            }
            r
        })
        .collect()
}

/// Interior sample points: Halton points 1..=count mapped into `(0.05, 0.95)^n`.
pub fn interior_samples(n: usize, count: usize) -> Vec<Vec<f64>> {
    (1..=count)
        .map(|k| halton_point(k, n).into_iter().map(|h| 0.05 + 0.9 * h).collect())
        .collect()
}

/// Largest `|tangential_derivative_coordinate|` over interior samples of every term.
pub fn monogenic_defect<F: Field + ?Sized>(chain: &Chain, f: &F, samples: usize) -> Result<f64> {
    if samples == 0 {
        return Err(Error::InvalidArgument("monogenic_defect needs at least one sample".into()));
    }
    let points = interior_samples(chain.n(), samples);
    let jobs: Vec<(&SingularCube, &Vec<f64>)> = chain
        .terms()
        .flat_map(|(_, cube)| points.iter().map(move |p| (cube, p)))
        .collect();
    let norms = jobs
        .par_iter()
        .map(|(cube, p)| Ok(tangential_derivative_coordinate(cube, f, p)?.norm()))
        .collect::<Result<Vec<f64>>>()?;
    Ok(norms.into_iter().fold(0.0, f64::max))
}
