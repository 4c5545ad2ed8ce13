//! Oracles and fixtures shared by the integration tests. Everything here is
//! written independently of the library's algebra and integrators.
#![allow(dead_code)]

pub mod golden;

use geocalc::Multivector;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Product of two basis blades by explicit bubble sort of the factor list.
pub fn blade_mul(a: usize, b: usize) -> (f64, usize) {
    let mut factors: Vec<usize> = (0..8).filter(|k| a & (1 << k) != 0).collect();
    factors.extend((0..8).filter(|k| b & (1 << k) != 0));
    let mut sign = 1.0;
    // bubble sort, counting transpositions
    for i in 0..factors.len() {
        for j in 0..factors.len() - 1 - i {
            if factors[j] > factors[j + 1] {
                factors.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    // cancel adjacent equal pairs (e_k e_k = 1)
    let mut out: Vec<usize> = Vec::new();
    for f in factors {
        if out.last() == Some(&f) {
            out.pop();
        } else {
            out.push(f);
        }
    }
    (sign, out.iter().fold(0, |m, k| m | (1 << k)))
}

/// Geometric product of coefficient tables.
pub fn gp(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len()];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if *x != 0.0 && *y != 0.0 {
                let (s, k) = blade_mul(i, j);
                out[k] += s * x * y;
            }
        }
    }
    out
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn random_mv(rng: &mut impl Rng, dim: usize) -> Multivector {
    let coeffs = (0..1usize << dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    Multivector::new(dim, coeffs).unwrap()
}

pub fn random_vector(rng: &mut impl Rng, dim: usize) -> Multivector {
    let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    Multivector::vector(dim, &v)
}

/// `c * x^alpha * e_blade`.
#[derive(Debug, Clone)]
pub struct Monomial {
    pub coef: f64,
    pub exps: Vec<u32>,
    pub blade: usize,
}

/// Polynomial multivector field over `R^dim` with exact integrals over the unit cube.
#[derive(Debug, Clone)]
pub struct PolyField {
    pub dim: usize,
    pub terms: Vec<Monomial>,
}

fn blade_text(mask: usize) -> String {
    let digits: String = (0..8).filter(|k| mask & (1 << k) != 0).map(|k| char::from(b'1' + k as u8)).collect();
    format!("e{digits}")
}

/// Integral of `x^alpha` over `[0,1]^k`.
fn cube_moment(exps: &[u32]) -> f64 {
    exps.iter().map(|&a| 1.0 / (a as f64 + 1.0)).product()
}

impl PolyField {
    pub fn random(rng: &mut impl Rng, dim: usize, max_degree: u32) -> Self {
        let count = rng.gen_range(2..=5);
        let coefs = [-2.0, -1.5, -1.0, -0.5, -0.25, 0.25, 0.5, 1.0, 1.5, 2.0];
        let terms = (0..count)
            .map(|_| {
                let degree = rng.gen_range(0..=max_degree);
                let mut exps = vec![0u32; dim];
                for _ in 0..degree {
                    exps[rng.gen_range(0..dim)] += 1;
                }
                Monomial {
                    coef: coefs[rng.gen_range(0..coefs.len())],
                    exps,
                    blade: rng.gen_range(0..1usize << dim),
                }
            })
            .collect();
        Self { dim, terms }
    }

    pub fn to_dsl(&self) -> String {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|t| {
                let mut s = format!("{}", t.coef);
                for (k, &a) in t.exps.iter().enumerate() {
                    match a {
                        0 => {}
                        1 => s.push_str(&format!("*x{}", k + 1)),
                        _ => s.push_str(&format!("*x{}**{a}", k + 1)),
                    }
                }
                if t.blade != 0 {
                    s.push('*');
                    s.push_str(&blade_text(t.blade));
                }
                s
            })
            .collect();
        parts.join(" + ")
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; 1 << self.dim];
        for t in &self.terms {
            let m: f64 = t.exps.iter().zip(x).map(|(&a, x)| x.powi(a as i32)).product();
            out[t.blade] += t.coef * m;
        }
        out
    }

    fn face_tangent(&self, i: usize) -> usize {
        let (_, mask) = blade_mul((1 << self.dim) - 1, 1 << i);
        mask
    }

    fn face_tangent_sign(&self, i: usize) -> f64 {
        blade_mul((1 << self.dim) - 1, 1 << i).0
    }

    /// `sum_i [ int_{x_i=1} a_i F - int_{x_i=0} a_i F ]`, exactly.
    pub fn boundary_exact(&self) -> Vec<f64> {
        let mut out = vec![0.0; 1 << self.dim];
        for i in 0..self.dim {
            let (sa, ma) = (self.face_tangent_sign(i), self.face_tangent(i));
            for t in &self.terms {
                let mut rest = t.exps.clone();
                let ai = rest.remove(i);
                let face = cube_moment(&rest);
                // x_i = 1 minus x_i = 0 (0^0 = 1)
                let diff = 1.0 - if ai == 0 { 1.0 } else { 0.0 };
                let (s, k) = blade_mul(ma, t.blade);
                out[k] += sa * s * t.coef * face * diff;
            }
        }
        out
    }

    /// `int v grad F = sum_i a_i int d_i F`, exactly.
    pub fn volume_exact(&self) -> Vec<f64> {
        let mut out = vec![0.0; 1 << self.dim];
        for i in 0..self.dim {
            let (sa, ma) = (self.face_tangent_sign(i), self.face_tangent(i));
            for t in &self.terms {
                if t.exps[i] == 0 {
                    continue;
                }
                let mut d = t.exps.clone();
                d[i] -= 1;
                let (s, k) = blade_mul(ma, t.blade);
                out[k] += sa * s * t.coef * t.exps[i] as f64 * cube_moment(&d);
            }
        }
        out
    }
}

/// Coefficients written as a field-language sum, `c0 + c1*e1 + ...`,
/// with every coefficient printed so it parses back to the same bits.
pub fn mv_to_dsl(coeffs: &[f64]) -> String {
    coeffs
        .iter()
        .enumerate()
        .map(|(mask, c)| if mask == 0 { format!("{c:?}") } else { format!("{c:?}*{}", blade_text(mask)) })
        .collect::<Vec<_>>()
        .join(" + ")
}

/// `g(y) = ((y1^2 + y1)/2, y2, ...)`, a diffeomorphism of the unit cube.
pub fn warp(y: &[f64]) -> Vec<f64> {
    let mut x = y.to_vec();
    x[0] = 0.5 * (y[0] * y[0] + y[0]);
    x
}

pub fn unwarp(x: &[f64]) -> Vec<f64> {
    let mut y = x.to_vec();
    y[0] = 0.5 * (-1.0 + (1.0 + 8.0 * x[0]).sqrt());
    y
}

/// `cube` composed with [`warp`].
pub fn warped(cube: &geocalc::SingularCube) -> geocalc::SingularCube {
    let inner = cube.clone();
    geocalc::SingularCube::try_new(cube.n(), cube.m(), move |y| inner.eval(&warp(y)))
        .unwrap()
        .with_label(format!("warped {}", cube.label()))
}
