//! Dense geometric (Clifford) algebra over Euclidean `R^m`, `1 <= m <= 8`.
//!
//! A [`Multivector`] stores one real coefficient per basis blade. Blades are
//! indexed by bitmask: bit `k` set means `e_{k+1}` is a factor, and factors are
//! always taken in increasing index order. `e1 e1 = +1` for every basis vector.
//!
//! ```text
//! mask 0b000 -> 1     mask 0b011 -> e12
//! mask 0b001 -> e1    mask 0b101 -> e13
//! mask 0b010 -> e2    mask 0b111 -> e123
//! ```

use std::fmt;
use std::ops::{Add, AddAssign, BitXor, Mul, Neg, Sub};

use thiserror::Error;

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GaError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("ambient dimension {0} outside 1..=8")]
    DimensionOutOfRange(usize),
    #[error("grade {grade} outside 0..={dim}")]
    GradeOutOfRange { grade: usize, dim: usize },
    #[error("coefficient table has length {got}, expected {expected}")]
    BadLength { got: usize, expected: usize },
    #[error("non-finite coefficient on blade {0}")]
    NonFinite(String),
    #[error("invalid blade name `{0}`")]
    BadBladeName(String),
}

/// A grade `k`, checked against an ambient dimension when used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Grade(pub usize);

impl Grade {
    pub fn get(self) -> usize {
        self.0
    }
}

/// Sign picked up when the canonical blades `a` and `b` are multiplied and
/// the result is brought back into increasing factor order.
#[inline]
pub fn reorder_sign(a: usize, b: usize) -> f64 {
    let mut a = a >> 1;
    let mut swaps = 0u32;
    while a != 0 {
        swaps += (a & b).count_ones();
        a >>= 1;
    }
    if swaps & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

#[inline]
pub fn blade_grade(mask: usize) -> usize {
    mask.count_ones() as usize
}

/// `e12`-style name of a basis blade; the scalar blade is `1`.
pub fn blade_name(mask: usize) -> String {
    if mask == 0 {
        return "1".to_string();
    }
    let mut s = String::from("e");
    for k in 0..MAX_DIM {
        if mask & (1 << k) != 0 {
            s.push(char::from(b'1' + k as u8));
        }
    }
    s
}

/// Parses `e1`, `e12`, `e135`, ... into a blade mask. Digits must be strictly
/// increasing and each at most `dim`.
pub fn parse_blade_name(name: &str, dim: usize) -> Result<usize, GaError> {
    let bad = || GaError::BadBladeName(name.to_string());
    let digits = name.strip_prefix('e').ok_or_else(bad)?;
    if digits.is_empty() {
        return Err(bad());
    }
    let mut mask = 0usize;
    let mut last = 0u32;
    for c in digits.chars() {
        let d = c.to_digit(10).ok_or_else(bad)?;
        if d == 0 || d as usize > dim || d <= last {
            return Err(bad());
        }
        last = d;
        mask |= 1 << (d - 1);
    }
    Ok(mask)
}

fn check_dim(dim: usize) -> Result<(), GaError> {
    if (1..=MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        Err(GaError::DimensionOutOfRange(dim))
    }
}

/// Element of the geometric algebra of `R^dim`.
#[derive(Clone, PartialEq)]
pub struct Multivector {
    dim: usize,
    coeffs: Vec<f64>,
}

impl Multivector {
    /// Builds a multivector from a full coefficient table.
    pub fn new(dim: usize, coeffs: Vec<f64>) -> Result<Self, GaError> {
        check_dim(dim)?;
        if coeffs.len() != 1 << dim {
            return Err(GaError::BadLength {
                got: coeffs.len(),
                expected: 1 << dim,
            });
        }
        if let Some(i) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(GaError::NonFinite(blade_name(i)));
        }
        Ok(Self { dim, coeffs })
    }

    /// The zero multivector.
    ///
    /// # Panics
    /// If `dim` is outside `1..=8`.
    pub fn zero(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "ambient dimension {dim} outside 1..=8");
        Self {
            dim,
            coeffs: vec![0.0; 1 << dim],
        }
    }

    pub fn scalar(dim: usize, value: f64) -> Self {
        let mut out = Self::zero(dim);
        out.coeffs[0] = value;
        out
    }

    /// `value` times the basis blade `mask`.
    pub fn blade(dim: usize, mask: usize, value: f64) -> Self {
        let mut out = Self::zero(dim);
        out.coeffs[mask] = value;
        out
    }

    /// Basis vector `e_{k+1}` (zero-based `k`).
    pub fn basis_vector(dim: usize, k: usize) -> Self {
        Self::blade(dim, 1 << k, 1.0)
    }

    /// Grade-1 multivector with the given components.
    ///
    /// # Panics
    /// If `components.len()` exceeds `dim`.
    pub fn vector(dim: usize, components: &[f64]) -> Self {
        assert!(components.len() <= dim);
        let mut out = Self::zero(dim);
        for (k, c) in components.iter().enumerate() {
            out.coeffs[1 << k] = *c;
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, mask: usize) -> f64 {
        self.coeffs[mask]
    }

    pub fn set_coeff(&mut self, mask: usize, value: f64) {
        self.coeffs[mask] = value;
    }

    pub fn scalar_part(&self) -> f64 {
        self.coeffs[0]
    }

    /// The grade-1 components as an `R^dim` vector.
    pub fn vector_part(&self) -> Vec<f64> {
        (0..self.dim).map(|k| self.coeffs[1 << k]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    /// Returns the grade if every nonzero coefficient sits on one grade.
    /// The zero multivector is reported as grade 0.
    pub fn homogeneous_grade(&self) -> Option<usize> {
        let mut grade = None;
        for (mask, c) in self.coeffs.iter().enumerate() {
            if *c != 0.0 {
                let g = blade_grade(mask);
                match grade {
                    None => grade = Some(g),
                    Some(h) if h != g => return None,
                    _ => {}
                }
            }
        }
        Some(grade.unwrap_or(0))
    }

    /// True when every coefficient outside grade 0 is at most `tol` in size.
    pub fn is_scalar(&self, tol: f64) -> bool {
        self.coeffs[1..].iter().all(|c| c.abs() <= tol)
    }

    fn same_dim(&self, other: &Self) -> Result<(), GaError> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(GaError::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            })
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, GaError> {
        self.same_dim(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Self { dim: self.dim, coeffs })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn norm_squared(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// Coefficient 2-norm.
    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn reversion(&self) -> Self {
        reversion(self)
    }

    pub fn grade(&self, k: usize) -> Result<Self, GaError> {
        grade_project(self, Grade(k))
    }
}

pub fn geometric_product(a: &Multivector, b: &Multivector) -> Result<Multivector, GaError> {
    a.same_dim(b)?;
    let mut out = vec![0.0; a.coeffs.len()];
    for (i, &x) in a.coeffs.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in b.coeffs.iter().enumerate() {
            if y == 0.0 {
                continue;
            }
            out[i ^ j] += reorder_sign(i, j) * x * y;
        }
    }
    Ok(Multivector {
        dim: a.dim,
        coeffs: out,
    })
}

pub fn outer_product(a: &Multivector, b: &Multivector) -> Result<Multivector, GaError> {
    a.same_dim(b)?;
    let mut out = vec![0.0; a.coeffs.len()];
    for (i, &x) in a.coeffs.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in b.coeffs.iter().enumerate() {
            if y == 0.0 || i & j != 0 {
                continue;
            }
            out[i | j] += reorder_sign(i, j) * x * y;
        }
    }
    Ok(Multivector {
        dim: a.dim,
        coeffs: out,
    })
}

/// Grade-k part scaled by `(-1)^{k(k-1)/2}`.
pub fn reversion(a: &Multivector) -> Multivector {
    let coeffs = a
        .coeffs
        .iter()
        .enumerate()
        .map(|(mask, c)| {
            let k = blade_grade(mask);
            if (k * k.saturating_sub(1) / 2).is_multiple_of(2) {
                *c
            } else {
                -*c
            }
        })
        .collect();
    Multivector { dim: a.dim, coeffs }
}

pub fn grade_project(a: &Multivector, k: Grade) -> Result<Multivector, GaError> {
    if k.0 > a.dim {
        return Err(GaError::GradeOutOfRange {
            grade: k.0,
            dim: a.dim,
        });
    }
    let coeffs = a
        .coeffs
        .iter()
        .enumerate()
        .map(|(mask, c)| if blade_grade(mask) == k.0 { *c } else { 0.0 })
        .collect();
    Ok(Multivector { dim: a.dim, coeffs })
}

pub fn norm(a: &Multivector) -> f64 {
    a.norm()
}

/// Unit pseudoscalar `e1 e2 ... e_m`.
pub fn pseudoscalar(m: usize) -> Result<Multivector, GaError> {
    check_dim(m)?;
    Ok(Multivector::blade(m, (1 << m) - 1, 1.0))
}

impl fmt::Debug for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Multivector[{}]({})", self.dim, self)
    }
}

/// Prints in field-expression syntax, e.g. `3 + 2*e1 - 0.5*e12`.
impl fmt::Display for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (mask, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let mag = c.abs();
            if first {
                if c < 0.0 {
                    write!(f, "-")?;
                }
            } else if c < 0.0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if mask == 0 {
                write!(f, "{mag}")?;
            } else {
                write!(f, "{mag}*{}", blade_name(mask))?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

// Operator forms panic on dimension mismatch; the free functions return errors.

impl Add for &Multivector {
    type Output = Multivector;
    fn add(self, rhs: &Multivector) -> Multivector {
        self.try_add(rhs).expect("multivector dimension mismatch")
    }
}

impl Add for Multivector {
    type Output = Multivector;
    fn add(self, rhs: Multivector) -> Multivector {
        &self + &rhs
    }
}

impl AddAssign<&Multivector> for Multivector {
    fn add_assign(&mut self, rhs: &Multivector) {
        assert_eq!(self.dim, rhs.dim, "multivector dimension mismatch");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl Sub for &Multivector {
    type Output = Multivector;
    fn sub(self, rhs: &Multivector) -> Multivector {
        self.try_add(&-rhs).expect("multivector dimension mismatch")
    }
}

impl Sub for Multivector {
    type Output = Multivector;
    fn sub(self, rhs: Multivector) -> Multivector {
        &self - &rhs
    }
}

impl Neg for &Multivector {
    type Output = Multivector;
    fn neg(self) -> Multivector {
        self.scale(-1.0)
    }
}

impl Neg for Multivector {
    type Output = Multivector;
    fn neg(self) -> Multivector {
        self.scale(-1.0)
    }
}

impl Mul for &Multivector {
    type Output = Multivector;
    fn mul(self, rhs: &Multivector) -> Multivector {
        geometric_product(self, rhs).expect("multivector dimension mismatch")
    }
}

impl Mul for Multivector {
    type Output = Multivector;
    fn mul(self, rhs: Multivector) -> Multivector {
        &self * &rhs
    }
}

impl Mul<f64> for &Multivector {
    type Output = Multivector;
    fn mul(self, rhs: f64) -> Multivector {
        self.scale(rhs)
    }
}

impl Mul<f64> for Multivector {
    type Output = Multivector;
    fn mul(self, rhs: f64) -> Multivector {
        self.scale(rhs)
    }
}

/// `a ^ b` is the outer product.
impl BitXor for &Multivector {
    type Output = Multivector;
    fn bitxor(self, rhs: &Multivector) -> Multivector {
        outer_product(self, rhs).expect("multivector dimension mismatch")
    }
}
