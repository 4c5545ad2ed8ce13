//! Tensor-product Gauss-Legendre rules on axis-aligned boxes.

use crate::field::{pairwise_sum, Field};
use crate::ga::Multivector;
use crate::gauge::Cube;
use crate::{Error, Result};

/// Nodes and weights of the `order`-point Gauss-Legendre rule on `[0, 1]`.
pub fn gauss_legendre(order: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if order < 1 {
        return Err(Error::InvalidOrder(order));
    }
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Newton on P_n starting from the Chebyshev-like guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // map [-1, 1] -> [0, 1]
        nodes[i] = 0.5 * (1.0 - x);
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    Ok((nodes, weights))
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p, d)
}

/// Axis-aligned box `[lower_1, upper_1] x ... x [lower_k, upper_k]`; `k` may be 0,
/// in which case the box is a single point with unit measure.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxRegion {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoxRegion {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::InvalidArgument("box bounds have different lengths".into()));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l <= u)) {
            return Err(Error::InvalidArgument(format!("empty box {lower:?}..{upper:?}")));
        }
        Ok(Self { lower, upper })
    }

    pub fn unit(k: usize) -> Self {
        Self {
            lower: vec![0.0; k],
            upper: vec![1.0; k],
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }
}

impl From<&Cube> for BoxRegion {
    fn from(c: &Cube) -> Self {
        let lower = c.corner().to_vec();
        let upper = lower.iter().map(|l| l + c.side()).collect();
        Self { lower, upper }
    }
}

/// Integrates `f` over `region` with the tensor Gauss-Legendre rule of the given order.
pub fn gauss_quadrature<F: Field + ?Sized>(f: &F, region: &BoxRegion, order: usize) -> Result<Multivector> {
    integrate_box(region, order, |x| f.eval(x))
}

/// Tensor Gauss rule with a fallible integrand closure.
pub(crate) fn integrate_box<G>(region: &BoxRegion, order: usize, integrand: G) -> Result<Multivector>
where
    G: Fn(&[f64]) -> Result<Multivector>,
{
    let (nodes, weights) = gauss_legendre(order)?;
    let k = region.dim();
    let widths: Vec<f64> = region.lower.iter().zip(&region.upper).map(|(l, u)| u - l).collect();
    let mut idx = vec![0usize; k];
    let mut x = vec![0.0; k];
    let mut terms = Vec::with_capacity(order.pow(k as u32));
    loop {
        let mut w = 1.0;
        for d in 0..k {
            x[d] = region.lower[d] + widths[d] * nodes[idx[d]];
            w *= widths[d] * weights[idx[d]];
        }
        let value = integrand(&x)?;
        if !value.is_finite() {
            return Err(Error::NonFinite(format!("quadrature integrand at {x:?}")));
        }
        terms.push(value.scale(w));
        // odometer
        let mut d = 0;
        loop {
            if d == k {
                return Ok(pairwise_sum(terms).expect("at least one node"));
            }
            idx[d] += 1;
            if idx[d] < order {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_one_and_nodes_are_symmetric() {
        for order in 1..=40 {
            let (x, w) = gauss_legendre(order).unwrap();
            let total: f64 = w.iter().sum();
            assert!((total - 1.0).abs() < 1e-14, "order {order}");
            for i in 0..order {
                assert!((x[i] + x[order - 1 - i] - 1.0).abs() < 1e-15);
                assert!(x[i] > 0.0 && x[i] < 1.0);
            }
        }
    }

    #[test]
    fn polynomial_exactness() {
        for order in 1..=12 {
            let (x, w) = gauss_legendre(order).unwrap();
            for deg in 0..2 * order {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = 1.0 / (deg as f64 + 1.0);
                assert!((q - exact).abs() < 1e-14, "order {order} degree {deg}");
            }
        }
    }

    #[test]
    fn examples() {
        let one = |_: &[f64]| Multivector::scalar(2, 1.0);
        for order in 1..5 {
            let v = gauss_quadrature(&one, &BoxRegion::unit(2), order).unwrap();
            assert!((v.scalar_part() - 1.0).abs() < 1e-15);
        }
        let sq = |x: &[f64]| Multivector::scalar(1, x[0] * x[0]);
        let v = gauss_quadrature(&sq, &BoxRegion::unit(1), 2).unwrap();
        assert!((v.scalar_part() - 1.0 / 3.0).abs() < 1e-14);
        let xy = |x: &[f64]| Multivector::scalar(2, x[0] * x[1]);
        let v = gauss_quadrature(&xy, &BoxRegion::unit(2), 2).unwrap();
        assert!((v.scalar_part() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn zero_order_is_rejected_and_point_boxes_evaluate_once() {
        let one = |_: &[f64]| Multivector::scalar(2, 1.0);
        assert!(matches!(
            gauss_quadrature(&one, &BoxRegion::unit(2), 0),
            Err(Error::InvalidOrder(0))
        ));
        let v = gauss_quadrature(&one, &BoxRegion::unit(0), 3).unwrap();
        assert_eq!(v.scalar_part(), 1.0);
    }

    #[test]
    fn shifted_boxes_scale_by_volume() {
        let r = BoxRegion::new(vec![1.0, -1.0], vec![3.0, 0.5]).unwrap();
        let f = |x: &[f64]| Multivector::scalar(2, x[0]);
        let v = gauss_quadrature(&f, &r, 3).unwrap();
        // integral of x over [1,3] is 4, times width 1.5
        assert!((v.scalar_part() - 6.0).abs() < 1e-13);
        assert!(BoxRegion::new(vec![1.0], vec![0.0]).is_err());
    }
}
