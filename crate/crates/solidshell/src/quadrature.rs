//! Gauss-Legendre quadrature on the reference interval [-1, 1] and its
//! tensor product over the reference cube.
//!
//! The tensor rule flattens points in lexicographic order with the first
//! parametric direction running fastest; the element-local projection
//! operators in [`crate::projection`] rely on exactly this ordering.

use crate::{Error, Result};

/// One-dimensional quadrature rule on [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Integrates a function over [-1, 1].
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Legendre polynomial P_n and its derivative at `x`, by the three-term
/// recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 1..n {
        let k = k as f64;
        let p_next = ((2.0 * k + 1.0) * x * p - k * p_prev) / (k + 1.0);
        p_prev = p;
        p = p_next;
    }
    // dP_n/dx = n (x P_n - P_{n-1}) / (x^2 - 1)
    let dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

/// Gauss-Legendre rule with `n` points: exact for polynomials of degree
/// 2n - 1.
pub fn gauss_legendre(n: usize) -> Result<QuadratureRule> {
    if n == 0 || n > 16 {
        return Err(Error::QuadratureOrder(n));
    }
    let mut points = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        if n % 2 == 1 && i == n / 2 {
            x = 0.0;
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Roots come out in descending order; store ascending and mirror so
        // the rule is exactly symmetric about zero.
        points[n - 1 - i] = x;
        points[i] = -x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Ok(QuadratureRule { points, weights })
}

/// Tensor-product rule over the reference cube [-1, 1]^3, flattened with the
/// flat index q = i_xi + n_xi * (i_eta + n_eta * i_zeta).
#[derive(Debug, Clone)]
pub struct TensorRule {
    pub dims: [usize; 3],
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl TensorRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub fn tensor_rule(rules: [&QuadratureRule; 3]) -> TensorRule {
    let dims = [rules[0].len(), rules[1].len(), rules[2].len()];
    let n_q = dims[0] * dims[1] * dims[2];
    let mut points = Vec::with_capacity(n_q);
    let mut weights = Vec::with_capacity(n_q);
    for k in 0..dims[2] {
        for j in 0..dims[1] {
            for i in 0..dims[0] {
                points.push([rules[0].points[i], rules[1].points[j], rules[2].points[k]]);
                weights.push(rules[0].weights[i] * rules[1].weights[j] * rules[2].weights[k]);
            }
        }
    }
    TensorRule {
        dims,
        points,
        weights,
    }
}
