//! Gauss-Legendre quadrature on the reference cell [-1, 1].

use crate::error::{DgError, Result};

pub const MAX_POINTS: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn n_points(&self) -> usize {
        self.nodes.len()
    }

    /// Integrates `g` over `[lo, hi]` with the rule mapped affinely.
    pub fn integrate<F: Fn(f64) -> f64>(&self, lo: f64, hi: f64, g: F) -> f64 {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * g(mid + half * x))
            .sum::<f64>()
            * half
    }
}

/// Value and derivative of the Legendre polynomial of degree `n` at `x`.
pub(crate) fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p_prev = 1.0;
    let mut p = x;
    for m in 1..n {
        let m = m as f64;
        let next = ((2.0 * m + 1.0) * x * p - m * p_prev) / (m + 1.0);
        p_prev = p;
        p = next;
    }
    // P_n' = n (x P_n - P_{n-1}) / (x^2 - 1), only used away from the endpoints
    let dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

/// Gauss-Legendre rule with `n_points` nodes, computed by Newton iteration on the
/// three-term recurrence.
pub fn gauss_legendre(n_points: usize) -> Result<QuadratureRule> {
    if n_points == 0 || n_points > MAX_POINTS {
        return Err(DgError::QuadratureOrder(n_points));
    }
    let n = n_points;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    // roots are symmetric, solve for the non-negative half
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-15 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(QuadratureRule { nodes, weights })
}

/// Smallest number of points integrating `u^p * phi'` exactly for `u, phi` of degree `k`.
pub fn quadrature_order_for(k: usize, p: u32) -> usize {
    let degree = (p as usize + 1) * k;
    // 2n - 1 >= degree
    let n = (degree + 2) / 2;
    n.max(k + 1)
}
