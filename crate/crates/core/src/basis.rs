//! Modal Legendre basis on the reference cell and its precomputed tables.

use crate::error::Result;
use crate::quadrature::{gauss_legendre, QuadratureRule};

/// Values of `P_0..=P_k` at `xi`.
pub fn legendre_values(k: usize, xi: f64) -> Vec<f64> {
    let mut out = vec![0.0; k + 1];
    legendre_values_into(xi, &mut out);
    out
}

pub(crate) fn legendre_values_into(xi: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = xi;
    }
    for n in 1..out.len().saturating_sub(1) {
        let nf = n as f64;
        out[n + 1] = ((2.0 * nf + 1.0) * xi * out[n] - nf * out[n - 1]) / (nf + 1.0);
    }
}

/// Derivatives `P_0'..=P_k'` at `xi` (valid at the endpoints too).
pub fn legendre_derivatives(k: usize, xi: f64) -> Vec<f64> {
    let p = legendre_values(k, xi);
    let mut d = vec![0.0; k + 1];
    for n in 1..=k {
        // P_n' = P_{n-2}' + (2n - 1) P_{n-1}
        let prev = if n >= 2 { d[n - 2] } else { 0.0 };
        d[n] = prev + (2.0 * n as f64 - 1.0) * p[n - 1];
    }
    d
}

#[derive(Debug, Clone)]
pub struct LegendreBasis {
    pub degree: usize,
    pub quad: QuadratureRule,
    /// `values[q][m] = P_m(node_q)`
    pub values: Vec<Vec<f64>>,
    /// `derivs[q][m] = P_m'(node_q)` on the reference cell
    pub derivs: Vec<Vec<f64>>,
    /// `stiffness[m][n] = ∫ P_m P_n' dξ`
    pub stiffness: Vec<Vec<f64>>,
}

impl LegendreBasis {
    /// Tables at the nodes of an `n_points` Gauss rule.
    pub fn new(degree: usize, n_points: usize) -> Result<Self> {
        let quad = gauss_legendre(n_points)?;
        let values: Vec<_> = quad
            .nodes
            .iter()
            .map(|&x| legendre_values(degree, x))
            .collect();
        let derivs: Vec<_> = quad
            .nodes
            .iter()
            .map(|&x| legendre_derivatives(degree, x))
            .collect();
        // the stiffness integrand has degree 2k - 1, exact with k + 1 points
        let sq = gauss_legendre(degree + 1)?;
        let mut stiffness = vec![vec![0.0; degree + 1]; degree + 1];
        for (&x, &w) in sq.nodes.iter().zip(&sq.weights) {
            let p = legendre_values(degree, x);
            let dp = legendre_derivatives(degree, x);
            for m in 0..=degree {
                for n in 0..=degree {
                    stiffness[m][n] += w * p[m] * dp[n];
                }
            }
        }
        Ok(Self {
            degree,
            quad,
            values,
            derivs,
            stiffness,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.degree + 1
    }

    /// `P_m(1) = 1`
    #[inline]
    pub fn right_value(_m: usize) -> f64 {
        1.0
    }

    /// `P_m(-1) = (-1)^m`
    #[inline]
    pub fn left_value(m: usize) -> f64 {
        if m.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// `∫ P_m^2 dξ = 2 / (2m + 1)`
    #[inline]
    pub fn reference_mass(m: usize) -> f64 {
        2.0 / (2.0 * m as f64 + 1.0)
    }
}
