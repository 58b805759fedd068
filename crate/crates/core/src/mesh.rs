//! Periodic one-dimensional mesh.
//!
//! Interface `i` sits at `edges[i]`. Its left trace comes from cell `i - 1` and its
//! right trace from cell `i mod n`, so interface `0` and interface `n` coincide.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{DgError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D {
    pub a: f64,
    pub b: f64,
    edges: Vec<f64>,
    centers: Vec<f64>,
    widths: Vec<f64>,
}

impl Mesh1D {
    pub fn uniform(a: f64, b: f64, n_cells: usize) -> Result<Self> {
        build_mesh(a, b, n_cells, 0.0, 0)
    }

    pub fn n_cells(&self) -> usize {
        self.widths.len()
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    pub fn width(&self, j: usize) -> f64 {
        self.widths[j]
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    /// Largest cell width.
    pub fn h(&self) -> f64 {
        self.widths.iter().cloned().fold(0.0, f64::max)
    }

    /// Physical coordinate of reference point `xi` in cell `j`.
    #[inline]
    pub fn to_physical(&self, j: usize, xi: f64) -> f64 {
        self.centers[j] + 0.5 * self.widths[j] * xi
    }

    /// Cell to the left of interface `i` (periodic).
    #[inline]
    pub fn left_cell(&self, i: usize) -> usize {
        let n = self.n_cells();
        (i % n + n - 1) % n
    }

    /// Cell to the right of interface `i` (periodic).
    #[inline]
    pub fn right_cell(&self, i: usize) -> usize {
        i % self.n_cells()
    }

    /// Interface on the left edge of cell `j`.
    #[inline]
    pub fn left_interface(&self, j: usize) -> usize {
        j
    }

    /// Interface on the right edge of cell `j`, wrapped into `0..n`.
    #[inline]
    pub fn right_interface(&self, j: usize) -> usize {
        (j + 1) % self.n_cells()
    }

    /// Cell containing `x` after periodic wrapping, with its reference coordinate.
    pub fn locate(&self, x: f64) -> (usize, f64) {
        let len = self.length();
        let mut y = (x - self.a).rem_euclid(len) + self.a;
        if y >= self.b {
            y = self.a;
        }
        let j = match self.edges.binary_search_by(|e| e.partial_cmp(&y).unwrap()) {
            Ok(i) => i.min(self.n_cells() - 1),
            Err(i) => i.saturating_sub(1).min(self.n_cells() - 1),
        };
        let xi = (2.0 * (y - self.centers[j]) / self.widths[j]).clamp(-1.0, 1.0);
        (j, xi)
    }
}

/// Uniform partition of `[a, b]` whose interior edges are jittered by at most
/// `perturbation * dx / 2`, drawn from a seeded generator.
pub fn build_mesh(a: f64, b: f64, n_cells: usize, perturbation: f64, seed: u64) -> Result<Mesh1D> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(DgError::InvalidMesh(format!("need a < b, got [{a}, {b}]")));
    }
    if n_cells < 2 {
        return Err(DgError::InvalidMesh(format!(
            "need at least 2 cells, got {n_cells}"
        )));
    }
    if !(0.0..1.0).contains(&perturbation) {
        return Err(DgError::InvalidMesh(format!(
            "perturbation must lie in [0, 1), got {perturbation}"
        )));
    }
    let dx = (b - a) / n_cells as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<f64> = (0..=n_cells).map(|i| a + i as f64 * dx).collect();
    edges[n_cells] = b;
    if perturbation > 0.0 {
        for e in edges.iter_mut().take(n_cells).skip(1) {
            *e += perturbation * 0.5 * dx * rng.gen_range(-1.0..=1.0);
        }
    }
    let widths: Vec<f64> = edges.windows(2).map(|w| w[1] - w[0]).collect();
    let centers: Vec<f64> = edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    Ok(Mesh1D {
        a,
        b,
        edges,
        centers,
        widths,
    })
}
