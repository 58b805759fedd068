//! The coupled first-order system shared by both equation forms:
//!
//! ```text
//! (x, φ) − L^{a}(y, φ) = b₀(φ)
//! (y, ψ) − L^{b}(x, ψ) = b₁(ψ)
//! ```
//!
//! For the auxiliary pair `(v, q)` this is `x = v, y = q, a = q̂, b = v̂` with
//! `b₀ = L^{û}(u, ·)` and `b₁ = 0`; for the elliptic pair `(u, r)` it is `x = u, y = r,
//! a = r̂, b = û` with `b₀ = (w, ·)` and `b₁ = 0`. Unknowns are stored cell by cell as
//! `[x_j, y_j]` so the matrix is block tridiagonal plus the two periodic corner blocks.

use std::sync::Arc;

use crate::basis::LegendreBasis;
use crate::error::{DgError, Result};
use crate::field::{DgField, DgSpace};
use crate::flux::FluxKind;
use crate::linalg::{PeriodicBandLu, SparseMatrix};

/// Pivots below this fraction of `‖A‖∞` count as singular.
pub const PIVOT_TOLERANCE: f64 = 1e-12;
/// Relative residual accepted by the optional post-solve check.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

#[derive(Debug)]
pub struct HelmholtzSystem {
    space: Arc<DgSpace>,
    first: FluxKind,
    second: FluxKind,
    matrix: SparseMatrix,
    lu: PeriodicBandLu,
    check_residual: bool,
}

/// Adds the matrix of `−L^{kind}(y, φ)` to the rows of `row_var` and the columns of `col_var`.
fn add_minus_l(
    a: &mut SparseMatrix,
    space: &DgSpace,
    kind: FluxKind,
    row_var: usize,
    col_var: usize,
) -> Result<()> {
    let (wm, wp) = kind.linear_weights()?;
    let mesh = space.mesh();
    let n = mesh.n_cells();
    let nm = space.n_modes();
    let s = 2 * nm;
    let idx = |j: usize, var: usize, m: usize| j * s + var * nm + m;
    let stiff = &space.basis().stiffness;
    for j in 0..n {
        let jr = (j + 1) % n;
        let jl = (j + n - 1) % n;
        for t in 0..nm {
            let row = idx(j, row_var, t);
            let right_phi = LegendreBasis::right_value(t);
            let left_phi = LegendreBasis::left_value(t);
            for m in 0..nm {
                // volume term −(−(y, φ_x)) = +(y, φ_x)
                if stiff[m][t] != 0.0 {
                    a.add(row, idx(j, col_var, m), stiff[m][t]);
                }
                // −ŷ_{j+1/2} φ(x⁻_{j+1/2}), ŷ = wm·(y_j at its right end) + wp·(y_{j+1} at its left end)
                a.add(
                    row,
                    idx(j, col_var, m),
                    -wm * LegendreBasis::right_value(m) * right_phi,
                );
                a.add(
                    row,
                    idx(jr, col_var, m),
                    -wp * LegendreBasis::left_value(m) * right_phi,
                );
                // +ŷ_{j−1/2} φ(x⁺_{j−1/2})
                a.add(
                    row,
                    idx(jl, col_var, m),
                    wm * LegendreBasis::right_value(m) * left_phi,
                );
                a.add(
                    row,
                    idx(j, col_var, m),
                    wp * LegendreBasis::left_value(m) * left_phi,
                );
            }
        }
    }
    Ok(())
}

impl HelmholtzSystem {
    /// Assembles and factors the system. `label` names the scheme in error messages.
    pub fn assemble(
        space: &Arc<DgSpace>,
        first: FluxKind,
        second: FluxKind,
        label: &str,
    ) -> Result<Self> {
        let matrix = Self::build_matrix(space, first, second)?;
        let nm = space.n_modes();
        let s = 2 * nm;
        let lu = PeriodicBandLu::factor(&matrix, 2 * s - 1, 2 * s - 1, s, PIVOT_TOLERANCE)
            .map_err(|e| DgError::SingularMatrix {
                n_cells: space.n_cells(),
                degree: space.degree(),
                scheme: label.to_string(),
                row: e.row,
                pivot: e.pivot,
            })?;
        Ok(Self {
            space: space.clone(),
            first,
            second,
            matrix,
            lu,
            check_residual: cfg!(debug_assertions),
        })
    }

    pub fn build_matrix(
        space: &DgSpace,
        first: FluxKind,
        second: FluxKind,
    ) -> Result<SparseMatrix> {
        let nm = space.n_modes();
        let n = space.n_cells();
        let mut a = SparseMatrix::new(2 * n * nm);
        for j in 0..n {
            for m in 0..nm {
                let mass = space.mass(j, m);
                a.add(j * 2 * nm + m, j * 2 * nm + m, mass);
                a.add(j * 2 * nm + nm + m, j * 2 * nm + nm + m, mass);
            }
        }
        add_minus_l(&mut a, space, first, 0, 1)?;
        add_minus_l(&mut a, space, second, 1, 0)?;
        Ok(a)
    }

    pub fn space(&self) -> &Arc<DgSpace> {
        &self.space
    }

    pub fn fluxes(&self) -> (FluxKind, FluxKind) {
        (self.first, self.second)
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn set_residual_check(&mut self, on: bool) {
        self.check_residual = on;
    }

    pub fn residual_check(&self) -> bool {
        self.check_residual
    }

    /// Interleaves two load vectors into the global right-hand side.
    pub fn interleave(&self, b0: &[f64], b1: &[f64]) -> Vec<f64> {
        let nm = self.space.n_modes();
        let mut rhs = vec![0.0; 2 * b0.len()];
        for j in 0..self.space.n_cells() {
            rhs[j * 2 * nm..j * 2 * nm + nm].copy_from_slice(&b0[j * nm..(j + 1) * nm]);
            rhs[j * 2 * nm + nm..(j + 1) * 2 * nm].copy_from_slice(&b1[j * nm..(j + 1) * nm]);
        }
        rhs
    }

    /// Splits a global vector into its `x` and `y` fields.
    pub fn split(&self, sol: &[f64]) -> (DgField, DgField) {
        let nm = self.space.n_modes();
        let n = self.space.n_cells();
        let mut x = Vec::with_capacity(n * nm);
        let mut y = Vec::with_capacity(n * nm);
        for j in 0..n {
            x.extend_from_slice(&sol[j * 2 * nm..j * 2 * nm + nm]);
            y.extend_from_slice(&sol[j * 2 * nm + nm..(j + 1) * 2 * nm]);
        }
        (
            DgField::from_coeffs(&self.space, x).expect("sizes match"),
            DgField::from_coeffs(&self.space, y).expect("sizes match"),
        )
    }

    /// Solves with load vectors `b₀`, `b₁` (one entry per basis function).
    pub fn solve(&self, b0: &[f64], b1: &[f64]) -> Result<(DgField, DgField)> {
        let nd = self.space.n_dofs();
        for b in [b0, b1] {
            if b.len() != nd {
                return Err(DgError::SizeMismatch {
                    expected: nd,
                    got: b.len(),
                });
            }
        }
        let rhs = self.interleave(b0, b1);
        let mut sol = rhs.clone();
        self.lu.solve_in_place(&mut sol);
        if self.check_residual {
            let ax = self.matrix.mul_vec(&sol);
            let res = ax
                .iter()
                .zip(&rhs)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            let xn = sol.iter().map(|v| v.abs()).fold(0.0, f64::max);
            let bn = rhs.iter().map(|v| v.abs()).fold(0.0, f64::max);
            let rel = res / (self.matrix.norm_inf() * xn + bn).max(f64::MIN_POSITIVE);
            if !(rel <= RESIDUAL_TOLERANCE) {
                return Err(DgError::ResidualCheck {
                    what: "linear solve",
                    value: rel,
                });
            }
        }
        Ok(self.split(&sol))
    }
}
