//! Brute-force dense assembly for tiny meshes.
//!
//! Every entry is computed from its definition: basis functions are evaluated in physical
//! coordinates from explicit Legendre formulas, volume integrals use a high-order Gauss rule
//! on each cell, and trace terms are built by asking each basis function for its value on
//! each side of each interface. Nothing here shares code with the production assembly apart
//! from the flux functions and the quadrature nodes.

use nalgebra::{DMatrix, DVector};

use crate::error::{DgError, Result};
use crate::flux;
use crate::mesh::Mesh1D;
use crate::quadrature::{gauss_legendre, QuadratureRule};
use crate::scheme::SchemeKind;

pub const MAX_ORACLE_CELLS: usize = 8;
pub const MAX_ORACLE_DEGREE: usize = 2;

fn leg(m: usize, xi: f64) -> f64 {
    match m {
        0 => 1.0,
        1 => xi,
        2 => 1.5 * xi * xi - 0.5,
        _ => unreachable!("oracle degree is capped at 2"),
    }
}

fn leg_d(m: usize, xi: f64) -> f64 {
    match m {
        0 => 0.0,
        1 => 1.0,
        2 => 3.0 * xi,
        _ => unreachable!("oracle degree is capped at 2"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    /// Limit from the left of the interface.
    Minus,
    /// Limit from the right of the interface.
    Plus,
}

#[derive(Debug)]
pub struct DenseOracle {
    pub kind: SchemeKind,
    pub p: u32,
    mesh: Mesh1D,
    k: usize,
    quad: QuadratureRule,
    pub mass: DMatrix<f64>,
    pub l_plus: DMatrix<f64>,
    pub l_minus: DMatrix<f64>,
    pub l_central: DMatrix<f64>,
    /// Coupled system in the production ordering `[x_j, y_j]` per cell.
    pub system: DMatrix<f64>,
}

impl DenseOracle {
    fn nm(&self) -> usize {
        self.k + 1
    }

    fn dof(&self, j: usize, m: usize) -> usize {
        j * self.nm() + m
    }

    /// Basis function `(j, m)` at physical `x` inside cell `cell` (zero elsewhere).
    fn phi(&self, j: usize, m: usize, cell: usize, x: f64) -> f64 {
        if j != cell {
            return 0.0;
        }
        let xi = 2.0 * (x - self.mesh.centers()[j]) / self.mesh.width(j);
        leg(m, xi)
    }

    fn phi_x(&self, j: usize, m: usize, cell: usize, x: f64) -> f64 {
        if j != cell {
            return 0.0;
        }
        let h = self.mesh.width(j);
        let xi = 2.0 * (x - self.mesh.centers()[j]) / h;
        2.0 / h * leg_d(m, xi)
    }

    /// One-sided limit of basis function `(j, m)` at interface `i`.
    fn trace(&self, j: usize, m: usize, i: usize, side: Side) -> f64 {
        let n = self.mesh.n_cells();
        let (cell, x) = match side {
            Side::Minus => {
                let c = (i + n - 1) % n;
                (c, self.mesh.edges()[c + 1])
            }
            Side::Plus => {
                let c = i % n;
                (c, self.mesh.edges()[c])
            }
        };
        self.phi(j, m, cell, x)
    }

    fn cell_points(&self, j: usize) -> Vec<(f64, f64)> {
        let (lo, hi) = (self.mesh.edges()[j], self.mesh.edges()[j + 1]);
        self.quad
            .nodes
            .iter()
            .zip(&self.quad.weights)
            .map(|(&xi, &w)| (0.5 * (lo + hi) + 0.5 * (hi - lo) * xi, 0.5 * (hi - lo) * w))
            .collect()
    }

    /// Matrix with entry `[(j,n), (j',m)] = L(φ_{j',m}, φ_{j,n})` for a linear flux with
    /// weights `(wm, wp)` on the minus and plus traces.
    fn linear_form(&self, wm: f64, wp: f64) -> DMatrix<f64> {
        let n = self.mesh.n_cells();
        let nm = self.nm();
        let mut a = DMatrix::zeros(n * nm, n * nm);
        for j in 0..n {
            for t in 0..nm {
                let row = self.dof(j, t);
                for jj in 0..n {
                    for m in 0..nm {
                        let col = self.dof(jj, m);
                        let mut v = 0.0;
                        for (x, w) in self.cell_points(j) {
                            v -= w * self.phi(jj, m, j, x) * self.phi_x(j, t, j, x);
                        }
                        let right_if = j + 1;
                        let left_if = j;
                        let hat = |i: usize| {
                            wm * self.trace(jj, m, i, Side::Minus)
                                + wp * self.trace(jj, m, i, Side::Plus)
                        };
                        v += hat(right_if) * self.trace(j, t, right_if, Side::Minus);
                        v -= hat(left_if) * self.trace(j, t, left_if, Side::Plus);
                        a[(row, col)] = v;
                    }
                }
            }
        }
        a
    }

    fn linear(&self, kind: crate::flux::FluxKind) -> &DMatrix<f64> {
        match kind {
            crate::flux::FluxKind::LeftTrace => &self.l_minus,
            crate::flux::FluxKind::RightTrace => &self.l_plus,
            _ => &self.l_central,
        }
    }

    /// Evaluates a coefficient vector at `x` in `cell`.
    fn eval(&self, c: &[f64], cell: usize, x: f64) -> f64 {
        (0..self.nm())
            .map(|m| c[self.dof(cell, m)] * self.phi(cell, m, cell, x))
            .sum()
    }

    fn eval_trace(&self, c: &[f64], i: usize, side: Side) -> f64 {
        let n = self.mesh.n_cells();
        let mut v = 0.0;
        for j in 0..n {
            for m in 0..self.nm() {
                v += c[self.dof(j, m)] * self.trace(j, m, i, side);
            }
        }
        v
    }

    /// Load vector of `N(u, φ)` for every basis function.
    pub fn nonlinear_load(&self, u: &[f64]) -> Vec<f64> {
        let n = self.mesh.n_cells();
        let nm = self.nm();
        let mut b = vec![0.0; n * nm];
        for j in 0..n {
            for t in 0..nm {
                let mut v = 0.0;
                for (x, w) in self.cell_points(j) {
                    v -= w * flux::f(self.eval(u, j, x), self.p) * self.phi_x(j, t, j, x);
                }
                for (i, sign) in [(j + 1, 1.0), (j, -1.0)] {
                    let um = self.eval_trace(u, i, Side::Minus);
                    let up = self.eval_trace(u, i, Side::Plus);
                    let fhat = if self.kind.is_dissipative() {
                        flux::godunov_flux(um, up, self.p)
                    } else {
                        flux::conservative_flux(um, up, self.p)
                    };
                    let side = if sign > 0.0 { Side::Minus } else { Side::Plus };
                    v += sign * fhat * self.trace(j, t, i, side);
                }
                b[self.dof(j, t)] = v;
            }
        }
        b
    }

    fn to_interleaved(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let nm = self.nm();
        let n = self.mesh.n_cells();
        let mut out = DVector::zeros(2 * n * nm);
        for j in 0..n {
            for m in 0..nm {
                out[j * 2 * nm + m] = x[j * nm + m];
                out[j * 2 * nm + nm + m] = y[j * nm + m];
            }
        }
        out
    }

    fn from_interleaved(&self, z: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        let nm = self.nm();
        let n = self.mesh.n_cells();
        let mut x = DVector::zeros(n * nm);
        let mut y = DVector::zeros(n * nm);
        for j in 0..n {
            for m in 0..nm {
                x[j * nm + m] = z[j * 2 * nm + m];
                y[j * nm + m] = z[j * 2 * nm + nm + m];
            }
        }
        (x, y)
    }

    fn solve_system(
        &self,
        b0: &DVector<f64>,
        b1: &DVector<f64>,
    ) -> Result<(DVector<f64>, DVector<f64>)> {
        let rhs = self.to_interleaved(b0, b1);
        let z = self
            .system
            .clone()
            .lu()
            .solve(&rhs)
            .ok_or_else(|| DgError::OracleRefused("dense system is singular".into()))?;
        Ok(self.from_interleaved(&z))
    }

    fn mass_solve(&self, b: &DVector<f64>) -> Result<DVector<f64>> {
        self.mass
            .clone()
            .lu()
            .solve(b)
            .ok_or_else(|| DgError::OracleRefused("mass matrix is singular".into()))
    }

    /// Time derivative of the evolved variable (`u` or `w`) for an unforced state.
    pub fn rhs(&self, state: &[f64]) -> Result<Vec<f64>> {
        let nd = self.mesh.n_cells() * self.nm();
        if state.len() != nd {
            return Err(DgError::SizeMismatch {
                expected: nd,
                got: state.len(),
            });
        }
        let st = DVector::from_column_slice(state);
        let nl = |u: &DVector<f64>| DVector::from_vec(self.nonlinear_load(u.as_slice()));
        let zero = DVector::zeros(nd);
        let dissipative = self.kind.is_dissipative();
        let out = if self.kind.is_first_form() {
            let u_hat = if dissipative {
                &self.l_minus
            } else {
                &self.l_central
            };
            let (v, _q) = self.solve_system(&(u_hat * &st), &zero)?;
            -self.mass_solve(&nl(&st))? - v
        } else {
            let (u, _r) = self.solve_system(&(&self.mass * &st), &zero)?;
            let s = self.mass_solve(&nl(&u))?;
            let (s_hat, p_hat) = if dissipative {
                (&self.l_plus, &self.l_minus)
            } else {
                (&self.l_central, &self.l_central)
            };
            let p = self.mass_solve(&(s_hat * &s))? - &u;
            self.mass_solve(&(p_hat * &p))? - s
        };
        Ok(out.as_slice().to_vec())
    }
}

/// Builds every weak-form matrix of `kind` on `mesh` with polynomial degree `k` densely.
pub fn dense_oracle_assemble(
    kind: SchemeKind,
    mesh: &Mesh1D,
    k: usize,
    p: u32,
) -> Result<DenseOracle> {
    if mesh.n_cells() > MAX_ORACLE_CELLS || k > MAX_ORACLE_DEGREE {
        return Err(DgError::OracleRefused(format!(
            "N = {}, k = {k} exceeds the oracle limits N <= {MAX_ORACLE_CELLS}, k <= {MAX_ORACLE_DEGREE}",
            mesh.n_cells()
        )));
    }
    if !(2..=8).contains(&p) {
        return Err(DgError::OracleRefused(format!("p = {p} outside 2..=8")));
    }
    let quad = gauss_legendre(12)?;
    let n = mesh.n_cells();
    let nm = k + 1;
    let mut o = DenseOracle {
        kind,
        p,
        mesh: mesh.clone(),
        k,
        quad,
        mass: DMatrix::zeros(n * nm, n * nm),
        l_plus: DMatrix::zeros(0, 0),
        l_minus: DMatrix::zeros(0, 0),
        l_central: DMatrix::zeros(0, 0),
        system: DMatrix::zeros(0, 0),
    };
    for j in 0..n {
        for t in 0..nm {
            for jj in 0..n {
                for m in 0..nm {
                    let mut v = 0.0;
                    for (x, w) in o.cell_points(j) {
                        v += w * o.phi(j, t, j, x) * o.phi(jj, m, j, x);
                    }
                    let (r, c) = (o.dof(j, t), o.dof(jj, m));
                    o.mass[(r, c)] = v;
                }
            }
        }
    }
    o.l_plus = o.linear_form(0.0, 1.0);
    o.l_minus = o.linear_form(1.0, 0.0);
    o.l_central = o.linear_form(0.5, 0.5);
    let (first, second) = kind.system_fluxes();
    let a = o.linear(first).clone();
    let b = o.linear(second).clone();
    let mut block = DMatrix::zeros(2 * n * nm, 2 * n * nm);
    block.view_mut((0, 0), (n * nm, n * nm)).copy_from(&o.mass);
    block
        .view_mut((0, n * nm), (n * nm, n * nm))
        .copy_from(&(-a));
    block
        .view_mut((n * nm, 0), (n * nm, n * nm))
        .copy_from(&(-b));
    block
        .view_mut((n * nm, n * nm), (n * nm, n * nm))
        .copy_from(&o.mass);
    // permute the [x; y] blocks into per-cell interleaving
    let perm: Vec<usize> = (0..2 * n * nm)
        .map(|g| {
            let (j, r) = (g / (2 * nm), g % (2 * nm));
            if r < nm {
                j * nm + r
            } else {
                n * nm + j * nm + (r - nm)
            }
        })
        .collect();
    o.system = DMatrix::from_fn(2 * n * nm, 2 * n * nm, |r, c| block[(perm[r], perm[c])]);
    Ok(o)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Mesh1D;

    #[test]
    fn refuses_large_problems() {
        let m = Mesh1D::uniform(0.0, 1.0, 9).unwrap();
        assert!(matches!(
            dense_oracle_assemble(SchemeKind::D1, &m, 1, 2),
            Err(DgError::OracleRefused(_))
        ));
        let m = Mesh1D::uniform(0.0, 1.0, 4).unwrap();
        assert!(dense_oracle_assemble(SchemeKind::D1, &m, 3, 2).is_err());
    }

    #[test]
    fn piecewise_constant_minus_form() {
        let m = Mesh1D::uniform(0.0, 1.0, 4).unwrap();
        let o = dense_oracle_assemble(SchemeKind::D1, &m, 0, 2).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                let expect = if r == c {
                    1.0
                } else if c == (r + 3) % 4 {
                    -1.0
                } else {
                    0.0
                };
                assert!((o.l_minus[(r, c)] - expect).abs() < 1e-15);
            }
            assert!((o.mass[(r, r)] - 0.25).abs() < 1e-15);
        }
    }
}
