//! Piecewise-polynomial fields in the modal Legendre basis.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::basis::{legendre_values, legendre_values_into, LegendreBasis};
use crate::error::{DgError, Result};
use crate::mesh::Mesh1D;
use crate::quadrature::QuadratureRule;

/// Mesh, polynomial degree and the quadrature tables used for projections and norms.
#[derive(Debug)]
pub struct DgSpace {
    mesh: Arc<Mesh1D>,
    degree: usize,
    basis: LegendreBasis,
}

impl DgSpace {
    pub fn new(mesh: Arc<Mesh1D>, degree: usize) -> Result<Arc<Self>> {
        let basis = LegendreBasis::new(degree, degree + 4)?;
        Ok(Arc::new(Self {
            mesh,
            degree,
            basis,
        }))
    }

    pub fn mesh(&self) -> &Mesh1D {
        &self.mesh
    }

    pub fn mesh_arc(&self) -> &Arc<Mesh1D> {
        &self.mesh
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn n_modes(&self) -> usize {
        self.degree + 1
    }

    pub fn n_cells(&self) -> usize {
        self.mesh.n_cells()
    }

    pub fn n_dofs(&self) -> usize {
        self.n_cells() * self.n_modes()
    }

    pub fn basis(&self) -> &LegendreBasis {
        &self.basis
    }

    pub fn quad(&self) -> &QuadratureRule {
        &self.basis.quad
    }

    /// `(P_m, P_m)` on cell `j`.
    #[inline]
    pub fn mass(&self, j: usize, m: usize) -> f64 {
        self.mesh.width(j) / (2.0 * m as f64 + 1.0)
    }

    pub fn compatible(&self, other: &DgSpace) -> bool {
        std::ptr::eq(self, other) || (self.degree == other.degree && self.mesh == other.mesh)
    }
}

/// Left (`minus`) and right (`plus`) traces at one interface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePair {
    pub interface: usize,
    pub left: f64,
    pub right: f64,
}

impl TracePair {
    pub fn jump(&self) -> f64 {
        self.right - self.left
    }

    pub fn average(&self) -> f64 {
        0.5 * (self.right + self.left)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    pub l2: f64,
    pub linf: f64,
    pub boundary_l2: f64,
}

/// Which cell endpoint a Gauss-Radau projection matches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadauSide {
    /// Matches at the left endpoint of every cell.
    Plus,
    /// Matches at the right endpoint of every cell.
    Minus,
}

#[derive(Debug, Clone)]
pub struct DgField {
    space: Arc<DgSpace>,
    coeffs: Vec<f64>,
}

impl DgField {
    pub fn zeros(space: &Arc<DgSpace>) -> Self {
        Self {
            space: space.clone(),
            coeffs: vec![0.0; space.n_dofs()],
        }
    }

    pub fn from_coeffs(space: &Arc<DgSpace>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != space.n_dofs() {
            return Err(DgError::SizeMismatch {
                expected: space.n_dofs(),
                got: coeffs.len(),
            });
        }
        Ok(Self {
            space: space.clone(),
            coeffs,
        })
    }

    pub fn constant(space: &Arc<DgSpace>, c: f64) -> Self {
        let mut f = Self::zeros(space);
        for j in 0..space.n_cells() {
            f.cell_mut(j)[0] = c;
        }
        f
    }

    pub fn space(&self) -> &Arc<DgSpace> {
        &self.space
    }

    pub fn mesh(&self) -> &Mesh1D {
        self.space.mesh()
    }

    pub fn degree(&self) -> usize {
        self.space.degree
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    #[inline]
    pub fn cell(&self, j: usize) -> &[f64] {
        let nm = self.space.n_modes();
        &self.coeffs[j * nm..(j + 1) * nm]
    }

    #[inline]
    pub fn cell_mut(&mut self, j: usize) -> &mut [f64] {
        let nm = self.space.n_modes();
        &mut self.coeffs[j * nm..(j + 1) * nm]
    }

    pub fn check_same_space(&self, other: &DgField) -> Result<()> {
        if self.space.compatible(&other.space) {
            Ok(())
        } else {
            Err(DgError::MeshMismatch)
        }
    }

    pub fn cell_mean(&self, j: usize) -> f64 {
        self.cell(j)[0]
    }

    /// Value at reference coordinate `xi` of cell `j`.
    pub fn value(&self, j: usize, xi: f64) -> f64 {
        let c = self.cell(j);
        let p = legendre_values(c.len() - 1, xi);
        c.iter().zip(&p).map(|(a, b)| a * b).sum()
    }

    /// Value at physical `x`, wrapped periodically. Points on an interface take the
    /// right cell's trace.
    pub fn eval(&self, x: f64) -> f64 {
        let (j, xi) = self.mesh().locate(x);
        self.value(j, xi)
    }

    /// Value at the right end of cell `j` (the `minus` trace of its right interface).
    #[inline]
    pub fn right_trace(&self, j: usize) -> f64 {
        self.cell(j).iter().sum()
    }

    /// Value at the left end of cell `j` (the `plus` trace of its left interface).
    #[inline]
    pub fn left_trace(&self, j: usize) -> f64 {
        self.cell(j)
            .iter()
            .enumerate()
            .map(|(m, c)| if m % 2 == 0 { *c } else { -*c })
            .sum()
    }

    /// One pair per interface, `0..n`, periodic.
    pub fn traces(&self) -> Vec<TracePair> {
        let mesh = self.mesh();
        (0..mesh.n_cells())
            .map(|i| TracePair {
                interface: i,
                left: self.right_trace(mesh.left_cell(i)),
                right: self.left_trace(mesh.right_cell(i)),
            })
            .collect()
    }

    /// `(self, other)` over the whole domain.
    pub fn inner(&self, other: &DgField) -> f64 {
        let nm = self.space.n_modes();
        let mut s = 0.0;
        for j in 0..self.space.n_cells() {
            let a = self.cell(j);
            let b = other.cell(j);
            for m in 0..nm {
                s += self.space.mass(j, m) * a[m] * b[m];
            }
        }
        s
    }

    pub fn integral(&self) -> f64 {
        (0..self.space.n_cells())
            .map(|j| self.mesh().width(j) * self.cell_mean(j))
            .sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    pub fn scale(&mut self, a: f64) {
        self.coeffs.iter_mut().for_each(|c| *c *= a);
    }

    /// `self += a * x`
    pub fn axpy(&mut self, a: f64, x: &DgField) {
        debug_assert_eq!(self.coeffs.len(), x.coeffs.len());
        for (c, xc) in self.coeffs.iter_mut().zip(&x.coeffs) {
            *c += a * xc;
        }
    }

    /// `a * x + b * y`
    pub fn lincomb(a: f64, x: &DgField, b: f64, y: &DgField) -> DgField {
        let coeffs = x
            .coeffs
            .iter()
            .zip(&y.coeffs)
            .map(|(xc, yc)| a * xc + b * yc)
            .collect();
        DgField {
            space: x.space.clone(),
            coeffs,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Norms of the field itself.
    pub fn norms(&self) -> Norms {
        self.error_norms(|_| 0.0)
    }

    /// Norms of `self - g`. The L∞ part samples the quadrature nodes and both
    /// cell endpoints; the boundary part sums squared one-sided traces.
    pub fn error_norms<G: Fn(f64) -> f64>(&self, g: G) -> Norms {
        let mesh = self.mesh();
        let basis = self.space.basis();
        let quad = &basis.quad;
        let mut l2 = 0.0;
        let mut linf: f64 = 0.0;
        let mut bnd = 0.0;
        for j in 0..mesh.n_cells() {
            let c = self.cell(j);
            let half = 0.5 * mesh.width(j);
            for (q, (&xi, &w)) in quad.nodes.iter().zip(&quad.weights).enumerate() {
                let uh: f64 = c.iter().zip(&basis.values[q]).map(|(a, b)| a * b).sum();
                let e = uh - g(mesh.to_physical(j, xi));
                l2 += w * half * e * e;
                linf = linf.max(e.abs());
            }
            let el = self.left_trace(j) - g(mesh.edges()[j]);
            let er = self.right_trace(j) - g(mesh.edges()[j + 1]);
            linf = linf.max(el.abs()).max(er.abs());
            bnd += el * el + er * er;
        }
        Norms {
            l2: l2.sqrt(),
            linf,
            boundary_l2: bnd.sqrt(),
        }
    }

    /// `x,u` rows at `per_cell` equispaced points per cell, endpoints included.
    pub fn to_csv(&self, per_cell: usize) -> String {
        let per_cell = per_cell.max(2);
        let mesh = self.mesh();
        let mut out = String::from("x,u\n");
        let mut p = vec![0.0; self.space.n_modes()];
        for j in 0..mesh.n_cells() {
            let c = self.cell(j);
            for i in 0..per_cell {
                let xi = -1.0 + 2.0 * i as f64 / (per_cell - 1) as f64;
                legendre_values_into(xi, &mut p);
                let u: f64 = c.iter().zip(&p).map(|(a, b)| a * b).sum();
                let _ = writeln!(out, "{:.16e},{:.16e}", mesh.to_physical(j, xi), u);
            }
        }
        out
    }
}

fn project_cell<G: Fn(f64) -> f64>(
    space: &DgSpace,
    j: usize,
    g: &G,
    kinks: &[f64],
    out: &mut [f64],
) {
    let mesh = space.mesh();
    let quad = space.quad();
    let k = space.degree();
    let (lo, hi) = (mesh.edges()[j], mesh.edges()[j + 1]);
    let mut cuts: Vec<f64> = kinks
        .iter()
        .cloned()
        .filter(|&x| x > lo && x < hi)
        .collect();
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out.iter_mut().for_each(|c| *c = 0.0);
    let mut p = vec![0.0; k + 1];
    let mut left = lo;
    for right in cuts.into_iter().chain(std::iter::once(hi)) {
        let half = 0.5 * (right - left);
        let mid = 0.5 * (right + left);
        for (&s, &w) in quad.nodes.iter().zip(&quad.weights) {
            let x = mid + half * s;
            let xi = 2.0 * (x - mesh.centers()[j]) / mesh.width(j);
            legendre_values_into(xi, &mut p);
            let gx = g(x);
            for m in 0..=k {
                out[m] += w * half * gx * p[m];
            }
        }
        left = right;
    }
    for (m, c) in out.iter_mut().enumerate() {
        *c /= space.mass(j, m);
    }
}

/// L² projection onto the space.
pub fn project_l2<G: Fn(f64) -> f64>(space: &Arc<DgSpace>, g: G) -> DgField {
    project_l2_split(space, g, &[])
}

/// L² projection whose cell integrals are split at the given kink locations.
pub fn project_l2_split<G: Fn(f64) -> f64>(space: &Arc<DgSpace>, g: G, kinks: &[f64]) -> DgField {
    let mut f = DgField::zeros(space);
    let nm = space.n_modes();
    for (j, chunk) in f.coeffs.chunks_mut(nm).enumerate() {
        project_cell(space, j, &g, kinks, chunk);
    }
    f
}

/// Gauss-Radau projection: orthogonal to `P^{k-1}` on each cell and exact at one
/// endpoint. Falls back to the L² projection when `k = 0`.
pub fn project_gauss_radau<G: Fn(f64) -> f64>(
    space: &Arc<DgSpace>,
    g: G,
    side: RadauSide,
) -> DgField {
    let mut f = project_l2(space, &g);
    let k = space.degree();
    if k == 0 {
        return f;
    }
    let mesh = space.mesh().clone();
    for j in 0..mesh.n_cells() {
        let c = f.cell_mut(j);
        match side {
            RadauSide::Minus => {
                let target = g(mesh.edges()[j + 1]);
                let partial: f64 = c[..k].iter().sum();
                c[k] = target - partial;
            }
            RadauSide::Plus => {
                let target = g(mesh.edges()[j]);
                let partial: f64 = c[..k]
                    .iter()
                    .enumerate()
                    .map(|(m, a)| LegendreBasis::left_value(m) * a)
                    .sum();
                c[k] = LegendreBasis::left_value(k) * (target - partial);
            }
        }
    }
    f
}
