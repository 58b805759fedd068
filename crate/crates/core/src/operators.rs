//! Cell-wise weak forms summed over the mesh:
//!
//! * `L(ω, φ) = Σ_j [ -(ω, φ_x)_j + ω̂_{j+1/2} φ(x_{j+1/2}⁻) - ω̂_{j-1/2} φ(x_{j-1/2}⁺) ]`
//! * `N(ω, φ)` is the same with `ω` replaced by `f(ω)` and a nonlinear flux.
//!
//! Each form is available as a scalar (for identity checks) and as a load vector
//! or mass-inverted field (for scheme right-hand sides).

use std::sync::Arc;

use crate::basis::LegendreBasis;
use crate::error::{DgError, Result};
use crate::field::{DgField, DgSpace};
use crate::flux::{self, FluxKind};
use crate::quadrature::quadrature_order_for;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    LPlus,
    LMinus,
    LCentral,
    NDissipative,
    NConservative,
}

impl OperatorKind {
    pub fn flux(self) -> FluxKind {
        match self {
            OperatorKind::LPlus => FluxKind::RightTrace,
            OperatorKind::LMinus => FluxKind::LeftTrace,
            OperatorKind::LCentral => FluxKind::Central,
            OperatorKind::NDissipative => FluxKind::GodunovF,
            OperatorKind::NConservative => FluxKind::ConservativeF,
        }
    }

    pub fn is_nonlinear(self) -> bool {
        self.flux().is_nonlinear()
    }

    pub fn linear(flux: FluxKind) -> Result<Self> {
        match flux {
            FluxKind::RightTrace => Ok(OperatorKind::LPlus),
            FluxKind::LeftTrace => Ok(OperatorKind::LMinus),
            FluxKind::Central => Ok(OperatorKind::LCentral),
            other => Err(DgError::FluxKind(other)),
        }
    }
}

/// Precomputed tables for the weak forms on one space and one exponent `p`.
#[derive(Debug)]
pub struct WeakOperators {
    space: Arc<DgSpace>,
    p: u32,
    nl: LegendreBasis,
}

impl WeakOperators {
    pub fn new(space: &Arc<DgSpace>, p: u32) -> Result<Self> {
        if p < 2 {
            return Err(DgError::InvalidParameter(format!(
                "p must be >= 2, got {p}"
            )));
        }
        let k = space.degree();
        let nl = LegendreBasis::new(k, quadrature_order_for(k, p))?;
        Ok(Self {
            space: space.clone(),
            p,
            nl,
        })
    }

    pub fn space(&self) -> &Arc<DgSpace> {
        &self.space
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    fn check(&self, field: &DgField) -> Result<()> {
        if self.space.compatible(field.space()) {
            Ok(())
        } else {
            Err(DgError::MeshMismatch)
        }
    }

    /// Flux value at every interface `0..n`.
    pub fn interface_fluxes(&self, kind: OperatorKind, omega: &DgField) -> Result<Vec<f64>> {
        self.check(omega)?;
        let mesh = self.space.mesh();
        let n = mesh.n_cells();
        let flux_kind = kind.flux();
        let mut out = Vec::with_capacity(n);
        if flux_kind.is_nonlinear() {
            for i in 0..n {
                let um = omega.right_trace(mesh.left_cell(i));
                let up = omega.left_trace(mesh.right_cell(i));
                out.push(flux::nonlinear_flux(flux_kind, um, up, self.p)?);
            }
        } else {
            let (wm, wp) = flux_kind.linear_weights()?;
            for i in 0..n {
                let um = omega.right_trace(mesh.left_cell(i));
                let up = omega.left_trace(mesh.right_cell(i));
                out.push(wm * um + wp * up);
            }
        }
        Ok(out)
    }

    /// Load vector `b[j, n] = L_j(ω, P_n)` (or `N_j`) using the given interface fluxes.
    pub fn load_vector(
        &self,
        kind: OperatorKind,
        omega: &DgField,
        fluxes: &[f64],
    ) -> Result<Vec<f64>> {
        self.check(omega)?;
        let mesh = self.space.mesh();
        let n_cells = mesh.n_cells();
        if fluxes.len() != n_cells {
            return Err(DgError::SizeMismatch {
                expected: n_cells,
                got: fluxes.len(),
            });
        }
        let nm = self.space.n_modes();
        let mut b = vec![0.0; n_cells * nm];
        let stiff = &self.space.basis().stiffness;
        let nonlinear = kind.is_nonlinear();
        let mut fvals = vec![0.0; self.nl.quad.n_points()];
        for j in 0..n_cells {
            let c = omega.cell(j);
            let out = &mut b[j * nm..(j + 1) * nm];
            if nonlinear {
                for (q, fv) in fvals.iter_mut().enumerate() {
                    let u: f64 = c.iter().zip(&self.nl.values[q]).map(|(a, b)| a * b).sum();
                    *fv = self.nl.quad.weights[q] * flux::f(u, self.p);
                }
                for (n, o) in out.iter_mut().enumerate() {
                    let vol: f64 = fvals
                        .iter()
                        .enumerate()
                        .map(|(q, fv)| fv * self.nl.derivs[q][n])
                        .sum();
                    *o = -vol;
                }
            } else {
                for (n, o) in out.iter_mut().enumerate() {
                    let vol: f64 = (0..nm).map(|m| c[m] * stiff[m][n]).sum();
                    *o = -vol;
                }
            }
            let fr = fluxes[mesh.right_interface(j)];
            let fl = fluxes[mesh.left_interface(j)];
            for (n, o) in out.iter_mut().enumerate() {
                *o += fr * LegendreBasis::right_value(n) - fl * LegendreBasis::left_value(n);
            }
        }
        Ok(b)
    }

    /// Field `r` with `(r, φ) = form(ω, φ)` for every test function `φ`, with the
    /// interface fluxes supplied by the caller.
    pub fn rhs_contribution(
        &self,
        kind: OperatorKind,
        omega: &DgField,
        fluxes: &[f64],
    ) -> Result<DgField> {
        let b = self.load_vector(kind, omega, fluxes)?;
        Ok(self.mass_solve(b))
    }

    /// Same as [`rhs_contribution`](Self::rhs_contribution) with the fluxes computed from `ω`.
    pub fn weak_field(&self, kind: OperatorKind, omega: &DgField) -> Result<DgField> {
        let fl = self.interface_fluxes(kind, omega)?;
        self.rhs_contribution(kind, omega, &fl)
    }

    /// Divides a load vector by the diagonal mass matrix.
    pub fn mass_solve(&self, mut b: Vec<f64>) -> DgField {
        let nm = self.space.n_modes();
        for (idx, v) in b.iter_mut().enumerate() {
            let (j, m) = (idx / nm, idx % nm);
            *v /= self.space.mass(j, m);
        }
        DgField::from_coeffs(&self.space, b).expect("length matches the space")
    }

    fn pair(&self, kind: OperatorKind, omega: &DgField, phi: &DgField) -> Result<f64> {
        self.check(phi)?;
        let fl = self.interface_fluxes(kind, omega)?;
        let b = self.load_vector(kind, omega, &fl)?;
        Ok(b.iter().zip(phi.coeffs()).map(|(x, y)| x * y).sum())
    }

    /// Global linear form `L^{+,-,c}(ω, φ)`.
    pub fn apply_l(&self, kind: OperatorKind, omega: &DgField, phi: &DgField) -> Result<f64> {
        if kind.is_nonlinear() {
            return Err(DgError::FluxKind(kind.flux()));
        }
        self.pair(kind, omega, phi)
    }

    /// Global nonlinear form `N^{d,c}(ω, φ)`.
    pub fn apply_n(&self, kind: OperatorKind, omega: &DgField, phi: &DgField) -> Result<f64> {
        if !kind.is_nonlinear() {
            return Err(DgError::FluxKind(kind.flux()));
        }
        self.pair(kind, omega, phi)
    }
}

/// `Σ_i [[ω]]_i [[φ]]_i` over all interfaces.
pub fn jump_product(omega: &DgField, phi: &DgField) -> f64 {
    omega
        .traces()
        .iter()
        .zip(phi.traces())
        .map(|(a, b)| a.jump() * b.jump())
        .sum()
}
