//! Schemes D1 and C1 for `u_t + f(u)_x + (1 − ∂x²)⁻¹ u_x = 0`, written as
//! `u_t + f(u)_x + v = 0, v − q_x = u_x, q = v_x`.

use std::sync::Arc;

use crate::error::{DgError, Result};
use crate::field::{project_l2, DgField, DgSpace};
use crate::helmholtz::HelmholtzSystem;
use crate::operators::{jump_product, OperatorKind, WeakOperators};
use crate::scheme::{SchemeKind, SourceTerm};

/// Bound on the normalized auxiliary energy identity checked after each solve.
pub const AUX_IDENTITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug)]
pub struct AuxSolverFW1 {
    kind: SchemeKind,
    ops: WeakOperators,
    system: HelmholtzSystem,
    source: Option<SourceTerm>,
}

/// Right-hand side together with the auxiliary fields it used.
#[derive(Debug, Clone)]
pub struct Fw1Rhs {
    pub v: DgField,
    pub q: DgField,
    pub du: DgField,
}

pub fn assemble_aux_fw1(space: &Arc<DgSpace>, p: u32, kind: SchemeKind) -> Result<AuxSolverFW1> {
    if !kind.is_first_form() {
        return Err(DgError::InvalidParameter(format!(
            "scheme {kind} does not evolve u directly"
        )));
    }
    let (first, second) = kind.system_fluxes();
    let system = HelmholtzSystem::assemble(space, first, second, kind.name())?;
    Ok(AuxSolverFW1 {
        kind,
        ops: WeakOperators::new(space, p)?,
        system,
        source: None,
    })
}

impl AuxSolverFW1 {
    pub fn with_source(mut self, source: Option<SourceTerm>) -> Self {
        self.source = source;
        self
    }

    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    pub fn space(&self) -> &Arc<DgSpace> {
        self.ops.space()
    }

    pub fn operators(&self) -> &WeakOperators {
        &self.ops
    }

    pub fn system(&self) -> &HelmholtzSystem {
        &self.system
    }

    pub fn set_residual_check(&mut self, on: bool) {
        self.system.set_residual_check(on);
    }

    /// Flux used for `û` in the auxiliary equation (the same as for `v̂`'s partner `q̂`).
    fn u_hat(&self) -> OperatorKind {
        if self.kind.is_dissipative() {
            OperatorKind::LMinus
        } else {
            OperatorKind::LCentral
        }
    }

    /// Solves for `(v_h, q_h)` given `u_h`.
    pub fn solve_aux(&self, u: &DgField) -> Result<(DgField, DgField)> {
        let fl = self.ops.interface_fluxes(self.u_hat(), u)?;
        let b0 = self.ops.load_vector(self.u_hat(), u, &fl)?;
        let b1 = vec![0.0; b0.len()];
        let (v, q) = self.system.solve(&b0, &b1)?;
        if self.system.residual_check() {
            let r = aux_identity_residual(u, &v, &q);
            if !(r <= AUX_IDENTITY_TOLERANCE) {
                return Err(DgError::ResidualCheck {
                    what: "auxiliary energy identity",
                    value: r,
                });
            }
        }
        Ok((v, q))
    }

    pub fn rhs_parts(&self, u: &DgField, t: f64) -> Result<Fw1Rhs> {
        let (v, q) = self.solve_aux(u)?;
        let mut du = self.ops.weak_field(self.kind.nonlinear_operator(), u)?;
        du.scale(-1.0);
        du.axpy(-1.0, &v);
        if let Some(src) = &self.source {
            let g = &src.g;
            du.axpy(1.0, &project_l2(self.space(), |x| g(x, t)));
        }
        Ok(Fw1Rhs { v, q, du })
    }

    /// `du_h/dt`.
    pub fn rhs(&self, u: &DgField, t: f64) -> Result<DgField> {
        Ok(self.rhs_parts(u, t)?.du)
    }

    /// `Nᵈ(u,u) + ½ Σ ((⟦u⟧ + ⟦q⟧)² + ⟦v⟧²)`, the rate at which D1 removes `½E2`.
    pub fn dissipation(&self, u: &DgField, v: &DgField, q: &DgField) -> Result<f64> {
        let nd = self.ops.apply_n(OperatorKind::NDissipative, u, u)?;
        let uq = DgField::lincomb(1.0, u, 1.0, q);
        Ok(nd + 0.5 * (jump_product(&uq, &uq) + jump_product(v, v)))
    }
}

/// `|‖v‖² + ‖q‖² + (q, u)| / (1 + ‖u‖²)`.
pub fn aux_identity_residual(u: &DgField, v: &DgField, q: &DgField) -> f64 {
    (v.inner(v) + q.inner(q) + q.inner(u)).abs() / (1.0 + u.inner(u))
}
