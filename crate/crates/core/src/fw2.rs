//! Schemes D2 and C2 for `w_t + f(u)_x + u_x = f(u)_xxx` with `w = u − u_xx`, written as
//! `u − r_x = w, r = u_x` (elliptic part) and `w_t + s = p_x, p = s_x − u, s = f(u)_x`.

use std::sync::Arc;

use crate::error::{DgError, Result};
use crate::field::{project_l2, DgField, DgSpace};
use crate::helmholtz::HelmholtzSystem;
use crate::operators::{jump_product, OperatorKind, WeakOperators};
use crate::scheme::{SchemeKind, SourceTerm};

#[derive(Debug)]
pub struct EllipticSolverFW2 {
    kind: SchemeKind,
    ops: WeakOperators,
    system: HelmholtzSystem,
    source: Option<SourceTerm>,
}

/// Every intermediate field of one right-hand-side evaluation.
#[derive(Debug, Clone)]
pub struct Fw2Stages {
    pub u: DgField,
    pub r: DgField,
    pub s: DgField,
    pub p: DgField,
    pub dw: DgField,
}

pub fn assemble_elliptic_fw2(
    space: &Arc<DgSpace>,
    p: u32,
    kind: SchemeKind,
) -> Result<EllipticSolverFW2> {
    if kind.is_first_form() {
        return Err(DgError::InvalidParameter(format!(
            "scheme {kind} does not evolve w = u - u_xx"
        )));
    }
    let (first, second) = kind.system_fluxes();
    let system = HelmholtzSystem::assemble(space, first, second, kind.name())?;
    Ok(EllipticSolverFW2 {
        kind,
        ops: WeakOperators::new(space, p)?,
        system,
        source: None,
    })
}

impl EllipticSolverFW2 {
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

    fn r_hat(&self) -> OperatorKind {
        OperatorKind::linear(self.kind.system_fluxes().0).expect("linear flux")
    }

    fn u_hat(&self) -> OperatorKind {
        OperatorKind::linear(self.kind.system_fluxes().1).expect("linear flux")
    }

    fn s_hat(&self) -> OperatorKind {
        if self.kind.is_dissipative() {
            OperatorKind::LPlus
        } else {
            OperatorKind::LCentral
        }
    }

    fn p_hat(&self) -> OperatorKind {
        if self.kind.is_dissipative() {
            OperatorKind::LMinus
        } else {
            OperatorKind::LCentral
        }
    }

    /// Solves the elliptic system for `(u_h, r_h)` given `w_h`.
    pub fn reconstruct_u(&self, w: &DgField) -> Result<(DgField, DgField)> {
        if !self.space().compatible(w.space()) {
            return Err(DgError::MeshMismatch);
        }
        let space = self.space();
        let nm = space.n_modes();
        let b0: Vec<f64> = w
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| c * space.mass(i / nm, i % nm))
            .collect();
        let b1 = vec![0.0; b0.len()];
        self.system.solve(&b0, &b1)
    }

    /// The `w_h` whose reconstruction is exactly `u_h`: `r_h` from the second equation,
    /// then `w_h` from the first.
    pub fn initial_w(&self, u: &DgField) -> Result<DgField> {
        let r = self.ops.weak_field(self.u_hat(), u)?;
        let lr = self.ops.weak_field(self.r_hat(), &r)?;
        Ok(DgField::lincomb(1.0, u, -1.0, &lr))
    }

    pub fn stages(&self, w: &DgField, t: f64) -> Result<Fw2Stages> {
        let (u, r) = self.reconstruct_u(w)?;
        self.stages_from(u, r, t, true)
    }

    fn stages_from(&self, u: DgField, r: DgField, t: f64, forced: bool) -> Result<Fw2Stages> {
        let s = self.ops.weak_field(self.kind.nonlinear_operator(), &u)?;
        let mut p = self.ops.weak_field(self.s_hat(), &s)?;
        p.axpy(-1.0, &u);
        let mut dw = self.ops.weak_field(self.p_hat(), &p)?;
        dw.axpy(-1.0, &s);
        if let Some(src) = self.source.as_ref().filter(|_| forced) {
            let g = &src.helmholtz_g;
            dw.axpy(1.0, &project_l2(self.space(), |x| g(x, t)));
        }
        Ok(Fw2Stages { u, r, s, p, dw })
    }

    /// `dw_h/dt`.
    pub fn rhs(&self, w: &DgField, t: f64) -> Result<DgField> {
        Ok(self.stages(w, t)?.dw)
    }

    /// `((u_h)_t, (r_h)_t)` from the differentiated elliptic system.
    pub fn time_derivatives(&self, dw: &DgField) -> Result<(DgField, DgField)> {
        self.reconstruct_u(dw)
    }

    /// `|‖s + u_t‖² + ‖p + r_t‖² + (u, p + r_t)| / (1 + ‖u‖²)` for the unforced scheme.
    pub fn check_lemma32(&self, w: &DgField) -> Result<f64> {
        let (u, r) = self.reconstruct_u(w)?;
        // the identity concerns the unforced scheme
        let st = self.stages_from(u, r, 0.0, false)?;
        let (ut, rt) = self.time_derivatives(&st.dw)?;
        let a = DgField::lincomb(1.0, &st.s, 1.0, &ut);
        let b = DgField::lincomb(1.0, &st.p, 1.0, &rt);
        let u = &st.u;
        Ok((a.inner(&a) + b.inner(&b) + u.inner(&b)).abs() / (1.0 + u.inner(u)))
    }

    /// `Nᵈ(u,u) + ½ Σ ((⟦r_t⟧ + ⟦p⟧)² + (⟦u_t⟧ + ⟦s⟧)²)`, the rate at which D2 removes `½E2`.
    pub fn dissipation(&self, st: &Fw2Stages, ut: &DgField, rt: &DgField) -> Result<f64> {
        let nd = self.ops.apply_n(OperatorKind::NDissipative, &st.u, &st.u)?;
        let a = DgField::lincomb(1.0, rt, 1.0, &st.p);
        let b = DgField::lincomb(1.0, ut, 1.0, &st.s);
        Ok(nd + 0.5 * (jump_product(&a, &a) + jump_product(&b, &b)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_mesh, Mesh1D};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_field(space: &Arc<DgSpace>, rng: &mut ChaCha8Rng) -> DgField {
        let c = (0..space.n_dofs())
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();
        DgField::from_coeffs(space, c).unwrap()
    }

    #[test]
    fn constants_are_fixed_points() {
        let space = DgSpace::new(Arc::new(build_mesh(0.0, 1.0, 6, 0.2, 5).unwrap()), 2).unwrap();
        for kind in [SchemeKind::D2, SchemeKind::C2] {
            let s = assemble_elliptic_fw2(&space, 2, kind).unwrap();
            let (u, r) = s.reconstruct_u(&DgField::constant(&space, 3.0)).unwrap();
            for j in 0..6 {
                assert!((u.cell(j)[0] - 3.0).abs() < 1e-12);
                assert!(u.cell(j)[1..].iter().all(|c| c.abs() < 1e-12));
            }
            assert!(r.max_abs_coeff() < 1e-12);
        }
    }

    #[test]
    fn helmholtz_pair_converges() {
        // w = 2 cos x reconstructs u = cos x
        for kind in [SchemeKind::D2, SchemeKind::C2] {
            let mut errs = Vec::new();
            for n in [20, 40, 80] {
                let space =
                    DgSpace::new(Arc::new(Mesh1D::uniform(0.0, 2.0 * PI, n).unwrap()), 2).unwrap();
                let s = assemble_elliptic_fw2(&space, 2, kind).unwrap();
                let w = project_l2(&space, |x| 2.0 * x.cos());
                errs.push(s.reconstruct_u(&w).unwrap().0.error_norms(f64::cos).l2);
            }
            let order = (errs[1] / errs[2]).log2();
            assert!(order >= 2.5, "{kind}: order {order}, errors {errs:?}");
        }
    }

    #[test]
    fn initial_w_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let space = DgSpace::new(Arc::new(build_mesh(0.0, 2.0, 7, 0.3, 6).unwrap()), 3).unwrap();
        for kind in [SchemeKind::D2, SchemeKind::C2] {
            let s = assemble_elliptic_fw2(&space, 2, kind).unwrap();
            let u = random_field(&space, &mut rng);
            let w = s.initial_w(&u).unwrap();
            let (u2, _) = s.reconstruct_u(&w).unwrap();
            for (a, b) in u.coeffs().iter().zip(u2.coeffs()) {
                assert!((a - b).abs() < 1e-11);
            }
            assert!((w.integral() - u.integral()).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_state_chain() {
        let space = DgSpace::new(Arc::new(Mesh1D::uniform(0.0, 1.0, 5).unwrap()), 2).unwrap();
        let s = assemble_elliptic_fw2(&space, 3, SchemeKind::D2).unwrap();
        let st = s.stages(&DgField::constant(&space, 0.7), 0.0).unwrap();
        assert!(st.s.max_abs_coeff() < 1e-13);
        assert!(st.dw.max_abs_coeff() < 1e-10);
    }

    #[test]
    fn energy_rates_and_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let space = DgSpace::new(Arc::new(build_mesh(0.0, 2.0, 16, 0.2, 3).unwrap()), 2).unwrap();
        let d2 = assemble_elliptic_fw2(&space, 3, SchemeKind::D2).unwrap();
        let c2 = assemble_elliptic_fw2(&space, 3, SchemeKind::C2).unwrap();
        for _ in 0..10 {
            let w = random_field(&space, &mut rng);
            for solver in [&d2, &c2] {
                assert!(solver.check_lemma32(&w).unwrap() < 1e-9);
                let st = solver.stages(&w, 0.0).unwrap();
                assert!(st.dw.integral().abs() < 1e-12);
                let (ut, rt) = solver.time_derivatives(&st.dw).unwrap();
                let rate = ut.inner(&st.u);
                let scale = 1.0 + st.u.inner(&st.u);
                if solver.kind() == SchemeKind::D2 {
                    let diss = solver.dissipation(&st, &ut, &rt).unwrap();
                    assert!(rate <= 1e-10 * scale);
                    assert!((rate + diss).abs() < 1e-10 * scale);
                } else {
                    assert!(rate.abs() < 1e-10 * scale);
                }
            }
        }
    }
}
