//! Scheme selection and the common interface the time loop drives.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{DgError, Result};
use crate::field::{DgField, DgSpace};
use crate::flux::FluxKind;
use crate::fw1::{assemble_aux_fw1, AuxSolverFW1};
use crate::fw2::{assemble_elliptic_fw2, EllipticSolverFW2};
use crate::operators::OperatorKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    D1,
    C1,
    D2,
    C2,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 4] = [
        SchemeKind::D1,
        SchemeKind::C1,
        SchemeKind::D2,
        SchemeKind::C2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::D1 => "d1",
            SchemeKind::C1 => "c1",
            SchemeKind::D2 => "d2",
            SchemeKind::C2 => "c2",
        }
    }

    /// Evolves `u` directly (as opposed to `w = u − u_xx`).
    pub fn is_first_form(self) -> bool {
        matches!(self, SchemeKind::D1 | SchemeKind::C1)
    }

    pub fn is_dissipative(self) -> bool {
        matches!(self, SchemeKind::D1 | SchemeKind::D2)
    }

    pub fn nonlinear_operator(self) -> OperatorKind {
        if self.is_dissipative() {
            OperatorKind::NDissipative
        } else {
            OperatorKind::NConservative
        }
    }

    /// Fluxes `(first, second)` of the coupled linear system, see [`crate::helmholtz`].
    pub fn system_fluxes(self) -> (FluxKind, FluxKind) {
        if self.is_dissipative() {
            (FluxKind::LeftTrace, FluxKind::RightTrace)
        } else {
            (FluxKind::Central, FluxKind::Central)
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = DgError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "d1" => Ok(SchemeKind::D1),
            "c1" => Ok(SchemeKind::C1),
            "d2" => Ok(SchemeKind::D2),
            "c2" => Ok(SchemeKind::C2),
            _ => Err(DgError::UnknownScheme(s.to_string())),
        }
    }
}

/// Function of `(x, t)`.
pub type SpaceTimeFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Manufactured forcing: `g` enters the `u` equation, `(1 − ∂x²) g` the `w` equation.
#[derive(Clone)]
pub struct SourceTerm {
    pub g: SpaceTimeFn,
    pub helmholtz_g: SpaceTimeFn,
}

impl fmt::Debug for SourceTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SourceTerm")
    }
}

/// Integrals `E0 = ∫u`, `E1 = ∫(u − u_xx)`, `E2 = ∫u²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conserved {
    pub e0: f64,
    pub e1: f64,
    pub e2: f64,
    /// `E1` was taken equal to `E0` instead of being integrated from `w`.
    pub e1_derived: bool,
}

/// Either scheme family, with a uniform state/rhs interface.
#[derive(Debug)]
pub enum Scheme {
    First(AuxSolverFW1),
    Second(EllipticSolverFW2),
}

impl Scheme {
    pub fn build(
        space: &Arc<DgSpace>,
        p: u32,
        kind: SchemeKind,
        source: Option<SourceTerm>,
    ) -> Result<Self> {
        if kind.is_first_form() {
            Ok(Scheme::First(
                assemble_aux_fw1(space, p, kind)?.with_source(source),
            ))
        } else {
            Ok(Scheme::Second(
                assemble_elliptic_fw2(space, p, kind)?.with_source(source),
            ))
        }
    }

    pub fn kind(&self) -> SchemeKind {
        match self {
            Scheme::First(s) => s.kind(),
            Scheme::Second(s) => s.kind(),
        }
    }

    pub fn space(&self) -> &Arc<DgSpace> {
        match self {
            Scheme::First(s) => s.space(),
            Scheme::Second(s) => s.space(),
        }
    }

    pub fn set_residual_check(&mut self, on: bool) {
        match self {
            Scheme::First(s) => s.set_residual_check(on),
            Scheme::Second(s) => s.set_residual_check(on),
        }
    }

    /// Evolved variable for a projected initial `u_h`.
    pub fn initial_state(&self, u0: &DgField) -> Result<DgField> {
        match self {
            Scheme::First(_) => Ok(u0.clone()),
            Scheme::Second(s) => s.initial_w(u0),
        }
    }

    pub fn rhs(&self, state: &DgField, t: f64) -> Result<DgField> {
        match self {
            Scheme::First(s) => s.rhs(state, t),
            Scheme::Second(s) => s.rhs(state, t),
        }
    }

    /// `u_h` carried by a state.
    pub fn solution(&self, state: &DgField) -> Result<DgField> {
        match self {
            Scheme::First(_) => Ok(state.clone()),
            Scheme::Second(s) => Ok(s.reconstruct_u(state)?.0),
        }
    }

    pub fn conserved(&self, state: &DgField) -> Result<Conserved> {
        let u = self.solution(state)?;
        let e0 = u.integral();
        let e2 = u.inner(&u);
        Ok(match self {
            Scheme::First(_) => Conserved {
                e0,
                e1: e0,
                e2,
                e1_derived: true,
            },
            Scheme::Second(_) => Conserved {
                e0,
                e1: state.integral(),
                e2,
                e1_derived: false,
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_names() {
        for k in SchemeKind::ALL {
            assert_eq!(k.name().parse::<SchemeKind>().unwrap(), k);
        }
        assert_eq!("D2".parse::<SchemeKind>().unwrap(), SchemeKind::D2);
        assert!(matches!(
            "e3".parse::<SchemeKind>(),
            Err(DgError::UnknownScheme(_))
        ));
    }

    #[test]
    fn flux_pairing() {
        assert_eq!(
            SchemeKind::D1.system_fluxes(),
            (FluxKind::LeftTrace, FluxKind::RightTrace)
        );
        assert_eq!(
            SchemeKind::C2.system_fluxes(),
            (FluxKind::Central, FluxKind::Central)
        );
        assert_eq!(
            SchemeKind::D2.nonlinear_operator(),
            OperatorKind::NDissipative
        );
        assert_eq!(
            SchemeKind::C1.nonlinear_operator(),
            OperatorKind::NConservative
        );
    }
}
