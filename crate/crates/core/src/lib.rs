//! Local discontinuous Galerkin solvers for `u_t + (u^p/p)_x + (1 − ∂x²)⁻¹ u_x = 0` on
//! periodic intervals, in the direct form (`d1`, `c1`) and in the `w = u − u_xx` form
//! (`d2`, `c2`). The `d` schemes use upwind-type fluxes and dissipate `∫u²`; the `c`
//! schemes use central and entropy-conservative fluxes and preserve it semi-discretely.

pub mod basis;
pub mod config;
pub mod diagnostics;
pub mod driver;
pub mod error;
pub mod field;
pub mod flux;
pub mod fw1;
pub mod fw2;
pub mod helmholtz;
pub mod linalg;
pub mod mesh;
pub mod operators;
pub mod oracle;
pub mod problems;
pub mod quadrature;
pub mod scheme;
pub mod time_loop;

pub use error::{DgError, Result};
pub use field::{DgField, DgSpace};
pub use mesh::{build_mesh, Mesh1D};
pub use scheme::{Scheme, SchemeKind};
