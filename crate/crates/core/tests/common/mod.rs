//! Helpers shared by the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use fwldg::field::{DgField, DgSpace};
use fwldg::mesh::Mesh1D;
use fwldg::operators::{OperatorKind, WeakOperators};
use fwldg::oracle::{dense_oracle_assemble, DenseOracle};
use fwldg::scheme::{Scheme, SchemeKind};
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const TOL: f64 = 1e-12;

/// Matrix with entry `[(j,n), (j',m)] = L(φ_{j',m}, φ_{j,n})` from the production tables.
pub fn production_form(ops: &WeakOperators, kind: OperatorKind) -> DMatrix<f64> {
    let sp = ops.space();
    let nd = sp.n_dofs();
    let mut a = DMatrix::zeros(nd, nd);
    for col in 0..nd {
        let mut c = vec![0.0; nd];
        c[col] = 1.0;
        let e = DgField::from_coeffs(sp, c).unwrap();
        let fl = ops.interface_fluxes(kind, &e).unwrap();
        for (row, v) in ops
            .load_vector(kind, &e, &fl)
            .unwrap()
            .into_iter()
            .enumerate()
        {
            a[(row, col)] = v;
        }
    }
    a
}

pub fn max_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn compare(
    kind: SchemeKind,
    mesh: Mesh1D,
    k: usize,
    p: u32,
    rng: &mut ChaCha8Rng,
) -> Result<(), String> {
    let oracle: DenseOracle =
        dense_oracle_assemble(kind, &mesh, k, p).map_err(|e| e.to_string())?;
    let sp = DgSpace::new(Arc::new(mesh), k).unwrap();
    let ops = WeakOperators::new(&sp, p).unwrap();
    let nd = sp.n_dofs();
    let mass = DMatrix::from_fn(nd, nd, |r, c| {
        if r == c {
            sp.mass(r / (k + 1), r % (k + 1))
        } else {
            0.0
        }
    });
    let pairs = [
        ("mass", mass, &oracle.mass),
        (
            "L+",
            production_form(&ops, OperatorKind::LPlus),
            &oracle.l_plus,
        ),
        (
            "L-",
            production_form(&ops, OperatorKind::LMinus),
            &oracle.l_minus,
        ),
        (
            "Lc",
            production_form(&ops, OperatorKind::LCentral),
            &oracle.l_central,
        ),
    ];
    for (name, prod, orc) in pairs {
        let d = max_diff(&prod, orc);
        if d > TOL {
            return Err(format!("{name}: max difference {d:e}"));
        }
    }
    let scheme = Scheme::build(&sp, p, kind, None).unwrap();
    let system = match &scheme {
        Scheme::First(s) => s.system().matrix().to_dense(),
        Scheme::Second(s) => s.system().matrix().to_dense(),
    };
    let system = DMatrix::from_fn(system.len(), system.len(), |r, c| system[r][c]);
    let d = max_diff(&system, &oracle.system);
    if d > TOL {
        return Err(format!("system matrix: max difference {d:e}"));
    }
    for _ in 0..5 {
        let c: Vec<f64> = (0..nd).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let state = DgField::from_coeffs(&sp, c.clone()).unwrap();
        let nl = ops.weak_field(kind.nonlinear_operator(), &state).unwrap();
        let nl_load: Vec<f64> = nl
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, v)| v * sp.mass(i / (k + 1), i % (k + 1)))
            .collect();
        let nl_oracle = oracle.nonlinear_load(&c);
        let d = nl_load
            .iter()
            .zip(&nl_oracle)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if d > TOL {
            return Err(format!("nonlinear load: max difference {d:e}"));
        }
        let prod = scheme.rhs(&state, 0.0).unwrap();
        let orc = oracle.rhs(&c).map_err(|e| e.to_string())?;
        let scale = orc.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let d = prod
            .coeffs()
            .iter()
            .zip(&orc)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if d > TOL * scale {
            return Err(format!("rhs: max difference {d:e} at scale {scale:e}"));
        }
    }
    Ok(())
}
