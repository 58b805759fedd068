use std::sync::Arc;

use fwldg::field::{DgField, DgSpace};
use fwldg::mesh::Mesh1D;
use fwldg::operators::{jump_product, OperatorKind, WeakOperators};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-11;

fn space(n: usize, k: usize) -> Arc<DgSpace> {
    DgSpace::new(Arc::new(Mesh1D::uniform(-1.0, 2.0, n).unwrap()), k).unwrap()
}

fn random_field(space: &Arc<DgSpace>, rng: &mut ChaCha8Rng) -> DgField {
    let c = (0..space.n_dofs())
        .map(|_| rng.gen_range(-1.0..1.0))
        .collect();
    DgField::from_coeffs(space, c).unwrap()
}

/// Bound on `sup |ω|` from the modal coefficients.
fn sup_bound(f: &DgField) -> f64 {
    (0..f.mesh().n_cells())
        .map(|j| f.cell(j).iter().map(|c| c.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Scale of a bilinear form evaluated on `(ω, φ)`: sup norms times `1 + interface count`.
fn scale(w: &DgField, f: &DgField) -> f64 {
    let n = w.mesh().n_cells() as f64;
    sup_bound(w) * sup_bound(f) * (1.0 + 2.0 * n)
}

fn check_linear_identities(ops: &WeakOperators, w: &DgField, f: &DgField) -> Result<(), String> {
    use OperatorKind::*;
    let l = |k, a: &DgField, b: &DgField| ops.apply_l(k, a, b).unwrap();
    let sc = scale(w, f);
    let sw = scale(w, w);
    let checks = [
        ("Lc(w,w) = 0", l(LCentral, w, w), sw),
        (
            "L+(w,w) + 1/2 sum [w]^2 = 0",
            l(LPlus, w, w) + 0.5 * jump_product(w, w),
            sw,
        ),
        (
            "L+(w,f) + L-(f,w) = 0",
            l(LPlus, w, f) + l(LMinus, f, w),
            sc,
        ),
        (
            "Lc(w,f) + Lc(f,w) = 0",
            l(LCentral, w, f) + l(LCentral, f, w),
            sc,
        ),
        (
            "L-(w,f) + L-(f,w) = sum [w][f]",
            l(LMinus, w, f) + l(LMinus, f, w) - jump_product(w, f),
            sc,
        ),
    ];
    for (name, value, s) in checks {
        if value.abs() > TOL * s.max(1.0) {
            return Err(format!("{name}: residual {value:e} at scale {s:e}"));
        }
    }
    Ok(())
}

fn check_nonlinear_signs(ops: &WeakOperators, w: &DgField) -> Result<(), String> {
    let s = sup_bound(w).powi(ops.p() as i32 + 1) * (1.0 + 2.0 * w.mesh().n_cells() as f64);
    let nd = ops.apply_n(OperatorKind::NDissipative, w, w).unwrap();
    let nc = ops.apply_n(OperatorKind::NConservative, w, w).unwrap();
    if nd < -1e-12 * s.max(1.0) {
        return Err(format!("Nd(w,w) = {nd:e} is negative"));
    }
    if nc.abs() > TOL * s.max(1.0) {
        return Err(format!("Nc(w,w) = {nc:e} is not zero"));
    }
    Ok(())
}

#[test]
fn two_hundred_random_pairs_per_configuration() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for k in 1..=3 {
        for n in [4, 8] {
            let sp = space(n, k);
            for p in 2..=4 {
                let ops = WeakOperators::new(&sp, p).unwrap();
                for i in 0..200 {
                    let w = random_field(&sp, &mut rng);
                    let f = random_field(&sp, &mut rng);
                    if let Err(e) =
                        check_linear_identities(&ops, &w, &f).and(check_nonlinear_signs(&ops, &w))
                    {
                        panic!("k={k} N={n} p={p} pair {i}: {e}");
                    }
                }
            }
        }
    }
}

#[test]
fn dissipative_nonlinear_form_vanishes_on_continuous_fields() {
    // a globally continuous piecewise-linear hat has no jumps, so the Godunov flux
    // reduces to f(u) and the form telescopes to zero
    let sp = space(6, 1);
    let ops = WeakOperators::new(&sp, 3).unwrap();
    let nodes = [0.3, -0.7, 1.1, 0.2, 0.9, -0.4];
    let mut c = Vec::new();
    for j in 0..6 {
        let (a, b) = (nodes[j], nodes[(j + 1) % 6]);
        c.extend([(a + b) / 2.0, (b - a) / 2.0]);
    }
    let u = DgField::from_coeffs(&sp, c).unwrap();
    assert!(jump_product(&u, &u) < 1e-28);
    assert!(
        ops.apply_n(OperatorKind::NDissipative, &u, &u)
            .unwrap()
            .abs()
            < 1e-13
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn identities_hold_for_arbitrary_meshes(
        seed in any::<u64>(),
        k in 0usize..=4,
        n in 2usize..=10,
        p in 2u32..=6,
        scale_u in 0.01f64..10.0,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mesh = fwldg::mesh::build_mesh(0.0, 1.0, n, 0.3, seed).unwrap();
        let sp = DgSpace::new(Arc::new(mesh), k).unwrap();
        let ops = WeakOperators::new(&sp, p).unwrap();
        let mut w = random_field(&sp, &mut rng);
        w.scale(scale_u);
        let f = random_field(&sp, &mut rng);
        prop_assert!(check_linear_identities(&ops, &w, &f).is_ok(), "{:?}", check_linear_identities(&ops, &w, &f));
        prop_assert!(check_nonlinear_signs(&ops, &w).is_ok(), "{:?}", check_nonlinear_signs(&ops, &w));
    }

    #[test]
    fn linear_forms_are_bilinear(seed in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sp = space(5, 2);
        let ops = WeakOperators::new(&sp, 2).unwrap();
        let (x, y, f) = (random_field(&sp, &mut rng), random_field(&sp, &mut rng), random_field(&sp, &mut rng));
        let z = DgField::lincomb(a, &x, b, &y);
        for kind in [OperatorKind::LPlus, OperatorKind::LMinus, OperatorKind::LCentral] {
            let lhs = ops.apply_l(kind, &z, &f).unwrap();
            let rhs = a * ops.apply_l(kind, &x, &f).unwrap() + b * ops.apply_l(kind, &y, &f).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-11 * (1.0 + lhs.abs()));
        }
    }
}
