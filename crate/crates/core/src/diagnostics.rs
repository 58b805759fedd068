//! Conserved quantities and simple shape measurements of solutions.

use crate::error::Result;
use crate::field::DgField;
use crate::scheme::{Conserved, Scheme};

/// `E0`, `E1`, `E2` of a scheme state.
pub fn conserved_quantities(scheme: &Scheme, state: &DgField) -> Result<Conserved> {
    scheme.conserved(state)
}

/// `Σ_j |ū_{j+1} − ū_j|` over the periodic mesh.
pub fn total_variation_of_means(field: &DgField) -> f64 {
    let n = field.mesh().n_cells();
    (0..n)
        .map(|j| (field.cell_mean((j + 1) % n) - field.cell_mean(j)).abs())
        .sum()
}

/// `(x, u)` at `per_cell` equispaced points inside every cell (cell endpoints excluded).
pub fn sample(field: &DgField, per_cell: usize) -> Vec<(f64, f64)> {
    let mesh = field.mesh();
    let mut out = Vec::with_capacity(mesh.n_cells() * per_cell);
    for j in 0..mesh.n_cells() {
        for i in 0..per_cell {
            let xi = -1.0 + (2.0 * i as f64 + 1.0) / per_cell as f64;
            out.push((mesh.to_physical(j, xi), field.value(j, xi)));
        }
    }
    out
}

/// Local maxima of a sampled profile that rise at least `prominence` above the lowest
/// value between them and the neighboring higher maximum, in increasing `x`.
pub fn dominant_maxima(samples: &[(f64, f64)], prominence: f64) -> Vec<(f64, f64)> {
    let n = samples.len();
    let mut out = Vec::new();
    for i in 0..n {
        let u = samples[i].1;
        let prev = samples[(i + n - 1) % n].1;
        let next = samples[(i + 1) % n].1;
        if !(u > prev && u >= next) {
            continue;
        }
        // walk each way until a higher value; the drop on the shallower side is the prominence
        let mut drop = f64::INFINITY;
        for dir in [1isize, -1] {
            let mut lowest = u;
            let mut idx = i as isize;
            for _ in 0..n {
                idx = (idx + dir).rem_euclid(n as isize);
                let v = samples[idx as usize].1;
                if v > u {
                    break;
                }
                lowest = lowest.min(v);
            }
            drop = drop.min(u - lowest);
        }
        if drop >= prominence {
            out.push(samples[i]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{project_l2, DgSpace};
    use crate::mesh::Mesh1D;
    use std::f64::consts::PI;
    use std::sync::Arc;

    #[test]
    fn total_variation_of_a_sine() {
        let space =
            DgSpace::new(Arc::new(Mesh1D::uniform(0.0, 2.0 * PI, 200).unwrap()), 1).unwrap();
        let f = project_l2(&space, f64::sin);
        assert!((total_variation_of_means(&f) - 4.0).abs() < 1e-3);
    }

    #[test]
    fn finds_two_humps() {
        let s: Vec<(f64, f64)> = (0..1000)
            .map(|i| {
                let x = i as f64 * 0.01;
                (
                    x,
                    2.0 * (-(x - 3.0f64).powi(2)).exp()
                        + (-(x - 7.0f64).powi(2)).exp()
                        + 1e-3 * (40.0 * x).sin(),
                )
            })
            .collect();
        let m = dominant_maxima(&s, 0.1);
        assert_eq!(m.len(), 2);
        assert!((m[0].0 - 3.0).abs() < 0.05 && (m[1].0 - 7.0).abs() < 0.05);
    }
}
