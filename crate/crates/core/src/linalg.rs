//! Sparse storage and a direct solver for banded matrices with periodic corners.
//!
//! The factorization splits the unknowns into a banded leading part and a dense
//! trailing border that absorbs the wrap-around couplings. Gaussian elimination with
//! partial pivoting runs over the banded part; the border rows are eliminated
//! alongside, and the remaining Schur complement is factored densely.

use std::collections::BTreeMap;

#[derive(Debug, Clone)]
pub struct SparseMatrix {
    n: usize,
    /// Row-major map of nonzeros.
    rows: Vec<BTreeMap<usize, f64>>,
}

impl SparseMatrix {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            rows: vec![BTreeMap::new(); n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn add(&mut self, r: usize, c: usize, v: f64) {
        *self.rows[r].entry(c).or_insert(0.0) += v;
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.rows[r].get(&c).copied().unwrap_or(0.0)
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.rows[r].iter().map(|(&c, &v)| (c, v))
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|(&c, &v)| v * x[c]).sum())
            .collect()
    }

    /// Max absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        self.rows
            .iter()
            .map(|row| row.values().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        for (r, row) in self.rows.iter().enumerate() {
            for (&c, &v) in row {
                d[r][c] = v;
            }
        }
        d
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularPivot {
    pub row: usize,
    pub pivot: f64,
}

/// LU factors of a periodic banded matrix.
#[derive(Debug, Clone)]
pub struct PeriodicBandLu {
    n: usize,
    m: usize,
    nb: usize,
    kl: usize,
    ku: usize,
    width: usize,
    /// band part, row-major, entry `(r, c)` at `r * width + c - r + kl`
    band: Vec<f64>,
    /// couplings of the banded rows to the border columns, `m × nb`
    right: Vec<f64>,
    /// border rows, `nb × n` dense
    bottom: Vec<f64>,
    piv: Vec<usize>,
    /// dense LU of the Schur complement, `nb × nb`, with its pivots
    schur: Vec<f64>,
    schur_piv: Vec<usize>,
}

impl PeriodicBandLu {
    /// Factors `a`. Entries outside the border must satisfy `r - kl <= c <= r + ku`.
    /// Pivots smaller than `tol * ||a||_∞` are reported as singular.
    pub fn factor(
        a: &SparseMatrix,
        kl: usize,
        ku: usize,
        border: usize,
        tol: f64,
    ) -> std::result::Result<Self, SingularPivot> {
        let n = a.dim();
        assert!(border <= n && border > 0);
        let nb = border;
        let m = n - nb;
        let width = 2 * kl + ku + 1;
        let mut band = vec![0.0; m * width];
        let mut right = vec![0.0; m * nb];
        let mut bottom = vec![0.0; nb * n];
        for r in 0..n {
            for (c, v) in a.row(r) {
                if r >= m {
                    bottom[(r - m) * n + c] = v;
                } else if c >= m {
                    right[r * nb + c - m] = v;
                } else {
                    assert!(
                        c + kl >= r && c <= r + ku,
                        "entry ({r}, {c}) outside the declared band"
                    );
                    band[r * width + c + kl - r] = v;
                }
            }
        }
        let threshold = tol * a.norm_inf();
        let bidx = |r: usize, c: usize| r * width + c + kl - r;
        let mut piv = vec![0usize; m];
        for c in 0..m {
            let last = (c + kl).min(m - 1);
            let mut p = c;
            let mut best = band[bidx(c, c)].abs();
            for r in c + 1..=last {
                let v = band[bidx(r, c)].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if !(best > threshold) {
                return Err(SingularPivot {
                    row: c,
                    pivot: best,
                });
            }
            piv[c] = p;
            let hi = (c + kl + ku).min(m - 1);
            if p != c {
                for cc in c..=hi {
                    band.swap(bidx(c, cc), bidx(p, cc));
                }
                for t in 0..nb {
                    right.swap(c * nb + t, p * nb + t);
                }
            }
            let d = band[bidx(c, c)];
            for r in c + 1..=last {
                let l = band[bidx(r, c)] / d;
                band[bidx(r, c)] = l;
                if l != 0.0 {
                    for cc in c + 1..=hi {
                        band[bidx(r, cc)] -= l * band[bidx(c, cc)];
                    }
                    for t in 0..nb {
                        right[r * nb + t] -= l * right[c * nb + t];
                    }
                }
            }
            for b in 0..nb {
                let l = bottom[b * n + c] / d;
                bottom[b * n + c] = l;
                if l != 0.0 {
                    for cc in c + 1..=hi {
                        bottom[b * n + cc] -= l * band[bidx(c, cc)];
                    }
                    for t in 0..nb {
                        bottom[b * n + m + t] -= l * right[c * nb + t];
                    }
                }
            }
        }
        let mut schur = vec![0.0; nb * nb];
        for b in 0..nb {
            schur[b * nb..(b + 1) * nb].copy_from_slice(&bottom[b * n + m..b * n + n]);
        }
        let mut schur_piv = vec![0usize; nb];
        for c in 0..nb {
            let mut p = c;
            let mut best = schur[c * nb + c].abs();
            for r in c + 1..nb {
                let v = schur[r * nb + c].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if !(best > threshold) {
                return Err(SingularPivot {
                    row: m + c,
                    pivot: best,
                });
            }
            schur_piv[c] = p;
            if p != c {
                for cc in c..nb {
                    schur.swap(c * nb + cc, p * nb + cc);
                }
            }
            let d = schur[c * nb + c];
            for r in c + 1..nb {
                let l = schur[r * nb + c] / d;
                schur[r * nb + c] = l;
                for cc in c + 1..nb {
                    schur[r * nb + cc] -= l * schur[c * nb + cc];
                }
            }
        }
        Ok(Self {
            n,
            m,
            nb,
            kl,
            ku,
            width,
            band,
            right,
            bottom,
            piv,
            schur,
            schur_piv,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `A x = rhs` in place.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        let (n, m, nb, kl, width) = (self.n, self.m, self.nb, self.kl, self.width);
        let hi_of = |c: usize| (c + self.kl + self.ku).min(m - 1);
        // forward sweep with the row interchanges applied as they occurred
        for c in 0..m {
            let p = self.piv[c];
            if p != c {
                x.swap(c, p);
            }
            let xc = x[c];
            if xc != 0.0 {
                let last = (c + kl).min(m - 1);
                for r in c + 1..=last {
                    x[r] -= self.band[r * width + c + kl - r] * xc;
                }
                for b in 0..nb {
                    x[m + b] -= self.bottom[b * n + c] * xc;
                }
            }
        }
        // Schur complement
        let tail = &mut x[m..];
        for c in 0..nb {
            let p = self.schur_piv[c];
            if p != c {
                tail.swap(c, p);
            }
            let xc = tail[c];
            for r in c + 1..nb {
                tail[r] -= self.schur[r * nb + c] * xc;
            }
        }
        for r in (0..nb).rev() {
            let mut s = tail[r];
            for c in r + 1..nb {
                s -= self.schur[r * nb + c] * tail[c];
            }
            tail[r] = s / self.schur[r * nb + r];
        }
        // back substitution over the band
        for r in (0..m).rev() {
            let mut s = x[r];
            for c in r + 1..=hi_of(r) {
                s -= self.band[r * width + c + kl - r] * x[c];
            }
            for t in 0..nb {
                s -= self.right[r * nb + t] * x[m + t];
            }
            x[r] = s / self.band[r * width + kl];
        }
    }
}
