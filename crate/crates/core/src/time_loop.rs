//! SSP-RK3 time stepping, TVB limiting and the run driver.

use crate::error::{DgError, Result};
use crate::field::DgField;
use crate::scheme::{Conserved, Scheme};

/// State types the Runge-Kutta stages can combine.
pub trait RkVector: Clone {
    /// `a·x + b·y`
    fn combine(a: f64, x: &Self, b: f64, y: &Self) -> Self;
    fn all_finite(&self) -> bool;
}

impl RkVector for f64 {
    fn combine(a: f64, x: &Self, b: f64, y: &Self) -> Self {
        a * x + b * y
    }

    fn all_finite(&self) -> bool {
        self.is_finite()
    }
}

impl RkVector for DgField {
    fn combine(a: f64, x: &Self, b: f64, y: &Self) -> Self {
        DgField::lincomb(a, x, b, y)
    }

    fn all_finite(&self) -> bool {
        self.is_finite()
    }
}

/// One Shu-Osher SSP-RK3 step from time `t`; `limit` runs after every stage.
pub fn step_ssprk3<V, F, L>(u: &V, t: f64, dt: f64, mut rhs: F, mut limit: L) -> Result<V>
where
    V: RkVector,
    F: FnMut(&V, f64) -> Result<V>,
    L: FnMut(&mut V),
{
    let stage = |v: V, stage: usize, time: f64| -> Result<V> {
        if v.all_finite() {
            Ok(v)
        } else {
            Err(DgError::NonFinite { stage, time })
        }
    };
    let l0 = stage(rhs(u, t)?, 1, t)?;
    let mut u1 = V::combine(1.0, u, dt, &l0);
    limit(&mut u1);
    let u1 = stage(u1, 1, t)?;

    let l1 = stage(rhs(&u1, t + dt)?, 2, t + dt)?;
    let mut u2 = V::combine(0.75, u, 0.25, &V::combine(1.0, &u1, dt, &l1));
    limit(&mut u2);
    let u2 = stage(u2, 2, t + dt)?;

    let l2 = stage(rhs(&u2, t + 0.5 * dt)?, 3, t + 0.5 * dt)?;
    let mut un = V::combine(1.0 / 3.0, u, 2.0 / 3.0, &V::combine(1.0, &u2, dt, &l2));
    limit(&mut un);
    stage(un, 3, t + dt)
}

fn minmod3(a: f64, b: f64, c: f64) -> f64 {
    if a > 0.0 && b > 0.0 && c > 0.0 {
        a.min(b).min(c)
    } else if a < 0.0 && b < 0.0 && c < 0.0 {
        a.max(b).max(c)
    } else {
        0.0
    }
}

/// TVB-relaxed minmod: leaves `a` alone when `|a| ≤ threshold`.
fn tvb_minmod(a: f64, b: f64, c: f64, threshold: f64) -> f64 {
    if a.abs() <= threshold {
        a
    } else {
        minmod3(a, b, c)
    }
}

/// Limits `field` in place with TVB constant `m` and returns the number of modified cells.
/// Cell means are never changed.
pub fn tvb_limit(field: &mut DgField, m: f64) -> usize {
    let k = field.degree();
    if k == 0 {
        return 0;
    }
    let n = field.mesh().n_cells();
    let means: Vec<f64> = (0..n).map(|j| field.cell_mean(j)).collect();
    let widths: Vec<f64> = field.mesh().widths().to_vec();
    let mut limited = 0;
    for j in 0..n {
        let dp = means[(j + 1) % n] - means[j];
        let dm = means[j] - means[(j + n - 1) % n];
        let threshold = m * widths[j] * widths[j];
        let c = field.cell_mut(j);
        let right: f64 = c[1..].iter().sum();
        let left: f64 = -c[1..]
            .iter()
            .enumerate()
            .map(|(i, a)| if (i + 1) % 2 == 0 { *a } else { -*a })
            .sum::<f64>();
        let r_new = tvb_minmod(right, dp, dm, threshold);
        let l_new = tvb_minmod(left, dp, dm, threshold);
        if r_new != right || l_new != left {
            c[1] = minmod3(c[1], dp, dm);
            for a in c[2..].iter_mut() {
                *a = 0.0;
            }
            limited += 1;
        }
    }
    limited
}

/// `α Δx^{(k+1)/3}` for `k ≥ 2`, `α Δx` below that.
pub fn paper_time_step(alpha: f64, dx: f64, degree: usize) -> f64 {
    if degree >= 2 {
        alpha * dx.powf((degree as f64 + 1.0) / 3.0)
    } else {
        alpha * dx
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DtRule {
    PaperPower,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeConfig {
    pub alpha: f64,
    pub t_final: f64,
    pub dt_rule: DtRule,
    /// TVB constant; `None` disables limiting.
    pub limiter: Option<f64>,
    /// Limit `u_h` and rebuild the evolved variable from it, instead of limiting the
    /// evolved variable directly. Only differs for the `w`-form schemes.
    pub limit_solution: bool,
    /// Record diagnostics every this many steps (the final step is always recorded).
    pub diagnostics_every: usize,
    /// Times at which to keep a copy of `u_h`.
    pub snapshots: Vec<f64>,
}

impl TimeConfig {
    pub fn new(t_final: f64) -> Self {
        Self {
            alpha: 0.1,
            t_final,
            dt_rule: DtRule::PaperPower,
            limiter: None,
            limit_solution: false,
            diagnostics_every: 1,
            snapshots: vec![t_final],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) {
            return Err(DgError::InvalidParameter(format!(
                "alpha must be > 0, got {}",
                self.alpha
            )));
        }
        if !(self.t_final > 0.0) || !self.t_final.is_finite() {
            return Err(DgError::InvalidParameter(format!(
                "final time must be > 0, got {}",
                self.t_final
            )));
        }
        if let DtRule::Fixed(dt) = self.dt_rule {
            if !(dt > 0.0) {
                return Err(DgError::InvalidParameter(format!(
                    "dt must be > 0, got {dt}"
                )));
            }
        }
        if let Some(m) = self.limiter {
            if !(m >= 0.0) {
                return Err(DgError::InvalidParameter(format!(
                    "TVB constant must be >= 0, got {m}"
                )));
            }
        }
        Ok(())
    }

    pub fn base_dt(&self, dx: f64, degree: usize) -> f64 {
        match self.dt_rule {
            DtRule::PaperPower => paper_time_step(self.alpha, dx, degree),
            DtRule::Fixed(dt) => dt,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticRow {
    pub t: f64,
    pub step: usize,
    pub e: Conserved,
    /// Change in `E2` since the previous row.
    pub de2: f64,
}

#[derive(Debug)]
pub struct RunOutput {
    /// Last state reached (the evolved variable).
    pub state: DgField,
    pub t: f64,
    pub steps: usize,
    pub dt: f64,
    pub diagnostics: Vec<DiagnosticRow>,
    /// `(t, u_h)` pairs.
    pub snapshots: Vec<(f64, DgField)>,
    pub limited_cells: usize,
    /// Set when the run stopped before the final time.
    pub failure: Option<DgError>,
}

impl RunOutput {
    pub fn completed(&self) -> bool {
        self.failure.is_none()
    }

    /// `max_t |E2(t) − E2(0)|` over the recorded rows.
    pub fn max_e2_fluctuation(&self) -> f64 {
        let e2_0 = match self.diagnostics.first() {
            Some(r) => r.e.e2,
            None => return 0.0,
        };
        self.diagnostics
            .iter()
            .map(|r| (r.e.e2 - e2_0).abs())
            .fold(0.0, f64::max)
    }
}

/// Advances `state` from `t = 0` to `cfg.t_final`, landing exactly on every snapshot
/// time and on the final time.
pub fn run(scheme: &Scheme, state: DgField, cfg: &TimeConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let space = scheme.space().clone();
    let dt_base = cfg.base_dt(space.mesh().h(), space.degree());
    let mut targets: Vec<f64> = cfg
        .snapshots
        .iter()
        .cloned()
        .filter(|&s| s > 0.0 && s < cfg.t_final)
        .collect();
    targets.push(cfg.t_final);
    targets.sort_by(|a, b| a.partial_cmp(b).unwrap());
    targets.dedup();
    let want_initial_snapshot = cfg.snapshots.iter().any(|&s| s <= 0.0);

    let mut out = RunOutput {
        state,
        t: 0.0,
        steps: 0,
        dt: dt_base,
        diagnostics: Vec::new(),
        snapshots: Vec::new(),
        limited_cells: 0,
        failure: None,
    };
    let e = scheme.conserved(&out.state)?;
    out.diagnostics.push(DiagnosticRow {
        t: 0.0,
        step: 0,
        e,
        de2: 0.0,
    });
    if want_initial_snapshot {
        out.snapshots.push((0.0, scheme.solution(&out.state)?));
    }
    let every = cfg.diagnostics_every.max(1);
    let mut limited = 0usize;
    let mut limit_error: Option<DgError> = None;
    let via_solution = cfg.limit_solution && !scheme.kind().is_first_form();
    for &target in &targets {
        while out.t < target {
            let remaining = target - out.t;
            // absorb a sliver that would otherwise force a tiny extra step
            let dt = if remaining <= dt_base * (1.0 + 1e-10) {
                remaining
            } else {
                dt_base
            };
            let step = step_ssprk3(
                &out.state,
                out.t,
                dt,
                |v, t| scheme.rhs(v, t),
                |v| {
                    let Some(m) = cfg.limiter else { return };
                    if !via_solution {
                        limited += tvb_limit(v, m);
                        return;
                    }
                    let rebuilt = scheme.solution(v).and_then(|mut u| {
                        let n = tvb_limit(&mut u, m);
                        limited += n;
                        if n > 0 {
                            scheme.initial_state(&u).map(Some)
                        } else {
                            Ok(None)
                        }
                    });
                    match rebuilt {
                        Ok(Some(w)) => *v = w,
                        Ok(None) => {}
                        Err(e) => {
                            limit_error.get_or_insert(e);
                        }
                    }
                },
            );
            let step = match limit_error.take() {
                Some(e) => Err(e),
                None => step,
            };
            match step {
                Ok(next) => {
                    out.state = next;
                    out.t = if dt == remaining { target } else { out.t + dt };
                    out.steps += 1;
                }
                Err(err) => {
                    out.failure = Some(err);
                    out.limited_cells = limited;
                    return Ok(out);
                }
            }
            if out.steps.is_multiple_of(every) || out.t >= cfg.t_final {
                let e = scheme.conserved(&out.state)?;
                let prev = out.diagnostics.last().map(|r| r.e.e2).unwrap_or(e.e2);
                out.diagnostics.push(DiagnosticRow {
                    t: out.t,
                    step: out.steps,
                    e,
                    de2: e.e2 - prev,
                });
            }
        }
        if cfg.snapshots.contains(&target) {
            out.snapshots.push((target, scheme.solution(&out.state)?));
        }
    }
    out.limited_cells = limited;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{project_l2, DgSpace};
    use crate::mesh::{build_mesh, Mesh1D};
    use std::sync::Arc;

    #[test]
    fn scalar_decay_step() {
        // 1 − h + h²/2 − h³/6 at h = 0.1
        let u = step_ssprk3(&1.0f64, 0.0, 0.1, |v, _| Ok(-v), |_| {}).unwrap();
        assert!((u - 0.904_833_333_333_333_3).abs() < 1e-15);
    }

    #[test]
    fn zero_rhs_is_identity() {
        let u = step_ssprk3(&2.5f64, 0.0, 0.3, |_, _| Ok(0.0), |_| {}).unwrap();
        assert_eq!(u, 2.5);
    }

    #[test]
    fn third_order_in_dt() {
        // u' = λ u + cos t with λ = −2, u(0) = 1 solved to t = 1
        let exact = |t: f64| {
            let l = -2.0f64;
            let a = 1.0 - (-l) / (l * l + 1.0);
            a * (l * t).exp() + (-l * t.cos() + t.sin()) / (l * l + 1.0)
        };
        let solve = |n: usize| {
            let dt = 1.0 / n as f64;
            let mut u = 1.0f64;
            for i in 0..n {
                u = step_ssprk3(&u, i as f64 * dt, dt, |v, t| Ok(-2.0 * v + t.cos()), |_| {})
                    .unwrap();
            }
            (u - exact(1.0)).abs()
        };
        let (e1, e2) = (solve(40), solve(80));
        let order = (e1 / e2).log2();
        assert!((order - 3.0).abs() < 0.15, "order {order}");
    }

    #[test]
    fn non_finite_stage_is_reported() {
        let r = step_ssprk3(
            &1.0f64,
            0.5,
            0.1,
            |v, t| Ok(if t > 0.55 { f64::NAN } else { *v }),
            |_| {},
        );
        assert!(matches!(r, Err(DgError::NonFinite { stage: 2, .. })));
    }

    #[test]
    fn limiter_leaves_smooth_data_alone_with_large_m() {
        let space = DgSpace::new(Arc::new(Mesh1D::uniform(0.0, 6.0, 30).unwrap()), 2).unwrap();
        let mut f = project_l2(&space, f64::sin);
        let before = f.clone();
        assert_eq!(tvb_limit(&mut f, 1e3), 0);
        assert_eq!(f.coeffs(), before.coeffs());
    }

    #[test]
    fn limited_step_is_monotone_and_keeps_means() {
        let space = DgSpace::new(Arc::new(build_mesh(0.0, 1.0, 12, 0.2, 2).unwrap()), 2).unwrap();
        let mut f = project_l2(
            &space,
            |x| if (0.31..0.64).contains(&x) { 1.0 } else { 0.0 },
        );
        let means: Vec<f64> = (0..12).map(|j| f.cell_mean(j)).collect();
        assert!(tvb_limit(&mut f, 0.0) > 0);
        for j in 0..12 {
            assert!((f.cell_mean(j) - means[j]).abs() < 1e-15);
            let (prev, next) = (means[(j + 11) % 12], means[(j + 1) % 12]);
            for (edge, nb) in [(f.right_trace(j), next), (f.left_trace(j), prev)] {
                let (lo, hi) = (means[j].min(nb), means[j].max(nb));
                assert!(edge >= lo - 1e-14 && edge <= hi + 1e-14, "cell {j}");
            }
        }
    }

    #[test]
    fn paper_step_rule() {
        assert!((paper_time_step(0.1, 0.1, 2) - 0.01).abs() < 1e-15);
        assert!((paper_time_step(0.1, 0.5, 1) - 0.05).abs() < 1e-15);
        assert!((paper_time_step(0.1, 0.001, 5) - 0.1 * 1e-6).abs() < 1e-18);
    }
}
