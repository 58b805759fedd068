//! Initial data, exact solutions and forcing for the built-in test problems.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{DgError, Result};
use crate::scheme::{SourceTerm, SpaceTimeFn};

pub const PROBLEM_IDS: [&str; 6] = [
    "smooth_manufactured",
    "shock1",
    "shock2",
    "two_soliton",
    "single_peakon",
    "periodic_peakon",
];

pub type InitialFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Corners of a traveling wave: at `x0 + speed·t + n·period` for every integer `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinkTrack {
    pub x0: f64,
    pub speed: f64,
    pub period: f64,
}

impl KinkTrack {
    /// Kink locations inside `[a, b]` at time `t`.
    pub fn at(&self, t: f64, a: f64, b: f64) -> Vec<f64> {
        let base = self.x0 + self.speed * t;
        let n_lo = ((a - base) / self.period).floor() as i64 - 1;
        let n_hi = ((b - base) / self.period).ceil() as i64 + 1;
        (n_lo..=n_hi)
            .map(|n| base + n as f64 * self.period)
            .filter(|&x| x > a && x < b)
            .collect()
    }
}

#[derive(Clone)]
pub struct ProblemSpec {
    pub id: &'static str,
    pub domain: (f64, f64),
    pub p: u32,
    pub initial: InitialFn,
    pub exact: Option<SpaceTimeFn>,
    pub source: Option<SourceTerm>,
    pub kinks: Option<KinkTrack>,
    pub limiter_recommended: bool,
    pub default_t_final: f64,
    pub notes: &'static str,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("id", &self.id)
            .field("domain", &self.domain)
            .field("p", &self.p)
            .field("has_exact", &self.exact.is_some())
            .field("has_source", &self.source.is_some())
            .field("kinks", &self.kinks)
            .finish()
    }
}

impl ProblemSpec {
    /// Kink locations of the initial data inside the domain.
    pub fn initial_kinks(&self) -> Vec<f64> {
        self.kinks
            .map(|k| k.at(0.0, self.domain.0, self.domain.1))
            .unwrap_or_default()
    }

    pub fn kinks_at(&self, t: f64) -> Vec<f64> {
        self.kinks
            .map(|k| k.at(t, self.domain.0, self.domain.1))
            .unwrap_or_default()
    }
}

/// Catalog entry with its default exponent.
pub fn problem(id: &str) -> Result<ProblemSpec> {
    problem_with_p(id, None)
}

/// Catalog entry, optionally overriding the exponent `p` where the problem allows it.
pub fn problem_with_p(id: &str, p: Option<u32>) -> Result<ProblemSpec> {
    if let Some(p) = p {
        if p < 2 {
            return Err(DgError::InvalidParameter(format!(
                "p must be >= 2, got {p}"
            )));
        }
    }
    let fixed_p2 = |name: &str| -> Result<()> {
        match p {
            Some(q) if q != 2 => Err(DgError::InvalidParameter(format!(
                "{name} is an exact solution only for p = 2, got p = {q}"
            ))),
            _ => Ok(()),
        }
    };
    match id {
        "smooth_manufactured" => Ok(smooth_manufactured(p.unwrap_or(3))),
        "shock1" => Ok(ProblemSpec {
            id: "shock1",
            domain: (0.0, 1.0),
            p: p.unwrap_or(4),
            initial: Arc::new(|x: f64| (2.0 * PI * x + 0.5).cos() + 1.0),
            exact: None,
            source: None,
            kinks: None,
            limiter_recommended: true,
            default_t_final: 0.4,
            notes: "no exact solution; compare against a refined run",
        }),
        "shock2" => Ok(ProblemSpec {
            id: "shock2",
            domain: (0.0, 1.0),
            p: p.unwrap_or(2),
            initial: Arc::new(|x: f64| {
                0.2 * (2.0 * PI * x).cos() + 0.1 * (4.0 * PI * x).cos() - 0.3 * (6.0 * PI * x).sin()
                    + 0.5
            }),
            exact: None,
            source: None,
            kinks: None,
            limiter_recommended: true,
            default_t_final: 1.0,
            notes: "no exact solution; compare against a refined run",
        }),
        "two_soliton" => Ok(ProblemSpec {
            id: "two_soliton",
            domain: (-50.0, 200.0),
            p: p.unwrap_or(2),
            initial: Arc::new(two_soliton_initial),
            exact: None,
            source: None,
            kinks: None,
            limiter_recommended: false,
            default_t_final: 120.0,
            notes: "two-soliton profile used as initial data only",
        }),
        "single_peakon" => {
            fixed_p2(id)?;
            Ok(single_peakon(2.0))
        }
        "periodic_peakon" => {
            fixed_p2(id)?;
            periodic_peakon(2.0, 0.3)
        }
        other => Err(DgError::UnknownProblem(other.to_string())),
    }
}

/// `u = sin(x − t)` on `[0, 2π]` with the forcing that makes it exact for exponent `p`.
pub fn smooth_manufactured(p: u32) -> ProblemSpec {
    let pf = p as i32;
    let g: SpaceTimeFn = Arc::new(move |x: f64, t: f64| {
        let (s, c) = (x - t).sin_cos();
        -c + s.powi(pf - 1) * c + 0.5 * c
    });
    let helmholtz_g: SpaceTimeFn = Arc::new(move |x: f64, t: f64| {
        let (s, c) = (x - t).sin_cos();
        let pp = pf as f64;
        let mut v = -c + (1.0 + pp * pp) * s.powi(pf - 1) * c;
        if pf > 2 {
            v -= (pp - 1.0) * (pp - 2.0) * s.powi(pf - 3) * c;
        }
        v
    });
    ProblemSpec {
        id: "smooth_manufactured",
        domain: (0.0, 2.0 * PI),
        p,
        initial: Arc::new(f64::sin),
        exact: Some(Arc::new(|x: f64, t: f64| (x - t).sin())),
        source: Some(SourceTerm { g, helmholtz_g }),
        kinks: None,
        limiter_recommended: false,
        default_t_final: 0.1,
        notes: "manufactured traveling sine",
    }
}

/// `u = (4/3) e^{−|x − st|/2} + s − 4/3` on `[−25, 25]`, wrapped periodically.
pub fn single_peakon(s: f64) -> ProblemSpec {
    let (a, b) = (-25.0, 25.0);
    let len = b - a;
    let exact: SpaceTimeFn = Arc::new(move |x: f64, t: f64| {
        let z = (x - s * t - a).rem_euclid(len) + a;
        4.0 / 3.0 * (-0.5 * z.abs()).exp() + s - 4.0 / 3.0
    });
    let e0 = exact.clone();
    ProblemSpec {
        id: "single_peakon",
        domain: (a, b),
        p: 2,
        initial: Arc::new(move |x| e0(x, 0.0)),
        exact: Some(exact),
        source: None,
        kinks: Some(KinkTrack {
            x0: 0.0,
            speed: s,
            period: len,
        }),
        limiter_recommended: false,
        default_t_final: 6.0,
        notes: "decaying tails make the periodic wrap negligible",
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicPeakonParams {
    pub s: f64,
    pub g: f64,
    pub d_plus: f64,
    pub d_minus: f64,
    /// Half period; infinite in the cuspon limit.
    pub t_p: f64,
    /// Trough value.
    pub phi_star: f64,
    /// `d₋ = 0`: the profile degenerates to a cuspon and has no finite period.
    pub cuspon: bool,
}

impl PeriodicPeakonParams {
    /// Profile on one period, `|ζ| ≤ T_p`.
    pub fn phi(&self, zeta: f64) -> f64 {
        let a = 0.5 * zeta.abs();
        self.d_plus * (-a).exp() + self.d_minus * a.exp() + self.s - 4.0 / 3.0
    }

    /// Profile extended periodically with period `2 T_p`.
    pub fn phi_periodic(&self, zeta: f64) -> f64 {
        let period = 2.0 * self.t_p;
        let z = (zeta + self.t_p).rem_euclid(period) - self.t_p;
        self.phi(z)
    }
}

pub fn periodic_peakon_params(s: f64, g: f64) -> Result<PeriodicPeakonParams> {
    let rad1 = 4.0 * g + 4.0 * s - 2.0 * s * s;
    if rad1 < 0.0 {
        return Err(DgError::InvalidParameter(format!(
            "4g + 4s - 2s^2 = {rad1} is negative for s = {s}, g = {g}"
        )));
    }
    let rad2 = 9.0 * s * s - 18.0 * s + 8.0 - 18.0 * g;
    if rad2 < 0.0 {
        return Err(DgError::InvalidParameter(format!(
            "9s^2 - 18s + 8 - 18g = {rad2} is negative for s = {s}, g = {g}"
        )));
    }
    let root = rad1.sqrt();
    let d_plus = (4.0 + 3.0 * root) / 6.0;
    let d_minus = (4.0 - 3.0 * root) / 6.0;
    let phi_star = (-4.0 + 3.0 * s + (2.0 * rad2).sqrt()) / 3.0;
    let cuspon = d_minus.abs() < 1e-12;
    let t_p = if cuspon {
        f64::INFINITY
    } else {
        2.0 * ((phi_star - s + 4.0 / 3.0).ln() - (2.0 * d_minus).ln()).abs()
    };
    Ok(PeriodicPeakonParams {
        s,
        g,
        d_plus,
        d_minus,
        t_p,
        phi_star,
        cuspon,
    })
}

/// Periodic peakon train on `[−3T_p, 3T_p]`.
pub fn periodic_peakon(s: f64, g: f64) -> Result<ProblemSpec> {
    let pp = periodic_peakon_params(s, g)?;
    if pp.cuspon || !pp.t_p.is_finite() || pp.t_p <= 0.0 {
        return Err(DgError::InvalidParameter(format!(
            "s = {s}, g = {g} is the cuspon limit; the peakon train has no finite period"
        )));
    }
    let exact: SpaceTimeFn = Arc::new(move |x: f64, t: f64| pp.phi_periodic(x - s * t));
    let e0 = exact.clone();
    Ok(ProblemSpec {
        id: "periodic_peakon",
        domain: (-3.0 * pp.t_p, 3.0 * pp.t_p),
        p: 2,
        initial: Arc::new(move |x| e0(x, 0.0)),
        exact: Some(exact),
        source: None,
        kinks: Some(KinkTrack {
            x0: 0.0,
            speed: s,
            period: 2.0 * pp.t_p,
        }),
        limiter_recommended: false,
        default_t_final: 1.0,
        notes: "three periods of the peakon train",
    })
}

pub const SOLITON_KAPPA: (f64, f64) = (0.4, 0.6);

/// Two-soliton profile at `(x, t)`, evaluated with exponent scaling so large phases
/// never overflow.
pub fn two_soliton(x: f64, t: f64) -> f64 {
    let (k1, k2) = SOLITON_KAPPA;
    let a2 = ((k1 - k2) / (k1 + k2)).powi(2);
    let th1 = k1 * x - k1.powi(3) * t + 4.0;
    let th2 = k2 * x - k2.powi(3) * t + 15.0;
    let la2 = a2.ln();
    let m = 0.0f64.max(th1).max(th2).max(th1 + th2 + la2);
    let den = (-m).exp() + (th1 - m).exp() + (th2 - m).exp() + (th1 + th2 + la2 - m).exp();
    let num = k1 * k1 * (th1 - 2.0 * m).exp()
        + k2 * k2 * (th2 - 2.0 * m).exp()
        + 2.0 * (k2 - k1).powi(2) * (th1 + th2 - 2.0 * m).exp()
        + k2 * k2 * (2.0 * th1 + th2 + la2 - 2.0 * m).exp()
        + k1 * k1 * (th1 + 2.0 * th2 + la2 - 2.0 * m).exp();
    12.0 * num / (den * den)
}

pub fn two_soliton_initial(x: f64) -> f64 {
    two_soliton(x, 0.0)
}
