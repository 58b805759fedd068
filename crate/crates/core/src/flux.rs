//! Interface fluxes for `f(u) = u^p / p` and for the linear auxiliary variables.

use crate::error::{DgError, Result};
use crate::field::TracePair;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluxKind {
    /// Godunov flux of the nonlinear term.
    GodunovF,
    /// Entropy-conservative flux `[[F]] / [[u]]` of the nonlinear term.
    ConservativeF,
    /// `u^-`
    LeftTrace,
    /// `u^+`
    RightTrace,
    /// `{{u}}`
    Central,
}

impl FluxKind {
    pub fn is_nonlinear(self) -> bool {
        matches!(self, FluxKind::GodunovF | FluxKind::ConservativeF)
    }

    /// Weights `(w_minus, w_plus)` of a linear flux.
    pub fn linear_weights(self) -> Result<(f64, f64)> {
        match self {
            FluxKind::LeftTrace => Ok((1.0, 0.0)),
            FluxKind::RightTrace => Ok((0.0, 1.0)),
            FluxKind::Central => Ok((0.5, 0.5)),
            other => Err(DgError::FluxKind(other)),
        }
    }
}

#[inline]
pub fn f(u: f64, p: u32) -> f64 {
    u.powi(p as i32) / p as f64
}

#[inline]
pub fn f_prime(u: f64, p: u32) -> f64 {
    u.powi(p as i32 - 1)
}

/// Antiderivative `F(u) = u^{p+1} / (p (p+1))`.
#[inline]
pub fn f_antiderivative(u: f64, p: u32) -> f64 {
    u.powi(p as i32 + 1) / (p as f64 * (p as f64 + 1.0))
}

/// Godunov flux: min of `f` over `[u⁻, u⁺]` when `u⁻ < u⁺`, max over `[u⁺, u⁻]` otherwise.
/// The only interior critical point of `u^p / p` is `u = 0`.
pub fn godunov_flux(u_minus: f64, u_plus: f64, p: u32) -> f64 {
    let fm = f(u_minus, p);
    let fp = f(u_plus, p);
    let zero_inside = u_minus.min(u_plus) < 0.0 && u_minus.max(u_plus) > 0.0;
    if u_minus < u_plus {
        let m = fm.min(fp);
        if zero_inside {
            m.min(0.0)
        } else {
            m
        }
    } else {
        let m = fm.max(fp);
        if zero_inside {
            m.max(0.0)
        } else {
            m
        }
    }
}

/// `1/(p(p+1)) Σ_{m=0}^{p} (u⁺)^{p-m} (u⁻)^m`, equal to `[[F]]/[[u]]` and to `f(u)` at
/// equal traces.
pub fn conservative_flux(u_minus: f64, u_plus: f64, p: u32) -> f64 {
    // Horner in u⁺: the term (u⁻)^m picks up p - m factors of u⁺
    let mut total = 0.0;
    let mut um_pow = [1.0; 33];
    for m in 1..=p as usize {
        um_pow[m] = um_pow[m - 1] * u_minus;
    }
    for m in 0..=p as usize {
        total = total * u_plus + um_pow[m];
    }
    total / (p as f64 * (p as f64 + 1.0))
}

pub fn nonlinear_flux(kind: FluxKind, u_minus: f64, u_plus: f64, p: u32) -> Result<f64> {
    match kind {
        FluxKind::GodunovF => Ok(godunov_flux(u_minus, u_plus, p)),
        FluxKind::ConservativeF => Ok(conservative_flux(u_minus, u_plus, p)),
        other => Err(DgError::FluxKind(other)),
    }
}

pub fn linear_flux(pair: &TracePair, kind: FluxKind) -> Result<f64> {
    let (wm, wp) = kind.linear_weights()?;
    Ok(wm * pair.left + wp * pair.right)
}
