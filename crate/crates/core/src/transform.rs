//! Coordinate changes `tau -> r -> t` and the weights of the transformed equation.
//!
//! With `r = tau - pi/2` the radial equation reads
//! `u_rr - 2 tan(r) u_r - lambda u + u^p = 0` on `(-a, a)`. Writing
//! `u(r) = w(t(r)) phi(r)` with `phi = psi / cos` and `t' = psi^{-2}` removes the
//! first-order term and leaves
//!
//! ```text
//! w_tt + h(t) |w|^{p-1} w = 0,   h(t) = cos(r(t))^{1-p} psi(r(t))^{p+3}.
//! ```
//!
//! Every function here is total on its open interval and branches on the sign
//! of `1 - lambda` (`cosh`, constant and `cos` forms of `psi`).

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// Smallest `cos r(t)` at which `h` is still evaluated.
pub const COS_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Branch {
    /// `lambda > 1`, carries `sqrt(lambda - 1)`.
    Hyperbolic(f64),
    /// `lambda == 1`.
    Flat,
    /// `lambda < 1`, carries `sqrt(1 - lambda)`.
    Trig(f64),
}

fn branch(lambda: f64) -> Branch {
    if lambda > 1.0 {
        Branch::Hyperbolic((lambda - 1.0).sqrt())
    } else if lambda == 1.0 {
        Branch::Flat
    } else {
        Branch::Trig((1.0 - lambda).sqrt())
    }
}

/// `psi(r)`: `cosh(r sqrt(lambda-1))`, `1` or `cos(r sqrt(1-lambda))`.
pub fn psi(r: f64, lambda: f64) -> f64 {
    match branch(lambda) {
        Branch::Hyperbolic(k) => (k * r).cosh(),
        Branch::Flat => 1.0,
        Branch::Trig(k) => (k * r).cos(),
    }
}

/// `psi'(r)`.
pub fn psi_r(r: f64, lambda: f64) -> f64 {
    match branch(lambda) {
        Branch::Hyperbolic(k) => k * (k * r).sinh(),
        Branch::Flat => 0.0,
        Branch::Trig(k) => -k * (k * r).sin(),
    }
}

/// `phi(r) = psi(r) / cos(r)`, the positive solution of
/// `phi_rr - 2 tan(r) phi_r - lambda phi = 0`.
pub fn phi_weight(r: f64, lambda: f64) -> f64 {
    psi(r, lambda) / r.cos()
}

/// `phi'(r)`.
pub fn phi_weight_r(r: f64, lambda: f64) -> f64 {
    let c = r.cos();
    (psi_r(r, lambda) * c + psi(r, lambda) * r.sin()) / (c * c)
}

/// Largest `|r|` for which `t(r)` is finite and `psi > 0`.
pub fn r_limit(lambda: f64) -> f64 {
    match branch(lambda) {
        Branch::Trig(k) if k >= 1.0 => FRAC_PI_2 / k,
        _ => FRAC_PI_2,
    }
}

/// `t(r)`. Errors at `|r| >= pi/2` (and at the pole of `tan` when `lambda < 0`).
pub fn try_t_of_r(r: f64, lambda: f64) -> Result<f64> {
    if !(r.abs() < r_limit(lambda)) {
        return Err(Error::Domain(format!("|r| = {} outside the image interval", r.abs())));
    }
    Ok(t_of_r(r, lambda))
}

/// `t(r)` without the domain check.
pub fn t_of_r(r: f64, lambda: f64) -> f64 {
    match branch(lambda) {
        Branch::Hyperbolic(k) => (k * r).tanh() / k,
        Branch::Flat => r,
        Branch::Trig(k) => (k * r).tan() / k,
    }
}

/// Inverse of [`t_of_r`].
pub fn r_of_t(t: f64, lambda: f64) -> f64 {
    match branch(lambda) {
        Branch::Hyperbolic(k) => (k * t).atanh() / k,
        Branch::Flat => t,
        Branch::Trig(k) => (k * t).atan() / k,
    }
}

/// `r(t)` with a check that `t` lies in the image of `(-pi/2, pi/2)`.
pub fn try_r_of_t(t: f64, lambda: f64) -> Result<f64> {
    let t_max = t_of_pi_half(lambda);
    if !(t.abs() < t_max) {
        return Err(Error::Domain(format!("|t| = {} outside (0, t(pi/2) = {t_max})", t.abs())));
    }
    Ok(r_of_t(t, lambda))
}

/// `t(pi/2)`; infinite when `lambda <= 0` because `tan(r sqrt(1-lambda))`
/// reaches its pole before `r = pi/2`.
pub fn t_of_pi_half(lambda: f64) -> f64 {
    match branch(lambda) {
        Branch::Trig(k) if k >= 1.0 => f64::INFINITY,
        _ => t_of_r(FRAC_PI_2, lambda),
    }
}

/// `dt/dr = psi(r)^{-2}`.
pub fn dt_dr(r: f64, lambda: f64) -> f64 {
    let s = psi(r, lambda);
    1.0 / (s * s)
}

/// `hbar(r) = cos(r)^{1-p} psi(r)^{p+3}`.
pub fn hbar_of_r(r: f64, lambda: f64, p: f64) -> f64 {
    r.cos().powf(1.0 - p) * psi(r, lambda).powf(p + 3.0)
}

/// `hbar'(r) / hbar(r) = (p-1) tan r + (p+3) psi'/psi`.
pub fn hbar_log_derivative(r: f64, lambda: f64, p: f64) -> f64 {
    (p - 1.0) * r.tan() + (p + 3.0) * psi_r(r, lambda) / psi(r, lambda)
}

/// Cutoff on `cos r(t)` below which `h` is reported singular.
pub fn cos_cutoff(p: f64) -> f64 {
    COS_CUTOFF.max(1e-300f64.powf(1.0 / (p - 1.0)))
}

/// `h(t) = hbar(r(t))`, refusing points too close to the singular endpoint.
pub fn h_of_t(t: f64, lambda: f64, p: f64) -> Result<f64> {
    let r = r_of_t(t, lambda);
    if !(r.cos() > cos_cutoff(p)) || !(t.abs() < t_of_pi_half(lambda)) {
        return Err(Error::SingularWeight { t });
    }
    Ok(hbar_of_r(r, lambda, p))
}

/// `h(t)` without the singularity guard; used inside integrator right-hand sides.
#[inline]
pub fn h_unchecked(t: f64, lambda: f64, p: f64) -> f64 {
    hbar_of_r(r_of_t(t, lambda), lambda, p)
}

/// `h_t(t) = hbar_r(r) psi(r)^2`.
pub fn h_t(t: f64, lambda: f64, p: f64) -> f64 {
    let r = r_of_t(t, lambda);
    let s = psi(r, lambda);
    hbar_of_r(r, lambda, p) * hbar_log_derivative(r, lambda, p) * s * s
}
