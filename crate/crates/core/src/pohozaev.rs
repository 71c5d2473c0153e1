//! Pohozaev-type function
//!
//! ```text
//! J(t; w) = a w_t^2 / 2 + b w_t w + c w^2 / 2 + a h w^{p+1} / (p+1)
//! ```
//!
//! whose derivative along solutions is `H(t) w^{p+1}`, and the sign functions
//! `phi(r, a)` that control `H`. Two coefficient choices are supported: the
//! even one `(b - t, 1/2, 0)` used for uniqueness among even solutions and the
//! general one `(b^2 - t^2, t, -1)`.
//!
//! Everything here is evaluated from closed forms in `r`.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ProblemParams;
use crate::profile::RadialProfile;
use crate::shooting::{shoot, ShootOptions};
use crate::transform::{self, h_unchecked};

/// Threshold below which a sampled value counts as negative.
pub const NEGATIVE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientKind {
    EvenUniqueness,
    GeneralUniqueness,
}

/// Coefficients `a(t)`, `b(t)`, `c(t)` of `J` on `(-b, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PohozaevCoefficients {
    pub kind: CoefficientKind,
    /// Half-width `b` of the interval.
    pub half_width: f64,
}

impl PohozaevCoefficients {
    pub fn new(kind: CoefficientKind, params: &ProblemParams) -> Result<Self> {
        if !params.b.is_finite() {
            return Err(Error::Domain("coefficients need a finite half-width b".into()));
        }
        Ok(Self {
            kind,
            half_width: params.b,
        })
    }

    pub fn a_fn(&self, t: f64) -> f64 {
        let b = self.half_width;
        match self.kind {
            CoefficientKind::EvenUniqueness => b - t,
            CoefficientKind::GeneralUniqueness => b * b - t * t,
        }
    }

    pub fn b_fn(&self, t: f64) -> f64 {
        match self.kind {
            CoefficientKind::EvenUniqueness => 0.5,
            CoefficientKind::GeneralUniqueness => t,
        }
    }

    pub fn c_fn(&self, _t: f64) -> f64 {
        match self.kind {
            CoefficientKind::EvenUniqueness => 0.0,
            CoefficientKind::GeneralUniqueness => -1.0,
        }
    }
}

/// `J(t; w)` with `w`, `w_t` from the profile's Hermite interpolant.
pub fn j_function(profile: &RadialProfile, coeffs: &PohozaevCoefficients, params: &ProblemParams, t: f64) -> Result<f64> {
    let (w, wt) = profile.hermite(t)?;
    Ok(j_from_values(coeffs, params, t, w, wt))
}

/// `J` from point values of `w` and `w_t`.
pub fn j_from_values(coeffs: &PohozaevCoefficients, params: &ProblemParams, t: f64, w: f64, wt: f64) -> f64 {
    let p = params.p;
    let a = coeffs.a_fn(t);
    let mut j = 0.5 * a * wt * wt + coeffs.b_fn(t) * wt * w + 0.5 * coeffs.c_fn(t) * w * w;
    if w != 0.0 && a != 0.0 {
        j += a * h_unchecked(t, params.lambda, p) * w.abs().powf(p + 1.0) / (p + 1.0);
    }
    j
}

/// `H(t)` with `dJ/dt = H w^{p+1}` along solutions.
pub fn h_density(t: f64, coeffs: &PohozaevCoefficients, params: &ProblemParams) -> f64 {
    let (lambda, p, a) = (params.lambda, params.p, params.a);
    let r = transform::r_of_t(t, lambda);
    match coeffs.kind {
        CoefficientKind::EvenUniqueness => transform::hbar_of_r(r, lambda, p) / (p + 1.0) * phi_even(r, a, lambda, p),
        CoefficientKind::GeneralUniqueness => {
            if lambda == 1.0 {
                (p + 3.0) / (p + 1.0) * r.cos().powf(-p) * phi_general(r, a, lambda, p)
            } else {
                let k = (1.0 - lambda).sqrt();
                r.cos().powf(-p) * (k * r).cos().powf(p + 3.0) / ((p + 1.0) * (1.0 - lambda)) * phi_general(r, a, lambda, p)
            }
        }
    }
}

/// `(p+3) k sin(k r) - (p-1) cos(k r) tan r` with `k = sqrt(1 - lambda)`.
fn bracket(r: f64, lambda: f64, p: f64) -> f64 {
    let k = (1.0 - lambda).sqrt();
    (p + 3.0) * k * (k * r).sin() - (p - 1.0) * (k * r).cos() * r.tan()
}

/// Sign function of the even-kind `H`: `H = hbar(r) phi(r, a) / (p+1)`.
pub fn phi_even(r: f64, a: f64, lambda: f64, p: f64) -> f64 {
    if lambda == 1.0 {
        return -(p + 3.0) / 2.0 + (p - 1.0) * (a - r) * r.tan();
    }
    let k = (1.0 - lambda).sqrt();
    -(p + 3.0) / 2.0 - (k * (a - r)).sin() / ((k * a).cos() * k) * bracket(r, lambda, p)
}

/// `d phi_even / da`.
pub fn phi_even_da(r: f64, a: f64, lambda: f64, p: f64) -> f64 {
    if lambda == 1.0 {
        return (p - 1.0) * r.tan();
    }
    let k = (1.0 - lambda).sqrt();
    -(k * r).cos() / (k * a).cos().powi(2) * bracket(r, lambda, p)
}

/// Whether `r` belongs to `S_+`, where `phi_even(r, a) < 0` for every `a`.
pub fn in_s_plus(r: f64, lambda: f64, p: f64) -> bool {
    bracket(r, lambda, p) >= 0.0
}

/// Sign function of the general-kind `H`.
///
/// For `lambda < 1` this is the bracket of `H = cos^{-p} r cos^{p+3}(k r) phi / ((p+1)(1-lambda))`;
/// for `lambda = 1` it is `-r cos r + (p-1)/(p+3) (a^2 - r^2) sin r`, with
/// `H = (p+3)/(p+1) cos^{-p} r phi`.
pub fn phi_general(r: f64, a: f64, lambda: f64, p: f64) -> f64 {
    if lambda == 1.0 {
        return -r * r.cos() + (p - 1.0) / (p + 3.0) * (a * a - r * r) * r.sin();
    }
    let k = (1.0 - lambda).sqrt();
    let sec2 = 1.0 / (k * a).cos().powi(2);
    let ck = (k * r).cos();
    -(p - 1.0) * r.sin() + sec2 * ck * ((p - 1.0) * ck * r.sin() - (p + 3.0) * k * (k * r).sin() * r.cos())
}

/// Closed form of `phi_general(a, a)`.
pub fn phi_general_at_a(a: f64, lambda: f64, p: f64) -> f64 {
    if lambda == 1.0 {
        return -a * a.cos();
    }
    let k = (1.0 - lambda).sqrt();
    -(p + 3.0) * k * a.cos() * (k * a).tan()
}

/// Sampled maximum of a function on an open interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignReport {
    pub samples: usize,
    pub max: f64,
    pub argmax: f64,
    /// Whether the maximum was re-examined on a 16x finer local grid.
    pub refined: bool,
    /// `max < -NEGATIVE_TOL`
    pub negative: bool,
}

/// Evaluate `f` at `n` interior points of `(lo, hi)`; when the maximum is not
/// clearly negative, resample 16x finer around it.
pub fn scan_sign<F>(f: F, lo: f64, hi: f64, n: usize) -> SignReport
where
    F: Fn(f64) -> f64 + Sync,
{
    let step = (hi - lo) / (n + 1) as f64;
    let (argmax, max) = (1..=n)
        .into_par_iter()
        .map(|i| {
            let r = lo + step * i as f64;
            (r, f(r))
        })
        .reduce(|| (f64::NAN, f64::NEG_INFINITY), |x, y| if y.1 > x.1 || x.1.is_nan() { y } else { x });
    let mut report = SignReport {
        samples: n,
        max,
        argmax,
        refined: false,
        negative: max < -NEGATIVE_TOL,
    };
    if !report.negative && n > 0 {
        let fine = step / 16.0;
        for j in -31..=31 {
            let r = argmax + fine * j as f64;
            if r <= lo || r >= hi {
                continue;
            }
            let v = f(r);
            if v > report.max {
                report.max = v;
                report.argmax = r;
            }
        }
        report.refined = true;
        report.samples += 62;
        report.negative = report.max < -NEGATIVE_TOL;
    }
    report
}

/// Even-kind sign check on `(0, a)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvenSignCheck {
    pub interior: SignReport,
    /// `phi(0, a)`, equal to `-(p+3)/2`.
    pub at_zero: f64,
    /// Whether `(lambda, p)` lies in `3/4 < lambda <= 1`, `1 < p <= 5`.
    pub in_regime: bool,
}

/// General-kind sign check on `(0, a)` with the endpoint identities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralSignCheck {
    pub interior: SignReport,
    /// `phi(0, a)`, equal to zero.
    pub at_zero: f64,
    /// `phi(a, a)` evaluated from the general formula.
    pub at_a: f64,
    /// `phi(a, a)` from its reduced closed form.
    pub at_a_closed: f64,
    /// Whether `(lambda, p)` lies in `-lambda_1 < lambda <= 0` or in `3/4 < lambda <= 1`, `p <= I(lambda)`.
    pub in_regime: bool,
}

impl GeneralSignCheck {
    pub fn passes(&self) -> bool {
        self.interior.negative && self.at_zero.abs() <= NEGATIVE_TOL && self.at_a < 0.0
    }
}

/// Sign of `phi_even(., a)` on `grid_n` interior points of `(0, a)`.
pub fn sign_check_even(params: &ProblemParams, grid_n: usize) -> EvenSignCheck {
    let (lambda, p, a) = (params.lambda, params.p, params.a);
    EvenSignCheck {
        interior: scan_sign(|r| phi_even(r, a, lambda, p), 0.0, a, grid_n),
        at_zero: phi_even(0.0, a, lambda, p),
        in_regime: lambda > 0.75 && lambda <= 1.0 && p > 1.0 && p <= 5.0,
    }
}

/// Sign of `phi_general(., a)` on `grid_n` interior points of `(0, a)`.
pub fn sign_check_general(params: &ProblemParams, grid_n: usize) -> GeneralSignCheck {
    let (lambda, p, a) = (params.lambda, params.p, params.a);
    let in_regime = if lambda <= 0.0 {
        params.is_supported() && p > 1.0
    } else {
        lambda > 0.75
            && lambda <= 1.0
            && p > 1.0
            && crate::params::i_of_lambda(lambda).map_or(false, |i| p <= i)
    };
    GeneralSignCheck {
        interior: scan_sign(|r| phi_general(r, a, lambda, p), 0.0, a, grid_n),
        at_zero: phi_general(0.0, a, lambda, p),
        at_a: phi_general(a, a, lambda, p),
        at_a_closed: phi_general_at_a(a, lambda, p),
        in_regime,
    }
}

/// `phi_1(r) = k [2(p + 7 - 2(p+3) lambda) + (5-p) sec^2 r]`
pub fn crossing_phi1(r: f64, lambda: f64, p: f64) -> f64 {
    let k = (1.0 - lambda).sqrt();
    k * (2.0 * (p + 7.0 - 2.0 * (p + 3.0) * lambda) + (5.0 - p) / r.cos().powi(2))
}

/// `phi_2(r) = -2 (5-p)(1-lambda) cot(2 k r) tan r`
pub fn crossing_phi2(r: f64, lambda: f64, p: f64) -> f64 {
    let k = (1.0 - lambda).sqrt();
    -2.0 * (5.0 - p) * (1.0 - lambda) * r.tan() / (2.0 * k * r).tan()
}

/// `lim_{r -> 0} phi_2(r) = -(5-p) k`
pub fn crossing_phi2_at_zero(lambda: f64, p: f64) -> f64 {
    -(5.0 - p) * (1.0 - lambda).sqrt()
}

/// Shape checks of `phi_1`, `phi_2` on `(0, pi/2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingReport {
    pub phi1_increasing: bool,
    pub phi2_decreasing: bool,
    /// `phi_1` grows without bound and `phi_2` falls without bound at `pi/2`.
    pub endpoint_limits: bool,
    pub phi1_at_zero: f64,
    pub phi2_limit_at_zero: f64,
    /// `phi_1(0) < lim_{r->0} phi_2(r)`
    pub zero_inequality: bool,
    /// Sign changes of `phi_1 - phi_2` on the grid.
    pub crossings: usize,
    pub crossing_point: Option<f64>,
}

impl CrossingReport {
    pub fn passes(&self) -> bool {
        self.phi1_increasing && self.phi2_decreasing && self.endpoint_limits && self.zero_inequality && self.crossings == 1
    }
}

/// Monotonicity, limits and single crossing of `phi_1`, `phi_2` for
/// `3/4 < lambda < 1`, `p > 6/lambda - 3`.
pub fn appendix_b_monotonicity(lambda: f64, p: f64, grid_n: usize) -> Result<CrossingReport> {
    if !(lambda > 0.75 && lambda < 1.0) {
        return Err(Error::Regime(format!("needs 3/4 < lambda < 1, got {lambda}")));
    }
    if !(p > 6.0 / lambda - 3.0) {
        return Err(Error::Regime(format!("needs p > 6/lambda - 3 = {}, got {p}", 6.0 / lambda - 3.0)));
    }
    let step = FRAC_PI_2 / (grid_n + 1) as f64;
    let rs: Vec<f64> = (1..=grid_n).map(|i| step * i as f64).collect();
    let f1: Vec<f64> = rs.iter().map(|&r| crossing_phi1(r, lambda, p)).collect();
    let f2: Vec<f64> = rs.iter().map(|&r| crossing_phi2(r, lambda, p)).collect();
    let phi1_increasing = f1.windows(2).all(|w| w[1] > w[0]);
    let phi2_decreasing = f2.windows(2).all(|w| w[1] < w[0]);
    let near: Vec<f64> = (3..=8).map(|k| FRAC_PI_2 - 10f64.powi(-k)).collect();
    let growth = |g: &dyn Fn(f64) -> f64, sign: f64| {
        near.windows(2)
            .all(|w| sign * g(w[0]) > 0.0 && sign * g(w[1]) >= 9.0 * sign * g(w[0]))
    };
    let endpoint_limits = growth(&|r| crossing_phi1(r, lambda, p), 1.0) && growth(&|r| crossing_phi2(r, lambda, p), -1.0);
    let phi1_at_zero = crossing_phi1(0.0, lambda, p);
    let phi2_limit_at_zero = crossing_phi2_at_zero(lambda, p);
    let diff: Vec<f64> = f1.iter().zip(&f2).map(|(a, b)| a - b).collect();
    let mut crossings = 0;
    let mut crossing_point = None;
    for i in 1..diff.len() {
        if (diff[i] > 0.0) != (diff[i - 1] > 0.0) {
            crossings += 1;
            crossing_point.get_or_insert(0.5 * (rs[i] + rs[i - 1]));
        }
    }
    Ok(CrossingReport {
        phi1_increasing,
        phi2_decreasing,
        endpoint_limits,
        phi1_at_zero,
        phi2_limit_at_zero,
        zero_inequality: phi1_at_zero < phi2_limit_at_zero,
        crossings,
        crossing_point,
    })
}

/// Integrated form of `dJ/dt = H w^{p+1}` along one trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub kind: CoefficientKind,
    pub start: f64,
    pub samples: usize,
    /// `max |J(t) - J(start) - int_start^t H w^{p+1}|`
    pub max_defect: f64,
    /// `max |J(t)|` over the samples and the start
    pub scale: f64,
    pub relative: f64,
}

/// Checks the identity along the ODE trajectory through the profile's apex
/// (value and slope taken from the profile there), integrated in both
/// directions until `|r| = r_frac a` or `w` reaches zero.
pub fn identity_along_trajectory(
    profile: &RadialProfile,
    kind: CoefficientKind,
    params: &ProblemParams,
    r_frac: f64,
) -> Result<IdentityReport> {
    profile.require_coordinate(crate::profile::CoordinateKind::T)?;
    if !(r_frac > 0.0 && r_frac < 1.0) {
        return Err(Error::Domain(format!("r_frac = {r_frac} outside (0, 1)")));
    }
    let coeffs = PohozaevCoefficients::new(kind, params)?;
    let (lambda, p) = (params.lambda, params.p);
    let apex = (0..profile.len())
        .max_by(|&i, &j| profile.values[i].total_cmp(&profile.values[j]))
        .ok_or(Error::ZeroProfile)?;
    let t0 = profile.grid[apex];
    let y0 = [profile.values[apex], profile.derivative[apex], 0.0];
    let j0 = j_from_values(&coeffs, params, t0, y0[0], y0[1]);
    let limit = transform::t_of_r(r_frac * params.a, lambda);
    let rhs = |t: f64, y: &[f64; 3]| {
        let h = h_unchecked(t, lambda, p);
        [y[1], -h * crate::profile::signed_pow(y[0], p), h_density(t, &coeffs, params) * y[0].abs().powf(p + 1.0)]
    };
    let tolerances = crate::ode::Tolerances {
        rtol: 1e-12,
        atol: 1e-14,
        ..Default::default()
    };
    let mut samples = 0;
    let mut max_defect = 0.0f64;
    let mut scale = j0.abs();
    for end in [limit, -limit] {
        if (end - t0) * end <= 0.0 {
            continue;
        }
        crate::ode::integrate(rhs, t0, y0, end, &tolerances, |s| {
            if s.y1[0] <= 0.0 {
                return crate::ode::Control::Stop;
            }
            let j = j_from_values(&coeffs, params, s.t1, s.y1[0], s.y1[1]);
            max_defect = max_defect.max((j - j0 - s.y1[2]).abs());
            scale = scale.max(j.abs());
            samples += 1;
            crate::ode::Control::Continue
        })?;
    }
    Ok(IdentityReport {
        kind,
        start: t0,
        samples,
        max_defect,
        scale,
        relative: if scale > 0.0 { max_defect / scale } else { 0.0 },
    })
}

/// Comparison of two shooting trajectories on their common positivity interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryComparison {
    pub alpha_1: f64,
    pub alpha_2: f64,
    /// Right end of the compared interval, `min(Z_1, Z_2, b)`.
    pub end: f64,
    /// Interior sign changes of `w_1 - w_2`.
    pub intersections: usize,
    /// `w_1 / w_2` non-decreasing on all consecutive samples.
    pub ratio_monotone: bool,
    /// Sign changes of `w_1' w_2 - w_1 w_2'`.
    pub wronskian_sign_changes: usize,
    pub grid: Vec<f64>,
    pub wronskian: Vec<f64>,
}

/// Sample `w(.; alpha_1)`, `w(.; alpha_2)` on `n` points of `[0, end)` and
/// compare them.
pub fn uniqueness_witness(params: &ProblemParams, alpha_1: f64, alpha_2: f64, n: usize) -> Result<TrajectoryComparison> {
    let options = ShootOptions {
        horizon: params.b.is_finite().then_some(params.b),
        ..ShootOptions::default()
    };
    let (s1, s2) = rayon::join(|| shoot(alpha_1, params, &options), || shoot(alpha_2, params, &options));
    let (s1, s2) = (s1?, s2?);
    let end = s1.profile.hi().min(s2.profile.hi()).min(params.b);
    if !(end > 0.0) || n < 2 {
        return Err(Error::Domain("trajectories unavailable".into()));
    }
    let grid: Vec<f64> = (0..n).map(|i| end * i as f64 / n as f64).collect();
    let mut diff = Vec::with_capacity(n);
    let mut ratio = Vec::with_capacity(n);
    let mut wronskian = Vec::with_capacity(n);
    for &t in &grid {
        let (w1, d1) = s1.eval(t).ok_or_else(|| Error::Domain("trajectories unavailable".into()))?;
        let (w2, d2) = s2.eval(t).ok_or_else(|| Error::Domain("trajectories unavailable".into()))?;
        diff.push(w1 - w2);
        ratio.push(w1 / w2);
        wronskian.push(d1 * w2 - w1 * d2);
    }
    let scale = alpha_1.max(alpha_2);
    let tol = 1e-9 * scale;
    Ok(TrajectoryComparison {
        alpha_1,
        alpha_2,
        end,
        intersections: sign_changes(&diff, tol),
        ratio_monotone: ratio.windows(2).all(|w| w[1] >= w[0] - 1e-12 * w[0].abs()),
        wronskian_sign_changes: sign_changes(&wronskian, tol * scale),
        grid,
        wronskian,
    })
}

fn sign_changes(v: &[f64], tol: f64) -> usize {
    let mut last = 0.0;
    let mut count = 0;
    for &x in v {
        if x.abs() <= tol {
            continue;
        }
        if last != 0.0 && (x > 0.0) != (last > 0.0) {
            count += 1;
        }
        last = x;
    }
    count
}
