//! Shooting from the centre: `w(0) = alpha`, `w_t(0) = 0`, integrate
//! `w_tt = -h(t) |w|^{p-1} w` outward and record the first zero `Z(alpha)`.
//!
//! Even solutions on `(-b, b)` correspond to roots of `Z(alpha) = b`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energy::{self, EnergySolution, Parity, Provenance};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::ode::{self, Control, Step, Tolerances};
use crate::params::ProblemParams;
use crate::profile::{signed_pow, CoordinateKind, RadialProfile};
use crate::transform::{self, h_unchecked};

/// Integrator and event settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootOptions {
    pub tolerances: Tolerances,
    /// Integration stops where `cos r(t)` falls to this value.
    pub endpoint_cos: f64,
    /// Stop early once `t` passes this value with `w` still positive.
    pub horizon: Option<f64>,
}

impl Default for ShootOptions {
    fn default() -> Self {
        Self {
            tolerances: Tolerances::default(),
            endpoint_cos: 1e-8,
            horizon: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ZeroFound,
    SingularEndpoint,
    /// The caller's horizon was reached with `w > 0`.
    Horizon,
    StepLimit,
}

/// One trajectory of the initial value problem.
#[derive(Debug, Clone)]
pub struct ShootResult {
    pub alpha: f64,
    pub first_zero: Option<f64>,
    /// Samples at the accepted steps, ending at the zero when one was found.
    pub profile: RadialProfile,
    pub terminated_by: Termination,
    /// `int_0^end w_t^2 dt`
    pub kinetic: f64,
    /// `int_0^end h |w|^{p+1} dt`
    pub potential: f64,
    steps: Vec<Step<4>>,
}

impl ShootResult {
    /// Dense-output `(w, w_t)` at `t` in `[0, end]`.
    pub fn eval(&self, t: f64) -> Option<(f64, f64)> {
        if t < 0.0 || t > self.profile.hi() {
            return None;
        }
        let i = self.steps.partition_point(|s| s.t1 < t).min(self.steps.len().checked_sub(1)?);
        let y = self.steps[i].interpolate(t);
        Some((y[0], y[1]))
    }

    /// `w_t` at the first zero.
    pub fn slope_at_zero(&self) -> Option<f64> {
        self.first_zero.map(|_| *self.profile.derivative.last().unwrap())
    }

    /// Rayleigh quotient of the even extension to `[-Z, Z]`, from the
    /// integrals carried along with the trajectory.
    pub fn even_rayleigh(&self, p: f64) -> Option<f64> {
        self.first_zero?;
        Some(2.0 * self.kinetic / (2.0 * self.potential).powf(2.0 / (p + 1.0)))
    }
}

fn endpoint_t(params: &ProblemParams, endpoint_cos: f64) -> f64 {
    let lambda = params.lambda;
    let r_end = endpoint_cos.acos().min(transform::r_limit(lambda) * (1.0 - 1e-9));
    transform::t_of_r(r_end, lambda)
}

/// Brent stopping rule: relative resolution in `t`, absolute in `w`.
struct ZeroPolish {
    value_tol: f64,
}

impl roots::Convergency<f64> for ZeroPolish {
    fn is_root_found(&mut self, y: f64) -> bool {
        y.abs() <= self.value_tol
    }

    fn is_converged(&mut self, x1: f64, x2: f64) -> bool {
        (x1 - x2).abs() <= 4.0 * f64::EPSILON * x1.abs().max(x2.abs())
    }

    fn is_iteration_limit_reached(&mut self, iter: usize) -> bool {
        iter >= 200
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!("initial height alpha = {alpha} must be positive")));
    }
    Ok(())
}

/// Integrate the initial value problem and locate the first zero.
pub fn shoot(alpha: f64, params: &ProblemParams, options: &ShootOptions) -> Result<ShootResult> {
    check_alpha(alpha)?;
    params.require_supported()?;
    let (lambda, p) = (params.lambda, params.p);
    let t_end = endpoint_t(params, options.endpoint_cos);
    let t_stop = options.horizon.map_or(t_end, |hz| hz.min(t_end));
    let rhs = move |t: f64, y: &[f64; 4]| {
        let h = h_unchecked(t, lambda, p);
        let f = signed_pow(y[0], p);
        [y[1], -h * f, y[1] * y[1], h * f * y[0]]
    };
    let mut steps: Vec<Step<4>> = Vec::new();
    let mut crossing: Option<usize> = None;
    let outcome = ode::integrate(rhs, 0.0, [alpha, 0.0, 0.0, 0.0], t_stop, &options.tolerances, |s| {
        steps.push(s.clone());
        if s.y1[0] <= 0.0 {
            crossing = Some(steps.len() - 1);
            Control::Stop
        } else {
            Control::Continue
        }
    });
    let terminated_by = match outcome {
        Ok(_) if crossing.is_some() => Termination::ZeroFound,
        Ok(_) if t_stop < t_end => Termination::Horizon,
        Ok(_) => Termination::SingularEndpoint,
        Err(Error::StepLimit { .. }) | Err(Error::StepUnderflow { .. }) if !steps.is_empty() => {
            Termination::StepLimit
        }
        Err(e) => return Err(e),
    };

    let mut first_zero = None;
    let mut end_state = steps.last().map(|s| s.y1);
    if let Some(k) = crossing {
        let s = &steps[k];
        let z = if s.y1[0] == 0.0 {
            s.t1
        } else {
            let mut conv = ZeroPolish { value_tol: 1e-15 * alpha };
            roots::find_root_brent(s.t0, s.t1, |t: f64| s.interpolate(t)[0], &mut conv)
                .map_err(|e| Error::Domain(format!("zero polishing failed: {e:?}")))?
        };
        first_zero = Some(z);
        let mut y = s.interpolate(z);
        y[0] = 0.0;
        end_state = Some(y);
    }

    let mut grid = Vec::with_capacity(steps.len() + 1);
    let mut values = Vec::with_capacity(steps.len() + 1);
    let mut derivative = Vec::with_capacity(steps.len() + 1);
    grid.push(0.0);
    values.push(alpha);
    derivative.push(0.0);
    let interior = if first_zero.is_some() { steps.len() - 1 } else { steps.len() };
    for s in &steps[..interior] {
        grid.push(s.t1);
        values.push(s.y1[0]);
        derivative.push(s.y1[1]);
    }
    if let (Some(z), Some(y)) = (first_zero, end_state) {
        if z > *grid.last().unwrap() {
            grid.push(z);
            values.push(0.0);
            derivative.push(y[1]);
        } else {
            // the zero sits on the previous step end
            *values.last_mut().unwrap() = 0.0;
        }
    }
    let (kinetic, potential) = end_state.map_or((0.0, 0.0), |y| (y[2], y[3]));
    let profile = RadialProfile::new(grid, values, derivative, CoordinateKind::T)?;
    Ok(ShootResult {
        alpha,
        first_zero,
        profile,
        terminated_by,
        kinetic,
        potential,
        steps,
    })
}

/// Smallest `delta` for which the concavity argument forces a zero of
/// `w(.; alpha)` in `[0, delta]`: `delta = sqrt((p+2) / (h0 alpha^{p-1}))`
/// with `h0 = cos(pi sqrt(1-lambda)/4)^{p+3}`, a lower bound of `h` on
/// `[0, t(pi/4)]`. `None` when the bound is vacuous (`delta >= t(pi/4)`).
pub fn zero_bound_delta(alpha: f64, params: &ProblemParams) -> Result<Option<f64>> {
    check_alpha(alpha)?;
    let (lambda, p) = (params.lambda, params.p);
    if lambda > 1.0 {
        return Err(Error::UnsupportedRegime {
            lambda,
            lambda_1: params.lambda_1(),
        });
    }
    let h0 = (std::f64::consts::PI * (1.0 - lambda).sqrt() / 4.0).cos().powf(p + 3.0);
    if !(h0 > 0.0) {
        return Ok(None);
    }
    let delta = ((p + 2.0) / (h0 * alpha.powf(p - 1.0))).sqrt();
    let limit = transform::t_of_r(std::f64::consts::FRAC_PI_4, lambda);
    Ok((delta < limit).then_some(delta))
}

/// Outcome of one point of a `Z(alpha)` scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZSample {
    pub alpha: f64,
    pub first_zero: Option<f64>,
    pub terminated_by: Option<Termination>,
    pub error: Option<String>,
}

/// `Z(alpha)` over a grid of heights; failures are recorded per point.
pub fn z_curve(alphas: &[f64], params: &ProblemParams, options: &ShootOptions) -> Vec<ZSample> {
    alphas
        .par_iter()
        .map(|&alpha| match shoot(alpha, params, options) {
            Ok(r) => ZSample {
                alpha,
                first_zero: r.first_zero,
                terminated_by: Some(r.terminated_by),
                error: None,
            },
            Err(e) => ZSample {
                alpha,
                first_zero: None,
                terminated_by: None,
                error: Some(e.to_string()),
            },
        })
        .collect()
}

/// Settings for [`find_even_solutions`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvenSearch {
    pub shoot: ShootOptions,
    /// Log-spaced points in `[c 10^-decades, c 10^decades]`, `c = lambda^{1/(p-1)}`.
    pub scan_points: usize,
    pub decades: f64,
    /// Target `|Z(alpha) - b|`.
    pub match_tol: f64,
    pub dedup_tol: f64,
    pub grid: GridSpec,
}

impl Default for EvenSearch {
    fn default() -> Self {
        Self {
            shoot: ShootOptions::default(),
            scan_points: 400,
            decades: 4.0,
            match_tol: 1e-9,
            dedup_tol: 1e-6,
            grid: GridSpec::default(),
        }
    }
}

/// Heights sampled by the even-solution scan: a log grid around
/// `c = lambda^{1/(p-1)}` plus a cluster at `c (1 +- 10^-k)`.
pub fn scan_heights(params: &ProblemParams, search: &EvenSearch) -> Vec<f64> {
    let c = if params.lambda > 0.0 { params.constant_height() } else { 1.0 };
    let n = search.scan_points.max(2);
    let mut alphas: Vec<f64> = (0..n)
        .map(|i| c * 10f64.powf(search.decades * (2.0 * i as f64 / (n - 1) as f64 - 1.0)))
        .collect();
    alphas.push(c);
    for k in 1..=8 {
        let d = 10f64.powi(-k);
        alphas.push(c * (1.0 - d));
        alphas.push(c * (1.0 + d));
    }
    alphas.sort_by(f64::total_cmp);
    alphas.dedup();
    alphas
}

/// Signed mismatch `Z(alpha) - b`; trajectories without a zero count as `+inf`.
fn mismatch(alpha: f64, params: &ProblemParams, options: &ShootOptions) -> Result<f64> {
    let r = shoot(alpha, params, options)?;
    Ok(match r.first_zero {
        Some(z) => z - params.b,
        None if r.terminated_by == Termination::StepLimit => {
            return Err(Error::StepLimit {
                max_steps: options.tolerances.max_steps,
                t: r.profile.hi(),
            })
        }
        None => f64::INFINITY,
    })
}

fn bisect_height(
    mut lo: f64,
    mut f_lo: f64,
    mut hi: f64,
    params: &ProblemParams,
    search: &EvenSearch,
    options: &ShootOptions,
) -> Result<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = mismatch(mid, params, options)?;
        if f_mid.abs() <= search.match_tol {
            return Ok(mid);
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Even profile on a symmetric grid over `[-b, b]` from the trajectory with
/// height `alpha`; `w(-t) = w(t)`, `w_t(-t) = -w_t(t)`.
pub fn even_profile(alpha: f64, params: &ProblemParams, grid: &[f64], options: &ShootOptions) -> Result<RadialProfile> {
    let shot = shoot(alpha, params, options)?;
    let end = shot.profile.hi();
    let mut values = Vec::with_capacity(grid.len());
    let mut derivative = Vec::with_capacity(grid.len());
    for &t in grid {
        let s = t.abs();
        let (w, wt) = if s <= end {
            shot.eval(s).expect("inside the trajectory")
        } else {
            // only reached at +-b when Z(alpha) falls short of b by the match tolerance
            (0.0, *shot.profile.derivative.last().unwrap())
        };
        values.push(w);
        derivative.push(if t < 0.0 { -wt } else { wt });
    }
    let n = values.len();
    values[0] = 0.0;
    values[n - 1] = 0.0;
    RadialProfile::new(grid.to_vec(), values, derivative, CoordinateKind::T)
}

/// Relative tolerance for the trajectories that become returned profiles;
/// the scan itself runs at the caller's tolerances.
pub const FINAL_RTOL: f64 = 1e-12;

/// All even solutions found by scanning `alpha` and polishing every sign
/// change of `Z(alpha) - b`, sorted by height.
pub fn find_even_solutions(params: &ProblemParams, search: &EvenSearch) -> Result<Vec<EnergySolution>> {
    params.require_supported()?;
    let alphas = scan_heights(params, search);
    let mut options = search.shoot;
    options.horizon = Some(params.b * (1.0 + 1e-3) + 1e-3);
    let f: Vec<f64> = alphas
        .par_iter()
        .map(|&a| mismatch(a, params, &options))
        .collect::<Result<_>>()?;
    let mut brackets = Vec::new();
    for i in 0..alphas.len() - 1 {
        if f[i] == 0.0 {
            brackets.push((alphas[i], alphas[i], f[i]));
        } else if (f[i] > 0.0) != (f[i + 1] > 0.0) && f[i + 1] != 0.0 {
            brackets.push((alphas[i], alphas[i + 1], f[i]));
        }
    }
    let roots: Vec<f64> = brackets
        .par_iter()
        .map(|&(lo, hi, f_lo)| {
            if lo == hi {
                Ok(lo)
            } else {
                bisect_height(lo, f_lo, hi, params, search, &options)
            }
        })
        .collect::<Result<_>>()?;
    if roots.is_empty() {
        return Err(Error::ScanExhausted {
            alpha_min: alphas[0],
            alpha_max: alphas[alphas.len() - 1],
        });
    }
    let grid = search.grid.build(params)?;
    let mut fine = search.shoot;
    fine.tolerances.rtol = fine.tolerances.rtol.min(FINAL_RTOL);
    fine.tolerances.atol = fine.tolerances.atol.min(FINAL_RTOL * 1e-2);
    let mut out: Vec<EnergySolution> = Vec::new();
    for alpha in roots {
        let profile = even_profile(alpha, params, &grid, &fine)?;
        if out.iter().any(|s| s.profile.sup_distance(&profile).map_or(false, |d| d < search.dedup_tol)) {
            continue;
        }
        let rayleigh = energy::rayleigh_quotient(&profile, params)?;
        out.push(EnergySolution {
            profile,
            rayleigh,
            parity: Parity::Even,
            provenance: Provenance::ShootingRoot,
        });
    }
    Ok(out)
}
