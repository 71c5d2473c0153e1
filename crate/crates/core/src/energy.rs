//! The Rayleigh quotient
//!
//! ```text
//! R(w) = int w_t^2 dt / ( int h |w|^{p+1} dt )^{2/(p+1)}
//! ```
//!
//! discretized with piecewise-linear elements and a lumped (trapezoid)
//! nonlinear term. Critical points of the discrete quotient, rescaled by their
//! Lagrange multiplier, satisfy the three-point equation
//! `-D^2 w = h |w|^{p-1} w` exactly, which is what [`profile::discrete_residual`]
//! measures.
//!
//! [`profile::discrete_residual`]: crate::profile::discrete_residual

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{self, GridSpec};
use crate::params::ProblemParams;
use crate::profile::{signed_pow, CoordinateKind, RadialProfile};
use crate::transform::{self, h_unchecked};
use crate::tridiag::SymTridiag;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    NonEven,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    MinimizerEven,
    MinimizerFree,
    ShootingRoot,
}

/// Parity requested from the minimizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParityConstraint {
    Even,
    Free,
}

/// A solution on `[-b, b]` with its Rayleigh value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergySolution {
    pub profile: RadialProfile,
    pub rayleigh: f64,
    pub parity: Parity,
    pub provenance: Provenance,
}

impl EnergySolution {
    /// The mirror image `t -> w(-t)`.
    pub fn reflected(&self) -> Self {
        Self {
            profile: self.profile.reflected(),
            ..self.clone()
        }
    }
}

/// Relative asymmetry above which a profile counts as non-even.
pub const PARITY_TOL: f64 = 1e-6;

/// Discrete operators on a fixed grid; `w` vectors hold interior nodes only.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub nodes: Vec<f64>,
    /// Lumped weights at interior nodes.
    pub mass: Vec<f64>,
    /// `h` at interior nodes.
    pub weight: Vec<f64>,
    /// Stiffness matrix of `int w_t^2`.
    pub stiffness: SymTridiag,
    pub p: f64,
}

impl Discretization {
    pub fn new(nodes: &[f64], params: &ProblemParams) -> Result<Self> {
        let n = nodes.len();
        if n < 3 {
            return Err(Error::InvalidProfile("need at least three nodes".into()));
        }
        let (lambda, p) = (params.lambda, params.p);
        let m = grid::lumped_weights(nodes);
        let mut weight = Vec::with_capacity(n - 2);
        for &t in &nodes[1..n - 1] {
            weight.push(transform::h_of_t(t, lambda, p)?);
        }
        let inv: Vec<f64> = nodes.windows(2).map(|w| 1.0 / (w[1] - w[0])).collect();
        let diag: Vec<f64> = (1..n - 1).map(|i| inv[i - 1] + inv[i]).collect();
        let off: Vec<f64> = (1..n - 2).map(|i| -inv[i]).collect();
        Ok(Self {
            nodes: nodes.to_vec(),
            mass: m[1..n - 1].to_vec(),
            weight,
            stiffness: SymTridiag::new(diag, off),
            p,
        })
    }

    pub fn interior(&self) -> usize {
        self.mass.len()
    }

    /// `int w_t^2`, summed over elements to avoid the cancellation in `w^T K w`.
    pub fn numerator(&self, w: &[f64]) -> f64 {
        let n = w.len();
        let t = &self.nodes;
        let mut s = w[0] * w[0] / (t[1] - t[0]) + w[n - 1] * w[n - 1] / (t[n + 1] - t[n]);
        for i in 0..n - 1 {
            let d = w[i + 1] - w[i];
            s += d * d / (t[i + 2] - t[i + 1]);
        }
        s
    }

    /// `int h |w|^{p+1}`
    pub fn denominator(&self, w: &[f64]) -> f64 {
        w.iter()
            .zip(&self.mass)
            .zip(&self.weight)
            .map(|((w, m), h)| m * h * w.abs().powf(self.p + 1.0))
            .sum()
    }

    pub fn rayleigh(&self, w: &[f64]) -> f64 {
        self.numerator(w) / self.denominator(w).powf(2.0 / (self.p + 1.0))
    }

    /// `m_i h_i |w_i|^{p-1} w_i`
    fn forcing(&self, w: &[f64]) -> Vec<f64> {
        w.iter()
            .zip(&self.mass)
            .zip(&self.weight)
            .map(|((w, m), h)| m * h * signed_pow(*w, self.p))
            .collect()
    }

    /// Relative residual of `K w = mu M h |w|^{p-1} w` with `mu` from `w^T K w`.
    fn stationarity(&self, w: &[f64]) -> (f64, f64) {
        let kw = self.stiffness.mul(w);
        let g = self.forcing(w);
        let mu = self.numerator(w) / self.denominator(w);
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        for i in 0..w.len() {
            worst = worst.max((kw[i] - mu * g[i]).abs() / self.mass[i]);
            scale = scale.max((mu * g[i]).abs() / self.mass[i]);
        }
        (if scale > 0.0 { worst / scale } else { f64::INFINITY }, mu)
    }

    fn normalized(&self, mut w: Vec<f64>) -> Vec<f64> {
        let d = self.denominator(&w);
        let c = d.powf(-1.0 / (self.p + 1.0));
        w.iter_mut().for_each(|v| *v *= c);
        w
    }

    /// Profile on the full grid from interior values.
    pub fn profile(&self, w: &[f64]) -> Result<RadialProfile> {
        let mut values = Vec::with_capacity(w.len() + 2);
        values.push(0.0);
        values.extend_from_slice(w);
        values.push(0.0);
        RadialProfile::from_values(self.nodes.clone(), values, CoordinateKind::T)
    }
}

fn symmetrize(w: &mut [f64]) {
    let n = w.len();
    for i in 0..n / 2 {
        let m = 0.5 * (w[i] + w[n - 1 - i]);
        w[i] = m;
        w[n - 1 - i] = m;
    }
}

fn require_dirichlet(profile: &RadialProfile) -> Result<()> {
    let n = profile.len();
    let tol = 1e-10 * profile.max_abs().max(1.0);
    if profile.values[0].abs() > tol || profile.values[n - 1].abs() > tol {
        return Err(Error::InvalidProfile("profile does not vanish at the endpoints".into()));
    }
    Ok(())
}

/// Discrete Rayleigh quotient of a profile vanishing at both ends: exact
/// `int w_t^2` of the piecewise-linear interpolant over the trapezoid rule for
/// `int h |w|^{p+1}` (the endpoint terms vanish with `w`, so `h` is never
/// evaluated at the boundary).
pub fn rayleigh_quotient(profile: &RadialProfile, params: &ProblemParams) -> Result<f64> {
    profile.require_coordinate(CoordinateKind::T)?;
    require_dirichlet(profile)?;
    let g = &profile.grid;
    let w = &profile.values;
    let p = params.p;
    let m = grid::lumped_weights(g);
    let mut num = 0.0;
    for i in 0..g.len() - 1 {
        let d = w[i + 1] - w[i];
        num += d * d / (g[i + 1] - g[i]);
    }
    let mut den = 0.0;
    for i in 1..g.len() - 1 {
        if w[i] != 0.0 {
            den += m[i] * transform::h_of_t(g[i], params.lambda, p)? * w[i].abs().powf(p + 1.0);
        }
    }
    if den == 0.0 {
        return Err(Error::ZeroProfile);
    }
    Ok(num / den.powf(2.0 / (p + 1.0)))
}

/// Stopping rules for [`minimize_rayleigh`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimizeOptions {
    pub max_iterations: usize,
    /// Relative max-norm of the constrained gradient.
    pub gradient_tol: f64,
    pub armijo: f64,
    /// On strongly graded grids round-off can hold the gradient above
    /// `gradient_tol`; a run that has not halved its gradient for
    /// `stall_iterations` steps and sits below `floor_tol` is accepted.
    pub stall_iterations: usize,
    pub floor_tol: f64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            max_iterations: 100_000,
            gradient_tol: 1e-9,
            armijo: 1e-4,
            stall_iterations: 200,
            floor_tol: 1e-7,
        }
    }
}

/// Minimize `R` over piecewise-linear functions on the seed's grid.
///
/// Iterates stay on `int h |w|^{p+1} = 1` and are replaced by `|w|` (and by
/// their even part under [`ParityConstraint::Even`]). The search direction is
/// the gradient in the `H^1_0` metric, so a unit step is one sweep of
/// nonlinear inverse iteration; steps are halved until the Armijo condition
/// holds. The result is rescaled by `mu^{1/(p-1)}` so that it solves the
/// discrete equation.
pub fn minimize_rayleigh(
    params: &ProblemParams,
    constraint: ParityConstraint,
    seed: &RadialProfile,
    options: &MinimizeOptions,
) -> Result<EnergySolution> {
    params.require_supported()?;
    seed.require_coordinate(CoordinateKind::T)?;
    if constraint == ParityConstraint::Even && !grid::is_symmetric(&seed.grid) {
        return Err(Error::Parity("even minimization needs a symmetric grid".into()));
    }
    let disc = Discretization::new(&seed.grid, params)?;
    let n = seed.len();
    let mut w: Vec<f64> = seed.values[1..n - 1].iter().map(|v| v.abs()).collect();
    if constraint == ParityConstraint::Even {
        symmetrize(&mut w);
    }
    if disc.denominator(&w) == 0.0 {
        return Err(Error::ZeroProfile);
    }
    w = disc.normalized(w);
    let mut r = disc.numerator(&w);
    let mut iterations = 0;
    let (mut res, _) = disc.stationarity(&w);
    let mut best = (res, 0usize);
    while res > options.gradient_tol {
        if iterations - best.1 > options.stall_iterations && best.0 <= options.floor_tol {
            break;
        }
        if iterations >= options.max_iterations {
            return Err(Error::NotConverged {
                iterations,
                gradient_norm: res,
            });
        }
        iterations += 1;
        let g = disc.forcing(&w);
        let target = disc.stiffness.solve(&g);
        // H^1 gradient of R on the constraint, up to a factor 2: w - mu K^{-1} g
        let dir: Vec<f64> = w.iter().zip(&target).map(|(w, t)| r * t - w).collect();
        let slope = -2.0 * disc.numerator(&dir);
        let mut step = 1.0;
        let accepted = loop {
            let mut trial: Vec<f64> = w.iter().zip(&dir).map(|(w, d)| (w + step * d).abs()).collect();
            if constraint == ParityConstraint::Even {
                symmetrize(&mut trial);
            }
            let trial = disc.normalized(trial);
            let r_trial = disc.numerator(&trial);
            // the allowance absorbs round-off once the decrease is below machine precision
            if r_trial <= r + options.armijo * step * slope + 1e-13 * r {
                break Some((trial, r_trial));
            }
            step *= 0.5;
            if step < 1e-12 {
                break None;
            }
        };
        match accepted {
            Some((trial, r_trial)) => {
                w = trial;
                r = r_trial;
            }
            None => {
                return Err(Error::NotConverged {
                    iterations,
                    gradient_norm: res,
                })
            }
        }
        res = disc.stationarity(&w).0;
        if res < 0.5 * best.0 {
            best = (res, iterations);
        }
    }
    let (_, mu) = disc.stationarity(&w);
    let scale = mu.powf(1.0 / (params.p - 1.0));
    let mut values: Vec<f64> = w.iter().map(|v| v * scale).collect();
    let parity = match constraint {
        ParityConstraint::Even => Parity::Even,
        ParityConstraint::Free => {
            let full = disc.profile(&values)?;
            if full.asymmetry()? <= PARITY_TOL {
                symmetrize(&mut values);
                Parity::Even
            } else {
                Parity::NonEven
            }
        }
    };
    let profile = disc.profile(&values)?;
    let rayleigh = rayleigh_quotient(&profile, params)?;
    Ok(EnergySolution {
        profile,
        rayleigh,
        parity,
        provenance: match constraint {
            ParityConstraint::Even => Provenance::MinimizerEven,
            ParityConstraint::Free => Provenance::MinimizerFree,
        },
    })
}

/// Starting profiles for the minimizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Seed {
    /// `cos(pi t / 2b)`
    Even,
    /// Half-width bump centred at `-b/2`.
    BumpLeft,
    /// Half-width bump centred at `b/2`.
    BumpRight,
    /// Flat top with linear ramps over the outer `t(pi/2 - 2 eps) <= |t| <= b`.
    Plateau,
}

/// Sample a seed on `grid` (a symmetric grid over `[-b, b]`).
pub fn seed_profile(seed: Seed, params: &ProblemParams, grid: &[f64]) -> Result<RadialProfile> {
    let b = params.b;
    let bump = |t: f64, c: f64| {
        let x = (t - c) / (0.5 * b);
        if x.abs() < 1.0 {
            (FRAC_PI_2 * x).cos().powi(2)
        } else {
            0.0
        }
    };
    let ramp_start = plateau_edge(params);
    let values: Vec<f64> = grid
        .iter()
        .map(|&t| match seed {
            Seed::Even => (FRAC_PI_2 * t / b).cos().max(0.0),
            Seed::BumpLeft => bump(t, -0.5 * b),
            Seed::BumpRight => bump(t, 0.5 * b),
            Seed::Plateau => ((b - t.abs()) / (b - ramp_start)).min(1.0).max(0.0),
        })
        .collect();
    let mut values = values;
    let n = values.len();
    values[0] = 0.0;
    values[n - 1] = 0.0;
    RadialProfile::from_values(grid.to_vec(), values, CoordinateKind::T)
}

fn plateau_edge(params: &ProblemParams) -> f64 {
    let eps = params.epsilon;
    if 2.0 * eps < FRAC_PI_2 {
        transform::t_of_r(FRAC_PI_2 - 2.0 * eps, params.lambda)
    } else {
        0.5 * params.b
    }
}

/// Richardson-extrapolated profile `(4 w_fine - w) / 3` on the solution's
/// grid, where `w_fine` is the minimizer on the grid with every interval
/// halved, started from `solution`. Removes the leading `O(h^2)` error of the
/// piecewise-linear scheme.
pub fn extrapolated_profile(solution: &EnergySolution, params: &ProblemParams, options: &MinimizeOptions) -> Result<RadialProfile> {
    let coarse = &solution.profile;
    let fine_nodes = grid::refine(&coarse.grid);
    let constraint = match solution.parity {
        Parity::Even => ParityConstraint::Even,
        Parity::NonEven => ParityConstraint::Free,
    };
    let fine = minimize_rayleigh(params, constraint, &coarse.resampled(&fine_nodes)?, options)?;
    let values: Vec<f64> = coarse
        .values
        .iter()
        .enumerate()
        .map(|(i, w)| (4.0 * fine.profile.values[2 * i] - w) / 3.0)
        .collect();
    RadialProfile::from_values(coarse.grid.clone(), values, CoordinateKind::T)
}

/// Even least-energy solution on the given grid: minimizes from the cosine
/// and plateau seeds and keeps the lower quotient.
pub fn even_least_energy(params: &ProblemParams, grid: &GridSpec, options: &MinimizeOptions) -> Result<EnergySolution> {
    let nodes = grid.build(params)?;
    let runs: Vec<Result<EnergySolution>> = [Seed::Even, Seed::Plateau]
        .par_iter()
        .map(|&s| minimize_rayleigh(params, ParityConstraint::Even, &seed_profile(s, params, &nodes)?, options))
        .collect();
    pick_lowest(runs)
}

fn pick_lowest(runs: Vec<Result<EnergySolution>>) -> Result<EnergySolution> {
    let mut best: Option<EnergySolution> = None;
    let mut last_err = None;
    for r in runs {
        match r {
            Ok(s) if best.as_ref().map_or(true, |b| s.rayleigh < b.rayleigh) => best = Some(s),
            Ok(_) => {}
            Err(e) => last_err = Some(e),
        }
    }
    best.ok_or_else(|| last_err.unwrap_or(Error::ZeroProfile))
}

/// Free minimizers from the two one-sided seeds, `(left, right)`.
pub fn free_minimizers(
    params: &ProblemParams,
    grid: &GridSpec,
    options: &MinimizeOptions,
) -> Result<(EnergySolution, EnergySolution)> {
    let nodes = grid.build(params)?;
    let (left, right) = rayon::join(
        || minimize_rayleigh(params, ParityConstraint::Free, &seed_profile(Seed::BumpLeft, params, &nodes)?, options),
        || minimize_rayleigh(params, ParityConstraint::Free, &seed_profile(Seed::BumpRight, params, &nodes)?, options),
    );
    Ok((left?, right?))
}

/// Least-energy solution: the better of the two free minimizers.
pub fn least_energy(params: &ProblemParams, grid: &GridSpec, options: &MinimizeOptions) -> Result<EnergySolution> {
    let (l, r) = free_minimizers(params, grid, options)?;
    pick_lowest(vec![Ok(l), Ok(r)])
}

/// `E(b)` (even least energy) along a sequence of `eps` values.
pub fn even_least_energy_curve(
    base: &ProblemParams,
    epsilons: &[f64],
    grid: &GridSpec,
    options: &MinimizeOptions,
) -> Vec<(f64, Result<f64>)> {
    epsilons
        .par_iter()
        .map(|&eps| {
            let value = ProblemParams::with_epsilon(base.lambda, base.p, eps)
                .and_then(|prm| even_least_energy(&prm, grid, options))
                .map(|s| s.rayleigh);
            (eps, value)
        })
        .collect()
}

fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    quadrature::double_exponential::integrate(f, a, b, 1e-12).integral
}

/// `R(w_eps)` for the plateau test function of height `sqrt(eps)` on
/// `|t| <= t(pi/2 - 2 eps)` with linear ramps down to `w(+-b) = 0`.
///
/// Computed by quadrature in `r`, independently of any grid.
pub fn plateau_upper_bound(params: &ProblemParams) -> Result<f64> {
    let (lambda, p, eps) = (params.lambda, params.p, params.epsilon);
    if !(2.0 * eps < FRAC_PI_2) {
        return Err(Error::Domain(format!("plateau test profile needs eps < pi/4, got {eps}")));
    }
    let b = params.b;
    let r1 = FRAC_PI_2 - 2.0 * eps;
    let t1 = transform::t_of_r(r1, lambda);
    let numerator = 2.0 * eps / (b - t1);
    // dt = psi^{-2} dr, so h dt = cos^{1-p} psi^{p+1} dr
    let density = |r: f64| r.cos().powf(1.0 - p) * transform::psi(r, lambda).powf(p + 1.0);
    let flat = integrate(density, 0.0, r1);
    let ramp = integrate(
        |r: f64| density(r) * ((b - transform::t_of_r(r, lambda)) / (b - t1)).powf(p + 1.0),
        r1,
        params.a,
    );
    let denominator = 2.0 * eps.powf(0.5 * (p + 1.0)) * (flat + ramp);
    Ok(numerator / denominator.powf(2.0 / (p + 1.0)))
}

/// Second variation of `R` along `s -> (1 + s t) W` at `s = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecondVariation {
    /// `int t^2 W_t^2 - p int t^2 h W^{p+1}` (discrete counterpart).
    pub f_of_b: f64,
    /// Analytic `R_ss(0)`.
    pub r_ss: f64,
    /// `int h W^{p+1}`
    pub potential: f64,
}

/// `R((1 + s t) W)` on the profile's grid.
pub fn rayleigh_along_dilation(profile: &RadialProfile, params: &ProblemParams, s: f64) -> Result<f64> {
    let values: Vec<f64> = profile.grid.iter().zip(&profile.values).map(|(t, w)| (1.0 + s * t) * w).collect();
    let bent = RadialProfile::new(profile.grid.clone(), values, profile.derivative.clone(), CoordinateKind::T)?;
    rayleigh_quotient(&bent, params)
}

/// `F(b)` and the analytic `R_ss(0)` for an even solution, assembled with the
/// same discrete integrals as [`rayleigh_quotient`], so that the central
/// difference of [`rayleigh_along_dilation`] reproduces `R_ss(0)`.
pub fn second_variation_f(solution: &EnergySolution, params: &ProblemParams) -> Result<SecondVariation> {
    let prof = &solution.profile;
    prof.require_coordinate(CoordinateKind::T)?;
    if solution.parity != Parity::Even || prof.asymmetry()? > 1e-8 {
        return Err(Error::Parity("second variation along t W needs an even solution".into()));
    }
    let p = params.p;
    let g = &prof.grid;
    let w = &prof.values;
    let m = grid::lumped_weights(g);
    let (mut n0, mut n1, mut n2) = (0.0, 0.0, 0.0);
    for i in 0..g.len() - 1 {
        let dt = g[i + 1] - g[i];
        let dw = w[i + 1] - w[i];
        let dtw = g[i + 1] * w[i + 1] - g[i] * w[i];
        n0 += dw * dw / dt;
        n1 += 2.0 * dw * dtw / dt;
        n2 += 2.0 * dtw * dtw / dt;
    }
    let (mut g0, mut g1, mut g2t) = (0.0, 0.0, 0.0);
    for i in 1..g.len() - 1 {
        let e = m[i] * h_unchecked(g[i], params.lambda, p) * w[i].abs().powf(p + 1.0);
        g0 += e;
        g1 += e * g[i];
        g2t += e * g[i] * g[i];
    }
    let q = 2.0 / (p + 1.0);
    // G(s) = sum m h (1 + s t)^{p+1} W^{p+1}, D = G^q
    let gp = (p + 1.0) * g1;
    let gpp = (p + 1.0) * p * g2t;
    let d0 = g0.powf(q);
    let d1 = q * g0.powf(q - 1.0) * gp;
    let d2 = q * (g0.powf(q - 1.0) * gpp + (q - 1.0) * g0.powf(q - 2.0) * gp * gp);
    let r_ss = n2 / d0 - 2.0 * n1 * d1 / (d0 * d0) - n0 * d2 / (d0 * d0) + 2.0 * n0 * d1 * d1 / (d0 * d0 * d0);
    let f_of_b = 0.5 * n2 - p * g2t;
    Ok(SecondVariation {
        f_of_b,
        r_ss,
        potential: g0,
    })
}

/// Central-difference `R_ss(0)` with step `s`.
pub fn second_variation_fd(profile: &RadialProfile, params: &ProblemParams, s: f64) -> Result<f64> {
    let plus = rayleigh_along_dilation(profile, params, s)?;
    let zero = rayleigh_along_dilation(profile, params, 0.0)?;
    let minus = rayleigh_along_dilation(profile, params, -s)?;
    Ok((plus - 2.0 * zero + minus) / (s * s))
}

/// `int_0^c (t(pi/2)^2 - p t^2) h(t) dt`.
pub fn divergence_integral_check(params: &ProblemParams, c: f64) -> Result<f64> {
    let (lambda, p) = (params.lambda, params.p);
    let t_max = params.t_max();
    if !t_max.is_finite() {
        return Err(Error::Domain("needs lambda > 0 so that t(pi/2) is finite".into()));
    }
    if !(c > 0.0 && c < t_max) {
        return Err(Error::Domain(format!("c = {c} outside (0, t(pi/2) = {t_max})")));
    }
    let rc = transform::r_of_t(c, lambda);
    let density = |r: f64| {
        let t = transform::t_of_r(r, lambda);
        (t_max * t_max - p * t * t) * r.cos().powf(1.0 - p) * transform::psi(r, lambda).powf(p + 1.0)
    };
    Ok(integrate(density, 0.0, rc))
}

/// First `c` on the grid `t(pi/2) - (t(pi/2)/2) 10^{-k/10}`, `k = 0..=150`,
/// where the divergence integral is at most `-1`.
pub fn divergence_threshold(params: &ProblemParams) -> Result<Option<(f64, f64)>> {
    let t_max = params.t_max();
    for k in 0..=150 {
        let c = t_max - 0.5 * t_max * 10f64.powf(-(k as f64) / 10.0);
        if c >= t_max || c <= 0.5 * t_max && k > 0 {
            break;
        }
        let c = if k == 0 { 0.5 * t_max * (1.0 + 1e-12) } else { c };
        let v = divergence_integral_check(params, c)?;
        if v <= -1.0 {
            return Ok(Some((c, v)));
        }
    }
    Ok(None)
}
