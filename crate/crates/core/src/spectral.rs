//! Dirichlet spectrum of the linearization
//!
//! ```text
//! Phi_tt + p h(t) |w|^{p-1} Phi + mu Phi = 0  on (-b, b),  Phi(+-b) = 0
//! ```
//!
//! around a solution `w`. Eigenvalues come from a piecewise-linear
//! discretization (Sturm-sequence bisection on the symmetrized pencil,
//! Richardson-extrapolated against the grid with every interval halved) and are
//! confirmed one by one by shooting with oscillation counting.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::energy::EnergySolution;
use crate::error::{Error, Result};
use crate::grid::{self, GridSpec};
use crate::ode::{self, Control, Tolerances};
use crate::params::ProblemParams;
use crate::profile::{CoordinateKind, RadialProfile};
use crate::shooting::{find_even_solutions, EvenSearch};
use crate::transform::{self, h_unchecked};
use crate::tridiag::SymTridiag;

/// `-Phi'' - V Phi = mu rho Phi` with Dirichlet ends on a node set.
pub struct Pencil<'a> {
    pub potential: &'a (dyn Fn(f64) -> f64 + Sync),
    pub density: &'a (dyn Fn(f64) -> f64 + Sync),
}

impl Pencil<'_> {
    /// Symmetrized matrix `M^{-1/2} (K - M V) M^{-1/2}` with lumped `M = diag(m rho)`.
    pub fn matrix(&self, nodes: &[f64]) -> (SymTridiag, Vec<f64>) {
        let n = nodes.len();
        let m = grid::lumped_weights(nodes);
        let inv: Vec<f64> = nodes.windows(2).map(|w| 1.0 / (w[1] - w[0])).collect();
        let mass: Vec<f64> = (1..n - 1).map(|i| m[i] * (self.density)(nodes[i])).collect();
        let diag: Vec<f64> = (1..n - 1)
            .map(|i| (inv[i - 1] + inv[i] - m[i] * (self.potential)(nodes[i])) / mass[i - 1])
            .collect();
        let off: Vec<f64> = (1..n - 2).map(|i| -inv[i] / (mass[i - 1] * mass[i]).sqrt()).collect();
        (SymTridiag::new(diag, off), mass)
    }
}

/// Result of the eigen-solve around a solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    /// `mu_1 < mu_2 < ...` (extrapolated matrix values).
    pub eigenvalues: Vec<f64>,
    /// Interior sign changes of the discrete eigenfunctions.
    pub zero_counts: Vec<usize>,
    pub morse_index: usize,
    /// Shooting confirmations of each eigenvalue.
    pub shooting_eigenvalues: Vec<f64>,
    /// Largest `|matrix - shooting| / max(1, |mu|)`.
    pub max_disagreement: f64,
}

/// Eigen-solver settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralOptions {
    /// Bisection tolerance on the matrix eigenvalues.
    pub eigen_tol: f64,
    /// Required matrix/shooting agreement, relative to `max(1, |mu|)`.
    pub agreement_tol: f64,
    pub shoot_tolerances: Tolerances,
    /// Skip the shooting confirmation.
    pub matrix_only: bool,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self {
            eigen_tol: 1e-12,
            agreement_tol: 1e-6,
            shoot_tolerances: Tolerances {
                rtol: 1e-12,
                atol: 1e-14,
                ..Tolerances::default()
            },
            matrix_only: false,
        }
    }
}

/// Sign changes, ignoring entries below `1e-12` of the largest magnitude.
pub fn count_sign_changes(v: &[f64]) -> usize {
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut last = 0.0;
    let mut count = 0;
    for &x in v {
        if x.abs() <= 1e-12 * scale {
            continue;
        }
        if last != 0.0 && (x > 0.0) != (last > 0.0) {
            count += 1;
        }
        last = x;
    }
    count
}

/// First `k` eigenvalues by Richardson extrapolation over `nodes` and its
/// midpoint refinement, and the eigenvectors on `nodes`.
pub fn pencil_eigenvalues(pencil: &Pencil, nodes: &[f64], k: usize, tol: f64) -> (Vec<f64>, Vec<Vec<f64>>, SymTridiag) {
    let (coarse, _) = pencil.matrix(nodes);
    let fine_nodes = grid::refine(nodes);
    let (fine, _) = pencil.matrix(&fine_nodes);
    let k = k.min(coarse.len());
    let mut values = Vec::with_capacity(k);
    let mut vectors = Vec::with_capacity(k);
    let mut cluster: Vec<Vec<f64>> = Vec::new();
    let mut last = f64::NAN;
    for j in 0..k {
        let mc = coarse.eigenvalue(j, tol);
        let mf = fine.eigenvalue(j, tol);
        values.push((4.0 * mf - mc) / 3.0);
        if !((mc - last).abs() <= 1e-8 * mc.abs().max(1.0)) {
            cluster.clear();
        }
        let v = coarse.eigenvector_orthogonal(mc, &cluster);
        cluster.push(v.clone());
        vectors.push(v);
        last = mc;
    }
    (values, vectors, coarse)
}

/// Shooting eigenvalue by the Prüfer angle: with `Phi = rho sin(theta)`,
/// `Phi' = rho cos(theta)` and `theta(lo) = 0`, the `index`-th (0-based)
/// eigenvalue is where `theta(hi; mu) = (index + 1) pi`. The angle is monotone in
/// `mu` and counts the oscillations; it stays bounded where `Phi` itself would
/// overflow.
pub fn shoot_eigenvalue(
    pencil: &Pencil,
    lo: f64,
    hi: f64,
    index: usize,
    guess: f64,
    tol: &Tolerances,
) -> Result<f64> {
    let target = (index + 1) as f64 * PI;
    let g = |mu: f64| -> Result<f64> { Ok(pruefer_angle(pencil, lo, hi, mu, tol)? - target) };
    let mut width = 1e-6 * guess.abs().max(1.0);
    let (mut a, mut b) = (guess - width, guess + width);
    let (mut fa, mut fb) = (g(a)?, g(b)?);
    for _ in 0..80 {
        if fa <= 0.0 && fb >= 0.0 {
            break;
        }
        width *= 2.0;
        if fa > 0.0 {
            a = guess - width;
            fa = g(a)?;
        }
        if fb < 0.0 {
            b = guess + width;
            fb = g(b)?;
        }
    }
    if !(fa <= 0.0 && fb >= 0.0) {
        return Err(Error::Domain(format!("no bracket for eigenvalue {} near {guess}", index + 1)));
    }
    while b - a > 1e-13 * a.abs().max(b.abs()).max(1.0) {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if g(mid)? < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// `theta(hi)` for `theta' = cos^2 theta + (V + mu rho) sin^2 theta`, `theta(lo) = 0`.
pub fn pruefer_angle(pencil: &Pencil, lo: f64, hi: f64, mu: f64, tol: &Tolerances) -> Result<f64> {
    let rhs = |t: f64, y: &[f64; 1]| {
        let (s, c) = y[0].sin_cos();
        [c * c + ((pencil.potential)(t) + mu * (pencil.density)(t)) * s * s]
    };
    Ok(ode::integrate(rhs, lo, [0.0], hi, tol, |_| Control::Continue)?.y[0])
}

fn potential_of<'a>(profile: &'a RadialProfile, params: &ProblemParams) -> impl Fn(f64) -> f64 + Sync + 'a {
    let (lambda, p) = (params.lambda, params.p);
    move |t: f64| {
        let w = profile.value_at(t.clamp(profile.lo(), profile.hi())).unwrap_or(0.0);
        if w == 0.0 {
            0.0
        } else {
            p * h_unchecked(t, lambda, p) * w.abs().powf(p - 1.0)
        }
    }
}

/// First `k` eigenvalues of the linearization around `solution`, with zero
/// counts, Morse index and shooting confirmation.
pub fn linearized_spectrum(
    solution: &EnergySolution,
    params: &ProblemParams,
    k: usize,
    options: &SpectralOptions,
) -> Result<SpectralReport> {
    let profile = &solution.profile;
    profile.require_coordinate(CoordinateKind::T)?;
    if k < 2 {
        return Err(Error::Domain(format!("request at least two eigenvalues, got {k}")));
    }
    let potential = potential_of(profile, params);
    let one = |_: f64| 1.0;
    let pencil = Pencil {
        potential: &potential,
        density: &one,
    };
    let (eigenvalues, vectors, coarse) = pencil_eigenvalues(&pencil, &profile.grid, k, options.eigen_tol);
    let zero_counts: Vec<usize> = vectors.iter().map(|v| count_sign_changes(v)).collect();
    let morse_index = coarse.count_below(0.0);
    let mut shooting_eigenvalues = Vec::new();
    let mut max_disagreement = 0.0f64;
    if !options.matrix_only {
        for (j, &mu) in eigenvalues.iter().enumerate() {
            let s = shoot_eigenvalue(&pencil, profile.lo(), profile.hi(), j, mu, &options.shoot_tolerances)?;
            let d = (s - mu).abs() / mu.abs().max(1.0);
            if d > options.agreement_tol {
                return Err(Error::DiscretizationDisagreement {
                    index: j + 1,
                    matrix: mu,
                    shooting: s,
                });
            }
            max_disagreement = max_disagreement.max(d);
            shooting_eigenvalues.push(s);
        }
    }
    Ok(SpectralReport {
        eigenvalues,
        zero_counts,
        morse_index,
        shooting_eigenvalues,
        max_disagreement,
    })
}

/// Linearized quadratic form `int Phi_t^2 - V Phi^2` over `int Phi^2` on the
/// solution's grid (piecewise-linear, lumped), for trial functions.
pub fn linearized_form(solution: &EnergySolution, params: &ProblemParams, trial: &[f64]) -> f64 {
    let g = &solution.profile.grid;
    let potential = potential_of(&solution.profile, params);
    let one = |_: f64| 1.0;
    let pencil = Pencil {
        potential: &potential,
        density: &one,
    };
    let (a, mass) = pencil.matrix(g);
    let n = g.len();
    let y: Vec<f64> = (1..n - 1).map(|i| trial[i] * mass[i - 1].sqrt()).collect();
    let yy: f64 = y.iter().map(|v| v * v).sum();
    a.quadratic_form(&y) / yy
}

/// First Dirichlet eigenvalue of the annulus from the transformed linear
/// problem `-W_tt = Lambda psi(r(t))^4 W` on `(-b, b)`; `Lambda = lambda_1 + lambda`.
pub fn numeric_lambda_1(params: &ProblemParams, grid: &GridSpec) -> Result<f64> {
    let lambda = params.lambda;
    let nodes = grid.build(params)?;
    let zero = |_: f64| 0.0;
    let density = move |t: f64| transform::psi(transform::r_of_t(t, lambda), lambda).powi(4);
    let pencil = Pencil {
        potential: &zero,
        density: &density,
    };
    let (values, _, _) = pencil_eigenvalues(&pencil, &nodes, 1, 1e-13);
    Ok(values[0] - lambda)
}

/// Same eigenvalue from the radial Laplacian `-(cos^2 r u_r)_r = L cos^2 r u`
/// on `(-a, a)` in the original variable.
pub fn numeric_lambda_1_radial(a: f64, nodes: usize) -> Result<f64> {
    if !(a > 0.0 && a < FRAC_PI_2) {
        return Err(Error::Domain(format!("a = {a} outside (0, pi/2)")));
    }
    let solve = |n: usize| {
        let x = grid::symmetric_uniform(a, n)?;
        let m = grid::lumped_weights(&x);
        // stiffness with the exact element integral of cos^2
        let k: Vec<f64> = x
            .windows(2)
            .map(|w| {
                let h = w[1] - w[0];
                let int = 0.5 * h + 0.25 * ((2.0 * w[1]).sin() - (2.0 * w[0]).sin());
                int / (h * h)
            })
            .collect();
        let mass: Vec<f64> = (1..n - 1).map(|i| m[i] * x[i].cos().powi(2)).collect();
        let diag: Vec<f64> = (1..n - 1).map(|i| (k[i - 1] + k[i]) / mass[i - 1]).collect();
        let off: Vec<f64> = (1..n - 2).map(|i| -k[i] / (mass[i - 1] * mass[i]).sqrt()).collect();
        Ok::<f64, Error>(SymTridiag::new(diag, off).eigenvalue(0, 1e-14))
    };
    let coarse = solve(nodes)?;
    let fine = solve(2 * (nodes - 1) + 1)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Check of the pointwise bound behind `mu_2 < 0` for even solutions close to
/// the constant solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    /// Root of `sqrt(p lambda (1 - d) - lambda + 1) (pi/2 - d) = pi`.
    pub delta_star: f64,
    pub delta: f64,
    /// `sqrt(p lambda (1 - delta) - lambda + 1)`
    pub omega: f64,
    /// Zero `pi / omega` of the comparison oscillator in `r`.
    pub z1: f64,
    /// `t(z1)`
    pub t_z1: f64,
    /// `lambda (1 - delta/2)`
    pub required: f64,
    /// Minimum of `cos(r)^{1-p} psi^{p-1} w^{p-1}` on `[-t(z1), t(z1)]`.
    pub minimum: f64,
    pub argmin: f64,
    pub holds: bool,
}

fn omega(params: &ProblemParams, d: f64) -> f64 {
    let (lambda, p) = (params.lambda, params.p);
    (p * lambda * (1.0 - d) - lambda + 1.0).max(0.0).sqrt()
}

/// Largest admissible `delta`: the root of `omega(d) (pi/2 - d) = pi` in `(0, 1)`.
pub fn witness_delta_star(params: &ProblemParams) -> Result<f64> {
    let (lambda, p) = (params.lambda, params.p);
    if !(lambda > 0.0 && p > 3.0 / lambda + 1.0) {
        return Err(Error::Regime(format!(
            "comparison needs p > 3/lambda + 1 (lambda = {lambda}, p = {p})"
        )));
    }
    let f = |d: f64| omega(params, d) * (FRAC_PI_2 - d) - PI;
    let mut conv = roots::SimpleConvergency {
        eps: 1e-15,
        max_iter: 200,
    };
    roots::find_root_brent(0.0, 1.0, f, &mut conv).map_err(|e| Error::Domain(format!("delta*: {e:?}")))
}

/// Evaluate the lower bound `cos(r)^{1-p} psi^{p-1} w^{p-1} >= lambda (1 - delta/2)`
/// on `[-t(z1), t(z1)]`. `delta` defaults to half of the largest admissible value.
/// Fails with [`Error::BoundViolated`] at the worst point when the bound does not hold.
pub fn comparison_witness(solution: &EnergySolution, params: &ProblemParams, delta: Option<f64>) -> Result<WitnessReport> {
    let report = comparison_margin(solution, params, delta)?;
    if !report.holds {
        return Err(Error::BoundViolated {
            t: report.argmin,
            margin: report.minimum - report.required,
        });
    }
    Ok(report)
}

/// [`comparison_witness`] without the error on failure.
pub fn comparison_margin(solution: &EnergySolution, params: &ProblemParams, delta: Option<f64>) -> Result<WitnessReport> {
    let (lambda, p) = (params.lambda, params.p);
    if p > 5.0 {
        return Err(Error::Regime(format!("comparison applies for p <= 5, got {p}")));
    }
    let delta_star = witness_delta_star(params)?;
    let delta = delta.unwrap_or(0.5 * delta_star);
    let om = omega(params, delta);
    if !(delta > 0.0 && delta < 1.0 && om * (FRAC_PI_2 - delta) > PI) {
        return Err(Error::Domain(format!("delta = {delta} is not admissible (delta* = {delta_star})")));
    }
    let z1 = PI / om;
    if !(params.a > z1) {
        return Err(Error::Domain(format!("a = {} does not exceed z1 = {z1}", params.a)));
    }
    let t_z1 = transform::t_of_r(z1, lambda);
    let required = lambda * (1.0 - 0.5 * delta);
    let profile = &solution.profile;
    let mut minimum = f64::INFINITY;
    let mut argmin = 0.0;
    let mut probe = |t: f64| -> Result<()> {
        let r = transform::r_of_t(t, lambda);
        let w = profile.value_at(t)?;
        let q = r.cos().powf(1.0 - p) * transform::psi(r, lambda).powf(p - 1.0) * w.max(0.0).powf(p - 1.0);
        if q < minimum {
            minimum = q;
            argmin = t;
        }
        Ok(())
    };
    probe(-t_z1)?;
    probe(t_z1)?;
    for &t in profile.grid.iter().filter(|t| t.abs() <= t_z1) {
        probe(t)?;
    }
    Ok(WitnessReport {
        delta_star,
        delta,
        omega: om,
        z1,
        t_z1,
        required,
        minimum,
        argmin,
        holds: minimum >= required,
    })
}

/// One sample of the threshold scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSample {
    pub epsilon: f64,
    /// `minimum - required`, or the reason the sample could not be evaluated.
    pub margin: std::result::Result<f64, String>,
}

/// Scan of the comparison bound over decreasing `eps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub samples: Vec<ThresholdSample>,
    /// First `eps` of the scan at which the bound holds.
    pub threshold: Option<f64>,
}

/// Walk `epsilons` (largest first) with the even solution closest to the
/// constant height and stop at the first `eps` where the comparison bound holds.
pub fn comparison_threshold(lambda: f64, p: f64, epsilons: &[f64], search: &EvenSearch) -> Result<ThresholdReport> {
    let mut samples = Vec::new();
    for &epsilon in epsilons {
        let params = ProblemParams::with_epsilon(lambda, p, epsilon)?;
        let margin = find_even_solutions(&params, search).and_then(|sols| {
            let c = params.constant_height();
            let near = sols
                .iter()
                .min_by(|x, y| apex_gap(x, c).total_cmp(&apex_gap(y, c)))
                .ok_or(Error::ZeroProfile)?;
            comparison_margin(near, &params, None).map(|r| r.minimum - r.required)
        });
        let holds = matches!(margin, Ok(m) if m >= 0.0);
        samples.push(ThresholdSample {
            epsilon,
            margin: margin.map_err(|e| e.to_string()),
        });
        if holds {
            return Ok(ThresholdReport {
                samples,
                threshold: Some(epsilon),
            });
        }
    }
    Ok(ThresholdReport { samples, threshold: None })
}

fn apex_gap(s: &EnergySolution, c: f64) -> f64 {
    (s.profile.value_at(0.0).unwrap_or(f64::INFINITY) - c).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{Parity, Provenance};

    fn zero_solution(b: f64, n: usize) -> EnergySolution {
        let grid = grid::symmetric_uniform(b, n).unwrap();
        let profile = RadialProfile::new(grid, vec![0.0; n], vec![0.0; n], CoordinateKind::T).unwrap();
        EnergySolution {
            profile,
            rayleigh: f64::NAN,
            parity: Parity::Even,
            provenance: Provenance::ShootingRoot,
        }
    }

    #[test]
    fn dirichlet_laplacian_spectrum() {
        let prm = ProblemParams::with_epsilon(1.0, 3.0, 0.3).unwrap();
        let sol = zero_solution(prm.b, 801);
        let rep = linearized_spectrum(&sol, &prm, 4, &SpectralOptions::default()).unwrap();
        for k in 0..4 {
            let exact = ((k + 1) as f64 * PI / (2.0 * prm.b)).powi(2);
            assert!((rep.eigenvalues[k] - exact).abs() < 1e-8 * exact);
            assert!((rep.shooting_eigenvalues[k] - exact).abs() < 1e-8 * exact);
            assert_eq!(rep.zero_counts[k], k);
        }
        assert_eq!(rep.morse_index, 0);
    }

    #[test]
    fn sign_changes_ignore_tiny_entries() {
        assert_eq!(count_sign_changes(&[1.0, 1e-20, -1e-20, 1.0]), 0);
        assert_eq!(count_sign_changes(&[1.0, -1.0, 2.0]), 2);
    }

    #[test]
    fn lambda_1_from_both_eigenproblems() {
        for eps in [0.01, 0.1, 0.4] {
            let prm = ProblemParams::with_epsilon(0.7, 3.0, eps).unwrap();
            let closed = prm.lambda_1();
            let t_form = numeric_lambda_1(&prm, &GridSpec::uniform(2001)).unwrap();
            let r_form = numeric_lambda_1_radial(prm.a, 2001).unwrap();
            assert!((t_form - closed).abs() < 1e-6, "{t_form} vs {closed}");
            assert!((r_form - closed).abs() < 1e-6, "{r_form} vs {closed}");
        }
    }

    #[test]
    fn delta_star_solves_admissibility() {
        let prm = ProblemParams::with_epsilon(1.0, 4.5, 0.01).unwrap();
        let d = witness_delta_star(&prm).unwrap();
        assert!((omega(&prm, d) * (FRAC_PI_2 - d) - PI).abs() < 1e-12);
        assert!(d > 0.0 && d < 1.0);
        let low = ProblemParams::with_epsilon(1.0, 3.5, 0.01).unwrap();
        assert!(matches!(witness_delta_star(&low), Err(Error::Regime(_))));
    }

    #[test]
    fn comparison_bound_near_constant_solution() {
        let search = EvenSearch::default();
        let prm = ProblemParams::with_epsilon(1.0, 4.5, 1e-4).unwrap();
        let sol = &find_even_solutions(&prm, &search).unwrap()[0];
        let rep = comparison_witness(sol, &prm, None).unwrap();
        assert!(rep.omega * (FRAC_PI_2 - rep.delta) > PI);
        assert!((rep.z1 - PI / rep.omega).abs() < 1e-15);
        assert!(rep.minimum >= rep.required);
        // the bound only sets in for thinner annuli than eps = 0.01
        let wide = ProblemParams::with_epsilon(1.0, 4.5, 0.01).unwrap();
        let sol = &find_even_solutions(&wide, &search).unwrap()[0];
        assert!(matches!(comparison_witness(sol, &wide, None), Err(Error::BoundViolated { .. })));
    }

    #[test]
    fn threshold_scan_stops_where_bound_holds() {
        let eps: Vec<f64> = (2..=14).map(|k| 10f64.powf(-(k as f64) / 2.0)).collect();
        let rep = comparison_threshold(0.9, 4.4, &eps, &EvenSearch::default()).unwrap();
        let t = rep.threshold.unwrap();
        assert!(t < 1e-4 && t > 1e-7, "{t}");
        let last = rep.samples.last().unwrap();
        assert!(matches!(last.margin, Ok(m) if m >= 0.0));
        assert!(rep.samples[..rep.samples.len() - 1].iter().all(|s| !matches!(s.margin, Ok(m) if m >= 0.0)));
    }
}
