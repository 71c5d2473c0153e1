//! Sampled radial profiles and the exact solution family.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fd;
use crate::grid::{self, GridSpec};
use crate::params::ProblemParams;
use crate::transform::{self, h_unchecked};

/// Coordinate a profile is sampled in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoordinateKind {
    T,
    R,
    Tau,
}

/// A function sampled on a strictly increasing grid, with derivative samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub derivative: Vec<f64>,
    pub coordinate: CoordinateKind,
}

impl RadialProfile {
    pub fn new(
        grid: Vec<f64>,
        values: Vec<f64>,
        derivative: Vec<f64>,
        coordinate: CoordinateKind,
    ) -> Result<Self> {
        if grid.len() < 2 {
            return Err(Error::InvalidProfile("fewer than two nodes".into()));
        }
        if values.len() != grid.len() || derivative.len() != grid.len() {
            return Err(Error::InvalidProfile(format!(
                "length mismatch: grid {}, values {}, derivative {}",
                grid.len(),
                values.len(),
                derivative.len()
            )));
        }
        if !grid.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::InvalidProfile("grid is not strictly increasing".into()));
        }
        Ok(Self {
            grid,
            values,
            derivative,
            coordinate,
        })
    }

    /// Build from values only; derivatives come from five-point differences.
    pub fn from_values(grid: Vec<f64>, values: Vec<f64>, coordinate: CoordinateKind) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidProfile("length mismatch".into()));
        }
        let derivative = fd::differentiate(&grid, &values, 1, 5);
        Self::new(grid, values, derivative, coordinate)
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn lo(&self) -> f64 {
        self.grid[0]
    }

    pub fn hi(&self) -> f64 {
        self.grid[self.grid.len() - 1]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_uniform(&self) -> bool {
        grid::is_uniform(&self.grid)
    }

    pub fn require_coordinate(&self, expected: CoordinateKind) -> Result<()> {
        if self.coordinate != expected {
            return Err(Error::CoordinateMismatch {
                expected,
                found: self.coordinate,
            });
        }
        Ok(())
    }

    /// Multiply values and derivatives by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
            derivative: self.derivative.iter().map(|v| c * v).collect(),
            coordinate: self.coordinate,
        }
    }

    /// `t -> w(-t)`. The grid is mirrored, so a symmetric grid maps onto itself.
    pub fn reflected(&self) -> Self {
        let grid: Vec<f64> = self.grid.iter().rev().map(|t| -t).collect();
        Self {
            grid,
            values: self.values.iter().rev().copied().collect(),
            derivative: self.derivative.iter().rev().map(|d| -d).collect(),
            coordinate: self.coordinate,
        }
    }

    /// `sup |w(t) - w(-t)| / sup |w|`; requires a symmetric grid.
    pub fn asymmetry(&self) -> Result<f64> {
        if !grid::is_symmetric(&self.grid) {
            return Err(Error::InvalidProfile("grid is not symmetric about 0".into()));
        }
        let n = self.len();
        let diff = (0..n).fold(0.0f64, |m, i| m.max((self.values[i] - self.values[n - 1 - i]).abs()));
        Ok(diff / self.max_abs().max(f64::MIN_POSITIVE))
    }

    /// Cubic Hermite interpolation of the value at `x`.
    pub fn value_at(&self, x: f64) -> Result<f64> {
        self.hermite(x).map(|(v, _)| v)
    }

    /// Cubic Hermite interpolation of `(value, derivative)` at `x`.
    pub fn hermite(&self, x: f64) -> Result<(f64, f64)> {
        if !(x >= self.lo() && x <= self.hi()) {
            return Err(Error::OutOfGrid {
                t: x,
                lo: self.lo(),
                hi: self.hi(),
            });
        }
        let i = match self.grid.partition_point(|&g| g <= x) {
            0 => 0,
            k if k >= self.len() => self.len() - 2,
            k => k - 1,
        };
        Ok(hermite_eval(
            self.grid[i],
            self.grid[i + 1],
            self.values[i],
            self.values[i + 1],
            self.derivative[i],
            self.derivative[i + 1],
            x,
        ))
    }

    /// Sup-norm distance to `other` after resampling `other` on this grid.
    pub fn sup_distance(&self, other: &RadialProfile) -> Result<f64> {
        if self.grid == other.grid {
            return Ok(self
                .values
                .iter()
                .zip(&other.values)
                .fold(0.0, |m, (a, b)| m.max((a - b).abs())));
        }
        let mut m = 0.0f64;
        for (x, v) in self.grid.iter().zip(&self.values) {
            let x = x.clamp(other.lo(), other.hi());
            m = m.max((v - other.value_at(x)?).abs());
        }
        Ok(m)
    }

    /// Resample on another grid by Hermite interpolation.
    pub fn resampled(&self, grid: &[f64]) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len());
        let mut derivative = Vec::with_capacity(grid.len());
        for &x in grid {
            let (v, d) = self.hermite(x)?;
            values.push(v);
            derivative.push(d);
        }
        Self::new(grid.to_vec(), values, derivative, self.coordinate)
    }
}

pub(crate) fn hermite_eval(x0: f64, x1: f64, f0: f64, f1: f64, d0: f64, d1: f64, x: f64) -> (f64, f64) {
    let h = x1 - x0;
    let s = (x - x0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    let v = h00 * f0 + h10 * h * d0 + h01 * f1 + h11 * h * d1;
    let dh00 = (6.0 * s2 - 6.0 * s) / h;
    let dh10 = 3.0 * s2 - 4.0 * s + 1.0;
    let dh01 = (-6.0 * s2 + 6.0 * s) / h;
    let dh11 = 3.0 * s2 - 2.0 * s;
    let d = dh00 * f0 + dh10 * d0 + dh01 * f1 + dh11 * d1;
    (v, d)
}

/// `|w|^{p-1} w`
#[inline]
pub(crate) fn signed_pow(w: f64, p: f64) -> f64 {
    w.abs().powf(p - 1.0) * w
}

fn relative_residual(grid: &[f64], values: &[f64], second: &[f64], params: &ProblemParams) -> f64 {
    let (lambda, p) = (params.lambda, params.p);
    let n = grid.len();
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for i in 1..n - 1 {
        let forcing = h_unchecked(grid[i], lambda, p) * signed_pow(values[i], p);
        worst = worst.max((second[i] + forcing).abs());
        scale = scale.max(forcing.abs()).max(second[i].abs());
    }
    if scale == 0.0 {
        0.0
    } else {
        worst / scale
    }
}

/// Residual of the scheme's own three-point equation
/// `D^2 w + h |w|^{p-1} w = 0`, relative to the size of the terms.
pub fn discrete_residual(profile: &RadialProfile, params: &ProblemParams) -> Result<f64> {
    profile.require_coordinate(CoordinateKind::T)?;
    let g = &profile.grid;
    let w = &profile.values;
    let mut second = vec![0.0; g.len()];
    for i in 1..g.len() - 1 {
        let hp = g[i + 1] - g[i];
        let hm = g[i] - g[i - 1];
        second[i] = 2.0 * ((w[i + 1] - w[i]) / hp - (w[i] - w[i - 1]) / hm) / (hp + hm);
    }
    Ok(relative_residual(g, w, &second, params))
}

/// Residual of `w_tt + h |w|^{p-1} w = 0` measured with five-point
/// (fourth order on smooth grids) second differences of the values.
pub fn ode_residual(profile: &RadialProfile, params: &ProblemParams) -> Result<f64> {
    profile.require_coordinate(CoordinateKind::T)?;
    let second = fd::differentiate(&profile.grid, &profile.values, 2, 5);
    Ok(relative_residual(&profile.grid, &profile.values, &second, params))
}

/// Residual of `w_tt + h |w|^{p-1} w = 0` using the derivative samples: the
/// first derivative of `w_t` by five-point differences. Second order in the
/// spacing but insensitive to round-off in the values.
pub fn ode_residual_from_derivative(profile: &RadialProfile, params: &ProblemParams) -> Result<f64> {
    profile.require_coordinate(CoordinateKind::T)?;
    let second = fd::differentiate(&profile.grid, &profile.derivative, 1, 5);
    Ok(relative_residual(&profile.grid, &profile.values, &second, params))
}

/// Residual of the integrated equation `w_t(t_{i+1}) - w_t(t_i) = -int h |w|^{p-1} w`
/// on every grid interval, with the integral taken by five-point
/// Gauss-Legendre over the Hermite interpolant. Each interval mismatch is
/// divided by the interval length and reported relative to `max |h w^p|`.
/// Suited to profiles carrying accurate derivative samples (shooting output).
pub fn integral_residual(profile: &RadialProfile, params: &ProblemParams) -> Result<f64> {
    profile.require_coordinate(CoordinateKind::T)?;
    const NODES: [f64; 5] = [
        -0.906_179_845_938_664,
        -0.538_469_310_105_683,
        0.0,
        0.538_469_310_105_683,
        0.906_179_845_938_664,
    ];
    const WEIGHTS: [f64; 5] = [
        0.236_926_885_056_189_1,
        0.478_628_670_499_366_5,
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
    ];
    let (lambda, p) = (params.lambda, params.p);
    let (g, w, d) = (&profile.grid, &profile.values, &profile.derivative);
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for i in 0..g.len() - 1 {
        let (x0, x1) = (g[i], g[i + 1]);
        let half = 0.5 * (x1 - x0);
        let mid = 0.5 * (x0 + x1);
        let mut integral = 0.0;
        for (s, wt) in NODES.iter().zip(WEIGHTS) {
            let x = mid + half * s;
            let (v, _) = hermite_eval(x0, x1, w[i], w[i + 1], d[i], d[i + 1], x);
            let forcing = h_unchecked(x, lambda, p) * signed_pow(v, p);
            scale = scale.max(forcing.abs());
            integral += wt * forcing;
        }
        integral *= half;
        worst = worst.max((d[i + 1] - d[i] + integral).abs() / (x1 - x0));
    }
    Ok(if scale == 0.0 { 0.0 } else { worst / scale })
}

/// The exact solution `lambda^{1/(p-1)} cos r(t) / psi(r(t))` on the default
/// uniform grid over `[-b, b]`.
pub fn exact_solution(params: &ProblemParams) -> Result<RadialProfile> {
    let grid = GridSpec::uniform(grid::DEFAULT_NODES).build(params)?;
    exact_solution_on(params, &grid)
}

/// The exact solution sampled on `grid` (a t-grid).
pub fn exact_solution_on(params: &ProblemParams, grid: &[f64]) -> Result<RadialProfile> {
    let lambda = params.lambda;
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::Domain(format!("exact solution needs 0 < lambda <= 1, got {lambda}")));
    }
    let c = params.constant_height();
    let mut values = Vec::with_capacity(grid.len());
    let mut derivative = Vec::with_capacity(grid.len());
    for &t in grid {
        let r = transform::r_of_t(t, lambda);
        let s = transform::psi(r, lambda);
        values.push(c * r.cos() / s);
        derivative.push(-c * (r.sin() * s + r.cos() * transform::psi_r(r, lambda)));
    }
    RadialProfile::new(grid.to_vec(), values, derivative, CoordinateKind::T)
}

/// `u(r) = w(t(r)) phi(r)`, sampled at `r_i = r(t_i)`.
pub fn u_from_w(profile: &RadialProfile, params: &ProblemParams) -> Result<RadialProfile> {
    profile.require_coordinate(CoordinateKind::T)?;
    let lambda = params.lambda;
    let mut grid = Vec::with_capacity(profile.len());
    let mut values = Vec::with_capacity(profile.len());
    let mut derivative = Vec::with_capacity(profile.len());
    for i in 0..profile.len() {
        let r = transform::r_of_t(profile.grid[i], lambda);
        let phi = transform::phi_weight(r, lambda);
        let phi_r = transform::phi_weight_r(r, lambda);
        let w = profile.values[i];
        let w_t = profile.derivative[i];
        grid.push(r);
        values.push(w * phi);
        derivative.push(w_t * transform::dt_dr(r, lambda) * phi + w * phi_r);
    }
    RadialProfile::new(grid, values, derivative, CoordinateKind::R)
}

/// Inverse of [`u_from_w`]: `w(t) = u(r(t)) / phi(r(t))`.
pub fn w_from_u(profile: &RadialProfile, params: &ProblemParams) -> Result<RadialProfile> {
    profile.require_coordinate(CoordinateKind::R)?;
    let lambda = params.lambda;
    let mut grid = Vec::with_capacity(profile.len());
    let mut values = Vec::with_capacity(profile.len());
    let mut derivative = Vec::with_capacity(profile.len());
    for i in 0..profile.len() {
        let r = profile.grid[i];
        let phi = transform::phi_weight(r, lambda);
        let phi_r = transform::phi_weight_r(r, lambda);
        let u = profile.values[i];
        let u_r = profile.derivative[i];
        let s = transform::psi(r, lambda);
        grid.push(transform::t_of_r(r, lambda));
        values.push(u / phi);
        derivative.push((u_r / phi - u * phi_r / (phi * phi)) * s * s);
    }
    RadialProfile::new(grid, values, derivative, CoordinateKind::T)
}

/// Relative residual of `u_rr - 2 tan(r) u_r - lambda u + |u|^{p-1} u = 0`
/// using the derivative samples and five-point differences.
pub fn u_residual(profile: &RadialProfile, params: &ProblemParams) -> Result<f64> {
    profile.require_coordinate(CoordinateKind::R)?;
    let second = fd::differentiate(&profile.grid, &profile.derivative, 1, 5);
    let n = profile.len();
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for i in 1..n - 1 {
        let r = profile.grid[i];
        let u = profile.values[i];
        let drift = 2.0 * r.tan() * profile.derivative[i];
        let linear = params.lambda * u;
        let power = signed_pow(u, params.p);
        worst = worst.max((second[i] - drift - linear + power).abs());
        scale = scale
            .max(second[i].abs())
            .max(drift.abs())
            .max(linear.abs())
            .max(power.abs());
    }
    Ok(if scale == 0.0 { 0.0 } else { worst / scale })
}
