//! Symmetric node sets on `[-b, b]`.
//!
//! Near `t(pi/2)` the weight `h` blows up like `(cos r)^{1-p}` and solutions
//! develop boundary layers whose width is comparable to `t(pi/2) - b`. A uniform
//! grid cannot resolve them once `eps` drops below the node spacing, so the
//! default grid is graded: the local spacing follows
//! `min(L, t(pi/2) - |t|)`, which is uniform in the bulk and geometric in the
//! layer.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ProblemParams;

/// Default node count on `[-b, b]`.
pub const DEFAULT_NODES: usize = 4001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    Uniform,
    Graded,
}

/// Grid construction options.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub nodes: usize,
    pub kind: GridKind,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            nodes: DEFAULT_NODES,
            kind: GridKind::Graded,
        }
    }
}

impl GridSpec {
    pub fn uniform(nodes: usize) -> Self {
        Self {
            nodes,
            kind: GridKind::Uniform,
        }
    }

    pub fn graded(nodes: usize) -> Self {
        Self {
            nodes,
            kind: GridKind::Graded,
        }
    }

    /// Same kind with `2(n-1) + 1` nodes, i.e. every interval halved.
    pub fn doubled(self) -> Self {
        Self {
            nodes: 2 * (self.nodes - 1) + 1,
            kind: self.kind,
        }
    }

    pub fn build(&self, params: &ProblemParams) -> Result<Vec<f64>> {
        match self.kind {
            GridKind::Uniform => symmetric_uniform(params.b, self.nodes),
            GridKind::Graded => symmetric_graded(params.b, params.t_max(), self.nodes),
        }
    }
}

fn check_nodes(n: usize) -> Result<()> {
    if n < 5 || n % 2 == 0 {
        return Err(Error::Domain(format!(
            "symmetric grids need an odd node count >= 5, got {n}"
        )));
    }
    Ok(())
}

/// Mirror a half grid `0 = s_0 < ... < s_m = b` onto `[-b, b]`.
fn mirror(half: &[f64]) -> Vec<f64> {
    let mut nodes: Vec<f64> = half.iter().rev().map(|t| -t).collect();
    nodes.extend_from_slice(&half[1..]);
    nodes
}

/// `n` equally spaced nodes on `[-b, b]` (n odd so that 0 is a node).
pub fn symmetric_uniform(b: f64, n: usize) -> Result<Vec<f64>> {
    check_nodes(n)?;
    let m = (n - 1) / 2;
    let half: Vec<f64> = (0..=m).map(|i| b * i as f64 / m as f64).collect();
    Ok(mirror(&half))
}

/// Graded nodes on `[-b, b]`, clustering toward the singular point `t_max`.
pub fn symmetric_graded(b: f64, t_max: f64, n: usize) -> Result<Vec<f64>> {
    check_nodes(n)?;
    if !t_max.is_finite() {
        return symmetric_uniform(b, n);
    }
    let m = (n - 1) / 2;
    let bulk = t_max / 16.0;
    let switch = t_max - bulk;
    if b <= switch {
        return symmetric_uniform(b, n);
    }
    let to_s = |t: f64| {
        if t <= switch {
            t / bulk
        } else {
            switch / bulk + (bulk / (t_max - t)).ln()
        }
    };
    let from_s = |s: f64| {
        let s0 = switch / bulk;
        if s <= s0 {
            s * bulk
        } else {
            t_max - bulk * (-(s - s0)).exp()
        }
    };
    let s_end = to_s(b);
    let mut half: Vec<f64> = (0..=m).map(|i| from_s(s_end * i as f64 / m as f64)).collect();
    half[0] = 0.0;
    half[m] = b;
    Ok(mirror(&half))
}

/// Whether `nodes` is (numerically) equally spaced.
pub fn is_uniform(nodes: &[f64]) -> bool {
    if nodes.len() < 2 {
        return true;
    }
    let h = (nodes[nodes.len() - 1] - nodes[0]) / (nodes.len() - 1) as f64;
    nodes
        .windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-12 * h.abs().max(1e-300) + 4.0 * f64::EPSILON * w[1].abs())
}

/// Whether `nodes[i] == -nodes[n-1-i]` for every `i`.
pub fn is_symmetric(nodes: &[f64]) -> bool {
    let n = nodes.len();
    (0..n).all(|i| nodes[i] == -nodes[n - 1 - i])
}

/// Lumped (trapezoid) weights `m_i = (t_{i+1} - t_{i-1}) / 2`.
pub fn lumped_weights(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut m = vec![0.0; n];
    for i in 0..n - 1 {
        let h = nodes[i + 1] - nodes[i];
        m[i] += 0.5 * h;
        m[i + 1] += 0.5 * h;
    }
    m
}

/// Grid with the midpoint of every interval inserted.
pub fn refine(nodes: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * nodes.len() - 1);
    for w in nodes.windows(2) {
        out.push(w[0]);
        out.push(0.5 * (w[0] + w[1]));
    }
    out.push(nodes[nodes.len() - 1]);
    out
}
