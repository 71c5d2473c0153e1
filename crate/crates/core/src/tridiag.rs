//! Symmetric tridiagonal matrices: solves, Sturm counts, bisection and
//! inverse iteration.

/// `diag[i]` on the diagonal, `off[i]` at `(i, i+1)` and `(i+1, i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiag {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len().max(1));
        Self { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut y: Vec<f64> = (0..n).map(|i| self.diag[i] * x[i]).collect();
        for i in 0..n.saturating_sub(1) {
            y[i] += self.off[i] * x[i + 1];
            y[i + 1] += self.off[i] * x[i];
        }
        y
    }

    /// `x^T A x`
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.mul(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// Solve `(A - shift I) x = rhs` by Gaussian elimination without pivoting;
    /// tiny pivots are nudged so that inverse iteration at an eigenvalue works.
    pub fn solve_shifted(&self, shift: f64, rhs: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let tiny = f64::EPSILON * self.scale();
        let mut piv = self.diag[0] - shift;
        if piv.abs() < tiny {
            piv = tiny;
        }
        if n > 1 {
            c[0] = self.off[0] / piv;
        }
        d[0] = rhs[0] / piv;
        for i in 1..n {
            piv = self.diag[i] - shift - self.off[i - 1] * c[i - 1];
            if piv.abs() < tiny {
                piv = tiny;
            }
            if i < n - 1 {
                c[i] = self.off[i] / piv;
            }
            d[i] = (rhs[i] - self.off[i - 1] * d[i - 1]) / piv;
        }
        let mut x = d;
        for i in (0..n - 1).rev() {
            x[i] -= c[i] * x[i + 1];
        }
        x
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        self.solve_shifted(0.0, rhs)
    }

    fn scale(&self) -> f64 {
        let d = self.diag.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let o = self.off.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        (d + 2.0 * o).max(f64::MIN_POSITIVE)
    }

    /// Gershgorin interval containing the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 } + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence via the
    /// LDL^T pivots of `A - x I`).
    pub fn count_below(&self, x: f64) -> usize {
        let tiny = f64::MIN_POSITIVE.sqrt() * self.scale();
        let mut count = 0;
        let mut q = self.diag[0] - x;
        for i in 0..self.len() {
            if i > 0 {
                q = self.diag[i] - x - self.off[i - 1] * self.off[i - 1] / q;
            }
            if q == 0.0 {
                q = -tiny;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection to `tol`.
    pub fn eigenvalue(&self, k: usize, tol: f64) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        while hi - lo > tol.max(4.0 * f64::EPSILON * lo.abs().max(hi.abs())) {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Unit eigenvector for a converged eigenvalue by inverse iteration.
    pub fn eigenvector(&self, mu: f64) -> Vec<f64> {
        self.eigenvector_orthogonal(mu, &[])
    }

    /// Inverse iteration kept orthogonal to `against` (unit vectors of a
    /// numerically degenerate cluster).
    pub fn eigenvector_orthogonal(&self, mu: f64, against: &[Vec<f64>]) -> Vec<f64> {
        let n = self.len();
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * (0.7 * i as f64 + 0.3).sin()).collect();
        project_out(&mut v, against);
        normalize(&mut v);
        for _ in 0..6 {
            let mut next = self.solve_shifted(mu, &v);
            normalize(&mut next);
            project_out(&mut next, against);
            normalize(&mut next);
            let same: f64 = next.iter().zip(&v).map(|(a, b)| a * b).sum();
            v = next;
            if (same.abs() - 1.0).abs() < 1e-14 {
                break;
            }
        }
        v
    }
}

fn project_out(v: &mut [f64], against: &[Vec<f64>]) {
    for u in against {
        let d: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
        v.iter_mut().zip(u).for_each(|(a, b)| *a -= d * b);
    }
}

pub fn normalize(v: &mut [f64]) {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
}
