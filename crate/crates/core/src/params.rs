//! Problem parameters and the closed-form constants attached to them.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transform;

/// How the half-width of the annulus was specified.
///
/// The domain is `tau in (eps, pi - eps)`, i.e. `r in (-a, a)` with
/// `a = pi/2 - eps`, i.e. `t in (-b, b)` with `b = t(a)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HalfWidth {
    Epsilon(f64),
    A(f64),
    B(f64),
}

/// `(lambda, p)` together with the domain half-width in all three coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    pub lambda: f64,
    pub p: f64,
    pub epsilon: f64,
    pub a: f64,
    pub b: f64,
}

impl ProblemParams {
    pub fn new(lambda: f64, p: f64, width: HalfWidth) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::Domain(format!("exponent p = {p} must exceed 1")));
        }
        if !lambda.is_finite() {
            return Err(Error::Domain(format!("lambda = {lambda} is not finite")));
        }
        let a = match width {
            HalfWidth::Epsilon(eps) => {
                if !(eps > 0.0 && eps < FRAC_PI_2) {
                    return Err(Error::Domain(format!("epsilon = {eps} outside (0, pi/2)")));
                }
                FRAC_PI_2 - eps
            }
            HalfWidth::A(a) => {
                if !(a > 0.0 && a < FRAC_PI_2) {
                    return Err(Error::Domain(format!("a = {a} outside (0, pi/2)")));
                }
                a
            }
            HalfWidth::B(b) => {
                let t_max = transform::t_of_pi_half(lambda);
                if !(b > 0.0 && b < t_max) {
                    return Err(Error::Domain(format!("b = {b} outside (0, t(pi/2) = {t_max})")));
                }
                transform::r_of_t(b, lambda)
            }
        };
        let b = match width {
            HalfWidth::B(b) => b,
            // past the pole of tan(r sqrt(1 - lambda)); only reachable when lambda <= -lambda_1
            _ if a >= transform::r_limit(lambda) => f64::INFINITY,
            _ => transform::t_of_r(a, lambda),
        };
        Ok(Self {
            lambda,
            p,
            epsilon: FRAC_PI_2 - a,
            a,
            b,
        })
    }

    pub fn with_epsilon(lambda: f64, p: f64, epsilon: f64) -> Result<Self> {
        Self::new(lambda, p, HalfWidth::Epsilon(epsilon))
    }

    pub fn with_a(lambda: f64, p: f64, a: f64) -> Result<Self> {
        Self::new(lambda, p, HalfWidth::A(a))
    }

    pub fn lambda_1(&self) -> f64 {
        // a is validated in the constructor
        lambda_1(self.a).unwrap_or(f64::NAN)
    }

    /// `t(pi/2)`, infinite for `lambda <= 0`.
    pub fn t_max(&self) -> f64 {
        transform::t_of_pi_half(self.lambda)
    }

    /// The height `lambda^{1/(p-1)}` of the constant solution `u`.
    pub fn constant_height(&self) -> f64 {
        self.lambda.abs().powf(1.0 / (self.p - 1.0))
    }

    /// Whether the solvers' guarantees apply (`-lambda_1 < lambda <= 1`).
    pub fn is_supported(&self) -> bool {
        self.lambda > -self.lambda_1() && self.lambda <= 1.0
    }

    pub fn require_supported(&self) -> Result<()> {
        if self.is_supported() {
            Ok(())
        } else {
            Err(Error::UnsupportedRegime {
                lambda: self.lambda,
                lambda_1: self.lambda_1(),
            })
        }
    }
}

/// First Dirichlet eigenvalue of `-Laplace` on the symmetric annulus with half-width `a`.
///
/// `a = pi/2` is accepted as the `eps -> 0` limit, where the value is 0.
pub fn lambda_1(a: f64) -> Result<f64> {
    if !(a > 0.0 && a <= FRAC_PI_2) {
        return Err(Error::Domain(format!("a = {a} outside (0, pi/2)")));
    }
    Ok(PI * PI / (4.0 * a * a) - 1.0)
}

/// The exponent threshold `I(lambda)` below which general uniqueness holds
/// for `3/4 < lambda <= 1`.
pub fn i_of_lambda(lambda: f64) -> Result<f64> {
    if !(lambda > 0.75 && lambda <= 1.0) {
        return Err(Error::Domain(format!("lambda = {lambda} outside (3/4, 1]")));
    }
    let x = 1.0 - lambda;
    if x < 1e-4 {
        // numerator and denominator both vanish at lambda = 1; divide the
        // Taylor expansions by x
        let pi2 = PI * PI;
        let pi4 = pi2 * pi2;
        let pi6 = pi4 * pi2;
        let tail = -pi4 * x / 24.0 + pi6 * x * x / 720.0;
        return Ok((6.0 + pi2 / 2.0 + tail) / (pi2 / 2.0 - 2.0 + tail));
    }
    let c = (PI * x.sqrt()).cos();
    Ok((7.0 - 6.0 * lambda - c) / (2.0 * lambda - 1.0 - c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_1_closed_form() {
        assert_eq!(lambda_1(FRAC_PI_2).unwrap(), 0.0);
        assert!((lambda_1(PI / 4.0).unwrap() - 3.0).abs() < 1e-14);
        assert!(lambda_1(0.0).is_err());
        assert!(lambda_1(2.0).is_err());
    }

    #[test]
    fn i_of_lambda_values() {
        // right limit at 3/4
        assert!((i_of_lambda(0.75 + 1e-12).unwrap() - 5.0).abs() < 1e-9);
        let limit = (PI * PI + 12.0) / (PI * PI - 4.0);
        assert!((i_of_lambda(1.0).unwrap() - limit).abs() < 1e-14);
        // 40-digit reference values
        assert!((i_of_lambda(0.9).unwrap() - 4.147065296173916).abs() < 1e-12);
        assert!((i_of_lambda(0.95).unwrap() - 3.924858025796096).abs() < 1e-12);
        assert!((i_of_lambda(0.999).unwrap() - 3.729681525324427).abs() < 1e-11);
        assert!((i_of_lambda(0.99999).unwrap() - 3.725945427064508).abs() < 1e-11);
        assert!(i_of_lambda(0.7).is_err());
        assert!(i_of_lambda(1.1).is_err());
    }

    #[test]
    fn half_width_round_trip() {
        for lambda in [-0.01, 0.0, 0.5, 0.9, 1.0] {
            let from_eps = ProblemParams::with_epsilon(lambda, 3.0, 0.2).unwrap();
            let from_a = ProblemParams::with_a(lambda, 3.0, from_eps.a).unwrap();
            let from_b = ProblemParams::new(lambda, 3.0, HalfWidth::B(from_eps.b)).unwrap();
            assert!((from_a.b - from_eps.b).abs() < 1e-12);
            assert!((from_b.a - from_eps.a).abs() < 1e-12);
            assert!((from_b.epsilon - 0.2).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(ProblemParams::with_epsilon(1.0, 1.0, 0.1).is_err());
        assert!(ProblemParams::with_epsilon(1.0, 3.0, 0.0).is_err());
        assert!(ProblemParams::with_a(1.0, 3.0, 1.6).is_err());
        assert!(ProblemParams::new(0.75, 3.0, HalfWidth::B(2.0)).is_err());
    }

    #[test]
    fn supported_range() {
        let p = ProblemParams::with_epsilon(1.5, 3.0, 0.1).unwrap();
        assert!(!p.is_supported());
        assert!(matches!(p.require_supported(), Err(Error::UnsupportedRegime { .. })));
        let p = ProblemParams::with_epsilon(-0.5, 3.0, 0.01).unwrap();
        assert!(!p.is_supported());
        let p = ProblemParams::with_epsilon(-0.5, 3.0, 0.35).unwrap();
        assert!(p.is_supported());
    }
}
