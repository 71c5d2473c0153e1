//! Positive radial solutions of `-Laplace u + lambda u = u^p` on symmetric
//! geodesic annuli of the three-sphere.
//!
//! After the change of variables in [`transform`] the radial problem becomes
//!
//! ```text
//! w_tt + h(t) |w|^{p-1} w = 0  on (-b, b),   w(-b) = w(b) = 0,
//! ```
//!
//! and the crate offers several independent ways to produce and inspect its
//! solutions: shooting from the centre ([`shooting`]), minimizing the Rayleigh
//! quotient ([`energy`]), the linearized spectrum ([`spectral`]), Pohozaev-type
//! sign checks ([`pohozaev`]) and a driver that classifies and counts solutions
//! over parameter grids ([`explorer`]).
//!
//! ```
//! use annulus::{params::ProblemParams, profile};
//!
//! let prm = ProblemParams::with_epsilon(0.9, 4.5, 0.01)?;
//! let w = profile::exact_solution(&prm)?;
//! assert!(profile::ode_residual(&w, &prm)? < 1e-8);
//! # Ok::<(), annulus::Error>(())
//! ```

pub mod energy;
pub mod error;
pub mod explorer;
pub mod fd;
pub mod grid;
pub mod ode;
pub mod params;
pub mod pohozaev;
pub mod profile;
pub mod shooting;
pub mod spectral;
pub mod transform;
pub mod tridiag;

pub use error::{Error, Result};
pub use params::{HalfWidth, ProblemParams};
pub use profile::{CoordinateKind, RadialProfile};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/transforms.md")]
    mod transforms {}
    #[doc = include_str!("../../../book/src/shooting.md")]
    mod shooting {}
    #[doc = include_str!("../../../book/src/energy.md")]
    mod energy {}
    #[doc = include_str!("../../../book/src/spectrum.md")]
    mod spectrum {}
    #[doc = include_str!("../../../book/src/pohozaev.md")]
    mod pohozaev {}
    #[doc = include_str!("../../../book/src/explorer.md")]
    mod explorer {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
