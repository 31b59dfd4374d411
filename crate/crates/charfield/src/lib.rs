//! Characteristic fields for strictly hyperbolic 2x2 quasilinear systems
//! in Riemann-invariant form.
//!
//! The crate solves Cauchy problems posed on a non-characteristic boundary
//! curve by evaluating conservation-law pairs `(phi, psi)` along the arc:
//! the intersection point of the two characteristics through the arc
//! endpoints comes out of a single line integral, no hodograph Jacobian
//! required. That keeps the construction valid in simple-wave and
//! constant-state regions, where the hodograph transformation degenerates.
//!
//! Six systems ship ready-made: ideal plane plasticity (slip-line fields),
//! soil plasticity under a Coulomb criterion, a hyperbolic heat model,
//! isentropic gas dynamics, an elastic-plastic beam and Born-Infeld plane
//! waves. A classical characteristic-marching scheme is included as an
//! independent cross-check, and Laplace-invariant utilities classify when
//! conservation-law components are hodograph solutions in disguise.
//!
//! The prose guide lives in `book/` and doubles as the doc-test suite; see
//! [`guide`].

pub mod cauchy;
pub mod cli;
pub mod error;
pub mod guide;
pub mod laplace;
pub mod oracle;
pub mod pairs;
pub mod scenarios;
pub mod specfun;
pub mod systems;

pub use error::{Error, Result};
pub use systems::{PhysicalState, RiemannPoint, SystemDescriptor, SystemName};
