//! Exact and asymptotic enumeration of lozenge tilings of hexagons with
//! triangular holes (cores, satellites, shamrocks, triads of bowties).
//!
//! The crate is organised bottom-up:
//!
//! * [`exactalg`]: big integers, rationals, Eisenstein integers, exact
//!   determinants, interpolation, and arbitrary-precision reals.
//! * [`region`]: lattice regions as explicit sets of unit triangles.
//! * [`oracle`]: brute-force perfect-matching counts (ground truth).
//! * [`determinants`]: the lattice-path determinant families.
//! * [`formulas`]: closed-form product formulas and conjectured ratios.
//! * [`asymptotics`]: Barnes G, correlations and convergence diagnostics.
//! * [`verify`]: sweeps, cross-method checks, caching and reports.

pub mod asymptotics;
pub mod determinants;
mod error;
pub mod exactalg;
pub mod formulas;
pub mod oracle;
pub mod region;
pub mod verify;

pub use error::{Error, Result};
