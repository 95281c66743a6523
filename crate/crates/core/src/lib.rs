//! Numerical core for the Abelian integral of the perturbed cubic
//! isochronous system
//!
//! ```text
//! x' = -y + x^3 - x y^2 + eps f(x, y)
//! y' =  x + x^2 y - y^3 + eps g(x, y)
//! ```
//!
//! The unperturbed field has the first integral `H = (x^2 + y^2) / (1 + 2xy)`
//! with integrating factor `mu = 2 (1 + 2xy)^-2`, and its period annulus is the
//! family of level curves `H = h`, `h` in `(0, 1)`. This crate evaluates
//!
//! ```text
//! I(h) = ∮_{H=h} mu g dx - mu f dy
//! ```
//!
//! along two independent routes (direct line quadrature and a Green's-formula
//! reduction onto special integrals), counts its zeros against the bound
//! `4 floor((n+1)/2) + 1`, and simulates the perturbed flow to locate actual
//! limit cycles through a Poincaré return map.
//!
//! The crate is `no_std` and needs only `alloc`. File formats, the command
//! line, and parallel sweeps live in the `cyclescope` crate.

#![no_std]

extern crate alloc;

pub mod abelian;
pub mod curve;
mod error;
pub mod flow;
pub mod numerics;
pub mod poly;
pub mod reduction;
pub mod system;

pub use error::{Error, Result};
pub use poly::BivariatePoly;
pub use system::{GreenCoefficients, PerturbationSpec};
