//! Generic numeric kernels: periodic quadrature, trigonometric moments,
//! sign-change root bracketing, Richardson differentiation and linear least
//! squares.

mod lsq;
mod moments;
mod quadrature;
mod richardson;
mod roots;

pub use lsq::{lsq_fit, lsq_fit_with, lsq_solve, LsqFit, DEFAULT_MAX_CONDITION};
pub use moments::{binomial, sin_moment, trig_moment};
pub use quadrature::{
    periodic_trapezoid, periodic_trapezoid_multi, MultiQuadrature, QuadratureResult, MAX_GRID,
    MIN_GRID,
};
pub use richardson::{
    richardson_derivative, richardson_estimate, Derivative, DERIVATIVE_CONSISTENCY,
};
pub use roots::{
    bracket_roots, bracket_samples, refine_bisection, uniform_grid, BracketScan, RootBracket,
    DEAD_BAND,
};
