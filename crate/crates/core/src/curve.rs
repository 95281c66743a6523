//! Polar parametrization of the level curves `H = h`.
//!
//! On the curve, `r(θ)² (1 - h sin 2θ) = h`, so the curve is a star-shaped
//! closed loop around the origin for every `h` in `(0, 1)`.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // shadowed by inherent f64 methods whenever std is linked
use num_traits::Float;

use crate::{Error, Result};

/// Curves reaching farther than this are rejected.
pub const MAX_RADIUS: f64 = 50.0;
pub const DEFAULT_GRID: usize = 1024;
/// Working interval for all `h` sweeps.
pub const H_MIN: f64 = 0.01;
pub const H_MAX: f64 = 0.99;

pub(crate) fn check_level(h: f64) -> Result<()> {
    if h > 0.0 && h < 1.0 {
        Ok(())
    } else {
        Err(Error::LevelOutOfRange { h })
    }
}

/// `r(θ) = sqrt(h / (1 - h sin 2θ))`.
pub fn radius(h: f64, theta: f64) -> Result<f64> {
    check_level(h)?;
    Ok((h / (1.0 - h * (2.0 * theta).sin())).sqrt())
}

/// Largest radius on the curve, attained at `θ = π/4`.
pub fn max_radius(h: f64) -> Result<f64> {
    check_level(h)?;
    Ok((h / (1.0 - h)).sqrt())
}

/// A point of the level curve with its `θ`-derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub x: f64,
    pub y: f64,
    pub dx: f64,
    pub dy: f64,
    pub r: f64,
}

/// Position and exact `θ`-derivative at angle `theta`; `h` must be in `(0, 1)`.
#[inline]
pub fn curve_point(h: f64, theta: f64) -> CurvePoint {
    let (s, c) = theta.sin_cos();
    let (s2, c2) = (2.0 * s * c, c * c - s * s);
    let denom = 1.0 - h * s2;
    let r = (h / denom).sqrt();
    let dr = r * h * c2 / denom;
    CurvePoint {
        x: r * c,
        y: r * s,
        dx: dr * c - r * s,
        dy: dr * s + r * c,
        r,
    }
}

/// Uniform-`θ` discretization of a level curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSample {
    pub h: f64,
    pub thetas: Vec<f64>,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub dx_dtheta: Vec<f64>,
    pub dy_dtheta: Vec<f64>,
    pub max_radius: f64,
}

impl CurveSample {
    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }
}

/// Samples the curve `H = h` at `grid_size` uniform angles in `[0, 2π)`.
pub fn sample_curve(h: f64, grid_size: usize) -> Result<CurveSample> {
    let rmax = max_radius(h)?;
    if rmax > MAX_RADIUS {
        return Err(Error::CurveTooLarge { h, radius: rmax });
    }
    if grid_size < 2 || !grid_size.is_power_of_two() {
        return Err(Error::InvalidArgument("grid size must be a power of two"));
    }
    let mut out = CurveSample {
        h,
        thetas: Vec::with_capacity(grid_size),
        xs: Vec::with_capacity(grid_size),
        ys: Vec::with_capacity(grid_size),
        dx_dtheta: Vec::with_capacity(grid_size),
        dy_dtheta: Vec::with_capacity(grid_size),
        max_radius: rmax,
    };
    let step = 2.0 * PI / grid_size as f64;
    for m in 0..grid_size {
        let theta = m as f64 * step;
        let p = curve_point(h, theta);
        out.thetas.push(theta);
        out.xs.push(p.x);
        out.ys.push(p.y);
        out.dx_dtheta.push(p.dx);
        out.dy_dtheta.push(p.dy);
    }
    Ok(out)
}
