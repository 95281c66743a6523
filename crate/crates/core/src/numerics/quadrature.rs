use core::f64::consts::PI;

use crate::{Error, Result};

/// Smallest accepted starting grid.
pub const MIN_GRID: usize = 16;
/// Grid-size cap for doubling.
pub const MAX_GRID: usize = 1 << 20;

/// Rounding floor, relative to `∫|f|`, below which a change counts as converged.
const ROUNDING_FLOOR: f64 = 64.0 * f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuadratureResult {
    pub value: f64,
    /// `|T(2M) - T(M)|` for the last doubling.
    pub error_estimate: f64,
    pub grid_size: usize,
}

/// Component-wise results of [`periodic_trapezoid_multi`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiQuadrature<const K: usize> {
    pub values: [f64; K],
    pub error_estimates: [f64; K],
    /// Trapezoid approximations of `∫|f_k|`, the rounding scale of each component.
    pub abs_integrals: [f64; K],
    pub grid_size: usize,
}

/// Trapezoid rule for a smooth 2π-periodic integrand over `[0, 2π)`.
///
/// Starts on `grid_size` uniform points and doubles until the change between
/// successive grids is at most `target_tol · max(1, |value|)`, or is already
/// at the rounding floor of the sum. Fails with
/// [`Error::QuadratureNonConvergence`] when [`MAX_GRID`] is reached first.
pub fn periodic_trapezoid<F>(
    mut integrand: F,
    grid_size: usize,
    target_tol: f64,
) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> f64,
{
    let q = periodic_trapezoid_multi(|t| [integrand(t)], grid_size, target_tol)?;
    Ok(QuadratureResult {
        value: q.values[0],
        error_estimate: q.error_estimates[0],
        grid_size: q.grid_size,
    })
}

/// Vector-valued variant of [`periodic_trapezoid`]; all components share one
/// grid and the refinement stops only when every component has converged.
pub fn periodic_trapezoid_multi<const K: usize, F>(
    mut integrand: F,
    grid_size: usize,
    target_tol: f64,
) -> Result<MultiQuadrature<K>>
where
    F: FnMut(f64) -> [f64; K],
{
    if grid_size < MIN_GRID || !grid_size.is_power_of_two() || grid_size > MAX_GRID / 2 {
        return Err(Error::InvalidArgument(
            "grid size must be a power of two in [16, 2^19]",
        ));
    }
    if target_tol.is_nan() || target_tol <= 0.0 {
        return Err(Error::InvalidArgument("target tolerance must be positive"));
    }

    let mut m = grid_size;
    let mut sums = [0.0; K];
    let mut abs_sums = [0.0; K];
    let step = 2.0 * PI / m as f64;
    for idx in 0..m {
        let v = integrand(idx as f64 * step);
        for k in 0..K {
            sums[k] += v[k];
            abs_sums[k] += v[k].abs();
        }
    }
    let mut values = sums.map(|s| s * step);

    loop {
        // Midpoints of the current grid are the odd nodes of the doubled one.
        let h = 2.0 * PI / m as f64;
        let mut mids = [0.0; K];
        for idx in 0..m {
            let v = integrand((idx as f64 + 0.5) * h);
            for k in 0..K {
                mids[k] += v[k];
                abs_sums[k] += v[k].abs();
            }
        }
        m *= 2;
        let mut next = [0.0; K];
        let mut changes = [0.0; K];
        let mut converged = true;
        let mut worst = 0.0f64;
        for k in 0..K {
            next[k] = 0.5 * values[k] + 0.5 * h * mids[k];
            changes[k] = (next[k] - values[k]).abs();
            let abs_int = abs_sums[k] * 2.0 * PI / m as f64;
            let ok = changes[k] <= target_tol * next[k].abs().max(1.0)
                || changes[k] <= ROUNDING_FLOOR * abs_int;
            if !ok {
                converged = false;
                worst = worst.max(changes[k]);
            }
        }
        values = next;
        if converged {
            let scale = 2.0 * PI / m as f64;
            return Ok(MultiQuadrature {
                values,
                error_estimates: changes,
                abs_integrals: abs_sums.map(|s| s * scale),
                grid_size: m,
            });
        }
        if m >= MAX_GRID {
            return Err(Error::QuadratureNonConvergence {
                estimate: worst,
                grid_size: m,
                tolerance: target_tol,
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_integrates_to_two_pi() {
        let q = periodic_trapezoid(|_| 1.0, 16, 1e-14).unwrap();
        assert!((q.value - 2.0 * PI).abs() < 1e-14);
        assert!(q.grid_size.is_power_of_two() && q.grid_size >= MIN_GRID);
        assert!(q.error_estimate >= 0.0);
    }

    #[test]
    fn cos_squared_on_64_points() {
        let q = periodic_trapezoid(|t| t.cos().powi(2), 64, 1e-13).unwrap();
        assert!((q.value - PI).abs() < 1e-12);
    }

    #[test]
    fn odd_harmonic_vanishes() {
        let q = periodic_trapezoid(|t| (2.0 * t).sin(), 16, 1e-14).unwrap();
        assert!(q.value.abs() < 1e-14);
    }

    #[test]
    fn aliased_harmonic_is_caught_by_doubling() {
        // cos(16θ) aliases to 1 on 16 points; the doubled grid exposes it.
        let q = periodic_trapezoid(|t| (16.0 * t).cos(), 16, 1e-12).unwrap();
        assert!(q.value.abs() < 1e-12);
        assert!(q.grid_size >= 64);
    }

    #[test]
    fn trig_polynomials_below_nyquist_are_exact() {
        for deg in 1..8 {
            let f = |t: f64| 1.0 + (deg as f64 * t).cos() + 0.5 * ((deg + 1) as f64 * t).sin();
            let q = periodic_trapezoid(f, 32, 1e-15).unwrap();
            assert!((q.value - 2.0 * PI).abs() <= 1e-13 * 2.0 * PI);
        }
    }

    #[test]
    fn non_convergence_is_reported() {
        // Nearly singular integrand: 1 / (1 - 0.999999999 sin θ).
        let err =
            periodic_trapezoid(|t| 1.0 / (1.0 - 0.999_999_999 * t.sin()), 16, 1e-14).unwrap_err();
        assert!(matches!(err, Error::QuadratureNonConvergence { .. }));
    }

    #[test]
    fn rejects_bad_grid() {
        assert!(periodic_trapezoid(|_| 1.0, 24, 1e-10).is_err());
        assert!(periodic_trapezoid(|_| 1.0, 8, 1e-10).is_err());
    }
}
