//! Ground-truth dynamics of the perturbed field: adaptive Dormand–Prince
//! integration, the first-return map on the section `{y = 0, x > 0}`, and
//! limit-cycle detection from sign changes of the displacement.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // shadowed by inherent f64 methods whenever std is linked
use num_traits::Float;

use crate::numerics::{bracket_samples, refine_bisection, uniform_grid};
use crate::system::{first_integral, vector_field, PerturbationSpec};
use crate::{Error, Result};

/// Largest `|eps|` for which zeros of `I` are compared against cycles.
pub const MAX_CYCLE_EPS: f64 = 0.05;
/// Time resolution of the section crossing.
pub const CROSSING_TOL: f64 = 1e-12;
/// Resolution of fixed points in `h`.
pub const FIXED_POINT_TOL: f64 = 1e-8;
const ANNULUS_LO: f64 = 0.001;
const ANNULUS_HI: f64 = 0.999;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunConfig {
    pub eps: f64,
    /// Local error tolerance (absolute and relative).
    pub integ_tol: f64,
    pub max_steps: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            eps: 0.0,
            integ_tol: 1e-10,
            max_steps: 200_000,
        }
    }
}

impl RunConfig {
    pub fn with_eps(eps: f64) -> Self {
        Self {
            eps,
            ..Self::default()
        }
    }
}

type State = [f64; 2];

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

struct Field<'a> {
    spec: &'a PerturbationSpec,
    eps: f64,
}

impl Field<'_> {
    fn eval(&self, s: State) -> State {
        let (a, b) = vector_field(self.spec, self.eps, s[0], s[1]);
        [a, b]
    }

    /// One explicit step; returns the fifth-order state and the embedded error.
    fn step(&self, s: State, dt: f64) -> (State, State) {
        let _ = C;
        let mut k = [[0.0; 2]; 7];
        k[0] = self.eval(s);
        for stage in 1..7 {
            let mut y = s;
            for (j, kj) in k.iter().enumerate().take(stage) {
                let a = A[stage][j];
                if a != 0.0 {
                    y[0] += dt * a * kj[0];
                    y[1] += dt * a * kj[1];
                }
            }
            k[stage] = self.eval(y);
        }
        let mut hi = s;
        let mut err = [0.0; 2];
        for (stage, kj) in k.iter().enumerate() {
            for d in 0..2 {
                hi[d] += dt * B5[stage] * kj[d];
                err[d] += dt * (B5[stage] - B4[stage]) * kj[d];
            }
        }
        (hi, err)
    }
}

fn error_norm(err: State, a: State, b: State, tol: f64) -> f64 {
    (0..2)
        .map(|d| err[d].abs() / (tol * (1.0 + a[d].abs().max(b[d].abs()))))
        .fold(0.0, f64::max)
}

fn check_annulus(s: State) -> Result<f64> {
    let w = 1.0 + 2.0 * s[0] * s[1];
    if w <= 0.0 {
        return Err(Error::AnnulusExit { h: f64::INFINITY });
    }
    let h = first_integral(s[0], s[1])?;
    if h > ANNULUS_LO && h < ANNULUS_HI {
        Ok(h)
    } else {
        Err(Error::AnnulusExit { h })
    }
}

/// Adaptive stepper state shared by [`integrate`] and [`return_map`].
struct Stepper<'a> {
    field: Field<'a>,
    tol: f64,
    dt: f64,
    max_steps: usize,
    steps: usize,
}

impl<'a> Stepper<'a> {
    fn new(spec: &'a PerturbationSpec, cfg: &RunConfig) -> Result<Self> {
        if cfg.integ_tol.is_nan() || cfg.integ_tol <= 0.0 || cfg.max_steps == 0 {
            return Err(Error::InvalidArgument(
                "integrator needs a positive tolerance and step budget",
            ));
        }
        Ok(Self {
            field: Field { spec, eps: cfg.eps },
            tol: cfg.integ_tol,
            dt: 1e-2,
            max_steps: cfg.max_steps,
            steps: 0,
        })
    }

    /// Advances by one accepted step no longer than `limit`.
    fn advance(&mut self, s: State, limit: f64) -> Result<(State, f64)> {
        loop {
            if self.steps >= self.max_steps {
                return Err(Error::StepLimit(self.max_steps));
            }
            self.steps += 1;
            let dt = self.dt.min(limit);
            let (next, err) = self.field.step(s, dt);
            let norm = error_norm(err, s, next, self.tol);
            let factor = if norm == 0.0 {
                5.0
            } else {
                (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0)
            };
            if norm <= 1.0 && next.iter().all(|v| v.is_finite()) {
                if dt == self.dt || factor < 1.0 {
                    self.dt = dt * factor;
                }
                return Ok((next, dt));
            }
            self.dt = dt * factor.min(0.9);
        }
    }
}

/// Integrates the perturbed field from `start` for `duration` time units.
pub fn integrate(
    spec: &PerturbationSpec,
    cfg: &RunConfig,
    start: (f64, f64),
    duration: f64,
) -> Result<(f64, f64)> {
    integrate_trace(spec, cfg, start, duration, |_, _, _| {})
}

/// Like [`integrate`], calling `on_step(t, x, y)` at the start and after every accepted step.
pub fn integrate_trace<F>(
    spec: &PerturbationSpec,
    cfg: &RunConfig,
    start: (f64, f64),
    duration: f64,
    mut on_step: F,
) -> Result<(f64, f64)>
where
    F: FnMut(f64, f64, f64),
{
    let mut s = [start.0, start.1];
    check_annulus(s)?;
    on_step(0.0, s[0], s[1]);
    if duration <= 0.0 {
        return Ok(start);
    }
    let mut stepper = Stepper::new(spec, cfg)?;
    let mut t = 0.0;
    while t < duration {
        let remaining = duration - t;
        let (next, dt) = stepper.advance(s, remaining)?;
        check_annulus(next)?;
        s = next;
        t = if dt == remaining { duration } else { t + dt };
        on_step(t, s[0], s[1]);
    }
    Ok((s[0], s[1]))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReturnMap {
    pub h0: f64,
    pub h1: f64,
    pub return_time: f64,
    /// `max |H - h0|` over the accepted steps of the orbit.
    pub max_energy_drift: f64,
}

/// First return to `{y = 0, x > 0}` starting from `(sqrt(h0), 0)`.
///
/// On the section `H(x, 0) = x²`, so `h` is an exact chart there.
pub fn return_map(spec: &PerturbationSpec, cfg: &RunConfig, h0: f64) -> Result<ReturnMap> {
    if !(h0 > 0.0 && h0 < 1.0) {
        return Err(Error::LevelOutOfRange { h: h0 });
    }
    let mut stepper = Stepper::new(spec, cfg)?;
    let mut s = [h0.sqrt(), 0.0];
    let mut t = 0.0;
    let mut drift = 0.0f64;
    let mut below = false;
    loop {
        let (next, dt) = stepper.advance(s, f64::INFINITY)?;
        let h = check_annulus(next)?;
        drift = drift.max((h - h0).abs());
        if below && next[1] >= 0.0 && next[0] > 0.0 {
            // Bisect the crossing time inside the last accepted step.
            let (mut lo, mut hi) = (0.0, dt);
            let mut hit = next;
            while hi - lo > CROSSING_TOL {
                let mid = 0.5 * (lo + hi);
                let (p, _) = stepper.field.step(s, mid);
                if p[1] < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                    hit = p;
                }
            }
            let h1 = first_integral(hit[0], hit[1])?;
            drift = drift.max((h1 - h0).abs());
            return Ok(ReturnMap {
                h0,
                h1,
                return_time: t + hi,
                max_energy_drift: drift,
            });
        }
        if next[1] < 0.0 {
            below = true;
        }
        s = next;
        t += dt;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Stability {
    Attracting,
    Repelling,
    Unresolved,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FixedPoint {
    pub h_star: f64,
    pub stability: Stability,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CycleReport {
    pub fixed_points: Vec<FixedPoint>,
    pub section: &'static str,
    pub eps: f64,
}

pub const SECTION: &str = "y = 0, x > 0; h = x^2";

/// Displacement `d(h) = return_map(h) - h`.
pub fn displacement(spec: &PerturbationSpec, cfg: &RunConfig, h: f64) -> Result<f64> {
    Ok(return_map(spec, cfg, h)?.h1 - h)
}

fn check_cycle_args(cfg: &RunConfig, h_lo: f64, h_hi: f64, grid: usize) -> Result<()> {
    if cfg.eps == 0.0 {
        return Err(Error::InvalidArgument("cycle search needs eps != 0"));
    }
    if cfg.eps.abs() > MAX_CYCLE_EPS {
        return Err(Error::InvalidArgument("cycle search needs |eps| <= 0.05"));
    }
    if !(0.05 <= h_lo && h_lo < h_hi && h_hi <= 0.95) {
        return Err(Error::InvalidArgument(
            "cycle search range must lie in [0.05, 0.95]",
        ));
    }
    if grid < 2 {
        return Err(Error::InvalidArgument(
            "cycle search needs at least 2 grid points",
        ));
    }
    Ok(())
}

/// Brackets sign changes of the displacement on a uniform `h` grid and
/// refines each to [`FIXED_POINT_TOL`].
pub fn find_cycles(
    spec: &PerturbationSpec,
    cfg: &RunConfig,
    h_lo: f64,
    h_hi: f64,
    grid: usize,
) -> Result<CycleReport> {
    find_cycles_with(spec, cfg, h_lo, h_hi, grid, |hs| {
        hs.iter().map(|&h| displacement(spec, cfg, h)).collect()
    })
}

/// [`find_cycles`] with the grid displacements supplied by the caller.
pub fn find_cycles_with<E>(
    spec: &PerturbationSpec,
    cfg: &RunConfig,
    h_lo: f64,
    h_hi: f64,
    grid: usize,
    evaluate: E,
) -> Result<CycleReport>
where
    E: FnOnce(&[f64]) -> Result<Vec<f64>>,
{
    check_cycle_args(cfg, h_lo, h_hi, grid)?;
    let hs = uniform_grid(h_lo, h_hi, grid);
    let ds = evaluate(&hs)?;
    let scan = bracket_samples(&hs, &ds);
    let mut fixed_points = Vec::with_capacity(scan.brackets.len());
    let mut failure = None;
    for bracket in &scan.brackets {
        let h_star = refine_bisection(
            bracket,
            |h| match displacement(spec, cfg, h) {
                Ok(d) => d,
                Err(err) => {
                    failure.get_or_insert(err);
                    0.0
                }
            },
            FIXED_POINT_TOL,
        );
        let stability = if bracket.spans_ambiguous {
            Stability::Unresolved
        } else if bracket.f_lo > 0.0 && bracket.f_hi < 0.0 {
            Stability::Attracting
        } else {
            Stability::Repelling
        };
        fixed_points.push(FixedPoint { h_star, stability });
    }
    if let Some(err) = failure {
        return Err(err);
    }
    Ok(CycleReport {
        fixed_points,
        section: SECTION,
        eps: cfg.eps,
    })
}

/// `max |T(h) - 2π|` over `h_list` for the unperturbed field.
pub fn isochronicity_suite(cfg: &RunConfig, h_list: &[f64]) -> Result<f64> {
    let cfg = RunConfig { eps: 0.0, ..*cfg };
    let zero = PerturbationSpec::zero(0);
    let mut worst = 0.0f64;
    for &h in h_list {
        let r = return_map(&zero, &cfg, h)?;
        worst = worst.max((r.return_time - 2.0 * PI).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_turn_returns_to_start() {
        let zero = PerturbationSpec::zero(0);
        let cfg = RunConfig::default();
        let (x, y) = integrate(&zero, &cfg, (0.3, 0.0), 2.0 * PI).unwrap();
        assert!((x - 0.3).abs() < 1e-8 && y.abs() < 1e-8, "({x}, {y})");
    }

    #[test]
    fn zero_duration() {
        let zero = PerturbationSpec::zero(0);
        let p = integrate(&zero, &RunConfig::default(), (0.2, 0.1), 0.0).unwrap();
        assert_eq!(p, (0.2, 0.1));
    }

    #[test]
    fn energy_is_conserved() {
        let zero = PerturbationSpec::zero(0);
        let start = (0.4, -0.3);
        let h0 = first_integral(start.0, start.1).unwrap();
        let mut drift = 0.0f64;
        integrate_trace(&zero, &RunConfig::default(), start, 7.3, |_, x, y| {
            drift = drift.max((first_integral(x, y).unwrap() - h0).abs());
        })
        .unwrap();
        assert!(drift <= 1e-9, "{drift}");
    }

    #[test]
    fn unperturbed_return_map() {
        let zero = PerturbationSpec::zero(0);
        for &h in &[0.3, 0.81] {
            let r = return_map(&zero, &RunConfig::default(), h).unwrap();
            assert!((r.h1 - h).abs() <= 1e-9);
            assert!(
                (r.return_time - 2.0 * PI).abs() <= 1e-8,
                "{}",
                r.return_time
            );
        }
    }

    #[test]
    fn lambda_family_displacement_sign() {
        // d ≈ -eps I(h) with I(0.3) = 4π·0.3·0.2 > 0
        let spec = PerturbationSpec::lambda_family(0.5);
        let r = return_map(&spec, &RunConfig::with_eps(1e-3), 0.3).unwrap();
        assert!(r.h1 < 0.3);
    }

    #[test]
    fn cycle_argument_checks() {
        let spec = PerturbationSpec::lambda_family(0.5);
        assert!(find_cycles(&spec, &RunConfig::with_eps(0.0), 0.1, 0.9, 10).is_err());
        assert!(find_cycles(&spec, &RunConfig::with_eps(0.1), 0.1, 0.9, 10).is_err());
        assert!(find_cycles(&spec, &RunConfig::with_eps(1e-3), 0.01, 0.9, 10).is_err());
    }

    #[test]
    fn isochronicity_empty_list() {
        assert_eq!(
            isochronicity_suite(&RunConfig::default(), &[]).unwrap(),
            0.0
        );
    }

    #[test]
    fn leaving_the_annulus_is_an_error() {
        let spec = PerturbationSpec::radial_linear();
        let cfg = RunConfig::with_eps(-0.5);
        let err = integrate(&spec, &cfg, (0.9, 0.0), 100.0).unwrap_err();
        assert!(matches!(err, Error::AnnulusExit { .. }));
    }
}
