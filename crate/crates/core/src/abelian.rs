//! The Abelian integral `I(h) = ∮_{H=h} μ g dx - μ f dy` (counterclockwise),
//! evaluated directly on the level curves and through the Green's-formula
//! reduction, plus zero counting against the bound `4 floor((n+1)/2) + 1`.

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent f64 methods whenever std is linked
use num_traits::Float;

use crate::curve::{self, curve_point, MAX_RADIUS};
use crate::numerics::{
    bracket_samples, lsq_fit, periodic_trapezoid_multi, refine_bisection, richardson_derivative,
};
use crate::reduction::{dk_table, iij_reduced, Method, ReductionTable};
use crate::system::{green_coefficients, GreenCoefficients, PerturbationSpec};
use crate::{Error, Result};

/// Quadrature tolerance for the direct line integral.
pub const DIRECT_TOL: f64 = 1e-13;
/// Allowed relative gap between the `μ`-form and the curve form of the integrand.
pub const FORM_AGREEMENT: f64 = 1e-10;
/// `max|I| <= IDENTICALLY_ZERO · magnitude` means the integral vanishes identically.
pub const IDENTICALLY_ZERO: f64 = 1e-12;
/// Bisection tolerance for zeros of `I`.
pub const ROOT_TOL: f64 = 1e-9;
/// Held-out residual bound for structure fits, relative to `max|G|`.
pub const STRUCTURE_TOL: f64 = 1e-6;
/// Residual bound for the `α/h + β` law at low degree, relative to `max|I_1|`.
pub const INVERSE_LAW_TOL: f64 = 1e-9;
pub const STRUCTURE_LO: f64 = 0.1;
pub const STRUCTURE_HI: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AbelianEval {
    pub h: f64,
    pub value: f64,
    pub method: Method,
    pub error_estimate: f64,
    /// `∫ |integrand| dθ`, the scale against which `value` is resolved.
    pub magnitude: f64,
}

/// Zero-count bound `4 floor((n+1)/2) + 1`.
pub fn budget(n: usize) -> usize {
    4 * n.div_ceil(2) + 1
}

fn check_sweep_level(h: f64) -> Result<()> {
    curve::check_level(h)?;
    let r = curve::max_radius(h)?;
    if r > MAX_RADIUS {
        return Err(Error::CurveTooLarge { h, radius: r });
    }
    Ok(())
}

/// Direct counterclockwise line integral over `H = h`.
///
/// On the curve `μ = 2h² / (x² + y²)²`; both forms of the integrand are
/// integrated on the same grid and must agree to [`FORM_AGREEMENT`].
pub fn i_direct(spec: &PerturbationSpec, h: f64) -> Result<AbelianEval> {
    check_sweep_level(h)?;
    let (f, g) = (spec.f(), spec.g());
    let two_h2 = 2.0 * h * h;
    let q = periodic_trapezoid_multi(
        |theta| {
            let p = curve_point(h, theta);
            let form = g.eval(p.x, p.y) * p.dx - f.eval(p.x, p.y) * p.dy;
            let rho = p.r * p.r;
            let w = 1.0 + 2.0 * p.x * p.y;
            [two_h2 * form / (rho * rho), 2.0 * form / (w * w)]
        },
        curve::DEFAULT_GRID,
        DIRECT_TOL,
    )?;
    let magnitude = q.abs_integrals[0];
    let difference = (q.values[0] - q.values[1]).abs();
    if difference > FORM_AGREEMENT * magnitude.max(q.values[0].abs()) {
        return Err(Error::FormMismatch { difference });
    }
    Ok(AbelianEval {
        h,
        value: q.values[0],
        method: Method::Direct,
        error_estimate: q.error_estimates[0],
        magnitude,
    })
}

/// `I_1(h) = I(h) / h²` from the direct route.
pub fn i1_direct(spec: &PerturbationSpec, h: f64) -> Result<f64> {
    Ok(i_direct(spec, h)?.value / (h * h))
}

/// The reduced route with its Green coefficients and reduction tables
/// prepared once per perturbation.
#[derive(Debug, Clone)]
pub struct ReducedAbelian {
    green: GreenCoefficients,
    terms: Vec<(f64, ReductionTable)>,
}

impl ReducedAbelian {
    pub fn new(spec: &PerturbationSpec) -> Result<Self> {
        let green = green_coefficients(spec);
        let terms = green
            .c
            .terms()
            .map(|(i, j, c)| Ok((c, dk_table(i, j)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { green, terms })
    }

    pub fn green(&self) -> &GreenCoefficients {
        &self.green
    }

    /// Largest `N` with a nonzero `c_{i,j}`, `i + j = 2N`.
    pub fn max_block(&self) -> usize {
        self.terms.iter().map(|(_, t)| t.n_half).max().unwrap_or(0)
    }

    /// `J_N(h) = Σ_{i+j=2N} c_{i,j} I_{i,j}(h)`.
    pub fn j_block(&self, big_n: usize, h: f64) -> Result<f64> {
        let mut sum = 0.0;
        for (c, table) in self.terms.iter().filter(|(_, t)| t.n_half == big_n) {
            sum += c * iij_reduced(table, h)?;
        }
        Ok(sum)
    }

    /// `I_1(h) = Σ_N J_N(h) - C_δ`.
    pub fn i1(&self, h: f64) -> Result<f64> {
        let mut sum = 0.0;
        for (c, table) in &self.terms {
            sum += c * iij_reduced(table, h)?;
        }
        Ok(sum - self.green.c_delta)
    }

    pub fn eval(&self, h: f64) -> Result<AbelianEval> {
        check_sweep_level(h)?;
        let mut magnitude = self.green.c_delta.abs();
        let mut sum = 0.0;
        for (c, table) in &self.terms {
            let term = c * iij_reduced(table, h)?;
            magnitude += term.abs();
            sum += term;
        }
        let h2 = h * h;
        Ok(AbelianEval {
            h,
            value: h2 * (sum - self.green.c_delta),
            method: Method::Reduced,
            error_estimate: h2 * magnitude * 1e-14,
            magnitude: h2 * magnitude,
        })
    }
}

/// `h² (Σ c_{i,j} I_{i,j}(h) - C_δ)`.
pub fn i_reduced(spec: &PerturbationSpec, h: f64) -> Result<AbelianEval> {
    ReducedAbelian::new(spec)?.eval(h)
}

fn derivative_step(h: f64) -> f64 {
    0.01f64.min(0.25 * h.min(1.0 - h))
}

/// `d I_1 / dh` from a Richardson derivative of the direct route and the
/// quotient rule `I'/h² - 2I/h³`.
pub fn d_i1(spec: &PerturbationSpec, h: f64) -> Result<f64> {
    check_sweep_level(h)?;
    if spec.is_zero() {
        return Ok(0.0);
    }
    let mut failure = None;
    let d = richardson_derivative(
        |t| match i_direct(spec, t) {
            Ok(e) => e.value,
            Err(err) => {
                failure.get_or_insert(err);
                f64::NAN
            }
        },
        h,
        derivative_step(h),
    );
    if let Some(err) = failure {
        return Err(err);
    }
    let i = i_direct(spec, h)?.value;
    Ok(d? / (h * h) - 2.0 * i / (h * h * h))
}

/// Fit of `G(h) = h³ (1-h²)^{m-3/2} I_1'(h)` to `φ(h) + ψ(h) sqrt(1-h²)` with
/// `deg φ, deg ψ <= 2m - 1`, `m = floor((n+1)/2)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StructureFit {
    pub m: usize,
    pub phi_coeffs: Vec<f64>,
    pub psi_coeffs: Vec<f64>,
    pub fit_residual: f64,
    pub holdout_residual: f64,
    /// `max |G|` over all samples.
    pub scale: f64,
    pub passed: bool,
}

/// Evenly spaced sample levels on `[0.1, 0.9]`, split so that every fourth
/// one is held out.
fn split_samples(count: usize) -> (Vec<f64>, Vec<f64>) {
    let step = (STRUCTURE_HI - STRUCTURE_LO) / (count - 1) as f64;
    let mut train = Vec::new();
    let mut hold = Vec::new();
    for k in 0..count {
        let h = STRUCTURE_LO + k as f64 * step;
        if k % 4 == 2 {
            hold.push(h);
        } else {
            train.push(h);
        }
    }
    (train, hold)
}

fn power_basis(p: usize) -> impl Fn(f64) -> f64 {
    move |h: f64| h.powi(p as i32)
}

fn root_power_basis(p: usize) -> impl Fn(f64) -> f64 {
    move |h: f64| h.powi(p as i32) * (1.0 - h * h).sqrt()
}

/// Generic structure fit: `target` sampled on `[0.1, 0.9]`, fitted on 75%,
/// judged on the held-out 25%.
pub(crate) fn holdout_fit<T>(
    basis: &[&dyn Fn(f64) -> f64],
    sample_count: usize,
    mut target: T,
) -> Result<(crate::numerics::LsqFit, f64, f64)>
where
    T: FnMut(f64) -> Result<f64>,
{
    let (train, hold) = split_samples(sample_count);
    let ys = train
        .iter()
        .map(|&h| target(h))
        .collect::<Result<Vec<_>>>()?;
    let hold_ys = hold
        .iter()
        .map(|&h| target(h))
        .collect::<Result<Vec<_>>>()?;
    let scale = ys
        .iter()
        .chain(&hold_ys)
        .fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Ok((
            crate::numerics::LsqFit {
                coefficients: alloc::vec![0.0; basis.len()],
                residual: 0.0,
                condition: 1.0,
            },
            0.0,
            0.0,
        ));
    }
    let fit = lsq_fit(basis, &train, &ys)?;
    let holdout = hold
        .iter()
        .zip(&hold_ys)
        .map(|(&h, y)| (fit.predict(basis, h) - y).abs())
        .fold(0.0f64, f64::max);
    Ok((fit, holdout, scale))
}

/// Checks that `I_1'` has the form `h^{-3} (1-h²)^{3/2-m} [φ(h) + ψ(h) sqrt(1-h²)]`.
///
/// Needs `m = floor((n+1)/2) >= 2` and `sample_count >= 6m`; at `m = 1` use
/// [`inverse_law_check`].
pub fn structure_check(spec: &PerturbationSpec, sample_count: usize) -> Result<StructureFit> {
    let m = spec.degree().div_ceil(2);
    if m < 2 {
        return Err(Error::InvalidArgument(
            "structure check needs floor((n+1)/2) >= 2; use the inverse-law check",
        ));
    }
    if sample_count < 6 * m {
        return Err(Error::InvalidArgument(
            "structure check needs at least 6m samples",
        ));
    }
    let width = 2 * m;
    let powers: Vec<_> = (0..width).map(power_basis).collect();
    let roots: Vec<_> = (0..width).map(root_power_basis).collect();
    let mut basis: Vec<&dyn Fn(f64) -> f64> = Vec::with_capacity(2 * width);
    basis.extend(powers.iter().map(|b| b as &dyn Fn(f64) -> f64));
    basis.extend(roots.iter().map(|b| b as &dyn Fn(f64) -> f64));

    let exponent = m as f64 - 1.5;
    let (fit, holdout, scale) = holdout_fit(&basis, sample_count, |h| {
        Ok(h * h * h * (1.0 - h * h).powf(exponent) * d_i1(spec, h)?)
    })?;
    let (phi, psi) = fit.coefficients.split_at(width);
    Ok(StructureFit {
        m,
        phi_coeffs: phi.to_vec(),
        psi_coeffs: psi.to_vec(),
        fit_residual: fit.residual,
        holdout_residual: holdout,
        scale,
        passed: holdout <= STRUCTURE_TOL * scale,
    })
}

/// Fit of `I_1(h) = α/h + β`, the exact form when `floor((n+1)/2) = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InverseLawFit {
    pub alpha: f64,
    pub beta: f64,
    pub residual: f64,
    pub scale: f64,
    pub passed: bool,
}

pub fn inverse_law_check(spec: &PerturbationSpec, sample_count: usize) -> Result<InverseLawFit> {
    let basis: [&dyn Fn(f64) -> f64; 2] = [&|h: f64| 1.0 / h, &|_| 1.0];
    let (fit, holdout, scale) = holdout_fit(&basis, sample_count.max(8), |h| i1_direct(spec, h))?;
    let residual = fit.residual.max(holdout);
    Ok(InverseLawFit {
        alpha: fit.coefficients[0],
        beta: fit.coefficients[1],
        residual,
        scale,
        passed: residual <= INVERSE_LAW_TOL * scale,
    })
}

/// Fit of `h² J_N(h)` to `(1-h²)^{5/2-N} φ_{2N-3}(h) + φ_2(h)` for `N >= 3`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BlockFit {
    pub block: usize,
    pub singular_coeffs: Vec<f64>,
    pub polynomial_coeffs: Vec<f64>,
    pub holdout_residual: f64,
    pub scale: f64,
    pub passed: bool,
}

pub fn block_structure_check(
    reduced: &ReducedAbelian,
    big_n: usize,
    sample_count: usize,
) -> Result<BlockFit> {
    if big_n < 3 {
        return Err(Error::InvalidArgument("block structure applies to N >= 3"));
    }
    let exponent = 2.5 - big_n as f64;
    let singular: Vec<_> = (0..=2 * big_n - 3)
        .map(|p| move |h: f64| h.powi(p as i32) * (1.0 - h * h).powf(exponent))
        .collect();
    let plain: Vec<_> = (0..=2).map(power_basis).collect();
    let mut basis: Vec<&dyn Fn(f64) -> f64> = Vec::new();
    basis.extend(singular.iter().map(|b| b as &dyn Fn(f64) -> f64));
    basis.extend(plain.iter().map(|b| b as &dyn Fn(f64) -> f64));
    let (fit, holdout, scale) = holdout_fit(&basis, sample_count, |h| {
        Ok(h * h * reduced.j_block(big_n, h)?)
    })?;
    let (s, p) = fit.coefficients.split_at(singular.len());
    Ok(BlockFit {
        block: big_n,
        singular_coeffs: s.to_vec(),
        polynomial_coeffs: p.to_vec(),
        holdout_residual: holdout,
        scale,
        passed: holdout <= STRUCTURE_TOL * scale,
    })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ZeroReport {
    pub n: usize,
    /// Refined zeros, one per sign change, in increasing order.
    pub roots: Vec<f64>,
    pub sign_change_count: usize,
    /// Grid points where `|I|` fell in the sign dead band.
    pub ambiguous_cells: usize,
    pub budget: usize,
    pub within_budget: bool,
    /// `I` vanishes identically to working precision; the bound says nothing.
    pub identically_zero: bool,
}

/// Sweep grid on `[0.01, 0.99]`.
pub fn sweep_levels(grid_points: usize) -> Vec<f64> {
    crate::numerics::uniform_grid(curve::H_MIN, curve::H_MAX, grid_points)
}

/// Counts sign changes of `I` on `[0.01, 0.99]` and refines each to [`ROOT_TOL`].
pub fn count_zeros(spec: &PerturbationSpec, grid_points: usize) -> Result<ZeroReport> {
    count_zeros_with(spec, grid_points, |hs| {
        hs.iter().map(|&h| i_direct(spec, h)).collect()
    })
}

/// [`count_zeros`] with the grid evaluation supplied by the caller, so that
/// it can be spread over threads.
pub fn count_zeros_with<E>(
    spec: &PerturbationSpec,
    grid_points: usize,
    evaluate: E,
) -> Result<ZeroReport>
where
    E: FnOnce(&[f64]) -> Result<Vec<AbelianEval>>,
{
    count_zeros_on(spec, curve::H_MIN, curve::H_MAX, grid_points, evaluate)
}

/// [`count_zeros_with`] restricted to `[h_lo, h_hi] ⊆ [0.01, 0.99]`.
pub fn count_zeros_on<E>(
    spec: &PerturbationSpec,
    h_lo: f64,
    h_hi: f64,
    grid_points: usize,
    evaluate: E,
) -> Result<ZeroReport>
where
    E: FnOnce(&[f64]) -> Result<Vec<AbelianEval>>,
{
    if grid_points < 200 {
        return Err(Error::InvalidArgument(
            "zero counting needs at least 200 grid points",
        ));
    }
    if !(curve::H_MIN <= h_lo && h_lo < h_hi && h_hi <= curve::H_MAX) {
        return Err(Error::InvalidArgument(
            "zero counting range must satisfy 0.01 <= h_lo < h_hi <= 0.99",
        ));
    }
    let n = spec.degree();
    let hs = crate::numerics::uniform_grid(h_lo, h_hi, grid_points);
    let evals = evaluate(&hs)?;
    let values: Vec<f64> = evals.iter().map(|e| e.value).collect();
    let magnitude = evals.iter().fold(0.0f64, |m, e| m.max(e.magnitude));
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut report = ZeroReport {
        n,
        roots: Vec::new(),
        sign_change_count: 0,
        ambiguous_cells: 0,
        budget: budget(n),
        within_budget: true,
        identically_zero: false,
    };
    if peak <= IDENTICALLY_ZERO * magnitude {
        report.identically_zero = true;
        report.ambiguous_cells = hs.len();
        return Ok(report);
    }
    let scan = bracket_samples(&hs, &values);
    let mut failure = None;
    for bracket in &scan.brackets {
        let root = refine_bisection(
            bracket,
            |h| match i_direct(spec, h) {
                Ok(e) => e.value,
                Err(err) => {
                    failure.get_or_insert(err);
                    0.0
                }
            },
            ROOT_TOL,
        );
        report.roots.push(root);
    }
    if let Some(err) = failure {
        return Err(err);
    }
    report.sign_change_count = scan.brackets.len();
    report.ambiguous_cells = scan.ambiguous.len();
    report.within_budget = report.sign_change_count <= report.budget;
    Ok(report)
}
