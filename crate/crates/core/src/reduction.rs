//! Special integrals behind the reduced form of the Abelian integral.
//!
//! * `L_k(h) = ∫_0^{2π} (1 - h sin θ)^{-k} dθ`
//! * `A_k(h) = ∫_{-π}^{π} sin^k θ ln(1 - h sin θ) dθ` and its `h`-derivative
//! * the constants `d_0..d_N` that turn `∫ F(sin 2θ) cos^i θ sin^j θ dθ` into
//!   `Σ d_k ∫ F(sin θ) sin^k θ dθ` for every continuous `F`
//! * the binomial reduction of `∫ sin^k θ (1 - h sin θ)^{-n} dθ` onto `L`
//! * the angular integrals `I_{i,j}(h)` and the constant `C_δ`

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // shadowed by inherent f64 methods whenever std is linked
use num_traits::Float;

use crate::curve::check_level;
use crate::numerics::{binomial, lsq_solve, periodic_trapezoid, sin_moment, trig_moment};
use crate::system::GreenCoefficients;
use crate::{Error, Result};

/// Default inner radius for `C_δ`.
pub const DEFAULT_DELTA: f64 = 0.05;
/// Convergence tolerance for the quadrature-backed integrals here.
pub const QUAD_TOL: f64 = 1e-14;
const QUAD_START: usize = 64;
/// Acceptance threshold for the `exp` witness of a [`ReductionTable`].
pub const WITNESS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum LMethod {
    ClosedForm,
    BinomialExact,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LValue {
    pub k: i32,
    pub h: f64,
    pub value: f64,
    pub method: LMethod,
}

/// `L_k(h)`: closed forms for `-2 ≤ k ≤ 2`, exact binomial expansion for
/// `k ≤ -3`, and periodic quadrature for `k ≥ 3`.
pub fn l_integral(k: i32, h: f64) -> Result<LValue> {
    check_level(h)?;
    let (value, method) = match k {
        -2 => (PI * (2.0 + h * h), LMethod::ClosedForm),
        -1 | 0 => (2.0 * PI, LMethod::ClosedForm),
        1 => (2.0 * PI / (1.0 - h * h).sqrt(), LMethod::ClosedForm),
        2 => (2.0 * PI * (1.0 - h * h).powf(-1.5), LMethod::ClosedForm),
        k if k <= -3 => {
            let m = (-k) as usize;
            let v = (0..=m)
                .map(|i| binomial(m, i) * (-h).powi(i as i32) * sin_moment(i))
                .sum();
            (v, LMethod::BinomialExact)
        }
        _ => (l_by_quadrature(k, h)?, LMethod::Quadrature),
    };
    Ok(LValue {
        k,
        h,
        value,
        method,
    })
}

/// `L_k(h)` straight from its defining integral, for any integer `k`.
pub fn l_by_quadrature(k: i32, h: f64) -> Result<f64> {
    check_level(h)?;
    periodic_trapezoid(|t| (1.0 - h * t.sin()).powi(-k), QUAD_START, QUAD_TOL).map(|q| q.value)
}

/// `A_k(h)` by periodic quadrature.
pub fn a_integral(k: usize, h: f64) -> Result<f64> {
    check_level(h)?;
    periodic_trapezoid(
        |t| {
            let s = t.sin();
            s.powi(k as i32) * (1.0 - h * s).ln()
        },
        QUAD_START,
        QUAD_TOL,
    )
    .map(|q| q.value)
}

/// Closed form of `dA_k/dh` for `k ∈ {0, 1, 2}`.
///
/// Obtained from `dA_k/dh = -∫ sin^{k+1} θ / (1 - h sin θ) dθ` and the binomial
/// reduction onto `L_1, L_0, L_{-1}, L_{-2}`:
///
/// ```text
/// dA_0 = 2π/h  - 2π/(h  sqrt(1-h²))
/// dA_1 = 2π/h² - 2π/(h² sqrt(1-h²))
/// dA_2 = π/h + 2π/h³ - 2π/(h³ sqrt(1-h²))
/// ```
pub fn da_closed_form(k: usize, h: f64) -> Result<f64> {
    check_level(h)?;
    let root = (1.0 - h * h).sqrt();
    match k {
        0 => Ok(2.0 * PI / h - 2.0 * PI / (h * root)),
        1 => Ok(2.0 * PI / (h * h) - 2.0 * PI / (h * h * root)),
        2 => {
            let h3 = h * h * h;
            Ok(PI / h + 2.0 * PI / h3 - 2.0 * PI / (h3 * root))
        }
        _ => Err(Error::InvalidArgument(
            "closed-form dA is available for k = 0, 1, 2",
        )),
    }
}

/// `h^{-k} Σ_{i=0}^{k} (-1)^i C(k, i) L_{n-i}(h) = ∫_0^{2π} sin^k θ (1 - h sin θ)^{-n} dθ`.
pub fn binom_reduce(k: usize, n: i32, h: f64) -> Result<f64> {
    check_level(h)?;
    let mut sum = 0.0;
    for i in 0..=k {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * binomial(k, i) * l_integral(n - i as i32, h)?.value;
    }
    Ok(sum * h.powi(-(k as i32)))
}

/// The constants `d_0..d_N` for the monomial `cos^i θ sin^j θ`, `i + j = 2N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionTable {
    pub i: usize,
    pub j: usize,
    pub n_half: usize,
    pub d: Vec<f64>,
    /// `|lhs - rhs|` of the identity for `F(s) = exp(s)`.
    pub witness_residual: f64,
}

impl ReductionTable {
    /// `Σ d_k ∫ F(sin θ) sin^k θ dθ` by quadrature.
    pub fn apply<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64> {
        periodic_trapezoid(
            |t| {
                let s = t.sin();
                let fs = f(s);
                let mut acc = 0.0;
                let mut sk = 1.0;
                for d in &self.d {
                    acc += d * sk;
                    sk *= s;
                }
                fs * acc
            },
            QUAD_START,
            QUAD_TOL,
        )
        .map(|q| q.value)
    }
}

/// `∫_0^{2π} F(sin 2θ) cos^i θ sin^j θ dθ` by quadrature.
pub fn double_angle_moment<F: Fn(f64) -> f64>(f: F, i: usize, j: usize) -> Result<f64> {
    periodic_trapezoid(
        |t| {
            let (s, c) = t.sin_cos();
            f((2.0 * t).sin()) * c.powi(i as i32) * s.powi(j as i32)
        },
        QUAD_START,
        QUAD_TOL,
    )
    .map(|q| q.value)
}

/// Solves for `d_0..d_N` from the identity instantiated with `F(s) = s^m`,
/// `m = 0..N`, where both sides are exact trigonometric moments, and then
/// checks the identity for `F(s) = exp(s)` by quadrature.
pub fn dk_table(i: usize, j: usize) -> Result<ReductionTable> {
    let total = i + j;
    if total % 2 == 1 {
        return Err(Error::OddTotalDegree(total));
    }
    let n_half = total / 2;
    let mut rows = Vec::with_capacity(n_half + 1);
    let mut rhs = Vec::with_capacity(n_half + 1);
    for m in 0..=n_half {
        rows.push((0..=n_half).map(|k| sin_moment(k + m)).collect::<Vec<_>>());
        // sin^m 2θ = 2^m sin^m θ cos^m θ
        rhs.push(2f64.powi(m as i32) * trig_moment(i + m, j + m));
    }
    let fit = lsq_solve(&rows, &rhs, 1e12)?;
    let mut table = ReductionTable {
        i,
        j,
        n_half,
        d: fit.coefficients,
        witness_residual: 0.0,
    };
    let lhs = double_angle_moment(|s| s.exp(), i, j)?;
    let rhs = table.apply(|s| s.exp())?;
    table.witness_residual = (lhs - rhs).abs();
    if table.witness_residual > WITNESS_TOL * lhs.abs().max(1.0) {
        return Err(Error::ReductionWitness {
            i,
            j,
            residual: table.witness_residual,
        });
    }
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Method {
    Direct,
    Reduced,
}

/// `I_{i,j}(h)`: `∫ r^{i+j-4}/(i+j-4) cos^i sin^j dθ`, or `∫ ln r cos^i sin^j dθ`
/// when `i + j = 4`, over the level curve `H = h`.
pub fn iij(i: usize, j: usize, h: f64, method: Method) -> Result<f64> {
    check_level(h)?;
    if (i + j) % 2 == 1 {
        return Ok(0.0);
    }
    match method {
        Method::Direct => iij_direct(i, j, h),
        Method::Reduced => iij_reduced(&dk_table(i, j)?, h),
    }
}

fn iij_direct(i: usize, j: usize, h: f64) -> Result<f64> {
    let k = (i + j) as i32;
    let angular = |t: f64| {
        let (s, c) = t.sin_cos();
        c.powi(i as i32) * s.powi(j as i32)
    };
    let q = if k == 4 {
        periodic_trapezoid(
            |t| 0.5 * (h / (1.0 - h * (2.0 * t).sin())).ln() * angular(t),
            QUAD_START,
            QUAD_TOL,
        )?
    } else {
        let e = k - 4;
        periodic_trapezoid(
            |t| {
                let r2 = h / (1.0 - h * (2.0 * t).sin());
                let re = if e % 2 == 0 {
                    r2.powi(e / 2)
                } else {
                    r2.sqrt().powi(e)
                };
                re * angular(t) / e as f64
            },
            QUAD_START,
            QUAD_TOL,
        )?
    };
    Ok(q.value)
}

/// Reduced evaluation of `I_{i,j}(h)` from a precomputed table.
///
/// With `r^2 = h / (1 - h sin 2θ)`, the integrand is a function of `sin 2θ`
/// times `cos^i sin^j`, so the table moves it onto `sin θ`:
///
/// * `i + j = 2N ≠ 4`: `(2N-4)^{-1} Σ d_k h^{N-2} ∫ sin^k θ (1 - h sin θ)^{2-N} dθ`
/// * `i + j = 4`: `½ Σ d_k [ln h ∫ sin^k θ dθ - A_k(h)]`
pub fn iij_reduced(table: &ReductionTable, h: f64) -> Result<f64> {
    check_level(h)?;
    let big_n = table.n_half as i32;
    if big_n == 2 {
        let mut sum = 0.0;
        for (k, d) in table.d.iter().enumerate() {
            if *d != 0.0 {
                sum += d * (h.ln() * sin_moment(k) - a_integral(k, h)?);
            }
        }
        Ok(0.5 * sum)
    } else {
        let mut sum = 0.0;
        for (k, d) in table.d.iter().enumerate() {
            if *d != 0.0 {
                sum += d * binom_reduce(k, big_n - 2, h)?;
            }
        }
        Ok(sum * h.powi(big_n - 2) / (2 * big_n - 4) as f64)
    }
}

/// `h`-independent constant of the Green's-formula reduction at inner radius `δ`:
///
/// ```text
/// C_δ = Σ c_{i,j} ∫ δ^{i+j-4}/(i+j-4) cos^i sin^j dθ   (ln δ when i+j = 4)
///       - 2s ∮_{r=δ} (g dx - f dy) / (x²+y²)²
/// ```
///
/// with the circle traversed counterclockwise and `s` the orientation sign.
/// All pieces are exact trigonometric moments.
///
/// # Panics
///
/// If `delta` is outside `(0, 0.2)`.
pub fn c_delta(coeffs: &GreenCoefficients, delta: f64) -> f64 {
    assert!(
        delta > 0.0 && delta < 0.2,
        "C_δ needs 0 < δ < 0.2, got {delta}"
    );
    let mut area = 0.0;
    for (i, j, c) in coeffs.c.terms() {
        let k = (i + j) as i32;
        let radial = if k == 4 {
            delta.ln()
        } else {
            delta.powi(k - 4) / (k - 4) as f64
        };
        area += c * radial * trig_moment(i, j);
    }
    // x = δ cos θ, y = δ sin θ: x^i y^j ρ^{-2} dx = -δ^{i+j-3} cos^i sin^{j+1} dθ,
    // x^i y^j ρ^{-2} dy = δ^{i+j-3} cos^{i+1} sin^j dθ.
    let spec = coeffs.spec();
    let mut circle = 0.0;
    for (i, j, b) in spec.g().terms() {
        circle -= b * delta.powi((i + j) as i32 - 3) * trig_moment(i, j + 1);
    }
    for (i, j, a) in spec.f().terms() {
        circle -= a * delta.powi((i + j) as i32 - 3) * trig_moment(i + 1, j);
    }
    area - 2.0 * coeffs.orientation_sign * circle
}
