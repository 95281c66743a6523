//! The cubic isochronous field, its polynomial perturbations, first
//! integral and integrating factor, and the map from perturbation
//! coefficients to the area-integral coefficients used by the reduction.

use crate::poly::BivariatePoly;
use crate::reduction;
use crate::{Error, Result};

/// `|1 + 2xy|` below this is treated as the singular locus.
pub const SINGULAR_THRESHOLD: f64 = 1e-12;

/// Orientation of the Green's-formula map relative to the counterclockwise
/// line integral over the level curves. Fixed by the calibration test
/// `green_orientation_calibration` in `tests/reduction_paths.rs`.
pub const ORIENTATION_SIGN: f64 = 1.0;

/// Degree bound `n` plus the perturbation polynomials `f` and `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationSpec {
    n: usize,
    f: BivariatePoly,
    g: BivariatePoly,
}

impl PerturbationSpec {
    pub fn new(n: usize, f: BivariatePoly, g: BivariatePoly) -> Result<Self> {
        for p in [&f, &g] {
            if let Some(degree) = p.degree() {
                if degree > n {
                    return Err(Error::DegreeExceeded { degree, n });
                }
            }
        }
        Ok(Self { n, f, g })
    }

    pub fn zero(n: usize) -> Self {
        Self {
            n,
            f: BivariatePoly::zero(),
            g: BivariatePoly::zero(),
        }
    }

    /// `f = x`, `g = y`, whose Abelian integral is `-4πh`.
    pub fn radial_linear() -> Self {
        Self {
            n: 1,
            f: BivariatePoly::monomial(1, 0, 1.0),
            g: BivariatePoly::monomial(0, 1, 1.0),
        }
    }

    /// `f = x (x² + y² - λ)`, `g = y (x² + y² - λ)`, whose Abelian integral is
    /// `4πh(λ - h)` with a simple zero at `h = λ`.
    pub fn lambda_family(lambda: f64) -> Self {
        Self {
            n: 3,
            f: BivariatePoly::from_terms([(3, 0, 1.0), (1, 2, 1.0), (1, 0, -lambda)]),
            g: BivariatePoly::from_terms([(2, 1, 1.0), (0, 3, 1.0), (0, 1, -lambda)]),
        }
    }

    /// Dense spec of degree `n` with every coefficient drawn from `sample`:
    /// all `a_{i,j}` by total degree then `i`, followed by all `b_{i,j}`.
    pub fn dense<S: FnMut() -> f64>(n: usize, mut sample: S) -> Self {
        let mut poly = || {
            let mut p = BivariatePoly::zero();
            for d in 0..=n {
                for i in 0..=d {
                    p.add_term(i, d - i, sample());
                }
            }
            p
        };
        let f = poly();
        let g = poly();
        Self { n, f, g }
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn f(&self) -> &BivariatePoly {
        &self.f
    }

    pub fn g(&self) -> &BivariatePoly {
        &self.g
    }

    pub fn is_zero(&self) -> bool {
        self.f.is_zero() && self.g.is_zero()
    }

    /// Coefficient-wise sum; the degree bound is the larger of the two.
    pub fn sum(&self, other: &Self) -> Self {
        Self {
            n: self.n.max(other.n),
            f: &self.f + &other.f,
            g: &self.g + &other.g,
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            n: self.n,
            f: self.f.scale(factor),
            g: self.g.scale(factor),
        }
    }

    /// Largest absolute coefficient of `f` and `g`.
    pub fn coefficient_scale(&self) -> f64 {
        self.f.max_abs_coeff().max(self.g.max_abs_coeff())
    }
}

/// `-y + x³ - xy²`
pub fn unperturbed_p() -> BivariatePoly {
    BivariatePoly::from_terms([(0, 1, -1.0), (3, 0, 1.0), (1, 2, -1.0)])
}

/// `x + x²y - y³`
pub fn unperturbed_q() -> BivariatePoly {
    BivariatePoly::from_terms([(1, 0, 1.0), (2, 1, 1.0), (0, 3, -1.0)])
}

pub fn eval_poly(p: &BivariatePoly, x: f64, y: f64) -> f64 {
    p.eval(x, y)
}

pub fn vector_field(spec: &PerturbationSpec, eps: f64, x: f64, y: f64) -> (f64, f64) {
    let (xx, yy) = (x * x, y * y);
    let mut xdot = -y + x * (xx - yy);
    let mut ydot = x + y * (xx - yy);
    if eps != 0.0 {
        xdot += eps * spec.f.eval(x, y);
        ydot += eps * spec.g.eval(x, y);
    }
    (xdot, ydot)
}

fn nonsingular_weight(x: f64, y: f64) -> Result<f64> {
    let w = 1.0 + 2.0 * x * y;
    if w.abs() < SINGULAR_THRESHOLD {
        Err(Error::SingularLocus { x, y })
    } else {
        Ok(w)
    }
}

/// `H(x, y) = (x² + y²) / (1 + 2xy)`.
pub fn first_integral(x: f64, y: f64) -> Result<f64> {
    let w = nonsingular_weight(x, y)?;
    Ok((x * x + y * y) / w)
}

/// `(∂H/∂x, ∂H/∂y) = (2(x + x²y - y³), 2(y + xy² - x³)) / (1 + 2xy)²`.
pub fn first_integral_gradient(x: f64, y: f64) -> Result<(f64, f64)> {
    let w = nonsingular_weight(x, y)?;
    let w2 = w * w;
    Ok((
        2.0 * (x + x * x * y - y * y * y) / w2,
        2.0 * (y + x * y * y - x * x * x) / w2,
    ))
}

/// `μ(x, y) = 2 (1 + 2xy)^{-2}`.
pub fn integrating_factor(x: f64, y: f64) -> Result<f64> {
    let w = nonsingular_weight(x, y)?;
    Ok(2.0 / (w * w))
}

/// Coefficients `c_{i,j}` of the area integrand `Σ c_{i,j} x^i y^j / (x²+y²)³`
/// together with the `h`-independent constant `C_δ`.
#[derive(Debug, Clone, PartialEq)]
pub struct GreenCoefficients {
    /// Sparse `c_{i,j}`; only even `i + j` are stored.
    pub c: BivariatePoly,
    pub orientation_sign: f64,
    pub c_delta: f64,
    /// The `δ` at which `c_delta` was evaluated.
    pub delta: f64,
    pub(crate) spec: PerturbationSpec,
}

impl GreenCoefficients {
    pub fn spec(&self) -> &PerturbationSpec {
        &self.spec
    }

    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        self.c.coeff(i, j)
    }
}

/// Numerator of `-∂x(f ρ⁻²) - ∂y(g ρ⁻²)` over `ρ³`, `ρ = x² + y²`,
/// before any parity projection.
pub fn divergence_numerator(spec: &PerturbationSpec) -> BivariatePoly {
    let rho = BivariatePoly::from_terms([(2, 0, 1.0), (0, 2, 1.0)]);
    let x = BivariatePoly::monomial(1, 0, 1.0);
    let y = BivariatePoly::monomial(0, 1, 1.0);
    // ∂x(f ρ⁻²) ρ³ = f_x ρ - 4 x f
    let dfx = &(&spec.f.d_dx() * &rho) - &(&x * &spec.f).scale(4.0);
    let dgy = &(&spec.g.d_dy() * &rho) - &(&y * &spec.g).scale(4.0);
    -&(&dfx + &dgy)
}

/// Exact linear map from `(a_{i,j}, b_{i,j})` to `c_{i,j}` and `C_δ` at the
/// default `δ`.
///
/// Odd-total-degree monomials of the numerator are dropped: their angular
/// integrals vanish identically on the antipodally symmetric level curves.
pub fn green_coefficients(spec: &PerturbationSpec) -> GreenCoefficients {
    green_coefficients_at(spec, reduction::DEFAULT_DELTA)
}

pub fn green_coefficients_at(spec: &PerturbationSpec, delta: f64) -> GreenCoefficients {
    let c = divergence_numerator(spec)
        .filter_degree(|d| d % 2 == 0)
        .scale(2.0 * ORIENTATION_SIGN);
    let mut coeffs = GreenCoefficients {
        c,
        orientation_sign: ORIENTATION_SIGN,
        c_delta: 0.0,
        delta,
        spec: spec.clone(),
    };
    coeffs.c_delta = reduction::c_delta(&coeffs, delta);
    coeffs
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn field_examples() {
        let zero = PerturbationSpec::zero(2);
        assert_eq!(vector_field(&zero, 0.7, 0.0, 0.0), (0.0, 0.0));
        assert_eq!(vector_field(&zero, 0.0, 1.0, 0.0), (1.0, 1.0));
        let one =
            PerturbationSpec::new(0, BivariatePoly::monomial(0, 0, 1.0), BivariatePoly::zero())
                .unwrap();
        let (xd, yd) = vector_field(&one, 0.1, 0.0, 0.0);
        assert!((xd - 0.1).abs() < 1e-16 && yd == 0.0);
    }

    #[test]
    fn first_integral_and_factor_examples() {
        assert_eq!(first_integral(0.0, 0.0).unwrap(), 0.0);
        assert!((first_integral(0.3, 0.0).unwrap() - 0.09).abs() < 1e-16);
        assert_eq!(integrating_factor(0.0, 0.0).unwrap(), 2.0);
        assert!((integrating_factor(0.5, 0.5).unwrap() - 2.0 / 2.25).abs() < 1e-15);
        assert!(matches!(
            integrating_factor(1.0, -0.5),
            Err(Error::SingularLocus { .. })
        ));
        assert!(first_integral(1.0, -0.5).is_err());
    }

    #[test]
    fn degree_bound_is_enforced() {
        let err =
            PerturbationSpec::new(1, BivariatePoly::monomial(1, 1, 1.0), BivariatePoly::zero())
                .unwrap_err();
        assert_eq!(err, Error::DegreeExceeded { degree: 2, n: 1 });
    }

    #[test]
    fn conservation_on_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let zero = PerturbationSpec::zero(0);
        let mut checked = 0;
        while checked < 10_000 {
            let x: f64 = rng.gen_range(-3.0..3.0);
            let y: f64 = rng.gen_range(-3.0..3.0);
            let w = 1.0 + 2.0 * x * y;
            if w.abs() <= 0.1 {
                continue;
            }
            let h = first_integral(x, y).unwrap();
            if !(h > 0.0 && h < 1.0) {
                continue;
            }
            let (hx, hy) = first_integral_gradient(x, y).unwrap();
            let (p, q) = vector_field(&zero, 0.0, x, y);
            let scale = (hx.abs() + hy.abs()) * (p.abs() + q.abs());
            assert!((hx * p + hy * q).abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE));
            checked += 1;
        }
    }

    #[test]
    fn integrating_factor_makes_field_divergence_free() {
        // ∂x(w⁻² P) + ∂y(w⁻² Q) = [w (P_x + Q_y) - 4(y P + x Q)] w⁻³, w = 1 + 2xy
        let (p, q) = (unperturbed_p(), unperturbed_q());
        let w = BivariatePoly::from_terms([(0, 0, 1.0), (1, 1, 2.0)]);
        let x = BivariatePoly::monomial(1, 0, 1.0);
        let y = BivariatePoly::monomial(0, 1, 1.0);
        let div = &(&w * &(&p.d_dx() + &q.d_dy())) - &(&(&y * &p) + &(&x * &q)).scale(4.0);
        assert!(div.is_zero(), "{div:?}");
    }

    #[test]
    fn angular_speed_is_one() {
        let (p, q) = (unperturbed_p(), unperturbed_q());
        let x = BivariatePoly::monomial(1, 0, 1.0);
        let y = BivariatePoly::monomial(0, 1, 1.0);
        let rho = BivariatePoly::from_terms([(2, 0, 1.0), (0, 2, 1.0)]);
        let diff = &(&(&x * &q) - &(&y * &p)) - &rho;
        assert!(diff.is_zero());
    }

    #[test]
    fn green_map_zero_and_parity() {
        let g0 = green_coefficients(&PerturbationSpec::zero(4));
        assert!(g0.c.is_zero());
        assert_eq!(g0.c_delta, 0.0);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let terms = |rng: &mut ChaCha8Rng| {
            let mut t = alloc::vec::Vec::new();
            for d in 0..=5usize {
                for i in 0..=d {
                    t.push((i, d - i, rng.gen_range(-1.0..1.0)));
                }
            }
            BivariatePoly::from_terms(t)
        };
        let spec = PerturbationSpec::new(5, terms(&mut rng), terms(&mut rng)).unwrap();
        let raw = divergence_numerator(&spec);
        assert!(raw.terms().any(|(i, j, _)| (i + j) % 2 == 1));
        let gc = green_coefficients(&spec);
        assert!(gc
            .c
            .terms()
            .all(|(i, j, _)| (i + j) % 2 == 0 && (1..=6).contains(&(i + j))));
    }

    #[test]
    fn green_map_is_additive() {
        let s1 = PerturbationSpec::lambda_family(0.3);
        let s2 = PerturbationSpec::radial_linear();
        let sum = green_coefficients(&s1.sum(&s2));
        let (g1, g2) = (green_coefficients(&s1), green_coefficients(&s2));
        let diff = &sum.c - &(&g1.c + &g2.c);
        assert!(diff.max_abs_coeff() < 1e-14);
        assert!((sum.c_delta - g1.c_delta - g2.c_delta).abs() < 1e-10 * (1.0 + sum.c_delta.abs()));
    }
}
