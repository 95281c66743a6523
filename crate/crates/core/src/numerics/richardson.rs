use crate::{Error, Result};

/// Required consistency, relative to `1 + |value|`.
pub const DERIVATIVE_CONSISTENCY: f64 = 1e-7;

const MAX_ROWS: usize = 12;
const MIN_HALVINGS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivative {
    pub value: f64,
    /// Spread between the two best neighbouring tableau entries.
    pub error: f64,
}

/// Central-difference derivative with Richardson extrapolation over step
/// halvings, stopping once rounding noise starts to dominate.
///
/// The stencil `[at - initial_step, at + initial_step]` must lie in the domain
/// of `f`.
pub fn richardson_derivative<F>(f: F, at: f64, initial_step: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let d = richardson_estimate(f, at, initial_step)?;
    if d.error <= DERIVATIVE_CONSISTENCY * (1.0 + d.value.abs()) {
        Ok(d.value)
    } else {
        Err(Error::DerivativeNonConvergence { estimate: d.error })
    }
}

/// Like [`richardson_derivative`] but returns the estimate without judging it.
pub fn richardson_estimate<F>(mut f: F, at: f64, initial_step: f64) -> Result<Derivative>
where
    F: FnMut(f64) -> f64,
{
    if initial_step.is_nan() || initial_step <= 0.0 {
        return Err(Error::InvalidArgument("initial step must be positive"));
    }
    let mut table = [[0.0f64; MAX_ROWS]; MAX_ROWS];
    let mut best = Derivative {
        value: f64::NAN,
        error: f64::INFINITY,
    };
    let mut step = initial_step;
    for row in 0..MAX_ROWS {
        table[row][0] = (f(at + step) - f(at - step)) / (2.0 * step);
        let mut factor = 1.0;
        for col in 1..=row {
            factor *= 4.0;
            table[row][col] = table[row][col - 1]
                + (table[row][col - 1] - table[row - 1][col - 1]) / (factor - 1.0);
            let err = (table[row][col] - table[row][col - 1])
                .abs()
                .max((table[row][col] - table[row - 1][col - 1]).abs());
            if err <= best.error {
                best = Derivative {
                    value: table[row][col],
                    error: err,
                };
            }
        }
        if row >= MIN_HALVINGS {
            let drift = (table[row][row] - table[row - 1][row - 1]).abs();
            if drift >= 2.0 * best.error {
                break;
            }
        }
        step *= 0.5;
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn quadratic() {
        let d = richardson_derivative(|h| h * h, 0.3, 0.1).unwrap();
        assert!((d - 0.6).abs() < 1e-12);
    }

    #[test]
    fn constant() {
        let d = richardson_derivative(|_| 3.5, 0.3, 0.1).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn closed_form_l1() {
        // d/dh 2π(1-h²)^{-1/2} = 2πh(1-h²)^{-3/2}
        let l1 = |h: f64| 2.0 * PI / (1.0 - h * h).sqrt();
        let d = richardson_derivative(l1, 0.5, 0.05).unwrap();
        let exact = 2.0 * PI * 0.5 * 0.75f64.powf(-1.5);
        assert!((exact - 4.8368).abs() < 1e-4);
        assert!((d - exact).abs() < 1e-9);
    }

    #[test]
    fn noisy_function_fails_consistency() {
        let mut state = 12345u64;
        let noisy = move |h: f64| {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            h + 1e-3 * ((state >> 11) as f64 / (1u64 << 53) as f64)
        };
        assert!(matches!(
            richardson_derivative(noisy, 0.5, 1e-3),
            Err(Error::DerivativeNonConvergence { .. })
        ));
    }
}
