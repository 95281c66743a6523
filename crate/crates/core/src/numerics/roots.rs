use alloc::vec::Vec;

use crate::{Error, Result};

/// Values with `|f| <= DEAD_BAND * max|f|` on the scan grid have no reliable sign.
pub const DEAD_BAND: f64 = 1e-12;

/// An interval on which a function changes sign.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RootBracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
    pub refined_root: Option<f64>,
    /// The bracket skips over grid points inside the dead band.
    pub spans_ambiguous: bool,
}

/// Outcome of a sign-change scan.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BracketScan {
    pub brackets: Vec<RootBracket>,
    /// Grid abscissae whose value fell inside the dead band.
    pub ambiguous: Vec<f64>,
    /// `max |f|` over the grid.
    pub scale: f64,
}

impl BracketScan {
    pub fn sign_changes(&self) -> usize {
        self.brackets.len()
    }
}

/// Uniform grid of `points >= 2` abscissae covering `[lo, hi]` inclusive.
pub fn uniform_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let step = (hi - lo) / (points - 1) as f64;
    (0..points)
        .map(|k| {
            if k + 1 == points {
                hi
            } else {
                lo + k as f64 * step
            }
        })
        .collect()
}

/// Evaluates `f` on a uniform grid and brackets every adjacent sign change.
///
/// Points in the dead band are reported in [`BracketScan::ambiguous`] and are
/// stepped over; a sign change across them is still bracketed but flagged.
pub fn bracket_roots<F>(mut f: F, lo: f64, hi: f64, grid_points: usize) -> Result<BracketScan>
where
    F: FnMut(f64) -> f64,
{
    if lo.is_nan() || hi.is_nan() || lo >= hi || grid_points < 2 {
        return Err(Error::InvalidArgument(
            "bracketing needs lo < hi and at least 2 points",
        ));
    }
    let xs = uniform_grid(lo, hi, grid_points);
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    Ok(bracket_samples(&xs, &ys))
}

/// Brackets sign changes of pre-computed samples `ys[k] = f(xs[k])`.
pub fn bracket_samples(xs: &[f64], ys: &[f64]) -> BracketScan {
    debug_assert_eq!(xs.len(), ys.len());
    let scale = ys
        .iter()
        .filter(|v| v.is_finite())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let band = DEAD_BAND * scale;

    let mut scan = BracketScan {
        scale,
        ..BracketScan::default()
    };
    let mut last: Option<(f64, f64)> = None;
    let mut skipped = false;
    for (&x, &y) in xs.iter().zip(ys) {
        if !y.is_finite() || y.abs() <= band {
            scan.ambiguous.push(x);
            skipped = true;
            continue;
        }
        if let Some((px, py)) = last {
            if (py < 0.0) != (y < 0.0) {
                scan.brackets.push(RootBracket {
                    lo: px,
                    hi: x,
                    f_lo: py,
                    f_hi: y,
                    refined_root: None,
                    spans_ambiguous: skipped,
                });
            }
        }
        last = Some((x, y));
        skipped = false;
    }
    scan
}

/// Bisects a bracket until its width is at most `2 tol`; returns the midpoint.
pub fn refine_bisection<F>(bracket: &RootBracket, mut f: F, tol: f64) -> f64
where
    F: FnMut(f64) -> f64,
{
    let (mut lo, mut hi) = (bracket.lo, bracket.hi);
    let lo_negative = bracket.f_lo < 0.0;
    while hi - lo > 2.0 * tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        if v == 0.0 {
            return mid;
        }
        if (v < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn single_linear_root() {
        let scan = bracket_roots(|h| h - 0.5, 0.01, 0.99, 100).unwrap();
        assert_eq!(scan.sign_changes(), 1);
        let b = scan.brackets[0];
        assert!(b.lo < 0.5 && 0.5 < b.hi);
        let r = refine_bisection(&b, |h| h - 0.5, 1e-10);
        assert!((r - 0.5).abs() <= 1e-10);
    }

    #[test]
    fn two_constructed_roots() {
        let f = |h: f64| (h - 0.2) * (h - 0.7);
        let scan = bracket_roots(f, 0.01, 0.99, 100).unwrap();
        assert_eq!(scan.sign_changes(), 2);
        let r = refine_bisection(&scan.brackets[1], f, 1e-11);
        assert!((r - 0.7).abs() <= 1e-11);
    }

    #[test]
    fn signed_definite_function_has_no_brackets() {
        let scan = bracket_roots(|h| -4.0 * PI * h, 0.01, 0.99, 100).unwrap();
        assert!(scan.brackets.is_empty());
        assert!(scan.ambiguous.is_empty());
    }

    #[test]
    fn exact_grid_zero_is_ambiguous_but_still_bracketed() {
        // 0.5 is a grid point of [0, 1] with 11 points.
        let scan = bracket_roots(|h| h - 0.5, 0.0, 1.0, 11).unwrap();
        assert_eq!(scan.ambiguous, [0.5]);
        assert_eq!(scan.sign_changes(), 1);
        assert!(scan.brackets[0].spans_ambiguous);
    }

    #[test]
    fn touching_zero_is_not_counted() {
        let scan = bracket_roots(|h| (h - 0.5) * (h - 0.5), 0.0, 1.0, 11).unwrap();
        assert_eq!(scan.sign_changes(), 0);
        assert_eq!(scan.ambiguous.len(), 1);
    }

    #[test]
    fn identically_zero_is_all_ambiguous() {
        let scan = bracket_roots(|_| 0.0, 0.0, 1.0, 5).unwrap();
        assert_eq!(scan.ambiguous.len(), 5);
        assert!(scan.brackets.is_empty());
    }

    #[test]
    fn invalid_arguments() {
        assert!(bracket_roots(|h| h, 1.0, 0.0, 10).is_err());
        assert!(bracket_roots(|h| h, 0.0, 1.0, 1).is_err());
    }
}
