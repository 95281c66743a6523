use core::f64::consts::PI;

/// `∫_0^{2π} cos^p θ sin^q θ dθ`.
///
/// Zero unless both exponents are even, otherwise
/// `2π (p-1)!! (q-1)!! / (p+q)!!` with `(-1)!! = 1`.
pub fn trig_moment(p: usize, q: usize) -> f64 {
    if p % 2 == 1 || q % 2 == 1 {
        return 0.0;
    }
    let mut value = 2.0 * PI;
    // (p-1)!! / p!!
    for k in 1..=p / 2 {
        value *= (2 * k - 1) as f64 / (2 * k) as f64;
    }
    // (q-1)!! / ((p+2)(p+4)...(p+q))
    for k in 1..=q / 2 {
        value *= (2 * k - 1) as f64 / (p + 2 * k) as f64;
    }
    value
}

/// `∫_0^{2π} sin^k θ dθ`.
pub fn sin_moment(k: usize) -> f64 {
    trig_moment(0, k)
}

/// Binomial coefficient as a float (exact for the small arguments used here).
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::periodic_trapezoid;

    #[test]
    fn small_cases() {
        assert!((trig_moment(0, 0) - 2.0 * PI).abs() < 1e-15);
        assert_eq!(trig_moment(1, 1), 0.0);
        assert_eq!(trig_moment(3, 2), 0.0);
        assert!((trig_moment(2, 2) - PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn agrees_with_quadrature_up_to_degree_16() {
        for p in 0..=16usize {
            for q in 0..=(16 - p) {
                let quad = periodic_trapezoid(
                    |t| t.cos().powi(p as i32) * t.sin().powi(q as i32),
                    32,
                    1e-15,
                )
                .unwrap();
                let exact = trig_moment(p, q);
                assert!(
                    (quad.value - exact).abs() <= 1e-12,
                    "p={p} q={q}: {} vs {exact}",
                    quad.value
                );
            }
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(6, 3), 20.0);
        assert_eq!(binomial(4, 0), 1.0);
        assert_eq!(binomial(3, 5), 0.0);
    }
}
