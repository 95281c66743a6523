//! Direct quadrature against the reduction pipeline.

use std::f64::consts::PI;

use cyclescope_core::abelian::{i_direct, i_reduced, ReducedAbelian};
use cyclescope_core::numerics::{lsq_fit, periodic_trapezoid, richardson_derivative, trig_moment};
use cyclescope_core::reduction::{
    a_integral, binom_reduce, c_delta, da_closed_form, dk_table, double_angle_moment, iij,
    l_by_quadrature, l_integral, Method,
};
use cyclescope_core::system::{green_coefficients, green_coefficients_at, ORIENTATION_SIGN};
use cyclescope_core::PerturbationSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_spec(rng: &mut ChaCha8Rng, n: usize) -> PerturbationSpec {
    PerturbationSpec::dense(n, || rng.gen_range(-1.0..1.0))
}

#[test]
fn green_orientation_calibration() {
    // f = x, g = y at h = 0.5: direct value is -4πh = -2π.
    let spec = PerturbationSpec::radial_linear();
    let direct = i_direct(&spec, 0.5).unwrap().value;
    let reduced = i_reduced(&spec, 0.5).unwrap().value;
    assert!((direct + 2.0 * PI).abs() < 1e-12);
    assert!((reduced - direct).abs() < 1e-10);
    assert!(
        (reduced + direct).abs() > 1.0,
        "the opposite orientation must be distinguishable"
    );
    assert_eq!(ORIENTATION_SIGN, 1.0);
}

#[test]
fn closed_form_l_matches_defining_integral() {
    for k in -2..=2 {
        for step in 1..=9 {
            let h = step as f64 / 10.0;
            let closed = l_integral(k, h).unwrap().value;
            let quad = l_by_quadrature(k, h).unwrap();
            assert!(
                (closed - quad).abs() <= 1e-10 * (1.0 + closed.abs()),
                "k={k} h={h}"
            );
        }
    }
}

#[test]
fn l_has_rational_structure_in_h_squared() {
    for k in 3..=5i32 {
        let degree = ((k - 1) / 2) as usize;
        let powers: Vec<Box<dyn Fn(f64) -> f64>> = (0..=degree)
            .map(|p| Box::new(move |h: f64| h.powi(2 * p as i32)) as Box<dyn Fn(f64) -> f64>)
            .collect();
        let basis: Vec<&dyn Fn(f64) -> f64> = powers.iter().map(|b| b.as_ref()).collect();
        let target = |h: f64| (1.0 - h * h).powf(k as f64 - 0.5) * l_integral(k, h).unwrap().value;
        let hs: Vec<f64> = (0..40).map(|m| 0.05 + 0.85 * m as f64 / 39.0).collect();
        let (train, hold): (Vec<_>, Vec<_>) = hs.iter().enumerate().partition(|(m, _)| m % 4 != 2);
        let train: Vec<f64> = train.into_iter().map(|(_, h)| *h).collect();
        let ys: Vec<f64> = train.iter().map(|&h| target(h)).collect();
        let fit = lsq_fit(&basis, &train, &ys).unwrap();
        let scale = ys.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (_, &h) in hold {
            assert!(
                (fit.predict(&basis, h) - target(h)).abs() <= 1e-8 * scale,
                "k={k} h={h}"
            );
        }
        // exact degree: leading coefficient does not vanish
        assert!(fit.coefficients[degree].abs() > 1e-6);
    }
}

#[test]
fn odd_total_degree_moments_vanish() {
    for total in (1..=9).step_by(2) {
        for i in 0..=total {
            let v = double_angle_moment(f64::exp, i, total - i).unwrap();
            assert!(v.abs() <= 1e-12, "({i},{}) -> {v}", total - i);
        }
    }
}

#[test]
fn reduction_identity_holds_for_exp_witness() {
    for total in (0..=8).step_by(2) {
        for i in 0..=total {
            let t = dk_table(i, total - i).unwrap();
            assert_eq!(t.d.len(), total / 2 + 1);
            assert!(t.witness_residual <= 1e-10);
            // an unrelated smooth witness as well
            let f = |s: f64| 1.0 / (2.0 - s);
            let lhs = double_angle_moment(f, i, total - i).unwrap();
            assert!((lhs - t.apply(f).unwrap()).abs() <= 1e-10);
        }
    }
}

#[test]
fn binomial_reduction_matches_quadrature() {
    for &h in &[0.2, 0.5, 0.8] {
        for k in 0..=6usize {
            for n in 0..=6i32 {
                let reduced = binom_reduce(k, n, h).unwrap();
                let quad = periodic_trapezoid(
                    |t| t.sin().powi(k as i32) * (1.0 - h * t.sin()).powi(-n),
                    64,
                    1e-15,
                )
                .unwrap()
                .value;
                // |sin^k| <= 1, so L_n bounds the integrand's mass
                let scale = l_by_quadrature(n, h).unwrap();
                assert!(
                    (reduced - quad).abs() <= 1e-9 * scale,
                    "h={h} k={k} n={n}: {reduced} vs {quad}"
                );
            }
        }
    }
}

#[test]
fn da_closed_forms_match_finite_differences() {
    for k in 0..=2 {
        for step in 2..=8 {
            let h = step as f64 / 10.0;
            let fd = richardson_derivative(|t| a_integral(k, t).unwrap(), h, 0.05).unwrap();
            let closed = da_closed_form(k, h).unwrap();
            assert!(
                (fd - closed).abs() <= 1e-7 * (1.0 + closed.abs()),
                "k={k} h={h}: {fd} vs {closed}"
            );
        }
    }
    // the two lowest derivatives differ (they agree only to leading order in neither)
    assert!((da_closed_form(0, 0.5).unwrap() - da_closed_form(1, 0.5).unwrap()).abs() > 0.1);
}

#[test]
fn iij_direct_and_reduced_agree() {
    for total in (0..=10).step_by(2) {
        for i in 0..=total {
            for &h in &[0.2, 0.5, 0.8] {
                let d = iij(i, total - i, h, Method::Direct).unwrap();
                let r = iij(i, total - i, h, Method::Reduced).unwrap();
                assert!(
                    (d - r).abs() <= 1e-8 * (1.0 + d.abs()),
                    "({i},{}) h={h}: {d} vs {r}",
                    total - i
                );
            }
        }
    }
}

#[test]
fn c_delta_does_not_depend_on_delta() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let n = rng.gen_range(1..=6);
        let spec = random_spec(&mut rng, n);
        let g = green_coefficients(&spec);
        let values: Vec<f64> = [0.01, 0.02, 0.05].iter().map(|&d| c_delta(&g, d)).collect();
        let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for v in &values {
            assert!((v - values[0]).abs() <= 1e-8 * scale, "{values:?}");
        }
    }
}

#[test]
fn c_delta_for_radial_linear_is_consistent_with_analytic_value() {
    // I = h²(Σ c I_ij - C_δ) = -4πh for f = x, g = y
    let spec = PerturbationSpec::radial_linear();
    let g = green_coefficients_at(&spec, 0.03);
    let h = 0.37;
    let sum: f64 =
        g.c.terms()
            .map(|(i, j, c)| c * iij(i, j, h, Method::Direct).unwrap())
            .sum();
    let implied = sum + 4.0 * PI / h;
    assert!((implied - g.c_delta).abs() < 1e-10 * (1.0 + g.c_delta.abs()));
    // only even i+j survive; for n = 1 that is i + j = 2
    assert!(g.c.terms().all(|(i, j, _)| i + j == 2));
    assert!(trig_moment(2, 0) > 0.0);
}

#[test]
fn dual_path_on_random_specs() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..25 {
        let n = rng.gen_range(1..=5);
        let spec = random_spec(&mut rng, n);
        let reduced = ReducedAbelian::new(&spec).unwrap();
        for &h in &[0.1, 0.3, 0.5, 0.7, 0.9] {
            let d = i_direct(&spec, h).unwrap().value;
            let r = reduced.eval(h).unwrap().value;
            assert!(
                (d - r).abs() <= 1e-6 * (1.0 + d.abs()),
                "n={n} h={h}: {d} vs {r}"
            );
        }
    }
}
