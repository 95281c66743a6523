//! Identity and property suites behind `cyclescope verify` and the acceptance run.
//!
//! Every suite is deterministic for a given seed: random specs come from
//! per-task ChaCha streams, parallel work is collected in input order, and
//! only order-independent reductions (max, count) cross task boundaries.

use std::f64::consts::PI;
use std::fmt::Write as _;

use clap::ValueEnum;
use cyclescope_core::abelian::{
    block_structure_check, budget, count_zeros, i_direct, inverse_law_check, structure_check,
    ReducedAbelian,
};
use cyclescope_core::flow::{displacement, find_cycles_with, return_map, RunConfig};
use cyclescope_core::numerics::{richardson_derivative, uniform_grid};
use cyclescope_core::reduction::{
    a_integral, c_delta, da_closed_form, dk_table, double_angle_moment, l_by_quadrature, l_integral,
};
use cyclescope_core::system::green_coefficients;
use cyclescope_core::{PerturbationSpec, Result};
use serde::Serialize;

use crate::commands::{zero_report, MethodChoice};
use crate::parallel::ordered_map;
use crate::sampling::task_spec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Level {
    Quick,
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl SuiteResult {
    fn from_result(name: &'static str, r: Result<(bool, String)>) -> Self {
        match r {
            Ok((passed, detail)) => Self {
                name,
                passed,
                detail,
            },
            Err(e) => Self {
                name,
                passed: false,
                detail: format!("error: {e}"),
            },
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub level: Level,
    pub suites: Vec<SuiteResult>,
    pub passed: bool,
}

impl VerifyReport {
    pub fn render_text(&self) -> String {
        let level = match self.level {
            Level::Quick => "quick",
            Level::Full => "full",
        };
        let mut out = format!("cyclescope verify: level {level}, seed {}\n", self.seed);
        for s in &self.suites {
            out.push_str(&s.line());
            out.push('\n');
        }
        let failed = self.suites.iter().filter(|s| !s.passed).count();
        if failed == 0 {
            let _ = writeln!(out, "all {} suites passed", self.suites.len());
        } else {
            let _ = writeln!(out, "{failed} of {} suites failed", self.suites.len());
        }
        out
    }
}

/// Sizes of the seeded samples per level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Workload {
    pub dual_path_specs: usize,
    pub c_delta_specs: usize,
    pub structure_specs_per_n: usize,
    pub budget_specs_per_n: usize,
    pub budget_grid: usize,
}

impl Workload {
    pub fn for_level(level: Level) -> Self {
        match level {
            Level::Quick => Workload {
                dual_path_specs: 25,
                c_delta_specs: 10,
                structure_specs_per_n: 1,
                budget_specs_per_n: 10,
                budget_grid: 200,
            },
            Level::Full => Workload {
                dual_path_specs: 25,
                c_delta_specs: 10,
                structure_specs_per_n: 3,
                budget_specs_per_n: 200,
                budget_grid: 200,
            },
        }
    }
}

// Stream offsets keep the suites' random specs disjoint.
const DUAL_PATH_STREAM: u64 = 1 << 20;
const C_DELTA_STREAM: u64 = 2 << 20;
const STRUCTURE_STREAM: u64 = 3 << 20;
const BUDGET_STREAM: u64 = 4 << 20;
const CYCLE_STREAM: u64 = 5 << 20;

fn levels(lo: usize, hi: usize) -> Vec<f64> {
    (lo..=hi).map(|k| k as f64 / 10.0).collect()
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

pub const L_TOL: f64 = 1e-10;
pub const PARITY_TOL: f64 = 1e-12;
pub const DK_TOL: f64 = 1e-10;
pub const ANALYTIC_TOL: f64 = 1e-9;
pub const DUAL_PATH_TOL: f64 = 1e-6;
pub const C_DELTA_TOL: f64 = 1e-8;
pub const DA_TOL: f64 = 1e-7;
pub const PERIOD_TOL: f64 = 1e-8;
pub const DRIFT_TOL: f64 = 1e-9;
pub const DISPLACEMENT_TOL: f64 = 0.05;
pub const CYCLE_MATCH_TOL: f64 = 0.02;
pub const LAMBDA_CYCLE_TOL: f64 = 0.01;

/// Closed-form `L_k` against the defining quadrature, `k ∈ -2..=2`.
pub fn l_closed_forms() -> SuiteResult {
    SuiteResult::from_result(
        "l-closed-forms",
        (|| {
            let mut worst = 0.0f64;
            for k in -2..=2 {
                for h in levels(1, 9) {
                    let closed = l_integral(k, h)?.value;
                    let quad = l_by_quadrature(k, h)?;
                    worst = worst.max((closed - quad).abs() / (1.0 + closed.abs()));
                }
            }
            Ok((
                worst <= L_TOL,
                format!("max scaled error {worst:.3e} (tol {L_TOL:.0e})"),
            ))
        })(),
    )
}

/// Odd `i + j ≤ 9`: the double-angle moment with `F = exp` vanishes.
pub fn parity() -> SuiteResult {
    SuiteResult::from_result(
        "parity",
        (|| {
            let mut worst = 0.0f64;
            for total in (1..=9).step_by(2) {
                for i in 0..=total {
                    worst = worst.max(double_angle_moment(f64::exp, i, total - i)?.abs());
                }
            }
            Ok((
                worst <= PARITY_TOL,
                format!("max |moment| {worst:.3e} (tol {PARITY_TOL:.0e})"),
            ))
        })(),
    )
}

/// `d_k` identity with the `exp` witness for every `i + j = 2N ≤ 8`.
pub fn dk_identity() -> SuiteResult {
    SuiteResult::from_result(
        "dk-identity",
        (|| {
            let mut worst = 0.0f64;
            for total in (0..=8).step_by(2) {
                for i in 0..=total {
                    let table = dk_table(i, total - i)?;
                    let lhs = double_angle_moment(f64::exp, i, total - i)?;
                    let rhs = table.apply(f64::exp)?;
                    worst = worst.max((lhs - rhs).abs());
                }
            }
            Ok((
                worst <= DK_TOL,
                format!("max witness residual {worst:.3e} (tol {DK_TOL:.0e})"),
            ))
        })(),
    )
}

/// `I = -4πh` for `(x, y)` and `I = 4πh(λ - h)` for the λ-family, by both paths.
/// `λ` is kept off the `h` grid so every value has a relative error.
pub fn analytic_values() -> SuiteResult {
    SuiteResult::from_result(
        "analytic-values",
        (|| {
            type Exact = Box<dyn Fn(f64) -> f64>;
            let cases: Vec<(PerturbationSpec, Exact)> = vec![
                (
                    PerturbationSpec::radial_linear(),
                    Box::new(|h| -4.0 * PI * h),
                ),
                (
                    PerturbationSpec::lambda_family(0.25),
                    Box::new(|h| 4.0 * PI * h * (0.25 - h)),
                ),
                (
                    PerturbationSpec::lambda_family(0.75),
                    Box::new(|h| 4.0 * PI * h * (0.75 - h)),
                ),
            ];
            let mut worst = 0.0f64;
            for (spec, exact) in &cases {
                let reduced = ReducedAbelian::new(spec)?;
                for h in levels(1, 9) {
                    let want = exact(h);
                    for got in [i_direct(spec, h)?.value, reduced.eval(h)?.value] {
                        worst = worst.max((got - want).abs() / want.abs());
                    }
                }
            }
            Ok((
                worst <= ANALYTIC_TOL,
                format!("max relative error {worst:.3e} (tol {ANALYTIC_TOL:.0e})"),
            ))
        })(),
    )
}

/// Direct quadrature against the reduction pipeline on seeded specs with `n ≤ 5`.
pub fn dual_path(seed: u64, count: usize) -> SuiteResult {
    SuiteResult::from_result(
        "dual-path",
        (|| {
            let tasks: Vec<u64> = (0..count as u64).collect();
            let errors = ordered_map(&tasks, |&t| -> Result<f64> {
                let n = 1 + (t % 5) as usize;
                let spec = task_spec(seed, DUAL_PATH_STREAM + t, n);
                let reduced = ReducedAbelian::new(&spec)?;
                let mut worst = 0.0f64;
                for h in [0.1, 0.3, 0.5, 0.7, 0.9] {
                    let d = i_direct(&spec, h)?.value;
                    let r = reduced.eval(h)?.value;
                    worst = worst.max((d - r).abs() / (1.0 + d.abs()));
                }
                Ok(worst)
            })?;
            let worst = max_of(errors);
            Ok((
                worst <= DUAL_PATH_TOL,
                format!("{count} specs, max |direct - reduced|/(1+|I|) {worst:.3e} (tol {DUAL_PATH_TOL:.0e})"),
            ))
        })(),
    )
}

/// `C_δ` at `δ ∈ {0.01, 0.02, 0.05}` on seeded specs.
pub fn c_delta_independence(seed: u64, count: usize) -> SuiteResult {
    let mut worst = 0.0f64;
    for t in 0..count as u64 {
        let n = 1 + (t % 6) as usize;
        let g = green_coefficients(&task_spec(seed, C_DELTA_STREAM + t, n));
        let values: Vec<f64> = [0.01, 0.02, 0.05].iter().map(|&d| c_delta(&g, d)).collect();
        let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for v in &values {
            worst = worst.max((v - values[0]).abs() / scale);
        }
    }
    SuiteResult {
        name: "c-delta",
        passed: worst <= C_DELTA_TOL,
        detail: format!("{count} specs, max relative spread {worst:.3e} (tol {C_DELTA_TOL:.0e})"),
    }
}

/// Closed-form `dA_k/dh` against Richardson differences of `A_k`.
pub fn da_closed_forms() -> SuiteResult {
    SuiteResult::from_result(
        "da-closed-forms",
        (|| {
            let mut worst = 0.0f64;
            for k in 0..=2 {
                for h in levels(2, 8) {
                    let fd =
                        richardson_derivative(|t| a_integral(k, t).unwrap_or(f64::NAN), h, 0.05)?;
                    let closed = da_closed_form(k, h)?;
                    worst = worst.max((fd - closed).abs() / (1.0 + closed.abs()));
                }
            }
            Ok((
                worst <= DA_TOL,
                format!("max scaled error {worst:.3e} (tol {DA_TOL:.0e})"),
            ))
        })(),
    )
}

/// Structure fits: `h⁻¹` law for `n ≤ 2`, the `φ + ψ√(1-h²)` form for `n ∈ 3..=6`,
/// and the `J_3` block shape for `n ∈ {5, 6}`.
pub fn structure(seed: u64, per_n: usize) -> SuiteResult {
    SuiteResult::from_result(
        "structure",
        (|| {
            let tasks: Vec<(usize, u64)> = (1..=6usize)
                .flat_map(|n| (0..per_n as u64).map(move |t| (n, t)))
                .collect();
            let fits = ordered_map(&tasks, |&(n, t)| -> Result<(usize, bool, f64)> {
                let spec = task_spec(seed, STRUCTURE_STREAM + 64 * n as u64 + t, n);
                if n <= 2 {
                    let fit = inverse_law_check(&spec, 40)?;
                    return Ok((
                        n,
                        fit.passed,
                        fit.residual / fit.scale.max(f64::MIN_POSITIVE),
                    ));
                }
                let fit = structure_check(&spec, 48)?;
                let mut passed = fit.passed;
                let mut worst = fit.holdout_residual / fit.scale.max(f64::MIN_POSITIVE);
                if n >= 5 {
                    let block = block_structure_check(&ReducedAbelian::new(&spec)?, 3, 48)?;
                    passed &= block.passed;
                    worst = worst.max(block.holdout_residual / block.scale.max(f64::MIN_POSITIVE));
                }
                Ok((n, passed, worst))
            })?;
            let passed = fits.iter().all(|f| f.1);
            let low = max_of(fits.iter().filter(|f| f.0 <= 2).map(|f| f.2));
            let high = max_of(fits.iter().filter(|f| f.0 > 2).map(|f| f.2));
            Ok((
                passed,
                format!(
                    "{per_n} specs per n, n<=2 max residual/scale {low:.3e} (tol 1e-9), n>=3 max holdout/scale {high:.3e} (tol 1e-6)"
                ),
            ))
        })(),
    )
}

/// Sign changes of `I` on `[0.01, 0.99]` for seeded specs of each `n ≤ 6`.
pub fn zero_budget(seed: u64, per_n: usize, grid: usize) -> SuiteResult {
    SuiteResult::from_result(
        "budget",
        (|| {
            let tasks: Vec<(usize, u64)> = (1..=6usize)
                .flat_map(|n| (0..per_n as u64).map(move |t| (n, t)))
                .collect();
            let reports = ordered_map(&tasks, |&(n, t)| {
                count_zeros(
                    &task_spec(seed, BUDGET_STREAM + 1024 * n as u64 + t, n),
                    grid,
                )
            })?;
            let mut passed = true;
            let mut parts = Vec::new();
            for n in 1..=6 {
                let of_n: Vec<_> = reports.iter().filter(|r| r.n == n).collect();
                let max_count = of_n.iter().map(|r| r.sign_change_count).max().unwrap_or(0);
                passed &= of_n.iter().all(|r| r.within_budget);
                parts.push(format!("n={n} max {max_count}/{}", budget(n)));
            }
            Ok((passed, format!("{per_n} specs per n; {}", parts.join(", "))))
        })(),
    )
}

/// Unperturbed return time and energy drift over `h ∈ {0.1, ..., 0.9}`.
pub fn isochronicity() -> SuiteResult {
    SuiteResult::from_result(
        "isochronicity",
        (|| {
            let zero = PerturbationSpec::zero(0);
            let cfg = RunConfig::default();
            let maps = ordered_map(&levels(1, 9), |&h| return_map(&zero, &cfg, h))?;
            let period = max_of(maps.iter().map(|m| (m.return_time - 2.0 * PI).abs()));
            let drift = max_of(
                maps.iter()
                    .map(|m| m.max_energy_drift.max((m.h1 - m.h0).abs())),
            );
            Ok((
                period <= PERIOD_TOL && drift <= DRIFT_TOL,
                format!("max |T - 2pi| {period:.3e} (tol {PERIOD_TOL:.0e}), max drift {drift:.3e} (tol {DRIFT_TOL:.0e})"),
            ))
        })(),
    )
}

/// Measured `κ` in `return_map(h) - h ≈ κ ε I(h)`, and its ε- and h-independence.
pub fn first_order_displacement() -> SuiteResult {
    SuiteResult::from_result(
        "first-order-displacement",
        (|| {
            let calib = PerturbationSpec::lambda_family(0.5);
            let kappa = displacement(&calib, &RunConfig::with_eps(1e-3), 0.3)?
                / (1e-3 * i_direct(&calib, 0.3)?.value);
            let spec = PerturbationSpec::lambda_family(0.65);
            let mut eps_spread = 0.0f64;
            let mut kappa_spread = 0.0f64;
            for h in [0.2, 0.5, 0.8] {
                let i = i_direct(&spec, h)?.value;
                let a = displacement(&spec, &RunConfig::with_eps(1e-3), h)? / 1e-3;
                let b = displacement(&spec, &RunConfig::with_eps(5e-4), h)? / 5e-4;
                eps_spread = eps_spread.max((a - b).abs() / b.abs());
                kappa_spread = kappa_spread.max((b / i - kappa).abs() / kappa.abs());
            }
            Ok((
                eps_spread <= DISPLACEMENT_TOL && kappa_spread <= DISPLACEMENT_TOL,
                format!(
                    "kappa {kappa:.4}, eps spread {eps_spread:.3e}, h spread {kappa_spread:.3e} (tol {DISPLACEMENT_TOL})"
                ),
            ))
        })(),
    )
}

/// A seeded spec whose `I` has only well-separated, transversal zeros inside `[0.12, 0.88]`.
#[derive(Debug, Clone)]
pub struct CycleCandidate {
    pub task: u64,
    pub spec: PerturbationSpec,
    pub roots: Vec<f64>,
}

const CANDIDATE_SEARCH: u64 = 400;

/// First `wanted` candidates from the seeded stream, in task order.
pub fn cycle_candidates(seed: u64, wanted: usize) -> Result<Vec<CycleCandidate>> {
    let mut found = Vec::new();
    for t in 0..CANDIDATE_SEARCH {
        if found.len() == wanted {
            break;
        }
        let n = 2 + (t % 3) as usize;
        let spec = task_spec(seed, CYCLE_STREAM + t, n);
        let zeros = match zero_report(&spec, 0.05, 0.95, 200, MethodChoice::Direct) {
            Ok(z) => z.report,
            Err(crate::error::CliError::Core(e)) => return Err(e),
            Err(_) => continue,
        };
        let roots = zeros.roots;
        if roots.is_empty() || zeros.ambiguous_cells > 0 {
            continue;
        }
        let inside = roots.iter().all(|&r| (0.12..=0.88).contains(&r));
        let separated = roots.windows(2).all(|w| w[1] - w[0] >= 0.05);
        if !(inside && separated) {
            continue;
        }
        let samples = ordered_map(&uniform_grid(0.05, 0.95, 19), |&h| i_direct(&spec, h))?;
        let peak = max_of(samples.iter().map(|e| e.value.abs()));
        let mut transversal = true;
        for &r in &roots {
            let lo = i_direct(&spec, r - 0.01)?.value;
            let hi = i_direct(&spec, r + 0.01)?.value;
            transversal &= lo * hi < 0.0 && lo.abs().min(hi.abs()) >= 1e-2 * peak;
        }
        if transversal {
            found.push(CycleCandidate {
                task: t,
                spec,
                roots,
            });
        }
    }
    Ok(found)
}

/// Poincaré fixed points on `[0.05, 0.95]`, evaluated in parallel.
pub fn fixed_points(spec: &PerturbationSpec, eps: f64, grid: usize) -> Result<Vec<f64>> {
    let cfg = RunConfig::with_eps(eps);
    let report = find_cycles_with(spec, &cfg, 0.05, 0.95, grid, |hs| {
        ordered_map(hs, |&h| displacement(spec, &cfg, h))
    })?;
    Ok(report.fixed_points.iter().map(|f| f.h_star).collect())
}

/// Zeros of `I` against Poincaré fixed points at `ε = 1e-3`.
pub fn cycle_correspondence(seed: u64) -> SuiteResult {
    SuiteResult::from_result(
        "cycle-correspondence",
        (|| {
            let eps = 1e-3;
            let lambda = fixed_points(&PerturbationSpec::lambda_family(0.5), eps, 37)?;
            let lambda_ok = lambda.len() == 1 && (lambda[0] - 0.5).abs() < LAMBDA_CYCLE_TOL;
            let mut detail = match lambda.first() {
                Some(h) if lambda.len() == 1 => format!("lambda-family fixed point {h:.6}"),
                _ => format!("lambda-family gave {} fixed points", lambda.len()),
            };
            let candidates = cycle_candidates(seed, 3)?;
            let mut passed = lambda_ok && candidates.len() == 3;
            let mut worst = 0.0f64;
            for c in &candidates {
                let fps = fixed_points(&c.spec, eps, 37)?;
                if fps.len() != c.roots.len() {
                    passed = false;
                    let _ = write!(
                        detail,
                        "; task {} has {} zeros but {} cycles",
                        c.task,
                        c.roots.len(),
                        fps.len()
                    );
                    continue;
                }
                for (r, f) in c.roots.iter().zip(&fps) {
                    worst = worst.max((r - f).abs());
                }
            }
            passed &= worst < CYCLE_MATCH_TOL;
            let zeros: usize = candidates.iter().map(|c| c.roots.len()).sum();
            let _ = write!(
                detail,
                "; {} seeded specs, {zeros} zeros, max |zero - cycle| {worst:.3e} (tol {CYCLE_MATCH_TOL})",
                candidates.len()
            );
            Ok((passed, detail))
        })(),
    )
}

/// Runs every suite in the current thread pool.
pub fn run_verify(seed: u64, level: Level) -> VerifyReport {
    let w = Workload::for_level(level);
    let suites = vec![
        l_closed_forms(),
        parity(),
        dk_identity(),
        analytic_values(),
        dual_path(seed, w.dual_path_specs),
        c_delta_independence(seed, w.c_delta_specs),
        da_closed_forms(),
        structure(seed, w.structure_specs_per_n),
        zero_budget(seed, w.budget_specs_per_n, w.budget_grid),
        isochronicity(),
        first_order_displacement(),
        cycle_correspondence(seed),
    ];
    let passed = suites.iter().all(|s| s.passed);
    VerifyReport {
        seed,
        level,
        suites,
        passed,
    }
}
