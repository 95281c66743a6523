//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::process::ExitCode;
use std::time::Instant;

use cyclescope::output::json;
use cyclescope::parallel::with_threads;
use cyclescope::verify::{
    analytic_values, c_delta_independence, cycle_correspondence, da_closed_forms, dk_identity,
    dual_path, first_order_displacement, isochronicity, l_closed_forms, parity, run_verify,
    structure, zero_budget, Level, SuiteResult,
};

const SEED: u64 = 20240917;

fn determinism() -> SuiteResult {
    let threads = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .max(4);
    let render = |t: usize| {
        with_threads(Some(t), || {
            let report = run_verify(SEED, Level::Quick);
            format!("{}{}", report.render_text(), json(&report).unwrap())
        })
        .unwrap()
    };
    let first = render(threads);
    let second = render(threads);
    let single = render(1);
    let passed = first == second && first == single;
    SuiteResult {
        name: "determinism",
        passed,
        detail: format!(
            "quick report {} bytes; two {threads}-thread runs identical: {}; 1-thread run identical: {}",
            first.len(),
            first == second,
            first == single
        ),
    }
}

fn main() -> ExitCode {
    type Criterion = (&'static str, Box<dyn Fn() -> SuiteResult>);
    let criteria: Vec<Criterion> = vec![
        ("closed-form L agreement", Box::new(l_closed_forms)),
        ("parity of double-angle moments", Box::new(parity)),
        ("d_k reduction identity", Box::new(dk_identity)),
        ("analytic Abelian values", Box::new(analytic_values)),
        ("dual-path equivalence", Box::new(|| dual_path(SEED, 25))),
        (
            "C_delta well-definedness",
            Box::new(|| c_delta_independence(SEED, 10)),
        ),
        ("dA closed forms", Box::new(da_closed_forms)),
        ("structure fits", Box::new(|| structure(SEED, 3))),
        (
            "zero budget, 200 specs per n",
            Box::new(|| zero_budget(SEED, 200, 200)),
        ),
        ("isochronicity", Box::new(isochronicity)),
        (
            "zeros-to-cycles correspondence",
            Box::new(|| cycle_correspondence(SEED)),
        ),
        ("determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (k, (title, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let r = run();
        failed += usize::from(!r.passed);
        println!(
            "criterion {:>2} {} [{}]: {} ({:.1}s)",
            k + 1,
            if r.passed { "PASS" } else { "FAIL" },
            title,
            r.detail,
            start.elapsed().as_secs_f64()
        );
    }
    let extra = first_order_displacement();
    failed += usize::from(!extra.passed);
    println!("supplementary {}", extra.line());
    if failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} failed");
        ExitCode::FAILURE
    }
}
