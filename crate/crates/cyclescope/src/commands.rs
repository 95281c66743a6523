//! The eval, zeros, cycles and tables subcommands as library functions.

use clap::ValueEnum;
use cyclescope_core::abelian::{count_zeros_on, i_direct, AbelianEval, ReducedAbelian, ZeroReport};
use cyclescope_core::curve::{H_MAX, H_MIN};
use cyclescope_core::flow::{
    displacement, find_cycles_with, integrate_trace, return_map, FixedPoint, RunConfig,
    MAX_CYCLE_EPS,
};
use cyclescope_core::numerics::uniform_grid;
use cyclescope_core::reduction::{dk_table, l_integral, LMethod};
use cyclescope_core::system::first_integral;
use cyclescope_core::PerturbationSpec;
use serde::Serialize;

use crate::error::{exit, CliError, CliResult};
use crate::output::{csv_table, json, optional_real, real, Format};
use crate::parallel::ordered_map;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodChoice {
    Direct,
    Reduced,
    Both,
}

/// Rendered command output and the exit code it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub text: String,
    pub exit_code: i32,
}

impl CommandOutput {
    fn ok(text: String) -> Self {
        Self {
            text,
            exit_code: exit::OK,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepRequest {
    pub spec: PerturbationSpec,
    pub h_lo: f64,
    pub h_hi: f64,
    pub points: usize,
    pub method: MethodChoice,
    pub format: Format,
}

impl SweepRequest {
    fn validate(&self) -> CliResult<()> {
        if !(H_MIN <= self.h_lo && self.h_lo < self.h_hi && self.h_hi <= H_MAX) {
            return Err(CliError::Usage(format!(
                "need 0.01 <= h-lo < h-hi <= 0.99, got [{}, {}]",
                self.h_lo, self.h_hi
            )));
        }
        if self.points < 2 {
            return Err(CliError::Usage("need at least 2 points".into()));
        }
        Ok(())
    }

    fn grid(&self) -> Vec<f64> {
        uniform_grid(self.h_lo, self.h_hi, self.points)
    }
}

fn evaluate(
    spec: &PerturbationSpec,
    method: MethodChoice,
    hs: &[f64],
) -> cyclescope_core::Result<Vec<AbelianEval>> {
    match method {
        MethodChoice::Reduced => {
            let reduced = ReducedAbelian::new(spec)?;
            ordered_map(hs, |&h| reduced.eval(h))
        }
        _ => ordered_map(hs, |&h| i_direct(spec, h)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalRow {
    pub h: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i_direct: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_direct: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i_reduced: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_reduced: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub difference: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalTable {
    pub method: MethodChoice,
    pub degree: usize,
    pub rows: Vec<EvalRow>,
}

pub fn eval_table(req: &SweepRequest) -> CliResult<EvalTable> {
    req.validate()?;
    let hs = req.grid();
    let direct = match req.method {
        MethodChoice::Reduced => None,
        _ => Some(evaluate(&req.spec, MethodChoice::Direct, &hs)?),
    };
    let reduced = match req.method {
        MethodChoice::Direct => None,
        _ => Some(evaluate(&req.spec, MethodChoice::Reduced, &hs)?),
    };
    let rows = hs
        .iter()
        .enumerate()
        .map(|(k, &h)| {
            let d = direct.as_ref().map(|v| v[k]);
            let r = reduced.as_ref().map(|v| v[k]);
            EvalRow {
                h,
                i_direct: d.map(|e| e.value),
                error_direct: d.map(|e| e.error_estimate),
                i_reduced: r.map(|e| e.value),
                error_reduced: r.map(|e| e.error_estimate),
                difference: d.zip(r).map(|(d, r)| d.value - r.value),
            }
        })
        .collect();
    Ok(EvalTable {
        method: req.method,
        degree: req.spec.degree(),
        rows,
    })
}

pub fn cmd_eval(req: &SweepRequest) -> CliResult<CommandOutput> {
    let table = eval_table(req)?;
    let text = match req.format {
        Format::Json => json(&table)?,
        Format::Csv => {
            let single = |value: fn(&EvalRow) -> (Option<f64>, Option<f64>)| -> Vec<Vec<String>> {
                table
                    .rows
                    .iter()
                    .map(|r| {
                        let (v, e) = value(r);
                        vec![real(r.h), optional_real(v), optional_real(e)]
                    })
                    .collect()
            };
            match req.method {
                MethodChoice::Direct => csv_table(
                    &["h", "I", "error"],
                    &single(|r| (r.i_direct, r.error_direct)),
                )?,
                MethodChoice::Reduced => csv_table(
                    &["h", "I", "error"],
                    &single(|r| (r.i_reduced, r.error_reduced)),
                )?,
                MethodChoice::Both => {
                    let rows: Vec<Vec<String>> = table
                        .rows
                        .iter()
                        .map(|r| {
                            vec![
                                real(r.h),
                                optional_real(r.i_direct),
                                optional_real(r.error_direct),
                                optional_real(r.i_reduced),
                                optional_real(r.error_reduced),
                                optional_real(r.difference),
                            ]
                        })
                        .collect();
                    csv_table(
                        &[
                            "h",
                            "I_direct",
                            "error_direct",
                            "I_reduced",
                            "error_reduced",
                            "difference",
                        ],
                        &rows,
                    )?
                }
            }
        }
    };
    Ok(CommandOutput::ok(text))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZerosOutput {
    #[serde(flatten)]
    pub report: ZeroReport,
    pub h_lo: f64,
    pub h_hi: f64,
    pub grid_points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub notice: Option<String>,
}

pub const IDENTICALLY_ZERO_NOTICE: &str =
    "I vanishes identically on the sweep; the zero bound is vacuous";

/// Sign-change census of `I` on `[h_lo, h_hi]`; the grid is evaluated in parallel.
pub fn zero_report(
    spec: &PerturbationSpec,
    h_lo: f64,
    h_hi: f64,
    points: usize,
    method: MethodChoice,
) -> CliResult<ZerosOutput> {
    let report = count_zeros_on(spec, h_lo, h_hi, points, |hs| evaluate(spec, method, hs))?;
    let notice = report
        .identically_zero
        .then(|| IDENTICALLY_ZERO_NOTICE.to_string());
    Ok(ZerosOutput {
        report,
        h_lo,
        h_hi,
        grid_points: points,
        notice,
    })
}

pub fn cmd_zeros(req: &SweepRequest) -> CliResult<CommandOutput> {
    req.validate()?;
    if req.points < 200 {
        return Err(CliError::Usage(
            "zero counting needs at least 200 points".into(),
        ));
    }
    let out = zero_report(&req.spec, req.h_lo, req.h_hi, req.points, req.method)?;
    let text = match req.format {
        Format::Json => json(&out)?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = out.report.roots.iter().map(|&r| vec![real(r)]).collect();
            csv_table(&["root"], &rows)?
        }
    };
    let exit_code = if out.report.within_budget {
        exit::OK
    } else {
        exit::VERIFICATION
    };
    Ok(CommandOutput { text, exit_code })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CyclesOutput {
    pub section: &'static str,
    pub eps: f64,
    pub h_lo: f64,
    pub h_hi: f64,
    pub grid_points: usize,
    pub fixed_points: Vec<FixedPoint>,
    /// Zeros of `I` on the same range, for comparison with `fixed_points`.
    pub abelian_zeros: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub notice: Option<String>,
}

/// Number of `I` samples behind the printed zeros.
pub const CYCLE_ZERO_GRID: usize = 400;

#[derive(Debug, Clone)]
pub struct CycleRequest {
    pub spec: PerturbationSpec,
    pub eps: f64,
    pub h_lo: f64,
    pub h_hi: f64,
    pub points: usize,
    pub format: Format,
}

pub fn cycles(req: &CycleRequest) -> CliResult<CyclesOutput> {
    if req.eps == 0.0 || !req.eps.is_finite() || req.eps.abs() > MAX_CYCLE_EPS {
        return Err(CliError::Usage(format!(
            "cycles needs 0 < |eps| <= {MAX_CYCLE_EPS}, got {}",
            req.eps
        )));
    }
    let cfg = RunConfig::with_eps(req.eps);
    let report = find_cycles_with(&req.spec, &cfg, req.h_lo, req.h_hi, req.points, |hs| {
        ordered_map(hs, |&h| displacement(&req.spec, &cfg, h))
    })?;
    let zeros = zero_report(
        &req.spec,
        req.h_lo,
        req.h_hi,
        CYCLE_ZERO_GRID,
        MethodChoice::Direct,
    )?;
    Ok(CyclesOutput {
        section: report.section,
        eps: report.eps,
        h_lo: req.h_lo,
        h_hi: req.h_hi,
        grid_points: req.points,
        fixed_points: report.fixed_points,
        abelian_zeros: zeros.report.roots,
        notice: zeros.notice,
    })
}

pub fn cmd_cycles(req: &CycleRequest) -> CliResult<CommandOutput> {
    let out = cycles(req)?;
    let text = match req.format {
        Format::Json => json(&out)?,
        Format::Csv => {
            let mut rows: Vec<Vec<String>> = out
                .fixed_points
                .iter()
                .map(|fp| {
                    let label = serde_json::to_value(fp.stability)?;
                    Ok(vec![
                        "fixed-point".into(),
                        real(fp.h_star),
                        label.as_str().unwrap_or_default().into(),
                    ])
                })
                .collect::<CliResult<_>>()?;
            rows.extend(
                out.abelian_zeros
                    .iter()
                    .map(|&z| vec!["abelian-zero".into(), real(z), String::new()]),
            );
            csv_table(&["kind", "h", "stability"], &rows)?
        }
    };
    Ok(CommandOutput::ok(text))
}

/// `t, x, y, H` along one revolution started at `(sqrt(h0), 0)`.
pub fn orbit_trace(spec: &PerturbationSpec, eps: f64, h0: f64) -> CliResult<String> {
    let cfg = RunConfig::with_eps(eps);
    let period = return_map(spec, &cfg, h0)?.return_time;
    let mut rows = Vec::new();
    let mut failure = None;
    integrate_trace(
        spec,
        &cfg,
        (h0.sqrt(), 0.0),
        period,
        |t, x, y| match first_integral(x, y) {
            Ok(h) => rows.push(vec![real(t), real(x), real(y), real(h)]),
            Err(e) => {
                failure.get_or_insert(e);
            }
        },
    )?;
    if let Some(e) = failure {
        return Err(e.into());
    }
    csv_table(&["t", "x", "y", "H"], &rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LRow {
    pub k: i32,
    pub h: f64,
    pub value: f64,
    pub method: &'static str,
}

fn l_method_name(m: LMethod) -> &'static str {
    match m {
        LMethod::ClosedForm => "closed-form",
        LMethod::BinomialExact => "binomial-exact",
        LMethod::Quadrature => "quadrature",
    }
}

pub fn lk_rows(k_min: i32, k_max: i32, hs: &[f64]) -> CliResult<Vec<LRow>> {
    if k_min > k_max {
        return Err(CliError::Usage(format!("empty k range {k_min}..={k_max}")));
    }
    let mut rows = Vec::new();
    for k in k_min..=k_max {
        for &h in hs {
            let v = l_integral(k, h)?;
            rows.push(LRow {
                k,
                h,
                value: v.value,
                method: l_method_name(v.method),
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DkRow {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub d: f64,
    pub witness_residual: f64,
}

pub const PARITY_NOTICE: &str =
    "i + j is odd: the double-angle moment vanishes identically by parity, so there is no d_k table";

/// Reduction constants for one monomial, or for every even `i + j <= max_order`.
pub fn dk_rows(monomial: Option<(usize, usize)>, max_order: usize) -> CliResult<Vec<DkRow>> {
    let pairs: Vec<(usize, usize)> = match monomial {
        Some((i, j)) => {
            if (i + j) % 2 == 1 {
                return Err(CliError::Usage(PARITY_NOTICE.into()));
            }
            vec![(i, j)]
        }
        None => (0..=max_order)
            .step_by(2)
            .flat_map(|total| (0..=total).map(move |i| (i, total - i)))
            .collect(),
    };
    let tables = ordered_map(&pairs, |&(i, j)| dk_table(i, j))?;
    Ok(tables
        .iter()
        .flat_map(|t| {
            t.d.iter().enumerate().map(move |(k, &d)| DkRow {
                i: t.i,
                j: t.j,
                k,
                d,
                witness_residual: t.witness_residual,
            })
        })
        .collect())
}

pub fn render_lk(rows: &[LRow], format: Format) -> CliResult<String> {
    match format {
        Format::Json => json(&rows),
        Format::Csv => {
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.k.to_string(),
                        real(r.h),
                        real(r.value),
                        r.method.to_string(),
                    ]
                })
                .collect();
            csv_table(&["k", "h", "L", "method"], &body)
        }
    }
}

pub fn render_dk(rows: &[DkRow], format: Format) -> CliResult<String> {
    match format {
        Format::Json => json(&rows),
        Format::Csv => {
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.i.to_string(),
                        r.j.to_string(),
                        r.k.to_string(),
                        real(r.d),
                        real(r.witness_residual),
                    ]
                })
                .collect();
            csv_table(&["i", "j", "k", "d", "witness_residual"], &body)
        }
    }
}
