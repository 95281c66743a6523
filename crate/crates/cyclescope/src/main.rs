use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cyclescope::commands::{
    cmd_cycles, cmd_eval, cmd_zeros, cycles, dk_rows, lk_rows, orbit_trace, render_dk, render_lk,
    CommandOutput, CycleRequest, MethodChoice, SweepRequest,
};
use cyclescope::error::{exit, CliError, CliResult};
use cyclescope::output::{json, Format};
use cyclescope::parallel::{env_threads, with_threads};
use cyclescope::sampling::task_spec;
use cyclescope::spec_file::load_spec;
use cyclescope::verify::{run_verify, Level};
use cyclescope_core::numerics::uniform_grid;
use cyclescope_core::PerturbationSpec;

#[derive(Debug, Parser)]
#[command(
    name = "cyclescope",
    version,
    about = "Abelian integrals and limit cycles of a perturbed isochronous center"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate I(h) on a uniform grid.
    Eval(EvalArgs),
    /// Count and locate sign changes of I(h).
    Zeros(EvalArgs),
    /// Locate Poincaré fixed points of the perturbed flow.
    Cycles(CycleArgs),
    /// Run the identity and property suites.
    Verify(VerifyArgs),
    /// Dump L_k(h) or d_k tables.
    Tables(TableArgs),
}

#[derive(Debug, Args)]
struct SpecSource {
    /// Perturbation as JSON: {"n": .., "a": [[i, j, v], ..], "b": [..]}.
    #[arg(long, conflicts_with = "random_degree")]
    spec: Option<PathBuf>,
    /// Use a seeded random dense spec of this degree instead of --spec.
    #[arg(long)]
    random_degree: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SpecSource {
    fn resolve(&self) -> CliResult<PerturbationSpec> {
        match (&self.spec, self.random_degree) {
            (Some(path), _) => load_spec(path),
            (None, Some(n)) => Ok(task_spec(self.seed, 0, n)),
            (None, None) => Err(CliError::Usage(
                "one of --spec or --random-degree is required".into(),
            )),
        }
    }
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[command(flatten)]
    source: SpecSource,
    #[arg(long)]
    h_lo: Option<f64>,
    #[arg(long)]
    h_hi: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long, value_enum, default_value_t = MethodChoice::Direct)]
    method: MethodChoice,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Args)]
struct CycleArgs {
    #[command(flatten)]
    source: SpecSource,
    #[arg(long, allow_hyphen_values = true)]
    eps: f64,
    #[arg(long, default_value_t = 0.05)]
    h_lo: f64,
    #[arg(long, default_value_t = 0.95)]
    h_hi: f64,
    /// Displacement grid size.
    #[arg(long, default_value_t = 37)]
    points: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write a (t, x, y, H) CSV trace of one revolution from each fixed point.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Level::Quick)]
    level: Level,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    format: ReportFormat,
}

#[derive(Debug, Args)]
struct TableArgs {
    #[arg(value_enum)]
    kind: TableKind,
    #[arg(long, default_value_t = -2, allow_hyphen_values = true)]
    k_min: i32,
    #[arg(long, default_value_t = 2, allow_hyphen_values = true)]
    k_max: i32,
    #[arg(long, default_value_t = 0.1)]
    h_lo: f64,
    #[arg(long, default_value_t = 0.9)]
    h_hi: f64,
    #[arg(long, default_value_t = 9)]
    points: usize,
    /// Single monomial cos^i sin^j for the dk table.
    #[arg(long, requires = "j")]
    i: Option<usize>,
    #[arg(long, requires = "i")]
    j: Option<usize>,
    /// Largest even i + j for the full dk table.
    #[arg(long, default_value_t = 8)]
    max_order: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TableKind {
    Lk,
    Dk,
}

fn sweep_request(
    args: &EvalArgs,
    default_points: usize,
    default_format: Format,
) -> CliResult<SweepRequest> {
    Ok(SweepRequest {
        spec: args.source.resolve()?,
        h_lo: args.h_lo.unwrap_or(0.01),
        h_hi: args.h_hi.unwrap_or(0.99),
        points: args.points.unwrap_or(default_points),
        method: args.method,
        format: args.format.unwrap_or(default_format),
    })
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn run(cli: &Cli) -> CliResult<CommandOutput> {
    match &cli.command {
        Command::Eval(args) => cmd_eval(&sweep_request(args, 9, Format::Csv)?),
        Command::Zeros(args) => cmd_zeros(&sweep_request(args, 400, Format::Json)?),
        Command::Cycles(args) => {
            let req = CycleRequest {
                spec: args.source.resolve()?,
                eps: args.eps,
                h_lo: args.h_lo,
                h_hi: args.h_hi,
                points: args.points,
                format: args.format,
            };
            if let Some(path) = &args.trace {
                let found = cycles(&req)?;
                let mut text = String::new();
                for (k, fp) in found.fixed_points.iter().enumerate() {
                    let trace = orbit_trace(&req.spec, req.eps, fp.h_star)?;
                    let mut lines = trace.lines();
                    let header = lines.next().unwrap_or_default();
                    if k == 0 {
                        text.push_str(&format!("orbit,{header}\n"));
                    }
                    for line in lines {
                        text.push_str(&format!("{k},{line}\n"));
                    }
                }
                if text.is_empty() {
                    text.push_str("orbit,t,x,y,H\n");
                }
                write_file(path, &text)?;
            }
            cmd_cycles(&req)
        }
        Command::Verify(args) => {
            let report = run_verify(args.seed, args.level);
            let text = match args.format {
                ReportFormat::Text => report.render_text(),
                ReportFormat::Json => json(&report)?,
            };
            let exit_code = if report.passed {
                exit::OK
            } else {
                exit::VERIFICATION
            };
            Ok(CommandOutput { text, exit_code })
        }
        Command::Tables(args) => {
            let text = match args.kind {
                TableKind::Lk => {
                    if args.points < 1 || args.h_lo.is_nan() || args.h_lo > args.h_hi {
                        return Err(CliError::Usage(
                            "need h-lo <= h-hi and at least one point".into(),
                        ));
                    }
                    let hs = if args.points == 1 {
                        vec![args.h_lo]
                    } else {
                        uniform_grid(args.h_lo, args.h_hi, args.points)
                    };
                    render_lk(&lk_rows(args.k_min, args.k_max, &hs)?, args.format)?
                }
                TableKind::Dk => {
                    render_dk(&dk_rows(args.i.zip(args.j), args.max_order)?, args.format)?
                }
            };
            Ok(CommandOutput {
                text,
                exit_code: exit::OK,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                exit::USAGE as u8
            } else {
                exit::OK as u8
            });
        }
    };
    let result = env_threads()
        .and_then(|threads| with_threads(threads, || run(&cli)))
        .and_then(|r| r);
    match result {
        Ok(output) => {
            let written = match &cli.out {
                Some(path) => write_file(path, &output.text),
                None => {
                    let mut stdout = std::io::stdout().lock();
                    stdout
                        .write_all(output.text.as_bytes())
                        .and_then(|_| stdout.flush())
                        .map_err(|source| CliError::Io {
                            path: "stdout".into(),
                            source,
                        })
                }
            };
            match written {
                Ok(()) => ExitCode::from(output.exit_code as u8),
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
