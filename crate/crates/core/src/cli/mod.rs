//! Command-line entry point.
//!
//! Exit codes: 0 when every check passes, 1 on a tolerance violation or a failed
//! computation, 2 on usage or input errors.

pub mod format;
pub mod input;
pub mod reports;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle::{property_check, OracleConfig, PropertyId, PropertyReport, PureStateDomain};
use crate::quantifiers::{quantify, DeltaKind, QuantifierKind, SolverConfig};
use crate::usd::{eta_grid, usd_sweep, SweepRecord, UsdGridConfig};

use format::{sig12, sweep_csv, table_csv};
use reports::{
    degenerate_report, discrepancy_report, spin_report, theorem1_report, DegenerateReport, Theorem1Report,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "coherence-lab",
    version,
    about = "Coherence quantifiers, oracles and discrimination sweeps"
)]
pub struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true, env = "COHERENCE_LAB_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// Output file (a directory for sweep-usd); standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Emit the formula discrepancies as JSON, to PATH or after the main output.
    #[arg(long, global = true, value_name = "PATH", num_args = 0..=1, default_missing_value = "-")]
    pub report_discrepancies: Option<String>,
    /// Random states used by the discrepancy report.
    #[arg(long, global = true, default_value_t = 50)]
    pub discrepancy_states: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Quantifiers of one state against one frame.
    Quantify(QuantifyArgs),
    /// Randomized checks of the closed forms and their properties.
    #[command(subcommand)]
    Verify(Verify),
    /// Extrema of the α-quantifiers over pure inputs of the discrimination measurement.
    SweepUsd(SweepArgs),
    /// Δc closed forms of the two-qubit spin example against the generic pipeline.
    ExampleSpin(SpinArgs),
}

#[derive(Debug, Args)]
pub struct QuantifyArgs {
    #[arg(long)]
    pub state: PathBuf,
    #[arg(long)]
    pub frame: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,2")]
    pub alpha: Vec<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Verify {
    /// Closed-form α-quantifier against the scalar-block oracle.
    Theorem1(Theorem1Args),
    /// Randomized property suites.
    Properties(PropertiesArgs),
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 64)]
    pub grid_density: usize,
    #[arg(long, default_value_t = 16)]
    pub multistarts: usize,
    #[arg(long, default_value_t = 200)]
    pub refine_iters: usize,
}

impl OracleArgs {
    fn config(&self, seed: u64, tolerance: f64) -> Result<OracleConfig> {
        let cfg = OracleConfig {
            grid_density: self.grid_density,
            multistarts: self.multistarts,
            refine_iters: self.refine_iters,
            seed,
            tolerance,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct Theorem1Args {
    #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
    pub dims: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, value_delimiter = ',', default_value = "0.5,0.9,1.1,1.5,2")]
    pub alphas: Vec<f64>,
    #[arg(long, default_value_t = 1e-6)]
    pub tolerance: f64,
    /// Also compare both oracles on this many states of the spin decomposition.
    #[arg(long, default_value_t = 0)]
    pub degenerate_states: usize,
    /// Independent starts of the full block-diagonal search.
    #[arg(long, default_value_t = 4)]
    pub degenerate_starts: usize,
    #[command(flatten)]
    pub oracle: OracleArgs,
}

#[derive(Debug, Args)]
pub struct PropertiesArgs {
    /// Property names; all when absent.
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    pub which: Vec<String>,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, value_delimiter = ',', default_value = "2,3")]
    pub dims: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.5,0.9,1.5,2")]
    pub alphas: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,2")]
    pub alphas: Vec<f64>,
    /// Number of interior η points k/(N+1).
    #[arg(long, default_value_t = 99)]
    pub eta_grid: usize,
    #[arg(long, default_value_t = 721)]
    pub n_vartheta: usize,
    #[arg(long, default_value_t = 1441)]
    pub n_varphi: usize,
}

#[derive(Debug, Args)]
pub struct SpinArgs {
    /// Points per axis of u and |v|.
    #[arg(long, default_value_t = 20)]
    pub grid: usize,
    #[arg(long, default_value_t = 8)]
    pub phases: usize,
}

/// Parses `args` (program name first) and runs the command on the process streams.
pub fn run<I: IntoIterator<Item = String>>(args: I) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with explicit output streams.
pub fn run_with<I: IntoIterator<Item = String>>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match execute(&cli, out, err) {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_VIOLATION,
        Err(Failure::Usage(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
        Err(Failure::Run(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_VIOLATION
        }
    }
}

enum Failure {
    Usage(Error),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Input(_) | Error::InvalidParameter(_) => Failure::Usage(e),
            other => Failure::Run(other),
        }
    }
}

fn usage(e: Error) -> Failure {
    Failure::Usage(e)
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Input(format!("{}: {e}", path.display()))
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn emit(dest: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match dest {
        Some(path) => std::fs::write(path, text).map_err(|e| io_error(path, e)),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Error::Input(format!("stdout: {e}"))),
    }
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> std::result::Result<bool, Failure> {
    let passed = match &cli.command {
        Command::Quantify(a) => cmd_quantify(cli, a, out)?,
        Command::Verify(Verify::Theorem1(a)) => cmd_theorem1(cli, a, out, err)?,
        Command::Verify(Verify::Properties(a)) => cmd_properties(cli, a, out, err)?,
        Command::SweepUsd(a) => cmd_sweep(cli, a, out, err)?,
        Command::ExampleSpin(a) => cmd_spin(cli, a, out, err)?,
    };
    if let Some(dest) = &cli.report_discrepancies {
        let cfg = OracleConfig {
            seed: cli.seed,
            multistarts: 4,
            ..OracleConfig::default()
        };
        let report = discrepancy_report(cli.seed, cli.discrepancy_states, &cfg)?;
        let path = (dest != "-").then(|| Path::new(dest.as_str()));
        emit(path, &json(&report), out)?;
    }
    Ok(passed)
}

#[derive(Debug, Serialize)]
struct QuantifyRow {
    kind: String,
    alpha: Option<f64>,
    value: f64,
    printed: Option<f64>,
    residual: Option<f64>,
}

fn kind_name(k: QuantifierKind) -> &'static str {
    match k {
        QuantifierKind::Alpha => "alpha",
        QuantifierKind::RelativeEntropy => "relative-entropy",
        QuantifierKind::L1 => "l1",
        QuantifierKind::Robustness => "robustness",
        QuantifierKind::Weight => "weight",
    }
}

fn cmd_quantify(cli: &Cli, a: &QuantifyArgs, out: &mut dyn Write) -> std::result::Result<bool, Failure> {
    let rho = input::load_state(&a.state).map_err(usage)?;
    let frame = input::load_frame(&a.frame).map_err(usage)?;
    if frame.dim() != rho.dim() {
        return Err(usage(Error::DimensionMismatch {
            expected: frame.dim(),
            found: rho.dim(),
        }));
    }
    let mut kinds: Vec<DeltaKind> = a.alpha.iter().map(|&x| DeltaKind::Alpha(x)).collect();
    kinds.extend([DeltaKind::L1, DeltaKind::Robustness, DeltaKind::Weight]);
    let cfg = SolverConfig::default();
    let mut rows = Vec::new();
    for kind in kinds {
        let r = match quantify(&rho, &frame, kind, &cfg) {
            Ok(r) => r,
            // ℓ1 of a Lüders frame needs a representation basis
            Err(Error::MissingRepresentation) => continue,
            Err(e) => return Err(e.into()),
        };
        rows.push(QuantifyRow {
            kind: kind_name(r.kind).into(),
            alpha: matches!(kind, DeltaKind::Alpha(_)).then_some(r.alpha),
            value: r.as_f64(),
            printed: r.printed,
            residual: r.residual,
        });
    }
    let text = match cli.format {
        OutputFormat::Json => json(&rows),
        OutputFormat::Csv => {
            let opt = |x: Option<f64>| x.map(sig12).unwrap_or_default();
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.kind.clone(),
                        opt(r.alpha),
                        sig12(r.value),
                        opt(r.printed),
                        opt(r.residual),
                    ]
                })
                .collect();
            table_csv(&["kind", "alpha", "value", "printed", "residual"], &body)
        }
    };
    emit(cli.out.as_deref(), &text, out)?;
    Ok(true)
}

#[derive(Debug, Serialize)]
struct Theorem1Output {
    theorem1: Theorem1Report,
    degenerate: Option<DegenerateReport>,
}

fn cmd_theorem1(
    cli: &Cli,
    a: &Theorem1Args,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> std::result::Result<bool, Failure> {
    if a.dims.is_empty() || a.dims.iter().any(|&d| !(2..=8).contains(&d)) {
        return Err(usage(Error::InvalidParameter(
            "dims must be non-empty and within 2..=8".into(),
        )));
    }
    if a.alphas.is_empty() {
        return Err(usage(Error::InvalidParameter("alphas must be non-empty".into())));
    }
    let cfg = a.oracle.config(cli.seed, a.tolerance).map_err(usage)?;
    let t1 = theorem1_report(&a.dims, &a.alphas, a.trials, cli.seed, a.tolerance, &cfg)?;
    let _ = writeln!(
        err,
        "theorem1: {} cases, max gap {:.3e} (tolerance {:.1e}) {}",
        t1.rows.len(),
        t1.max_gap,
        t1.tolerance,
        verdict(t1.passed)
    );
    let degenerate = if a.degenerate_states > 0 {
        let full_cfg = OracleConfig {
            multistarts: a.degenerate_starts,
            ..cfg
        };
        let d = degenerate_report(a.degenerate_states, &a.alphas, cli.seed, a.tolerance, &full_cfg)?;
        let _ = writeln!(
            err,
            "degenerate: scalar oracle vs closed form {:.3e}, full minus scalar {:.3e}, \
             scalar overshoot {:.3e}, spectral-sum deficit {:.3e} {}",
            d.max_scalar_gap,
            d.max_full_excess,
            d.max_scalar_overshoot,
            d.max_spectral_sum_deficit,
            verdict(d.passed)
        );
        Some(d)
    } else {
        None
    };
    let passed = t1.passed && degenerate.as_ref().is_none_or(|d| d.passed);
    let text = match cli.format {
        OutputFormat::Json => json(&Theorem1Output {
            theorem1: t1,
            degenerate,
        }),
        OutputFormat::Csv => {
            let body: Vec<Vec<String>> = t1
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.trial.to_string(),
                        r.dim.to_string(),
                        r.rank.to_string(),
                        sig12(r.alpha),
                        sig12(r.closed_form),
                        sig12(r.oracle),
                        sig12(r.gap),
                        sig12(r.oracle_residual),
                    ]
                })
                .collect();
            let mut text = table_csv(
                &[
                    "trial",
                    "dim",
                    "rank",
                    "alpha",
                    "closed_form",
                    "oracle",
                    "gap",
                    "oracle_residual",
                ],
                &body,
            );
            if let Some(d) = &degenerate {
                let body: Vec<Vec<String>> = d
                    .rows
                    .iter()
                    .map(|r| {
                        vec![
                            r.state.to_string(),
                            sig12(r.alpha),
                            sig12(r.spectral_sum),
                            sig12(r.true_minimum),
                            sig12(r.scalar_closed_form),
                            sig12(r.scalar_oracle),
                            sig12(r.full_oracle),
                        ]
                    })
                    .collect();
                text.push_str(&table_csv(
                    &[
                        "state",
                        "alpha",
                        "spectral_sum",
                        "true_minimum",
                        "scalar_closed_form",
                        "scalar_oracle",
                        "full_oracle",
                    ],
                    &body,
                ));
            }
            text
        }
    };
    emit(cli.out.as_deref(), &text, out)?;
    Ok(passed)
}

fn verdict(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}

fn cmd_properties(
    cli: &Cli,
    a: &PropertiesArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> std::result::Result<bool, Failure> {
    let ids: Vec<PropertyId> = if a.which.is_empty() {
        PropertyId::ALL.to_vec()
    } else {
        a.which
            .iter()
            .map(|s| s.parse())
            .collect::<Result<Vec<_>>>()
            .map_err(usage)?
    };
    let mut reports: Vec<PropertyReport> = Vec::new();
    for id in ids {
        let r = property_check(id, &a.dims, &a.alphas, a.trials, cli.seed)?;
        let _ = writeln!(
            err,
            "{}: {} trials, max violation {:.3e} (threshold {:.1e}) {}",
            r.id,
            r.trials,
            r.max_violation,
            r.threshold,
            verdict(r.passed)
        );
        reports.push(r);
    }
    let passed = reports.iter().all(|r| r.passed);
    let text = match cli.format {
        OutputFormat::Json => json(&reports),
        OutputFormat::Csv => {
            let body: Vec<Vec<String>> = reports
                .iter()
                .map(|r| {
                    vec![
                        r.id.to_string(),
                        r.trials.to_string(),
                        sig12(r.max_violation),
                        sig12(r.threshold),
                        r.passed.to_string(),
                    ]
                })
                .collect();
            table_csv(
                &["property", "trials", "max_violation", "threshold", "passed"],
                &body,
            )
        }
    };
    emit(cli.out.as_deref(), &text, out)?;
    Ok(passed)
}

/// Pointwise ordering max ≥ value at |θ±⟩ ≥ min (slack 1e-9), ellipse respected, and
/// for α = 2 the minimum attained at |θ±⟩ (1e-5).
pub fn sweep_passes(r: &SweepRecord) -> bool {
    let ordered =
        r.max_value >= r.value_at_theta_states - 1e-9 && r.value_at_theta_states >= r.min_value - 1e-9;
    let on_ellipse = r.ellipse_violation <= 1e-9;
    let alpha2 = r.alpha != 2.0 || (r.min_value - r.value_at_theta_states).abs() <= 1e-5;
    ordered && on_ellipse && alpha2
}

fn cmd_sweep(
    cli: &Cli,
    a: &SweepArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> std::result::Result<bool, Failure> {
    if a.eta_grid == 0 {
        return Err(usage(Error::InvalidParameter("eta-grid must be positive".into())));
    }
    let cfg = UsdGridConfig {
        domain: PureStateDomain {
            n_vartheta: a.n_vartheta,
            n_varphi: a.n_varphi,
        },
        oracle: OracleConfig {
            seed: cli.seed,
            ..OracleConfig::default()
        },
    };
    let records = usd_sweep(&a.alphas, &eta_grid(a.eta_grid), &cfg)?;
    let failures = records.iter().filter(|r| !sweep_passes(r)).count();
    let _ = writeln!(
        err,
        "sweep-usd: {} cells, {failures} failing checks {}",
        records.len(),
        verdict(failures == 0)
    );
    let per_alpha =
        |alpha: f64| -> Vec<SweepRecord> { records.iter().filter(|r| r.alpha == alpha).copied().collect() };
    match (&cli.out, cli.format) {
        (Some(dir), fmt) => {
            std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
            match fmt {
                OutputFormat::Csv => {
                    for &alpha in &a.alphas {
                        let path = dir.join(format!("usd_alpha_{}.csv", sig12(alpha)));
                        std::fs::write(&path, sweep_csv(&per_alpha(alpha)))
                            .map_err(|e| io_error(&path, e))?;
                    }
                }
                OutputFormat::Json => {
                    let path = dir.join("usd_sweep.json");
                    std::fs::write(&path, json(&records)).map_err(|e| io_error(&path, e))?;
                }
            }
        }
        (None, OutputFormat::Csv) => {
            for &alpha in &a.alphas {
                emit(None, &sweep_csv(&per_alpha(alpha)), out)?;
            }
        }
        (None, OutputFormat::Json) => emit(None, &json(&records), out)?,
    }
    Ok(failures == 0)
}

fn cmd_spin(
    cli: &Cli,
    a: &SpinArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> std::result::Result<bool, Failure> {
    if a.grid < 2 || a.phases == 0 {
        return Err(usage(Error::InvalidParameter(
            "grid must be at least 2 and phases positive".into(),
        )));
    }
    let report = spin_report(a.grid, a.phases)?;
    let _ = writeln!(
        err,
        "example-spin: {} states, closed forms vs pipeline {:.3e}, vs qubit solver {:.3e} {}",
        report.rows.len(),
        report.max_entropic_error,
        report.max_solver_error,
        verdict(report.passed)
    );
    let text = match cli.format {
        OutputFormat::Json => json(&report),
        OutputFormat::Csv => {
            let body: Vec<Vec<String>> = report
                .rows
                .iter()
                .map(|r| {
                    [
                        r.u,
                        r.abs_v,
                        r.arg_v,
                        r.delta_l1,
                        r.delta_c1,
                        r.delta_c2,
                        r.delta_robustness,
                        r.delta_weight,
                        r.pipeline_l1,
                        r.pipeline_c1,
                        r.pipeline_c2,
                        r.qubit_robustness,
                        r.qubit_weight,
                    ]
                    .iter()
                    .map(|&x| sig12(x))
                    .collect()
                })
                .collect();
            table_csv(
                &[
                    "u",
                    "abs_v",
                    "arg_v",
                    "delta_l1",
                    "delta_c1",
                    "delta_c2",
                    "delta_robustness",
                    "delta_weight",
                    "pipeline_l1",
                    "pipeline_c1",
                    "pipeline_c2",
                    "qubit_robustness",
                    "qubit_weight",
                ],
                &body,
            )
        }
    };
    emit(cli.out.as_deref(), &text, out)?;
    Ok(report.passed)
}
