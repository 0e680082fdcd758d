//! `lagcheck`: stability and second-law reports for time-differential
//! dual-phase-lag heat conduction models.
//!
//! Exit codes: 0 on success (and on a passing `--assert`), 1 when
//! `--assert` is given and the checked property fails, 2 on usage or
//! runtime errors. All output is deterministic: identical flags produce
//! byte-identical bytes.

mod report;
mod svg;

use clap::{Parser, Subcommand, ValueEnum};
use lagcheck_core::expsum::{characteristic_roots, szego_curve, szego_sample};
use lagcheck_core::model::{ConsistencyVerdict, LagPair, Mode, ModelOrder};
use lagcheck_core::oracle::compare_all;
use lagcheck_core::simulate::free_decay;
use lagcheck_core::spectral::{
    admissible_region, build_positivity_polynomial, classify, known_region_oracle,
    leading_coefficient_bound, AdmissibleRegion,
};
use report::{csv_float, csv_line, num, report_document, to_json_string};
use serde_json::{json, Map, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "lagcheck",
    version,
    about = "Stability and thermodynamic-consistency analysis of dual-phase-lag heat conduction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Report format written to --out or stdout
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report to this path instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Exit 1 when the checked property fails
    #[arg(long, global = true)]
    assert: bool,
    /// Whether a vanishing cycle integral still counts as consistent
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Weak)]
    mode: ModeArg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Strict,
    Weak,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Strict => Mode::Strict,
            ModeArg::Weak => Mode::Weak,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Characteristic roots of the order-n flux equation
    Roots {
        /// Taylor order on the flux side, 1..=50
        #[arg(long)]
        n: u32,
        /// Flux delay time (seconds); roots are reported in x and lambda units
        #[arg(long, default_value_t = 1.0)]
        tau_q: f64,
    },
    /// Scaled roots against the limiting curve |z exp(1-z)| = 1
    Szego {
        /// Largest order to include, 1..=50
        #[arg(long)]
        n_max: u32,
        /// Curve discretization points (at least 64)
        #[arg(long, default_value_t = 1024)]
        samples: usize,
        /// Write a CSV of roots and curve points here
        #[arg(long)]
        out_csv: Option<PathBuf>,
        /// Write an SVG scatter plot here
        #[arg(long)]
        out_svg: Option<PathBuf>,
    },
    /// Second-law verdict for one (n, m) and one delay pair
    Check {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: u32,
        /// Flux delay time
        #[arg(long)]
        tau_q: Option<f64>,
        /// Gradient delay time
        #[arg(long)]
        tau_t: Option<f64>,
        /// Delay ratio tau_T / tau_q (alternative to the pair)
        #[arg(long, conflicts_with_all = ["tau_q", "tau_t"])]
        r: Option<f64>,
    },
    /// Admissible delay-ratio intervals for one (n, m)
    Region {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: u32,
        /// Scan range [1/r_max, r_max]
        #[arg(long, default_value_t = 100.0)]
        r_max: f64,
        /// Relative boundary tolerance, at most 1e-4
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Write a CSV sweep of (r, verdict) here
        #[arg(long)]
        sweep: Option<PathBuf>,
    },
    /// Consistency class for every (n, m) in {0..4}^2
    Grid,
    /// Cycle integral by all three routes (closed form, kernel, ODE)
    Integral {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        tau_q: Option<f64>,
        #[arg(long)]
        tau_t: Option<f64>,
        /// Delay ratio tau_T / tau_q (alternative to the pair)
        #[arg(long, conflicts_with_all = ["tau_q", "tau_t"])]
        r: Option<f64>,
        /// Dimensionless frequency omega * tau_q
        #[arg(long)]
        omega_tau: Option<f64>,
        /// Dimensional frequency (rad/s); requires --tau-q
        #[arg(long, conflicts_with = "omega_tau")]
        omega: Option<f64>,
    },
    /// Free decay of the homogeneous order-n flux equation
    Simulate {
        /// Taylor order, 1..=10
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 1.0)]
        tau_q: f64,
        /// Horizon in units of tau_q
        #[arg(long, default_value_t = 120.0)]
        horizon_tau: f64,
        /// Step in units of tau_q (at most 1/50)
        #[arg(long, default_value_t = 0.015625)]
        step_tau: f64,
        /// Initial values q(0), q'(0), ... (defaults to 1, 0, ...)
        #[arg(long, value_delimiter = ',')]
        init: Option<Vec<f64>>,
        /// Write the sampled |q|(t) trajectory as CSV here
        #[arg(long)]
        trace: Option<PathBuf>,
    },
}

struct CommandOutput {
    json: Value,
    csv: String,
    /// `Some(false)` makes `--assert` exit 1.
    assert_ok: Option<bool>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(output) => {
            let rendered = match cli.format {
                Format::Json => to_json_string(&output.json),
                Format::Csv => output.csv,
            };
            if let Err(e) = write_report(&rendered, cli.out.as_deref()) {
                eprintln!("lagcheck: cannot write report: {e}");
                return ExitCode::from(2);
            }
            if cli.assert && output.assert_ok == Some(false) {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(message) => {
            eprintln!("lagcheck: {message}");
            ExitCode::from(2)
        }
    }
}

fn write_report(text: &str, out: Option<&Path>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<CommandOutput, String> {
    let mode: Mode = cli.mode.into();
    let mode_str = match mode {
        Mode::Strict => "strict",
        Mode::Weak => "weak",
    };
    match &cli.command {
        Command::Roots { n, tau_q } => cmd_roots(*n, *tau_q),
        Command::Szego {
            n_max,
            samples,
            out_csv,
            out_svg,
        } => cmd_szego(*n_max, *samples, out_csv.as_deref(), out_svg.as_deref()),
        Command::Check {
            n,
            m,
            tau_q,
            tau_t,
            r,
        } => {
            let lags = resolve_lags(*tau_q, *tau_t, *r)?;
            cmd_check(*n, *m, &lags, mode, mode_str)
        }
        Command::Region {
            n,
            m,
            r_max,
            tol,
            sweep,
        } => cmd_region(*n, *m, *r_max, *tol, mode, mode_str, sweep.as_deref()),
        Command::Grid => cmd_grid(mode, mode_str),
        Command::Integral {
            n,
            m,
            tau_q,
            tau_t,
            r,
            omega_tau,
            omega,
        } => {
            let lags = resolve_lags(*tau_q, *tau_t, *r)?;
            let omega = resolve_omega(*omega_tau, *omega, *tau_q, &lags)?;
            cmd_integral(*n, *m, &lags, omega)
        }
        Command::Simulate {
            n,
            tau_q,
            horizon_tau,
            step_tau,
            init,
            trace,
        } => cmd_simulate(
            *n,
            *tau_q,
            *horizon_tau,
            *step_tau,
            init.as_deref(),
            trace.as_deref(),
        ),
    }
}

/// Delay times from either an explicit pair or a ratio (then `tau_q = 1`).
fn resolve_lags(tau_q: Option<f64>, tau_t: Option<f64>, r: Option<f64>) -> Result<LagPair, String> {
    let (tq, tt) = match (tau_q, tau_t, r) {
        (None, None, Some(r)) => (1.0, r),
        (tq, tt, None) => (tq.unwrap_or(1.0), tt.unwrap_or(1.0)),
        _ => return Err("give either --r or the --tau-q/--tau-t pair, not both".into()),
    };
    LagPair::new(tq, tt).map_err(|e| e.to_string())
}

/// Frequency from `--omega-tau` (preferred) or dimensional `--omega`, the
/// latter only next to an explicit `--tau-q`.
fn resolve_omega(
    omega_tau: Option<f64>,
    omega: Option<f64>,
    explicit_tau_q: Option<f64>,
    lags: &LagPair,
) -> Result<f64, String> {
    match (omega_tau, omega) {
        (Some(wt), None) => {
            if wt <= 0.0 {
                return Err("--omega-tau must be positive".into());
            }
            Ok(wt / lags.tau_q())
        }
        (None, Some(w)) => {
            if explicit_tau_q.is_none() {
                return Err("dimensional --omega requires an explicit --tau-q".into());
            }
            if w <= 0.0 {
                return Err("--omega must be positive".into());
            }
            Ok(w)
        }
        (None, None) => Err("one of --omega-tau or --omega is required".into()),
        _ => unreachable!("clap conflict rules forbid both"),
    }
}

fn verdict_json(verdict: &ConsistencyVerdict, lags: &LagPair, mode: Mode) -> Value {
    json!({
        "kind": verdict.kind_str(),
        "consistent": verdict.is_consistent(mode),
        "witness_omega": verdict.witness_omega().map_or(Value::Null, num),
        "witness_omega_tau": verdict
            .witness_omega()
            .map_or(Value::Null, |w| num(w * lags.tau_q())),
    })
}

fn interval_json(region: &AdmissibleRegion) -> Value {
    Value::Array(
        region
            .intervals
            .iter()
            .map(|iv| {
                json!({
                    "r_low": num(iv.r_low),
                    "r_high": num(iv.r_high),
                    "low_kind": iv.low_kind.as_str(),
                    "high_kind": iv.high_kind.as_str(),
                })
            })
            .collect(),
    )
}

fn header(text: &str) -> Vec<String> {
    text.split(',').map(String::from).collect()
}

fn cmd_roots(n: u32, tau_q: f64) -> Result<CommandOutput, String> {
    if !(1..=50).contains(&n) {
        return Err(format!(
            "--n must lie in 1..=50 to have roots to report, got {n}"
        ));
    }
    if tau_q <= 0.0 {
        return Err("--tau-q must be positive".into());
    }
    let rep = characteristic_roots(n).map_err(|e| e.to_string())?;
    let roots_json: Vec<Value> = rep
        .roots
        .iter()
        .map(|x| {
            json!({
                "x_re": num(x.re),
                "x_im": num(x.im),
                "lambda_re": num(x.re / tau_q),
                "lambda_im": num(x.im / tau_q),
                "modulus_x": num(x.norm()),
            })
        })
        .collect();
    let json = report_document(
        "roots",
        json!({"n": n, "tau_q": num(tau_q)}),
        json!({
            "roots": roots_json,
            "spectral_abscissa_x": num(rep.spectral_abscissa),
            "spectral_abscissa_lambda": num(rep.spectral_abscissa / tau_q),
            "ek_satisfied": rep.ek_satisfied,
            "real_root_count": rep.real_root_count,
            "classification": rep.classification.as_str(),
            "max_rel_residual": num(rep.max_rel_residual),
        }),
    );
    let mut csv = csv_line(&header("n,x_re,x_im,lambda_re,lambda_im,modulus_x"));
    for x in &rep.roots {
        csv.push_str(&csv_line(&[
            n.to_string(),
            csv_float(x.re),
            csv_float(x.im),
            csv_float(x.re / tau_q),
            csv_float(x.im / tau_q),
            csv_float(x.norm()),
        ]));
    }
    Ok(CommandOutput {
        json,
        csv,
        assert_ok: None,
    })
}

fn cmd_szego(
    n_max: u32,
    samples: usize,
    out_csv: Option<&Path>,
    out_svg: Option<&Path>,
) -> Result<CommandOutput, String> {
    if !(1..=50).contains(&n_max) {
        return Err(format!("--n-max must lie in 1..=50, got {n_max}"));
    }
    if samples < 64 {
        return Err("--samples must be at least 64".into());
    }
    let curve = szego_curve(samples);
    let mut per_n = Vec::new();
    let mut all_roots = Vec::new();
    let mut csv = csv_line(&header("kind,n,re,im,distance"));
    for n in 1..=n_max {
        let sample = szego_sample(n, samples).map_err(|e| e.to_string())?;
        for z in &sample.scaled_roots {
            let distance = curve
                .iter()
                .map(|c| (z - c).norm())
                .fold(f64::INFINITY, f64::min);
            csv.push_str(&csv_line(&[
                "root".into(),
                n.to_string(),
                csv_float(z.re),
                csv_float(z.im),
                csv_float(distance),
            ]));
            all_roots.push((n, *z));
        }
        per_n.push(json!({
            "n": n,
            "max_distance": num(sample.max_distance),
        }));
    }
    for z in &curve {
        csv.push_str(&csv_line(&[
            "curve".into(),
            String::new(),
            csv_float(z.re),
            csv_float(z.im),
            String::new(),
        ]));
    }
    if let Some(path) = out_csv {
        std::fs::write(path, &csv).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    if let Some(path) = out_svg {
        let plot = svg::scaled_roots_plot(&curve, &all_roots);
        std::fs::write(path, plot).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    let json = report_document(
        "szego",
        json!({"n_max": n_max, "samples": samples}),
        json!({
            "per_n": per_n,
            "curve_points": curve.len(),
        }),
    );
    Ok(CommandOutput {
        json,
        csv,
        assert_ok: None,
    })
}

const INSTABILITY_RATIONALE: &str = "orders five and above are dynamically unstable (the characteristic equation has a root with positive real part), so the second-law analysis requires n <= 4 and m <= 4";

fn cmd_check(
    n: u32,
    m: u32,
    lags: &LagPair,
    mode: Mode,
    mode_str: &str,
) -> Result<CommandOutput, String> {
    if n > 4 || m > 4 {
        return Err(INSTABILITY_RATIONALE.into());
    }
    let order = ModelOrder::new(n, m);
    let verdict = classify(order, lags).map_err(|e| e.to_string())?;
    let poly = build_positivity_polynomial(order, lags.ratio()).map_err(|e| e.to_string())?;
    let json = report_document(
        "check",
        json!({
            "n": n,
            "m": m,
            "tau_q": num(lags.tau_q()),
            "tau_t": num(lags.tau_t()),
            "r": num(lags.ratio()),
            "mode": mode_str,
        }),
        json!({
            "verdict": verdict_json(&verdict, lags, mode),
            "positivity_coefficients": Value::Array(poly.coeffs.iter().map(|c| num(*c)).collect()),
        }),
    );
    let mut csv = csv_line(&header(
        "n,m,tau_q,tau_t,r,verdict,consistent,witness_omega",
    ));
    csv.push_str(&csv_line(&[
        n.to_string(),
        m.to_string(),
        csv_float(lags.tau_q()),
        csv_float(lags.tau_t()),
        csv_float(lags.ratio()),
        verdict.kind_str().into(),
        verdict.is_consistent(mode).to_string(),
        verdict.witness_omega().map(csv_float).unwrap_or_default(),
    ]));
    Ok(CommandOutput {
        json,
        csv,
        assert_ok: Some(verdict.is_consistent(mode)),
    })
}

fn cmd_region(
    n: u32,
    m: u32,
    r_max: f64,
    tol: f64,
    mode: Mode,
    mode_str: &str,
    sweep: Option<&Path>,
) -> Result<CommandOutput, String> {
    if n > 4 || m > 4 {
        return Err(INSTABILITY_RATIONALE.into());
    }
    if r_max < 10.0 {
        return Err("--r-max must be at least 10".into());
    }
    if !(tol > 0.0 && tol <= 1e-4) {
        return Err("--tol must lie in (0, 1e-4]".into());
    }
    let order = ModelOrder::new(n, m);
    let region = admissible_region(order, r_max, tol, mode).map_err(|e| e.to_string())?;
    let mut results = Map::new();
    results.insert("intervals".into(), interval_json(&region));
    if let Some(oracle) = known_region_oracle(order) {
        results.insert("published_region".into(), interval_json(&oracle));
    }
    if let Some(bound) = leading_coefficient_bound(order) {
        results.insert("leading_coefficient_bound".into(), num(bound));
    }
    let mut csv = csv_line(&header("n,m,mode,r_low,low_kind,r_high,high_kind"));
    for iv in &region.intervals {
        csv.push_str(&csv_line(&[
            n.to_string(),
            m.to_string(),
            mode_str.into(),
            csv_float(iv.r_low),
            iv.low_kind.as_str().into(),
            csv_float(iv.r_high),
            iv.high_kind.as_str().into(),
        ]));
    }
    if let Some(path) = sweep {
        let mut sweep_csv = csv_line(&header("r,verdict"));
        const SWEEP_POINTS: usize = 1024;
        for i in 0..SWEEP_POINTS {
            let r = (-(r_max.ln()) + 2.0 * r_max.ln() * i as f64 / (SWEEP_POINTS - 1) as f64).exp();
            let verdict = classify(order, &LagPair::new(1.0, r).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            sweep_csv.push_str(&csv_line(&[csv_float(r), verdict.kind_str().into()]));
        }
        std::fs::write(path, sweep_csv)
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    let json = report_document(
        "region",
        json!({
            "n": n,
            "m": m,
            "r_max": num(r_max),
            "tol": num(tol),
            "mode": mode_str,
        }),
        Value::Object(results),
    );
    Ok(CommandOutput {
        json,
        csv,
        assert_ok: Some(!region.is_empty()),
    })
}

fn cmd_grid(mode: Mode, mode_str: &str) -> Result<CommandOutput, String> {
    let mut cells = Vec::new();
    let mut csv = csv_line(&header("n,m,class,intervals"));
    for n in 0..=4u32 {
        for m in 0..=4u32 {
            let order = ModelOrder::new(n, m);
            let region = admissible_region(order, 100.0, 1e-6, mode).map_err(|e| e.to_string())?;
            let unbounded_everywhere = region.intervals.len() == 1
                && region.intervals[0].r_low == 0.0
                && region.intervals[0].r_high.is_infinite();
            let class = if region.is_empty() {
                "never"
            } else if unbounded_everywhere {
                "always"
            } else {
                "conditional"
            };
            let mut cell = Map::new();
            cell.insert("n".into(), json!(n));
            cell.insert("m".into(), json!(m));
            cell.insert("class".into(), json!(class));
            if class == "conditional" {
                cell.insert("intervals".into(), interval_json(&region));
            }
            if class == "never" {
                // witness at the symmetric ratio documents the violation
                let verdict =
                    classify(order, &LagPair::new(1.0, 1.0).unwrap()).map_err(|e| e.to_string())?;
                if let Some(w) = verdict.witness_omega() {
                    cell.insert("witness_omega_tau_at_r1".into(), num(w));
                }
            }
            let intervals_text = region
                .intervals
                .iter()
                .map(|iv| format!("{}..{}", iv.r_low, iv.r_high))
                .collect::<Vec<_>>()
                .join(";");
            csv.push_str(&csv_line(&[
                n.to_string(),
                m.to_string(),
                class.into(),
                intervals_text,
            ]));
            cells.push(Value::Object(cell));
        }
    }
    let json = report_document(
        "grid",
        json!({"mode": mode_str}),
        json!({
            "cells": cells,
            "notes": [
                "(1,1) is consistent for every positive delay pair and is counted among the always-consistent cells, although summary listings sometimes omit it",
            ],
        }),
    );
    Ok(CommandOutput {
        json,
        csv,
        assert_ok: None,
    })
}

fn cmd_integral(n: u32, m: u32, lags: &LagPair, omega: f64) -> Result<CommandOutput, String> {
    if n > 4 || m > 4 {
        return Err(INSTABILITY_RATIONALE.into());
    }
    if n < 1 {
        return Err("--n must be at least 1: the oracles integrate the flux-side ODE".into());
    }
    let order = ModelOrder::new(n, m);
    let cmp = compare_all(order, lags, omega).map_err(|e| e.to_string())?;
    const AGREEMENT_TOL: f64 = 1e-4;
    let agree = cmp.max_rel_disagreement <= AGREEMENT_TOL;
    let json = report_document(
        "integral",
        json!({
            "n": n,
            "m": m,
            "tau_q": num(lags.tau_q()),
            "tau_t": num(lags.tau_t()),
            "r": num(lags.ratio()),
            "omega": num(omega),
            "omega_tau": num(omega * lags.tau_q()),
        }),
        json!({
            "value_spectral": num(cmp.value_spectral),
            "value_kernel": num(cmp.value_kernel),
            "value_ode": num(cmp.value_ode),
            "max_rel_disagreement": num(cmp.max_rel_disagreement),
            "agreement_tol": num(AGREEMENT_TOL),
            "oracles_agree": agree,
        }),
    );
    let mut csv = csv_line(&header(
        "n,m,tau_q,tau_t,omega,value_spectral,value_kernel,value_ode,max_rel_disagreement",
    ));
    csv.push_str(&csv_line(&[
        n.to_string(),
        m.to_string(),
        csv_float(lags.tau_q()),
        csv_float(lags.tau_t()),
        csv_float(omega),
        csv_float(cmp.value_spectral),
        csv_float(cmp.value_kernel),
        csv_float(cmp.value_ode),
        csv_float(cmp.max_rel_disagreement),
    ]));
    Ok(CommandOutput {
        json,
        csv,
        assert_ok: Some(agree),
    })
}

fn cmd_simulate(
    n: u32,
    tau_q: f64,
    horizon_tau: f64,
    step_tau: f64,
    init: Option<&[f64]>,
    trace: Option<&Path>,
) -> Result<CommandOutput, String> {
    if !(1..=10).contains(&n) {
        return Err(format!("--n must lie in 1..=10, got {n}"));
    }
    if tau_q <= 0.0 || horizon_tau <= 0.0 || step_tau <= 0.0 {
        return Err("--tau-q, --horizon-tau and --step-tau must be positive".into());
    }
    let initial = match init {
        Some(values) => {
            if values.len() != n as usize {
                return Err(format!(
                    "--init needs exactly n = {n} values, got {}",
                    values.len()
                ));
            }
            values.to_vec()
        }
        None => (0..n).map(|j| if j == 0 { 1.0 } else { 0.0 }).collect(),
    };
    let traj = free_decay(n, tau_q, &initial, horizon_tau * tau_q, step_tau * tau_q)
        .map_err(|e| e.to_string())?;
    let abscissa = characteristic_roots(n)
        .map_err(|e| e.to_string())?
        .spectral_abscissa;
    let json = report_document(
        "simulate",
        json!({
            "n": n,
            "tau_q": num(tau_q),
            "horizon_tau": num(horizon_tau),
            "step_tau": num(step_tau),
            "init": Value::Array(initial.iter().map(|v| num(*v)).collect()),
        }),
        json!({
            "outcome": traj.outcome.as_str(),
            "fitted_rate": num(traj.fitted_rate),
            "fitted_rate_tau": num(traj.fitted_rate * tau_q),
            "spectral_abscissa_x": num(abscissa),
            "samples": traj.values.len(),
            "final_abs_q": num(*traj.values.last().unwrap()),
        }),
    );
    let mut csv = csv_line(&header("t,abs_q"));
    for (t, v) in traj.times.iter().zip(traj.values.iter()) {
        csv.push_str(&csv_line(&[csv_float(*t), csv_float(*v)]));
    }
    if let Some(path) = trace {
        std::fs::write(path, &csv).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    let decayed = traj.outcome == lagcheck_core::simulate::Outcome::Decayed;
    Ok(CommandOutput {
        json,
        csv,
        assert_ok: Some(decayed),
    })
}
