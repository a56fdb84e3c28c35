//! Command implementations for the `abcd` binary: configure, run, sweep,
//! verify and report. Exit codes: 0 success, 1 configuration error, 2 run
//! failure, 3 check failure.

use std::fs;
use std::path::{Path, PathBuf};

use abcd_core::analysis;
use abcd_core::catalog::build_objective;
use abcd_core::config::{self, GammaSpec, RunConfig, X0Spec};
use abcd_core::error::Error;
use abcd_core::partition::make_partition;
use abcd_core::report::{window_slack, RunReport};
use abcd_core::sampling;
use abcd_core::schedule::generate_schedule;
use abcd_core::simulator::{run, RunOptions, SimulationTrace};
use abcd_core::svg::{render_log_gap_chart, Series};
use abcd_core::trace;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_RUN: i32 = 2;
pub const EXIT_CHECK: i32 = 3;

/// Parameters a sweep may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    DelayBound,
    Gamma,
    Processors,
    Seed,
}

impl SweepParam {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "B" | "b" => Some(SweepParam::DelayBound),
            "gamma" => Some(SweepParam::Gamma),
            "n" => Some(SweepParam::Processors),
            "seed" => Some(SweepParam::Seed),
            _ => None,
        }
    }

    fn label(&self) -> &'static str {
        match self {
            SweepParam::DelayBound => "B",
            SweepParam::Gamma => "gamma",
            SweepParam::Processors => "n",
            SweepParam::Seed => "seed",
        }
    }
}

struct PreparedRun {
    objective: abcd_core::objective::ObjectiveInstance,
    trace: SimulationTrace,
    gamma: f64,
    gamma0: Option<f64>,
}

fn resolve_gamma(cfg: &RunConfig, obj: &abcd_core::objective::ObjectiveInstance) -> Result<(f64, Option<f64>), Error> {
    let gamma0 = match (obj.pl_certificate(), obj.lipschitz()) {
        (Some(cert), Some(l)) => Some(analysis::compute_gamma0(cert.mu, l, cfg.partition.n, cfg.schedule.delay_bound)),
        _ => None,
    };
    let gamma = match cfg.run.gamma {
        GammaSpec::Fixed(g) => g,
        GammaSpec::Auto => match gamma0 {
            Some(g0) => 0.99 * g0,
            None => {
                return Err(Error::config(
                    "run.gamma",
                    "gamma = auto needs an objective carrying both a PL constant and a Lipschitz constant",
                ))
            }
        },
    };
    Ok((gamma, gamma0))
}

fn build_x0(spec: &X0Spec, dim: usize) -> Vec<f64> {
    match spec {
        X0Spec::Zeros => vec![0.0; dim],
        X0Spec::Ones => vec![1.0; dim],
        X0Spec::Gaussian { seed, scale } => sampling::gaussian_point(dim, *scale, *seed),
    }
}

fn execute_run(cfg: &RunConfig) -> Result<PreparedRun, Error> {
    let objective = build_objective(&cfg.objective)?;
    let partition = make_partition(objective.dim(), cfg.partition.spec())?;
    let schedule = generate_schedule(
        cfg.partition.n,
        cfg.run.horizon,
        cfg.schedule.delay_bound,
        cfg.schedule.mode,
        cfg.schedule.seed,
    )?;
    let (gamma, gamma0) = resolve_gamma(cfg, &objective)?;
    let x0 = build_x0(&cfg.run.x0, objective.dim());
    let options = RunOptions {
        record_every: cfg.run.record_every,
        stop_gap_ratio: cfg.run.stop_gap_ratio,
        ..RunOptions::default()
    };
    let trace = run(&objective, &partition, &schedule, &x0, gamma, cfg.run.horizon, options)?;
    Ok(PreparedRun { objective, trace, gamma, gamma0 })
}

fn analyse(prepared: &PreparedRun, cfg: &RunConfig) -> RunReport {
    let obj = &prepared.objective;
    let trace = &prepared.trace;
    let gamma = prepared.gamma;
    let gamma0 = prepared.gamma0;
    let informational = matches!(gamma0, Some(g0) if gamma > g0);

    let constants = match (obj.pl_certificate(), obj.lipschitz()) {
        (Some(cert), Some(l)) => Some(analysis::compute_constants(
            cert.mu,
            l,
            cfg.partition.n,
            cfg.schedule.delay_bound,
            gamma,
        )),
        _ => None,
    };
    let series = analysis::estimate_eta(trace).ok();
    let (bound, slack, eta) = match (&series, obj.pl_certificate()) {
        (Some(s), Some(cert)) if gamma * cert.mu < 1.0 => {
            let b = analysis::check_theorem_bound(s, cert.mu, gamma).ok();
            (b, window_slack(s, cert.mu, gamma), Some(s.eta))
        }
        (Some(s), _) => (None, Vec::new(), Some(s.eta)),
        _ => (None, Vec::new(), None),
    };
    let contraction = series.as_ref().and_then(|s| analysis::fit_contraction(s).ok());
    let lemmas = Some(analysis::check_lemma_inequalities(trace));
    let final_gap = trace
        .f_star
        .map(|fs| obj.value(&trace.final_state).map(|f| f - fs).unwrap_or(f64::NAN));

    RunReport {
        objective: obj.name().to_string(),
        processors: cfg.partition.n,
        delay_bound: cfg.schedule.delay_bound,
        gamma,
        gamma0,
        informational,
        constants,
        eta,
        windows: series.as_ref().map(|s| s.windows()).unwrap_or(0),
        steps: trace.steps,
        final_gap,
        initial_gap: trace.initial_gap(),
        window_slack: slack,
        bound,
        contraction,
        lemmas,
        stopped_early: trace.stopped_early,
    }
}

fn gap_series(trace: &SimulationTrace, label: String) -> Series {
    let points = trace
        .records
        .iter()
        .filter_map(|r| r.gap.map(|g| (r.t as f64, g)))
        .collect();
    Series { label, points }
}

fn summary_line(report: &RunReport) -> String {
    let gap = report
        .final_gap
        .map(|g| format!("{g:.6e}"))
        .unwrap_or_else(|| "n/a (no f*)".into());
    let rho = report
        .contraction
        .map(|c| format!("{:.6}", c.rho_hat))
        .unwrap_or_else(|| "n/a".into());
    let bound = match (&report.bound, report.informational) {
        (Some(b), false) => format!("bound {}", if b.pass { "pass" } else { "FAIL" }),
        (Some(b), true) => format!(
            "bound informational ({}), gamma {:.3e} > gamma0 {:.3e}",
            if b.pass { "holds" } else { "exceeded" },
            report.gamma,
            report.gamma0.unwrap_or(f64::NAN)
        ),
        (None, _) => "bound n/a".into(),
    };
    format!("final gap {gap} | rho_hat {rho} | {bound}")
}

fn write_artifacts(prepared: &PreparedRun, report: &RunReport, cfg: &RunConfig, out_dir: &Path) -> Result<(), Error> {
    fs::create_dir_all(out_dir)?;
    if cfg.output.emit_csv {
        fs::write(out_dir.join("trace.csv"), trace::to_csv_string(&prepared.trace))?;
    }
    if cfg.output.emit_report {
        fs::write(out_dir.join("report.json"), report.to_json())?;
    }
    if cfg.output.emit_svg {
        let series = gap_series(&prepared.trace, format!("B={}", cfg.schedule.delay_bound));
        let svg = render_log_gap_chart("optimality gap vs iteration", &[series]);
        fs::write(out_dir.join("gap.svg"), svg)?;
    }
    Ok(())
}

fn classify(err: &Error) -> i32 {
    match err {
        Error::Divergence { .. } | Error::HistoryUnderflow { .. } => EXIT_RUN,
        Error::Io(_) => EXIT_RUN,
        _ => EXIT_CONFIG,
    }
}

/// `run --config <path> [--out <dir>]`
pub fn cmd_run(config_path: &Path, out_override: Option<&Path>) -> i32 {
    let cfg = match config::load(config_path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let prepared = match execute_run(&cfg) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return classify(&e);
        }
    };
    let report = analyse(&prepared, &cfg);
    let out_dir = out_override.map(PathBuf::from).unwrap_or_else(|| PathBuf::from(&cfg.output.dir));
    if let Err(e) = write_artifacts(&prepared, &report, &cfg, &out_dir) {
        eprintln!("error: {e}");
        return EXIT_RUN;
    }
    println!("{}", summary_line(&report));
    EXIT_OK
}

fn apply_sweep_value(cfg: &mut RunConfig, param: SweepParam, value: f64) -> Result<(), Error> {
    match param {
        SweepParam::DelayBound => {
            if value < 1.0 || value.fract() != 0.0 {
                return Err(Error::config("sweep.values", format!("B must be a positive integer, got {value}")));
            }
            cfg.schedule.delay_bound = value as usize;
        }
        SweepParam::Gamma => {
            if value <= 0.0 {
                return Err(Error::config("sweep.values", format!("gamma must be positive, got {value}")));
            }
            cfg.run.gamma = GammaSpec::Fixed(value);
        }
        SweepParam::Processors => {
            if value < 1.0 || value.fract() != 0.0 {
                return Err(Error::config("sweep.values", format!("n must be a positive integer, got {value}")));
            }
            cfg.partition.n = value as usize;
            cfg.partition.explicit_sizes = None;
        }
        SweepParam::Seed => {
            if value < 0.0 || value.fract() != 0.0 {
                return Err(Error::config("sweep.values", format!("seed must be a nonnegative integer, got {value}")));
            }
            cfg.schedule.seed = value as u64;
        }
    }
    Ok(())
}

/// `sweep --config <path> --param <name> --values v1,v2,...`
pub fn cmd_sweep(config_path: &Path, param: SweepParam, values: &[f64], out_override: Option<&Path>) -> i32 {
    if values.is_empty() {
        eprintln!("error: sweep needs at least one value");
        return EXIT_CONFIG;
    }
    let base = match config::load(config_path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let mut ordered = values.to_vec();
    ordered.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ordered.dedup();

    let out_dir = out_override.map(PathBuf::from).unwrap_or_else(|| PathBuf::from(&base.output.dir));
    if let Err(e) = fs::create_dir_all(&out_dir) {
        eprintln!("error: {e}");
        return EXIT_RUN;
    }

    let mut combined = String::new();
    combined.push_str("run_id,");
    combined.push_str(trace::TRACE_HEADER);
    combined.push('\n');
    let mut curves: Vec<Series> = Vec::new();
    let mut any_failed = false;

    for &value in &ordered {
        let run_id = if value.fract() == 0.0 && value.abs() < 1e15 {
            format!("{}={}", param.label(), value as i64)
        } else {
            format!("{}={}", param.label(), value)
        };
        let mut cfg = base.clone();
        if let Err(e) = apply_sweep_value(&mut cfg, param, value) {
            eprintln!("{run_id}: error: {e}");
            return EXIT_CONFIG;
        }
        match execute_run(&cfg) {
            Ok(prepared) => {
                let report = analyse(&prepared, &cfg);
                println!("{run_id}: {}", summary_line(&report));
                let csv = trace::to_csv_string(&prepared.trace);
                for line in csv.lines().skip(1) {
                    combined.push_str(&run_id);
                    combined.push(',');
                    combined.push_str(line);
                    combined.push('\n');
                }
                curves.push(gap_series(&prepared.trace, run_id));
            }
            Err(e) => {
                eprintln!("{run_id}: error: {e}");
                any_failed = true;
            }
        }
    }

    if base.output.emit_csv {
        if let Err(e) = fs::write(out_dir.join("sweep.csv"), combined) {
            eprintln!("error: {e}");
            return EXIT_RUN;
        }
    }
    if base.output.emit_svg {
        let svg = render_log_gap_chart(&format!("optimality gap vs iteration, sweep over {}", param.label()), &curves);
        if let Err(e) = fs::write(out_dir.join("sweep.svg"), svg) {
            eprintln!("error: {e}");
            return EXIT_RUN;
        }
    }
    if any_failed {
        EXIT_RUN
    } else {
        EXIT_OK
    }
}

/// `check --suite <name>`
pub fn cmd_check(suite: &str) -> i32 {
    let results = match abcd_core::checks::suite_by_name(suite) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let mut failed = 0usize;
    for case in &results {
        println!("{} {:<50} {}", if case.pass { "ok  " } else { "FAIL" }, case.name, case.detail);
        if !case.pass {
            failed += 1;
        }
    }
    println!("{} cases, {} failed", results.len(), failed);
    if failed > 0 {
        EXIT_CHECK
    } else {
        EXIT_OK
    }
}

/// `report --in <csv> --svg <path>`: regenerate the gap chart from a trace
/// CSV. A pure view; numeric outputs are untouched.
pub fn cmd_report(input: &Path, svg_out: &Path) -> i32 {
    let text = match fs::read_to_string(input) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let parsed = match trace::parse_csv(&text) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let points: Vec<(f64, f64)> = parsed
        .records
        .iter()
        .filter_map(|r| r.gap.or(Some(r.f_true)).map(|v| (r.t as f64, v)))
        .collect();
    let series = Series { label: "gap".into(), points };
    let svg = render_log_gap_chart("optimality gap vs iteration", &[series]);
    if let Err(e) = fs::write(svg_out, svg) {
        eprintln!("error: {e}");
        return EXIT_RUN;
    }
    println!("wrote {} ({} rows)", svg_out.display(), parsed.records.len());
    EXIT_OK
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_param_names() {
        assert_eq!(SweepParam::parse("B"), Some(SweepParam::DelayBound));
        assert_eq!(SweepParam::parse("gamma"), Some(SweepParam::Gamma));
        assert_eq!(SweepParam::parse("n"), Some(SweepParam::Processors));
        assert_eq!(SweepParam::parse("seed"), Some(SweepParam::Seed));
        assert_eq!(SweepParam::parse("nope"), None);
    }
}
