//! The run-configuration file: a flat, sectioned, human-editable text
//! format with a pinned key set.
//!
//! ```text
//! [objective]
//! kind = diag-quadratic          # pl-sine | least-squares | logistic-l2
//! diag = 1,4                     # diag-quadratic
//! dim = 4                        # pl-sine
//! matrix = 1,0;0,0               # least-squares rows, ';' separated
//! rhs = 1,0
//! lambda = 0.01                  # logistic-l2
//! source = synthetic             # or a dataset path
//! samples = 2000
//! features = 200
//! separation = 0.5
//! data-seed = 7
//! preprocess = true
//! feature-scale = 1
//!
//! [partition]
//! n = 2
//! sizes = equal                  # or an explicit comma list
//!
//! [schedule]
//! b = 5
//! mode = uniform-random          # synchronous | periodic | adversarial-max
//! period = 2                     # periodic only
//! seed = 42
//!
//! [run]
//! horizon = 100
//! gamma = auto                   # auto = 0.99·γ₀, or a number
//! x0 = zeros                     # ones | gaussian:SEED[:SCALE]
//! record-every = 1
//! stop-gap-ratio = 1e-3          # optional early stop
//!
//! [output]
//! dir = out
//! emit-csv = true
//! emit-svg = true
//! emit-report = true
//! ```
//!
//! Unknown sections or keys are rejected with the offending name; parse →
//! serialise → parse is the identity on the semantic content.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::catalog::{DataSource, ObjectiveSpec};
use crate::error::Error;
use crate::partition::PartitionSpec;
use crate::schedule::ScheduleMode;
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub enum GammaSpec {
    /// 0.99 times the conservative threshold computed from the objective's
    /// certificates (requires μ and L).
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum X0Spec {
    Zeros,
    Ones,
    Gaussian { seed: u64, scale: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionConfig {
    pub n: usize,
    /// `None` means equal split over `n` blocks.
    pub explicit_sizes: Option<Vec<usize>>,
}

impl PartitionConfig {
    pub fn spec(&self) -> PartitionSpec {
        match &self.explicit_sizes {
            Some(sizes) => PartitionSpec::Explicit(sizes.clone()),
            None => PartitionSpec::Equal(self.n),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleConfig {
    pub delay_bound: usize,
    pub mode: ScheduleMode,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSection {
    pub horizon: usize,
    pub gamma: GammaSpec,
    pub x0: X0Spec,
    pub record_every: usize,
    pub stop_gap_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub dir: String,
    pub emit_csv: bool,
    pub emit_svg: bool,
    pub emit_report: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub objective: ObjectiveSpec,
    pub partition: PartitionConfig,
    pub schedule: ScheduleConfig,
    pub run: RunSection,
    pub output: OutputConfig,
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

struct Section {
    values: BTreeMap<String, (String, usize)>, // key -> (value, line)
}

fn split_sections(text: &str) -> Result<BTreeMap<String, Section>> {
    let mut sections: BTreeMap<String, Section> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| Error::parse(line_no, format!("malformed section header '{line}'")))?
                .trim()
                .to_string();
            if name.is_empty() {
                return Err(Error::parse(line_no, "empty section name"));
            }
            if sections.contains_key(&name) {
                return Err(Error::config(name.clone(), "duplicate section"));
            }
            sections.insert(name.clone(), Section { values: BTreeMap::new() });
            current = Some(name);
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(line_no, format!("expected 'key = value', got '{line}'")))?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        let section = current
            .as_ref()
            .ok_or_else(|| Error::parse(line_no, format!("key '{key}' appears before any section")))?;
        let sec = sections.get_mut(section).unwrap();
        if sec.values.insert(key.clone(), (value, line_no)).is_some() {
            return Err(Error::config(format!("{section}.{key}"), "duplicate key"));
        }
    }
    Ok(sections)
}

impl Section {
    fn take(&mut self, section: &str, key: &str) -> Result<String> {
        self.values
            .remove(key)
            .map(|(v, _)| v)
            .ok_or_else(|| Error::config(format!("{section}.{key}"), "missing required key"))
    }

    fn take_opt(&mut self, key: &str) -> Option<String> {
        self.values.remove(key).map(|(v, _)| v)
    }

    fn finish(self, section: &str) -> Result<()> {
        if let Some(key) = self.values.keys().next() {
            return Err(Error::config(format!("{section}.{key}"), "unknown key"));
        }
        Ok(())
    }
}

fn parse_f64(section: &str, key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>()
        .map_err(|_| Error::config(format!("{section}.{key}"), format!("expected a number, got '{v}'")))
        .and_then(|x| {
            if x.is_finite() {
                Ok(x)
            } else {
                Err(Error::config(format!("{section}.{key}"), "must be finite"))
            }
        })
}

fn parse_usize(section: &str, key: &str, v: &str) -> Result<usize> {
    v.parse::<usize>()
        .map_err(|_| Error::config(format!("{section}.{key}"), format!("expected a nonnegative integer, got '{v}'")))
}

fn parse_u64(section: &str, key: &str, v: &str) -> Result<u64> {
    v.parse::<u64>()
        .map_err(|_| Error::config(format!("{section}.{key}"), format!("expected an unsigned integer, got '{v}'")))
}

fn parse_bool(section: &str, key: &str, v: &str) -> Result<bool> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(Error::config(format!("{section}.{key}"), format!("expected true/false, got '{v}'"))),
    }
}

fn parse_f64_list(section: &str, key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',').map(|tok| parse_f64(section, key, tok.trim())).collect()
}

fn parse_usize_list(section: &str, key: &str, v: &str) -> Result<Vec<usize>> {
    v.split(',').map(|tok| parse_usize(section, key, tok.trim())).collect()
}

/// Parse a configuration from text.
pub fn parse(text: &str) -> Result<RunConfig> {
    let mut sections = split_sections(text)?;
    let mut get = |name: &str| -> Result<Section> {
        sections
            .remove(name)
            .ok_or_else(|| Error::config(name.to_string(), "missing required section"))
    };

    // [objective]
    let mut sec = get("objective")?;
    let kind = sec.take("objective", "kind")?;
    let objective = match kind.as_str() {
        "diag-quadratic" => {
            let diag = parse_f64_list("objective", "diag", &sec.take("objective", "diag")?)?;
            ObjectiveSpec::DiagQuadratic { diag }
        }
        "pl-sine" => {
            let dim = parse_usize("objective", "dim", &sec.take("objective", "dim")?)?;
            ObjectiveSpec::PlSine { dim }
        }
        "least-squares" => {
            let matrix_raw = sec.take("objective", "matrix")?;
            let matrix = matrix_raw
                .split(';')
                .map(|row| parse_f64_list("objective", "matrix", row.trim()))
                .collect::<Result<Vec<_>>>()?;
            let rhs = parse_f64_list("objective", "rhs", &sec.take("objective", "rhs")?)?;
            ObjectiveSpec::LeastSquares { matrix, rhs }
        }
        "logistic-l2" => {
            let lambda = parse_f64("objective", "lambda", &sec.take("objective", "lambda")?)?;
            if lambda < 0.0 {
                return Err(Error::config("objective.lambda", "must be nonnegative"));
            }
            let source_raw = sec.take("objective", "source")?;
            let source = if source_raw == "synthetic" {
                let samples = parse_usize("objective", "samples", &sec.take("objective", "samples")?)?;
                let features = parse_usize("objective", "features", &sec.take("objective", "features")?)?;
                let separation = parse_f64("objective", "separation", &sec.take("objective", "separation")?)?;
                let seed = parse_u64("objective", "data-seed", &sec.take("objective", "data-seed")?)?;
                DataSource::Synthetic { samples, features, separation, seed }
            } else {
                let features = match sec.take_opt("features") {
                    Some(v) => Some(parse_usize("objective", "features", &v)?),
                    None => None,
                };
                DataSource::Path { path: source_raw, features }
            };
            let preprocess = match sec.take_opt("preprocess") {
                Some(v) => parse_bool("objective", "preprocess", &v)?,
                None => true,
            };
            let feature_scale = match sec.take_opt("feature-scale") {
                Some(v) => parse_f64("objective", "feature-scale", &v)?,
                None => 1.0,
            };
            if feature_scale <= 0.0 {
                return Err(Error::config("objective.feature-scale", "must be positive"));
            }
            ObjectiveSpec::LogisticL2 { lambda, source, preprocess, feature_scale }
        }
        other => {
            return Err(Error::config(
                "objective.kind",
                format!("unknown kind '{other}' (expected diag-quadratic, pl-sine, least-squares or logistic-l2)"),
            ))
        }
    };
    sec.finish("objective")?;

    // [partition]
    let mut sec = get("partition")?;
    let n = parse_usize("partition", "n", &sec.take("partition", "n")?)?;
    if n == 0 {
        return Err(Error::config("partition.n", "must be at least 1"));
    }
    let sizes_raw = sec.take("partition", "sizes")?;
    let explicit_sizes = if sizes_raw == "equal" {
        None
    } else {
        let sizes = parse_usize_list("partition", "sizes", &sizes_raw)?;
        if sizes.len() != n {
            return Err(Error::config("partition.sizes", format!("expected {n} sizes, got {}", sizes.len())));
        }
        Some(sizes)
    };
    sec.finish("partition")?;
    let partition = PartitionConfig { n, explicit_sizes };

    // [schedule]
    let mut sec = get("schedule")?;
    let delay_bound = parse_usize("schedule", "b", &sec.take("schedule", "b")?)?;
    if delay_bound == 0 {
        return Err(Error::config("schedule.b", "the delay bound must be a positive integer"));
    }
    let mode_raw = sec.take("schedule", "mode")?;
    let mode = match mode_raw.as_str() {
        "synchronous" => ScheduleMode::Synchronous,
        "uniform-random" => ScheduleMode::UniformRandom,
        "adversarial-max" => ScheduleMode::AdversarialMax,
        "periodic" => {
            let p = parse_usize("schedule", "period", &sec.take("schedule", "period")?)?;
            if p == 0 {
                return Err(Error::config("schedule.period", "must be at least 1"));
            }
            if p > delay_bound {
                return Err(Error::config("schedule.period", format!("period {p} exceeds the delay bound {delay_bound}")));
            }
            ScheduleMode::Periodic(p)
        }
        other => {
            return Err(Error::config(
                "schedule.mode",
                format!("unknown mode '{other}' (expected synchronous, periodic, uniform-random or adversarial-max)"),
            ))
        }
    };
    let seed = parse_u64("schedule", "seed", &sec.take("schedule", "seed")?)?;
    sec.finish("schedule")?;
    let schedule = ScheduleConfig { delay_bound, mode, seed };

    // [run]
    let mut sec = get("run")?;
    let horizon = parse_usize("run", "horizon", &sec.take("run", "horizon")?)?;
    if horizon == 0 {
        return Err(Error::config("run.horizon", "must be at least 1"));
    }
    if horizon < delay_bound {
        return Err(Error::config("run.horizon", format!("must cover at least one delay window (b = {delay_bound})")));
    }
    let gamma_raw = sec.take("run", "gamma")?;
    let gamma = if gamma_raw == "auto" {
        GammaSpec::Auto
    } else {
        let g = parse_f64("run", "gamma", &gamma_raw)?;
        if g <= 0.0 {
            return Err(Error::config("run.gamma", "must be positive"));
        }
        GammaSpec::Fixed(g)
    };
    let x0_raw = sec.take("run", "x0")?;
    let x0 = match x0_raw.as_str() {
        "zeros" => X0Spec::Zeros,
        "ones" => X0Spec::Ones,
        other => match other.strip_prefix("gaussian:") {
            Some(rest) => {
                let mut parts = rest.split(':');
                let seed = parse_u64("run", "x0", parts.next().unwrap_or(""))?;
                let scale = match parts.next() {
                    Some(s) => parse_f64("run", "x0", s)?,
                    None => 1.0,
                };
                if parts.next().is_some() {
                    return Err(Error::config("run.x0", "expected gaussian:SEED[:SCALE]"));
                }
                X0Spec::Gaussian { seed, scale }
            }
            None => {
                return Err(Error::config(
                    "run.x0",
                    format!("unknown start '{other}' (expected zeros, ones or gaussian:SEED[:SCALE])"),
                ))
            }
        },
    };
    let record_every = match sec.take_opt("record-every") {
        Some(v) => {
            let r = parse_usize("run", "record-every", &v)?;
            if r == 0 {
                return Err(Error::config("run.record-every", "must be at least 1"));
            }
            r
        }
        None => 1,
    };
    let stop_gap_ratio = match sec.take_opt("stop-gap-ratio") {
        Some(v) => {
            let r = parse_f64("run", "stop-gap-ratio", &v)?;
            if r <= 0.0 || r >= 1.0 {
                return Err(Error::config("run.stop-gap-ratio", "must lie in (0, 1)"));
            }
            Some(r)
        }
        None => None,
    };
    sec.finish("run")?;
    let run = RunSection { horizon, gamma, x0, record_every, stop_gap_ratio };

    // [output]
    let mut sec = get("output")?;
    let dir = sec.take("output", "dir")?;
    let emit_csv = match sec.take_opt("emit-csv") {
        Some(v) => parse_bool("output", "emit-csv", &v)?,
        None => true,
    };
    let emit_svg = match sec.take_opt("emit-svg") {
        Some(v) => parse_bool("output", "emit-svg", &v)?,
        None => true,
    };
    let emit_report = match sec.take_opt("emit-report") {
        Some(v) => parse_bool("output", "emit-report", &v)?,
        None => true,
    };
    sec.finish("output")?;
    let output = OutputConfig { dir, emit_csv, emit_svg, emit_report };

    if let Some(name) = sections.keys().next() {
        return Err(Error::config(name.clone(), "unknown section"));
    }

    Ok(RunConfig { objective, partition, schedule, run, output })
}

/// Read and parse a configuration file.
pub fn load(path: impl AsRef<Path>) -> Result<RunConfig> {
    parse(&std::fs::read_to_string(path)?)
}

fn fmt_f64(v: f64) -> String {
    // shortest representation that round-trips
    let s = format!("{v}");
    debug_assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits());
    s
}

/// Serialise a configuration back to the text format.
pub fn serialize(cfg: &RunConfig) -> String {
    let mut out = String::new();
    out.push_str("[objective]\n");
    match &cfg.objective {
        ObjectiveSpec::DiagQuadratic { diag } => {
            writeln!(out, "kind = diag-quadratic").unwrap();
            writeln!(out, "diag = {}", diag.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(",")).unwrap();
        }
        ObjectiveSpec::PlSine { dim } => {
            writeln!(out, "kind = pl-sine").unwrap();
            writeln!(out, "dim = {dim}").unwrap();
        }
        ObjectiveSpec::LeastSquares { matrix, rhs } => {
            writeln!(out, "kind = least-squares").unwrap();
            let rows: Vec<String> = matrix
                .iter()
                .map(|r| r.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(","))
                .collect();
            writeln!(out, "matrix = {}", rows.join(";")).unwrap();
            writeln!(out, "rhs = {}", rhs.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(",")).unwrap();
        }
        ObjectiveSpec::LogisticL2 { lambda, source, preprocess, feature_scale } => {
            writeln!(out, "kind = logistic-l2").unwrap();
            writeln!(out, "lambda = {}", fmt_f64(*lambda)).unwrap();
            match source {
                DataSource::Synthetic { samples, features, separation, seed } => {
                    writeln!(out, "source = synthetic").unwrap();
                    writeln!(out, "samples = {samples}").unwrap();
                    writeln!(out, "features = {features}").unwrap();
                    writeln!(out, "separation = {}", fmt_f64(*separation)).unwrap();
                    writeln!(out, "data-seed = {seed}").unwrap();
                }
                DataSource::Path { path, features } => {
                    writeln!(out, "source = {path}").unwrap();
                    if let Some(m) = features {
                        writeln!(out, "features = {m}").unwrap();
                    }
                }
            }
            writeln!(out, "preprocess = {preprocess}").unwrap();
            writeln!(out, "feature-scale = {}", fmt_f64(*feature_scale)).unwrap();
        }
    }
    out.push_str("\n[partition]\n");
    writeln!(out, "n = {}", cfg.partition.n).unwrap();
    match &cfg.partition.explicit_sizes {
        Some(sizes) => {
            writeln!(out, "sizes = {}", sizes.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",")).unwrap()
        }
        None => writeln!(out, "sizes = equal").unwrap(),
    }
    out.push_str("\n[schedule]\n");
    writeln!(out, "b = {}", cfg.schedule.delay_bound).unwrap();
    match cfg.schedule.mode {
        ScheduleMode::Synchronous => writeln!(out, "mode = synchronous").unwrap(),
        ScheduleMode::UniformRandom => writeln!(out, "mode = uniform-random").unwrap(),
        ScheduleMode::AdversarialMax => writeln!(out, "mode = adversarial-max").unwrap(),
        ScheduleMode::Periodic(p) => {
            writeln!(out, "mode = periodic").unwrap();
            writeln!(out, "period = {p}").unwrap();
        }
    }
    writeln!(out, "seed = {}", cfg.schedule.seed).unwrap();
    out.push_str("\n[run]\n");
    writeln!(out, "horizon = {}", cfg.run.horizon).unwrap();
    match cfg.run.gamma {
        GammaSpec::Auto => writeln!(out, "gamma = auto").unwrap(),
        GammaSpec::Fixed(g) => writeln!(out, "gamma = {}", fmt_f64(g)).unwrap(),
    }
    match cfg.run.x0 {
        X0Spec::Zeros => writeln!(out, "x0 = zeros").unwrap(),
        X0Spec::Ones => writeln!(out, "x0 = ones").unwrap(),
        X0Spec::Gaussian { seed, scale } => writeln!(out, "x0 = gaussian:{seed}:{}", fmt_f64(scale)).unwrap(),
    }
    writeln!(out, "record-every = {}", cfg.run.record_every).unwrap();
    if let Some(r) = cfg.run.stop_gap_ratio {
        writeln!(out, "stop-gap-ratio = {}", fmt_f64(r)).unwrap();
    }
    out.push_str("\n[output]\n");
    writeln!(out, "dir = {}", cfg.output.dir).unwrap();
    writeln!(out, "emit-csv = {}", cfg.output.emit_csv).unwrap();
    writeln!(out, "emit-svg = {}", cfg.output.emit_svg).unwrap();
    writeln!(out, "emit-report = {}", cfg.output.emit_report).unwrap();
    out
}
