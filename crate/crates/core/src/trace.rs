//! Trace serialisation: the per-step CSV with the pinned column layout
//!
//! `t,f_true,gap,grad_norm_sq,s_norm_sq,max_staleness,lemma1_lhs,lemma1_rhs,`
//! `lemma2_lhs,lemma2_rhs,lemma3_lhs,lemma3_rhs`
//!
//! Floats are printed with 17 significant digits so a parsed trace replays
//! the original values exactly. Optional fields (gap without a known f*,
//! lemma columns off their boundaries) are left blank.

use std::io::Write;

use crate::error::Error;
use crate::simulator::{LemmaPair, SimulationTrace, TraceRecord};
use crate::Result;

pub const TRACE_HEADER: &str =
    "t,f_true,gap,grad_norm_sq,s_norm_sq,max_staleness,lemma1_lhs,lemma1_rhs,lemma2_lhs,lemma2_rhs,lemma3_lhs,lemma3_rhs";

/// 17 significant digits; enough for bit-exact f64 replay.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn format_opt(v: Option<f64>) -> String {
    v.map(format_float).unwrap_or_default()
}

fn pair_cols(p: Option<LemmaPair>) -> (String, String) {
    match p {
        Some(p) => (format_float(p.lhs), format_float(p.rhs)),
        None => (String::new(), String::new()),
    }
}

/// Write the recorded rows of a trace as CSV.
pub fn write_csv(trace: &SimulationTrace, mut w: impl Write) -> std::io::Result<()> {
    writeln!(w, "{TRACE_HEADER}")?;
    for r in &trace.records {
        let (l1l, l1r) = pair_cols(r.lemma1);
        let (l2l, l2r) = pair_cols(r.lemma2);
        let (l3l, l3r) = pair_cols(r.lemma3);
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.t,
            format_float(r.f_true),
            format_opt(r.gap),
            format_float(r.grad_norm_sq),
            format_float(r.s_norm_sq),
            r.max_staleness,
            l1l,
            l1r,
            l2l,
            l2r,
            l3l,
            l3r,
        )?;
    }
    Ok(())
}

pub fn to_csv_string(trace: &SimulationTrace) -> String {
    let mut buf = Vec::new();
    write_csv(trace, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("CSV output is ASCII")
}

/// A trace read back from CSV; records only, no per-step arrays.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedTrace {
    pub records: Vec<TraceRecord>,
}

fn parse_float(line: usize, field: &str, value: &str) -> Result<f64> {
    let v: f64 = value
        .parse()
        .map_err(|_| Error::parse(line, format!("unparseable {field} '{value}'")))?;
    if !v.is_finite() {
        return Err(Error::parse(line, format!("non-finite {field} '{value}'")));
    }
    Ok(v)
}

fn parse_opt_pair(line: usize, field: &str, lhs: &str, rhs: &str) -> Result<Option<LemmaPair>> {
    match (lhs.is_empty(), rhs.is_empty()) {
        (true, true) => Ok(None),
        (false, false) => Ok(Some(LemmaPair {
            lhs: parse_float(line, field, lhs)?,
            rhs: parse_float(line, field, rhs)?,
        })),
        _ => Err(Error::parse(line, format!("{field} columns must be blank together"))),
    }
}

/// Parse trace CSV text. Tolerates nothing: the header and every row must
/// match the pinned layout.
pub fn parse_csv(text: &str) -> Result<ParsedTrace> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "empty trace"))?;
    if header.trim_end() != TRACE_HEADER {
        return Err(Error::parse(1, format!("unexpected header '{header}'")));
    }
    let mut records = Vec::new();
    let mut prev_t: Option<usize> = None;
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 12 {
            return Err(Error::parse(line_no, format!("expected 12 columns, got {}", cols.len())));
        }
        let t: usize = cols[0]
            .parse()
            .map_err(|_| Error::parse(line_no, format!("unparseable t '{}'", cols[0])))?;
        if let Some(p) = prev_t {
            if t <= p {
                return Err(Error::parse(line_no, format!("t must increase; {t} follows {p}")));
            }
        }
        prev_t = Some(t);
        let gap = if cols[2].is_empty() { None } else { Some(parse_float(line_no, "gap", cols[2])?) };
        let max_staleness: usize = cols[5]
            .parse()
            .map_err(|_| Error::parse(line_no, format!("unparseable max_staleness '{}'", cols[5])))?;
        records.push(TraceRecord {
            t,
            f_true: parse_float(line_no, "f_true", cols[1])?,
            gap,
            grad_norm_sq: parse_float(line_no, "grad_norm_sq", cols[3])?,
            s_norm_sq: parse_float(line_no, "s_norm_sq", cols[4])?,
            max_staleness,
            lemma1: parse_opt_pair(line_no, "lemma1", cols[6], cols[7])?,
            lemma2: parse_opt_pair(line_no, "lemma2", cols[8], cols[9])?,
            lemma3: parse_opt_pair(line_no, "lemma3", cols[10], cols[11])?,
        });
    }
    Ok(ParsedTrace { records })
}
