//! The structured bound report emitted next to each trace: stepsize
//! threshold, proof constants, η, per-window slack and the overall verdict,
//! serialised as JSON.

use serde::Serialize;

use crate::analysis::{BoundReport, ContractionFit, LemmaReport, TheoremConstants, WindowSeries};

/// Everything `run` learned about one trajectory.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub objective: String,
    pub processors: usize,
    pub delay_bound: usize,
    pub gamma: f64,
    /// The conservative threshold; `None` when μ or L is unavailable.
    pub gamma0: Option<f64>,
    /// γ exceeded γ₀, so bound checks are informational rather than binding.
    pub informational: bool,
    pub constants: Option<TheoremConstants>,
    pub eta: Option<f64>,
    pub windows: usize,
    pub steps: usize,
    pub final_gap: Option<f64>,
    pub initial_gap: Option<f64>,
    /// Per-window slack ratios α(kB) / envelope(k), k ≥ 1.
    pub window_slack: Vec<f64>,
    pub bound: Option<BoundReport>,
    pub contraction: Option<ContractionFit>,
    pub lemmas: Option<LemmaReport>,
    pub stopped_early: Option<usize>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialisation cannot fail")
    }
}

/// Slack ratios of the α series against the geometric envelope.
pub fn window_slack(series: &WindowSeries, mu: f64, gamma: f64) -> Vec<f64> {
    let rho = 1.0 - gamma * mu;
    (1..=series.windows())
        .map(|k| {
            let env = rho.powi(k as i32 - 1) * series.eta;
            if env > 0.0 {
                series.alpha[k] / env
            } else {
                0.0
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_serialises_to_json() {
        let report = RunReport {
            objective: "diag-quadratic".into(),
            processors: 2,
            delay_bound: 5,
            gamma: 1e-3,
            gamma0: Some(5e-4),
            informational: true,
            constants: None,
            eta: Some(1.25),
            windows: 4,
            steps: 20,
            final_gap: Some(0.5),
            initial_gap: Some(1.25),
            window_slack: vec![0.9, 0.8],
            bound: None,
            contraction: None,
            lemmas: None,
            stopped_early: None,
        };
        let json = report.to_json();
        assert!(json.contains("\"informational\": true"));
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed["delay_bound"], 5);
    }
}
