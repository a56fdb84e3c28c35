//! The logical-time engine: per-processor stale views assembled from a
//! bounded history of true states, the block update rule
//! x_i(t+1) = x_i(t) − γ∇_i f(x^i(t)) at activations, and a per-step trace
//! over the true state x(t).
//!
//! One global step counter drives everything. Gradients at step t are
//! evaluated on views assembled purely from time-t data before any time-t+1
//! write, so the result does not depend on the order processors are visited
//! within a step. A run is sequential and deterministic; distinct runs share
//! no mutable state.

use crate::error::Error;
use crate::linalg;
use crate::objective::ObjectiveInstance;
use crate::partition::BlockPartition;
use crate::schedule::AsyncSchedule;
use crate::Result;

/// Knobs that do not change the dynamics, only what gets recorded and when a
/// run is cut short.
#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Record a trace row every this many steps (window boundaries are
    /// always recorded). 1 keeps the one-row-per-step contract.
    pub record_every: usize,
    /// Stop once gap(t) ≤ ratio · gap(0); requires a known f*.
    pub stop_gap_ratio: Option<f64>,
    /// Abort with a divergence error when |f| or the gap exceeds this.
    pub divergence_limit: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { record_every: 1, stop_gap_ratio: None, divergence_limit: 1e12 }
    }
}

/// One (lhs, rhs) inequality diagnostic.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LemmaPair {
    pub lhs: f64,
    pub rhs: f64,
}

/// Per-step record, computed on the true state x(t).
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct TraceRecord {
    pub t: usize,
    pub f_true: f64,
    /// f(x(t)) − f*, when f* is known.
    pub gap: Option<f64>,
    pub grad_norm_sq: f64,
    /// ‖s(t)‖² = Σ over active i of ‖∇_i f(x^i(t))‖².
    pub s_norm_sq: f64,
    /// max over i ≠ j of t − τ^i_j(t).
    pub max_staleness: usize,
    /// ‖x^i(t)−x(t)‖ (max over i) vs γ·Σ_{τ=t−B}^{t−1}‖s(τ)‖.
    pub lemma1: Option<LemmaPair>,
    /// B-step decrease bound; populated on window boundaries t = kB, k ≥ 1,
    /// for the window ending at t (needs a Lipschitz constant).
    pub lemma2: Option<LemmaPair>,
    /// One-step squared move bound (needs a Lipschitz constant).
    pub lemma3: Option<LemmaPair>,
}

/// Everything a finished run leaves behind. `s_norm_sq` and `boundary_f`
/// cover every step and window boundary even when rows are decimated, so
/// the window series stays exact.
#[derive(Debug, Clone)]
pub struct SimulationTrace {
    pub steps: usize,
    pub delay_bound: usize,
    pub processors: usize,
    pub gamma: f64,
    pub f_star: Option<f64>,
    pub lipschitz: Option<f64>,
    pub records: Vec<TraceRecord>,
    /// ‖s(t)‖² for t = 0..steps.
    pub s_norm_sq: Vec<f64>,
    /// f(x(kB)) for every boundary kB ≤ steps.
    pub boundary_f: Vec<f64>,
    pub initial_f: f64,
    pub final_state: Vec<f64>,
    /// Step at which the gap-ratio stop triggered, if it did.
    pub stopped_early: Option<usize>,
}

impl SimulationTrace {
    pub fn initial_gap(&self) -> Option<f64> {
        self.f_star.map(|fs| self.initial_f - fs)
    }

    /// Number of complete B-windows covered by the run.
    pub fn complete_windows(&self) -> usize {
        self.boundary_f.len().saturating_sub(1)
    }

    /// Σ_{τ=(k−1)B}^{kB−1} ‖s(τ)‖² for window k ≥ 1.
    pub fn window_s_sum_sq(&self, k: usize) -> f64 {
        let b = self.delay_bound;
        self.s_norm_sq[(k - 1) * b..k * b].iter().sum::<f64>() + 0.0
    }

    /// First recorded step whose gap falls at or below `ratio` times the
    /// initial gap.
    pub fn steps_to_gap_ratio(&self, ratio: f64) -> Option<usize> {
        let gap0 = self.initial_gap()?;
        let threshold = ratio * gap0;
        self.records
            .iter()
            .find(|r| matches!(r.gap, Some(g) if g <= threshold))
            .map(|r| r.t)
    }
}

/// Live state of a run at time t.
pub struct SimulatorState {
    t: usize,
    gamma: f64,
    delay_bound: usize,
    true_state: Vec<f64>,
    /// Ring of the last B+1 true states; slot τ % (B+1) holds x(τ).
    history: Vec<Vec<f64>>,
    /// Bumped whenever an update lands; keys the f/∇f memo.
    version: u64,
    memo_version: u64,
    memo_f: f64,
    memo_grad_norm_sq: f64,
}

impl SimulatorState {
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn true_state(&self) -> &[f64] {
        &self.true_state
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// x(τ) from the history ring; errors if τ is older than the buffer.
    fn snapshot(&self, tau: usize) -> Result<&Vec<f64>> {
        if tau > self.t || self.t > tau + self.delay_bound {
            return Err(Error::HistoryUnderflow { t: self.t, tau, delay_bound: self.delay_bound });
        }
        Ok(&self.history[tau % (self.delay_bound + 1)])
    }
}

/// Initialise a run: every local view and the true state start at `x0`, and
/// the history is seeded with `x0` at all ages.
pub fn init_run(
    obj: &ObjectiveInstance,
    partition: &BlockPartition,
    schedule: &AsyncSchedule,
    x0: &[f64],
    gamma: f64,
) -> Result<SimulatorState> {
    if x0.len() != obj.dim() {
        return Err(Error::DimensionMismatch { expected: obj.dim(), got: x0.len() });
    }
    if partition.total_dim() != obj.dim() {
        return Err(Error::DimensionMismatch { expected: obj.dim(), got: partition.total_dim() });
    }
    if schedule.processors() != partition.block_count() {
        return Err(Error::InvalidRun(format!(
            "schedule has {} processors but the partition has {} blocks",
            schedule.processors(),
            partition.block_count()
        )));
    }
    if !gamma.is_finite() || gamma <= 0.0 {
        return Err(Error::InvalidRun(format!("stepsize must be positive, got {gamma}")));
    }
    let b = schedule.delay_bound();
    Ok(SimulatorState {
        t: 0,
        gamma,
        delay_bound: b,
        true_state: x0.to_vec(),
        history: vec![x0.to_vec(); b + 1],
        version: 0,
        memo_version: u64::MAX,
        memo_f: 0.0,
        memo_grad_norm_sq: 0.0,
    })
}

/// A simulation in flight. Owns the accumulators the trace is built from.
pub struct Simulation<'a> {
    obj: &'a ObjectiveInstance,
    partition: &'a BlockPartition,
    schedule: &'a AsyncSchedule,
    options: RunOptions,
    state: SimulatorState,
    s_log: Vec<f64>,
    boundary_f: Vec<f64>,
    records: Vec<TraceRecord>,
    initial_f: f64,
    initial_gap: Option<f64>,
    stopped_early: Option<usize>,
}

impl<'a> Simulation<'a> {
    pub fn new(
        obj: &'a ObjectiveInstance,
        partition: &'a BlockPartition,
        schedule: &'a AsyncSchedule,
        x0: &[f64],
        gamma: f64,
        options: RunOptions,
    ) -> Result<Self> {
        if options.record_every == 0 {
            return Err(Error::InvalidRun("record_every must be at least 1".into()));
        }
        if options.stop_gap_ratio.is_some() && obj.optimal_value().is_none() {
            return Err(Error::InvalidRun(
                "gap-ratio stopping requires an objective with a known or estimated f*".into(),
            ));
        }
        let state = init_run(obj, partition, schedule, x0, gamma)?;
        let initial_f = obj.value(x0)?;
        let initial_gap = obj.optimal_value().map(|fs| initial_f - fs);
        Ok(Simulation {
            obj,
            partition,
            schedule,
            options,
            state,
            s_log: Vec::new(),
            boundary_f: Vec::new(),
            records: Vec::new(),
            initial_f,
            initial_gap,
            stopped_early: None,
        })
    }

    pub fn state(&self) -> &SimulatorState {
        &self.state
    }

    /// Assemble processor i's view x^i(t): its own block fresh, every other
    /// block j taken from the history at τ^i_j(t).
    pub fn local_view(&self, i: usize) -> Result<Vec<f64>> {
        let t = self.state.t;
        let n = self.partition.block_count();
        let mut view = vec![0.0; self.partition.total_dim()];
        for j in 0..n {
            let tau = self.schedule.tau(i, j, t);
            let snap = self.state.snapshot(tau)?;
            let r = self.partition.range(j)?;
            view[r.clone()].copy_from_slice(&snap[r]);
        }
        Ok(view)
    }

    fn f_true(&mut self) -> Result<f64> {
        self.refresh_memo()?;
        Ok(self.state.memo_f)
    }

    fn grad_norm_sq_true(&mut self) -> Result<f64> {
        self.refresh_memo()?;
        Ok(self.state.memo_grad_norm_sq)
    }

    fn refresh_memo(&mut self) -> Result<()> {
        if self.state.memo_version != self.state.version {
            self.state.memo_f = self.obj.value(&self.state.true_state)?;
            self.state.memo_grad_norm_sq = linalg::norm_sq(&self.obj.gradient(&self.state.true_state)?);
            self.state.memo_version = self.state.version;
        }
        Ok(())
    }

    /// Sum of ‖s(τ)‖^power over τ ∈ [t−B, t−1], with s(τ) = 0 for τ < 0.
    /// (+ 0.0 keeps empty windows at positive zero.)
    fn trailing_s_sum(&self, t: usize, squared: bool) -> f64 {
        let b = self.state.delay_bound;
        let lo = t.saturating_sub(b);
        self.s_log[lo..t].iter().map(|&v| if squared { v } else { v.sqrt() }).sum::<f64>() + 0.0
    }

    /// Execute one step: evaluate active gradients on stale views, record if
    /// requested, then apply the block updates and advance the clock.
    pub fn step(&mut self) -> Result<Option<TraceRecord>> {
        let t = self.state.t;
        if t >= self.schedule.horizon() {
            return Err(Error::InvalidRun(format!(
                "step at t={t} exceeds the schedule horizon {}",
                self.schedule.horizon()
            )));
        }
        let b = self.state.delay_bound;
        let n = self.partition.block_count();
        let gamma = self.state.gamma;

        // Gradients on time-t data only.
        let mut updates: Vec<(usize, Vec<f64>)> = Vec::new();
        let mut s_norm_sq = 0.0;
        for i in 0..n {
            if !self.schedule.is_active(i, t) {
                continue;
            }
            let view = self.local_view(i)?;
            let g = self.obj.block_gradient(&view, i, self.partition)?;
            s_norm_sq += linalg::norm_sq(&g);
            updates.push((i, g));
        }
        if !s_norm_sq.is_finite() {
            return Err(Error::Divergence { t, value: s_norm_sq, limit: self.options.divergence_limit });
        }

        let boundary = t.is_multiple_of(b);
        let recorded = boundary || t.is_multiple_of(self.options.record_every);

        // Window boundary bookkeeping (f at x(kB)).
        if boundary {
            let f = self.f_true()?;
            self.boundary_f.push(f);
        }

        let record = if recorded {
            let f_true = self.f_true()?;
            let gap = self.obj.optimal_value().map(|fs| f_true - fs);
            let grad_norm_sq = self.grad_norm_sq_true()?;
            let guard = gap.map(|g| g.abs()).unwrap_or_else(|| f_true.abs());
            if !f_true.is_finite() || guard > self.options.divergence_limit {
                return Err(Error::Divergence { t, value: f_true, limit: self.options.divergence_limit });
            }

            // Lemma 1: ‖x^i(t)−x(t)‖ ≤ γ Σ_{τ=t−B}^{t−1} ‖s(τ)‖.
            let mut worst_view_dist = 0.0f64;
            for i in 0..n {
                let view = self.local_view(i)?;
                worst_view_dist = worst_view_dist.max(linalg::dist_sq(&view, &self.state.true_state).sqrt());
            }
            let lemma1 = Some(LemmaPair {
                lhs: worst_view_dist,
                rhs: gamma * self.trailing_s_sum(t, false),
            });

            let (lemma2, lemma3) = if let Some(l) = self.obj.lipschitz() {
                let nf = n as f64;
                let bf = b as f64;
                let trailing_sq = self.trailing_s_sum(t, true);
                let lemma3 = Some(LemmaPair {
                    lhs: gamma * gamma * s_norm_sq,
                    rhs: (nf * nf * bf * gamma.powi(4) * l * l + gamma * gamma * l * nf) * trailing_sq
                        + (gamma * gamma + gamma.powi(4) * l * nf * bf) * grad_norm_sq,
                });
                let lemma2 = if boundary && t >= b {
                    let k = t / b;
                    let t0 = t - b;
                    let first: f64 = self.s_log[t0.saturating_sub(b)..t0].iter().sum::<f64>() + 0.0;
                    let second: f64 = self.s_log[t0..t].iter().sum::<f64>() + 0.0;
                    Some(LemmaPair {
                        lhs: self.boundary_f[k] - self.boundary_f[k - 1],
                        rhs: 0.5 * l * gamma * gamma * nf * bf * first
                            + (gamma * gamma * l * (bf * (nf + 1.0) / 2.0 + 1.0) - gamma) * second,
                    })
                } else {
                    None
                };
                (lemma2, lemma3)
            } else {
                (None, None)
            };

            Some(TraceRecord {
                t,
                f_true,
                gap,
                grad_norm_sq,
                s_norm_sq,
                max_staleness: self.schedule.max_staleness_at(t),
                lemma1,
                lemma2,
                lemma3,
            })
        } else {
            None
        };

        // Early stop on the gap ratio, evaluated at boundaries and recorded
        // steps (where f is already fresh).
        if let (Some(ratio), Some(gap0), true) = (self.options.stop_gap_ratio, self.initial_gap, recorded) {
            let gap = self.f_true()? - self.obj.optimal_value().unwrap();
            if gap <= ratio * gap0 {
                self.stopped_early = Some(t);
            }
        }

        // Apply updates; reads above saw only time-t data.
        for (i, g) in &updates {
            let r = self.partition.range(*i)?;
            for (k, gk) in r.zip(g.iter()) {
                self.state.true_state[k] -= gamma * gk;
            }
        }
        if !updates.is_empty() {
            self.state.version += 1;
        }
        self.s_log.push(s_norm_sq);
        self.state.t += 1;
        let slot = self.state.t % (b + 1);
        self.state.history[slot].copy_from_slice(&self.state.true_state);

        Ok(record)
    }

    /// Drive the run to `horizon` steps (or an early stop) and package the
    /// trace.
    pub fn finish(mut self, horizon: usize) -> Result<SimulationTrace> {
        if horizon == 0 {
            return Err(Error::InvalidRun("horizon must be positive".into()));
        }
        if horizon > self.schedule.horizon() {
            return Err(Error::InvalidRun(format!(
                "run horizon {horizon} exceeds the schedule horizon {}",
                self.schedule.horizon()
            )));
        }
        for _ in 0..horizon {
            if let Some(rec) = self.step()? {
                self.records.push(rec);
            }
            if self.stopped_early.is_some() {
                break;
            }
        }
        let steps = self.state.t;
        // Close the final boundary when the run ends exactly on one.
        if steps.is_multiple_of(self.state.delay_bound) {
            let f = self.f_true()?;
            self.boundary_f.push(f);
        }
        Ok(SimulationTrace {
            steps,
            delay_bound: self.state.delay_bound,
            processors: self.partition.block_count(),
            gamma: self.state.gamma,
            f_star: self.obj.optimal_value(),
            lipschitz: self.obj.lipschitz(),
            records: self.records,
            s_norm_sq: self.s_log,
            boundary_f: self.boundary_f,
            initial_f: self.initial_f,
            final_state: self.state.true_state,
            stopped_early: self.stopped_early,
        })
    }
}

/// Run the block update rule for `horizon` steps against the given schedule.
/// Deterministic in all inputs.
pub fn run(
    obj: &ObjectiveInstance,
    partition: &BlockPartition,
    schedule: &AsyncSchedule,
    x0: &[f64],
    gamma: f64,
    horizon: usize,
    options: RunOptions,
) -> Result<SimulationTrace> {
    Simulation::new(obj, partition, schedule, x0, gamma, options)?.finish(horizon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::{diagonal_quadratic, pl_sine};
    use crate::partition::{make_partition, PartitionSpec};
    use crate::schedule::{generate_schedule, ScheduleMode};
    use std::sync::Arc;

    fn quad_1d() -> ObjectiveInstance {
        diagonal_quadratic(vec![1.0]).unwrap()
    }

    #[test]
    fn init_sets_all_views_to_x0() {
        let obj = diagonal_quadratic(vec![1.0, 2.0, 3.0]).unwrap();
        let p = make_partition(3, PartitionSpec::Equal(3)).unwrap();
        let s = generate_schedule(3, 10, 2, ScheduleMode::UniformRandom, 5).unwrap();
        let sim = Simulation::new(&obj, &p, &s, &[1.0, -2.0, 0.5], 0.1, RunOptions::default()).unwrap();
        for i in 0..3 {
            assert_eq!(sim.local_view(i).unwrap(), vec![1.0, -2.0, 0.5]);
        }
        assert_eq!(sim.state().true_state(), &[1.0, -2.0, 0.5]);
    }

    #[test]
    fn init_rejects_bad_inputs() {
        let obj = quad_1d();
        let p = make_partition(1, PartitionSpec::Equal(1)).unwrap();
        let s = generate_schedule(1, 10, 1, ScheduleMode::Synchronous, 0).unwrap();
        assert!(matches!(
            init_run(&obj, &p, &s, &[1.0, 2.0], 0.1),
            Err(Error::DimensionMismatch { expected: 1, got: 2 })
        ));
        assert!(init_run(&obj, &p, &s, &[1.0], 0.0).is_err());
        assert!(init_run(&obj, &p, &s, &[1.0], -0.5).is_err());
        let s2 = generate_schedule(2, 10, 1, ScheduleMode::Synchronous, 0).unwrap();
        assert!(init_run(&obj, &p, &s2, &[1.0], 0.1).is_err());
    }

    #[test]
    fn single_block_reduces_to_centralized_gd() {
        let obj = quad_1d();
        let p = make_partition(1, PartitionSpec::Equal(1)).unwrap();
        let s = generate_schedule(1, 10, 1, ScheduleMode::Synchronous, 0).unwrap();
        let trace = run(&obj, &p, &s, &[1.0], 0.1, 2, RunOptions::default()).unwrap();
        assert_eq!(trace.records[1].f_true, 0.5 * 0.9f64 * 0.9);
        assert_eq!(trace.final_state, vec![0.81]);
    }

    #[test]
    fn synchronous_two_blocks_take_plain_gradient_steps() {
        let obj = diagonal_quadratic(vec![1.0, 1.0]).unwrap();
        let p = make_partition(2, PartitionSpec::Equal(2)).unwrap();
        let s = generate_schedule(2, 4, 1, ScheduleMode::Synchronous, 0).unwrap();
        let trace = run(&obj, &p, &s, &[1.0, 1.0], 0.5, 1, RunOptions::default()).unwrap();
        assert_eq!(trace.final_state, vec![0.5, 0.5]);
    }

    #[test]
    fn adversarial_two_block_coupled_quadratic_matches_hand_reference() {
        // f(x) = ½(x₁+x₂)²; independent scalar recursion written before the
        // engine: at window-end steps both blocks update from views whose
        // foreign block is one step old (B=2 ⇒ τ = t−1).
        let obj = ObjectiveInstance::new(
            "coupled",
            2,
            Arc::new(|x: &[f64]| 0.5 * (x[0] + x[1]) * (x[0] + x[1])),
            Arc::new(|x: &[f64]| vec![x[0] + x[1], x[0] + x[1]]),
        )
        .unwrap();
        let p = make_partition(2, PartitionSpec::Equal(2)).unwrap();
        let s = generate_schedule(2, 10, 2, ScheduleMode::AdversarialMax, 0).unwrap();
        let gamma = 0.1;
        let trace = run(&obj, &p, &s, &[1.0, 1.0], gamma, 10, RunOptions::default()).unwrap();

        let (mut a, mut b) = (1.0f64, 1.0f64); // x(t)
        let (mut pa, mut pb) = (1.0f64, 1.0f64); // x(t-1)
        for t in 0..10usize {
            if t % 2 == 1 {
                // view of block 0: own fresh a, foreign pb; block 1: pa, own b
                let na = a - gamma * (a + pb);
                let nb = b - gamma * (pa + b);
                pa = a;
                pb = b;
                a = na;
                b = nb;
            } else {
                pa = a;
                pb = b;
            }
        }
        assert!((trace.final_state[0] - a).abs() <= 1e-15, "{} vs {a}", trace.final_state[0]);
        assert!((trace.final_state[1] - b).abs() <= 1e-15);
    }

    #[test]
    fn own_block_is_never_stale() {
        let obj = pl_sine(4).unwrap();
        let p = make_partition(4, PartitionSpec::Equal(2)).unwrap();
        let s = generate_schedule(2, 40, 5, ScheduleMode::UniformRandom, 11).unwrap();
        let mut sim = Simulation::new(&obj, &p, &s, &[3.0, -1.0, 0.5, 2.0], 0.02, RunOptions::default()).unwrap();
        for _ in 0..40 {
            for i in 0..2 {
                let view = sim.local_view(i).unwrap();
                let r = p.range(i).unwrap();
                assert_eq!(&view[r.clone()], &sim.state().true_state()[r]);
            }
            sim.step().unwrap();
        }
    }

    #[test]
    fn staleness_realization_matches_schedule() {
        // x^i_j(t) must equal x_j at time τ^i_j(t); verify against a full
        // state log kept by the test.
        let obj = pl_sine(4).unwrap();
        let p = make_partition(4, PartitionSpec::Equal(2)).unwrap();
        let s = generate_schedule(2, 30, 4, ScheduleMode::UniformRandom, 3).unwrap();
        let mut sim = Simulation::new(&obj, &p, &s, &[1.0, 2.0, -1.0, 0.5], 0.05, RunOptions::default()).unwrap();
        let mut states: Vec<Vec<f64>> = vec![sim.state().true_state().to_vec()];
        for t in 0..30usize {
            for i in 0..2 {
                let view = sim.local_view(i).unwrap();
                for j in 0..2 {
                    let tau = s.tau(i, j, t);
                    let r = p.range(j).unwrap();
                    assert_eq!(&view[r.clone()], &states[tau][r], "i={i} j={j} t={t} tau={tau}");
                }
            }
            sim.step().unwrap();
            states.push(sim.state().true_state().to_vec());
        }
    }

    #[test]
    fn pl_sine_centralized_run_beats_theorem_envelope() {
        let obj = pl_sine(1).unwrap();
        let p = make_partition(1, PartitionSpec::Equal(1)).unwrap();
        let s = generate_schedule(1, 2000, 1, ScheduleMode::Synchronous, 0).unwrap();
        let gamma = 0.01;
        let trace = run(&obj, &p, &s, &[3.0], gamma, 2000, RunOptions::default()).unwrap();
        let gap0 = trace.initial_gap().unwrap();
        let final_gap = obj.value(&trace.final_state).unwrap();
        let envelope = (1.0 - gamma / 32.0).powi(2000) * gap0;
        assert!(final_gap <= envelope * (1.0 + 1e-12), "{final_gap} vs {envelope}");
    }

    #[test]
    fn divergence_is_flagged() {
        let obj = quad_1d();
        let p = make_partition(1, PartitionSpec::Equal(1)).unwrap();
        let s = generate_schedule(1, 200, 1, ScheduleMode::Synchronous, 0).unwrap();
        match run(&obj, &p, &s, &[1.0], 1e6, 200, RunOptions::default()) {
            Err(Error::Divergence { .. }) => {}
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn early_stop_truncates_run() {
        let obj = quad_1d();
        let p = make_partition(1, PartitionSpec::Equal(1)).unwrap();
        let s = generate_schedule(1, 5000, 1, ScheduleMode::Synchronous, 0).unwrap();
        let opts = RunOptions { stop_gap_ratio: Some(1e-3), ..RunOptions::default() };
        let trace = run(&obj, &p, &s, &[1.0], 0.1, 5000, opts).unwrap();
        assert!(trace.stopped_early.is_some());
        assert!(trace.steps < 5000);
        let hit = trace.steps_to_gap_ratio(1e-3).unwrap();
        assert_eq!(Some(hit), trace.stopped_early);
        // (1-0.1)^(2t) <= 1e-3 first at t = 33
        assert_eq!(hit, 33);
    }

    #[test]
    fn replay_is_bytewise_identical() {
        let obj = diagonal_quadratic(vec![1.0, 4.0]).unwrap();
        let p = make_partition(2, PartitionSpec::Equal(2)).unwrap();
        let s = generate_schedule(2, 100, 5, ScheduleMode::UniformRandom, 7).unwrap();
        let a = run(&obj, &p, &s, &[1.0, -1.0], 0.05, 100, RunOptions::default()).unwrap();
        let b = run(&obj, &p, &s, &[1.0, -1.0], 0.05, 100, RunOptions::default()).unwrap();
        assert_eq!(a.records, b.records);
        assert_eq!(a.final_state, b.final_state);
        assert_eq!(a.s_norm_sq, b.s_norm_sq);
    }

    #[test]
    fn trace_covers_boundaries_even_when_decimated() {
        let obj = diagonal_quadratic(vec![1.0, 4.0]).unwrap();
        let p = make_partition(2, PartitionSpec::Equal(2)).unwrap();
        let s = generate_schedule(2, 60, 5, ScheduleMode::UniformRandom, 7).unwrap();
        let opts = RunOptions { record_every: 7, ..RunOptions::default() };
        let trace = run(&obj, &p, &s, &[1.0, -1.0], 0.05, 60, opts).unwrap();
        assert_eq!(trace.boundary_f.len(), 13); // kB for k=0..12
        assert_eq!(trace.s_norm_sq.len(), 60);
        // boundary rows are always recorded
        for k in 0..12 {
            assert!(trace.records.iter().any(|r| r.t == k * 5));
        }
    }
}
