//! Activation sets T^i and staleness maps τ^i_j over a finite horizon,
//! generated under several delay regimes and certified against the
//! partial-asynchrony contract with delay bound B:
//!
//! 1. every window of B consecutive steps contains an activation for every
//!    processor (checked for all windows fully inside the horizon),
//! 2. t − B < τ^i_j(t) ≤ t at every activation,
//! 3. τ^i_j is nondecreasing in t (information is never un-received).
//!
//! Staleness is generated directly as τ tables rather than by simulating
//! message queues; the tables are the analytical object the convergence
//! bound is stated over, and direct generation makes the contract
//! enforceable by construction. τ values index *times*, so a processor may
//! hold a value "from" time τ even if the owner last wrote earlier — block
//! values are constant between writes, which keeps the two readings
//! value-equal. Generators additionally keep τ(t) > t − B at every t (not
//! just activations) so a history buffer of depth B+1 always suffices.

use std::io::Write;

use rand::Rng;

use crate::error::Error;
use crate::sampling::rng_from_seed;
use crate::Result;

/// Delay regime of a generated schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleMode {
    /// Every processor active at every step with fresh information. The
    /// delay-free baseline; B = 1 semantics.
    Synchronous,
    /// Processor i active at t ≡ i (mod p); staleness points at the owner's
    /// latest value, floored at t−B+1.
    Periodic(usize),
    /// One activation per aligned length-B window, drawn uniformly
    /// (conditioned so consecutive activations stay ≤ B apart); staleness
    /// drawn uniformly between the window floor and the owner's latest
    /// value, clamped monotone.
    UniformRandom,
    /// Worst admissible staleness everywhere: τ = max(t−B+1, 0), activations
    /// at window ends.
    AdversarialMax,
}

impl ScheduleMode {
    pub fn name(&self) -> String {
        match self {
            ScheduleMode::Synchronous => "synchronous".into(),
            ScheduleMode::Periodic(p) => format!("periodic({p})"),
            ScheduleMode::UniformRandom => "uniform-random".into(),
            ScheduleMode::AdversarialMax => "adversarial-max".into(),
        }
    }
}

/// Materialised activation and staleness tables for one run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AsyncSchedule {
    n: usize,
    horizon: usize,
    delay_bound: usize,
    mode: ScheduleMode,
    seed: u64,
    /// active[t * n + i]
    active: Vec<bool>,
    /// tau[(t * n + i) * n + j] = τ^i_j(t); diagonal entries equal t.
    tau: Vec<u32>,
}

/// First violation found by [`AsyncSchedule::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScheduleViolation {
    /// Assumption "at least one activation per window" fails for processor
    /// `i` on the window starting at `window_start`.
    MissingActivation { i: usize, window_start: usize },
    /// τ^i_j(t) ≤ t − B or τ^i_j(t) > t at an active step.
    StalenessBound { i: usize, j: usize, t: usize, tau: usize },
    /// τ^i_j decreased from t−1 to t.
    NonMonotone { i: usize, j: usize, t: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleReport {
    pub ok: bool,
    pub first_violation: Option<ScheduleViolation>,
}

impl AsyncSchedule {
    pub fn processors(&self) -> usize {
        self.n
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn delay_bound(&self) -> usize {
        self.delay_bound
    }

    pub fn mode(&self) -> ScheduleMode {
        self.mode
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn is_active(&self, i: usize, t: usize) -> bool {
        self.active[t * self.n + i]
    }

    /// τ^i_j(t): the time whose value of block j processor i holds at t.
    pub fn tau(&self, i: usize, j: usize, t: usize) -> usize {
        self.tau[(t * self.n + i) * self.n + j] as usize
    }

    /// max over i ≠ j of t − τ^i_j(t).
    pub fn max_staleness_at(&self, t: usize) -> usize {
        let mut worst = 0usize;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    worst = worst.max(t - self.tau(i, j, t));
                }
            }
        }
        worst
    }

    /// Exhaustively check the three schedule invariants.
    pub fn validate(&self) -> ScheduleReport {
        let (n, t_max, b) = (self.n, self.horizon, self.delay_bound);

        // 1: activation in every window fully inside the horizon.
        for i in 0..n {
            let mut last_active: Option<usize> = None;
            let mut next_check = 0usize;
            for t in 0..t_max {
                if self.is_active(i, t) {
                    last_active = Some(t);
                }
                // window starting at `next_check` closes at t = next_check+b-1
                while t + 1 >= next_check + b && next_check + b <= t_max {
                    let covered = matches!(last_active, Some(a) if a >= next_check);
                    if !covered {
                        return ScheduleReport {
                            ok: false,
                            first_violation: Some(ScheduleViolation::MissingActivation {
                                i,
                                window_start: next_check,
                            }),
                        };
                    }
                    next_check += 1;
                }
            }
        }

        // 2: staleness bound at activations; 3: monotonicity everywhere.
        for t in 0..t_max {
            for i in 0..n {
                let active = self.is_active(i, t);
                for j in 0..n {
                    let tau = self.tau(i, j, t);
                    if i != j && active && (tau > t || tau + b <= t) {
                        return ScheduleReport {
                            ok: false,
                            first_violation: Some(ScheduleViolation::StalenessBound { i, j, t, tau }),
                        };
                    }
                    if t > 0 && tau < self.tau(i, j, t - 1) {
                        return ScheduleReport {
                            ok: false,
                            first_violation: Some(ScheduleViolation::NonMonotone { i, j, t }),
                        };
                    }
                }
            }
        }

        ScheduleReport { ok: true, first_violation: None }
    }

    /// Audit CSV: one row per (t, i) with the activation flag and the full
    /// staleness row.
    pub fn to_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        write!(w, "t,i,active")?;
        for j in 0..self.n {
            write!(w, ",tau_{}", j + 1)?;
        }
        writeln!(w)?;
        for t in 0..self.horizon {
            for i in 0..self.n {
                write!(w, "{t},{},{}", i + 1, u8::from(self.is_active(i, t)))?;
                for j in 0..self.n {
                    write!(w, ",{}", self.tau(i, j, t))?;
                }
                writeln!(w)?;
            }
        }
        Ok(())
    }

    /// Build a schedule from explicit tables. Used by tests that need
    /// hand-built (possibly invalid) schedules.
    pub fn from_tables(
        n: usize,
        horizon: usize,
        delay_bound: usize,
        active: Vec<bool>,
        tau: Vec<u32>,
        seed: u64,
        mode: ScheduleMode,
    ) -> Result<Self> {
        if active.len() != n * horizon || tau.len() != n * n * horizon {
            return Err(Error::InvalidSchedule("table sizes do not match n and horizon".into()));
        }
        Ok(AsyncSchedule { n, horizon, delay_bound, mode, seed, active, tau })
    }
}

/// Sub-stream seeding so activation draws and each (i, j) staleness stream
/// are independent of each other and of iteration order.
fn mix_seed(seed: u64, a: u64, b: u64) -> u64 {
    let mut z = seed ^ a.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ b.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Generate a schedule for `n` processors over `horizon` steps with delay
/// bound `delay_bound` under the given mode, fully determined by `seed`.
pub fn generate_schedule(
    n: usize,
    horizon: usize,
    delay_bound: usize,
    mode: ScheduleMode,
    seed: u64,
) -> Result<AsyncSchedule> {
    if n == 0 {
        return Err(Error::InvalidSchedule("processor count must be positive".into()));
    }
    if delay_bound == 0 {
        return Err(Error::InvalidSchedule("delay bound B must be a positive integer".into()));
    }
    if horizon == 0 || horizon < delay_bound {
        return Err(Error::InvalidSchedule(format!(
            "horizon {horizon} must be at least the delay bound {delay_bound}"
        )));
    }
    if horizon > u32::MAX as usize {
        return Err(Error::InvalidSchedule("horizon exceeds the supported range".into()));
    }
    if let ScheduleMode::Periodic(p) = mode {
        if p == 0 {
            return Err(Error::InvalidSchedule("period must be positive".into()));
        }
        if p > delay_bound {
            return Err(Error::InvalidSchedule(format!(
                "period {p} exceeds the delay bound {delay_bound}"
            )));
        }
    }

    let b = delay_bound;
    let mut active = vec![false; n * horizon];
    let mut tau = vec![0u32; n * n * horizon];

    // Activations.
    match mode {
        ScheduleMode::Synchronous => active.fill(true),
        ScheduleMode::Periodic(p) => {
            for t in 0..horizon {
                for i in 0..n {
                    active[t * n + i] = t % p == i % p;
                }
            }
        }
        ScheduleMode::AdversarialMax => {
            for t in 0..horizon {
                if t % b == b - 1 {
                    for i in 0..n {
                        active[t * n + i] = true;
                    }
                }
            }
        }
        ScheduleMode::UniformRandom => {
            for i in 0..n {
                let mut rng = rng_from_seed(mix_seed(seed, i as u64, 0x5eed_ac71));
                // One slot per aligned window, conditioned so consecutive
                // activations are at most B apart (the sliding-window form
                // of the contract).
                let mut prev = rng.random_range(0..b.min(horizon));
                active[prev * n + i] = true;
                let mut w = 1usize;
                loop {
                    let lo = w * b;
                    if lo >= horizon {
                        break;
                    }
                    let hi = (prev + b).min(lo + b - 1).min(horizon - 1);
                    if hi < lo {
                        break;
                    }
                    let slot = rng.random_range(lo..=hi);
                    active[slot * n + i] = true;
                    prev = slot;
                    w += 1;
                }
            }
        }
    }

    // Latest value-time of each owner j at each t: the newest time v ≤ t such
    // that block j did not change after v... concretely the last write time
    // plus one, 0 if j never wrote before t.
    // value_time[t * n + j] = max { u+1 : u < t, j active at u } ∪ {0}.
    let mut value_time = vec![0u32; n * horizon];
    for t in 1..horizon {
        for j in 0..n {
            let prev = value_time[(t - 1) * n + j];
            value_time[t * n + j] = if active[(t - 1) * n + j] { t as u32 } else { prev };
        }
    }

    // Staleness tables.
    match mode {
        ScheduleMode::Synchronous => {
            for t in 0..horizon {
                for i in 0..n {
                    for j in 0..n {
                        tau[(t * n + i) * n + j] = t as u32;
                    }
                }
            }
        }
        ScheduleMode::AdversarialMax => {
            for t in 0..horizon {
                let oldest = t.saturating_sub(b - 1) as u32;
                for i in 0..n {
                    for j in 0..n {
                        tau[(t * n + i) * n + j] = if i == j { t as u32 } else { oldest };
                    }
                }
            }
        }
        ScheduleMode::Periodic(_) => {
            for t in 0..horizon {
                let floor = t.saturating_sub(b - 1) as u32;
                for i in 0..n {
                    for j in 0..n {
                        tau[(t * n + i) * n + j] = if i == j {
                            t as u32
                        } else {
                            value_time[t * n + j].max(floor)
                        };
                    }
                }
            }
        }
        ScheduleMode::UniformRandom => {
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        for t in 0..horizon {
                            tau[(t * n + i) * n + j] = t as u32;
                        }
                        continue;
                    }
                    let mut rng = rng_from_seed(mix_seed(seed, (i as u64) << 20 | j as u64, 0x7a61));
                    let mut prev = 0u32;
                    for t in 0..horizon {
                        let floor = t.saturating_sub(b - 1) as u32;
                        let newest = value_time[t * n + j].max(floor).min(t as u32);
                        let lo = floor.min(newest);
                        let draw = rng.random_range(lo..=newest);
                        let v = draw.max(prev).max(floor);
                        tau[(t * n + i) * n + j] = v;
                        prev = v;
                    }
                }
            }
        }
    }

    Ok(AsyncSchedule { n, horizon, delay_bound, mode, seed, active, tau })
}
