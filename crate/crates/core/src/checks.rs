//! Runnable property suites behind the `check` command: gradient
//! correctness, certificate spot-checks, schedule soundness, lemma
//! inequalities on moderate-stepsize runs, and the convergence-bound grid.

use crate::analysis;
use crate::catalog::{DataSource, ObjectiveSpec};
use crate::linalg;
use crate::objective::{check_pl_at, finite_difference_gradient, ObjectiveInstance};
use crate::partition::{make_partition, PartitionSpec};
use crate::sampling;
use crate::schedule::{generate_schedule, ScheduleMode};
use crate::simulator::{run, RunOptions};
use crate::Result;

#[derive(Debug, Clone)]
pub struct CaseResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl CaseResult {
    fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        CaseResult { name: name.into(), pass, detail: detail.into() }
    }
}

/// The objective trio used by the simulation grids (all block-splittable
/// four-dimensional instances with analytic certificates).
pub fn grid_objectives() -> Result<Vec<ObjectiveInstance>> {
    Ok(vec![
        crate::objective::diagonal_quadratic(vec![1.0, 2.0, 2.0, 4.0])?,
        crate::objective::pl_sine(4)?,
        crate::objective::least_squares(
            vec![
                vec![1.0, 0.0, 0.0, 0.0],
                vec![0.0, 2.0, 0.0, 0.0],
                vec![0.0, 0.0, 0.5, 0.0],
                vec![0.0, 0.0, 0.0, 0.0],
            ],
            vec![1.0, 1.0, 1.0, 0.0],
        )?,
    ])
}

/// Every built-in, including a small logistic instance.
pub fn catalog_objectives() -> Result<Vec<ObjectiveInstance>> {
    let mut objs = grid_objectives()?;
    objs.push(crate::catalog::build_objective(&ObjectiveSpec::LogisticL2 {
        lambda: 0.01,
        source: DataSource::Synthetic { samples: 40, features: 6, separation: 1.0, seed: 11 },
        preprocess: true,
        feature_scale: 1.0,
    })?);
    Ok(objs)
}

/// Finite-difference agreement at 100 seeded points per built-in.
pub fn grad_suite() -> Result<Vec<CaseResult>> {
    let mut out = Vec::new();
    for obj in catalog_objectives()? {
        let mut worst = 0.0f64;
        for seed in 0..100u64 {
            let x = sampling::gaussian_point(obj.dim(), 2.0, 9000 + seed);
            let ga = obj.gradient(&x)?;
            let gf = finite_difference_gradient(&obj, &x, 1e-6)?;
            let rel = linalg::norm(&linalg::sub(&ga, &gf)) / linalg::norm(&ga).max(1.0);
            worst = worst.max(rel);
        }
        out.push(CaseResult::new(
            format!("grad/{}", obj.name()),
            worst <= 1e-5,
            format!("worst relative error {worst:.3e} over 100 points"),
        ));
    }
    Ok(out)
}

/// PL certificates hold on sampled domains for every certified built-in.
pub fn pl_suite() -> Result<Vec<CaseResult>> {
    let mut out = Vec::new();
    for obj in catalog_objectives()? {
        let cert = match obj.pl_certificate() {
            Some(c) => c,
            None => continue,
        };
        let points = sampling::sample_box(obj.dim(), 1000, 5.0, 777);
        let rep = check_pl_at(&obj, &cert, &points)?;
        out.push(CaseResult::new(
            format!("pl/{}", obj.name()),
            rep.pass,
            format!("worst ratio {:.6e} vs mu {:.6e} ({} points)", rep.worst_ratio, cert.mu, rep.used),
        ));
    }
    Ok(out)
}

/// 200 seeded generations across modes validate, plus the adversarial mode
/// actually realises the worst staleness.
pub fn schedule_suite() -> Result<Vec<CaseResult>> {
    let mut out = Vec::new();
    let modes = [
        ScheduleMode::Synchronous,
        ScheduleMode::Periodic(2),
        ScheduleMode::UniformRandom,
        ScheduleMode::AdversarialMax,
    ];
    let ns = [1usize, 2, 5, 20];
    let bs = [1usize, 2, 5, 10, 100];
    let mut failures = 0usize;
    let mut count = 0usize;
    let mut detail = String::new();
    'outer: for seed in 0..200u64 {
        let mode = modes[(seed % 4) as usize];
        let n = ns[((seed / 4) % 4) as usize];
        let b = bs[((seed / 16) % 5) as usize];
        let mode = match mode {
            ScheduleMode::Periodic(_) => ScheduleMode::Periodic(2.min(b)),
            m => m,
        };
        let s = generate_schedule(n, 4 * b + 3, b, mode, seed)?;
        let rep = s.validate();
        count += 1;
        if !rep.ok {
            failures += 1;
            detail = format!("seed {seed}: {:?}", rep.first_violation);
            break 'outer;
        }
    }
    out.push(CaseResult::new(
        "schedule/validate-200",
        failures == 0,
        if failures == 0 { format!("{count} generations validated") } else { detail },
    ));

    let mut hit_all = true;
    for b in [2usize, 5, 20] {
        let s = generate_schedule(3, 2 * b, b, ScheduleMode::AdversarialMax, 5)?;
        let mut hit = false;
        for t in 0..s.horizon() {
            for i in 0..3 {
                if s.is_active(i, t) {
                    for j in 0..3 {
                        if i != j && t - s.tau(i, j, t) == b - 1 {
                            hit = true;
                        }
                    }
                }
            }
        }
        hit_all &= hit;
    }
    out.push(CaseResult::new(
        "schedule/adversarial-hits-worst-staleness",
        hit_all,
        "staleness B-1 realised whenever horizon >= 2B",
    ));
    Ok(out)
}

/// Lemma inequalities along traces run at practical stepsizes (margins well
/// above floating-point noise).
pub fn lemma_suite() -> Result<Vec<CaseResult>> {
    let mut out = Vec::new();
    for obj in grid_objectives()? {
        let l = obj.lipschitz().unwrap();
        for &(n, b) in &[(1usize, 1usize), (2, 2), (4, 5)] {
            for mode in [ScheduleMode::UniformRandom, ScheduleMode::AdversarialMax] {
                let horizon = 30 * b;
                let schedule = generate_schedule(n, horizon, b, mode, 17)?;
                let partition = make_partition(obj.dim(), PartitionSpec::Equal(n))?;
                let x0 = sampling::gaussian_point(obj.dim(), 2.0, 23);
                let gamma = 0.3 / l;
                let trace = run(&obj, &partition, &schedule, &x0, gamma, horizon, RunOptions::default())?;
                let rep = analysis::check_lemma_inequalities(&trace);
                out.push(CaseResult::new(
                    format!("lemmas/{}/n{}b{}/{}", obj.name(), n, b, mode.name()),
                    rep.pass,
                    format!(
                        "margins: l1 {:.2e}, l2 {:.2e}, l3 {:.2e} over {} rows",
                        rep.lemma1.worst_margin,
                        rep.lemma2.worst_margin,
                        rep.lemma3.worst_margin,
                        trace.records.len()
                    ),
                ));
            }
        }
    }
    Ok(out)
}

/// One cell of the convergence-bound grid.
pub struct TheoremCell {
    pub objective: ObjectiveInstance,
    pub n: usize,
    pub delay_bound: usize,
    pub mode: ScheduleMode,
    pub seed: u64,
}

/// The full grid behind the bound check: three objectives, n ∈ {1,2,4},
/// B ∈ {1,2,5}, three schedule regimes, five seeds.
pub fn theorem_grid() -> Result<Vec<TheoremCell>> {
    let mut cells = Vec::new();
    for obj in grid_objectives()? {
        for &n in &[1usize, 2, 4] {
            for &b in &[1usize, 2, 5] {
                for mode in [ScheduleMode::Periodic(2.min(b)), ScheduleMode::UniformRandom, ScheduleMode::AdversarialMax] {
                    for seed in 0..5u64 {
                        cells.push(TheoremCell {
                            objective: obj.clone(),
                            n,
                            delay_bound: b,
                            mode,
                            seed,
                        });
                    }
                }
            }
        }
    }
    Ok(cells)
}

/// Run one grid cell at γ = 0.99·γ₀ over 20 windows and check the envelope.
pub fn run_theorem_cell(cell: &TheoremCell) -> Result<(analysis::BoundReport, analysis::WindowSeries, crate::simulator::SimulationTrace)> {
    let obj = &cell.objective;
    let mu = obj.pl_certificate().unwrap().mu;
    let l = obj.lipschitz().unwrap();
    let gamma = 0.99 * analysis::compute_gamma0(mu, l, cell.n, cell.delay_bound);
    let horizon = 20 * cell.delay_bound;
    let schedule = generate_schedule(cell.n, horizon, cell.delay_bound, cell.mode, cell.seed)?;
    let partition = make_partition(obj.dim(), PartitionSpec::Equal(cell.n))?;
    let x0 = sampling::gaussian_point(obj.dim(), 2.0, 31 + cell.seed);
    let trace = run(obj, &partition, &schedule, &x0, gamma, horizon, RunOptions::default())?;
    let series = analysis::estimate_eta(&trace)?;
    let report = analysis::check_theorem_bound(&series, mu, gamma)?;
    Ok((report, series, trace))
}

/// The bound holds on every grid cell.
pub fn theorem_suite() -> Result<Vec<CaseResult>> {
    let mut out = Vec::new();
    let mut failures = 0usize;
    let mut cells = 0usize;
    let mut detail = String::new();
    for cell in theorem_grid()? {
        cells += 1;
        let (report, _, _) = run_theorem_cell(&cell)?;
        if !report.pass {
            failures += 1;
            if detail.is_empty() {
                detail = format!(
                    "{}/n{}b{}/{}/seed{}: {:?}",
                    cell.objective.name(),
                    cell.n,
                    cell.delay_bound,
                    cell.mode.name(),
                    cell.seed,
                    report.first_violation
                );
            }
        }
    }
    out.push(CaseResult::new(
        "theorem/grid",
        failures == 0,
        if failures == 0 {
            format!("envelope held on all {cells} cells")
        } else {
            format!("{failures}/{cells} cells failed; first: {detail}")
        },
    ));
    Ok(out)
}

pub fn suite_by_name(name: &str) -> Result<Vec<CaseResult>> {
    match name {
        "grad" => grad_suite(),
        "pl" => pl_suite(),
        "schedule" => schedule_suite(),
        "lemmas" => lemma_suite(),
        "theorem" => theorem_suite(),
        other => Err(crate::error::Error::Config {
            key: "suite".into(),
            message: format!("unknown suite '{other}' (expected lemmas, pl, grad, schedule or theorem)"),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grad_and_pl_suites_pass() {
        assert!(grad_suite().unwrap().iter().all(|c| c.pass));
        assert!(pl_suite().unwrap().iter().all(|c| c.pass));
    }

    #[test]
    fn schedule_suite_passes() {
        assert!(schedule_suite().unwrap().iter().all(|c| c.pass));
    }

    #[test]
    fn unknown_suite_is_rejected() {
        assert!(suite_by_name("nope").is_err());
    }
}
