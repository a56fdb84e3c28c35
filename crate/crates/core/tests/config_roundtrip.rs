//! Property test: any well-formed configuration value survives
//! serialise → parse unchanged.

use abcd_core::catalog::{DataSource, ObjectiveSpec};
use abcd_core::config::{self, GammaSpec, OutputConfig, PartitionConfig, RunConfig, RunSection, ScheduleConfig, X0Spec};
use abcd_core::schedule::ScheduleMode;
use proptest::prelude::*;

fn objective_strategy() -> impl Strategy<Value = ObjectiveSpec> {
    prop_oneof![
        prop::collection::vec(0.1f64..10.0, 1..6).prop_map(|diag| ObjectiveSpec::DiagQuadratic { diag }),
        (1usize..8).prop_map(|dim| ObjectiveSpec::PlSine { dim }),
        (1usize..4, 1usize..4).prop_map(|(r, c)| ObjectiveSpec::LeastSquares {
            matrix: (0..r).map(|i| (0..c).map(|j| (i * c + j) as f64 * 0.5 - 1.0).collect()).collect(),
            rhs: (0..r).map(|i| i as f64).collect(),
        }),
        (
            0.0f64..1.0,
            2usize..100,
            1usize..20,
            0.0f64..5.0,
            any::<u64>(),
            any::<bool>(),
            0.5f64..30.0
        )
            .prop_map(|(lambda, samples, features, separation, seed, preprocess, feature_scale)| {
                ObjectiveSpec::LogisticL2 {
                    lambda,
                    source: DataSource::Synthetic { samples, features, separation, seed },
                    preprocess,
                    feature_scale,
                }
            }),
        ("[a-z][a-z0-9_/.-]{0,20}", prop::option::of(1usize..50)).prop_map(|(path, features)| {
            ObjectiveSpec::LogisticL2 {
                lambda: 0.01,
                source: DataSource::Path { path, features },
                preprocess: true,
                feature_scale: 1.0,
            }
        }),
    ]
}

fn schedule_strategy() -> impl Strategy<Value = ScheduleConfig> {
    (1usize..50, any::<u64>(), 0usize..4).prop_flat_map(|(b, seed, mode_idx)| {
        let mode = match mode_idx {
            0 => Just(ScheduleMode::Synchronous).boxed(),
            1 => Just(ScheduleMode::UniformRandom).boxed(),
            2 => Just(ScheduleMode::AdversarialMax).boxed(),
            _ => (1usize..=b).prop_map(ScheduleMode::Periodic).boxed(),
        };
        mode.prop_map(move |m| ScheduleConfig { delay_bound: b, mode: m, seed })
    })
}

fn config_strategy() -> impl Strategy<Value = RunConfig> {
    (
        objective_strategy(),
        (1usize..12, any::<bool>()),
        schedule_strategy(),
        (1usize..1000, prop::option::of(1e-6f64..0.5), 0usize..3, any::<u64>(), 1usize..40),
        ("[a-z][a-z0-9/_-]{0,16}", any::<bool>(), any::<bool>(), any::<bool>()),
    )
        .prop_map(|(objective, (n, explicit), schedule, run_bits, out_bits)| {
            let (extra_horizon, stop, x0_idx, x0_seed, record_every) = run_bits;
            let horizon = schedule.delay_bound + extra_horizon;
            let explicit_sizes = explicit.then(|| {
                // n blocks of size 2 keeps sizes consistent with n
                vec![2usize; n]
            });
            let x0 = match x0_idx {
                0 => X0Spec::Zeros,
                1 => X0Spec::Ones,
                _ => X0Spec::Gaussian { seed: x0_seed, scale: 1.5 },
            };
            let (dir, emit_csv, emit_svg, emit_report) = out_bits;
            RunConfig {
                objective,
                partition: PartitionConfig { n, explicit_sizes },
                schedule,
                run: RunSection {
                    horizon,
                    gamma: if x0_seed % 2 == 0 { GammaSpec::Auto } else { GammaSpec::Fixed(1e-3) },
                    x0,
                    record_every,
                    stop_gap_ratio: stop,
                },
                output: OutputConfig { dir, emit_csv, emit_svg, emit_report },
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn serialize_parse_is_identity(cfg in config_strategy()) {
        let text = config::serialize(&cfg);
        let parsed = config::parse(&text).unwrap_or_else(|e| panic!("serialised config failed to parse: {e}\n{text}"));
        prop_assert_eq!(parsed, cfg);
    }
}
