use vergo::config::RunConfig;
use vergo::dynamics::Platform;
use vergo::tasks::{
    build_scenario, run_scenario, run_trial, summarize, Method, Objective, RecordOptions, Suite, TrialRecord,
};

/// Small settings that keep closed-loop trials quick.
fn small_config() -> RunConfig {
    let mut cfg = RunConfig::default();
    cfg.basis.modes_per_dim = 5;
    cfg.basis.quadrature_cells = 64;
    cfg.controller.horizon = 8;
    cfg.controller.ilqr.max_iters = 3;
    cfg.lidar.n_radial = 8;
    cfg.lidar.n_angular = 6;
    cfg.camera.n_u = 8;
    cfg.camera.n_v = 6;
    cfg.erasing.budget = 20;
    cfg.search.ground_budget = 15;
    cfg.search.aerial_budget = 15;
    cfg.q1.steps = 12;
    cfg
}

const CASES: [(Suite, Platform); 5] = [
    (Suite::Erasing, Platform::DoubleIntegrator),
    (Suite::Ground, Platform::DiffDrive),
    (Suite::Aerial, Platform::Quadcopter),
    (Suite::Q1, Platform::DiffDrive),
    (Suite::Q1, Platform::Quadcopter),
];

#[test]
fn footprint_covering_everything_completes_at_step_one() {
    let cfg = small_config();
    let mut sc = build_scenario(&cfg, Suite::Erasing, Platform::DoubleIntegrator, 4).unwrap();
    let covered = sc.model.sample_points_unclamped(&sc.dynamics, sc.space(), &sc.initial_state).unwrap();
    sc.objective = Objective::Erase { points: covered.iter().take(5).map(|p| [p[0], p[1]]).collect(), radius: 1e-9 };
    for method in [Method::Vec, Method::Baseline] {
        let rec = run_scenario(&sc, method, RecordOptions::default()).unwrap();
        assert_eq!(rec.completion_step, Some(1));
        assert!(rec.success_under_budget);
        assert!(rec.metric_trace.is_empty());
    }
}

#[test]
fn target_at_the_start_is_found_at_step_one() {
    let cfg = small_config();
    for (suite, platform) in [(Suite::Ground, Platform::DiffDrive), (Suite::Aerial, Platform::Quadcopter)] {
        let mut sc = build_scenario(&cfg, suite, platform, 2).unwrap();
        let sample = sc.model.sample_points_unclamped(&sc.dynamics, sc.space(), &sc.initial_state).unwrap()[0].clone();
        let Objective::Detect { radius, .. } = sc.objective else { panic!("search objective") };
        sc.objective = Objective::Detect { targets: vec![[sample[0] + 0.5 * radius, sample[1]]], radius };
        let rec = run_scenario(&sc, Method::Baseline, RecordOptions::default()).unwrap();
        assert_eq!(rec.completion_step, Some(1));
        assert_eq!(rec.progress, vec![1]);
    }
}

#[test]
fn trials_are_bitwise_reproducible() {
    let cfg = small_config();
    for (suite, platform) in CASES {
        for method in [Method::Vec, Method::Baseline] {
            let a = run_trial(&cfg, suite, platform, method, 11).unwrap();
            let b = run_trial(&cfg, suite, platform, method, 11).unwrap();
            assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        }
    }
}

#[test]
fn methods_share_the_scenario() {
    let cfg = small_config();
    for (suite, platform) in CASES {
        let v = run_trial(&cfg, suite, platform, Method::Vec, 5).unwrap();
        let b = run_trial(&cfg, suite, platform, Method::Baseline, 5).unwrap();
        assert_eq!(v.scenario, b.scenario);
        assert_eq!(v.states[0], b.states[0]);
        assert_eq!((v.budget, v.max_steps, v.objective_size), (b.budget, b.max_steps, b.objective_size));
    }
    // seeds draw different scenarios
    let a = build_scenario(&cfg, Suite::Ground, Platform::DiffDrive, 1).unwrap();
    let b = build_scenario(&cfg, Suite::Ground, Platform::DiffDrive, 2).unwrap();
    assert_ne!(a.info, b.info);
}

#[test]
fn motionless_robot_has_constant_positive_metric() {
    let mut cfg = small_config();
    cfg.double_integrator.control_weight = vec![1e12; 3];
    let mut sc = build_scenario(&cfg, Suite::Q1, Platform::DoubleIntegrator, 0).unwrap();
    sc.objective = Objective::None;
    let rec = run_scenario(&sc, Method::Baseline, RecordOptions { trajectories: true, ..Default::default() }).unwrap();
    let first = rec.metric_trace[0];
    assert!(first > 0.0);
    for v in &rec.metric_trace {
        assert!((v - first).abs() <= 1e-6 * first, "{v} vs {first}");
    }
}

#[test]
fn progress_is_monotone_and_budget_is_enforced() {
    let cfg = small_config();
    for (suite, platform) in &CASES[..3] {
        for seed in 0..3 {
            for method in [Method::Vec, Method::Baseline] {
                let rec = run_trial(&cfg, *suite, *platform, method, seed).unwrap();
                check_record(&rec);
            }
        }
    }
}

fn check_record(rec: &TrialRecord) {
    assert!(rec.progress.windows(2).all(|w| w[0] <= w[1]));
    assert!(rec.progress.iter().all(|&p| p <= rec.objective_size));
    assert_eq!(rec.max_steps, 3 * rec.budget);
    assert!(rec.progress.len() <= rec.max_steps);
    assert!(rec.steps_executed() <= rec.max_steps);
    match rec.completion_step {
        Some(c) => {
            assert_eq!(rec.progress.len(), c);
            assert_eq!(*rec.progress.last().unwrap(), rec.objective_size);
            assert_eq!(rec.success_under_budget, c <= rec.budget);
            assert_eq!(rec.censored_steps(), c);
        }
        None => {
            assert!(!rec.success_under_budget);
            assert_eq!(rec.censored_steps(), rec.max_steps);
            if rec.failure.is_none() {
                assert_eq!(rec.steps_executed(), rec.max_steps);
            }
        }
    }
    assert_eq!(rec.metric_trace.len(), rec.steps_executed());
    assert_eq!(rec.states.len(), rec.steps_executed() + 1);
}

#[test]
fn summary_counts_and_censoring() {
    let cfg = small_config();
    let trials: Vec<_> =
        (0..3).map(|s| run_trial(&cfg, Suite::Erasing, Platform::DoubleIntegrator, Method::Vec, s).unwrap()).collect();
    let s = summarize(&trials, Platform::DoubleIntegrator, Method::Vec);
    assert_eq!(s.trials, 3);
    assert_eq!(s.successes, trials.iter().filter(|t| t.completion_step.is_some()).count());
    assert_eq!(s.success_under_budget, trials.iter().filter(|t| t.success_under_budget).count());
    let mut steps: Vec<f64> = trials.iter().map(|t| t.censored_steps() as f64).collect();
    steps.sort_by(f64::total_cmp);
    assert_eq!(s.median_steps, steps[1]);
}

#[test]
fn point_model_trials_match_the_standard_path_bitwise() {
    let cfg = small_config();
    for (suite, platform) in [
        (Suite::Q1, Platform::DoubleIntegrator),
        (Suite::Q1, Platform::DiffDrive),
        (Suite::Q1, Platform::Quadcopter),
        (Suite::Erasing, Platform::DoubleIntegrator),
    ] {
        for seed in 0..5 {
            let mut sc = build_scenario(&cfg, suite, platform, seed).unwrap();
            sc.model = vergo::VolumetricModel::Point;
            let opts = RecordOptions { trajectories: true, ..Default::default() };
            let mut v = run_scenario(&sc, Method::Vec, opts).unwrap();
            let b = run_scenario(&sc, Method::Baseline, opts).unwrap();
            v.method = b.method;
            assert_eq!(serde_json::to_string(&v).unwrap(), serde_json::to_string(&b).unwrap());
        }
    }
}
