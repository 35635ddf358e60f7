mod common;

use pareto_mcts::environment::{load_grid, Extent, FieldGrid};
use pareto_mcts::gp::{GaussianProcess, GpParams};
use pareto_mcts::mission::{
    build_environment, metrics, predict_grid, run_mission, run_mission_to_dir, run_mission_with, MissionConfig,
    PreferenceSchedule, LOG_VERSION,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn small_config(seed: u64, samples: usize) -> MissionConfig {
    let mut cfg = MissionConfig {
        seed,
        ..MissionConfig::default()
    };
    cfg.synth.resolution = 20;
    cfg.mission.samples = samples;
    cfg.planner.budget = 30;
    cfg.planner.rollout_depth = 2;
    cfg
}

#[test]
fn one_primitive_budget_is_one_round() {
    let cfg = small_config(3, 10);
    let out = run_mission(&cfg).unwrap();
    assert_eq!(out.log.records.len(), 1);
    assert_eq!(out.samples(), 10);
    assert_eq!(out.log.records[0].samples, 10);
}

#[test]
fn log_invariants_and_sample_conservation() {
    let cfg = small_config(5, 75);
    let out = run_mission(&cfg).unwrap();
    assert!(out.aborted.is_none());
    assert_eq!(out.samples(), 75);
    assert_eq!(out.observations.len(), 75);
    let samples: Vec<usize> = out.log.records.iter().map(|r| r.samples).collect();
    assert!(samples.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(*samples.last().unwrap(), 75);
    for (i, r) in out.log.records.iter().enumerate() {
        assert_eq!(r.round, i + 1);
        assert!((0.0..=100.0).contains(&r.metrics.hotspot_pct));
        assert!(r.action < cfg.primitives.count);
        assert!(out.truth.extent().contains(r.pose.x, r.pose.y));
    }
    for p in &out.locations {
        assert!(out.truth.extent().contains(p[0], p[1]));
    }
}

#[test]
fn rounds_are_reported_as_they_happen() {
    let cfg = small_config(6, 40);
    let mut seen = Vec::new();
    let out = run_mission_with(&cfg, |r| {
        seen.push(r.clone());
        Ok(())
    })
    .unwrap();
    assert_eq!(seen, out.log.records);
}

#[test]
fn written_logs_are_versioned_and_complete() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(8, 40);
    let out = run_mission_to_dir(&cfg, dir.path()).unwrap();
    let mission = std::fs::read_to_string(dir.path().join("mission.csv")).unwrap();
    let lines: Vec<&str> = mission.lines().collect();
    assert_eq!(lines[0], LOG_VERSION);
    assert!(lines[1].starts_with("#units=standardized"));
    assert_eq!(lines.len(), 3 + out.log.records.len());
    let samples = std::fs::read_to_string(dir.path().join("samples.csv")).unwrap();
    assert_eq!(samples.lines().count(), 2 + 40);
    let pred = load_grid(&dir.path().join("prediction_final.csv")).unwrap();
    assert!(pred.same_shape(&out.truth));
    assert_eq!(pred.cells(), out.prediction.cells());
    assert!(dir.path().join("timing.csv").is_file());
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(9, 50);
    run_mission_to_dir(&cfg, &dir.path().join("a")).unwrap();
    run_mission_to_dir(&cfg, &dir.path().join("b")).unwrap();
    for f in ["mission.csv", "samples.csv", "prediction_final.csv"] {
        let a = std::fs::read(dir.path().join("a").join(f)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
}

fn trace(out: &pareto_mcts::MissionOutcome) -> Vec<(usize, usize)> {
    out.log.records.iter().map(|r| (r.samples, r.action)).collect()
}

#[test]
fn preference_schedule_switches_after_threshold() {
    let mut cfg = small_config(10, 40);
    cfg.preference = Some(PreferenceSchedule { objective: 0, until: 40 });
    let a = run_mission(&cfg).unwrap();
    cfg.preference = Some(PreferenceSchedule { objective: 0, until: 0 });
    let b = run_mission(&cfg).unwrap();
    cfg.preference = None;
    let c = run_mission(&cfg).unwrap();
    assert_eq!(trace(&b), trace(&c));
    assert_eq!(a.samples(), 40);
}

#[test]
fn cornered_robot_aborts_with_partial_log() {
    // A workspace narrower than any primitive.
    let mut cfg = small_config(1, 30);
    cfg.synth.size = 2.5;
    cfg.synth.margin = 0.2;
    cfg.primitives.arc_length = 2.0;
    let out = run_mission(&cfg).unwrap();
    assert!(out.aborted.is_some());
    assert!(out.samples() < 30);
}

#[test]
fn metric_examples() {
    let e = Extent::new(0.0, 0.0, 2.0, 2.0).unwrap();
    let truth = FieldGrid::new(2, 2, e, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
    let pred = FieldGrid::new(2, 2, e, vec![1.0, 2.0, 3.0, 6.0]).unwrap();
    let m = metrics(&pred, &truth, &[[0.5, 1.5], [1.5, 1.5], [0.5, 0.5]]).unwrap();
    assert!((m.rmse - 1.0).abs() < 1e-12);
    assert!((m.mae - 0.5).abs() < 1e-12);
    assert!((m.hotspot_rmse - 2f64.sqrt()).abs() < 1e-12);
    assert!((m.hotspot_mae - 1.0).abs() < 1e-12);
    assert!((m.hotspot_pct - 200.0 / 3.0).abs() < 1e-12);
    let z = metrics(&truth, &truth, &[]).unwrap();
    assert_eq!([z.rmse, z.mae, z.hotspot_rmse, z.hotspot_mae], [0.0; 4]);
}

#[test]
fn prediction_grid_matches_pointwise_predictions() {
    let truth = build_environment(&small_config(2, 10)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let xs: Vec<[f64; 2]> = (0..25).map(|_| [rng.random_range(0.0..10.0), rng.random_range(0.0..10.0)]).collect();
    let ys: Vec<f64> = xs.iter().map(|p| truth.interpolate(p[0], p[1]).unwrap()).collect();
    let gp = GaussianProcess::fit(GpParams::default(), &xs, &ys).unwrap();
    let grid = predict_grid(&gp, &truth).unwrap();
    for (c, v) in truth.cell_centers().iter().zip(grid.cells()) {
        assert!((gp.predict(c).unwrap().mean - v).abs() < 1e-10);
    }
}

#[test]
fn dense_noiseless_data_reproduces_the_grid() {
    let e = Extent::new(0.0, 0.0, 6.0, 6.0).unwrap();
    let cells: Vec<f64> = (0..36).map(|i| (f64::from(i) * 0.37).sin()).collect();
    let truth = FieldGrid::new(6, 6, e, cells).unwrap();
    let params = GpParams {
        noise_var: 0.0,
        length_scale: 0.8,
        ..GpParams::default()
    };
    let gp = GaussianProcess::fit(params, &truth.cell_centers(), truth.cells()).unwrap();
    let pred = predict_grid(&gp, &truth).unwrap();
    for (a, b) in pred.cells().iter().zip(truth.cells()) {
        assert!((a - b).abs() < 1e-6);
    }
    let prior = predict_grid(&GaussianProcess::prior(params).unwrap(), &truth).unwrap();
    assert!(prior.cells().iter().all(|&v| v == 0.0));
}

#[test]
fn file_environments_are_downsampled() {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/plume_preference.toml");
    let cfg = MissionConfig::load(&path).unwrap();
    let g = build_environment(&cfg).unwrap();
    assert_eq!((g.width(), g.height()), (30, 30));
    assert_eq!(cfg.mission.samples, 800);
    assert_eq!(cfg.preference, Some(PreferenceSchedule { objective: 0, until: 400 }));
}

#[test]
fn shipped_configs_load() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            MissionConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            n += 1;
        }
    }
    assert!(n >= 5);
}
