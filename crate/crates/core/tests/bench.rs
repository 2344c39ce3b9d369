use std::io::{BufReader, Cursor};
use std::path::Path;

use icenav::bench::{
    aggregate, emit_plots, kde, read_records, run_batch, scenario_id, silverman_bandwidth, write_summary_csv,
    BatchConfig, ConfigError, TrialRecord,
};
use icenav::ice::{generate_scenario, Channel, FloeLimits, ScenarioParams};
use icenav::navigator::{NavigatorKind, TrialStatus};
use proptest::prelude::*;

fn record(c: f64, seed: u64, nav: NavigatorKind, normalized: Option<f64>) -> TrialRecord {
    TrialRecord {
        scenario_id: scenario_id(c, seed),
        concentration: c,
        seed,
        navigator: nav,
        status: TrialStatus::ReachedGoal,
        total_energy_loss: normalized.unwrap_or(0.0) * 10.0,
        normalized_energy_loss: normalized,
        collision_masses: vec![20.0 + seed as f64, 40.0],
        collision_events: 3,
        scenario_mean_floe_mass: 30.0,
        mean_tracking_error: 0.01,
        plan_times: vec![0.004, 0.005],
        nodes_expanded: vec![100, 120],
        nodes_expanded_vertical: vec![],
        plan_failures: 0,
        path_length_executed: 70.0,
        sim_time: 240.0,
        iterations: 2,
    }
}

/// A short channel so whole trials take well under a second.
fn small_config(out: &Path) -> BatchConfig {
    BatchConfig {
        concentrations: vec![0.3],
        trials_per_concentration: 2,
        navigators: vec![NavigatorKind::Lattice, NavigatorKind::Straight],
        workers: 1,
        out_dir: out.to_path_buf(),
        scenario: ScenarioParams {
            channel: Channel {
                width: 12.0,
                length: 24.0,
                goal_y: 20.0,
            },
            limits: FloeLimits {
                y_min: 5.0,
                y_max: 18.0,
                ..FloeLimits::default()
            },
            ..ScenarioParams::default()
        },
        ..BatchConfig::default()
    }
}

#[test]
fn record_lines_round_trip_exactly() {
    let r = record(0.2, 3, NavigatorKind::Lattice, Some(0.1 + 0.2));
    let back = TrialRecord::from_line(&r.to_line()).unwrap();
    assert_eq!(back, r);
    assert_eq!(back.normalized_energy_loss.unwrap().to_bits(), (0.1f64 + 0.2).to_bits());
}

proptest! {
    #[test]
    fn any_finite_record_round_trips(
        loss in 0.0f64..1e6,
        norm in proptest::option::of(0.0f64..1e3),
        masses in proptest::collection::vec(1e-3f64..1e4, 0..8),
        err in 0.0f64..10.0,
        seed in any::<u64>(),
    ) {
        let mut r = record(0.4, seed, NavigatorKind::SkeletonProxy, norm);
        r.total_energy_loss = loss;
        r.collision_masses = masses;
        r.mean_tracking_error = err;
        let back = TrialRecord::from_line(&r.to_line()).unwrap();
        prop_assert_eq!(back, r);
    }
}

#[test]
fn malformed_records_are_rejected() {
    let mut r = record(0.2, 0, NavigatorKind::Lattice, None);
    r.iterations = 5;
    assert!(TrialRecord::from_line(&r.to_line()).is_err());
    let line = record(0.2, 0, NavigatorKind::Lattice, None).to_line();
    assert!(TrialRecord::from_line(&line.replace("\"seed\"", "\"sead\"")).is_err());
    assert!(TrialRecord::from_line("{}").is_err());
}

#[test]
fn torn_tail_is_skipped_only_when_allowed() {
    let a = record(0.2, 0, NavigatorKind::Lattice, None).to_line();
    let b = record(0.2, 1, NavigatorKind::Lattice, None).to_line();
    let text = format!("{a}\n\n{b}\n{}", &a[..a.len() / 2]);
    let (records, torn) = read_records(Cursor::new(text.as_bytes()), true).unwrap();
    assert_eq!(records.len(), 2);
    assert_eq!(torn, Some((a.len() + b.len() + 3) as u64));
    assert!(read_records(Cursor::new(text.as_bytes()), false).is_err());
    // a bad line in the middle is corruption, not a torn tail
    let text = format!("{}\n{b}\n", &a[..10]);
    assert!(read_records(Cursor::new(text.as_bytes()), true).is_err());
}

#[test]
fn batch_writes_one_record_per_pair_and_resumes() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("records.jsonl");
    let mut cfg = small_config(dir.path());
    cfg.trials_per_concentration = 1;
    let (records, progress) = run_batch(&cfg, &log).unwrap();
    assert_eq!(records.len(), 2);
    assert_eq!(progress.new_records, 2);
    assert!(progress.failed.is_empty());
    assert_eq!(records[0].scenario_id, records[1].scenario_id);
    assert_eq!(records[0].navigator, NavigatorKind::Lattice);
    assert_eq!(records[1].navigator, NavigatorKind::Straight);

    // interrupt the second scenario mid-append
    cfg.trials_per_concentration = 2;
    let partial = records[0].to_line();
    let mut text = std::fs::read_to_string(&log).unwrap();
    text.push_str(&partial[..partial.len() / 3]);
    std::fs::write(&log, text).unwrap();
    let (all, progress) = run_batch(&cfg, &log).unwrap();
    assert_eq!(all.len(), 4);
    assert_eq!(progress.resumed, 1);
    assert_eq!(progress.new_records, 2);

    let (on_disk, torn) = read_records(BufReader::new(std::fs::File::open(&log).unwrap()), false).unwrap();
    assert_eq!(torn, None);
    assert_eq!(on_disk.len(), 4);
    let mut keys: Vec<_> = on_disk.iter().map(|r| (r.scenario_id.clone(), r.navigator)).collect();
    keys.sort();
    keys.dedup();
    assert_eq!(keys.len(), 4);

    // nothing left to do
    let (again, progress) = run_batch(&cfg, &log).unwrap();
    assert_eq!(progress.new_records, 0);
    assert_eq!(again, all);
}

#[test]
fn batch_records_are_consistent_with_their_scenarios() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("records.jsonl");
    let mut cfg = small_config(dir.path());
    cfg.concentrations = vec![0.4];
    cfg.navigators = NavigatorKind::ALL.to_vec();
    let (records, _) = run_batch(&cfg, &log).unwrap();
    assert_eq!(records.len(), 6);
    for r in &records {
        let s = generate_scenario(r.concentration, r.seed, &cfg.scenario).unwrap();
        let (lo, hi) = s.floe_mass_range().unwrap();
        assert!(r.collision_masses.iter().all(|m| (lo..=hi).contains(m)), "{r:?}");
        assert_eq!(r.scenario_mean_floe_mass, s.mean_floe_mass());
        if r.navigator == NavigatorKind::Straight {
            let expect = (r.total_energy_loss > 0.0).then_some(1.0);
            assert_eq!(r.normalized_energy_loss, expect);
        }
    }
}

#[test]
fn lattice_only_batches_still_normalize() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("records.jsonl");
    let mut cfg = small_config(dir.path());
    cfg.trials_per_concentration = 1;
    cfg.navigators = vec![NavigatorKind::Lattice];
    cfg.concentrations = vec![0.4];
    let (records, _) = run_batch(&cfg, &log).unwrap();
    assert_eq!(records.len(), 1);
    let r = &records[0];
    if let Some(n) = r.normalized_energy_loss {
        assert!(n.is_finite() && n >= 0.0);
    }
}

#[test]
fn aggregate_examples() {
    let rows = aggregate(&[record(0.2, 0, NavigatorKind::Lattice, Some(0.7))]);
    assert_eq!(rows.len(), 1);
    let r = &rows[0];
    assert_eq!(r.normalized_mean, Some(0.7));
    assert_eq!(r.normalized_median, Some(0.7));
    assert_eq!(r.normalized_max, Some(0.7));

    let rows = aggregate(&[
        record(0.2, 0, NavigatorKind::Lattice, Some(0.2)),
        record(0.2, 1, NavigatorKind::Lattice, Some(0.4)),
        record(0.2, 1, NavigatorKind::Straight, None),
    ]);
    assert_eq!(rows.len(), 2);
    assert!((rows[0].normalized_mean.unwrap() - 0.3).abs() < 1e-15);
    assert_eq!(rows[0].trials, 2);
    assert_eq!(rows[1].normalized_count, 0);
    assert_eq!(rows[1].normalized_mean, None);
    assert_eq!(rows[1].trials, 1);
}

proptest! {
    #[test]
    fn aggregation_ignores_record_order(
        values in proptest::collection::vec(0.0f64..3.0, 1..12),
        rotate in 0usize..12,
        swap in any::<bool>(),
    ) {
        let records: Vec<TrialRecord> = values
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let nav = if i % 2 == 0 { NavigatorKind::Lattice } else { NavigatorKind::SkeletonProxy };
                record(if i % 3 == 0 { 0.2 } else { 0.5 }, i as u64, nav, Some(v))
            })
            .collect();
        let mut shuffled = records.clone();
        let n = shuffled.len();
        shuffled.rotate_left(rotate % n);
        if swap {
            shuffled.reverse();
        }
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_summary_csv(&aggregate(&records), &mut a).unwrap();
        write_summary_csv(&aggregate(&shuffled), &mut b).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn silverman_and_kde_match_hand_values() {
    let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
    // σ = √2.5, IQR = 2 → min(1.5811, 1.4925) = 1.4925
    let expect = 0.9 * (2.0 / 1.34) * 5f64.powf(-0.2);
    assert!((silverman_bandwidth(&xs) - expect).abs() < 1e-12);
    assert_eq!(silverman_bandwidth(&[2.0]), 1.0);
    assert_eq!(silverman_bandwidth(&[2.0, 2.0, 2.0]), 1.0);

    let grid: Vec<f64> = (0..4001).map(|i| -10.0 + i as f64 * 0.005).collect();
    let d = kde(&xs, 0.7, &grid);
    let integral: f64 = d.iter().sum::<f64>() * 0.005;
    assert!((integral - 1.0).abs() < 1e-6);
    let single = kde(&[0.0], 1.0, &[0.0])[0];
    assert!((single - 1.0 / (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-15);
}

#[test]
fn plots_handle_empty_input_and_are_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let files = emit_plots(&[], &[], &[], dir.path()).unwrap();
    assert_eq!(files.len(), 2);
    for f in &files {
        assert!(std::fs::read_to_string(f).unwrap().contains("no data"));
    }

    let records = vec![
        record(0.2, 0, NavigatorKind::Lattice, Some(0.5)),
        record(0.2, 1, NavigatorKind::Lattice, Some(0.6)),
        record(0.2, 0, NavigatorKind::Straight, Some(1.0)),
        record(0.2, 1, NavigatorKind::Straight, Some(1.0)),
    ];
    let rows = aggregate(&records);
    let scenario = generate_scenario(0.2, 0, &ScenarioParams::default()).unwrap();
    let overlays = vec![("c0.2-s0".to_string(), scenario, vec![])];
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let fa = emit_plots(&rows, &records, &overlays, a.path()).unwrap();
    let fb = emit_plots(&rows, &records, &overlays, b.path()).unwrap();
    assert_eq!(fa.len(), 3);
    for (x, y) in fa.iter().zip(&fb) {
        assert_eq!(std::fs::read(x).unwrap(), std::fs::read(y).unwrap());
    }
    let density = std::fs::read_to_string(a.path().join("collision_mass_density.svg")).unwrap();
    assert_eq!(density.matches("<polyline").count(), 2);
    assert!(!density.contains("no data"));
}

#[test]
fn toml_config_parses_partially_and_rejects_typos() {
    let c = BatchConfig::from_toml_str(
        r#"
        concentrations = [0.2]
        trials_per_concentration = 3
        navigators = ["lattice", "skeleton-proxy"]

        [navigator]
        horizon = 15.0

        [navigator.planner]
        alpha = 0.5
        "#,
    )
    .unwrap();
    assert_eq!(c.trials_per_concentration, 3);
    assert_eq!(c.navigators, vec![NavigatorKind::Lattice, NavigatorKind::SkeletonProxy]);
    assert_eq!(c.navigator.horizon, 15.0);
    assert_eq!(c.navigator.planner.alpha, 0.5);
    assert_eq!(c.seed, 0);

    let back = BatchConfig::from_toml_str(&c.to_toml_string()).unwrap();
    assert_eq!(back, c);

    assert!(matches!(
        BatchConfig::from_toml_str("trials = 3"),
        Err(ConfigError::Syntax(_))
    ));
    assert!(matches!(
        BatchConfig::from_toml_str("concentrations = [0.9]"),
        Err(ConfigError::Invalid(_))
    ));
    assert!(matches!(
        BatchConfig::from_toml_str("trials_per_concentration = 0"),
        Err(ConfigError::Invalid(_))
    ));
    assert!(BatchConfig::from_toml_str("navigators = [\"lattice\", \"lattice\"]").is_err());
}
