use std::collections::{HashMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::{BufReader, Write};
use std::path::Path;
use std::sync::mpsc;

use rayon::prelude::*;
use thiserror::Error;

use super::config::{BatchConfig, ConfigError};
use super::record::{read_records, RecordError, TrialRecord};
use crate::ice::generate_scenario;
use crate::navigator::{run_trial_traced, NavigatorKind};
use crate::planner::ControlSet;
use crate::sim::write_trajectory_log;

#[derive(Debug, Error)]
pub enum BatchError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("existing record log: {0}")]
    Records(#[from] RecordError),
    #[error("record log: {0}")]
    Io(#[from] std::io::Error),
    #[error("control set: {0}")]
    ControlSet(String),
}

/// What a batch run did.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BatchProgress {
    pub scenarios: usize,
    /// Scenarios already complete in the log.
    pub resumed: usize,
    pub new_records: usize,
    /// `(scenario id, reason)` for scenarios that could not be run.
    pub failed: Vec<(String, String)>,
}

pub fn scenario_seed(base: u64, trial: usize) -> u64 {
    base.wrapping_add(trial as u64)
}

pub fn scenario_id(concentration: f64, seed: u64) -> String {
    format!("c{concentration}-s{seed}")
}

struct Job {
    concentration: f64,
    seed: u64,
    id: String,
    missing: Vec<NavigatorKind>,
    straight_loss: Option<f64>,
}

/// Runs every missing (scenario, navigator) pair of `config`, appending
/// records to `log_path` as each scenario completes, and returns all records
/// of the batch (old and new) in canonical order: concentration as listed,
/// then seed, then navigator.
///
/// Records already in the log are kept, so an interrupted batch resumes
/// where it stopped; a torn final line is cut off first. The straight
/// navigator always runs (or is read back) for normalization.
pub fn run_batch(config: &BatchConfig, log_path: &Path) -> Result<(Vec<TrialRecord>, BatchProgress), BatchError> {
    config.validate()?;
    let control_set =
        ControlSet::build(&config.navigator.control_set).map_err(|e| BatchError::ControlSet(e.to_string()))?;

    let mut existing = Vec::new();
    if log_path.exists() {
        let (records, torn) = read_records(BufReader::new(File::open(log_path)?), true)?;
        if let Some(offset) = torn {
            OpenOptions::new().write(true).open(log_path)?.set_len(offset)?;
        }
        existing = records;
    }
    let done: HashSet<(String, NavigatorKind)> =
        existing.iter().map(|r| (r.scenario_id.clone(), r.navigator)).collect();
    let straight_losses: HashMap<String, f64> = existing
        .iter()
        .filter(|r| r.navigator == NavigatorKind::Straight)
        .map(|r| (r.scenario_id.clone(), r.total_energy_loss))
        .collect();

    let mut progress = BatchProgress::default();
    let mut jobs = Vec::new();
    for &c in &config.concentrations {
        for t in 0..config.trials_per_concentration {
            let seed = scenario_seed(config.seed, t);
            let id = scenario_id(c, seed);
            progress.scenarios += 1;
            let missing: Vec<NavigatorKind> = config
                .navigators
                .iter()
                .copied()
                .filter(|&k| !done.contains(&(id.clone(), k)))
                .collect();
            if missing.is_empty() {
                progress.resumed += 1;
                continue;
            }
            jobs.push(Job {
                concentration: c,
                seed,
                straight_loss: straight_losses.get(&id).copied(),
                id,
                missing,
            });
        }
    }

    if let Some(parent) = log_path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut log = OpenOptions::new().create(true).append(true).open(log_path)?;
    let trace_dir = config.out_dir.join("traces");
    if config.save_traces {
        std::fs::create_dir_all(&trace_dir)?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| BatchError::Io(std::io::Error::other(e)))?;

    let (tx, rx) = mpsc::channel::<Result<Vec<TrialRecord>, (String, String)>>();
    let mut fresh = Vec::new();
    std::thread::scope(|scope| -> Result<(), BatchError> {
        let workers = scope.spawn(|| {
            pool.install(|| {
                jobs.par_iter().for_each_with(tx, |tx, job| {
                    let _ = tx.send(run_job(job, config, &control_set, &trace_dir));
                });
            });
        });
        // single writer: one append and flush per finished scenario
        for msg in rx {
            match msg {
                Ok(records) => {
                    let mut text = String::new();
                    for r in &records {
                        text.push_str(&r.to_line());
                        text.push('\n');
                    }
                    log.write_all(text.as_bytes())?;
                    log.flush()?;
                    progress.new_records += records.len();
                    fresh.extend(records);
                }
                Err(failure) => progress.failed.push(failure),
            }
        }
        workers.join().expect("worker pool panicked");
        Ok(())
    })?;
    progress.failed.sort();

    let mut all: Vec<TrialRecord> = existing
        .into_iter()
        .filter(|r| config.navigators.contains(&r.navigator))
        .chain(fresh)
        .collect();
    let conc_rank = |c: f64| config.concentrations.iter().position(|&x| x == c).unwrap_or(usize::MAX);
    all.retain(|r| {
        conc_rank(r.concentration) != usize::MAX
            && (r.seed.wrapping_sub(config.seed) as usize) < config.trials_per_concentration
    });
    all.sort_by(|a, b| {
        conc_rank(a.concentration)
            .cmp(&conc_rank(b.concentration))
            .then(a.seed.cmp(&b.seed))
            .then(a.navigator.cmp(&b.navigator))
    });
    Ok((all, progress))
}

fn run_job(
    job: &Job,
    config: &BatchConfig,
    control_set: &ControlSet,
    trace_dir: &Path,
) -> Result<Vec<TrialRecord>, (String, String)> {
    let fail = |e: String| (job.id.clone(), e);
    let scenario = generate_scenario(job.concentration, job.seed, &config.scenario).map_err(|e| fail(e.to_string()))?;
    let mean_mass = scenario.mean_floe_mass();
    let mut outcomes = Vec::new();
    let mut straight_loss = job.straight_loss;
    // straight first: its loss normalizes the others
    let mut order = job.missing.clone();
    order.sort_by_key(|&k| k != NavigatorKind::Straight);
    if straight_loss.is_none() && !order.contains(&NavigatorKind::Straight) {
        order.insert(0, NavigatorKind::Straight);
    }
    for kind in order {
        let nav = config.navigator.with_kind(kind);
        let (outcome, trace) = run_trial_traced(&scenario, &nav, control_set).map_err(|e| fail(e.to_string()))?;
        if kind == NavigatorKind::Straight {
            straight_loss = Some(outcome.total_energy_loss);
        }
        if !job.missing.contains(&kind) {
            continue;
        }
        if config.save_traces {
            let path = trace_dir.join(format!("{}-{}.csv", job.id, kind));
            let file = File::create(&path).map_err(|e| fail(e.to_string()))?;
            write_trajectory_log(&trace.samples, std::io::BufWriter::new(file)).map_err(|e| fail(e.to_string()))?;
        }
        outcomes.push(outcome);
    }
    let straight_loss = straight_loss.expect("straight ran");
    Ok(outcomes
        .into_iter()
        .map(|o| TrialRecord::new(job.id.clone(), job.concentration, job.seed, mean_mass, o, straight_loss))
        .collect())
}
