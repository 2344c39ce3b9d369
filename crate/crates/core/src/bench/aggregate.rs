use std::io::Write;

use serde::Serialize;

use super::record::TrialRecord;
use crate::navigator::{NavigatorKind, TrialStatus};

/// Statistics of one (concentration, navigator) group.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub concentration: f64,
    pub navigator: NavigatorKind,
    pub trials: usize,
    pub reached_goal: usize,
    /// Records with a defined normalized loss.
    pub normalized_count: usize,
    pub normalized_mean: Option<f64>,
    pub normalized_median: Option<f64>,
    pub normalized_max: Option<f64>,
    pub energy_loss_mean: f64,
    /// Mean mass over every distinct collision of the group, kilograms.
    pub collided_mass_mean: Option<f64>,
    pub collisions_per_trial: f64,
    pub tracking_error_mean: f64,
    pub path_length_mean: f64,
    pub plan_failures_mean: f64,
    /// Mean over trials of lattice expansions over vertical-heuristic expansions.
    pub expansion_ratio_mean: Option<f64>,
    /// Wall-clock, seconds; not reproducible across runs.
    #[serde(skip)]
    pub plan_time_mean: Option<f64>,
    #[serde(skip)]
    pub plan_time_max: Option<f64>,
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

fn median(v: &[f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    Some(if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    })
}

/// Per-(concentration, navigator) statistics, ordered by concentration then
/// navigator. The result does not depend on the order of `records`.
pub fn aggregate(records: &[TrialRecord]) -> Vec<SummaryRow> {
    let mut sorted: Vec<&TrialRecord> = records.iter().collect();
    sorted.sort_by(|a, b| {
        a.concentration
            .total_cmp(&b.concentration)
            .then(a.navigator.cmp(&b.navigator))
            .then(a.seed.cmp(&b.seed))
            .then(a.scenario_id.cmp(&b.scenario_id))
    });
    let mut rows = Vec::new();
    for group in sorted.chunk_by(|a, b| a.concentration == b.concentration && a.navigator == b.navigator) {
        let n = group.len() as f64;
        let normalized: Vec<f64> = group.iter().filter_map(|r| r.normalized_energy_loss).collect();
        let masses: Vec<f64> = group.iter().flat_map(|r| r.collision_masses.iter().copied()).collect();
        let plan_times: Vec<f64> = group.iter().flat_map(|r| r.plan_times.iter().copied()).collect();
        let ratios: Vec<f64> = group
            .iter()
            .filter(|r| !r.nodes_expanded_vertical.is_empty())
            .filter_map(|r| {
                let vertical: usize = r.nodes_expanded_vertical.iter().sum();
                let line: usize = r.nodes_expanded.iter().sum();
                (vertical > 0).then(|| line as f64 / vertical as f64)
            })
            .collect();
        rows.push(SummaryRow {
            concentration: group[0].concentration,
            navigator: group[0].navigator,
            trials: group.len(),
            reached_goal: group.iter().filter(|r| r.status == TrialStatus::ReachedGoal).count(),
            normalized_count: normalized.len(),
            normalized_mean: mean(&normalized),
            normalized_median: median(&normalized),
            normalized_max: normalized.iter().copied().reduce(f64::max),
            energy_loss_mean: group.iter().map(|r| r.total_energy_loss).sum::<f64>() / n,
            collided_mass_mean: mean(&masses),
            collisions_per_trial: masses.len() as f64 / n,
            tracking_error_mean: group.iter().map(|r| r.mean_tracking_error).sum::<f64>() / n,
            path_length_mean: group.iter().map(|r| r.path_length_executed).sum::<f64>() / n,
            plan_failures_mean: group.iter().map(|r| r.plan_failures as f64).sum::<f64>() / n,
            expansion_ratio_mean: mean(&ratios),
            plan_time_mean: mean(&plan_times),
            plan_time_max: plan_times.iter().copied().reduce(f64::max),
        });
    }
    rows
}

/// The reproducible summary table.
pub fn write_summary_csv(rows: &[SummaryRow], out: impl Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct TimingRow {
    concentration: f64,
    navigator: NavigatorKind,
    plan_time_mean: Option<f64>,
    plan_time_max: Option<f64>,
}

/// Planner wall-clock statistics, kept apart from the reproducible table.
pub fn write_timing_csv(rows: &[SummaryRow], out: impl Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(TimingRow {
            concentration: r.concentration,
            navigator: r.navigator,
            plan_time_mean: r.plan_time_mean,
            plan_time_max: r.plan_time_max,
        })?;
    }
    w.flush()?;
    Ok(())
}
