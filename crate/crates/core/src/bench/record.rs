use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::navigator::{NavigatorKind, TrialOutcome, TrialStatus};

/// One navigator run on one scenario, as stored in the record log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrialRecord {
    pub scenario_id: String,
    pub concentration: f64,
    pub seed: u64,
    pub navigator: NavigatorKind,
    pub status: TrialStatus,
    /// Joules.
    pub total_energy_loss: f64,
    /// Loss over the straight navigator's loss on the same scenario; `None`
    /// when that loss is zero.
    pub normalized_energy_loss: Option<f64>,
    /// Kilograms, one entry per distinct collision.
    pub collision_masses: Vec<f64>,
    pub collision_events: usize,
    /// Mean floe mass of the scenario, kilograms.
    pub scenario_mean_floe_mass: f64,
    pub mean_tracking_error: f64,
    pub plan_times: Vec<f64>,
    pub nodes_expanded: Vec<usize>,
    pub nodes_expanded_vertical: Vec<usize>,
    pub plan_failures: usize,
    pub path_length_executed: f64,
    pub sim_time: f64,
    pub iterations: usize,
}

#[derive(Debug, Error)]
pub enum RecordError {
    #[error("record line {line}: {source}")]
    Parse { line: usize, source: serde_json::Error },
    #[error("record line {line}: {reason}")]
    Invalid { line: usize, reason: &'static str },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl TrialRecord {
    pub fn new(
        scenario_id: String,
        concentration: f64,
        seed: u64,
        scenario_mean_floe_mass: f64,
        outcome: TrialOutcome,
        straight_loss: f64,
    ) -> Self {
        let normalized_energy_loss = (straight_loss > 0.0).then(|| outcome.total_energy_loss / straight_loss);
        Self {
            scenario_id,
            concentration,
            seed,
            navigator: outcome.navigator,
            status: outcome.status,
            total_energy_loss: outcome.total_energy_loss,
            normalized_energy_loss,
            collision_masses: outcome.collision_masses,
            collision_events: outcome.collision_events,
            scenario_mean_floe_mass,
            mean_tracking_error: outcome.mean_tracking_error,
            plan_times: outcome.plan_times,
            nodes_expanded: outcome.nodes_expanded,
            nodes_expanded_vertical: outcome.nodes_expanded_vertical,
            plan_failures: outcome.plan_failures,
            path_length_executed: outcome.path_length_executed,
            sim_time: outcome.sim_time,
            iterations: outcome.iterations,
        }
    }

    /// Single-line JSON; floats print in shortest round-trip form.
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }

    pub fn from_line(line: &str) -> Result<Self, RecordError> {
        let r: TrialRecord = serde_json::from_str(line).map_err(|source| RecordError::Parse { line: 0, source })?;
        r.check().map_err(|reason| RecordError::Invalid { line: 0, reason })?;
        Ok(r)
    }

    fn check(&self) -> Result<(), &'static str> {
        let finite = [
            self.concentration,
            self.total_energy_loss,
            self.mean_tracking_error,
            self.path_length_executed,
            self.sim_time,
            self.scenario_mean_floe_mass,
        ];
        if finite.iter().any(|v| !v.is_finite()) || self.normalized_energy_loss.is_some_and(|v| !v.is_finite()) {
            return Err("non-finite metric");
        }
        if self
            .collision_masses
            .iter()
            .chain(&self.plan_times)
            .any(|v| !v.is_finite())
        {
            return Err("non-finite list entry");
        }
        if self.plan_times.len() != self.iterations || self.nodes_expanded.len() != self.iterations {
            return Err("per-iteration lists disagree with the iteration count");
        }
        if !self.nodes_expanded_vertical.is_empty() && self.nodes_expanded_vertical.len() != self.iterations {
            return Err("per-iteration lists disagree with the iteration count");
        }
        Ok(())
    }

    pub fn write_line(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "{}", self.to_line())
    }
}

/// Reads a record log. Blank lines are skipped. With `tolerate_torn_tail`,
/// an unparsable last line without a trailing newline (an interrupted
/// append) is ignored; its byte offset is returned so the caller can
/// truncate it.
pub fn read_records(
    input: impl BufRead,
    tolerate_torn_tail: bool,
) -> Result<(Vec<TrialRecord>, Option<u64>), RecordError> {
    let mut records = Vec::new();
    let mut offset = 0u64;
    let mut reader = input;
    let mut buf = String::new();
    let mut line_no = 0;
    loop {
        buf.clear();
        let n = reader.read_line(&mut buf)?;
        if n == 0 {
            return Ok((records, None));
        }
        line_no += 1;
        let complete = buf.ends_with('\n');
        let text = buf.trim();
        if !text.is_empty() {
            match TrialRecord::from_line(text) {
                Ok(r) => records.push(r),
                Err(_) if tolerate_torn_tail && !complete => return Ok((records, Some(offset))),
                Err(RecordError::Parse { source, .. }) => return Err(RecordError::Parse { line: line_no, source }),
                Err(RecordError::Invalid { reason, .. }) => return Err(RecordError::Invalid { line: line_no, reason }),
                Err(e) => return Err(e),
            }
        }
        offset += n as u64;
    }
}
