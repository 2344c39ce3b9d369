use std::collections::HashMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::{NavigatorConfig, NavigatorConfigError, NavigatorKind};
use super::skeleton::{open_water_path, OccupancyGrid};
use crate::control::{ReferencePath, Tracker, Trajectory};
use crate::geometry::Vec2;
use crate::ice::{Costmap, Scenario};
use crate::planner::{plan, ControlSet, HeuristicKind, PlanError, PlanQuery, PlannerConfig};
use crate::sim::{CollisionEvent, SimError, TrajectorySample, World};

/// Contacts with one floe closer together than this count as one collision
/// in the collided-mass statistic.
pub const CONTACT_MERGE_WINDOW: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrialStatus {
    ReachedGoal,
    Timeout,
    PlanFailure,
    /// The simulation diverged.
    Unstable,
}

/// Metrics of one navigator run on one scenario. Per-iteration lists have
/// one entry per replan cycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub navigator: NavigatorKind,
    pub status: TrialStatus,
    pub total_energy_loss: f64,
    /// Mass of every distinct collision, contacts merged per floe.
    pub collision_masses: Vec<f64>,
    /// Raw per-step collision events.
    pub collision_events: usize,
    pub mean_tracking_error: f64,
    pub plan_times: Vec<f64>,
    pub nodes_expanded: Vec<usize>,
    /// Expansions of the same searches under the vertical-distance heuristic,
    /// when recorded.
    pub nodes_expanded_vertical: Vec<usize>,
    /// Iterations where the planner failed (lattice) or fell back to a
    /// straight path (open-water baseline).
    pub plan_failures: usize,
    pub path_length_executed: f64,
    pub sim_time: f64,
    pub iterations: usize,
}

/// Per-step detail of a run, for plots and replay.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrialTrace {
    pub samples: Vec<TrajectorySample>,
    pub events: Vec<CollisionEvent>,
    /// Intermediate goal line of each iteration.
    pub goal_lines: Vec<f64>,
    /// Path handed to the tracker in each iteration, sampled.
    pub plans: Vec<Vec<Vec2>>,
    /// Sum of floe centroids as observed at each iteration.
    pub observed_centroid_sums: Vec<Vec2>,
}

/// Receding-horizon run of `config.kind` on `scenario`.
pub fn run_trial(
    scenario: &Scenario,
    config: &NavigatorConfig,
    control_set: &ControlSet,
) -> Result<TrialOutcome, NavigatorConfigError> {
    run_trial_traced(scenario, config, control_set).map(|(o, _)| o)
}

pub fn straight_baseline(
    scenario: &Scenario,
    config: &NavigatorConfig,
    control_set: &ControlSet,
) -> Result<TrialOutcome, NavigatorConfigError> {
    run_trial(scenario, &config.with_kind(NavigatorKind::Straight), control_set)
}

pub fn skeleton_proxy_baseline(
    scenario: &Scenario,
    config: &NavigatorConfig,
    control_set: &ControlSet,
) -> Result<TrialOutcome, NavigatorConfigError> {
    run_trial(scenario, &config.with_kind(NavigatorKind::SkeletonProxy), control_set)
}

/// Straight reference from `from` along +y up to `goal_y`.
fn straight_to_goal(from: Vec2, goal_y: f64) -> ReferencePath {
    ReferencePath::from_polyline(&[from, Vec2::new(from.x, goal_y.max(from.y + 1.0))]).expect("finite points")
}

fn sample_reference(path: &ReferencePath) -> Vec<Vec2> {
    let n = (path.length() / 0.1).ceil().max(1.0) as usize;
    (0..=n)
        .map(|k| path.pose_at(path.length() * k as f64 / n as f64).position())
        .collect()
}

/// Like [`run_trial`], also returning the per-step trace.
///
/// Each iteration reads the simulated ice and ship state, sets the goal line
/// `min(y + horizon, goal_y)`, plans (lattice: costmap anchored at the ship
/// at its measured speed), and tracks the result for one replan interval.
/// A failed plan keeps the previous path; `max_plan_failures` failures in a
/// row end the trial.
pub fn run_trial_traced(
    scenario: &Scenario,
    config: &NavigatorConfig,
    control_set: &ControlSet,
) -> Result<(TrialOutcome, TrialTrace), NavigatorConfigError> {
    config.validate()?;
    let goal_y = config.goal_y.unwrap_or(scenario.channel.goal_y);
    if !(goal_y <= scenario.channel.length) {
        return Err(NavigatorConfigError::Invalid("goal line beyond the channel"));
    }
    let v_nom = config.speeds.lookup(scenario.concentration);
    let mut world =
        World::new(scenario, config.sim, v_nom).map_err(|_| NavigatorConfigError::Invalid("simulation parameters"))?;
    let tracker = Tracker::new(config.tracker);
    let steps_per_iteration = (config.replan_interval / config.sim.dt).round().max(1.0) as usize;
    let channel = scenario.channel;
    let cell = control_set.params().cell_size;
    let inflation = config.sim.ship_width / 2.0 + config.skeleton_margin;
    let straight = straight_to_goal(scenario.start_pose.position(), goal_y);

    let mut out = TrialOutcome {
        navigator: config.kind,
        status: TrialStatus::Timeout,
        total_energy_loss: 0.0,
        collision_masses: Vec::new(),
        collision_events: 0,
        mean_tracking_error: 0.0,
        plan_times: Vec::new(),
        nodes_expanded: Vec::new(),
        nodes_expanded_vertical: Vec::new(),
        plan_failures: 0,
        path_length_executed: 0.0,
        sim_time: 0.0,
        iterations: 0,
    };
    let mut trace = TrialTrace::default();
    trace
        .samples
        .push(TrajectorySample::new(0.0, &world.ship.pose, world.ship.surge_speed));

    let mut current: Option<Trajectory> = None;
    let mut failures_in_row = 0;
    let mut progress = 0.0;
    let mut last_contact: HashMap<u32, f64> = HashMap::new();
    let mut error_sum = 0.0;
    let mut error_count = 0usize;

    'outer: loop {
        if world.ship.pose.y >= goal_y {
            out.status = TrialStatus::ReachedGoal;
            break;
        }
        if world.time >= config.timeout {
            out.status = TrialStatus::Timeout;
            break;
        }
        out.iterations += 1;
        let ship_pos = world.ship.pose.position();
        let goal_line = (world.ship.pose.y + config.horizon).min(goal_y);
        trace.goal_lines.push(goal_line);
        let observed = world.observed_floes();
        trace
            .observed_centroid_sums
            .push(observed.iter().fold(Vec2::ZERO, |a, f| a + f.shape.centroid()));

        let t0 = Instant::now();
        let mut fresh = true;
        match config.kind {
            NavigatorKind::Straight => {
                if current.is_none() {
                    current = Some(Trajectory::new(straight.clone(), v_nom));
                } else {
                    fresh = false;
                }
                out.plan_times.push(t0.elapsed().as_secs_f64());
                out.nodes_expanded.push(0);
            }
            NavigatorKind::SkeletonProxy => {
                let grid = OccupancyGrid::build(&observed, &channel, cell, inflation);
                let path = match open_water_path(
                    &grid,
                    ship_pos,
                    goal_line,
                    config.sim.ship_length / 2.0 + inflation + cell,
                ) {
                    Ok((points, expanded)) => {
                        out.nodes_expanded.push(expanded);
                        ReferencePath::from_polyline(&points).expect("finite points")
                    }
                    Err(e) => {
                        let super::SkeletonError::NoPath { nodes_expanded } = e;
                        out.nodes_expanded.push(nodes_expanded);
                        out.plan_failures += 1;
                        straight_to_goal(ship_pos, goal_line)
                    }
                };
                out.plan_times.push(t0.elapsed().as_secs_f64());
                current = Some(Trajectory::new(path, v_nom));
            }
            NavigatorKind::Lattice => {
                let costmap = Costmap::build(
                    &observed,
                    &channel,
                    scenario.ship_mass,
                    world.ship.surge_speed,
                    cell,
                    ship_pos,
                );
                let query = PlanQuery {
                    start: world.ship.pose,
                    goal_y: goal_line,
                    x_range: (ship_pos.x.min(0.5), ship_pos.x.max(channel.width - 0.5)),
                };
                match plan(&query, &costmap, control_set, &config.planner) {
                    Ok(result) => {
                        out.plan_times.push(result.plan_time);
                        out.nodes_expanded.push(result.nodes_expanded);
                        failures_in_row = 0;
                        current = Some(Trajectory::from_dubins(&result.path, v_nom));
                    }
                    Err(e) => {
                        out.plan_times.push(t0.elapsed().as_secs_f64());
                        out.nodes_expanded.push(match e {
                            PlanError::NoPath { nodes_expanded } => nodes_expanded,
                            _ => 0,
                        });
                        out.plan_failures += 1;
                        failures_in_row += 1;
                        fresh = current.is_none();
                    }
                }
                if config.compare_heuristics {
                    let rerun = PlannerConfig {
                        heuristic: HeuristicKind::Vertical,
                        smoothing: None,
                        record_expansions: false,
                        ..config.planner
                    };
                    let n = match plan(&query, &costmap, control_set, &rerun) {
                        Ok(r) => r.nodes_expanded,
                        Err(PlanError::NoPath { nodes_expanded }) => nodes_expanded,
                        Err(_) => 0,
                    };
                    out.nodes_expanded_vertical.push(n);
                }
                if failures_in_row >= config.max_plan_failures {
                    out.status = TrialStatus::PlanFailure;
                    break;
                }
                if current.is_none() {
                    current = Some(Trajectory::new(straight_to_goal(ship_pos, goal_line), v_nom));
                }
            }
        }
        let trajectory = current.as_ref().expect("set above");
        trace.plans.push(sample_reference(&trajectory.path));

        // a reused path keeps its progress, a new one starts from the ship's projection
        if fresh {
            progress = trajectory.path.project(ship_pos).0;
        }
        for _ in 0..steps_per_iteration {
            let cmd = tracker.track(trajectory, &world.ship, progress);
            progress = cmd.progress;
            let before = world.ship.pose.position();
            let events = match world.step(cmd.rudder, cmd.thrust) {
                Ok(ev) => ev,
                Err(SimError::Unstable { .. } | SimError::InvalidStep(_) | SimError::InvalidParameter(_)) => {
                    out.status = TrialStatus::Unstable;
                    break 'outer;
                }
            };
            out.path_length_executed += world.ship.pose.position().distance(before);
            let (_, e) = trajectory
                .path
                .project_within(world.ship.pose.position(), progress - 0.5, progress + 3.0);
            error_sum += e;
            error_count += 1;
            for ev in events {
                out.total_energy_loss += ev.delta_k_ship;
                out.collision_events += 1;
                let prev = last_contact.insert(ev.floe_id, ev.time);
                if prev.is_none_or(|t| ev.time - t >= CONTACT_MERGE_WINDOW - 1e-9) {
                    out.collision_masses.push(ev.floe_mass);
                }
                trace.events.push(ev);
            }
            trace.samples.push(TrajectorySample::new(
                world.time,
                &world.ship.pose,
                world.ship.surge_speed,
            ));
            if world.ship.pose.y >= goal_y || world.time >= config.timeout {
                break;
            }
        }
    }
    out.sim_time = world.time;
    out.mean_tracking_error = if error_count > 0 {
        error_sum / error_count as f64
    } else {
        0.0
    };
    Ok((out, trace))
}
