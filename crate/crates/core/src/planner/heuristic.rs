//! Cost-to-go estimates toward a horizontal goal line `y = G_y`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::geometry::Pose;

/// Which cost-to-go estimate the search uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HeuristicKind {
    /// Closed-form shortest curvature-bounded path to the goal line.
    Line,
    /// Straight-line vertical distance to the goal line.
    Vertical,
    /// No estimate (Dijkstra).
    Zero,
}

impl HeuristicKind {
    pub fn eval(self, pose: &Pose, goal_y: f64, r_min: f64) -> f64 {
        match self {
            HeuristicKind::Line => line_heuristic(pose, goal_y, r_min),
            HeuristicKind::Vertical => vertical_heuristic(pose, goal_y),
            HeuristicKind::Zero => 0.0,
        }
    }
}

pub fn vertical_heuristic(pose: &Pose, goal_y: f64) -> f64 {
    (goal_y - pose.y).max(0.0)
}

/// Which branch of the closed form produced a heuristic value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineCase {
    /// Pose already on or past the line.
    Reached,
    /// Arc to heading π/2, then straight up (CS).
    ArcThenStraight,
    /// Arc alone reaches the line (C).
    ArcOnly,
    /// Turning circle cannot reach the line; vertical distance used.
    Fallback,
}

/// Length of the shortest path with turning radius `r_min` from `pose` to
/// the line `y = goal_y`, with the branch that produced it.
///
/// The turn direction `m` and offset `n` follow the heading quadrant; `o_y`
/// is the height of the centre of the turning circle that swings the bow
/// toward +y. If the line is at or above `o_y` the path turns to face +y
/// then runs straight; otherwise the line is met part way round the arc.
pub fn line_heuristic_case(pose: &Pose, goal_y: f64, r_min: f64) -> (f64, LineCase) {
    let py = pose.y;
    if py >= goal_y {
        return (0.0, LineCase::Reached);
    }
    let th = pose.theta();
    let m = if th <= FRAC_PI_2 || th >= 1.5 * PI { 1.0 } else { -1.0 };
    let n = if th <= FRAC_PI_2 {
        0.0
    } else if th <= 1.5 * PI {
        PI
    } else {
        TAU
    };
    let o_y = py + m * r_min * th.cos();
    if o_y <= goal_y {
        let turn = (th - FRAC_PI_2).abs().min((th - 2.5 * PI).abs());
        return (r_min * turn + goal_y - o_y, LineCase::ArcThenStraight);
    }
    let arg = (o_y - goal_y) / r_min;
    if arg > 1.0 {
        return ((goal_y - py).abs().max(0.0), LineCase::Fallback);
    }
    (r_min * (th - m * arg.acos() - n).abs(), LineCase::ArcOnly)
}

/// Admissible closed-form cost-to-go toward the goal line.
pub fn line_heuristic(pose: &Pose, goal_y: f64, r_min: f64) -> f64 {
    line_heuristic_case(pose, goal_y, r_min).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn facing_the_line() {
        assert!((line_heuristic(&Pose::new(0.0, 0.0, FRAC_PI_2), 10.0, 2.0) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn facing_sideways_turns_a_quarter() {
        let (h, case) = line_heuristic_case(&Pose::new(0.0, 0.0, PI), 10.0, 2.0);
        assert_eq!(case, LineCase::ArcThenStraight);
        assert!((h - (PI + 8.0)).abs() < 1e-9);
    }

    #[test]
    fn arc_alone_reaches_a_close_line() {
        let (h, case) = line_heuristic_case(&Pose::new(0.0, 0.0, FRAC_PI_4), 1.0, 2.0);
        assert_eq!(case, LineCase::ArcOnly);
        let expected = 2.0 * (FRAC_PI_4 - ((2f64.sqrt() - 1.0) / 2.0).acos()).abs();
        assert!((h - expected).abs() < 1e-12);
        assert!((h - 1.1536).abs() < 1e-3);
    }

    #[test]
    fn past_the_line_is_zero() {
        assert_eq!(line_heuristic(&Pose::new(0.0, 5.0, 0.3), 4.0, 2.0), 0.0);
        assert_eq!(line_heuristic(&Pose::new(0.0, 4.0, 4.0), 4.0, 2.0), 0.0);
    }

    #[test]
    fn dominates_vertical_distance() {
        for i in 0..720 {
            let th = i as f64 * TAU / 720.0;
            for &gy in &[0.5, 1.0, 3.0, 10.0] {
                let p = Pose::new(0.0, 0.0, th);
                assert!(line_heuristic(&p, gy, 2.0) >= vertical_heuristic(&p, gy) - 1e-12);
            }
        }
    }

    #[test]
    fn symmetric_about_the_vertical() {
        for i in 0..360 {
            let th = i as f64 * TAU / 360.0;
            let a = line_heuristic(&Pose::new(0.0, 0.0, th), 1.5, 2.0);
            let b = line_heuristic(&Pose::new(0.0, 0.0, PI - th), 1.5, 2.0);
            assert!((a - b).abs() < 1e-9, "theta {th}: {a} vs {b}");
        }
    }
}
