use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Pose;

/// One simulation step of the ship: time, pose and surge speed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub speed: f64,
}

impl TrajectorySample {
    pub fn new(t: f64, pose: &Pose, speed: f64) -> Self {
        Self {
            t,
            x: pose.x,
            y: pose.y,
            theta: pose.theta(),
            speed,
        }
    }

    pub fn pose(&self) -> Pose {
        Pose::new(self.x, self.y, self.theta)
    }
}

#[derive(Debug, Error)]
pub enum TrajectoryLogError {
    #[error("trajectory log: {0}")]
    Csv(#[from] csv::Error),
    #[error("trajectory log row {row}: non-finite value")]
    NonFinite { row: usize },
    #[error("trajectory log row {row}: time goes backwards")]
    TimeOrder { row: usize },
}

/// Writes samples as CSV with header `t,x,y,theta,speed`.
pub fn write_trajectory_log(samples: &[TrajectorySample], out: impl Write) -> Result<(), TrajectoryLogError> {
    let mut w = csv::Writer::from_writer(out);
    for s in samples {
        w.serialize(s)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Parses a log written by [`write_trajectory_log`]. Rows must be finite and
/// ordered by non-decreasing time.
pub fn read_trajectory_log(input: impl Read) -> Result<Vec<TrajectorySample>, TrajectoryLogError> {
    let mut r = csv::Reader::from_reader(input);
    let mut out: Vec<TrajectorySample> = Vec::new();
    for (row, rec) in r.deserialize().enumerate() {
        let s: TrajectorySample = rec?;
        if ![s.t, s.x, s.y, s.theta, s.speed].iter().all(|v| v.is_finite()) {
            return Err(TrajectoryLogError::NonFinite { row });
        }
        if out.last().is_some_and(|p| s.t < p.t) {
            return Err(TrajectoryLogError::TimeOrder { row });
        }
        out.push(s);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let samples: Vec<_> = (0..50)
            .map(|i| {
                let t = i as f64 * 0.02;
                TrajectorySample::new(t, &Pose::new(0.1 * t.sin(), t / 3.0, 1.0 + t), 0.3 - t / 7.0)
            })
            .collect();
        let mut buf = Vec::new();
        write_trajectory_log(&samples, &mut buf).unwrap();
        assert!(buf.starts_with(b"t,x,y,theta,speed\n"));
        assert_eq!(read_trajectory_log(buf.as_slice()).unwrap(), samples);
    }

    #[test]
    fn rejects_bad_rows() {
        let text = "t,x,y,theta,speed\n1,0,0,0,0\n0.5,0,0,0,0\n";
        assert!(matches!(
            read_trajectory_log(text.as_bytes()),
            Err(TrajectoryLogError::TimeOrder { row: 1 })
        ));
        let text = "t,x,y,theta,speed\n1,NaN,0,0,0\n";
        assert!(matches!(
            read_trajectory_log(text.as_bytes()),
            Err(TrajectoryLogError::NonFinite { row: 0 })
        ));
        assert!(read_trajectory_log("t,x\n1,2\n".as_bytes()).is_err());
    }
}
