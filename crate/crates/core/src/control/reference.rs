use std::f64::consts::TAU;

use thiserror::Error;

use crate::geometry::{DubinsPath, Pose, Vec2};

#[derive(Debug, Error, PartialEq)]
pub enum ReferencePathError {
    #[error("reference path is empty")]
    Empty,
    #[error("reference path contains a non-finite point")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Piece {
    Line {
        a: Vec2,
        dir: Vec2,
        len: f64,
    },
    Arc {
        center: Vec2,
        radius: f64,
        /// Polar angle of the start point about `center`.
        a0: f64,
        /// +1 counterclockwise, -1 clockwise.
        turn: f64,
        len: f64,
    },
}

impl Piece {
    fn len(&self) -> f64 {
        match *self {
            Piece::Line { len, .. } | Piece::Arc { len, .. } => len,
        }
    }

    fn pose_at(&self, s: f64) -> Pose {
        match *self {
            Piece::Line { a, dir, .. } => Pose::from_position(a + dir * s, dir.y.atan2(dir.x)),
            Piece::Arc {
                center,
                radius,
                a0,
                turn,
                ..
            } => {
                let ang = a0 + turn * s / radius;
                Pose::from_position(center + Vec2::from_angle(ang) * radius, ang + turn * TAU / 4.0)
            }
        }
    }

    fn curvature(&self) -> f64 {
        match *self {
            Piece::Line { .. } => 0.0,
            Piece::Arc { radius, turn, .. } => turn / radius,
        }
    }

    /// Arc length of the point on this piece nearest to `p`.
    fn closest(&self, p: Vec2) -> f64 {
        match *self {
            Piece::Line { a, dir, len } => (p - a).dot(dir).clamp(0.0, len),
            Piece::Arc {
                center,
                radius,
                a0,
                turn,
                len,
            } => {
                let d = p - center;
                if d.norm() == 0.0 {
                    return 0.0;
                }
                let sweep = (turn * (d.y.atan2(d.x) - a0)).rem_euclid(TAU) * radius;
                if sweep <= len {
                    return sweep;
                }
                // past the arc end: nearer of the two end points
                let d0 = (self.pose_at(0.0).position() - p).norm();
                let d1 = (self.pose_at(len).position() - p).norm();
                if d0 < d1 {
                    0.0
                } else {
                    len
                }
            }
        }
    }
}

/// A tracked reference made of straight lines and circular arcs, with exact
/// projection. Beyond its end the path continues straight along the final
/// heading.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferencePath {
    pieces: Vec<Piece>,
    /// Arc length at the start of each piece.
    offsets: Vec<f64>,
    length: f64,
}

impl ReferencePath {
    pub fn from_dubins(path: &DubinsPath) -> Result<Self, ReferencePathError> {
        let mut pieces = Vec::new();
        let mut pose = path.start();
        for seg in path.segments() {
            if seg.length <= 0.0 {
                continue;
            }
            let th = pose.theta();
            if seg.curvature == 0.0 {
                pieces.push(Piece::Line {
                    a: pose.position(),
                    dir: Vec2::from_angle(th),
                    len: seg.length,
                });
            } else {
                let radius = 1.0 / seg.curvature.abs();
                let turn = seg.curvature.signum();
                let normal = Vec2::from_angle(th + turn * TAU / 4.0);
                pieces.push(Piece::Arc {
                    center: pose.position() + normal * radius,
                    radius,
                    a0: th - turn * TAU / 4.0,
                    turn,
                    len: seg.length,
                });
            }
            pose = seg.advance(&pose, seg.length);
        }
        if pieces.is_empty() {
            // zero-length path: a unit stub along the start heading
            pieces.push(Piece::Line {
                a: path.start().position(),
                dir: path.start().heading(),
                len: 0.0,
            });
        }
        Self::from_pieces(pieces)
    }

    /// Polyline through `points`; repeated points are dropped. A single
    /// point gives a zero-length path heading along +y.
    pub fn from_polyline(points: &[Vec2]) -> Result<Self, ReferencePathError> {
        if points.is_empty() {
            return Err(ReferencePathError::Empty);
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(ReferencePathError::NonFinite);
        }
        let mut pieces = Vec::new();
        for w in points.windows(2) {
            let d = w[1] - w[0];
            if let Some(dir) = d.normalized() {
                pieces.push(Piece::Line {
                    a: w[0],
                    dir,
                    len: d.norm(),
                });
            }
        }
        if pieces.is_empty() {
            pieces.push(Piece::Line {
                a: points[0],
                dir: Vec2::new(0.0, 1.0),
                len: 0.0,
            });
        }
        Self::from_pieces(pieces)
    }

    fn from_pieces(pieces: Vec<Piece>) -> Result<Self, ReferencePathError> {
        let mut offsets = Vec::with_capacity(pieces.len());
        let mut acc = 0.0;
        for p in &pieces {
            offsets.push(acc);
            acc += p.len();
        }
        if !acc.is_finite() {
            return Err(ReferencePathError::NonFinite);
        }
        Ok(Self {
            pieces,
            offsets,
            length: acc,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn start(&self) -> Pose {
        self.pieces[0].pose_at(0.0)
    }

    pub fn end(&self) -> Pose {
        let last = self.pieces.last().expect("nonempty");
        last.pose_at(last.len())
    }

    /// Pose at arc length `s`; negative `s` and `s` past the end extend the
    /// path straight.
    pub fn pose_at(&self, s: f64) -> Pose {
        if s <= 0.0 {
            let p = self.start();
            return Pose::from_position(p.position() + p.heading() * s, p.theta());
        }
        if s >= self.length {
            let p = self.end();
            return Pose::from_position(p.position() + p.heading() * (s - self.length), p.theta());
        }
        let k = self.offsets.partition_point(|&o| o <= s) - 1;
        self.pieces[k].pose_at(s - self.offsets[k])
    }

    /// Signed curvature at arc length `s`; zero on the straight extensions.
    pub fn curvature_at(&self, s: f64) -> f64 {
        if s < 0.0 || s >= self.length {
            return 0.0;
        }
        let k = self.offsets.partition_point(|&o| o <= s) - 1;
        self.pieces[k].curvature()
    }

    /// Nearest point to `p` with arc length in `[s_lo, s_hi]` (clamped to the
    /// path), as `(arc length, distance)`. Earlier points win ties.
    pub fn project_within(&self, p: Vec2, s_lo: f64, s_hi: f64) -> (f64, f64) {
        let s_lo = s_lo.clamp(0.0, self.length);
        let s_hi = s_hi.clamp(s_lo, self.length);
        let mut best = (s_lo, f64::INFINITY);
        for (piece, &off) in self.pieces.iter().zip(&self.offsets) {
            if off > s_hi || off + piece.len() < s_lo {
                continue;
            }
            let mut s = off + piece.closest(p);
            if s < s_lo || s > s_hi {
                // the unconstrained foot lies outside the window: use the nearer window end
                let ends = [s_lo.max(off), s_hi.min(off + piece.len())];
                s = if (self.pose_at(ends[0]).position() - p).norm() <= (self.pose_at(ends[1]).position() - p).norm() {
                    ends[0]
                } else {
                    ends[1]
                };
            }
            let d = (self.pose_at(s).position() - p).norm();
            if d < best.1 {
                best = (s, d);
            }
        }
        best
    }

    /// Nearest point on the whole path, as `(arc length, distance)`.
    pub fn project(&self, p: Vec2) -> (f64, f64) {
        self.project_within(p, 0.0, self.length)
    }
}
