//! Curvature-bounded paths built from circular arcs and straight lines.
//!
//! [`DubinsPath`] is a general arc/line sequence: the six-word shortest-path
//! solver produces three-segment paths, the planner concatenates primitives
//! into longer ones.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::{normalize_angle, Pose};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SegmentKind {
    ArcLeft,
    ArcRight,
    Straight,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub kind: SegmentKind,
    pub length: f64,
    /// Signed curvature: positive turns left.
    pub curvature: f64,
}

impl Segment {
    pub fn straight(length: f64) -> Self {
        Self {
            kind: SegmentKind::Straight,
            length,
            curvature: 0.0,
        }
    }

    pub fn arc(kind: SegmentKind, length: f64, radius: f64) -> Self {
        let curvature = match kind {
            SegmentKind::ArcLeft => 1.0 / radius,
            SegmentKind::ArcRight => -1.0 / radius,
            SegmentKind::Straight => 0.0,
        };
        Self {
            kind,
            length,
            curvature,
        }
    }

    /// Pose reached after travelling `s` along this segment from `from`.
    pub fn advance(&self, from: &Pose, s: f64) -> Pose {
        let th = from.theta();
        if self.curvature == 0.0 {
            let (sn, cs) = th.sin_cos();
            Pose::new(from.x + s * cs, from.y + s * sn, th)
        } else {
            let k = self.curvature;
            let th1 = th + k * s;
            Pose::new(
                from.x + (th1.sin() - th.sin()) / k,
                from.y - (th1.cos() - th.cos()) / k,
                th1,
            )
        }
    }
}

/// The six classical words.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DubinsWord {
    Lsl,
    Rsr,
    Lsr,
    Rsl,
    Rlr,
    Lrl,
}

impl DubinsWord {
    pub const ALL: [DubinsWord; 6] = [
        DubinsWord::Lsl,
        DubinsWord::Rsr,
        DubinsWord::Lsr,
        DubinsWord::Rsl,
        DubinsWord::Rlr,
        DubinsWord::Lrl,
    ];

    pub fn kinds(self) -> [SegmentKind; 3] {
        use SegmentKind::*;
        match self {
            DubinsWord::Lsl => [ArcLeft, Straight, ArcLeft],
            DubinsWord::Rsr => [ArcRight, Straight, ArcRight],
            DubinsWord::Lsr => [ArcLeft, Straight, ArcRight],
            DubinsWord::Rsl => [ArcRight, Straight, ArcLeft],
            DubinsWord::Rlr => [ArcRight, ArcLeft, ArcRight],
            DubinsWord::Lrl => [ArcLeft, ArcRight, ArcLeft],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DubinsPath {
    start: Pose,
    segments: Vec<Segment>,
    total_length: f64,
}

impl DubinsPath {
    pub fn new(start: Pose, segments: Vec<Segment>) -> Self {
        let segments: Vec<Segment> = segments.into_iter().filter(|s| s.length > 0.0).collect();
        let total_length = segments.iter().map(|s| s.length).sum();
        Self {
            start,
            segments,
            total_length,
        }
    }

    pub fn straight(start: Pose, length: f64) -> Self {
        Self::new(start, vec![Segment::straight(length)])
    }

    pub fn start(&self) -> Pose {
        self.start
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn total_length(&self) -> f64 {
        self.total_length
    }

    pub fn end(&self) -> Pose {
        self.segments
            .iter()
            .fold(self.start, |p, seg| seg.advance(&p, seg.length))
    }

    /// Pose at arc length `s`, clamped to `[0, total_length]`.
    pub fn pose_at(&self, s: f64) -> Pose {
        let mut remaining = s.clamp(0.0, self.total_length);
        let mut pose = self.start;
        for seg in &self.segments {
            if remaining <= seg.length {
                return seg.advance(&pose, remaining);
            }
            pose = seg.advance(&pose, seg.length);
            remaining -= seg.length;
        }
        pose
    }

    /// Signed curvature at arc length `s`.
    pub fn curvature_at(&self, s: f64) -> f64 {
        let mut acc = 0.0;
        for seg in &self.segments {
            acc += seg.length;
            if s <= acc {
                return seg.curvature;
            }
        }
        self.segments.last().map_or(0.0, |s| s.curvature)
    }

    /// Pose at the start of every segment, plus the end pose.
    pub fn segment_boundaries(&self) -> Vec<Pose> {
        let mut out = Vec::with_capacity(self.segments.len() + 1);
        let mut p = self.start;
        out.push(p);
        for seg in &self.segments {
            p = seg.advance(&p, seg.length);
            out.push(p);
        }
        out
    }

    /// Appends `other`'s segments. The caller guarantees `other` starts where
    /// `self` ends; adjacent segments of the same kind are merged.
    pub fn extend(&mut self, other: &DubinsPath) {
        if self.segments.is_empty() {
            self.start = other.start;
        }
        for seg in &other.segments {
            match self.segments.last_mut() {
                Some(last) if last.kind == seg.kind && last.curvature == seg.curvature => {
                    last.length += seg.length;
                }
                _ => self.segments.push(*seg),
            }
        }
        self.total_length = self.segments.iter().map(|s| s.length).sum();
    }

    /// The part of the path between arc lengths `s0` and `s1`.
    pub fn subpath(&self, s0: f64, s1: f64) -> DubinsPath {
        let s0 = s0.clamp(0.0, self.total_length);
        let s1 = s1.clamp(s0, self.total_length);
        let start = self.pose_at(s0);
        let mut segs = Vec::new();
        let mut acc = 0.0_f64;
        for seg in &self.segments {
            let a = acc.max(s0);
            let b = (acc + seg.length).min(s1);
            if b > a {
                segs.push(Segment { length: b - a, ..*seg });
            }
            acc += seg.length;
        }
        DubinsPath::new(start, segs)
    }

    /// Applies the rigid motion `frame` to the whole path.
    pub fn transformed(&self, frame: &Pose) -> DubinsPath {
        DubinsPath {
            start: frame.compose(&self.start),
            segments: self.segments.clone(),
            total_length: self.total_length,
        }
    }

    /// Number of sign changes of curvature between consecutive turning segments.
    pub fn curvature_sign_changes(&self) -> usize {
        let signs: Vec<f64> = self
            .segments
            .iter()
            .filter(|s| s.curvature != 0.0)
            .map(|s| s.curvature.signum())
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }
}

/// Wraps into `[0, 2π)`, snapping values within rounding of a full turn to 0.
fn mod2pi(theta: f64) -> f64 {
    let t = normalize_angle(theta);
    if TAU - t < 1e-10 {
        0.0
    } else {
        t
    }
}

/// Rounding slack on word existence; a pure arc has a zero-length straight
/// whose squared length may come out slightly negative.
const WORD_EPS: f64 = 1e-10;

/// Normalized segment parameters `(t, p, q)` of one word, or `None` if the
/// word has no solution for this geometry.
fn word_params(word: DubinsWord, d: f64, alpha: f64, beta: f64) -> Option<[f64; 3]> {
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    let c_ab = (alpha - beta).cos();
    match word {
        DubinsWord::Lsl => {
            let p_sq = 2.0 + d * d - 2.0 * c_ab + 2.0 * d * (sa - sb);
            if p_sq < -WORD_EPS {
                return None;
            }
            let p_sq = p_sq.max(0.0);
            let tmp = (cb - ca).atan2(d + sa - sb);
            Some([mod2pi(tmp - alpha), p_sq.sqrt(), mod2pi(beta - tmp)])
        }
        DubinsWord::Rsr => {
            let p_sq = 2.0 + d * d - 2.0 * c_ab + 2.0 * d * (sb - sa);
            if p_sq < -WORD_EPS {
                return None;
            }
            let p_sq = p_sq.max(0.0);
            let tmp = (ca - cb).atan2(d - sa + sb);
            Some([mod2pi(alpha - tmp), p_sq.sqrt(), mod2pi(tmp - beta)])
        }
        DubinsWord::Lsr => {
            let p_sq = -2.0 + d * d + 2.0 * c_ab + 2.0 * d * (sa + sb);
            if p_sq < -WORD_EPS {
                return None;
            }
            let p_sq = p_sq.max(0.0);
            let p = p_sq.sqrt();
            let tmp = (-ca - cb).atan2(d + sa + sb) - (-2.0_f64).atan2(p);
            Some([mod2pi(tmp - alpha), p, mod2pi(tmp - beta)])
        }
        DubinsWord::Rsl => {
            let p_sq = -2.0 + d * d + 2.0 * c_ab - 2.0 * d * (sa + sb);
            if p_sq < -WORD_EPS {
                return None;
            }
            let p_sq = p_sq.max(0.0);
            let p = p_sq.sqrt();
            let tmp = (ca + cb).atan2(d - sa - sb) - 2.0_f64.atan2(p);
            Some([mod2pi(alpha - tmp), p, mod2pi(beta - tmp)])
        }
        DubinsWord::Rlr => {
            let tmp = (6.0 - d * d + 2.0 * c_ab + 2.0 * d * (sa - sb)) / 8.0;
            if tmp.abs() > 1.0 + WORD_EPS {
                return None;
            }
            let tmp = tmp.clamp(-1.0, 1.0);
            let phi = (ca - cb).atan2(d - sa + sb);
            let p = mod2pi(TAU - tmp.acos());
            let t = mod2pi(alpha - phi + mod2pi(p / 2.0));
            Some([t, p, mod2pi(alpha - beta - t + p)])
        }
        DubinsWord::Lrl => {
            let tmp = (6.0 - d * d + 2.0 * c_ab + 2.0 * d * (sb - sa)) / 8.0;
            if tmp.abs() > 1.0 + WORD_EPS {
                return None;
            }
            let tmp = tmp.clamp(-1.0, 1.0);
            let phi = (ca - cb).atan2(d + sa - sb);
            let p = mod2pi(TAU - tmp.acos());
            let t = mod2pi(-alpha - phi + p / 2.0);
            Some([t, p, mod2pi(beta - alpha - t + p)])
        }
    }
}

/// Path for one specific word, if that word connects the two poses.
pub fn dubins_word_path(start: Pose, end: Pose, r_min: f64, word: DubinsWord) -> Option<DubinsPath> {
    let dx = end.x - start.x;
    let dy = end.y - start.y;
    let d = dx.hypot(dy) / r_min;
    let heading = if d > 0.0 { mod2pi(dy.atan2(dx)) } else { 0.0 };
    let alpha = mod2pi(start.theta() - heading);
    let beta = mod2pi(end.theta() - heading);
    let params = word_params(word, d, alpha, beta)?;
    let segments = word
        .kinds()
        .iter()
        .zip(params)
        .map(|(&kind, p)| match kind {
            SegmentKind::Straight => Segment::straight(p * r_min),
            _ => Segment::arc(kind, p * r_min, r_min),
        })
        .collect();
    Some(DubinsPath::new(start, segments))
}

/// Shortest curvature-bounded forward path between two poses.
///
/// # Panics
/// If `r_min` is not strictly positive.
pub fn dubins_shortest_path(start: Pose, end: Pose, r_min: f64) -> DubinsPath {
    assert!(r_min > 0.0, "turning radius must be positive");
    DubinsWord::ALL
        .iter()
        .filter_map(|&w| dubins_word_path(start, end, r_min, w))
        .min_by(|a, b| a.total_length().total_cmp(&b.total_length()))
        // LSL and RSR exist for every geometry in exact arithmetic
        .unwrap_or_else(|| DubinsPath::new(start, Vec::new()))
}

/// Poses every `ds` of arc length, the final pose always included.
///
/// # Panics
/// If `ds` is not strictly positive.
pub fn sample_path(path: &DubinsPath, ds: f64) -> Vec<Pose> {
    assert!(ds > 0.0, "sample spacing must be positive");
    let total = path.total_length();
    let n = (total / ds).floor() as usize;
    let mut out = Vec::with_capacity(n + 2);
    out.push(path.start());
    for i in 1..=n {
        let s = i as f64 * ds;
        if s >= total - 1e-12 {
            break;
        }
        out.push(path.pose_at(s));
    }
    if total > 0.0 {
        out.push(path.end());
    }
    out
}
