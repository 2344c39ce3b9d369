use serde::Serialize;
use thiserror::Error;

use super::{Pose, Vec2};

/// Slack used when deciding whether touching shapes intersect.
pub const CONTACT_EPS: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum PolygonError {
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon vertex {0} is not finite")]
    NonFinite(usize),
    #[error("polygon is not convex at vertex {0}")]
    NotConvex(usize),
    #[error("polygon has zero area")]
    Degenerate,
}

/// Convex polygon with counterclockwise vertices and cached mass properties.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexPolygon {
    vertices: Vec<Vec2>,
    centroid: Vec2,
    area: f64,
    bounding_radius: f64,
}

impl ConvexPolygon {
    /// Validates the ring and orients it counterclockwise.
    pub fn new(mut vertices: Vec<Vec2>) -> Result<Self, PolygonError> {
        if vertices.len() < 3 {
            return Err(PolygonError::TooFewVertices(vertices.len()));
        }
        if let Some(i) = vertices.iter().position(|v| !v.is_finite()) {
            return Err(PolygonError::NonFinite(i));
        }
        let signed = signed_area(&vertices);
        if !(signed.abs() > 1e-12) {
            return Err(PolygonError::Degenerate);
        }
        if signed < 0.0 {
            vertices.reverse();
        }
        let n = vertices.len();
        let scale = vertices
            .iter()
            .map(|v| v.x.abs().max(v.y.abs()))
            .fold(1.0_f64, f64::max);
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            if (b - a).cross(c - b) < -1e-9 * scale * scale {
                return Err(PolygonError::NotConvex((i + 1) % n));
            }
        }
        let area = signed.abs();
        let centroid = area_centroid(&vertices, signed.abs());
        let bounding_radius = vertices.iter().map(|v| v.distance(centroid)).fold(0.0, f64::max);
        Ok(Self {
            vertices,
            centroid,
            area,
            bounding_radius,
        })
    }

    /// Axis-aligned rectangle centred at the origin.
    pub fn rectangle(length: f64, width: f64) -> Result<Self, PolygonError> {
        let (hx, hy) = (length / 2.0, width / 2.0);
        Self::new(vec![
            Vec2::new(-hx, -hy),
            Vec2::new(hx, -hy),
            Vec2::new(hx, hy),
            Vec2::new(-hx, hy),
        ])
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn centroid(&self) -> Vec2 {
        self.centroid
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn bounding_radius(&self) -> f64 {
        self.bounding_radius
    }

    pub fn translated(&self, d: Vec2) -> Self {
        Self {
            vertices: self.vertices.iter().map(|&v| v + d).collect(),
            centroid: self.centroid + d,
            area: self.area,
            bounding_radius: self.bounding_radius,
        }
    }

    /// Rotates about the centroid by `theta`.
    pub fn rotated_about_centroid(&self, theta: f64) -> Self {
        let c = self.centroid;
        Self {
            vertices: self.vertices.iter().map(|&v| c + (v - c).rotated(theta)).collect(),
            centroid: c,
            area: self.area,
            bounding_radius: self.bounding_radius,
        }
    }

    /// Places a body-frame polygon at `pose` (rotation about the body origin).
    pub fn placed(&self, pose: &Pose) -> Self {
        let vertices: Vec<Vec2> = self.vertices.iter().map(|&v| pose.transform_point(v)).collect();
        Self {
            centroid: pose.transform_point(self.centroid),
            vertices,
            area: self.area,
            bounding_radius: self.bounding_radius,
        }
    }

    pub fn aabb(&self) -> (Vec2, Vec2) {
        let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &self.vertices {
            lo.x = lo.x.min(v.x);
            lo.y = lo.y.min(v.y);
            hi.x = hi.x.max(v.x);
            hi.y = hi.y.max(v.y);
        }
        (lo, hi)
    }

    pub fn contains_point(&self, p: Vec2) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            (b - a).cross(p - a) >= -CONTACT_EPS
        })
    }

    fn project(&self, axis: Vec2) -> (f64, f64) {
        self.vertices
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                let d = v.dot(axis);
                (lo.min(d), hi.max(d))
            })
    }

    fn edge_normals(&self) -> impl Iterator<Item = Vec2> + '_ {
        let n = self.vertices.len();
        (0..n).filter_map(move |i| {
            let e = self.vertices[(i + 1) % n] - self.vertices[i];
            Vec2::new(e.y, -e.x).normalized()
        })
    }

    /// Separating-axis test against an axis-aligned box. A positive `slack`
    /// makes touching count as overlap; a negative one demands penetration.
    pub fn overlaps_box(&self, center: Vec2, half: f64, slack: f64) -> bool {
        let (lo, hi) = self.aabb();
        if lo.x > center.x + half + slack
            || hi.x < center.x - half - slack
            || lo.y > center.y + half + slack
            || hi.y < center.y - half - slack
        {
            return false;
        }
        for axis in self.edge_normals() {
            let (plo, phi) = self.project(axis);
            let c = center.dot(axis);
            let r = half * (axis.x.abs() + axis.y.abs());
            if plo > c + r + slack || phi < c - r - slack {
                return false;
            }
        }
        true
    }

    /// Minimum translation vector that pushes `other` out of `self`, or
    /// `None` when the two are separated (touching counts as separated).
    pub fn penetration(&self, other: &ConvexPolygon) -> Option<Vec2> {
        let mut best_depth = f64::INFINITY;
        let mut best_axis = Vec2::ZERO;
        for axis in self.edge_normals().chain(other.edge_normals()) {
            let (alo, ahi) = self.project(axis);
            let (blo, bhi) = other.project(axis);
            let overlap = ahi.min(bhi) - alo.max(blo);
            if overlap <= 0.0 {
                return None;
            }
            if overlap < best_depth {
                best_depth = overlap;
                best_axis = axis;
            }
        }
        let dir = other.centroid - self.centroid;
        if dir.dot(best_axis) < 0.0 {
            best_axis = -best_axis;
        }
        Some(best_axis * best_depth)
    }

    pub fn intersects(&self, other: &ConvexPolygon, slack: f64) -> bool {
        for axis in self.edge_normals().chain(other.edge_normals()) {
            let (alo, ahi) = self.project(axis);
            let (blo, bhi) = other.project(axis);
            if alo > bhi + slack || blo > ahi + slack {
                return false;
            }
        }
        true
    }

    /// Sutherland–Hodgman clip of `self` by convex `clip`; empty if disjoint.
    pub fn clip(&self, clip: &ConvexPolygon) -> Vec<Vec2> {
        let mut out = self.vertices.clone();
        let n = clip.vertices.len();
        for i in 0..n {
            if out.is_empty() {
                break;
            }
            let a = clip.vertices[i];
            let b = clip.vertices[(i + 1) % n];
            let edge = b - a;
            let input = std::mem::take(&mut out);
            let m = input.len();
            for j in 0..m {
                let p = input[j];
                let q = input[(j + 1) % m];
                let dp = edge.cross(p - a);
                let dq = edge.cross(q - a);
                if dp >= 0.0 {
                    out.push(p);
                }
                if (dp >= 0.0) != (dq >= 0.0) {
                    let t = dp / (dp - dq);
                    out.push(p + (q - p) * t);
                }
            }
        }
        out
    }
}

pub fn signed_area(ring: &[Vec2]) -> f64 {
    let n = ring.len();
    (0..n).map(|i| ring[i].cross(ring[(i + 1) % n])).sum::<f64>() / 2.0
}

/// Area centroid of a ring; falls back to the vertex mean for slivers.
pub fn ring_centroid(ring: &[Vec2]) -> Vec2 {
    let a = signed_area(ring);
    if a.abs() < 1e-14 {
        let n = ring.len().max(1) as f64;
        return ring.iter().fold(Vec2::ZERO, |acc, &v| acc + v) * (1.0 / n);
    }
    area_centroid(ring, a.abs())
}

fn area_centroid(ring: &[Vec2], area: f64) -> Vec2 {
    let n = ring.len();
    let sign = signed_area(ring).signum();
    let mut c = Vec2::ZERO;
    for i in 0..n {
        let p = ring[i];
        let q = ring[(i + 1) % n];
        let w = p.cross(q);
        c = c + (p + q) * w;
    }
    c * (sign / (6.0 * area))
}

/// Andrew's monotone chain; returns a counterclockwise hull without collinear points.
pub fn convex_hull(points: &[Vec2]) -> Vec<Vec2> {
    let mut pts: Vec<Vec2> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Vec2> = Vec::with_capacity(pts.len() * 2);
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Vec2>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 {
                let a = hull[hull.len() - 2];
                let b = hull[hull.len() - 1];
                if (b - a).cross(p - a) <= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// True iff the axis-aligned square of side `cell_size` centred at
/// `cell_center` meets `poly`; boundary contact counts.
pub fn polygon_cell_overlap(poly: &ConvexPolygon, cell_center: Vec2, cell_size: f64) -> bool {
    poly.overlaps_box(cell_center, cell_size / 2.0, CONTACT_EPS)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> ConvexPolygon {
        ConvexPolygon::rectangle(1.0, 1.0).unwrap()
    }

    fn triangle() -> ConvexPolygon {
        ConvexPolygon::new(vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)]).unwrap()
    }

    #[test]
    fn cell_overlap_examples() {
        assert!(polygon_cell_overlap(&unit_square(), Vec2::ZERO, 0.25));
        assert!(!polygon_cell_overlap(&unit_square(), Vec2::new(100.0, 100.0), 0.25));
        // nearest cell corner (0.825, 0.825) lies beyond the hypotenuse x + y = 1
        assert!(!polygon_cell_overlap(&triangle(), Vec2::new(0.95, 0.95), 0.25));
    }

    #[test]
    fn boundary_contact_counts() {
        // cell [0.5, 0.75] x [-0.125, 0.125] touches the square's right edge
        assert!(polygon_cell_overlap(&unit_square(), Vec2::new(0.625, 0.0), 0.25));
        assert!(!polygon_cell_overlap(&unit_square(), Vec2::new(0.63, 0.0), 0.25));
    }

    #[test]
    fn rejects_bad_rings() {
        assert_eq!(
            ConvexPolygon::new(vec![Vec2::ZERO, Vec2::new(1.0, 0.0)]),
            Err(PolygonError::TooFewVertices(2))
        );
        assert_eq!(
            ConvexPolygon::new(vec![Vec2::ZERO, Vec2::new(1.0, 0.0), Vec2::new(2.0, 0.0)]),
            Err(PolygonError::Degenerate)
        );
        let dart = vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(2.0, 1.0),
            Vec2::new(0.0, 2.0),
            Vec2::new(0.5, 1.0),
        ];
        assert!(matches!(ConvexPolygon::new(dart), Err(PolygonError::NotConvex(_))));
        assert!(matches!(
            ConvexPolygon::new(vec![Vec2::ZERO, Vec2::new(f64::NAN, 0.0), Vec2::new(0.0, 1.0)]),
            Err(PolygonError::NonFinite(1))
        ));
    }

    #[test]
    fn clockwise_input_is_reoriented() {
        let p = ConvexPolygon::new(vec![Vec2::new(0.0, 0.0), Vec2::new(0.0, 1.0), Vec2::new(1.0, 0.0)]).unwrap();
        assert!(signed_area(p.vertices()) > 0.0);
        assert!((p.area() - 0.5).abs() < 1e-12);
        assert!((p.centroid().x - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn penetration_points_from_self_to_other() {
        let a = unit_square();
        let b = unit_square().translated(Vec2::new(0.8, 0.0));
        let mtv = a.penetration(&b).unwrap();
        assert!((mtv.x - 0.2).abs() < 1e-12 && mtv.y.abs() < 1e-12);
        let far = unit_square().translated(Vec2::new(3.0, 0.0));
        assert!(a.penetration(&far).is_none());
    }

    #[test]
    fn clip_of_overlapping_squares() {
        let a = unit_square();
        let b = unit_square().translated(Vec2::new(0.5, 0.5));
        let ring = a.clip(&b);
        assert!((signed_area(&ring) - 0.25).abs() < 1e-12);
        let c = ring_centroid(&ring);
        assert!((c.x - 0.25).abs() < 1e-12 && (c.y - 0.25).abs() < 1e-12);
    }

    #[test]
    fn hull_drops_interior_points() {
        let pts = [
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
            Vec2::new(0.5, 0.5),
        ];
        let hull = convex_hull(&pts);
        assert_eq!(hull.len(), 4);
        assert!(signed_area(&hull) > 0.0);
    }
}
