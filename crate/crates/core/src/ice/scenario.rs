use std::f64::consts::{FRAC_PI_2, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{convex_hull, ConvexPolygon, Pose, Vec2, CONTACT_EPS};

#[derive(Debug, Error, PartialEq)]
pub enum ScenarioError {
    #[error("invalid scenario parameter: {0}")]
    InvalidParameter(String),
    #[error(
        "could not place floes to reach concentration {target:.3} (reached {reached:.3} after {attempts} attempts)"
    )]
    Placement { target: f64, reached: f64, attempts: usize },
}

/// A single piece of ice.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IceFloe {
    pub id: u32,
    pub shape: ConvexPolygon,
    pub mass: f64,
}

/// Rectangular channel `[0, width] × [0, length]`; the goal is the line `y = goal_y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    pub width: f64,
    pub length: f64,
    pub goal_y: f64,
}

impl Default for Channel {
    fn default() -> Self {
        Self {
            width: 12.0,
            length: 76.0,
            goal_y: 72.0,
        }
    }
}

impl Channel {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        if !(self.width > 0.0) || !(self.length > 0.0) {
            return Err(ScenarioError::InvalidParameter(
                "channel extents must be positive".into(),
            ));
        }
        if !(self.goal_y > 0.0 && self.goal_y <= self.length) {
            return Err(ScenarioError::InvalidParameter(format!(
                "goal_y {} must lie in (0, {}]",
                self.goal_y, self.length
            )));
        }
        Ok(())
    }
}

/// Constraints on floe placement: primal circle radii and the y band that
/// must contain every vertex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FloeLimits {
    #[serde(rename = "R_min")]
    pub r_min: f64,
    #[serde(rename = "R_max")]
    pub r_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Default for FloeLimits {
    fn default() -> Self {
        Self {
            r_min: 0.5,
            r_max: 2.0,
            y_min: 5.0,
            y_max: 70.0,
        }
    }
}

/// Uniform ice properties used to turn floe area into mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IceProperties {
    /// meters
    pub thickness: f64,
    /// kg/m³
    pub density: f64,
}

impl Default for IceProperties {
    fn default() -> Self {
        Self {
            thickness: 0.012,
            density: 900.0,
        }
    }
}

impl IceProperties {
    pub fn mass_of(&self, area: f64) -> f64 {
        area * self.thickness * self.density
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioParams {
    pub channel: Channel,
    pub limits: FloeLimits,
    pub ice: IceProperties,
    pub ship_mass: f64,
    /// Start x is drawn from `[margin, width - margin]`.
    pub start_margin: f64,
    pub start_y: f64,
    pub attempt_budget: usize,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self {
            channel: Channel::default(),
            limits: FloeLimits::default(),
            ice: IceProperties::default(),
            ship_mass: 90.0,
            start_margin: 2.0,
            start_y: 2.0,
            attempt_budget: 400_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub seed: u64,
    pub concentration: f64,
    pub channel: Channel,
    pub limits: FloeLimits,
    pub ship_mass: f64,
    pub start_pose: Pose,
    pub floes: Vec<IceFloe>,
}

impl Scenario {
    /// Total floe area over the generation band area.
    pub fn measured_concentration(&self) -> f64 {
        let band = self.channel.width * (self.limits.y_max - self.limits.y_min);
        self.floes.iter().map(|f| f.shape.area()).sum::<f64>() / band
    }

    pub fn mean_floe_mass(&self) -> f64 {
        if self.floes.is_empty() {
            0.0
        } else {
            self.floes.iter().map(|f| f.mass).sum::<f64>() / self.floes.len() as f64
        }
    }

    pub fn floe_mass_range(&self) -> Option<(f64, f64)> {
        self.floes.iter().fold(None, |acc, f| match acc {
            None => Some((f.mass, f.mass)),
            Some((lo, hi)) => Some((lo.min(f.mass), hi.max(f.mass))),
        })
    }
}

/// Uniform-grid bucket index over placed floes for overlap queries.
struct Buckets {
    cell: f64,
    nx: usize,
    ny: usize,
    y0: f64,
    slots: Vec<Vec<usize>>,
}

impl Buckets {
    fn new(width: f64, y0: f64, y1: f64, cell: f64) -> Self {
        let nx = (width / cell).ceil().max(1.0) as usize;
        let ny = ((y1 - y0) / cell).ceil().max(1.0) as usize;
        Self {
            cell,
            nx,
            ny,
            y0,
            slots: vec![Vec::new(); nx * ny],
        }
    }

    fn range(&self, lo: Vec2, hi: Vec2) -> (usize, usize, usize, usize) {
        let cx = |x: f64| ((x / self.cell).floor().max(0.0) as usize).min(self.nx - 1);
        let cy = |y: f64| (((y - self.y0) / self.cell).floor().max(0.0) as usize).min(self.ny - 1);
        (cx(lo.x), cx(hi.x), cy(lo.y), cy(hi.y))
    }

    fn insert(&mut self, idx: usize, poly: &ConvexPolygon) {
        let (lo, hi) = poly.aabb();
        let (i0, i1, j0, j1) = self.range(lo, hi);
        for j in j0..=j1 {
            for i in i0..=i1 {
                self.slots[j * self.nx + i].push(idx);
            }
        }
    }

    fn overlaps(&self, poly: &ConvexPolygon, placed: &[ConvexPolygon]) -> bool {
        let (lo, hi) = poly.aabb();
        let (i0, i1, j0, j1) = self.range(lo, hi);
        for j in j0..=j1 {
            for i in i0..=i1 {
                for &k in &self.slots[j * self.nx + i] {
                    let other = &placed[k];
                    let reach = poly.bounding_radius() + other.bounding_radius();
                    if poly.centroid().distance(other.centroid()) > reach + CONTACT_EPS {
                        continue;
                    }
                    if poly.intersects(other, CONTACT_EPS) {
                        return true;
                    }
                }
            }
        }
        false
    }
}

/// Rejection-samples non-overlapping convex floes until the band
/// concentration lies in `[c - 0.0025, c + 0.01]`.
///
/// Each floe is the convex hull of 6–10 points drawn uniformly on a primal
/// circle whose radius is uniform in `[R_min, R_max]`. After a long run of
/// rejections the upper radius bound shrinks toward `R_min`, which lets
/// dense fields fill the remaining gaps.
pub fn generate_scenario(concentration: f64, seed: u64, params: &ScenarioParams) -> Result<Scenario, ScenarioError> {
    let channel = params.channel;
    let limits = params.limits;
    channel.validate()?;
    if !(0.0..=0.6).contains(&concentration) {
        return Err(ScenarioError::InvalidParameter(format!(
            "concentration {concentration} outside [0, 0.6]"
        )));
    }
    if !(limits.r_min > 0.0 && limits.r_min <= limits.r_max) {
        return Err(ScenarioError::InvalidParameter("need 0 < R_min <= R_max".into()));
    }
    if !(limits.y_min < limits.y_max) {
        return Err(ScenarioError::InvalidParameter("need y_min < y_max".into()));
    }
    if 2.0 * limits.r_min > channel.width || 2.0 * limits.r_min > limits.y_max - limits.y_min {
        return Err(ScenarioError::InvalidParameter("floes do not fit in the band".into()));
    }
    if !(params.ship_mass > 0.0) {
        return Err(ScenarioError::InvalidParameter("ship mass must be positive".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let margin = params.start_margin.min(channel.width / 2.0);
    let start_x = if channel.width - 2.0 * margin > 0.0 {
        rng.gen_range(margin..channel.width - margin)
    } else {
        channel.width / 2.0
    };
    let start_pose = Pose::new(start_x, params.start_y, FRAC_PI_2);

    let band_area = channel.width * (limits.y_max - limits.y_min);
    let target = concentration * band_area;
    let overshoot = 0.01 * band_area;
    let undershoot = 0.0025 * band_area;

    let mut shapes: Vec<ConvexPolygon> = Vec::new();
    let mut area = 0.0;
    let mut buckets = Buckets::new(channel.width, limits.y_min, limits.y_max, 2.0 * limits.r_max);
    let mut r_hi = limits.r_max;
    let mut misses = 0usize;
    let mut attempts = 0usize;

    while target > 0.0 && area < target - undershoot {
        if attempts >= params.attempt_budget {
            return Err(ScenarioError::Placement {
                target: concentration,
                reached: area / band_area,
                attempts,
            });
        }
        attempts += 1;
        let radius = if r_hi > limits.r_min {
            rng.gen_range(limits.r_min..=r_hi)
        } else {
            limits.r_min
        };
        let r = radius.min(channel.width / 2.0).min((limits.y_max - limits.y_min) / 2.0);
        let cx = rng.gen_range(r..=channel.width - r);
        let cy = rng.gen_range(limits.y_min + r..=limits.y_max - r);
        let n = rng.gen_range(6..=10);
        let pts: Vec<Vec2> = (0..n)
            .map(|_| Vec2::new(cx, cy) + Vec2::from_angle(rng.gen_range(0.0..TAU)) * r)
            .collect();
        let hull = convex_hull(&pts);
        let poly = match ConvexPolygon::new(hull) {
            Ok(p) if p.area() > 0.05 * r * r => p,
            _ => continue,
        };
        let rejected = area + poly.area() > target + overshoot || buckets.overlaps(&poly, &shapes);
        if rejected {
            misses += 1;
            if misses >= 500 {
                r_hi = (r_hi * 0.9).max(limits.r_min);
                misses = 0;
            }
            continue;
        }
        misses = 0;
        area += poly.area();
        buckets.insert(shapes.len(), &poly);
        shapes.push(poly);
    }

    let floes = shapes
        .into_iter()
        .enumerate()
        .map(|(i, shape)| IceFloe {
            id: i as u32,
            mass: params.ice.mass_of(shape.area()),
            shape,
        })
        .collect();

    Ok(Scenario {
        seed,
        concentration,
        channel,
        limits,
        ship_mass: params.ship_mass,
        start_pose,
        floes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_concentration_is_empty() {
        let s = generate_scenario(0.0, 1, &ScenarioParams::default()).unwrap();
        assert!(s.floes.is_empty());
        assert_eq!(s.start_pose.y, 2.0);
        assert!((s.start_pose.theta() - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn same_seed_same_scenario() {
        let p = ScenarioParams::default();
        assert_eq!(
            generate_scenario(0.3, 9, &p).unwrap(),
            generate_scenario(0.3, 9, &p).unwrap()
        );
        assert_ne!(
            generate_scenario(0.3, 9, &p).unwrap(),
            generate_scenario(0.3, 10, &p).unwrap()
        );
    }

    #[test]
    fn floes_respect_limits() {
        let p = ScenarioParams::default();
        let s = generate_scenario(0.3, 4, &p).unwrap();
        for f in &s.floes {
            for v in f.shape.vertices() {
                assert!(v.y >= p.limits.y_min - 1e-9 && v.y <= p.limits.y_max + 1e-9);
                assert!(v.x >= -1e-9 && v.x <= p.channel.width + 1e-9);
            }
            assert!((f.mass - f.shape.area() * 0.012 * 900.0).abs() < 1e-9);
        }
        assert!((s.measured_concentration() - 0.3).abs() <= 0.02);
    }

    #[test]
    fn out_of_range_concentration_is_rejected() {
        let p = ScenarioParams::default();
        assert!(matches!(
            generate_scenario(0.7, 1, &p),
            Err(ScenarioError::InvalidParameter(_))
        ));
        assert!(generate_scenario(-0.1, 1, &p).is_err());
    }

    #[test]
    fn exhausted_budget_reports_placement_failure() {
        let p = ScenarioParams {
            attempt_budget: 10,
            ..ScenarioParams::default()
        };
        assert!(matches!(
            generate_scenario(0.5, 1, &p),
            Err(ScenarioError::Placement { .. })
        ));
    }
}
