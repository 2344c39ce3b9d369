use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::swath::{swath_cells, SWATH_STEP};
use crate::geometry::{dubins_shortest_path, ConvexPolygon, DubinsPath, PolygonError, Pose, Vec2};

#[derive(Debug, Error, PartialEq)]
pub enum ControlSetError {
    #[error("invalid control-set parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("footprint: {0}")]
    Footprint(#[from] PolygonError),
}

/// Heading count of the lattice. The two-class symmetry below needs it.
pub const HEADINGS: u8 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ControlSetParams {
    pub r_min: f64,
    pub grid_pitch: f64,
    /// Costmap cell size; `grid_pitch / cell_size` must be an integer.
    pub cell_size: f64,
    pub footprint_length: f64,
    pub footprint_width: f64,
    /// Candidate endpoints lie within this many grid pitches of the start.
    pub connection_radius: f64,
    /// A candidate is dropped when retained primitives reach its endpoint
    /// within this relative excess over its own length.
    pub prune_tolerance: f64,
    /// Largest heading change of a primitive, in heading steps.
    pub max_heading_change: u8,
}

impl Default for ControlSetParams {
    fn default() -> Self {
        Self {
            r_min: 2.0,
            grid_pitch: 1.0,
            cell_size: 0.25,
            footprint_length: 1.0,
            footprint_width: 0.25,
            connection_radius: 5.0,
            prune_tolerance: 0.05,
            max_heading_change: 2,
        }
    }
}

impl ControlSetParams {
    pub fn footprint(&self) -> Result<ConvexPolygon, ControlSetError> {
        Ok(ConvexPolygon::rectangle(self.footprint_length, self.footprint_width)?)
    }

    /// Costmap cells per lattice pitch.
    pub fn cells_per_pitch(&self) -> Result<i64, ControlSetError> {
        let ratio = self.grid_pitch / self.cell_size;
        let k = ratio.round();
        if !(k >= 1.0) || (ratio - k).abs() > 1e-9 * ratio {
            return Err(ControlSetError::InvalidParameter(
                "grid pitch must be an integer multiple of the cell size",
            ));
        }
        Ok(k as i64)
    }

    fn validate(&self) -> Result<(), ControlSetError> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.r_min) || !positive(self.grid_pitch) || !positive(self.cell_size) {
            return Err(ControlSetError::InvalidParameter(
                "r_min, grid_pitch and cell_size must be positive",
            ));
        }
        if !positive(self.connection_radius) || !(self.prune_tolerance >= 0.0) {
            return Err(ControlSetError::InvalidParameter(
                "bad connection radius or prune tolerance",
            ));
        }
        self.cells_per_pitch()?;
        Ok(())
    }
}

/// A lattice configuration: grid position relative to the lattice origin and
/// heading index; pose is `(ix·Δxy, iy·Δxy, ih·2π/H)` in the lattice frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticeVertex {
    pub ix: i32,
    pub iy: i32,
    pub ih: u8,
}

impl LatticeVertex {
    pub fn pose(&self, pitch: f64) -> Pose {
        Pose::new(self.ix as f64 * pitch, self.iy as f64 * pitch, heading_angle(self.ih))
    }
}

pub fn heading_angle(ih: u8) -> f64 {
    ih as f64 * TAU / HEADINGS as f64
}

/// Nearest lattice heading index to `theta`.
pub fn snap_heading(theta: f64) -> u8 {
    let k = (crate::geometry::normalize_angle(theta) / (TAU / HEADINGS as f64)).round() as i64;
    k.rem_euclid(HEADINGS as i64) as u8
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MotionPrimitive {
    /// Path from the origin at heading `start_heading_index`.
    pub path: DubinsPath,
    pub start_heading_index: u8,
    /// Grid displacement and heading change (mod H).
    pub displacement: (i32, i32, u8),
    /// Costmap cells covered by the footprint, relative to the start cell.
    pub swath_offsets: Vec<(i32, i32)>,
    pub arc_length: f64,
}

impl MotionPrimitive {
    pub fn end_heading_index(&self) -> u8 {
        (self.start_heading_index + self.displacement.2) % HEADINGS
    }

    /// The same primitive rotated by a quarter turn counterclockwise.
    fn rotated_quarter(&self) -> MotionPrimitive {
        let (dx, dy, dh) = self.displacement;
        MotionPrimitive {
            path: self.path.transformed(&Pose::new(0.0, 0.0, FRAC_PI_2)),
            start_heading_index: (self.start_heading_index + HEADINGS / 4) % HEADINGS,
            displacement: (-dy, dx, dh),
            swath_offsets: {
                let mut s: Vec<(i32, i32)> = self.swath_offsets.iter().map(|&(i, j)| (-j, i)).collect();
                s.sort_unstable();
                s
            },
            arc_length: self.arc_length,
        }
    }
}

/// Motion primitives for every start heading, built from an axis-aligned
/// class (heading 0) and a diagonal class (heading π/4) by quarter turns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ControlSet {
    params: ControlSetParams,
    by_heading: Vec<Vec<MotionPrimitive>>,
}

impl ControlSet {
    /// Generate-then-prune construction. Candidates are shortest Dubins paths
    /// from heading class 0 or 1 to every vertex within `connection_radius`
    /// that lies ahead of the start, ending at every lattice heading at most
    /// `max_heading_change` steps from the start heading and turning through
    /// at most a half turn in total. They are visited in order of length;
    /// a candidate is kept unless primitives already kept reach its
    /// endpoint within `1 + prune_tolerance` of its length.
    pub fn build(params: &ControlSetParams) -> Result<Self, ControlSetError> {
        params.validate()?;
        let footprint = params.footprint()?;
        let rad = params.connection_radius;
        let reach = rad.floor() as i32;

        let mut candidates = Vec::new();
        for class in 0..2u8 {
            let start = Pose::new(0.0, 0.0, heading_angle(class));
            for dy in -reach..=reach {
                for dx in -reach..=reach {
                    if (dx == 0 && dy == 0) || ((dx * dx + dy * dy) as f64) > rad * rad {
                        continue;
                    }
                    let forward = Vec2::new(dx as f64, dy as f64).dot(start.heading());
                    if forward <= 1e-9 {
                        continue;
                    }
                    for ih in 0..HEADINGS {
                        let dh = (ih + HEADINGS - class) % HEADINGS;
                        let turn = dh.min(HEADINGS - dh);
                        if turn > params.max_heading_change {
                            continue;
                        }
                        let end = LatticeVertex { ix: dx, iy: dy, ih }.pose(params.grid_pitch);
                        let path = dubins_shortest_path(start, end, params.r_min);
                        if total_turning(&path) > PI + 1e-9 {
                            continue;
                        }
                        candidates.push((class, (dx, dy, dh), path));
                    }
                }
            }
        }
        candidates.sort_by(|a, b| {
            a.2.total_length()
                .total_cmp(&b.2.total_length())
                .then(a.0.cmp(&b.0))
                .then(a.1.cmp(&b.1))
        });

        let mut classes: [Vec<MotionPrimitive>; 2] = [Vec::new(), Vec::new()];
        for (class, disp, path) in candidates {
            let len = path.total_length();
            let bound = len * (1.0 + params.prune_tolerance);
            if lattice_distance(&classes, class, disp, bound).is_some_and(|d| d <= bound) {
                continue;
            }
            classes[class as usize].push(MotionPrimitive {
                swath_offsets: Vec::new(),
                start_heading_index: class,
                displacement: disp,
                arc_length: len,
                path,
            });
        }

        for class in classes.iter_mut() {
            for prim in class.iter_mut() {
                prim.swath_offsets = swath_cells(&prim.path, &footprint, params.cell_size, Vec2::ZERO, SWATH_STEP)
                    .into_iter()
                    .map(|(i, j)| (i as i32, j as i32))
                    .collect();
                debug_assert!(!prim.swath_offsets.is_empty());
            }
        }

        let mut by_heading = vec![Vec::new(); HEADINGS as usize];
        for (c, class) in classes.iter().enumerate() {
            let mut current = class.clone();
            for quarter in 0..4 {
                by_heading[c + 2 * quarter] = current.clone();
                current = current.iter().map(MotionPrimitive::rotated_quarter).collect();
            }
        }
        Ok(Self {
            params: *params,
            by_heading,
        })
    }

    pub fn params(&self) -> &ControlSetParams {
        &self.params
    }

    /// Primitives leaving a vertex with heading index `ih`.
    pub fn primitives(&self, ih: u8) -> &[MotionPrimitive] {
        &self.by_heading[ih as usize]
    }

    /// Axis-aligned (heading 0) and diagonal (heading π/4) classes.
    pub fn classes(&self) -> (&[MotionPrimitive], &[MotionPrimitive]) {
        (&self.by_heading[0], &self.by_heading[1])
    }

    pub fn all(&self) -> impl Iterator<Item = &MotionPrimitive> {
        self.by_heading.iter().flatten()
    }
}

/// Control set with default footprint and costmap resolution.
pub fn build_control_set(r_min: f64, grid_pitch: f64, headings: u8) -> Result<ControlSet, ControlSetError> {
    if headings != HEADINGS {
        return Err(ControlSetError::InvalidParameter("only 8 headings are supported"));
    }
    ControlSet::build(&ControlSetParams {
        r_min,
        grid_pitch,
        ..ControlSetParams::default()
    })
}

/// Accumulated absolute heading change along `path`.
fn total_turning(path: &DubinsPath) -> f64 {
    path.segments().iter().map(|s| s.length * s.curvature.abs()).sum()
}

fn rotate_quarter(d: (i32, i32), quarters: u8) -> (i32, i32) {
    (0..quarters).fold(d, |(x, y), _| (-y, x))
}

#[derive(PartialEq)]
struct Entry(f64, (i32, i32, u8));

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortest distance over the lattice graph formed by `classes` from
/// `(0, 0, class)` to the endpoint of displacement `disp`, searched up to
/// `limit`.
fn lattice_distance(classes: &[Vec<MotionPrimitive>; 2], class: u8, disp: (i32, i32, u8), limit: f64) -> Option<f64> {
    let target = (disp.0, disp.1, (class + disp.2) % HEADINGS);
    let mut best: HashMap<(i32, i32, u8), f64> = HashMap::new();
    let mut heap = BinaryHeap::new();
    best.insert((0, 0, class), 0.0);
    heap.push(Entry(0.0, (0, 0, class)));
    while let Some(Entry(g, v)) = heap.pop() {
        if v == target {
            return Some(g);
        }
        if g > limit || best.get(&v).is_some_and(|&b| g > b) {
            continue;
        }
        let ih = v.2;
        let quarters = ih / 2;
        for prim in &classes[(ih % 2) as usize] {
            let (dx, dy) = rotate_quarter((prim.displacement.0, prim.displacement.1), quarters);
            let w = (v.0 + dx, v.1 + dy, (ih + prim.displacement.2) % HEADINGS);
            let ng = g + prim.arc_length;
            if ng > limit {
                continue;
            }
            if best.get(&w).is_none_or(|&b| ng < b) {
                best.insert(w, ng);
                heap.push(Entry(ng, w));
            }
        }
    }
    None
}
