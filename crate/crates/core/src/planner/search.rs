use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::control_set::{heading_angle, snap_heading, ControlSet, ControlSetError, LatticeVertex, HEADINGS};
use super::heuristic::HeuristicKind;
use super::smooth::{concatenate, pieces_cost, smooth_pieces, Piece, SmoothParams};
use crate::geometry::{sample_path, DubinsPath, Pose, Vec2};
use crate::ice::Costmap;

#[derive(Debug, Error, PartialEq)]
pub enum PlanError {
    #[error("invalid plan query: {0}")]
    InvalidQuery(&'static str),
    #[error("costmap cells are not centred on the start position")]
    MisalignedCostmap,
    #[error(transparent)]
    ControlSet(#[from] ControlSetError),
    #[error("no path to the goal line after {nodes_expanded} expansions")]
    NoPath { nodes_expanded: usize },
}

/// Start pose and goal band `y ≥ goal_y`, `x ∈ x_range`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanQuery {
    pub start: Pose,
    pub goal_y: f64,
    pub x_range: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlannerConfig {
    /// Weight of collision cost against path length.
    pub alpha: f64,
    pub heuristic: HeuristicKind,
    /// `None` returns the raw lattice path.
    pub smoothing: Option<SmoothParams>,
    /// Keep the expanded-vertex list for [`PlanResult::write_debug`].
    pub record_expansions: bool,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            alpha: 10.0,
            heuristic: HeuristicKind::Line,
            smoothing: Some(SmoothParams::default()),
            record_expansions: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanResult {
    pub path: DubinsPath,
    /// Length plus `alpha` times the cost of the union swath of `path`.
    pub cost: f64,
    /// Sum of edge costs along the lattice path found by the search.
    pub search_cost: f64,
    pub nodes_expanded: usize,
    /// Wall-clock seconds, search and smoothing.
    pub plan_time: f64,
    /// Lattice vertices of the unsmoothed path, relative to the start.
    pub vertices: Vec<LatticeVertex>,
    /// Expanded vertices in order, when recorded.
    pub expanded: Vec<LatticeVertex>,
    /// World pose of the lattice origin.
    pub lattice_origin: Pose,
}

impl PlanResult {
    /// JSON object with the expanded vertices and the path sampled every
    /// 0.1 m, both as `[x, y, theta]` triples in world coordinates.
    pub fn write_debug(&self, pitch: f64, mut out: impl Write) -> std::io::Result<()> {
        let origin = self.lattice_origin.position();
        let expanded: Vec<[f64; 3]> = self
            .expanded
            .iter()
            .map(|v| {
                let p = v.pose(pitch);
                [origin.x + p.x, origin.y + p.y, p.theta()]
            })
            .collect();
        let path: Vec<[f64; 3]> = sample_path(&self.path, 0.1)
            .iter()
            .map(|p| [p.x, p.y, p.theta()])
            .collect();
        let doc = serde_json::json!({ "expanded": expanded, "path": path });
        serde_json::to_writer(&mut out, &doc)?;
        writeln!(out)
    }
}

#[derive(Clone, Copy)]
struct Open {
    f: f64,
    g: f64,
    index: usize,
}

impl PartialEq for Open {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Open {}

// BinaryHeap pops the greatest: lowest f, then highest g, then lowest index.
impl Ord for Open {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then_with(|| self.g.total_cmp(&other.g))
            .then_with(|| other.index.cmp(&self.index))
    }
}

impl PartialOrd for Open {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dense index over the finite lattice window.
struct Window {
    ix0: i32,
    iy0: i32,
    nx: i32,
    ny: i32,
}

impl Window {
    fn index(&self, v: LatticeVertex) -> Option<usize> {
        let (x, y) = (v.ix - self.ix0, v.iy - self.iy0);
        if x < 0 || y < 0 || x >= self.nx || y >= self.ny {
            return None;
        }
        Some(((y * self.nx + x) as usize) * HEADINGS as usize + v.ih as usize)
    }

    fn vertex(&self, index: usize) -> LatticeVertex {
        let h = HEADINGS as usize;
        let cell = (index / h) as i32;
        LatticeVertex {
            ix: self.ix0 + cell % self.nx,
            iy: self.iy0 + cell / self.nx,
            ih: (index % h) as u8,
        }
    }

    fn len(&self) -> usize {
        (self.nx * self.ny) as usize * HEADINGS as usize
    }
}

/// Minimum-cost lattice path from the start to the goal band.
///
/// The lattice origin sits on the start position and its heading is the
/// nearest lattice heading, so the costmap must have a cell centred on the
/// start. Edge cost is primitive length plus `alpha` times the summed cost of
/// the cells in the primitive's swath. Vertices stay within `x_range`, every
/// swath stays inside the costmap, and the first goal vertex popped ends the
/// search. Ties on f go to the larger g, then to the lower vertex index.
pub fn plan(
    query: &PlanQuery,
    costmap: &Costmap,
    control_set: &ControlSet,
    config: &PlannerConfig,
) -> Result<PlanResult, PlanError> {
    let t0 = Instant::now();
    let params = control_set.params();
    let pitch = params.grid_pitch;
    let cpp = params.cells_per_pitch()?;
    let start = query.start;
    if !start.is_finite() || !query.goal_y.is_finite() {
        return Err(PlanError::InvalidQuery("non-finite start or goal"));
    }
    if !(query.goal_y > start.y) {
        return Err(PlanError::InvalidQuery("goal line must lie ahead of the start"));
    }
    if !(query.x_range.0 <= start.x && start.x <= query.x_range.1) {
        return Err(PlanError::InvalidQuery("start outside the x range"));
    }
    if !(config.alpha >= 0.0) {
        return Err(PlanError::InvalidQuery("alpha must be nonnegative"));
    }
    if (costmap.cell_size() - params.cell_size).abs() > 1e-12 {
        return Err(PlanError::InvalidQuery(
            "costmap resolution differs from the control set",
        ));
    }
    let (ci0, cj0) = costmap.cell_index(start.position());
    if ci0 < 0
        || cj0 < 0
        || (costmap.cell_center(ci0 as usize, cj0 as usize) - start.position()).norm() > 1e-6 * costmap.cell_size()
    {
        return Err(PlanError::MisalignedCostmap);
    }

    let reach = params.connection_radius.floor() as i32;
    let (nxc, nyc) = costmap.dims();
    let lo = costmap.origin();
    let hi = lo + Vec2::new(nxc as f64, nyc as f64) * costmap.cell_size();
    let ix0 = ((query.x_range.0 - start.x) / pitch - 1e-9).ceil() as i32;
    let ix1 = ((query.x_range.1 - start.x) / pitch + 1e-9).floor() as i32;
    let iy0 = ((lo.y - start.y) / pitch).ceil() as i32;
    let iy_goal = ((query.goal_y - start.y) / pitch - 1e-9).ceil() as i32;
    let iy1 = (iy_goal + reach).min(((hi.y - start.y) / pitch).floor() as i32);
    if ix1 < ix0 || iy1 < iy_goal {
        return Err(PlanError::NoPath { nodes_expanded: 0 });
    }
    let window = Window {
        ix0,
        iy0,
        nx: ix1 - ix0 + 1,
        ny: iy1 - iy0 + 1,
    };

    let r_min = params.r_min;
    let world = |v: LatticeVertex| {
        Pose::new(
            start.x + v.ix as f64 * pitch,
            start.y + v.iy as f64 * pitch,
            heading_angle(v.ih),
        )
    };
    let is_goal = |v: LatticeVertex| start.y + v.iy as f64 * pitch >= query.goal_y - 1e-9;

    let n = window.len();
    let mut g = vec![f64::INFINITY; n];
    let mut parent: Vec<Option<(usize, u16)>> = vec![None; n];
    let mut heap = BinaryHeap::new();
    let mut expanded = Vec::new();
    let mut nodes_expanded = 0usize;

    let root = LatticeVertex {
        ix: 0,
        iy: 0,
        ih: snap_heading(start.theta()),
    };
    let root_index = window
        .index(root)
        .ok_or(PlanError::InvalidQuery("start outside the lattice window"))?;
    g[root_index] = 0.0;
    heap.push(Open {
        f: config.heuristic.eval(&world(root), query.goal_y, r_min),
        g: 0.0,
        index: root_index,
    });

    let mut goal = None;
    while let Some(Open { g: gv, index, .. }) = heap.pop() {
        if gv > g[index] {
            continue;
        }
        let v = window.vertex(index);
        if is_goal(v) {
            goal = Some(index);
            break;
        }
        nodes_expanded += 1;
        if config.record_expansions {
            expanded.push(v);
        }
        for (k, prim) in control_set.primitives(v.ih).iter().enumerate() {
            let (dx, dy, dh) = prim.displacement;
            let w = LatticeVertex {
                ix: v.ix + dx,
                iy: v.iy + dy,
                ih: (v.ih + dh) % HEADINGS,
            };
            let Some(wi) = window.index(w) else {
                continue;
            };
            let bi = ci0 + cpp * v.ix as i64;
            let bj = cj0 + cpp * v.iy as i64;
            let mut ice = 0.0;
            let mut inside = true;
            for &(oi, oj) in &prim.swath_offsets {
                match costmap.cost_checked(bi + oi as i64, bj + oj as i64) {
                    Some(c) => ice += c,
                    None => {
                        inside = false;
                        break;
                    }
                }
            }
            if !inside {
                continue;
            }
            let ng = gv + prim.arc_length + config.alpha * ice;
            if ng < g[wi] {
                g[wi] = ng;
                parent[wi] = Some((index, k as u16));
                heap.push(Open {
                    f: ng + config.heuristic.eval(&world(w), query.goal_y, r_min),
                    g: ng,
                    index: wi,
                });
            }
        }
    }
    let Some(goal) = goal else {
        return Err(PlanError::NoPath { nodes_expanded });
    };

    let mut chain = Vec::new();
    let mut cur = goal;
    while let Some((p, k)) = parent[cur] {
        chain.push((p, k as usize));
        cur = p;
    }
    chain.reverse();

    let mut vertices = vec![root];
    let mut pieces = Vec::with_capacity(chain.len());
    for &(p, k) in &chain {
        let v = window.vertex(p);
        let prim = &control_set.primitives(v.ih)[k];
        let frame = Pose::new(start.x + v.ix as f64 * pitch, start.y + v.iy as f64 * pitch, 0.0);
        let bi = ci0 + cpp * v.ix as i64;
        let bj = cj0 + cpp * v.iy as i64;
        pieces.push(Piece {
            path: prim.path.transformed(&frame),
            cells: prim
                .swath_offsets
                .iter()
                .map(|&(oi, oj)| (bi + oi as i64, bj + oj as i64))
                .collect(),
        });
        let (dx, dy, dh) = prim.displacement;
        vertices.push(LatticeVertex {
            ix: v.ix + dx,
            iy: v.iy + dy,
            ih: (v.ih + dh) % HEADINGS,
        });
    }

    let footprint = params.footprint()?;
    let pieces = match &config.smoothing {
        Some(sp) => smooth_pieces(pieces, costmap, config.alpha, r_min, &footprint, sp),
        None => pieces,
    };
    let cost = pieces_cost(&pieces, costmap, config.alpha);
    let path = concatenate(&pieces);
    Ok(PlanResult {
        path,
        cost,
        search_cost: g[goal],
        nodes_expanded,
        plan_time: t0.elapsed().as_secs_f64(),
        vertices,
        expanded,
        lattice_origin: world(root),
    })
}
