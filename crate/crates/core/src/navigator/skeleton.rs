use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::geometry::{ConvexPolygon, Vec2};
use crate::ice::{Channel, IceFloe};

#[derive(Debug, Error, PartialEq)]
pub enum SkeletonError {
    #[error("inflated ice blocks every route to the goal line ({nodes_expanded} cells expanded)")]
    NoPath { nodes_expanded: usize },
}

/// Binary occupancy over the channel: a cell is blocked when its centre lies
/// within the inflation distance of a floe.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    cell: f64,
    nx: usize,
    ny: usize,
    blocked: Vec<bool>,
}

impl OccupancyGrid {
    pub fn build(floes: &[IceFloe], channel: &Channel, cell: f64, inflation: f64) -> Self {
        let nx = (channel.width / cell).ceil().max(1.0) as usize;
        let ny = (channel.length / cell).ceil().max(1.0) as usize;
        let mut blocked = vec![false; nx * ny];
        for f in floes {
            let (lo, hi) = f.shape.aabb();
            let i0 = ((lo.x - inflation) / cell).floor().max(0.0) as usize;
            let j0 = ((lo.y - inflation) / cell).floor().max(0.0) as usize;
            let i1 = (((hi.x + inflation) / cell).floor().max(0.0) as usize).min(nx - 1);
            let j1 = (((hi.y + inflation) / cell).floor().max(0.0) as usize).min(ny - 1);
            for j in j0..=j1 {
                for i in i0..=i1 {
                    let c = Vec2::new((i as f64 + 0.5) * cell, (j as f64 + 0.5) * cell);
                    if !blocked[j * nx + i] && distance_to_polygon(&f.shape, c) <= inflation {
                        blocked[j * nx + i] = true;
                    }
                }
            }
        }
        Self { cell, nx, ny, blocked }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn cell_size(&self) -> f64 {
        self.cell
    }

    pub fn is_blocked(&self, i: usize, j: usize) -> bool {
        self.blocked[j * self.nx + i]
    }

    pub fn center(&self, i: usize, j: usize) -> Vec2 {
        Vec2::new((i as f64 + 0.5) * self.cell, (j as f64 + 0.5) * self.cell)
    }

    fn cell_of(&self, p: Vec2) -> (usize, usize) {
        let i = (p.x / self.cell).floor().clamp(0.0, (self.nx - 1) as f64) as usize;
        let j = (p.y / self.cell).floor().clamp(0.0, (self.ny - 1) as f64) as usize;
        (i, j)
    }
}

fn distance_to_polygon(poly: &ConvexPolygon, p: Vec2) -> f64 {
    if poly.contains_point(p) {
        return 0.0;
    }
    let v = poly.vertices();
    (0..v.len())
        .map(|k| {
            let (a, b) = (v[k], v[(k + 1) % v.len()]);
            let ab = b - a;
            let t = ((p - a).dot(ab) / ab.norm_sq()).clamp(0.0, 1.0);
            (a + ab * t).distance(p)
        })
        .fold(f64::INFINITY, f64::min)
}

#[derive(PartialEq)]
struct Open {
    f: f64,
    g: f64,
    index: usize,
}

impl Eq for Open {}

impl Ord for Open {
    fn cmp(&self, o: &Self) -> Ordering {
        o.f.total_cmp(&self.f)
            .then(self.g.total_cmp(&o.g))
            .then(o.index.cmp(&self.index))
    }
}

impl PartialOrd for Open {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Shortest 8-connected route through free cells from `start` to the first
/// row whose centres reach `goal_y`, shortened by line-of-sight string
/// pulling. Cells within `start_clearance` of the start are treated as free
/// so a ship touching ice can still leave. Returns the polyline (starting at
/// `start`) and the number of cells expanded.
pub fn open_water_path(
    grid: &OccupancyGrid,
    start: Vec2,
    goal_y: f64,
    start_clearance: f64,
) -> Result<(Vec<Vec2>, usize), SkeletonError> {
    let cell = grid.cell;
    let (si, sj) = grid.cell_of(start);
    let j_goal = (((goal_y / cell) - 0.5).ceil().max(0.0) as usize).min(grid.ny - 1);
    if sj >= j_goal {
        return Ok((vec![start, Vec2::new(start.x, goal_y.max(start.y))], 0));
    }
    let back = (4.0 / cell).ceil() as usize;
    let j_lo = sj.saturating_sub(back);
    let rows = j_goal - j_lo + 1;
    let nx = grid.nx;
    let idx = |i: usize, j: usize| (j - j_lo) * nx + i;
    let free = |i: usize, j: usize| !grid.is_blocked(i, j) || grid.center(i, j).distance(start) <= start_clearance;
    let h = |j: usize| (j_goal - j.min(j_goal)) as f64 * cell;

    let n = rows * nx;
    let mut g = vec![f64::INFINITY; n];
    let mut parent = vec![usize::MAX; n];
    let mut heap = BinaryHeap::new();
    let s = idx(si, sj);
    g[s] = 0.0;
    heap.push(Open {
        f: h(sj),
        g: 0.0,
        index: s,
    });
    let mut expanded = 0;
    let mut goal = None;
    while let Some(Open { g: gv, index, .. }) = heap.pop() {
        if gv > g[index] {
            continue;
        }
        let (i, j) = (index % nx, index / nx + j_lo);
        if j >= j_goal {
            goal = Some(index);
            break;
        }
        expanded += 1;
        for (di, dj) in [
            (-1i64, -1i64),
            (0, -1),
            (1, -1),
            (-1, 0),
            (1, 0),
            (-1, 1),
            (0, 1),
            (1, 1),
        ] {
            let (ni, nj) = (i as i64 + di, j as i64 + dj);
            if ni < 0 || nj < j_lo as i64 || ni >= nx as i64 || nj > j_goal as i64 {
                continue;
            }
            let (ni, nj) = (ni as usize, nj as usize);
            if !free(ni, nj) {
                continue;
            }
            // no corner cutting between two blocked cells
            if di != 0 && dj != 0 && !free(i, nj) && !free(ni, j) {
                continue;
            }
            let step = if di != 0 && dj != 0 {
                std::f64::consts::SQRT_2
            } else {
                1.0
            } * cell;
            let k = idx(ni, nj);
            let ng = gv + step;
            if ng < g[k] {
                g[k] = ng;
                parent[k] = index;
                heap.push(Open {
                    f: ng + h(nj),
                    g: ng,
                    index: k,
                });
            }
        }
    }
    let Some(goal) = goal else {
        return Err(SkeletonError::NoPath {
            nodes_expanded: expanded,
        });
    };
    let mut cells = vec![goal];
    while let Some(&k) = cells.last() {
        if parent[k] == usize::MAX {
            break;
        }
        cells.push(parent[k]);
    }
    cells.reverse();
    let centers: Vec<Vec2> = cells.iter().map(|&k| grid.center(k % nx, k / nx + j_lo)).collect();

    let visible = |a: Vec2, b: Vec2| {
        let steps = ((b - a).norm() / (cell / 4.0)).ceil().max(1.0) as usize;
        (0..=steps).all(|t| {
            let p = a + (b - a) * (t as f64 / steps as f64);
            let (i, j) = grid.cell_of(p);
            free(i, j)
        })
    };
    let mut points = vec![start];
    let mut anchor = start;
    let mut k = 1;
    while k < centers.len() {
        let mut far = k;
        while far + 1 < centers.len() && visible(anchor, centers[far + 1]) {
            far += 1;
        }
        anchor = centers[far];
        points.push(anchor);
        k = far + 1;
    }
    if points.len() == 1 {
        points.push(centers[centers.len() - 1]);
    }
    Ok((points, expanded))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_distance() {
        let sq = ConvexPolygon::rectangle(2.0, 2.0).unwrap();
        assert_eq!(distance_to_polygon(&sq, Vec2::new(0.5, 0.5)), 0.0);
        assert!((distance_to_polygon(&sq, Vec2::new(3.0, 0.0)) - 2.0).abs() < 1e-12);
        assert!((distance_to_polygon(&sq, Vec2::new(4.0, 5.0)) - 5.0).abs() < 1e-12);
    }
}
