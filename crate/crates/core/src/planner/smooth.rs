use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::swath::{swath_cells, SWATH_STEP};
use crate::geometry::{dubins_shortest_path, ConvexPolygon, DubinsPath};
use crate::ice::Costmap;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SmoothParams {
    pub iterations: usize,
    pub seed: u64,
}

impl Default for SmoothParams {
    fn default() -> Self {
        Self {
            iterations: 200,
            seed: 0x5eed,
        }
    }
}

/// A stretch of path with the costmap cells its swath covers.
#[derive(Debug, Clone)]
pub(crate) struct Piece {
    pub path: DubinsPath,
    /// Sorted, unique costmap indices.
    pub cells: Vec<(i64, i64)>,
}

impl Piece {
    /// Rasterizes `path` against `costmap`; `None` if the swath leaves the grid.
    pub fn rasterize(path: DubinsPath, costmap: &Costmap, footprint: &ConvexPolygon) -> Option<Piece> {
        let cells = swath_cells(
            &path,
            footprint,
            costmap.cell_size(),
            costmap.cell_center(0, 0),
            SWATH_STEP,
        );
        if cells.iter().any(|&(i, j)| costmap.cost_checked(i, j).is_none()) {
            return None;
        }
        Some(Piece { path, cells })
    }
}

/// Path length plus `alpha` times the summed cost of the union of swaths.
pub(crate) fn pieces_cost(pieces: &[Piece], costmap: &Costmap, alpha: f64) -> f64 {
    let mut cells: Vec<(i64, i64)> = pieces.iter().flat_map(|p| p.cells.iter().copied()).collect();
    cells.sort_unstable();
    cells.dedup();
    let length: f64 = pieces.iter().map(|p| p.path.total_length()).sum();
    let ice: f64 = cells
        .iter()
        .map(|&(i, j)| costmap.cost_checked(i, j).unwrap_or(0.0))
        .sum();
    length + alpha * ice
}

/// Ice cost of the union swath of every piece outside `i..j`.
fn kept_ice(pieces: &[Piece], i: usize, j: usize, costmap: &Costmap) -> f64 {
    let mut cells: Vec<(i64, i64)> = pieces[..i]
        .iter()
        .chain(&pieces[j..])
        .flat_map(|p| p.cells.iter().copied())
        .collect();
    cells.sort_unstable();
    cells.dedup();
    cells
        .iter()
        .map(|&(i, j)| costmap.cost_checked(i, j).unwrap_or(0.0))
        .sum()
}

pub(crate) fn concatenate(pieces: &[Piece]) -> DubinsPath {
    let mut out = DubinsPath::new(pieces[0].path.start(), Vec::new());
    for p in pieces {
        out.extend(&p.path);
    }
    out
}

fn sign_changes(pieces: &[Piece]) -> usize {
    let mut last = 0.0;
    let mut n = 0;
    for seg in pieces.iter().flat_map(|p| p.path.segments()) {
        if seg.curvature != 0.0 {
            let s = seg.curvature.signum();
            if last != 0.0 && s != last {
                n += 1;
            }
            last = s;
        }
    }
    n
}

/// Shortcut smoothing: repeatedly replaces the stretch between two randomly
/// chosen junctions with the shortest curvature-bounded connection, keeping
/// the change only if neither the path cost nor the number of curvature sign
/// changes increases.
pub(crate) fn smooth_pieces(
    pieces: Vec<Piece>,
    costmap: &Costmap,
    alpha: f64,
    r_min: f64,
    footprint: &ConvexPolygon,
    params: &SmoothParams,
) -> Vec<Piece> {
    if pieces.len() < 2 {
        return pieces;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut current = pieces.clone();
    let mut cost = pieces_cost(&current, costmap, alpha);
    let mut turns = sign_changes(&current);
    // rasterized shortcuts by endpoint pair; a shortcut's swath does not
    // depend on the rest of the path
    let mut tried: HashMap<[u64; 6], Option<Piece>> = HashMap::new();
    for _ in 0..params.iterations {
        let n = current.len();
        if n < 2 {
            break;
        }
        let i = rng.gen_range(0..n - 1);
        let j = rng.gen_range(i + 2..=n);
        let from = current[i].path.start();
        let to = current[j - 1].path.end();
        let key = [from.x, from.y, from.theta(), to.x, to.y, to.theta()].map(f64::to_bits);
        let kept_length: f64 = current[..i]
            .iter()
            .chain(&current[j..])
            .map(|p| p.path.total_length())
            .sum();
        let piece = match tried.get(&key) {
            Some(p) => p.clone(),
            None => {
                let shortcut = dubins_shortest_path(from, to, r_min);
                // cost is at least the new length plus the ice under the kept pieces
                let bound = kept_length + shortcut.total_length() + alpha * kept_ice(&current, i, j, costmap);
                if bound > cost {
                    continue;
                }
                let p = Piece::rasterize(shortcut, costmap, footprint);
                tried.insert(key, p.clone());
                p
            }
        };
        let Some(piece) = piece else {
            continue;
        };
        let mut candidate = Vec::with_capacity(n - (j - i) + 1);
        candidate.extend_from_slice(&current[..i]);
        candidate.push(piece);
        candidate.extend_from_slice(&current[j..]);
        let c = pieces_cost(&candidate, costmap, alpha);
        let t = sign_changes(&candidate);
        if c <= cost && t <= turns {
            current = candidate;
            cost = c;
            turns = t;
        }
    }
    if cost <= pieces_cost(&pieces, costmap, alpha) && turns <= sign_changes(&pieces) {
        current
    } else {
        pieces
    }
}

/// Shortcut-smooths an arbitrary path, taking its segment boundaries as the
/// candidate junctions. The result keeps both endpoints, never costs more
/// under `path_cost`, and never has more curvature sign changes. A path whose
/// swath leaves the costmap is returned unchanged.
pub fn smooth(
    path: &DubinsPath,
    costmap: &Costmap,
    alpha: f64,
    r_min: f64,
    footprint: &ConvexPolygon,
    params: &SmoothParams,
) -> DubinsPath {
    let mut pieces = Vec::new();
    let mut start = path.start();
    for seg in path.segments() {
        let p = DubinsPath::new(start, vec![*seg]);
        start = p.end();
        match Piece::rasterize(p, costmap, footprint) {
            Some(piece) => pieces.push(piece),
            None => return path.clone(),
        }
    }
    if pieces.len() < 2 {
        return path.clone();
    }
    let out = smooth_pieces(pieces, costmap, alpha, r_min, footprint, params);
    concatenate(&out)
}

/// Path length plus `alpha` times the summed cost of every costmap cell the
/// footprint covers while sweeping the path. `None` if the swath leaves the
/// grid.
pub fn path_cost(path: &DubinsPath, costmap: &Costmap, alpha: f64, footprint: &ConvexPolygon) -> Option<f64> {
    let piece = Piece::rasterize(path.clone(), costmap, footprint)?;
    Some(pieces_cost(&[piece], costmap, alpha))
}
