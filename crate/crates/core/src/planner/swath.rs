use crate::geometry::{sample_path, ConvexPolygon, DubinsPath, Vec2};

/// Arc-length spacing of footprint placements when sweeping a path.
pub const SWATH_STEP: f64 = 0.01;

/// Minimum overlap depth for a cell to count as covered. Cells the footprint
/// only touches along an edge are excluded.
pub const SWATH_PENETRATION: f64 = 1e-9;

/// Cells covered by `footprint` swept along `path`, sorted and unique.
///
/// Cell `(i, j)` is the square of side `cell_size` centred at
/// `center0 + (i, j)·cell_size`.
pub fn swath_cells(
    path: &DubinsPath,
    footprint: &ConvexPolygon,
    cell_size: f64,
    center0: Vec2,
    step: f64,
) -> Vec<(i64, i64)> {
    let half = cell_size / 2.0;
    let body = footprint.vertices();
    let mut world = vec![Vec2::ZERO; body.len()];
    let mut axes: Vec<(Vec2, f64, f64, f64)> = Vec::with_capacity(body.len());
    let mut cells = Vec::new();
    for pose in sample_path(path, step) {
        for (w, &b) in world.iter_mut().zip(body) {
            *w = pose.transform_point(b);
        }
        let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for w in &world {
            lo = Vec2::new(lo.x.min(w.x), lo.y.min(w.y));
            hi = Vec2::new(hi.x.max(w.x), hi.y.max(w.y));
        }
        // separating axes of the placed footprint with its projection interval
        // and the projected half-extent of a cell
        axes.clear();
        for k in 0..world.len() {
            let e = world[(k + 1) % world.len()] - world[k];
            let Some(axis) = Vec2::new(e.y, -e.x).normalized() else {
                continue;
            };
            let (plo, phi) = world.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
                let d = v.dot(axis);
                (a.min(d), b.max(d))
            });
            axes.push((axis, plo, phi, half * (axis.x.abs() + axis.y.abs())));
        }
        let i0 = ((lo.x - center0.x) / cell_size - 0.5).floor() as i64;
        let i1 = ((hi.x - center0.x) / cell_size + 0.5).ceil() as i64;
        let j0 = ((lo.y - center0.y) / cell_size - 0.5).floor() as i64;
        let j1 = ((hi.y - center0.y) / cell_size + 0.5).ceil() as i64;
        let slack = -SWATH_PENETRATION;
        for j in j0..=j1 {
            for i in i0..=i1 {
                let c = center0 + Vec2::new(i as f64 * cell_size, j as f64 * cell_size);
                if lo.x > c.x + half + slack
                    || hi.x < c.x - half - slack
                    || lo.y > c.y + half + slack
                    || hi.y < c.y - half - slack
                {
                    continue;
                }
                let separated = axes.iter().any(|&(axis, plo, phi, r)| {
                    let d = c.dot(axis);
                    plo > d + r + slack || phi < d - r - slack
                });
                if !separated {
                    cells.push((i, j));
                }
            }
        }
    }
    cells.sort_unstable();
    cells.dedup();
    cells
}

/// Merges sorted, unique cell lists into one sorted, unique list.
pub fn merge_cells<'a>(lists: impl IntoIterator<Item = &'a [(i64, i64)]>) -> Vec<(i64, i64)> {
    let mut out: Vec<(i64, i64)> = lists.into_iter().flatten().copied().collect();
    out.sort_unstable();
    out.dedup();
    out
}
