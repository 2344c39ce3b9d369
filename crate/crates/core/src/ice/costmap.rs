use serde::Serialize;

use super::energy::kinetic_energy_loss_clamped;
use super::scenario::{Channel, IceFloe, Scenario};
use crate::geometry::{polygon_cell_overlap, Vec2};

/// Square grid over the channel holding per-cell collision cost in joules.
///
/// Cell `(i, j)` spans `origin + [i, i+1) × [j, j+1)` cells; its centre is
/// the reference point used for the distance to a floe centroid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Costmap {
    cell_size: f64,
    origin: Vec2,
    nx: usize,
    ny: usize,
    cost: Vec<f64>,
    occupant: Vec<Option<u32>>,
}

impl Costmap {
    /// Empty grid covering `channel`, shifted so that `anchor` sits on a cell centre.
    pub fn empty(channel: &Channel, cell_size: f64, anchor: Vec2) -> Self {
        assert!(cell_size > 0.0, "cell size must be positive");
        let axis = |a: f64, extent: f64| {
            let k = ((a - 0.5 * cell_size) / cell_size).ceil();
            let origin = a - (k + 0.5) * cell_size;
            let n = ((extent - origin) / cell_size).ceil().max(1.0) as usize;
            (origin, n)
        };
        let (ox, nx) = axis(anchor.x, channel.width);
        let (oy, ny) = axis(anchor.y, channel.length);
        Self {
            cell_size,
            origin: Vec2::new(ox, oy),
            nx,
            ny,
            cost: vec![0.0; nx * ny],
            occupant: vec![None; nx * ny],
        }
    }

    /// Rasterizes every floe: a cell touching floe `j` costs
    /// `ΔK_S(‖k − C_j‖, r_j, m_j, v_S)`. When two floes touch one cell the
    /// larger cost wins.
    pub fn build(
        floes: &[IceFloe],
        channel: &Channel,
        ship_mass: f64,
        ship_speed: f64,
        cell_size: f64,
        anchor: Vec2,
    ) -> Self {
        let mut map = Self::empty(channel, cell_size, anchor);
        for floe in floes {
            let (lo, hi) = floe.shape.aabb();
            let Some((i0, i1, j0, j1)) = map.cell_range(lo, hi) else {
                continue;
            };
            let centroid = floe.shape.centroid();
            let radius = floe.shape.bounding_radius();
            for j in j0..=j1 {
                for i in i0..=i1 {
                    let center = map.cell_center(i, j);
                    if !polygon_cell_overlap(&floe.shape, center, cell_size) {
                        continue;
                    }
                    let q = center.distance(centroid);
                    let c = kinetic_energy_loss_clamped(q, radius, floe.mass, ship_mass, ship_speed);
                    let k = j * map.nx + i;
                    if map.occupant[k].is_none() || c > map.cost[k] {
                        map.cost[k] = c;
                        map.occupant[k] = Some(floe.id);
                    }
                }
            }
        }
        map
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn origin(&self) -> Vec2 {
        self.origin
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn costs(&self) -> &[f64] {
        &self.cost
    }

    pub fn cell_center(&self, i: usize, j: usize) -> Vec2 {
        self.origin + Vec2::new((i as f64 + 0.5) * self.cell_size, (j as f64 + 0.5) * self.cell_size)
    }

    pub fn cost(&self, i: usize, j: usize) -> f64 {
        self.cost[j * self.nx + i]
    }

    /// Cost for signed indices; `None` outside the grid.
    pub fn cost_checked(&self, i: i64, j: i64) -> Option<f64> {
        if i < 0 || j < 0 || i >= self.nx as i64 || j >= self.ny as i64 {
            None
        } else {
            Some(self.cost[j as usize * self.nx + i as usize])
        }
    }

    pub fn occupant(&self, i: usize, j: usize) -> Option<u32> {
        self.occupant[j * self.nx + i]
    }

    /// Signed index of the cell containing `p` (may lie outside the grid).
    pub fn cell_index(&self, p: Vec2) -> (i64, i64) {
        let d = p - self.origin;
        (
            (d.x / self.cell_size).floor() as i64,
            (d.y / self.cell_size).floor() as i64,
        )
    }

    /// Inclusive index range of cells that may touch the box `[lo, hi]`.
    pub fn cell_range(&self, lo: Vec2, hi: Vec2) -> Option<(usize, usize, usize, usize)> {
        let (i0, j0) = self.cell_index(lo - Vec2::new(1e-9, 1e-9));
        let (i1, j1) = self.cell_index(hi + Vec2::new(1e-9, 1e-9));
        if i1 < 0 || j1 < 0 || i0 >= self.nx as i64 || j0 >= self.ny as i64 {
            return None;
        }
        Some((
            i0.max(0) as usize,
            i1.min(self.nx as i64 - 1) as usize,
            j0.max(0) as usize,
            j1.min(self.ny as i64 - 1) as usize,
        ))
    }

    pub fn total_cost(&self) -> f64 {
        self.cost.iter().sum()
    }
}

/// Costmap of the scenario's floes at speed `ship_speed`, with cell edges
/// on the channel origin.
pub fn build_costmap(scenario: &Scenario, ship_speed: f64, cell_size: f64) -> Costmap {
    Costmap::build(
        &scenario.floes,
        &scenario.channel,
        scenario.ship_mass,
        ship_speed,
        cell_size,
        Vec2::new(cell_size / 2.0, cell_size / 2.0),
    )
}
