use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::collision::{collision_response, CollisionEvent, CollisionResponse};
use crate::geometry::{ring_centroid, signed_area, ConvexPolygon, Pose, Vec2};
use crate::ice::{Channel, IceFloe, Scenario};

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("time step {0} outside (0, 0.05]")]
    InvalidStep(f64),
    #[error("unstable simulation: speed {speed:.3} m/s at t = {time:.2} s")]
    Unstable { speed: f64, time: f64 },
    #[error("invalid simulation parameter: {0}")]
    InvalidParameter(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimParams {
    pub dt: f64,
    /// Nomoto time constant T, seconds.
    pub nomoto_t: f64,
    /// Nomoto gain K, 1/s.
    pub nomoto_k: f64,
    /// Time constant of surge toward the commanded speed, seconds.
    pub surge_time_constant: f64,
    /// Linear water drag on floes, 1/s.
    pub water_drag: f64,
    /// Any body faster than this aborts the run.
    pub max_speed: f64,
    /// Floes slower than this are put to rest.
    pub rest_speed: f64,
    pub ship_length: f64,
    pub ship_width: f64,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            dt: 0.02,
            nomoto_t: 1.0,
            nomoto_k: 0.5,
            surge_time_constant: 2.0,
            water_drag: 0.5,
            max_speed: 3.0,
            rest_speed: 1e-4,
            ship_length: 1.0,
            ship_width: 0.25,
        }
    }
}

impl SimParams {
    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.dt > 0.0 && self.dt <= 0.05) {
            return Err(SimError::InvalidStep(self.dt));
        }
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.nomoto_t) || !positive(self.nomoto_k) || !positive(self.surge_time_constant) {
            return Err(SimError::InvalidParameter("ship dynamics constants must be positive"));
        }
        if !(self.water_drag >= 0.0) || !positive(self.max_speed) || !(self.rest_speed >= 0.0) {
            return Err(SimError::InvalidParameter("bad drag, speed limit or rest speed"));
        }
        if !positive(self.ship_length) || !positive(self.ship_width) {
            return Err(SimError::InvalidParameter("ship footprint must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShipState {
    /// Pose of the footprint centre.
    pub pose: Pose,
    pub surge_speed: f64,
    pub yaw_rate: f64,
    pub mass: f64,
    /// Body-frame footprint, centred on the origin, length along +x.
    pub footprint: ConvexPolygon,
}

impl ShipState {
    pub fn velocity(&self) -> Vec2 {
        self.pose.heading() * self.surge_speed
    }

    pub fn world_footprint(&self) -> ConvexPolygon {
        self.footprint.placed(&self.pose)
    }

    pub fn kinetic_energy(&self) -> f64 {
        0.5 * self.mass * self.surge_speed * self.surge_speed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FloeState {
    /// Floe with its current world-frame polygon.
    pub floe: IceFloe,
    /// Centroid position and accumulated rotation.
    pub pose: Pose,
    pub velocity: Vec2,
    pub angular_velocity: f64,
    #[serde(skip)]
    body: ConvexPolygon,
}

impl FloeState {
    pub fn new(floe: IceFloe) -> Self {
        let c = floe.shape.centroid();
        Self {
            body: floe.shape.translated(-c),
            pose: Pose::new(c.x, c.y, 0.0),
            floe,
            velocity: Vec2::ZERO,
            angular_velocity: 0.0,
        }
    }

    fn moving(&self) -> bool {
        self.velocity != Vec2::ZERO || self.angular_velocity != 0.0
    }

    fn refresh_shape(&mut self) {
        self.floe.shape = self.body.placed(&self.pose);
    }

    fn shift(&mut self, d: Vec2) {
        self.pose = Pose::new(self.pose.x + d.x, self.pose.y + d.y, self.pose.theta());
        self.floe.shape = self.floe.shape.translated(d);
    }
}

/// Disk collision between the ship and one floe whose polygons overlap.
/// Returns the floe displacement that separates the two (always applied)
/// and, when they approach along the normal, the response and event.
pub fn resolve_collision(
    ship: &ShipState,
    floe: &FloeState,
    time: f64,
) -> Option<(Vec2, Option<(CollisionResponse, CollisionEvent)>)> {
    let hull = ship.world_footprint();
    let mtv = hull.penetration(&floe.floe.shape)?;
    let ring = floe.floe.shape.clip(&hull);
    let contact = if ring.len() >= 3 && signed_area(&ring).abs() > 1e-14 {
        ring_centroid(&ring)
    } else if !ring.is_empty() {
        ring.iter().fold(Vec2::ZERO, |a, &b| a + b) * (1.0 / ring.len() as f64)
    } else {
        (hull.centroid() + floe.floe.shape.centroid()) * 0.5
    };
    let normal = (floe.floe.shape.centroid() - contact)
        .normalized()
        .or_else(|| mtv.normalized())
        .unwrap_or(ship.pose.heading());
    let rel = ship.velocity() - floe.velocity;
    let response = collision_response(ship.mass, ship.surge_speed, floe.floe.mass, rel, normal).map(|r| {
        let event = CollisionEvent {
            time,
            floe_id: floe.floe.id,
            contact_point: contact,
            normal,
            theta_c: r.theta_c,
            v_eq: r.v_eq,
            delta_k_ship: r.delta_k_ship,
            delta_k_sys: r.delta_k_sys,
            delta_k_ice: r.delta_k_ice,
            floe_mass: floe.floe.mass,
        };
        (r, event)
    });
    Some((mtv, response))
}

/// Ship and floes in a channel, advanced with a fixed step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct World {
    pub ship: ShipState,
    pub floes: Vec<FloeState>,
    pub channel: Channel,
    pub time: f64,
    params: SimParams,
    #[serde(skip)]
    grid: BucketGrid,
}

impl World {
    pub fn new(scenario: &Scenario, params: SimParams, initial_speed: f64) -> Result<Self, SimError> {
        params.validate()?;
        let footprint = ConvexPolygon::rectangle(params.ship_length, params.ship_width)
            .map_err(|_| SimError::InvalidParameter("ship footprint must be positive"))?;
        let floes: Vec<FloeState> = scenario.floes.iter().cloned().map(FloeState::new).collect();
        let reach = floes
            .iter()
            .map(|f| f.floe.shape.bounding_radius())
            .fold(params.ship_length / 2.0, f64::max);
        Ok(Self {
            ship: ShipState {
                pose: scenario.start_pose,
                surge_speed: initial_speed.max(0.0),
                yaw_rate: 0.0,
                mass: scenario.ship_mass,
                footprint,
            },
            grid: BucketGrid::new(&scenario.channel, 2.0 * reach + 0.5),
            floes,
            channel: scenario.channel,
            time: 0.0,
            params,
        })
    }

    pub fn params(&self) -> &SimParams {
        &self.params
    }

    /// Current floe polygons (the observed ice field).
    pub fn observed_floes(&self) -> Vec<IceFloe> {
        self.floes.iter().map(|f| f.floe.clone()).collect()
    }

    /// Advances one step of the configured length.
    pub fn step(&mut self, rudder: f64, thrust: f64) -> Result<Vec<CollisionEvent>, SimError> {
        self.step_dt(self.params.dt, rudder, thrust)
    }

    /// Advances by `dt`: Nomoto yaw `T ṙ + r = K δ`, first-order surge
    /// toward `thrust` (a commanded speed), floe drift with linear drag, then
    /// ship–floe contacts in floe order, then floe–floe contacts.
    pub fn step_dt(&mut self, dt: f64, rudder: f64, thrust: f64) -> Result<Vec<CollisionEvent>, SimError> {
        if !(dt > 0.0 && dt <= 0.05) {
            return Err(SimError::InvalidStep(dt));
        }
        let p = self.params;
        let ship = &mut self.ship;
        ship.yaw_rate += dt * (p.nomoto_k * rudder - ship.yaw_rate) / p.nomoto_t;
        ship.surge_speed += dt * (thrust.max(0.0) - ship.surge_speed) / p.surge_time_constant;
        ship.surge_speed = ship.surge_speed.max(0.0);
        let theta = ship.pose.theta() + ship.yaw_rate * dt;
        let h = Vec2::from_angle(theta);
        ship.pose = Pose::new(
            ship.pose.x + h.x * ship.surge_speed * dt,
            ship.pose.y + h.y * ship.surge_speed * dt,
            theta,
        );
        self.time += dt;

        let decay = (-p.water_drag * dt).exp();
        for f in self.floes.iter_mut().filter(|f| f.moving()) {
            let v = f.velocity;
            f.pose = Pose::new(
                f.pose.x + v.x * dt,
                f.pose.y + v.y * dt,
                f.pose.theta() + f.angular_velocity * dt,
            );
            f.velocity = v * decay;
            f.angular_velocity *= decay;
            if f.velocity.norm() < p.rest_speed && f.angular_velocity.abs() < p.rest_speed {
                f.velocity = Vec2::ZERO;
                f.angular_velocity = 0.0;
            }
            f.refresh_shape();
            keep_in_channel(f, &self.channel);
        }

        self.grid.rebuild(&self.floes);
        let mut events = Vec::new();
        let (lo, hi) = self.ship.world_footprint().aabb();
        for k in self.grid.near(lo, hi) {
            let Some((mtv, response)) = resolve_collision(&self.ship, &self.floes[k], self.time) else {
                continue;
            };
            let floe = &mut self.floes[k];
            if let Some((r, event)) = response {
                floe.velocity = floe.velocity + r.floe_delta_v;
                self.ship.surge_speed = r.ship_speed_after;
                events.push(event);
            }
            floe.shift(mtv);
            keep_in_channel(floe, &self.channel);
        }

        self.resolve_floe_contacts();

        let fastest = self
            .floes
            .iter()
            .map(|f| f.velocity.norm())
            .fold(self.ship.surge_speed, f64::max);
        if !(fastest <= p.max_speed) {
            return Err(SimError::Unstable {
                speed: fastest,
                time: self.time,
            });
        }
        Ok(events)
    }

    /// Inelastic disk collisions between overlapping floes where at least one
    /// is moving; overlap is removed in inverse proportion to mass.
    fn resolve_floe_contacts(&mut self) {
        let moving: Vec<usize> = (0..self.floes.len()).filter(|&i| self.floes[i].moving()).collect();
        if moving.is_empty() {
            return;
        }
        self.grid.rebuild(&self.floes);
        for &a in &moving {
            let (lo, hi) = self.floes[a].floe.shape.aabb();
            for b in self.grid.near(lo, hi) {
                if b == a || (self.floes[b].moving() && b < a) {
                    continue;
                }
                let (fa, fb) = pair_mut(&mut self.floes, a, b);
                let Some(mtv) = fa.floe.shape.penetration(&fb.floe.shape) else {
                    continue;
                };
                let (ma, mb) = (fa.floe.mass, fb.floe.mass);
                let n = (fb.pose.position() - fa.pose.position())
                    .normalized()
                    .or_else(|| mtv.normalized())
                    .unwrap_or(Vec2::new(1.0, 0.0));
                let vn = (fb.velocity - fa.velocity).dot(n);
                if vn < 0.0 {
                    let j = -vn / (1.0 / ma + 1.0 / mb);
                    fa.velocity = fa.velocity - n * (j / ma);
                    fb.velocity = fb.velocity + n * (j / mb);
                }
                let total = ma + mb;
                fa.shift(mtv * (-mb / total));
                fb.shift(mtv * (ma / total));
                keep_in_channel(fa, &self.channel);
                keep_in_channel(fb, &self.channel);
            }
        }
    }
}

fn pair_mut<T>(v: &mut [T], a: usize, b: usize) -> (&mut T, &mut T) {
    assert_ne!(a, b);
    if a < b {
        let (l, r) = v.split_at_mut(b);
        (&mut l[a], &mut r[0])
    } else {
        let (l, r) = v.split_at_mut(a);
        (&mut r[0], &mut l[b])
    }
}

/// Pushes a floe back inside the channel side walls and kills its velocity
/// into the wall.
fn keep_in_channel(f: &mut FloeState, channel: &Channel) {
    let (lo, hi) = f.floe.shape.aabb();
    if lo.x < 0.0 {
        f.shift(Vec2::new(-lo.x, 0.0));
        f.velocity.x = f.velocity.x.max(0.0);
    } else if hi.x > channel.width {
        f.shift(Vec2::new(channel.width - hi.x, 0.0));
        f.velocity.x = f.velocity.x.min(0.0);
    }
}

/// Uniform buckets over floe centroids for neighbour queries.
#[derive(Debug, Clone, Default, PartialEq)]
struct BucketGrid {
    size: f64,
    nx: usize,
    ny: usize,
    reach: f64,
    buckets: Vec<Vec<usize>>,
}

impl BucketGrid {
    fn new(channel: &Channel, size: f64) -> Self {
        let nx = (channel.width / size).ceil().max(1.0) as usize;
        let ny = (channel.length / size).ceil().max(1.0) as usize;
        Self {
            size,
            nx,
            ny,
            reach: size / 2.0,
            buckets: vec![Vec::new(); nx * ny],
        }
    }

    fn bucket(&self, p: Vec2) -> (usize, usize) {
        let i = (p.x / self.size).floor().clamp(0.0, (self.nx - 1) as f64) as usize;
        let j = (p.y / self.size).floor().clamp(0.0, (self.ny - 1) as f64) as usize;
        (i, j)
    }

    fn rebuild(&mut self, floes: &[FloeState]) {
        for b in &mut self.buckets {
            b.clear();
        }
        for (k, f) in floes.iter().enumerate() {
            let (i, j) = self.bucket(f.pose.position());
            self.buckets[j * self.nx + i].push(k);
        }
    }

    /// Indices of floes whose centroid bucket may hold a floe touching the
    /// box `[lo, hi]`, ascending.
    fn near(&self, lo: Vec2, hi: Vec2) -> Vec<usize> {
        let r = Vec2::new(self.reach, self.reach);
        let (i0, j0) = self.bucket(lo - r);
        let (i1, j1) = self.bucket(hi + r);
        let mut out = Vec::new();
        for j in j0..=j1 {
            for i in i0..=i1 {
                out.extend_from_slice(&self.buckets[j * self.nx + i]);
            }
        }
        out.sort_unstable();
        out
    }
}
