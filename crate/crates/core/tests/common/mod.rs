#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::f64::consts::TAU;

use icenav::control::{cross_track_error, Tracker, TrackerParams, Trajectory};
use icenav::geometry::{dubins_shortest_path, ConvexPolygon, Pose, Vec2};
use icenav::ice::{generate_scenario, Channel, Costmap, FloeLimits, Scenario, ScenarioParams};
use icenav::planner::{ControlSet, PlanQuery, HEADINGS};
use icenav::sim::{SimParams, World};

/// Shortest curvature-bounded distance from `p` to the line `y = gy`,
/// taken as the least point-to-pose path length over goal poses on the line.
///
/// Goal poses come from two sources: a coarse grid over goal x and heading
/// refined by golden section, and the end poses of turn-then-straight
/// manoeuvres (turn either way by any angle, then run straight to the line)
/// minimized over the turn angle. Every candidate is scored by the
/// point-to-pose shortest path, so the result never undercuts a real path.
pub fn point_to_line(p: &Pose, gy: f64, r: f64) -> f64 {
    point_to_line_with(p, gy, r, 16, 1e-10, 1e-8)
}

/// `point_to_line` with a coarser grid stage (about eight times fewer
/// shortest-path evaluations); the turn-then-straight candidates are unchanged.
pub fn point_to_line_coarse(p: &Pose, gy: f64, r: f64) -> f64 {
    point_to_line_with(p, gy, r, 6, 1e-3, 1e-2)
}

fn point_to_line_with(p: &Pose, gy: f64, r: f64, scan: usize, x_tol: f64, phi_tol: f64) -> f64 {
    if p.y >= gy {
        return 0.0;
    }
    let to_goal = |x: f64, phi: f64| dubins_shortest_path(*p, Pose::new(x, gy, phi), r).total_length();

    let span = (gy - p.y) + 2.0 * r;
    let over_x = |phi: f64| scan_then_refine(|x| to_goal(x, phi), p.x - span, p.x + span, scan, x_tol);
    let mut best = scan_then_refine(over_x, 0.0, TAU, scan, phi_tol);

    for dir in [1.0, -1.0] {
        let manoeuvre = |a: f64| -> Option<(f64, f64, f64)> {
            // pose after turning through `a`, then the straight run to the line
            let c = p.position() + Vec2::new(-p.theta().sin(), p.theta().cos()) * (dir * r);
            let h = p.theta() + dir * a;
            let q = c + Vec2::new(h.sin(), -h.cos()) * (dir * r);
            if q.y > gy + 1e-12 || h.sin() <= 0.0 {
                return None;
            }
            let s = (gy - q.y) / h.sin();
            Some((r * a + s, q.x + s * h.cos(), h))
        };
        let length = |a: f64| manoeuvre(a).map_or(f64::INFINITY, |m| m.0);
        let a = argmin_scan_then_refine(length, 0.0, TAU, 720, 1e-13);
        if let Some((_, x, h)) = manoeuvre(a) {
            best = best.min(to_goal(x, h));
        }
        // the line may be met part way round the turn
        if let Some(a_hit) = first_crossing(|a| manoeuvre(a).is_none(), 0.0, TAU, 720) {
            let c = p.position() + Vec2::new(-p.theta().sin(), p.theta().cos()) * (dir * r);
            let h = p.theta() + dir * a_hit;
            let q = c + Vec2::new(h.sin(), -h.cos()) * (dir * r);
            if (q.y - gy).abs() < 1e-9 {
                best = best.min(to_goal(q.x, h));
            }
        }
    }
    best
}

/// Smallest `t` in `[a, b]` (to rounding) where `blocked` switches from false
/// to true while the turn is still rising toward the line.
fn first_crossing(blocked: impl Fn(f64) -> bool, a: f64, b: f64, n: usize) -> Option<f64> {
    let h = (b - a) / n as f64;
    let mut prev = a;
    if blocked(a) {
        return None;
    }
    for i in 1..=n {
        let t = a + i as f64 * h;
        if blocked(t) {
            let (mut lo, mut hi) = (prev, t);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if blocked(mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Some(lo);
        }
        prev = t;
    }
    None
}

fn argmin_scan_then_refine(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize, tol: f64) -> f64 {
    let h = (b - a) / n as f64;
    let (mut best_v, mut best_t) = (f64::INFINITY, a);
    for i in 0..=n {
        let t = a + i as f64 * h;
        let v = f(t);
        if v < best_v {
            (best_v, best_t) = (v, t);
        }
    }
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = ((best_t - h).max(a), (best_t + h).min(b));
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > tol {
        if fc < fd {
            hi = d;
            (d, fd) = (c, fc);
            c = hi - g * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            (c, fc) = (d, fd);
            d = lo + g * (hi - lo);
            fd = f(d);
        }
    }
    [(best_v, best_t), (fc, c), (fd, d)]
        .into_iter()
        .min_by(|x, y| x.0.total_cmp(&y.0))
        .unwrap()
        .1
}

/// Minimum of `f` on `[a, b]`: best of `n + 1` evenly spaced samples, then
/// golden section on the bracket around it down to width `tol`.
fn scan_then_refine(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize, tol: f64) -> f64 {
    let h = (b - a) / n as f64;
    let (mut best_v, mut best_t) = (f64::INFINITY, a);
    for i in 0..=n {
        let t = a + i as f64 * h;
        let v = f(t);
        if v < best_v {
            (best_v, best_t) = (v, t);
        }
    }
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (best_t - h, best_t + h);
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > tol {
        if fc < fd {
            hi = d;
            (d, fd) = (c, fc);
            c = hi - g * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            (c, fc) = (d, fd);
            d = lo + g * (hi - lo);
            fd = f(d);
        }
    }
    best_v.min(fc).min(fd)
}

/// Random scenario on a 20 m × 20 m channel.
pub fn toy_scenario(concentration: f64, seed: u64) -> Scenario {
    let params = ScenarioParams {
        channel: Channel {
            width: 20.0,
            length: 20.0,
            goal_y: 18.0,
        },
        limits: FloeLimits {
            y_min: 4.0,
            y_max: 18.0,
            ..FloeLimits::default()
        },
        ..ScenarioParams::default()
    };
    generate_scenario(concentration, seed, &params).expect("toy scenario generates")
}

/// Area of the intersection of `poly` with the square cell at `center`.
pub fn cell_overlap_area(poly: &ConvexPolygon, center: Vec2, size: f64) -> f64 {
    let cell = ConvexPolygon::rectangle(size, size).unwrap().translated(center);
    let ring = poly.clip(&cell);
    if ring.len() < 3 {
        return 0.0;
    }
    icenav::geometry::signed_area(&ring).abs()
}

pub fn open_world(start: Pose, speed: f64) -> World {
    let s = Scenario {
        seed: 0,
        concentration: 0.0,
        channel: Channel {
            width: 60.0,
            length: 60.0,
            goal_y: 55.0,
        },
        limits: FloeLimits::default(),
        ship_mass: 10.0,
        start_pose: start,
        floes: vec![],
    };
    World::new(&s, SimParams::default(), speed).unwrap()
}

/// Runs the tracker on `traj` from `world` until the ship passes the path end;
/// returns per-step cross-track errors.
pub fn follow(world: &mut World, traj: &Trajectory, max_steps: usize) -> Vec<f64> {
    let tracker = Tracker::new(TrackerParams::default());
    let mut progress = 0.0;
    let mut errors = Vec::new();
    for _ in 0..max_steps {
        let cmd = tracker.track(traj, &world.ship, progress);
        progress = cmd.progress;
        if progress >= traj.path.length() {
            break;
        }
        errors.push(cross_track_error(traj, &world.ship.pose));
        world.step(cmd.rudder, cmd.thrust).unwrap();
    }
    errors
}

/// Textbook Dijkstra over the lattice graph, vertices keyed by grid
/// coordinates, same edge weights and bounds as the planner.
pub fn dijkstra_oracle(q: &PlanQuery, map: &Costmap, cs: &ControlSet, alpha: f64) -> f64 {
    let (ci0, cj0) = map.cell_index(q.start.position());
    let ih0 = icenav::planner::snap_heading(q.start.theta());
    let mut dist: HashMap<(i32, i32, u8), f64> = HashMap::new();
    let mut heap = BinaryHeap::new();
    let key = |d: f64| Reverse(ordered(d));
    dist.insert((0, 0, ih0), 0.0);
    heap.push((key(0.0), (0, 0, ih0)));
    let max_iy = ((q.goal_y - q.start.y) - 1e-9).ceil() as i32 + 5;
    while let Some((Reverse(dk), v)) = heap.pop() {
        let d = f64::from_bits(dk);
        if d > dist[&v] {
            continue;
        }
        if q.start.y + v.1 as f64 >= q.goal_y - 1e-9 {
            return d;
        }
        for prim in cs.primitives(v.2) {
            let w = (
                v.0 + prim.displacement.0,
                v.1 + prim.displacement.1,
                (v.2 + prim.displacement.2) % HEADINGS,
            );
            let x = q.start.x + w.0 as f64;
            if x < q.x_range.0 - 1e-9 || x > q.x_range.1 + 1e-9 || w.1 > max_iy {
                continue;
            }
            let mut ice = 0.0;
            let mut ok = true;
            for &(oi, oj) in &prim.swath_offsets {
                match map.cost_checked(ci0 + 4 * v.0 as i64 + oi as i64, cj0 + 4 * v.1 as i64 + oj as i64) {
                    Some(c) => ice += c,
                    None => ok = false,
                }
            }
            if !ok {
                continue;
            }
            let nd = d + prim.arc_length + alpha * ice;
            if dist.get(&w).is_none_or(|&b| nd < b) {
                dist.insert(w, nd);
                heap.push((key(nd), w));
            }
        }
    }
    f64::INFINITY
}

/// Nonnegative floats order like their bit patterns.
pub fn ordered(d: f64) -> u64 {
    assert!(d >= 0.0);
    d.to_bits()
}
