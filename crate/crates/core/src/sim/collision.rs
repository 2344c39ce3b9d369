use serde::{Deserialize, Serialize};

use crate::geometry::Vec2;
use crate::ice::{ice_energy_gain, ship_energy_loss, system_energy_loss};

/// One ship–floe collision and the energy it exchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionEvent {
    pub time: f64,
    pub floe_id: u32,
    pub contact_point: Vec2,
    /// Unit vector from the contact point toward the floe centroid.
    pub normal: Vec2,
    /// Angle between the relative velocity and `normal`, in `[0, π/2]`.
    pub theta_c: f64,
    /// Normal approach speed `V_eq = v cos θ`.
    pub v_eq: f64,
    /// Ship energy loss `m_I² V_eq² / (2 (m_S + m_I))`.
    pub delta_k_ship: f64,
    /// Energy dissipated by the pair, `½ M_eq V_eq²`.
    pub delta_k_sys: f64,
    /// Energy picked up by the floe, `½ m_I V_eq²`.
    pub delta_k_ice: f64,
    pub floe_mass: f64,
}

/// Outcome of the disk collision model for one contact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionResponse {
    pub v_eq: f64,
    pub theta_c: f64,
    pub delta_k_ship: f64,
    pub delta_k_sys: f64,
    pub delta_k_ice: f64,
    /// Velocity change of the floe, `V_eq` along the normal.
    pub floe_delta_v: Vec2,
    /// Ship surge speed after the collision.
    pub ship_speed_after: f64,
}

/// Disk collision between the ship (mass `ship_mass`, surge `ship_speed`)
/// and a floe, with `relative_velocity` the ship velocity minus the floe
/// velocity and `normal` the unit direction from contact point to floe
/// centroid. `None` unless the bodies approach along the normal.
///
/// The floe leaves with the normal approach speed; the ship loses
/// `m_I² V_eq² / (2 (m_S + m_I))` of kinetic energy, taken out of its surge.
/// Surge cannot drop below zero.
pub fn collision_response(
    ship_mass: f64,
    ship_speed: f64,
    ice_mass: f64,
    relative_velocity: Vec2,
    normal: Vec2,
) -> Option<CollisionResponse> {
    let v_eq = relative_velocity.dot(normal);
    if !(v_eq > 0.0) {
        return None;
    }
    let v = relative_velocity.norm();
    let theta_c = (v_eq / v).clamp(0.0, 1.0).acos();
    let delta_k_ship = ship_energy_loss(ship_mass, ice_mass, v_eq);
    let delta_k_sys = system_energy_loss(ship_mass, ice_mass, v_eq);
    let delta_k_ice = ice_energy_gain(ice_mass, v_eq);
    let ke_after = 0.5 * ship_mass * ship_speed * ship_speed - delta_k_ship;
    let ship_speed_after = (2.0 * ke_after.max(0.0) / ship_mass).sqrt();
    Some(CollisionResponse {
        v_eq,
        theta_c,
        delta_k_ship,
        delta_k_sys,
        delta_k_ice,
        floe_delta_v: normal * v_eq,
        ship_speed_after,
    })
}

/// Sum of ship energy loss over `events`.
pub fn total_ship_energy_loss(events: &[CollisionEvent]) -> f64 {
    events.iter().map(|e| e.delta_k_ship).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_3;

    #[test]
    fn oblique_example() {
        let n = Vec2::from_angle(FRAC_PI_3);
        let r = collision_response(10.0, 1.0, 2.0, Vec2::new(1.0, 0.0), n).unwrap();
        assert!((r.delta_k_ship - 1.0 / 24.0).abs() < 1e-15);
        assert!((r.theta_c - FRAC_PI_3).abs() < 1e-12);
    }

    #[test]
    fn grazing_and_separating_contacts_do_nothing() {
        assert!(collision_response(10.0, 1.0, 2.0, Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)).is_none());
        assert!(collision_response(10.0, 1.0, 2.0, Vec2::new(1.0, 0.0), Vec2::new(-1.0, 0.0)).is_none());
    }

    #[test]
    fn loss_beyond_ship_energy_stops_the_ship() {
        // m_I² V² / (2 (m_S + m_I)) grows with m_I and can exceed ½ m_S v²
        let r = collision_response(10.0, 1.0, 1e5, Vec2::new(1.0, 0.0), Vec2::new(1.0, 0.0)).unwrap();
        assert!((r.delta_k_ship - 1e10 / (2.0 * 100_010.0)).abs() < 1e-9);
        assert_eq!(r.ship_speed_after, 0.0);
        let r = collision_response(10.0, 1.0, 2.0, Vec2::new(1.0, 0.0), Vec2::new(1.0, 0.0)).unwrap();
        assert!((0.5 * 10.0 * r.ship_speed_after.powi(2) - (5.0 - 4.0 / 24.0)).abs() < 1e-12);
    }

    #[test]
    fn totals() {
        assert_eq!(total_ship_energy_loss(&[]), 0.0);
        let ev = |k| CollisionEvent {
            time: 0.0,
            floe_id: 0,
            contact_point: Vec2::ZERO,
            normal: Vec2::new(1.0, 0.0),
            theta_c: 0.0,
            v_eq: 0.0,
            delta_k_ship: k,
            delta_k_sys: 0.0,
            delta_k_ice: 0.0,
            floe_mass: 1.0,
        };
        assert!((total_ship_energy_loss(&[ev(0.1), ev(0.2)]) - 0.3).abs() < 1e-15);
    }
}
