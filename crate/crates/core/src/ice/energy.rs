//! Kinetic energy exchanged when the ship strikes a floe, both bodies
//! treated as disks and the floe at rest before contact.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EnergyError {
    #[error("lateral offset {d} outside [0, r = {r}]")]
    OffsetOutOfRange { d: f64, r: f64 },
    #[error("invalid collision parameter: {0}")]
    InvalidParameter(&'static str),
}

/// Relative slack allowed on `d > r` before it is treated as an error.
const OFFSET_TOLERANCE: f64 = 1e-9;

/// `m_S m_I / (m_S + m_I)`.
pub fn effective_mass(ship_mass: f64, ice_mass: f64) -> f64 {
    ship_mass * ice_mass / (ship_mass + ice_mass)
}

/// Normal component of the ship velocity for collision angle `theta`.
pub fn effective_velocity(ship_speed: f64, theta: f64) -> f64 {
    ship_speed * theta.cos()
}

/// Energy dissipated by the pair, `½ M_eq V_eq²`.
pub fn system_energy_loss(ship_mass: f64, ice_mass: f64, v_eq: f64) -> f64 {
    0.5 * effective_mass(ship_mass, ice_mass) * v_eq * v_eq
}

/// Energy picked up by the floe if it leaves with velocity `v_eq`.
pub fn ice_energy_gain(ice_mass: f64, v_eq: f64) -> f64 {
    0.5 * ice_mass * v_eq * v_eq
}

/// Ship energy loss for a given normal approach speed:
/// `m_I² V_eq² / (2 (m_S + m_I))`.
pub fn ship_energy_loss(ship_mass: f64, ice_mass: f64, v_eq: f64) -> f64 {
    ice_mass * ice_mass * v_eq * v_eq / (2.0 * (ship_mass + ice_mass))
}

/// Ship kinetic energy lost when striking a floe of bounding radius `r`
/// with lateral offset `d` between the contact point and the floe centre:
///
/// `ΔK_S = v_S² m_I² / (2 (m_S + m_I)) · (r² − d²) / r²`
///
/// Offsets marginally above `r` (rounding) are clamped to `r`.
pub fn kinetic_energy_loss(d: f64, r: f64, ice_mass: f64, ship_mass: f64, ship_speed: f64) -> Result<f64, EnergyError> {
    if !(r > 0.0) {
        return Err(EnergyError::InvalidParameter("radius must be positive"));
    }
    if !(ice_mass > 0.0) || !(ship_mass > 0.0) {
        return Err(EnergyError::InvalidParameter("masses must be positive"));
    }
    if !(ship_speed >= 0.0) {
        return Err(EnergyError::InvalidParameter("speed must be nonnegative"));
    }
    if !(d >= 0.0) || d > r * (1.0 + OFFSET_TOLERANCE) {
        return Err(EnergyError::OffsetOutOfRange { d, r });
    }
    Ok(kinetic_energy_loss_clamped(d, r, ice_mass, ship_mass, ship_speed))
}

/// As [`kinetic_energy_loss`], with `r² − d²` clamped at zero instead of
/// rejecting `d > r`. Used for costmap cells that touch a floe but whose
/// centre lies outside its bounding circle.
pub fn kinetic_energy_loss_clamped(d: f64, r: f64, ice_mass: f64, ship_mass: f64, ship_speed: f64) -> f64 {
    let head_on = ship_speed * ship_speed * ice_mass * ice_mass / (2.0 * (ship_mass + ice_mass));
    let frac = ((r * r - d * d) / (r * r)).max(0.0);
    head_on * frac
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grazing_contact_costs_nothing() {
        assert_eq!(kinetic_energy_loss(1.5, 1.5, 2.0, 10.0, 1.0), Ok(0.0));
    }

    #[test]
    fn head_on_example() {
        // ΔK_I = ½·2·1 = 1, ΔK_sys = ½·(20/12)·1 = 5/6, ΔK_S = 1/6
        let k = kinetic_energy_loss(0.0, 1.0, 2.0, 10.0, 1.0).unwrap();
        assert!((k - 1.0 / 6.0).abs() < 1e-15);
        let via_split = ice_energy_gain(2.0, 1.0) - system_energy_loss(10.0, 2.0, 1.0);
        assert!((k - via_split).abs() < 1e-15);
    }

    #[test]
    fn zero_speed_zero_energy() {
        assert_eq!(kinetic_energy_loss(0.3, 1.0, 5.0, 90.0, 0.0), Ok(0.0));
    }

    #[test]
    fn offset_outside_radius_is_rejected() {
        assert!(matches!(
            kinetic_energy_loss(1.1, 1.0, 2.0, 10.0, 1.0),
            Err(EnergyError::OffsetOutOfRange { .. })
        ));
        assert!(kinetic_energy_loss(-0.1, 1.0, 2.0, 10.0, 1.0).is_err());
        // rounding-level excess is clamped
        assert_eq!(kinetic_energy_loss(1.0 + 1e-12, 1.0, 2.0, 10.0, 1.0), Ok(0.0));
        assert_eq!(kinetic_energy_loss_clamped(3.0, 1.0, 2.0, 10.0, 1.0), 0.0);
    }

    #[test]
    fn rejects_bad_masses() {
        assert!(kinetic_energy_loss(0.0, 1.0, 0.0, 10.0, 1.0).is_err());
        assert!(kinetic_energy_loss(0.0, 1.0, 1.0, -1.0, 1.0).is_err());
        assert!(kinetic_energy_loss(0.0, 1.0, 1.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn monotone_in_offset_quadratic_in_speed() {
        let mut prev = f64::INFINITY;
        for i in 0..=20 {
            let d = i as f64 * 0.1;
            let k = kinetic_energy_loss(d, 2.0, 3.0, 9.0, 0.7).unwrap();
            assert!(k <= prev);
            prev = k;
            let k2 = kinetic_energy_loss(d, 2.0, 3.0, 9.0, 1.4).unwrap();
            assert!((k2 - 4.0 * k).abs() <= 1e-15 * k2.max(1.0));
        }
    }
}
