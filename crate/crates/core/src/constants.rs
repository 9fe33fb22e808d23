//! Physical constants (CODATA-2018 microscopic constants, IAU astronomical
//! scales) plus the galactic dark-matter environment parameters used by the
//! capture estimates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The full set of dimensional constants entering the toolkit. All fields are
/// strictly positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// Gravitational constant, m^3 kg^-1 s^-2.
    pub gravitational_constant: f64,
    /// Reduced Planck constant, J s.
    pub hbar: f64,
    /// Electron mass, kg.
    pub electron_mass: f64,
    /// Solar mass, kg.
    pub solar_mass: f64,
    /// Julian year, s.
    pub year: f64,
    /// Astronomical unit, m.
    pub astronomical_unit: f64,
    /// Electronvolt, J.
    pub electronvolt: f64,
    /// Age of the universe, yr.
    pub universe_age_yr: f64,
    /// Galactic dark-matter mass density, g/cm^3.
    pub galactic_dm_density: f64,
    /// Galactic velocity scale of the Maxwell flow, m/s.
    pub galactic_velocity_scale: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        PhysicalConstants {
            gravitational_constant: 6.674_30e-11,
            hbar: 1.054_571_817e-34,
            electron_mass: 9.109_383_701_5e-31,
            solar_mass: 1.988_92e30,
            year: 3.155_76e7,
            astronomical_unit: 1.495_978_707e11,
            electronvolt: 1.602_176_634e-19,
            universe_age_yr: 1.38e10,
            galactic_dm_density: 4.0e-25,
            galactic_velocity_scale: 2.2e5,
        }
    }
}

impl PhysicalConstants {
    /// Check that every constant is strictly positive.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("gravitational_constant", self.gravitational_constant),
            ("hbar", self.hbar),
            ("electron_mass", self.electron_mass),
            ("solar_mass", self.solar_mass),
            ("year", self.year),
            ("astronomical_unit", self.astronomical_unit),
            ("electronvolt", self.electronvolt),
            ("universe_age_yr", self.universe_age_yr),
            ("galactic_dm_density", self.galactic_dm_density),
            ("galactic_velocity_scale", self.galactic_velocity_scale),
        ];
        for (name, v) in fields {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!(
                    "constant {name} must be strictly positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        PhysicalConstants::default().validate().unwrap();
    }

    #[test]
    fn rejects_nonpositive() {
        let mut c = PhysicalConstants::default();
        c.hbar = 0.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn environment_defaults_match_documented_values() {
        let c = PhysicalConstants::default();
        assert_eq!(c.universe_age_yr, 1.38e10);
        assert_eq!(c.galactic_dm_density, 4.0e-25);
        assert_eq!(c.galactic_velocity_scale, 2.2e5);
    }
}
