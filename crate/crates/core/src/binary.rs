//! Binary-system presets and every derived scale quantity: the dimensionless
//! kick, the chaos border, and the "dark-matter atom" units (Bohr radius,
//! atomic energy/frequency, quantum kick strength `k`, photon numbers).

use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};

/// One harmonic of the kick function `F(phi) = sum_j a_j sin(j phi + theta_j)`
/// in dimensionless energy units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Harmonic {
    /// Harmonic index `j` (>= 1).
    pub index: u32,
    /// Amplitude `a_j`.
    pub amplitude: f64,
    /// Phase offset `theta_j`, radians.
    #[serde(default)]
    pub phase: f64,
}

impl Harmonic {
    pub fn sine(amplitude: f64) -> Self {
        Harmonic {
            index: 1,
            amplitude,
            phase: 0.0,
        }
    }
}

/// A rotating binary: a heavy central mass and a light companion on a circular
/// orbit. The sole source of physical scale for everything downstream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinarySystem {
    pub name: String,
    /// Central mass `M`, kg.
    pub central_mass: f64,
    /// Companion (planet) mass `m_p`, kg.
    pub planet_mass: f64,
    /// Orbit radius `r_p`, m.
    pub orbit_radius: f64,
    /// Orbit velocity `v_p`, m/s.
    pub orbit_velocity: f64,
    /// Orbital period `T_p`, yr.
    pub period_yr: f64,
    /// Maximal kick amplitude `f0` (dimensionless).
    pub kick_amplitude: f64,
    /// Relative kick harmonics (unit overall scale; the physical kick is
    /// `2 f0 (m_p/M)` times this shape). Default: single `sin(phi)`.
    pub kick_harmonics: Vec<Harmonic>,
    /// Empirical chaos border for multi-harmonic kicks, when known from
    /// simulations rather than the analytic border formula.
    #[serde(default)]
    pub chaos_border_empirical: Option<f64>,
}

/// Maximum allowed companion-to-central mass ratio.
pub const MAX_MASS_RATIO: f64 = 0.1;
/// Relative tolerance on the (r_p, v_p, T_p) consistency chain.
pub const ORBIT_CONSISTENCY_TOL: f64 = 1e-3;

impl BinarySystem {
    /// Build a system from orbital elements. Exactly two of
    /// (`orbit_radius`, `orbit_velocity`, `period_yr`) may be given and the
    /// third is derived; if all three are given they must agree to
    /// [`ORBIT_CONSISTENCY_TOL`].
    #[allow(clippy::too_many_arguments)]
    pub fn from_elements(
        name: impl Into<String>,
        constants: &PhysicalConstants,
        central_mass: f64,
        planet_mass: f64,
        orbit_radius: Option<f64>,
        orbit_velocity: Option<f64>,
        period_yr: Option<f64>,
        kick_amplitude: f64,
    ) -> Result<Self> {
        let name = name.into();
        let (r, v, t_yr) = match (orbit_radius, orbit_velocity, period_yr) {
            (Some(r), Some(v), maybe_t) => {
                let t_derived = std::f64::consts::TAU * r / v / constants.year;
                if let Some(t) = maybe_t {
                    if ((t - t_derived) / t).abs() >= ORBIT_CONSISTENCY_TOL {
                        return Err(Error::Config(format!(
                            "inconsistent orbit for {name}: period {t} yr vs 2*pi*r/v = {t_derived} yr"
                        )));
                    }
                    (r, v, t)
                } else {
                    (r, v, t_derived)
                }
            }
            (Some(r), None, Some(t)) => {
                let v = std::f64::consts::TAU * r / (t * constants.year);
                (r, v, t)
            }
            (None, Some(v), Some(t)) => {
                let r = v * t * constants.year / std::f64::consts::TAU;
                (r, v, t)
            }
            _ => {
                return Err(Error::Config(format!(
                    "system {name}: need at least two of orbit_radius, orbit_velocity, period_yr"
                )))
            }
        };
        let system = BinarySystem {
            name,
            central_mass,
            planet_mass,
            orbit_radius: r,
            orbit_velocity: v,
            period_yr: t_yr,
            kick_amplitude,
            kick_harmonics: vec![Harmonic::sine(1.0)],
            chaos_border_empirical: None,
        };
        system.validate(constants)?;
        Ok(system)
    }

    pub fn validate(&self, constants: &PhysicalConstants) -> Result<()> {
        if !(self.central_mass > 0.0 && self.planet_mass > 0.0) {
            return Err(Error::Config(format!("system {}: masses must be positive", self.name)));
        }
        let ratio = self.planet_mass / self.central_mass;
        if ratio > MAX_MASS_RATIO {
            return Err(Error::Config(format!(
                "system {}: m_p/M = {ratio} exceeds {MAX_MASS_RATIO}; the map description needs m_p << M",
                self.name
            )));
        }
        if !(self.kick_amplitude > 0.0) {
            return Err(Error::Config(format!("system {}: f0 must be positive", self.name)));
        }
        if !(self.orbit_radius > 0.0 && self.orbit_velocity > 0.0 && self.period_yr > 0.0) {
            return Err(Error::Config(format!("system {}: orbit must be positive", self.name)));
        }
        let t_derived = std::f64::consts::TAU * self.orbit_radius / self.orbit_velocity / constants.year;
        if ((self.period_yr - t_derived) / self.period_yr).abs() >= ORBIT_CONSISTENCY_TOL {
            return Err(Error::Config(format!(
                "system {}: period {} yr inconsistent with 2*pi*r/v = {t_derived} yr",
                self.name, self.period_yr
            )));
        }
        if self.kick_harmonics.is_empty() {
            return Err(Error::Config(format!("system {}: kick needs at least one harmonic", self.name)));
        }
        Ok(())
    }

    /// Companion mass ratio `m_p/M`.
    pub fn mass_ratio(&self) -> f64 {
        self.planet_mass / self.central_mass
    }

    /// Orbital angular frequency `omega_p = v_p/r_p`, 1/s.
    pub fn omega_p(&self) -> f64 {
        self.orbit_velocity / self.orbit_radius
    }

    /// Orbital period in seconds, from r and v.
    pub fn period_seconds(&self) -> f64 {
        std::f64::consts::TAU / self.omega_p()
    }

    /// Kick harmonics scaled to absolute dimensionless-energy amplitudes,
    /// i.e. multiplied by `epsilon = 2 f0 m_p/M`.
    pub fn scaled_harmonics(&self) -> Vec<Harmonic> {
        let eps = epsilon(self);
        self.kick_harmonics
            .iter()
            .map(|h| Harmonic {
                index: h.index,
                amplitude: eps * h.amplitude,
                phase: h.phase,
            })
            .collect()
    }
}

/// Dark-matter-particle spec: mass ratio to the electron and initial
/// dimensionless energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DmpSpec {
    /// `mu = m_d/m_e`, > 0.
    pub mass_ratio: f64,
    /// Initial dimensionless energy `w_0 = 2E/(m_d v_p^2)`, <= 0.
    pub initial_w: f64,
}

impl DmpSpec {
    pub fn new(mass_ratio: f64) -> Self {
        DmpSpec {
            mass_ratio,
            initial_w: -1.0,
        }
    }

    pub fn with_initial_w(mass_ratio: f64, initial_w: f64) -> Result<Self> {
        let spec = DmpSpec {
            mass_ratio,
            initial_w,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass_ratio > 0.0) {
            return Err(Error::Config(format!(
                "DMP mass ratio must be positive, got {}",
                self.mass_ratio
            )));
        }
        if self.initial_w > 0.0 {
            return Err(Error::Config(format!(
                "initial w must be <= 0 (bound state), got {}",
                self.initial_w
            )));
        }
        Ok(())
    }
}

/// Derived dark-matter-atom units and quantum map parameters for one
/// (system, DMP) pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomicScales {
    /// Bohr radius of the dark-matter atom `a_Bd = hbar^2/(kappa m_d^2 M)`, m.
    pub bohr_radius: f64,
    /// Atomic energy `E_Bd = kappa m_d M / a_Bd`, eV.
    pub atomic_energy_ev: f64,
    /// Atomic frequency `omega_Bd = E_Bd/hbar`, 1/s.
    pub atomic_frequency: f64,
    /// Dimensionless planet frequency `omega = omega_p/omega_Bd`.
    pub dimensionless_frequency: f64,
    /// Quantum kick strength `k = 2 f0 (m_p/M) N_I(|w_0|=1)`, photons.
    pub kick_strength: f64,
    /// Photons required for ionization from `w_0`:
    /// `N_I = |w_0| m_d v_p^2/(2 hbar omega_p)`.
    pub ionization_photons: f64,
    /// Photons required to ionize the ground state `N_J = E_Bd/(2 hbar omega_p)`.
    pub ground_state_photons: f64,
}

/// Kick amplitude from the perihelion-distance formula
/// `f0 = 2 (r_p/q)^{1/4} exp(-0.94 (q/r_p)^{3/2})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerihelionKick {
    pub f0: f64,
    /// The formula is justified for `q > r_p`; set when `q < r_p`.
    pub outside_validity: bool,
}

pub fn kick_amplitude_from_perihelion(system: &BinarySystem, q: f64) -> Result<PerihelionKick> {
    if !(q > 0.0) {
        return Err(Error::Domain(format!("perihelion distance must be positive, got {q}")));
    }
    let x = q / system.orbit_radius;
    let f0 = 2.0 * x.powf(-0.25) * (-0.94 * x.powf(1.5)).exp();
    Ok(PerihelionKick {
        f0,
        outside_validity: x < 1.0,
    })
}

/// Dimensionless kick strength `epsilon = 2 f0 m_p/M` of the map.
pub fn epsilon(system: &BinarySystem) -> f64 {
    2.0 * system.kick_amplitude * system.mass_ratio()
}

/// Analytic chaos border `w_ch = 2.5 (2 f0 m_p/M)^{2/5}`.
pub fn chaos_border(system: &BinarySystem) -> f64 {
    2.5 * epsilon(system).powf(0.4)
}

/// Chaos border preferring the empirical multi-harmonic value when a preset
/// carries one.
pub fn effective_chaos_border(system: &BinarySystem) -> f64 {
    system.chaos_border_empirical.unwrap_or_else(|| chaos_border(system))
}

/// All derived dark-matter-atom quantities for a (system, DMP) pair.
pub fn atomic_scales(
    system: &BinarySystem,
    dmp: &DmpSpec,
    constants: &PhysicalConstants,
) -> Result<AtomicScales> {
    dmp.validate()?;
    let kappa = constants.gravitational_constant;
    let hbar = constants.hbar;
    let m_d = dmp.mass_ratio * constants.electron_mass;
    let big_m = system.central_mass;
    let omega_p = system.omega_p();

    let bohr_radius = hbar * hbar / (kappa * m_d * m_d * big_m);
    let atomic_energy_j = kappa * m_d * big_m / bohr_radius;
    let atomic_frequency = atomic_energy_j / hbar;

    // N_I at |w_0| = 1; the reported value scales with |w_0|, while the kick
    // strength k is defined at the reference depth |w_0| = 1.
    let n_i_unit = m_d * system.orbit_velocity.powi(2) / (2.0 * hbar * omega_p);
    Ok(AtomicScales {
        bohr_radius,
        atomic_energy_ev: atomic_energy_j / constants.electronvolt,
        atomic_frequency,
        dimensionless_frequency: omega_p / atomic_frequency,
        kick_strength: 2.0 * system.kick_amplitude * system.mass_ratio() * n_i_unit,
        ionization_photons: n_i_unit * dmp.initial_w.abs(),
        ground_state_photons: atomic_energy_j / (2.0 * hbar * omega_p),
    })
}

/// Names of the shipped presets.
pub const PRESET_NAMES: [&str; 4] = ["sun-jupiter", "sun-jupiter-weak", "halley-kick", "sgrA-s2"];

/// Look up a shipped binary-system preset by (case-insensitive) name.
pub fn preset(name: &str, constants: &PhysicalConstants) -> Result<BinarySystem> {
    let jupiter = |f0: f64, name: &str| {
        BinarySystem::from_elements(
            name,
            constants,
            constants.solar_mass,
            constants.solar_mass / 1047.0,
            Some(7.78e11),
            Some(1.31e4),
            None,
            f0,
        )
    };
    match name.to_ascii_lowercase().as_str() {
        "sun-jupiter" => jupiter(2.5, "sun-jupiter"),
        "sun-jupiter-weak" => {
            let mut sys = jupiter(2.5, "sun-jupiter-weak")?;
            // f0 from the perihelion formula at q = r_p
            let kick = kick_amplitude_from_perihelion(&sys, sys.orbit_radius)?;
            sys.kick_amplitude = kick.f0;
            Ok(sys)
        }
        "halley-kick" => {
            let mut sys = jupiter(2.5, "halley-kick")?;
            // empirical border from multi-harmonic Halley simulations
            sys.chaos_border_empirical = Some(0.45);
            Ok(sys)
        }
        "sgra-s2" => BinarySystem::from_elements(
            "sgrA-s2",
            constants,
            4.0e6 * constants.solar_mass,
            15.0 * constants.solar_mass,
            Some(980.0 * constants.astronomical_unit),
            None,
            Some(15.0),
            2.5,
        ),
        other => Err(Error::Config(format!(
            "unknown preset '{other}'; available: {}",
            PRESET_NAMES.join(", ")
        ))),
    }
}
