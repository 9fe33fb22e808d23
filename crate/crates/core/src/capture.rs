//! Capture of galactic DMPs by the binary: cross-section, quantum-limited
//! energy border, halo extent, and the Maxwell-flow captured-mass estimate.

use serde::{Deserialize, Serialize};

use crate::binary::{atomic_scales, effective_chaos_border, BinarySystem, DmpSpec};
use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};

/// Capture cross-section `sigma = 8 pi r_p^2 (v_p/v)^2`, m^2. Diverges as
/// `v -> 0`; reported raw.
pub fn capture_cross_section(system: &BinarySystem, v: f64) -> Result<f64> {
    if !(v > 0.0) {
        return Err(Error::Domain(format!("capture cross-section needs v > 0, got {v}")));
    }
    let ratio = system.orbit_velocity / v;
    Ok(8.0 * std::f64::consts::PI * system.orbit_radius.powi(2) * ratio * ratio)
}

/// Quantum-limited energy border `w_q = 2 hbar omega_p ell_phi / (m_d v_p^2)
/// = ell_phi / N_I`, clamped below by its value at the one-photon border
/// (`2 f0^2 (m_p/M)^2`) and above by the chaos border.
pub fn quantum_energy_border(
    system: &BinarySystem,
    dmp: &DmpSpec,
    constants: &PhysicalConstants,
) -> Result<f64> {
    let s = atomic_scales(system, &DmpSpec::new(dmp.mass_ratio), constants)?;
    let ell = s.kick_strength.powi(2) / 2.0;
    let raw = ell / s.ionization_photons;
    let eps = crate::binary::epsilon(system);
    let floor = eps * eps / 2.0; // value of ell/N_I at N_I = 1
    Ok(raw.clamp(floor, effective_chaos_border(system)))
}

/// Halo extent in units of `r_p`: chaotic diffusion fills orbits down to the
/// chaos border (`r_h ~ r_p/w_ch`); below the delocalization border the
/// localized quantum dynamics only reaches `w_q`, extending the halo to
/// `r_p/w_q`.
pub fn halo_radius(
    system: &BinarySystem,
    dmp: &DmpSpec,
    constants: &PhysicalConstants,
) -> Result<f64> {
    let s = atomic_scales(system, &DmpSpec::new(dmp.mass_ratio), constants)?;
    let ell = s.kick_strength.powi(2) / 2.0;
    if ell >= s.ionization_photons {
        Ok(1.0 / effective_chaos_border(system))
    } else {
        Ok(1.0 / quantum_energy_border(system, dmp, constants)?)
    }
}

/// Normalized speed distribution of the galactic DMP flow,
/// `f(v) = sqrt(432/pi) v^2/u^3 exp(-3 v^2/u^2)`; mode at `u/sqrt(3)`,
/// `<v^2> = u^2/2`.
pub fn maxwell_speed_pdf(u: f64, v: f64) -> Result<f64> {
    if !(u > 0.0) {
        return Err(Error::Domain(format!("velocity scale must be positive, got {u}")));
    }
    if v < 0.0 {
        return Err(Error::Domain(format!("speed must be nonnegative, got {v}")));
    }
    let c = (432.0 / std::f64::consts::PI).sqrt() / u.powi(3);
    Ok(c * v * v * (-3.0 * v * v / (u * u)).exp())
}

/// Fraction of the Maxwell flow with speed below `v_cut` (Simpson rule).
pub fn maxwell_fraction_below(u: f64, v_cut: f64) -> Result<f64> {
    if v_cut <= 0.0 {
        return Ok(0.0);
    }
    let panels = 4000usize;
    let h = v_cut / panels as f64;
    let mut sum = maxwell_speed_pdf(u, 0.0)? + maxwell_speed_pdf(u, v_cut)?;
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * maxwell_speed_pdf(u, i as f64 * h)?;
    }
    Ok((sum * h / 3.0).min(1.0))
}

/// Captured-mass estimate and its quantum bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapturedMass {
    /// `M_cap ~ 100 (v_p/u)^3 (m_p/M) rho_g r_p^2 v_p t`, grams, after the
    /// quantum reduction.
    pub grams: f64,
    /// `min(1, t_q/t)`: the fraction of the accumulation time during which
    /// localized dynamics still transports probability downward.
    pub reduction_factor: f64,
    /// Set when `k < 1`: only flow energies below one photon can be captured.
    pub one_photon_energy_cut: bool,
    /// Fraction of the Maxwell flow passing the one-photon energy cut
    /// (diagnostic; not folded into `grams`).
    pub energy_cut_fraction: f64,
}

/// Captured DMP mass accumulated over `t_years`. In the localized regime
/// (`ell_phi < N_I`) accumulation saturates after the quantum relaxation time
/// `t_q = T_p ell_phi`, reducing the estimate by `t_q/t`.
pub fn captured_mass(
    system: &BinarySystem,
    dmp: &DmpSpec,
    constants: &PhysicalConstants,
    t_years: f64,
) -> Result<CapturedMass> {
    if !(t_years > 0.0) {
        return Err(Error::Domain(format!("accumulation time must be positive, got {t_years}")));
    }
    let u = constants.galactic_velocity_scale;
    // cgs evaluation: rho_g is g/cm^3, lengths in cm, speeds in cm/s
    let v_p_cgs = system.orbit_velocity * 100.0;
    let r_p_cgs = system.orbit_radius * 100.0;
    let t_s = t_years * constants.year;
    let base = 100.0
        * (system.orbit_velocity / u).powi(3)
        * system.mass_ratio()
        * constants.galactic_dm_density
        * r_p_cgs.powi(2)
        * v_p_cgs
        * t_s;

    let s = atomic_scales(system, &DmpSpec::new(dmp.mass_ratio), constants)?;
    let ell = s.kick_strength.powi(2) / 2.0;
    let reduction = if ell < s.ionization_photons {
        (system.period_yr * ell / t_years).min(1.0)
    } else {
        1.0
    };

    let cut = s.kick_strength < 1.0;
    let energy_cut_fraction = if cut {
        // capture needs E = m_d v^2/2 < hbar omega_p
        let m_d = dmp.mass_ratio * constants.electron_mass;
        let v_cut = (2.0 * constants.hbar * system.omega_p() / m_d).sqrt();
        maxwell_fraction_below(u, v_cut)?
    } else {
        1.0
    };

    Ok(CapturedMass {
        grams: base * reduction,
        reduction_factor: reduction,
        one_photon_energy_cut: cut,
        energy_cut_fraction,
    })
}

/// Full capture summary for one (system, DMP) pair, JSON-serializable with
/// units spelled out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaptureReport {
    pub system: String,
    pub mass_ratio: f64,
    pub sigma_at_vp_m2: f64,
    pub sigma_at_u_m2: f64,
    pub w_q: f64,
    pub halo_radius_rp: f64,
    pub m_cap_grams: f64,
    pub reduction_factor: f64,
    pub one_photon_energy_cut: bool,
    pub energy_cut_fraction: f64,
    pub accumulation_time_years: f64,
    pub units: CaptureUnits,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaptureUnits {
    pub sigma: String,
    pub w_q: String,
    pub halo_radius: String,
    pub m_cap: String,
}

impl Default for CaptureUnits {
    fn default() -> Self {
        CaptureUnits {
            sigma: "m^2".into(),
            w_q: "dimensionless (2E/(m_d v_p^2))".into(),
            halo_radius: "orbit radii r_p".into(),
            m_cap: "g".into(),
        }
    }
}

pub fn capture_report(
    system: &BinarySystem,
    dmp: &DmpSpec,
    constants: &PhysicalConstants,
    t_years: f64,
) -> Result<CaptureReport> {
    let cap = captured_mass(system, dmp, constants, t_years)?;
    Ok(CaptureReport {
        system: system.name.clone(),
        mass_ratio: dmp.mass_ratio,
        sigma_at_vp_m2: capture_cross_section(system, system.orbit_velocity)?,
        sigma_at_u_m2: capture_cross_section(system, constants.galactic_velocity_scale)?,
        w_q: quantum_energy_border(system, dmp, constants)?,
        halo_radius_rp: halo_radius(system, dmp, constants)?,
        m_cap_grams: cap.grams,
        reduction_factor: cap.reduction_factor,
        one_photon_energy_cut: cap.one_photon_energy_cut,
        energy_cut_fraction: cap.energy_cut_fraction,
        accumulation_time_years: t_years,
        units: CaptureUnits::default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binary::preset;
    use crate::regime::{delocalization_border, one_photon_border};

    fn consts() -> PhysicalConstants {
        PhysicalConstants::default()
    }

    fn jupiter() -> BinarySystem {
        preset("sun-jupiter", &consts()).unwrap()
    }

    #[test]
    fn cross_section_exact_points() {
        let sys = jupiter();
        let at_vp = capture_cross_section(&sys, sys.orbit_velocity).unwrap();
        assert_eq!(at_vp, 8.0 * std::f64::consts::PI * sys.orbit_radius.powi(2));
        let at_2vp = capture_cross_section(&sys, 2.0 * sys.orbit_velocity).unwrap();
        assert!((at_2vp / (2.0 * std::f64::consts::PI * sys.orbit_radius.powi(2)) - 1.0).abs() < 1e-12);
        // 220 km/s galactic flow, in km^2
        let at_u = capture_cross_section(&sys, 2.2e5).unwrap() / 1e6;
        assert!((at_u / 5.4e16 - 1.0).abs() < 0.01, "sigma(220 km/s) = {at_u} km^2");
    }

    #[test]
    fn cross_section_rejects_nonpositive_v() {
        let sys = jupiter();
        assert!(capture_cross_section(&sys, 0.0).is_err());
        assert!(capture_cross_section(&sys, -1.0).is_err());
    }

    #[test]
    fn w_q_coefficient_and_clamps() {
        let c = consts();
        let sys = jupiter();
        // linear region coefficient
        let mu = 1e-17;
        let w = quantum_energy_border(&sys, &DmpSpec::new(mu), &c).unwrap();
        assert!((w / (5.0e14 * mu) - 1.0).abs() < 0.05, "w_q/mu = {}", w / mu);
        // below the one-photon border: frozen at 2 f0^2 (m_p/M)^2
        let w_lo = quantum_energy_border(&sys, &DmpSpec::new(1e-22), &c).unwrap();
        assert!((w_lo / 1.14e-5 - 1.0).abs() < 0.05, "w_q floor = {w_lo}");
        // above the delocalization border: chaos border
        let w_hi = quantum_energy_border(&sys, &DmpSpec::new(1e-13), &c).unwrap();
        assert_eq!(w_hi, effective_chaos_border(&sys));
    }

    #[test]
    fn w_q_continuous_at_clamp_points() {
        let c = consts();
        let sys = jupiter();
        let mu_1 = one_photon_border(&sys, &c).unwrap();
        let a = quantum_energy_border(&sys, &DmpSpec::new(mu_1 * 0.999), &c).unwrap();
        let b = quantum_energy_border(&sys, &DmpSpec::new(mu_1 * 1.001), &c).unwrap();
        assert!((a / b - 1.0).abs() < 0.05);
        // the upper clamp is a min of continuous functions: exact continuity
        let w_ch = effective_chaos_border(&sys);
        let mu_c = w_ch / 5.02e14; // where the linear form meets w_ch
        let lo = quantum_energy_border(&sys, &DmpSpec::new(mu_c * 0.999), &c).unwrap();
        let hi = quantum_energy_border(&sys, &DmpSpec::new(mu_c * 1.001), &c).unwrap();
        assert!((lo / hi - 1.0).abs() < 0.05);
    }

    #[test]
    fn halo_radius_regimes() {
        let c = consts();
        let sys = jupiter();
        // chaotic: 1/w_ch
        let r_cl = halo_radius(&sys, &DmpSpec::new(1e-13), &c).unwrap();
        assert!((r_cl * effective_chaos_border(&sys) - 1.0).abs() < 1e-12);
        assert!((r_cl - 3.39).abs() < 0.1, "classical r_h = {r_cl}");
        // localized: 1/w_q, larger than classical for all mu below the border
        let mu_star = delocalization_border(&sys, &c);
        for &mu in &[1e-21, 1e-19, 1e-17, 1e-16, 0.9 * mu_star] {
            let r_q = halo_radius(&sys, &DmpSpec::new(mu), &c).unwrap();
            assert!(r_q >= r_cl - 1e-9, "mu = {mu}: r_q = {r_q} < {r_cl}");
        }
        // deep quantum: 1/1.14e-5 ~ 8.8e4 r_p
        let r_deep = halo_radius(&sys, &DmpSpec::new(1e-22), &c).unwrap();
        assert!((r_deep / 8.77e4 - 1.0).abs() < 0.05, "deep r_h = {r_deep}");
    }

    #[test]
    fn maxwell_pdf_properties() {
        let u = 2.2e5;
        assert_eq!(maxwell_speed_pdf(u, 0.0).unwrap(), 0.0);
        // normalization by Simpson quadrature out to 8u
        let panels = 80_000usize;
        let h = 8.0 * u / panels as f64;
        let mut s = maxwell_speed_pdf(u, 0.0).unwrap() + maxwell_speed_pdf(u, 8.0 * u).unwrap();
        for i in 1..panels {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * maxwell_speed_pdf(u, i as f64 * h).unwrap();
        }
        let integral = s * h / 3.0;
        assert!((integral - 1.0).abs() < 1e-8, "integral = {integral}");
        // mode at u/sqrt(3)
        let mode = u / 3.0f64.sqrt();
        let f_mode = maxwell_speed_pdf(u, mode).unwrap();
        assert!(f_mode > maxwell_speed_pdf(u, mode * (1.0 + 1e-6)).unwrap());
        assert!(f_mode > maxwell_speed_pdf(u, mode * (1.0 - 1e-6)).unwrap());
        // second moment u^2/2
        let mut s2 = 0.0;
        for i in 1..panels {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            let v = i as f64 * h;
            s2 += w * v * v * maxwell_speed_pdf(u, v).unwrap();
        }
        let vsq = s2 * h / 3.0;
        assert!((vsq / (u * u / 2.0) - 1.0).abs() < 1e-6, "<v^2> = {vsq}");
    }

    #[test]
    fn maxwell_pdf_domain() {
        assert!(maxwell_speed_pdf(0.0, 1.0).is_err());
        assert!(maxwell_speed_pdf(1.0, -1.0).is_err());
    }

    #[test]
    fn maxwell_fraction_monotone() {
        let u = 2.2e5;
        assert_eq!(maxwell_fraction_below(u, 0.0).unwrap(), 0.0);
        let a = maxwell_fraction_below(u, 0.5 * u).unwrap();
        let b = maxwell_fraction_below(u, u).unwrap();
        let c = maxwell_fraction_below(u, 10.0 * u).unwrap();
        assert!(0.0 < a && a < b && b < c);
        assert!((c - 1.0).abs() < 1e-6);
    }

    #[test]
    fn captured_mass_classical_magnitude() {
        let c = consts();
        let sys = jupiter();
        // delocalized mu: no quantum reduction
        let cap = captured_mass(&sys, &DmpSpec::new(1e-13), &c, 1e7).unwrap();
        assert_eq!(cap.reduction_factor, 1.0);
        assert!(!cap.one_photon_energy_cut);
        assert!(cap.grams > 1e19 && cap.grams < 1e20, "M_cap = {} g", cap.grams);
        // linear in t
        let cap2 = captured_mass(&sys, &DmpSpec::new(1e-13), &c, 2e7).unwrap();
        assert!((cap2.grams / cap.grams - 2.0).abs() < 1e-12);
    }

    #[test]
    fn captured_mass_quantum_reduction() {
        let c = consts();
        let sys = jupiter();
        let mu = 1e-17; // localized
        let t = 1e7;
        let cap = captured_mass(&sys, &DmpSpec::new(mu), &c, t).unwrap();
        let classical = captured_mass(&sys, &DmpSpec::new(1e-13), &c, t).unwrap();
        let ell = atomic_scales(&sys, &DmpSpec::new(mu), &c).unwrap().kick_strength.powi(2) / 2.0;
        let expect = (sys.period_yr * ell / t).min(1.0);
        assert!((cap.reduction_factor / expect - 1.0).abs() < 1e-12);
        assert!((cap.grams / classical.grams / expect - 1.0).abs() < 1e-12);
        assert!(cap.reduction_factor < 1.0);
        // k > 1 at this mu: no energy cut
        assert!(!cap.one_photon_energy_cut);
        assert_eq!(cap.energy_cut_fraction, 1.0);
    }

    #[test]
    fn one_photon_energy_cut_below_k_unity() {
        let c = consts();
        let sys = jupiter();
        // k < 1 for mu < 4.76e-18: flag set, tiny passing fraction
        let cap = captured_mass(&sys, &DmpSpec::new(1e-18), &c, 1e7).unwrap();
        assert!(cap.one_photon_energy_cut);
        assert!(
            cap.energy_cut_fraction > 0.0 && cap.energy_cut_fraction < 1e-3,
            "fraction = {}",
            cap.energy_cut_fraction
        );
    }

    #[test]
    fn capture_report_round_trip() {
        let c = consts();
        let sys = jupiter();
        let rep = capture_report(&sys, &DmpSpec::new(1e-17), &c, 1e7).unwrap();
        let json = serde_json::to_string(&rep).unwrap();
        let back: CaptureReport = serde_json::from_str(&json).unwrap();
        assert_eq!(rep, back);
        assert!(rep.sigma_at_u_m2 > rep.sigma_at_vp_m2 * 0.001);
        assert_eq!(rep.units.m_cap, "g");
    }
}
