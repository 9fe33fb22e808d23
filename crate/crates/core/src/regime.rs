//! Analytic regime classification on the photon lattice: localization
//! lengths, mass-ratio borders, piecewise ionization lifetimes (diffusive /
//! localized / multiphoton), and the summary-table generators.

use serde::{Deserialize, Serialize};

use crate::bessel::{bessel_j, ln_bessel_j_small_arg};
use crate::binary::{atomic_scales, BinarySystem, DmpSpec};
use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};

/// Largest photon number treated with the explicit multiphoton rate before
/// the general localized formula takes over.
pub const N_MAX_PHOTON: u32 = 3;

/// Relative slack when rounding `N_I` up to a photon count: an `N_I` within
/// this fraction above an integer still counts as that integer. Absorbs the
/// rounding of the published border coefficients (`N_I` at the nominal
/// one-photon border evaluates to 1.004 with full-precision constants).
pub const PHOTON_ROUNDING_SLACK: f64 = 0.02;

/// Default classical diffusive escape timescale, years (from Halley-map
/// simulations; an input, not derived here).
pub const DEFAULT_T_H_YEARS: f64 = 1e7;

/// Dynamical regime of a DMP on the photon lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// `N_I <= 1`: a single absorbed photon ionizes.
    OnePhoton,
    /// Ionization by `photons` quanta in one kick. `extrapolated` marks the
    /// region `N_I > 3`, `ell_phi < 1` where the same Bessel rate is used
    /// beyond its derivation.
    FewPhoton { photons: u32, extrapolated: bool },
    /// Anderson-localized diffusion: `1 < N_I`, `1 <= ell_phi < N_I`.
    Localized,
    /// `ell_phi >= N_I`: localization does not arrest the classical
    /// diffusive escape.
    ChaoticDelocalized,
}

impl Regime {
    pub fn label(&self) -> String {
        match self {
            Regime::OnePhoton => "one-photon".into(),
            Regime::FewPhoton { photons, extrapolated: false } => format!("{photons}-photon"),
            Regime::FewPhoton { photons, extrapolated: true } => {
                format!("{photons}-photon-extrapolated")
            }
            Regime::Localized => "localized".into(),
            Regime::ChaoticDelocalized => "chaotic-delocalized".into(),
        }
    }
}

/// Photon count needed to ionize: `N_I` rounded up with
/// [`PHOTON_ROUNDING_SLACK`], at least 1.
pub fn photon_count(n_i: f64) -> u32 {
    ((n_i * (1.0 - PHOTON_ROUNDING_SLACK)).ceil() as u32).max(1)
}

/// Localization length on the photon lattice, `ell_phi = k^2/2`.
pub fn localization_length(
    system: &BinarySystem,
    dmp: &DmpSpec,
    constants: &PhysicalConstants,
) -> Result<f64> {
    Ok(atomic_scales(system, dmp, constants)?.kick_strength.powi(2) / 2.0)
}

/// Mass ratio at which `ell_phi = N_I` (at the `w_0 = -1` reference depth):
/// `mu* = hbar omega_p (M/m_p)^2 / (f0^2 m_e v_p^2)`.
pub fn delocalization_border(system: &BinarySystem, constants: &PhysicalConstants) -> f64 {
    constants.hbar * system.omega_p() / (constants.electron_mass * system.orbit_velocity.powi(2))
        / (system.kick_amplitude * system.mass_ratio()).powi(2)
}

/// Mass ratio at which `N_I = 1`.
pub fn one_photon_border(system: &BinarySystem, constants: &PhysicalConstants) -> Result<f64> {
    let coef = atomic_scales(system, &DmpSpec::new(1.0), constants)?.ionization_photons;
    Ok(1.0 / coef)
}

/// Mass ratio at which the quantum kick strength `k = 1`.
pub fn k_unity_border(system: &BinarySystem, constants: &PhysicalConstants) -> Result<f64> {
    let coef = atomic_scales(system, &DmpSpec::new(1.0), constants)?.kick_strength;
    Ok(1.0 / coef)
}

/// Bessel `J_n(x)` restricted to the validated parameter box of the rate
/// formulas: `n <= 50`, `0 <= x <= 1e3`.
pub fn bessel_j_checked(n: u32, x: f64) -> Result<f64> {
    if n > 50 {
        return Err(Error::Domain(format!("bessel order {n} > 50; use the log-domain rate")));
    }
    if !(0.0..=1e3).contains(&x) {
        return Err(Error::Domain(format!("bessel argument {x} outside [0, 1e3]")));
    }
    bessel_j(n, x)
}

/// Localized-regime lifetime from the exponential steady-state tail:
/// `t_I = t_H exp(2 N_I/ell - 2)/(2 N_I/ell - 1)`. Valid for `ell >= 1` and
/// `N_I >= ell`; equals `t_H` exactly at the delocalization border.
pub fn localized_lifetime(t_h_years: f64, n_i: f64, ell_phi: f64) -> Result<f64> {
    if !(ell_phi >= 1.0) {
        return Err(Error::Domain(format!(
            "localized lifetime needs ell_phi >= 1, got {ell_phi}"
        )));
    }
    if !(n_i >= ell_phi) {
        return Err(Error::Domain(format!(
            "localized lifetime needs N_I >= ell_phi, got N_I = {n_i}, ell_phi = {ell_phi}"
        )));
    }
    let x = 2.0 * n_i / ell_phi;
    Ok(t_h_years * (x - 2.0).exp() / (x - 1.0))
}

/// `n`-photon ionization time in years: `1/Gamma_n` with
/// `Gamma_n = (omega_p/2pi) J_n(k)^2`, i.e. `T_p / J_n(k)^2`. Orders above 50
/// switch to the log-domain small-argument magnitude; overflow saturates to
/// infinity.
pub fn photon_lifetime_years(period_yr: f64, n: u32, k: f64) -> Result<f64> {
    if n <= 50 {
        let j = bessel_j_checked(n, k)?;
        if j == 0.0 {
            return Ok(f64::INFINITY);
        }
        Ok(period_yr / (j * j))
    } else {
        let ln_j = ln_bessel_j_small_arg(n, k)?;
        Ok((period_yr.ln() - 2.0 * ln_j).exp())
    }
}

/// Classify the dynamical regime from `(N_I, ell_phi)`.
pub fn classify_regime(n_i: f64, ell_phi: f64) -> Regime {
    if ell_phi >= n_i {
        return Regime::ChaoticDelocalized;
    }
    let n = photon_count(n_i);
    if n == 1 {
        Regime::OnePhoton
    } else if n <= N_MAX_PHOTON {
        Regime::FewPhoton { photons: n, extrapolated: false }
    } else if ell_phi >= 1.0 {
        Regime::Localized
    } else {
        Regime::FewPhoton { photons: n, extrapolated: true }
    }
}

/// Piecewise ionization time in years plus the mechanism behind it.
pub fn ionization_time(
    system: &BinarySystem,
    dmp: &DmpSpec,
    constants: &PhysicalConstants,
    t_h_years: f64,
) -> Result<(f64, Regime)> {
    if !(t_h_years > 0.0) {
        return Err(Error::Config(format!("t_H must be positive, got {t_h_years}")));
    }
    let scales = atomic_scales(system, dmp, constants)?;
    let n_i = scales.ionization_photons;
    let ell = scales.kick_strength.powi(2) / 2.0;
    let regime = classify_regime(n_i, ell);
    let t = match regime {
        Regime::ChaoticDelocalized => t_h_years,
        Regime::Localized => localized_lifetime(t_h_years, n_i, ell)?,
        Regime::OnePhoton => photon_lifetime_years(system.period_yr, 1, scales.kick_strength)?,
        Regime::FewPhoton { photons, .. } => {
            photon_lifetime_years(system.period_yr, photons, scales.kick_strength)?
        }
    };
    Ok((t, regime))
}

/// Quantum relaxation time to the localized steady state, years:
/// `t_q = T_p * ell_phi`.
pub fn quantum_relaxation_time(
    system: &BinarySystem,
    dmp: &DmpSpec,
    constants: &PhysicalConstants,
) -> Result<f64> {
    Ok(system.period_yr * localization_length(system, dmp, constants)?)
}

/// Full per-mass-ratio regime summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub mass_ratio: f64,
    pub ionization_photons: f64,
    pub localization_length: f64,
    pub kick_strength: f64,
    pub regime: Regime,
    /// Mass ratio at `N_I = 1`.
    pub one_photon_border_mu: f64,
    /// Mass ratio at `ell_phi = N_I`.
    pub delocalization_border_mu: f64,
    pub t_i_years: f64,
    pub t_q_years: f64,
    pub exceeds_universe_age: bool,
}

pub fn classify(
    system: &BinarySystem,
    dmp: &DmpSpec,
    constants: &PhysicalConstants,
    t_h_years: f64,
) -> Result<RegimeReport> {
    let scales = atomic_scales(system, dmp, constants)?;
    let ell = scales.kick_strength.powi(2) / 2.0;
    let (t_i, regime) = ionization_time(system, dmp, constants, t_h_years)?;
    Ok(RegimeReport {
        mass_ratio: dmp.mass_ratio,
        ionization_photons: scales.ionization_photons,
        localization_length: ell,
        kick_strength: scales.kick_strength,
        regime,
        one_photon_border_mu: one_photon_border(system, constants)?,
        delocalization_border_mu: delocalization_border(system, constants),
        t_i_years: t_i,
        t_q_years: system.period_yr * ell,
        exceeds_universe_age: t_i > constants.universe_age_yr,
    })
}

/// Mass-ratio window where the ionization time exceeds the age of the
/// universe: DMPs in `(mu_low, mu_high)` survive today. Either flank may be
/// absent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniverseAgeWindow {
    /// Crossing on the one-photon flank (`t_I` falls below `t_U` above it).
    pub mu_low: Option<f64>,
    /// Crossing on the localized flank (`t_I` falls below `t_U` above it).
    pub mu_high: Option<f64>,
}

/// Solve `t_I(mu) = t_U` on both monotone flanks by bisection on `log mu`
/// to relative 1e-6 (at most 200 iterations per flank).
pub fn universe_age_window(
    system: &BinarySystem,
    constants: &PhysicalConstants,
    t_h_years: f64,
) -> Result<UniverseAgeWindow> {
    let t_u = constants.universe_age_yr;
    if !t_u.is_finite() {
        return Ok(UniverseAgeWindow { mu_low: None, mu_high: None });
    }
    let t_at = |mu: f64| -> Result<f64> {
        Ok(ionization_time(system, &DmpSpec::new(mu), constants, t_h_years)?.0)
    };
    let bisect = |mut lo: f64, mut hi: f64| -> Result<Option<f64>> {
        // t_I decreases with mu on both flanks; crossing needs a sign change
        let t_lo = t_at(lo)?;
        let t_hi = t_at(hi)?;
        if !(t_lo > t_u && t_hi < t_u) {
            return Ok(None);
        }
        for _ in 0..200 {
            let mid = ((lo.ln() + hi.ln()) / 2.0).exp();
            if t_at(mid)? > t_u {
                lo = mid;
            } else {
                hi = mid;
            }
            if (hi / lo - 1.0).abs() < 1e-6 {
                break;
            }
        }
        Ok(Some((lo.ln() / 2.0 + hi.ln() / 2.0).exp()))
    };
    let mu_1 = one_photon_border(system, constants)?;
    let mu_star = delocalization_border(system, constants);
    // localized flank starts where ell_phi = 1
    let k_coef = atomic_scales(system, &DmpSpec::new(1.0), constants)?.kick_strength;
    let mu_ell1 = std::f64::consts::SQRT_2 / k_coef;
    let mu_low = bisect(1e-8 * mu_1, mu_1)?;
    let mu_high = bisect(1.000_001 * mu_ell1, mu_star)?;
    Ok(UniverseAgeWindow { mu_low, mu_high })
}

/// One row of the regime-summary table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeRow {
    pub mu: f64,
    pub n_i: f64,
    pub ell_phi: f64,
    pub regime: Regime,
}

/// One row of the lifetime table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LifetimeRow {
    pub mu: f64,
    pub t_i_years: f64,
    pub mechanism: Regime,
}

/// Log-spaced grid of `n >= 2` points spanning `[lo, hi]` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::Config(format!("grid needs 0 < lo < hi, got [{lo}, {hi}]")));
    }
    if n < 2 {
        return Err(Error::Config(format!("grid needs >= 2 points, got {n}")));
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect())
}

fn checked_grid_with_borders(
    grid: &[f64],
    borders: &[f64],
) -> Result<Vec<f64>> {
    if grid.is_empty() {
        return Err(Error::Config("mass-ratio grid is empty".into()));
    }
    if grid.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::Config("mass-ratio grid must be sorted strictly ascending".into()));
    }
    let mut mus = grid.to_vec();
    for &b in borders {
        if b > grid[0] && b < *grid.last().unwrap() && !mus.contains(&b) {
            mus.push(b);
        }
    }
    mus.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(mus)
}

/// Regime-summary rows over a sorted mass-ratio grid. The one-photon and
/// delocalization border values are inserted as extra rows when they fall
/// inside the grid span.
pub fn figure1_table(
    system: &BinarySystem,
    constants: &PhysicalConstants,
    grid: &[f64],
) -> Result<Vec<RegimeRow>> {
    let borders = [
        one_photon_border(system, constants)?,
        delocalization_border(system, constants),
    ];
    checked_grid_with_borders(grid, &borders)?
        .into_iter()
        .map(|mu| {
            let s = atomic_scales(system, &DmpSpec::new(mu), constants)?;
            let ell = s.kick_strength.powi(2) / 2.0;
            Ok(RegimeRow {
                mu,
                n_i: s.ionization_photons,
                ell_phi: ell,
                regime: classify_regime(s.ionization_photons, ell),
            })
        })
        .collect()
}

/// Lifetime rows over a sorted mass-ratio grid, with border rows inserted as
/// in [`figure1_table`].
pub fn figure2_table(
    system: &BinarySystem,
    constants: &PhysicalConstants,
    grid: &[f64],
    t_h_years: f64,
) -> Result<Vec<LifetimeRow>> {
    let borders = [
        one_photon_border(system, constants)?,
        delocalization_border(system, constants),
    ];
    checked_grid_with_borders(grid, &borders)?
        .into_iter()
        .map(|mu| {
            let (t, mechanism) = ionization_time(system, &DmpSpec::new(mu), constants, t_h_years)?;
            Ok(LifetimeRow { mu, t_i_years: t, mechanism })
        })
        .collect()
}
