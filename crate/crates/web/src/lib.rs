//! Browser bindings: a small JSON-in/JSON-out surface over the core library
//! for the static demo page in `www/`.
//!
//! Build with `wasm-pack build crates/web --target web` (or
//! `cargo build -p kepmap-web --target wasm32-unknown-unknown` plus
//! `wasm-bindgen`). The `*_impl` functions are plain Rust so the crate also
//! compiles and tests natively; the exported wrappers only translate errors
//! into JS values.

use kepmap::binary::{self, epsilon, preset};
use kepmap::classical::{poincare_section, MapParams};
use kepmap::quantum::{desk_scale_omega, run, QuantumRunParams};
use kepmap::regime::{figure1_table, figure2_table, log_grid};
use kepmap::PhysicalConstants;
use serde::Serialize;
use wasm_bindgen::prelude::*;

fn to_json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct CurvePoint {
    mu: f64,
    n_i: f64,
    ell_phi: f64,
    regime: String,
    t_i_years: f64,
}

fn regime_curve_impl(
    preset_name: &str,
    mu_min: f64,
    mu_max: f64,
    points: usize,
) -> Result<String, String> {
    let constants = PhysicalConstants::default();
    let system = preset(preset_name, &constants).map_err(|e| e.to_string())?;
    let grid = log_grid(mu_min, mu_max, points).map_err(|e| e.to_string())?;
    let regimes = figure1_table(&system, &constants, &grid).map_err(|e| e.to_string())?;
    let lifetimes =
        figure2_table(&system, &constants, &grid, 1e7).map_err(|e| e.to_string())?;
    let curve: Vec<CurvePoint> = regimes
        .iter()
        .zip(&lifetimes)
        .map(|(r, l)| CurvePoint {
            mu: r.mu,
            n_i: r.n_i,
            ell_phi: r.ell_phi,
            regime: r.regime.label(),
            t_i_years: l.t_i_years,
        })
        .collect();
    to_json(&curve)
}

/// Regime classification and ionization lifetime over a log grid of DMP
/// mass ratios, for one preset system. Returns a JSON array of points.
#[wasm_bindgen]
pub fn regime_curve(
    preset_name: &str,
    mu_min: f64,
    mu_max: f64,
    points: usize,
) -> Result<String, JsValue> {
    regime_curve_impl(preset_name, mu_min, mu_max, points).map_err(|e| JsValue::from_str(&e))
}

fn classical_section_impl(
    eps: f64,
    n_initials: usize,
    points_per_trajectory: u64,
) -> Result<String, String> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err("eps must be in (0, 1)".into());
    }
    let params = MapParams::sine(eps);
    let mut initials = Vec::new();
    let n = n_initials.clamp(4, 400);
    for i in 0..n {
        let w0 = -1.0 + 0.95 * (i as f64 + 0.5) / n as f64;
        let phi0 = std::f64::consts::TAU * (0.37 * i as f64).fract();
        initials.push((w0, phi0));
    }
    let pts = poincare_section(&params, &initials, 1, points_per_trajectory.clamp(10, 5000))
        .map_err(|e| e.to_string())?;
    to_json(&pts)
}

/// Phase-space section of the classical map at the given kick amplitude:
/// a grid of initial conditions iterated with the visited `(w, phi)` points
/// recorded. Returns a JSON array of `{traj, w, phi}`.
#[wasm_bindgen]
pub fn classical_section(
    eps: f64,
    n_initials: usize,
    points_per_trajectory: u64,
) -> Result<String, JsValue> {
    classical_section_impl(eps, n_initials, points_per_trajectory)
        .map_err(|e| JsValue::from_str(&e))
}

#[derive(Serialize)]
struct QuantumDemo {
    k: f64,
    n_i: f64,
    ell_phi: f64,
    fitted_length: f64,
    absorbed_probability: f64,
    /// `(N_phi, W)` over the lattice.
    distribution: Vec<(i64, f64)>,
    /// `(iteration, p_ion)`.
    ionization: Vec<(u64, f64)>,
}

fn quantum_demo_impl(k: f64, n_i: f64, n_periods: u64) -> Result<String, String> {
    if !(0.0..=12.0).contains(&k) || !(10.0..=1000.0).contains(&n_i) {
        return Err("demo range: k in [0, 12], N_I in [10, 1000]".into());
    }
    let n_periods = n_periods.clamp(10, 20_000);
    let mut params = QuantumRunParams::new(k, desk_scale_omega(k, n_i, 15.0), n_i, n_periods);
    params.lattice.pad = 8.0;
    params.lattice.leak_limit = 1e-3;
    params.measure_window = Some((n_periods / 2, n_periods));
    params.fit_range = Some((k * k, 3.5 * k * k));
    let res = run(&params).map_err(|e| e.to_string())?;
    let distribution = res
        .distribution
        .iter()
        .enumerate()
        .map(|(j, &w)| (j as i64 + res.n_low - res.n0, w))
        .collect();
    to_json(&QuantumDemo {
        k,
        n_i,
        ell_phi: res.theoretical_length,
        fitted_length: res.fitted_length,
        absorbed_probability: res.absorbed_probability,
        distribution,
        ionization: res.ionization_curve,
    })
}

/// Desk-scale quantum map run: evolve `n_periods`, return the averaged
/// photon distribution and ionization curve as JSON.
#[wasm_bindgen]
pub fn quantum_demo(k: f64, n_i: f64, n_periods: u64) -> Result<String, JsValue> {
    quantum_demo_impl(k, n_i, n_periods).map_err(|e| JsValue::from_str(&e))
}

fn preset_info_impl() -> Result<String, String> {
    #[derive(Serialize)]
    struct Info {
        name: String,
        epsilon: f64,
        chaos_border: f64,
        period_yr: f64,
    }
    let constants = PhysicalConstants::default();
    let mut out = Vec::new();
    for name in ["sun-jupiter", "sun-jupiter-weak", "halley-kick", "sgrA-s2"] {
        let system = preset(name, &constants).map_err(|e| e.to_string())?;
        out.push(Info {
            name: name.to_string(),
            epsilon: epsilon(&system),
            chaos_border: binary::effective_chaos_border(&system),
            period_yr: system.period_yr,
        });
    }
    to_json(&out)
}

/// Kick amplitude and chaos border for each shipped preset, as JSON.
#[wasm_bindgen]
pub fn preset_info() -> Result<String, JsValue> {
    preset_info_impl().map_err(|e| JsValue::from_str(&e))
}
