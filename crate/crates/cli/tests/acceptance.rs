//! Acceptance suite: one test per release criterion, each printing a single
//! PASS/FAIL line (run with `cargo test --test acceptance -- --nocapture`).
//!
//! Criterion 4 is expected to fail: the supermassive-binary preset quotes a
//! published delocalization border of 1.7e-14 that the border formula itself
//! does not reproduce (it gives ~4.7e-15 from the quoted S2 orbital
//! elements). The formula is implemented faithfully rather than tuned to the
//! quoted number, so the criterion stays red; see the repository notes.

use kepmap::binary::{self, epsilon, preset};
use kepmap::classical::{
    self, diffusive_time, measure_diffusion, run_ensemble, EnsembleConfig, MapParams,
    TrajectoryFate,
};
use kepmap::quantum::{
    self, desk_scale_omega, evolve_period, evolve_period_reference, fit_localization_length,
    init_state, localization_scaling_estimate, theoretical_distribution, LatticeConfig,
    QuantumRunParams,
};
use kepmap::{capture, regime, DmpSpec, PhysicalConstants};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Criterion {
    name: &'static str,
    failures: Vec<String>,
}

impl Criterion {
    fn new(name: &'static str) -> Self {
        Criterion {
            name,
            failures: Vec::new(),
        }
    }

    fn within(&mut self, what: &str, actual: f64, expected: f64, rel_tol: f64) {
        let rel = (actual / expected - 1.0).abs();
        if !(rel <= rel_tol) {
            self.failures.push(format!(
                "{what}: {actual:.6e} vs {expected:.6e} (off by {:.1}%, tol {:.1}%)",
                rel * 100.0,
                rel_tol * 100.0
            ));
        }
    }

    fn check(&mut self, what: &str, ok: bool) {
        if !ok {
            self.failures.push(what.to_string());
        }
    }

    fn finish(self) {
        if self.failures.is_empty() {
            println!("PASS {}", self.name);
        } else {
            println!("FAIL {} — {}", self.name, self.failures.join("; "));
            panic!("{}: {}", self.name, self.failures.join("; "));
        }
    }
}

fn constants() -> PhysicalConstants {
    PhysicalConstants::default()
}

#[test]
fn criterion_1_regime_borders() {
    let mut c = Criterion::new("criterion 1: analytic regime borders (sun-jupiter)");
    let k = constants();
    let sys = preset("sun-jupiter", &k).unwrap();

    let mu_star = regime::delocalization_border(&sys, &k);
    c.within("delocalization border mu*", mu_star, 2e-15, 0.10);

    let mu_1 = regime::one_photon_border(&sys, &k).unwrap();
    c.within("one-photon border", mu_1, 2.28e-20, 0.02);

    let scales = binary::atomic_scales(&sys, &DmpSpec::new(mu_star), &k).unwrap();
    c.within("N_I at mu*", scales.ionization_photons, 8.78e4, 0.05);

    let mu_k1 = regime::k_unity_border(&sys, &k).unwrap();
    c.within("k = 1 border", mu_k1, 4.76e-18, 0.02);
    c.finish();
}

#[test]
fn criterion_2_coefficients() {
    let mut c = Criterion::new("criterion 2: coefficient reproduction");
    let k = constants();
    let sys = preset("sun-jupiter", &k).unwrap();
    let mu = 1e-17;
    let scales = binary::atomic_scales(&sys, &DmpSpec::new(mu), &k).unwrap();
    c.within("N_I / mu", scales.ionization_photons / mu, 4.39e19, 0.01);
    let ell = scales.kick_strength.powi(2) / 2.0;
    c.within("ell_phi / mu^2", ell / (mu * mu), 2.20e34, 0.02);
    c.within("k / mu", scales.kick_strength / mu, 2.10e17, 0.01);

    let w_q = capture::quantum_energy_border(&sys, &DmpSpec::new(mu), &k).unwrap();
    c.within("w_q / mu", w_q / mu, 5.0e14, 0.05);

    let mu_1 = regime::one_photon_border(&sys, &k).unwrap();
    let (t_1, _) = regime::ionization_time(&sys, &DmpSpec::new(mu_1), &k, 1e7).unwrap();
    c.within("one-photon t_I * mu^2", t_1 * mu_1 * mu_1, 1.07e-33, 0.05);

    let s = binary::atomic_scales(&sys, &DmpSpec::new(7.95e-18), &k).unwrap();
    c.within("ell_phi(7.95e-18)", s.kick_strength.powi(2) / 2.0, 1.39, 0.03);
    c.finish();
}

#[test]
fn criterion_3_lifetime_curve() {
    let mut c = Criterion::new("criterion 3: ionization lifetime curve");
    let k = constants();
    let sys = preset("sun-jupiter", &k).unwrap();
    let t_h = 1e7;

    let (t_i, _) = regime::ionization_time(&sys, &DmpSpec::new(2.28e-20), &k, t_h).unwrap();
    c.within("t_I at the one-photon border", t_i, 2.05e6, 0.15);

    let (plateau, _) = regime::ionization_time(&sys, &DmpSpec::new(1e-14), &k, t_h).unwrap();
    c.check("chaotic plateau t_I = t_H exactly", plateau == t_h);

    // the localized branch evaluated at its border N_I = ell equals t_H
    let at_border = regime::localized_lifetime(t_h, 500.0, 500.0).unwrap();
    c.check(
        "continuity at the delocalization border",
        (at_border / t_h - 1.0).abs() < 1e-12,
    );

    let window = regime::universe_age_window(&sys, &k, t_h).unwrap();
    match window.mu_low {
        Some(mu_low) => c.within("lower t_U crossing", mu_low, 2.8e-22, 0.10),
        None => c.check("lower t_U crossing exists", false),
    }
    match window.mu_high {
        Some(mu_high) => c.within("upper t_U crossing", mu_high, 3.4e-16, 0.20),
        None => c.check("upper t_U crossing exists", false),
    }

    // few-photon anchors hold to order of magnitude only
    let mu_1 = regime::one_photon_border(&sys, &k).unwrap();
    let (t_2, _) = regime::ionization_time(&sys, &DmpSpec::new(1.10 * mu_1), &k, t_h).unwrap();
    c.check(
        "two-photon anchor within an order of magnitude of 3.6e12 yr",
        (0.1..=10.0).contains(&(t_2 / 3.6e12)),
    );
    let (t_3, _) = regime::ionization_time(&sys, &DmpSpec::new(2.99 * mu_1), &k, t_h).unwrap();
    c.check(
        "three-photon anchor within an order of magnitude of 4e15 yr",
        (0.1..=10.0).contains(&(t_3 / 4e15)),
    );
    c.finish();
}

#[test]
fn criterion_4_supermassive_binary_border() {
    let mut c = Criterion::new("criterion 4: supermassive-binary delocalization border");
    let k = constants();
    let sys = preset("sgrA-s2", &k).unwrap();
    let mu_star = regime::delocalization_border(&sys, &k);
    // Known red: the border formula applied to the preset's orbital elements
    // gives ~4.7e-15, not the published 1.7e-14. Kept faithful, not tuned.
    c.within("delocalization border", mu_star, 1.7e-14, 0.25);
    c.finish();
}

#[test]
fn criterion_5_classical_dynamics() {
    let mut c = Criterion::new("criterion 5: classical map properties");
    let k = constants();
    let sys = preset("sun-jupiter", &k).unwrap();
    let eps = 4.776e-3;
    let params = MapParams::sine(eps);

    // area preservation at random phase-space points
    let mut rng = ChaCha8Rng::seed_from_u64(12345);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let w = -rng.gen_range(0.01..1.0);
        let phi = rng.gen_range(0.0..std::f64::consts::TAU);
        let j = classical::step_jacobian(w, phi, &params);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        worst = worst.max((det - 1.0).abs());
    }
    c.check(
        &format!("|det J - 1| < 1e-12 at 1000 points (worst {worst:.2e})"),
        worst < 1e-12,
    );

    // quasilinear diffusion coefficient
    let cfg = EnsembleConfig::new(10_000, 200, 4242);
    let res = run_ensemble(&params, -0.1, &cfg).unwrap();
    let d = measure_diffusion(&res, (0, 200)).unwrap();
    c.check(
        &format!("D/(eps^2/2) in [0.75, 1.25] (got {:.3})", d / (eps * eps / 2.0)),
        (0.75..=1.25).contains(&(d / (eps * eps / 2.0))),
    );

    // ensemble median escape vs the diffusive estimate
    let esc_cfg = EnsembleConfig::new(2000, 100_000, 7);
    let esc = run_ensemble(&MapParams::sine(epsilon(&sys)), -0.1, &esc_cfg).unwrap();
    let escaped = esc
        .fates
        .iter()
        .filter(|f| matches!(f, TrajectoryFate::Escaped { .. }))
        .count();
    c.check("most trajectories escape", escaped * 2 > esc.fates.len());
    let median_years = esc.median_escape_periods().unwrap() * sys.period_yr;
    let t_d = 3e6; // published diffusive estimate at this scale
    c.check(
        &format!("median escape within factor 3 of t_D (got {median_years:.2e} yr vs {t_d:.0e})"),
        (1.0 / 3.0..=3.0).contains(&(median_years / t_d)),
    );
    let ours = diffusive_time(&sys, &DmpSpec::new(1e-16), &k);
    c.check(
        "analytic diffusive time agrees with the published one within factor 3",
        (1.0 / 3.0..=3.0).contains(&(ours / t_d)),
    );

    // thread count must not change results
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let cfg = EnsembleConfig::new(500, 3000, 99);
    let r1 = one.install(|| run_ensemble(&params, -0.1, &cfg)).unwrap();
    let r4 = four.install(|| run_ensemble(&params, -0.1, &cfg)).unwrap();
    c.check("bit-identical across 1 vs 4 threads", r1 == r4);
    c.finish();
}

#[test]
fn criterion_6_quantum_dynamics() {
    let mut c = Criterion::new("criterion 6: quantum map properties");

    // probability bookkeeping over a million iterations
    let k = 2.0;
    let n_i = 60.0;
    let mut params = QuantumRunParams::new(k, desk_scale_omega(k, n_i, 5.0), n_i, 1_000_000);
    params.curve_stride = 10_000;
    // rounding dust (~1e-14/step) accumulates at the bottom mask over 1e6
    // steps; it is part of the absorbed bookkeeping, not a conservation loss
    params.lattice.leak_limit = 1e-6;
    let (snap, result) = quantum::run_to(&params, None, 1_000_000).unwrap();
    c.check("run completes", result.is_some());
    let defect = snap.state.conservation_defect().abs();
    c.check(
        &format!("norm + absorbed conserved to 1e-9 over 1e6 steps (defect {defect:.2e})"),
        defect < 1e-9,
    );

    // transform evolution vs an explicit O(L^2) discrete-transform oracle
    let cfg = LatticeConfig {
        force_size: Some(64),
        ..LatticeConfig::default()
    };
    let (ko, no) = (1.0, 30.0);
    let omega = desk_scale_omega(ko, no, 5.0);
    let mut fast = init_state(ko, omega, no, &cfg).unwrap();
    let mut slow = fast.clone();
    for _ in 0..100 {
        evolve_period(&mut fast, ko, omega).unwrap();
        evolve_period_reference(&mut slow, ko, omega).unwrap();
    }
    let max_err = fast
        .amplitudes
        .iter()
        .zip(&slow.amplitudes)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0f64, f64::max);
    c.check(
        &format!("dense oracle equivalence on L = 64, 100 steps (max {max_err:.2e})"),
        max_err < 1e-10,
    );

    // single-step spreading follows the Bessel law
    let kb = 5.0;
    let nb = 100.0;
    let ob = desk_scale_omega(kb, nb, 5.0);
    let mut state = init_state(kb, ob, nb, &LatticeConfig::default()).unwrap();
    evolve_period(&mut state, kb, ob).unwrap();
    let origin = state.origin_site() as i64;
    let mut bessel_err: f64 = 0.0;
    for (j, a) in state.amplitudes.iter().enumerate() {
        let n = (j as i64 - origin).unsigned_abs() as u32;
        let expect = if n <= 40 {
            kepmap::bessel::bessel_j(n, kb).unwrap().powi(2)
        } else {
            0.0
        };
        bessel_err = bessel_err.max((a.norm_sqr() - expect).abs());
    }
    c.check(
        &format!("one-step Bessel spreading law to 1e-10 (max {bessel_err:.2e})"),
        bessel_err < 1e-10,
    );

    // localization length scaling at desk scale; single realizations
    // fluctuate by 2-3x, so each point averages several frequencies
    for (kk, nn, periods) in [(3.0, 400.0, 4000u64), (5.0, 400.0, 4000), (8.0, 800.0, 8000)] {
        let ell = kk * kk / 2.0;
        let fitted = localization_scaling_estimate(kk, nn, periods, 6).unwrap();
        let ratio = fitted / ell;
        c.check(
            &format!("ell_fit/(k^2/2) in [0.5, 2.0] at k = {kk} (got {ratio:.2})"),
            (0.5..=2.0).contains(&ratio),
        );
    }
    c.finish();
}

#[test]
fn criterion_7_distribution_law() {
    let mut c = Criterion::new("criterion 7: steady-state distribution law");
    // synthetic profile with the localization prefactor, fit over [2l, 5l]
    let ell = 20.0;
    let mut dist = vec![0.0; 512];
    let n_low = -256i64;
    for (j, w) in dist.iter_mut().enumerate() {
        let n_phi = (j as i64 + n_low) as f64;
        *w = theoretical_distribution(ell, n_phi).unwrap();
    }
    let fit = fit_localization_length(&dist, n_low, 0, (2.0 * ell, 5.0 * ell)).unwrap();
    c.within("synthetic-profile fit", fit, ell, 0.10);

    for ell in [5.0, 20.0, 100.0] {
        let total: f64 = (-4000i64..=4000)
            .map(|n| theoretical_distribution(ell, n as f64).unwrap())
            .sum();
        c.check(
            &format!("sum W = 1 within 1% at ell = {ell} (got {total:.4})"),
            (total - 1.0).abs() < 0.01,
        );
    }
    c.finish();
}

#[test]
fn criterion_8_capture() {
    let mut c = Criterion::new("criterion 8: capture estimates");
    let k = constants();
    let sys = preset("sun-jupiter", &k).unwrap();

    let sigma = capture::capture_cross_section(&sys, sys.orbit_velocity).unwrap();
    let expect = 8.0 * std::f64::consts::PI * sys.orbit_radius * sys.orbit_radius;
    c.check("sigma(v_p) = 8 pi r_p^2 exactly", sigma == expect);

    // speed distribution: unit normalization and mode at u/sqrt(3)
    let u = k.galactic_velocity_scale;
    let total = capture::maxwell_fraction_below(u, 40.0 * u).unwrap();
    c.check(
        &format!("Maxwell pdf integrates to 1 within 1e-8 (got 1{:+.2e})", total - 1.0),
        (total - 1.0).abs() < 1e-8,
    );
    let mode = {
        // ternary search for the maximum
        let (mut lo, mut hi) = (0.1 * u, 2.0 * u);
        for _ in 0..200 {
            let a = lo + (hi - lo) / 3.0;
            let b = hi - (hi - lo) / 3.0;
            if capture::maxwell_speed_pdf(u, a).unwrap() < capture::maxwell_speed_pdf(u, b).unwrap()
            {
                lo = a;
            } else {
                hi = b;
            }
        }
        (lo + hi) / 2.0
    };
    c.check(
        &format!("mode at u/sqrt(3) within 1e-6 (off by {:.2e})", (mode - u / 3f64.sqrt()).abs() / u),
        ((mode - u / 3f64.sqrt()) / u).abs() < 1e-6,
    );

    // classical captured mass accumulated over the chaotic residence
    // lifetime (1e7 yr), order of magnitude only
    let report = capture::capture_report(&sys, &DmpSpec::new(1e-14), &k, 1e7).unwrap();
    c.check(
        &format!("M_cap of order 1e19-1e20 g (got {:.2e})", report.m_cap_grams),
        (1e18..1e21).contains(&report.m_cap_grams),
    );
    c.finish();
}

#[test]
fn criterion_9_reproducibility() {
    let mut c = Criterion::new("criterion 9: reproducibility");
    let tmp = tempfile::tempdir().unwrap();

    // identical config + seed through the binary -> byte-identical outputs
    let run = |out: &std::path::Path| {
        let res = std::process::Command::new(env!("CARGO_BIN_EXE_kepmap"))
            .args([
                "classical-sim",
                "--set",
                "system=sun-jupiter",
                "--set",
                "n_traj=300",
                "--set",
                "max_kicks=4000",
                "--seed",
                "31",
                "--format",
                "json",
                "--out",
                out.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    };
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    run(&a);
    run(&b);
    let bytes = |p: &std::path::Path, f: &str| std::fs::read(p.join(f)).unwrap();
    c.check(
        "byte-identical JSON outputs across reruns",
        bytes(&a, "survival.json") == bytes(&b, "survival.json")
            && bytes(&a, "escape.json") == bytes(&b, "escape.json"),
    );
    let manifest: serde_json::Value = serde_json::from_slice(&bytes(&a, "manifest.json")).unwrap();
    let hash = manifest["outputs"]["survival.json"].as_str().unwrap();
    c.check(
        "manifest hash matches file content",
        hash == kepmap::io::content_hash(&bytes(&a, "survival.json")),
    );

    // checkpoint-resume bitwise equals the uninterrupted run
    let k = 4.0;
    let n_i = 150.0;
    let mut params = QuantumRunParams::new(k, desk_scale_omega(k, n_i, 5.0), n_i, 500);
    params.lattice.pad = 8.0;
    params.measure_window = Some((100, 500));
    let straight = quantum::run(&params).unwrap();
    let (snapshot, _) = quantum::run_to(&params, None, 200).unwrap();
    let path = tmp.path().join("q.chk");
    kepmap::checkpoint::save(kepmap::checkpoint::QUANTUM_KIND, &snapshot, &path).unwrap();
    let restored = kepmap::checkpoint::load(kepmap::checkpoint::QUANTUM_KIND, &path).unwrap();
    let (_, resumed) = quantum::run_to(&params, Some(restored), 500).unwrap();
    c.check(
        "checkpoint-resume bitwise equals the straight run",
        resumed.as_ref() == Some(&straight),
    );
    c.finish();
}
