//! The dimensionless classical generalized Kepler map, ensemble Monte Carlo,
//! diffusion and escape-time measurement, and Poincaré sections.
//!
//! The map acts on `(w, phi)` with `w = 2E/(m_d v_p^2)`:
//!
//! ```text
//! w'   = w + F(phi)              (kick at perihelion)
//! phi' = phi + 2*pi |w'|^{-3/2}  (planet phase advance over one DMP orbit)
//! ```
//!
//! Kick-then-rotate ordering (the new energy enters the phase line) is the
//! symplectic convention used throughout. The escape test runs after the kick
//! and before the phase advance, which is undefined for `w >= 0`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::binary::{BinarySystem, DmpSpec, Harmonic};
use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};

/// Default floor on `|w|`; orbits deeper than this exceed any practical time
/// horizon (> 1e6 planet periods per DMP orbit) and are frozen as sunk.
pub const DEFAULT_W_MIN: f64 = 1e-4;

/// One classical trajectory point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalState {
    /// Dimensionless energy `2E/(m_d v_p^2)`.
    pub w: f64,
    /// Planet phase, radians in `[0, 2*pi)`.
    pub phi: f64,
    /// Kick count.
    pub kicks: u64,
    /// Summed DMP orbital periods, in planet-period units.
    pub elapsed_periods: f64,
}

impl ClassicalState {
    pub fn new(w: f64, phi: f64) -> Self {
        ClassicalState {
            w,
            phi: phi.rem_euclid(std::f64::consts::TAU),
            kicks: 0,
            elapsed_periods: 0.0,
        }
    }
}

/// Outcome of a single map step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepOutcome {
    Bound(ClassicalState),
    /// Energy became non-negative after the kick: the trajectory is unbound.
    Escaped { w: f64, kicks: u64, elapsed_periods: f64 },
    /// `|w|` fell below the floor: frozen, excluded from further stepping.
    Sunk { state: ClassicalState },
}

/// Map parameters: absolute kick harmonics (already scaled by
/// `epsilon = 2 f0 m_p/M`) and the sink floor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapParams {
    pub harmonics: Vec<Harmonic>,
    pub w_min: f64,
}

impl MapParams {
    pub fn from_system(system: &BinarySystem) -> Self {
        MapParams {
            harmonics: system.scaled_harmonics(),
            w_min: DEFAULT_W_MIN,
        }
    }

    pub fn sine(epsilon: f64) -> Self {
        MapParams {
            harmonics: vec![Harmonic::sine(epsilon)],
            w_min: DEFAULT_W_MIN,
        }
    }

    /// Sum of harmonic amplitude magnitudes; bounds `|F(phi)|`.
    pub fn kick_bound(&self) -> f64 {
        self.harmonics.iter().map(|h| h.amplitude.abs()).sum()
    }
}

/// Kick function `F(phi) = sum_j a_j sin(j phi + theta_j)`.
pub fn kick(phi: f64, harmonics: &[Harmonic]) -> f64 {
    harmonics
        .iter()
        .map(|h| h.amplitude * (h.index as f64 * phi + h.phase).sin())
        .sum()
}

/// Derivative `F'(phi)`, used by the analytic Jacobian.
pub fn kick_derivative(phi: f64, harmonics: &[Harmonic]) -> f64 {
    harmonics
        .iter()
        .map(|h| h.amplitude * h.index as f64 * (h.index as f64 * phi + h.phase).cos())
        .sum()
}

/// One iteration of the map.
pub fn step(state: &ClassicalState, params: &MapParams) -> StepOutcome {
    let w_new = state.w + kick(state.phi, &params.harmonics);
    if w_new >= 0.0 {
        return StepOutcome::Escaped {
            w: w_new,
            kicks: state.kicks + 1,
            elapsed_periods: state.elapsed_periods,
        };
    }
    if w_new.abs() < params.w_min {
        return StepOutcome::Sunk {
            state: ClassicalState {
                w: w_new,
                phi: state.phi,
                kicks: state.kicks + 1,
                elapsed_periods: state.elapsed_periods,
            },
        };
    }
    let orbit_periods = w_new.abs().powf(-1.5);
    let phi_new = (state.phi + std::f64::consts::TAU * orbit_periods)
        .rem_euclid(std::f64::consts::TAU);
    StepOutcome::Bound(ClassicalState {
        w: w_new,
        phi: phi_new,
        kicks: state.kicks + 1,
        elapsed_periods: state.elapsed_periods + orbit_periods,
    })
}

/// Inverse map: undo the phase advance with the current energy, then undo the
/// kick at the recovered phase.
pub fn inverse_step(state: &ClassicalState, params: &MapParams) -> ClassicalState {
    let orbit_periods = state.w.abs().powf(-1.5);
    let phi_prev =
        (state.phi - std::f64::consts::TAU * orbit_periods).rem_euclid(std::f64::consts::TAU);
    let w_prev = state.w - kick(phi_prev, &params.harmonics);
    ClassicalState {
        w: w_prev,
        phi: phi_prev,
        kicks: state.kicks.saturating_sub(1),
        elapsed_periods: state.elapsed_periods - orbit_periods,
    }
}

/// Analytic Jacobian of one step at `(w, phi)`, rows = (dw', dphi').
/// Its determinant is 1 in exact arithmetic (area preservation).
pub fn step_jacobian(w: f64, phi: f64, params: &MapParams) -> [[f64; 2]; 2] {
    let f_prime = kick_derivative(phi, &params.harmonics);
    let w_new = w + kick(phi, &params.harmonics);
    // d(2*pi*|w'|^{-3/2})/dw' for w' < 0
    let g_prime = 3.0 * std::f64::consts::PI * w_new.abs().powf(-2.5);
    [[1.0, f_prime], [g_prime, 1.0 + g_prime * f_prime]]
}

/// Fate of a single ensemble trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TrajectoryFate {
    Escaped { kicks: u64, periods: f64 },
    Sunk { kicks: u64, periods: f64 },
    Survived,
}

/// Per-trajectory record kept by the ensemble run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub fate: TrajectoryFate,
    /// `(w, elapsed_periods)` at each sampled kick count, up to the fate.
    pub samples: Vec<(f64, f64)>,
}

/// Ensemble Monte Carlo result. All aggregates are reduced in trajectory
/// order, so the result is identical for a fixed seed regardless of the
/// number of worker threads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub seed: u64,
    pub n_trajectories: u32,
    pub w0: f64,
    /// Kick counts at which trajectories were sampled.
    pub sample_kicks: Vec<u64>,
    /// `(kicks, mean elapsed periods over non-escaped, surviving fraction)`.
    pub survival_curve: Vec<(u64, f64, f64)>,
    /// `<(w - w0)^2>` over surviving (non-escaped, non-sunk) trajectories.
    pub diffusion_series: Vec<(u64, f64)>,
    /// Per-trajectory fates, indexed by trajectory id.
    pub fates: Vec<TrajectoryFate>,
}

impl EnsembleResult {
    /// `(traj_id, kicks, periods)` for escaped trajectories.
    pub fn escape_times(&self) -> Vec<(u32, u64, f64)> {
        self.fates
            .iter()
            .enumerate()
            .filter_map(|(i, f)| match f {
                TrajectoryFate::Escaped { kicks, periods } => Some((i as u32, *kicks, *periods)),
                _ => None,
            })
            .collect()
    }

    /// Median escape time in summed planet periods, over escaped trajectories.
    pub fn median_escape_periods(&self) -> Option<f64> {
        let mut periods: Vec<f64> = self
            .fates
            .iter()
            .filter_map(|f| match f {
                TrajectoryFate::Escaped { periods, .. } => Some(*periods),
                _ => None,
            })
            .collect();
        if periods.is_empty() {
            return None;
        }
        periods.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Some(periods[periods.len() / 2])
    }
}

/// Ensemble configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub n_trajectories: u32,
    pub max_kicks: u64,
    pub seed: u64,
    /// Sampling stride in kicks; 0 selects `max(1, max_kicks/512)`.
    pub sample_stride: u64,
}

impl EnsembleConfig {
    pub fn new(n_trajectories: u32, max_kicks: u64, seed: u64) -> Self {
        EnsembleConfig {
            n_trajectories,
            max_kicks,
            seed,
            sample_stride: 0,
        }
    }

    fn stride(&self) -> u64 {
        if self.sample_stride > 0 {
            self.sample_stride
        } else {
            (self.max_kicks / 512).max(1)
        }
    }
}

/// Initial phase for trajectory `index`: an independent counter-based
/// substream of the global seed, uniform in `[0, 2*pi)`.
fn initial_phase(seed: u64, index: u32) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng.gen::<f64>() * std::f64::consts::TAU
}

/// Run one trajectory, sampling `(w, periods)` at the given kick counts.
pub fn run_trajectory(
    params: &MapParams,
    w0: f64,
    seed: u64,
    index: u32,
    max_kicks: u64,
    sample_kicks: &[u64],
) -> TrajectoryRecord {
    let mut state = ClassicalState::new(w0, initial_phase(seed, index));
    let mut samples = Vec::with_capacity(sample_kicks.len());
    let mut next_sample = 0usize;
    if sample_kicks.first() == Some(&0) {
        samples.push((state.w, state.elapsed_periods));
        next_sample = 1;
    }
    let mut fate = TrajectoryFate::Survived;
    while state.kicks < max_kicks {
        match step(&state, params) {
            StepOutcome::Bound(next) => {
                state = next;
                if next_sample < sample_kicks.len() && state.kicks == sample_kicks[next_sample] {
                    samples.push((state.w, state.elapsed_periods));
                    next_sample += 1;
                }
            }
            StepOutcome::Escaped { kicks, elapsed_periods, .. } => {
                fate = TrajectoryFate::Escaped {
                    kicks,
                    periods: elapsed_periods,
                };
                break;
            }
            StepOutcome::Sunk { state: frozen } => {
                fate = TrajectoryFate::Sunk {
                    kicks: frozen.kicks,
                    periods: frozen.elapsed_periods,
                };
                break;
            }
        }
    }
    TrajectoryRecord { fate, samples }
}

fn sample_schedule(cfg: &EnsembleConfig) -> Vec<u64> {
    let stride = cfg.stride();
    let mut kicks: Vec<u64> = (0..=cfg.max_kicks).step_by(stride as usize).collect();
    if kicks.last() != Some(&cfg.max_kicks) {
        kicks.push(cfg.max_kicks);
    }
    kicks
}

fn run_records(
    params: &MapParams,
    w0: f64,
    cfg: &EnsembleConfig,
    sample_kicks: &[u64],
    range: std::ops::Range<u32>,
) -> Vec<TrajectoryRecord> {
    let indices: Vec<u32> = range.collect();
    let work = |&i: &u32| run_trajectory(params, w0, cfg.seed, i, cfg.max_kicks, sample_kicks);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        indices.par_iter().map(work).collect()
    }
    #[cfg(not(feature = "parallel"))]
    indices.iter().map(work).collect()
}

/// Monte Carlo over an ensemble of trajectories started at `w = w0` with
/// uniform random phases. Deterministic for a fixed seed under any thread
/// count: trajectories use per-index substreams and reduction runs in
/// trajectory order.
pub fn run_ensemble(params: &MapParams, w0: f64, cfg: &EnsembleConfig) -> Result<EnsembleResult> {
    let (_, result) = run_ensemble_to(params, w0, cfg, None, cfg.n_trajectories)?;
    result.ok_or_else(|| Error::Internal("ensemble finished without a result".into()))
}

/// Mid-run ensemble snapshot: trajectories completed so far, in order. The
/// checkpoint payload for long classical runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsemblePartial {
    pub params: MapParams,
    pub w0: f64,
    pub cfg: EnsembleConfig,
    pub sample_kicks: Vec<u64>,
    pub records: Vec<TrajectoryRecord>,
}

/// Start (or resume) an ensemble and complete trajectories up to index
/// `until` (exclusive, clamped to the ensemble size). Returns the snapshot;
/// when every trajectory is done the reduced result is also produced.
/// Resuming is exact: trajectories depend only on (seed, index).
pub fn run_ensemble_to(
    params: &MapParams,
    w0: f64,
    cfg: &EnsembleConfig,
    resume: Option<EnsemblePartial>,
    until: u32,
) -> Result<(EnsemblePartial, Option<EnsembleResult>)> {
    if cfg.n_trajectories < 1 {
        return Err(Error::Config("n_trajectories must be >= 1".into()));
    }
    if cfg.max_kicks < 1 {
        return Err(Error::Config("max_kicks must be >= 1".into()));
    }
    let mut partial = match resume {
        Some(p) => {
            if p.cfg != *cfg || p.params != *params || p.w0 != w0 {
                return Err(Error::Checkpoint(
                    "snapshot was produced by a different ensemble configuration".into(),
                ));
            }
            p
        }
        None => EnsemblePartial {
            params: params.clone(),
            w0,
            cfg: cfg.clone(),
            sample_kicks: sample_schedule(cfg),
            records: Vec::new(),
        },
    };
    let done = partial.records.len() as u32;
    let until = until.min(cfg.n_trajectories);
    if until > done {
        let new = run_records(params, w0, cfg, &partial.sample_kicks, done..until);
        partial.records.extend(new);
    }
    if partial.records.len() == cfg.n_trajectories as usize {
        let result = reduce_records(w0, cfg, &partial.sample_kicks, &partial.records);
        Ok((partial, Some(result)))
    } else {
        Ok((partial, None))
    }
}

fn reduce_records(
    w0: f64,
    cfg: &EnsembleConfig,
    sample_kicks: &[u64],
    records: &[TrajectoryRecord],
) -> EnsembleResult {
    let n = cfg.n_trajectories as usize;
    let n_samples = sample_kicks.len();
    let mut survival = Vec::with_capacity(n_samples);
    let mut diffusion = Vec::with_capacity(n_samples);
    for (si, &kc) in sample_kicks.iter().enumerate() {
        let mut alive = 0usize; // not escaped by kick kc (sunk counts as retained)
        let mut periods_sum = 0.0;
        let mut diff_sum = 0.0;
        let mut diff_n = 0usize;
        for rec in records {
            let (escaped_at, sunk_at) = match rec.fate {
                TrajectoryFate::Escaped { kicks, .. } => (Some(kicks), None),
                TrajectoryFate::Sunk { kicks, .. } => (None, Some(kicks)),
                TrajectoryFate::Survived => (None, None),
            };
            if escaped_at.map_or(true, |k| k > kc) {
                alive += 1;
                // last recorded sample at or before kc
                if si < rec.samples.len() {
                    periods_sum += rec.samples[si].1;
                } else if let Some(last) = rec.samples.last() {
                    periods_sum += last.1;
                }
                let sunk_by_now = sunk_at.map_or(false, |k| k <= kc);
                if !sunk_by_now && si < rec.samples.len() {
                    let dw = rec.samples[si].0 - w0;
                    diff_sum += dw * dw;
                    diff_n += 1;
                }
            }
        }
        survival.push((kc, periods_sum / alive.max(1) as f64, alive as f64 / n as f64));
        diffusion.push((kc, if diff_n > 0 { diff_sum / diff_n as f64 } else { 0.0 }));
    }

    EnsembleResult {
        seed: cfg.seed,
        n_trajectories: cfg.n_trajectories,
        w0,
        sample_kicks: sample_kicks.to_vec(),
        survival_curve: survival,
        diffusion_series: diffusion,
        fates: records.iter().map(|r| r.fate.clone()).collect(),
    }
}

/// Least-squares slope of `<(w - w0)^2>` versus kick count over a window of
/// the recorded diffusion series: the diffusion coefficient per kick.
pub fn measure_diffusion(result: &EnsembleResult, window: (u64, u64)) -> Result<f64> {
    let pts: Vec<(f64, f64)> = result
        .diffusion_series
        .iter()
        .filter(|(k, _)| *k >= window.0 && *k <= window.1)
        .map(|(k, v)| (*k as f64, *v))
        .collect();
    if pts.len() < 10 {
        return Err(Error::Estimation(format!(
            "diffusion window [{}, {}] holds {} sampled points; need >= 10",
            window.0,
            window.1,
            pts.len()
        )));
    }
    Ok(least_squares_slope(&pts))
}

pub(crate) fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let xm = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let ym = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - xm) * (p.1 - ym)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - xm) * (p.0 - xm)).sum();
    sxy / sxx
}

/// One recorded Poincaré-section point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionPoint {
    pub traj: u32,
    pub w: f64,
    pub phi: f64,
}

/// Iterate a grid of initial conditions and record the `(w, phi)` points
/// visited. Escaped or sunk trajectories are truncated.
pub fn poincare_section(
    params: &MapParams,
    initials: &[(f64, f64)],
    kicks_per_point: u64,
    n_points: u64,
) -> Result<Vec<SectionPoint>> {
    if initials.is_empty() {
        return Err(Error::Config("Poincaré section needs a non-empty grid".into()));
    }
    let stride = kicks_per_point.max(1);
    let mut out = Vec::new();
    for (ti, &(w0, phi0)) in initials.iter().enumerate() {
        let mut state = ClassicalState::new(w0, phi0);
        out.push(SectionPoint { traj: ti as u32, w: state.w, phi: state.phi });
        'traj: for _ in 0..n_points {
            for _ in 0..stride {
                match step(&state, params) {
                    StepOutcome::Bound(next) => state = next,
                    _ => break 'traj,
                }
            }
            out.push(SectionPoint { traj: ti as u32, w: state.w, phi: state.phi });
        }
    }
    Ok(out)
}

/// Diffusive ionization timescale `t_D = 2 pi r_p E_I^2 / (v_p D)` in years,
/// with `E_I = m_d v_p^2/2` and the random-phase diffusion coefficient of the
/// kick. The DMP mass cancels. Returns infinity for a vanishing kick.
pub fn diffusive_time(system: &BinarySystem, _dmp: &DmpSpec, constants: &PhysicalConstants) -> f64 {
    let eps = crate::binary::epsilon(system);
    if eps == 0.0 {
        return f64::INFINITY;
    }
    // E_I^2 / D = 1 / (2 f0^2 (m_p/M)^2) = 2 / eps^2 orbital periods
    let periods = 2.0 / (eps * eps);
    system.period_seconds() / constants.year * periods
}
