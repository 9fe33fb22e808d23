//! Run configuration: JSON file + `--set` overrides, strict key checking,
//! documented defaults.

use std::path::{Path, PathBuf};

use kepmap::io::OutputFormat;
use kepmap::{BinarySystem, Error, PhysicalConstants, Result};
use serde::{Deserialize, Serialize};

/// Default seed for every stochastic run; fixed so that runs are reproducible
/// unless a seed is chosen explicitly ("KEPM" in ASCII).
pub const DEFAULT_SEED: u64 = 0x4B45_504D;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "KEPMAP_OUT";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSpec {
    pub mu_min: f64,
    pub mu_max: f64,
    pub points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            mu_min: 1e-22,
            mu_max: 1e-13,
            points: 200,
        }
    }
}

/// A binary system given inline instead of by preset name. Two of the three
/// orbital elements suffice; the third is derived.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineSystem {
    pub name: String,
    pub central_mass_kg: f64,
    pub planet_mass_kg: f64,
    #[serde(default)]
    pub orbit_radius_m: Option<f64>,
    #[serde(default)]
    pub orbit_velocity_m_s: Option<f64>,
    #[serde(default)]
    pub period_yr: Option<f64>,
    pub kick_amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Subcommand echo; optional in the file, must match the CLI subcommand
    /// when both are given.
    pub command: Option<String>,
    /// Preset name; exactly one of `system`/`system_inline`.
    pub system: Option<String>,
    pub system_inline: Option<InlineSystem>,
    /// DMP-to-proton mass ratio for single-mass commands (capture).
    pub mu: Option<f64>,
    /// Initial dimensionless energy of classical trajectories.
    pub w0: f64,
    /// Raw quantum-map parameters (quantum-sim runs at desk scale).
    pub k: Option<f64>,
    pub omega: Option<f64>,
    pub n_i: Option<f64>,
    pub grid: GridSpec,
    pub n_traj: u32,
    pub max_kicks: u64,
    pub n_periods: u64,
    pub lattice_pad: f64,
    pub leak_limit: Option<f64>,
    pub measure_window: Option<(u64, u64)>,
    pub w_min: f64,
    /// Chaotic-escape plateau lifetime (years).
    pub t_h_years: f64,
    /// Accumulation time for capture estimates (years); default is the age
    /// of the universe.
    pub capture_time_years: f64,
    pub seed: u64,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    /// Save a resumable snapshot here (classical-sim / quantum-sim).
    pub checkpoint: Option<PathBuf>,
    /// Resume from this snapshot instead of starting fresh.
    pub resume: Option<PathBuf>,
    /// Stop early after this many trajectories (classical-sim) or periods
    /// (quantum-sim), writing only the checkpoint; requires `checkpoint`.
    pub stop_after: Option<u64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: None,
            system: None,
            system_inline: None,
            mu: None,
            w0: -1.0,
            k: None,
            omega: None,
            n_i: None,
            grid: GridSpec::default(),
            n_traj: 1000,
            max_kicks: 100_000,
            n_periods: 2000,
            lattice_pad: 4.0,
            leak_limit: None,
            measure_window: None,
            w_min: 1e-4,
            t_h_years: 1e7,
            capture_time_years: 1.38e10,
            seed: DEFAULT_SEED,
            format: OutputFormat::Csv,
            out: None,
            checkpoint: None,
            resume: None,
            stop_after: None,
        }
    }
}

impl RunConfig {
    /// Load from an optional JSON file, then apply `key=value` overrides.
    /// Unknown keys are rejected with the offending key named.
    pub fn resolve(path: Option<&Path>, sets: &[String]) -> Result<RunConfig> {
        let mut value = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
                serde_json::from_str(&text)
                    .map_err(|e| Error::Config(format!("config {}: {e}", p.display())))?
            }
            None => serde_json::Value::Object(Default::default()),
        };
        for s in sets {
            let (key, raw) = s
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("--set needs key=value, got {s:?}")))?;
            set_path(&mut value, key, parse_override(raw))?;
        }
        let config: RunConfig = serde_json::from_value(value)
            .map_err(|e| Error::Config(format!("invalid config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.system.is_some() && self.system_inline.is_some() {
            return Err(Error::Config(
                "give either a preset `system` or a `system_inline`, not both".into(),
            ));
        }
        if self.grid.points < 2 {
            return Err(Error::Config("grid.points must be >= 2".into()));
        }
        if !(self.grid.mu_min > 0.0 && self.grid.mu_max > self.grid.mu_min) {
            return Err(Error::Config(format!(
                "grid needs 0 < mu_min < mu_max, got [{}, {}]",
                self.grid.mu_min, self.grid.mu_max
            )));
        }
        if self.stop_after.is_some() && self.checkpoint.is_none() {
            return Err(Error::Config(
                "stop_after without a `checkpoint` path would discard the run".into(),
            ));
        }
        Ok(())
    }

    /// Build the configured binary system; errors when none is given.
    pub fn system(&self, constants: &PhysicalConstants) -> Result<BinarySystem> {
        if let Some(name) = &self.system {
            return kepmap::binary::preset(name, constants);
        }
        if let Some(inline) = &self.system_inline {
            return BinarySystem::from_elements(
                inline.name.clone(),
                constants,
                inline.central_mass_kg,
                inline.planet_mass_kg,
                inline.orbit_radius_m,
                inline.orbit_velocity_m_s,
                inline.period_yr,
                inline.kick_amplitude,
            );
        }
        Err(Error::Config(
            "this command needs a binary system: set `system` (preset name) or `system_inline`"
                .into(),
        ))
    }
}

/// Interpret an override value: JSON if it parses, bare string otherwise
/// (so `--set system=sun-jupiter` works without quoting).
fn parse_override(raw: &str) -> serde_json::Value {
    serde_json::from_str(raw).unwrap_or_else(|_| serde_json::Value::String(raw.to_string()))
}

/// Set a dotted path like `grid.points` inside a JSON object tree.
fn set_path(value: &mut serde_json::Value, key: &str, new: serde_json::Value) -> Result<()> {
    let mut cursor = value;
    let mut parts = key.split('.').peekable();
    while let Some(part) = parts.next() {
        let obj = cursor
            .as_object_mut()
            .ok_or_else(|| Error::Config(format!("--set {key}: {part} is not an object")))?;
        if parts.peek().is_none() {
            obj.insert(part.to_string(), new);
            return Ok(());
        }
        cursor = obj
            .entry(part.to_string())
            .or_insert_with(|| serde_json::Value::Object(Default::default()));
    }
    Err(Error::Config(format!("--set {key}: empty key")))
}
