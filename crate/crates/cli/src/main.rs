//! Command-line front end: regime tables, lifetime curves, classical and
//! quantum map simulations, capture reports, and preset listing, with
//! deterministic outputs and run manifests.

mod config;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use kepmap::binary::{self, epsilon};
use kepmap::classical::{self, EnsembleConfig, EnsemblePartial, MapParams};
use kepmap::io::{self, OutputFormat, Table};
use kepmap::quantum::{self, QuantumRunParams, QuantumRunState};
use kepmap::{capture, checkpoint, regime, DmpSpec, Error, PhysicalConstants};
use serde::Serialize;

use config::{RunConfig, OUT_DIR_ENV};

#[derive(Parser)]
#[command(
    name = "kepmap",
    version,
    about = "Kepler-map dynamics of light dark matter in rotating binary systems"
)]
struct Cli {
    /// JSON configuration file; flags and --set override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override a config key, e.g. --set grid.points=100 --set system=sun-jupiter
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    sets: Vec<String>,

    /// Output directory (default: $KEPMAP_OUT or the working directory).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads; affects speed only, never results.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand, Clone)]
enum Command {
    /// Regime classification table over a mass-ratio grid.
    Regimes,
    /// Ionization lifetime table over a mass-ratio grid.
    Lifetime,
    /// Classical map Monte Carlo: survival curve, diffusion, escape times.
    ClassicalSim,
    /// Quantum map evolution: ionization curve and photon distribution.
    QuantumSim,
    /// Capture cross-section, quantum halo border, and accumulated mass.
    Capture,
    /// List the shipped binary-system presets.
    Presets,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Regimes => "regimes",
            Command::Lifetime => "lifetime",
            Command::ClassicalSim => "classical-sim",
            Command::QuantumSim => "quantum-sim",
            Command::Capture => "capture",
            Command::Presets => "presets",
        }
    }

    fn from_name(name: &str) -> Option<Command> {
        match name {
            "regimes" => Some(Command::Regimes),
            "lifetime" => Some(Command::Lifetime),
            "classical-sim" => Some(Command::ClassicalSim),
            "quantum-sim" => Some(Command::QuantumSim),
            "capture" => Some(Command::Capture),
            "presets" => Some(Command::Presets),
            _ => None,
        }
    }
}

/// Manifest written next to every set of output files.
#[derive(Serialize)]
struct RunManifest {
    tool_version: &'static str,
    command: String,
    config: RunConfig,
    constants: PhysicalConstants,
    wall_time_s: f64,
    /// file name -> SHA-256 of content
    outputs: BTreeMap<String, String>,
}

fn main() {
    let cli = Cli::parse();
    std::process::exit(match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) => 2,
                Error::Domain(_) | Error::Estimation(_) => 3,
                Error::Io { .. } | Error::Checkpoint(_) => 4,
                Error::Internal(_) => 1,
            }
        }
    });
}

fn run(cli: Cli) -> kepmap::Result<()> {
    let mut cfg = RunConfig::resolve(cli.config.as_deref(), &cli.sets)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(format) = cli.format {
        cfg.format = match format {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        };
    }
    if let Some(out) = cli.out {
        cfg.out = Some(out);
    }

    let command = match (cli.command, cfg.command.as_deref()) {
        (Some(c), Some(name)) => {
            if c.name() != name {
                return Err(Error::Config(format!(
                    "subcommand {} conflicts with config command {name:?}",
                    c.name()
                )));
            }
            c
        }
        (Some(c), None) => c,
        (None, Some(name)) => Command::from_name(name)
            .ok_or_else(|| Error::Config(format!("unknown command {name:?} in config")))?,
        (None, None) => {
            return Err(Error::Config(
                "no command: give a subcommand or set `command` in the config".into(),
            ))
        }
    };
    cfg.command = Some(command.name().to_string());

    if let Some(n) = cli.threads {
        configure_threads(n)?;
    }

    let constants = PhysicalConstants::default();
    constants.validate()?;
    let started = Instant::now();
    let mut outputs = BTreeMap::new();

    match command {
        Command::Regimes => {
            let system = cfg.system(&constants)?;
            let grid = regime::log_grid(cfg.grid.mu_min, cfg.grid.mu_max, cfg.grid.points)?;
            let rows = regime::figure1_table(&system, &constants, &grid)?;
            emit(&io::regime_table(&rows), "regimes", &cfg, &mut outputs)?;
        }
        Command::Lifetime => {
            let system = cfg.system(&constants)?;
            let grid = regime::log_grid(cfg.grid.mu_min, cfg.grid.mu_max, cfg.grid.points)?;
            let rows = regime::figure2_table(&system, &constants, &grid, cfg.t_h_years)?;
            emit(&io::lifetime_table(&rows), "lifetime", &cfg, &mut outputs)?;
        }
        Command::ClassicalSim => {
            let system = cfg.system(&constants)?;
            let mut params = MapParams::sine(epsilon(&system));
            params.w_min = cfg.w_min;
            let ensemble = EnsembleConfig::new(cfg.n_traj, cfg.max_kicks, cfg.seed);
            let resume: Option<EnsemblePartial> = match &cfg.resume {
                Some(p) => Some(checkpoint::load(checkpoint::CLASSICAL_KIND, p)?),
                None => None,
            };
            let until = cfg
                .stop_after
                .map_or(cfg.n_traj, |n| n.min(cfg.n_traj as u64) as u32);
            let (partial, result) =
                classical::run_ensemble_to(&params, cfg.w0, &ensemble, resume, until)?;
            if let Some(p) = &cfg.checkpoint {
                checkpoint::save(checkpoint::CLASSICAL_KIND, &partial, p)?;
                println!("checkpoint {}", p.display());
            }
            match result {
                Some(result) => {
                    emit(&io::survival_table(&result), "survival", &cfg, &mut outputs)?;
                    emit(&io::escape_table(&result), "escape", &cfg, &mut outputs)?;
                }
                None => println!("stopped after {until} of {} trajectories", cfg.n_traj),
            }
        }
        Command::QuantumSim => {
            let (k, omega, n_i) = match (cfg.k, cfg.omega, cfg.n_i) {
                (Some(k), Some(omega), Some(n_i)) => (k, omega, n_i),
                _ => {
                    return Err(Error::Config(
                        "quantum-sim needs k, omega, and n_i (desk-scale map parameters)".into(),
                    ))
                }
            };
            let mut params = QuantumRunParams::new(k, omega, n_i, cfg.n_periods);
            params.lattice.pad = cfg.lattice_pad;
            if let Some(limit) = cfg.leak_limit {
                params.lattice.leak_limit = limit;
            }
            if cfg.measure_window.is_some() {
                params.measure_window = cfg.measure_window;
            }
            let resume: Option<QuantumRunState> = match &cfg.resume {
                Some(p) => Some(checkpoint::load(checkpoint::QUANTUM_KIND, p)?),
                None => None,
            };
            let until = cfg.stop_after.map_or(cfg.n_periods, |n| n.min(cfg.n_periods));
            let (snapshot, result) = quantum::run_to(&params, resume, until)?;
            if let Some(p) = &cfg.checkpoint {
                checkpoint::save(checkpoint::QUANTUM_KIND, &snapshot, p)?;
                println!("checkpoint {}", p.display());
            }
            match result {
                Some(result) => {
                    emit(&io::ionization_table(&result), "ionization", &cfg, &mut outputs)?;
                    emit(&io::distribution_table(&result), "distribution", &cfg, &mut outputs)?;
                    println!(
                        "fitted localization length {} (k^2/2 = {})",
                        result.fitted_length, result.theoretical_length
                    );
                }
                None => println!("stopped after {until} of {} periods", cfg.n_periods),
            }
        }
        Command::Capture => {
            let system = cfg.system(&constants)?;
            let mu = cfg
                .mu
                .ok_or_else(|| Error::Config("capture needs `mu` (DMP mass ratio)".into()))?;
            let report =
                capture::capture_report(&system, &DmpSpec::new(mu), &constants, cfg.capture_time_years)?;
            match cfg.format {
                OutputFormat::Json => {
                    let path = out_dir(&cfg)?.join("capture.json");
                    let hash = io::write_json_report(&report, &path)?;
                    println!("wrote {} sha256={hash}", path.display());
                    outputs.insert("capture.json".into(), hash);
                }
                OutputFormat::Csv => {
                    emit(&io::capture_table(&report), "capture", &cfg, &mut outputs)?;
                }
            }
        }
        Command::Presets => {
            let mut table = Table::new(&["name", "mass_ratio", "period_yr", "epsilon", "chaos_border"]);
            for name in ["sun-jupiter", "sun-jupiter-weak", "halley-kick", "sgrA-s2"] {
                let system = binary::preset(name, &constants)?;
                table.push(vec![
                    io::Cell::Text(name.into()),
                    io::Cell::Float(system.mass_ratio()),
                    io::Cell::Float(system.period_yr),
                    io::Cell::Float(epsilon(&system)),
                    io::Cell::Float(binary::effective_chaos_border(&system)),
                ])?;
            }
            print!("{}", table.render(cfg.format));
            return Ok(());
        }
    }

    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION"),
        command: command.name().to_string(),
        config: cfg.clone(),
        constants,
        wall_time_s: started.elapsed().as_secs_f64(),
        outputs,
    };
    let manifest_path = out_dir(&cfg)?.join("manifest.json");
    io::write_json_report(&manifest, &manifest_path)?;
    println!("manifest {}", manifest_path.display());
    Ok(())
}

fn out_dir(cfg: &RunConfig) -> kepmap::Result<PathBuf> {
    let dir = cfg
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    Ok(dir)
}

fn emit(
    table: &Table,
    stem: &str,
    cfg: &RunConfig,
    outputs: &mut BTreeMap<String, String>,
) -> kepmap::Result<()> {
    let ext = match cfg.format {
        OutputFormat::Csv => "csv",
        OutputFormat::Json => "json",
    };
    let file = format!("{stem}.{ext}");
    let path = out_dir(cfg)?.join(&file);
    let hash = io::write_table(table, cfg.format, &path)?;
    println!("wrote {} sha256={hash}", path.display());
    outputs.insert(file, hash);
    Ok(())
}

fn configure_threads(n: usize) -> kepmap::Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Config(format!("--threads: {e}")))
}
