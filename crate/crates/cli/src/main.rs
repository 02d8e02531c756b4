//! Command-line front end: parse a config file, run MS-TNPI simulations (or
//! the brute-force reference solvers), sweep convergence parameters, and emit
//! CSV trajectories with bond-dimension logs and a JSON run manifest.

mod etacache;
mod manifest;
mod mpsfile;
mod output;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use mstnpi_core::engine::{product_initial_state, EngineState};
use mstnpi_core::influence::eta_coefficients;
use mstnpi_core::model::{
    embed, parse_config, InitialStateSpec, SimulationConfig, SpectralDensity,
};
use mstnpi_core::mp::MatrixProductState;
use mstnpi_core::oracle::{
    brute_force_path_sum, dense_liouville_trajectory, exact_diag_system_bath, unvectorize_density,
    DenseState,
};
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "mstnpi",
    version,
    about = "Multisite tensor network path integrals for dissipative spin chains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum OracleKind {
    None,
    PathSum,
    Dense,
    ExactDiag,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Directory for CSV and manifest outputs.
        #[arg(long, default_value = ".")]
        output: PathBuf,
        /// Also run a reference solver and write a paired oracle CSV.
        #[arg(long, value_enum, default_value_t = OracleKind::None)]
        oracle: OracleKind,
        /// Repeat the run varying one parameter: "dt=0.25,0.125", "L=2,3,4"
        /// or "chi=1e-9,1e-11".
        #[arg(long)]
        scan: Option<String>,
        /// Cache file for the eta-coefficient table.
        #[arg(long)]
        eta_cache: Option<PathBuf>,
        /// Write the final reduced density MPS to this file.
        #[arg(long)]
        dump_final_mps: Option<PathBuf>,
    },
    /// Run a reference solver alone and dump its trajectory.
    Oracle {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        kind: OracleKind,
        #[arg(long, default_value = ".")]
        output: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            output,
            oracle,
            scan,
            eta_cache,
            dump_final_mps,
        } => run_command(&config, &output, oracle, scan, eta_cache, dump_final_mps),
        Command::Oracle {
            config,
            kind,
            output,
        } => oracle_command(&config, kind, &output),
    };
    if let Err(e) = result {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn load_config(path: &Path) -> Result<SimulationConfig> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(parse_config(&text)?)
}

fn resolve_initial(config: &SimulationConfig, config_dir: &Path) -> Result<MatrixProductState> {
    match &config.initial_state {
        InitialStateSpec::MpsFile(rel) => {
            let path = config_dir.join(rel);
            let mps = mpsfile::load(&path)?;
            if mps.len() != config.model.sites {
                bail!(
                    "initial MPS has {} sites, config has {}",
                    mps.len(),
                    config.model.sites
                );
            }
            Ok(mps)
        }
        spec => Ok(product_initial_state(&config.model, spec)?),
    }
}

fn run_command(
    config_path: &Path,
    output: &Path,
    oracle: OracleKind,
    scan: Option<String>,
    eta_cache: Option<PathBuf>,
    dump_final_mps: Option<PathBuf>,
) -> Result<()> {
    let base = load_config(config_path)?;
    let config_dir = config_path.parent().unwrap_or(Path::new(".")).to_path_buf();
    std::fs::create_dir_all(output)
        .with_context(|| format!("creating output directory {}", output.display()))?;

    let Some(scan_spec) = scan else {
        run_single(
            &base,
            &config_dir,
            output,
            "",
            oracle,
            eta_cache.as_deref(),
            dump_final_mps.as_deref(),
        )?;
        return Ok(());
    };

    let (variants, labels) = scan_variants(&base, &scan_spec)?;
    let threads = scan_threads(variants.len());
    let config_dir = &config_dir;
    let eta_cache = eta_cache.as_deref();
    let base_ref = &base;
    for chunk in variants
        .iter()
        .zip(&labels)
        .collect::<Vec<_>>()
        .chunks(threads)
    {
        std::thread::scope(|scope| -> Result<()> {
            let mut handles = Vec::new();
            for (cfg, label) in chunk {
                handles.push(scope.spawn(move || {
                    // the cache key is (bath, dt, L); only pass the cache
                    // where the scanned value leaves the key unchanged
                    let cache = if cfg.dt == base_ref.dt && cfg.memory == base_ref.memory {
                        eta_cache
                    } else {
                        None
                    };
                    run_single(cfg, config_dir, output, label, oracle, cache, None)
                }));
            }
            for h in handles {
                h.join().map_err(|_| anyhow!("scan worker panicked"))??;
            }
            Ok(())
        })?;
    }
    Ok(())
}

fn scan_threads(n_jobs: usize) -> usize {
    let hw = std::thread::available_parallelism().map_or(1, |v| v.get());
    let cap = std::env::var("MSTNPI_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or(hw);
    cap.clamp(1, n_jobs.max(1))
}

fn scan_variants(
    base: &SimulationConfig,
    spec: &str,
) -> Result<(Vec<SimulationConfig>, Vec<String>)> {
    let (param, values) = spec
        .split_once('=')
        .ok_or_else(|| anyhow!("--scan expects 'param=v1,v2,...', got '{spec}'"))?;
    let mut variants = Vec::new();
    let mut labels = Vec::new();
    for v in values.split(',') {
        let v = v.trim();
        let mut cfg = base.clone();
        match param {
            "dt" => {
                cfg.dt = v.parse().with_context(|| format!("bad dt value '{v}'"))?;
            }
            "L" => {
                cfg.memory = v.parse().with_context(|| format!("bad L value '{v}'"))?;
            }
            "chi" => {
                cfg.cutoff = v.parse().with_context(|| format!("bad chi value '{v}'"))?;
            }
            other => bail!("--scan parameter must be dt, L or chi (got '{other}')"),
        }
        cfg.validate()?;
        variants.push(cfg);
        labels.push(format!("_{param}{v}"));
    }
    Ok((variants, labels))
}

fn run_single(
    config: &SimulationConfig,
    config_dir: &Path,
    output: &Path,
    label: &str,
    oracle: OracleKind,
    eta_cache: Option<&Path>,
    dump_final_mps: Option<&Path>,
) -> Result<()> {
    let started = Instant::now();
    let initial = resolve_initial(config, config_dir)?;
    let eta = match (&config.bath, eta_cache) {
        (Some(bath), Some(cache)) => Some(etacache::load_or_compute(
            cache,
            bath,
            config.dt,
            config.memory,
        )?),
        (Some(bath), None) => Some(eta_coefficients(bath, config.dt, config.memory, None)?),
        (None, _) => None,
    };
    let mut engine = EngineState::with_eta_table(config.clone(), initial, eta)?;
    engine.run()?;
    for diag in engine.diagnostics() {
        eprintln!("warning: {diag}");
    }

    let traj_path = output.join(format!("traj{label}.csv"));
    let bonds_path = output.join(format!("bonds{label}.csv"));
    output::write_trajectory(&traj_path, &config.observables, engine.records())?;
    output::write_bonds(&bonds_path, engine.records())?;
    let mut outputs = vec![
        traj_path.display().to_string(),
        bonds_path.display().to_string(),
    ];

    if oracle != OracleKind::None {
        let oracle_path = output.join(format!("oracle_traj{label}.csv"));
        let rows = oracle_rows(config, config_dir, oracle)?;
        output::write_oracle_trajectory(&oracle_path, &rows)?;
        outputs.push(oracle_path.display().to_string());
    }
    if let Some(path) = dump_final_mps {
        mpsfile::save(path, engine.density())?;
        outputs.push(path.display().to_string());
    }

    // manifest written last so its presence marks a complete run
    let manifest_path = output.join(format!("manifest{label}.json"));
    manifest::RunManifest::new(config, started.elapsed().as_secs_f64(), outputs)
        .write(&manifest_path)?;
    Ok(())
}

fn oracle_command(config_path: &Path, kind: OracleKind, output: &Path) -> Result<()> {
    if kind == OracleKind::None {
        bail!("--kind must be path-sum, dense or exact-diag");
    }
    let config = load_config(config_path)?;
    let config_dir = config_path.parent().unwrap_or(Path::new("."));
    std::fs::create_dir_all(output)?;
    let rows = oracle_rows(&config, config_dir, kind)?;
    let path = output.join("oracle_traj.csv");
    output::write_oracle_trajectory(&path, &rows)?;
    Ok(())
}

type OracleRow = (usize, f64, usize, &'static str, f64, f64);

fn oracle_rows(
    config: &SimulationConfig,
    config_dir: &Path,
    kind: OracleKind,
) -> Result<Vec<OracleRow>> {
    let p = config.model.sites;
    let d = config.model.local_dim;
    let initial = resolve_initial(config, config_dir)?;
    let rho0 = unvectorize_density(&initial.to_dense_vector()?, p, d);

    let states: Vec<DenseState> = match kind {
        OracleKind::None => unreachable!(),
        OracleKind::Dense => {
            dense_liouville_trajectory(&config.model, &rho0, config.dt, config.n_steps)?
        }
        OracleKind::PathSum => {
            let table = match &config.bath {
                Some(bath) => Some(eta_coefficients(bath, config.dt, config.memory, None)?),
                None => None,
            };
            brute_force_path_sum(
                &config.model,
                table.as_ref(),
                &rho0,
                config.dt,
                config.n_steps,
            )?
        }
        OracleKind::ExactDiag => {
            let bath = config
                .bath
                .as_ref()
                .ok_or_else(|| anyhow!("exact-diag oracle needs a bath (bath_modes + beta)"))?;
            let SpectralDensity::Discrete { modes } = &bath.spectral_density else {
                bail!("exact-diag oracle needs a discrete bath: set bath_modes in the config");
            };
            let levels = config
                .fock_levels
                .ok_or_else(|| anyhow!("exact-diag oracle needs fock_levels in the config"))?;
            let per_mode = vec![levels; modes.len()];
            let times: Vec<f64> = (0..=config.n_steps)
                .map(|n| n as f64 * config.dt)
                .collect();
            exact_diag_system_bath(&config.model, modes, &per_mode, bath.beta, &rho0, &times)?
        }
    };

    let mut rows = Vec::new();
    for (step, st) in states.iter().enumerate().skip(1) {
        for obs in &config.observables {
            let op = embed(&obs.kind.matrix(), p, obs.site, 1);
            let val = st.rho.mul(&op).trace();
            rows.push((
                step,
                step as f64 * config.dt,
                obs.site,
                obs.kind.name(),
                val.re,
                val.im,
            ));
        }
    }
    Ok(rows)
}
