//! Run manifest: a JSON snapshot of the configuration, code version, wall
//! time, convergence parameters and output paths, written next to every CSV
//! pair. Round-trips losslessly through serde.

use anyhow::{Context, Result};
use mstnpi_core::model::{InitialStateSpec, SimulationConfig, SpectralDensity};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BathSnapshot {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub modes: Option<Vec<(f64, f64)>>,
    pub beta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigSnapshot {
    pub model: String,
    pub sites: usize,
    pub eps: f64,
    pub omega: f64,
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bath: Option<BathSnapshot>,
    pub dt: f64,
    pub n_steps: usize,
    pub memory: usize,
    pub cutoff: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub max_dim: Option<usize>,
    pub initial_state: String,
    pub observables: Vec<String>,
    pub renormalize: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fock_levels: Option<usize>,
}

impl From<&SimulationConfig> for ConfigSnapshot {
    fn from(c: &SimulationConfig) -> Self {
        let model_name = if c.model.jx == 0.0 && c.model.jy == 0.0 {
            "ising"
        } else if c.model.jx == c.model.jy {
            "xxz"
        } else {
            "heisenberg"
        };
        ConfigSnapshot {
            model: model_name.to_string(),
            sites: c.model.sites,
            eps: c.model.eps,
            omega: c.model.omega,
            jx: c.model.jx,
            jy: c.model.jy,
            jz: c.model.jz,
            bath: c.bath.as_ref().map(|b| match &b.spectral_density {
                SpectralDensity::Ohmic { xi, omega_c } => BathSnapshot {
                    kind: "ohmic".into(),
                    xi: Some(*xi),
                    omega_c: Some(*omega_c),
                    modes: None,
                    beta: b.beta,
                },
                SpectralDensity::Discrete { modes } => BathSnapshot {
                    kind: "discrete".into(),
                    xi: None,
                    omega_c: None,
                    modes: Some(modes.iter().map(|m| (m.omega, m.coupling)).collect()),
                    beta: b.beta,
                },
            }),
            dt: c.dt,
            n_steps: c.n_steps,
            memory: c.memory,
            cutoff: c.cutoff,
            max_dim: c.max_dim,
            initial_state: match &c.initial_state {
                InitialStateSpec::AllUp => "all_up".into(),
                InitialStateSpec::AllDown => "all_down".into(),
                InitialStateSpec::MpsFile(p) => p.clone(),
            },
            observables: c
                .observables
                .iter()
                .map(|o| format!("{}@{}", o.kind.name(), o.site))
                .collect(),
            renormalize: c.renormalize,
            fock_levels: c.fock_levels,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: ConfigSnapshot,
    pub code_version: String,
    pub wall_time_seconds: f64,
    /// The convergence parameters of the run: (dt, L, chi).
    pub convergence: (f64, usize, f64),
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(config: &SimulationConfig, wall_time_seconds: f64, outputs: Vec<String>) -> Self {
        RunManifest {
            config: config.into(),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_seconds,
            convergence: (config.dt, config.memory, config.cutoff),
            outputs,
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(path, json).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        Ok(serde_json::from_str(&text)?)
    }
}
