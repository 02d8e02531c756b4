//! Text cache for eta-coefficient tables, keyed by the bath parameters, the
//! timestep and the memory length.
//!
//! Layout (version 1):
//! ```text
//! MSTNPI-ETA v1
//! bath ohmic <xi> <omega_c> <beta>        # or: bath discrete <beta> w:c w:c ...
//! coupling <eigenvalues, space separated>
//! dt <dt>
//! memory <L>
//! eta_00 <re> <im>
//! eta_diag <re> <im>
//! eta_k0 <re> <im>                        # L lines, separation 1..L
//! ...
//! eta_sep <re> <im>                       # L lines
//! ...
//! ```
//! A cache whose key line does not match the requested bath/dt/L is ignored
//! and recomputed.

use anyhow::{bail, Context, Result};
use mstnpi_core::influence::{eta_coefficients, EtaTable};
use mstnpi_core::model::{BathModel, SpectralDensity};
use num_complex::Complex64 as C64;
use std::path::Path;

fn bath_key(bath: &BathModel) -> String {
    match &bath.spectral_density {
        SpectralDensity::Ohmic { xi, omega_c } => {
            format!("bath ohmic {xi:.17e} {omega_c:.17e} {:.17e}", bath.beta)
        }
        SpectralDensity::Discrete { modes } => {
            let parts: Vec<String> = modes
                .iter()
                .map(|m| format!("{:.17e}:{:.17e}", m.omega, m.coupling))
                .collect();
            format!("bath discrete {:.17e} {}", bath.beta, parts.join(" "))
        }
    }
}

pub fn save(path: &Path, bath: &BathModel, table: &EtaTable) -> Result<()> {
    let (eta_00, eta_diag, eta_k0, eta_sep) = table.class_values();
    let mut out = String::new();
    out.push_str("MSTNPI-ETA v1\n");
    out.push_str(&bath_key(bath));
    out.push('\n');
    let eigs: Vec<String> = table
        .coupling_eigs()
        .iter()
        .map(|e| format!("{e:.17e}"))
        .collect();
    out.push_str(&format!("coupling {}\n", eigs.join(" ")));
    out.push_str(&format!("dt {:.17e}\n", table.dt()));
    out.push_str(&format!("memory {}\n", table.memory()));
    let fmt = |label: &str, z: &C64| format!("{label} {:.17e} {:.17e}\n", z.re, z.im);
    out.push_str(&fmt("eta_00", &eta_00));
    out.push_str(&fmt("eta_diag", &eta_diag));
    for z in eta_k0 {
        out.push_str(&fmt("eta_k0", z));
    }
    for z in eta_sep {
        out.push_str(&fmt("eta_sep", z));
    }
    std::fs::write(path, out).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Load a cached table if the key matches; None on mismatch.
pub fn load(path: &Path, bath: &BathModel, dt: f64, memory: usize) -> Result<Option<EtaTable>> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e).with_context(|| format!("reading {}", path.display())),
    };
    let mut lines = text.lines();
    if lines.next().unwrap_or_default().trim() != "MSTNPI-ETA v1" {
        bail!("{}: not an MSTNPI-ETA v1 file", path.display());
    }
    if lines.next().unwrap_or_default().trim() != bath_key(bath) {
        return Ok(None);
    }
    let coupling_line = lines.next().context("missing coupling line")?;
    let eigs: Vec<f64> = coupling_line
        .strip_prefix("coupling")
        .context("expected coupling line")?
        .split_whitespace()
        .map(|v| v.parse::<f64>().context("bad coupling value"))
        .collect::<Result<_>>()?;
    let dt_line = lines.next().context("missing dt line")?;
    let file_dt: f64 = dt_line
        .strip_prefix("dt")
        .context("expected dt line")?
        .trim()
        .parse()
        .context("bad dt")?;
    let mem_line = lines.next().context("missing memory line")?;
    let file_mem: usize = mem_line
        .strip_prefix("memory")
        .context("expected memory line")?
        .trim()
        .parse()
        .context("bad memory")?;
    if (file_dt - dt).abs() > 1e-15 || file_mem != memory {
        return Ok(None);
    }
    let mut parse_entry = |label: &str| -> Result<C64> {
        let line = lines.next().with_context(|| format!("missing {label}"))?;
        let rest = line
            .strip_prefix(label)
            .with_context(|| format!("expected {label} line, got '{line}'"))?;
        let mut parts = rest.split_whitespace();
        let re: f64 = parts.next().context("missing re")?.parse()?;
        let im: f64 = parts.next().context("missing im")?.parse()?;
        Ok(C64::new(re, im))
    };
    let eta_00 = parse_entry("eta_00")?;
    let eta_diag = parse_entry("eta_diag")?;
    let mut eta_k0 = Vec::with_capacity(memory);
    for _ in 0..memory {
        eta_k0.push(parse_entry("eta_k0")?);
    }
    let mut eta_sep = Vec::with_capacity(memory);
    for _ in 0..memory {
        eta_sep.push(parse_entry("eta_sep")?);
    }
    Ok(Some(EtaTable::from_class_values(
        dt, memory, eigs, eta_00, eta_diag, eta_k0, eta_sep,
    )?))
}

/// Load when fresh, otherwise compute and store.
pub fn load_or_compute(
    path: &Path,
    bath: &BathModel,
    dt: f64,
    memory: usize,
) -> Result<EtaTable> {
    if let Some(t) = load(path, bath, dt, memory)? {
        return Ok(t);
    }
    let table = eta_coefficients(bath, dt, memory, None)?;
    save(path, bath, &table)?;
    Ok(table)
}
