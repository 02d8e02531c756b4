//! CSV trajectory and bond-dimension writers. Formatting is plain `{}` for
//! floats (shortest round-trip), so identical runs produce bit-identical
//! files.

use anyhow::{Context, Result};
use mstnpi_core::engine::StepRecord;
use mstnpi_core::model::Observable;
use std::path::Path;

/// `step,time,site,observable,value_re,value_im`, one row per observable per
/// step, steps 1..=N.
pub fn write_trajectory(
    path: &Path,
    observables: &[Observable],
    records: &[StepRecord],
) -> Result<()> {
    let mut out = String::from("step,time,site,observable,value_re,value_im\n");
    for rec in records.iter().filter(|r| r.step > 0) {
        for (obs, val) in observables.iter().zip(&rec.values) {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                rec.step,
                rec.time,
                obs.site,
                obs.kind.name(),
                val.re,
                val.im
            ));
        }
    }
    std::fs::write(path, out).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// `step,time,max_bond,avg_bond`, steps 1..=N.
pub fn write_bonds(path: &Path, records: &[StepRecord]) -> Result<()> {
    let mut out = String::from("step,time,max_bond,avg_bond\n");
    for rec in records.iter().filter(|r| r.step > 0) {
        out.push_str(&format!(
            "{},{},{},{}\n",
            rec.step, rec.time, rec.max_bond, rec.avg_bond
        ));
    }
    std::fs::write(path, out).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Oracle trajectories reuse the trajectory layout; values arrive as plain
/// (site, name, re, im) rows per step.
pub fn write_oracle_trajectory(
    path: &Path,
    rows: &[(usize, f64, usize, &'static str, f64, f64)],
) -> Result<()> {
    let mut out = String::from("step,time,site,observable,value_re,value_im\n");
    for (step, time, site, name, re, im) in rows {
        out.push_str(&format!("{step},{time},{site},{name},{re},{im}\n"));
    }
    std::fs::write(path, out).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
