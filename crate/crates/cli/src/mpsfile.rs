//! Text container for matrix product states.
//!
//! Format (version 1):
//! ```text
//! MSTNPI-MPS v1
//! sites <P>
//! site_dims <d2 per site, space separated>
//! bond_dims <P-1 bond dimensions, space separated; empty line content for P=1>
//! tensor <i>
//! <re> <im>        # one element per line
//! ...
//! ```
//! Element order per tensor is row-major over (left bond, site, right bond),
//! with the missing bond omitted on terminal tensors.

use anyhow::{bail, Context, Result};
use mstnpi_core::mp::MatrixProductState;
use mstnpi_core::tensor::{Index, Tensor};
use num_complex::Complex64 as C64;
use std::path::Path;

pub fn save(path: &Path, mps: &MatrixProductState) -> Result<()> {
    let p = mps.len();
    let bond_dims = mps.bond_dims();
    let mut out = String::new();
    out.push_str("MSTNPI-MPS v1\n");
    out.push_str(&format!("sites {p}\n"));
    let site_dims: Vec<String> = mps.sites().iter().map(|s| s.dim().to_string()).collect();
    out.push_str(&format!("site_dims {}\n", site_dims.join(" ")));
    let bonds: Vec<String> = bond_dims.iter().map(|b| b.to_string()).collect();
    out.push_str(&format!("bond_dims {}\n", bonds.join(" ")));
    for i in 0..p {
        out.push_str(&format!("tensor {i}\n"));
        let t = &mps.tensors()[i];
        // order: left bond, site, right bond
        let mut order: Vec<usize> = Vec::new();
        if i > 0 {
            let left = mps.tensors()[i - 1].shared_ids(t);
            for id in left {
                order.push(t.position(id).unwrap());
            }
        }
        order.push(t.position(mps.sites()[i].id()).unwrap());
        if i + 1 < p {
            let right = t.shared_ids(&mps.tensors()[i + 1]);
            for id in right {
                order.push(t.position(id).unwrap());
            }
        }
        if order.len() != t.rank() {
            bail!("tensor {i} carries indices outside the chain layout");
        }
        let permuted = t.permuted(&order);
        for z in permuted.data() {
            out.push_str(&format!("{:.17e} {:.17e}\n", z.re, z.im));
        }
    }
    std::fs::write(path, out).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn load(path: &Path) -> Result<MatrixProductState> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header.trim() != "MSTNPI-MPS v1" {
        bail!("{}: not an MSTNPI-MPS v1 file", path.display());
    }
    let parse_counts = |line: Option<&str>, key: &str| -> Result<Vec<usize>> {
        let line = line.with_context(|| format!("missing '{key}' line"))?;
        let rest = line
            .strip_prefix(key)
            .with_context(|| format!("expected '{key}' line, got '{line}'"))?;
        rest.split_whitespace()
            .map(|v| v.parse::<usize>().with_context(|| format!("bad {key} value '{v}'")))
            .collect()
    };
    let sites_line = parse_counts(lines.next(), "sites")?;
    let p = *sites_line.first().context("empty 'sites' line")?;
    if p == 0 {
        bail!("sites must be at least 1");
    }
    let site_dims = parse_counts(lines.next(), "site_dims")?;
    if site_dims.len() != p {
        bail!("expected {p} site dims, got {}", site_dims.len());
    }
    let bond_dims = parse_counts(lines.next(), "bond_dims")?;
    if bond_dims.len() != p.saturating_sub(1) {
        bail!("expected {} bond dims, got {}", p - 1, bond_dims.len());
    }
    let mut sites = Vec::with_capacity(p);
    let mut bonds = Vec::with_capacity(bond_dims.len());
    for (i, &d2) in site_dims.iter().enumerate() {
        sites.push(Index::site(d2).with_site(i as u32 + 1));
    }
    for (i, &b) in bond_dims.iter().enumerate() {
        bonds.push(Index::spatial(b).with_site(i as u32 + 1));
    }
    let mut tensors = Vec::with_capacity(p);
    for i in 0..p {
        let marker = lines.next().with_context(|| format!("missing tensor {i}"))?;
        if marker.trim() != format!("tensor {i}") {
            bail!("expected 'tensor {i}', got '{marker}'");
        }
        let mut idx: Vec<Index> = Vec::new();
        if i > 0 {
            idx.push(bonds[i - 1].clone());
        }
        idx.push(sites[i].clone());
        if i + 1 < p {
            idx.push(bonds[i].clone());
        }
        let count: usize = idx.iter().map(Index::dim).product();
        let mut data = Vec::with_capacity(count);
        for k in 0..count {
            let line = lines
                .next()
                .with_context(|| format!("tensor {i}: missing element {k}"))?;
            let mut parts = line.split_whitespace();
            let re: f64 = parts
                .next()
                .with_context(|| format!("tensor {i} element {k}: empty line"))?
                .parse()
                .with_context(|| format!("tensor {i} element {k}: bad real part"))?;
            let im: f64 = parts
                .next()
                .with_context(|| format!("tensor {i} element {k}: missing imag part"))?
                .parse()
                .with_context(|| format!("tensor {i} element {k}: bad imag part"))?;
            data.push(C64::new(re, im));
        }
        tensors.push(Tensor::new(idx, data)?);
    }
    Ok(MatrixProductState::new(tensors, sites)?)
}
