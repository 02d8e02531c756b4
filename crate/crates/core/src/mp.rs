//! Matrix product states and operators over the tensor kernel.
//!
//! Chains are wired by shared index ids: neighbouring tensors hold one (or,
//! transiently, several) common bond indices, and every operation derives the
//! wiring from the tensors themselves. Compression is the standard two-sweep
//! scheme: a left-to-right QR orthogonalization followed by a right-to-left
//! truncating SVD sweep, which also fuses any parallel bonds left behind by
//! an operator application.

use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::tensor::{svd_truncate, Absorb, Index, IndexKind, Tags, Tensor};
use crate::C64;

#[derive(Clone, Copy, Debug, Default)]
pub struct SvdReport {
    pub cut: usize,
    pub retained_rank: usize,
    pub discarded_weight: f64,
}

#[derive(Clone, Debug, Default)]
pub struct CompressStats {
    pub reports: Vec<SvdReport>,
}

impl CompressStats {
    pub fn max_discarded(&self) -> f64 {
        self.reports
            .iter()
            .map(|r| r.discarded_weight)
            .fold(0.0, f64::max)
    }
}

/// Two-sweep compression of a chain of tensors in place. Bonds between
/// neighbours are whatever indices they share; cuts with no shared index
/// (tensor-product chains) are left untouched. Fresh bonds inherit the tags
/// of the first old bond at their cut and are created with `bond_kind`.
pub fn compress_chain(
    tensors: &mut Vec<Tensor>,
    cutoff: f64,
    max_dim: Option<usize>,
    bond_kind: IndexKind,
) -> Result<CompressStats> {
    let n = tensors.len();
    let mut stats = CompressStats::default();
    if n < 2 {
        return Ok(stats);
    }
    // left-to-right orthogonalization
    for i in 0..n - 1 {
        let bond_ids = tensors[i].shared_ids(&tensors[i + 1]);
        if bond_ids.is_empty() {
            continue;
        }
        let row_ids: Vec<u64> = tensors[i]
            .indices()
            .iter()
            .map(Index::id)
            .filter(|id| !bond_ids.contains(id))
            .collect();
        if row_ids.is_empty() {
            continue; // nothing to orthogonalize against
        }
        let tags = bond_tags(&tensors[i], &bond_ids);
        let (q, r) = crate::tensor::qr_split(&tensors[i], &row_ids, bond_kind, tags)?;
        tensors[i + 1] = r.contract(&tensors[i + 1])?;
        tensors[i] = q;
    }
    // right-to-left truncation
    for i in (1..n).rev() {
        let bond_ids = tensors[i - 1].shared_ids(&tensors[i]);
        if bond_ids.is_empty() {
            continue;
        }
        if bond_ids.len() >= tensors[i].rank() {
            continue;
        }
        let tags = bond_tags(&tensors[i], &bond_ids);
        let parts = svd_truncate(
            &tensors[i],
            &bond_ids,
            cutoff,
            max_dim,
            Absorb::Left,
            bond_kind,
            tags,
        )?;
        stats.reports.push(SvdReport {
            cut: i - 1,
            retained_rank: parts.singular_values.len(),
            discarded_weight: parts.discarded_weight,
        });
        tensors[i - 1] = tensors[i - 1].contract(&parts.u)?;
        tensors[i] = parts.v;
    }
    Ok(stats)
}

/// Contract `op_cells[i]` with `state[i]` site by site (pairing is by shared
/// index ids) and recompress. The workhorse behind every MPS-MPO and MPO-MPO
/// application, including the engine's column and row operations.
///
/// Implemented as a left-to-right zip: the partially contracted block is
/// truncated at every cut while sweeping, so the intermediate bonds never
/// materialize at the full state-times-operator dimension, and a final
/// two-sweep compression restores canonical-quality truncation.
pub fn apply_cells(
    op_cells: &[Tensor],
    state: &[Tensor],
    cutoff: f64,
    max_dim: Option<usize>,
    bond_kind: IndexKind,
) -> Result<(Vec<Tensor>, CompressStats)> {
    let n = op_cells.len();
    if n != state.len() {
        return Err(Error::ChainLength {
            left: n,
            right: state.len(),
        });
    }
    let mut out: Vec<Tensor> = Vec::with_capacity(n);
    let mut carry: Option<Tensor> = None;
    for i in 0..n {
        let mut t = match carry.take() {
            Some(c) => c.contract(&state[i])?,
            None => state[i].clone(),
        };
        t = t.contract(&op_cells[i])?;
        if i + 1 == n {
            out.push(t);
            break;
        }
        let mut col_ids: Vec<u64> = t.shared_ids(&op_cells[i + 1]);
        for id in t.shared_ids(&state[i + 1]) {
            if !col_ids.contains(&id) {
                col_ids.push(id);
            }
        }
        if col_ids.is_empty() || col_ids.len() >= t.rank() {
            out.push(t);
            continue;
        }
        let row_ids: Vec<u64> = t
            .indices()
            .iter()
            .map(Index::id)
            .filter(|id| !col_ids.contains(id))
            .collect();
        // the zip truncates against a non-orthogonal right environment, so
        // it runs at a much tighter cutoff; the final sweeps below truncate
        // at the requested one in canonical form
        let parts = svd_truncate(
            &t,
            &row_ids,
            cutoff * 1e-4,
            None,
            Absorb::Right,
            bond_kind,
            Tags::default(),
        )?;
        out.push(parts.u);
        carry = Some(parts.v);
    }
    let stats = compress_chain(&mut out, cutoff, max_dim, bond_kind)?;
    Ok((out, stats))
}

fn bond_tags(t: &Tensor, bond_ids: &[u64]) -> Tags {
    bond_ids
        .first()
        .and_then(|id| t.index_by_id(*id))
        .map(|ix| ix.tags())
        .unwrap_or_default()
}

/// Open-boundary matrix product state. Site `i` carries the physical index
/// `sites[i]`; neighbouring tensors share spatial bond indices.
#[derive(Clone, Debug)]
pub struct MatrixProductState {
    tensors: Vec<Tensor>,
    sites: Vec<Index>,
}

impl MatrixProductState {
    pub fn new(tensors: Vec<Tensor>, sites: Vec<Index>) -> Result<Self> {
        if tensors.is_empty() {
            return Err(Error::EmptyChain);
        }
        if tensors.len() != sites.len() {
            return Err(Error::ChainLength {
                left: tensors.len(),
                right: sites.len(),
            });
        }
        for (t, s) in tensors.iter().zip(&sites) {
            if !t.has_index(s.id()) {
                return Err(Error::IndexNotFound(s.id()));
            }
        }
        for w in tensors.windows(2) {
            if w[0].shared_ids(&w[1]).is_empty() {
                return Err(Error::InvalidParameter {
                    name: "mps",
                    reason: "neighbouring tensors share no bond index".into(),
                });
            }
        }
        Ok(MatrixProductState { tensors, sites })
    }

    /// Product state from one d²-vector per site (each a vectorized density
    /// matrix of unit trace). All bonds have dimension 1.
    pub fn product(site_states: &[Vec<C64>]) -> Result<Self> {
        if site_states.is_empty() {
            return Err(Error::EmptyChain);
        }
        let p = site_states.len();
        let mut tensors = Vec::with_capacity(p);
        let mut sites = Vec::with_capacity(p);
        let mut prev_bond: Option<Index> = None;
        for (i, v) in site_states.iter().enumerate() {
            let d2 = v.len();
            let d = (d2 as f64).sqrt().round() as usize;
            if d * d != d2 {
                return Err(Error::InvalidParameter {
                    name: "site_state",
                    reason: format!("length {d2} is not a perfect square"),
                });
            }
            let tr: C64 = (0..d).map(|a| v[a * d + a]).sum();
            if (tr - C64::new(1.0, 0.0)).norm() > 1e-8 {
                return Err(Error::InvalidParameter {
                    name: "site_state",
                    reason: format!("site {} has trace {tr} (must be 1)", i + 1),
                });
            }
            let site = Index::site(d2).with_site(i as u32 + 1);
            let mut idx = vec![site.clone()];
            if let Some(b) = prev_bond.take() {
                idx.push(b);
            }
            if i + 1 < p {
                let b = Index::spatial(1).with_site(i as u32 + 1);
                idx.push(b.clone());
                prev_bond = Some(b);
            }
            let total: usize = idx.iter().map(Index::dim).product();
            debug_assert_eq!(total, d2);
            tensors.push(Tensor::new(idx, v.clone())?);
            sites.push(site);
        }
        MatrixProductState::new(tensors, sites)
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    pub fn tensors(&self) -> &[Tensor] {
        &self.tensors
    }

    pub fn sites(&self) -> &[Index] {
        &self.sites
    }

    pub fn into_parts(self) -> (Vec<Tensor>, Vec<Index>) {
        (self.tensors, self.sites)
    }

    /// Dimension of each of the P-1 bonds (product over parallel bonds).
    pub fn bond_dims(&self) -> Vec<usize> {
        self.tensors
            .windows(2)
            .map(|w| {
                w[0].shared_ids(&w[1])
                    .iter()
                    .map(|id| w[0].index_by_id(*id).unwrap().dim())
                    .product()
            })
            .collect()
    }

    /// Maximum and mean spatial bond dimension. A single-site chain reports
    /// (1, 1).
    pub fn bond_stats(&self) -> (usize, f64) {
        let dims = self.bond_dims();
        if dims.is_empty() {
            return (1, 1.0);
        }
        let max = *dims.iter().max().unwrap();
        let mean = dims.iter().sum::<usize>() as f64 / dims.len() as f64;
        (max, mean)
    }

    /// Trace of the vectorized density: per-site contraction with the
    /// diagonal selector, then chain contraction.
    pub fn trace(&self) -> Result<C64> {
        let mut acc = Tensor::scalar(C64::new(1.0, 0.0));
        for (t, s) in self.tensors.iter().zip(&self.sites) {
            let d2 = s.dim();
            let d = int_sqrt(d2)?;
            let mut w = vec![C64::new(0.0, 0.0); d2];
            for a in 0..d {
                w[a * d + a] = C64::new(1.0, 0.0);
            }
            let reduced = t.reduce_index(s.id(), &w)?;
            acc = acc.contract(&reduced)?;
        }
        Ok(acc.data()[0])
    }

    /// Tr(rho O_i) with `obs` acting on site `site` (1-based) and identity
    /// elsewhere.
    pub fn expectation(&self, site: usize, obs: &CMat) -> Result<C64> {
        if site == 0 || site > self.len() {
            return Err(Error::SiteOutOfRange {
                site,
                len: self.len(),
            });
        }
        let mut acc = Tensor::scalar(C64::new(1.0, 0.0));
        for (i, (t, s)) in self.tensors.iter().zip(&self.sites).enumerate() {
            let d2 = s.dim();
            let d = int_sqrt(d2)?;
            let mut w = vec![C64::new(0.0, 0.0); d2];
            for a in 0..d {
                for b in 0..d {
                    // rho~(a,b) = <a|rho|b>; Tr(rho O) = sum_ab rho_ab O_ba
                    w[a * d + b] = if i + 1 == site {
                        obs[(b, a)]
                    } else if a == b {
                        C64::new(1.0, 0.0)
                    } else {
                        C64::new(0.0, 0.0)
                    };
                }
            }
            let reduced = t.reduce_index(s.id(), &w)?;
            acc = acc.contract(&reduced)?;
        }
        Ok(acc.data()[0])
    }

    /// Contract the whole chain to a dense tensor whose indices are the site
    /// indices in order. Test- and small-system use only.
    pub fn to_dense(&self) -> Result<Tensor> {
        let mut acc = self.tensors[0].clone();
        for t in &self.tensors[1..] {
            acc = acc.contract(t)?;
        }
        Ok(acc)
    }

    /// Flatten to a vector over the product of the site indices, site 1
    /// slowest.
    pub fn to_dense_vector(&self) -> Result<Vec<C64>> {
        let dense = self.to_dense()?;
        let order: Vec<usize> = self
            .sites
            .iter()
            .map(|s| dense.position(s.id()).unwrap())
            .collect();
        Ok(dense.permuted(&order).data().to_vec())
    }

    pub fn scaled(&self, z: C64) -> Self {
        let mut tensors = self.tensors.clone();
        tensors[0] = tensors[0].scaled(z);
        MatrixProductState {
            tensors,
            sites: self.sites.clone(),
        }
    }

    pub fn compress(&mut self, cutoff: f64, max_dim: Option<usize>) -> Result<CompressStats> {
        compress_chain(&mut self.tensors, cutoff, max_dim, IndexKind::SpatialBond)
    }
}

/// Open-boundary matrix product operator with one input and one output site
/// index per tensor.
#[derive(Clone, Debug)]
pub struct MatrixProductOperator {
    tensors: Vec<Tensor>,
    ins: Vec<Index>,
    outs: Vec<Index>,
}

impl MatrixProductOperator {
    pub fn new(tensors: Vec<Tensor>, ins: Vec<Index>, outs: Vec<Index>) -> Result<Self> {
        if tensors.is_empty() {
            return Err(Error::EmptyChain);
        }
        if tensors.len() != ins.len() || tensors.len() != outs.len() {
            return Err(Error::ChainLength {
                left: tensors.len(),
                right: ins.len().max(outs.len()),
            });
        }
        for (t, (i, o)) in tensors.iter().zip(ins.iter().zip(&outs)) {
            if !t.has_index(i.id()) {
                return Err(Error::IndexNotFound(i.id()));
            }
            if !t.has_index(o.id()) {
                return Err(Error::IndexNotFound(o.id()));
            }
        }
        Ok(MatrixProductOperator { tensors, ins, outs })
    }

    /// Identity operator on the given physical dimensions, unit bonds.
    pub fn identity(dims: &[usize]) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::EmptyChain);
        }
        let p = dims.len();
        let mut tensors = Vec::with_capacity(p);
        let mut ins = Vec::with_capacity(p);
        let mut outs = Vec::with_capacity(p);
        let mut prev_bond: Option<Index> = None;
        for (i, &d) in dims.iter().enumerate() {
            let inp = Index::site(d).with_site(i as u32 + 1);
            let out = Index::site(d).with_site(i as u32 + 1);
            let mut idx = vec![out.clone(), inp.clone()];
            if let Some(b) = prev_bond.take() {
                idx.push(b);
            }
            if i + 1 < p {
                let b = Index::spatial(1).with_site(i as u32 + 1);
                idx.push(b.clone());
                prev_bond = Some(b);
            }
            let t = Tensor::from_fn(idx, |co| {
                if co[0] == co[1] {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            })?;
            tensors.push(t);
            ins.push(inp);
            outs.push(out);
        }
        MatrixProductOperator::new(tensors, ins, outs)
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    pub fn tensors(&self) -> &[Tensor] {
        &self.tensors
    }

    pub fn ins(&self) -> &[Index] {
        &self.ins
    }

    pub fn outs(&self) -> &[Index] {
        &self.outs
    }

    pub fn bond_dims(&self) -> Vec<usize> {
        self.tensors
            .windows(2)
            .map(|w| {
                w[0].shared_ids(&w[1])
                    .iter()
                    .map(|id| w[0].index_by_id(*id).unwrap().dim())
                    .product()
            })
            .collect()
    }

    /// Apply to a state: contraction site by site followed by an SVD
    /// recompression at `cutoff`. At `cutoff = 0` this equals the dense
    /// operator-vector product.
    pub fn apply(
        &self,
        state: &MatrixProductState,
        cutoff: f64,
        max_dim: Option<usize>,
    ) -> Result<MatrixProductState> {
        if self.len() != state.len() {
            return Err(Error::ChainLength {
                left: self.len(),
                right: state.len(),
            });
        }
        let mut state_cells = Vec::with_capacity(state.len());
        for i in 0..state.len() {
            let s = &state.sites()[i];
            if s.dim() != self.ins[i].dim() {
                return Err(Error::DimMismatch {
                    id: s.id(),
                    left: s.dim(),
                    right: self.ins[i].dim(),
                });
            }
            state_cells.push(if s.id() == self.ins[i].id() {
                state.tensors()[i].clone()
            } else {
                state.tensors()[i].replace_index(s.id(), &self.ins[i])?
            });
        }
        let (tensors, _) = apply_cells(
            &self.tensors,
            &state_cells,
            cutoff,
            max_dim,
            IndexKind::SpatialBond,
        )?;
        MatrixProductState::new(tensors, self.outs.clone())
    }

    /// Operator product `self ∘ other` (apply `other` first). At `cutoff = 0`
    /// this equals the dense matrix-matrix product.
    pub fn product(
        &self,
        other: &MatrixProductOperator,
        cutoff: f64,
        max_dim: Option<usize>,
    ) -> Result<MatrixProductOperator> {
        if self.len() != other.len() {
            return Err(Error::ChainLength {
                left: self.len(),
                right: other.len(),
            });
        }
        let mut other_cells = Vec::with_capacity(other.len());
        for i in 0..other.len() {
            let o = &other.outs[i];
            if o.dim() != self.ins[i].dim() {
                return Err(Error::DimMismatch {
                    id: o.id(),
                    left: o.dim(),
                    right: self.ins[i].dim(),
                });
            }
            other_cells.push(if o.id() == self.ins[i].id() {
                other.tensors[i].clone()
            } else {
                other.tensors[i].replace_index(o.id(), &self.ins[i])?
            });
        }
        let (tensors, _) = apply_cells(
            &self.tensors,
            &other_cells,
            cutoff,
            max_dim,
            IndexKind::SpatialBond,
        )?;
        MatrixProductOperator::new(tensors, other.ins.clone(), self.outs.clone())
    }

    /// Clone with every index replaced by a fresh one of the same dimension,
    /// kind and tags. Needed when one operator value is used twice inside a
    /// single contraction network.
    pub fn refreshed(&self) -> Self {
        let mut map: Vec<(u64, Index)> = Vec::new();
        let mut fresh = |ix: &Index| -> Index {
            if let Some((_, n)) = map.iter().find(|(id, _)| *id == ix.id()) {
                return n.clone();
            }
            let n = Index::new(ix.kind(), ix.dim()).with_tags(ix.tags());
            map.push((ix.id(), n.clone()));
            n
        };
        let mut tensors = Vec::with_capacity(self.tensors.len());
        for t in &self.tensors {
            let mut nt = t.clone();
            for ix in t.indices().to_vec() {
                let n = fresh(&ix);
                nt = nt.replace_index(ix.id(), &n).expect("refresh rewiring");
            }
            tensors.push(nt);
        }
        let remap = |list: &[Index]| -> Vec<Index> {
            list.iter()
                .map(|ix| {
                    map.iter()
                        .find(|(id, _)| *id == ix.id())
                        .map(|(_, n)| n.clone())
                        .unwrap()
                })
                .collect()
        };
        MatrixProductOperator {
            tensors,
            ins: remap(&self.ins),
            outs: remap(&self.outs),
        }
    }

    /// Dense matrix (rows = outs, cols = ins, site 1 slowest). Test use.
    pub fn to_dense_matrix(&self) -> Result<CMat> {
        let mut acc = self.tensors[0].clone();
        for t in &self.tensors[1..] {
            acc = acc.contract(t)?;
        }
        let row_ids: Vec<u64> = self.outs.iter().map(Index::id).collect();
        let col_ids: Vec<u64> = self.ins.iter().map(Index::id).collect();
        acc.to_matrix(&row_ids, &col_ids)
    }
}

fn int_sqrt(d2: usize) -> Result<usize> {
    let d = (d2 as f64).sqrt().round() as usize;
    if d * d != d2 {
        return Err(Error::InvalidParameter {
            name: "site_dim",
            reason: format!("{d2} is not a perfect square"),
        });
    }
    Ok(d)
}
