//! Dense tensors with named, typed indices.
//!
//! An [`Index`] is identified by an opaque id; two indices compare equal iff
//! their ids match, and contraction pairs equal indices only. All grid wiring
//! in the engine is expressed by sharing index ids between tensors, which
//! removes any transposition bookkeeping from the higher layers.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};
use crate::linalg;
use crate::C64;

static NEXT_INDEX_ID: AtomicU64 = AtomicU64::new(1);

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum IndexKind {
    /// Physical forward-backward index, dimension d².
    Site,
    /// Bond along the chain (space) direction.
    SpatialBond,
    /// Bond along the time direction.
    TemporalBond,
}

/// Optional labels carried by an index: the site number and the time point it
/// belongs to. Purely informational.
#[derive(Clone, Copy, Default, PartialEq, Eq, Debug)]
pub struct Tags {
    pub site: Option<u32>,
    pub time: Option<i64>,
}

#[derive(Clone, Debug)]
pub struct Index {
    id: u64,
    dim: usize,
    kind: IndexKind,
    tags: Tags,
}

impl Index {
    /// Create a fresh index with a globally unique id. Panics if `dim == 0`.
    pub fn new(kind: IndexKind, dim: usize) -> Self {
        assert!(dim >= 1, "index dimension must be at least 1");
        Index {
            id: NEXT_INDEX_ID.fetch_add(1, Ordering::Relaxed),
            dim,
            kind,
            tags: Tags::default(),
        }
    }

    pub fn site(dim: usize) -> Self {
        Index::new(IndexKind::Site, dim)
    }

    pub fn spatial(dim: usize) -> Self {
        Index::new(IndexKind::SpatialBond, dim)
    }

    pub fn temporal(dim: usize) -> Self {
        Index::new(IndexKind::TemporalBond, dim)
    }

    pub fn with_site(mut self, site: u32) -> Self {
        self.tags.site = Some(site);
        self
    }

    pub fn with_time(mut self, time: i64) -> Self {
        self.tags.time = Some(time);
        self
    }

    pub fn with_tags(mut self, tags: Tags) -> Self {
        self.tags = tags;
        self
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> IndexKind {
        self.kind
    }

    pub fn tags(&self) -> Tags {
        self.tags
    }
}

impl PartialEq for Index {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}

impl Eq for Index {}

impl std::hash::Hash for Index {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.id.hash(state);
    }
}

/// Dense complex tensor, row-major over the ordered index list.
#[derive(Clone, Debug)]
pub struct Tensor {
    indices: Vec<Index>,
    data: Vec<C64>,
}

impl Tensor {
    pub fn new(indices: Vec<Index>, data: Vec<C64>) -> Result<Self> {
        let expected: usize = indices.iter().map(Index::dim).product();
        if data.len() != expected {
            return Err(Error::DataLength {
                expected,
                got: data.len(),
            });
        }
        check_unique(&indices)?;
        Ok(Tensor { indices, data })
    }

    pub fn zeros(indices: Vec<Index>) -> Result<Self> {
        let n: usize = indices.iter().map(Index::dim).product();
        Tensor::new(indices, vec![C64::new(0.0, 0.0); n])
    }

    pub fn from_fn(indices: Vec<Index>, mut f: impl FnMut(&[usize]) -> C64) -> Result<Self> {
        check_unique(&indices)?;
        let dims: Vec<usize> = indices.iter().map(Index::dim).collect();
        let n: usize = dims.iter().product();
        let mut data = Vec::with_capacity(n);
        let mut coords = vec![0usize; dims.len()];
        for _ in 0..n {
            data.push(f(&coords));
            advance(&mut coords, &dims);
        }
        Ok(Tensor { indices, data })
    }

    pub fn scalar(z: C64) -> Self {
        Tensor {
            indices: Vec::new(),
            data: vec![z],
        }
    }

    pub fn indices(&self) -> &[Index] {
        &self.indices
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn dims(&self) -> Vec<usize> {
        self.indices.iter().map(Index::dim).collect()
    }

    pub fn size(&self) -> usize {
        self.data.len()
    }

    pub fn rank(&self) -> usize {
        self.indices.len()
    }

    pub fn position(&self, id: u64) -> Option<usize> {
        self.indices.iter().position(|ix| ix.id() == id)
    }

    pub fn index_by_id(&self, id: u64) -> Option<&Index> {
        self.indices.iter().find(|ix| ix.id() == id)
    }

    pub fn has_index(&self, id: u64) -> bool {
        self.position(id).is_some()
    }

    /// Ids shared with another tensor, in this tensor's index order.
    pub fn shared_ids(&self, other: &Tensor) -> Vec<u64> {
        self.indices
            .iter()
            .filter(|ix| other.has_index(ix.id()))
            .map(Index::id)
            .collect()
    }

    /// Element at the given coordinates (one per index, in order).
    pub fn at(&self, coords: &[usize]) -> C64 {
        debug_assert_eq!(coords.len(), self.indices.len());
        let mut lin = 0;
        for (c, ix) in coords.iter().zip(&self.indices) {
            debug_assert!(*c < ix.dim());
            lin = lin * ix.dim() + c;
        }
        self.data[lin]
    }

    /// Reorder indices: `new.indices[k] = old.indices[order[k]]`.
    pub fn permuted(&self, order: &[usize]) -> Tensor {
        debug_assert_eq!(order.len(), self.indices.len());
        if order.iter().enumerate().all(|(k, &o)| k == o) {
            return self.clone();
        }
        let old_dims = self.dims();
        let mut old_strides = vec![1usize; old_dims.len()];
        for k in (0..old_dims.len().saturating_sub(1)).rev() {
            old_strides[k] = old_strides[k + 1] * old_dims[k + 1];
        }
        let new_indices: Vec<Index> = order.iter().map(|&o| self.indices[o].clone()).collect();
        let new_dims: Vec<usize> = new_indices.iter().map(Index::dim).collect();
        let strides_in_new_order: Vec<usize> = order.iter().map(|&o| old_strides[o]).collect();
        let mut data = Vec::with_capacity(self.data.len());
        let mut coords = vec![0usize; new_dims.len()];
        let mut lin = 0usize;
        for _ in 0..self.data.len() {
            data.push(self.data[lin]);
            // odometer increment tracking the old linear offset
            for k in (0..coords.len()).rev() {
                coords[k] += 1;
                lin += strides_in_new_order[k];
                if coords[k] < new_dims[k] {
                    break;
                }
                lin -= strides_in_new_order[k] * new_dims[k];
                coords[k] = 0;
            }
        }
        Tensor {
            indices: new_indices,
            data,
        }
    }

    /// Pairwise contraction over all shared indices. With no shared indices
    /// this is the outer product. The result carries the unshared indices of
    /// `self` followed by those of `other`.
    pub fn contract(&self, other: &Tensor) -> Result<Tensor> {
        let shared = self.shared_ids(other);
        for id in &shared {
            let da = self.index_by_id(*id).unwrap().dim();
            let db = other.index_by_id(*id).unwrap().dim();
            if da != db {
                return Err(Error::DimMismatch {
                    id: *id,
                    left: da,
                    right: db,
                });
            }
        }
        let free_a: Vec<usize> = (0..self.indices.len())
            .filter(|&p| !shared.contains(&self.indices[p].id()))
            .collect();
        let free_b: Vec<usize> = (0..other.indices.len())
            .filter(|&p| !shared.contains(&other.indices[p].id()))
            .collect();
        let mut order_a: Vec<usize> = free_a.clone();
        order_a.extend(shared.iter().map(|id| self.position(*id).unwrap()));
        let mut order_b: Vec<usize> = shared
            .iter()
            .map(|id| other.position(*id).unwrap())
            .collect();
        order_b.extend(free_b.iter().copied());

        let pa = self.permuted(&order_a);
        let pb = other.permuted(&order_b);
        let k: usize = shared
            .iter()
            .map(|id| self.index_by_id(*id).unwrap().dim())
            .product();
        let m = pa.data.len() / k;
        let n = pb.data.len() / k;
        let data = linalg::matmul(&pa.data, m, k, &pb.data, n);

        let mut indices: Vec<Index> = free_a.iter().map(|&p| self.indices[p].clone()).collect();
        indices.extend(free_b.iter().map(|&p| other.indices[p].clone()));
        check_unique(&indices)?;
        Ok(Tensor { indices, data })
    }

    /// Elementwise sum; `other` may carry the same indices in any order.
    pub fn add(&self, other: &Tensor) -> Result<Tensor> {
        if self.indices.len() != other.indices.len() {
            return Err(Error::ChainLength {
                left: self.indices.len(),
                right: other.indices.len(),
            });
        }
        let order: Vec<usize> = self
            .indices
            .iter()
            .map(|ix| {
                other
                    .position(ix.id())
                    .ok_or(Error::IndexNotFound(ix.id()))
            })
            .collect::<Result<_>>()?;
        let pb = other.permuted(&order);
        let data = self
            .data
            .iter()
            .zip(&pb.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Tensor {
            indices: self.indices.clone(),
            data,
        })
    }

    pub fn scaled(&self, z: C64) -> Tensor {
        Tensor {
            indices: self.indices.clone(),
            data: self.data.iter().map(|a| a * z).collect(),
        }
    }

    pub fn conj(&self) -> Tensor {
        Tensor {
            indices: self.indices.clone(),
            data: self.data.iter().map(C64::conj).collect(),
        }
    }

    /// Swap an index for another of equal dimension (rewiring).
    pub fn replace_index(&self, old_id: u64, new: &Index) -> Result<Tensor> {
        let pos = self.position(old_id).ok_or(Error::IndexNotFound(old_id))?;
        if self.indices[pos].dim() != new.dim() {
            return Err(Error::DimMismatch {
                id: old_id,
                left: self.indices[pos].dim(),
                right: new.dim(),
            });
        }
        let mut indices = self.indices.clone();
        indices[pos] = new.clone();
        check_unique(&indices)?;
        Ok(Tensor {
            indices,
            data: self.data.clone(),
        })
    }

    /// Contract one index against a plain vector of weights.
    pub fn reduce_index(&self, id: u64, weights: &[C64]) -> Result<Tensor> {
        let pos = self.position(id).ok_or(Error::IndexNotFound(id))?;
        let d = self.indices[pos].dim();
        if weights.len() != d {
            return Err(Error::DimMismatch {
                id,
                left: d,
                right: weights.len(),
            });
        }
        let mut order: Vec<usize> = (0..self.indices.len()).filter(|&p| p != pos).collect();
        order.push(pos);
        let p = self.permuted(&order);
        let rest = p.data.len() / d;
        let mut data = vec![C64::new(0.0, 0.0); rest];
        for r in 0..rest {
            let base = r * d;
            let mut acc = C64::new(0.0, 0.0);
            for s in 0..d {
                acc += p.data[base + s] * weights[s];
            }
            data[r] = acc;
        }
        Ok(Tensor {
            indices: p.indices[..p.indices.len() - 1].to_vec(),
            data,
        })
    }

    /// Sum an index out (contraction with the all-ones vector).
    pub fn sum_index(&self, id: u64) -> Result<Tensor> {
        let d = self
            .index_by_id(id)
            .ok_or(Error::IndexNotFound(id))?
            .dim();
        self.reduce_index(id, &vec![C64::new(1.0, 0.0); d])
    }

    /// Elementwise product along one shared index direction without summing
    /// it: `out[.., s, .., b..] = self[.., s, ..] * other[s, b..]`, where `s`
    /// runs over `self_id` in `self` and `other_id` in `other`. The result
    /// keeps `self`'s copy of the index and gains `other`'s remaining indices.
    pub fn join_diagonal(&self, other: &Tensor, self_id: u64, other_id: u64) -> Result<Tensor> {
        let pa = self.position(self_id).ok_or(Error::IndexNotFound(self_id))?;
        let pb = other
            .position(other_id)
            .ok_or(Error::IndexNotFound(other_id))?;
        let d = self.indices[pa].dim();
        if other.indices[pb].dim() != d {
            return Err(Error::DimMismatch {
                id: self_id,
                left: d,
                right: other.indices[pb].dim(),
            });
        }
        // bring the joined index last in `other`'s clone: (free_b..., s)
        let mut order_b: Vec<usize> = (0..other.indices.len()).filter(|&p| p != pb).collect();
        order_b.push(pb);
        let ob = other.permuted(&order_b);
        let free_b_size = ob.data.len() / d;

        let dims_a = self.dims();
        let mut strides_a = vec![1usize; dims_a.len()];
        for k in (0..dims_a.len().saturating_sub(1)).rev() {
            strides_a[k] = strides_a[k + 1] * dims_a[k + 1];
        }
        let stride_s = strides_a[pa];

        let mut indices = self.indices.clone();
        indices.extend(ob.indices[..ob.indices.len() - 1].iter().cloned());
        check_unique(&indices)?;
        let mut data = vec![C64::new(0.0, 0.0); self.data.len() * free_b_size];
        for (ia, &av) in self.data.iter().enumerate() {
            let s = (ia / stride_s) % d;
            let out_base = ia * free_b_size;
            for j in 0..free_b_size {
                data[out_base + j] = av * ob.data[j * d + s];
            }
        }
        Ok(Tensor { indices, data })
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Tensor) -> f64 {
        debug_assert_eq!(self.data.len(), other.data.len());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Matricize over explicit row/column index id lists (tests and kernels).
    pub fn to_matrix(&self, row_ids: &[u64], col_ids: &[u64]) -> Result<linalg::CMat> {
        let mut order: Vec<usize> = Vec::with_capacity(self.indices.len());
        for id in row_ids.iter().chain(col_ids) {
            order.push(self.position(*id).ok_or(Error::IndexNotFound(*id))?);
        }
        if order.len() != self.indices.len() {
            return Err(Error::BadSvdSplit);
        }
        let p = self.permuted(&order);
        let m: usize = row_ids
            .iter()
            .map(|id| self.index_by_id(*id).unwrap().dim())
            .product();
        let n = p.data.len() / m;
        Ok(linalg::CMat::from_fn(m, n, |i, j| p.data[i * n + j]))
    }
}

fn check_unique(indices: &[Index]) -> Result<()> {
    for (i, a) in indices.iter().enumerate() {
        for b in &indices[i + 1..] {
            if a.id() == b.id() {
                return Err(Error::DuplicateIndex(a.id()));
            }
        }
    }
    Ok(())
}

fn advance(coords: &mut [usize], dims: &[usize]) {
    for k in (0..coords.len()).rev() {
        coords[k] += 1;
        if coords[k] < dims[k] {
            return;
        }
        coords[k] = 0;
    }
}

/// How the singular values are distributed between the two SVD factors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Absorb {
    /// `u <- u s`, `v` isometric.
    Left,
    /// `v <- s v`, `u` isometric.
    Right,
    /// `u <- u sqrt(s)`, `v <- sqrt(s) v`.
    SqrtBoth,
}

pub struct SvdParts {
    pub u: Tensor,
    /// Retained singular values, descending.
    pub singular_values: Vec<f64>,
    pub v: Tensor,
    /// The fresh bond index shared by `u` and `v`.
    pub bond: Index,
    /// Relative discarded weight sum(discarded λ²) / sum(λ²).
    pub discarded_weight: f64,
}

/// SVD factorization of `t` across the (`row_ids` | rest) bipartition with
/// relative-weight truncation: the retained rank is the smallest `r` such
/// that `sum_{i>=r} λ_i² < cutoff * sum λ_i²`, extended over degenerate values
/// tied with the last retained one (within 1e-12 relative), then capped by
/// `max_dim`. At `cutoff = 0` nothing is discarded. An all-zero tensor yields
/// a rank-1 factorization with zero weight.
pub fn svd_truncate(
    t: &Tensor,
    row_ids: &[u64],
    cutoff: f64,
    max_dim: Option<usize>,
    absorb: Absorb,
    bond_kind: IndexKind,
    bond_tags: Tags,
) -> Result<SvdParts> {
    if !(0.0..1.0).contains(&cutoff) {
        return Err(Error::InvalidCutoff(cutoff));
    }
    if row_ids.is_empty() || row_ids.len() >= t.indices.len() {
        return Err(Error::BadSvdSplit);
    }
    let mut order: Vec<usize> = Vec::with_capacity(t.indices.len());
    for id in row_ids {
        order.push(t.position(*id).ok_or(Error::IndexNotFound(*id))?);
    }
    let col_pos: Vec<usize> = (0..t.indices.len()).filter(|p| !order.contains(p)).collect();
    order.extend(col_pos.iter().copied());
    let p = t.permuted(&order);
    let m: usize = row_ids
        .iter()
        .map(|id| t.index_by_id(*id).unwrap().dim())
        .product();
    let n = p.data.len() / m;
    let row_indices = p.indices[..row_ids.len()].to_vec();
    let col_indices = p.indices[row_ids.len()..].to_vec();

    if p.norm() == 0.0 {
        let bond = Index::new(bond_kind, 1).with_tags(bond_tags);
        let mut u_idx = row_indices;
        u_idx.push(bond.clone());
        let mut v_idx = vec![bond.clone()];
        v_idx.extend(col_indices);
        return Ok(SvdParts {
            u: Tensor::zeros(u_idx)?,
            singular_values: vec![0.0],
            v: Tensor::zeros(v_idx)?,
            bond,
            discarded_weight: 0.0,
        });
    }

    let (u_full, svals, vh_full) = linalg::svd_thin(&p.data, m, n)?;
    let total: f64 = svals.iter().map(|s| s * s).sum();
    // smallest rank whose discarded tail satisfies the criterion (strict <)
    let mut rank = svals.len();
    let mut tail = 0.0;
    for r in (1..svals.len()).rev() {
        let cand = tail + svals[r] * svals[r];
        if cand < cutoff * total {
            tail = cand;
            rank = r;
        } else {
            break;
        }
    }
    // keep degenerate values tied with the last retained one
    while rank < svals.len() && svals[rank] >= svals[rank - 1] * (1.0 - 1e-12) {
        tail -= svals[rank] * svals[rank];
        rank += 1;
    }
    if let Some(md) = max_dim {
        let capped = rank.min(md.max(1));
        for r in capped..rank {
            tail += svals[r] * svals[r];
        }
        rank = capped;
    }
    let discarded_weight = if total > 0.0 { tail.max(0.0) / total } else { 0.0 };

    let bond = Index::new(bond_kind, rank).with_tags(bond_tags);
    let full = svals.len();
    let (wu, wv): (Vec<f64>, Vec<f64>) = match absorb {
        Absorb::Left => (svals[..rank].to_vec(), vec![1.0; rank]),
        Absorb::Right => (vec![1.0; rank], svals[..rank].to_vec()),
        Absorb::SqrtBoth => {
            let sq: Vec<f64> = svals[..rank].iter().map(|s| s.sqrt()).collect();
            (sq.clone(), sq)
        }
    };
    let mut u_data = vec![C64::new(0.0, 0.0); m * rank];
    for i in 0..m {
        for k in 0..rank {
            u_data[i * rank + k] = u_full[i * full + k] * wu[k];
        }
    }
    let mut v_data = vec![C64::new(0.0, 0.0); rank * n];
    for k in 0..rank {
        for j in 0..n {
            v_data[k * n + j] = vh_full[k * n + j] * wv[k];
        }
    }
    let mut u_idx = row_indices;
    u_idx.push(bond.clone());
    let mut v_idx = vec![bond.clone()];
    v_idx.extend(col_indices);
    Ok(SvdParts {
        u: Tensor::new(u_idx, u_data)?,
        singular_values: svals[..rank].to_vec(),
        v: Tensor::new(v_idx, v_data)?,
        bond,
        discarded_weight,
    })
}

/// QR factorization across (`row_ids` | rest): `t = q r` with `q` isometric.
/// Used by compression sweeps where no truncation is wanted.
pub fn qr_split(
    t: &Tensor,
    row_ids: &[u64],
    bond_kind: IndexKind,
    bond_tags: Tags,
) -> Result<(Tensor, Tensor)> {
    if row_ids.is_empty() || row_ids.len() >= t.indices.len() {
        return Err(Error::BadSvdSplit);
    }
    let mut order: Vec<usize> = Vec::with_capacity(t.indices.len());
    for id in row_ids {
        order.push(t.position(*id).ok_or(Error::IndexNotFound(*id))?);
    }
    let col_pos: Vec<usize> = (0..t.indices.len()).filter(|p| !order.contains(p)).collect();
    order.extend(col_pos.iter().copied());
    let p = t.permuted(&order);
    let m: usize = row_ids
        .iter()
        .map(|id| t.index_by_id(*id).unwrap().dim())
        .product();
    let n = p.data.len() / m;
    let k = m.min(n);
    let (q, r) = linalg::qr_thin(&p.data, m, n);
    let bond = Index::new(bond_kind, k).with_tags(bond_tags);
    let mut q_idx = p.indices[..row_ids.len()].to_vec();
    q_idx.push(bond.clone());
    let mut r_idx = vec![bond];
    r_idx.extend(p.indices[row_ids.len()..].iter().cloned());
    Ok((Tensor::new(q_idx, q)?, Tensor::new(r_idx, r)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    // deterministic pseudo-random stream for test tensors
    pub(crate) struct SplitMix(pub u64);
    impl SplitMix {
        pub fn next_f64(&mut self) -> f64 {
            self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
            let mut z = self.0;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            let z = z ^ (z >> 31);
            (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        }
        pub fn next_c64(&mut self) -> C64 {
            C64::new(self.next_f64(), self.next_f64())
        }
    }

    fn random_tensor(indices: Vec<Index>, seed: u64) -> Tensor {
        let mut rng = SplitMix(seed);
        Tensor::from_fn(indices, |_| rng.next_c64()).unwrap()
    }

    #[test]
    fn identity_contract_vector() {
        let i = Index::site(2);
        let j = Index::site(2);
        let id = Tensor::from_fn(vec![i.clone(), j.clone()], |co| {
            if co[0] == co[1] { c(1.0, 0.0) } else { c(0.0, 0.0) }
        })
        .unwrap();
        let v = Tensor::new(vec![j], vec![c(1.0, 0.0), c(2.0, 0.0)]).unwrap();
        let r = id.contract(&v).unwrap();
        assert_eq!(r.indices().len(), 1);
        assert_eq!(r.indices()[0], i);
        assert!((r.data()[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((r.data()[1] - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn outer_product_of_scalars() {
        let i = Index::site(1);
        let j = Index::site(1);
        let a = Tensor::new(vec![i], vec![c(3.0, 0.0)]).unwrap();
        let b = Tensor::new(vec![j], vec![c(5.0, 0.0)]).unwrap();
        let r = a.contract(&b).unwrap();
        assert_eq!(r.rank(), 2);
        assert!((r.data()[0] - c(15.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn contract_matches_loop_oracle() {
        // random 2x3x2 against 3x2x4 sharing two indices
        let i = Index::spatial(2);
        let j = Index::spatial(3);
        let k = Index::spatial(2);
        let l = Index::spatial(4);
        let a = random_tensor(vec![i.clone(), j.clone(), k.clone()], 7);
        let b = random_tensor(vec![j.clone(), k.clone(), l.clone()], 13);
        let r = a.contract(&b).unwrap();
        assert_eq!(r.indices(), &[i.clone(), l.clone()]);
        let mut max_rel: f64 = 0.0;
        for ii in 0..2 {
            for ll in 0..4 {
                let mut acc = c(0.0, 0.0);
                for jj in 0..3 {
                    for kk in 0..2 {
                        acc += a.at(&[ii, jj, kk]) * b.at(&[jj, kk, ll]);
                    }
                }
                let got = r.at(&[ii, ll]);
                max_rel = max_rel.max((got - acc).norm() / acc.norm().max(1e-300));
            }
        }
        assert!(max_rel <= 1e-13, "relative error {max_rel:.3e}");
    }

    #[test]
    fn duplicate_ids_rejected() {
        let shared = Index::spatial(2);
        let dup = Index::spatial(2);
        let a = random_tensor(vec![shared.clone(), dup.clone()], 3);
        // rewiring `shared` onto `dup` would leave two copies of one id
        let e = a.replace_index(shared.id(), &dup);
        assert!(matches!(e, Err(Error::DuplicateIndex(_))));
        let e2 = Tensor::zeros(vec![dup.clone(), dup.clone()]);
        assert!(matches!(e2, Err(Error::DuplicateIndex(_))));
    }

    #[test]
    fn bilinearity() {
        let i = Index::spatial(3);
        let j = Index::spatial(4);
        let k = Index::spatial(2);
        let a = random_tensor(vec![i.clone(), j.clone()], 21);
        let b = random_tensor(vec![j.clone(), k.clone()], 22);
        let d = random_tensor(vec![j.clone(), k.clone()], 23);
        let lhs = a.contract(&b.add(&d).unwrap()).unwrap();
        let rhs = a.contract(&b).unwrap().add(&a.contract(&d).unwrap()).unwrap();
        assert!(lhs.max_abs_diff(&rhs) <= 1e-13 * lhs.max_abs().max(1.0));
    }

    #[test]
    fn svd_identity_keeps_both_values() {
        let i = Index::site(2);
        let j = Index::site(2);
        let id = Tensor::from_fn(vec![i.clone(), j.clone()], |co| {
            if co[0] == co[1] { c(1.0, 0.0) } else { c(0.0, 0.0) }
        })
        .unwrap();
        let parts = svd_truncate(
            &id,
            &[i.id()],
            1e-11,
            None,
            Absorb::Left,
            IndexKind::SpatialBond,
            Tags::default(),
        )
        .unwrap();
        assert_eq!(parts.singular_values.len(), 2);
        assert!((parts.singular_values[0] - 1.0).abs() < 1e-12);
        assert!((parts.singular_values[1] - 1.0).abs() < 1e-12);
        assert_eq!(parts.discarded_weight, 0.0);
    }

    #[test]
    fn svd_rank_one_outer_product() {
        let i = Index::spatial(5);
        let j = Index::spatial(4);
        let mut rng = SplitMix(91);
        let u: Vec<C64> = (0..5).map(|_| rng.next_c64()).collect();
        let v: Vec<C64> = (0..4).map(|_| rng.next_c64()).collect();
        let t = Tensor::from_fn(vec![i.clone(), j.clone()], |co| u[co[0]] * v[co[1]]).unwrap();
        let parts = svd_truncate(
            &t,
            &[i.id()],
            1e-11,
            None,
            Absorb::Left,
            IndexKind::SpatialBond,
            Tags::default(),
        )
        .unwrap();
        assert_eq!(parts.singular_values.len(), 1);
    }

    #[test]
    fn svd_truncation_matches_gram_eigenvalue_oracle() {
        // random 6x6, chi = 1e-3: retained rank equals the smallest r with
        // sum_{n>r} λ_n² / sum λ² < 1e-3, λ from the Gram matrix t^H t.
        let i = Index::spatial(6);
        let j = Index::spatial(6);
        let t = random_tensor(vec![i.clone(), j.clone()], 1234);
        let chi = 1e-3;
        let parts = svd_truncate(
            &t,
            &[i.id()],
            chi,
            None,
            Absorb::Left,
            IndexKind::SpatialBond,
            Tags::default(),
        )
        .unwrap();

        let m = t.to_matrix(&[i.id()], &[j.id()]).unwrap();
        let gram = m.adjoint().mul(&m);
        let (mut evals, _) = gram.herm_eig().unwrap();
        evals.reverse(); // descending λ²
        let lam2: Vec<f64> = evals.iter().map(|&e| e.max(0.0)).collect();
        let total: f64 = lam2.iter().sum();
        let mut expect = lam2.len();
        let mut tail = 0.0;
        for r in (1..lam2.len()).rev() {
            if tail + lam2[r] < chi * total {
                tail += lam2[r];
                expect = r;
            } else {
                break;
            }
        }
        assert_eq!(parts.singular_values.len(), expect);
        // the stated criterion holds exactly for the performed truncation
        assert!(parts.discarded_weight < chi);
    }

    #[test]
    fn svd_reconstruction_at_zero_cutoff() {
        let i = Index::spatial(3);
        let j = Index::spatial(4);
        let k = Index::spatial(2);
        let t = random_tensor(vec![i.clone(), j.clone(), k.clone()], 5150);
        let parts = svd_truncate(
            &t,
            &[j.id()],
            0.0,
            None,
            Absorb::Right,
            IndexKind::SpatialBond,
            Tags::default(),
        )
        .unwrap();
        let recon = parts.u.contract(&parts.v).unwrap();
        let order: Vec<usize> = t
            .indices()
            .iter()
            .map(|ix| recon.position(ix.id()).unwrap())
            .collect();
        let back = recon.permuted(&order);
        let num: f64 = back
            .data()
            .iter()
            .zip(t.data())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        assert!(num / t.norm().powi(2) <= 1e-12);
    }

    #[test]
    fn svd_invalid_cutoff_rejected() {
        let i = Index::spatial(2);
        let j = Index::spatial(2);
        let t = random_tensor(vec![i.clone(), j], 8);
        for bad in [-0.1, 1.0, 1.5] {
            let e = svd_truncate(
                &t,
                &[i.id()],
                bad,
                None,
                Absorb::Left,
                IndexKind::SpatialBond,
                Tags::default(),
            );
            assert!(matches!(e, Err(Error::InvalidCutoff(_))));
        }
    }

    #[test]
    fn svd_all_zero_tensor() {
        let i = Index::spatial(3);
        let j = Index::spatial(2);
        let t = Tensor::zeros(vec![i.clone(), j]).unwrap();
        let parts = svd_truncate(
            &t,
            &[i.id()],
            1e-11,
            None,
            Absorb::Left,
            IndexKind::SpatialBond,
            Tags::default(),
        )
        .unwrap();
        assert_eq!(parts.singular_values, vec![0.0]);
        assert_eq!(parts.bond.dim(), 1);
    }

    #[test]
    fn join_diagonal_multiplies_along_shared_direction() {
        let s_a = Index::site(3);
        let s_b = Index::site(3);
        let extra = Index::spatial(2);
        let a = random_tensor(vec![s_a.clone()], 41);
        let b = random_tensor(vec![s_b.clone(), extra.clone()], 42);
        let joined = a.join_diagonal(&b, s_a.id(), s_b.id()).unwrap();
        assert_eq!(joined.rank(), 2);
        for s in 0..3 {
            for e in 0..2 {
                let want = a.at(&[s]) * b.at(&[s, e]);
                assert!((joined.at(&[s, e]) - want).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn reduce_and_sum_index() {
        let i = Index::site(2);
        let j = Index::spatial(3);
        let t = random_tensor(vec![i.clone(), j.clone()], 99);
        let w = vec![c(2.0, 0.0), c(-1.0, 1.0)];
        let r = t.reduce_index(i.id(), &w).unwrap();
        for jj in 0..3 {
            let want = t.at(&[0, jj]) * w[0] + t.at(&[1, jj]) * w[1];
            assert!((r.at(&[jj]) - want).norm() < 1e-14);
        }
        let s = t.sum_index(j.id()).unwrap();
        for ii in 0..2 {
            let want = (0..3).map(|jj| t.at(&[ii, jj])).sum::<C64>();
            assert!((s.at(&[ii]) - want).norm() < 1e-14);
        }
    }

    #[test]
    fn qr_split_reconstructs() {
        let i = Index::spatial(3);
        let j = Index::spatial(2);
        let k = Index::spatial(4);
        let t = random_tensor(vec![i.clone(), j.clone(), k.clone()], 4242);
        let (q, r) = qr_split(&t, &[i.id(), j.id()], IndexKind::SpatialBond, Tags::default())
            .unwrap();
        let recon = q.contract(&r).unwrap();
        let order: Vec<usize> = t
            .indices()
            .iter()
            .map(|ix| recon.position(ix.id()).unwrap())
            .collect();
        assert!(recon.permuted(&order).max_abs_diff(&t) < 1e-13);
    }

    #[test]
    fn index_dims_must_be_positive() {
        let result = std::panic::catch_unwind(|| Index::site(0));
        assert!(result.is_err());
    }
}
