//! Second-order Suzuki-Trotter TEBD construction of the forward-backward
//! propagator MPO K(S±_n, S±_{n+1}, dt), and its per-site SVD factorization
//! into the U/R pairs that carry the temporal bonds of the 2D grid.

use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::model::SpinChainModel;
use crate::mp::MatrixProductOperator;
use crate::tensor::{svd_truncate, Absorb, Index, IndexKind, Tags, Tensor};
use crate::C64;

/// Forward-backward tensor of a unitary `e` acting on `n_sites` sites of
/// local dimension `d`: element = e[A', A] * conj(e[B', B]) with A/B the
/// fused forward/backward digits. Index order: ins then outs, one fused
/// (forward, backward) index of dimension d² per site.
fn fb_tensor(e: &CMat, d: usize, ins: &[Index], outs: &[Index]) -> Result<Tensor> {
    let n_sites = ins.len();
    debug_assert_eq!(outs.len(), n_sites);
    let mut indices: Vec<Index> = ins.to_vec();
    indices.extend(outs.iter().cloned());
    Tensor::from_fn(indices, |co| {
        let mut a_in = 0usize;
        let mut b_in = 0usize;
        let mut a_out = 0usize;
        let mut b_out = 0usize;
        for s in 0..n_sites {
            a_in = a_in * d + co[s] / d;
            b_in = b_in * d + co[s] % d;
            a_out = a_out * d + co[n_sites + s] / d;
            b_out = b_out * d + co[n_sites + s] % d;
        }
        e[(a_out, a_in)] * e[(b_out, b_in)].conj()
    })
}

/// The two-body forward-backward propagator for one pair Hamiltonian:
/// <s+_out| e^{-i H dt} |s+_in> <s-_in| e^{+i H dt} |s-_out>, as a tensor
/// over (in_i, in_j, out_i, out_j), each index of dimension d². The matrix
/// exponential is taken by Hermitian eigendecomposition.
pub fn two_body_fb_propagator(
    h_pair: &CMat,
    dt: f64,
    ins: [Index; 2],
    outs: [Index; 2],
) -> Result<Tensor> {
    h_pair.ensure_hermitian(1e-10)?;
    let d2 = h_pair.nrows();
    let d = (d2 as f64).sqrt().round() as usize;
    let e = h_pair.herm_exp_scaled(C64::new(0.0, -dt))?;
    fb_tensor(&e, d, &ins, &outs)
}

/// Single-site forward-backward propagator (used for P = 1).
pub fn one_body_fb_propagator(h: &CMat, dt: f64, inp: Index, out: Index) -> Result<Tensor> {
    h.ensure_hermitian(1e-10)?;
    let e = h.herm_exp_scaled(C64::new(0.0, -dt))?;
    fb_tensor(&e, h.nrows(), &[inp], &[out])
}

/// Pair Hamiltonians of the TEBD grouping: one-body terms are absorbed into
/// the neighbouring pair term, halved on interior sites and kept whole on the
/// terminal ones.
pub fn pair_hamiltonians(model: &SpinChainModel) -> Result<Vec<CMat>> {
    let p = model.sites;
    let id = CMat::identity(model.local_dim);
    let mut out = Vec::with_capacity(p.saturating_sub(1));
    for i in 1..p {
        let left_coeff = if i == 1 { 1.0 } else { 0.5 };
        let right_coeff = if i + 1 == p { 1.0 } else { 0.5 };
        let h = model
            .two_body_term(i)?
            .add(
                &model
                    .one_body_term(i)?
                    .scaled(C64::new(left_coeff, 0.0))
                    .kron(&id),
            )
            .add(
                &id.kron(
                    &model
                        .one_body_term(i + 1)?
                        .scaled(C64::new(right_coeff, 0.0)),
                ),
            );
        out.push(h);
    }
    Ok(out)
}

fn append_unit_bond(t: &Tensor, bond: &Index) -> Result<Tensor> {
    debug_assert_eq!(bond.dim(), 1);
    let mut idx = t.indices().to_vec();
    idx.push(bond.clone());
    Tensor::new(idx, t.data().to_vec())
}

/// One even or odd TEBD layer as an MPO. `odd` selects the pairs starting at
/// odd 1-based sites. Each two-body block is split by SVD into single-site
/// factors (chi cutoff, sqrt of the singular values absorbed into both);
/// uncovered sites carry identities, and unit-dimensional bonds join the
/// blocks into a proper MPO.
fn tebd_layer(
    model: &SpinChainModel,
    dt: f64,
    odd: bool,
    chi: f64,
) -> Result<MatrixProductOperator> {
    let p = model.sites;
    let d2 = model.local_dim * model.local_dim;
    let pairs = pair_hamiltonians(model)?;
    let mut tensors: Vec<Option<Tensor>> = vec![None; p];
    let mut ins: Vec<Index> = Vec::with_capacity(p);
    let mut outs: Vec<Index> = Vec::with_capacity(p);
    for i in 0..p {
        ins.push(Index::site(d2).with_site(i as u32 + 1));
        outs.push(Index::site(d2).with_site(i as u32 + 1));
    }
    let mut i = 0usize;
    while i < p {
        let pair_starts_here = (i + 1 < p) && ((i % 2 == 0) == odd);
        if pair_starts_here {
            let k = two_body_fb_propagator(
                &pairs[i],
                dt,
                [ins[i].clone(), ins[i + 1].clone()],
                [outs[i].clone(), outs[i + 1].clone()],
            )?;
            let parts = svd_truncate(
                &k,
                &[ins[i].id(), outs[i].id()],
                chi,
                None,
                Absorb::SqrtBoth,
                IndexKind::SpatialBond,
                Tags::default(),
            )?;
            tensors[i] = Some(parts.u);
            tensors[i + 1] = Some(parts.v);
            i += 2;
        } else {
            let t = Tensor::from_fn(vec![outs[i].clone(), ins[i].clone()], |co| {
                if co[0] == co[1] {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            })?;
            tensors[i] = Some(t);
            i += 1;
        }
    }
    let mut tensors: Vec<Tensor> = tensors.into_iter().map(Option::unwrap).collect();
    for i in 0..p - 1 {
        if tensors[i].shared_ids(&tensors[i + 1]).is_empty() {
            let b = Index::spatial(1);
            tensors[i] = append_unit_bond(&tensors[i], &b)?;
            tensors[i + 1] = append_unit_bond(&tensors[i + 1], &b)?;
        }
    }
    MatrixProductOperator::new(tensors, ins, outs)
}

/// Build the forward-backward propagator MPO for one timestep:
/// K ≈ K_odd(dt/2) K_even(dt) K_odd(dt/2), combined into a single MPO by
/// sequential MPO products at cutoff `chi`. P = 1 returns the bare
/// single-site propagator; P = 2 is a single pair and carries no splitting
/// error.
pub fn build_fb_mpo(model: &SpinChainModel, dt: f64, chi: f64) -> Result<MatrixProductOperator> {
    model.validate()?;
    let p = model.sites;
    let d2 = model.local_dim * model.local_dim;
    if p == 1 {
        let inp = Index::site(d2).with_site(1);
        let out = Index::site(d2).with_site(1);
        let t = one_body_fb_propagator(&model.one_body_term(1)?, dt, inp.clone(), out.clone())?;
        return MatrixProductOperator::new(vec![t], vec![inp], vec![out]);
    }
    if p == 2 {
        return tebd_layer(model, dt, true, chi);
    }
    let odd_a = tebd_layer(model, 0.5 * dt, true, chi)?;
    let even = tebd_layer(model, dt, false, chi)?;
    let odd_b = tebd_layer(model, 0.5 * dt, true, chi)?;
    odd_b.product(&even.product(&odd_a, chi, None)?, chi, None)
}

/// The per-site temporal factorization of K: U keeps the input site index and
/// the spatial bonds, R keeps the output site index, and the fresh temporal
/// bond joins them with sqrt(S) absorbed into both factors.
#[derive(Clone, Debug)]
pub struct PropagatorFactors {
    u_tensors: Vec<Tensor>,
    r_tensors: Vec<Tensor>,
    ins: Vec<Index>,
    outs: Vec<Index>,
    betas: Vec<Index>,
    alphas: Vec<Index>,
}

/// Split the forward-backward MPO across the (input | output) partition of
/// every site.
pub fn split_fb_mpo(k: &MatrixProductOperator, chi: f64) -> Result<PropagatorFactors> {
    let p = k.len();
    let mut u_tensors = Vec::with_capacity(p);
    let mut r_tensors = Vec::with_capacity(p);
    let mut betas = Vec::with_capacity(p);
    for i in 0..p {
        let t = &k.tensors()[i];
        let out_id = k.outs()[i].id();
        let rows: Vec<u64> = t
            .indices()
            .iter()
            .map(Index::id)
            .filter(|id| *id != out_id)
            .collect();
        let parts = svd_truncate(
            t,
            &rows,
            chi,
            None,
            Absorb::SqrtBoth,
            IndexKind::TemporalBond,
            Tags {
                site: Some(i as u32 + 1),
                time: None,
            },
        )?;
        u_tensors.push(parts.u);
        r_tensors.push(parts.v);
        betas.push(parts.bond);
    }
    let mut alphas = Vec::new();
    for i in 0..p.saturating_sub(1) {
        for id in k.tensors()[i].shared_ids(&k.tensors()[i + 1]) {
            alphas.push(k.tensors()[i].index_by_id(id).unwrap().clone());
        }
    }
    Ok(PropagatorFactors {
        u_tensors,
        r_tensors,
        ins: k.ins().to_vec(),
        outs: k.outs().to_vec(),
        betas,
        alphas,
    })
}

impl PropagatorFactors {
    pub fn len(&self) -> usize {
        self.u_tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u_tensors.is_empty()
    }

    pub fn u_tensors(&self) -> &[Tensor] {
        &self.u_tensors
    }

    pub fn r_tensors(&self) -> &[Tensor] {
        &self.r_tensors
    }

    pub fn beta_dims(&self) -> Vec<usize> {
        self.betas.iter().map(Index::dim).collect()
    }

    /// Fresh copies of the U and R columns for one timestep: the U column's
    /// site indices become `new_ins` (time n), the R column's become
    /// `new_outs` (time n+1), and all internal spatial/temporal bonds get
    /// fresh ids tagged with `time`.
    pub fn instantiate(
        &self,
        new_ins: &[Index],
        new_outs: &[Index],
        time: i64,
    ) -> Result<(Vec<Tensor>, Vec<Tensor>)> {
        let p = self.len();
        if new_ins.len() != p || new_outs.len() != p {
            return Err(Error::ChainLength {
                left: p,
                right: new_ins.len().min(new_outs.len()),
            });
        }
        let mut map: Vec<(u64, Index)> = Vec::new();
        for (old, new) in self.ins.iter().zip(new_ins) {
            if old.dim() != new.dim() {
                return Err(Error::DimMismatch {
                    id: old.id(),
                    left: old.dim(),
                    right: new.dim(),
                });
            }
            map.push((old.id(), new.clone()));
        }
        for (old, new) in self.outs.iter().zip(new_outs) {
            map.push((old.id(), new.clone()));
        }
        for a in &self.alphas {
            let fresh = Index::spatial(a.dim()).with_tags(Tags {
                site: a.tags().site,
                time: Some(time),
            });
            map.push((a.id(), fresh));
        }
        for b in &self.betas {
            let fresh = Index::temporal(b.dim()).with_tags(Tags {
                site: b.tags().site,
                time: Some(time),
            });
            map.push((b.id(), fresh));
        }
        let remap = |t: &Tensor| -> Result<Tensor> {
            let mut nt = t.clone();
            for ix in t.indices().to_vec() {
                if let Some((_, new)) = map.iter().find(|(id, _)| *id == ix.id()) {
                    nt = nt.replace_index(ix.id(), new)?;
                }
            }
            Ok(nt)
        };
        let u: Result<Vec<Tensor>> = self.u_tensors.iter().map(&remap).collect();
        let r: Result<Vec<Tensor>> = self.r_tensors.iter().map(&remap).collect();
        Ok((u?, r?))
    }

    /// Contract each U with its R over the temporal bond; reproduces the
    /// original MPO tensors. Test support.
    pub fn recombine(&self) -> Result<MatrixProductOperator> {
        let tensors: Result<Vec<Tensor>> = self
            .u_tensors
            .iter()
            .zip(&self.r_tensors)
            .map(|(u, r)| u.contract(r))
            .collect();
        MatrixProductOperator::new(tensors?, self.ins.clone(), self.outs.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{pauli_z, SpinChainModel};
    use crate::mp::MatrixProductState;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Scaled Taylor-series matrix exponential, the independent oracle.
    fn expm_series(h: &CMat, z: C64) -> CMat {
        let n = h.nrows();
        let norm: f64 = (0..n)
            .map(|i| (0..n).map(|j| h[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max);
        let mut squarings = 0u32;
        let mut scale = C64::new(1.0, 0.0);
        while (z * scale).norm() * norm > 0.25 {
            scale *= 0.5;
            squarings += 1;
        }
        let mut term = CMat::identity(n);
        let mut acc = CMat::identity(n);
        for k in 1..30 {
            term = term.mul(h).scaled(z * scale / k as f64);
            acc = acc.add(&term);
        }
        for _ in 0..squarings {
            acc = acc.mul(&acc);
        }
        acc
    }

    fn dense_fb_of(e: &CMat) -> CMat {
        // K = E (x) conj(E) on the fused forward-backward space
        let n = e.nrows();
        CMat::from_fn(n * n, n * n, |r, col| {
            let (ao, bo) = (r / n, r % n);
            let (ai, bi) = (col / n, col % n);
            e[(ao, ai)] * e[(bo, bi)].conj()
        })
    }

    /// Dense forward-backward propagator in the per-site interleaved layout
    /// used by the MPO types: one (forward, backward) digit pair per site.
    fn dense_fb_interleaved(e: &CMat, p: usize) -> CMat {
        let dim = 4usize.pow(p as u32);
        let split = |s: usize| {
            // per-site fb digits -> (fused forward, fused backward)
            let mut a = 0usize;
            let mut b = 0usize;
            for i in 0..p {
                let dgt = (s / 4usize.pow((p - 1 - i) as u32)) % 4;
                a = a * 2 + dgt / 2;
                b = b * 2 + dgt % 2;
            }
            (a, b)
        };
        CMat::from_fn(dim, dim, |r, col| {
            let (ao, bo) = split(r);
            let (ai, bi) = split(col);
            e[(ao, ai)] * e[(bo, bi)].conj()
        })
    }

    fn fb_indices(n: usize) -> Vec<Index> {
        (0..n).map(|_| Index::site(4)).collect()
    }

    #[test]
    fn zero_timestep_is_identity() {
        let m = SpinChainModel::new(2, 0.3, 1.0, 0.1, 0.2, 0.4).unwrap();
        let h = pair_hamiltonians(&m).unwrap().remove(0);
        let ins = fb_indices(2);
        let outs = fb_indices(2);
        let k = two_body_fb_propagator(
            &h,
            0.0,
            [ins[0].clone(), ins[1].clone()],
            [outs[0].clone(), outs[1].clone()],
        )
        .unwrap();
        for a in 0..4 {
            for b in 0..4 {
                for ap in 0..4 {
                    for bp in 0..4 {
                        let v = k.at(&[a, b, ap, bp]);
                        let want = if a == ap && b == bp { 1.0 } else { 0.0 };
                        assert!((v - c(want, 0.0)).norm() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn diagonal_hamiltonian_gives_pure_phases() {
        // H = Jz sz.sz: diagonal K with phases exp(-i Jz dt (z+ z+' - z- z-'))
        let jz = 0.7;
        let dt = 0.3;
        let h = pauli_z().kron(&pauli_z()).scaled(c(jz, 0.0));
        let ins = fb_indices(2);
        let outs = fb_indices(2);
        let k = two_body_fb_propagator(
            &h,
            dt,
            [ins[0].clone(), ins[1].clone()],
            [outs[0].clone(), outs[1].clone()],
        )
        .unwrap();
        let zval = |b: usize| if b == 0 { 1.0 } else { -1.0 };
        for s1 in 0..4usize {
            for s2 in 0..4usize {
                let (a1, b1) = (s1 / 2, s1 % 2);
                let (a2, b2) = (s2 / 2, s2 % 2);
                let phase = -jz * dt * (zval(a1) * zval(a2) - zval(b1) * zval(b2));
                let want = C64::new(0.0, phase).exp();
                let got = k.at(&[s1, s2, s1, s2]);
                assert!((got - want).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn fb_propagator_matches_series_oracle() {
        // pseudo-random Hermitian 4x4
        let mut vals = Vec::new();
        let mut seed = 2024u64;
        let mut rnd = || {
            seed = seed
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((seed >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        for _ in 0..16 {
            vals.push(C64::new(rnd(), rnd()));
        }
        let raw = CMat::from_fn(4, 4, |i, j| vals[i * 4 + j]);
        let h = raw.add(&raw.adjoint()).scaled(c(0.5, 0.0));
        let dt = 0.3;
        let ins = fb_indices(2);
        let outs = fb_indices(2);
        let k = two_body_fb_propagator(
            &h,
            dt,
            [ins[0].clone(), ins[1].clone()],
            [outs[0].clone(), outs[1].clone()],
        )
        .unwrap();
        let e = expm_series(&h, c(0.0, -dt));
        let kd = dense_fb_of(&e);
        let mut max = 0.0f64;
        for s1 in 0..4usize {
            for s2 in 0..4usize {
                for t1 in 0..4usize {
                    for t2 in 0..4usize {
                        // the dense matrix fuses forward digits A = a1 a2 and
                        // backward digits B = b1 b2 of both sites
                        let row = (t1 / 2 * 2 + t2 / 2) * 4 + (t1 % 2 * 2 + t2 % 2);
                        let coln = (s1 / 2 * 2 + s2 / 2) * 4 + (s1 % 2 * 2 + s2 % 2);
                        let want = kd[(row, coln)];
                        let got = k.at(&[s1, s2, t1, t2]);
                        max = max.max((got - want).norm());
                    }
                }
            }
        }
        assert!(max <= 1e-12, "max dev {max:.3e}");
        let err = two_body_fb_propagator(
            &raw,
            dt,
            fb_indices(2).try_into().unwrap(),
            fb_indices(2).try_into().unwrap(),
        );
        assert!(matches!(err, Err(Error::NonHermitian { .. })));
    }

    #[test]
    fn uncoupled_chain_has_unit_bonds() {
        let m = SpinChainModel::new(4, 0.2, 1.0, 0.0, 0.0, 0.0).unwrap();
        let k = build_fb_mpo(&m, 0.25, 1e-11).unwrap();
        assert_eq!(k.bond_dims(), vec![1, 1, 1]);
        // equals the product of single-site forward-backward propagators
        let e1 = m
            .one_body_term(1)
            .unwrap()
            .herm_exp_scaled(c(0.0, -0.25))
            .unwrap();
        let kd = k.to_dense_matrix().unwrap();
        let k1 = dense_fb_of(&e1);
        let mut full = CMat::identity(1);
        for _ in 0..4 {
            full = full.kron(&k1);
        }
        assert!(kd.max_abs_diff(&full) <= 1e-12);
    }

    #[test]
    fn trotter_error_second_order_per_step() {
        let m = SpinChainModel::ising(3, 1.0, 0.2).unwrap();
        let h0 = m.chain_hamiltonian().unwrap();
        let err_at = |dt: f64| -> f64 {
            let k = build_fb_mpo(&m, dt, 0.0).unwrap();
            let kd = k.to_dense_matrix().unwrap();
            let e = h0.herm_exp_scaled(c(0.0, -dt)).unwrap();
            let exact = dense_fb_interleaved(&e, 3);
            kd.max_abs_diff(&exact)
        };
        let e1 = err_at(0.25);
        let e2 = err_at(0.125);
        let ratio = e1 / e2;
        assert!(
            (5.5..11.0).contains(&ratio),
            "per-step error ratio {ratio} (want ~8 for a dt^3 local error)"
        );
    }

    #[test]
    fn fb_mpo_preserves_trace_and_hermiticity() {
        let m = SpinChainModel::new(3, 0.1, 1.0, 0.2, 0.1, 0.4).unwrap();
        let k = build_fb_mpo(&m, 0.25, 0.0).unwrap();
        let up = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let plus = vec![c(0.5, 0.0), c(0.5, 0.1), c(0.5, -0.1), c(0.5, 0.0)];
        let rho = MatrixProductState::product(&[up, plus.clone(), plus]).unwrap();
        let mut state = rho;
        for _ in 0..3 {
            state = k.apply(&state, 0.0, None).unwrap();
        }
        let tr = state.trace().unwrap();
        assert!((tr - c(1.0, 0.0)).norm() <= 1e-12);
        // dense Hermiticity check
        let v = state.to_dense_vector().unwrap();
        let dim = 8usize;
        for a in 0..dim {
            for b in 0..dim {
                let idx = |x: usize, y: usize| -> usize {
                    let mut out = 0;
                    for site in (0..3).rev() {
                        let ax = (x >> site) & 1;
                        let by = (y >> site) & 1;
                        out = out * 4 + ax * 2 + by;
                    }
                    out
                };
                let z = v[idx(a, b)];
                let zc = v[idx(b, a)].conj();
                assert!((z - zc).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn split_identity_mpo_recombines_exactly() {
        // delta(s_in, s_out) has full rank d² across the in|out partition,
        // so the temporal bonds saturate at 4 and carry unit weights; the
        // factors reproduce the identity per site.
        let id = MatrixProductOperator::identity(&[4, 4, 4]).unwrap();
        let f = split_fb_mpo(&id, 1e-11).unwrap();
        assert_eq!(f.beta_dims(), vec![4, 4, 4]);
        let rec = f.recombine().unwrap();
        let m = rec.to_dense_matrix().unwrap();
        assert!(m.max_abs_diff(&CMat::identity(64)) <= 1e-12);
    }

    #[test]
    fn split_and_recombine_reproduces_mpo() {
        let m = SpinChainModel::new(2, 0.0, 1.0, 0.0, 0.0, 0.4).unwrap();
        let k = build_fb_mpo(&m, 0.25, 0.0).unwrap();
        let f = split_fb_mpo(&k, 0.0).unwrap();
        let rec = f.recombine().unwrap();
        let a = k.to_dense_matrix().unwrap();
        let b = rec.to_dense_matrix().unwrap();
        assert!(a.max_abs_diff(&b) <= 1e-12);
    }

    #[test]
    fn dephasing_split_rank_counts_gram_eigenvalues() {
        // single-site pure dephasing: U and R stay diagonal; the temporal
        // bond rank equals the Gram-matrix rank of the diagonal propagator
        let m = SpinChainModel::new(1, 0.8, 0.0, 0.0, 0.0, 0.0).unwrap();
        let k = build_fb_mpo(&m, 0.3, 1e-11).unwrap();
        let f = split_fb_mpo(&k, 1e-11).unwrap();
        let kd = k.to_dense_matrix().unwrap();
        let gram = kd.adjoint().mul(&kd);
        let (evals, _) = gram.herm_eig().unwrap();
        let rank = evals.iter().filter(|&&e| e > 1e-20).count();
        assert_eq!(f.beta_dims(), vec![rank]);
        assert!(f.beta_dims()[0] <= 4);
        let rec = f.recombine().unwrap().to_dense_matrix().unwrap();
        for r in 0..4 {
            for ccol in 0..4 {
                if r != ccol {
                    assert!(rec[(r, ccol)].norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn instantiate_rewires_fresh_ids() {
        let m = SpinChainModel::ising(3, 1.0, 0.5).unwrap();
        let k = build_fb_mpo(&m, 0.25, 1e-12).unwrap();
        let f = split_fb_mpo(&k, 1e-12).unwrap();
        let new_ins: Vec<Index> = (0..3).map(|i| Index::site(4).with_site(i + 1)).collect();
        let new_outs: Vec<Index> = (0..3).map(|i| Index::site(4).with_site(i + 1)).collect();
        let (u, r) = f.instantiate(&new_ins, &new_outs, 7).unwrap();
        for (i, t) in u.iter().enumerate() {
            assert!(t.has_index(new_ins[i].id()));
            assert!(!t.has_index(f.ins[i].id()));
        }
        for (i, t) in r.iter().enumerate() {
            assert!(t.has_index(new_outs[i].id()));
        }
        // the instantiated chain recombines to the same dense propagator
        let tensors: Vec<Tensor> = u
            .iter()
            .zip(&r)
            .map(|(a, b)| a.contract(b).unwrap())
            .collect();
        let mpo = MatrixProductOperator::new(tensors, new_ins, new_outs).unwrap();
        let want = k.to_dense_matrix().unwrap();
        assert!(mpo.to_dense_matrix().unwrap().max_abs_diff(&want) <= 1e-12);
    }
}
