//! Independent brute-force reference solvers, deliberately naive and kept
//! separate from the tensor-network path: exact Liouville propagation of the
//! bare chain, a literal sum over all forward-backward paths with influence
//! weights, and exact diagonalization of the system plus a truncated discrete
//! bath. These anchor every derived expectation in the test suites.

use crate::error::{Error, Result};
use crate::influence::EtaTable;
use crate::linalg::{sym_eig_f64, CMat};
use crate::model::{BathMode, SpinChainModel};
use crate::C64;

/// Dense density matrix with its sanity checks.
#[derive(Clone, Debug)]
pub struct DenseState {
    pub rho: CMat,
}

impl DenseState {
    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    /// Hermitian, unit trace, positive semidefinite within `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        self.rho.ensure_hermitian(tol)?;
        let tr = self.rho.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > tol {
            return Err(Error::InvalidParameter {
                name: "rho",
                reason: format!("trace {tr} deviates from 1"),
            });
        }
        let herm = self
            .rho
            .add(&self.rho.adjoint())
            .scaled(C64::new(0.5, 0.0));
        let (evals, _) = herm.herm_eig()?;
        if evals.iter().any(|&e| e < -tol) {
            return Err(Error::InvalidParameter {
                name: "rho",
                reason: format!("negative eigenvalue {:.3e}", evals[0]),
            });
        }
        Ok(())
    }
}

/// Vectorize a d^P x d^P density matrix into the per-site interleaved
/// forward-backward layout (site 1 slowest, forward digit before backward).
pub fn vectorize_density(rho: &CMat, p: usize, d: usize) -> Vec<C64> {
    let d2 = d * d;
    let dim = d2.pow(p as u32);
    let mut out = vec![C64::new(0.0, 0.0); dim];
    for (s, slot) in out.iter_mut().enumerate() {
        let mut a = 0usize;
        let mut b = 0usize;
        for i in 0..p {
            let dgt = (s / d2.pow((p - 1 - i) as u32)) % d2;
            a = a * d + dgt / d;
            b = b * d + dgt % d;
        }
        *slot = rho[(a, b)];
    }
    out
}

/// Inverse of [`vectorize_density`].
pub fn unvectorize_density(v: &[C64], p: usize, d: usize) -> CMat {
    let d2 = d * d;
    let dp = d.pow(p as u32);
    let mut rho = CMat::zeros(dp, dp);
    for (s, val) in v.iter().enumerate() {
        let mut a = 0usize;
        let mut b = 0usize;
        for i in 0..p {
            let dgt = (s / d2.pow((p - 1 - i) as u32)) % d2;
            a = a * d + dgt / d;
            b = b * d + dgt % d;
        }
        rho[(a, b)] = *val;
    }
    rho
}

/// The exact forward-backward superoperator of a unitary `e` on the
/// interleaved layout: element = e[A', A] conj(e[B', B]).
pub fn fb_superoperator(e: &CMat, p: usize, d: usize) -> CMat {
    let d2 = d * d;
    let dim = d2.pow(p as u32);
    let split = |s: usize| {
        let mut a = 0usize;
        let mut b = 0usize;
        for i in 0..p {
            let dgt = (s / d2.pow((p - 1 - i) as u32)) % d2;
            a = a * d + dgt / d;
            b = b * d + dgt % d;
        }
        (a, b)
    };
    CMat::from_fn(dim, dim, |r, col| {
        let (ao, bo) = split(r);
        let (ai, bi) = split(col);
        e[(ao, ai)] * e[(bo, bi)].conj()
    })
}

/// Exact bare-chain evolution rho(n dt) = U^n rho0 (U^n)^H via one
/// eigendecomposition (no Trotter error). Returns states at steps 0..=n.
pub fn dense_liouville_trajectory(
    model: &SpinChainModel,
    rho0: &CMat,
    dt: f64,
    n: usize,
) -> Result<Vec<DenseState>> {
    if model.sites > 7 {
        return Err(Error::SizeGuard {
            what: "dense Liouville propagation",
            size: model.sites,
            limit: 7,
        });
    }
    let h = model.chain_hamiltonian()?;
    let (w, v) = h.herm_eig()?;
    let dim = h.nrows();
    let vh = v.adjoint();
    let mut out = Vec::with_capacity(n + 1);
    for step in 0..=n {
        let t = step as f64 * dt;
        let mut phase = CMat::zeros(dim, dim);
        for i in 0..dim {
            for k in 0..dim {
                phase[(i, k)] = v[(i, k)] * C64::new(0.0, -w[k] * t).exp();
            }
        }
        let u = phase.mul(&vh);
        let rho = u.mul(rho0).mul(&u.adjoint());
        out.push(DenseState { rho });
    }
    Ok(out)
}

/// Endpoint of [`dense_liouville_trajectory`].
pub fn dense_liouville_propagate(
    model: &SpinChainModel,
    rho0: &CMat,
    dt: f64,
    n: usize,
) -> Result<DenseState> {
    Ok(dense_liouville_trajectory(model, rho0, dt, n)?
        .pop()
        .unwrap())
}

/// Literal sum over all forward-backward paths: bare path amplitudes from the
/// exact one-step propagator times the per-site influence weights from `eta`
/// (pairs beyond the tabulated memory carry no factor). Returns the reduced
/// density at every step 0..=n_steps.
pub fn brute_force_path_sum(
    model: &SpinChainModel,
    eta: Option<&EtaTable>,
    rho0: &CMat,
    dt: f64,
    n_steps: usize,
) -> Result<Vec<DenseState>> {
    let p = model.sites;
    let d = model.local_dim;
    if p > 2 {
        return Err(Error::SizeGuard {
            what: "brute-force path sum (sites)",
            size: p,
            limit: 2,
        });
    }
    let d2p = (d * d).pow(p as u32);
    let total_paths = (d2p as u128).pow(n_steps as u32 + 1);
    if total_paths > (1u128 << 24) + 1 {
        return Err(Error::SizeGuard {
            what: "brute-force path sum (paths)",
            size: total_paths.min(usize::MAX as u128) as usize,
            limit: 1 << 24,
        });
    }
    let h = model.chain_hamiltonian()?;
    let e = h.herm_exp_scaled(C64::new(0.0, -dt))?;
    let kfb = fb_superoperator(&e, p, d);
    let rho_vec = vectorize_density(rho0, p, d);

    // per-(k, k') influence multiplier tables, shared by all sites
    let factor_tables: Vec<Vec<Option<crate::influence::InfluenceFactor>>> = match eta {
        None => Vec::new(),
        Some(table) => (0..=n_steps)
            .map(|k| {
                (0..=k)
                    .map(|kp| crate::influence::if_factor(table, k, kp).ok())
                    .collect()
            })
            .collect(),
    };

    // per-site forward-backward digit extraction
    let site_digit = |s: usize, i: usize| (s / (d * d).pow((p - 1 - i) as u32)) % (d * d);

    let mut out = Vec::with_capacity(n_steps + 1);
    out.push(DenseState { rho: rho0.clone() });
    for n in 1..=n_steps {
        let mut acc = vec![C64::new(0.0, 0.0); d2p];
        // depth-first walk over path segments S_0 .. S_n
        let mut path = vec![0usize; n + 1];
        let mut weight = vec![C64::new(0.0, 0.0); n + 1];
        let mut depth = 0usize;
        'outer: loop {
            let s = path[depth];
            // amplitude contribution at this depth
            let mut w = if depth == 0 {
                rho_vec[s]
            } else {
                weight[depth - 1] * kfb[(s, path[depth - 1])]
            };
            if eta.is_some() {
                for kp in 0..=depth {
                    if let Some(f) = &factor_tables[depth][kp] {
                        for i in 0..p {
                            w *= f.value(site_digit(s, i), site_digit(path[kp], i));
                        }
                    }
                }
            }
            weight[depth] = w;
            if depth == n {
                acc[s] += w;
                // advance the deepest digit, backtracking as needed
                loop {
                    path[depth] += 1;
                    if path[depth] < d2p {
                        continue 'outer;
                    }
                    path[depth] = 0;
                    if depth == 0 {
                        break 'outer;
                    }
                    depth -= 1;
                }
            } else {
                depth += 1;
                path[depth] = 0;
            }
        }
        out.push(DenseState {
            rho: unvectorize_density(&acc, p, d),
        });
    }
    Ok(out)
}

/// Exact diagonalization of the chain plus per-site truncated harmonic baths.
/// The initial state is rho0_sys times the thermal state of the bare bath
/// (exact Boltzmann weights over the truncated ladders, renormalized).
/// Returns the system marginal at each requested time.
pub fn exact_diag_system_bath(
    model: &SpinChainModel,
    modes: &[BathMode],
    fock_levels: &[usize],
    beta: f64,
    rho0_sys: &CMat,
    times: &[f64],
) -> Result<Vec<DenseState>> {
    let p = model.sites;
    let d = model.local_dim;
    if p > 2 {
        return Err(Error::SizeGuard {
            what: "exact diagonalization (sites)",
            size: p,
            limit: 2,
        });
    }
    if fock_levels.len() != modes.len() {
        return Err(Error::ChainLength {
            left: fock_levels.len(),
            right: modes.len(),
        });
    }
    if fock_levels.iter().any(|&l| l < 2) {
        return Err(Error::InvalidParameter {
            name: "fock_levels",
            reason: "need at least 2 levels per mode".into(),
        });
    }
    let dsys = d.pow(p as u32);
    let bath_per_site: usize = fock_levels.iter().product();
    let dim = dsys * bath_per_site.pow(p as u32);
    if dim > 20_000 {
        return Err(Error::SizeGuard {
            what: "exact diagonalization (dimension)",
            size: dim,
            limit: 20_000,
        });
    }

    // dense real builders
    let kron = |a: (&[f64], usize), b: (&[f64], usize)| -> (Vec<f64>, usize) {
        let (am, an) = (a.1, a.0.len() / a.1);
        let (bm, bn) = (b.1, b.0.len() / b.1);
        let m = am * bm;
        let n = an * bn;
        let mut out = vec![0.0; m * n];
        for i in 0..m {
            for j in 0..n {
                out[i * n + j] = a.0[(i / bm) * an + j / bn] * b.0[(i % bm) * bn + j % bn];
            }
        }
        (out, m)
    };
    let eye = |n: usize| -> (Vec<f64>, usize) {
        let mut v = vec![0.0; n * n];
        for i in 0..n {
            v[i * n + i] = 1.0;
        }
        (v, n)
    };

    // system Hamiltonian must be real for the symmetric eigensolver
    let hsys_c = model.chain_hamiltonian()?;
    let mut hsys = vec![0.0; dsys * dsys];
    for i in 0..dsys {
        for j in 0..dsys {
            let z = hsys_c[(i, j)];
            if z.im.abs() > 1e-12 {
                return Err(Error::InvalidParameter {
                    name: "model",
                    reason: "chain Hamiltonian must be real for this solver".into(),
                });
            }
            hsys[i * dsys + j] = z.re;
        }
    }
    let sz_diag: Vec<f64> = (0..d).map(|a| if a == 0 { 1.0 } else { -1.0 }).collect();

    let bath_dim_all = bath_per_site.pow(p as u32);
    let eye_bath = eye(bath_dim_all);
    let mut h = kron((&hsys, dsys), (&eye_bath.0, eye_bath.1));
    // per site, per mode: oscillator energy, counterterm, coupling
    for site in 0..p {
        for (l, mode) in modes.iter().enumerate() {
            let nl = fock_levels[l];
            // number operator ladder
            let mut hosc = vec![0.0; nl * nl];
            for nq in 0..nl {
                hosc[nq * nl + nq] = mode.omega * (nq as f64 + 0.5)
                    + mode.coupling * mode.coupling / (2.0 * mode.omega * mode.omega);
            }
            // x = (a + a^dag)/sqrt(2 w)
            let mut x = vec![0.0; nl * nl];
            for nq in 0..nl - 1 {
                let v = ((nq + 1) as f64 / (2.0 * mode.omega)).sqrt();
                x[nq * nl + nq + 1] = v;
                x[(nq + 1) * nl + nq] = v;
            }
            // embed: sys (x) bath_site_1 (x) ... where each site's bath is the
            // product over its modes, in mode order
            let embed_bath_op = |op: (&[f64], usize), op_site: usize, op_mode: usize| {
                let mut acc = eye(1);
                for s2 in 0..p {
                    for l2 in 0..modes.len() {
                        if s2 == op_site && l2 == op_mode {
                            acc = kron((&acc.0, acc.1), op);
                        } else {
                            let e = eye(fock_levels[l2]);
                            acc = kron((&acc.0, acc.1), (&e.0, e.1));
                        }
                    }
                }
                acc
            };
            let bath_e = embed_bath_op((&hosc, nl), site, l);
            let eye_sys = eye(dsys);
            let full_e = kron((&eye_sys.0, eye_sys.1), (&bath_e.0, bath_e.1));
            for (hv, ev) in h.0.iter_mut().zip(&full_e.0) {
                *hv += ev;
            }
            // coupling -c * sz_site (x) x
            let mut szs = eye(1);
            for s2 in 0..p {
                if s2 == site {
                    let mut m = vec![0.0; d * d];
                    for a in 0..d {
                        m[a * d + a] = sz_diag[a];
                    }
                    szs = kron((&szs.0, szs.1), (&m, d));
                } else {
                    let e = eye(d);
                    szs = kron((&szs.0, szs.1), (&e.0, e.1));
                }
            }
            let bath_x = embed_bath_op((&x, nl), site, l);
            let full_c = kron((&szs.0, szs.1), (&bath_x.0, bath_x.1));
            for (hv, cv) in h.0.iter_mut().zip(&full_c.0) {
                *hv -= mode.coupling * cv;
            }
        }
    }
    debug_assert_eq!(h.1, dim);

    let (w, q) = sym_eig_f64(&h.0, dim)?;

    // thermal weights of the bare bath, truncated and renormalized
    let mut bath_weights = vec![1.0f64];
    for _site in 0..p {
        for (l, mode) in modes.iter().enumerate() {
            let nl = fock_levels[l];
            let z: f64 = (0..nl).map(|nq| (-beta * mode.omega * nq as f64).exp()).sum();
            let mut next = Vec::with_capacity(bath_weights.len() * nl);
            for &bw in &bath_weights {
                for nq in 0..nl {
                    next.push(bw * (-beta * mode.omega * nq as f64).exp() / z);
                }
            }
            bath_weights = next;
        }
    }
    debug_assert_eq!(bath_weights.len(), bath_dim_all);

    // W = Q^T rho0 Q with rho0 = rho0_sys (x) diag(bath_weights)
    let rho0_re: Vec<f64> = {
        let mut v = vec![0.0; dim * dim];
        for a in 0..dsys {
            for b in 0..dsys {
                let z = rho0_sys[(a, b)];
                if z.im.abs() > 1e-13 {
                    // complex part handled below; real path only here
                }
                for (nu, &bw) in bath_weights.iter().enumerate() {
                    v[(a * bath_dim_all + nu) * dim + (b * bath_dim_all + nu)] = z.re * bw;
                }
            }
        }
        v
    };
    let has_imag = (0..dsys)
        .any(|a| (0..dsys).any(|b| rho0_sys[(a, b)].im.abs() > 1e-13));
    let matmul_f64 = |a: &[f64], m: usize, k: usize, b: &[f64], n: usize| -> Vec<f64> {
        let fa = faer::MatRef::from_row_major_slice(a, m, k);
        let fb = faer::MatRef::from_row_major_slice(b, k, n);
        let fc = fa * fb;
        let mut out = vec![0.0; m * n];
        for i in 0..m {
            for j in 0..n {
                out[i * n + j] = fc[(i, j)];
            }
        }
        out
    };
    let qt: Vec<f64> = {
        let mut v = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                v[i * dim + j] = q[j * dim + i];
            }
        }
        v
    };
    let w_re = matmul_f64(&matmul_f64(&qt, dim, dim, &rho0_re, dim), dim, dim, &q, dim);
    let w_im: Option<Vec<f64>> = if has_imag {
        let mut rho0_im = vec![0.0; dim * dim];
        for a in 0..dsys {
            for b in 0..dsys {
                for (nu, &bw) in bath_weights.iter().enumerate() {
                    rho0_im[(a * bath_dim_all + nu) * dim + (b * bath_dim_all + nu)] =
                        rho0_sys[(a, b)].im * bw;
                }
            }
        }
        Some(matmul_f64(
            &matmul_f64(&qt, dim, dim, &rho0_im, dim),
            dim,
            dim,
            &q,
            dim,
        ))
    } else {
        None
    };

    // E_ab[m, n] = sum_nu Q[(a,nu), m] Q[(b,nu), n]
    let block = |a: usize| -> Vec<f64> {
        let mut v = vec![0.0; bath_dim_all * dim];
        for nu in 0..bath_dim_all {
            let row = a * bath_dim_all + nu;
            v[nu * dim..(nu + 1) * dim].copy_from_slice(&q[row * dim..(row + 1) * dim]);
        }
        v
    };
    let mut g_ab: Vec<Vec<C64>> = Vec::with_capacity(dsys * dsys);
    for a in 0..dsys {
        let qa = block(a);
        let qat: Vec<f64> = {
            let mut v = vec![0.0; dim * bath_dim_all];
            for i in 0..bath_dim_all {
                for j in 0..dim {
                    v[j * bath_dim_all + i] = qa[i * dim + j];
                }
            }
            v
        };
        for b in 0..dsys {
            let qb = block(b);
            let e_ab = matmul_f64(&qat, dim, bath_dim_all, &qb, dim);
            let mut g = vec![C64::new(0.0, 0.0); dim * dim];
            for m in 0..dim {
                for n2 in 0..dim {
                    let wmn = C64::new(
                        w_re[m * dim + n2],
                        w_im.as_ref().map_or(0.0, |wi| wi[m * dim + n2]),
                    );
                    g[m * dim + n2] = wmn * e_ab[m * dim + n2];
                }
            }
            g_ab.push(g);
        }
    }

    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let mut rho = CMat::zeros(dsys, dsys);
        for a in 0..dsys {
            for b in 0..dsys {
                let g = &g_ab[a * dsys + b];
                let mut acc = C64::new(0.0, 0.0);
                for m in 0..dim {
                    for n2 in 0..dim {
                        let phase = C64::new(0.0, -(w[m] - w[n2]) * t).exp();
                        acc += g[m * dim + n2] * phase;
                    }
                }
                rho[(a, b)] = acc;
            }
        }
        out.push(DenseState { rho });
    }
    Ok(out)
}

/// Fock levels per mode such that the truncated thermal tail weight per mode
/// is below `weight_tol`.
pub fn suggest_fock_levels(modes: &[BathMode], beta: f64, weight_tol: f64) -> Vec<usize> {
    modes
        .iter()
        .map(|m| {
            let n = (-weight_tol.ln() / (beta * m.omega)).ceil() as usize + 2;
            n.max(2)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::influence::eta_coefficients;
    use crate::model::{pauli_z, BathModel};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn up_density(p: usize) -> CMat {
        let dim = 1 << p;
        let mut rho = CMat::zeros(dim, dim);
        rho[(0, 0)] = c(1.0, 0.0);
        rho
    }

    #[test]
    fn single_spin_rabi_from_dense_oracle() {
        let model = SpinChainModel::new(1, 0.0, 1.0, 0.0, 0.0, 0.0).unwrap();
        let traj = dense_liouville_trajectory(&model, &up_density(1), 0.1, 30).unwrap();
        for (n, st) in traj.iter().enumerate() {
            st.validate(1e-10).unwrap();
            let sz = st.rho.mul(&pauli_z()).trace();
            let want = (2.0 * 0.1 * n as f64).cos();
            assert!((sz - c(want, 0.0)).norm() <= 1e-12);
        }
    }

    #[test]
    fn commuting_initial_state_is_stationary() {
        // H = eps sz with rho0 diagonal: rho stays fixed
        let model = SpinChainModel::new(1, 0.7, 0.0, 0.0, 0.0, 0.0).unwrap();
        let traj = dense_liouville_trajectory(&model, &up_density(1), 0.2, 10).unwrap();
        for st in &traj {
            assert!(st.rho.max_abs_diff(&up_density(1)) <= 1e-13);
        }
    }

    #[test]
    fn path_sum_without_bath_matches_dense_trotter_free_case() {
        // one spin: the path-sum propagator is exact, so it matches the
        // dense oracle exactly
        let model = SpinChainModel::new(1, 0.0, 1.0, 0.0, 0.0, 0.0).unwrap();
        let ps = brute_force_path_sum(&model, None, &up_density(1), 0.25, 4).unwrap();
        let dl = dense_liouville_trajectory(&model, &up_density(1), 0.25, 4).unwrap();
        for (a, b) in ps.iter().zip(&dl) {
            assert!(a.rho.max_abs_diff(&b.rho) <= 1e-12);
            a.validate(1e-10).unwrap();
        }
    }

    #[test]
    fn path_sum_two_sites_bare() {
        let model = SpinChainModel::new(2, 0.0, 1.0, 0.0, 0.0, 0.4).unwrap();
        let ps = brute_force_path_sum(&model, None, &up_density(2), 0.25, 3).unwrap();
        let dl = dense_liouville_trajectory(&model, &up_density(2), 0.25, 3).unwrap();
        for (a, b) in ps.iter().zip(&dl) {
            assert!(a.rho.max_abs_diff(&b.rho) <= 1e-12);
        }
    }

    #[test]
    fn path_sum_single_step_matches_closed_form() {
        // N=1 with bath: rho(1) = sum_{S0} I_00 I_10 I_11 K rho vectorized
        let model = SpinChainModel::new(1, 0.0, 1.0, 0.0, 0.0, 0.0).unwrap();
        let bath = BathModel::ohmic(0.25, 5.0, 1.0).unwrap();
        let table = eta_coefficients(&bath, 0.25, 1, None).unwrap();
        let ps = brute_force_path_sum(&model, Some(&table), &up_density(1), 0.25, 1).unwrap();
        let h = model.chain_hamiltonian().unwrap();
        let e = h.herm_exp_scaled(c(0.0, -0.25)).unwrap();
        let kfb = fb_superoperator(&e, 1, 2);
        let rho_vec = vectorize_density(&up_density(1), 1, 2);
        let f00 = crate::influence::if_factor(&table, 0, 0).unwrap();
        let f10 = crate::influence::if_factor(&table, 1, 0).unwrap();
        let f11 = crate::influence::if_factor(&table, 1, 1).unwrap();
        let mut want = vec![c(0.0, 0.0); 4];
        for s1 in 0..4 {
            for s0 in 0..4 {
                want[s1] += kfb[(s1, s0)]
                    * rho_vec[s0]
                    * f00.value(s0, s0)
                    * f10.value(s1, s0)
                    * f11.value(s1, s1);
            }
        }
        let got = vectorize_density(&ps[1].rho, 1, 2);
        for (x, y) in got.iter().zip(&want) {
            assert!((x - y).norm() <= 1e-13);
        }
    }

    #[test]
    fn path_sum_size_guard() {
        let model = SpinChainModel::new(2, 0.0, 1.0, 0.0, 0.0, 0.1).unwrap();
        let err = brute_force_path_sum(&model, None, &up_density(2), 0.25, 6);
        assert!(matches!(err, Err(Error::SizeGuard { .. })));
    }

    #[test]
    fn weak_coupling_path_sum_converges_linearly_to_bare() {
        // sanity check of the influence wiring: deviation from the bare
        // result shrinks linearly with xi
        let model = SpinChainModel::new(1, 0.0, 1.0, 0.0, 0.0, 0.0).unwrap();
        let bare = brute_force_path_sum(&model, None, &up_density(1), 0.25, 3).unwrap();
        let dev_at = |xi: f64| -> f64 {
            let bath = BathModel::ohmic(xi, 5.0, 1.0).unwrap();
            let table = eta_coefficients(&bath, 0.25, 3, None).unwrap();
            let ps =
                brute_force_path_sum(&model, Some(&table), &up_density(1), 0.25, 3).unwrap();
            ps[3].rho.max_abs_diff(&bare[3].rho)
        };
        let d1 = dev_at(0.02);
        let d2 = dev_at(0.01);
        let ratio = d1 / d2;
        assert!(
            (1.8..2.2).contains(&ratio),
            "deviation should scale linearly in xi, ratio {ratio}"
        );
    }

    #[test]
    fn exact_diag_decoupled_bath_matches_dense() {
        let model = SpinChainModel::new(1, 0.2, 1.0, 0.0, 0.0, 0.0).unwrap();
        let modes = vec![BathMode {
            omega: 1.5,
            coupling: 0.0,
        }];
        let times: Vec<f64> = (0..=5).map(|n| 0.2 * n as f64).collect();
        let ed =
            exact_diag_system_bath(&model, &modes, &[4], 1.0, &up_density(1), &times).unwrap();
        let dl = dense_liouville_trajectory(&model, &up_density(1), 0.2, 5).unwrap();
        for (a, b) in ed.iter().zip(&dl) {
            assert!(a.rho.max_abs_diff(&b.rho) <= 1e-10);
            a.validate(1e-9).unwrap();
        }
    }

    #[test]
    fn exact_diag_pure_dephasing_matches_analytic_decay() {
        // frozen system (Omega = 0): independent-boson model. The coherence
        // decays by exp(-4 gamma(t)) with
        // gamma(t) = (c^2/2w^3) [coth(beta w/2)(1 - cos wt) + i'less sin part]
        // whose real part controls |rho_01|.
        let model = SpinChainModel::new(1, 0.5, 0.0, 0.0, 0.0, 0.0).unwrap();
        let (omega, coupling, beta) = (1.3, 0.4, 2.0);
        let modes = vec![BathMode {
            omega,
            coupling,
        }];
        let mut rho0 = CMat::zeros(2, 2);
        rho0[(0, 0)] = c(0.5, 0.0);
        rho0[(0, 1)] = c(0.5, 0.0);
        rho0[(1, 0)] = c(0.5, 0.0);
        rho0[(1, 1)] = c(0.5, 0.0);
        let times = [0.0, 0.5, 1.0, 2.0];
        let ed = exact_diag_system_bath(&model, &modes, &[14], beta, &rho0, &times).unwrap();
        for (i, &t) in times.iter().enumerate() {
            let gamma = coupling * coupling / (2.0 * omega.powi(3))
                * crate::quad::coth(0.5 * beta * omega)
                * (1.0 - (omega * t).cos());
            let want = 0.5 * (-4.0 * gamma).exp();
            let got = ed[i].rho[(0, 1)].norm();
            assert!(
                (got - want).abs() <= 1e-6,
                "t={t}: |rho01| = {got}, want {want}"
            );
        }
    }

    #[test]
    fn exact_diag_dimension_guard() {
        let model = SpinChainModel::new(2, 0.0, 1.0, 0.0, 0.0, 0.1).unwrap();
        let modes = vec![
            BathMode {
                omega: 1.0,
                coupling: 0.1,
            },
            BathMode {
                omega: 2.0,
                coupling: 0.1,
            },
        ];
        let err = exact_diag_system_bath(
            &model,
            &modes,
            &[60, 60],
            1.0,
            &up_density(2),
            &[0.0],
        );
        assert!(matches!(err, Err(Error::SizeGuard { .. })));
    }

    #[test]
    fn suggested_levels_shrink_with_frequency() {
        let modes = vec![
            BathMode {
                omega: 0.4,
                coupling: 0.1,
            },
            BathMode {
                omega: 4.0,
                coupling: 0.1,
            },
        ];
        let levels = suggest_fock_levels(&modes, 1.0, 1e-6);
        assert!(levels[0] > levels[1]);
        assert!(levels[1] >= 2);
    }
}
