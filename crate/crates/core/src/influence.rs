//! Discretized influence functional: the bath response function C(t), the
//! eta-coefficients obtained by integrating C over quasi-adiabatic time
//! windows, and the per-time-point factor MPOs applied row-wise across the
//! grid.
//!
//! The eta table is defined directly as double window-integrals of C(t):
//! interior time points own the window [t_k - dt/2, t_k + dt/2], the initial
//! point owns [0, dt/2], and (optionally) a designated final point owns
//! [t_N - dt/2, t_N]. Diagonal entries integrate the ordered simplex
//! t'' <= t'. The time integrals are carried out analytically per frequency,
//! leaving a single frequency integral (an exact finite sum for discrete
//! baths).

use crate::error::{Error, Result};
use crate::model::{BathMode, BathModel, SpectralDensity};
use crate::mp::MatrixProductOperator;
use crate::quad::{adaptive_gauss_kronrod, coth, gauss_laguerre};
use crate::tensor::{Index, IndexKind, Tensor};
use crate::C64;

/// Time window owned by a discretized path point.
#[derive(Clone, Copy, Debug)]
struct Window {
    lo: f64,
    hi: f64,
}

impl Window {
    fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Integral of e^{i w t} over the window, written in a form stable for
    /// small w.
    fn osc(&self, w: f64) -> C64 {
        let width = self.width();
        let mid = 0.5 * (self.lo + self.hi);
        let amp = if (w * width).abs() < 1e-8 {
            width
        } else {
            2.0 * (0.5 * w * width).sin() / w
        };
        C64::new(0.0, w * mid).exp() * amp
    }
}

#[derive(Clone, Copy, Debug)]
enum Kernel {
    /// Double integral over two disjoint windows (k > k').
    Pair(Window, Window),
    /// Ordered simplex t'' <= t' within one window (k = k').
    Diag(Window),
}

impl Kernel {
    /// (integral of cos(w(t'-t'')), integral of sin(w(t'-t''))) over the
    /// domain.
    fn cos_sin(&self, w: f64) -> (f64, f64) {
        match self {
            Kernel::Pair(wk, wkp) => {
                let z = wk.osc(w) * wkp.osc(w).conj();
                (z.re, z.im)
            }
            Kernel::Diag(win) => {
                let width = win.width();
                let s = (0.5 * w * width).sin();
                let cos_part = 2.0 * s * s / (w * w);
                let x = w * width;
                let sin_part = if x.abs() < 1e-3 {
                    w * width.powi(3) / 6.0 - w.powi(3) * width.powi(5) / 120.0
                } else {
                    width / w - (w * width).sin() / (w * w)
                };
                (cos_part, sin_part)
            }
        }
    }
}

fn ohmic_j(xi: f64, omega_c: f64, w: f64) -> f64 {
    std::f64::consts::FRAC_PI_2 * xi * w * (-w / omega_c).exp()
}

/// Bath response function C(t) = (1/pi) int_0^inf dw J(w)
/// [coth(beta w / 2) cos(wt) - i sin(wt)], t >= 0.
pub fn bath_correlation(bath: &BathModel, t: f64) -> Result<C64> {
    if t < 0.0 {
        return Err(Error::OutOfRange {
            name: "t",
            reason: format!("need t >= 0, got {t}"),
        });
    }
    let beta = bath.beta;
    match &bath.spectral_density {
        SpectralDensity::Discrete { modes } => Ok(discrete_sum(modes, beta, |w| {
            ((w * t).cos(), (w * t).sin())
        })),
        SpectralDensity::Ohmic { xi, omega_c } => {
            if *xi == 0.0 {
                return Ok(C64::new(0.0, 0.0));
            }
            // scale reference from the non-oscillatory t=0 integrand
            let scale = ohmic_integral(*xi, *omega_c, beta, |_| (1.0, 0.0), 1e-300)?;
            ohmic_integral(
                *xi,
                *omega_c,
                beta,
                |w| ((w * t).cos(), (w * t).sin()),
                1e-13 * scale.norm(),
            )
        }
    }
}

/// (1/pi) int dw J(w) [coth(beta w/2) * cos_part(w) - i sin_part(w)] by
/// adaptive quadrature at relative tolerance 1e-10.
fn ohmic_integral(
    xi: f64,
    omega_c: f64,
    beta: f64,
    parts: impl Fn(f64) -> (f64, f64),
    abs_floor: f64,
) -> Result<C64> {
    let upper = omega_c * 50.0;
    let f = |w: f64| -> C64 {
        if w <= 0.0 {
            // limit: J coth -> pi xi / beta, sin part -> 0 at w = 0
            let (c, _) = parts(0.0);
            return C64::new(xi / beta * std::f64::consts::PI * c, 0.0);
        }
        let j = ohmic_j(xi, omega_c, w);
        let (c, s) = parts(w);
        C64::new(j * coth(0.5 * beta * w) * c, -j * s)
    };
    let r = adaptive_gauss_kronrod(f, 0.0, upper, 1e-10, abs_floor)?;
    Ok(r.value / std::f64::consts::PI)
}

fn discrete_sum(modes: &[BathMode], beta: f64, parts: impl Fn(f64) -> (f64, f64)) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for m in modes {
        let pref = m.coupling * m.coupling / (2.0 * m.omega);
        let (c, s) = parts(m.omega);
        acc += C64::new(pref * coth(0.5 * beta * m.omega) * c, -pref * s);
    }
    acc
}

fn eta_entry(bath: &BathModel, kernel: Kernel, abs_floor: f64) -> Result<C64> {
    match &bath.spectral_density {
        SpectralDensity::Discrete { modes } => {
            Ok(discrete_sum(modes, bath.beta, |w| kernel.cos_sin(w)))
        }
        SpectralDensity::Ohmic { xi, omega_c } => {
            if *xi == 0.0 {
                return Ok(C64::new(0.0, 0.0));
            }
            ohmic_integral(*xi, *omega_c, bath.beta, |w| kernel.cos_sin(w), abs_floor)
        }
    }
}

/// Entries for a designated terminal (final) time point whose window is the
/// half-width [t_N - dt/2, t_N].
#[derive(Clone, Debug)]
pub struct TerminalEtas {
    pub point: usize,
    eta_nn: C64,
    /// (N, N-j), j = 1..=memory, the earlier point interior.
    eta_n_sep: Vec<C64>,
    /// (N, 0) when the initial point is inside the memory window.
    eta_n0: Option<C64>,
}

/// Discretized bath-response coefficients eta_kk' for |k - k'| <= L, with the
/// window classification of each endpoint (initial half-window, interior
/// midpoint window, optional terminal half-window) baked in. Interior-pair
/// entries depend only on the separation k - k'.
#[derive(Clone, Debug)]
pub struct EtaTable {
    dt: f64,
    memory: usize,
    coupling_eigs: Vec<f64>,
    eta_00: C64,
    eta_diag: C64,
    eta_k0: Vec<C64>,
    eta_sep: Vec<C64>,
    terminal: Option<TerminalEtas>,
}

impl EtaTable {
    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn memory(&self) -> usize {
        self.memory
    }

    pub fn coupling_eigs(&self) -> &[f64] {
        &self.coupling_eigs
    }

    /// eta for the ordered pair k' <= k, or None when the separation exceeds
    /// the memory length (such pairs carry no influence factor).
    pub fn eta(&self, k: usize, kp: usize) -> Option<C64> {
        if kp > k || k - kp > self.memory {
            return None;
        }
        if let Some(term) = &self.terminal {
            if k == term.point {
                return if kp == k {
                    Some(term.eta_nn)
                } else if kp == 0 {
                    term.eta_n0
                } else {
                    Some(term.eta_n_sep[k - kp - 1])
                };
            }
        }
        if k == kp {
            Some(if k == 0 { self.eta_00 } else { self.eta_diag })
        } else if kp == 0 {
            Some(self.eta_k0[k - 1])
        } else {
            Some(self.eta_sep[k - kp - 1])
        }
    }

    /// All tabulated (k, k', eta) triples with k within `max_k`, for
    /// inspection and the cache file.
    pub fn entries(&self, max_k: usize) -> Vec<(usize, usize, C64)> {
        let mut out = Vec::new();
        for k in 0..=max_k {
            for kp in k.saturating_sub(self.memory)..=k {
                if let Some(e) = self.eta(k, kp) {
                    out.push((k, kp, e));
                }
            }
        }
        out
    }

    /// Raw class values, in the order (eta_00, eta_diag, eta_k0[..],
    /// eta_sep[..]). Used by the table cache file.
    pub fn class_values(&self) -> (C64, C64, &[C64], &[C64]) {
        (self.eta_00, self.eta_diag, &self.eta_k0, &self.eta_sep)
    }

    /// Rebuild a table from raw class values (cache loading).
    pub fn from_class_values(
        dt: f64,
        memory: usize,
        coupling_eigs: Vec<f64>,
        eta_00: C64,
        eta_diag: C64,
        eta_k0: Vec<C64>,
        eta_sep: Vec<C64>,
    ) -> Result<Self> {
        if eta_k0.len() != memory || eta_sep.len() != memory {
            return Err(Error::InvalidParameter {
                name: "eta_table",
                reason: format!(
                    "class vectors must have length {memory}, got {} and {}",
                    eta_k0.len(),
                    eta_sep.len()
                ),
            });
        }
        Ok(EtaTable {
            dt,
            memory,
            coupling_eigs,
            eta_00,
            eta_diag,
            eta_k0,
            eta_sep,
            terminal: None,
        })
    }
}

/// Tabulate the eta-coefficients for timestep `dt` and memory length
/// `memory`. When `terminal` designates a final point N, additional entries
/// treating point N with a half-width end window are tabulated; propagation
/// itself uses the self-consistent midpoint classification.
pub fn eta_coefficients(
    bath: &BathModel,
    dt: f64,
    memory: usize,
    terminal: Option<usize>,
) -> Result<EtaTable> {
    if dt <= 0.0 {
        return Err(Error::OutOfRange {
            name: "dt",
            reason: format!("need dt > 0, got {dt}"),
        });
    }
    if memory < 1 {
        return Err(Error::OutOfRange {
            name: "memory_L",
            reason: "L out of range: need L >= 1".into(),
        });
    }
    let start = Window { lo: 0.0, hi: 0.5 * dt };
    let interior = |k: usize| Window {
        lo: k as f64 * dt - 0.5 * dt,
        hi: k as f64 * dt + 0.5 * dt,
    };

    // diagonal first; its magnitude sets the absolute floor for the
    // oscillatory separated entries
    let eta_diag = eta_entry(bath, Kernel::Diag(interior(1)), 1e-300)?;
    let floor = 1e-12 * eta_diag.norm();
    let eta_00 = eta_entry(bath, Kernel::Diag(start), floor)?;
    let mut eta_k0 = Vec::with_capacity(memory);
    let mut eta_sep = Vec::with_capacity(memory);
    for j in 1..=memory {
        eta_k0.push(eta_entry(bath, Kernel::Pair(interior(j), start), floor)?);
        eta_sep.push(eta_entry(
            bath,
            Kernel::Pair(interior(j + 1), interior(1)),
            floor,
        )?);
    }
    let terminal = match terminal {
        None => None,
        Some(n) => {
            if n < 1 {
                return Err(Error::OutOfRange {
                    name: "terminal",
                    reason: "terminal point must be >= 1".into(),
                });
            }
            let end = Window {
                lo: n as f64 * dt - 0.5 * dt,
                hi: n as f64 * dt,
            };
            let eta_nn = eta_entry(bath, Kernel::Diag(end), floor)?;
            let mut eta_n_sep = Vec::with_capacity(memory);
            for j in 1..=memory {
                if j > n {
                    break;
                }
                let other = if n - j == 0 { start } else { interior(n - j) };
                eta_n_sep.push(eta_entry(bath, Kernel::Pair(end, other), floor)?);
            }
            let eta_n0 = if n <= memory {
                Some(eta_entry(bath, Kernel::Pair(end, start), floor)?)
            } else {
                None
            };
            Some(TerminalEtas {
                point: n,
                eta_nn,
                eta_n_sep,
                eta_n0,
            })
        }
    };
    Ok(EtaTable {
        dt,
        memory,
        coupling_eigs: bath.coupling_eigs(),
        eta_00,
        eta_diag,
        eta_k0,
        eta_sep,
        terminal,
    })
}

/// The complex multipliers I_kk'(s_k, s_k') over forward-backward value pairs.
#[derive(Clone, Debug)]
pub struct InfluenceFactor {
    pub k: usize,
    pub kp: usize,
    d2: usize,
    values: Vec<C64>,
}

impl InfluenceFactor {
    /// Multiplier for head value `vk` and tail value `skp` (flattened
    /// forward-backward indices, forward slow).
    pub fn value(&self, vk: usize, skp: usize) -> C64 {
        self.values[vk * self.d2 + skp]
    }

    pub fn d2(&self) -> usize {
        self.d2
    }
}

/// I_kk' = exp(-ds_k (Re(eta) ds_k' + 2i Im(eta) sbar_k')) with
/// ds = s+ - s- and sbar = (s+ + s-)/2 over the coupling-operator
/// eigenvalues.
pub fn if_factor(table: &EtaTable, k: usize, kp: usize) -> Result<InfluenceFactor> {
    let eta = table.eta(k, kp).ok_or(Error::MemoryWindow { k, kp })?;
    let eigs = &table.coupling_eigs;
    let d = eigs.len();
    let d2 = d * d;
    let ds = |u: usize| eigs[u / d] - eigs[u % d];
    let sbar = |u: usize| 0.5 * (eigs[u / d] + eigs[u % d]);
    let mut values = vec![C64::new(0.0, 0.0); d2 * d2];
    for vk in 0..d2 {
        for skp in 0..d2 {
            let expo = C64::new(
                -ds(vk) * eta.re * ds(skp),
                -2.0 * ds(vk) * eta.im * sbar(skp),
            );
            values[vk * d2 + skp] = expo.exp();
        }
    }
    Ok(InfluenceFactor {
        k,
        kp,
        d2,
        values,
    })
}

/// The factor MPO F_k along the time axis over window positions
/// `window_lo..=k`: diagonal in every site index, with a bond of dimension
/// d² that carries the forward-backward value at the head down to every
/// earlier point.
pub fn build_if_mpo(table: &EtaTable, k: usize, window_lo: usize) -> Result<MatrixProductOperator> {
    let cells = if_row_tensors(table, k, window_lo)?;
    let d2 = table.coupling_eigs.len() * table.coupling_eigs.len();
    let mut tensors = Vec::with_capacity(cells.len());
    let mut ins = Vec::with_capacity(cells.len());
    let mut outs = Vec::with_capacity(cells.len());
    for (pos, cell) in cells.iter().enumerate() {
        let time = (window_lo + pos) as i64;
        let inp = Index::site(d2).with_time(time);
        let out = Index::site(d2).with_time(time);
        // expand the diagonal probe index into (out, in) pairs
        let probe = cell.probe.clone();
        let diag = Tensor::from_fn(
            vec![out.clone(), inp.clone(), probe.clone()],
            |co| {
                if co[0] == co[1] && co[1] == co[2] {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            },
        )?;
        tensors.push(diag.contract(&cell.tensor)?);
        ins.push(inp);
        outs.push(out);
    }
    MatrixProductOperator::new(tensors, ins, outs)
}

/// One diagonal factor cell: `tensor` carries the probe index (to be joined
/// onto the row's open site index) plus the temporal factor bonds.
pub struct IfRowCell {
    pub probe: Index,
    pub tensor: Tensor,
}

/// Diagonal-form tensors of F_k for joining onto a grid row, ordered by time
/// (window_lo first, head at k).
pub fn if_row_tensors(table: &EtaTable, k: usize, window_lo: usize) -> Result<Vec<IfRowCell>> {
    if window_lo > k {
        return Err(Error::MemoryWindow { k, kp: window_lo });
    }
    let d2 = table.coupling_eigs.len() * table.coupling_eigs.len();
    let n = k - window_lo + 1;
    let mut cells: Vec<IfRowCell> = Vec::with_capacity(n);
    if n == 1 {
        let fac = if_factor(table, k, k)?;
        let probe = Index::site(d2).with_time(k as i64);
        let tensor = Tensor::from_fn(vec![probe.clone()], |co| fac.value(co[0], co[0]))?;
        cells.push(IfRowCell { probe, tensor });
        return Ok(cells);
    }
    let mut bond_to_right: Option<Index> = None;
    for pos in 0..n {
        let time = window_lo + pos;
        let probe = Index::site(d2).with_time(time as i64);
        let is_head = time == k;
        let tensor = if is_head {
            // delta(bond, s) * I_kk(s)
            let fac = if_factor(table, k, k)?;
            let b = bond_to_right.take().expect("head has a left bond");
            Tensor::from_fn(vec![probe.clone(), b], |co| {
                if co[0] == co[1] {
                    fac.value(co[0], co[0])
                } else {
                    C64::new(0.0, 0.0)
                }
            })?
        } else {
            let fac = if_factor(table, k, time)?;
            let right = Index::temporal(d2).with_time(time as i64);
            let t = if pos == 0 {
                // tail: I(bond, s)
                Tensor::from_fn(vec![probe.clone(), right.clone()], |co| {
                    fac.value(co[1], co[0])
                })?
            } else {
                // middle: delta(b_in, b_out) * I(b, s)
                let left = bond_to_right.take().expect("middle has a left bond");
                Tensor::from_fn(vec![probe.clone(), left, right.clone()], |co| {
                    if co[1] == co[2] {
                        fac.value(co[1], co[0])
                    } else {
                        C64::new(0.0, 0.0)
                    }
                })?
            };
            bond_to_right = Some(right);
            t
        };
        cells.push(IfRowCell { probe, tensor });
    }
    Ok(cells)
}

/// Discretize the Ohmic spectral density into `n_modes` effective modes: a
/// Gauss-Laguerre rule on the measure J(w)/w dw, which reproduces the
/// reorganization energy exactly and low moments of J to quadrature order.
pub fn discretize_ohmic(xi: f64, omega_c: f64, n_modes: usize) -> Result<Vec<BathMode>> {
    let rule = gauss_laguerre(n_modes, 0)?;
    Ok(rule
        .iter()
        .map(|&(x, w)| BathMode {
            omega: omega_c * x,
            coupling: omega_c * x * (xi * omega_c * w).sqrt(),
        })
        .collect())
}
