//! The 2D MS-TNPI network and its memory-truncated iteration.
//!
//! The engine keeps a history chain C0 (the initial reduced density until the
//! first column retires, a temporal-bond-space chain afterwards) and a window
//! of grid columns, one per time point inside the non-Markovian memory. Each
//! step: columns that no longer receive influence factors are contracted into
//! C0, the previous terminal column is upgraded by joining the U tensors, a
//! fresh terminal R column is inserted, the influence-functional MPO for the
//! new time point is applied row by row, and the column due to retire next is
//! traced into operator form. The reduced density at the newly completed time
//! point is read out by contracting C0 through the window columns.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::influence::{eta_coefficients, if_row_tensors, EtaTable};
use crate::model::{InitialStateSpec, SimulationConfig};
use crate::mp::{apply_cells, compress_chain, MatrixProductOperator, MatrixProductState};
use crate::propagator::{build_fb_mpo, split_fb_mpo, PropagatorFactors};
use crate::tensor::{Index, IndexKind, Tensor};
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColumnRole {
    /// First time point: M = U, open site indices shared with the initial
    /// state.
    Initial,
    /// Interior time point: M = R·U joined over the shared site index.
    Intermediate,
    /// Newest time point: M = R, sites not connected spatially.
    Terminal,
}

/// One column of the 2D grid: the state of all P sites at one time point,
/// with open temporal bonds towards its neighbours.
#[derive(Clone, Debug)]
pub struct GridColumn {
    pub time: usize,
    pub role: ColumnRole,
    pub tensors: Vec<Tensor>,
    /// Open site indices; None once the column has been traced into an
    /// operator on the temporal bonds.
    pub sites: Option<Vec<Index>>,
}

impl GridColumn {
    /// The column as operator cells for contraction into the history chain:
    /// traced columns and the initial column (whose site ids are shared with
    /// the state) go in as they are, open interior columns get their site
    /// indices summed.
    fn mpo_cells(&self) -> Result<Vec<Tensor>> {
        match (&self.sites, self.role) {
            (None, _) | (Some(_), ColumnRole::Initial) => Ok(self.tensors.clone()),
            (Some(sites), _) => self
                .tensors
                .iter()
                .zip(sites)
                .map(|(t, s)| t.sum_index(s.id()))
                .collect(),
        }
    }

    fn trace_sites(&mut self) -> Result<()> {
        if let Some(sites) = self.sites.take() {
            for (t, s) in self.tensors.iter_mut().zip(&sites) {
                *t = t.sum_index(s.id())?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct StepRecord {
    pub step: usize,
    pub time: f64,
    pub trace: C64,
    /// One value per configured observable, in config order.
    pub values: Vec<C64>,
    pub max_bond: usize,
    pub avg_bond: f64,
}

pub struct EngineState {
    config: SimulationConfig,
    factors: PropagatorFactors,
    eta: Option<EtaTable>,
    /// C0: the initial reduced density, later the absorbed history chain.
    history: Vec<Tensor>,
    initial_sites: Vec<Index>,
    columns: VecDeque<GridColumn>,
    density: MatrixProductState,
    records: Vec<StepRecord>,
    diagnostics: Vec<String>,
    step_count: usize,
}

impl EngineState {
    /// Initialize the grid from a validated config and an explicit initial
    /// reduced-density MPS.
    pub fn new(config: SimulationConfig, initial: MatrixProductState) -> Result<Self> {
        let eta = match &config.bath {
            Some(bath) => Some(eta_coefficients(bath, config.dt, config.memory, None)?),
            None => None,
        };
        EngineState::with_eta_table(config, initial, eta)
    }

    /// As [`EngineState::new`] but with a precomputed eta table (for example
    /// from a cache file). The table's timestep and memory must match the
    /// config.
    pub fn with_eta_table(
        config: SimulationConfig,
        initial: MatrixProductState,
        eta: Option<EtaTable>,
    ) -> Result<Self> {
        config.validate()?;
        let p = config.model.sites;
        let d2 = config.model.local_dim * config.model.local_dim;
        if initial.len() != p {
            return Err(Error::ChainLength {
                left: initial.len(),
                right: p,
            });
        }
        for s in initial.sites() {
            if s.dim() != d2 {
                return Err(Error::DimMismatch {
                    id: s.id(),
                    left: s.dim(),
                    right: d2,
                });
            }
        }
        if let Some(t) = &eta {
            if (t.dt() - config.dt).abs() > 1e-12 || t.memory() != config.memory {
                return Err(Error::InvalidParameter {
                    name: "eta_table",
                    reason: format!(
                        "table (dt={}, L={}) does not match config (dt={}, L={})",
                        t.dt(),
                        t.memory(),
                        config.dt,
                        config.memory
                    ),
                });
            }
        }
        if config.bath.is_some() != eta.is_some() {
            return Err(Error::InvalidParameter {
                name: "eta_table",
                reason: "bath and eta table must be supplied together".into(),
            });
        }
        let k = build_fb_mpo(&config.model, config.dt, config.cutoff)?;
        let factors = split_fb_mpo(&k, config.cutoff)?;
        let initial_sites = initial.sites().to_vec();
        let history = initial.tensors().to_vec();
        let mut engine = EngineState {
            config,
            factors,
            eta,
            history,
            initial_sites,
            columns: VecDeque::new(),
            density: initial,
            records: Vec::new(),
            diagnostics: Vec::new(),
            step_count: 0,
        };
        engine.record()?;
        Ok(engine)
    }

    /// Initialize from the config alone; the initial state must be a product
    /// spec (an MPS file has to be loaded by the caller and passed to `new`).
    pub fn from_config(config: &SimulationConfig) -> Result<Self> {
        let initial = match &config.initial_state {
            InitialStateSpec::MpsFile(path) => {
                return Err(Error::InvalidParameter {
                    name: "initial_state",
                    reason: format!("MPS file '{path}' must be loaded by the caller"),
                });
            }
            spec => product_initial_state(&config.model, spec)?,
        };
        EngineState::new(config.clone(), initial)
    }

    pub fn config(&self) -> &SimulationConfig {
        &self.config
    }

    pub fn step_count(&self) -> usize {
        self.step_count
    }

    pub fn records(&self) -> &[StepRecord] {
        &self.records
    }

    pub fn diagnostics(&self) -> &[String] {
        &self.diagnostics
    }

    pub fn columns(&self) -> impl Iterator<Item = &GridColumn> {
        self.columns.iter()
    }

    /// The current reduced density MPS (the readout at the newest completed
    /// time point).
    pub fn density(&self) -> &MatrixProductState {
        &self.density
    }

    /// Advance one time point: the six-stage iteration plus readout.
    pub fn step(&mut self) -> Result<&StepRecord> {
        let m = self.step_count + 1;
        let chi = self.config.cutoff;
        let maxd = self.config.max_dim;
        // (1) retire columns outside the memory window of the new point
        while self
            .columns
            .front()
            .is_some_and(|c| c.time + self.config.memory < m)
        {
            let col = self.columns.pop_front().unwrap();
            let cells = col.mpo_cells()?;
            let (h, _) = apply_cells(&cells, &self.history, chi, maxd, IndexKind::SpatialBond)?;
            self.history = h;
        }
        // (2)-(5) slide the window forward and apply the influence rows
        extend_grid(
            &self.factors,
            self.eta.as_ref(),
            chi,
            maxd,
            &mut self.columns,
            &self.initial_sites,
            m,
        )?;
        // (6) trace the column that retires on the next step
        if m > self.config.memory {
            let due = m - self.config.memory;
            if let Some(col) = self.columns.iter_mut().find(|c| c.time == due) {
                if col.role != ColumnRole::Initial {
                    col.trace_sites()?;
                }
            }
        }
        self.density = self.readout()?;
        self.step_count = m;
        self.record()?;
        Ok(self.records.last().unwrap())
    }

    /// Run all configured steps.
    pub fn run(&mut self) -> Result<&[StepRecord]> {
        while self.step_count < self.config.n_steps {
            self.step()?;
        }
        Ok(&self.records)
    }

    fn readout(&self) -> Result<MatrixProductState> {
        let n_cols = self.columns.len();
        debug_assert!(n_cols >= 2);
        let mut state = self.history.clone();
        for (ci, col) in self.columns.iter().enumerate() {
            let cells = if ci + 1 == n_cols {
                col.tensors.clone()
            } else {
                col.mpo_cells()?
            };
            let (s, _) = apply_cells(
                &cells,
                &state,
                self.config.cutoff,
                self.config.max_dim,
                IndexKind::SpatialBond,
            )?;
            state = s;
        }
        let sites = self
            .columns
            .back()
            .and_then(|c| c.sites.clone())
            .expect("terminal column has open sites");
        MatrixProductState::new(state, sites)
    }

    fn record(&mut self) -> Result<()> {
        let trace = self.density.trace()?;
        let drift = (trace - C64::new(1.0, 0.0)).norm();
        if drift > 1e-6 {
            self.diagnostics.push(format!(
                "step {}: trace drift {drift:.3e} exceeds 1e-6",
                self.step_count
            ));
        }
        let mut values = Vec::with_capacity(self.config.observables.len());
        for obs in &self.config.observables {
            values.push(self.density.expectation(obs.site, &obs.kind.matrix())?);
        }
        let (max_bond, avg_bond) = self.density.bond_stats();
        self.records.push(StepRecord {
            step: self.step_count,
            time: self.step_count as f64 * self.config.dt,
            trace,
            values,
            max_bond,
            avg_bond,
        });
        if self.config.renormalize && drift > 0.0 && trace.norm() > 0.0 {
            let inv = C64::new(1.0, 0.0) / trace;
            self.history[0] = self.history[0].scaled(inv);
            self.density = self.density.scaled(inv);
        }
        Ok(())
    }

    /// The augmented propagator G(S0, Sn) as an MPO, built on a fresh
    /// full-memory grid (n must lie within the memory window). Applying it to
    /// any initial density MPS reproduces the step-wise evolution from that
    /// state.
    pub fn augmented_propagator(&self, n: usize) -> Result<MatrixProductOperator> {
        let p = self.config.model.sites;
        let d2 = self.config.model.local_dim * self.config.model.local_dim;
        if n > self.config.memory {
            return Err(Error::OutOfRange {
                name: "n",
                reason: format!(
                    "augmented propagator needs full memory: n={n} exceeds L={}",
                    self.config.memory
                ),
            });
        }
        if n == 0 {
            return MatrixProductOperator::identity(&vec![d2; p]);
        }
        let chi = self.config.cutoff;
        let maxd = self.config.max_dim;
        let s0: Vec<Index> = (0..p)
            .map(|i| Index::site(d2).with_site(i as u32 + 1).with_time(0))
            .collect();
        let mut cols: VecDeque<GridColumn> = VecDeque::new();
        for m in 1..=n {
            extend_grid(
                &self.factors,
                self.eta.as_ref(),
                chi,
                maxd,
                &mut cols,
                &s0,
                m,
            )?;
        }
        let mut acc = cols[0].tensors.clone();
        for ci in 1..cols.len() {
            let cells = if ci + 1 == cols.len() {
                cols[ci].tensors.clone()
            } else {
                cols[ci].mpo_cells()?
            };
            let (a, _) = apply_cells(&cells, &acc, chi, maxd, IndexKind::SpatialBond)?;
            acc = a;
        }
        let outs = cols.back().and_then(|c| c.sites.clone()).unwrap();
        MatrixProductOperator::new(acc, s0, outs)
    }
}

/// Build the initial product density MPS for a product-state spec.
pub fn product_initial_state(
    model: &crate::model::SpinChainModel,
    spec: &InitialStateSpec,
) -> Result<MatrixProductState> {
    let d = model.local_dim;
    let d2 = d * d;
    let site_vec = |level: usize| -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); d2];
        v[level * d + level] = C64::new(1.0, 0.0);
        v
    };
    let v = match spec {
        InitialStateSpec::AllUp => site_vec(0),
        InitialStateSpec::AllDown => site_vec(d - 1),
        InitialStateSpec::MpsFile(path) => {
            return Err(Error::InvalidParameter {
                name: "initial_state",
                reason: format!("'{path}' is not a product spec"),
            });
        }
    };
    MatrixProductState::product(&vec![v; model.sites])
}

/// Grow the grid by one time point `m`: upgrade the previous terminal column
/// with the U tensors (or create the initial U column), insert the fresh
/// terminal R column, and apply the influence-functional rows for point `m`
/// (with the deferred time-0 self factor folded in on the first step).
fn extend_grid(
    factors: &PropagatorFactors,
    eta: Option<&EtaTable>,
    chi: f64,
    maxd: Option<usize>,
    columns: &mut VecDeque<GridColumn>,
    base_sites: &[Index],
    m: usize,
) -> Result<()> {
    let p = factors.len();
    let in_sites: Vec<Index> = match columns.back() {
        Some(back) => back.sites.clone().expect("terminal column has open sites"),
        None => base_sites.to_vec(),
    };
    let out_sites: Vec<Index> = (0..p)
        .map(|i| {
            Index::site(in_sites[i].dim())
                .with_site(i as u32 + 1)
                .with_time(m as i64)
        })
        .collect();
    let (u_cells, r_cells) = factors.instantiate(&in_sites, &out_sites, (m - 1) as i64)?;
    match columns.back_mut() {
        Some(back) => {
            for (i, u) in u_cells.into_iter().enumerate() {
                let sid = in_sites[i].id();
                back.tensors[i] = back.tensors[i].join_diagonal(&u, sid, sid)?;
            }
            back.role = ColumnRole::Intermediate;
        }
        None => {
            debug_assert_eq!(m, 1);
            columns.push_back(GridColumn {
                time: 0,
                role: ColumnRole::Initial,
                tensors: u_cells,
                sites: Some(in_sites),
            });
        }
    }
    columns.push_back(GridColumn {
        time: m,
        role: ColumnRole::Terminal,
        tensors: r_cells,
        sites: Some(out_sites),
    });
    let Some(eta) = eta else {
        return Ok(());
    };
    let w_lo = columns.front().unwrap().time;
    debug_assert_eq!(w_lo + columns.len() - 1, m);
    for i in 0..p {
        let mut row: Vec<Tensor> = columns.iter().map(|c| c.tensors[i].clone()).collect();
        let site_ids: Vec<u64> = columns
            .iter()
            .map(|c| c.sites.as_ref().expect("window sites open")[i].id())
            .collect();
        let cells = if_row_tensors(eta, m, w_lo)?;
        for (c, fc) in cells.iter().enumerate() {
            row[c] = row[c].join_diagonal(&fc.tensor, site_ids[c], fc.probe.id())?;
        }
        if m == 1 {
            let f0 = if_row_tensors(eta, 0, 0)?;
            row[0] = row[0].join_diagonal(&f0[0].tensor, site_ids[0], f0[0].probe.id())?;
        }
        compress_chain(&mut row, chi, maxd, IndexKind::TemporalBond)?;
        for (c, cell) in row.into_iter().enumerate() {
            columns[c].tensors[i] = cell;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{pauli_z, BathModel, Observable, SpinChainModel, SpinObservable};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn bare_config(
        model: SpinChainModel,
        dt: f64,
        n: usize,
        l: usize,
        chi: f64,
    ) -> SimulationConfig {
        SimulationConfig {
            model,
            bath: None,
            dt,
            n_steps: n,
            memory: l,
            cutoff: chi,
            max_dim: None,
            initial_state: InitialStateSpec::AllUp,
            observables: vec![Observable {
                site: model.sites.div_ceil(2),
                kind: SpinObservable::Sz,
            }],
            renormalize: false,
            fock_levels: None,
        }
    }

    #[test]
    fn free_spin_rabi_oscillation() {
        // P=1, eps=0, Omega=1, no bath: <sz(t)> = cos(2 t)
        let model = SpinChainModel::new(1, 0.0, 1.0, 0.0, 0.0, 0.0).unwrap();
        let cfg = bare_config(model, 0.1, 20, 1, 0.0);
        let mut eng = EngineState::from_config(&cfg).unwrap();
        eng.run().unwrap();
        for rec in eng.records() {
            let want = (2.0 * rec.time).cos();
            assert!(
                (rec.values[0] - c(want, 0.0)).norm() <= 1e-12,
                "t={}: got {}, want {want}",
                rec.time,
                rec.values[0]
            );
            assert!((rec.trace - c(1.0, 0.0)).norm() <= 1e-12);
        }
    }

    #[test]
    fn bare_engine_equals_density_tebd() {
        // without a bath the grid reduces to a density-matrix TEBD
        let model = SpinChainModel::ising(3, 1.0, 0.6).unwrap();
        let cfg = bare_config(model, 0.25, 6, 2, 0.0);
        let mut eng = EngineState::from_config(&cfg).unwrap();
        let k = build_fb_mpo(&model, 0.25, 0.0).unwrap();
        let mut rho = product_initial_state(&model, &InitialStateSpec::AllUp).unwrap();
        for _ in 0..6 {
            eng.step().unwrap();
            rho = k.apply(&rho, 0.0, None).unwrap();
            let a = eng.density().to_dense_vector().unwrap();
            let b = rho.to_dense_vector().unwrap();
            let dev = a
                .iter()
                .zip(&b)
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max);
            assert!(dev <= 1e-10, "step {}: dev {dev:.3e}", eng.step_count());
        }
    }

    #[test]
    fn one_step_grid_equals_propagator_application() {
        let model = SpinChainModel::new(2, 0.1, 1.0, 0.0, 0.0, 0.3).unwrap();
        let cfg = bare_config(model, 0.2, 2, 1, 0.0);
        let mut eng = EngineState::from_config(&cfg).unwrap();
        eng.step().unwrap();
        let k = build_fb_mpo(&model, 0.2, 0.0).unwrap();
        let rho0 = product_initial_state(&model, &InitialStateSpec::AllUp).unwrap();
        let want = k.apply(&rho0, 0.0, None).unwrap();
        let a = eng.density().to_dense_vector().unwrap();
        let b = want.to_dense_vector().unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() <= 1e-12);
        }
    }

    #[test]
    fn window_length_is_memory_plus_one() {
        let model = SpinChainModel::ising(2, 1.0, 0.4).unwrap();
        let mut cfg = bare_config(model, 0.25, 10, 3, 1e-16);
        cfg.bath = Some(BathModel::ohmic(0.2, 5.0, 1.0).unwrap());
        let mut eng = EngineState::from_config(&cfg).unwrap();
        for step in 1..=10usize {
            eng.step().unwrap();
            let n_cols = eng.columns().count();
            if step <= 3 {
                assert_eq!(n_cols, step + 1);
            } else {
                assert_eq!(n_cols, 4); // L + 1 columns in the iterative regime
            }
            let front = eng.columns().next().unwrap();
            assert_eq!(front.time, step.saturating_sub(3));
            let back = eng.columns().last().unwrap();
            assert_eq!(back.time, step);
            assert_eq!(back.role, ColumnRole::Terminal);
        }
        assert!((eng.records().last().unwrap().trace - c(1.0, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn uncoupled_sites_with_bath_match_single_site_runs() {
        // J=0: rows separate; every site reproduces its standalone P=1 run
        // and the spatial bonds stay at one
        let bath = BathModel::ohmic(0.25, 5.0, 1.0).unwrap();
        let model2 = SpinChainModel::new(2, 0.0, 1.0, 0.0, 0.0, 0.0).unwrap();
        let mut cfg2 = bare_config(model2, 0.25, 6, 3, 1e-14);
        cfg2.bath = Some(bath.clone());
        cfg2.observables = vec![
            Observable {
                site: 1,
                kind: SpinObservable::Sz,
            },
            Observable {
                site: 2,
                kind: SpinObservable::Sz,
            },
        ];
        let mut eng2 = EngineState::from_config(&cfg2).unwrap();
        eng2.run().unwrap();

        let model1 = SpinChainModel::new(1, 0.0, 1.0, 0.0, 0.0, 0.0).unwrap();
        let mut cfg1 = bare_config(model1, 0.25, 6, 3, 1e-14);
        cfg1.bath = Some(bath);
        cfg1.observables = vec![Observable {
            site: 1,
            kind: SpinObservable::Sz,
        }];
        let mut eng1 = EngineState::from_config(&cfg1).unwrap();
        eng1.run().unwrap();

        for (r2, r1) in eng2.records().iter().zip(eng1.records()) {
            assert!((r2.values[0] - r1.values[0]).norm() <= 1e-10);
            assert!((r2.values[1] - r1.values[0]).norm() <= 1e-10);
            assert_eq!(r2.max_bond, 1);
        }
    }

    #[test]
    fn augmented_propagator_consistency() {
        // full-memory: G(n) applied to rho0 equals the step-wise density
        let model = SpinChainModel::new(2, 0.0, 1.0, 0.0, 0.0, 0.4).unwrap();
        let mut cfg = bare_config(model, 0.25, 3, 3, 1e-18);
        cfg.bath = Some(BathModel::ohmic(0.25, 5.0, 1.0).unwrap());
        let mut eng = EngineState::from_config(&cfg).unwrap();
        let rho0 = product_initial_state(&model, &InitialStateSpec::AllUp).unwrap();

        let g0 = eng.augmented_propagator(0).unwrap();
        let through_g0 = g0.apply(&rho0, 0.0, None).unwrap();
        let a0 = through_g0.to_dense_vector().unwrap();
        let b0 = rho0.to_dense_vector().unwrap();
        for (x, y) in a0.iter().zip(&b0) {
            assert!((x - y).norm() <= 1e-12);
        }

        for n in 1..=3usize {
            eng.step().unwrap();
            let g = eng.augmented_propagator(n).unwrap();
            let through_g = g.apply(&rho0, 1e-18, None).unwrap();
            let a = through_g.to_dense_vector().unwrap();
            let b = eng.density().to_dense_vector().unwrap();
            let dev = a
                .iter()
                .zip(&b)
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max);
            assert!(dev <= 1e-9, "n={n}: dev {dev:.3e}");
        }
    }

    #[test]
    fn bare_augmented_propagator_is_k() {
        let model = SpinChainModel::ising(2, 1.0, 0.5).unwrap();
        let cfg = bare_config(model, 0.25, 2, 2, 0.0);
        let eng = EngineState::from_config(&cfg).unwrap();
        let g1 = eng.augmented_propagator(1).unwrap();
        let k = build_fb_mpo(&model, 0.25, 0.0).unwrap();
        let a = g1.to_dense_matrix().unwrap();
        let b = k.to_dense_matrix().unwrap();
        assert!(a.max_abs_diff(&b) <= 1e-12);
    }

    #[test]
    fn hermiticity_of_dense_reconstruction() {
        let model = SpinChainModel::new(3, 0.0, 1.0, 0.1, 0.1, 0.5).unwrap();
        let mut cfg = bare_config(model, 0.25, 5, 3, 1e-16);
        cfg.bath = Some(BathModel::ohmic(0.2, 2.0, 1.0).unwrap());
        let mut eng = EngineState::from_config(&cfg).unwrap();
        eng.run().unwrap();
        let v = eng.density().to_dense_vector().unwrap();
        let d = 2usize;
        let p = 3usize;
        let idx = |x: usize, y: usize| -> usize {
            let mut out = 0;
            for site in (0..p).rev() {
                let ax = (x >> site) & 1;
                let by = (y >> site) & 1;
                out = out * (d * d) + ax * d + by;
            }
            out
        };
        let dim = 1 << p;
        for a in 0..dim {
            for b in 0..dim {
                assert!((v[idx(a, b)] - v[idx(b, a)].conj()).norm() <= 1e-8);
            }
        }
        assert!((eng.records().last().unwrap().trace - c(1.0, 0.0)).norm() <= 1e-8);
    }

    #[test]
    fn sz_expectation_of_all_up_initial_state() {
        let model = SpinChainModel::ising(3, 1.0, 0.2).unwrap();
        let cfg = bare_config(model, 0.25, 2, 1, 1e-11);
        let eng = EngineState::from_config(&cfg).unwrap();
        let rec0 = &eng.records()[0];
        assert_eq!(rec0.step, 0);
        assert!((rec0.values[0] - c(1.0, 0.0)).norm() < 1e-14);
        let sz = pauli_z();
        assert!((eng.density().expectation(2, &sz).unwrap() - c(1.0, 0.0)).norm() < 1e-14);
    }
}
