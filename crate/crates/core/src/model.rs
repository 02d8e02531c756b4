//! Declarative description of the physical problem: the spin-chain
//! Hamiltonian, the bath, and all numerical parameters, plus the plain-text
//! config parser.
//!
//! Units: hbar = 1 and the transverse field frequency Omega sets the scale,
//! so every config value is dimensionless (couplings in units of hbar*Omega,
//! time in 1/Omega, inverse temperature as hbar*beta*Omega).

use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::C64;

pub fn pauli_x() -> CMat {
    CMat::from_rows(&[
        vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
    ])
}

pub fn pauli_y() -> CMat {
    CMat::from_rows(&[
        vec![C64::new(0.0, 0.0), C64::new(0.0, -1.0)],
        vec![C64::new(0.0, 1.0), C64::new(0.0, 0.0)],
    ])
}

pub fn pauli_z() -> CMat {
    CMat::from_rows(&[
        vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        vec![C64::new(0.0, 0.0), C64::new(-1.0, 0.0)],
    ])
}

pub fn identity2() -> CMat {
    CMat::identity(2)
}

/// Nearest-neighbour spin chain with a transverse (and optional longitudinal)
/// field. `local_dim` is carried so a future generalization is a field
/// change, not a redesign.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinChainModel {
    /// Number of sites P.
    pub sites: usize,
    /// Local dimension (2 in this artifact).
    pub local_dim: usize,
    /// Longitudinal field strength.
    pub eps: f64,
    /// Transverse field frequency.
    pub omega: f64,
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
}

impl SpinChainModel {
    pub fn new(sites: usize, eps: f64, omega: f64, jx: f64, jy: f64, jz: f64) -> Result<Self> {
        let m = SpinChainModel {
            sites,
            local_dim: 2,
            eps,
            omega,
            jx,
            jy,
            jz,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn ising(sites: usize, omega: f64, jz: f64) -> Result<Self> {
        SpinChainModel::new(sites, 0.0, omega, 0.0, 0.0, jz)
    }

    pub fn xxz(sites: usize, omega: f64, j: f64, jz: f64) -> Result<Self> {
        SpinChainModel::new(sites, 0.0, omega, j, j, jz)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sites < 1 {
            return Err(Error::OutOfRange {
                name: "P",
                reason: format!("need P >= 1, got {}", self.sites),
            });
        }
        if self.local_dim != 2 {
            return Err(Error::InvalidParameter {
                name: "d",
                reason: "only d = 2 (spins) is supported".into(),
            });
        }
        for (name, v) in [
            ("eps", self.eps),
            ("Omega", self.omega),
            ("Jx", self.jx),
            ("Jy", self.jy),
            ("Jz", self.jz),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "coupling",
                    reason: format!("{name} must be finite"),
                });
            }
        }
        Ok(())
    }

    /// One-body term eps*sz - hbar*Omega*sx on site `i` (1-based).
    pub fn one_body_term(&self, i: usize) -> Result<CMat> {
        if i == 0 || i > self.sites {
            return Err(Error::SiteOutOfRange {
                site: i,
                len: self.sites,
            });
        }
        Ok(pauli_z()
            .scaled(C64::new(self.eps, 0.0))
            .add(&pauli_x().scaled(C64::new(-self.omega, 0.0))))
    }

    /// Two-body term Jx sx.sx + Jy sy.sy + Jz sz.sz on the bond (i, i+1),
    /// `i` 1-based.
    pub fn two_body_term(&self, i: usize) -> Result<CMat> {
        if i == 0 || i + 1 > self.sites {
            return Err(Error::SiteOutOfRange {
                site: i,
                len: self.sites.saturating_sub(1),
            });
        }
        let xx = pauli_x().kron(&pauli_x()).scaled(C64::new(self.jx, 0.0));
        let yy = pauli_y().kron(&pauli_y()).scaled(C64::new(self.jy, 0.0));
        let zz = pauli_z().kron(&pauli_z()).scaled(C64::new(self.jz, 0.0));
        Ok(xx.add(&yy).add(&zz))
    }

    /// Full chain Hamiltonian as a dense d^P matrix, for reference solvers.
    pub fn chain_hamiltonian(&self) -> Result<CMat> {
        let p = self.sites;
        if p > 14 {
            return Err(Error::SizeGuard {
                what: "dense chain Hamiltonian",
                size: p,
                limit: 14,
            });
        }
        let dim = 1usize << p;
        let mut h = CMat::zeros(dim, dim);
        for i in 1..=p {
            h = h.add(&embed(&self.one_body_term(i)?, p, i, 1));
        }
        for i in 1..p {
            h = h.add(&embed(&self.two_body_term(i)?, p, i, 2));
        }
        Ok(h)
    }
}

/// Embed an operator acting on `span` consecutive sites starting at `site`
/// (1-based) into the full d^P space.
pub fn embed(op: &CMat, p: usize, site: usize, span: usize) -> CMat {
    let left = CMat::identity(1 << (site - 1));
    let right = CMat::identity(1 << (p + 1 - site - span));
    left.kron(op).kron(&right)
}

/// Spectral density of the site-local bath: either the Ohmic-exponential
/// analytic form or an explicit finite set of modes.
#[derive(Clone, Debug, PartialEq)]
pub enum SpectralDensity {
    /// J(w) = (pi/2) * xi * w * exp(-w / omega_c)
    Ohmic { xi: f64, omega_c: f64 },
    /// J(w) = (pi/2) * sum_l (c_l^2 / w_l) delta(w - w_l)
    Discrete { modes: Vec<BathMode> },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BathMode {
    pub omega: f64,
    pub coupling: f64,
}

/// One bath specification shared by all sites. Site-dependent baths would be
/// a map from site to a table; everything downstream consumes one table per
/// site, defaulted to the shared one.
#[derive(Clone, Debug, PartialEq)]
pub struct BathModel {
    pub spectral_density: SpectralDensity,
    /// Inverse temperature (hbar*beta*Omega units).
    pub beta: f64,
    /// System operator coupling each site to its bath; must be diagonal in
    /// the site basis (sigma_z here).
    pub coupling_op: CMat,
}

impl BathModel {
    pub fn ohmic(xi: f64, omega_c: f64, beta: f64) -> Result<Self> {
        let b = BathModel {
            spectral_density: SpectralDensity::Ohmic { xi, omega_c },
            beta,
            coupling_op: pauli_z(),
        };
        b.validate()?;
        Ok(b)
    }

    pub fn discrete(modes: Vec<BathMode>, beta: f64) -> Result<Self> {
        let b = BathModel {
            spectral_density: SpectralDensity::Discrete { modes },
            beta,
            coupling_op: pauli_z(),
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        match &self.spectral_density {
            SpectralDensity::Ohmic { xi, omega_c } => {
                if *xi < 0.0 || !xi.is_finite() {
                    return Err(Error::OutOfRange {
                        name: "xi",
                        reason: format!("need xi >= 0, got {xi}"),
                    });
                }
                if *omega_c <= 0.0 {
                    return Err(Error::OutOfRange {
                        name: "omega_c",
                        reason: format!("need omega_c > 0, got {omega_c}"),
                    });
                }
            }
            SpectralDensity::Discrete { modes } => {
                for m in modes {
                    if m.omega <= 0.0 {
                        return Err(Error::OutOfRange {
                            name: "bath_modes",
                            reason: format!("mode frequency must be > 0, got {}", m.omega),
                        });
                    }
                }
            }
        }
        if self.beta <= 0.0 {
            return Err(Error::OutOfRange {
                name: "beta",
                reason: format!("need beta > 0, got {}", self.beta),
            });
        }
        // the path-integral basis must diagonalize the coupling operator
        let op = &self.coupling_op;
        for i in 0..op.nrows() {
            for j in 0..op.ncols() {
                if i != j && op[(i, j)].norm() > 1e-14 {
                    return Err(Error::InvalidParameter {
                        name: "coupling_operator",
                        reason: "must be diagonal in the site basis".into(),
                    });
                }
                if i == j && op[(i, j)].im.abs() > 1e-14 {
                    return Err(Error::InvalidParameter {
                        name: "coupling_operator",
                        reason: "diagonal must be real".into(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Eigenvalues of the coupling operator per basis state.
    pub fn coupling_eigs(&self) -> Vec<f64> {
        (0..self.coupling_op.nrows())
            .map(|i| self.coupling_op[(i, i)].re)
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpinObservable {
    Sx,
    Sy,
    Sz,
}

impl SpinObservable {
    pub fn matrix(&self) -> CMat {
        match self {
            SpinObservable::Sx => pauli_x(),
            SpinObservable::Sy => pauli_y(),
            SpinObservable::Sz => pauli_z(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SpinObservable::Sx => "sx",
            SpinObservable::Sy => "sy",
            SpinObservable::Sz => "sz",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "sx" => Ok(SpinObservable::Sx),
            "sy" => Ok(SpinObservable::Sy),
            "sz" => Ok(SpinObservable::Sz),
            other => Err(Error::Config(format!(
                "unknown observable '{other}' (expected sx, sy or sz)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Observable {
    /// 1-based site.
    pub site: usize,
    pub kind: SpinObservable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InitialStateSpec {
    /// Direct product of all spins in |+1>.
    AllUp,
    /// Direct product of all spins in |-1>.
    AllDown,
    /// Externally supplied MPS file.
    MpsFile(String),
}

/// Full experiment description.
#[derive(Clone, Debug)]
pub struct SimulationConfig {
    pub model: SpinChainModel,
    pub bath: Option<BathModel>,
    /// Timestep (1/Omega units).
    pub dt: f64,
    /// Number of steps N.
    pub n_steps: usize,
    /// Non-Markovian memory length L in steps.
    pub memory: usize,
    /// SVD truncation cutoff chi (relative discarded weight).
    pub cutoff: f64,
    pub max_dim: Option<usize>,
    pub initial_state: InitialStateSpec,
    pub observables: Vec<Observable>,
    /// Opt-in: divide the state by its trace after recording each step.
    pub renormalize: bool,
    /// Fock levels per bath mode for the exact-diagonalization oracle.
    pub fock_levels: Option<usize>,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if let Some(b) = &self.bath {
            b.validate()?;
        }
        if self.dt <= 0.0 || !self.dt.is_finite() {
            return Err(Error::OutOfRange {
                name: "dt",
                reason: format!("need dt > 0, got {}", self.dt),
            });
        }
        if self.n_steps < 1 {
            return Err(Error::OutOfRange {
                name: "nsteps",
                reason: format!("need nsteps >= 1, got {}", self.n_steps),
            });
        }
        if self.memory < 1 || self.memory > self.n_steps {
            return Err(Error::OutOfRange {
                name: "memory_L",
                reason: format!(
                    "L out of range: need 1 <= L <= nsteps, got L={} with nsteps={}",
                    self.memory, self.n_steps
                ),
            });
        }
        if !(0.0..1.0).contains(&self.cutoff) {
            return Err(Error::OutOfRange {
                name: "chi",
                reason: format!("need 0 <= chi < 1, got {}", self.cutoff),
            });
        }
        for o in &self.observables {
            if o.site == 0 || o.site > self.model.sites {
                return Err(Error::OutOfRange {
                    name: "observables",
                    reason: format!("site {} outside 1..={}", o.site, self.model.sites),
                });
            }
        }
        Ok(())
    }
}

/// Parse the plain-text `key = value` configuration format. `#` starts a
/// comment. Unknown keys are rejected with a diagnostic naming the key.
pub fn parse_config(text: &str) -> Result<SimulationConfig> {
    let mut kv: Vec<(String, String)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Config(format!(
                "line {}: expected 'key = value', got '{line}'",
                lineno + 1
            )));
        };
        kv.push((k.trim().to_string(), v.trim().to_string()));
    }
    let known = [
        "model",
        "P",
        "eps",
        "Omega",
        "Jx",
        "Jy",
        "Jz",
        "xi",
        "omega_c",
        "beta",
        "bath_modes",
        "fock_levels",
        "dt",
        "nsteps",
        "memory_L",
        "chi",
        "max_dim",
        "initial_state",
        "observables",
        "renormalize",
    ];
    for (k, _) in &kv {
        if !known.contains(&k.as_str()) {
            return Err(Error::Config(format!("unknown key '{k}'")));
        }
    }
    let get = |key: &str| -> Option<&str> {
        kv.iter()
            .rev()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    };
    let require = |key: &'static str| -> Result<&str> {
        get(key).ok_or(Error::Config(format!("missing required key '{key}'")))
    };
    let parse_f64 = |key: &'static str, v: &str| -> Result<f64> {
        v.parse()
            .map_err(|_| Error::Config(format!("key '{key}': cannot parse '{v}' as a number")))
    };
    let parse_usize = |key: &'static str, v: &str| -> Result<usize> {
        v.parse()
            .map_err(|_| Error::Config(format!("key '{key}': cannot parse '{v}' as an integer")))
    };

    let model_kind = require("model")?.to_ascii_lowercase();
    let p = parse_usize("P", require("P")?)?;
    let eps = get("eps")
        .map(|v| parse_f64("eps", v))
        .transpose()?
        .unwrap_or(0.0);
    let omega = parse_f64("Omega", require("Omega")?)?;
    let jx = get("Jx")
        .map(|v| parse_f64("Jx", v))
        .transpose()?
        .unwrap_or(0.0);
    let jy = get("Jy")
        .map(|v| parse_f64("Jy", v))
        .transpose()?
        .unwrap_or(0.0);
    let jz = get("Jz")
        .map(|v| parse_f64("Jz", v))
        .transpose()?
        .unwrap_or(0.0);
    match model_kind.as_str() {
        "ising" => {
            if jx != 0.0 || jy != 0.0 {
                return Err(Error::Config("model ising requires Jx = Jy = 0".into()));
            }
        }
        "xxz" => {
            if jx != jy {
                return Err(Error::Config(format!(
                    "model xxz requires Jx = Jy (got Jx={jx}, Jy={jy})"
                )));
            }
        }
        "heisenberg" => {}
        other => {
            return Err(Error::Config(format!(
                "key 'model': unknown model '{other}' (expected ising, xxz or heisenberg)"
            )));
        }
    }
    let model = SpinChainModel::new(p, eps, omega, jx, jy, jz)?;

    let bath = if let Some(modes_str) = get("bath_modes") {
        if get("xi").is_some() || get("omega_c").is_some() {
            return Err(Error::Config(
                "bath_modes and xi/omega_c are mutually exclusive".into(),
            ));
        }
        let beta = parse_f64("beta", require("beta")?)?;
        let mut modes = Vec::new();
        for part in modes_str.split(',') {
            let Some((w, c)) = part.trim().split_once(':') else {
                return Err(Error::Config(format!(
                    "key 'bath_modes': expected 'omega:coupling', got '{part}'"
                )));
            };
            modes.push(BathMode {
                omega: parse_f64("bath_modes", w.trim())?,
                coupling: parse_f64("bath_modes", c.trim())?,
            });
        }
        Some(BathModel::discrete(modes, beta)?)
    } else if let Some(xi_str) = get("xi") {
        let xi = parse_f64("xi", xi_str)?;
        let omega_c = parse_f64("omega_c", require("omega_c")?)?;
        let beta = parse_f64("beta", require("beta")?)?;
        Some(BathModel::ohmic(xi, omega_c, beta)?)
    } else {
        if get("omega_c").is_some() || get("beta").is_some() {
            return Err(Error::Config(
                "omega_c/beta given without xi or bath_modes".into(),
            ));
        }
        None
    };

    let dt = parse_f64("dt", require("dt")?)?;
    let n_steps = parse_usize("nsteps", require("nsteps")?)?;
    let memory = parse_usize("memory_L", require("memory_L")?)?;
    let cutoff = get("chi")
        .map(|v| parse_f64("chi", v))
        .transpose()?
        .unwrap_or(1e-11);
    let max_dim = get("max_dim")
        .map(|v| parse_usize("max_dim", v))
        .transpose()?;
    let initial_state = match get("initial_state").unwrap_or("all_up") {
        "all_up" => InitialStateSpec::AllUp,
        "all_down" => InitialStateSpec::AllDown,
        path => InitialStateSpec::MpsFile(path.to_string()),
    };
    let observables = match get("observables") {
        None => vec![Observable {
            site: p.div_ceil(2),
            kind: SpinObservable::Sz,
        }],
        Some(spec) => {
            let mut out = Vec::new();
            for part in spec.split(',') {
                let part = part.trim();
                let Some((name, site)) = part.split_once('@') else {
                    return Err(Error::Config(format!(
                        "key 'observables': expected 'name@site', got '{part}'"
                    )));
                };
                out.push(Observable {
                    site: parse_usize("observables", site)?,
                    kind: SpinObservable::parse(name)?,
                });
            }
            out
        }
    };
    let renormalize = match get("renormalize") {
        None => false,
        Some("true") | Some("1") => true,
        Some("false") | Some("0") => false,
        Some(other) => {
            return Err(Error::Config(format!(
                "key 'renormalize': expected true/false, got '{other}'"
            )));
        }
    };
    let fock_levels = get("fock_levels")
        .map(|v| parse_usize("fock_levels", v))
        .transpose()?;

    let config = SimulationConfig {
        model,
        bath,
        dt,
        n_steps,
        memory,
        cutoff,
        max_dim,
        initial_state,
        observables,
        renormalize,
        fock_levels,
    };
    config.validate()?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_body_matrix_forms() {
        let m = SpinChainModel::new(3, 0.0, 1.0, 0.0, 0.0, 0.0).unwrap();
        let h = m.one_body_term(1).unwrap();
        // eps=0, Omega=1 -> ((0,-1),(-1,0))
        assert!((h[(0, 1)] - C64::new(-1.0, 0.0)).norm() < 1e-15);
        assert!((h[(1, 0)] - C64::new(-1.0, 0.0)).norm() < 1e-15);
        assert!(h[(0, 0)].norm() < 1e-15);

        let m2 = SpinChainModel::new(1, 1.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        let h2 = m2.one_body_term(1).unwrap();
        assert!((h2[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((h2[(1, 1)] - C64::new(-1.0, 0.0)).norm() < 1e-15);
        assert!(h2[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn one_body_eigenvalues_match_characteristic_polynomial() {
        // eps=0.5, Omega=1: eigenvalues are the roots of l^2 - (0.25 + 1)
        let m = SpinChainModel::new(1, 0.5, 1.0, 0.0, 0.0, 0.0).unwrap();
        let h = m.one_body_term(1).unwrap();
        let (w, _) = h.herm_eig().unwrap();
        let want = (0.25f64 + 1.0).sqrt();
        assert!((w[0] + want).abs() < 1e-12);
        assert!((w[1] - want).abs() < 1e-12);
    }

    #[test]
    fn two_body_matrix_forms() {
        let m = SpinChainModel::new(2, 0.0, 1.0, 0.0, 0.0, 1.0).unwrap();
        let h = m.two_body_term(1).unwrap();
        for (i, want) in [1.0, -1.0, -1.0, 1.0].iter().enumerate() {
            assert!((h[(i, i)] - C64::new(*want, 0.0)).norm() < 1e-15);
        }
        let z = SpinChainModel::new(2, 0.0, 1.0, 0.0, 0.0, 0.0).unwrap();
        let hz = z.two_body_term(1).unwrap();
        assert!(hz.max_abs_diff(&CMat::zeros(4, 4)) < 1e-15);
    }

    #[test]
    fn two_body_matches_kronecker_oracle() {
        let m = SpinChainModel::new(2, 0.0, 1.0, 0.1, 0.1, 0.5).unwrap();
        let h = m.two_body_term(1).unwrap();
        let want = pauli_x()
            .kron(&pauli_x())
            .scaled(C64::new(0.1, 0.0))
            .add(&pauli_y().kron(&pauli_y()).scaled(C64::new(0.1, 0.0)))
            .add(&pauli_z().kron(&pauli_z()).scaled(C64::new(0.5, 0.0)));
        assert!(h.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn terms_are_hermitian() {
        let m = SpinChainModel::new(4, 0.3, 1.2, -0.4, 0.7, 0.9).unwrap();
        assert!(m.one_body_term(2).unwrap().hermiticity_deviation() < 1e-15);
        assert!(m.two_body_term(2).unwrap().hermiticity_deviation() < 1e-15);
        assert!(m.chain_hamiltonian().unwrap().hermiticity_deviation() < 1e-14);
    }

    #[test]
    fn parse_minimal_ising_config() {
        let cfg = parse_config(
            "# minimal Ising setup\n\
             model = ising\n\
             P = 7\n\
             Jz = 0.2\n\
             Omega = 1\n\
             dt = 0.25\n\
             nsteps = 40\n\
             memory_L = 4\n\
             xi = 0.25\n\
             omega_c = 5\n\
             beta = 1\n",
        )
        .unwrap();
        assert_eq!(cfg.model.sites, 7);
        assert_eq!(cfg.model.jz, 0.2);
        assert_eq!(cfg.model.eps, 0.0);
        assert_eq!(cfg.n_steps, 40);
        assert_eq!(cfg.memory, 4);
        assert_eq!(cfg.cutoff, 1e-11);
        assert!(cfg.max_dim.is_none());
        let bath = cfg.bath.unwrap();
        assert_eq!(
            bath.spectral_density,
            SpectralDensity::Ohmic {
                xi: 0.25,
                omega_c: 5.0
            }
        );
        assert_eq!(bath.beta, 1.0);
        assert_eq!(
            cfg.observables,
            vec![Observable {
                site: 4,
                kind: SpinObservable::Sz
            }]
        );
    }

    #[test]
    fn zero_memory_rejected_with_range_message() {
        let err = parse_config(
            "model = ising\nP = 2\nJz = 0.1\nOmega = 1\ndt = 0.25\nnsteps = 10\nmemory_L = 0\n",
        )
        .unwrap_err();
        assert!(err.to_string().contains("L out of range"), "{err}");
    }

    #[test]
    fn missing_key_is_named() {
        let err = parse_config("model = ising\nP = 2\n").unwrap_err();
        assert!(err.to_string().contains("Omega"), "{err}");
    }

    #[test]
    fn observables_and_discrete_bath_parse() {
        let cfg = parse_config(
            "model = heisenberg\nP = 5\nJx = 0\nJy = 0.1\nJz = 0.5\nOmega = 1\n\
             dt = 0.375\nnsteps = 16\nmemory_L = 3\nchi = 1e-10\n\
             bath_modes = 0.5:0.2, 1.5:0.4\nbeta = 2\nfock_levels = 6\n\
             observables = sz@3, sx@1\n",
        )
        .unwrap();
        match cfg.bath.unwrap().spectral_density {
            SpectralDensity::Discrete { modes } => {
                assert_eq!(modes.len(), 2);
                assert_eq!(modes[1].omega, 1.5);
            }
            _ => panic!("expected discrete bath"),
        }
        assert_eq!(cfg.observables.len(), 2);
        assert_eq!(cfg.observables[1].kind, SpinObservable::Sx);
        assert_eq!(cfg.fock_levels, Some(6));
    }

    #[test]
    fn model_preset_mismatch_rejected() {
        let err = parse_config(
            "model = ising\nP = 2\nJx = 0.3\nOmega = 1\ndt = 0.1\nnsteps = 5\nmemory_L = 2\n",
        )
        .unwrap_err();
        assert!(err.to_string().contains("ising"));
        let err2 = parse_config(
            "model = xxz\nP = 2\nJx = 0.3\nJy = 0.2\nOmega = 1\ndt = 0.1\nnsteps = 5\nmemory_L = 2\n",
        )
        .unwrap_err();
        assert!(err2.to_string().contains("xxz"));
    }

    #[test]
    fn unknown_key_rejected() {
        let err = parse_config("model = ising\nP = 2\nbogus = 3\n").unwrap_err();
        assert!(err.to_string().contains("bogus"));
    }
}
