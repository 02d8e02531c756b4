//! Small dense complex matrices and the numerical kernels (SVD, QR, Hermitian
//! eigendecomposition) the tensor layer is built on. Everything here is a thin
//! wrapper over `faer`; the rest of the crate never touches `faer` directly.

use faer::Mat;

use crate::error::{Error, Result};
use crate::C64;

/// Dense complex matrix, row-major storage.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat {
    nrows: usize,
    ncols: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CMat {
            nrows,
            ncols,
            data: vec![C64::new(0.0, 0.0); nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == ncols));
        CMat {
            nrows,
            ncols,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn from_fn(nrows: usize, ncols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = CMat::zeros(nrows, ncols);
        for i in 0..nrows {
            for j in 0..ncols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_real(nrows: usize, ncols: usize, data: &[f64]) -> Self {
        assert_eq!(data.len(), nrows * ncols);
        CMat {
            nrows,
            ncols,
            data: data.iter().map(|&x| C64::new(x, 0.0)).collect(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn mul(&self, other: &CMat) -> CMat {
        assert_eq!(self.ncols, other.nrows);
        let c = matmul(
            &self.data,
            self.nrows,
            self.ncols,
            &other.data,
            other.ncols,
        );
        CMat {
            nrows: self.nrows,
            ncols: other.ncols,
            data: c,
        }
    }

    pub fn add(&self, other: &CMat) -> CMat {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        CMat {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scaled(&self, z: C64) -> CMat {
        CMat {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self.data.iter().map(|a| a * z).collect(),
        }
    }

    pub fn adjoint(&self) -> CMat {
        CMat::from_fn(self.ncols, self.nrows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> CMat {
        CMat::from_fn(self.ncols, self.nrows, |i, j| self[(j, i)])
    }

    pub fn kron(&self, other: &CMat) -> CMat {
        let (m, n) = (self.nrows, self.ncols);
        let (p, q) = (other.nrows, other.ncols);
        CMat::from_fn(m * p, n * q, |i, j| {
            self[(i / p, j / q)] * other[(i % p, j % q)]
        })
    }

    pub fn trace(&self) -> C64 {
        assert_eq!(self.nrows, self.ncols);
        (0..self.nrows).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs_diff(&self, other: &CMat) -> f64 {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        assert_eq!(self.nrows, self.ncols);
        let mut dev: f64 = 0.0;
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn ensure_hermitian(&self, tol: f64) -> Result<()> {
        let dev = self.hermiticity_deviation();
        if dev > tol {
            return Err(Error::NonHermitian { dev });
        }
        Ok(())
    }

    /// Eigendecomposition of a Hermitian matrix: `self = V diag(w) V^H`,
    /// eigenvalues ascending, eigenvectors as columns of `V`.
    pub fn herm_eig(&self) -> Result<(Vec<f64>, CMat)> {
        self.ensure_hermitian(1e-10)?;
        let n = self.nrows;
        let m = to_faer(&self.data, n, n);
        let evd = m
            .self_adjoint_eigen(faer::Side::Lower)
            .map_err(|_| Error::NonHermitian { dev: f64::NAN })?;
        let w: Vec<f64> = (0..n).map(|k| evd.S()[k].re).collect();
        let u = evd.U();
        let v = CMat::from_fn(n, n, |i, j| u[(i, j)]);
        Ok((w, v))
    }

    /// `exp(z * self)` for Hermitian `self`, via eigendecomposition.
    pub fn herm_exp_scaled(&self, z: C64) -> Result<CMat> {
        let (w, v) = self.herm_eig()?;
        let n = self.nrows;
        // V e^{z w} V^H
        let mut scaled = CMat::zeros(n, n);
        for i in 0..n {
            for k in 0..n {
                scaled[(i, k)] = v[(i, k)] * (z * w[k]).exp();
            }
        }
        Ok(scaled.mul(&v.adjoint()))
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.ncols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.ncols + j]
    }
}

fn to_faer(data: &[C64], nrows: usize, ncols: usize) -> Mat<C64> {
    Mat::from_fn(nrows, ncols, |i, j| data[i * ncols + j])
}

/// `a (m x k, row-major) * b (k x n, row-major)`, returned row-major.
pub fn matmul(a: &[C64], m: usize, k: usize, b: &[C64], n: usize) -> Vec<C64> {
    debug_assert_eq!(a.len(), m * k);
    debug_assert_eq!(b.len(), k * n);
    let fa = faer::MatRef::from_row_major_slice(a, m, k);
    let fb = faer::MatRef::from_row_major_slice(b, k, n);
    let fc = fa * fb;
    let mut out = vec![C64::new(0.0, 0.0); m * n];
    for i in 0..m {
        for j in 0..n {
            out[i * n + j] = fc[(i, j)];
        }
    }
    out
}

/// Thin SVD of a row-major `m x n` matrix: `a = u diag(s) vh` with
/// `u` `m x r` and `vh` `r x n` (both row-major), `r = min(m, n)`,
/// singular values descending.
pub fn svd_thin(a: &[C64], m: usize, n: usize) -> Result<(Vec<C64>, Vec<f64>, Vec<C64>)> {
    debug_assert_eq!(a.len(), m * n);
    let fa = faer::MatRef::from_row_major_slice(a, m, n);
    let svd = fa
        .thin_svd()
        .map_err(|_| Error::InvalidParameter {
            name: "svd",
            reason: "SVD failed to converge".into(),
        })?;
    let r = m.min(n);
    let (u, s, v) = (svd.U(), svd.S(), svd.V());
    let mut u_out = vec![C64::new(0.0, 0.0); m * r];
    for i in 0..m {
        for k in 0..r {
            u_out[i * r + k] = u[(i, k)];
        }
    }
    let s_out: Vec<f64> = (0..r).map(|k| s[k].re).collect();
    let mut vh_out = vec![C64::new(0.0, 0.0); r * n];
    for k in 0..r {
        for j in 0..n {
            vh_out[k * n + j] = v[(j, k)].conj();
        }
    }
    Ok((u_out, s_out, vh_out))
}

/// Thin QR of a row-major `m x n` matrix: `a = q r` with `q` `m x k` and
/// `r` `k x n` (row-major), `k = min(m, n)`.
pub fn qr_thin(a: &[C64], m: usize, n: usize) -> (Vec<C64>, Vec<C64>) {
    debug_assert_eq!(a.len(), m * n);
    let fa = faer::MatRef::from_row_major_slice(a, m, n);
    let qr = fa.qr();
    let k = m.min(n);
    let q = qr.compute_thin_Q();
    let r = qr.R();
    let mut q_out = vec![C64::new(0.0, 0.0); m * k];
    for i in 0..m {
        for c in 0..k {
            q_out[i * k + c] = q[(i, c)];
        }
    }
    let mut r_out = vec![C64::new(0.0, 0.0); k * n];
    for c in 0..k {
        for j in c..n {
            r_out[c * n + j] = r[(c, j)];
        }
    }
    (q_out, r_out)
}

/// Eigendecomposition of a real symmetric matrix given row-major;
/// returns ascending eigenvalues and eigenvectors as columns (row-major).
pub fn sym_eig_f64(a: &[f64], n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    debug_assert_eq!(a.len(), n * n);
    let m = Mat::<f64>::from_fn(n, n, |i, j| a[i * n + j]);
    let evd = m
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|_| Error::NonHermitian { dev: f64::NAN })?;
    let w: Vec<f64> = (0..n).map(|k| evd.S()[k]).collect();
    let u = evd.U();
    let mut q = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            q[i * n + j] = u[(i, j)];
        }
    }
    Ok((w, q))
}
