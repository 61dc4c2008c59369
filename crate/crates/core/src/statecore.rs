//! State containers, entropies and reductions.
//!
//! Two families are supported: Gaussian states of `N` bosonic modes and
//! finite-dimensional density matrices (the two-qubit case is the one the
//! spin engine produces).

use nalgebra::{DMatrix, DVector, Matrix4, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::C64;

pub const SYMMETRY_TOL: f64 = 1e-10;
pub const UNCERTAINTY_TOL: f64 = 1e-9;
pub const TRACE_TOL: f64 = 1e-9;
pub const POSITIVITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyKind {
    VonNeumann,
    Renyi2,
    Linear,
}

/// Anything with a tensor-product structure that can be reduced and whose
/// entropy is defined.
pub trait QuantumState: Sized {
    fn n_subsystems(&self) -> usize;
    fn entropy(&self, kind: EntropyKind) -> Result<f64>;
    fn partial_reduce(&self, keep: &[usize]) -> Result<Self>;
}

pub fn entropy<S: QuantumState>(state: &S, kind: EntropyKind) -> Result<f64> {
    state.entropy(kind)
}

pub fn partial_reduce<S: QuantumState>(state: &S, keep: &[usize]) -> Result<S> {
    state.partial_reduce(keep)
}

fn check_keep(keep: &[usize], n: usize) -> Result<Vec<usize>> {
    let mut k = keep.to_vec();
    k.sort_unstable();
    k.dedup();
    if k.is_empty() || k.len() >= n {
        return Err(Error::Argument(format!(
            "keep set must be a nonempty strict subset of {n} subsystems, got {keep:?}"
        )));
    }
    if let Some(&bad) = k.iter().find(|&&i| i >= n) {
        return Err(Error::Argument(format!("subsystem index {bad} out of range (n = {n})")));
    }
    Ok(k)
}

/// Symplectic eigenvalues of a covariance matrix, descending, one per mode.
pub fn symplectic_eigenvalues(cov: &DMatrix<f64>) -> Result<Vec<f64>> {
    let dim = cov.nrows();
    if dim != cov.ncols() || dim == 0 || dim % 2 != 0 {
        return Err(Error::Argument(format!(
            "covariance must be square with even dimension, got {}x{}",
            cov.nrows(),
            cov.ncols()
        )));
    }
    let scale = linalg::max_abs(cov).max(1.0);
    if linalg::asymmetry(cov) > SYMMETRY_TOL * scale {
        return Err(Error::Validation("covariance matrix is not symmetric".into()));
    }
    let n = dim / 2;
    let om = linalg::symplectic_form(n);
    let eig = SymmetricEigen::new(cov.clone());
    let mut sq: Vec<f64> = if eig.eigenvalues.min() > 0.0 {
        // S Ωᵀ σ Ω S with S = σ^{1/2} is symmetric and shares its spectrum
        // (ν_k², each twice) with (iΩσ)².
        let s = linalg::sqrt_psd(cov);
        let k = &s * om.transpose() * cov * &om * &s;
        let mut k = k;
        linalg::symmetrize(&mut k);
        SymmetricEigen::new(k).eigenvalues.iter().map(|&x| x.max(0.0).sqrt()).collect()
    } else {
        (&om * cov).complex_eigenvalues().iter().map(|z| z.norm()).collect()
    };
    sq.sort_by(|a, b| b.total_cmp(a));
    Ok((0..n).map(|k| 0.5 * (sq[2 * k] + sq[2 * k + 1])).collect())
}

/// `g(ν) = (ν+½)ln(ν+½) − (ν−½)ln(ν−½)`, the entropy of a thermal mode with
/// symplectic eigenvalue ν.
pub fn thermal_entropy(nu: f64) -> f64 {
    let hi = nu + 0.5;
    let lo = nu - 0.5;
    let mut s = hi * hi.ln();
    if lo > 1e-14 {
        s -= lo * lo.ln();
    }
    s.max(0.0)
}

/// Bose–Einstein occupation; zero at `temperature == 0`.
pub fn bose_occupation(omega: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 || omega <= 0.0 {
        0.0
    } else {
        1.0 / (omega / temperature).exp_m1()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let s = Self::new_unchecked(mean, cov)?;
        s.validate()?;
        Ok(s)
    }

    /// Shape-checked but skips the uncertainty-relation test.
    pub fn new_unchecked(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        if cov.nrows() != cov.ncols() || cov.nrows() % 2 != 0 || cov.nrows() == 0 {
            return Err(Error::Argument(format!(
                "covariance must be square with even dimension, got {}x{}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        if mean.len() != cov.nrows() {
            return Err(Error::Argument(format!(
                "mean has length {} but covariance is {}x{}",
                mean.len(),
                cov.nrows(),
                cov.ncols()
            )));
        }
        Ok(Self { mean, cov })
    }

    pub fn centered(cov: DMatrix<f64>) -> Result<Self> {
        let n = cov.nrows();
        Self::new(DVector::zeros(n), cov)
    }

    pub fn vacuum(n_modes: usize) -> Self {
        Self {
            mean: DVector::zeros(2 * n_modes),
            cov: DMatrix::identity(2 * n_modes, 2 * n_modes) * 0.5,
        }
    }

    pub fn thermal(nbar: f64) -> Result<Self> {
        if !(nbar >= 0.0) {
            return Err(Error::Argument(format!("thermal occupation must be >= 0, got {nbar}")));
        }
        Self::new(DVector::zeros(2), DMatrix::identity(2, 2) * (nbar + 0.5))
    }

    /// Coherent state with `⟨a⟩ = alpha`.
    pub fn coherent(alpha: C64) -> Self {
        let s = std::f64::consts::SQRT_2;
        Self {
            mean: DVector::from_vec(vec![s * alpha.re, s * alpha.im]),
            cov: DMatrix::identity(2, 2) * 0.5,
        }
    }

    /// Single-mode squeezed vacuum, with the squeezed quadrature rotated by
    /// `theta` away from `q`.
    pub fn squeezed_vacuum(r: f64, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let rot = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![
            0.5 * (-2.0 * r).exp(),
            0.5 * (2.0 * r).exp(),
        ]));
        let mut cov = &rot * d * rot.transpose();
        linalg::symmetrize(&mut cov);
        Self { mean: DVector::zeros(2), cov }
    }

    /// Two-mode squeezed vacuum in standard form.
    pub fn two_mode_squeezed(r: f64) -> Self {
        let c = 0.5 * (2.0 * r).cosh();
        let s = 0.5 * (2.0 * r).sinh();
        let cov = DMatrix::from_row_slice(
            4,
            4,
            &[
                c, 0.0, s, 0.0, //
                0.0, c, 0.0, -s, //
                s, 0.0, c, 0.0, //
                0.0, -s, 0.0, c,
            ],
        );
        Self { mean: DVector::zeros(4), cov }
    }

    /// Tensor product of independent states.
    pub fn product(parts: &[GaussianState]) -> Self {
        let dim: usize = parts.iter().map(|p| p.dim()).sum();
        let mut mean = DVector::zeros(dim);
        let mut cov = DMatrix::zeros(dim, dim);
        let mut off = 0;
        for p in parts {
            let d = p.dim();
            mean.rows_mut(off, d).copy_from(&p.mean);
            cov.view_mut((off, off), (d, d)).copy_from(&p.cov);
            off += d;
        }
        Self { mean, cov }
    }

    pub fn with_mean(mut self, mean: DVector<f64>) -> Result<Self> {
        if mean.len() != self.dim() {
            return Err(Error::Argument("mean length does not match state".into()));
        }
        self.mean = mean;
        Ok(self)
    }

    pub fn n_modes(&self) -> usize {
        self.cov.nrows() / 2
    }

    pub fn dim(&self) -> usize {
        self.cov.nrows()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// Second moment `⟨x_i x_j⟩` (symmetrized) including the displacement.
    pub fn second_moment(&self, i: usize, j: usize) -> f64 {
        self.cov[(i, j)] + self.mean[i] * self.mean[j]
    }

    pub fn symplectic_eigenvalues(&self) -> Result<Vec<f64>> {
        symplectic_eigenvalues(&self.cov)
    }

    /// `det(2σ)`, the product of `(2ν_k)²`.
    pub fn det2(&self) -> f64 {
        (&self.cov * 2.0).determinant()
    }

    pub fn purity(&self) -> f64 {
        1.0 / self.det2().max(f64::MIN_POSITIVE).sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        if self.mean.iter().any(|x| !x.is_finite()) || self.cov.iter().any(|x| !x.is_finite()) {
            return Err(Error::Validation("non-finite entries in Gaussian state".into()));
        }
        let nu = self.symplectic_eigenvalues()?;
        let min = nu.last().copied().unwrap_or(0.5);
        if min < 0.5 - UNCERTAINTY_TOL {
            return Err(Error::Validation(format!(
                "uncertainty relation violated: smallest symplectic eigenvalue {min}"
            )));
        }
        Ok(())
    }

    /// Sub-state on the given modes, in the given order.
    pub fn select_modes(&self, modes: &[usize]) -> Result<Self> {
        let n = self.n_modes();
        if modes.is_empty() || modes.iter().any(|&m| m >= n) {
            return Err(Error::Argument(format!("mode selection {modes:?} invalid for {n} modes")));
        }
        let idx: Vec<usize> = modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
        let d = idx.len();
        let mean = DVector::from_iterator(d, idx.iter().map(|&i| self.mean[i]));
        let cov = DMatrix::from_fn(d, d, |r, c| self.cov[(idx[r], idx[c])]);
        Ok(Self { mean, cov })
    }
}

impl QuantumState for GaussianState {
    fn n_subsystems(&self) -> usize {
        self.n_modes()
    }

    fn entropy(&self, kind: EntropyKind) -> Result<f64> {
        self.validate()?;
        Ok(match kind {
            EntropyKind::VonNeumann => {
                self.symplectic_eigenvalues()?.into_iter().map(thermal_entropy).sum()
            }
            EntropyKind::Renyi2 => (0.5 * self.det2().ln()).max(0.0),
            EntropyKind::Linear => (1.0 - self.purity()).max(0.0),
        })
    }

    fn partial_reduce(&self, keep: &[usize]) -> Result<Self> {
        let k = check_keep(keep, self.n_modes())?;
        self.select_modes(&k)
    }
}

/// Density matrix on a tensor product of `dims`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    rho: DMatrix<C64>,
}

/// Two-qubit state in the basis `|↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩`.
pub type QubitPairState = DensityMatrix;

impl DensityMatrix {
    pub fn new(dims: Vec<usize>, rho: DMatrix<C64>) -> Result<Self> {
        let s = Self::new_unchecked(dims, rho)?;
        s.validate()?;
        Ok(s)
    }

    pub fn new_unchecked(dims: Vec<usize>, rho: DMatrix<C64>) -> Result<Self> {
        let total: usize = dims.iter().product();
        if dims.is_empty() || rho.nrows() != total || rho.ncols() != total {
            return Err(Error::Argument(format!(
                "density matrix is {}x{} but dims {dims:?} require {total}x{total}",
                rho.nrows(),
                rho.ncols()
            )));
        }
        Ok(Self { dims, rho })
    }

    pub fn qubit_pair(rho: Matrix4<C64>) -> Result<Self> {
        Self::new(vec![2, 2], DMatrix::from_iterator(4, 4, rho.iter().copied()))
    }

    pub fn pure(dims: Vec<usize>, psi: &[C64]) -> Result<Self> {
        let v = DVector::from_column_slice(psi);
        let norm = v.norm();
        if norm == 0.0 {
            return Err(Error::Argument("zero state vector".into()));
        }
        let v = v / C64::new(norm, 0.0);
        Self::new(dims, &v * v.adjoint())
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let d: usize = dims.iter().product();
        Self { dims, rho: DMatrix::identity(d, d) * C64::new(1.0 / d as f64, 0.0) }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.rho
    }

    pub fn to_matrix4(&self) -> Option<Matrix4<C64>> {
        (self.rho.nrows() == 4).then(|| Matrix4::from_iterator(self.rho.iter().copied()))
    }

    pub fn trace(&self) -> C64 {
        self.rho.trace()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.rho)
    }

    pub fn expectation(&self, op: &DMatrix<C64>) -> C64 {
        (&self.rho * op).trace()
    }

    pub fn validate(&self) -> Result<()> {
        if self.rho.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Validation("non-finite density matrix entries".into()));
        }
        let herm = (&self.rho - self.rho.adjoint()).iter().fold(0.0_f64, |a, z| a.max(z.norm()));
        if herm > SYMMETRY_TOL {
            return Err(Error::Validation(format!("density matrix not Hermitian (deviation {herm:e})")));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::Validation(format!("trace is {tr}, expected 1")));
        }
        let min = self.eigenvalues()[0];
        if min < -POSITIVITY_TOL {
            return Err(Error::Validation(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    pub fn purity(&self) -> f64 {
        (&self.rho * &self.rho).trace().re
    }

    /// Partial trace keeping the listed subsystems in ascending order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let k = check_keep(keep, self.dims.len())?;
        let n = self.dims.len();
        let traced: Vec<usize> = (0..n).filter(|i| !k.contains(i)).collect();
        let kd: Vec<usize> = k.iter().map(|&i| self.dims[i]).collect();
        let td: Vec<usize> = traced.iter().map(|&i| self.dims[i]).collect();
        let dk: usize = kd.iter().product();
        let dt: usize = td.iter().product();

        let digits = |mut x: usize, dims: &[usize]| -> Vec<usize> {
            let mut out = vec![0; dims.len()];
            for (slot, &d) in out.iter_mut().zip(dims).rev() {
                *slot = x % d;
                x /= d;
            }
            out
        };
        let compose = |kept: &[usize], tr: &[usize]| -> usize {
            let mut full = vec![0; n];
            for (pos, &i) in k.iter().enumerate() {
                full[i] = kept[pos];
            }
            for (pos, &i) in traced.iter().enumerate() {
                full[i] = tr[pos];
            }
            full.iter().zip(&self.dims).fold(0, |acc, (&x, &d)| acc * d + x)
        };

        let mut out = DMatrix::<C64>::zeros(dk, dk);
        for r in 0..dk {
            let rd = digits(r, &kd);
            for c in 0..dk {
                let cd = digits(c, &kd);
                let mut acc = C64::new(0.0, 0.0);
                for t in 0..dt {
                    let tdg = digits(t, &td);
                    acc += self.rho[(compose(&rd, &tdg), compose(&cd, &tdg))];
                }
                out[(r, c)] = acc;
            }
        }
        Ok(Self { dims: kd, rho: out })
    }
}

impl QuantumState for DensityMatrix {
    fn n_subsystems(&self) -> usize {
        self.dims.len()
    }

    fn entropy(&self, kind: EntropyKind) -> Result<f64> {
        self.validate()?;
        Ok(match kind {
            EntropyKind::VonNeumann => linalg::shannon(self.eigenvalues()),
            EntropyKind::Renyi2 => (-self.purity().ln()).max(0.0),
            EntropyKind::Linear => (1.0 - self.purity()).max(0.0),
        })
    }

    fn partial_reduce(&self, keep: &[usize]) -> Result<Self> {
        self.partial_trace(keep)
    }
}

/// Uniformly sampled real time series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub name: String,
    pub t0: f64,
    pub dt: f64,
    pub values: Vec<f64>,
}

impl Trajectory {
    pub fn new(name: impl Into<String>, t0: f64, dt: f64, values: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() || !t0.is_finite() {
            return Err(Error::Argument(format!("trajectory needs finite t0 and dt > 0, got t0={t0}, dt={dt}")));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Validation(format!("non-finite sample at index {i}")));
        }
        Ok(Self { name: name.into(), t0, dt, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.len().saturating_sub(1))
    }

    /// Sample index at time `t`, which must fall on the grid.
    pub fn index_at(&self, t: f64) -> Result<usize> {
        let x = (t - self.t0) / self.dt;
        let k = x.round();
        if (x - k).abs() > 1e-6 {
            return Err(Error::Argument(format!(
                "time {t} is not on the sampling grid (t0={}, dt={})",
                self.t0, self.dt
            )));
        }
        if k < 0.0 || k as usize >= self.len() {
            return Err(Error::Range { start: t, end: t, t0: self.t0, t1: self.t_end() });
        }
        Ok(k as usize)
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|i| self.time(i))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralKind {
    Ohmic,
}

/// Bath spectral density `J(ω) = α ω exp(−ω/ω_c)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralDensity {
    pub kind: SpectralKind,
    pub alpha: f64,
    pub cutoff: f64,
}

impl SpectralDensity {
    pub fn ohmic(alpha: f64, cutoff: f64) -> Result<Self> {
        if !(alpha >= 0.0) || !(cutoff > 0.0) {
            return Err(Error::Argument(format!(
                "Ohmic density needs alpha >= 0 and cutoff > 0, got {alpha}, {cutoff}"
            )));
        }
        Ok(Self { kind: SpectralKind::Ohmic, alpha, cutoff })
    }

    pub fn eval(&self, omega: f64) -> f64 {
        if omega <= 0.0 {
            return 0.0;
        }
        match self.kind {
            SpectralKind::Ohmic => self.alpha * omega * (-omega / self.cutoff).exp(),
        }
    }
}
