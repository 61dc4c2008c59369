//! Networks of coupled harmonic oscillators with normal-mode dissipation.
//!
//! The network Hamiltonian is `Σ p_j²/2 + ½ xᵀ V x` (unit masses). Each
//! normal mode `n` of `V` is damped at its own rate
//!
//! ```text
//! Γ_n = Σ_b (Σ_j W_bj U_jn)² · π J_b(Ω_n) / Ω_n
//! ```
//!
//! where `W` holds the bath couplings. Dissipation is applied as a
//! rotating-wave Lindblad damping of each normal mode towards its thermal
//! state, which is Markovian and keeps the rate hierarchy between modes that
//! drives synchronization.
//!
//! Outputs are expressed in local dimensionless quadratures
//! `q_j = √ω_j x_j`, `p_j = p_j^{can}/√ω_j`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::measures::{gaussian_discord, pearson, WindowSpec};
use crate::statecore::{bose_occupation, GaussianState, SpectralDensity, Trajectory};
use crate::sweep::{CellStatus, SweepGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CouplingForm {
    /// `Σ_{i<j} λ_ij x_i x_j`
    #[default]
    Bilinear,
    /// `Σ_{i<j} λ_ij (x_i − x_j)²`
    Spring,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSpec {
    pub freqs: Vec<f64>,
    /// Symmetric; only the upper triangle is read.
    pub coupling: DMatrix<f64>,
    pub form: CouplingForm,
}

impl NetworkSpec {
    pub fn new(freqs: Vec<f64>, coupling: DMatrix<f64>, form: CouplingForm) -> Result<Self> {
        let n = freqs.len();
        if n == 0 || coupling.nrows() != n || coupling.ncols() != n {
            return Err(Error::Argument(format!("coupling must be {n}x{n}")));
        }
        if let Some(w) = freqs.iter().find(|&&w| !(w > 0.0) || !w.is_finite()) {
            return Err(Error::Argument(format!("oscillator frequencies must be positive, got {w}")));
        }
        if linalg::asymmetry(&coupling) > 1e-12 {
            return Err(Error::Argument("coupling matrix must be symmetric".into()));
        }
        Ok(Self { freqs, coupling, form })
    }

    pub fn pair(w1: f64, w2: f64, lambda: f64, form: CouplingForm) -> Result<Self> {
        Self::new(vec![w1, w2], DMatrix::from_row_slice(2, 2, &[0.0, lambda, lambda, 0.0]), form)
    }

    pub fn n(&self) -> usize {
        self.freqs.len()
    }

    pub fn potential_matrix(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut v = DMatrix::from_diagonal(&DVector::from_iterator(n, self.freqs.iter().map(|w| w * w)));
        for i in 0..n {
            for j in (i + 1)..n {
                let l = self.coupling[(i, j)];
                match self.form {
                    CouplingForm::Bilinear => {
                        v[(i, j)] += l;
                        v[(j, i)] += l;
                    }
                    CouplingForm::Spring => {
                        v[(i, i)] += 2.0 * l;
                        v[(j, j)] += 2.0 * l;
                        v[(i, j)] -= 2.0 * l;
                        v[(j, i)] -= 2.0 * l;
                    }
                }
            }
        }
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bath {
    pub density: SpectralDensity,
    pub temperature: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BathTopology {
    /// `baths × oscillators` coupling weights.
    pub weights: DMatrix<f64>,
    pub baths: Vec<Bath>,
}

impl BathTopology {
    pub fn custom(weights: DMatrix<f64>, baths: Vec<Bath>) -> Result<Self> {
        if weights.nrows() != baths.len() {
            return Err(Error::Argument(format!(
                "{} weight rows for {} baths",
                weights.nrows(),
                baths.len()
            )));
        }
        if baths.iter().any(|b| !(b.temperature >= 0.0)) {
            return Err(Error::Argument("bath temperatures must be >= 0".into()));
        }
        Ok(Self { weights, baths })
    }

    /// One bath coupled equally to every oscillator.
    pub fn common(n: usize, bath: Bath) -> Self {
        Self { weights: DMatrix::from_element(1, n, 1.0), baths: vec![bath] }
    }

    /// An independent copy of `bath` per oscillator.
    pub fn separate(n: usize, bath: Bath) -> Self {
        Self { weights: DMatrix::identity(n, n), baths: vec![bath; n] }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalMode {
    pub frequency: f64,
    /// Unit vector in oscillator coordinates `x`.
    pub vector: DVector<f64>,
    pub gamma: f64,
    /// Rate-weighted thermal occupation seen by the mode.
    pub nbar: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeReport {
    /// Sorted by damping rate, least damped first.
    pub modes: Vec<NormalMode>,
}

/// Per-bath rate contributions `o_bn² πJ_b(Ω)/Ω` for a mode vector.
fn rate_parts(baths: &BathTopology, u: &DVector<f64>, omega: f64) -> Vec<f64> {
    (0..baths.baths.len())
        .map(|b| {
            let o: f64 = baths.weights.row(b).iter().zip(u.iter()).map(|(w, x)| w * x).sum();
            o * o * std::f64::consts::PI * baths.baths[b].density.eval(omega) / omega
        })
        .collect()
}

pub fn normal_modes(net: &NetworkSpec, baths: &BathTopology) -> Result<ModeReport> {
    let n = net.n();
    if baths.weights.ncols() != n {
        return Err(Error::Argument(format!(
            "bath weights have {} columns for {n} oscillators",
            baths.weights.ncols()
        )));
    }
    let eig = SymmetricEigen::new(net.potential_matrix());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    if let Some(&bad) = order.iter().find(|&&k| eig.eigenvalues[k] <= 0.0) {
        return Err(Error::UnstableNetwork(format!(
            "potential matrix not positive definite (eigenvalue {})",
            eig.eigenvalues[bad]
        )));
    }
    let mut omega: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k].sqrt()).collect();
    let mut u = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);

    // Inside a degenerate block any rotation is a valid mode basis; pick the
    // one that makes the damping diagonal.
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (omega[end] - omega[start]).abs() < 1e-9 {
            end += 1;
        }
        if end - start > 1 {
            let m = end - start;
            let w = omega[start];
            let mut gram = DMatrix::zeros(m, m);
            for b in 0..baths.baths.len() {
                let scale = std::f64::consts::PI * baths.baths[b].density.eval(w) / w;
                let o: Vec<f64> = (start..end)
                    .map(|c| baths.weights.row(b).iter().zip(u.column(c).iter()).map(|(x, y)| x * y).sum())
                    .collect();
                for i in 0..m {
                    for j in 0..m {
                        gram[(i, j)] += scale * o[i] * o[j];
                    }
                }
            }
            let ge = SymmetricEigen::new(gram);
            let block = u.columns(start, m) * &ge.eigenvectors;
            u.columns_mut(start, m).copy_from(&block);
            for k in start..end {
                omega[k] = w;
            }
        }
        start = end;
    }

    let mut modes: Vec<NormalMode> = (0..n)
        .map(|k| {
            let v = u.column(k).into_owned();
            let parts = rate_parts(baths, &v, omega[k]);
            let gamma: f64 = parts.iter().sum();
            let nbar = if gamma > 0.0 {
                parts
                    .iter()
                    .zip(&baths.baths)
                    .map(|(g, b)| g * bose_occupation(omega[k], b.temperature))
                    .sum::<f64>()
                    / gamma
            } else {
                0.0
            };
            NormalMode { frequency: omega[k], vector: v, gamma, nbar }
        })
        .collect();
    modes.sort_by(|a, b| a.gamma.total_cmp(&b.gamma).then(a.frequency.total_cmp(&b.frequency)));
    Ok(ModeReport { modes })
}

/// Drift `A` and diffusion `D` of `dσ/dt = Aσ + σAᵀ + D` in local
/// quadratures.
pub fn build_evolution(net: &NetworkSpec, baths: &BathTopology) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let report = normal_modes(net, baths)?;
    let n = net.n();
    let v = net.potential_matrix();
    let mut ax = DMatrix::<f64>::zeros(2 * n, 2 * n);
    let mut dx = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        ax[(2 * i, 2 * i + 1)] = 1.0;
        for j in 0..n {
            ax[(2 * i + 1, 2 * j)] = -v[(i, j)];
        }
    }
    for m in &report.modes {
        let p = &m.vector * m.vector.transpose();
        let noise = m.gamma * (m.nbar + 0.5);
        for i in 0..n {
            for j in 0..n {
                ax[(2 * i, 2 * j)] -= 0.5 * m.gamma * p[(i, j)];
                ax[(2 * i + 1, 2 * j + 1)] -= 0.5 * m.gamma * p[(i, j)];
                dx[(2 * i, 2 * j)] += noise * p[(i, j)] / m.frequency;
                dx[(2 * i + 1, 2 * j + 1)] += noise * p[(i, j)] * m.frequency;
            }
        }
    }
    let s: Vec<f64> = net.freqs.iter().flat_map(|w| [w.sqrt(), 1.0 / w.sqrt()]).collect();
    let a = DMatrix::from_fn(2 * n, 2 * n, |r, c| s[r] * ax[(r, c)] / s[c]);
    let mut d = DMatrix::from_fn(2 * n, 2 * n, |r, c| s[r] * dx[(r, c)] * s[c]);
    linalg::symmetrize(&mut d);
    Ok((a, d))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub dt: f64,
    pub steps: usize,
    pub record_every: usize,
}

impl TimeGrid {
    pub fn new(dt: f64, t_end: f64, record_every: usize) -> Result<Self> {
        if !(dt > 0.0) || !(t_end >= 0.0) {
            return Err(Error::Config(format!("need dt > 0 and t_end >= 0, got dt={dt}, t_end={t_end}")));
        }
        let steps = (t_end / dt).round() as usize;
        Ok(Self { dt, steps, record_every: record_every.max(1) })
    }

    pub fn recorded_times(&self) -> Vec<f64> {
        (0..=self.steps).step_by(self.record_every).map(|k| k as f64 * self.dt).collect()
    }
}

/// RK4 for `m′ = A m`, `σ′ = Aσ + σAᵀ + D` with constant coefficients.
///
/// For an autonomous linear system one RK4 step of size `h` is exactly the
/// degree-four Taylor polynomial of `h·L` applied to the state, so the step
/// is precomputed as a matrix acting on `m` and on `[vec σ; 1]`. Several
/// steps can then be fused into one matrix when only every k-th state is
/// needed.
pub struct CovarianceIntegrator {
    dim: usize,
    dt: f64,
    mean_step: DMatrix<f64>,
    cov_step: DMatrix<f64>,
}

fn taylor4(l: &DMatrix<f64>, h: f64) -> DMatrix<f64> {
    let n = l.nrows();
    let x = l * h;
    let mut term = DMatrix::<f64>::identity(n, n);
    let mut out = term.clone();
    for k in 1..=4 {
        term = &term * &x / k as f64;
        out += &term;
    }
    out
}

fn matrix_power(m: &DMatrix<f64>, mut k: usize) -> DMatrix<f64> {
    let n = m.nrows();
    let mut result = DMatrix::<f64>::identity(n, n);
    let mut base = m.clone();
    while k > 0 {
        if k & 1 == 1 {
            result = &result * &base;
        }
        base = &base * &base;
        k >>= 1;
    }
    result
}

impl CovarianceIntegrator {
    pub fn new(a: DMatrix<f64>, d: DMatrix<f64>, dt: f64) -> Result<Self> {
        if a.nrows() != a.ncols() || d.shape() != a.shape() {
            return Err(Error::Argument("drift and diffusion must be square and equal size".into()));
        }
        let norm = linalg::spectral_norm(&a);
        if !(dt * norm < 0.1) {
            return Err(Error::Config(format!("dt·|A| = {} exceeds 0.1; reduce dt", dt * norm)));
        }
        let n = a.nrows();
        let eye = DMatrix::<f64>::identity(n, n);
        // Column-major vec: vec(Aσ) = (I ⊗ A) vec σ, vec(σAᵀ) = (A ⊗ I) vec σ.
        let lyap = eye.kronecker(&a) + a.kronecker(&eye);
        let mut aug = DMatrix::<f64>::zeros(n * n + 1, n * n + 1);
        aug.view_mut((0, 0), (n * n, n * n)).copy_from(&lyap);
        for (k, v) in d.iter().enumerate() {
            aug[(k, n * n)] = *v;
        }
        Ok(Self { dim: n, dt, mean_step: taylor4(&a, dt), cov_step: taylor4(&aug, dt) })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Matrices advancing mean and augmented covariance by `k` steps.
    pub fn propagator(&self, k: usize) -> (DMatrix<f64>, DMatrix<f64>) {
        (matrix_power(&self.mean_step, k), matrix_power(&self.cov_step, k))
    }

    pub fn apply(&self, prop: &(DMatrix<f64>, DMatrix<f64>), m: &mut DVector<f64>, s: &mut DMatrix<f64>) {
        let n = self.dim;
        *m = &prop.0 * &*m;
        let mut z = DVector::<f64>::zeros(n * n + 1);
        z.rows_mut(0, n * n).copy_from(&DVector::from_column_slice(s.as_slice()));
        z[n * n] = 1.0;
        let z = &prop.1 * z;
        *s = DMatrix::from_column_slice(n, n, &z.as_slice()[..n * n]);
        linalg::symmetrize(s);
    }

    pub fn step(&self, m: &mut DVector<f64>, s: &mut DMatrix<f64>) {
        let n = self.dim;
        *m = &self.mean_step * &*m;
        let mut z = DVector::<f64>::zeros(n * n + 1);
        z.rows_mut(0, n * n).copy_from(&DVector::from_column_slice(s.as_slice()));
        z[n * n] = 1.0;
        let z = &self.cov_step * z;
        *s = DMatrix::from_column_slice(n, n, &z.as_slice()[..n * n]);
        linalg::symmetrize(s);
    }
}

fn checked(m: &DVector<f64>, s: &DMatrix<f64>, t: f64) -> Result<GaussianState> {
    let st = GaussianState::new_unchecked(m.clone(), s.clone())?;
    st.validate()
        .map_err(|e| Error::Integrator(format!("invalid state at t = {t}: {e}")))?;
    Ok(st)
}

/// Integrates from `state0` and returns the states at the recorded steps
/// (including `t = 0`), each validated.
pub fn evolve_covariance(
    state0: &GaussianState,
    a: &DMatrix<f64>,
    d: &DMatrix<f64>,
    grid: &TimeGrid,
) -> Result<Vec<GaussianState>> {
    if a.nrows() != state0.dim() {
        return Err(Error::Argument("drift size does not match state".into()));
    }
    let integ = CovarianceIntegrator::new(a.clone(), d.clone(), grid.dt)?;
    let prop = integ.propagator(grid.record_every);
    let mut m = state0.mean().clone();
    let mut s = state0.cov().clone();
    let mut out = vec![checked(&m, &s, 0.0)?];
    let mut k = 0;
    while k + grid.record_every <= grid.steps {
        integ.apply(&prop, &mut m, &mut s);
        k += grid.record_every;
        out.push(checked(&m, &s, k as f64 * grid.dt)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    Common,
    Separate,
}

/// Settings for a two-oscillator detuning × coupling diagram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TongueConfig {
    pub omega1: f64,
    pub form: CouplingForm,
    pub topology: Topology,
    pub bath: Bath,
    /// Initial squeezing `(r, θ)` per oscillator.
    pub squeeze1: (f64, f64),
    pub squeeze2: (f64, f64),
    pub t_eval: f64,
    pub window: f64,
    /// RK4 step.
    pub dt: f64,
    /// Steps between samples of the Pearson window.
    pub sample_every: usize,
}

impl Default for TongueConfig {
    fn default() -> Self {
        Self {
            omega1: 1.0,
            form: CouplingForm::Bilinear,
            topology: Topology::Common,
            bath: Bath { density: SpectralDensity::ohmic(0.01, 20.0).unwrap(), temperature: 0.0 },
            squeeze1: (1.0, 0.0),
            squeeze2: (1.0, std::f64::consts::FRAC_PI_4),
            t_eval: 150.0,
            window: 40.0,
            dt: 0.004,
            sample_every: 10,
        }
    }
}

/// Pearson of `⟨q₁²⟩, ⟨q₂²⟩` over `[t_eval, t_eval + window]` and the
/// Gaussian discord at `t_eval` for one `(ω₂, λ)` point.
pub fn tongue_cell(cfg: &TongueConfig, omega2: f64, lambda: f64) -> Result<(f64, f64)> {
    let net = NetworkSpec::pair(cfg.omega1, omega2, lambda, cfg.form)?;
    let baths = match cfg.topology {
        Topology::Common => BathTopology::common(2, cfg.bath),
        Topology::Separate => BathTopology::separate(2, cfg.bath),
    };
    let (a, d) = build_evolution(&net, &baths)?;
    let s0 = GaussianState::product(&[
        GaussianState::squeezed_vacuum(cfg.squeeze1.0, cfg.squeeze1.1),
        GaussianState::squeezed_vacuum(cfg.squeeze2.0, cfg.squeeze2.1),
    ]);
    let integ = CovarianceIntegrator::new(a, d, cfg.dt)?;
    let every = cfg.sample_every.max(1);
    let sdt = cfg.dt * every as f64;
    let k0 = (cfg.t_eval / sdt).round() as usize;
    let nw = (cfg.window / sdt).round() as usize;
    let prop = integ.propagator(every);
    let mut m = s0.mean().clone();
    let mut s = s0.cov().clone();
    let mut x1 = Vec::with_capacity(nw + 1);
    let mut x2 = Vec::with_capacity(nw + 1);
    let mut discord = f64::NAN;
    for k in 0..=k0 + nw {
        if k > 0 {
            integ.apply(&prop, &mut m, &mut s);
        }
        let t = k as f64 * sdt;
        let st = checked(&m, &s, t)?;
        if k == k0 {
            discord = gaussian_discord(&st, 1)?;
        }
        if k >= k0 {
            x1.push(st.second_moment(0, 0));
            x2.push(st.second_moment(2, 2));
        }
    }
    let t0 = k0 as f64 * sdt;
    let a1 = Trajectory::new("q1_sq", t0, sdt, x1)?;
    let a2 = Trajectory::new("q2_sq", t0, sdt, x2)?;
    let c = pearson(&a1, &a2, &WindowSpec::new(nw as f64 * sdt), t0)?;
    Ok((c, discord))
}

/// `p1 = ω₂`, `p2 = λ`, layers `pearson` and `discord`.
pub fn tongue_diagram(cfg: &TongueConfig, omega2: Vec<f64>, lambda: Vec<f64>) -> SweepGrid {
    SweepGrid::evaluate("omega2", omega2, "lambda", lambda, &["pearson", "discord"], |_, _, w2, l| {
        match tongue_cell(cfg, w2, l) {
            Ok((c, d)) => (vec![c, d], CellStatus::Ok),
            Err(e) => (vec![], CellStatus::Failed(e.to_string())),
        }
    })
}
