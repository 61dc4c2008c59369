//! Two detuned spins with Ising coupling, dissipating through a secular
//! Born–Markov master equation.
//!
//! `H_S = ω₁/2 σ₁ᶻ + ω₂/2 σ₂ᶻ + λ σ₁ˣσ₂ˣ`, bath coupling `O = Aσ₁ˣ + σ₂ˣ`.
//! The spectrum is `±a, ±b` with `a = ½√(ω₊² + 4λ²)`, `b = ½√(ω₋² + 4λ²)`,
//! giving quasi-particle energies `E₁ = a + b` and `E₂ = a − b`. Jump
//! operators are the eigenoperator components `A(ω) = Σ Π(ε) O Π(ε+ω)`.
//! The Lamb shift is dropped.

use nalgebra::{Matrix4, SMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::measures::{concurrence, mutual_information, pearson, WindowSpec};
use crate::statecore::{bose_occupation, DensityMatrix, EntropyKind, SpectralDensity, Trajectory};
use crate::sweep::{CellStatus, SweepGrid};
use crate::C64;

type M4 = Matrix4<C64>;
type M16 = SMatrix<C64, 16, 16>;
type V16 = SMatrix<C64, 16, 1>;

const fn c(re: f64) -> C64 {
    C64 { re, im: 0.0 }
}

pub fn pauli_x() -> nalgebra::Matrix2<C64> {
    nalgebra::Matrix2::new(c(0.0), c(1.0), c(1.0), c(0.0))
}

pub fn pauli_y() -> nalgebra::Matrix2<C64> {
    nalgebra::Matrix2::new(c(0.0), C64::new(0.0, -1.0), C64::new(0.0, 1.0), c(0.0))
}

pub fn pauli_z() -> nalgebra::Matrix2<C64> {
    nalgebra::Matrix2::new(c(1.0), c(0.0), c(0.0), c(-1.0))
}

/// `op` acting on `site` (0 or 1) of the pair.
pub fn on_site(op: &nalgebra::Matrix2<C64>, site: usize) -> M4 {
    let id = nalgebra::Matrix2::<C64>::identity();
    if site == 0 {
        op.kronecker(&id)
    } else {
        id.kronecker(op)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpinCoupling {
    /// `O = Aσ₁ˣ + σ₂ˣ` with rates from the spectral density.
    Transverse,
    /// `O = σ₁ᶻ + σ₂ᶻ`, keeping only its energy-diagonal part at a flat rate.
    Dephasing { rate: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinModelSpec {
    pub omega1: f64,
    pub omega2: f64,
    pub lambda: f64,
    /// Relative strength `A` of spin 1's bath coupling.
    pub asym: f64,
    pub bath: SpectralDensity,
    pub temperature: f64,
    pub coupling: SpinCoupling,
}

impl Default for SpinModelSpec {
    fn default() -> Self {
        Self {
            omega1: 1.0,
            omega2: 1.0,
            lambda: 0.1,
            asym: 0.0,
            bath: SpectralDensity::ohmic(0.01, 20.0).unwrap(),
            temperature: 0.0,
            coupling: SpinCoupling::Transverse,
        }
    }
}

impl SpinModelSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega1 > 0.0 && self.omega2 > 0.0) {
            return Err(Error::Argument("spin frequencies must be positive".into()));
        }
        if !(self.temperature >= 0.0) || !self.lambda.is_finite() || !self.asym.is_finite() {
            return Err(Error::Argument("temperature must be >= 0 and couplings finite".into()));
        }
        if let SpinCoupling::Dephasing { rate } = self.coupling {
            if !(rate >= 0.0) {
                return Err(Error::Argument("dephasing rate must be >= 0".into()));
            }
        }
        Ok(())
    }

    pub fn hamiltonian(&self) -> M4 {
        on_site(&pauli_z(), 0) * c(self.omega1 / 2.0)
            + on_site(&pauli_z(), 1) * c(self.omega2 / 2.0)
            + on_site(&pauli_x(), 0) * on_site(&pauli_x(), 1) * c(self.lambda)
    }

    pub fn coupling_operator(&self) -> M4 {
        match self.coupling {
            SpinCoupling::Transverse => on_site(&pauli_x(), 0) * c(self.asym) + on_site(&pauli_x(), 1),
            SpinCoupling::Dephasing { .. } => on_site(&pauli_z(), 0) + on_site(&pauli_z(), 1),
        }
    }

    /// Closed-form `(E₁, E₂)`.
    pub fn analytic_energies(&self) -> (f64, f64) {
        let wp = self.omega1 + self.omega2;
        let wm = self.omega1 - self.omega2;
        let l2 = 4.0 * self.lambda * self.lambda;
        let a = 0.5 * (wp * wp + l2).sqrt();
        let b = 0.5 * (wm * wm + l2).sqrt();
        (a + b, a - b)
    }
}

/// Frequency component of the coupling operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Sector {
    /// Bohr frequency ω ≥ 0; `A(ω)` lowers the energy by ω.
    pub frequency: f64,
    pub op: M4,
    /// `‖A(ω)‖²` (Frobenius).
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpinSpectrum {
    pub e1: f64,
    pub e2: f64,
    /// Ascending eigenvalues of `H_S`.
    pub energies: [f64; 4],
    /// Columns are eigenvectors, in the order of `energies`.
    pub eigenvectors: M4,
    pub sectors: Vec<Sector>,
}

impl SpinSpectrum {
    pub fn sector(&self, frequency: f64) -> Option<&Sector> {
        self.sectors.iter().find(|s| (s.frequency - frequency).abs() < 1e-9)
    }
}

pub fn diagonalize(spec: &SpinModelSpec) -> Result<SpinSpectrum> {
    spec.validate()?;
    let h = spec.hamiltonian();
    let hr = h.map(|z| z.re);
    let eig = SymmetricEigen::new(hr);
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let energies = order.map(|k| eig.eigenvalues[k]);
    let v = M4::from_fn(|r, col| c(eig.eigenvectors[(r, order[col])]));

    // Sorted spectrum is (−a, −b, b, a).
    let e1 = energies[3] - energies[1];
    let e2 = energies[3] - energies[2];
    let (ae1, ae2) = spec.analytic_energies();
    if (e1 - ae1).abs() > 1e-10 || (e2 - ae2).abs() > 1e-10 {
        return Err(Error::Internal(format!(
            "numeric gaps ({e1}, {e2}) disagree with closed form ({ae1}, {ae2})"
        )));
    }
    if (e1 - e2).abs() < 1e-9 {
        return Err(Error::DegenerateSpectrum(format!(
            "E1 = E2 = {e1}: secular approximation invalid"
        )));
    }

    let o_eig = v.adjoint() * spec.coupling_operator() * v;
    let mut sectors: Vec<Sector> = Vec::new();
    for i in 0..4 {
        for j in 0..4 {
            let w = energies[j] - energies[i];
            if w < -1e-9 || o_eig[(i, j)].norm() < 1e-13 {
                continue;
            }
            let w = w.max(0.0);
            let mut unit = M4::zeros();
            unit[(i, j)] = o_eig[(i, j)];
            let op = v * unit * v.adjoint();
            match sectors.iter_mut().find(|s| (s.frequency - w).abs() < 1e-9) {
                Some(s) => s.op += op,
                None => sectors.push(Sector { frequency: w, op, weight: 0.0 }),
            }
        }
    }
    for s in &mut sectors {
        s.weight = s.op.norm_squared();
    }
    // Frequencies that cancel to nothing still exist as (dark) sectors.
    for w in [e1, e2] {
        if !sectors.iter().any(|s| (s.frequency - w).abs() < 1e-9) && spec.coupling == SpinCoupling::Transverse {
            sectors.push(Sector { frequency: w, op: M4::zeros(), weight: 0.0 });
        }
    }
    sectors.sort_by(|a, b| b.frequency.total_cmp(&a.frequency));
    Ok(SpinSpectrum { e1, e2, energies, eigenvectors: v, sectors })
}

/// Indices of eigenstates the coupling operator annihilates.
pub fn dark_states(spec: &SpinModelSpec, spectrum: &SpinSpectrum) -> Vec<usize> {
    let o = spec.coupling_operator();
    (0..4)
        .filter(|&k| (o * spectrum.eigenvectors.column(k)).norm() < 1e-10)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Jump {
    pub frequency: f64,
    pub rate: f64,
    pub op: M4,
    /// Emission (`+`) or absorption (`−`) channel.
    pub emission: bool,
}

/// Lindblad channels `γ⁺(ω) L[A(ω)]`, `γ⁻(ω) L[A(ω)†]` for every positive
/// Bohr frequency, with `γ⁺ = 2πJ(ω)(n̄+1)` and `γ⁻ = 2πJ(ω)n̄`. For the
/// dephasing coupling only the zero-frequency part is kept.
pub fn secular_rates(spec: &SpinModelSpec, spectrum: &SpinSpectrum) -> Result<Vec<Jump>> {
    let mut jumps = Vec::new();
    match spec.coupling {
        SpinCoupling::Transverse => {
            for s in spectrum.sectors.iter().filter(|s| s.frequency > 1e-9) {
                let j = spec.bath.eval(s.frequency);
                let n = bose_occupation(s.frequency, spec.temperature);
                let two_pi = 2.0 * std::f64::consts::PI;
                jumps.push(Jump { frequency: s.frequency, rate: two_pi * j * (n + 1.0), op: s.op, emission: true });
                jumps.push(Jump { frequency: s.frequency, rate: two_pi * j * n, op: s.op.adjoint(), emission: false });
            }
        }
        SpinCoupling::Dephasing { rate } => {
            if let Some(s) = spectrum.sectors.iter().find(|s| s.frequency <= 1e-9) {
                jumps.push(Jump { frequency: 0.0, rate, op: s.op, emission: true });
            }
        }
    }
    Ok(jumps)
}

fn rhs(h: &M4, jumps: &[Jump], rho: &M4) -> M4 {
    let i = C64::new(0.0, 1.0);
    let mut d = (h * rho - rho * h) * (-i);
    for j in jumps {
        if j.rate == 0.0 {
            continue;
        }
        let l = &j.op;
        let ld = l.adjoint();
        let ldl = ld * l;
        d += (l * rho * ld - (ldl * rho + rho * ldl) * c(0.5)) * c(j.rate);
    }
    d
}

fn as_vec(m: &M4) -> V16 {
    V16::from_column_slice(m.as_slice())
}

fn as_mat(v: &V16) -> M4 {
    M4::from_column_slice(v.as_slice())
}

/// Liouvillian superoperator on column-major `vec ρ`.
pub fn liouvillian(spec: &SpinModelSpec, jumps: &[Jump]) -> M16 {
    let h = spec.hamiltonian();
    let mut l = M16::zeros();
    for k in 0..16 {
        let mut e = V16::zeros();
        e[k] = c(1.0);
        l.set_column(k, &as_vec(&rhs(&h, jumps, &as_mat(&e))));
    }
    l
}

/// `(|↑⟩+|↓⟩)(|↑⟩+|↓⟩)/2`.
pub fn default_initial_state() -> DensityMatrix {
    DensityMatrix::pure(vec![2, 2], &[c(0.5); 4]).unwrap()
}

/// Gibbs state of `H_S` at temperature `T` (ground state at `T = 0`).
pub fn gibbs_state(spec: &SpinModelSpec) -> Result<DensityMatrix> {
    let sp = diagonalize(spec)?;
    let e0 = sp.energies[0];
    let w: Vec<f64> = sp
        .energies
        .iter()
        .map(|&e| {
            if spec.temperature > 0.0 {
                (-(e - e0) / spec.temperature).exp()
            } else if (e - e0).abs() < 1e-12 {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    let z: f64 = w.iter().sum();
    let d = M4::from_diagonal(&nalgebra::Vector4::from_iterator(w.iter().map(|x| c(x / z))));
    let rho = sp.eigenvectors * d * sp.eigenvectors.adjoint();
    DensityMatrix::qubit_pair(rho)
}

/// Uhlmann fidelity `(Tr √(√ρ σ √ρ))²`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    let s = linalg::sqrt_hermitian(rho.matrix());
    let inner = &s * sigma.matrix() * &s;
    let inner = (&inner + inner.adjoint()) * c(0.5);
    let t: f64 = linalg::hermitian_eigenvalues(&inner).into_iter().map(|x| x.max(0.0).sqrt()).sum();
    t * t
}

pub const SPIN_TRACE_TOL: f64 = 1e-7;
pub const SPIN_POSITIVITY_TOL: f64 = 1e-7;

/// Precomputed RK4 propagator of the master equation.
pub struct SpinDynamics {
    pub spectrum: SpinSpectrum,
    pub jumps: Vec<Jump>,
    pub dt: f64,
    step: M16,
}

impl SpinDynamics {
    pub fn new(spec: &SpinModelSpec, dt: f64) -> Result<Self> {
        let spectrum = diagonalize(spec)?;
        let jumps = secular_rates(spec, &spectrum)?;
        let max_rate = jumps.iter().map(|j| j.rate).fold(0.0, f64::max);
        let scale = spectrum.e1.max(max_rate);
        if !(dt > 0.0) || !(dt * scale < 0.05) {
            return Err(Error::Config(format!("dt·max(E1, rates) = {} must be below 0.05", dt * scale)));
        }
        let l = liouvillian(spec, &jumps) * c(dt);
        // One RK4 step of a linear autonomous system is its 4th-order Taylor map.
        let mut term = M16::identity();
        let mut step = M16::identity();
        for k in 1..=4 {
            term = term * l * c(1.0 / k as f64);
            step += term;
        }
        Ok(Self { spectrum, jumps, dt, step })
    }

    pub fn max_rate(&self) -> f64 {
        self.jumps.iter().map(|j| j.rate).fold(0.0, f64::max)
    }

    /// Whether the secular approximation is questionable: Bohr frequencies
    /// closer than ten times the largest rate.
    pub fn near_degenerate(&self) -> bool {
        (self.spectrum.e1 - self.spectrum.e2).abs() < 10.0 * self.max_rate()
    }

    /// Advances `rho0` by `steps`, calling `observe(k, ρ_k)` for k = 0..=steps.
    /// Trace is checked every step, positivity every `check_every` steps.
    pub fn run(
        &self,
        rho0: &DensityMatrix,
        steps: usize,
        check_every: usize,
        mut observe: impl FnMut(usize, &M4),
    ) -> Result<()> {
        let m0 = rho0.to_matrix4().ok_or_else(|| Error::Argument("initial state must be a qubit pair".into()))?;
        rho0.validate()?;
        let mut v = as_vec(&m0);
        observe(0, &m0);
        for k in 1..=steps {
            v = self.step * v;
            let rho = as_mat(&v);
            let tr = rho.trace();
            if (tr.re - 1.0).abs() > SPIN_TRACE_TOL || tr.im.abs() > SPIN_TRACE_TOL {
                return Err(Error::Integrator(format!("trace drifted to {tr} at t = {}", k as f64 * self.dt)));
            }
            if check_every > 0 && (k % check_every == 0 || k == steps) {
                check_positive(&rho, k as f64 * self.dt)?;
            }
            observe(k, &rho);
        }
        Ok(())
    }
}

fn hermitize(m: &M4) -> M4 {
    (m + m.adjoint()) * c(0.5)
}

fn check_positive(rho: &M4, t: f64) -> Result<()> {
    let h = hermitize(rho);
    let ev = linalg::hermitian_eigenvalues(&nalgebra::DMatrix::from_iterator(4, 4, h.iter().copied()));
    if ev[0] < -SPIN_POSITIVITY_TOL {
        return Err(Error::Integrator(format!("negative eigenvalue {:e} at t = {t}", ev[0])));
    }
    Ok(())
}

/// Hermitian part, with eigenvalues inside the integrator tolerance clipped
/// to zero and the trace renormalized.
fn to_state(m: &M4) -> DensityMatrix {
    let h = hermitize(m);
    let eig = nalgebra::SymmetricEigen::new(nalgebra::DMatrix::from_iterator(4, 4, h.iter().copied()));
    let rho = if eig.eigenvalues.iter().any(|&x| x < 0.0) {
        let w = eig.eigenvalues.map(|x| x.max(0.0));
        let v = &eig.eigenvectors;
        v * nalgebra::DMatrix::from_diagonal(&w.map(c)) * v.adjoint()
    } else {
        nalgebra::DMatrix::from_iterator(4, 4, h.iter().copied())
    };
    let tr = rho.trace().re;
    DensityMatrix::new_unchecked(vec![2, 2], rho * c(1.0 / tr)).expect("4x4 matrix has qubit-pair shape")
}

/// States at every `record_every`-th step from `t = 0` to `t_end`.
pub fn evolve_rho(
    rho0: &DensityMatrix,
    spec: &SpinModelSpec,
    dt: f64,
    t_end: f64,
    record_every: usize,
) -> Result<Vec<DensityMatrix>> {
    let dynamics = SpinDynamics::new(spec, dt)?;
    let steps = (t_end / dt).round() as usize;
    let every = record_every.max(1);
    let mut out = Vec::new();
    dynamics.run(rho0, steps, every, |k, rho| {
        if k % every == 0 {
            out.push(to_state(rho));
        }
    })?;
    Ok(out)
}

/// Coefficients of `A = a_x σˣ + a_y σʸ + a_z σᶻ + a_d 𝟙` on one spin.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LocalOperatorCoeffs {
    pub a_x: f64,
    pub a_y: f64,
    pub a_z: f64,
    pub a_d: f64,
}

impl LocalOperatorCoeffs {
    pub fn sigma_x() -> Self {
        Self { a_x: 1.0, ..Self::default() }
    }

    pub fn sigma_z() -> Self {
        Self { a_z: 1.0, ..Self::default() }
    }

    pub fn operator(&self, site: usize) -> M4 {
        let local = pauli_x() * c(self.a_x)
            + pauli_y() * c(self.a_y)
            + pauli_z() * c(self.a_z)
            + nalgebra::Matrix2::identity() * c(self.a_d);
        on_site(&local, site)
    }
}

/// `Tr[ρ(t) A_site]` along a sequence of states.
pub fn observable_traj(
    states: &[DensityMatrix],
    t0: f64,
    dt: f64,
    site: usize,
    coeffs: &LocalOperatorCoeffs,
) -> Result<Trajectory> {
    if site > 1 {
        return Err(Error::Argument(format!("site must be 0 or 1, got {site}")));
    }
    let op = coeffs.operator(site);
    let mut values = Vec::with_capacity(states.len());
    for s in states {
        let m = s.to_matrix4().ok_or_else(|| Error::Argument("states must be qubit pairs".into()))?;
        let e = (m * op).trace();
        if e.im.abs() > 1e-10 {
            return Err(Error::Internal(format!("expectation value has imaginary part {}", e.im)));
        }
        values.push(e.re);
    }
    Trajectory::new(format!("site{site}"), t0, dt, values)
}

/// Time settings of a synchronization diagram.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramSettings {
    pub t_eval: f64,
    pub window: f64,
    /// Upper limit of `Z_I = ∫₀ Z dt`.
    pub z_until: f64,
    /// Time at which MI and concurrence are evaluated.
    pub mi_at: f64,
    pub dt: f64,
}

impl Default for DiagramSettings {
    fn default() -> Self {
        Self { t_eval: 75.0, window: 10.0, z_until: 100.0, mi_at: 80.0, dt: 0.01 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub pearson: f64,
    pub z_integral: f64,
    pub mutual_information: f64,
    pub concurrence: f64,
    pub near_degenerate: bool,
}

pub fn diagram_cell(spec: &SpinModelSpec, set: &DiagramSettings) -> Result<CellResult> {
    let dyns = SpinDynamics::new(spec, set.dt)?;
    let idx = |t: f64| (t / set.dt).round() as usize;
    let (k0, kw, kz, km) = (idx(set.t_eval), idx(set.window), idx(set.z_until), idx(set.mi_at));
    let steps = (k0 + kw).max(kz).max(km);
    let x1op = on_site(&pauli_x(), 0);
    let x2op = on_site(&pauli_x(), 1);
    let mut x1 = Vec::with_capacity(kw + 1);
    let mut x2 = Vec::with_capacity(kw + 1);
    let mut z_int = 0.0;
    let mut rho_mi = None;
    dyns.run(&default_initial_state(), steps, 500, |k, rho| {
        if k <= kz {
            let z = 2.0 * rho[(1, 2)].re;
            let w = if k == 0 || k == kz { 0.5 } else { 1.0 };
            z_int += w * z * set.dt;
        }
        if k >= k0 && k <= k0 + kw {
            x1.push((rho * x1op).trace().re);
            x2.push((rho * x2op).trace().re);
        }
        if k == km {
            rho_mi = Some(to_state(rho));
        }
    })?;
    let t0 = k0 as f64 * set.dt;
    let a = Trajectory::new("sx1", t0, set.dt, x1)?;
    let b = Trajectory::new("sx2", t0, set.dt, x2)?;
    let cval = pearson(&a, &b, &WindowSpec::new(kw as f64 * set.dt), t0)?;
    let rho = rho_mi.ok_or_else(|| Error::Internal("MI time not reached".into()))?;
    Ok(CellResult {
        pearson: cval,
        z_integral: z_int,
        mutual_information: mutual_information(&rho, &[0], EntropyKind::VonNeumann)?,
        concurrence: concurrence(&rho)?,
        near_degenerate: dyns.near_degenerate(),
    })
}

pub const DIAGRAM_LAYERS: [&str; 4] = ["C", "Z_I", "MI", "E"];

/// `p1 = ω₂`, `p2 = λ`; other parameters from `template`.
pub fn diagram(template: &SpinModelSpec, omega2: Vec<f64>, lambda: Vec<f64>, set: &DiagramSettings) -> SweepGrid {
    SweepGrid::evaluate("omega2", omega2, "lambda", lambda, &DIAGRAM_LAYERS, |_, _, w2, l| {
        let spec = SpinModelSpec { omega2: w2, lambda: l, ..*template };
        match diagram_cell(&spec, set) {
            Ok(r) => {
                let status = if r.near_degenerate {
                    CellStatus::Flagged("near-degenerate spectrum".into())
                } else {
                    CellStatus::Ok
                };
                (vec![r.pearson, r.z_integral, r.mutual_information, r.concurrence], status)
            }
            Err(Error::DegenerateSpectrum(_)) => (vec![], CellStatus::Flagged("degenerate spectrum".into())),
            Err(e) => (vec![], CellStatus::Failed(e.to_string())),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(w2: f64, lambda: f64, asym: f64) -> SpinModelSpec {
        SpinModelSpec { omega2: w2, lambda, asym, ..SpinModelSpec::default() }
    }

    #[test]
    fn decoupled_energies() {
        let sp = diagonalize(&spec(0.75, 0.0, 0.0)).unwrap();
        assert!((sp.e1 - 1.0).abs() < 1e-12 && (sp.e2 - 0.75).abs() < 1e-12);
    }

    #[test]
    fn resonant_energies() {
        let sp = diagonalize(&spec(1.0, 0.11, 0.0)).unwrap();
        let a = 0.5 * (4.0f64 + 4.0 * 0.0121).sqrt();
        assert!((sp.e1 - (a + 0.11)).abs() < 1e-12);
        assert!((sp.e1 - 1.11603).abs() < 1e-5 && (sp.e2 - 0.89603).abs() < 1e-5);
    }

    #[test]
    fn degenerate_spectrum_refused() {
        assert!(matches!(diagonalize(&spec(1.0, 0.0, 1.0)), Err(Error::DegenerateSpectrum(_))));
        let g = diagram(&spec(1.0, 0.0, 1.0), vec![1.0, 1.1], vec![0.0], &DiagramSettings { t_eval: 5.0, window: 2.0, z_until: 5.0, mi_at: 5.0, dt: 0.01 });
        assert_eq!(g.cell(0, 0).status, CellStatus::Flagged("degenerate spectrum".into()));
        assert!(g.cell(0, 0).values[0].is_nan() && g.cell(1, 0).values[0].is_finite());
    }

    #[test]
    fn zero_temperature_has_no_absorption() {
        let s = spec(0.9, 0.1, 1.0);
        let j = secular_rates(&s, &diagonalize(&s).unwrap()).unwrap();
        assert_eq!(j.len(), 4);
        assert!(j.iter().filter(|j| !j.emission).all(|j| j.rate == 0.0));
    }

    #[test]
    fn common_resonant_bath_has_dark_state() {
        let s = spec(1.0, 0.1, 1.0);
        let sp = diagonalize(&s).unwrap();
        // The singlet sits at -b and decouples from a symmetric bath.
        assert_eq!(dark_states(&s, &sp), vec![1]);
        assert!(sp.sectors.iter().all(|x| x.weight > 0.1));
        let local = spec(1.0, 0.1, 0.0);
        assert!(dark_states(&local, &diagonalize(&local).unwrap()).is_empty());
    }

    #[test]
    fn rates_linear_in_alpha() {
        let mut s = spec(0.9, 0.1, 0.5);
        s.temperature = 0.3;
        let r1 = secular_rates(&s, &diagonalize(&s).unwrap()).unwrap();
        s.bath.alpha *= 3.0;
        let r3 = secular_rates(&s, &diagonalize(&s).unwrap()).unwrap();
        for (a, b) in r1.iter().zip(&r3) {
            assert!((3.0 * a.rate - b.rate).abs() < 1e-14);
        }
    }

    #[test]
    fn free_precession() {
        let mut s = spec(0.8, 0.0, 0.0);
        s.bath.alpha = 0.0;
        let states = evolve_rho(&default_initial_state(), &s, 0.01, 20.0, 10).unwrap();
        let tr = observable_traj(&states, 0.0, 0.1, 0, &LocalOperatorCoeffs::sigma_x()).unwrap();
        for (i, v) in tr.values.iter().enumerate() {
            assert!((v - (tr.time(i)).cos()).abs() < 1e-8);
        }
        let tr2 = observable_traj(&states, 0.0, 0.1, 1, &LocalOperatorCoeffs::sigma_x()).unwrap();
        assert!((tr2.values[100] - (0.8f64 * 10.0).cos()).abs() < 1e-8);
        let id = LocalOperatorCoeffs { a_d: 1.0, ..Default::default() };
        assert!(observable_traj(&states, 0.0, 0.1, 1, &id).unwrap().values.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn sigma_z_on_up() {
        let up = DensityMatrix::pure(vec![2, 2], &[c(1.0), c(0.0), c(0.0), c(0.0)]).unwrap();
        let t = observable_traj(&[up], 0.0, 1.0, 0, &LocalOperatorCoeffs::sigma_z()).unwrap();
        assert!((t.values[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn step_guard() {
        assert!(matches!(SpinDynamics::new(&spec(0.9, 0.1, 0.0), 0.1), Err(Error::Config(_))));
    }
}
