//! Synchronization indicators and correlation quantifiers.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::statecore::{
    symplectic_eigenvalues, DensityMatrix, EntropyKind, GaussianState, QuantumState, Trajectory,
};
use crate::C64;

/// Sliding-window placement: `width` in model time, `delay` applied to the
/// second signal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub width: f64,
    #[serde(default)]
    pub delay: f64,
}

impl WindowSpec {
    pub fn new(width: f64) -> Self {
        Self { width, delay: 0.0 }
    }

    pub fn delayed(width: f64, delay: f64) -> Self {
        Self { width, delay }
    }
}

/// Uniformly sampled indicator values; `None` marks points where the
/// indicator is undefined (degenerate window, undefined phase, ...).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorSeries {
    pub name: String,
    pub t0: f64,
    pub dt: f64,
    pub values: Vec<Option<f64>>,
}

impl IndicatorSeries {
    pub fn new(name: impl Into<String>, t0: f64, dt: f64, values: Vec<Option<f64>>) -> Self {
        Self { name: name.into(), t0, dt, values }
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

    /// `(t, value)` for every valid point.
    pub fn valid(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().enumerate().filter_map(|(i, v)| v.map(|x| (self.time(i), x)))
    }

    pub fn n_invalid(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }

    /// Valid values with `lo <= t <= hi`.
    pub fn values_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        let eps = 1e-9 * self.dt;
        self.valid().filter(|&(t, _)| t >= lo - eps && t <= hi + eps).map(|(_, v)| v).collect()
    }

    pub fn mean_in(&self, lo: f64, hi: f64) -> Option<f64> {
        let v = self.values_in(lo, hi);
        (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
    }

    pub fn value_at(&self, t: f64) -> Option<f64> {
        let k = ((t - self.t0) / self.dt).round();
        if k < 0.0 {
            return None;
        }
        self.values.get(k as usize).copied().flatten()
    }
}

fn window_samples(dt: f64, w: &WindowSpec) -> Result<usize> {
    if !(w.width >= 2.0 * dt * (1.0 - 1e-9)) {
        return Err(Error::Argument(format!("window width {} shorter than 2 dt = {}", w.width, 2.0 * dt)));
    }
    if !(w.delay >= 0.0) {
        return Err(Error::Argument(format!("window delay must be >= 0, got {}", w.delay)));
    }
    let x = w.width / dt;
    let n = x.round();
    if (x - n).abs() > 1e-6 {
        return Err(Error::Argument(format!("window width {} is not a multiple of dt = {dt}", w.width)));
    }
    Ok(n as usize)
}

fn check_same_dt(a: &Trajectory, b: &Trajectory) -> Result<()> {
    if (a.dt - b.dt).abs() > 1e-12 * a.dt.max(b.dt) {
        return Err(Error::Argument(format!("trajectories have different dt ({} vs {})", a.dt, b.dt)));
    }
    Ok(())
}

fn window_start(tr: &Trajectory, t: f64, n: usize) -> Result<usize> {
    let uncovered = || Error::Range { start: t, end: t + n as f64 * tr.dt, t0: tr.t0, t1: tr.t_end() };
    let x = (t - tr.t0) / tr.dt;
    let k = x.round();
    if (x - k).abs() > 1e-6 {
        return Err(Error::Argument(format!("window start {t} is not on the sampling grid")));
    }
    if k < 0.0 || k as usize + n >= tr.len() {
        return Err(uncovered());
    }
    Ok(k as usize)
}

/// Trapezoid-weighted correlation of two equal-length windows.
fn weighted_corr(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len();
    let w = |i: usize| if i == 0 || i + 1 == n { 0.5 } else { 1.0 };
    let sw: f64 = (0..n).map(w).sum();
    let mx = (0..n).map(|i| w(i) * x[i]).sum::<f64>() / sw;
    let my = (0..n).map(|i| w(i) * y[i]).sum::<f64>() / sw;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let dx = x[i] - mx;
        let dy = y[i] - my;
        sxy += w(i) * dx * dy;
        sxx += w(i) * dx * dx;
        syy += w(i) * dy * dy;
    }
    let floor = |v: &[f64], m: f64| {
        let scale = v.iter().fold(m.abs(), |a, &z| a.max(z.abs()));
        sw * (1e-13 * scale).powi(2)
    };
    if sxx <= floor(x, mx) {
        return Err(Error::Degenerate("first signal has zero variance in window".into()));
    }
    if syy <= floor(y, my) {
        return Err(Error::Degenerate("second signal has zero variance in window".into()));
    }
    let c = sxy / (sxx * syy).sqrt();
    if c.abs() > 1.0 + 1e-9 {
        return Err(Error::Internal(format!("correlation {c} outside [-1, 1]")));
    }
    Ok(c.clamp(-1.0, 1.0))
}

/// Windowed Pearson coefficient of `a` on `[t, t+Δt]` against `b` on
/// `[t+τ, t+τ+Δt]`, with trapezoidal window averages.
pub fn pearson(a: &Trajectory, b: &Trajectory, w: &WindowSpec, t: f64) -> Result<f64> {
    check_same_dt(a, b)?;
    let n = window_samples(a.dt, w)?;
    let ia = window_start(a, t, n)?;
    let ib = window_start(b, t + w.delay, n)?;
    weighted_corr(&a.values[ia..=ia + n], &b.values[ib..=ib + n])
}

/// Pearson coefficient for every window start on the grid of `a`, taking
/// every `stride`-th sample as a start. Degenerate windows become `None`.
pub fn pearson_series(a: &Trajectory, b: &Trajectory, w: &WindowSpec, stride: usize) -> Result<IndicatorSeries> {
    check_same_dt(a, b)?;
    let n = window_samples(a.dt, w)?;
    let stride = stride.max(1);
    let lag = w.delay / a.dt;
    if (lag - lag.round()).abs() > 1e-6 {
        return Err(Error::Argument(format!("delay {} is not a multiple of dt", w.delay)));
    }
    let lag = lag.round() as i64;
    let offset = ((a.t0 - b.t0) / a.dt).round() as i64 + lag;
    let mut values = Vec::new();
    let mut ia = 0usize;
    while ia + n < a.len() {
        let ib = ia as i64 + offset;
        if ib >= 0 && (ib as usize) + n < b.len() {
            let ib = ib as usize;
            values.push(match weighted_corr(&a.values[ia..=ia + n], &b.values[ib..=ib + n]) {
                Ok(c) => Some(c),
                Err(Error::Degenerate(_)) => None,
                Err(e) => return Err(e),
            });
        } else if ib >= 0 {
            break;
        } else {
            values.push(None);
        }
        ia += stride;
    }
    if values.is_empty() {
        return Err(Error::Range { start: a.t0, end: a.t0 + w.width, t0: a.t0, t1: a.t_end() });
    }
    Ok(IndicatorSeries::new(
        format!("pearson({},{})", a.name, b.name),
        a.t0,
        a.dt * stride as f64,
        values,
    ))
}

fn check_mode_pair(state: &GaussianState, modes: (usize, usize)) -> Result<()> {
    let n = state.n_modes();
    if modes.0 >= n || modes.1 >= n || modes.0 == modes.1 {
        return Err(Error::Argument(format!("mode pair {modes:?} invalid for {n} modes")));
    }
    Ok(())
}

/// `(⟨q_−²⟩, ⟨p_−²⟩)` for `x_− = (x_i − x_j)/√2`.
fn relative_moments(state: &GaussianState, modes: (usize, usize), centered: bool) -> (f64, f64) {
    let m = |i: usize, j: usize| {
        if centered {
            state.cov()[(i, j)]
        } else {
            state.second_moment(i, j)
        }
    };
    let (a, b) = (2 * modes.0, 2 * modes.1);
    let q = 0.5 * (m(a, a) + m(b, b) - 2.0 * m(a, b));
    let p = 0.5 * (m(a + 1, a + 1) + m(b + 1, b + 1) - 2.0 * m(a + 1, b + 1));
    (q, p)
}

/// Synchronization error `S_c = 1/⟨q_−² + p_−²⟩`. With `centered` the first
/// moments are removed and only fluctuations count.
pub fn sync_error_sc(state: &GaussianState, modes: (usize, usize), centered: bool) -> Result<f64> {
    check_mode_pair(state, modes)?;
    let (q, p) = relative_moments(state, modes, centered);
    let sum = q + p;
    if !(sum > 0.0) {
        return Err(Error::Internal(format!("non-positive relative second moments {sum}")));
    }
    let sc = 1.0 / sum;
    let bound = 1.0 / (2.0 * (q * p).sqrt());
    if sc > bound * (1.0 + 1e-9) || bound > 1.0 + 1e-9 {
        return Err(Error::Internal(format!("S_c = {sc} violates uncertainty bound chain (bound {bound})")));
    }
    Ok(sc)
}

/// The uncertainty-limited upper bound `1/(2√(⟨q_−²⟩⟨p_−²⟩))` on `S_c`.
pub fn sync_error_bound(state: &GaussianState, modes: (usize, usize), centered: bool) -> Result<f64> {
    check_mode_pair(state, modes)?;
    let (q, p) = relative_moments(state, modes, centered);
    Ok(1.0 / (2.0 * (q * p).sqrt()))
}

pub const DEFAULT_R_MIN: f64 = 1.0;

/// Phase synchronization `S_p = 1/(2⟨p′_−²⟩)`, where each mode's fluctuation
/// quadratures are rotated onto the phase of its mean amplitude.
pub fn phase_sync_sp(
    mean1: C64,
    mean2: C64,
    fluct: &GaussianState,
    modes: (usize, usize),
    r_min: f64,
) -> Result<f64> {
    check_mode_pair(fluct, modes)?;
    for m in [mean1, mean2] {
        if m.norm() < r_min {
            return Err(Error::UndefinedPhase { amplitude: m.norm(), r_min });
        }
    }
    let (s1, c1) = mean1.arg().sin_cos();
    let (s2, c2) = mean2.arg().sin_cos();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let idx = [2 * modes.0, 2 * modes.0 + 1, 2 * modes.1, 2 * modes.1 + 1];
    let v = [-s1 * h, c1 * h, s2 * h, -c2 * h];
    let cov = fluct.cov();
    let mut var = 0.0;
    for (a, &ia) in idx.iter().enumerate() {
        for (b, &ib) in idx.iter().enumerate() {
            var += v[a] * cov[(ia, ib)] * v[b];
        }
    }
    if !(var > 0.0) {
        return Err(Error::Internal(format!("non-positive rotated variance {var}")));
    }
    Ok(1.0 / (2.0 * var))
}

/// `I = S(A) + S(B) − S(AB)` with `B` the complement of `part_a`.
pub fn mutual_information<S: QuantumState>(state: &S, part_a: &[usize], kind: EntropyKind) -> Result<f64> {
    let n = state.n_subsystems();
    let part_b: Vec<usize> = (0..n).filter(|i| !part_a.contains(i)).collect();
    let sa = state.partial_reduce(part_a)?.entropy(kind)?;
    let sb = state.partial_reduce(&part_b)?.entropy(kind)?;
    let sab = state.entropy(kind)?;
    Ok((sa + sb - sab).max(0.0))
}

fn entropy2(m: [[C64; 2]; 2]) -> f64 {
    let tr = m[0][0].re + m[1][1].re;
    if tr <= 0.0 {
        return 0.0;
    }
    let a = m[0][0].re / tr;
    let d = m[1][1].re / tr;
    let b = m[0][1].norm() / tr;
    let disc = ((a - d).powi(2) + 4.0 * b * b).sqrt();
    linalg::shannon([(1.0 + disc) / 2.0, (1.0 - disc) / 2.0])
}

/// Average conditional entropy of the unmeasured qubit after a projective
/// measurement along Bloch direction (θ, φ) on `measured`.
fn conditional_entropy(rho: &DMatrix<C64>, measured: usize, theta: f64, phi: f64) -> f64 {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let n = [st * cp, st * sp, ct];
    let mut total = 0.0;
    for sign in [1.0, -1.0] {
        // Π = (I + s n·σ)/2, entries Π[x][y].
        let pi = [
            [C64::new(0.5 * (1.0 + sign * n[2]), 0.0), C64::new(0.5 * sign * n[0], -0.5 * sign * n[1])],
            [C64::new(0.5 * sign * n[0], 0.5 * sign * n[1]), C64::new(0.5 * (1.0 - sign * n[2]), 0.0)],
        ];
        // Unnormalized conditional state of the other qubit:
        // σ[i][j] = Σ_{x,y} Π[y][x] ρ[(i,x),(j,y)] for measured = 1, mirrored otherwise.
        let mut sigma = [[C64::new(0.0, 0.0); 2]; 2];
        for (i, row) in sigma.iter_mut().enumerate() {
            for (j, s) in row.iter_mut().enumerate() {
                for x in 0..2 {
                    for y in 0..2 {
                        let (r, c) = if measured == 1 { (2 * i + x, 2 * j + y) } else { (2 * x + i, 2 * y + j) };
                        *s += pi[y][x] * rho[(r, c)];
                    }
                }
            }
        }
        let p = sigma[0][0].re + sigma[1][1].re;
        if p > 1e-14 {
            total += p * entropy2(sigma);
        }
    }
    total
}

/// Derivative-free simplex minimization in two variables.
pub fn nelder_mead_2d(f: impl Fn(f64, f64) -> f64, x0: [f64; 2], step: f64, tol: f64, max_iter: usize) -> ([f64; 2], f64) {
    let mut pts = [x0, [x0[0] + step, x0[1]], [x0[0], x0[1] + step]];
    let mut vals = pts.map(|p| f(p[0], p[1]));
    for _ in 0..max_iter {
        let mut order = [0usize, 1, 2];
        order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
        pts = order.map(|i| pts[i]);
        vals = order.map(|i| vals[i]);
        if (vals[2] - vals[0]).abs() < tol {
            break;
        }
        let c = [(pts[0][0] + pts[1][0]) / 2.0, (pts[0][1] + pts[1][1]) / 2.0];
        let along = |t: f64| [c[0] + t * (pts[2][0] - c[0]), c[1] + t * (pts[2][1] - c[1])];
        let xr = along(-1.0);
        let fr = f(xr[0], xr[1]);
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = f(xe[0], xe[1]);
            if fe < fr {
                pts[2] = xe;
                vals[2] = fe;
            } else {
                pts[2] = xr;
                vals[2] = fr;
            }
        } else if fr < vals[1] {
            pts[2] = xr;
            vals[2] = fr;
        } else {
            let xc = if fr < vals[2] { along(-0.5) } else { along(0.5) };
            let fc = f(xc[0], xc[1]);
            if fc < vals[2].min(fr) {
                pts[2] = xc;
                vals[2] = fc;
            } else {
                for k in 1..3 {
                    pts[k] = [(pts[0][0] + pts[k][0]) / 2.0, (pts[0][1] + pts[k][1]) / 2.0];
                    vals[k] = f(pts[k][0], pts[k][1]);
                }
            }
        }
    }
    let best = (0..3).min_by(|&i, &j| vals[i].total_cmp(&vals[j])).unwrap();
    (pts[best], vals[best])
}

fn check_qubit_pair(rho: &DensityMatrix) -> Result<()> {
    if rho.dims() != [2, 2] {
        return Err(Error::Argument(format!("expected a qubit pair, got dims {:?}", rho.dims())));
    }
    rho.validate()
}

/// Discord with projective measurements on qubit `measured` (0 or 1),
/// minimized over a 64×64 Bloch-angle grid followed by simplex refinement.
pub fn qubit_discord(rho: &DensityMatrix, measured: usize) -> Result<f64> {
    check_qubit_pair(rho)?;
    if measured > 1 {
        return Err(Error::Argument(format!("measured side must be 0 or 1, got {measured}")));
    }
    let m = rho.matrix();
    let s_meas = rho.partial_trace(&[measured])?.entropy(EntropyKind::VonNeumann)?;
    let s_ab = rho.entropy(EntropyKind::VonNeumann)?;
    let cond = |th: f64, ph: f64| conditional_entropy(m, measured, th, ph);

    const GRID: usize = 64;
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..GRID {
        let th = std::f64::consts::PI * i as f64 / (GRID - 1) as f64;
        for j in 0..GRID {
            let ph = 2.0 * std::f64::consts::PI * j as f64 / GRID as f64;
            let v = cond(th, ph);
            if v < best.0 {
                best = (v, th, ph);
            }
        }
    }
    let (_, refined) = nelder_mead_2d(cond, [best.1, best.2], 0.05, 1e-14, 500);
    let min_cond = refined.min(best.0);
    let d = s_meas - s_ab + min_cond;
    if d < -1e-6 {
        return Err(Error::Internal(format!("negative discord {d}")));
    }
    Ok(d.max(0.0))
}

/// Entropy of a thermal mode with symplectic eigenvalue `x/2`, i.e. `x` in
/// the vacuum-equals-one normalization.
fn f_unit(x: f64) -> f64 {
    if x <= 1.0 + 1e-12 {
        return 0.0;
    }
    let hi = (x + 1.0) / 2.0;
    let lo = (x - 1.0) / 2.0;
    hi * hi.ln() - lo * lo.ln()
}

/// Gaussian discord of a two-mode state with Gaussian measurements on mode
/// `measured`.
///
/// In the normalization where vacuum is the identity (`σ' = 2σ`), write
/// `σ' = [[A, C], [Cᵀ, B]]` with the measured mode in `B` and the invariants
/// `a = det A`, `b = det B`, `c = det C`, `d = det σ'`. The optimal Gaussian
/// measurement leaves mode A with conditional determinant `E_min`, which has
/// two branches depending on the sign of `(d − ab)² − (1 + b)c²(a + d)`.
/// The symplectic eigenvalues of σ' satisfy `ν±² = (Δ ± √(Δ² − 4d))/2` with
/// `Δ = a + b + 2c`. Then
/// `D = f(√b) − f(ν−) − f(ν+) + f(√E_min)`.
pub fn gaussian_discord(state: &GaussianState, measured: usize) -> Result<f64> {
    if state.n_modes() != 2 {
        return Err(Error::Argument(format!("Gaussian discord needs two modes, got {}", state.n_modes())));
    }
    if measured > 1 {
        return Err(Error::Argument(format!("measured mode must be 0 or 1, got {measured}")));
    }
    state.validate()?;
    let s = if measured == 1 { state.clone() } else { state.select_modes(&[1, 0])? };
    let sig = s.cov() * 2.0;
    let blk = |r: usize, c: usize| {
        let m = sig.view((r, c), (2, 2));
        m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
    };
    let a = blk(0, 0);
    let b = blk(2, 2);
    let c = blk(0, 2);
    let d = sig.determinant();

    let delta = a + b + 2.0 * c;
    let root = (delta * delta - 4.0 * d).max(0.0).sqrt();
    let nu_minus = ((delta - root) / 2.0).max(0.0).sqrt();
    let nu_plus = ((delta + root) / 2.0).max(0.0).sqrt();

    let e_min = if c.abs() < 1e-14 {
        a
    } else if (d - a * b).powi(2) <= (1.0 + b) * c * c * (a + d) {
        let inner = (c * c + (b - 1.0) * (d - a)).max(0.0);
        (2.0 * c * c + (b - 1.0) * (d - a) + 2.0 * c.abs() * inner.sqrt()) / (b - 1.0).powi(2)
    } else {
        let inner = (c.powi(4) + (d - a * b).powi(2) - 2.0 * c * c * (a * b + d)).max(0.0);
        (a * b - c * c + d - inner.sqrt()) / (2.0 * b)
    };
    let disc = f_unit(b.sqrt()) - f_unit(nu_minus) - f_unit(nu_plus) + f_unit(e_min.max(1.0).sqrt());
    if disc < -1e-6 {
        return Err(Error::Internal(format!("negative Gaussian discord {disc}")));
    }
    Ok(disc.max(0.0))
}

/// Wootters concurrence.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    check_qubit_pair(rho)?;
    let m = rho.matrix();
    let one = C64::new(1.0, 0.0);
    let mut yy = DMatrix::<C64>::zeros(4, 4);
    yy[(0, 3)] = -one;
    yy[(1, 2)] = one;
    yy[(2, 1)] = one;
    yy[(3, 0)] = -one;
    let tilde = &yy * m.map(|z| z.conj()) * &yy;
    let sq = linalg::sqrt_hermitian(m);
    let mut r = &sq * tilde * &sq;
    r = (&r + r.adjoint()) * C64::new(0.5, 0.0);
    let mut lam: Vec<f64> = linalg::hermitian_eigenvalues(&r).into_iter().map(|x| x.max(0.0).sqrt()).collect();
    lam.sort_by(|a, b| b.total_cmp(a));
    Ok((lam[0] - lam[1] - lam[2] - lam[3]).clamp(0.0, 1.0))
}

/// Logarithmic negativity from the partially transposed covariance
/// (`p₂ → −p₂`).
pub fn log_negativity(state: &GaussianState) -> Result<f64> {
    if state.n_modes() != 2 {
        return Err(Error::Argument(format!("log-negativity needs two modes, got {}", state.n_modes())));
    }
    let p = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, 1.0, -1.0]));
    let pt = &p * state.cov() * &p;
    let nu = symplectic_eigenvalues(&pt)?;
    let min = nu[nu.len() - 1];
    Ok((-(2.0 * min).ln()).max(0.0))
}

/// `Z = ⟨σ₁⁺σ₂⁻ + σ₂⁺σ₁⁻⟩ = 2 Re ρ_{↑↓,↓↑}`.
pub fn spin_z(rho: &DensityMatrix) -> Result<f64> {
    if rho.dims() != [2, 2] {
        return Err(Error::Argument(format!("expected a qubit pair, got dims {:?}", rho.dims())));
    }
    let m = rho.matrix();
    Ok((m[(1, 2)] + m[(2, 1)]).re)
}

/// Normalized intensity correlation `⟨n_a n_b⟩/(⟨n_a⟩⟨n_b⟩)` of a two-mode
/// Gaussian state.
pub fn g2_intensity(state: &GaussianState) -> Result<f64> {
    if state.n_modes() != 2 {
        return Err(Error::Argument(format!("g2 needs two modes, got {}", state.n_modes())));
    }
    let mu = state.mean();
    let s = state.cov();
    let e2 = |i: usize| s[(i, i)] + mu[i] * mu[i];
    // Isserlis with displacements: E[u²v²] = E[u²]E[v²] + 2S_uv² + 4μ_uμ_v S_uv.
    let e22 = |u: usize, v: usize| e2(u) * e2(v) + 2.0 * s[(u, v)].powi(2) + 4.0 * mu[u] * mu[v] * s[(u, v)];
    let qa = e2(0) + e2(1);
    let qb = e2(2) + e2(3);
    let na = 0.5 * (qa - 1.0);
    let nb = 0.5 * (qb - 1.0);
    if na <= 1e-9 || nb <= 1e-9 {
        return Err(Error::Degenerate(format!("mean occupations too small ({na:e}, {nb:e})")));
    }
    let qaqb: f64 = [0, 1].iter().flat_map(|&u| [2, 3].map(move |v| (u, v))).map(|(u, v)| e22(u, v)).sum();
    let nanb = 0.25 * (qaqb - qa - qb + 1.0);
    Ok(nanb / (na * nb))
}

/// Kuramoto order parameter `(r, ψ)` with `r e^{iψ} = ⟨e^{iθ}⟩`, ψ ∈ (−π, π].
pub fn kuramoto_order(phases: &[f64]) -> Result<(f64, f64)> {
    if phases.is_empty() {
        return Err(Error::Argument("order parameter of an empty phase set".into()));
    }
    let n = phases.len() as f64;
    let (s, c) = phases.iter().fold((0.0, 0.0), |(s, c), th| {
        let (a, b) = th.sin_cos();
        (s + a, c + b)
    });
    let (s, c) = (s / n, c / n);
    let r = (s * s + c * c).sqrt().min(1.0);
    let mut psi = s.atan2(c);
    if psi <= -std::f64::consts::PI {
        psi += 2.0 * std::f64::consts::PI;
    }
    Ok((r, psi))
}

/// `|mean(second half) − mean(first half)| / |mean|`; zero for an all-zero
/// series.
pub fn relative_drift(x: &[f64]) -> Result<f64> {
    if x.len() < 2 {
        return Err(Error::Argument("drift needs at least two samples".into()));
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let h = x.len() / 2;
    let (a, b, m) = (mean(&x[..h]), mean(&x[h..]), mean(x));
    if m == 0.0 && a == 0.0 && b == 0.0 {
        return Ok(0.0);
    }
    Ok((b - a).abs() / m.abs())
}
