//! Two mechanically coupled optomechanical cells: classical limit cycles
//! of the mean fields plus linearized Gaussian fluctuations around them.
//!
//! In the laser frame, with `H = Δa†a + ωb†b + g a†a(b + b†) + iE(a − a†)`
//! per cell and `H_int = μ(b₁b₂† + b₁†b₂)`, the mean fields obey
//!
//! ```text
//! Ȧⱼ = −(iΔⱼ + κ)Aⱼ − igAⱼ(Bⱼ + Bⱼ*) + E
//! Ḃⱼ = −(iωⱼ + γ)Bⱼ − ig|Aⱼ|² − iμB₃₋ⱼ
//! ```
//!
//! Fluctuations `δaⱼ, δbⱼ` follow `δȧ = P δa + Q δa†` with, per cell,
//!
//! ```text
//! P[a,a] = −(iΔ + κ) − ig(B + B*)    P[a,b] = −igA    Q[a,b] = −igA
//! P[b,b] = −(iω + γ)                 P[b,a] = −igA*   Q[b,a] = −igA
//! P[b,b'] = −iμ   (b' the other cell's mechanics)
//! ```
//!
//! In quadratures `δa = (x + iy)/√2`, ordered `(a₁, b₁, a₂, b₂)`, the 8×8
//! drift has 2×2 blocks
//!
//! ```text
//! M[k,l] = [ Re(P+Q)   −Im(P−Q) ]
//!          [ Im(P+Q)    Re(P−Q) ]   (entries P[k,l], Q[k,l])
//! ```
//!
//! and the covariance obeys `σ̇ = Mσ + σMᵀ + D`, `D = diag(κ,κ,γ,γ,κ,κ,γ,γ)`
//! (vacuum input noise). `M` is also the Jacobian of the mean-field flow.

use nalgebra::{DMatrix, DVector, SMatrix, SVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{
    gaussian_discord, log_negativity, mutual_information, pearson_series, phase_sync_sp, sync_error_sc,
    IndicatorSeries, WindowSpec, DEFAULT_R_MIN,
};
use crate::statecore::{EntropyKind, GaussianState, Trajectory};
use crate::C64;

pub type M8 = SMatrix<f64, 8, 8>;

/// Mechanical quadrature indices `(q₁, p₁, q₂, p₂)` in the fluctuation vector.
pub const MECH_QUADRATURES: [usize; 4] = [2, 3, 6, 7];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptomechSpec {
    pub omega: [f64; 2],
    pub detuning: [f64; 2],
    pub g: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub drive: f64,
    pub mu: f64,
    pub initial_a: [C64; 2],
    pub initial_b: [C64; 2],
    /// Initial covariance as a multiple of the vacuum (`σ(0) = scale/2 · 𝟙`).
    pub cov_scale: f64,
    /// Optional squeezing parameter applied to each mechanical mode at t = 0.
    pub mech_squeezing: f64,
    pub blowup: f64,
}

impl OptomechSpec {
    /// Synchronizing set: ω₂ = 1.005.
    pub fn fig3() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            omega: [1.0, 1.005],
            detuning: [-1.0, -1.005],
            g: 0.005,
            kappa: 0.15,
            gamma: 0.005,
            drive: 48.0,
            mu: -0.02,
            initial_a: [C64::new(0.0, 0.0); 2],
            initial_b: [C64::new(100.0 * h, 0.0), C64::new(-100.0 * h, 0.0)],
            cov_scale: 100.0,
            mech_squeezing: 0.0,
            blowup: 1e6,
        }
    }

    /// Detuned set: ω₂ = 1.2.
    pub fn fig4() -> Self {
        Self { omega: [1.0, 1.2], detuning: [-1.0, -1.2], ..Self::fig3() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0 && self.gamma > 0.0) {
            return Err(Error::Argument("kappa and gamma must be positive".into()));
        }
        if !(self.drive >= 0.0) {
            return Err(Error::Argument("drive E must be >= 0".into()));
        }
        if !(self.cov_scale >= 1.0) || !(self.blowup > 0.0) {
            return Err(Error::Argument("cov_scale must be >= 1 and blowup > 0".into()));
        }
        let finite = self.omega.iter().chain(&self.detuning).chain([&self.g, &self.mu, &self.mech_squeezing]);
        if finite.into_iter().any(|x| !x.is_finite()) {
            return Err(Error::Argument("optomechanical parameters must be finite".into()));
        }
        Ok(())
    }

    pub fn diffusion(&self) -> M8 {
        let (k, g) = (self.kappa, self.gamma);
        M8::from_diagonal(&SVector::<f64, 8>::from([k, k, g, g, k, k, g, g]))
    }

    pub fn initial_cov(&self) -> M8 {
        let mut c = M8::identity() * (0.5 * self.cov_scale);
        let r = self.mech_squeezing;
        for m in [2, 6] {
            c[(m, m)] *= (-2.0 * r).exp();
            c[(m + 1, m + 1)] *= (2.0 * r).exp();
        }
        c
    }
}

impl Default for OptomechSpec {
    fn default() -> Self {
        Self::fig3()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanFieldState {
    pub a: [C64; 2],
    pub b: [C64; 2],
}

impl MeanFieldState {
    fn to_vec(self) -> SVector<f64, 8> {
        let z = [self.a[0], self.b[0], self.a[1], self.b[1]];
        SVector::from_fn(|i, _| if i % 2 == 0 { z[i / 2].re } else { z[i / 2].im })
    }

    fn from_vec(v: &SVector<f64, 8>) -> Self {
        let z = |k: usize| C64::new(v[2 * k], v[2 * k + 1]);
        Self { a: [z(0), z(2)], b: [z(1), z(3)] }
    }

    fn axpy(&self, h: f64, d: &Self) -> Self {
        Self {
            a: [self.a[0] + d.a[0] * h, self.a[1] + d.a[1] * h],
            b: [self.b[0] + d.b[0] * h, self.b[1] + d.b[1] * h],
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().chain(&self.b).map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.a.iter().chain(&self.b).all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Mechanical quadrature means `(q₁, p₁, q₂, p₂)`.
    pub fn mech_quadratures(&self) -> [f64; 4] {
        let s = std::f64::consts::SQRT_2;
        [s * self.b[0].re, s * self.b[0].im, s * self.b[1].re, s * self.b[1].im]
    }
}

pub fn mean_field_rhs(s: &MeanFieldState, spec: &OptomechSpec) -> MeanFieldState {
    let i = C64::new(0.0, 1.0);
    let mut d = MeanFieldState { a: [C64::new(0.0, 0.0); 2], b: [C64::new(0.0, 0.0); 2] };
    for j in 0..2 {
        let (a, b) = (s.a[j], s.b[j]);
        d.a[j] = -(i * spec.detuning[j] + spec.kappa) * a - i * spec.g * a * (b + b.conj()) + spec.drive;
        d.b[j] = -(i * spec.omega[j] + spec.gamma) * b - i * spec.g * a.norm_sqr() - i * spec.mu * s.b[1 - j];
    }
    d
}

/// Drift of the quadrature fluctuations about `s`; see the module docs.
pub fn drift_matrix(s: &MeanFieldState, spec: &OptomechSpec) -> M8 {
    let i = C64::new(0.0, 1.0);
    let z = C64::new(0.0, 0.0);
    let mut p = SMatrix::<C64, 4, 4>::from_element(z);
    let mut q = SMatrix::<C64, 4, 4>::from_element(z);
    for j in 0..2 {
        let (ia, ib, ibo) = (2 * j, 2 * j + 1, 3 - 2 * j);
        let (a, b) = (s.a[j], s.b[j]);
        p[(ia, ia)] = -(i * spec.detuning[j] + spec.kappa) - i * spec.g * (b + b.conj());
        p[(ia, ib)] = -i * spec.g * a;
        q[(ia, ib)] = -i * spec.g * a;
        p[(ib, ib)] = -(i * spec.omega[j] + spec.gamma);
        p[(ib, ia)] = -i * spec.g * a.conj();
        q[(ib, ia)] = -i * spec.g * a;
        p[(ib, ibo)] = -i * spec.mu;
    }
    let mut m = M8::zeros();
    for k in 0..4 {
        for l in 0..4 {
            let (s_, d_) = (p[(k, l)] + q[(k, l)], p[(k, l)] - q[(k, l)]);
            m[(2 * k, 2 * l)] = s_.re;
            m[(2 * k, 2 * l + 1)] = -d_.im;
            m[(2 * k + 1, 2 * l)] = s_.im;
            m[(2 * k + 1, 2 * l + 1)] = d_.re;
        }
    }
    m
}

/// Newton-refined fixed point of the mean-field flow; the drift matrix is
/// its exact Jacobian.
pub fn fixed_point(spec: &OptomechSpec, guess: &MeanFieldState) -> Result<MeanFieldState> {
    spec.validate()?;
    let mut x = *guess;
    for _ in 0..100 {
        let f = mean_field_rhs(&x, spec).to_vec();
        let scale = 1.0 + x.max_abs();
        if f.norm() < 1e-12 * scale {
            return Ok(x);
        }
        let j = drift_matrix(&x, spec);
        let dx = j.lu().solve(&(-f)).ok_or_else(|| Error::Degenerate("singular Jacobian in Newton step".into()))?;
        x = MeanFieldState::from_vec(&(x.to_vec() + dx));
        if !x.is_finite() {
            return Err(Error::Degenerate("Newton iteration diverged".into()));
        }
    }
    Err(Error::Degenerate("Newton iteration did not converge".into()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptomechRun {
    pub spec: OptomechSpec,
    pub times: Vec<f64>,
    pub means: Vec<MeanFieldState>,
    /// Zero-mean fluctuation states over `(a₁, b₁, a₂, b₂)`.
    pub fluct: Vec<GaussianState>,
}

impl OptomechRun {
    pub fn dt(&self) -> f64 {
        if self.times.len() > 1 {
            self.times[1] - self.times[0]
        } else {
            0.0
        }
    }

    /// Two-mode mechanical state with quadrature means attached.
    pub fn mechanical_state(&self, k: usize) -> Result<GaussianState> {
        let f = &self.fluct[k];
        let cov = DMatrix::from_fn(4, 4, |r, c| f.cov()[(MECH_QUADRATURES[r], MECH_QUADRATURES[c])]);
        GaussianState::new_unchecked(DVector::from_row_slice(&self.means[k].mech_quadratures()), cov)
    }
}

fn lyapunov(m: &M8, c: &M8, d: &M8) -> M8 {
    m * c + c * m.transpose() + d
}

/// RK4 co-integration of means and covariance, recording every
/// `record_every` steps. On blow-up, an invalid state or a non-finite
/// value, returns the samples recorded so far together with the error.
pub fn co_integrate_partial(
    spec: &OptomechSpec,
    dt: f64,
    t_end: f64,
    record_every: usize,
) -> (OptomechRun, Option<Error>) {
    let mut run = OptomechRun { spec: *spec, times: vec![], means: vec![], fluct: vec![] };
    if let Err(e) = spec.validate() {
        return (run, Some(e));
    }
    let scale = spec.omega.iter().chain(&spec.detuning).fold(spec.kappa, |a, &x| a.max(x.abs()));
    if !(dt > 0.0) || !(dt * scale < 0.05) {
        return (run, Some(Error::Config(format!("dt·max(ω, |Δ|, κ) = {} must be below 0.05", dt * scale))));
    }
    let every = record_every.max(1);
    let steps = (t_end / dt).round() as usize;
    let d = spec.diffusion();
    let mut s = MeanFieldState { a: spec.initial_a, b: spec.initial_b };
    let mut c = spec.initial_cov();
    let f = |s: &MeanFieldState, c: &M8| (mean_field_rhs(s, spec), lyapunov(&drift_matrix(s, spec), c, &d));
    for k in 0..=steps {
        let t = k as f64 * dt;
        if !s.is_finite() || s.max_abs() > spec.blowup || !c.iter().all(|x| x.is_finite()) {
            return (run, Some(Error::Instability { t, what: format!("mean-field amplitude exceeded {}", spec.blowup) }));
        }
        if k % every == 0 {
            let cov = DMatrix::from_fn(8, 8, |r, q| 0.5 * (c[(r, q)] + c[(q, r)]));
            match GaussianState::new(DVector::zeros(8), cov) {
                Ok(g) => {
                    run.times.push(t);
                    run.means.push(s);
                    run.fluct.push(g);
                }
                Err(e) => return (run, Some(Error::Instability { t, what: format!("fluctuation state invalid: {e}") })),
            }
        }
        if k == steps {
            break;
        }
        let (a1, c1) = f(&s, &c);
        let (a2, c2) = f(&s.axpy(0.5 * dt, &a1), &(c + c1 * (0.5 * dt)));
        let (a3, c3) = f(&s.axpy(0.5 * dt, &a2), &(c + c2 * (0.5 * dt)));
        let (a4, c4) = f(&s.axpy(dt, &a3), &(c + c3 * dt));
        let h = dt / 6.0;
        s = s.axpy(h, &a1).axpy(2.0 * h, &a2).axpy(2.0 * h, &a3).axpy(h, &a4);
        c += (c1 + c2 * 2.0 + c3 * 2.0 + c4) * h;
    }
    (run, None)
}

pub fn co_integrate(spec: &OptomechSpec, dt: f64, t_end: f64, record_every: usize) -> Result<OptomechRun> {
    match co_integrate_partial(spec, dt, t_end, record_every) {
        (run, None) => Ok(run),
        (_, Some(e)) => Err(e),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorSuite {
    pub sc: IndicatorSeries,
    pub sc_centered: IndicatorSeries,
    pub sp: IndicatorSeries,
    pub pearson_q: IndicatorSeries,
    pub pearson_q2: IndicatorSeries,
    pub mi: IndicatorSeries,
    pub log_neg: IndicatorSeries,
    pub discord: IndicatorSeries,
}

impl IndicatorSuite {
    pub fn named(&self) -> [(&'static str, &IndicatorSeries); 8] {
        [
            ("sc", &self.sc),
            ("sc_centered", &self.sc_centered),
            ("sp", &self.sp),
            ("pearson_q", &self.pearson_q),
            ("pearson_q2", &self.pearson_q2),
            ("mi", &self.mi),
            ("log_neg", &self.log_neg),
            ("discord", &self.discord),
        ]
    }
}

pub const DEFAULT_WINDOW: f64 = 50.0;

/// All indicators on the mechanical pair. Pearson series are indexed by
/// window start. `S_p` is `None` where a mean amplitude is below `r_min`.
pub fn indicator_suite(run: &OptomechRun, window: f64, r_min: Option<f64>) -> Result<IndicatorSuite> {
    if run.times.len() < 2 {
        return Err(Error::Argument("run too short for indicators".into()));
    }
    let (t0, dt) = (run.times[0], run.dt());
    let r_min = r_min.unwrap_or(DEFAULT_R_MIN);
    let n = run.times.len();
    let (mut sc, mut scc, mut sp, mut mi, mut en, mut dis) =
        (vec![], vec![], vec![], vec![], vec![], vec![]);
    let (mut q1, mut q2, mut q1s, mut q2s) = (vec![], vec![], vec![], vec![]);
    for k in 0..n {
        let mech = run.mechanical_state(k)?;
        let centered = GaussianState::new_unchecked(DVector::zeros(4), mech.cov().clone())?;
        sc.push(Some(sync_error_sc(&mech, (0, 1), false)?));
        scc.push(Some(sync_error_sc(&mech, (0, 1), true)?));
        sp.push(match phase_sync_sp(run.means[k].b[0], run.means[k].b[1], &centered, (0, 1), r_min) {
            Ok(v) => Some(v),
            Err(Error::UndefinedPhase { .. }) => None,
            Err(e) => return Err(e),
        });
        mi.push(Some(mutual_information(&centered, &[0], EntropyKind::VonNeumann)?));
        en.push(Some(log_negativity(&centered)?));
        dis.push(Some(gaussian_discord(&centered, 1)?));
        let m = mech.mean();
        q1.push(m[0]);
        q2.push(m[2]);
        q1s.push(mech.second_moment(0, 0));
        q2s.push(mech.second_moment(2, 2));
    }
    let tr = |name: &str, v: Vec<f64>| Trajectory::new(name, t0, dt, v);
    let w = WindowSpec::new(window);
    let mut pq = pearson_series(&tr("q1", q1)?, &tr("q2", q2)?, &w, 1)?;
    pq.name = "pearson_q".into();
    let mut pq2 = pearson_series(&tr("q1sq", q1s)?, &tr("q2sq", q2s)?, &w, 1)?;
    pq2.name = "pearson_q2".into();
    let series = |name: &str, v| IndicatorSeries::new(name, t0, dt, v);
    Ok(IndicatorSuite {
        sc: series("sc", sc),
        sc_centered: series("sc_centered", scc),
        sp: series("sp", sp),
        pearson_q: pq,
        pearson_q2: pq2,
        mi: series("mi", mi),
        log_neg: series("log_neg", en),
        discord: series("discord", dis),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quiet() -> OptomechSpec {
        OptomechSpec { g: 0.0, mu: 0.0, ..OptomechSpec::fig3() }
    }

    #[test]
    fn free_decay_without_drive() {
        let spec = OptomechSpec { drive: 0.0, initial_a: [C64::new(3.0, 1.0); 2], ..quiet() };
        let run = co_integrate(&spec, 0.01, 10.0, 100).unwrap();
        let last = run.means.last().unwrap();
        let expect = |z0: C64, w: f64, k: f64| z0 * (-(C64::new(k, w)) * 10.0).exp();
        assert!((last.a[0] - expect(C64::new(3.0, 1.0), -1.0, 0.15)).norm() < 1e-8);
        assert!((last.b[1] - expect(spec.initial_b[1], 1.005, 0.005)).norm() < 1e-6);
    }

    #[test]
    fn linear_fixed_point() {
        let spec = quiet();
        let zero = MeanFieldState { a: [C64::new(0.0, 0.0); 2], b: [C64::new(0.0, 0.0); 2] };
        let fp = fixed_point(&spec, &zero).unwrap();
        for j in 0..2 {
            let a = C64::new(spec.drive, 0.0) / C64::new(spec.kappa, spec.detuning[j]);
            assert!((fp.a[j] - a).norm() < 1e-10);
            assert!(fp.b[j].norm() < 1e-12);
        }
    }

    #[test]
    fn drift_is_mean_field_jacobian() {
        let spec = OptomechSpec::fig3();
        let s = MeanFieldState {
            a: [C64::new(12.0, -30.0), C64::new(-4.0, 8.0)],
            b: [C64::new(50.0, 20.0), C64::new(-60.0, 5.0)],
        };
        let m = drift_matrix(&s, &spec);
        let x0 = s.to_vec();
        let h = 1e-5;
        for col in 0..8 {
            let mut xp = x0;
            let mut xm = x0;
            xp[col] += h;
            xm[col] -= h;
            let fp = mean_field_rhs(&MeanFieldState::from_vec(&xp), &spec).to_vec();
            let fm = mean_field_rhs(&MeanFieldState::from_vec(&xm), &spec).to_vec();
            let num = (fp - fm) / (2.0 * h);
            for row in 0..8 {
                assert!((num[row] - m[(row, col)]).abs() < 1e-6, "({row},{col})");
            }
        }
    }

    #[test]
    fn uncoupled_fluctuations_relax_to_vacuum() {
        let run = co_integrate(&quiet(), 0.01, 2000.0, 10000).unwrap();
        let cov = run.fluct.last().unwrap().cov();
        for r in 0..8 {
            for c in 0..8 {
                let want = if r == c { 0.5 } else { 0.0 };
                assert!((cov[(r, c)] - want).abs() < 1e-3, "({r},{c}) {}", cov[(r, c)]);
            }
        }
    }

    #[test]
    fn blowup_reports_time_and_keeps_samples() {
        let spec = OptomechSpec { blowup: 150.0, ..OptomechSpec::fig3() };
        let (run, err) = co_integrate_partial(&spec, 0.01, 1500.0, 10);
        match err {
            Some(Error::Instability { t, .. }) => {
                assert!(t > 0.0 && t < 1500.0);
                assert!(!run.times.is_empty() && *run.times.last().unwrap() <= t);
            }
            other => panic!("expected instability, got {other:?}"),
        }
    }

    #[test]
    fn step_guard() {
        assert!(matches!(co_integrate(&OptomechSpec::fig3(), 0.1, 1.0, 1), Err(Error::Config(_))));
    }
}
