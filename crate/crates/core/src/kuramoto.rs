//! Classical Kuramoto model and the two-unit phase equation.
//!
//! `θ̇ᵢ = ωᵢ + ξᵢ + (K/N) Σⱼ sin(θⱼ − θᵢ)`, written through the order
//! parameter as `θ̇ᵢ = ωᵢ + ξᵢ + K r sin(ψ − θᵢ)`. The coupling is attractive.
//! Noise is white with `⟨ξᵢ(t)ξⱼ(t′)⟩ = 2D δᵢⱼ δ(t − t′)`.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statecore::Trajectory;
use crate::sweep::derive_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FrequencyDist {
    /// `g(ω) = (γ/π) / ((ω − Ω)² + γ²)`.
    Lorentzian { center: f64, width: f64 },
    Gaussian { center: f64, std: f64 },
    Explicit { values: Vec<f64> },
}

impl FrequencyDist {
    /// Density at the center, `g(Ω)`.
    pub fn peak_density(&self) -> Option<f64> {
        match *self {
            FrequencyDist::Lorentzian { width, .. } => Some(1.0 / (PI * width)),
            FrequencyDist::Gaussian { std, .. } => Some(1.0 / (std * TAU.sqrt())),
            FrequencyDist::Explicit { .. } => None,
        }
    }

    /// Mean-field critical coupling `2/(π g(Ω))`.
    pub fn critical_coupling(&self) -> Option<f64> {
        self.peak_density().map(|g| 2.0 / (PI * g))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    /// Evenly spaced quantiles of the distribution (Lorentzian only).
    #[default]
    Quantile,
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KuramotoSpec {
    pub n: usize,
    pub dist: FrequencyDist,
    #[serde(default)]
    pub sampling: Sampling,
    pub k: f64,
    #[serde(default)]
    pub noise: f64,
    pub dt: f64,
    pub horizon: f64,
    /// Fraction of the run, at its end, over which `r` is averaged.
    #[serde(default = "default_average_fraction")]
    pub average_fraction: f64,
    #[serde(default = "default_record_every")]
    pub record_every: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_average_fraction() -> f64 {
    0.5
}

fn default_record_every() -> usize {
    10
}

impl KuramotoSpec {
    pub fn lorentzian(n: usize, width: f64, k: f64) -> Self {
        Self {
            n,
            dist: FrequencyDist::Lorentzian { center: 0.0, width },
            sampling: Sampling::Quantile,
            k,
            noise: 0.0,
            dt: 0.01,
            horizon: 200.0,
            average_fraction: default_average_fraction(),
            record_every: default_record_every(),
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Argument(format!("need N >= 2 oscillators, got {}", self.n)));
        }
        if !(self.dt > 0.0) || !(self.horizon > self.dt) {
            return Err(Error::Argument("dt must be > 0 and horizon > dt".into()));
        }
        if !(self.noise >= 0.0) || !self.k.is_finite() {
            return Err(Error::Argument("noise must be >= 0 and K finite".into()));
        }
        if !(self.average_fraction > 0.0 && self.average_fraction <= 1.0) {
            return Err(Error::Argument("average_fraction must lie in (0, 1]".into()));
        }
        match &self.dist {
            FrequencyDist::Lorentzian { width, .. } if !(*width > 0.0) => {
                Err(Error::Argument("Lorentzian width must be positive".into()))
            }
            FrequencyDist::Gaussian { std, .. } if !(*std > 0.0) => {
                Err(Error::Argument("Gaussian std must be positive".into()))
            }
            FrequencyDist::Gaussian { .. } if self.sampling == Sampling::Quantile => {
                Err(Error::Argument("quantile sampling is available for Lorentzian and explicit lists only".into()))
            }
            FrequencyDist::Explicit { values } if values.len() != self.n => Err(Error::Argument(format!(
                "explicit frequency list has {} entries for N = {}",
                values.len(),
                self.n
            ))),
            _ => Ok(()),
        }
    }

    pub fn frequencies(&self, rng: &mut impl Rng) -> Vec<f64> {
        let n = self.n;
        match (&self.dist, self.sampling) {
            (FrequencyDist::Explicit { values }, _) => values.clone(),
            (FrequencyDist::Lorentzian { center, width }, Sampling::Quantile) => (0..n)
                .map(|i| center + width * (PI * (i as f64 + 0.5) / n as f64 - PI / 2.0).tan())
                .collect(),
            (FrequencyDist::Lorentzian { center, width }, Sampling::Random) => {
                (0..n).map(|_| center + width * (PI * (rng.random::<f64>() - 0.5)).tan()).collect()
            }
            (FrequencyDist::Gaussian { center, std }, _) => {
                let d = Normal::new(*center, *std).expect("validated std");
                (0..n).map(|_| d.sample(rng)).collect()
            }
        }
    }
}

/// `(r, ψ)` plus `(cos θ, sin θ)` sums reused by the right-hand side.
fn order(theta: &[f64], cs: &mut [(f64, f64)]) -> (f64, f64) {
    let (mut c, mut s) = (0.0, 0.0);
    for (t, slot) in theta.iter().zip(cs.iter_mut()) {
        let (si, ci) = t.sin_cos();
        *slot = (ci, si);
        c += ci;
        s += si;
    }
    let n = theta.len() as f64;
    (c / n, s / n)
}

/// `θ̇ᵢ = ωᵢ + K (R_s cos θᵢ − R_c sin θᵢ)` with `R_c + iR_s = ⟨e^{iθ}⟩`.
fn rhs(theta: &[f64], omega: &[f64], k: f64, cs: &mut [(f64, f64)], out: &mut [f64]) {
    let (rc, rs) = order(theta, cs);
    for i in 0..theta.len() {
        let (ci, si) = cs[i];
        out[i] = omega[i] + k * (rs * ci - rc * si);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KuramotoRun {
    pub frequencies: Vec<f64>,
    pub times: Vec<f64>,
    pub r: Vec<f64>,
    pub psi: Vec<f64>,
    /// Phases at the recorded times (unwrapped).
    pub phases: Vec<Vec<f64>>,
    /// Time average of `r` over the final `average_fraction` of the run.
    pub r_mean: f64,
}

fn wrap_pi(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y > PI {
        y - TAU
    } else {
        y
    }
}

/// RK4 without noise, Euler–Maruyama with it. Initial phases are uniform on
/// `[0, 2π)`, drawn after the frequencies from the same seeded stream.
pub fn simulate(spec: &KuramotoSpec) -> Result<KuramotoRun> {
    simulate_inner(spec, true)
}

fn simulate_inner(spec: &KuramotoSpec, keep_phases: bool) -> Result<KuramotoRun> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let omega = spec.frequencies(&mut rng);
    let n = spec.n;
    let mut theta: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..TAU)).collect();
    let steps = (spec.horizon / spec.dt).round() as usize;
    let every = spec.record_every.max(1);
    let dt = spec.dt;
    let mut cs = vec![(0.0, 0.0); n];
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut tmp = vec![0.0; n];
    let mut run = KuramotoRun {
        frequencies: omega.clone(),
        times: vec![],
        r: vec![],
        psi: vec![],
        phases: vec![],
        r_mean: 0.0,
    };
    let avg_from = ((1.0 - spec.average_fraction) * steps as f64).round() as usize;
    let (mut acc, mut cnt) = (0.0, 0usize);
    let amp = (2.0 * spec.noise * dt).sqrt();
    for step in 0..=steps {
        let (rc, rs) = order(&theta, &mut cs);
        let r = (rc * rc + rs * rs).sqrt().min(1.0);
        if step >= avg_from {
            acc += r;
            cnt += 1;
        }
        if step % every == 0 {
            run.times.push(step as f64 * dt);
            run.r.push(r);
            run.psi.push(wrap_pi(rs.atan2(rc)));
            if keep_phases {
                run.phases.push(theta.clone());
            }
        }
        if step == steps {
            break;
        }
        if spec.noise > 0.0 {
            rhs(&theta, &omega, spec.k, &mut cs, &mut k1);
            for i in 0..n {
                let xi: f64 = StandardNormal.sample(&mut rng);
                theta[i] += k1[i] * dt + amp * xi;
            }
        } else {
            rhs(&theta, &omega, spec.k, &mut cs, &mut k1);
            for i in 0..n {
                tmp[i] = theta[i] + 0.5 * dt * k1[i];
            }
            rhs(&tmp, &omega, spec.k, &mut cs, &mut k2);
            for i in 0..n {
                tmp[i] = theta[i] + 0.5 * dt * k2[i];
            }
            rhs(&tmp, &omega, spec.k, &mut cs, &mut k3);
            for i in 0..n {
                tmp[i] = theta[i] + dt * k3[i];
            }
            rhs(&tmp, &omega, spec.k, &mut cs, &mut k4);
            for i in 0..n {
                theta[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
    }
    run.r_mean = acc / cnt as f64;
    Ok(run)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum KcOutcome {
    Crossing(f64),
    /// Already above threshold at the smallest K.
    BelowGrid,
    /// Never reaches the threshold.
    AboveGrid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KcEstimate {
    pub outcome: KcOutcome,
    pub ks: Vec<f64>,
    pub r_mean: Vec<f64>,
    pub threshold: f64,
    /// Half-width of the K interval over which the crossing moves when the
    /// threshold is shifted by the incoherent floor `1/√N`.
    pub finite_size_band: f64,
    pub warnings: Vec<String>,
}

impl KcEstimate {
    pub fn kc(&self) -> Option<f64> {
        match self.outcome {
            KcOutcome::Crossing(k) => Some(k),
            _ => None,
        }
    }
}

fn crossing(ks: &[f64], r: &[f64], thr: f64) -> KcOutcome {
    if r[0] >= thr {
        return KcOutcome::BelowGrid;
    }
    for i in 1..ks.len() {
        if r[i] >= thr {
            let f = (thr - r[i - 1]) / (r[i] - r[i - 1]);
            return KcOutcome::Crossing(ks[i - 1] + f * (ks[i] - ks[i - 1]));
        }
    }
    KcOutcome::AboveGrid
}

pub const DEFAULT_KC_THRESHOLD: f64 = 0.1;

/// Sweeps `ks` (ascending) in parallel, seeding point `i` with
/// `derive_seed(base.seed, i)`, and locates where `r̄` first crosses
/// `threshold` by linear interpolation.
pub fn estimate_kc(base: &KuramotoSpec, ks: &[f64], threshold: f64) -> Result<KcEstimate> {
    base.validate()?;
    if ks.len() < 2 || ks.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Argument("K grid must be strictly ascending with at least two points".into()));
    }
    let r_mean: Vec<f64> = ks
        .par_iter()
        .enumerate()
        .map(|(i, &k)| {
            let spec = KuramotoSpec { k, seed: derive_seed(base.seed, i as u64), ..base.clone() };
            simulate_inner(&spec, false).map(|r| r.r_mean)
        })
        .collect::<Result<_>>()?;
    let floor = 1.0 / (base.n as f64).sqrt();
    let mut warnings = vec![format!(
        "finite N = {}: incoherent r floor ≈ 1/√N = {:.4} against threshold {threshold}",
        base.n, floor
    )];
    for w in 0..ks.len() - 1 {
        if r_mean[w + 1] < r_mean[w] - 3.0 * floor {
            warnings.push(format!(
                "r(K) not monotone: r({}) = {:.4} > r({}) = {:.4}",
                ks[w],
                r_mean[w],
                ks[w + 1],
                r_mean[w + 1]
            ));
        }
    }
    let outcome = crossing(ks, &r_mean, threshold);
    let band = match (crossing(ks, &r_mean, threshold - floor), crossing(ks, &r_mean, threshold + floor)) {
        (KcOutcome::Crossing(a), KcOutcome::Crossing(b)) => 0.5 * (b - a).abs(),
        _ => ks[1] - ks[0],
    };
    Ok(KcEstimate { outcome, ks: ks.to_vec(), r_mean, threshold, finite_size_band: band, warnings })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhasePairSpec {
    pub delta_omega: f64,
    pub c: f64,
    pub k: f64,
    pub theta0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseClass {
    Locked,
    Drift,
}

/// RK4 for `δθ̇ = −δΩ − C cos δθ − K sin 2δθ`. Locked when the mean slope
/// over the final 20% is below `1e-3·max(|δΩ|, |C|, |K|, 1)`.
pub fn two_unit_phase(spec: &PhasePairSpec, dt: f64, t_end: f64) -> Result<(Trajectory, PhaseClass)> {
    if ![spec.delta_omega, spec.c, spec.k, spec.theta0].iter().all(|x| x.is_finite()) {
        return Err(Error::Argument("phase-pair parameters must be finite".into()));
    }
    if !(dt > 0.0) || !(t_end > dt) {
        return Err(Error::Argument("dt must be > 0 and t_end > dt".into()));
    }
    let f = |x: f64| -spec.delta_omega - spec.c * x.cos() - spec.k * (2.0 * x).sin();
    let steps = (t_end / dt).round() as usize;
    let mut x = spec.theta0;
    let mut values = Vec::with_capacity(steps + 1);
    values.push(x);
    for _ in 0..steps {
        let k1 = f(x);
        let k2 = f(x + 0.5 * dt * k1);
        let k3 = f(x + 0.5 * dt * k2);
        let k4 = f(x + dt * k3);
        x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        values.push(x);
    }
    let from = ((0.8 * steps as f64).round() as usize).min(steps - 1);
    let slope = (values[steps] - values[from]).abs() / ((steps - from) as f64 * dt);
    let scale = [spec.delta_omega.abs(), spec.c.abs(), spec.k.abs(), 1.0].into_iter().fold(0.0, f64::max);
    let class = if slope < 1e-3 * scale { PhaseClass::Locked } else { PhaseClass::Drift };
    Ok((Trajectory::new("delta_theta", 0.0, dt, values)?, class))
}
