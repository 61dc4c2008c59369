#![allow(dead_code)]

use qsync::nalgebra::{DMatrix, DVector, SMatrix};
use qsync::spins::{default_initial_state, evolve_rho, liouvillian, secular_rates, diagonalize, SpinModelSpec};
use qsync::statecore::GaussianState;
use qsync::C64;

/// Von Neumann entropy of a thermal state from its Fock populations,
/// truncated at `cutoff`.
pub fn fock_thermal_entropy(nbar: f64, cutoff: usize) -> f64 {
    let q = nbar / (nbar + 1.0);
    (0..=cutoff)
        .map(|n| q.powi(n as i32) / (nbar + 1.0))
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln())
        .sum()
}

pub fn fock_thermal_renyi2(nbar: f64, cutoff: usize) -> f64 {
    let q = nbar / (nbar + 1.0);
    let s: f64 = (0..=cutoff).map(|n| (q.powi(n as i32) / (nbar + 1.0)).powi(2)).sum();
    -s.ln()
}

/// `g₂ = ⟨n_a n_b⟩/(⟨n_a⟩⟨n_b⟩)` of a two-mode squeezed vacuum from its
/// Fock expansion `Σ tanhⁿr / cosh r |n, n⟩`.
pub fn fock_tms_g2(r: f64, cutoff: usize) -> f64 {
    let t = r.tanh();
    let p = |n: usize| (t * t).powi(n as i32) / r.cosh().powi(2);
    let nn: f64 = (0..=cutoff).map(|n| p(n) * (n * n) as f64).sum();
    let n1: f64 = (0..=cutoff).map(|n| p(n) * n as f64).sum();
    nn / (n1 * n1)
}

/// Werner state `p|Φ⁺⟩⟨Φ⁺| + (1 − p)𝟙/4`.
pub fn werner(p: f64) -> DMatrix<C64> {
    let mut m = DMatrix::<C64>::identity(4, 4) * C64::new((1.0 - p) / 4.0, 0.0);
    for &(i, j) in &[(0, 0), (0, 3), (3, 0), (3, 3)] {
        m[(i, j)] += C64::new(p / 2.0, 0.0);
    }
    m
}

pub fn werner_concurrence(p: f64) -> f64 {
    (1.5 * p - 0.5).max(0.0)
}

fn entropy_of_nu(nu: f64) -> f64 {
    let (a, b) = (nu + 0.5, nu - 0.5);
    a * a.ln() - if b > 1e-300 { b * b.ln() } else { 0.0 }
}

fn entropy(cov: &DMatrix<f64>) -> f64 {
    let nu = qsync::statecore::symplectic_eigenvalues(cov).unwrap();
    nu.iter().map(|&v| entropy_of_nu(v)).sum()
}

/// Gaussian discord by brute force: conditional entropy of mode A after a
/// pure Gaussian measurement on B with covariance `R(φ) diag(e^{−2s}, e^{2s})/2 R(φ)ᵀ`,
/// minimized over a grid in `(s, φ)` and then refined by golden-section
/// passes.
pub fn numeric_gaussian_discord(state: &GaussianState) -> f64 {
    let cov = state.cov();
    let a = cov.view((0, 0), (2, 2)).into_owned();
    let b = cov.view((2, 2), (2, 2)).into_owned();
    let c = cov.view((0, 2), (2, 2)).into_owned();
    let cond = |s: f64, phi: f64| {
        let s = s.clamp(-8.0, 8.0);
        let (sn, cs) = phi.sin_cos();
        let rot = DMatrix::from_row_slice(2, 2, &[cs, -sn, sn, cs]);
        let m = &rot * DMatrix::from_diagonal(&DVector::from_vec(vec![0.5 * (-2.0 * s).exp(), 0.5 * (2.0 * s).exp()])) * rot.transpose();
        let inv = (&b + m).try_inverse().unwrap();
        let ac = &a - &c * inv * c.transpose();
        entropy_of_nu(ac.determinant().max(0.25).sqrt())
    };
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..=120 {
        let s = -6.0 + 12.0 * i as f64 / 120.0;
        for j in 0..72 {
            let phi = std::f64::consts::PI * j as f64 / 72.0;
            let v = cond(s, phi);
            if v < best.0 {
                best = (v, s, phi);
            }
        }
    }
    let (mut s, mut phi) = (best.1, best.2);
    let mut hs = 0.1;
    let mut hp = std::f64::consts::PI / 72.0;
    for _ in 0..60 {
        s = golden(|x| cond(x, phi), s - hs, s + hs);
        phi = golden(|x| cond(s, x), phi - hp, phi + hp);
        hs *= 0.7;
        hp *= 0.7;
    }
    // Homodyne limit: `A − C u uᵀ Cᵀ / (uᵀ B u)` for quadrature direction `u`.
    let homodyne = |phi: f64| {
        let u = DVector::from_vec(vec![phi.cos(), phi.sin()]);
        let cu = &c * &u;
        let ac = &a - &cu * cu.transpose() / (u.transpose() * &b * &u)[(0, 0)];
        entropy_of_nu(ac.determinant().max(0.25).sqrt())
    };
    let mut hbest = (f64::INFINITY, 0.0);
    for j in 0..180 {
        let p = std::f64::consts::PI * j as f64 / 180.0;
        let v = homodyne(p);
        if v < hbest.0 {
            hbest = (v, p);
        }
    }
    let hphi = golden(homodyne, hbest.1 - 0.02, hbest.1 + 0.02);
    let min_cond = cond(s, phi).min(homodyne(hphi));
    entropy(&b) - entropy(cov) + min_cond
}

fn golden(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let x1 = hi - g * (hi - lo);
        let x2 = lo + g * (hi - lo);
        if f(x1) < f(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    0.5 * (lo + hi)
}

/// Largest entry-wise deviation between the RK4 trajectory at `t` and the
/// exact exponential of the Liouvillian applied to the default initial state.
pub fn spin_expm_deviation(spec: &SpinModelSpec, dt: f64, t: f64) -> f64 {
    let sp = diagonalize(spec).unwrap();
    let jumps = secular_rates(spec, &sp).unwrap();
    let l = liouvillian(spec, &jumps);
    let prop = (l * C64::new(t, 0.0)).exp();
    let rho0 = default_initial_state().to_matrix4().unwrap();
    let v0 = SMatrix::<C64, 16, 1>::from_column_slice(rho0.as_slice());
    let exact = prop * v0;
    let states = evolve_rho(&default_initial_state(), spec, dt, t, (t / dt).round() as usize).unwrap();
    let rk = states.last().unwrap().to_matrix4().unwrap();
    (0..16).map(|k| (rk.as_slice()[k] - exact[k]).norm()).fold(0.0, f64::max)
}

/// Closed-form covariance of one damped oscillator in local quadratures:
/// `e^{−Γt} R σ₀ Rᵀ + (n̄ + ½)(1 − e^{−Γt}) 𝟙`.
pub fn damped_covariance(sigma0: &DMatrix<f64>, omega: f64, gamma: f64, nbar: f64, t: f64) -> DMatrix<f64> {
    let (s, c) = (omega * t).sin_cos();
    let rot = DMatrix::from_row_slice(2, 2, &[c, s, -s, c]);
    let decay = (-gamma * t).exp();
    &rot * sigma0 * rot.transpose() * decay + DMatrix::identity(2, 2) * ((nbar + 0.5) * (1.0 - decay))
}
