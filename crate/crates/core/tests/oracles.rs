mod common;

use qsync::measures::{concurrence, g2_intensity, gaussian_discord, mutual_information};
use qsync::nalgebra::DMatrix;
use qsync::spins::SpinModelSpec;
use qsync::statecore::{entropy, DensityMatrix, EntropyKind, GaussianState};
use qsync::sweep::linspace;

#[test]
fn thermal_entropy_matches_fock_sum() {
    for nbar in linspace(0.0, 2.0, 9) {
        let g = GaussianState::thermal(nbar).unwrap();
        let vn = entropy(&g, EntropyKind::VonNeumann).unwrap();
        let r2 = entropy(&g, EntropyKind::Renyi2).unwrap();
        assert!((vn - common::fock_thermal_entropy(nbar, 400)).abs() < 1e-6, "n = {nbar}");
        assert!((r2 - common::fock_thermal_renyi2(nbar, 400)).abs() < 1e-6, "n = {nbar}");
    }
}

#[test]
fn reduced_two_mode_squeezed_is_thermal() {
    for r in [0.1, 0.5, 0.9] {
        let tms = GaussianState::two_mode_squeezed(r);
        let nbar = r.sinh().powi(2);
        let mi = mutual_information(&tms, &[0], EntropyKind::VonNeumann).unwrap();
        assert!((mi - 2.0 * common::fock_thermal_entropy(nbar, 400)).abs() < 1e-6);
    }
}

#[test]
fn tms_intensity_correlation_matches_fock() {
    for r in [0.3, 0.7, 1.2] {
        let g2 = g2_intensity(&GaussianState::two_mode_squeezed(r)).unwrap();
        assert!((g2 - common::fock_tms_g2(r, 400)).abs() < 1e-6, "r = {r}: {g2}");
    }
}

#[test]
fn werner_concurrence_curve() {
    for p in linspace(0.0, 1.0, 41) {
        let rho = DensityMatrix::new(vec![2, 2], common::werner(p)).unwrap();
        assert!((concurrence(&rho).unwrap() - common::werner_concurrence(p)).abs() < 1e-8, "p = {p}");
    }
}

fn noisy_tms(r: f64, noise: f64) -> GaussianState {
    let t = GaussianState::two_mode_squeezed(r);
    GaussianState::centered(t.cov() + DMatrix::identity(4, 4) * noise).unwrap()
}

#[test]
fn gaussian_discord_matches_brute_force() {
    let mut states = vec![
        GaussianState::two_mode_squeezed(0.4),
        noisy_tms(0.6, 0.3),
        GaussianState::product(&[GaussianState::thermal(0.5).unwrap(), GaussianState::squeezed_vacuum(0.7, 0.2)]),
    ];
    // A mixed, asymmetric state with q-p cross correlations.
    let mut c = noisy_tms(0.5, 0.1).cov().clone();
    c[(0, 0)] += 0.4;
    c[(1, 3)] += 0.05;
    c[(3, 1)] += 0.05;
    states.push(GaussianState::centered(c).unwrap());
    for (i, s) in states.iter().enumerate() {
        let d = gaussian_discord(s, 1).unwrap();
        let oracle = common::numeric_gaussian_discord(s);
        assert!((d - oracle).abs() < 1e-6, "state {i}: {d} vs {oracle}");
    }
}

#[test]
fn discord_swaps_with_measured_mode() {
    let mut c = noisy_tms(0.5, 0.0).cov().clone();
    c[(0, 0)] += 0.6;
    c[(1, 1)] += 0.6;
    let s = GaussianState::centered(c).unwrap();
    let swapped = s.select_modes(&[1, 0]).unwrap();
    assert!((gaussian_discord(&s, 0).unwrap() - common::numeric_gaussian_discord(&swapped)).abs() < 1e-6);
}

#[test]
fn evolved_pair_discord_matches_brute_force() {
    use qsync::linear_osc::{build_evolution, evolve_covariance, Bath, BathTopology, CouplingForm, NetworkSpec, TimeGrid};
    use qsync::statecore::SpectralDensity;
    let net = NetworkSpec::pair(1.0, 1.05, 0.1, CouplingForm::Bilinear).unwrap();
    let bath = Bath { density: SpectralDensity::ohmic(0.01, 20.0).unwrap(), temperature: 0.2 };
    let (a, d) = build_evolution(&net, &BathTopology::common(2, bath)).unwrap();
    let s0 = GaussianState::product(&[GaussianState::squeezed_vacuum(1.0, 0.0), GaussianState::squeezed_vacuum(1.0, 0.8)]);
    let states = evolve_covariance(&s0, &a, &d, &TimeGrid::new(0.004, 100.0, 5000).unwrap()).unwrap();
    for s in &states[1..] {
        let (dq, oracle) = (gaussian_discord(s, 1).unwrap(), common::numeric_gaussian_discord(s));
        assert!((dq - oracle).abs() < 1e-6, "{dq} vs {oracle}");
    }
}

#[test]
fn damped_oscillator_relaxation() {
    let dev = damped_oscillator_deviation();
    assert!(dev < 1e-6, "{dev}");
}

fn damped_oscillator_deviation() -> f64 {
    use qsync::linear_osc::{build_evolution, evolve_covariance, normal_modes, Bath, BathTopology, CouplingForm, NetworkSpec, TimeGrid};
    use qsync::statecore::SpectralDensity;
    let net = NetworkSpec::new(vec![0.8], DMatrix::zeros(1, 1), CouplingForm::Bilinear).unwrap();
    let bath = Bath { density: SpectralDensity::ohmic(0.03, 20.0).unwrap(), temperature: 1.5 };
    let topo = BathTopology::separate(1, bath);
    let mode = normal_modes(&net, &topo).unwrap().modes[0].clone();
    let (a, d) = build_evolution(&net, &topo).unwrap();
    let s0 = GaussianState::squeezed_vacuum(1.1, -0.4);
    let grid = TimeGrid::new(0.004, 80.0, 250).unwrap();
    let states = evolve_covariance(&s0, &a, &d, &grid).unwrap();
    grid.recorded_times()
        .iter()
        .zip(&states)
        .map(|(t, st)| (st.cov() - common::damped_covariance(s0.cov(), mode.frequency, mode.gamma, mode.nbar, *t)).abs().max())
        .fold(0.0, f64::max)
}

#[test]
fn spin_rk4_matches_matrix_exponential() {
    let specs = [
        SpinModelSpec { omega2: 0.8, lambda: 0.05, asym: 0.0, ..SpinModelSpec::default() },
        SpinModelSpec { omega2: 1.2, lambda: 0.15, asym: 1.0, temperature: 0.4, ..SpinModelSpec::default() },
        SpinModelSpec {
            omega2: 1.1,
            lambda: 0.1,
            coupling: qsync::spins::SpinCoupling::Dephasing { rate: 0.02 },
            ..SpinModelSpec::default()
        },
    ];
    for s in &specs {
        let dev = common::spin_expm_deviation(s, 0.01, 40.0);
        assert!(dev < 1e-6, "{s:?}: {dev}");
    }
}
