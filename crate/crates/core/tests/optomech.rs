use qsync::optomech::{co_integrate, co_integrate_partial, indicator_suite, OptomechRun, OptomechSpec};
use qsync::Error;

fn final_gap(a: &OptomechRun, b: &OptomechRun) -> (f64, f64) {
    let (ma, mb) = (a.means.last().unwrap(), b.means.last().unwrap());
    let mean = (0..2)
        .map(|j| (ma.a[j] - mb.a[j]).norm().max((ma.b[j] - mb.b[j]).norm()))
        .fold(0.0, f64::max);
    let (ca, cb) = (a.fluct.last().unwrap().cov(), b.fluct.last().unwrap().cov());
    let cov = (ca - cb).abs().max() / ca.abs().max();
    (mean / ma.max_abs(), cov)
}

#[test]
fn fourth_order_convergence() {
    let spec = OptomechSpec::fig3();
    let runs: Vec<OptomechRun> = [0.02, 0.01, 0.005]
        .iter()
        .map(|&dt| co_integrate(&spec, dt, 50.0, (1.0 / dt) as usize).unwrap())
        .collect();
    let d1 = final_gap(&runs[0], &runs[1]);
    let d2 = final_gap(&runs[1], &runs[2]);
    assert!(d2.0 < d1.0 / 8.0, "means {d1:?} -> {d2:?}");
    assert!(d2.1 < d1.1 / 8.0, "cov {d1:?} -> {d2:?}");
}

#[test]
fn step_halving_agrees_on_long_run() {
    let spec = OptomechSpec::fig3();
    let a = co_integrate(&spec, 0.005, 1000.0, 2000).unwrap();
    let b = co_integrate(&spec, 0.0025, 1000.0, 4000).unwrap();
    let (dm, dc) = final_gap(&a, &b);
    assert!(dm < 1e-4 && dc < 1e-4, "{dm} {dc}");
}

#[test]
fn identical_units_are_perfectly_synchronized() {
    let base = OptomechSpec::fig3();
    let spec = OptomechSpec {
        omega: [1.0, 1.0],
        detuning: [-1.0, -1.0],
        initial_b: [base.initial_b[0]; 2],
        ..base
    };
    let run = co_integrate(&spec, 0.005, 300.0, 20).unwrap();
    let suite = indicator_suite(&run, 50.0, None).unwrap();
    for (_, c) in suite.pearson_q.valid().skip(10) {
        assert!(c > 1.0 - 1e-9, "{c}");
    }
}

#[test]
fn runaway_drive_reports_instability() {
    let spec = OptomechSpec { drive: 1e5, blowup: 1e4, ..OptomechSpec::fig3() };
    let (run, err) = co_integrate_partial(&spec, 0.005, 200.0, 20);
    match err {
        Some(Error::Instability { t, .. }) => assert!(t > 0.0 && t < 200.0 && !run.times.is_empty()),
        other => panic!("expected instability, got {other:?}"),
    }
}

#[test]
fn desynchronized_fluctuations_stay_physical() {
    let run = co_integrate(&OptomechSpec::fig4(), 0.005, 400.0, 100).unwrap();
    for s in &run.fluct {
        let nu = s.symplectic_eigenvalues().unwrap();
        assert!(nu.iter().all(|&v| v >= 0.5 - 1e-9), "{nu:?}");
    }
}
