//! Executes a validated config and collects the output files.

use qsync::io::{density_snapshots_csv, fmt_f64, gaussian_snapshots_csv, indicator_csv, CsvBuilder};
use qsync::kuramoto::{estimate_kc, simulate};
use qsync::linear_osc::{
    build_evolution, evolve_covariance, tongue_cell, tongue_diagram, BathTopology, NetworkSpec, TimeGrid, Topology,
};
use qsync::measures::spin_z;
use qsync::optomech::{co_integrate_partial, indicator_suite, OptomechRun};
use qsync::spins::{default_initial_state, diagram, diagram_cell, evolve_rho, observable_traj, LocalOperatorCoeffs, SpinModelSpec};
use qsync::statecore::GaussianState;
use qsync::sweep::{CellStatus, SweepGrid};
use serde_json::{json, Map, Value};

use crate::config::{Config, ModelKind};
use crate::error::CliError;

#[derive(Debug, Default)]
pub struct Outcome {
    /// `(file name, contents)` in write order.
    pub files: Vec<(String, String)>,
    pub results: Map<String, Value>,
    pub warnings: Vec<String>,
    /// Set when the run stopped early; the files hold what was computed.
    pub failure: Option<CliError>,
}

impl Outcome {
    fn file(&mut self, name: impl Into<String>, body: String) {
        self.files.push((name.into(), body));
    }

    fn result(&mut self, key: &str, v: Value) {
        self.results.insert(key.into(), v);
    }
}

/// JSON has no NaN; non-finite numbers become `null`.
fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

pub fn execute(cfg: &Config, seed: Option<u64>) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    match cfg.model_kind() {
        ModelKind::Tongue => tongue(cfg, &mut out)?,
        ModelKind::Optomech => optomech(cfg, &mut out)?,
        ModelKind::Spins => spins(cfg, &mut out)?,
        ModelKind::Kuramoto => kuramoto(cfg, seed, &mut out)?,
    }
    Ok(out)
}

fn grid_summary(out: &mut Outcome, key: &str, g: &SweepGrid) {
    let failed = g.n_failed();
    let mut flagged = std::collections::BTreeMap::<String, usize>::new();
    for c in &g.cells {
        if let CellStatus::Flagged(m) = &c.status {
            *flagged.entry(m.clone()).or_default() += 1;
        }
    }
    if failed > 0 {
        out.warnings.push(format!("{key}: {failed} of {} cells failed", g.cells.len()));
    }
    for (m, n) in &flagged {
        out.warnings.push(format!("{key}: {n} of {} cells flagged: {m}", g.cells.len()));
    }
    out.result(
        key,
        json!({ "cells": g.cells.len(), "failed": failed, "flagged": flagged.values().sum::<usize>(), "layers": g.layers }),
    );
}

fn tongue(cfg: &Config, out: &mut Outcome) -> Result<(), CliError> {
    let s = cfg.tongue.as_ref().unwrap();
    if let Some(g) = &s.sweep {
        let grid = tongue_diagram(&s.model, g.omega2.values(), g.lambda.values());
        out.file("grid.csv", grid.to_csv());
        grid_summary(out, "grid", &grid);
        return Ok(());
    }
    let m = &s.model;
    let net = NetworkSpec::pair(m.omega1, s.omega2, s.lambda, m.form)?;
    let baths = match m.topology {
        Topology::Common => BathTopology::common(2, m.bath),
        Topology::Separate => BathTopology::separate(2, m.bath),
    };
    let (a, d) = build_evolution(&net, &baths)?;
    let s0 = GaussianState::product(&[
        GaussianState::squeezed_vacuum(m.squeeze1.0, m.squeeze1.1),
        GaussianState::squeezed_vacuum(m.squeeze2.0, m.squeeze2.1),
    ]);
    let grid = TimeGrid::new(m.dt, m.t_eval + m.window, m.sample_every)?;
    let states = evolve_covariance(&s0, &a, &d, &grid)?;
    out.file("covariance.csv", gaussian_snapshots_csv(grid.recorded_times().into_iter().zip(&states)));
    let (c, disc) = tongue_cell(m, s.omega2, s.lambda)?;
    out.result("pearson", num(c));
    out.result("discord", num(disc));
    Ok(())
}

fn mean_field_csv(run: &OptomechRun) -> String {
    let mut csv = CsvBuilder::new(&["t", "re_a1", "im_a1", "re_a2", "im_a2", "re_b1", "im_b1", "re_b2", "im_b2"]);
    for (t, m) in run.times.iter().zip(&run.means) {
        csv.row_f64(&[*t, m.a[0].re, m.a[0].im, m.a[1].re, m.a[1].im, m.b[0].re, m.b[0].im, m.b[1].re, m.b[1].im]);
    }
    csv.finish()
}

fn optomech(cfg: &Config, out: &mut Outcome) -> Result<(), CliError> {
    let s = cfg.optomech.as_ref().unwrap();
    let (run, err) = co_integrate_partial(&s.model, s.dt, s.t_end, s.record_every);
    if let Some(e) = &err {
        if !matches!(e, qsync::Error::Instability { .. }) {
            return Err(e.clone().into());
        }
        out.warnings.push(format!("partial run: {e}"));
    }
    out.file("mean_field.csv", mean_field_csv(&run));
    out.file("covariance.csv", gaussian_snapshots_csv(run.times.iter().copied().zip(&run.fluct)));
    let t_last = run.times.last().copied().unwrap_or(0.0);
    out.result("t_reached", num(t_last));
    match indicator_suite(&run, s.window, s.r_min) {
        Ok(suite) => {
            let late = 0.4 * s.t_end;
            let mut means = Map::new();
            for (name, series) in suite.named() {
                out.file(format!("indicator_{name}.csv"), indicator_csv(series));
                means.insert(name.into(), series.mean_in(late, t_last).map(num).unwrap_or(Value::Null));
                let invalid = series.n_invalid();
                if invalid > 0 && name == "sp" {
                    out.warnings.push(format!("sp undefined at {invalid} samples (mechanical amplitude below r_min)"));
                }
            }
            out.result("late_from", num(late));
            out.result("late_means", Value::Object(means));
        }
        Err(e) if err.is_some() => out.warnings.push(format!("indicators skipped: {e}")),
        Err(e) => return Err(e.into()),
    }
    out.failure = err.map(CliError::from);
    Ok(())
}

fn spins(cfg: &Config, out: &mut Outcome) -> Result<(), CliError> {
    let s = cfg.spins.as_ref().unwrap();
    if let Some(g) = &s.sweep {
        let specs: Vec<(String, SpinModelSpec)> = if s.variants.is_empty() {
            vec![("diagram".into(), s.model)]
        } else {
            s.variants
                .iter()
                .map(|v| (format!("diagram_{}", v.label), SpinModelSpec { asym: v.asym, ..s.model }))
                .collect()
        };
        for (name, spec) in specs {
            let grid = diagram(&spec, g.omega2.values(), g.lambda.values(), &s.settings);
            out.file(format!("{name}.csv"), grid.to_csv());
            grid_summary(out, &name, &grid);
        }
        return Ok(());
    }
    let st = &s.settings;
    let t_end = (st.t_eval + st.window).max(st.z_until).max(st.mi_at);
    let states = evolve_rho(&default_initial_state(), &s.model, st.dt, t_end, s.record_every)?;
    let sdt = st.dt * s.record_every as f64;
    let x1 = observable_traj(&states, 0.0, sdt, 0, &LocalOperatorCoeffs::sigma_x())?;
    let x2 = observable_traj(&states, 0.0, sdt, 1, &LocalOperatorCoeffs::sigma_x())?;
    let mut csv = CsvBuilder::new(&["t", "sx1", "sx2", "Z"]);
    for (k, st) in states.iter().enumerate() {
        csv.row_f64(&[k as f64 * sdt, x1.values[k], x2.values[k], spin_z(st)?]);
    }
    out.file("trajectory.csv", csv.finish());
    out.file("states.csv", density_snapshots_csv(states.iter().enumerate().map(|(k, r)| (k as f64 * sdt, r))));
    let r = diagram_cell(&s.model, st)?;
    if r.near_degenerate {
        out.warnings.push("near-degenerate spectrum: secular rates are outside their reliable regime".into());
    }
    out.result("C", num(r.pearson));
    out.result("Z_I", num(r.z_integral));
    out.result("MI", num(r.mutual_information));
    out.result("E", num(r.concurrence));
    Ok(())
}

fn kuramoto(cfg: &Config, seed: Option<u64>, out: &mut Outcome) -> Result<(), CliError> {
    let s = cfg.kuramoto.as_ref().unwrap();
    let mut spec = s.model.clone();
    if let Some(seed) = seed {
        spec.seed = seed;
    }
    out.result("seed", json!(spec.seed));
    if let Some(ks) = &s.ks {
        let est = estimate_kc(&spec, &ks.values(), s.threshold)?;
        let mut csv = CsvBuilder::new(&["K", "r_mean"]);
        for (k, r) in est.ks.iter().zip(&est.r_mean) {
            csv.row_f64(&[*k, *r]);
        }
        out.file("kc.csv", csv.finish());
        out.warnings.extend(est.warnings.iter().cloned());
        out.result("kc", est.kc().map(num).unwrap_or(Value::Null));
        out.result("kc_outcome", serde_json::to_value(&est.outcome).unwrap());
        out.result("finite_size_band", num(est.finite_size_band));
        out.result("threshold", num(est.threshold));
        if let Some(kc) = spec.dist.critical_coupling() {
            out.result("kc_mean_field", num(kc));
        }
        return Ok(());
    }
    let run = simulate(&spec)?;
    let mut csv = CsvBuilder::new(&["t", "r", "psi"]);
    for i in 0..run.times.len() {
        csv.row(&[fmt_f64(run.times[i]), fmt_f64(run.r[i]), fmt_f64(run.psi[i])]);
    }
    out.file("order.csv", csv.finish());
    out.result("r_mean", num(run.r_mean));
    Ok(())
}
