//! Plain-text CSV serialization: comma separated, `.` decimal point,
//! header row, LF line endings.

use std::fmt::Write;

use crate::measures::IndicatorSeries;
use crate::statecore::{DensityMatrix, GaussianState, Trajectory};

/// Shortest round-trip decimal form; non-finite values print as `nan`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x}")
    } else {
        "nan".to_string()
    }
}

pub struct CsvBuilder {
    buf: String,
    cols: usize,
}

impl CsvBuilder {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        let mut buf = String::new();
        let names: Vec<&str> = header.iter().map(|h| h.as_ref()).collect();
        buf.push_str(&names.join(","));
        buf.push('\n');
        Self { buf, cols: names.len() }
    }

    pub fn row<S: AsRef<str>>(&mut self, fields: &[S]) {
        debug_assert_eq!(fields.len(), self.cols);
        for (i, f) in fields.iter().enumerate() {
            if i > 0 {
                self.buf.push(',');
            }
            self.buf.push_str(f.as_ref());
        }
        self.buf.push('\n');
    }

    pub fn row_f64(&mut self, fields: &[f64]) {
        let v: Vec<String> = fields.iter().map(|&x| fmt_f64(x)).collect();
        self.row(&v);
    }

    pub fn finish(self) -> String {
        self.buf
    }
}

/// Header for Gaussian snapshots: time, the mean vector, then the
/// covariance row-major, in `(q1, p1, q2, p2, ...)` order.
pub fn gaussian_snapshot_header(n_modes: usize) -> Vec<String> {
    let label = |i: usize| format!("{}{}", if i % 2 == 0 { "q" } else { "p" }, i / 2 + 1);
    let d = 2 * n_modes;
    let mut h = vec!["t".to_string()];
    h.extend((0..d).map(|i| format!("mean_{}", label(i))));
    for i in 0..d {
        for j in 0..d {
            h.push(format!("cov_{}_{}", label(i), label(j)));
        }
    }
    h
}

pub fn gaussian_snapshots_csv<'a>(rows: impl IntoIterator<Item = (f64, &'a GaussianState)>) -> String {
    let mut it = rows.into_iter().peekable();
    let n = it.peek().map(|(_, s)| s.n_modes()).unwrap_or(1);
    let mut csv = CsvBuilder::new(&gaussian_snapshot_header(n));
    for (t, s) in it {
        let mut v = vec![t];
        v.extend(s.mean().iter());
        for i in 0..s.dim() {
            for j in 0..s.dim() {
                v.push(s.cov()[(i, j)]);
            }
        }
        csv.row_f64(&v);
    }
    csv.finish()
}

/// Density-matrix snapshots as `(re, im)` pairs, row-major.
pub fn density_snapshots_csv<'a>(rows: impl IntoIterator<Item = (f64, &'a DensityMatrix)>) -> String {
    let mut it = rows.into_iter().peekable();
    let d = it.peek().map(|(_, s)| s.matrix().nrows()).unwrap_or(4);
    let mut h = vec!["t".to_string()];
    for i in 0..d {
        for j in 0..d {
            h.push(format!("re_{i}{j}"));
            h.push(format!("im_{i}{j}"));
        }
    }
    let mut csv = CsvBuilder::new(&h);
    for (t, s) in it {
        let mut v = vec![t];
        for i in 0..d {
            for j in 0..d {
                let z = s.matrix()[(i, j)];
                v.push(z.re);
                v.push(z.im);
            }
        }
        csv.row_f64(&v);
    }
    csv.finish()
}

/// `t,value,valid`; invalid points carry `nan` and `0`.
pub fn indicator_csv(series: &IndicatorSeries) -> String {
    let mut out = String::from("t,value,valid\n");
    for (i, v) in series.values.iter().enumerate() {
        let t = fmt_f64(series.time(i));
        match v {
            Some(x) => writeln!(out, "{t},{},1", fmt_f64(*x)).unwrap(),
            None => writeln!(out, "{t},nan,0").unwrap(),
        }
    }
    out
}

/// Several trajectories on a shared grid, one column each.
pub fn trajectories_csv(trs: &[&Trajectory]) -> String {
    let mut h = vec!["t".to_string()];
    h.extend(trs.iter().map(|t| t.name.clone()));
    let mut csv = CsvBuilder::new(&h);
    let n = trs.iter().map(|t| t.len()).min().unwrap_or(0);
    for i in 0..n {
        let mut v = vec![trs[0].time(i)];
        v.extend(trs.iter().map(|t| t.values[i]));
        csv.row_f64(&v);
    }
    csv.finish()
}
