//! Two-parameter sweep grids evaluated cell by cell.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::io::{fmt_f64, CsvBuilder};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "detail", rename_all = "snake_case")]
pub enum CellStatus {
    Ok,
    /// Computed, but outside the regime where the model is reliable.
    Flagged(String),
    Failed(String),
}

impl CellStatus {
    pub fn label(&self) -> String {
        match self {
            CellStatus::Ok => "ok".into(),
            CellStatus::Flagged(m) => format!("flagged:{}", sanitize(m)),
            CellStatus::Failed(m) => format!("failed:{}", sanitize(m)),
        }
    }

    pub fn is_failed(&self) -> bool {
        matches!(self, CellStatus::Failed(_))
    }
}

fn sanitize(s: &str) -> String {
    s.chars().map(|c| if c == ',' || c == '\n' || c == '"' { ';' } else { c }).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub p1: f64,
    pub p2: f64,
    /// One entry per layer; `NaN` where unavailable.
    pub values: Vec<f64>,
    pub status: CellStatus,
}

/// Row-major grid: `cells[i2 * p1.len() + i1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub p1_name: String,
    pub p2_name: String,
    pub p1: Vec<f64>,
    pub p2: Vec<f64>,
    pub layers: Vec<String>,
    pub cells: Vec<Cell>,
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

impl SweepGrid {
    /// Evaluates `f(i1, i2, p1, p2)` on every cell in parallel on the current
    /// rayon pool. Results are placed by index, so the output does not depend
    /// on scheduling.
    pub fn evaluate<F>(
        p1_name: &str,
        p1: Vec<f64>,
        p2_name: &str,
        p2: Vec<f64>,
        layers: &[&str],
        f: F,
    ) -> Self
    where
        F: Fn(usize, usize, f64, f64) -> (Vec<f64>, CellStatus) + Sync,
    {
        let n1 = p1.len();
        let cells: Vec<Cell> = (0..n1 * p2.len())
            .into_par_iter()
            .map(|k| {
                let (i1, i2) = (k % n1, k / n1);
                let (mut values, status) = f(i1, i2, p1[i1], p2[i2]);
                values.resize(layers.len(), f64::NAN);
                Cell { p1: p1[i1], p2: p2[i2], values, status }
            })
            .collect();
        Self {
            p1_name: p1_name.into(),
            p2_name: p2_name.into(),
            p1,
            p2,
            layers: layers.iter().map(|s| s.to_string()).collect(),
            cells,
        }
    }

    pub fn cell(&self, i1: usize, i2: usize) -> &Cell {
        &self.cells[i2 * self.p1.len() + i1]
    }

    pub fn layer_index(&self, name: &str) -> Option<usize> {
        self.layers.iter().position(|l| l == name)
    }

    /// Layer as `[i2][i1]`.
    pub fn layer(&self, name: &str) -> Option<Vec<Vec<f64>>> {
        let li = self.layer_index(name)?;
        Some(
            (0..self.p2.len())
                .map(|i2| (0..self.p1.len()).map(|i1| self.cell(i1, i2).values[li]).collect())
                .collect(),
        )
    }

    pub fn n_failed(&self) -> usize {
        self.cells.iter().filter(|c| c.status.is_failed()).count()
    }

    /// `p1,p2,<layers...>,status`.
    pub fn to_csv(&self) -> String {
        let mut header = vec![self.p1_name.clone(), self.p2_name.clone()];
        header.extend(self.layers.iter().cloned());
        header.push("status".into());
        let mut csv = CsvBuilder::new(&header);
        for c in &self.cells {
            let mut row = vec![fmt_f64(c.p1), fmt_f64(c.p2)];
            row.extend(c.values.iter().map(|&v| fmt_f64(v)));
            row.push(c.status.label());
            csv.row(&row);
        }
        csv.finish()
    }
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// One SplitMix64 output for state `x`.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for cell `index`: the `(index + 1)`-th output of a SplitMix64
/// stream started at `master`. Counter based, so any cell can be
/// reproduced on its own.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master.wrapping_add(GOLDEN.wrapping_mul(index)))
}
