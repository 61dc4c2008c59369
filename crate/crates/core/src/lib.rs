//! Open-system synchronization toolkit.
//!
//! Gaussian and two-qubit state containers, the synchronization and
//! correlation indicators built on them, and four dynamics engines:
//! harmonic networks with normal-mode dissipation, a pair of Ising-coupled
//! spins under a secular master equation, two mechanically coupled
//! optomechanical cells, and the classical Kuramoto model.
//!
//! Conventions used everywhere: ħ = 1, quadratures `q = (a + a†)/√2` and
//! `p = -i(a - a†)/√2` (vacuum variance ½), phase-space vectors interleaved
//! as `(q1, p1, q2, p2, ...)`, and natural logarithms.

pub mod error;
pub mod io;
pub mod kuramoto;
pub mod linalg;
pub mod linear_osc;
pub mod measures;
pub mod optomech;
pub mod spins;
pub mod statecore;
pub mod sweep;

pub use error::{Error, Result};
pub use nalgebra;
pub use nalgebra::Complex;

pub type C64 = nalgebra::Complex<f64>;
