//! Positive-frequency ("analytic-signal") wave packets of the 1+1-dimensional
//! wave equation.
//!
//! A real rectangle localised at `t = 0` splits into two complex packets,
//! `Φ(x, t) = ψ(x - t) + ψ*(x + t)`, each with a `1/d` imaginary tail. The
//! tails cancel exactly at `t = 0` and nowhere else.
//!
//! * [`domain`]: packets, grids, singular points, snapshots.
//! * [`closed_form`]: exact evaluators.
//! * [`spectral`]: independent quadrature and DFT oracles.
//! * [`analysis`]: cancellation, tail law, localisation, causal arrival.
//! * [`figures`] and [`verify`]: dataset emission and the verification suite.

// `!(a > b)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod closed_form;
pub mod domain;
pub mod error;
pub mod figures;
pub mod spectral;
pub mod verify;

pub use domain::{
    make_edge_avoiding_grid, Evaluation, FieldSnapshot, Grid, PacketSpec, Provenance, SingularKind,
    SingularPoint, DELTA_SING,
};
pub use error::{Error, Result};
pub use num_complex::Complex64;
