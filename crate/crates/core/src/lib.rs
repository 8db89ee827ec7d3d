//! Semicontinuous calculus on the extended real line: half-open interval
//! topologies, one-sided Lebesgue–Stieltjes measures, distributional
//! pairings, and a transformed Schrödinger operator with a sign-function
//! coefficient.

// `!(x > 0.0)` is used on purpose: it also turns NaN away.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod cli;
pub mod distributions;
pub mod error;
pub mod hamiltonian;
pub mod interval_topology;
pub mod piecewise;
pub mod stieltjes;
pub mod symplectic;

pub use error::{Error, Result};
pub use interval_topology::{ExtReal, Interval, IntervalSet, Orientation};
pub use piecewise::{Continuity, PiecewiseFn, Smooth};
