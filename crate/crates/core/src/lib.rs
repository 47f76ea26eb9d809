//! Dirichlet, Neumann and Steklov spectra of weighted graphs, the
//! isocapacitary constants that bound them, and checks of the two-sided
//! estimates on finite domains and along exhaustions of infinite graphs.
//!
//! Everything numerical is generic over [`Real`] (`f32`, `f64`); the aliases
//! below fix `f64`.

// dense kernels index several arrays in lockstep; `!(x > 0)` also rejects NaN
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod capacity;
pub mod error;
pub mod families;
pub mod graph;
pub mod isocap;
pub mod linalg;
pub mod scalar;
pub mod spectra;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{Extended, Real};

pub type Graph = graph::WeightedGraph<f64>;
pub type Domain = graph::SteklovDomain<f64>;
pub type Field = graph::PotentialField<f64>;
pub type Network = capacity::CapacityNetwork<f64>;
pub type Constant = isocap::ConstantResult<f64>;
pub type Step = isocap::TruncationStep<f64>;
pub type Report = verify::BoundReport<f64>;
pub type Spectrum = linalg::SpectralResult<f64>;
