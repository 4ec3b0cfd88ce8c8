//! Functional-calculus graph filters, graph convolutional networks with
//! certified stability constants, and a resolvent-based transferability
//! toolkit for coarse-grained graphs.
//!
//! Everything numerical is generic over the real scalar `R` (`f32` or `f64`);
//! the `*64` aliases below fix double precision, which the experiments use.

pub mod scalar;
pub mod error;
pub mod graph;
pub mod operator;
pub mod filters;
pub mod network;
pub mod sampling;
pub mod stability;
pub mod coarsen;
pub mod cases;
pub mod experiments;

pub use error::{Error, Result};
pub use graph::{characteristic_operator, energy_form, inner_product, OperatorKind, Signal, SignalSpace, WeightedGraph};
pub use operator::{DenseOperator, ProfileMode, ResolventProfile, SpectrumResult};
pub use scalar::Real;

pub type WeightedGraph64 = WeightedGraph<f64>;
pub type Signal64 = Signal<f64>;
pub type DenseOperator64 = DenseOperator<f64>;
