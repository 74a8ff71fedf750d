//! Chip firing, reduced divisors and divisor ranks on metric trees of loops.

pub mod bn;
pub mod burn;
pub mod divisor;
pub mod error;
pub mod exec;
pub mod graph;
pub mod random;
pub mod rank;
pub mod rational;
pub mod reduce;
pub mod subdivision;

pub use burn::{dhar_burn, reduce_by_burning, BurnReport};
pub use divisor::{
    canonical_divisor, class_coordinates, divisor_of_function, representative_from_class, Divisor,
    DivisorClass, PLFunction,
};
pub use error::{Error, Result};
pub use exec::Exec;
pub use graph::{CactusGraph, GraphBuilder, GraphStats, LoopId, PointRef};
pub use rank::{riemann_roch_residual, RankEngine, RankWitness};
pub use rational::Rational;
pub use reduce::{circle_reduce, q_reduce};
