//! Exact finite metric spaces and the classification of distance sets.
//!
//! Everything is computed in exact rational arithmetic. Infinite distance
//! sets are handled symbolically through [`distance_set::DistanceSetDesc`];
//! finite spaces are checked by brute force in [`oracles`].

pub mod classifier;
pub mod constructions;
pub mod distance_set;
pub mod metric;
pub mod mpf;
pub mod oracles;
pub mod rational;
pub mod urysohn;

pub use classifier::{classify, ClassificationReport};
pub use distance_set::{compute_facts, Component, DistanceSetDesc, SetFacts};
pub use metric::{distance_spectrum, is_ultrametric, validate_metric, FiniteMetricSpace, MetricError};
pub use rational::Rational;
