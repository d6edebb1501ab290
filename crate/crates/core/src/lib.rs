//! Quickest minimum cost transshipments over time.
//!
//! Everything is generic over an exact scalar type (see [`Scalar`]). The
//! aliases below pick concrete rationals; [`Rational`] is the default used
//! by the command line tool.

pub mod admissible;
pub mod examples;
pub mod netcore;
pub mod paths;
pub mod pipeline;
pub mod scalar;
pub mod staticflow;
pub mod temporal;
pub mod transport;

pub use num_rational::BigRational;

/// Arbitrary precision rational; never overflows.
pub type Rational = BigRational;
/// Fast rational for small instances. Overflow panics in debug builds.
pub type Rational64 = num_rational::Ratio<i64>;
pub type Rational128 = num_rational::Ratio<i128>;

pub use admissible::{admissible_arcs, extend, ExtendedNetwork, Subnetwork};
pub use netcore::{validate, ArcData, ArcId, ArcSet, Network, NetworkBuilder, NodeId, Path, ValidationReport};
pub use paths::{pair_costs, PairCostMatrix};
pub use pipeline::{solve, Mode, SolveError, SolveOptions, SolveReport};
pub use scalar::Scalar;
pub use temporal::{expand, feasible, mincost_over_time, quickest_transshipment, FlowOverTime, RateInterval};
pub use transport::{DualSolution, TransportSolution, TransportationInstance};
