//! Exponent-function lattices, Möbius coefficients and independence
//! diagnostics for simple max-stable random vectors.
//!
//! Margins are unit Fréchet throughout: `P(X ≤ x) = exp(−V(x))` with `V`
//! homogeneous of order −1. The lattice of subsets `A ⊆ I` carries three
//! equivalent tables:
//!
//! * `V^A`, the exponent function of the sub-vector `X_A`;
//! * `d_A`, the Möbius coefficients, nonnegative for every valid model;
//! * `χ_A`, the tail-dependence coefficients.
//!
//! Two disjoint blocks `A`, `B` are independent iff `χ_{A,B}` vanishes, and
//! conditional independence given the rest can only hold where `d_{A,B}`
//! vanishes.

pub mod density;
pub mod diagnostics;
mod error;
pub mod format;
pub mod grid;
pub mod lattice;
pub mod mc;
pub mod model;
pub mod partition;
pub mod point;
pub mod quadrature;
pub mod subset;
pub mod verify;

pub use error::{Error, Result};
pub use grid::Grid;
pub use lattice::{LatticeTable, TableKind};
pub use model::{
    AsymmetricComponent, AsymmetricLogisticModel, Atom, DiscreteSpectralMeasure, ExponentModel,
    LogisticModel, Model, ModelKind, ModelSpec,
};
pub use partition::{bell_number, enumerate_partitions, Partitions, SetPartition};
pub use point::EvaluationPoint;
pub use subset::{enumerate_subsets, IndexSet};
