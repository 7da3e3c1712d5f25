//! Simple max-stable models on unit-Fréchet margins.
//!
//! Every model answers `V^A(x_A)` for any non-empty `A ⊆ I`. Coordinates of
//! `x` outside `A` are ignored, which is the `x_{A^c} → ∞` limit.

mod discrete;
mod logistic;
pub mod spec;

pub use discrete::{Atom, DiscreteSpectralMeasure, ValidationReport, MOMENT_TOLERANCE};
pub use logistic::{AsymmetricComponent, AsymmetricLogisticModel, LogisticModel};
pub use spec::{Model, ModelKind, ModelSpec};

use crate::error::{Error, Result};
use crate::lattice::{LatticeTable, TableKind};
use crate::point::EvaluationPoint;
use crate::subset::IndexSet;

pub trait ExponentModel: Send + Sync {
    /// Number of components `|I|`.
    fn dim(&self) -> usize;

    /// `V^A(x_A)` without argument checks.
    fn exponent_unchecked(&self, set: IndexSet, x: &[f64]) -> f64;

    /// Whether the joint law is declared to have a positive continuous density.
    fn smooth_density(&self) -> bool;

    /// Closed-form `∂^{|vars|} V^A / ∂x_vars`, when the model has one.
    fn exact_mixed_partial(&self, _set: IndexSet, _vars: IndexSet, _x: &[f64]) -> Option<f64> {
        None
    }

    /// The discrete spectral measure behind the model, if there is one.
    fn spectral_measure(&self) -> Option<&DiscreteSpectralMeasure> {
        None
    }

    fn ground(&self) -> IndexSet {
        IndexSet::full(self.dim()).expect("model dimension within limits")
    }

    /// `V^A(x_A)` with argument checks.
    fn exponent(&self, set: IndexSet, x: &EvaluationPoint) -> Result<f64> {
        check_point(self.dim(), x)?;
        set.require_non_empty()?;
        set.require_subset_of(self.ground())?;
        Ok(self.exponent_unchecked(set, x.as_slice()))
    }
}

/// `exp(−V(x))`, the joint CDF.
pub fn cdf<M: ExponentModel + ?Sized>(model: &M, x: &EvaluationPoint) -> Result<f64> {
    Ok((-model.exponent(model.ground(), x)?).exp())
}

pub(crate) fn check_point(dim: usize, x: &EvaluationPoint) -> Result<()> {
    if x.dim() != dim {
        return Err(Error::Domain(format!(
            "point has {} coordinates, model has {dim}",
            x.dim()
        )));
    }
    Ok(())
}

/// The table `{V^A(x_A)}` over every non-empty `A`.
pub fn exponent_table<M: ExponentModel + ?Sized>(
    model: &M,
    x: &EvaluationPoint,
) -> Result<LatticeTable> {
    check_point(model.dim(), x)?;
    let xs = x.as_slice();
    LatticeTable::from_fn(model.dim(), TableKind::Exponent, |s| {
        Ok(model.exponent_unchecked(s, xs))
    })
}
