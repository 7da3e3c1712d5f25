//! Densities of smooth max-stable models.
//!
//! With `V^N_J = ∂^{|J|} V^N / ∂x_J`, the mixed partials of the marginal CDF
//! are `G^N_M = W^N_M · exp(−V^N)` where
//! `W^N_M = Σ_{π ∈ Π(M)} (−1)^{|π|} Π_{J∈π} V^N_J`.
//! The full density of `X_A` is `W^A_A · exp(−V^A)`.

pub mod fd;

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::model::{check_point, ExponentModel};
use crate::partition::{bell_number, Partitions, MAX_PARTITION_SIZE};
use crate::point::EvaluationPoint;
use crate::subset::{pair_complement, IndexSet};

pub use fd::mixed_central_difference;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DerivativeMethod {
    FiniteDifference,
    #[default]
    ExactIfAvailable,
}

/// `V^A_B(x_A)`.
///
/// Finite differences need a model flagged smooth; the exact path falls
/// back to finite differences when the model has no closed form.
pub fn mixed_partial_v<M: ExponentModel + ?Sized>(
    model: &M,
    a: IndexSet,
    b: IndexSet,
    x: &EvaluationPoint,
    method: DerivativeMethod,
) -> Result<f64> {
    check_point(model.dim(), x)?;
    a.require_non_empty()?;
    a.require_subset_of(model.ground())?;
    b.require_non_empty()?;
    b.require_subset_of(a)?;
    partial_unchecked(model, a, b, x.as_slice(), method)
}

fn partial_unchecked<M: ExponentModel + ?Sized>(
    model: &M,
    a: IndexSet,
    b: IndexSet,
    x: &[f64],
    method: DerivativeMethod,
) -> Result<f64> {
    if method == DerivativeMethod::ExactIfAvailable {
        if let Some(v) = model.exact_mixed_partial(a, b, x) {
            return Ok(v);
        }
    }
    if !model.smooth_density() {
        return Err(Error::NonSmooth(
            "model has no exact derivatives and is not flagged as having a density".into(),
        ));
    }
    mixed_central_difference(|p| model.exponent_unchecked(a, p), x, b)
}

fn require_smooth<M: ExponentModel + ?Sized>(model: &M) -> Result<()> {
    if model.smooth_density() {
        Ok(())
    } else {
        Err(Error::NonSmooth(
            "operation needs a model with a positive continuous density".into(),
        ))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartitionSumResult {
    pub n: IndexSet,
    pub m: IndexSet,
    pub value: f64,
    pub partition_count: u64,
}

/// `W^N_M(x_N)`; `W^N_∅ = 1`.
pub fn partition_sum_w<M: ExponentModel + ?Sized>(
    model: &M,
    n: IndexSet,
    m: IndexSet,
    x: &EvaluationPoint,
    method: DerivativeMethod,
) -> Result<PartitionSumResult> {
    check_point(model.dim(), x)?;
    n.require_non_empty()?;
    n.require_subset_of(model.ground())?;
    m.require_subset_of(n)?;
    partition_sum_unchecked(model, n, m, x.as_slice(), method)
}

fn partition_sum_unchecked<M: ExponentModel + ?Sized>(
    model: &M,
    n: IndexSet,
    m: IndexSet,
    x: &[f64],
    method: DerivativeMethod,
) -> Result<PartitionSumResult> {
    if m.len() > MAX_PARTITION_SIZE {
        return Err(Error::TooManyIndices {
            size: m.len(),
            limit: MAX_PARTITION_SIZE,
        });
    }
    let mut cache: HashMap<u32, f64> = HashMap::new();
    let mut value = 0.0;
    let mut count = 0u64;
    for pi in Partitions::new(m)? {
        let mut term = if pi.len() % 2 == 0 { 1.0 } else { -1.0 };
        for &block in pi.blocks() {
            let d = match cache.get(&block.bits()) {
                Some(&d) => d,
                None => {
                    let d = partial_unchecked(model, n, block, x, method)?;
                    cache.insert(block.bits(), d);
                    d
                }
            };
            term *= d;
        }
        value += term;
        count += 1;
    }
    debug_assert_eq!(count, bell_number(m.len()));
    Ok(PartitionSumResult {
        n,
        m,
        value,
        partition_count: count,
    })
}

/// Density of `X_A` at `x_A`: `W^A_A(x_A) · exp(−V^A(x_A))`.
pub fn density<M: ExponentModel + ?Sized>(
    model: &M,
    a: IndexSet,
    x: &EvaluationPoint,
) -> Result<f64> {
    density_with(model, a, x, DerivativeMethod::ExactIfAvailable)
}

pub fn density_with<M: ExponentModel + ?Sized>(
    model: &M,
    a: IndexSet,
    x: &EvaluationPoint,
    method: DerivativeMethod,
) -> Result<f64> {
    require_smooth(model)?;
    let w = partition_sum_w(model, a, a, x, method)?.value;
    if !(w > 0.0) {
        return Err(Error::ModelInconsistency(format!(
            "density factor W = {w:e} is not positive although the model is flagged smooth"
        )));
    }
    Ok(w * (-model.exponent_unchecked(a, x.as_slice())).exp())
}

/// `P(X_A ≤ x_A | X_B = x_B)
///  = exp(−[V^{A∪B} − V^B]) · W^{A∪B}_B / W^B_B`.
pub fn conditional_cdf<M: ExponentModel + ?Sized>(
    model: &M,
    a: IndexSet,
    b: IndexSet,
    x: &EvaluationPoint,
) -> Result<f64> {
    conditional_cdf_with(model, a, b, x, DerivativeMethod::ExactIfAvailable)
}

pub fn conditional_cdf_with<M: ExponentModel + ?Sized>(
    model: &M,
    a: IndexSet,
    b: IndexSet,
    x: &EvaluationPoint,
    method: DerivativeMethod,
) -> Result<f64> {
    require_smooth(model)?;
    check_point(model.dim(), x)?;
    a.require_non_empty()?;
    b.require_non_empty()?;
    a.require_subset_of(model.ground())?;
    b.require_subset_of(model.ground())?;
    if a.intersects(b) {
        return Err(Error::Overlap { a, b });
    }
    let xs = x.as_slice();
    let ab = a.union(b);
    let num = partition_sum_unchecked(model, ab, b, xs, method)?.value;
    let den = partition_sum_unchecked(model, b, b, xs, method)?.value;
    if !(den > 0.0) {
        return Err(Error::ModelInconsistency(format!(
            "conditioning density factor W^B_B = {den:e} is not positive"
        )));
    }
    let gap = model.exponent_unchecked(ab, xs) - model.exponent_unchecked(b, xs);
    Ok((-gap).exp() * num / den)
}

/// Default `t` values `1, 2, 4, …, 256`.
pub fn default_t_grid() -> Vec<f64> {
    (0..=8).map(|k| f64::from(1u32 << k)).collect()
}

/// Exponential-versus-polynomial comparison along `x / t`.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthProbe {
    pub t: Vec<f64>,
    /// `log L(t) = d_{A,B}(x / t)`.
    pub log_l: Vec<f64>,
    /// `log R(t)` for the `W`-ratio side.
    pub log_r: Vec<f64>,
    /// Slope of `log L` against `t`.
    pub rate: f64,
    pub rate_r2: f64,
    /// Slope of `log R` against `log t`.
    pub poly_slope: f64,
    pub exponential: bool,
    pub ci_impossible: bool,
}

/// Least-squares slope and `R²` of `y` on `x`; a constant `y` fits
/// perfectly.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let slope = sxy / sxx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - my - slope * (a - mx)).powi(2))
        .sum();
    let r2 = if syy <= f64::MIN_POSITIVE {
        1.0
    } else {
        1.0 - ss_res / syy
    };
    (slope, r2)
}

/// Evaluates both sides of the identity
/// `exp(d_{A,B}(x)) = W^{A∪C}_C W^{B∪C}_C / (W^{A∪B∪C}_C W^C_C)`, which
/// conditional independence would force, along the ray `x / t`.
///
/// The left side grows like `exp(t · d_{A,B}(x))`, the right side at most
/// polynomially.
pub fn growth_probe<M: ExponentModel + ?Sized>(
    model: &M,
    a: IndexSet,
    b: IndexSet,
    x: &EvaluationPoint,
    t_grid: &[f64],
    tol: f64,
) -> Result<GrowthProbe> {
    require_smooth(model)?;
    check_point(model.dim(), x)?;
    let ground = model.ground();
    let c = pair_complement(ground, a, b)?;
    if t_grid.len() < 2 {
        return Err(Error::InvalidParameter("growth probe needs at least two t values".into()));
    }
    if t_grid.windows(2).any(|w| !(w[0] < w[1])) || !(t_grid[0] > 0.0) {
        return Err(Error::InvalidParameter(
            "t grid must be positive and strictly increasing".into(),
        ));
    }
    let method = DerivativeMethod::ExactIfAvailable;
    let mut log_l = Vec::with_capacity(t_grid.len());
    let mut log_r = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let xt = x.scaled(1.0 / t)?;
        log_l.push(crate::diagnostics::d_pair(model, a, b, &xt)?);
        let xs = xt.as_slice();
        let w = |n: IndexSet| -> Result<f64> {
            let v = partition_sum_unchecked(model, n, c, xs, method)?.value;
            if v > 0.0 {
                Ok(v.ln())
            } else {
                Err(Error::ModelInconsistency(format!(
                    "W^N_C = {v:e} is not positive for N = {n:?}"
                )))
            }
        };
        let wc = if c.is_empty() { 0.0 } else { w(c)? };
        log_r.push(w(a.union(c))? + w(b.union(c))? - w(a.union(b).union(c))? - wc);
    }
    let (rate, rate_r2) = linear_fit(t_grid, &log_l);
    let log_t: Vec<f64> = t_grid.iter().map(|t| t.ln()).collect();
    let (poly_slope, _) = linear_fit(&log_t, &log_r);
    let exponential = rate_r2 >= 0.999 && rate > 1e-6;
    Ok(GrowthProbe {
        t: t_grid.to_vec(),
        log_l,
        log_r,
        rate,
        rate_r2,
        poly_slope,
        exponential,
        ci_impossible: rate > tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DiscreteSpectralMeasure, LogisticModel};

    fn set(v: &[usize]) -> IndexSet {
        v.iter().copied().collect()
    }

    #[test]
    fn independence_first_derivative() {
        let m = LogisticModel::new(1, 1.0).unwrap();
        let x = EvaluationPoint::new(vec![2.0]).unwrap();
        for method in [DerivativeMethod::FiniteDifference, DerivativeMethod::ExactIfAvailable] {
            let d = mixed_partial_v(&m, set(&[0]), set(&[0]), &x, method).unwrap();
            assert!((d + 0.25).abs() < 1e-9, "{method:?}: {d}");
        }
    }

    #[test]
    fn logistic_fd_matches_closed_form() {
        let m = LogisticModel::new(2, 0.5).unwrap();
        let x = EvaluationPoint::constant(2, 1.0).unwrap();
        let ab = set(&[0, 1]);
        let fd = mixed_partial_v(&m, ab, ab, &x, DerivativeMethod::FiniteDifference).unwrap();
        // -(x1 x2)^-3 (x1^-2 + x2^-2)^(-3/2) at (1,1)
        let hand = -(2.0f64).powf(-1.5);
        assert!((fd - hand).abs() <= 1e-6 * hand.abs(), "{fd} vs {hand}");
    }

    #[test]
    fn mixed_partial_errors() {
        let disc = DiscreteSpectralMeasure::independence(2).unwrap();
        let x = EvaluationPoint::constant(2, 1.0).unwrap();
        assert!(matches!(
            mixed_partial_v(&disc, set(&[0, 1]), set(&[0]), &x, DerivativeMethod::FiniteDifference),
            Err(Error::NonSmooth(_))
        ));
        let m = LogisticModel::new(2, 0.5).unwrap();
        assert!(matches!(
            mixed_partial_v(&m, set(&[0]), set(&[1]), &x, DerivativeMethod::ExactIfAvailable),
            Err(Error::NotSubset { .. })
        ));
    }

    #[test]
    fn independence_partition_sum() {
        let m = LogisticModel::new(2, 1.0).unwrap();
        let x = EvaluationPoint::constant(2, 1.0).unwrap();
        let r = partition_sum_w(&m, set(&[0, 1]), set(&[0, 1]), &x, DerivativeMethod::default())
            .unwrap();
        assert_eq!(r.partition_count, 2);
        assert!((r.value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_block_partition_sum_is_positive() {
        let m = LogisticModel::new(3, 0.4).unwrap();
        let x = EvaluationPoint::new(vec![0.5, 1.5, 3.0]).unwrap();
        let n = set(&[0, 1, 2]);
        for i in 0..3 {
            let r = partition_sum_w(&m, n, set(&[i]), &x, DerivativeMethod::default()).unwrap();
            let v = mixed_partial_v(&m, n, set(&[i]), &x, DerivativeMethod::default()).unwrap();
            assert_eq!(r.value, -v);
            assert!(r.value > 0.0);
        }
    }

    #[test]
    fn empty_m_partition_sum_is_one() {
        let m = LogisticModel::new(2, 0.4).unwrap();
        let x = EvaluationPoint::constant(2, 1.0).unwrap();
        let r = partition_sum_w(&m, set(&[0]), IndexSet::EMPTY, &x, DerivativeMethod::default())
            .unwrap();
        assert_eq!((r.value, r.partition_count), (1.0, 1));
    }

    #[test]
    fn independence_density_at_one() {
        let m = LogisticModel::new(2, 1.0).unwrap();
        let x = EvaluationPoint::constant(2, 1.0).unwrap();
        let g = density(&m, set(&[0, 1]), &x).unwrap();
        assert!((g - (-2.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn density_refuses_discrete() {
        let m = DiscreteSpectralMeasure::independence(2).unwrap();
        let x = EvaluationPoint::constant(2, 1.0).unwrap();
        assert!(matches!(density(&m, set(&[0, 1]), &x), Err(Error::NonSmooth(_))));
    }

    #[test]
    fn conditional_cdf_independence_factorizes() {
        let m = LogisticModel::new(3, 1.0).unwrap();
        let x = EvaluationPoint::new(vec![0.7, 1.3, 2.0]).unwrap();
        let got = conditional_cdf(&m, set(&[0, 2]), set(&[1]), &x).unwrap();
        let expected = (-(1.0f64 / 0.7 + 1.0 / 2.0)).exp();
        assert!((got - expected).abs() < 1e-14);
    }

    #[test]
    fn conditional_cdf_tends_to_one() {
        let m = LogisticModel::new(2, 0.5).unwrap();
        let x = EvaluationPoint::new(vec![1e6, 1.0]).unwrap();
        let got = conditional_cdf(&m, set(&[0]), set(&[1]), &x).unwrap();
        assert!((got - 1.0).abs() < 1e-6);
    }

    #[test]
    fn independence_growth_probe_is_flat() {
        let m = LogisticModel::new(3, 1.0).unwrap();
        let x = EvaluationPoint::constant(3, 1.0).unwrap();
        let p = growth_probe(&m, set(&[0]), set(&[1]), &x, &default_t_grid(), 1e-9).unwrap();
        assert!(p.log_l.iter().all(|v| *v == 0.0));
        assert!(p.log_r.iter().all(|v| v.abs() < 1e-12));
        assert_eq!(p.rate, 0.0);
        assert!(!p.exponential && !p.ci_impossible);
    }

    #[test]
    fn growth_probe_refuses_non_smooth() {
        let m = DiscreteSpectralMeasure::independence(3).unwrap();
        let x = EvaluationPoint::constant(3, 1.0).unwrap();
        assert!(matches!(
            growth_probe(&m, set(&[0]), set(&[2]), &x, &default_t_grid(), 1e-9),
            Err(Error::NonSmooth(_))
        ));
    }

    #[test]
    fn linear_fit_exact_line() {
        let (s, r2) = linear_fit(&[1.0, 2.0, 4.0], &[3.0, 5.0, 9.0]);
        assert!((s - 2.0).abs() < 1e-14 && (r2 - 1.0).abs() < 1e-14);
    }
}
