//! Symmetric and asymmetric logistic exponent functions.
//!
//! Both are sums of terms `(Σ_{i∈S} y_i)^α` with `y_i = (θ_i / x_i)^{1/α}`,
//! whose mixed partials have the closed form
//! `∂^J s^α = α(α−1)…(α−|J|+1) · s^{α−|J|} · Π_{i∈J} (−y_i / (α x_i))`.

use super::ExponentModel;
use crate::error::{Error, Result};
use crate::subset::{IndexSet, MAX_INDICES};

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "dependence parameter alpha = {alpha} must lie in (0, 1]"
        )))
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::EmptyGroundSet);
    }
    if dim > MAX_INDICES {
        return Err(Error::TooManyIndices {
            size: dim,
            limit: MAX_INDICES,
        });
    }
    Ok(())
}

/// `∂^{vars} (Σ_{i∈set} (θ_i/x_i)^{1/α})^α`, zero unless `vars ⊆ set`.
fn logistic_term_partial(
    alpha: f64,
    theta: impl Fn(usize) -> f64,
    set: IndexSet,
    vars: IndexSet,
    x: &[f64],
) -> f64 {
    if !vars.is_subset_of(set) {
        return 0.0;
    }
    let inv = 1.0 / alpha;
    let y = |i: usize| (theta(i) / x[i]).powf(inv);
    let s: f64 = set.iter().map(y).sum();
    if s == 0.0 {
        return 0.0;
    }
    let k = vars.len();
    let falling: f64 = (0..k).map(|j| alpha - j as f64).product();
    if falling == 0.0 {
        return 0.0;
    }
    let prod: f64 = vars.iter().map(|i| -y(i) / (alpha * x[i])).product();
    falling * s.powf(alpha - k as f64) * prod
}

/// `V^A(x_A) = (Σ_{i∈A} x_i^{−1/α})^α`; `α = 1` is full independence.
#[derive(Clone, Debug, PartialEq)]
pub struct LogisticModel {
    dim: usize,
    alpha: f64,
    smooth_density: bool,
}

impl LogisticModel {
    pub fn new(dim: usize, alpha: f64) -> Result<Self> {
        check_dim(dim)?;
        check_alpha(alpha)?;
        Ok(LogisticModel {
            dim,
            alpha,
            smooth_density: true,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn with_smooth_density(mut self, smooth: bool) -> Self {
        self.smooth_density = smooth;
        self
    }
}

impl ExponentModel for LogisticModel {
    fn dim(&self) -> usize {
        self.dim
    }

    fn exponent_unchecked(&self, set: IndexSet, x: &[f64]) -> f64 {
        if self.alpha == 1.0 {
            return set.iter().map(|i| 1.0 / x[i]).sum();
        }
        let inv = 1.0 / self.alpha;
        let s: f64 = set.iter().map(|i| x[i].powf(-inv)).sum();
        s.powf(self.alpha)
    }

    fn smooth_density(&self) -> bool {
        self.smooth_density
    }

    fn exact_mixed_partial(&self, set: IndexSet, vars: IndexSet, x: &[f64]) -> Option<f64> {
        Some(logistic_term_partial(self.alpha, |_| 1.0, set, vars, x))
    }
}

/// One term of the asymmetric logistic model.
#[derive(Clone, Debug, PartialEq)]
pub struct AsymmetricComponent {
    pub members: IndexSet,
    pub alpha: f64,
    /// `θ_{i,B}` indexed by coordinate; zero outside `members`.
    pub theta: Vec<f64>,
}

/// `V(x) = Σ_B (Σ_{i∈B} (θ_{i,B}/x_i)^{1/α_B})^{α_B}` with
/// `Σ_{B∋i} θ_{i,B} = 1` for every `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct AsymmetricLogisticModel {
    dim: usize,
    components: Vec<AsymmetricComponent>,
    smooth_density: bool,
}

impl AsymmetricLogisticModel {
    /// Weight rows must sum to one within `1e-12`.
    ///
    /// The density flag defaults to `true` when every multi-index component
    /// has `α_B < 1` and the full index set carries a component with all
    /// weights positive.
    pub fn new(dim: usize, components: Vec<AsymmetricComponent>) -> Result<Self> {
        check_dim(dim)?;
        let ground = IndexSet::full(dim)?;
        let mut row_sums = vec![0.0; dim];
        for (k, c) in components.iter().enumerate() {
            c.members.require_non_empty()?;
            c.members.require_subset_of(ground)?;
            check_alpha(c.alpha)?;
            if c.theta.len() != dim {
                return Err(Error::InvalidParameter(format!(
                    "component {k} has {} weights, expected {dim}",
                    c.theta.len()
                )));
            }
            for (i, &t) in c.theta.iter().enumerate() {
                if !(t.is_finite() && t >= 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "weight theta[{i}] of component {k} must be finite and nonnegative, got {t}"
                    )));
                }
                if t > 0.0 && !c.members.contains(i) {
                    return Err(Error::InvalidParameter(format!(
                        "component {k} puts weight on coordinate {i} outside its members"
                    )));
                }
                row_sums[i] += t;
            }
        }
        if let Some((i, &s)) = row_sums
            .iter()
            .enumerate()
            .find(|(_, s)| (**s - 1.0).abs() > 1e-12)
        {
            return Err(Error::InvalidParameter(format!(
                "weights of coordinate {i} sum to {s}, expected 1"
            )));
        }
        let full_support = components
            .iter()
            .any(|c| c.members == ground && c.theta.iter().all(|&t| t > 0.0));
        let all_dependent = components
            .iter()
            .filter(|c| c.members.len() >= 2)
            .all(|c| c.alpha < 1.0);
        Ok(AsymmetricLogisticModel {
            dim,
            components,
            smooth_density: full_support && all_dependent,
        })
    }

    pub fn components(&self) -> &[AsymmetricComponent] {
        &self.components
    }

    pub fn with_smooth_density(mut self, smooth: bool) -> Self {
        self.smooth_density = smooth;
        self
    }
}

impl ExponentModel for AsymmetricLogisticModel {
    fn dim(&self) -> usize {
        self.dim
    }

    fn exponent_unchecked(&self, set: IndexSet, x: &[f64]) -> f64 {
        self.components
            .iter()
            .map(|c| {
                let inv = 1.0 / c.alpha;
                let s: f64 = c
                    .members
                    .intersection(set)
                    .iter()
                    .map(|i| (c.theta[i] / x[i]).powf(inv))
                    .sum();
                if s == 0.0 {
                    0.0
                } else {
                    s.powf(c.alpha)
                }
            })
            .sum()
    }

    fn smooth_density(&self) -> bool {
        self.smooth_density
    }

    fn exact_mixed_partial(&self, set: IndexSet, vars: IndexSet, x: &[f64]) -> Option<f64> {
        Some(
            self.components
                .iter()
                .map(|c| {
                    logistic_term_partial(
                        c.alpha,
                        |i| c.theta[i],
                        c.members.intersection(set),
                        vars,
                        x,
                    )
                })
                .sum(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DiscreteSpectralMeasure;
    use crate::point::EvaluationPoint;

    fn set(v: &[usize]) -> IndexSet {
        v.iter().copied().collect()
    }

    #[test]
    fn bivariate_value_at_one() {
        let m = LogisticModel::new(2, 0.5).unwrap();
        let x = EvaluationPoint::constant(2, 1.0).unwrap();
        let v = m.exponent(m.ground(), &x).unwrap();
        assert!((v - std::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn alpha_one_is_independence() {
        let m = LogisticModel::new(4, 1.0).unwrap();
        let ind = DiscreteSpectralMeasure::independence(4).unwrap();
        let x = EvaluationPoint::new(vec![0.3, 1.7, 2.0, 9.0]).unwrap();
        for mask in 1..16u32 {
            let s = IndexSet::from_bits(mask);
            let a = m.exponent(s, &x).unwrap();
            let b = ind.exponent(s, &x).unwrap();
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn rejects_bad_alpha() {
        assert!(LogisticModel::new(2, 0.0).is_err());
        assert!(LogisticModel::new(2, 1.2).is_err());
        assert!(LogisticModel::new(2, f64::NAN).is_err());
    }

    #[test]
    fn bivariate_mixed_partial_by_hand() {
        // V = (x1^-2 + x2^-2)^(1/2); ∂1∂2 V = -x1^-3 x2^-3 (x1^-2 + x2^-2)^(-3/2)
        let m = LogisticModel::new(2, 0.5).unwrap();
        let x = [1.3f64, 0.7];
        let s = x[0].powi(-2) + x[1].powi(-2);
        let hand = -x[0].powi(-3) * x[1].powi(-3) * s.powf(-1.5);
        let got = m.exact_mixed_partial(set(&[0, 1]), set(&[0, 1]), &x).unwrap();
        assert!((got - hand).abs() < 1e-14 * hand.abs());
        // ∂1 V = -x1^-3 s^(-1/2)
        let hand1 = -x[0].powi(-3) * s.powf(-0.5);
        let got1 = m.exact_mixed_partial(set(&[0, 1]), set(&[0]), &x).unwrap();
        assert!((got1 - hand1).abs() < 1e-14 * hand1.abs());
    }

    fn three_dim_asymmetric() -> AsymmetricLogisticModel {
        AsymmetricLogisticModel::new(
            3,
            vec![
                AsymmetricComponent {
                    members: set(&[0]),
                    alpha: 1.0,
                    theta: vec![0.4, 0.0, 0.0],
                },
                AsymmetricComponent {
                    members: set(&[0, 1]),
                    alpha: 0.6,
                    theta: vec![0.3, 0.5, 0.0],
                },
                AsymmetricComponent {
                    members: set(&[0, 1, 2]),
                    alpha: 0.4,
                    theta: vec![0.3, 0.5, 1.0],
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn asymmetric_margins_are_unit_frechet() {
        let m = three_dim_asymmetric();
        assert!(m.smooth_density());
        for &v in &[0.1, 0.5, 1.0, 3.0, 20.0] {
            let x = EvaluationPoint::constant(3, v).unwrap();
            for i in 0..3 {
                let got = m.exponent(IndexSet::singleton(i), &x).unwrap();
                assert!((got - 1.0 / v).abs() <= 1e-12 / v);
            }
        }
    }

    #[test]
    fn asymmetric_rejects_bad_rows() {
        let err = AsymmetricLogisticModel::new(
            2,
            vec![AsymmetricComponent {
                members: set(&[0, 1]),
                alpha: 0.5,
                theta: vec![0.5, 1.0],
            }],
        );
        assert!(err.is_err());
    }

    #[test]
    fn asymmetric_partial_matches_finite_difference() {
        let m = three_dim_asymmetric();
        let x = [0.8, 1.1, 1.9];
        let h = 1e-5;
        let f = |x0: f64| m.exponent_unchecked(set(&[0, 1, 2]), &[x0, x[1], x[2]]);
        let fd = (f(x[0] + h) - f(x[0] - h)) / (2.0 * h);
        let exact = m.exact_mixed_partial(set(&[0, 1, 2]), set(&[0]), &x).unwrap();
        assert!((fd - exact).abs() < 1e-8);
    }
}
