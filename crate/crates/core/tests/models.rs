use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use xstable::model::{cdf, MOMENT_TOLERANCE};
use xstable::subset::{subsets_of_dim, IndexSet};
use xstable::verify::fixtures::{block_product_logistic, max_linear_triple, random_points};
use xstable::{
    AsymmetricComponent, AsymmetricLogisticModel, Atom, DiscreteSpectralMeasure, Error,
    EvaluationPoint, ExponentModel, LogisticModel, Model, ModelKind, ModelSpec,
};

fn set(v: &[usize]) -> IndexSet {
    v.iter().copied().collect()
}

fn pt(v: &[f64]) -> EvaluationPoint {
    EvaluationPoint::new(v.to_vec()).unwrap()
}

fn models() -> Vec<Box<dyn ExponentModel>> {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    vec![
        Box::new(max_linear_triple()),
        Box::new(DiscreteSpectralMeasure::random(4, 6, &mut rng).unwrap()),
        Box::new(LogisticModel::new(3, 0.5).unwrap()),
        Box::new(LogisticModel::new(4, 0.85).unwrap()),
        Box::new(block_product_logistic().unwrap()),
    ]
}

#[test]
fn logistic_value_at_one() {
    let m = LogisticModel::new(2, 0.5).unwrap();
    let v = m.exponent(m.ground(), &pt(&[1.0, 1.0])).unwrap();
    assert!((v - 2f64.sqrt()).abs() < 1e-15);
    assert!(m.smooth_density());
    // α = 1 is independence, whose product density is smooth too
    assert!(LogisticModel::new(2, 1.0).unwrap().smooth_density());
}

#[test]
fn logistic_alpha_one_is_independence() {
    let m = LogisticModel::new(4, 1.0).unwrap();
    let ind = DiscreteSpectralMeasure::independence(4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for x in random_points(4, 25, 0.1, 10.0, &mut rng) {
        for s in subsets_of_dim(4).unwrap() {
            let a = m.exponent(s, &x).unwrap();
            let b = ind.exponent(s, &x).unwrap();
            assert!((a - b).abs() <= 1e-14 * b, "{s:?}: {a} vs {b}");
        }
    }
}

#[test]
fn bad_parameters_are_rejected() {
    assert!(matches!(LogisticModel::new(3, 0.0), Err(Error::InvalidParameter(_))));
    assert!(matches!(LogisticModel::new(3, 1.5), Err(Error::InvalidParameter(_))));
    assert!(matches!(LogisticModel::new(0, 0.5), Err(Error::EmptyGroundSet)));
    let comps = vec![AsymmetricComponent {
        members: set(&[0, 1]),
        alpha: 0.5,
        theta: vec![0.5, 1.0],
    }];
    assert!(matches!(AsymmetricLogisticModel::new(2, comps), Err(Error::InvalidParameter(_))));
    let m = LogisticModel::new(2, 0.5).unwrap();
    assert!(matches!(m.exponent(m.ground(), &pt(&[1.0])), Err(Error::Domain(_))));
    assert!(EvaluationPoint::new(vec![1.0, -2.0]).is_err());
    assert!(EvaluationPoint::new(vec![1.0, f64::INFINITY]).is_err());
}

#[test]
fn asymmetric_logistic_smooth_flag() {
    let m = block_product_logistic().unwrap();
    assert!(m.smooth_density());
    let full = AsymmetricLogisticModel::new(
        2,
        vec![
            AsymmetricComponent { members: set(&[0]), alpha: 1.0, theta: vec![0.5, 0.0] },
            AsymmetricComponent { members: set(&[0, 1]), alpha: 0.6, theta: vec![0.5, 1.0] },
        ],
    )
    .unwrap();
    assert!(full.smooth_density());
    let split = AsymmetricLogisticModel::new(
        2,
        vec![
            AsymmetricComponent { members: set(&[0]), alpha: 1.0, theta: vec![1.0, 0.0] },
            AsymmetricComponent { members: set(&[1]), alpha: 1.0, theta: vec![0.0, 1.0] },
        ],
    )
    .unwrap();
    assert!(!split.smooth_density());
}

#[test]
fn moment_validation_reports_sums() {
    let doubled = DiscreteSpectralMeasure::new(
        2,
        vec![Atom::new(2.0, vec![1.0, 0.0]), Atom::new(2.0, vec![0.0, 1.0])],
    )
    .unwrap();
    let r = doubled.validate();
    assert!(!r.passed);
    assert_eq!(r.moment_sums, vec![2.0, 2.0]);
    assert!(matches!(doubled.clone().require_valid(), Err(Error::MomentCondition { .. })));
    let fixed = doubled.renormalized().unwrap();
    assert!(fixed.validate().max_deviation <= MOMENT_TOLERANCE);
}

#[test]
fn max_linear_identity_is_independence() {
    let eye = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
    let m = DiscreteSpectralMeasure::max_linear(&eye, false).unwrap();
    let x = pt(&[0.5, 2.0, 3.0]);
    let v = m.exponent(m.ground(), &x).unwrap();
    assert!((v - (2.0 + 0.5 + 1.0 / 3.0)).abs() < 1e-15);
}

#[test]
fn degenerate_margin_is_rejected() {
    let rows = vec![vec![1.0, 0.0], vec![1.0, 0.0]];
    assert!(matches!(
        DiscreteSpectralMeasure::max_linear(&rows, true),
        Err(Error::DegenerateMargin { coordinate: 1 })
    ));
    assert!(matches!(
        DiscreteSpectralMeasure::new(2, vec![Atom::new(1.0, vec![0.0, 0.0])]),
        Err(Error::ZeroDirection { atom: 0 })
    ));
}

#[test]
fn example_triple_values() {
    let m = max_linear_triple();
    let v = |s: &[usize], x: &[f64]| m.exponent(set(s), &pt(x)).unwrap();
    let one = [1.0, 1.0, 1.0];
    assert!((v(&[0, 1, 2], &one) - 11.0 / 6.0).abs() < 1e-15);
    assert!((v(&[0, 2], &one) - 5.0 / 3.0).abs() < 1e-15);
    assert!((v(&[1], &[1.0, 2.0, 1.0]) - 0.5).abs() < 1e-15);
    let c = cdf(&m, &pt(&one)).unwrap();
    assert!((c - (-11.0f64 / 6.0).exp()).abs() < 1e-15);
}

const SPEC_EXAMPLE: &str = r#"{
    "kind": "max_linear",
    "indices": ["1", "4", "5"],
    "params": { "coefficients": [[1, 1, 1], [0, 1, 1], [0, 0, 1]], "renormalize": true },
    "flags": { "smooth_density": false }
}"#;

#[test]
fn spec_loading() {
    let spec = ModelSpec::from_json(SPEC_EXAMPLE).unwrap();
    assert_eq!(spec.kind, ModelKind::MaxLinear);
    assert_eq!(spec.labels, vec!["1", "4", "5"]);
    assert_eq!(spec.parse_set("1+5").unwrap(), set(&[0, 2]));
    assert_eq!(spec.format_set(set(&[1, 2])), "4+5");
    let x = pt(&[1.0, 1.0, 1.0]);
    assert!((spec.model.exponent(spec.model.ground(), &x).unwrap() - 11.0 / 6.0).abs() < 1e-15);

    let logistic = ModelSpec::from_json(
        r#"{"kind": "logistic", "indices": [1, 2, 3], "params": {"alpha": 0.5}}"#,
    )
    .unwrap();
    assert!(matches!(logistic.model, Model::Logistic(_)));
    assert!(logistic.model.smooth_density());

    let asym = ModelSpec::from_json(
        r#"{"kind": "asymmetric_logistic", "indices": ["a", "b"],
            "params": {"components": [
                {"members": ["a"], "alpha": 1.0, "theta": [0.4]},
                {"members": ["a", "b"], "alpha": 0.5, "theta": [0.6, 1.0]}]}}"#,
    )
    .unwrap();
    assert!(asym.model.smooth_density());

    let discrete = ModelSpec::from_json(
        r#"{"kind": "discrete", "indices": ["p", "q"],
            "params": {"atoms": [{"weight": 1, "direction": [1, 1]}], "norm": "sup"}}"#,
    )
    .unwrap();
    assert!(discrete.model.spectral_measure().is_some());
}

#[test]
fn spec_errors() {
    let bad = [
        "not json",
        r#"{"kind": "gaussian", "indices": ["1"]}"#,
        r#"{"kind": "logistic", "indices": [], "params": {"alpha": 0.5}}"#,
        r#"{"kind": "logistic", "indices": ["1", "1"], "params": {"alpha": 0.5}}"#,
        r#"{"kind": "logistic", "indices": ["1+2"], "params": {"alpha": 0.5}}"#,
        r#"{"kind": "logistic", "indices": ["1"], "params": {"alpha": 0.5, "beta": 1}}"#,
        r#"{"kind": "logistic", "indices": ["1"], "params": {"alpha": 0.5}, "extra": 1}"#,
        r#"{"kind": "max_linear", "indices": ["1", "2"], "params": {"coefficients": [[1]]}}"#,
        r#"{"kind": "max_linear", "indices": ["1", "2"], "params": {"coefficients": [[1, 1], [0, 1]]}}"#,
        r#"{"kind": "asymmetric_logistic", "indices": ["a"],
            "params": {"components": [{"members": ["z"], "alpha": 1.0, "theta": [1.0]}]}}"#,
    ];
    for text in bad {
        assert!(ModelSpec::from_json(text).is_err(), "accepted {text}");
    }
    // max_linear without renormalization checks the moment condition
    let err = ModelSpec::from_json(
        r#"{"kind": "max_linear", "indices": ["1", "2"], "params": {"coefficients": [[1, 1], [0, 1]]}}"#,
    )
    .unwrap_err();
    assert!(matches!(err, Error::MomentCondition { .. }), "{err}");
    let spec = ModelSpec::from_json(SPEC_EXAMPLE).unwrap();
    assert!(spec.parse_set("2").is_err());
}

proptest! {
    #[test]
    fn homogeneity(k in 0usize..5, seed in any::<u64>(), ti in 0usize..3) {
        let t = [0.1, 1.0, 7.3][ti];
        let m = &models()[k];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_points(m.dim(), 1, 0.1, 10.0, &mut rng).remove(0);
        let xt = x.scaled(t).unwrap();
        for s in subsets_of_dim(m.dim()).unwrap() {
            let v = m.exponent(s, &x).unwrap();
            let vt = m.exponent(s, &xt).unwrap();
            prop_assert!((t * vt - v).abs() <= 1e-12 * v, "{s:?}: {} vs {v}", t * vt);
        }
    }

    #[test]
    fn unit_margins(k in 0usize..5, seed in any::<u64>()) {
        let m = &models()[k];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_points(m.dim(), 1, 0.1, 10.0, &mut rng).remove(0);
        for i in 0..m.dim() {
            let v = m.exponent(IndexSet::singleton(i), &x).unwrap();
            prop_assert!((v - 1.0 / x.coord(i)).abs() <= 1e-13 / x.coord(i));
        }
    }

    #[test]
    fn monotone_in_sets_and_points(k in 0usize..5, seed in any::<u64>()) {
        let m = &models()[k];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_points(m.dim(), 1, 0.1, 10.0, &mut rng).remove(0);
        let mut bigger = x.clone().into_inner();
        bigger[0] *= 1.7;
        let y = EvaluationPoint::new(bigger).unwrap();
        let sets = subsets_of_dim(m.dim()).unwrap();
        for &a in &sets {
            let va = m.exponent(a, &x).unwrap();
            prop_assert!(m.exponent(a, &y).unwrap() <= va * (1.0 + 1e-14));
            for &b in &sets {
                if a.is_subset_of(b) {
                    prop_assert!(va <= m.exponent(b, &x).unwrap() * (1.0 + 1e-14));
                }
            }
        }
    }
}
