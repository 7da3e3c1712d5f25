//! JSON model files.
//!
//! ```json
//! {
//!   "kind": "max_linear",
//!   "indices": ["1", "4", "5"],
//!   "params": { "coefficients": [[1, 1, 1], [0, 1, 1], [0, 0, 1]], "renormalize": true },
//!   "flags": { "smooth_density": false }
//! }
//! ```
//!
//! `kind` is one of `discrete`, `max_linear`, `logistic`,
//! `asymmetric_logistic`; the full schema is in `docs/model-spec.md`.

use serde::Deserialize;

use super::{
    AsymmetricComponent, AsymmetricLogisticModel, Atom, DiscreteSpectralMeasure, ExponentModel,
    LogisticModel,
};
use crate::error::{Error, Result};
use crate::subset::{IndexSet, MAX_INDICES};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Discrete,
    MaxLinear,
    Logistic,
    AsymmetricLogistic,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Discrete => "discrete",
            ModelKind::MaxLinear => "max_linear",
            ModelKind::Logistic => "logistic",
            ModelKind::AsymmetricLogistic => "asymmetric_logistic",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
enum Label {
    Text(String),
    Number(i64),
}

impl Label {
    fn into_string(self) -> String {
        match self {
            Label::Text(s) => s,
            Label::Number(n) => n.to_string(),
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Flags {
    smooth_density: Option<bool>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    kind: ModelKind,
    indices: Vec<Label>,
    #[serde(default)]
    params: serde_json::Value,
    #[serde(default)]
    flags: Flags,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiscreteParams {
    atoms: Vec<RawAtom>,
    #[serde(default)]
    norm: Option<String>,
    #[serde(default)]
    renormalize: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAtom {
    weight: f64,
    direction: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MaxLinearParams {
    coefficients: Vec<Vec<f64>>,
    #[serde(default)]
    renormalize: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LogisticParams {
    alpha: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AsymmetricParams {
    components: Vec<RawComponent>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComponent {
    members: Vec<Label>,
    alpha: f64,
    /// One weight per member, in the order of `members`.
    theta: Vec<f64>,
}

/// A loaded model of any supported kind.
#[derive(Clone, Debug, PartialEq)]
pub enum Model {
    Discrete(DiscreteSpectralMeasure),
    Logistic(LogisticModel),
    AsymmetricLogistic(AsymmetricLogisticModel),
}

impl Model {
    fn inner(&self) -> &dyn ExponentModel {
        match self {
            Model::Discrete(m) => m,
            Model::Logistic(m) => m,
            Model::AsymmetricLogistic(m) => m,
        }
    }
}

impl ExponentModel for Model {
    fn dim(&self) -> usize {
        self.inner().dim()
    }

    fn exponent_unchecked(&self, set: IndexSet, x: &[f64]) -> f64 {
        self.inner().exponent_unchecked(set, x)
    }

    fn smooth_density(&self) -> bool {
        self.inner().smooth_density()
    }

    fn exact_mixed_partial(&self, set: IndexSet, vars: IndexSet, x: &[f64]) -> Option<f64> {
        self.inner().exact_mixed_partial(set, vars, x)
    }

    fn spectral_measure(&self) -> Option<&DiscreteSpectralMeasure> {
        self.inner().spectral_measure()
    }
}

/// A validated model together with its index labels.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub labels: Vec<String>,
    pub model: Model,
}

fn params<T: serde::de::DeserializeOwned>(kind: ModelKind, value: serde_json::Value) -> Result<T> {
    serde_json::from_value(value)
        .map_err(|e| Error::Spec(format!("invalid params for kind \"{}\": {e}", kind.name())))
}

impl ModelSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawSpec = serde_json::from_str(text).map_err(|e| Error::Spec(e.to_string()))?;
        let labels: Vec<String> = raw.indices.into_iter().map(Label::into_string).collect();
        if labels.is_empty() {
            return Err(Error::Spec("\"indices\" must list at least one label".into()));
        }
        if labels.len() > MAX_INDICES {
            return Err(Error::TooManyIndices {
                size: labels.len(),
                limit: MAX_INDICES,
            });
        }
        for (i, l) in labels.iter().enumerate() {
            if l.is_empty() || l.contains(['+', ';', ',']) || l.trim() != l {
                return Err(Error::Spec(format!("invalid index label {l:?}")));
            }
            if labels[..i].contains(l) {
                return Err(Error::Spec(format!("duplicate index label {l:?}")));
            }
        }
        let dim = labels.len();
        let smooth = raw.flags.smooth_density;
        let model = match raw.kind {
            ModelKind::Discrete => {
                let p: DiscreteParams = params(raw.kind, raw.params)?;
                let atoms = p
                    .atoms
                    .into_iter()
                    .map(|a| Atom::new(a.weight, a.direction))
                    .collect();
                let mut m = DiscreteSpectralMeasure::new(dim, atoms)?;
                if p.renormalize {
                    m = m.renormalized()?;
                }
                let m = m
                    .require_valid()?
                    .with_norm_tag(p.norm.unwrap_or_else(|| "unspecified".into()));
                Model::Discrete(m.with_smooth_density(smooth.unwrap_or(false)))
            }
            ModelKind::MaxLinear => {
                let p: MaxLinearParams = params(raw.kind, raw.params)?;
                if p.coefficients.iter().any(|r| r.len() != dim) {
                    return Err(Error::Spec(format!(
                        "every coefficient row needs {dim} entries, one per index"
                    )));
                }
                let m = DiscreteSpectralMeasure::max_linear(&p.coefficients, p.renormalize)?
                    .require_valid()?;
                Model::Discrete(m.with_smooth_density(smooth.unwrap_or(false)))
            }
            ModelKind::Logistic => {
                let p: LogisticParams = params(raw.kind, raw.params)?;
                let m = LogisticModel::new(dim, p.alpha)?;
                let flag = smooth.unwrap_or(m.smooth_density());
                Model::Logistic(m.with_smooth_density(flag))
            }
            ModelKind::AsymmetricLogistic => {
                let p: AsymmetricParams = params(raw.kind, raw.params)?;
                let components = p
                    .components
                    .into_iter()
                    .enumerate()
                    .map(|(k, c)| {
                        if c.members.len() != c.theta.len() {
                            return Err(Error::Spec(format!(
                                "component {k}: {} members but {} weights",
                                c.members.len(),
                                c.theta.len()
                            )));
                        }
                        let mut theta = vec![0.0; dim];
                        let mut members = IndexSet::EMPTY;
                        for (label, t) in c.members.into_iter().zip(c.theta) {
                            let label = label.into_string();
                            let i = labels.iter().position(|l| *l == label).ok_or_else(|| {
                                Error::Spec(format!("component {k}: unknown label {label:?}"))
                            })?;
                            if members.contains(i) {
                                return Err(Error::Spec(format!(
                                    "component {k}: label {label:?} repeated"
                                )));
                            }
                            members = members.union(IndexSet::singleton(i));
                            theta[i] = t;
                        }
                        Ok(AsymmetricComponent {
                            members,
                            alpha: c.alpha,
                            theta,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                let m = AsymmetricLogisticModel::new(dim, components)?;
                let flag = smooth.unwrap_or(m.smooth_density());
                Model::AsymmetricLogistic(m.with_smooth_density(flag))
            }
        };
        Ok(ModelSpec {
            kind: raw.kind,
            labels,
            model,
        })
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    /// Parses `"1+5"` into an index set using the model's labels.
    pub fn parse_set(&self, text: &str) -> Result<IndexSet> {
        let mut set = IndexSet::EMPTY;
        for part in text.split('+') {
            let part = part.trim();
            let i = self
                .labels
                .iter()
                .position(|l| l == part)
                .ok_or_else(|| Error::Spec(format!("unknown index label {part:?}")))?;
            set = set.union(IndexSet::singleton(i));
        }
        Ok(set)
    }

    /// Labels of `set` joined by `+`, in index order.
    pub fn format_set(&self, set: IndexSet) -> String {
        format_set(&self.labels, set)
    }
}

pub fn format_set(labels: &[String], set: IndexSet) -> String {
    set.iter()
        .map(|i| labels[i].as_str())
        .collect::<Vec<_>>()
        .join("+")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::EvaluationPoint;

    const EXAMPLE: &str = r#"{
        "kind": "max_linear",
        "indices": ["1", "4", "5"],
        "params": {"coefficients": [[1, 1, 1], [0, 1, 1], [0, 0, 1]], "renormalize": true}
    }"#;

    #[test]
    fn loads_max_linear() {
        let spec = ModelSpec::from_json(EXAMPLE).unwrap();
        assert_eq!(spec.labels, vec!["1", "4", "5"]);
        assert!(!spec.model.smooth_density());
        let x = EvaluationPoint::constant(3, 1.0).unwrap();
        let v = spec.model.exponent(spec.model.ground(), &x).unwrap();
        assert!((v - 11.0 / 6.0).abs() < 1e-15);
        assert_eq!(spec.parse_set("1+5").unwrap(), IndexSet::from_bits(0b101));
        assert_eq!(spec.format_set(IndexSet::from_bits(0b110)), "4+5");
    }

    #[test]
    fn loads_logistic_with_numeric_labels() {
        let spec = ModelSpec::from_json(
            r#"{"kind": "logistic", "indices": [1, 2, 3], "params": {"alpha": 0.5}}"#,
        )
        .unwrap();
        assert!(spec.model.smooth_density());
        assert_eq!(spec.labels, vec!["1", "2", "3"]);
    }

    #[test]
    fn loads_asymmetric_logistic() {
        let spec = ModelSpec::from_json(
            r#"{"kind": "asymmetric_logistic", "indices": ["a", "b"],
                "params": {"components": [
                    {"members": ["a"], "alpha": 1.0, "theta": [0.5]},
                    {"members": ["a", "b"], "alpha": 0.5, "theta": [0.5, 1.0]}
                ]}}"#,
        )
        .unwrap();
        assert!(spec.model.smooth_density());
    }

    #[test]
    fn flag_override() {
        let spec = ModelSpec::from_json(
            r#"{"kind": "logistic", "indices": ["1", "2"], "params": {"alpha": 0.5},
                "flags": {"smooth_density": false}}"#,
        )
        .unwrap();
        assert!(!spec.model.smooth_density());
    }

    #[test]
    fn malformed_json_reports_position() {
        let err = ModelSpec::from_json("{\"kind\": \"logistic\",\n \"indices\": [}").unwrap_err();
        match err {
            Error::Spec(msg) => assert!(msg.contains("line 2"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_kind_and_fields() {
        assert!(ModelSpec::from_json(r#"{"kind": "gaussian", "indices": ["1"]}"#).is_err());
        assert!(ModelSpec::from_json(
            r#"{"kind": "logistic", "indices": ["1"], "params": {"alpha": 0.5, "beta": 1}}"#
        )
        .is_err());
    }

    #[test]
    fn invalid_discrete_measure_is_rejected_on_load() {
        let err = ModelSpec::from_json(
            r#"{"kind": "discrete", "indices": ["1", "2"],
                "params": {"atoms": [{"weight": 2, "direction": [1, 0]},
                                     {"weight": 1, "direction": [0, 1]}]}}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::MomentCondition { coordinate: 0, .. }));
    }

    #[test]
    fn duplicate_labels_are_rejected() {
        assert!(ModelSpec::from_json(
            r#"{"kind": "logistic", "indices": ["1", "1"], "params": {"alpha": 0.5}}"#
        )
        .is_err());
    }
}
