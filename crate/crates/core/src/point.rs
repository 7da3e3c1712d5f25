use crate::error::{Error, Result};

/// A point of `(0, ∞)^I` on the unit-Fréchet scale.
#[derive(Clone, Debug, PartialEq)]
pub struct EvaluationPoint(Vec<f64>);

impl EvaluationPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyGroundSet);
        }
        if let Some((i, &v)) = coords
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v > 0.0))
        {
            return Err(Error::Domain(format!(
                "coordinate {i} must be strictly positive and finite, got {v}"
            )));
        }
        Ok(EvaluationPoint(coords))
    }

    /// `(v, v, ..., v)` in `dim` coordinates.
    pub fn constant(dim: usize, v: f64) -> Result<Self> {
        Self::new(vec![v; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn coord(&self, i: usize) -> f64 {
        self.0[i]
    }

    /// `t · x`, for `t > 0`.
    pub fn scaled(&self, t: f64) -> Result<Self> {
        Self::new(self.0.iter().map(|v| v * t).collect())
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for EvaluationPoint {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nonpositive_and_nonfinite() {
        assert!(EvaluationPoint::new(vec![1.0, 0.0]).is_err());
        assert!(EvaluationPoint::new(vec![-1.0]).is_err());
        assert!(EvaluationPoint::new(vec![f64::INFINITY]).is_err());
        assert!(EvaluationPoint::new(vec![f64::NAN]).is_err());
        assert!(EvaluationPoint::new(vec![]).is_err());
        assert!(EvaluationPoint::new(vec![1e-300, 1e300]).is_ok());
    }
}
