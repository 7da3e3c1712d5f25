use crate::error::{Error, Result};
use crate::point::EvaluationPoint;

/// Levels of the default tensor grid.
pub const DEFAULT_LEVELS: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];

/// Largest number of points a tensor grid keeps.
pub const MAX_GRID_POINTS: usize = 100_000;

/// A finite set of evaluation points.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    points: Vec<EvaluationPoint>,
}

impl Grid {
    pub fn from_points(points: Vec<EvaluationPoint>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::Domain("grid has no points".into()));
        };
        let dim = first.dim();
        if points.iter().any(|p| p.dim() != dim) {
            return Err(Error::Domain("grid points differ in dimension".into()));
        }
        Ok(Grid { points })
    }

    pub fn single(point: EvaluationPoint) -> Self {
        Grid {
            points: vec![point],
        }
    }

    /// `levels^dim` for the default levels.
    pub fn default_for(dim: usize) -> Result<Self> {
        Self::tensor(&DEFAULT_LEVELS, dim)
    }

    /// The tensor product `levels^dim`, first coordinate varying slowest.
    ///
    /// Above [`MAX_GRID_POINTS`] points the grid is thinned to the evenly
    /// spaced linear indices `⌊k · total / MAX⌋`.
    pub fn tensor(levels: &[f64], dim: usize) -> Result<Self> {
        if levels.is_empty() || dim == 0 {
            return Err(Error::Domain("tensor grid needs levels and dimension".into()));
        }
        let base = levels.len() as u128;
        let total = base
            .checked_pow(dim as u32)
            .ok_or_else(|| Error::Domain("tensor grid too large".into()))?;
        let picks: Vec<u128> = if total <= MAX_GRID_POINTS as u128 {
            (0..total).collect()
        } else {
            (0..MAX_GRID_POINTS as u128)
                .map(|k| k * total / MAX_GRID_POINTS as u128)
                .collect()
        };
        let points = picks
            .into_iter()
            .map(|mut idx| {
                let mut coords = vec![0.0; dim];
                for c in coords.iter_mut().rev() {
                    *c = levels[(idx % base) as usize];
                    idx /= base;
                }
                EvaluationPoint::new(coords)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Grid { points })
    }

    pub fn points(&self) -> &[EvaluationPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_sizes() {
        assert_eq!(Grid::default_for(3).unwrap().len(), 125);
        assert_eq!(Grid::default_for(7).unwrap().len(), 78_125);
        assert_eq!(Grid::default_for(8).unwrap().len(), MAX_GRID_POINTS);
    }

    #[test]
    fn tensor_order() {
        let g = Grid::tensor(&[1.0, 2.0], 2).unwrap();
        let pts: Vec<Vec<f64>> = g.points().iter().map(|p| p.as_slice().to_vec()).collect();
        assert_eq!(
            pts,
            vec![vec![1.0, 1.0], vec![1.0, 2.0], vec![2.0, 1.0], vec![2.0, 2.0]]
        );
    }

    #[test]
    fn thinning_is_deterministic() {
        let a = Grid::default_for(9).unwrap();
        let b = Grid::default_for(9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_nonpositive_levels() {
        assert!(Grid::tensor(&[0.0, 1.0], 2).is_err());
    }
}
