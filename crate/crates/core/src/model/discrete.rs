use rand::Rng;

use super::{check_point, ExponentModel};
use crate::error::{Error, Result};
use crate::lattice::{LatticeTable, TableKind};
use crate::point::EvaluationPoint;
use crate::subset::{pair_complement, IndexSet, MAX_INDICES};

/// Tolerance on `Σ_k m_k ω_{k,i} = 1`.
pub const MOMENT_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub weight: f64,
    pub direction: Vec<f64>,
}

impl Atom {
    pub fn new(weight: f64, direction: Vec<f64>) -> Self {
        Atom { weight, direction }
    }

    /// `m ω_i / x_i`.
    #[inline]
    fn scaled(&self, i: usize, x: &[f64]) -> f64 {
        self.weight * self.direction[i] / x[i]
    }

    fn max_over(&self, set: IndexSet, x: &[f64]) -> f64 {
        // max(∅) = 0
        set.iter().map(|i| self.scaled(i, x)).fold(0.0, f64::max)
    }

    fn min_over(&self, set: IndexSet, x: &[f64]) -> f64 {
        set.iter()
            .map(|i| self.scaled(i, x))
            .fold(f64::INFINITY, f64::min)
    }

    fn support(&self) -> IndexSet {
        self.direction
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Per-coordinate moment sums of a spectral measure.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub moment_sums: Vec<f64>,
    pub max_deviation: f64,
    pub passed: bool,
}

/// A spectral measure with finitely many atoms `(m_k, ω_k)`.
///
/// Only the products `m_k ω_k` enter any formula, so directions are kept as
/// given and the reference norm is recorded as a tag.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteSpectralMeasure {
    dim: usize,
    atoms: Vec<Atom>,
    norm_tag: String,
    smooth_density: bool,
}

impl DiscreteSpectralMeasure {
    /// Checks atom structure only; moment conditions are reported by
    /// [`validate`](Self::validate).
    pub fn new(dim: usize, atoms: Vec<Atom>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyGroundSet);
        }
        if dim > MAX_INDICES {
            return Err(Error::TooManyIndices {
                size: dim,
                limit: MAX_INDICES,
            });
        }
        if atoms.is_empty() {
            return Err(Error::InvalidParameter(
                "spectral measure needs at least one atom".into(),
            ));
        }
        for (k, atom) in atoms.iter().enumerate() {
            if !(atom.weight.is_finite() && atom.weight > 0.0) {
                return Err(Error::NonPositiveWeight {
                    atom: k,
                    weight: atom.weight,
                });
            }
            if atom.direction.len() != dim {
                return Err(Error::InvalidParameter(format!(
                    "atom {k} has {} coordinates, expected {dim}",
                    atom.direction.len()
                )));
            }
            if let Some(&bad) = atom
                .direction
                .iter()
                .find(|w| !(w.is_finite() && **w >= 0.0))
            {
                return Err(Error::InvalidDirection {
                    atom: k,
                    value: bad,
                });
            }
            if atom.direction.iter().all(|&w| w == 0.0) {
                return Err(Error::ZeroDirection { atom: k });
            }
        }
        Ok(DiscreteSpectralMeasure {
            dim,
            atoms,
            norm_tag: "unspecified".into(),
            smooth_density: false,
        })
    }

    /// Unit atoms `e_1, ..., e_d` with weight 1: full independence.
    pub fn independence(dim: usize) -> Result<Self> {
        let atoms = (0..dim)
            .map(|k| {
                let mut w = vec![0.0; dim];
                w[k] = 1.0;
                Atom::new(1.0, w)
            })
            .collect();
        Ok(Self::new(dim, atoms)?.with_norm_tag("l1"))
    }

    /// Spectral measure of `X_i = max_k c_{k,i} Z_k` with i.i.d. standard
    /// Fréchet `Z_k`; `coefficients[k][i] = c_{k,i}`.
    ///
    /// Columns must sum to one unless `renormalize` is set, in which case
    /// column `i` is divided by its sum. Rows of zeros contribute nothing and
    /// are dropped.
    pub fn max_linear(coefficients: &[Vec<f64>], renormalize: bool) -> Result<Self> {
        let dim = coefficients.first().map_or(0, |r| r.len());
        if dim == 0 {
            return Err(Error::EmptyGroundSet);
        }
        let mut sums = vec![0.0; dim];
        for (k, row) in coefficients.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::InvalidParameter(format!(
                    "coefficient row {k} has {} entries, expected {dim}",
                    row.len()
                )));
            }
            for (i, &c) in row.iter().enumerate() {
                if !(c.is_finite() && c >= 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "coefficient ({k}, {i}) = {c} must be finite and nonnegative"
                    )));
                }
                sums[i] += c;
            }
        }
        if let Some(i) = sums.iter().position(|&s| s == 0.0) {
            return Err(Error::DegenerateMargin { coordinate: i });
        }
        if !renormalize {
            if let Some((i, &s)) = sums
                .iter()
                .enumerate()
                .find(|(_, s)| (**s - 1.0).abs() > MOMENT_TOLERANCE)
            {
                return Err(Error::MomentCondition {
                    coordinate: i,
                    sum: s,
                });
            }
        }
        let atoms = coefficients
            .iter()
            .filter_map(|row| {
                let scaled: Vec<f64> = if renormalize {
                    row.iter().zip(&sums).map(|(c, s)| c / s).collect()
                } else {
                    row.clone()
                };
                let mass: f64 = scaled.iter().sum();
                (mass > 0.0).then(|| Atom::new(mass, scaled.iter().map(|c| c / mass).collect()))
            })
            .collect();
        Ok(Self::new(dim, atoms)?.with_norm_tag("l1"))
    }

    /// A random valid measure: `n_atoms` atoms with sparse random directions,
    /// renormalized to satisfy the moment conditions.
    pub fn random<R: Rng + ?Sized>(dim: usize, n_atoms: usize, rng: &mut R) -> Result<Self> {
        let atoms = (0..n_atoms)
            .map(|k| {
                let mut w: Vec<f64> = (0..dim)
                    .map(|_| {
                        if rng.random::<f64>() < 0.3 {
                            0.0
                        } else {
                            rng.random_range(0.05..1.0)
                        }
                    })
                    .collect();
                // keep every coordinate covered and every atom non-zero
                for i in (0..dim).filter(|i| i % n_atoms.max(1) == k) {
                    if w[i] == 0.0 {
                        w[i] = rng.random_range(0.05..1.0);
                    }
                }
                if w.iter().all(|&v| v == 0.0) {
                    w[rng.random_range(0..dim)] = rng.random_range(0.05..1.0);
                }
                Atom::new(rng.random_range(0.5..2.0), w)
            })
            .collect();
        Self::new(dim, atoms)?.renormalized()
    }

    pub fn with_norm_tag(mut self, tag: impl Into<String>) -> Self {
        self.norm_tag = tag.into();
        self
    }

    /// Overrides the density flag (default `false`).
    pub fn with_smooth_density(mut self, smooth: bool) -> Self {
        self.smooth_density = smooth;
        self
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn norm_tag(&self) -> &str {
        &self.norm_tag
    }

    pub fn moment_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.dim];
        for atom in &self.atoms {
            for (s, w) in sums.iter_mut().zip(&atom.direction) {
                *s += atom.weight * w;
            }
        }
        sums
    }

    pub fn validate(&self) -> ValidationReport {
        let moment_sums = self.moment_sums();
        let max_deviation = moment_sums
            .iter()
            .fold(0.0f64, |m, s| m.max((s - 1.0).abs()));
        ValidationReport {
            passed: max_deviation <= MOMENT_TOLERANCE,
            moment_sums,
            max_deviation,
        }
    }

    /// Fails with the first coordinate that violates its moment condition.
    pub fn require_valid(self) -> Result<Self> {
        let report = self.validate();
        if report.passed {
            return Ok(self);
        }
        let (coordinate, &sum) = report
            .moment_sums
            .iter()
            .enumerate()
            .find(|(_, s)| (**s - 1.0).abs() > MOMENT_TOLERANCE)
            .expect("a failing coordinate exists");
        Err(Error::MomentCondition { coordinate, sum })
    }

    /// Rescales coordinate `i` of every direction by `1 / Σ_k m_k ω_{k,i}`.
    pub fn renormalized(&self) -> Result<Self> {
        let sums = self.moment_sums();
        if let Some(i) = sums.iter().position(|&s| s == 0.0) {
            return Err(Error::DegenerateMargin { coordinate: i });
        }
        let mut out = self.clone();
        for atom in &mut out.atoms {
            for (w, s) in atom.direction.iter_mut().zip(&sums) {
                *w /= s;
            }
        }
        Ok(out)
    }

    /// Exact `(d, χ)` tables from the atom sums
    /// `d_A = Σ_k m_k [min_{i∈A} ω_{k,i}/x_i − max_{j∉A} ω_{k,j}/x_j]_+` and
    /// `χ_A = Σ_k m_k min_{i∈A} ω_{k,i}/x_i`.
    pub fn atom_tables(&self, x: &EvaluationPoint) -> Result<(LatticeTable, LatticeTable)> {
        check_point(self.dim, x)?;
        let xs = x.as_slice();
        let ground = self.ground();
        let d = LatticeTable::from_fn(self.dim, TableKind::Mobius, |a| {
            let rest = ground.difference(a);
            Ok(self
                .atoms
                .iter()
                .map(|atom| (atom.min_over(a, xs) - atom.max_over(rest, xs)).max(0.0))
                .sum())
        })?;
        let chi = LatticeTable::from_fn(self.dim, TableKind::Chi, |a| {
            Ok(self.atoms.iter().map(|atom| atom.min_over(a, xs)).sum())
        })?;
        Ok((d, chi))
    }

    /// Exact `(d_{A,B}(x), χ_{A,B}(x_{A∪B}))` from the atom sums, with
    /// `C = I ∖ (A ∪ B)` possibly empty.
    pub fn atom_pair(&self, a: IndexSet, b: IndexSet, x: &EvaluationPoint) -> Result<(f64, f64)> {
        check_point(self.dim, x)?;
        let c = pair_complement(self.ground(), a, b)?;
        let xs = x.as_slice();
        let mut d = 0.0;
        let mut chi = 0.0;
        for atom in &self.atoms {
            let m = atom.max_over(a, xs).min(atom.max_over(b, xs));
            chi += m;
            d += (m - atom.max_over(c, xs)).max(0.0);
        }
        Ok((d, chi))
    }

    /// Exact certificate for `χ_{A,B} ≡ 0`: no atom charges both an
    /// `A`-coordinate and a `B`-coordinate.
    pub fn pair_independent_exactly(&self, a: IndexSet, b: IndexSet) -> bool {
        self.atoms.iter().all(|atom| {
            let s = atom.support();
            !(s.intersects(a) && s.intersects(b))
        })
    }
}

impl ExponentModel for DiscreteSpectralMeasure {
    fn dim(&self) -> usize {
        self.dim
    }

    fn exponent_unchecked(&self, set: IndexSet, x: &[f64]) -> f64 {
        self.atoms.iter().map(|atom| atom.max_over(set, x)).sum()
    }

    fn smooth_density(&self) -> bool {
        self.smooth_density
    }

    fn spectral_measure(&self) -> Option<&DiscreteSpectralMeasure> {
        Some(self)
    }
}
