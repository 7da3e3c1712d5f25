//! Pinned models and point sets shared by the suites and the tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::model::{AsymmetricComponent, AsymmetricLogisticModel, Atom, DiscreteSpectralMeasure};
use crate::point::EvaluationPoint;
use crate::subset::IndexSet;

/// Seed of the random fixture models when no seed is supplied.
pub const FIXTURE_SEED: u64 = 0x5eed_0f_1a77;

/// `X_1 = Z_1`, `X_4 = max(Z_1, Z_2)/2`, `X_5 = max(Z_1, Z_2, Z_3)/3`, in
/// the column order `(X_1, X_4, X_5)`.
pub fn max_linear_triple() -> DiscreteSpectralMeasure {
    DiscreteSpectralMeasure::max_linear(
        &[
            vec![1.0, 0.5, 1.0 / 3.0],
            vec![0.0, 0.5, 1.0 / 3.0],
            vec![0.0, 0.0, 1.0 / 3.0],
        ],
        true,
    )
    .expect("fixture is valid")
}

/// The sub-vector `(X_1, X_5)` of [`max_linear_triple`].
pub fn max_linear_pair() -> DiscreteSpectralMeasure {
    DiscreteSpectralMeasure::max_linear(
        &[
            vec![1.0, 1.0 / 3.0],
            vec![0.0, 1.0 / 3.0],
            vec![0.0, 1.0 / 3.0],
        ],
        true,
    )
    .expect("fixture is valid")
}

/// All five components `(X_1, …, X_5)` with `X_4`, `X_5` standardized.
pub fn max_linear_five() -> DiscreteSpectralMeasure {
    DiscreteSpectralMeasure::max_linear(
        &[
            vec![1.0, 0.0, 0.0, 0.5, 1.0 / 3.0],
            vec![0.0, 1.0, 0.0, 0.5, 1.0 / 3.0],
            vec![0.0, 0.0, 1.0, 0.0, 1.0 / 3.0],
        ],
        true,
    )
    .expect("fixture is valid")
}

/// Fifty random discrete measures with `|I|` cycling through 3, 4, 5, 6
/// and between 2 and 8 atoms.
pub fn random_measures(seed: u64) -> Result<Vec<DiscreteSpectralMeasure>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..50)
        .map(|k| {
            let dim = 3 + k % 4;
            let atoms = rng.random_range(2..=8);
            DiscreteSpectralMeasure::random(dim, atoms, &mut rng)
        })
        .collect()
}

/// `count` points with log-uniform coordinates in `[lo, hi]`.
pub fn random_points<R: Rng + ?Sized>(
    dim: usize,
    count: usize,
    lo: f64,
    hi: f64,
    rng: &mut R,
) -> Vec<EvaluationPoint> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|_| {
            let coords = (0..dim).map(|_| rng.random_range(a..b).exp()).collect();
            EvaluationPoint::new(coords).expect("coordinates are positive")
        })
        .collect()
}

/// Blocks `{0,1}`, `{2,3,4}`, `{5}` of the block-product fixtures.
pub fn product_blocks() -> Vec<IndexSet> {
    vec![
        IndexSet::from_bits(0b000011),
        IndexSet::from_bits(0b011100),
        IndexSet::from_bits(0b100000),
    ]
}

/// A discrete measure on six coordinates whose atoms each live inside one
/// of [`product_blocks`], so the blocks are independent.
pub fn block_product_measure(seed: u64) -> Result<DiscreteSpectralMeasure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = 6;
    let mut atoms = Vec::new();
    for block in product_blocks() {
        let members = block.to_vec();
        let local = DiscreteSpectralMeasure::random(members.len(), 3, &mut rng)?;
        for a in local.atoms() {
            let mut direction = vec![0.0; dim];
            for (j, &i) in members.iter().enumerate() {
                direction[i] = a.direction[j];
            }
            atoms.push(Atom::new(a.weight, direction));
        }
    }
    DiscreteSpectralMeasure::new(dim, atoms)?.require_valid()
}

/// Independent logistic blocks on [`product_blocks`]; smooth, since each
/// block has a positive density.
pub fn block_product_logistic() -> Result<AsymmetricLogisticModel> {
    let dim = 6;
    let alphas = [0.4, 0.7, 1.0];
    let comps = product_blocks()
        .into_iter()
        .zip(alphas)
        .map(|(members, alpha)| AsymmetricComponent {
            members,
            alpha,
            theta: (0..dim)
                .map(|i| if members.contains(i) { 1.0 } else { 0.0 })
                .collect(),
        })
        .collect();
    Ok(AsymmetricLogisticModel::new(dim, comps)?.with_smooth_density(true))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_valid() {
        for m in [max_linear_triple(), max_linear_pair(), max_linear_five()] {
            assert!(m.validate().passed);
        }
        let ms = random_measures(FIXTURE_SEED).unwrap();
        assert_eq!(ms.len(), 50);
        for m in &ms {
            assert!(m.validate().passed);
            assert!((2..=8).contains(&m.atoms().len()));
        }
        assert!(block_product_measure(3).unwrap().validate().passed);
        block_product_logistic().unwrap();
    }
}
