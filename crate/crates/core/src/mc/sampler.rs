use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;

use super::{substream, Estimate};
use crate::error::{Error, Result};
use crate::model::{check_point, DiscreteSpectralMeasure, ExponentModel};
use crate::point::EvaluationPoint;
use crate::subset::{pair_complement, IndexSet};

/// Draws per independent stream block.
const BLOCK: usize = 4096;
/// Stream offset reserved for sampler validation.
const VALIDATION_STREAM: u64 = 1 << 62;

/// Produces pairs `(w, ω)` such that `E[w f(ω)] = ∫ f(ω) H(dω)`.
pub trait SpectralSampler: Sync {
    fn dim(&self) -> usize;

    /// Writes a direction into `direction` and returns its weight.
    fn sample(&self, rng: &mut ChaCha8Rng, direction: &mut [f64]) -> f64;
}

/// Resamples the atoms of a discrete measure with probability
/// `m_k / Σ m`, weight `Σ m`.
#[derive(Clone, Debug)]
pub struct AtomResampler {
    dim: usize,
    total: f64,
    cumulative: Vec<f64>,
    directions: Vec<Vec<f64>>,
}

impl AtomResampler {
    pub fn new(measure: &DiscreteSpectralMeasure) -> Self {
        let total: f64 = measure.atoms().iter().map(|a| a.weight).sum();
        let mut acc = 0.0;
        let cumulative = measure
            .atoms()
            .iter()
            .map(|a| {
                acc += a.weight;
                acc
            })
            .collect();
        AtomResampler {
            dim: measure.dim(),
            total,
            cumulative,
            directions: measure.atoms().iter().map(|a| a.direction.clone()).collect(),
        }
    }
}

impl SpectralSampler for AtomResampler {
    fn dim(&self) -> usize {
        self.dim
    }

    fn sample(&self, rng: &mut ChaCha8Rng, direction: &mut [f64]) -> f64 {
        let u = rng.random::<f64>() * self.total;
        let k = self
            .cumulative
            .partition_point(|&c| c <= u)
            .min(self.directions.len() - 1);
        direction.copy_from_slice(&self.directions[k]);
        self.total
    }
}

/// Symmetric Dirichlet directions on the unit simplex with total mass
/// `dim`, which gives every coordinate unit first moment.
#[derive(Clone, Debug)]
pub struct DirichletSampler {
    dim: usize,
    gamma: Gamma<f64>,
}

impl DirichletSampler {
    pub fn new(dim: usize, concentration: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyGroundSet);
        }
        let gamma = Gamma::new(concentration, 1.0).map_err(|e| {
            Error::InvalidParameter(format!("Dirichlet concentration {concentration}: {e}"))
        })?;
        Ok(DirichletSampler { dim, gamma })
    }
}

impl SpectralSampler for DirichletSampler {
    fn dim(&self) -> usize {
        self.dim
    }

    fn sample(&self, rng: &mut ChaCha8Rng, direction: &mut [f64]) -> f64 {
        let mut sum = 0.0;
        for w in direction.iter_mut() {
            *w = self.gamma.sample(rng);
            sum += *w;
        }
        for w in direction.iter_mut() {
            *w /= sum;
        }
        self.dim as f64
    }
}

/// Mean and standard error of `k` integrands over `n` draws, with one
/// ChaCha stream per block of draws.
fn block_means<S, F, const K: usize>(
    sampler: &S,
    n: usize,
    seed: u64,
    stream_offset: u64,
    integrand: F,
) -> [Estimate; K]
where
    S: SpectralSampler + ?Sized,
    F: Fn(f64, &[f64]) -> [f64; K] + Sync,
{
    let blocks = n.div_ceil(BLOCK);
    let partials: Vec<([f64; K], [f64; K])> = (0..blocks)
        .into_par_iter()
        .map(|blk| {
            let mut rng = substream(seed, stream_offset + blk as u64);
            let mut dir = vec![0.0; sampler.dim()];
            let mut sum = [0.0; K];
            let mut sq = [0.0; K];
            let count = BLOCK.min(n - blk * BLOCK);
            for _ in 0..count {
                let w = sampler.sample(&mut rng, &mut dir);
                let vals = integrand(w, &dir);
                for k in 0..K {
                    sum[k] += vals[k];
                    sq[k] += vals[k] * vals[k];
                }
            }
            (sum, sq)
        })
        .collect();
    let (mut sum, mut sq) = ([0.0; K], [0.0; K]);
    for (s, q) in partials {
        for k in 0..K {
            sum[k] += s[k];
            sq[k] += q[k];
        }
    }
    let nf = n as f64;
    std::array::from_fn(|k| {
        let mean = sum[k] / nf;
        let var = if n > 1 {
            ((sq[k] - nf * mean * mean) / (nf - 1.0)).max(0.0)
        } else {
            0.0
        };
        Estimate {
            value: mean,
            se: (var / nf).sqrt(),
        }
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SamplerValidation {
    /// Estimates of `∫ ω_i H(dω)`, one per coordinate.
    pub moments: Vec<Estimate>,
    pub passed: bool,
}

/// Checks `∫ ω_i H(dω) = 1` for every coordinate at three standard errors.
pub fn validate_sampler<S: SpectralSampler + ?Sized>(
    sampler: &S,
    n: usize,
    seed: u64,
) -> Result<SamplerValidation> {
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let moments: Vec<Estimate> = (0..sampler.dim())
        .map(|i| {
            let [e] = block_means(sampler, n, seed, VALIDATION_STREAM, |w, dir| [w * dir[i]]);
            e
        })
        .collect();
    let passed = moments
        .iter()
        .all(|e| (e.value - 1.0).abs() <= 3.0 * e.se + 1e-12);
    Ok(SamplerValidation { moments, passed })
}

/// Monte Carlo estimates of the spectral integrals for `d_A`, `χ_A` and,
/// when `b` is given, `d_{A,B}`, `χ_{A,B}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralEstimates {
    pub d_a: Estimate,
    pub chi_a: Estimate,
    pub d_ab: Option<Estimate>,
    pub chi_ab: Option<Estimate>,
    pub validation: SamplerValidation,
}

fn extreme(set: IndexSet, dir: &[f64], x: &[f64], want_max: bool) -> f64 {
    let it = set.iter().map(|i| dir[i] / x[i]);
    if want_max {
        it.fold(0.0, f64::max)
    } else {
        it.fold(f64::INFINITY, f64::min)
    }
}

pub fn mc_spectral_integrals<S: SpectralSampler + ?Sized>(
    sampler: &S,
    a: IndexSet,
    b: Option<IndexSet>,
    x: &EvaluationPoint,
    n: usize,
    seed: u64,
) -> Result<SpectralEstimates> {
    if n == 0 {
        return Err(Error::EmptySample);
    }
    check_point(sampler.dim(), x)?;
    let ground = IndexSet::full(sampler.dim())?;
    a.require_non_empty()?;
    a.require_subset_of(ground)?;
    let c = match b {
        Some(b) => Some(pair_complement(ground, a, b)?),
        None => None,
    };
    let validation = validate_sampler(sampler, n, seed)?;
    if !validation.passed {
        let worst = validation
            .moments
            .iter()
            .map(|e| (e.value - 1.0).abs() / e.se.max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max);
        return Err(Error::SamplerValidation(format!(
            "first moments deviate from 1 by up to {worst:.2} standard errors"
        )));
    }
    let xs = x.as_slice();
    let rest = ground.difference(a);
    let bb = b.unwrap_or(IndexSet::EMPTY);
    let cc = c.unwrap_or(IndexSet::EMPTY);
    let [d_a, chi_a, d_ab, chi_ab] = block_means(sampler, n, seed, 0, |w, dir| {
        let min_a = extreme(a, dir, xs, false);
        let max_rest = extreme(rest, dir, xs, true);
        let pair = if b.is_some() {
            extreme(a, dir, xs, true).min(extreme(bb, dir, xs, true))
        } else {
            0.0
        };
        let max_c = extreme(cc, dir, xs, true);
        [
            w * (min_a - max_rest).max(0.0),
            w * min_a,
            w * (pair - max_c).max(0.0),
            w * pair,
        ]
    });
    Ok(SpectralEstimates {
        d_a,
        chi_a,
        d_ab: b.map(|_| d_ab),
        chi_ab: b.map(|_| chi_ab),
        validation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirichlet_sampler_has_unit_moments() {
        let s = DirichletSampler::new(4, 0.7).unwrap();
        let v = validate_sampler(&s, 50_000, 5).unwrap();
        assert!(v.passed, "{:?}", v.moments);
    }

    #[test]
    fn dirichlet_is_symmetric_so_some_coefficients_are_known() {
        // χ_I at x = 1: d · E[min ω] ; for 2 coordinates and concentration 1,
        // ω_1 ~ U(0,1) and E[min(ω_1, 1 − ω_1)] = 1/4, so χ = 1/2.
        let s = DirichletSampler::new(2, 1.0).unwrap();
        let x = EvaluationPoint::constant(2, 1.0).unwrap();
        let est = mc_spectral_integrals(&s, IndexSet::full(2).unwrap(), None, &x, 200_000, 8).unwrap();
        assert!(est.chi_a.within(0.5, 3.0), "{:?}", est.chi_a);
        // with A = I the complement is empty, so d_I = χ_I
        assert_eq!(est.d_a, est.chi_a);
    }

    #[test]
    fn failing_sampler_is_reported() {
        struct Biased;
        impl SpectralSampler for Biased {
            fn dim(&self) -> usize {
                2
            }
            fn sample(&self, rng: &mut ChaCha8Rng, direction: &mut [f64]) -> f64 {
                let u: f64 = rng.random();
                direction[0] = u;
                direction[1] = 1.0 - u;
                4.0
            }
        }
        let x = EvaluationPoint::constant(2, 1.0).unwrap();
        assert!(matches!(
            mc_spectral_integrals(&Biased, IndexSet::singleton(0), None, &x, 10_000, 1),
            Err(Error::SamplerValidation(_))
        ));
    }

    #[test]
    fn bad_concentration() {
        assert!(DirichletSampler::new(3, -1.0).is_err());
    }
}
