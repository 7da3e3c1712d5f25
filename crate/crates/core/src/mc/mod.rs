//! Exact simulation of max-linear vectors and Monte Carlo estimators.
//!
//! Randomness comes from ChaCha8 keyed by an explicit 64-bit seed. Draw `k`
//! of sample `i` reads the stream `i` at word position `2k`, so every
//! realization is addressable on its own and batches are identical whatever
//! the thread count.

mod sampler;

pub use sampler::{
    mc_spectral_integrals, validate_sampler, AtomResampler, DirichletSampler, SpectralEstimates,
    SamplerValidation, SpectralSampler,
};

use std::io::{self, Write};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::format::number;
use crate::model::{check_point, DiscreteSpectralMeasure, ExponentModel};
use crate::point::EvaluationPoint;
use crate::subset::IndexSet;

/// Generator for stream `stream` under `seed`.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Maps 64 random bits to the open interval `(0, 1)`.
#[inline]
pub fn open_unit(bits: u64) -> f64 {
    ((bits >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}

/// Standard Fréchet variate `−1 / log U`.
#[inline]
pub fn frechet(bits: u64) -> f64 {
    -1.0 / open_unit(bits).ln()
}

/// A point estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

impl Estimate {
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.se
    }
}

/// Realizations of a simple max-stable vector, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleBatch {
    n: usize,
    dim: usize,
    data: Vec<f64>,
    seed: u64,
    model_id: String,
}

impl SampleBatch {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn model_id(&self) -> &str {
        &self.model_id
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    /// Fraction of rows with `X_i ≤ x_i` for every `i ∈ set`.
    pub fn ecdf(&self, set: IndexSet, x: &EvaluationPoint) -> Result<f64> {
        check_point(self.dim, x)?;
        set.require_non_empty()?;
        set.require_subset_of(IndexSet::full(self.dim)?)?;
        Ok(self.count_below(set, x.as_slice()) as f64 / self.n as f64)
    }

    fn count_below(&self, set: IndexSet, x: &[f64]) -> usize {
        let members = set.to_vec();
        self.rows()
            .filter(|r| members.iter().all(|&i| r[i] <= x[i]))
            .count()
    }

    /// CSV with the index labels as header and one realization per row.
    pub fn write_csv<W: Write>(&self, labels: &[String], mut out: W) -> io::Result<()> {
        writeln!(out, "{}", labels.join(","))?;
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(|&v| number(v)).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }
}

fn fingerprint(measure: &DiscreteSpectralMeasure) -> String {
    // FNV-1a over the atom bit patterns
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |v: u64| {
        for b in v.to_le_bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    };
    eat(measure.dim() as u64);
    for atom in measure.atoms() {
        eat(atom.weight.to_bits());
        for w in &atom.direction {
            eat(w.to_bits());
        }
    }
    format!("discrete-{h:016x}")
}

/// `n` draws of `X_i = max_k m_k ω_{k,i} Z_k` with i.i.d. standard Fréchet
/// `Z_k`, so that `P(X ≤ x) = exp(−V(x))`.
pub fn simulate_max_linear(
    measure: &DiscreteSpectralMeasure,
    n: usize,
    seed: u64,
) -> Result<SampleBatch> {
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let dim = measure.dim();
    let coeffs: Vec<Vec<f64>> = measure
        .atoms()
        .iter()
        .map(|a| a.direction.iter().map(|w| a.weight * w).collect())
        .collect();
    let base = ChaCha8Rng::seed_from_u64(seed);
    let mut data = vec![0.0; n * dim];
    data.par_chunks_mut(dim)
        .enumerate()
        .for_each(|(i, row)| {
            let mut rng = base.clone();
            rng.set_stream(i as u64);
            for (k, c) in coeffs.iter().enumerate() {
                rng.set_word_pos(2 * k as u128);
                let z = frechet(rng.next_u64());
                for (x, &ck) in row.iter_mut().zip(c) {
                    let v = ck * z;
                    if v > *x {
                        *x = v;
                    }
                }
            }
        });
    Ok(SampleBatch {
        n,
        dim,
        data,
        seed,
        model_id: fingerprint(measure),
    })
}

/// Ten fixed probe points for ECDF checks, spread over `[0.45, 2.2]^dim`.
pub fn probe_points(dim: usize) -> Vec<EvaluationPoint> {
    (0..10)
        .map(|k| {
            let coords = (0..dim)
                .map(|i| (0.8 * (1.3 * (k as f64 + 1.0) + 2.1 * i as f64).sin()).exp())
                .collect();
            EvaluationPoint::new(coords).expect("probe coordinates are positive")
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct EcdfProbe {
    pub point: EvaluationPoint,
    pub ecdf: f64,
    pub exact: f64,
    /// Binomial standard error `sqrt(p (1 − p) / n)` at the exact `p`.
    pub se: f64,
    pub within_3se: bool,
}

/// Compares the joint ECDF with `exp(−V)` at each probe point.
pub fn ecdf_check<M: ExponentModel + ?Sized>(
    batch: &SampleBatch,
    model: &M,
    probes: &[EvaluationPoint],
) -> Result<Vec<EcdfProbe>> {
    let ground = model.ground();
    probes
        .iter()
        .map(|p| {
            let ecdf = batch.ecdf(ground, p)?;
            let exact = (-model.exponent(ground, p)?).exp();
            let se = (exact * (1.0 - exact) / batch.n() as f64).sqrt();
            Ok(EcdfProbe {
                point: p.clone(),
                ecdf,
                exact,
                se,
                within_3se: (ecdf - exact).abs() <= 3.0 * se,
            })
        })
        .collect()
}

/// `χ̂_{A,B} = V̂^A + V̂^B − V̂^{A∪B}` with `V̂^S = −log` of the empirical
/// probability of `{X_S ≤ x_S}`, and a delta-method standard error.
pub fn empirical_chi(
    batch: &SampleBatch,
    a: IndexSet,
    b: IndexSet,
    x: &EvaluationPoint,
) -> Result<Estimate> {
    check_point(batch.dim(), x)?;
    crate::subset::pair_complement(IndexSet::full(batch.dim())?, a, b)?;
    let xs = x.as_slice();
    let (ma, mb) = (a.to_vec(), b.to_vec());
    let (mut na, mut nb, mut nab) = (0usize, 0usize, 0usize);
    for r in batch.rows() {
        let ea = ma.iter().all(|&i| r[i] <= xs[i]);
        let eb = mb.iter().all(|&i| r[i] <= xs[i]);
        na += ea as usize;
        nb += eb as usize;
        nab += (ea && eb) as usize;
    }
    let n = batch.n() as f64;
    let (pa, pb, pab) = (na as f64 / n, nb as f64 / n, nab as f64 / n);
    for (name, p) in [("A", pa), ("B", pb), ("A∪B", pab)] {
        if p <= 0.0 || p >= 1.0 {
            return Err(Error::ProbeOutsideSampleRange(format!(
                "empirical probability for {name} is {p}"
            )));
        }
    }
    let value = -pa.ln() - pb.ln() + pab.ln();
    // gradient (−1/pA, −1/pB, 1/pAB) against the indicator covariance
    let g = [-1.0 / pa, -1.0 / pb, 1.0 / pab];
    let cov = [
        [pa * (1.0 - pa), pab - pa * pb, pab * (1.0 - pa)],
        [pab - pa * pb, pb * (1.0 - pb), pab * (1.0 - pb)],
        [pab * (1.0 - pa), pab * (1.0 - pb), pab * (1.0 - pab)],
    ];
    let mut var = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            var += g[i] * cov[i][j] * g[j];
        }
    }
    Ok(Estimate {
        value,
        se: (var.max(0.0) / n).sqrt(),
    })
}
