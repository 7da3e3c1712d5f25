//! Independence and conditional-independence diagnostics built on
//!
//! * `χ_{A,B}(x) = V^A + V^B − V^{A∪B}`, which vanishes identically exactly
//!   when `X_A` and `X_B` are independent, and
//! * `d_{A,B}(x) = V^{A∪C} + V^{B∪C} − V − V^C` with `C = I ∖ (A ∪ B)`,
//!   which must vanish when `X_A ⊥ X_B | X_C` and the law has a positive
//!   continuous density.
//!
//! Under that density assumption, conditional independence forces
//! independence, so for smooth models a positive `sup χ` on the grid rules
//! conditional independence out as well.

use log::warn;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::lattice::{LatticeTable, TableKind};
use crate::model::{check_point, ExponentModel};
use crate::point::EvaluationPoint;
use crate::subset::{pair_complement, IndexSet};

/// Relative slack within which a negative difference is rounding noise.
const ROUNDING_SLACK: f64 = 1e-10;
/// Relative threshold beyond which a negative difference is an error.
const BREACH: f64 = 1e-8;

/// Default verdict tolerance `1e-9 · (1 + |I|)`.
pub fn default_tolerance(dim: usize) -> f64 {
    1e-9 * (1.0 + dim as f64)
}

fn clamp_nonnegative(value: f64, scale: f64, what: &str) -> Result<f64> {
    if value >= 0.0 {
        return Ok(value);
    }
    if value < -BREACH * scale {
        return Err(Error::ModelInconsistency(format!(
            "{what} = {value:e} is negative beyond rounding (scale {scale:e})"
        )));
    }
    if value < -ROUNDING_SLACK * scale {
        warn!("{what} = {value:e} clamped to 0 (scale {scale:e})");
    }
    Ok(0.0)
}

fn check_pair<M: ExponentModel + ?Sized>(
    model: &M,
    a: IndexSet,
    b: IndexSet,
) -> Result<IndexSet> {
    pair_complement(model.ground(), a, b)
}

fn v_or_zero<M: ExponentModel + ?Sized>(model: &M, set: IndexSet, x: &[f64]) -> f64 {
    // V^∅ := 0
    if set.is_empty() {
        0.0
    } else {
        model.exponent_unchecked(set, x)
    }
}

/// `χ_{A,B}(x_{A∪B}) = V^A + V^B − V^{A∪B}`.
pub fn chi_pair<M: ExponentModel + ?Sized>(
    model: &M,
    a: IndexSet,
    b: IndexSet,
    x: &EvaluationPoint,
) -> Result<f64> {
    check_point(model.dim(), x)?;
    check_pair(model, a, b)?;
    chi_pair_unchecked(model, a, b, x.as_slice())
}

fn chi_pair_unchecked<M: ExponentModel + ?Sized>(
    model: &M,
    a: IndexSet,
    b: IndexSet,
    x: &[f64],
) -> Result<f64> {
    let va = model.exponent_unchecked(a, x);
    let vb = model.exponent_unchecked(b, x);
    let vab = model.exponent_unchecked(a.union(b), x);
    clamp_nonnegative(va + vb - vab, va.max(vb).max(vab), "chi_{A,B}")
}

/// `d_{A,B}(x)` with the complementary conditioning set `C = I ∖ (A ∪ B)`.
pub fn d_pair<M: ExponentModel + ?Sized>(
    model: &M,
    a: IndexSet,
    b: IndexSet,
    x: &EvaluationPoint,
) -> Result<f64> {
    check_point(model.dim(), x)?;
    let c = check_pair(model, a, b)?;
    d_pair_unchecked(model, a, b, c, x.as_slice())
}

/// `d_{A,B}` on the marginal `X_{A∪B∪C}` for an explicit conditioning set
/// `C` disjoint from `A ∪ B`.
pub fn d_pair_given<M: ExponentModel + ?Sized>(
    model: &M,
    a: IndexSet,
    b: IndexSet,
    c: IndexSet,
    x: &EvaluationPoint,
) -> Result<f64> {
    check_point(model.dim(), x)?;
    check_pair(model, a, b)?;
    c.require_subset_of(model.ground())?;
    if c.intersects(a.union(b)) {
        return Err(Error::Overlap { a: a.union(b), b: c });
    }
    d_pair_unchecked(model, a, b, c, x.as_slice())
}

fn d_pair_unchecked<M: ExponentModel + ?Sized>(
    model: &M,
    a: IndexSet,
    b: IndexSet,
    c: IndexSet,
    x: &[f64],
) -> Result<f64> {
    let vac = model.exponent_unchecked(a.union(c), x);
    let vbc = model.exponent_unchecked(b.union(c), x);
    let vall = model.exponent_unchecked(a.union(b).union(c), x);
    let vc = v_or_zero(model, c, x);
    clamp_nonnegative(vac + vbc - vall - vc, vall, "d_{A,B}")
}

fn lattice_pair_sum(d: &LatticeTable, a: IndexSet, b: IndexSet, exclude_c: bool) -> Result<f64> {
    if d.kind() != TableKind::Mobius {
        return Err(Error::TableKind {
            expected: TableKind::Mobius.name(),
            found: d.kind().name(),
        });
    }
    let c = pair_complement(d.ground(), a, b)?;
    Ok(d.entries()
        .into_iter()
        .filter(|(l, _)| l.intersects(a) && l.intersects(b) && !(exclude_c && l.intersects(c)))
        .map(|(_, v)| v)
        .sum())
}

/// `d_{A,B}(x) = Σ_{L ∩ A ≠ ∅, L ∩ B ≠ ∅, L ∩ C = ∅} d_L(x)`.
pub fn d_pair_from_lattice(d: &LatticeTable, a: IndexSet, b: IndexSet) -> Result<f64> {
    lattice_pair_sum(d, a, b, true)
}

/// `χ_{A,B}(x) = Σ_{L ∩ A ≠ ∅, L ∩ B ≠ ∅} d_L(x)`.
pub fn chi_pair_from_lattice(d: &LatticeTable, a: IndexSet, b: IndexSet) -> Result<f64> {
    lattice_pair_sum(d, a, b, false)
}

/// What the `d_{A,B}` sweep says about `X_A ⊥ X_B | X_C`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CiStatus {
    /// `sup d > tol` on a smooth model, or the pair is dependent on a
    /// smooth model.
    RuledOut,
    /// `sup d ≤ tol`: the necessary condition holds on the grid. Never a
    /// certificate of conditional independence.
    NecessaryConditionMet,
    /// `sup d > tol` but the model is not declared smooth, so the
    /// necessary-condition argument does not apply.
    Inapplicable,
}

impl CiStatus {
    pub fn name(self) -> &'static str {
        match self {
            CiStatus::RuledOut => "ruled_out",
            CiStatus::NecessaryConditionMet => "necessary_condition_met",
            CiStatus::Inapplicable => "inapplicable_no_density",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairDiagnostic {
    pub a: IndexSet,
    pub b: IndexSet,
    pub c: IndexSet,
    pub grid_size: usize,
    pub sup_d: f64,
    pub sup_chi: f64,
    pub argmax_d: EvaluationPoint,
    pub argmax_chi: EvaluationPoint,
    pub tol: f64,
    /// `sup χ ≤ tol` on the grid.
    pub independent: bool,
    pub ci_status: CiStatus,
    /// `false` only when conditional independence is ruled out.
    pub ci_possible: bool,
    pub smooth_density: bool,
    /// Exact `χ_{A,B} ≡ 0` certificate, available for discrete measures.
    pub exact_independence: Option<bool>,
}

/// Evaluates `d_{A,B}` and `χ_{A,B}` over the grid and forms both verdicts.
pub fn diagnose_pair<M: ExponentModel + ?Sized>(
    model: &M,
    a: IndexSet,
    b: IndexSet,
    grid: &Grid,
    tol: f64,
) -> Result<PairDiagnostic> {
    let c = check_pair(model, a, b)?;
    if grid.is_empty() {
        return Err(Error::Domain("grid has no points".into()));
    }
    check_point(model.dim(), &grid.points()[0])?;
    let values = grid
        .points()
        .par_iter()
        .enumerate()
        .map(|(k, p)| {
            let x = p.as_slice();
            Ok((
                k,
                d_pair_unchecked(model, a, b, c, x)?,
                chi_pair_unchecked(model, a, b, x)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    // first maximiser wins, so results do not depend on thread scheduling
    let (mut kd, mut sup_d) = (0, f64::NEG_INFINITY);
    let (mut kc, mut sup_chi) = (0, f64::NEG_INFINITY);
    for (k, d, chi) in values {
        if d > sup_d {
            kd = k;
            sup_d = d;
        }
        if chi > sup_chi {
            kc = k;
            sup_chi = chi;
        }
    }
    let smooth = model.smooth_density();
    let independent = sup_chi <= tol;
    let ci_status = if sup_d <= tol && (independent || !smooth) {
        CiStatus::NecessaryConditionMet
    } else if smooth {
        CiStatus::RuledOut
    } else {
        CiStatus::Inapplicable
    };
    Ok(PairDiagnostic {
        a,
        b,
        c,
        grid_size: grid.len(),
        sup_d,
        sup_chi,
        argmax_d: grid.points()[kd].clone(),
        argmax_chi: grid.points()[kc].clone(),
        tol,
        independent,
        ci_possible: ci_status != CiStatus::RuledOut,
        ci_status,
        smooth_density: smooth,
        exact_independence: model
            .spectral_measure()
            .map(|m| m.pair_independent_exactly(a, b)),
    })
}

/// `X_A ⊥ X_B` verdict from `sup χ_{A,B} ≤ tol`.
pub fn independence_verdict<M: ExponentModel + ?Sized>(
    model: &M,
    a: IndexSet,
    b: IndexSet,
    grid: &Grid,
    tol: f64,
) -> Result<PairDiagnostic> {
    diagnose_pair(model, a, b, grid, tol)
}

/// Necessary-condition verdict for `X_A ⊥ X_B | X_C` from `sup d_{A,B}`.
pub fn ci_necessary_verdict<M: ExponentModel + ?Sized>(
    model: &M,
    a: IndexSet,
    b: IndexSet,
    grid: &Grid,
    tol: f64,
) -> Result<PairDiagnostic> {
    diagnose_pair(model, a, b, grid, tol)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockPair {
    pub i: usize,
    pub j: usize,
    pub sup_chi: f64,
    /// `sup d_{A_i,A_j}` conditioning on the indices outside every block.
    pub sup_d: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultiwayReport {
    pub blocks: Vec<IndexSet>,
    pub rest: IndexSet,
    pub pairs: Vec<BlockPair>,
    pub tol: f64,
    pub pairwise_independent: bool,
    /// `max |V^{∪A_i} − Σ_i V^{A_i}|` over the grid; only computed when the
    /// blocks are pairwise independent.
    pub joint_residual: Option<f64>,
    pub jointly_independent: bool,
    /// Joint conditional independence given the rest is ruled out: the
    /// model is smooth and some block pair is dependent or has
    /// `sup d > tol`.
    pub ci_ruled_out: bool,
}

/// Pairwise and joint independence of disjoint blocks `A_1, …, A_k`.
pub fn multiway_verdict<M: ExponentModel + ?Sized>(
    model: &M,
    blocks: &[IndexSet],
    grid: &Grid,
    tol: f64,
) -> Result<MultiwayReport> {
    if blocks.len() < 2 {
        return Err(Error::InvalidParameter(
            "multiway verdict needs at least two blocks".into(),
        ));
    }
    let ground = model.ground();
    let mut union = IndexSet::EMPTY;
    for &blk in blocks {
        blk.require_non_empty()?;
        blk.require_subset_of(ground)?;
        if blk.intersects(union) {
            return Err(Error::Overlap { a: union, b: blk });
        }
        union = union.union(blk);
    }
    check_point(model.dim(), &grid.points()[0])?;
    let rest = ground.difference(union);
    let mut pairs = Vec::new();
    for i in 0..blocks.len() {
        for j in i + 1..blocks.len() {
            let (a, b) = (blocks[i], blocks[j]);
            let (sup_d, sup_chi) = grid
                .points()
                .par_iter()
                .map(|p| {
                    let x = p.as_slice();
                    Ok((
                        d_pair_unchecked(model, a, b, rest, x)?,
                        chi_pair_unchecked(model, a, b, x)?,
                    ))
                })
                .try_reduce(
                    || (f64::NEG_INFINITY, f64::NEG_INFINITY),
                    |l, r| Ok((l.0.max(r.0), l.1.max(r.1))),
                )?;
            pairs.push(BlockPair {
                i,
                j,
                sup_chi,
                sup_d,
            });
        }
    }
    let pairwise_independent = pairs.iter().all(|p| p.sup_chi <= tol);
    let joint_residual = if pairwise_independent {
        Some(
            grid.points()
                .par_iter()
                .map(|p| {
                    let x = p.as_slice();
                    let joint = model.exponent_unchecked(union, x);
                    let split: f64 = blocks.iter().map(|&b| model.exponent_unchecked(b, x)).sum();
                    (joint - split).abs()
                })
                .reduce(|| 0.0, f64::max),
        )
    } else {
        None
    };
    let scale = grid
        .points()
        .iter()
        .map(|p| model.exponent_unchecked(union, p.as_slice()))
        .fold(0.0, f64::max);
    let jointly_independent =
        pairwise_independent && joint_residual.is_some_and(|r| r <= tol.max(1e-12 * scale));
    let ci_ruled_out = model.smooth_density()
        && pairs.iter().any(|p| p.sup_chi > tol || p.sup_d > tol);
    Ok(MultiwayReport {
        blocks: blocks.to_vec(),
        rest,
        pairs,
        tol,
        pairwise_independent,
        joint_residual,
        jointly_independent,
        ci_ruled_out,
    })
}
