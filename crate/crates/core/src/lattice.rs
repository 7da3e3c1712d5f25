//! Dense tables over the non-empty subsets of a ground set and the
//! transforms between the three equivalent descriptions of a max-stable
//! dependence structure at a fixed point `x`:
//!
//! * `V^A(x_A)`, the exponent functions of the marginals,
//! * `d_A(x)`, their Möbius inversion, with
//!   `V^A = Σ_{B ∩ A ≠ ∅} d_B`,
//! * `χ_A(x_A) = Σ_{B ⊇ A} d_B = Σ_{∅≠B ⊆ A} (−1)^{|B|+1} V^B`.
//!
//! All transforms run in `O(n 2^n)` through in-place zeta/Möbius sweeps over
//! the bitmask-indexed storage.

use std::fmt;

use crate::error::{Error, Result};
use crate::subset::{enumerate_subsets, IndexSet, MAX_INDICES};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TableKind {
    /// Exponent functions `V^A`.
    Exponent,
    /// Möbius coefficients `d_A`.
    Mobius,
    /// Tail coefficients `χ_A`.
    Chi,
}

impl TableKind {
    pub fn name(self) -> &'static str {
        match self {
            TableKind::Exponent => "V",
            TableKind::Mobius => "d",
            TableKind::Chi => "chi",
        }
    }
}

impl fmt::Display for TableKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Values for every non-empty subset of `{0..dim-1}`, indexed by bitmask.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeTable {
    dim: usize,
    kind: TableKind,
    // values[0] is the empty set and is always 0
    values: Vec<f64>,
}

impl LatticeTable {
    pub fn from_fn<F>(dim: usize, kind: TableKind, mut f: F) -> Result<Self>
    where
        F: FnMut(IndexSet) -> Result<f64>,
    {
        check_dim(dim)?;
        let mut values = vec![0.0; 1 << dim];
        for (mask, slot) in values.iter_mut().enumerate().skip(1) {
            *slot = f(IndexSet::from_bits(mask as u32))?;
        }
        Self::from_raw(dim, kind, values)
    }

    /// Builds a table from explicit `(subset, value)` pairs; every non-empty
    /// subset must appear.
    pub fn from_entries<I>(dim: usize, kind: TableKind, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (IndexSet, f64)>,
    {
        check_dim(dim)?;
        let ground = IndexSet::full(dim)?;
        let mut values = vec![f64::NAN; 1 << dim];
        values[0] = 0.0;
        for (set, v) in entries {
            set.require_non_empty()?;
            set.require_subset_of(ground)?;
            values[set.bits() as usize] = v;
        }
        if let Some(mask) = values.iter().position(|v| v.is_nan()) {
            return Err(Error::MissingEntry(IndexSet::from_bits(mask as u32)));
        }
        Self::from_raw(dim, kind, values)
    }

    /// Builds a table from the `2^dim − 1` values of the non-empty subsets,
    /// given in bitmask order `1, 2, ..., 2^dim − 1`.
    pub fn from_mask_order(dim: usize, kind: TableKind, values: Vec<f64>) -> Result<Self> {
        check_dim(dim)?;
        let expected = (1usize << dim) - 1;
        if values.len() != expected {
            return Err(Error::TableSize {
                expected,
                found: values.len(),
            });
        }
        let mut all = Vec::with_capacity(expected + 1);
        all.push(0.0);
        all.extend(values);
        Self::from_raw(dim, kind, all)
    }

    fn from_raw(dim: usize, kind: TableKind, values: Vec<f64>) -> Result<Self> {
        if let Some((mask, &value)) = values
            .iter()
            .enumerate()
            .skip(1)
            .find(|(_, v)| !v.is_finite())
        {
            return Err(Error::NonFinite {
                set: IndexSet::from_bits(mask as u32),
                value,
            });
        }
        Ok(LatticeTable { dim, kind, values })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ground(&self) -> IndexSet {
        IndexSet::full(self.dim).expect("dimension checked on construction")
    }

    pub fn kind(&self) -> TableKind {
        self.kind
    }

    /// Number of stored entries, `2^dim − 1`.
    pub fn len(&self) -> usize {
        self.values.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, set: IndexSet) -> f64 {
        assert!(
            !set.is_empty() && set.is_subset_of(self.ground()),
            "{set:?} is not a non-empty subset of the table's ground set"
        );
        self.values[set.bits() as usize]
    }

    /// `(subset, value)` pairs in the documented subset order.
    pub fn entries(&self) -> Vec<(IndexSet, f64)> {
        enumerate_subsets(self.ground())
            .expect("non-empty ground")
            .into_iter()
            .map(|s| (s, self.get(s)))
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Threshold below which an entry counts as zero: `1e-9 · (1 + max|v|)`.
    pub fn zero_tolerance(&self) -> f64 {
        1e-9 * (1.0 + self.max_abs())
    }

    pub fn is_zero(&self, set: IndexSet) -> bool {
        self.get(set).abs() <= self.zero_tolerance()
    }

    /// Entries more negative than the zero tolerance. Empty for tables that
    /// come from a genuine spectral model.
    pub fn negativity_violations(&self) -> Vec<(IndexSet, f64)> {
        let tol = self.zero_tolerance();
        self.entries()
            .into_iter()
            .filter(|&(_, v)| v < -tol)
            .collect()
    }

    /// `max |self − other|` over all entries.
    pub fn max_abs_diff(&self, other: &LatticeTable) -> Result<f64> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .skip(1)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs())))
    }

    fn expect_kind(&self, kind: TableKind) -> Result<()> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(Error::TableKind {
                expected: kind.name(),
                found: self.kind.name(),
            })
        }
    }

    fn with_values(&self, kind: TableKind, mut values: Vec<f64>) -> Result<Self> {
        values[0] = 0.0;
        Self::from_raw(self.dim, kind, values)
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        Err(Error::EmptyGroundSet)
    } else if dim > MAX_INDICES {
        Err(Error::TooManyIndices {
            size: dim,
            limit: MAX_INDICES,
        })
    } else {
        Ok(())
    }
}

fn sweep(xs: &mut [f64], f: impl Fn(&mut f64, &mut f64)) {
    let n = xs.len();
    let mut half = 1;
    while half < n {
        for block in xs.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (without, with) in lo.iter_mut().zip(hi) {
                f(without, with);
            }
        }
        half *= 2;
    }
}

/// `f(A) ← Σ_{B ⊆ A} f(B)`.
pub fn subset_zeta(xs: &mut [f64]) {
    sweep(xs, |lo, hi| *hi += *lo);
}

/// Inverse of [`subset_zeta`].
pub fn subset_mobius(xs: &mut [f64]) {
    sweep(xs, |lo, hi| *hi -= *lo);
}

/// `f(A) ← Σ_{B ⊇ A} f(B)`.
pub fn superset_zeta(xs: &mut [f64]) {
    sweep(xs, |lo, hi| *lo += *hi);
}

/// Inverse of [`superset_zeta`].
pub fn superset_mobius(xs: &mut [f64]) {
    sweep(xs, |lo, hi| *lo -= *hi);
}

fn signed_by_parity(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .enumerate()
        .map(|(mask, &v)| {
            if mask == 0 {
                0.0
            } else if (mask as u32).count_ones() % 2 == 1 {
                v
            } else {
                -v
            }
        })
        .collect()
}

/// `d_A(x) = Σ_{B ⊇ A^c} (−1)^{|B ∩ A|+1} V^B(x_B)`.
///
/// Uses `Σ_{∅≠B ⊆ T} d_B = V^I − V^{I∖T}` followed by a subset Möbius sweep.
pub fn d_from_v(v: &LatticeTable) -> Result<LatticeTable> {
    v.expect_kind(TableKind::Exponent)?;
    let full = v.values.len() - 1;
    let v_all = v.values[full];
    let mut s: Vec<f64> = (0..=full).map(|t| v_all - v.values[full & !t]).collect();
    subset_mobius(&mut s);
    v.with_values(TableKind::Mobius, s)
}

/// `V^A = Σ_{B ∩ A ≠ ∅} d_B`, the inverse of [`d_from_v`].
pub fn v_from_d(d: &LatticeTable) -> Result<LatticeTable> {
    d.expect_kind(TableKind::Mobius)?;
    let full = d.values.len() - 1;
    let mut s = d.values.clone();
    s[0] = 0.0;
    subset_zeta(&mut s);
    let v = (0..=full).map(|a| s[full] - s[full & !a]).collect();
    d.with_values(TableKind::Exponent, v)
}

/// `χ_A = Σ_{B ⊇ A} d_B`.
pub fn chi_from_d(d: &LatticeTable) -> Result<LatticeTable> {
    d.expect_kind(TableKind::Mobius)?;
    let mut s = d.values.clone();
    s[0] = 0.0;
    superset_zeta(&mut s);
    d.with_values(TableKind::Chi, s)
}

/// `d_A = Σ_{B ⊇ A} (−1)^{|B∖A|} χ_B`.
pub fn d_from_chi(chi: &LatticeTable) -> Result<LatticeTable> {
    chi.expect_kind(TableKind::Chi)?;
    let mut s = chi.values.clone();
    s[0] = 0.0;
    superset_mobius(&mut s);
    chi.with_values(TableKind::Mobius, s)
}

/// `χ_A = Σ_{∅≠B ⊆ A} (−1)^{|B|+1} V^B`.
pub fn chi_from_v(v: &LatticeTable) -> Result<LatticeTable> {
    v.expect_kind(TableKind::Exponent)?;
    let mut s = signed_by_parity(&v.values);
    subset_zeta(&mut s);
    v.with_values(TableKind::Chi, s)
}

/// `V^A = Σ_{∅≠B ⊆ A} (−1)^{|B|+1} χ_B`; the same transform as
/// [`chi_from_v`], which is an involution.
pub fn v_from_chi(chi: &LatticeTable) -> Result<LatticeTable> {
    chi.expect_kind(TableKind::Chi)?;
    let mut s = signed_by_parity(&chi.values);
    subset_zeta(&mut s);
    chi.with_values(TableKind::Exponent, s)
}

/// Round-trip residuals `(V→d→V, d→χ→d, V→χ→V)` for an exponent table.
pub fn round_trip_residuals(v: &LatticeTable) -> Result<[f64; 3]> {
    let d = d_from_v(v)?;
    let v_back = v_from_d(&d)?;
    let chi = chi_from_d(&d)?;
    let d_back = d_from_chi(&chi)?;
    let chi_v = chi_from_v(v)?;
    let v_back2 = v_from_chi(&chi_v)?;
    Ok([
        v.max_abs_diff(&v_back)?,
        d.max_abs_diff(&d_back)?,
        v.max_abs_diff(&v_back2)?,
    ])
}
