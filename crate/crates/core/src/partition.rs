//! Set partitions enumerated by restricted growth strings.
//!
//! A restricted growth string `a` of length `n` satisfies `a[0] = 0` and
//! `a[i] <= 1 + max(a[..i])`; element `i` goes to block `a[i]`. Strings are
//! visited in lexicographic order, so the single-block partition comes first
//! and the all-singletons partition last.

use crate::error::{Error, Result};
use crate::subset::IndexSet;

/// Largest set whose partitions are enumerated (Bell(10) = 115975).
pub const MAX_PARTITION_SIZE: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetPartition {
    blocks: Vec<IndexSet>,
}

impl SetPartition {
    pub fn blocks(&self) -> &[IndexSet] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn ground(&self) -> IndexSet {
        self.blocks
            .iter()
            .fold(IndexSet::EMPTY, |acc, &b| acc.union(b))
    }
}

/// Streaming enumerator over the partitions of a set.
#[derive(Clone, Debug)]
pub struct Partitions {
    members: Vec<usize>,
    rgs: Vec<usize>,
    // prefix maxima: prefix_max[i] = max(rgs[..=i])
    prefix_max: Vec<usize>,
    done: bool,
}

impl Partitions {
    pub fn new(set: IndexSet) -> Result<Self> {
        let n = set.len();
        if n > MAX_PARTITION_SIZE {
            return Err(Error::TooManyIndices {
                size: n,
                limit: MAX_PARTITION_SIZE,
            });
        }
        Ok(Partitions {
            members: set.to_vec(),
            rgs: vec![0; n],
            prefix_max: vec![0; n],
            done: false,
        })
    }

    fn current(&self) -> SetPartition {
        let nblocks = self.prefix_max.last().map_or(0, |&m| m + 1);
        let mut blocks = vec![IndexSet::EMPTY; nblocks];
        for (&member, &b) in self.members.iter().zip(&self.rgs) {
            blocks[b] = blocks[b].union(IndexSet::singleton(member));
        }
        SetPartition { blocks }
    }

    fn advance(&mut self) {
        let n = self.rgs.len();
        for i in (1..n).rev() {
            if self.rgs[i] <= self.prefix_max[i - 1] {
                self.rgs[i] += 1;
                self.prefix_max[i] = self.prefix_max[i - 1].max(self.rgs[i]);
                for j in i + 1..n {
                    self.rgs[j] = 0;
                    self.prefix_max[j] = self.prefix_max[i];
                }
                return;
            }
        }
        self.done = true;
    }
}

impl Iterator for Partitions {
    type Item = SetPartition;

    fn next(&mut self) -> Option<SetPartition> {
        if self.done {
            return None;
        }
        let out = self.current();
        self.advance();
        Some(out)
    }
}

/// All partitions of a non-empty set in restricted-growth-string order.
pub fn enumerate_partitions(set: IndexSet) -> Result<Vec<SetPartition>> {
    set.require_non_empty()?;
    Ok(Partitions::new(set)?.collect())
}

/// Bell numbers via the Bell triangle.
pub fn bell_number(n: usize) -> u64 {
    let mut row = vec![1u64];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().unwrap());
        for &v in &row {
            let last = *next.last().unwrap();
            next.push(last + v);
        }
        row = next;
    }
    row[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[usize]) -> IndexSet {
        v.iter().copied().collect()
    }

    #[test]
    fn two_element_partitions() {
        let parts = enumerate_partitions(set(&[0, 1])).unwrap();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].blocks(), &[set(&[0, 1])]);
        assert_eq!(parts[1].blocks(), &[set(&[0]), set(&[1])]);
    }

    #[test]
    fn three_element_partitions_exhaustive() {
        let parts = enumerate_partitions(set(&[0, 1, 2])).unwrap();
        let rendered: Vec<Vec<Vec<usize>>> = parts
            .iter()
            .map(|p| p.blocks().iter().map(|b| b.to_vec()).collect())
            .collect();
        assert_eq!(
            rendered,
            vec![
                vec![vec![0, 1, 2]],
                vec![vec![0, 1], vec![2]],
                vec![vec![0, 2], vec![1]],
                vec![vec![0], vec![1, 2]],
                vec![vec![0], vec![1], vec![2]],
            ]
        );
    }

    #[test]
    fn empty_set_is_rejected() {
        assert_eq!(enumerate_partitions(IndexSet::EMPTY), Err(Error::EmptySet));
    }

    #[test]
    fn oversized_set_is_rejected() {
        assert!(enumerate_partitions(IndexSet::full(11).unwrap()).is_err());
    }

    #[test]
    fn sparse_members_are_preserved() {
        let parts = enumerate_partitions(set(&[2, 5, 7])).unwrap();
        assert_eq!(parts.len(), 5);
        for p in &parts {
            assert_eq!(p.ground(), set(&[2, 5, 7]));
        }
    }

    #[test]
    fn bell_numbers_small() {
        let known = [1u64, 1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975];
        for (n, &b) in known.iter().enumerate() {
            assert_eq!(bell_number(n), b);
        }
    }
}
