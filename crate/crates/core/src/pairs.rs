//! Storage for quantities indexed by unordered particle pairs.
//!
//! Particles are labelled `0..n`. A pair `{i, j}` is stored once, at the
//! canonical position of `(min(i, j), max(i, j))`, in lexicographic order:
//! `(0,1), (0,2), ..., (0,n-1), (1,2), ...`. Accessors accept either order.

use std::fmt;
use std::ops::{Index, IndexMut};

/// Number of unordered pairs among `n` particles.
pub const fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// One real value per unordered pair `{i, j}`, `i != j`.
#[derive(Clone, PartialEq)]
pub struct SymmetricPairMap {
    n: usize,
    values: Vec<f64>,
}

impl SymmetricPairMap {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            values: vec![0.0; pair_count(n)],
        }
    }

    /// Builds a map from a function of the canonical pair `(i, j)`, `i < j`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let values = pairs(n).map(|(i, j)| f(i, j)).collect();
        Self { n, values }
    }

    /// Builds a map from values in canonical pair order.
    ///
    /// Panics if `values.len()` differs from `n(n-1)/2`.
    pub fn from_values(n: usize, values: Vec<f64>) -> Self {
        assert_eq!(
            values.len(),
            pair_count(n),
            "expected {} pair values for n = {n}",
            pair_count(n)
        );
        Self { n, values }
    }

    pub fn constant(n: usize, value: f64) -> Self {
        Self {
            n,
            values: vec![value; pair_count(n)],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Position of pair `{i, j}` in canonical order.
    ///
    /// Panics on `i == j` or out-of-range labels.
    pub fn index_of(&self, i: usize, j: usize) -> usize {
        pair_index(self.n, i, j)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.index_of(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let k = self.index_of(i, j);
        self.values[k] = value;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Iterates `((i, j), value)` in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        pairs(self.n).zip(self.values.iter().copied())
    }

    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Self {
        Self {
            n: self.n,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pairwise combination of two maps over the same particle count.
    pub fn zip_with(&self, other: &Self, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        assert_eq!(self.n, other.n, "pair maps over different particle counts");
        Self {
            n: self.n,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        self.map(|v| v * factor)
    }

    /// Largest absolute entry (0 for an empty map).
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// `Σ self_ij · other_ij`.
    pub fn dot(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n, "pair maps over different particle counts");
        self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum()
    }

    /// Relabels particles: the result's pair `{perm[i], perm[j]}` holds this
    /// map's value on `{i, j}`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n);
        let mut out = Self::zeros(self.n);
        for ((i, j), v) in self.iter() {
            out.set(perm[i], perm[j], v);
        }
        out
    }
}

impl Index<(usize, usize)> for SymmetricPairMap {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.values[self.index_of(i, j)]
    }
}

impl IndexMut<(usize, usize)> for SymmetricPairMap {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        let k = self.index_of(i, j);
        &mut self.values[k]
    }
}

impl fmt::Debug for SymmetricPairMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.iter().map(|((i, j), v)| (format!("{}-{}", i + 1, j + 1), v)))
            .finish()
    }
}

/// Canonical position of `{i, j}` among the pairs of `n` particles.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    assert!(i != j, "pair ({i}, {j}) is not a pair of distinct particles");
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    assert!(b < n, "particle label {b} out of range for n = {n}");
    a * n - a * (a + 1) / 2 + (b - a - 1)
}

/// Canonical pairs `(i, j)`, `i < j`, in storage order.
pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> + Clone {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}
