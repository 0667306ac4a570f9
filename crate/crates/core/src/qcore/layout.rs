use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::QcoreError;

/// Ordered local dimensions of the parties sharing a state.
///
/// Party `k` holds a factor of dimension `dims[k]`. The global index of a
/// basis vector is row-major over the per-party digits with party 0 most
/// significant, so `|i_0 i_1 … i_{n-1}⟩` sits at
/// `((i_0 · d_1 + i_1) · d_2 + i_2) …`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PartyLayout {
    dims: Vec<usize>,
}

impl PartyLayout {
    pub fn new(dims: Vec<usize>) -> Result<Self, QcoreError> {
        if dims.is_empty() {
            return Err(QcoreError::EmptyLayout);
        }
        if let Some(&bad) = dims.iter().find(|&&d| d < 2) {
            return Err(QcoreError::InvalidDimension(bad));
        }
        Ok(Self { dims })
    }

    /// Layout of `n` qubits.
    pub fn qubits(n: usize) -> Result<Self, QcoreError> {
        Self::new(vec![2; n])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_parties(&self) -> usize {
        self.dims.len()
    }

    pub fn dim_of(&self, party: usize) -> Result<usize, QcoreError> {
        self.dims
            .get(party)
            .copied()
            .ok_or(QcoreError::PartyOutOfRange {
                party,
                parties: self.dims.len(),
            })
    }

    /// Total dimension `D = d_0 · d_1 ⋯ d_{n-1}`.
    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Number of global indices spanned by one step of party `k`'s digit:
    /// the product of all dimensions after `k`.
    pub fn stride(&self, party: usize) -> usize {
        self.dims[party + 1..].iter().product()
    }

    /// Global index of the basis vector with the given per-party digits.
    pub fn index_of(&self, digits: &[usize]) -> usize {
        debug_assert_eq!(digits.len(), self.dims.len());
        digits
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&i, &d)| acc * d + i)
    }

    /// Per-party digits of a global index.
    pub fn digits_of(&self, mut index: usize) -> Vec<usize> {
        let mut digits = vec![0; self.dims.len()];
        for (k, &d) in self.dims.iter().enumerate().rev() {
            digits[k] = index % d;
            index /= d;
        }
        digits
    }

    /// Layout of `self` followed by `other`.
    pub fn concat(&self, other: &PartyLayout) -> PartyLayout {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        PartyLayout { dims }
    }

    /// Layout restricted to the given parties, in the given order.
    pub fn select(&self, parties: &[usize]) -> Result<PartyLayout, QcoreError> {
        let mut dims = Vec::with_capacity(parties.len());
        for &p in parties {
            dims.push(self.dim_of(p)?);
        }
        PartyLayout::new(dims)
    }
}

impl fmt::Display for PartyLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A split of the parties into a left and a right group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    layout: PartyLayout,
    left: BTreeSet<usize>,
}

impl Bipartition {
    pub fn new<I: IntoIterator<Item = usize>>(
        layout: &PartyLayout,
        left: I,
    ) -> Result<Self, QcoreError> {
        let left: BTreeSet<usize> = left.into_iter().collect();
        let n = layout.num_parties();
        if left.is_empty() || left.len() >= n {
            return Err(QcoreError::BadBipartition);
        }
        if let Some(&p) = left.iter().find(|&&p| p >= n) {
            return Err(QcoreError::PartyOutOfRange {
                party: p,
                parties: n,
            });
        }
        Ok(Self {
            layout: layout.clone(),
            left,
        })
    }

    /// One party versus all the others.
    pub fn single_party(layout: &PartyLayout, party: usize) -> Result<Self, QcoreError> {
        Self::new(layout, [party])
    }

    pub fn layout(&self) -> &PartyLayout {
        &self.layout
    }

    pub fn left(&self) -> Vec<usize> {
        self.left.iter().copied().collect()
    }

    pub fn right(&self) -> Vec<usize> {
        (0..self.layout.num_parties())
            .filter(|p| !self.left.contains(p))
            .collect()
    }

    pub fn left_dim(&self) -> usize {
        self.left().iter().map(|&p| self.layout.dims()[p]).product()
    }

    pub fn right_dim(&self) -> usize {
        self.right()
            .iter()
            .map(|&p| self.layout.dims()[p])
            .product()
    }
}
