//! The contract every backend satisfies: binary products, image factorizations,
//! quotients by congruences and finiteness reports.
//!
//! Automata and monoid algorithms are written once against [`FinObject`]
//! carriers (a finite set together with a symmetry given as one permutation per
//! symmetry label). The finite-set and finite-group backends are such carriers
//! natively; the nominal backend reaches them through pool instantiation.

pub(crate) mod finite;

use std::fmt;

use thiserror::Error;

pub use finite::{pairing, FinMorphism, FinObject, Symmetry};
pub(crate) use finite as finite_ops;

use crate::nominal::NominalError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BackendTag {
    Set,
    GSet,
    Nominal,
}

impl fmt::Display for BackendTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BackendTag::Set => "set",
            BackendTag::GSet => "gset",
            BackendTag::Nominal => "nominal",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BackendError {
    #[error("backend mismatch: expected {expected}, found {found}")]
    Mismatch { expected: String, found: String },
    #[error("duplicate element name `{0}`")]
    DuplicateName(String),
    #[error("map is not total: element `{0}` has no valid image")]
    NotTotal(String),
    #[error("not equivariant: symmetry `{label}` does not commute at element `{element}`")]
    NotEquivariant { element: String, label: String },
    #[error("invalid action: {0}")]
    ActionLaw(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("partition is not symmetry-closed: symmetry `{label}` maps block {block} across blocks")]
    NotSymmetryClosed { block: usize, label: String },
    #[error(transparent)]
    Nominal(#[from] Box<NominalError>),
}

impl From<NominalError> for BackendError {
    fn from(e: NominalError) -> Self {
        BackendError::Nominal(Box::new(e))
    }
}

/// Finiteness verdicts for an object of some backend.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FinitenessReport {
    pub dk_finite: bool,
    pub decomposition_finite: bool,
    pub orbit_count: usize,
}

/// An equivalence on the elements `0..n` of an object, stored as blocks.
///
/// Blocks are sorted internally and ordered by their least element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Congruence {
    size: usize,
    blocks: Vec<Vec<usize>>,
}

impl Congruence {
    pub fn new(size: usize, blocks: Vec<Vec<usize>>) -> Result<Self, BackendError> {
        let mut seen = vec![false; size];
        let mut normalized = Vec::with_capacity(blocks.len());
        for mut block in blocks {
            if block.is_empty() {
                return Err(BackendError::InvalidPartition("empty block".into()));
            }
            block.sort_unstable();
            for &x in &block {
                if x >= size {
                    return Err(BackendError::InvalidPartition(format!(
                        "element {x} out of range"
                    )));
                }
                if seen[x] {
                    return Err(BackendError::InvalidPartition(format!(
                        "element {x} in two blocks"
                    )));
                }
                seen[x] = true;
            }
            normalized.push(block);
        }
        if let Some(x) = seen.iter().position(|s| !s) {
            return Err(BackendError::InvalidPartition(format!(
                "element {x} is in no block"
            )));
        }
        normalized.sort_by_key(|b| b[0]);
        Ok(Congruence {
            size,
            blocks: normalized,
        })
    }

    /// The partition whose blocks are the fibres of `labels`.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut slot: std::collections::HashMap<usize, usize> = Default::default();
        for (x, &l) in labels.iter().enumerate() {
            let k = *slot.entry(l).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[k].push(x);
        }
        Congruence {
            size: labels.len(),
            blocks,
        }
    }

    pub fn discrete(size: usize) -> Self {
        Congruence {
            size,
            blocks: (0..size).map(|x| vec![x]).collect(),
        }
    }

    pub fn full(size: usize) -> Self {
        if size == 0 {
            return Congruence::discrete(0);
        }
        Congruence {
            size,
            blocks: vec![(0..size).collect()],
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Block index of every element.
    pub fn block_of(&self) -> Vec<usize> {
        let mut out = vec![0; self.size];
        for (b, block) in self.blocks.iter().enumerate() {
            for &x in block {
                out[x] = b;
            }
        }
        out
    }
}

/// A binary product with its two projections.
#[derive(Clone, Debug)]
pub struct Product<O, M> {
    pub object: O,
    pub left: M,
    pub right: M,
}

/// `f = epi ; mono` through the image `mid`.
#[derive(Clone, Debug)]
pub struct Factorization<O, M> {
    pub epi: M,
    pub mid: O,
    pub mono: M,
}

pub trait Backend {
    type Object: Clone + fmt::Debug;
    type Morphism: Clone + fmt::Debug;

    fn tag(&self) -> BackendTag;

    fn product(
        &self,
        x: &Self::Object,
        y: &Self::Object,
    ) -> Result<Product<Self::Object, Self::Morphism>, BackendError>;

    fn image_factorization(
        &self,
        f: &Self::Morphism,
    ) -> Result<Factorization<Self::Object, Self::Morphism>, BackendError>;

    /// Quotient of `x` by `c`. For the nominal backend `c` partitions the
    /// backend's pool instantiation of `x`.
    fn quotient(
        &self,
        x: &Self::Object,
        c: &Congruence,
    ) -> Result<(Self::Object, Self::Morphism), BackendError>;

    fn finiteness(&self, x: &Self::Object) -> FinitenessReport;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn congruence_validation() {
        assert!(Congruence::new(3, vec![vec![0, 1], vec![2]]).is_ok());
        assert!(Congruence::new(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(Congruence::new(3, vec![vec![0, 1]]).is_err());
        assert!(Congruence::new(2, vec![vec![0, 1], vec![]]).is_err());
        let c = Congruence::new(4, vec![vec![3, 1], vec![2, 0]]).unwrap();
        assert_eq!(c.blocks(), &[vec![0, 2], vec![1, 3]]);
        assert_eq!(c.block_of(), vec![0, 1, 0, 1]);
    }

    #[test]
    fn congruence_from_labels_orders_by_first_element() {
        let c = Congruence::from_labels(&[7, 3, 7, 9]);
        assert_eq!(c.blocks(), &[vec![0, 2], vec![1], vec![3]]);
        assert_eq!(Congruence::full(3).blocks().len(), 1);
        assert_eq!(Congruence::discrete(3).blocks().len(), 3);
    }
}
