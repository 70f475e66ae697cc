//! Orbit-finite sets over the equality symmetry.
//!
//! An orbit is described by a dimension `d` and a subgroup `G ≤ S_d`; its
//! elements are injective atom tuples of length `d` taken modulo `G`. Objects
//! are finite lists of orbits, equivariant maps are given per orbit by which
//! source positions the image uses, and automata by delta rules over variables.
//!
//! Anything that needs a fixpoint over concrete elements (reachability,
//! Nerode refinement, transition monoids) runs on a finite pool instantiation
//! and is lifted back by [`abstract_object`], with a stability check at two
//! pool sizes.

mod automaton;
mod monoid;
mod orbit;
mod pool;
mod product;

use std::sync::Arc;

use thiserror::Error;

pub use automaton::{
    DeltaRule, InstantiatedAutomaton, NomAutomaton, NominalMinimization, NominalReachable,
};
pub use monoid::{nominal_syntactic_monoid, NominalMonoidOrbit, NominalMonoidSummary};
pub use orbit::{NomElement, NomObject, OrbitDescriptor};
pub use pool::{abstract_object, act_atoms, instantiate_object, Abstraction, Instantiation};
pub use product::{pair_patterns, EquivariantMap, NomProduct, OrbitMap, PairPattern};

use crate::automaton::AutomatonError;
use crate::backend::{
    Backend, BackendError, BackendTag, Congruence, Factorization, FinitenessReport, Product,
};
use crate::monoid::MonoidError;

/// Atoms are positive integers.
pub type Atom = u32;

/// Largest orbit dimension accepted.
pub const MAX_DIM: usize = 6;
/// Largest atom pool used for instantiation.
pub const MAX_POOL: usize = 10;
/// Default bound on instantiated carrier sizes.
pub const DEFAULT_CARRIER_CAP: usize = 20_000;
/// Default number of atoms added beyond the support bound.
pub const DEFAULT_MARGIN: usize = 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NominalError {
    #[error("orbit `{orbit}` has dimension {dim}, above the limit of {MAX_DIM}")]
    DimTooLarge { orbit: String, dim: usize },
    #[error("orbit `{orbit}`: invalid stabilizer: {reason}")]
    BadStabilizer { orbit: String, reason: String },
    #[error("unknown orbit `{0}`")]
    UnknownOrbit(String),
    #[error("duplicate orbit `{0}`")]
    DuplicateOrbit(String),
    #[error("orbit `{orbit}` takes {expected} atoms, got {found}")]
    TupleShape {
        orbit: String,
        expected: usize,
        found: usize,
    },
    #[error("orbit `{orbit}`: atoms must be pairwise distinct")]
    RepeatedAtom { orbit: String },
    #[error("atom pool of size {size} is too small, {needed} atoms needed")]
    PoolTooSmall { needed: usize, size: usize },
    #[error("atom pool of size {0} exceeds the limit of {MAX_POOL}")]
    PoolTooLarge(usize),
    #[error("{what} exceeds the cap of {limit} elements")]
    CapExceeded { what: String, limit: usize },
    #[error("support margin violated at `{element}`: no fresh atom left in the pool")]
    MarginViolated { element: String },
    #[error("initial orbit `{orbit}` is not a fixed point: dimension {dim} is moved by atom swaps")]
    InitNotFixed { orbit: String, dim: usize },
    #[error("accepting set has {found} entries for {expected} orbits")]
    FinalsShape { expected: usize, found: usize },
    #[error("no transition for state `{state}` on letter `{letter}`")]
    MissingTransition { state: String, letter: String },
    #[error("ambiguous transition for state `{state}` on letter `{letter}`: rules {rules:?} overlap")]
    AmbiguousTransition {
        state: String,
        letter: String,
        rules: Vec<usize>,
    },
    #[error("delta rule {rule}: {reason}")]
    BadRule { rule: usize, reason: String },
    #[error("map on orbit `{orbit}`: {reason}")]
    BadMap { orbit: String, reason: String },
    #[error(
        "stability gate failed for {what}: {small_orbits} orbits at pool {small_pool}, \
         {large_orbits} orbits at pool {large_pool}{detail}"
    )]
    StabilityGate {
        what: String,
        small_pool: usize,
        small_orbits: usize,
        large_pool: usize,
        large_orbits: usize,
        detail: String,
    },
    #[error("alphabets differ")]
    AlphabetMismatch,
    #[error("{0}")]
    Automaton(String),
    #[error("{0}")]
    Monoid(String),
}

impl From<AutomatonError> for NominalError {
    fn from(e: AutomatonError) -> Self {
        NominalError::Automaton(e.to_string())
    }
}

impl From<BackendError> for NominalError {
    fn from(e: BackendError) -> Self {
        match e {
            BackendError::Nominal(inner) => *inner,
            other => NominalError::Automaton(other.to_string()),
        }
    }
}

impl From<MonoidError> for NominalError {
    fn from(e: MonoidError) -> Self {
        match e {
            MonoidError::CapExceeded { limit } => NominalError::CapExceeded {
                what: "monoid closure".into(),
                limit,
            },
            other => NominalError::Monoid(other.to_string()),
        }
    }
}

impl NominalError {
    /// Resource and stability failures, as opposed to invalid input.
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            NominalError::PoolTooLarge(_)
                | NominalError::CapExceeded { .. }
                | NominalError::MarginViolated { .. }
                | NominalError::StabilityGate { .. }
        )
    }
}

/// The atoms `1..=size`, acting through all transpositions `(a b)`, `a < b`,
/// in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomPool {
    size: usize,
    transpositions: Arc<Vec<(Atom, Atom)>>,
}

impl AtomPool {
    pub fn new(size: usize) -> Result<Self, NominalError> {
        if size > MAX_POOL {
            return Err(NominalError::PoolTooLarge(size));
        }
        let n = size as Atom;
        let transpositions = (1..=n)
            .flat_map(|a| (a + 1..=n).map(move |b| (a, b)))
            .collect();
        Ok(AtomPool {
            size,
            transpositions: Arc::new(transpositions),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn atoms(&self) -> impl Iterator<Item = Atom> {
        1..=self.size as Atom
    }

    pub fn transpositions(&self) -> &[(Atom, Atom)] {
        &self.transpositions
    }

    /// Least pool atom outside `used`.
    pub fn fresh(&self, used: &[Atom]) -> Option<Atom> {
        self.atoms().find(|a| !used.contains(a))
    }
}

/// The nominal backend. Quotients are taken on the pool instantiation of the
/// object, so congruences index that instantiation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nominal {
    pool: AtomPool,
}

impl Nominal {
    pub fn new(pool: AtomPool) -> Self {
        Nominal { pool }
    }

    pub fn pool(&self) -> &AtomPool {
        &self.pool
    }
}

impl Backend for Nominal {
    type Object = NomObject;
    type Morphism = EquivariantMap;

    fn tag(&self) -> BackendTag {
        BackendTag::Nominal
    }

    fn product(
        &self,
        x: &NomObject,
        y: &NomObject,
    ) -> Result<Product<NomObject, EquivariantMap>, BackendError> {
        let p = NomProduct::new(x, y)?;
        Ok(Product {
            object: p.object().clone(),
            left: p.left().clone(),
            right: p.right().clone(),
        })
    }

    fn image_factorization(
        &self,
        f: &EquivariantMap,
    ) -> Result<Factorization<NomObject, EquivariantMap>, BackendError> {
        Ok(f.image_factorization()?)
    }

    /// Quotient of the pool instantiation of `x` by `c`, abstracted back to
    /// orbits. Each class is bounded by the support of its smallest member.
    fn quotient(
        &self,
        x: &NomObject,
        c: &Congruence,
    ) -> Result<(NomObject, EquivariantMap), BackendError> {
        let inst = instantiate_object(x, &self.pool, DEFAULT_CARRIER_CAP)?;
        let (q, proj) = crate::backend::finite_ops::quotient(&inst.object, c)?;
        let bounds: Vec<Vec<Atom>> = c
            .blocks()
            .iter()
            .map(|block| {
                block
                    .iter()
                    .map(|&e| inst.elements[e].atoms().to_vec())
                    .min_by_key(|a| a.len())
                    .unwrap_or_default()
            })
            .collect();
        let abs = abstract_object(&q, &bounds, &|k| format!("c{k}"))?;
        let map = EquivariantMap::from_representatives(x, &abs.object, |orbit| {
            let rep = x.generic(orbit, 1);
            let class = proj.apply(inst.index_of(&rep)?);
            Some(abs.elements[class].clone())
        })?;
        Ok((abs.object, map))
    }

    /// Every orbit-finite set is finitely supported; decomposition into
    /// orbits is the given one.
    fn finiteness(&self, x: &NomObject) -> FinitenessReport {
        FinitenessReport {
            dk_finite: x.is_dk_finite(),
            decomposition_finite: true,
            orbit_count: x.orbit_count(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pool_transpositions_are_lexicographic() {
        let p = AtomPool::new(3).unwrap();
        assert_eq!(p.transpositions(), &[(1, 2), (1, 3), (2, 3)]);
        assert_eq!(p.fresh(&[1, 3]), Some(2));
        assert_eq!(p.fresh(&[1, 2, 3]), None);
        assert!(matches!(AtomPool::new(11), Err(NominalError::PoolTooLarge(11))));
    }

    #[test]
    fn quotient_of_pairs_by_first_atom() {
        let x = NomObject::new(vec![OrbitDescriptor::new("P", 2, vec![]).unwrap()]).unwrap();
        let backend = Nominal::new(AtomPool::new(4).unwrap());
        let inst = instantiate_object(&x, backend.pool(), 100).unwrap();
        let labels: Vec<usize> = inst.elements.iter().map(|e| e.atoms()[0] as usize).collect();
        let (q, map) = backend.quotient(&x, &Congruence::from_labels(&labels)).unwrap();
        assert_eq!(q.orbit_count(), 1);
        assert_eq!(q.orbit(0).dim(), 1);
        assert_eq!(map.orbit_maps()[0].positions, vec![0]);
    }

    #[test]
    fn finiteness_counts_orbits() {
        let x = NomObject::new(vec![
            OrbitDescriptor::new("A", 1, vec![]).unwrap(),
            OrbitDescriptor::new("B", 0, vec![]).unwrap(),
        ])
        .unwrap();
        let r = Nominal::new(AtomPool::new(2).unwrap()).finiteness(&x);
        assert_eq!(r.orbit_count, 2);
        assert!(!r.dk_finite);
        let pt = NomObject::new(vec![OrbitDescriptor::new("B", 0, vec![]).unwrap()]).unwrap();
        assert!(Nominal::new(AtomPool::new(2).unwrap()).finiteness(&pt).dk_finite);
    }
}
