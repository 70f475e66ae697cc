use std::collections::{BTreeSet, HashMap};
use std::fmt;

use super::{Atom, NominalError, MAX_DIM};
use crate::perm::{all_permutations, generate_group, Perm};

/// A single orbit `A^(d) / G`: injective `d`-tuples of atoms modulo a
/// subgroup `G` of position permutations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitDescriptor {
    name: String,
    dim: usize,
    generators: Vec<Perm>,
    /// All of `G`, sorted; the identity comes first.
    group: Vec<Perm>,
}

impl OrbitDescriptor {
    pub fn new(name: impl Into<String>, dim: usize, generators: Vec<Perm>) -> Result<Self, NominalError> {
        let name = name.into();
        if dim > MAX_DIM {
            return Err(NominalError::DimTooLarge { orbit: name, dim });
        }
        if let Some(g) = generators.iter().find(|g| g.degree() != dim) {
            return Err(NominalError::BadStabilizer {
                orbit: name,
                reason: format!("generator {g} does not permute {dim} positions"),
            });
        }
        let group = generate_group(dim, &generators, usize::MAX).expect("unbounded");
        Ok(OrbitDescriptor {
            name,
            dim,
            generators,
            group,
        })
    }

    /// Like [`OrbitDescriptor::new`] with the subgroup given in full.
    pub(crate) fn from_group(name: impl Into<String>, dim: usize, group: Vec<Perm>) -> Self {
        let generators = crate::perm::generators_of(dim, &group);
        let mut group = group;
        group.sort();
        OrbitDescriptor {
            name: name.into(),
            dim,
            generators,
            group,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn stabilizer(&self) -> &[Perm] {
        &self.group
    }

    pub fn stabilizer_order(&self) -> usize {
        self.group.len()
    }

    pub fn renamed(&self, name: impl Into<String>) -> Self {
        OrbitDescriptor {
            name: name.into(),
            ..self.clone()
        }
    }

    /// Least `t∘σ` over the stabilizer, where `(t∘σ)[i] = t[σ(i)]`.
    pub fn canonical<T: Ord + Copy>(&self, tuple: &[T]) -> Vec<T> {
        self.group
            .iter()
            .map(|s| (0..self.dim).map(|i| tuple[s.apply(i)]).collect::<Vec<_>>())
            .min()
            .unwrap_or_default()
    }

    /// Isomorphism invariant: dimension and the subgroup up to relabelling
    /// positions (least sorted conjugate).
    pub fn signature(&self) -> (usize, Vec<Perm>) {
        let best = all_permutations(self.dim)
            .iter()
            .map(|c| {
                let ci = c.inverse();
                let mut conj: Vec<Perm> = self.group.iter().map(|g| ci.then(g).then(c)).collect();
                conj.sort();
                conj
            })
            .min()
            .unwrap_or_default();
        (self.dim, best)
    }

    /// Number of elements with atoms drawn from a pool of `pool` atoms.
    pub fn count_in_pool(&self, pool: usize) -> usize {
        if pool < self.dim {
            return 0;
        }
        let tuples: usize = (0..self.dim).map(|k| pool - k).product();
        tuples / self.group.len()
    }

    /// The stabilizer written as `stab:` generator text, empty when trivial.
    pub fn stabilizer_text(&self) -> String {
        self.generators
            .iter()
            .map(|g| g.cycles())
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// An element of an orbit-finite set: an orbit and a canonical atom tuple.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NomElement {
    orbit: usize,
    atoms: Vec<Atom>,
}

impl NomElement {
    /// Callers pass canonical tuples.
    pub(crate) fn from_parts(orbit: usize, atoms: Vec<Atom>) -> Self {
        NomElement { orbit, atoms }
    }

    pub fn orbit(&self) -> usize {
        self.orbit
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// The least support: the atoms of the canonical tuple.
    pub fn support(&self) -> BTreeSet<Atom> {
        self.atoms.iter().copied().collect()
    }
}

/// A finite disjoint union of orbits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NomObject {
    orbits: Vec<OrbitDescriptor>,
    lookup: HashMap<String, usize>,
}

impl NomObject {
    pub fn new(orbits: Vec<OrbitDescriptor>) -> Result<Self, NominalError> {
        let mut lookup = HashMap::new();
        for (i, o) in orbits.iter().enumerate() {
            if lookup.insert(o.name.clone(), i).is_some() {
                return Err(NominalError::DuplicateOrbit(o.name.clone()));
            }
        }
        Ok(NomObject { orbits, lookup })
    }

    pub fn orbits(&self) -> &[OrbitDescriptor] {
        &self.orbits
    }

    pub fn orbit(&self, i: usize) -> &OrbitDescriptor {
        &self.orbits[i]
    }

    pub fn orbit_count(&self) -> usize {
        self.orbits.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.lookup.get(name).copied()
    }

    pub fn max_dim(&self) -> usize {
        self.orbits.iter().map(|o| o.dim).max().unwrap_or(0)
    }

    pub fn is_dk_finite(&self) -> bool {
        self.orbits.iter().all(|o| o.dim == 0)
    }

    /// Validates and canonicalizes a tuple.
    pub fn element(&self, orbit: usize, atoms: &[Atom]) -> Result<NomElement, NominalError> {
        let o = self
            .orbits
            .get(orbit)
            .ok_or_else(|| NominalError::UnknownOrbit(format!("#{orbit}")))?;
        if atoms.len() != o.dim {
            return Err(NominalError::TupleShape {
                orbit: o.name.clone(),
                expected: o.dim,
                found: atoms.len(),
            });
        }
        let distinct: BTreeSet<_> = atoms.iter().collect();
        if distinct.len() != atoms.len() {
            return Err(NominalError::RepeatedAtom {
                orbit: o.name.clone(),
            });
        }
        Ok(self.element_unchecked(orbit, atoms))
    }

    pub(crate) fn element_unchecked(&self, orbit: usize, atoms: &[Atom]) -> NomElement {
        NomElement {
            orbit,
            atoms: self.orbits[orbit].canonical(atoms),
        }
    }

    pub fn element_by_name(&self, name: &str, atoms: &[Atom]) -> Result<NomElement, NominalError> {
        let i = self
            .index_of(name)
            .ok_or_else(|| NominalError::UnknownOrbit(name.into()))?;
        self.element(i, atoms)
    }

    /// The element of `orbit` with atoms `first, first+1, ...`.
    pub fn generic(&self, orbit: usize, first: Atom) -> NomElement {
        let atoms: Vec<Atom> = (0..self.orbits[orbit].dim as Atom).map(|k| first + k).collect();
        self.element_unchecked(orbit, &atoms)
    }

    /// Applies an atom permutation (given pointwise) and re-canonicalizes.
    pub fn act(&self, pi: impl Fn(Atom) -> Atom, x: &NomElement) -> NomElement {
        let moved: Vec<Atom> = x.atoms.iter().map(|&a| pi(a)).collect();
        self.element_unchecked(x.orbit, &moved)
    }

    /// `Oa(5)`, or the bare orbit name in dimension 0.
    pub fn display(&self, x: &NomElement) -> String {
        let name = &self.orbits[x.orbit].name;
        if x.atoms.is_empty() {
            name.clone()
        } else {
            let atoms: Vec<String> = x.atoms.iter().map(|a| a.to_string()).collect();
            format!("{name}({})", atoms.join(","))
        }
    }

    /// Same orbits up to names: dimensions and stabilizer classes agree in order.
    pub fn isomorphic(&self, other: &NomObject) -> bool {
        self.orbits.len() == other.orbits.len()
            && self
                .orbits
                .iter()
                .zip(&other.orbits)
                .all(|(a, b)| a.stabilizer_order() == b.stabilizer_order() && a.signature() == b.signature())
    }
}

impl fmt::Display for NomObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for o in &self.orbits {
            write!(f, "orbit {}: dim {}", o.name, o.dim)?;
            if !o.generators.is_empty() {
                write!(f, " stab: {}", o.stabilizer_text())?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
