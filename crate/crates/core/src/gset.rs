//! Finite groups acting on finite sets: equivariant automata, orbits, and
//! restriction of automata along group homomorphisms.

use std::collections::{BTreeMap, VecDeque};
use std::sync::Arc;

use thiserror::Error;

use crate::automaton::{Automaton, AutomatonError};
use crate::backend::{
    Backend, BackendError, BackendTag, Congruence, Factorization, FinMorphism, FinObject,
    FinitenessReport, Product, Symmetry,
};
use crate::perm::Perm;

/// Largest group accepted at load.
pub const MAX_GROUP_ORDER: usize = 720;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("group has no elements")]
    Empty,
    #[error("duplicate group element `{0}`")]
    Duplicate(String),
    #[error("Cayley table row for `{row}` has {found} entries, expected {expected}")]
    RowLength {
        row: String,
        expected: usize,
        found: usize,
    },
    #[error("product {0} is not a group element")]
    NotClosed(String),
    #[error("multiplication is not associative at ({0}, {1}, {2})")]
    NotAssociative(String, String, String),
    #[error("no two-sided identity element")]
    NoIdentity,
    #[error("`{0}` has no inverse")]
    NoInverse(String),
    #[error("generated group exceeds {MAX_GROUP_ORDER} elements")]
    TooLarge,
    #[error("homomorphism has {found} images for a group of order {expected}")]
    HomShape { expected: usize, found: usize },
    #[error("not a homomorphism: f({a}·{b}) ≠ f({a})·f({b})")]
    NotHomomorphism { a: String, b: String },
    #[error("unknown group element `{0}`")]
    UnknownElement(String),
    #[error("action of `{0}` is not determined by the listed elements")]
    Underdetermined(String),
    #[error("listed actions are inconsistent at `{0}`")]
    InconsistentAction(String),
    #[error(transparent)]
    Backend(#[from] BackendError),
}

/// A finite group given by its full Cayley table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinGroup {
    names: Vec<String>,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
}

impl FinGroup {
    /// Checks closure, associativity, identity and inverses.
    pub fn from_table(names: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        let n = names.len();
        if n == 0 {
            return Err(GroupError::Empty);
        }
        if n > MAX_GROUP_ORDER {
            return Err(GroupError::TooLarge);
        }
        for (i, a) in names.iter().enumerate() {
            if names[..i].contains(a) {
                return Err(GroupError::Duplicate(a.clone()));
            }
        }
        if table.len() != n {
            return Err(GroupError::RowLength {
                row: "<table>".into(),
                expected: n,
                found: table.len(),
            });
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(GroupError::RowLength {
                    row: names[i].clone(),
                    expected: n,
                    found: row.len(),
                });
            }
            if let Some(j) = row.iter().position(|&k| k >= n) {
                return Err(GroupError::NotClosed(format!("{}·{}", names[i], names[j])));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(GroupError::NotAssociative(
                            names[a].clone(),
                            names[b].clone(),
                            names[c].clone(),
                        ));
                    }
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or(GroupError::NoIdentity)?;
        let mut inverses = Vec::with_capacity(n);
        for a in 0..n {
            let inv = (0..n)
                .find(|&b| table[a][b] == identity && table[b][a] == identity)
                .ok_or_else(|| GroupError::NoInverse(names[a].clone()))?;
            inverses.push(inv);
        }
        Ok(FinGroup {
            names,
            table,
            identity,
            inverses,
        })
    }

    /// Closes a set of named permutation generators into a group. The identity
    /// is named `e`; other elements are named by their shortlex-least word in
    /// the generators, joined by `.`.
    pub fn from_generators(gens: &[(String, Perm)]) -> Result<Self, GroupError> {
        let degree = gens.first().map_or(0, |(_, p)| p.degree());
        let mut elements: Vec<Perm> = vec![Perm::identity(degree)];
        let mut names: Vec<String> = vec!["e".into()];
        let mut index: BTreeMap<Perm, usize> = BTreeMap::new();
        index.insert(elements[0].clone(), 0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(k) = queue.pop_front() {
            for (gname, g) in gens {
                // word k followed by generator g acts as g after k
                let p = g.then(&elements[k]);
                if !index.contains_key(&p) {
                    if elements.len() >= MAX_GROUP_ORDER {
                        return Err(GroupError::TooLarge);
                    }
                    let name = if k == 0 {
                        gname.clone()
                    } else {
                        format!("{}.{}", names[k], gname)
                    };
                    index.insert(p.clone(), elements.len());
                    queue.push_back(elements.len());
                    elements.push(p);
                    names.push(name);
                }
            }
        }
        let table = elements
            .iter()
            .map(|a| {
                elements
                    .iter()
                    .map(|b| index[&b.then(a)])
                    .collect()
            })
            .collect();
        FinGroup::from_table(names, table)
    }

    /// `Z/n` with elements named `0..n`.
    pub fn cyclic(n: usize) -> Self {
        let names = (0..n).map(|i| i.to_string()).collect();
        let table = (0..n)
            .map(|a| (0..n).map(|b| (a + b) % n).collect())
            .collect();
        FinGroup::from_table(names, table).expect("cyclic group")
    }

    pub fn trivial() -> Self {
        FinGroup::from_table(vec!["e".into()], vec![vec![0]]).expect("trivial group")
    }

    /// The symmetric group on `n` points, elements named in cycle notation.
    pub fn symmetric(n: usize) -> Self {
        let perms = crate::perm::all_permutations(n);
        let index: BTreeMap<&Perm, usize> = perms.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let names = perms.iter().map(|p| p.cycles()).collect();
        let table = perms
            .iter()
            .map(|a| perms.iter().map(|b| index[&b.then(a)]).collect())
            .collect();
        FinGroup::from_table(names, table).expect("symmetric group")
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn name(&self, g: usize) -> &str {
        &self.names[g]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }
}

/// A group homomorphism `source → target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupHom {
    source: Arc<FinGroup>,
    target: Arc<FinGroup>,
    map: Vec<usize>,
}

impl GroupHom {
    pub fn new(source: Arc<FinGroup>, target: Arc<FinGroup>, map: Vec<usize>) -> Result<Self, GroupError> {
        if map.len() != source.order() {
            return Err(GroupError::HomShape {
                expected: source.order(),
                found: map.len(),
            });
        }
        if let Some(&bad) = map.iter().find(|&&h| h >= target.order()) {
            return Err(GroupError::UnknownElement(bad.to_string()));
        }
        for a in 0..source.order() {
            for b in 0..source.order() {
                if map[source.mul(a, b)] != target.mul(map[a], map[b]) {
                    return Err(GroupError::NotHomomorphism {
                        a: source.name(a).into(),
                        b: source.name(b).into(),
                    });
                }
            }
        }
        Ok(GroupHom { source, target, map })
    }

    pub fn identity(g: Arc<FinGroup>) -> Self {
        let map = (0..g.order()).collect();
        GroupHom {
            source: g.clone(),
            target: g,
            map,
        }
    }

    /// The unique homomorphism from the trivial group.
    pub fn from_trivial(target: Arc<FinGroup>) -> Self {
        GroupHom {
            source: Arc::new(FinGroup::trivial()),
            map: vec![target.identity()],
            target,
        }
    }

    pub fn source(&self) -> &Arc<FinGroup> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FinGroup> {
        &self.target
    }

    pub fn apply(&self, g: usize) -> usize {
        self.map[g]
    }
}

/// Builds a G-set from actions listed for some group elements. Missing
/// elements are filled in by composition; the identity acts trivially.
/// Fails when the listed elements do not generate the group or disagree.
pub fn gset_object(
    group: Arc<FinGroup>,
    names: Vec<String>,
    listed: &[(usize, Perm)],
) -> Result<FinObject, GroupError> {
    let n = names.len();
    let mut action: Vec<Option<Perm>> = vec![None; group.order()];
    action[group.identity()] = Some(Perm::identity(n));
    for (g, p) in listed {
        match &action[*g] {
            Some(q) if q != p => return Err(GroupError::InconsistentAction(group.name(*g).into())),
            _ => action[*g] = Some(p.clone()),
        }
    }
    let gens: Vec<usize> = listed.iter().map(|(g, _)| *g).collect();
    let mut queue: VecDeque<usize> = (0..group.order()).filter(|&g| action[g].is_some()).collect();
    while let Some(a) = queue.pop_front() {
        for &b in &gens {
            // (a·b)·x = a·(b·x)
            let ab = group.mul(a, b);
            let composite = action[b]
                .as_ref()
                .unwrap()
                .then(action[a].as_ref().unwrap());
            match &action[ab] {
                Some(existing) if *existing != composite => {
                    return Err(GroupError::InconsistentAction(group.name(ab).into()))
                }
                Some(_) => {}
                None => {
                    action[ab] = Some(composite);
                    queue.push_back(ab);
                }
            }
        }
    }
    let action = action
        .into_iter()
        .enumerate()
        .map(|(g, p)| p.ok_or_else(|| GroupError::Underdetermined(group.name(g).into())))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FinObject::with_action(Symmetry::Group(group), names, action)?)
}

/// The partition of a G-set into orbits, ordered by least element.
pub fn orbits(x: &FinObject) -> Vec<Vec<usize>> {
    x.orbits()
}

/// Elements fixed by every group element.
pub fn fixed_points(x: &FinObject) -> Vec<usize> {
    x.fixed_points()
}

/// `x` viewed as a `source`-set through `f`: `g·x = f(g)·x`.
pub fn restrict_object(f: &GroupHom, x: &FinObject) -> Result<FinObject, GroupError> {
    match x.symmetry() {
        Symmetry::Group(h) if **h == *f.target => {}
        other => {
            return Err(BackendError::Mismatch {
                expected: format!("gset over a group of order {}", f.target.order()),
                found: other.describe(),
            }
            .into())
        }
    }
    let action = (0..f.source.order())
        .map(|g| x.actions()[f.apply(g)].clone())
        .collect();
    Ok(FinObject::with_action(
        Symmetry::Group(f.source.clone()),
        x.names().to_vec(),
        action,
    )?)
}

/// Restriction of an H-automaton along `f : G → H`. Carriers, initial state,
/// final states and transitions are unchanged; only the acting group changes.
pub fn restrict_automaton(f: &GroupHom, a: &Automaton) -> Result<Automaton, GroupError> {
    let alphabet = restrict_object(f, a.alphabet())?;
    let states = restrict_object(f, a.states())?;
    Automaton::new(
        alphabet,
        states,
        a.init(),
        a.finals().to_vec(),
        a.delta_table().to_vec(),
    )
    .map_err(|e| match e {
        AutomatonError::Backend(b) => GroupError::Backend(b),
        other => GroupError::InconsistentAction(other.to_string()),
    })
}

/// The underlying classical automaton.
pub fn forget(a: &Automaton) -> Automaton {
    a.forget()
}

/// Finite G-sets for a fixed group.
#[derive(Clone, Debug)]
pub struct GSet {
    pub group: Arc<FinGroup>,
}

impl GSet {
    pub fn new(group: Arc<FinGroup>) -> Self {
        GSet { group }
    }

    fn check(&self, x: &FinObject) -> Result<(), BackendError> {
        match x.symmetry() {
            Symmetry::Group(g) if **g == *self.group => Ok(()),
            other => Err(BackendError::Mismatch {
                expected: format!("gset over a group of order {}", self.group.order()),
                found: other.describe(),
            }),
        }
    }
}

impl Backend for GSet {
    type Object = FinObject;
    type Morphism = FinMorphism;

    fn tag(&self) -> BackendTag {
        BackendTag::GSet
    }

    fn product(&self, x: &FinObject, y: &FinObject) -> Result<Product<FinObject, FinMorphism>, BackendError> {
        self.check(x)?;
        self.check(y)?;
        crate::backend::finite_ops::product(x, y)
    }

    fn image_factorization(
        &self,
        f: &FinMorphism,
    ) -> Result<Factorization<FinObject, FinMorphism>, BackendError> {
        self.check(f.source())?;
        crate::backend::finite_ops::image_factorization(f)
    }

    fn quotient(&self, x: &FinObject, c: &Congruence) -> Result<(FinObject, FinMorphism), BackendError> {
        self.check(x)?;
        crate::backend::finite_ops::quotient(x, c)
    }

    /// dK-finite iff finite as a set (always, here); decomposition-finite iff
    /// finitely many orbits.
    fn finiteness(&self, x: &FinObject) -> FinitenessReport {
        FinitenessReport {
            dk_finite: true,
            decomposition_finite: true,
            orbit_count: x.orbit_count(),
        }
    }
}
