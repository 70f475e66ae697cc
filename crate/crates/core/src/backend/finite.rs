use std::collections::HashMap;
use std::sync::Arc;

use super::{BackendError, Congruence, Factorization, Product};
use crate::gset::FinGroup;
use crate::nominal::AtomPool;
use crate::perm::Perm;

/// The symmetry acting on a finite carrier.
///
/// Each variant fixes a list of symmetry labels; every [`FinObject`] stores one
/// permutation per label. For a finite group the labels are all group elements
/// (in group order); for an atom pool they are all transpositions of pool atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Symmetry {
    Trivial,
    Group(Arc<FinGroup>),
    Pool(AtomPool),
}

impl Symmetry {
    pub fn label_count(&self) -> usize {
        match self {
            Symmetry::Trivial => 0,
            Symmetry::Group(g) => g.order(),
            Symmetry::Pool(p) => p.transpositions().len(),
        }
    }

    pub fn label_name(&self, label: usize) -> String {
        match self {
            Symmetry::Trivial => String::from("id"),
            Symmetry::Group(g) => g.name(label).to_string(),
            Symmetry::Pool(p) => {
                let (a, b) = p.transpositions()[label];
                format!("({a} {b})")
            }
        }
    }

    pub fn is_trivial(&self) -> bool {
        matches!(self, Symmetry::Trivial)
    }

    pub fn describe(&self) -> String {
        match self {
            Symmetry::Trivial => "set".into(),
            Symmetry::Group(g) => format!("gset over a group of order {}", g.order()),
            Symmetry::Pool(p) => format!("atom pool of size {}", p.size()),
        }
    }

    fn same(&self, other: &Symmetry) -> bool {
        match (self, other) {
            (Symmetry::Group(a), Symmetry::Group(b)) => Arc::ptr_eq(a, b) || a == b,
            _ => self == other,
        }
    }
}

/// A finite set of named elements with a symmetry action.
#[derive(Clone, Debug)]
pub struct FinObject {
    symmetry: Symmetry,
    names: Vec<String>,
    action: Vec<Perm>,
    lookup: HashMap<String, usize>,
}

impl PartialEq for FinObject {
    fn eq(&self, other: &Self) -> bool {
        self.symmetry.same(&other.symmetry)
            && self.names == other.names
            && self.action == other.action
    }
}

impl Eq for FinObject {}

impl FinObject {
    /// A plain finite set.
    pub fn set<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self, BackendError> {
        FinObject::with_action(Symmetry::Trivial, names.into_iter().map(Into::into).collect(), Vec::new())
    }

    /// Builds an object and checks the action: one permutation per label and,
    /// for groups, the left-action laws `e·x = x` and `(gh)·x = g·(h·x)`.
    pub fn with_action(
        symmetry: Symmetry,
        names: Vec<String>,
        action: Vec<Perm>,
    ) -> Result<Self, BackendError> {
        let mut lookup = HashMap::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            if lookup.insert(n.clone(), i).is_some() {
                return Err(BackendError::DuplicateName(n.clone()));
            }
        }
        if action.len() != symmetry.label_count() {
            return Err(BackendError::ActionLaw(format!(
                "expected {} action permutations, got {}",
                symmetry.label_count(),
                action.len()
            )));
        }
        if let Some(p) = action.iter().find(|p| p.degree() != names.len()) {
            return Err(BackendError::ActionLaw(format!(
                "permutation of degree {} on a carrier of {} elements",
                p.degree(),
                names.len()
            )));
        }
        if let Symmetry::Group(g) = &symmetry {
            if !action[g.identity()].is_identity() {
                return Err(BackendError::ActionLaw(format!(
                    "identity `{}` acts non-trivially",
                    g.name(g.identity())
                )));
            }
            for a in 0..g.order() {
                for b in 0..g.order() {
                    let ab = g.mul(a, b);
                    if action[ab] != action[b].then(&action[a]) {
                        return Err(BackendError::ActionLaw(format!(
                            "action of `{}` is not the composite of `{}` and `{}`",
                            g.name(ab),
                            g.name(a),
                            g.name(b)
                        )));
                    }
                }
            }
        }
        Ok(FinObject {
            symmetry,
            names,
            action,
            lookup,
        })
    }

    /// The truth object `{0, 1}` with every symmetry acting trivially.
    pub fn truth(symmetry: Symmetry) -> Self {
        let action = vec![Perm::identity(2); symmetry.label_count()];
        FinObject::with_action(symmetry, vec!["0".into(), "1".into()], action)
            .expect("trivial action is valid")
    }

    /// A one-element object.
    pub fn terminal(symmetry: Symmetry) -> Self {
        let action = vec![Perm::identity(1); symmetry.label_count()];
        FinObject::with_action(symmetry, vec!["*".into()], action).expect("trivial action is valid")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn symmetry(&self) -> &Symmetry {
        &self.symmetry
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.lookup.get(name).copied()
    }

    pub fn actions(&self) -> &[Perm] {
        &self.action
    }

    #[inline]
    pub fn act(&self, label: usize, x: usize) -> usize {
        self.action[label].apply(x)
    }

    pub fn same_symmetry(&self, other: &FinObject) -> bool {
        self.symmetry.same(&other.symmetry)
    }

    /// Same symmetry and same action, with fresh element names.
    pub fn renamed(&self, names: Vec<String>) -> Result<FinObject, BackendError> {
        FinObject::with_action(self.symmetry.clone(), names, self.action.clone())
    }

    /// Orbit index of every element, orbits numbered by least element.
    pub fn orbit_ids(&self) -> (Vec<usize>, usize) {
        let n = self.len();
        let mut id = vec![usize::MAX; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for start in 0..n {
            if id[start] != usize::MAX {
                continue;
            }
            id[start] = count;
            stack.push(start);
            while let Some(x) = stack.pop() {
                for p in &self.action {
                    let y = p.apply(x);
                    if id[y] == usize::MAX {
                        id[y] = count;
                        stack.push(y);
                    }
                }
            }
            count += 1;
        }
        (id, count)
    }

    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let (ids, count) = self.orbit_ids();
        let mut out = vec![Vec::new(); count];
        for (x, &o) in ids.iter().enumerate() {
            out[o].push(x);
        }
        out
    }

    pub fn orbit_count(&self) -> usize {
        self.orbit_ids().1
    }

    pub fn fixed_points(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&x| self.action.iter().all(|p| p.apply(x) == x))
            .collect()
    }

    pub fn is_fixed(&self, x: usize) -> bool {
        self.action.iter().all(|p| p.apply(x) == x)
    }

    /// The first label moving `x`, if any.
    pub fn moving_label(&self, x: usize) -> Option<usize> {
        self.action.iter().position(|p| p.apply(x) != x)
    }

    /// Checks that the symmetry maps blocks onto blocks.
    pub fn check_symmetry_closed(&self, c: &Congruence) -> Result<(), BackendError> {
        let block_of = c.block_of();
        for (label, p) in self.action.iter().enumerate() {
            for (b, block) in c.blocks().iter().enumerate() {
                let target = block_of[p.apply(block[0])];
                if block.iter().any(|&x| block_of[p.apply(x)] != target)
                    || c.blocks()[target].len() != block.len()
                {
                    return Err(BackendError::NotSymmetryClosed {
                        block: b,
                        label: self.symmetry.label_name(label),
                    });
                }
            }
        }
        Ok(())
    }

    /// The sub-object on `elements` (kept in the given order), which must be
    /// closed under the symmetry. Returns the sub-object and, for each element
    /// of `self`, its index in the sub-object.
    pub fn restrict(&self, elements: &[usize]) -> Result<(FinObject, Vec<Option<usize>>), BackendError> {
        let mut position = vec![None; self.len()];
        for (k, &x) in elements.iter().enumerate() {
            position[x] = Some(k);
        }
        let mut action = Vec::with_capacity(self.action.len());
        for (label, p) in self.action.iter().enumerate() {
            let mut images = Vec::with_capacity(elements.len());
            for &x in elements {
                match position[p.apply(x)] {
                    Some(k) => images.push(k),
                    None => {
                        return Err(BackendError::NotEquivariant {
                            element: self.names[x].clone(),
                            label: self.symmetry.label_name(label),
                        })
                    }
                }
            }
            action.push(Perm::from_images(images).expect("restriction of a permutation"));
        }
        let names = elements.iter().map(|&x| self.names[x].clone()).collect();
        Ok((
            FinObject::with_action(self.symmetry.clone(), names, action)?,
            position,
        ))
    }

    /// The same carrier with the symmetry forgotten.
    pub fn forget(&self) -> FinObject {
        FinObject::with_action(Symmetry::Trivial, self.names.clone(), Vec::new())
            .expect("names already unique")
    }

    pub(crate) fn ensure_same_symmetry(&self, other: &FinObject) -> Result<(), BackendError> {
        if self.same_symmetry(other) {
            Ok(())
        } else {
            Err(BackendError::Mismatch {
                expected: self.symmetry.describe(),
                found: other.symmetry.describe(),
            })
        }
    }
}

/// A total map between finite carriers that commutes with the symmetry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinMorphism {
    source: FinObject,
    target: FinObject,
    map: Vec<usize>,
}

impl FinMorphism {
    pub fn new(source: FinObject, target: FinObject, map: Vec<usize>) -> Result<Self, BackendError> {
        source.ensure_same_symmetry(&target)?;
        if map.len() != source.len() {
            let missing = source.names.get(map.len()).cloned().unwrap_or_default();
            return Err(BackendError::NotTotal(missing));
        }
        if let Some(x) = map.iter().position(|&y| y >= target.len()) {
            return Err(BackendError::NotTotal(source.names[x].clone()));
        }
        for label in 0..source.action.len() {
            for x in 0..source.len() {
                if map[source.act(label, x)] != target.act(label, map[x]) {
                    return Err(BackendError::NotEquivariant {
                        element: source.names[x].clone(),
                        label: source.symmetry.label_name(label),
                    });
                }
            }
        }
        Ok(FinMorphism { source, target, map })
    }

    pub fn identity(x: &FinObject) -> Self {
        FinMorphism {
            source: x.clone(),
            target: x.clone(),
            map: (0..x.len()).collect(),
        }
    }

    pub fn source(&self) -> &FinObject {
        &self.source
    }

    pub fn target(&self) -> &FinObject {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn then(&self, other: &FinMorphism) -> Result<FinMorphism, BackendError> {
        if self.target != other.source {
            return Err(BackendError::Mismatch {
                expected: "composable morphisms".into(),
                found: "target and source differ".into(),
            });
        }
        Ok(FinMorphism {
            source: self.source.clone(),
            target: other.target.clone(),
            map: self.map.iter().map(|&y| other.map[y]).collect(),
        })
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.target.len()];
        self.map.iter().all(|&y| !std::mem::replace(&mut seen[y], true))
    }

    pub fn is_surjective(&self) -> bool {
        let mut seen = vec![false; self.target.len()];
        for &y in &self.map {
            seen[y] = true;
        }
        seen.into_iter().all(|s| s)
    }

    /// The kernel pair of the map, as a partition of the source.
    pub fn kernel(&self) -> Congruence {
        Congruence::from_labels(&self.map)
    }
}

/// Pairs `(x, y)` at index `x * |y| + y`, with the diagonal action.
pub(crate) fn product(x: &FinObject, y: &FinObject) -> Result<Product<FinObject, FinMorphism>, BackendError> {
    x.ensure_same_symmetry(y)?;
    let (n, m) = (x.len(), y.len());
    let mut names = Vec::with_capacity(n * m);
    for a in x.names() {
        for b in y.names() {
            names.push(format!("({a},{b})"));
        }
    }
    let action = x
        .action
        .iter()
        .zip(&y.action)
        .map(|(p, q)| {
            let images = (0..n * m)
                .map(|k| p.apply(k / m) * m + q.apply(k % m))
                .collect();
            Perm::from_images(images).expect("product of permutations")
        })
        .collect();
    let object = FinObject::with_action(x.symmetry.clone(), names, action)?;
    let left = FinMorphism {
        source: object.clone(),
        target: x.clone(),
        map: (0..n * m).map(|k| k / m).collect(),
    };
    let right = FinMorphism {
        source: object.clone(),
        target: y.clone(),
        map: (0..n * m).map(|k| k % m).collect(),
    };
    Ok(Product { object, left, right })
}

/// Unique map into a product with the given components.
pub fn pairing(product: &Product<FinObject, FinMorphism>, f: &FinMorphism, g: &FinMorphism) -> Result<FinMorphism, BackendError> {
    let m = product.right.target().len();
    let map = f.map.iter().zip(&g.map).map(|(&a, &b)| a * m + b).collect();
    FinMorphism::new(f.source.clone(), product.object.clone(), map)
}

pub(crate) fn image_factorization(
    f: &FinMorphism,
) -> Result<Factorization<FinObject, FinMorphism>, BackendError> {
    let mut hit = vec![false; f.target.len()];
    for &y in &f.map {
        hit[y] = true;
    }
    let elements: Vec<usize> = (0..f.target.len()).filter(|&y| hit[y]).collect();
    let (mid, position) = f.target.restrict(&elements)?;
    let epi = FinMorphism {
        source: f.source.clone(),
        target: mid.clone(),
        map: f.map.iter().map(|&y| position[y].expect("image element")).collect(),
    };
    let mono = FinMorphism {
        source: mid.clone(),
        target: f.target.clone(),
        map: elements,
    };
    Ok(Factorization { epi, mid, mono })
}

pub(crate) fn quotient(x: &FinObject, c: &Congruence) -> Result<(FinObject, FinMorphism), BackendError> {
    if c.size() != x.len() {
        return Err(BackendError::InvalidPartition(format!(
            "partition of {} elements on an object of {}",
            c.size(),
            x.len()
        )));
    }
    x.check_symmetry_closed(c)?;
    let block_of = c.block_of();
    let names = c
        .blocks()
        .iter()
        .map(|b| {
            if b.len() == 1 {
                x.names[b[0]].clone()
            } else {
                let inner: Vec<&str> = b.iter().map(|&e| x.name(e)).collect();
                format!("{{{}}}", inner.join(","))
            }
        })
        .collect();
    let action = x
        .action
        .iter()
        .map(|p| {
            let images = c.blocks().iter().map(|b| block_of[p.apply(b[0])]).collect();
            Perm::from_images(images).expect("closed partition")
        })
        .collect();
    let q = FinObject::with_action(x.symmetry.clone(), names, action)?;
    let proj = FinMorphism {
        source: x.clone(),
        target: q.clone(),
        map: block_of,
    };
    Ok((q, proj))
}
