use std::collections::{HashMap, VecDeque};

use super::{Atom, AtomPool, NomElement, NomObject, NominalError, OrbitDescriptor, MAX_DIM};
use crate::backend::{FinObject, Symmetry};
use crate::perm::{all_permutations, Perm};

impl AtomPool {
    /// Label index of the transposition `(a b)`.
    pub fn label(&self, a: Atom, b: Atom) -> usize {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        let n = self.size();
        let (a, b) = (a as usize, b as usize);
        (1..a).map(|k| n - k).sum::<usize>() + (b - a - 1)
    }
}

/// The finite Sym(pool)-set of all elements whose atoms lie in the pool.
#[derive(Clone, Debug)]
pub struct Instantiation {
    pub object: FinObject,
    pub elements: Vec<NomElement>,
    index: HashMap<NomElement, usize>,
}

impl Instantiation {
    pub fn index_of(&self, x: &NomElement) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

fn injective_tuples(atoms: &[Atom], len: usize, out: &mut Vec<Vec<Atom>>) {
    fn go(atoms: &[Atom], len: usize, cur: &mut Vec<Atom>, out: &mut Vec<Vec<Atom>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for &a in atoms {
            if !cur.contains(&a) {
                cur.push(a);
                go(atoms, len, cur, out);
                cur.pop();
            }
        }
    }
    go(atoms, len, &mut Vec::with_capacity(len), out);
}

/// Enumerates `x` over the pool, orbit by orbit in lexicographic tuple order,
/// with one permutation per pool transposition.
pub fn instantiate_object(x: &NomObject, pool: &AtomPool, cap: usize) -> Result<Instantiation, NominalError> {
    if pool.size() < x.max_dim() {
        return Err(NominalError::PoolTooSmall {
            needed: x.max_dim(),
            size: pool.size(),
        });
    }
    let total: usize = x.orbits().iter().map(|o| o.count_in_pool(pool.size())).sum();
    if total > cap {
        return Err(NominalError::CapExceeded {
            what: format!("instantiation over a pool of {} atoms ({total} elements)", pool.size()),
            limit: cap,
        });
    }
    let atoms: Vec<Atom> = pool.atoms().collect();
    let mut elements = Vec::with_capacity(total);
    for (k, o) in x.orbits().iter().enumerate() {
        let mut tuples = Vec::new();
        injective_tuples(&atoms, o.dim(), &mut tuples);
        for t in tuples {
            if o.canonical(&t) == t {
                elements.push(x.element_unchecked(k, &t));
            }
        }
    }
    let index: HashMap<NomElement, usize> = elements
        .iter()
        .enumerate()
        .map(|(i, e)| (e.clone(), i))
        .collect();
    let action = pool
        .transpositions()
        .iter()
        .map(|&(a, b)| {
            let images = elements
                .iter()
                .map(|e| index[&x.act(|c| swap(a, b, c), e)])
                .collect();
            Perm::from_images(images).expect("transpositions permute the carrier")
        })
        .collect();
    let names = elements.iter().map(|e| x.display(e)).collect();
    let object = FinObject::with_action(Symmetry::Pool(pool.clone()), names, action)?;
    Ok(Instantiation {
        object,
        elements,
        index,
    })
}

#[inline]
fn swap(a: Atom, b: Atom, c: Atom) -> Atom {
    if c == a {
        b
    } else if c == b {
        a
    } else {
        c
    }
}

fn pool_of(obj: &FinObject) -> Result<&AtomPool, NominalError> {
    match obj.symmetry() {
        Symmetry::Pool(p) => Ok(p),
        other => Err(NominalError::Automaton(format!(
            "expected an atom-pool carrier, found {}",
            other.describe()
        ))),
    }
}

/// Acts on element `x` of a pool carrier by the atom permutation `pi`,
/// written as a product of transpositions.
pub fn act_atoms(obj: &FinObject, pi: impl Fn(Atom) -> Atom, x: usize) -> Result<usize, NominalError> {
    let pool = pool_of(obj)?;
    let mut seen = vec![false; pool.size() + 1];
    let mut y = x;
    for start in pool.atoms() {
        if seen[start as usize] {
            continue;
        }
        seen[start as usize] = true;
        let mut c = pi(start);
        // the cycle (start c2 c3 ...) is (start c2) then (start c3) then ...
        while c != start {
            seen[c as usize] = true;
            y = obj.act(pool.label(start, c), y);
            c = pi(c);
        }
    }
    Ok(y)
}

/// Orbit-finite description of a pool carrier, with each element's canonical
/// form. Orbit `k` is named by `name(k)`; orbits are ordered by least member.
#[derive(Clone, Debug)]
pub struct Abstraction {
    pub object: NomObject,
    pub elements: Vec<NomElement>,
    index: HashMap<NomElement, usize>,
}

impl Abstraction {
    pub fn index_of(&self, x: &NomElement) -> Option<usize> {
        self.index.get(x).copied()
    }
}

/// Recovers orbits, least supports and stabilizers of a finite Sym(pool)-set.
///
/// `bounds[x]` must contain a support of element `x`. The least support of an
/// orbit representative is the set of bound atoms `a` with `(a b)·x ≠ x` for a
/// pool atom `b` outside the bound; if no such `b` exists the margin is
/// violated and the computation refuses to guess.
pub fn abstract_object(
    obj: &FinObject,
    bounds: &[Vec<Atom>],
    name: &dyn Fn(usize) -> String,
) -> Result<Abstraction, NominalError> {
    let pool = pool_of(obj)?.clone();
    let mut orbits = Vec::new();
    let mut elements: Vec<Option<NomElement>> = vec![None; obj.len()];
    for (k, members) in obj.orbits().into_iter().enumerate() {
        let rep = members[0];
        let mut bound = bounds[rep].clone();
        bound.sort_unstable();
        bound.dedup();
        let fresh = pool.fresh(&bound).ok_or_else(|| NominalError::MarginViolated {
            element: obj.name(rep).to_string(),
        })?;
        let support: Vec<Atom> = bound
            .iter()
            .copied()
            .filter(|&a| obj.act(pool.label(a, fresh), rep) != rep)
            .collect();
        let dim = support.len();
        if dim > MAX_DIM {
            return Err(NominalError::DimTooLarge {
                orbit: name(k),
                dim,
            });
        }
        let mut group = Vec::new();
        for sigma in all_permutations(dim) {
            let moved = act_atoms(
                obj,
                |c| match support.binary_search(&c) {
                    Ok(i) => support[sigma.apply(i)],
                    Err(_) => c,
                },
                rep,
            )?;
            if moved == rep {
                group.push(sigma);
            }
        }
        let descriptor = OrbitDescriptor::from_group(name(k), dim, group);
        // walk the orbit, remembering a pool permutation that reaches each member
        let mut queue = VecDeque::new();
        let identity: Vec<Atom> = (0..=pool.size() as Atom).collect();
        elements[rep] = Some(NomElement::from_parts(k, support.clone()));
        queue.push_back((rep, identity));
        while let Some((x, images)) = queue.pop_front() {
            for (label, &(a, b)) in pool.transpositions().iter().enumerate() {
                let y = obj.act(label, x);
                if elements[y].is_some() {
                    continue;
                }
                let next: Vec<Atom> = images.iter().map(|&c| swap(a, b, c)).collect();
                let tuple: Vec<Atom> = support.iter().map(|&c| next[c as usize]).collect();
                elements[y] = Some(NomElement::from_parts(k, descriptor.canonical(&tuple)));
                queue.push_back((y, next));
            }
        }
        orbits.push(descriptor);
    }
    let elements: Vec<NomElement> = elements
        .into_iter()
        .map(|e| e.expect("every element lies in an orbit"))
        .collect();
    let object = NomObject::new(orbits)?;
    let index: HashMap<NomElement, usize> = elements
        .iter()
        .enumerate()
        .map(|(i, e)| (e.clone(), i))
        .collect();
    if index.len() != elements.len() {
        return Err(NominalError::Automaton(
            "abstraction identified distinct elements; the pool action is not faithful".into(),
        ));
    }
    Ok(Abstraction {
        object,
        elements,
        index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::{Congruence, FinMorphism};

    fn obj(orbits: &[(&str, usize, &str)]) -> NomObject {
        NomObject::new(
            orbits
                .iter()
                .map(|&(n, d, stab)| {
                    let gens = if stab.is_empty() {
                        vec![]
                    } else {
                        stab.split(',').map(|g| Perm::parse_cycles(d, g.trim()).unwrap()).collect()
                    };
                    OrbitDescriptor::new(n, d, gens).unwrap()
                })
                .collect(),
        )
        .unwrap()
    }

    fn support_bounds(inst: &Instantiation) -> Vec<Vec<Atom>> {
        inst.elements.iter().map(|e| e.atoms().to_vec()).collect()
    }

    #[test]
    fn label_indices_match_transposition_order() {
        let p = AtomPool::new(5).unwrap();
        for (k, &(a, b)) in p.transpositions().iter().enumerate() {
            assert_eq!(p.label(a, b), k);
            assert_eq!(p.label(b, a), k);
        }
    }

    #[test]
    fn instantiation_counts() {
        let p3 = AtomPool::new(3).unwrap();
        assert_eq!(instantiate_object(&obj(&[("A", 1, "")]), &p3, 100).unwrap().len(), 3);
        assert_eq!(instantiate_object(&obj(&[("P", 2, "")]), &p3, 100).unwrap().len(), 6);
        let q = obj(&[("OL", 0, ""), ("Oa", 1, ""), ("Otop", 0, "")]);
        let inst = instantiate_object(&q, &p3, 100).unwrap();
        assert_eq!(inst.len(), 5);
        assert_eq!(inst.object.orbit_count(), 3);
        assert!(matches!(
            instantiate_object(&obj(&[("P", 2, "")]), &p3, 5),
            Err(NominalError::CapExceeded { .. })
        ));
    }

    #[test]
    fn round_trip_recovers_descriptors() {
        let x = obj(&[
            ("z", 0, ""),
            ("A", 1, ""),
            ("U", 2, "(1 2)"),
            ("C", 3, "(1 2 3)"),
            ("T", 3, "(1 2)"),
        ]);
        let pool = AtomPool::new(4).unwrap();
        let inst = instantiate_object(&x, &pool, 1000).unwrap();
        let abs = abstract_object(&inst.object, &support_bounds(&inst), &|k| format!("o{k}")).unwrap();
        assert!(abs.object.isomorphic(&x));
        for (e, a) in inst.elements.iter().zip(&abs.elements) {
            assert_eq!(e.atoms().len(), a.atoms().len());
            assert_eq!(e.support(), a.support());
        }
    }

    #[test]
    fn saturated_pool_is_a_margin_violation() {
        let x = obj(&[("P", 2, "")]);
        let pool = AtomPool::new(2).unwrap();
        let inst = instantiate_object(&x, &pool, 100).unwrap();
        let err = abstract_object(&inst.object, &support_bounds(&inst), &|k| format!("o{k}")).unwrap_err();
        assert!(matches!(err, NominalError::MarginViolated { .. }));
    }

    #[test]
    fn unordered_pairs_from_a_quotient() {
        let x = obj(&[("P", 2, "")]);
        let pool = AtomPool::new(4).unwrap();
        let inst = instantiate_object(&x, &pool, 100).unwrap();
        let labels: Vec<usize> = inst
            .elements
            .iter()
            .map(|e| {
                let (a, b) = (e.atoms()[0].min(e.atoms()[1]), e.atoms()[0].max(e.atoms()[1]));
                (a * 10 + b) as usize
            })
            .collect();
        let c = Congruence::from_labels(&labels);
        let (q, proj): (FinObject, FinMorphism) = crate::backend::finite_ops::quotient(&inst.object, &c).unwrap();
        let bounds: Vec<Vec<Atom>> = c.blocks().iter().map(|b| inst.elements[b[0]].atoms().to_vec()).collect();
        let abs = abstract_object(&q, &bounds, &|k| format!("u{k}")).unwrap();
        assert_eq!(abs.object.orbit_count(), 1);
        assert_eq!(abs.object.orbit(0).dim(), 2);
        assert_eq!(abs.object.orbit(0).stabilizer_order(), 2);
        assert!(proj.is_surjective());
    }

    #[test]
    fn act_atoms_realizes_a_three_cycle() {
        let x = obj(&[("P", 3, "")]);
        let pool = AtomPool::new(3).unwrap();
        let inst = instantiate_object(&x, &pool, 100).unwrap();
        let start = inst.index_of(&x.element(0, &[1, 2, 3]).unwrap()).unwrap();
        let cyc = |c: Atom| if c == 3 { 1 } else { c + 1 };
        let moved = act_atoms(&inst.object, cyc, start).unwrap();
        assert_eq!(inst.elements[moved].atoms(), &[2, 3, 1]);
    }
}
