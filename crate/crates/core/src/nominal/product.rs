use std::collections::{BTreeSet, HashMap};

use super::{Atom, NomElement, NomObject, NominalError, OrbitDescriptor};
use crate::backend::Factorization;
use crate::perm::Perm;

/// How a pair of tuples overlaps: entry `j` is the position in the left tuple
/// holding the right tuple's atom `j`, or `None` when that atom is fresh.
pub type PairPattern = Vec<Option<usize>>;

fn transform(p: &[Option<usize>], sigma_inv: &Perm, tau: &Perm) -> PairPattern {
    (0..p.len())
        .map(|j| p[tau.apply(j)].map(|i| sigma_inv.apply(i)))
        .collect()
}

fn canonical_pattern(x: &OrbitDescriptor, y: &OrbitDescriptor, p: &[Option<usize>]) -> PairPattern {
    let mut best: Option<PairPattern> = None;
    for s in x.stabilizer() {
        let si = s.inverse();
        for t in y.stabilizer() {
            let q = transform(p, &si, t);
            if best.as_ref().is_none_or(|b| q < *b) {
                best = Some(q);
            }
        }
    }
    best.expect("stabilizers contain the identity")
}

fn partial_injections(m: usize, n: usize) -> Vec<PairPattern> {
    fn go(m: usize, n: usize, cur: &mut PairPattern, used: &mut Vec<bool>, out: &mut Vec<PairPattern>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        cur.push(None);
        go(m, n, cur, used, out);
        cur.pop();
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                cur.push(Some(i));
                go(m, n, cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(m, n, &mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Canonical overlap patterns between two orbits, one per orbit of their
/// product, sorted.
pub fn pair_patterns(x: &OrbitDescriptor, y: &OrbitDescriptor) -> Vec<PairPattern> {
    let set: BTreeSet<PairPattern> = partial_injections(y.dim(), x.dim())
        .into_iter()
        .map(|p| canonical_pattern(x, y, &p))
        .collect();
    set.into_iter().collect()
}

fn pattern_text(p: &[Option<usize>]) -> String {
    let parts: Vec<String> = p
        .iter()
        .map(|e| e.map_or_else(|| "_".to_string(), |i| (i + 1).to_string()))
        .collect();
    format!("[{}]", parts.join(","))
}

/// The symbolic binary product of two orbit-finite sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NomProduct {
    x: NomObject,
    y: NomObject,
    object: NomObject,
    components: Vec<(usize, usize, PairPattern)>,
    lookup: HashMap<(usize, usize, PairPattern), usize>,
    left: EquivariantMap,
    right: EquivariantMap,
}

impl NomProduct {
    pub fn new(x: &NomObject, y: &NomObject) -> Result<Self, NominalError> {
        let mut orbits = Vec::new();
        let mut components = Vec::new();
        let mut left = Vec::new();
        let mut right = Vec::new();
        for (i, ox) in x.orbits().iter().enumerate() {
            for (j, oy) in y.orbits().iter().enumerate() {
                for p in pair_patterns(ox, oy) {
                    let n = ox.dim();
                    let fresh: Vec<usize> = (0..p.len()).filter(|&k| p[k].is_none()).collect();
                    let mut rank = vec![usize::MAX; p.len()];
                    for (r, &k) in fresh.iter().enumerate() {
                        rank[k] = r;
                    }
                    let dim = n + fresh.len();
                    if dim > super::MAX_DIM {
                        return Err(NominalError::DimTooLarge {
                            orbit: format!("{}*{}", ox.name(), oy.name()),
                            dim,
                        });
                    }
                    let mut group = BTreeSet::new();
                    for s in ox.stabilizer() {
                        let si = s.inverse();
                        for t in oy.stabilizer() {
                            if transform(&p, &si, t) != p {
                                continue;
                            }
                            let mut images: Vec<usize> = (0..n).map(|k| s.apply(k)).collect();
                            images.extend(fresh.iter().map(|&k| n + rank[t.apply(k)]));
                            group.insert(Perm::from_images(images).expect("permutation"));
                        }
                    }
                    let name = format!("({},{}){}", ox.name(), oy.name(), pattern_text(&p));
                    orbits.push(OrbitDescriptor::from_group(name, dim, group.into_iter().collect()));
                    left.push(OrbitMap {
                        target: i,
                        positions: (0..n).collect(),
                    });
                    right.push(OrbitMap {
                        target: j,
                        positions: (0..p.len()).map(|k| p[k].unwrap_or_else(|| n + rank[k])).collect(),
                    });
                    components.push((i, j, p));
                }
            }
        }
        let object = NomObject::new(orbits)?;
        let lookup = components
            .iter()
            .enumerate()
            .map(|(k, c)| (c.clone(), k))
            .collect();
        let left = EquivariantMap::new(object.clone(), x.clone(), left)?;
        let right = EquivariantMap::new(object.clone(), y.clone(), right)?;
        Ok(NomProduct {
            x: x.clone(),
            y: y.clone(),
            object,
            components,
            lookup,
            left,
            right,
        })
    }

    pub fn object(&self) -> &NomObject {
        &self.object
    }

    pub fn left(&self) -> &EquivariantMap {
        &self.left
    }

    pub fn right(&self) -> &EquivariantMap {
        &self.right
    }

    /// The orbit pair and overlap pattern behind each product orbit.
    pub fn components(&self) -> &[(usize, usize, PairPattern)] {
        &self.components
    }

    /// The product element `(a, b)`.
    pub fn pair(&self, a: &NomElement, b: &NomElement) -> NomElement {
        let (ox, oy) = (self.x.orbit(a.orbit()), self.y.orbit(b.orbit()));
        let raw: PairPattern = b
            .atoms()
            .iter()
            .map(|c| a.atoms().iter().position(|d| d == c))
            .collect();
        let mut best: Option<(PairPattern, Vec<Atom>)> = None;
        for s in ox.stabilizer() {
            let si = s.inverse();
            for t in oy.stabilizer() {
                let p = transform(&raw, &si, t);
                let mut w: Vec<Atom> = (0..ox.dim()).map(|k| a.atoms()[s.apply(k)]).collect();
                w.extend(
                    (0..p.len())
                        .filter(|&k| p[k].is_none())
                        .map(|k| b.atoms()[t.apply(k)]),
                );
                let cand = (p, w);
                if best.as_ref().is_none_or(|b| cand < *b) {
                    best = Some(cand);
                }
            }
        }
        let (p, w) = best.expect("stabilizers contain the identity");
        let k = self.lookup[&(a.orbit(), b.orbit(), p)];
        self.object.element_unchecked(k, &w)
    }
}

/// Per source orbit: the target orbit and which source positions fill the
/// target tuple.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrbitMap {
    pub target: usize,
    pub positions: Vec<usize>,
}

/// An equivariant map between orbit-finite sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivariantMap {
    source: NomObject,
    target: NomObject,
    maps: Vec<OrbitMap>,
}

impl EquivariantMap {
    /// Checks shapes and well-definedness: every source stabilizer element
    /// must yield the same target element.
    pub fn new(source: NomObject, target: NomObject, maps: Vec<OrbitMap>) -> Result<Self, NominalError> {
        if maps.len() != source.orbit_count() {
            return Err(NominalError::BadMap {
                orbit: "*".into(),
                reason: format!("{} orbit maps for {} orbits", maps.len(), source.orbit_count()),
            });
        }
        for (o, m) in source.orbits().iter().zip(&maps) {
            let bad = |reason: String| NominalError::BadMap {
                orbit: o.name().into(),
                reason,
            };
            let t = target
                .orbits()
                .get(m.target)
                .ok_or_else(|| bad(format!("target orbit #{} does not exist", m.target)))?;
            if m.positions.len() != t.dim() {
                return Err(bad(format!(
                    "{} positions for target dimension {}",
                    m.positions.len(),
                    t.dim()
                )));
            }
            let distinct: BTreeSet<_> = m.positions.iter().collect();
            if distinct.len() != m.positions.len() || m.positions.iter().any(|&p| p >= o.dim()) {
                return Err(bad("positions must be distinct source positions".into()));
            }
            let base = t.canonical(&m.positions);
            for s in o.stabilizer() {
                let moved: Vec<usize> = m.positions.iter().map(|&p| s.apply(p)).collect();
                if t.canonical(&moved) != base {
                    return Err(bad(format!("not invariant under stabilizer element {s}")));
                }
            }
        }
        Ok(EquivariantMap { source, target, maps })
    }

    /// Builds a map from the image of each orbit's generic element
    /// (atoms `1..=d`); image atoms must come from that element's support.
    pub fn from_representatives(
        source: &NomObject,
        target: &NomObject,
        image: impl Fn(usize) -> Option<NomElement>,
    ) -> Result<Self, NominalError> {
        let mut maps = Vec::with_capacity(source.orbit_count());
        for (k, o) in source.orbits().iter().enumerate() {
            let y = image(k).ok_or_else(|| NominalError::BadMap {
                orbit: o.name().into(),
                reason: "no image".into(),
            })?;
            let positions = y
                .atoms()
                .iter()
                .map(|&a| {
                    if a >= 1 && (a as usize) <= o.dim() {
                        Ok(a as usize - 1)
                    } else {
                        Err(NominalError::BadMap {
                            orbit: o.name().into(),
                            reason: format!("image atom {a} outside the support"),
                        })
                    }
                })
                .collect::<Result<_, _>>()?;
            maps.push(OrbitMap {
                target: y.orbit(),
                positions,
            });
        }
        EquivariantMap::new(source.clone(), target.clone(), maps)
    }

    pub fn identity(x: &NomObject) -> Self {
        let maps = x
            .orbits()
            .iter()
            .enumerate()
            .map(|(k, o)| OrbitMap {
                target: k,
                positions: (0..o.dim()).collect(),
            })
            .collect();
        EquivariantMap {
            source: x.clone(),
            target: x.clone(),
            maps,
        }
    }

    pub fn source(&self) -> &NomObject {
        &self.source
    }

    pub fn target(&self) -> &NomObject {
        &self.target
    }

    pub fn orbit_maps(&self) -> &[OrbitMap] {
        &self.maps
    }

    pub fn apply(&self, x: &NomElement) -> NomElement {
        let m = &self.maps[x.orbit()];
        let atoms: Vec<Atom> = m.positions.iter().map(|&p| x.atoms()[p]).collect();
        self.target.element_unchecked(m.target, &atoms)
    }

    /// `self` first, then `other`.
    pub fn then(&self, other: &EquivariantMap) -> Result<EquivariantMap, NominalError> {
        if self.target != other.source {
            return Err(NominalError::BadMap {
                orbit: "*".into(),
                reason: "composition of maps with mismatched objects".into(),
            });
        }
        let maps = self
            .maps
            .iter()
            .map(|f| {
                let g = &other.maps[f.target];
                OrbitMap {
                    target: g.target,
                    positions: g.positions.iter().map(|&p| f.positions[p]).collect(),
                }
            })
            .collect();
        EquivariantMap::new(self.source.clone(), other.target.clone(), maps)
    }

    pub fn is_surjective(&self) -> bool {
        let hit: BTreeSet<usize> = self.maps.iter().map(|m| m.target).collect();
        hit.len() == self.target.orbit_count()
    }

    /// Through the orbits that are hit: an equivariant image of an orbit is a
    /// whole orbit.
    pub fn image_factorization(&self) -> Result<Factorization<NomObject, EquivariantMap>, NominalError> {
        let hit: Vec<usize> = self
            .maps
            .iter()
            .map(|m| m.target)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let mid = NomObject::new(hit.iter().map(|&t| self.target.orbit(t).clone()).collect())?;
        let epi = self
            .maps
            .iter()
            .map(|m| OrbitMap {
                target: hit.binary_search(&m.target).expect("hit"),
                positions: m.positions.clone(),
            })
            .collect();
        let mono = hit
            .iter()
            .map(|&t| OrbitMap {
                target: t,
                positions: (0..self.target.orbit(t).dim()).collect(),
            })
            .collect();
        Ok(Factorization {
            epi: EquivariantMap::new(self.source.clone(), mid.clone(), epi)?,
            mono: EquivariantMap::new(mid.clone(), self.target.clone(), mono)?,
            mid,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atoms() -> NomObject {
        NomObject::new(vec![OrbitDescriptor::new("A", 1, vec![]).unwrap()]).unwrap()
    }

    #[test]
    fn atoms_squared_has_two_orbits() {
        let a = atoms();
        let p = NomProduct::new(&a, &a).unwrap();
        assert_eq!(p.object().orbit_count(), 2);
        let dims: Vec<usize> = p.object().orbits().iter().map(|o| o.dim()).collect();
        assert_eq!(dims, vec![2, 1]);
        let x = a.element(0, &[3]).unwrap();
        let y = a.element(0, &[7]).unwrap();
        let pair = p.pair(&x, &y);
        assert_eq!(pair.atoms(), &[3, 7]);
        assert_eq!(p.left().apply(&pair), x);
        assert_eq!(p.right().apply(&pair), y);
        let diag = p.pair(&x, &x);
        assert_eq!(diag.orbit(), 1);
        assert_eq!(p.right().apply(&diag), x);
    }

    #[test]
    fn unordered_pair_times_atom() {
        let u = NomObject::new(vec![OrbitDescriptor::new(
            "U",
            2,
            vec![Perm::parse_cycles(2, "(1 2)").unwrap()],
        )
        .unwrap()])
        .unwrap();
        let p = NomProduct::new(&u, &atoms()).unwrap();
        // the atom is fresh or one of the two (which are interchangeable)
        assert_eq!(p.object().orbit_count(), 2);
        let fresh = &p.object().orbits()[0];
        assert_eq!((fresh.dim(), fresh.stabilizer_order()), (3, 2));
        let member = &p.object().orbits()[1];
        assert_eq!((member.dim(), member.stabilizer_order()), (2, 1));
        let x = u.element(0, &[9, 4]).unwrap();
        let pair = p.pair(&x, &atoms().element(0, &[9]).unwrap());
        assert_eq!(pair.atoms(), &[9, 4]);
        assert_eq!(p.left().apply(&pair), x);
    }

    #[test]
    fn ill_defined_map_is_rejected() {
        let u = NomObject::new(vec![OrbitDescriptor::new(
            "U",
            2,
            vec![Perm::parse_cycles(2, "(1 2)").unwrap()],
        )
        .unwrap()])
        .unwrap();
        // picking "the first" atom of an unordered pair is not well defined
        let err = EquivariantMap::new(
            u.clone(),
            atoms(),
            vec![OrbitMap {
                target: 0,
                positions: vec![0],
            }],
        );
        assert!(matches!(err, Err(NominalError::BadMap { .. })));
    }

    #[test]
    fn image_of_first_projection() {
        let a = atoms();
        let p = NomProduct::new(&a, &a).unwrap();
        let f = p.left().image_factorization().unwrap();
        assert_eq!(f.mid.orbit_count(), 1);
        assert!(f.epi.is_surjective());
        let back = f.epi.then(&f.mono).unwrap();
        assert_eq!(&back, p.left());
    }
}
