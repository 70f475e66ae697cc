use super::{abstract_object, Atom, AtomPool, NomAutomaton, NomElement, NomObject, NominalError, MAX_POOL};
use crate::monoid::transition_monoid;

/// One orbit of the syntactic monoid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NominalMonoidOrbit {
    pub dim: usize,
    pub stabilizer_order: usize,
    /// Shortlex-least word reaching the orbit's first element.
    pub witness: Vec<NomElement>,
}

/// The syntactic monoid as orbits, computed on the pool instantiation of the
/// minimal automaton and checked at two pool sizes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NominalMonoidSummary {
    pub pool: usize,
    pub object: NomObject,
    pub orbits: Vec<NominalMonoidOrbit>,
    /// Number of monoid elements with atoms in the pool.
    pub elements_at_pool: usize,
}

struct AtPool {
    size: usize,
    orbit_count: usize,
    elements: usize,
    object: Option<NomObject>,
    orbits: Vec<NominalMonoidOrbit>,
}

fn at_pool(min: &NomAutomaton, size: usize, cap: usize, abstract_too: bool) -> Result<AtPool, NominalError> {
    let pool = AtomPool::new(size)?;
    let inst = min.instantiate(&pool, cap)?;
    let lm = transition_monoid(&inst.automaton, cap)?;
    let carrier = lm.monoid().carrier();
    let orbit_count = carrier.orbit_count();
    let mut out = AtPool {
        size,
        orbit_count,
        elements: carrier.len(),
        object: None,
        orbits: Vec::new(),
    };
    if !abstract_too {
        return Ok(out);
    }
    let words = lm.monoid().witnesses().expect("transition monoids carry witnesses");
    // f_w is supported by the atoms occurring in w
    let bounds: Vec<Vec<Atom>> = words
        .iter()
        .map(|w| {
            w.iter()
                .flat_map(|&s| inst.alphabet.elements[s].atoms().to_vec())
                .collect()
        })
        .collect();
    let abs = abstract_object(carrier, &bounds, &|k| format!("m{k}"))?;
    for (k, members) in carrier.orbits().into_iter().enumerate() {
        let o = abs.object.orbit(k);
        out.orbits.push(NominalMonoidOrbit {
            dim: o.dim(),
            stabilizer_order: o.stabilizer_order(),
            witness: words[members[0]]
                .iter()
                .map(|&s| inst.alphabet.elements[s].clone())
                .collect(),
        });
    }
    out.object = Some(abs.object);
    Ok(out)
}

/// Orbits of the syntactic monoid of the language of `a`.
///
/// The monoid of a nominal language need not be orbit-finite even when the
/// minimal automaton is; then the orbit count grows with the pool and the
/// stability gate fails rather than report a pool-dependent answer. The pools
/// start at `d_Q + d_Σ + margin` and grow while some element needs every atom.
pub fn nominal_syntactic_monoid(a: &NomAutomaton, margin: usize, cap: usize) -> Result<NominalMonoidSummary, NominalError> {
    let min = a.minimize(margin, cap)?.min;
    let (dq, ds) = min.dims();
    let b = dq + ds + margin;
    if b + 1 > MAX_POOL {
        return Err(NominalError::PoolTooLarge(b + 1));
    }
    let gate = |small: &AtPool, large: &AtPool, detail: &str| NominalError::StabilityGate {
        what: "syntactic monoid".into(),
        small_pool: small.size,
        small_orbits: small.orbit_count,
        large_pool: large.size,
        large_orbits: large.orbit_count,
        detail: detail.into(),
    };
    let mut b = b;
    loop {
        let small = at_pool(&min, b, cap, false)?;
        let large = at_pool(&min, b + 1, cap, false)?;
        if small.orbit_count != large.orbit_count {
            return Err(gate(&small, &large, ""));
        }
        let small = match at_pool(&min, b, cap, true) {
            // an element uses every atom of the pool: its support cannot be
            // certified here, so move both pools up by one
            Err(NominalError::MarginViolated { .. }) if b + 2 <= MAX_POOL => {
                b += 1;
                continue;
            }
            other => other?,
        };
        let large = at_pool(&min, b + 1, cap, true)?;
        let shape = |p: &AtPool| {
            p.orbits
                .iter()
                .zip(p.object.as_ref().expect("abstracted").orbits())
                .map(|(o, d)| (o.dim, o.stabilizer_order, d.signature(), o.witness.clone()))
                .collect::<Vec<_>>()
        };
        if shape(&small) != shape(&large) {
            return Err(gate(&small, &large, ": orbit descriptors differ"));
        }
        return Ok(NominalMonoidSummary {
            pool: b,
            object: small.object.expect("abstracted"),
            orbits: small.orbits,
            elements_at_pool: small.elements,
        });
    }
}
