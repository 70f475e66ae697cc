//! Seeded corpora, brute-force oracles and the property suites shared by the
//! integration tests and the acceptance target. Each suite returns a one-line
//! summary on success and the first counterexample on failure.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nerode_core::gset::{forget, restrict_automaton, FinGroup, GroupHom};
use nerode_core::monoid::{
    l_monoids_isomorphic, monoid_divides, DEFAULT_CLOSURE_CAP, monoid_to_automaton, syntactic_monoid, transition_monoid, LMonoid,
};
use nerode_core::nominal::{
    nominal_syntactic_monoid, AtomPool, DeltaRule, NomAutomaton, NomObject, NominalError, OrbitDescriptor,
};
use nerode_core::perm::all_permutations;
use nerode_core::random;
use nerode_core::{Automaton, FinObject, Word};

pub const CORPUS: usize = 200;
pub const CAP: usize = 20_000;
/// Transition monoids of 5-state automata have at most 5^5 elements.
pub const MONOID_CAP: usize = 3_125;

pub type Outcome = Result<String, String>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    Set,
    Z2,
    Z4,
}

impl Flavor {
    pub const ALL: [Flavor; 3] = [Flavor::Set, Flavor::Z2, Flavor::Z4];

    pub fn name(self) -> &'static str {
        match self {
            Flavor::Set => "set",
            Flavor::Z2 => "Z/2",
            Flavor::Z4 => "Z/4",
        }
    }

    fn seed(self) -> u64 {
        match self {
            Flavor::Set => 11,
            Flavor::Z2 => 12,
            Flavor::Z4 => 14,
        }
    }
}

pub fn finite_corpus(flavor: Flavor, count: usize, max_states: usize, salt: u64) -> Vec<Automaton> {
    let mut rng = ChaCha8Rng::seed_from_u64(flavor.seed() * 1000 + salt);
    let group = match flavor {
        Flavor::Set => None,
        Flavor::Z2 => Some(Arc::new(FinGroup::cyclic(2))),
        Flavor::Z4 => Some(Arc::new(FinGroup::cyclic(4))),
    };
    (0..count)
        .map(|_| match &group {
            None => random::set_automaton(&mut rng, max_states, 3),
            Some(g) => random::gset_automaton(&mut rng, g, max_states, 3),
        })
        .collect()
}

pub fn nominal_corpus(count: usize, salt: u64) -> Vec<NomAutomaton> {
    let mut rng = ChaCha8Rng::seed_from_u64(4200 + salt);
    (0..count).map(|_| random::nominal_automaton(&mut rng, 4)).collect()
}

/// Every word of length at most `len` over `m` letters, shortest first.
pub fn words_up_to(m: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..len {
        layer = layer
            .iter()
            .flat_map(|w: &Vec<usize>| {
                (0..m).map(move |s| {
                    let mut v = w.clone();
                    v.push(s);
                    v
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// A word of length below `bound` on which the automata disagree. Letters
/// are matched by name. The sets of state pairs reached by all words of each
/// length are walked layer by layer; once a layer repeats, every later layer
/// has already been inspected.
pub fn disagreement_below(a: &Automaton, b: &Automaton, bound: usize) -> Option<Vec<usize>> {
    let m = a.alphabet().len();
    let to_b: Vec<usize> = (0..m)
        .map(|s| b.alphabet().index_of(a.alphabet().name(s)).expect("shared letters"))
        .collect();
    let mut layer: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::from([((a.init(), b.init()), Vec::new())]);
    let mut seen: HashSet<Vec<(usize, usize)>> = HashSet::new();
    for _ in 0..bound {
        for (&(p, q), w) in &layer {
            if a.is_final(p) != b.is_final(q) {
                return Some(w.clone());
            }
        }
        if !seen.insert(layer.keys().copied().collect()) {
            return None;
        }
        let mut next = BTreeMap::new();
        for (&(p, q), w) in &layer {
            for (s, &t) in to_b.iter().enumerate() {
                next.entry((a.step(p, s), b.step(q, t))).or_insert_with(|| {
                    let mut v = w.clone();
                    v.push(s);
                    v
                });
            }
        }
        layer = next;
    }
    None
}

/// Language equality by the layered walk with the classical length bound.
pub fn same_language(a: &Automaton, b: &Automaton) -> bool {
    disagreement_below(a, b, a.state_count() * b.state_count() + 1).is_none()
}

/// The pool both nominal automata are compared at: room for a state of each
/// and a letter, plus one spare atom.
fn shared_pool(a: &NomAutomaton, b: &NomAutomaton) -> usize {
    a.states().max_dim() + b.states().max_dim() + a.alphabet().max_dim() + 1
}

pub fn nominal_same_language(a: &NomAutomaton, b: &NomAutomaton) -> Result<bool, NominalError> {
    let pool = AtomPool::new(shared_pool(a, b))?;
    let (x, y) = (a.instantiate(&pool, CAP)?.automaton, b.instantiate(&pool, CAP)?.automaton);
    Ok(same_language(&x, &y))
}

/// Same language with every state duplicated; each transition orbit picks
/// one copy at random, so the result is larger but accepts the same words.
pub fn padded(a: &Automaton, rng: &mut impl Rng) -> Automaton {
    let (n, m) = (a.state_count(), a.alphabet().len());
    let labels = a.states().symmetry().label_count();
    let mut flip: Vec<Option<usize>> = vec![None; n * m];
    for q in 0..n {
        for s in 0..m {
            if flip[q * m + s].is_none() {
                let bit = rng.gen_range(0..2);
                flip[q * m + s] = Some(bit);
                for g in 0..labels {
                    flip[a.states().act(g, q) * m + a.alphabet().act(g, s)] = Some(bit);
                }
            }
        }
    }
    let names = (0..2 * n)
        .map(|k| format!("{}#{}", a.states().name(k % n), k / n))
        .collect();
    let action = a
        .states()
        .actions()
        .iter()
        .map(|p| {
            let images = (0..2 * n).map(|k| p.apply(k % n) + n * (k / n)).collect();
            nerode_core::perm::Perm::from_images(images).unwrap()
        })
        .collect();
    let states = FinObject::with_action(a.states().symmetry().clone(), names, action).unwrap();
    let finals = (0..2 * n).map(|k| a.is_final(k % n)).collect();
    let delta = (0..2 * n * m)
        .map(|k| {
            let (state, s) = (k / m, k % m);
            let (q, copy) = (state % n, state / n);
            a.step(q, s) + n * (copy ^ flip[q * m + s].unwrap())
        })
        .collect();
    Automaton::new(a.alphabet().clone(), states, a.init(), finals, delta).unwrap()
}

/// Nominal analogue of [`padded`]: every orbit gets a copy and even-numbered
/// rules jump into the copies.
pub fn padded_nominal(a: &NomAutomaton) -> NomAutomaton {
    let n = a.states().orbit_count();
    let mut orbits: Vec<OrbitDescriptor> = a.states().orbits().to_vec();
    orbits.extend(a.states().orbits().iter().map(|o| o.renamed(format!("{}'", o.name()))));
    let mut rules = Vec::new();
    for copy in 0..2 {
        for (k, r) in a.rules().iter().enumerate() {
            rules.push(DeltaRule {
                state_orbit: r.state_orbit + copy * n,
                target_orbit: r.target_orbit + if k % 2 == 0 { n } else { 0 },
                ..r.clone()
            });
        }
    }
    let finals = (0..2 * n).map(|k| a.finals()[k % n]).collect();
    NomAutomaton::new(
        a.alphabet().clone(),
        NomObject::new(orbits).unwrap(),
        a.init(),
        finals,
        rules,
    )
    .unwrap()
}

/// Acceptance on every short word, as a cheap bucketing key.
fn fingerprint(a: &Automaton, len: usize) -> (Vec<String>, Vec<bool>) {
    let words = words_up_to(a.alphabet().len(), len);
    (
        a.alphabet().names().to_vec(),
        words.iter().map(|w| a.accepts(w).unwrap()).collect(),
    )
}

pub fn myhill_nerode_finite(flavor: Flavor) -> Outcome {
    let corpus = finite_corpus(flavor, CORPUS, 12, 0);
    let mut rng = ChaCha8Rng::seed_from_u64(flavor.seed() + 77);
    let mut pairs_checked = 0;
    let mut buckets: HashMap<(Vec<String>, Vec<bool>), Vec<usize>> = HashMap::new();
    let mut mins = Vec::new();
    for (i, a) in corpus.iter().enumerate() {
        let min = a.minimize().map_err(|e| format!("automaton {i}: {e}"))?.min;
        let bound = a.state_count() + min.state_count();
        if let Some(w) = disagreement_below(a, &min, bound) {
            return Err(format!("{} automaton {i}: minimization changes the language on {w:?}", flavor.name()));
        }
        if !min.states().same_symmetry(a.states()) {
            return Err(format!("{} automaton {i}: minimal automaton lost the symmetry", flavor.name()));
        }
        let again = min.minimize().map_err(|e| e.to_string())?.min;
        if !again.isomorphic(&min) {
            return Err(format!("{} automaton {i}: minimization is not idempotent", flavor.name()));
        }
        // a larger automaton for the same language
        let b = padded(a, &mut rng);
        if !same_language(a, &b) {
            return Err(format!("{} automaton {i}: padding oracle broken", flavor.name()));
        }
        for (x, y) in [(a, &b), (&b, a)] {
            let mx = x.minimize().map_err(|e| e.to_string())?.min;
            if mx.state_count() > y.reachable().0.state_count() {
                return Err(format!("{} automaton {i}: minimal automaton larger than a reachable one", flavor.name()));
            }
            pairs_checked += 1;
        }
        buckets.entry(fingerprint(a, 4)).or_default().push(i);
        mins.push(min);
    }
    for members in buckets.values() {
        for &i in members {
            for &j in members {
                if i == j || !same_language(&corpus[i], &corpus[j]) {
                    continue;
                }
                pairs_checked += 1;
                if mins[i].state_count() > corpus[j].reachable().0.state_count() {
                    return Err(format!(
                        "{}: minimal automaton of {i} larger than reachable part of {j}",
                        flavor.name()
                    ));
                }
                if !mins[i].forget().isomorphic(&mins[j].forget()) {
                    return Err(format!("{}: same language, non-isomorphic minima ({i}, {j})", flavor.name()));
                }
            }
        }
    }
    Ok(format!(
        "{}: {} automata, {pairs_checked} same-language pairs",
        flavor.name(),
        corpus.len()
    ))
}

pub fn myhill_nerode_nominal() -> Outcome {
    let corpus = nominal_corpus(CORPUS, 0);
    let mut mins = Vec::new();
    let mut pairs_checked = 0;
    for (i, a) in corpus.iter().enumerate() {
        let m = a.minimize(1, CAP).map_err(|e| format!("nominal automaton {i}: {e}"))?;
        let pool = AtomPool::new(shared_pool(a, &m.min)).map_err(|e| e.to_string())?;
        let x = a.instantiate(&pool, CAP).map_err(|e| e.to_string())?.automaton;
        let y = m.min.instantiate(&pool, CAP).map_err(|e| e.to_string())?.automaton;
        if let Some(w) = disagreement_below(&x, &y, x.state_count() + y.state_count()) {
            return Err(format!("nominal automaton {i}: minimization changes the language on {w:?}"));
        }
        let again = m.min.minimize(1, CAP).map_err(|e| e.to_string())?.min;
        if again != m.min {
            return Err(format!("nominal automaton {i}: minimization is not idempotent"));
        }
        let b = padded_nominal(a);
        if !nominal_same_language(a, &b).map_err(|e| e.to_string())? {
            return Err(format!("nominal automaton {i}: padding oracle broken"));
        }
        let reach_b = b.reachable().map_err(|e| e.to_string())?.orbits.len();
        if m.min.states().orbit_count() > reach_b {
            return Err(format!("nominal automaton {i}: minimal automaton larger than a reachable one"));
        }
        pairs_checked += 1;
        mins.push(m.min);
    }
    for i in 0..corpus.len() {
        for j in 0..corpus.len() {
            if i == j || corpus[i].alphabet() != corpus[j].alphabet() {
                continue;
            }
            if !nominal_same_language(&mins[i], &mins[j]).map_err(|e| e.to_string())? {
                continue;
            }
            pairs_checked += 1;
            let reach = corpus[j].reachable().map_err(|e| e.to_string())?.orbits.len();
            if mins[i].states().orbit_count() > reach {
                return Err(format!("nominal: minimal automaton of {i} larger than reachable part of {j}"));
            }
        }
    }
    Ok(format!("nominal: {} automata, {pairs_checked} same-language pairs", corpus.len()))
}

/// State maps of all words, by breadth-first composition.
fn transformation_count(a: &Automaton, cap: usize) -> Option<usize> {
    let n = a.state_count();
    let start: Vec<usize> = (0..n).collect();
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(f) = queue.pop_front() {
        for s in 0..a.alphabet().len() {
            let g: Vec<usize> = f.iter().map(|&q| a.step(q, s)).collect();
            if seen.insert(g.clone()) {
                if seen.len() > cap {
                    return None;
                }
                queue.push_back(g);
            }
        }
    }
    Some(seen.len())
}

pub fn monoid_suite(flavor: Flavor) -> Outcome {
    let corpus = finite_corpus(flavor, CORPUS, 5, 1);
    let (mut divisions, mut round_trips) = (0, 0);
    for (i, a) in corpus.iter().enumerate() {
        let fail = |what: String| format!("{} automaton {i}: {what}", flavor.name());
        let r = a.reachable().0;
        let t = transition_monoid(&r, MONOID_CAP).map_err(|e| fail(e.to_string()))?;
        if transformation_count(&r, MONOID_CAP) != Some(t.len()) {
            return Err(fail("transition monoid size disagrees with brute force".into()));
        }
        let hit: BTreeSet<usize> = t
            .monoid()
            .witnesses()
            .unwrap()
            .iter()
            .map(|w| r.run(w).unwrap())
            .collect();
        if hit.len() != r.state_count() {
            return Err(fail("evaluation at the initial state is not surjective".into()));
        }
        let s = syntactic_monoid(a, MONOID_CAP).map_err(|e| fail(e.to_string()))?;
        let min = a.minimize().unwrap().min;
        if transformation_count(&min, MONOID_CAP) != Some(s.len()) {
            return Err(fail("syntactic monoid size disagrees with brute force".into()));
        }
        for w in words_up_to(a.alphabet().len(), 4) {
            if s.accepts(&w).unwrap() != a.accepts(&w).unwrap() {
                return Err(fail(format!("syntactic monoid misjudges {w:?}")));
            }
        }
        if t.len() <= 12 {
            match monoid_divides(s.monoid(), t.monoid(), 12) {
                Ok(Some(w)) if w.verify(s.monoid(), t.monoid()) => divisions += 1,
                Ok(Some(_)) => return Err(fail("division witness does not verify".into())),
                Ok(None) => return Err(fail("syntactic monoid does not divide the transition monoid".into())),
                Err(e) => return Err(fail(e.to_string())),
            }
        }
        for lm in [&s, &t] {
            if lm.is_sigma_generated() {
                round_trips += 1;
                if !round_trip(lm).map_err(&fail)? {
                    return Err(fail("monoid to automaton and back is not isomorphic".into()));
                }
            }
        }
    }
    if divisions == 0 {
        return Err(format!("{}: no automaton small enough for the division check", flavor.name()));
    }
    Ok(format!(
        "{}: {} automata, {divisions} divisions verified, {round_trips} round trips",
        flavor.name(),
        corpus.len()
    ))
}

fn round_trip(lm: &LMonoid) -> Result<bool, String> {
    let a = monoid_to_automaton(lm).map_err(|e| e.to_string())?;
    let back = transition_monoid(&a, MONOID_CAP).map_err(|e| e.to_string())?;
    Ok(l_monoids_isomorphic(&back, lm))
}

pub fn lifting_suite() -> Outcome {
    let z2 = Arc::new(FinGroup::cyclic(2));
    let z4 = Arc::new(FinGroup::cyclic(4));
    let quotient = GroupHom::new(z4.clone(), z2.clone(), vec![0, 1, 0, 1]).map_err(|e| e.to_string())?;
    let inclusion = GroupHom::new(z2.clone(), z4.clone(), vec![0, 2]).map_err(|e| e.to_string())?;
    let from_trivial = GroupHom::from_trivial(z4.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut checked = 0;
    for (group, homs) in [
        (&z2, vec![quotient.clone(), GroupHom::identity(z2.clone())]),
        (&z4, vec![inclusion.clone(), from_trivial.clone(), GroupHom::identity(z4.clone())]),
    ] {
        for i in 0..50 {
            let a = random::gset_automaton(&mut rng, group, 12, 3);
            let words = words_up_to(a.alphabet().len(), 6);
            let mut lifted: Vec<(String, Automaton)> = Vec::new();
            for f in &homs {
                let b = restrict_automaton(f, &a).map_err(|e| format!("automaton {i}: {e}"))?;
                // rebuilding re-runs every validity check on the restricted data
                Automaton::new(
                    b.alphabet().clone(),
                    b.states().clone(),
                    b.init(),
                    b.finals().to_vec(),
                    b.delta_table().to_vec(),
                )
                .map_err(|e| format!("automaton {i}: restricted automaton invalid: {e}"))?;
                lifted.push((format!("restriction from order {}", f.source().order()), b));
            }
            lifted.push(("forget".into(), forget(&a)));
            for (what, b) in &lifted {
                for w in &words {
                    if a.accepts(w).unwrap() != b.accepts(w).unwrap() {
                        return Err(format!("order {} automaton {i}: {what} changes acceptance of {w:?}", group.order()));
                    }
                }
                checked += 1;
            }
            let left = forget(&a.minimize().unwrap().min);
            let right = forget(&a).minimize().unwrap().min;
            if !left.isomorphic(&right) {
                return Err(format!("order {} automaton {i}: forgetting does not commute with minimization", group.order()));
            }
        }
    }
    Ok(format!("100 automata, {checked} lifted automata agree on all words up to length 6"))
}

/// Orbit sizes of an orbit-finite object with atoms from a pool of `p`.
fn predicted_states(x: &NomObject, p: usize) -> usize {
    x.orbits().iter().map(|o| o.count_in_pool(p)).sum()
}

pub fn stability_suite() -> Outcome {
    let corpus = nominal_corpus(CORPUS, 2);
    let mut monoids_compared = 0;
    for (i, a) in corpus.iter().enumerate() {
        let fail = |what: String| format!("nominal automaton {i}: {what}");
        let (dq, ds) = a.dims();
        let b = dq + ds + 1;
        // margins 1 and 2 put the computation at pools B and B+1
        let small = a.minimize(1, CAP).map_err(|e| fail(e.to_string()))?;
        let large = a.minimize(2, CAP).map_err(|e| fail(e.to_string()))?;
        let shape = |m: &NomAutomaton| {
            m.states()
                .orbits()
                .iter()
                .map(|o| (o.dim(), o.stabilizer_order()))
                .collect::<Vec<_>>()
        };
        if shape(&small.min) != shape(&large.min) || small.min != large.min {
            return Err(fail(format!("minimization differs between pools {b} and {}", b + 1)));
        }
        for p in [b, b + 1] {
            let pool = AtomPool::new(p).map_err(|e| fail(e.to_string()))?;
            let concrete = a.instantiate(&pool, CAP).map_err(|e| fail(e.to_string()))?.automaton;
            let fm = concrete.minimize().map_err(|e| fail(e.to_string()))?.min;
            if fm.state_count() != predicted_states(small.min.states(), p)
                || fm.states().orbit_count() != small.min.states().orbit_count()
            {
                return Err(fail(format!(
                    "at pool {p} the concrete minimal automaton has {} states in {} orbits",
                    fm.state_count(),
                    fm.states().orbit_count()
                )));
            }
        }
        let monoid = |margin| nominal_syntactic_monoid(a, margin, DEFAULT_CLOSURE_CAP);
        match (monoid(1), monoid(2)) {
            (Ok(x), Ok(y)) => {
                let sig = |s: &nerode_core::nominal::NominalMonoidSummary| {
                    s.orbits
                        .iter()
                        .map(|o| (o.dim, o.stabilizer_order))
                        .collect::<Vec<_>>()
                };
                if sig(&x) != sig(&y) {
                    return Err(fail("syntactic monoid orbits differ between pools".into()));
                }
                monoids_compared += 1;
            }
            (Err(x), Err(y)) if x.is_resource() && y.is_resource() => {}
            (x, y) => {
                return Err(fail(format!(
                    "syntactic monoid stable at one pool only: {:?} / {:?}",
                    x.err(),
                    y.err()
                )))
            }
        }
    }
    Ok(format!(
        "{} automata minimized at two pools, {monoids_compared} syntactic monoids compared",
        corpus.len()
    ))
}

/// Canonical tuples agree exactly when the raw tuples differ by a stabilizer
/// position permutation, and orbit indices agree exactly when some
/// permutation of the pool relates the elements.
pub fn canonical_form_suite() -> Outcome {
    let corpus = nominal_corpus(60, 3);
    let mut pairs = 0usize;
    for (i, a) in corpus.iter().enumerate() {
        for x in [a.states(), a.alphabet()] {
            let p = (x.max_dim() + 2).max(3);
            let pool = AtomPool::new(p).map_err(|e| e.to_string())?;
            let inst = nerode_core::nominal::instantiate_object(x, &pool, CAP).map_err(|e| e.to_string())?;
            let perms = all_permutations(p);
            for o in x.orbits() {
                let d = o.dim();
                let tuples: Vec<Vec<u32>> = all_permutations(p)
                    .iter()
                    .map(|s| (0..d).map(|k| s.apply(k) as u32 + 1).collect::<Vec<_>>())
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .collect();
                for t1 in &tuples {
                    for t2 in &tuples {
                        let related = all_permutations(d).iter().any(|s| {
                            o.stabilizer().contains(s) && (0..d).all(|k| t2[k] == t1[s.apply(k)])
                        });
                        if related != (o.canonical(t1) == o.canonical(t2)) {
                            return Err(format!("automaton {i}: canonical form of {t1:?} and {t2:?} disagrees"));
                        }
                        pairs += 1;
                    }
                }
            }
            let ids = inst.object.orbit_ids().0;
            for (k, e) in inst.elements.iter().enumerate() {
                let images: BTreeSet<_> = perms
                    .iter()
                    .map(|pi| x.act(|atom| pi.apply(atom as usize - 1) as u32 + 1, e))
                    .collect();
                for (l, f) in inst.elements.iter().enumerate() {
                    if images.contains(f) != (e.orbit() == f.orbit()) {
                        return Err(format!(
                            "automaton {i}: orbit of {} and {} disagree",
                            x.display(e),
                            x.display(f)
                        ));
                    }
                    if images.contains(f) != (ids[k] == ids[l]) {
                        return Err(format!("automaton {i}: pool orbits disagree at {}", x.display(e)));
                    }
                    pairs += 1;
                }
            }
        }
    }
    Ok(format!("{pairs} element pairs agree"))
}

/// Words as spaced letter names, for messages.
pub fn show(a: &Automaton, w: &[usize]) -> String {
    Word(w.to_vec()).spaced(a.alphabet())
}
