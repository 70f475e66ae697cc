//! Random automata for property tests and benchmarks. Every generator is
//! driven by a caller-supplied RNG, so a seeded `ChaCha8Rng` gives a
//! reproducible corpus.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::automaton::Automaton;
use crate::backend::{FinObject, Symmetry};
use crate::gset::FinGroup;
use crate::nominal::{pair_patterns, DeltaRule, NomAutomaton, NomObject, OrbitDescriptor};
use crate::perm::Perm;

fn letters(n: usize) -> Vec<String> {
    (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
}

/// A complete automaton on a plain finite set.
pub fn set_automaton<R: Rng + ?Sized>(rng: &mut R, max_states: usize, max_letters: usize) -> Automaton {
    let n = rng.gen_range(1..=max_states.max(1));
    let m = rng.gen_range(1..=max_letters.max(1));
    let alphabet = FinObject::set(letters(m)).expect("distinct letters");
    let states = FinObject::set((0..n).map(|q| format!("q{q}"))).expect("distinct states");
    let finals = (0..n).map(|_| rng.gen_bool(0.4)).collect();
    let delta = (0..n * m).map(|_| rng.gen_range(0..n)).collect();
    Automaton::new(alphabet, states, 0, finals, delta).expect("valid by construction")
}

/// The cyclic subgroup generated by `g`.
fn cyclic_subgroup(group: &FinGroup, g: usize) -> Vec<usize> {
    let mut h = vec![group.identity()];
    let mut x = g;
    while x != group.identity() {
        h.push(x);
        x = group.mul(x, g);
    }
    h.sort_unstable();
    h
}

/// Left cosets `gH`, each as a sorted element list, in order of least element.
fn cosets(group: &FinGroup, h: &[usize]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for g in 0..group.order() {
        if out.iter().any(|c| c.contains(&g)) {
            continue;
        }
        let mut c: Vec<usize> = h.iter().map(|&x| group.mul(g, x)).collect();
        c.sort_unstable();
        out.push(c);
    }
    out
}

/// A G-set built from coset spaces `G/H` with `H` cyclic or the whole group.
/// The first orbit is a fixed point when `fixed_first` is set.
fn random_gset<R: Rng + ?Sized>(
    rng: &mut R,
    group: &Arc<FinGroup>,
    max_size: usize,
    prefix: &str,
    fixed_first: bool,
) -> FinObject {
    let n = group.order();
    let everything: Vec<usize> = (0..n).collect();
    let mut blocks: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut size = 0;
    loop {
        let h = if blocks.is_empty() && fixed_first {
            everything.clone()
        } else {
            cyclic_subgroup(group, rng.gen_range(0..n))
        };
        let cs = cosets(group, &h);
        if size + cs.len() > max_size {
            if size > 0 {
                break;
            }
            // only a fixed point fits
            blocks.push(vec![everything.clone()]);
            break;
        }
        size += cs.len();
        blocks.push(cs);
        if size == max_size || rng.gen_bool(0.35) {
            break;
        }
    }
    let mut names = Vec::new();
    let mut action: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut base = 0;
    for cs in &blocks {
        for (k, _) in cs.iter().enumerate() {
            names.push(format!("{prefix}{}", base + k));
        }
        for (g, row) in action.iter_mut().enumerate() {
            for c in cs {
                let moved = group.mul(g, c[0]);
                let target = cs.iter().position(|d| d.contains(&moved)).expect("cosets partition");
                row.push(base + target);
            }
        }
        base += cs.len();
    }
    let action = action
        .into_iter()
        .map(|row| Perm::from_images(row).expect("group elements permute cosets"))
        .collect();
    FinObject::with_action(Symmetry::Group(group.clone()), names, action).expect("left action")
}

/// A random transition table commuting with the symmetry: one free choice per
/// orbit of `states × alphabet`, constrained to targets fixed by the pair's
/// stabilizer and propagated along the orbit.
pub fn equivariant_delta<R: Rng + ?Sized>(rng: &mut R, alphabet: &FinObject, states: &FinObject) -> Vec<usize> {
    let (n, m) = (states.len(), alphabet.len());
    let labels = states.symmetry().label_count();
    let mut delta: Vec<Option<usize>> = vec![None; n * m];
    for q in 0..n {
        for s in 0..m {
            if delta[q * m + s].is_some() {
                continue;
            }
            let stab: Vec<usize> = (0..labels)
                .filter(|&g| states.act(g, q) == q && alphabet.act(g, s) == s)
                .collect();
            let allowed: Vec<usize> = (0..n)
                .filter(|&t| stab.iter().all(|&g| states.act(g, t) == t))
                .collect();
            let t = *allowed.choose(rng).expect("a fixed point of the pair stabilizer exists");
            delta[q * m + s] = Some(t);
            for g in 0..labels {
                delta[states.act(g, q) * m + alphabet.act(g, s)] = Some(states.act(g, t));
            }
        }
    }
    delta.into_iter().map(|t| t.expect("every pair covered")).collect()
}

/// An equivariant automaton over `group`, with a fixed initial state and a
/// union of orbits as finals.
pub fn gset_automaton<R: Rng + ?Sized>(
    rng: &mut R,
    group: &Arc<FinGroup>,
    max_states: usize,
    max_letters: usize,
) -> Automaton {
    let alphabet = random_gset(rng, group, max_letters.max(1), "", false);
    let alphabet = alphabet
        .renamed(letters(alphabet.len()))
        .expect("same size");
    let states = random_gset(rng, group, max_states.max(1), "q", true);
    let (ids, count) = states.orbit_ids();
    let accepting: Vec<bool> = (0..count).map(|_| rng.gen_bool(0.4)).collect();
    let finals = ids.iter().map(|&o| accepting[o]).collect();
    let delta = equivariant_delta(rng, &alphabet, &states);
    Automaton::new(alphabet, states, 0, finals, delta).expect("valid by construction")
}

/// A nominal automaton with at most `max_orbits` state orbits of dimension
/// at most 2 over a one-dimensional letter orbit, plus sometimes a constant
/// letter. Rules cover every overlap pattern once, so the result is total
/// and unambiguous; candidates breaking stabilizer well-definedness are
/// redrawn.
pub fn nominal_automaton<R: Rng + ?Sized>(rng: &mut R, max_orbits: usize) -> NomAutomaton {
    loop {
        if let Some(a) = nominal_candidate(rng, max_orbits.max(1)) {
            return a;
        }
    }
}

fn nominal_candidate<R: Rng + ?Sized>(rng: &mut R, max_orbits: usize) -> Option<NomAutomaton> {
    let mut letter_orbits = vec![OrbitDescriptor::new("A", 1, vec![]).expect("dim 1")];
    if rng.gen_bool(0.3) {
        letter_orbits.push(OrbitDescriptor::new("c", 0, vec![]).expect("dim 0"));
    }
    let alphabet = NomObject::new(letter_orbits).expect("distinct names");
    let k = rng.gen_range(1..=max_orbits);
    let mut state_orbits = vec![OrbitDescriptor::new("S0", 0, vec![]).expect("dim 0")];
    for i in 1..k {
        let dim = rng.gen_range(0..=2);
        let gens = if dim == 2 && rng.gen_bool(0.3) {
            vec![Perm::transposition(2, 0, 1)]
        } else {
            vec![]
        };
        state_orbits.push(OrbitDescriptor::new(format!("S{i}"), dim, gens).ok()?);
    }
    let states = NomObject::new(state_orbits).expect("distinct names");
    let finals: Vec<bool> = (0..k).map(|_| rng.gen_bool(0.4)).collect();
    let mut rules = Vec::new();
    for (q, qo) in states.orbits().iter().enumerate() {
        let state_vars: Vec<String> = (1..=qo.dim()).map(|i| format!("x{i}")).collect();
        for (l, lo) in alphabet.orbits().iter().enumerate() {
            for p in pair_patterns(qo, lo) {
                let letter_vars: Vec<String> = p
                    .iter()
                    .enumerate()
                    .map(|(j, e)| e.map_or_else(|| format!("y{}", j + 1), |i| format!("x{}", i + 1)))
                    .collect();
                let mut pool: Vec<String> = state_vars.clone();
                pool.extend(letter_vars.iter().filter(|v| v.starts_with('y')).cloned());
                let targets: Vec<usize> = (0..k).filter(|&t| states.orbit(t).dim() <= pool.len()).collect();
                let t = *targets.choose(rng).expect("orbit S0 has dimension 0");
                pool.shuffle(rng);
                pool.truncate(states.orbit(t).dim());
                rules.push(DeltaRule {
                    state_orbit: q,
                    state_vars: state_vars.clone(),
                    letter_orbit: l,
                    letter_vars,
                    target_orbit: t,
                    target_vars: pool,
                });
            }
        }
    }
    NomAutomaton::new(alphabet, states, 0, finals, rules).ok()
}
