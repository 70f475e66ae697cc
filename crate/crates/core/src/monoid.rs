//! Finite monoids in a backend, transition and syntactic monoids, and the
//! bridges between monoids recognizing a language and automata.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::automaton::{Automaton, AutomatonError, Word};
use crate::backend::{BackendError, FinObject};
use crate::perm::Perm;

/// Default bound on the number of elements a closure may produce. Tables are
/// quadratic in it.
pub const DEFAULT_CLOSURE_CAP: usize = 2_000;

/// Largest carriers accepted by [`monoid_divides`].
pub const DIVISION_CAP: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MonoidError {
    #[error("cap exceeded: more than {limit} elements")]
    CapExceeded { limit: usize },
    #[error("multiplication table has {found} entries, expected {expected}")]
    TableShape { expected: usize, found: usize },
    #[error("unit or product out of range")]
    OutOfRange,
    #[error("not associative at ({0}, {1}, {2})")]
    NotAssociative(String, String, String),
    #[error("unit law fails at `{0}`")]
    UnitLaw(String),
    #[error("unit `{0}` is not a fixed point")]
    UnitNotFixed(String),
    #[error("multiplication does not commute with `{label}` at ({a}, {b})")]
    MultNotEquivariant { a: String, b: String, label: String },
    #[error("letter image map is not equivariant at `{0}`")]
    LetterImage(String),
    #[error("accepting predicate is not invariant at `{0}`")]
    ChiNotInvariant(String),
    #[error("expected {expected} entries, got {found}")]
    Shape { expected: usize, found: usize },
    #[error("symmetry `{0}` does not preserve the generated monoid")]
    ActionNotClosed(String),
    #[error("word-induced map is not a monoid morphism at ({0}, {1})")]
    NotHomomorphism(String, String),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error(transparent)]
    Backend(#[from] BackendError),
}

/// A finite monoid object: carrier with symmetry, fixed unit and equivariant
/// multiplication, optionally labelled by shortlex witness words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinPresMonoid {
    carrier: FinObject,
    unit: usize,
    /// `mult[a * n + b]` is `a · b`.
    mult: Vec<usize>,
    witnesses: Option<Vec<Word>>,
}

impl FinPresMonoid {
    /// Checks table shape, associativity, unit laws and equivariance exhaustively.
    pub fn new(
        carrier: FinObject,
        unit: usize,
        mult: Vec<usize>,
        witnesses: Option<Vec<Word>>,
    ) -> Result<Self, MonoidError> {
        let n = carrier.len();
        if mult.len() != n * n {
            return Err(MonoidError::TableShape {
                expected: n * n,
                found: mult.len(),
            });
        }
        if unit >= n || mult.iter().any(|&c| c >= n) {
            return Err(MonoidError::OutOfRange);
        }
        if let Some(w) = &witnesses {
            if w.len() != n {
                return Err(MonoidError::Shape {
                    expected: n,
                    found: w.len(),
                });
            }
        }
        let m = FinPresMonoid {
            carrier,
            unit,
            mult,
            witnesses,
        };
        m.check_laws()?;
        Ok(m)
    }

    /// For tables built by composing functions, where the laws hold by
    /// construction and the cubic check would dominate.
    fn composed(carrier: FinObject, mult: Vec<usize>, witnesses: Vec<Word>) -> Self {
        debug_assert_eq!(mult.len(), carrier.len() * carrier.len());
        FinPresMonoid {
            carrier,
            unit: 0,
            mult,
            witnesses: Some(witnesses),
        }
    }

    pub fn check_laws(&self) -> Result<(), MonoidError> {
        let n = self.len();
        let name = |x: usize| self.carrier.name(x).to_string();
        for a in 0..n {
            if self.mul(self.unit, a) != a || self.mul(a, self.unit) != a {
                return Err(MonoidError::UnitLaw(name(a)));
            }
            for b in 0..n {
                let ab = self.mul(a, b);
                for c in 0..n {
                    if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                        return Err(MonoidError::NotAssociative(name(a), name(b), name(c)));
                    }
                }
            }
        }
        if !self.carrier.is_fixed(self.unit) {
            return Err(MonoidError::UnitNotFixed(name(self.unit)));
        }
        for (l, p) in self.carrier.actions().iter().enumerate() {
            for a in 0..n {
                for b in 0..n {
                    if self.mul(p.apply(a), p.apply(b)) != p.apply(self.mul(a, b)) {
                        return Err(MonoidError::MultNotEquivariant {
                            a: name(a),
                            b: name(b),
                            label: self.carrier.symmetry().label_name(l),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn carrier(&self) -> &FinObject {
        &self.carrier
    }

    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a * self.carrier.len() + b]
    }

    pub fn witnesses(&self) -> Option<&[Word]> {
        self.witnesses.as_deref()
    }

    /// Closure of `generators` (plus the unit) under multiplication, in
    /// breadth-first order.
    pub fn submonoid_generated(&self, generators: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.len()];
        seen[self.unit] = true;
        let mut out = vec![self.unit];
        let mut head = 0;
        while head < out.len() {
            let x = out[head];
            for &g in generators {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    out.push(y);
                }
            }
            head += 1;
        }
        out
    }
}

/// A monoid with letter images and an accepting predicate: it recognizes the
/// language of words `w` with `chi(phi*(w))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LMonoid {
    monoid: FinPresMonoid,
    alphabet: FinObject,
    phi: Vec<usize>,
    chi: Vec<bool>,
}

impl LMonoid {
    pub fn new(
        monoid: FinPresMonoid,
        alphabet: FinObject,
        phi: Vec<usize>,
        chi: Vec<bool>,
    ) -> Result<Self, MonoidError> {
        monoid.carrier.ensure_same_symmetry(&alphabet)?;
        if phi.len() != alphabet.len() {
            return Err(MonoidError::Shape {
                expected: alphabet.len(),
                found: phi.len(),
            });
        }
        if chi.len() != monoid.len() {
            return Err(MonoidError::Shape {
                expected: monoid.len(),
                found: chi.len(),
            });
        }
        if phi.iter().any(|&x| x >= monoid.len()) {
            return Err(MonoidError::OutOfRange);
        }
        for l in 0..alphabet.actions().len() {
            for s in 0..alphabet.len() {
                if phi[alphabet.act(l, s)] != monoid.carrier.act(l, phi[s]) {
                    return Err(MonoidError::LetterImage(alphabet.name(s).into()));
                }
            }
            for x in 0..monoid.len() {
                if chi[monoid.carrier.act(l, x)] != chi[x] {
                    return Err(MonoidError::ChiNotInvariant(monoid.carrier.name(x).into()));
                }
            }
        }
        Ok(LMonoid {
            monoid,
            alphabet,
            phi,
            chi,
        })
    }

    pub fn monoid(&self) -> &FinPresMonoid {
        &self.monoid
    }

    pub fn alphabet(&self) -> &FinObject {
        &self.alphabet
    }

    pub fn phi(&self) -> &[usize] {
        &self.phi
    }

    pub fn chi(&self) -> &[bool] {
        &self.chi
    }

    pub fn len(&self) -> usize {
        self.monoid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monoid.is_empty()
    }

    /// The image of a word under the extension of `phi` to words.
    pub fn eval(&self, word: &[usize]) -> Result<usize, MonoidError> {
        word.iter().try_fold(self.monoid.unit, |acc, &s| {
            if s >= self.phi.len() {
                Err(AutomatonError::UnknownLetter(s).into())
            } else {
                Ok(self.monoid.mul(acc, self.phi[s]))
            }
        })
    }

    pub fn accepts(&self, word: &[usize]) -> Result<bool, MonoidError> {
        Ok(self.chi[self.eval(word)?])
    }

    /// Whether every element is the image of some word.
    pub fn is_sigma_generated(&self) -> bool {
        self.monoid.submonoid_generated(&self.phi).len() == self.len()
    }

    /// Display label of an element: its witness word when known.
    pub fn label(&self, x: usize) -> String {
        match self.monoid.witnesses() {
            Some(w) => w[x].label(&self.alphabet),
            None => self.monoid.carrier.name(x).to_string(),
        }
    }
}

/// The submonoid of state endofunctions generated by the letter actions,
/// enumerated breadth-first so each element carries its shortlex-least word.
/// Multiplication is "first, then": `(f · g)(q) = g(f(q))`.
pub fn transition_monoid(a: &Automaton, cap: usize) -> Result<LMonoid, MonoidError> {
    let (n, m) = (a.state_count(), a.alphabet().len());
    let mut maps: Vec<Vec<usize>> = vec![(0..n).collect()];
    let mut words: Vec<Word> = vec![Word::empty()];
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    index.insert(maps[0].clone(), 0);
    // right multiplication by letters, needed again for the table
    let mut by_letter: Vec<Vec<usize>> = Vec::new();
    let mut head = 0;
    while head < maps.len() {
        let mut row = Vec::with_capacity(m);
        for s in 0..m {
            let next: Vec<usize> = maps[head].iter().map(|&q| a.step(q, s)).collect();
            let k = match index.get(&next) {
                Some(&k) => k,
                None => {
                    if maps.len() >= cap {
                        return Err(MonoidError::CapExceeded { limit: cap });
                    }
                    let k = maps.len();
                    index.insert(next.clone(), k);
                    words.push(words[head].pushed(s));
                    maps.push(next);
                    k
                }
            };
            row.push(k);
        }
        by_letter.push(row);
        head += 1;
    }
    let size = maps.len();
    // a · b: run b's witness word from a
    let mut mult = Vec::with_capacity(size * size);
    for x in 0..size {
        for w in &words {
            mult.push(w.iter().fold(x, |acc, &s| by_letter[acc][s]));
        }
    }
    let states = a.states();
    let inverses: Vec<Perm> = states.actions().iter().map(Perm::inverse).collect();
    let mut action = Vec::with_capacity(inverses.len());
    for (l, p) in states.actions().iter().enumerate() {
        // (g · f)(q) = g(f(g⁻¹ q))
        let images = maps
            .iter()
            .map(|f| {
                let conj: Vec<usize> = (0..n).map(|q| p.apply(f[inverses[l].apply(q)])).collect();
                index
                    .get(&conj)
                    .copied()
                    .ok_or_else(|| MonoidError::ActionNotClosed(states.symmetry().label_name(l)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        action.push(Perm::from_images(images).map_err(|_| {
            MonoidError::ActionNotClosed(states.symmetry().label_name(l))
        })?);
    }
    let names = words.iter().map(|w| w.label(a.alphabet())).collect();
    let carrier = FinObject::with_action(states.symmetry().clone(), names, action)?;
    let monoid = FinPresMonoid::composed(carrier, mult, words);
    let phi = (0..m).map(|s| by_letter[0][s]).collect();
    let chi = maps.iter().map(|f| a.is_final(f[a.init()])).collect();
    LMonoid::new(monoid, a.alphabet().clone(), phi, chi)
}

/// The transition monoid of the minimal automaton.
pub fn syntactic_monoid(a: &Automaton, cap: usize) -> Result<LMonoid, MonoidError> {
    transition_monoid(&a.minimize()?.min, cap)
}

/// The automaton with the monoid as states: start at the unit and multiply on
/// the right by letter images.
pub fn monoid_to_automaton(lm: &LMonoid) -> Result<Automaton, MonoidError> {
    let monoid = &lm.monoid;
    Ok(Automaton::from_fn(
        lm.alphabet.clone(),
        monoid.carrier.clone(),
        monoid.unit,
        lm.chi.clone(),
        |x, s| monoid.mul(x, lm.phi[s]),
    )?)
}

/// Whether `lm` recognizes the language of `a`, decided exactly by product
/// search against the monoid's automaton.
pub fn recognizes(lm: &LMonoid, a: &Automaton) -> Result<bool, MonoidError> {
    Ok(monoid_to_automaton(lm)?.equivalent(a)?)
}

/// Restricts an L-monoid to the submonoid generated by its letter images.
pub fn image_l_monoid(
    monoid: &FinPresMonoid,
    alphabet: &FinObject,
    phi: &[usize],
    chi: &[bool],
) -> Result<LMonoid, MonoidError> {
    let mut order = vec![monoid.unit];
    let mut words = vec![Word::empty()];
    let mut position = vec![usize::MAX; monoid.len()];
    position[monoid.unit] = 0;
    let mut head = 0;
    while head < order.len() {
        for (s, &g) in phi.iter().enumerate() {
            let y = monoid.mul(order[head], g);
            if position[y] == usize::MAX {
                position[y] = order.len();
                order.push(y);
                words.push(words[head].pushed(s));
            }
        }
        head += 1;
    }
    let (carrier, _) = monoid.carrier.restrict(&order)?;
    let size = order.len();
    let mult = (0..size * size)
        .map(|k| position[monoid.mul(order[k / size], order[k % size])])
        .collect();
    let sub = FinPresMonoid::new(carrier, 0, mult, Some(words))?;
    let sub_phi = phi.iter().map(|&x| position[x]).collect();
    let sub_chi = order.iter().map(|&x| chi[x]).collect();
    LMonoid::new(sub, alphabet.clone(), sub_phi, sub_chi)
}

/// The map `phi_from*(w) ↦ phi_to*(w)`, checked to be a well-defined monoid
/// morphism. `from` must be generated by its letter images and carry witnesses.
pub fn word_induced_morphism(from: &LMonoid, to: &LMonoid) -> Result<Vec<usize>, MonoidError> {
    let words = from
        .monoid
        .witnesses()
        .ok_or(MonoidError::Shape {
            expected: from.len(),
            found: 0,
        })?;
    let map: Vec<usize> = words.iter().map(|w| to.eval(w)).collect::<Result<_, _>>()?;
    for a in 0..from.len() {
        for b in 0..from.len() {
            if map[from.monoid.mul(a, b)] != to.monoid.mul(map[a], map[b]) {
                return Err(MonoidError::NotHomomorphism(from.label(a), from.label(b)));
            }
        }
    }
    // words must determine elements: phi_from*(w) is the element w labels
    for (x, w) in words.iter().enumerate() {
        if from.eval(w)? != x {
            return Err(MonoidError::NotHomomorphism(from.label(x), "witness".into()));
        }
    }
    Ok(map)
}

/// Isomorphism of Σ-generated L-monoids: the word-induced map is a bijection.
pub fn l_monoids_isomorphic(a: &LMonoid, b: &LMonoid) -> bool {
    if a.len() != b.len() {
        return false;
    }
    match word_induced_morphism(a, b) {
        Ok(map) => {
            let mut seen = vec![false; b.len()];
            map.iter().all(|&y| !std::mem::replace(&mut seen[y], true))
                && (0..a.len()).all(|x| a.chi[x] == b.chi[map[x]])
        }
        Err(_) => false,
    }
}

/// `m` divides `n`: a submonoid `Z ≤ n` and a surjective morphism `Z → m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisionWitness {
    /// Elements of `n` forming the submonoid.
    pub submonoid: Vec<usize>,
    /// Image in `m` of each submonoid element, aligned with `submonoid`.
    pub morphism: Vec<usize>,
}

impl DivisionWitness {
    /// Independent re-check of the witness against both monoids.
    pub fn verify(&self, m: &FinPresMonoid, n: &FinPresMonoid) -> bool {
        let mut image = HashMap::new();
        for (&z, &h) in self.submonoid.iter().zip(&self.morphism) {
            image.insert(z, h);
        }
        if image.get(&n.unit()) != Some(&m.unit()) {
            return false;
        }
        for (&a, &ha) in &image {
            for (&b, &hb) in &image {
                match image.get(&n.mul(a, b)) {
                    Some(&hab) if hab == m.mul(ha, hb) => {}
                    _ => return false,
                }
            }
        }
        let mut hit = vec![false; m.len()];
        for &h in &self.morphism {
            hit[h] = true;
        }
        hit.into_iter().all(|x| x)
    }
}

/// Brute-force divisibility: every submonoid of `n` (largest first) is tried
/// against every assignment of generator images into `m`. When both carriers
/// share a non-trivial symmetry, the submonoid must be symmetry-closed and the
/// morphism equivariant.
pub fn monoid_divides(
    m: &FinPresMonoid,
    n: &FinPresMonoid,
    cap: usize,
) -> Result<Option<DivisionWitness>, MonoidError> {
    let limit = cap.min(DIVISION_CAP);
    if m.len() > limit || n.len() > limit {
        return Err(MonoidError::CapExceeded { limit });
    }
    let equivariant = m.carrier.same_symmetry(&n.carrier) && !m.carrier.symmetry().is_trivial();
    let others: Vec<usize> = (0..n.len()).filter(|&x| x != n.unit()).collect();
    let full = (1u32 << others.len()) - 1;
    for mask in (0..=full).rev() {
        let mut members = vec![n.unit()];
        members.extend(
            others
                .iter()
                .enumerate()
                .filter(|(k, _)| mask & (1 << k) != 0)
                .map(|(_, &x)| x),
        );
        if members.len() < m.len() {
            continue;
        }
        let mut inside = vec![false; n.len()];
        for &x in &members {
            inside[x] = true;
        }
        let closed = members
            .iter()
            .all(|&a| members.iter().all(|&b| inside[n.mul(a, b)]));
        if !closed {
            continue;
        }
        if equivariant
            && !n
                .carrier
                .actions()
                .iter()
                .all(|p| members.iter().all(|&x| inside[p.apply(x)]))
        {
            continue;
        }
        if let Some(h) = surjective_morphism(m, n, &members, equivariant) {
            let morphism = members.iter().map(|&z| h[z]).collect();
            return Ok(Some(DivisionWitness {
                submonoid: members,
                morphism,
            }));
        }
    }
    Ok(None)
}

/// Searches a surjective morphism from the submonoid `members` of `n` onto `m`,
/// returned as a map on `n`'s indices (entries outside `members` unused).
fn surjective_morphism(
    m: &FinPresMonoid,
    n: &FinPresMonoid,
    members: &[usize],
    equivariant: bool,
) -> Option<Vec<usize>> {
    let mut gens = Vec::new();
    let mut span = n.submonoid_generated(&[]);
    for &z in members {
        if !span.contains(&z) {
            gens.push(z);
            span = n.submonoid_generated(&gens);
        }
    }
    let mut images = Vec::with_capacity(gens.len());
    assign(m, n, &gens, &mut images, equivariant)
}

fn assign(
    m: &FinPresMonoid,
    n: &FinPresMonoid,
    gens: &[usize],
    images: &mut Vec<usize>,
    equivariant: bool,
) -> Option<Vec<usize>> {
    let h = extend(m, n, &gens[..images.len()], images)?;
    if images.len() == gens.len() {
        let mut hit = vec![false; m.len()];
        for &y in h.iter().flatten() {
            hit[y] = true;
        }
        if !hit.iter().all(|&x| x) {
            return None;
        }
        if equivariant {
            for (p, q) in n.carrier.actions().iter().zip(m.carrier.actions()) {
                for (z, hz) in h.iter().enumerate() {
                    if let Some(hz) = hz {
                        if h[p.apply(z)] != Some(q.apply(*hz)) {
                            return None;
                        }
                    }
                }
            }
        }
        return Some(h.into_iter().map(|x| x.unwrap_or(usize::MAX)).collect());
    }
    for y in 0..m.len() {
        images.push(y);
        if let Some(found) = assign(m, n, gens, images, equivariant) {
            return Some(found);
        }
        images.pop();
    }
    None
}

/// Extends generator images to the generated submonoid, or reports a clash.
fn extend(
    m: &FinPresMonoid,
    n: &FinPresMonoid,
    gens: &[usize],
    images: &[usize],
) -> Option<Vec<Option<usize>>> {
    let mut h: Vec<Option<usize>> = vec![None; n.len()];
    h[n.unit()] = Some(m.unit());
    let mut queue = VecDeque::from([n.unit()]);
    while let Some(x) = queue.pop_front() {
        let hx = h[x].expect("queued elements have images");
        for (&g, &hg) in gens.iter().zip(images) {
            let y = n.mul(x, g);
            let hy = m.mul(hx, hg);
            match h[y] {
                Some(existing) if existing != hy => return None,
                Some(_) => {}
                None => {
                    h[y] = Some(hy);
                    queue.push_back(y);
                }
            }
        }
    }
    Some(h)
}

/// The multiplication table as aligned text; entry in row `a`, column `b` is `a · b`.
pub fn render_table(lm: &LMonoid) -> String {
    let n = lm.len();
    let labels: Vec<String> = (0..n).map(|x| lm.label(x)).collect();
    let width = labels
        .iter()
        .map(|l| l.chars().count())
        .max()
        .unwrap_or(1)
        .max(1);
    let pad = |s: &str| format!("{s}{}", " ".repeat(width - s.chars().count()));
    let mut out = String::new();
    let mut header = vec![pad("·")];
    header.extend(labels.iter().map(|l| pad(l)));
    out.push_str(header.join(" | ").trim_end());
    out.push('\n');
    out.push_str(&vec!["-".repeat(width); n + 1].join("-+-"));
    out.push('\n');
    for a in 0..n {
        let mut row = vec![pad(&labels[a])];
        row.extend((0..n).map(|b| pad(&labels[lm.monoid.mul(a, b)])));
        out.push_str(row.join(" | ").trim_end());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ends_in_a() -> Automaton {
        Automaton::from_fn(
            FinObject::set(["a", "b"]).unwrap(),
            FinObject::set(["q0", "q1"]).unwrap(),
            0,
            vec![false, true],
            |_, s| if s == 0 { 1 } else { 0 },
        )
        .unwrap()
    }

    /// Endofunctions of the states reached by words of length <= depth.
    fn endofunctions_by_words(a: &Automaton, depth: usize) -> usize {
        let n = a.state_count();
        let mut found = std::collections::BTreeSet::new();
        let mut layer = vec![Vec::<usize>::new()];
        for _ in 0..=depth {
            let mut next = Vec::new();
            for w in &layer {
                found.insert((0..n).map(|q| a.run_from(q, w).unwrap()).collect::<Vec<_>>());
                for s in 0..a.alphabet().len() {
                    let mut v = w.clone();
                    v.push(s);
                    next.push(v);
                }
            }
            layer = next;
        }
        found.len()
    }

    #[test]
    fn ends_in_a_has_three_transformations() {
        let a = ends_in_a();
        assert_eq!(endofunctions_by_words(&a, 4), 3);
        let t = transition_monoid(&a, DEFAULT_CLOSURE_CAP).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.monoid().carrier().names(), &["ε", "a", "b"]);
        assert!(recognizes(&t, &a).unwrap());
    }

    #[test]
    fn single_state_gives_trivial_monoid() {
        let a = Automaton::from_fn(
            FinObject::set(["a", "b"]).unwrap(),
            FinObject::set(["q"]).unwrap(),
            0,
            vec![true],
            |_, _| 0,
        )
        .unwrap();
        let t = transition_monoid(&a, DEFAULT_CLOSURE_CAP).unwrap();
        assert_eq!(t.len(), 1);
        let back = monoid_to_automaton(&t).unwrap();
        assert_eq!(back.state_count(), 1);
    }

    #[test]
    fn cap_is_a_hard_error() {
        let a = ends_in_a();
        assert_eq!(
            transition_monoid(&a, 2).unwrap_err(),
            MonoidError::CapExceeded { limit: 2 }
        );
    }

    #[test]
    fn monoid_automaton_minimizes_back() {
        let a = ends_in_a();
        let syn = syntactic_monoid(&a, DEFAULT_CLOSURE_CAP).unwrap();
        let b = monoid_to_automaton(&syn).unwrap();
        assert_eq!(b.state_count(), 3);
        assert!(b.equivalent(&a).unwrap());
        assert_eq!(b.minimize().unwrap().min.state_count(), 2);
        let round = transition_monoid(&b, DEFAULT_CLOSURE_CAP).unwrap();
        assert!(l_monoids_isomorphic(&round, &syn));
    }

    #[test]
    fn flipped_chi_is_caught_with_a_witness() {
        let a = ends_in_a();
        let t = transition_monoid(&a, DEFAULT_CLOSURE_CAP).unwrap();
        let mut chi = t.chi().to_vec();
        chi[2] = !chi[2];
        let flipped = LMonoid::new(t.monoid().clone(), t.alphabet().clone(), t.phi().to_vec(), chi).unwrap();
        assert!(!recognizes(&flipped, &a).unwrap());
        let w = monoid_to_automaton(&flipped)
            .unwrap()
            .distinguishing_word(&a)
            .unwrap()
            .unwrap();
        assert_eq!(w, Word(vec![1]));
    }

    /// Direct product of the "ends in a" monoid with the two-element monoid
    /// {1, z}; the letters map into the first factor only.
    fn embedded_in_six() -> (LMonoid, FinPresMonoid, Vec<usize>, Vec<bool>) {
        let t = transition_monoid(&ends_in_a(), DEFAULT_CLOSURE_CAP).unwrap();
        let base = t.monoid();
        let names: Vec<String> = (0..6).map(|k| format!("m{k}")).collect();
        let mult: Vec<usize> = (0..36)
            .map(|k| {
                let (x, y) = (k / 6, k % 6);
                let left = base.mul(x / 2, y / 2);
                let right = (x % 2) | (y % 2);
                left * 2 + right
            })
            .collect();
        let six = FinPresMonoid::new(FinObject::set(names).unwrap(), 0, mult, None).unwrap();
        let phi = t.phi().iter().map(|&x| x * 2).collect();
        let chi = (0..6).map(|k| t.chi()[k / 2]).collect();
        (t, six, phi, chi)
    }

    #[test]
    fn image_of_embedding_recovers_three_elements() {
        let (t, six, phi, chi) = embedded_in_six();
        let img = image_l_monoid(&six, t.alphabet(), &phi, &chi).unwrap();
        assert_eq!(img.len(), 3);
        assert!(img.is_sigma_generated());
        assert!(recognizes(&img, &ends_in_a()).unwrap());
        let again = image_l_monoid(img.monoid(), img.alphabet(), img.phi(), img.chi()).unwrap();
        assert_eq!(again, img);
    }

    #[test]
    fn trivial_monoid_divides_everything() {
        let (t, six, _, _) = embedded_in_six();
        let trivial = FinPresMonoid::new(FinObject::set(["1"]).unwrap(), 0, vec![0], None).unwrap();
        for n in [t.monoid(), &six] {
            let w = monoid_divides(&trivial, n, DIVISION_CAP).unwrap().unwrap();
            assert!(w.verify(&trivial, n));
        }
        let w = monoid_divides(t.monoid(), &six, DIVISION_CAP).unwrap().unwrap();
        assert!(w.verify(t.monoid(), &six));
        // six elements cannot be a quotient of a submonoid of three
        assert_eq!(monoid_divides(&six, t.monoid(), DIVISION_CAP).unwrap(), None);
    }

    #[test]
    fn non_associative_table_is_rejected() {
        let carrier = FinObject::set(["e", "x", "y"]).unwrap();
        // (x·x)·x = y·x = y but x·(x·x) = x·y = x
        let mult = vec![0, 1, 2, 1, 2, 1, 2, 2, 2];
        assert!(matches!(
            FinPresMonoid::new(carrier, 0, mult, None),
            Err(MonoidError::NotAssociative(..))
        ));
    }

    #[test]
    fn table_rendering() {
        let t = transition_monoid(&ends_in_a(), DEFAULT_CLOSURE_CAP).unwrap();
        let table = render_table(&t);
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines[0], "· | ε | a | b");
        assert_eq!(lines[3], "a | a | a | b");
    }
}
