//! Deterministic complete automata over finite carriers with symmetry.
//!
//! An [`Automaton`] lives in one backend: its alphabet and state carriers share
//! a [`Symmetry`](crate::backend::Symmetry), the initial state is fixed by the
//! symmetry, and both the final predicate and the transition table commute with
//! it. The initial automaton of a language is only ever present through
//! [`Automaton::run`], and the terminal one only through the partition computed
//! by [`Automaton::nerode_partition`].

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::ops::Deref;

use thiserror::Error;

use crate::backend::{BackendError, Congruence, FinMorphism, FinObject};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutomatonError {
    #[error("alphabet and states carry different symmetries")]
    SymmetryMismatch,
    #[error("initial state index {0} out of range")]
    InitOutOfRange(usize),
    #[error("initial state `{state}` is not a fixed point: moved by `{label}`")]
    InitNotFixed { state: String, label: String },
    #[error("final predicate has {found} entries for {expected} states")]
    FinalsLength { expected: usize, found: usize },
    #[error("final predicate is not invariant: `{label}` moves final state `{state}` to a non-final one or back")]
    FinalNotInvariant { state: String, label: String },
    #[error("transition table has {found} entries, expected {expected}")]
    DeltaShape { expected: usize, found: usize },
    #[error("transition ({state}, {letter}) leads outside the state set")]
    TargetOutOfRange { state: String, letter: String },
    #[error("transition ({state}, {letter}) is not equivariant under `{label}`")]
    DeltaNotEquivariant {
        state: String,
        letter: String,
        label: String,
    },
    #[error("letter index {0} is not in the alphabet")]
    UnknownLetter(usize),
    #[error("alphabets differ: {0}")]
    AlphabetMismatch(String),
    #[error("refinement round {round} produced a partition that `{label}` does not preserve")]
    PartitionNotEquivariant { round: usize, label: String },
    #[error("span leg failed verification: {0}")]
    InvalidSpan(String),
    #[error(transparent)]
    Backend(#[from] BackendError),
}

/// A finite word, as letter indices into an alphabet carrier.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn pushed(&self, letter: usize) -> Word {
        let mut v = self.0.clone();
        v.push(letter);
        Word(v)
    }

    /// Shortlex order: shorter first, then lexicographic on letter indices.
    pub fn shortlex_cmp(&self, other: &Word) -> std::cmp::Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }

    /// Letters joined by `.`, or `ε` for the empty word.
    pub fn label(&self, alphabet: &FinObject) -> String {
        if self.0.is_empty() {
            "ε".into()
        } else {
            self.0
                .iter()
                .map(|&s| alphabet.name(s))
                .collect::<Vec<_>>()
                .join(".")
        }
    }

    /// Letters separated by spaces, as typed on a command line.
    pub fn spaced(&self, alphabet: &FinObject) -> String {
        self.0
            .iter()
            .map(|&s| alphabet.name(s))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl Deref for Word {
    type Target = [usize];
    fn deref(&self) -> &[usize] {
        &self.0
    }
}

impl From<Vec<usize>> for Word {
    fn from(v: Vec<usize>) -> Self {
        Word(v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automaton {
    alphabet: FinObject,
    states: FinObject,
    init: usize,
    finals: Vec<bool>,
    /// `delta[q * |alphabet| + s]`
    delta: Vec<usize>,
}

impl Automaton {
    pub fn new(
        alphabet: FinObject,
        states: FinObject,
        init: usize,
        finals: Vec<bool>,
        delta: Vec<usize>,
    ) -> Result<Self, AutomatonError> {
        if !alphabet.same_symmetry(&states) {
            return Err(AutomatonError::SymmetryMismatch);
        }
        let (n, m) = (states.len(), alphabet.len());
        if init >= n {
            return Err(AutomatonError::InitOutOfRange(init));
        }
        if finals.len() != n {
            return Err(AutomatonError::FinalsLength {
                expected: n,
                found: finals.len(),
            });
        }
        if delta.len() != n * m {
            return Err(AutomatonError::DeltaShape {
                expected: n * m,
                found: delta.len(),
            });
        }
        if let Some(k) = delta.iter().position(|&t| t >= n) {
            return Err(AutomatonError::TargetOutOfRange {
                state: states.name(k / m).into(),
                letter: alphabet.name(k % m).into(),
            });
        }
        let label_name = |l| states.symmetry().label_name(l);
        if let Some(l) = states.moving_label(init) {
            return Err(AutomatonError::InitNotFixed {
                state: states.name(init).into(),
                label: label_name(l),
            });
        }
        for l in 0..states.actions().len() {
            for q in 0..n {
                let gq = states.act(l, q);
                if finals[gq] != finals[q] {
                    return Err(AutomatonError::FinalNotInvariant {
                        state: states.name(q).into(),
                        label: label_name(l),
                    });
                }
                for s in 0..m {
                    let gs = alphabet.act(l, s);
                    if delta[gq * m + gs] != states.act(l, delta[q * m + s]) {
                        return Err(AutomatonError::DeltaNotEquivariant {
                            state: states.name(q).into(),
                            letter: alphabet.name(s).into(),
                            label: label_name(l),
                        });
                    }
                }
            }
        }
        Ok(Automaton {
            alphabet,
            states,
            init,
            finals,
            delta,
        })
    }

    /// Builds the transition table from a function of (state, letter).
    pub fn from_fn(
        alphabet: FinObject,
        states: FinObject,
        init: usize,
        finals: Vec<bool>,
        delta: impl Fn(usize, usize) -> usize,
    ) -> Result<Self, AutomatonError> {
        let table = (0..states.len())
            .flat_map(|q| (0..alphabet.len()).map(move |s| (q, s)))
            .map(|(q, s)| delta(q, s))
            .collect();
        Automaton::new(alphabet, states, init, finals, table)
    }

    pub fn alphabet(&self) -> &FinObject {
        &self.alphabet
    }

    pub fn states(&self) -> &FinObject {
        &self.states
    }

    pub fn init(&self) -> usize {
        self.init
    }

    pub fn finals(&self) -> &[bool] {
        &self.finals
    }

    pub fn is_final(&self, q: usize) -> bool {
        self.finals[q]
    }

    pub fn delta_table(&self) -> &[usize] {
        &self.delta
    }

    #[inline]
    pub fn step(&self, q: usize, s: usize) -> usize {
        self.delta[q * self.alphabet.len() + s]
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    /// The final predicate as a morphism into the truth object.
    pub fn final_morphism(&self) -> FinMorphism {
        let truth = FinObject::truth(self.states.symmetry().clone());
        FinMorphism::new(
            self.states.clone(),
            truth,
            self.finals.iter().map(|&f| f as usize).collect(),
        )
        .expect("final predicate checked at construction")
    }

    /// The transition map as a morphism out of `states × alphabet`.
    pub fn delta_morphism(&self) -> FinMorphism {
        let product = crate::backend::finite_ops::product(&self.states, &self.alphabet)
            .expect("shared symmetry");
        FinMorphism::new(product.object, self.states.clone(), self.delta.clone())
            .expect("transitions checked at construction")
    }

    /// Left fold of the transition map over `word`, starting at the initial state.
    pub fn run(&self, word: &[usize]) -> Result<usize, AutomatonError> {
        self.run_from(self.init, word)
    }

    pub fn run_from(&self, mut q: usize, word: &[usize]) -> Result<usize, AutomatonError> {
        for &s in word {
            if s >= self.alphabet.len() {
                return Err(AutomatonError::UnknownLetter(s));
            }
            q = self.step(q, s);
        }
        Ok(q)
    }

    pub fn accepts(&self, word: &[usize]) -> Result<bool, AutomatonError> {
        Ok(self.finals[self.run(word)?])
    }

    /// Same transitions with a different final predicate.
    pub fn with_finals(&self, finals: Vec<bool>) -> Result<Automaton, AutomatonError> {
        Automaton::new(
            self.alphabet.clone(),
            self.states.clone(),
            self.init,
            finals,
            self.delta.clone(),
        )
    }

    pub fn complement(&self) -> Automaton {
        self.with_finals(self.finals.iter().map(|f| !f).collect())
            .expect("complement of an invariant predicate is invariant")
    }

    /// Same automaton with element names replaced.
    pub fn with_state_names(&self, names: Vec<String>) -> Result<Automaton, AutomatonError> {
        let states = self.states.renamed(names)?;
        Automaton::new(
            self.alphabet.clone(),
            states,
            self.init,
            self.finals.clone(),
            self.delta.clone(),
        )
    }

    /// The underlying automaton with the symmetry forgotten.
    pub fn forget(&self) -> Automaton {
        Automaton {
            alphabet: self.alphabet.forget(),
            states: self.states.forget(),
            init: self.init,
            finals: self.finals.clone(),
            delta: self.delta.clone(),
        }
    }

    /// Shortlex-least word reaching each state (`None` when unreachable).
    pub fn access_words(&self) -> Vec<Option<Word>> {
        let m = self.alphabet.len();
        let mut words: Vec<Option<Word>> = vec![None; self.states.len()];
        words[self.init] = Some(Word::empty());
        let mut queue = VecDeque::from([self.init]);
        while let Some(q) = queue.pop_front() {
            let w = words[q].clone().expect("queued states have words");
            for s in 0..m {
                let t = self.step(q, s);
                if words[t].is_none() {
                    words[t] = Some(w.pushed(s));
                    queue.push_back(t);
                }
            }
        }
        words
    }

    /// The sub-automaton of states reachable from the initial state, in their
    /// original order, with its inclusion.
    pub fn reachable(&self) -> (Automaton, AutomatonMorphism) {
        let words = self.access_words();
        let keep: Vec<usize> = (0..self.states.len())
            .filter(|&q| words[q].is_some())
            .collect();
        let (states, position) = self
            .states
            .restrict(&keep)
            .expect("reachable states of an equivariant automaton are symmetry-closed");
        let m = self.alphabet.len();
        let delta = keep
            .iter()
            .flat_map(|&q| (0..m).map(move |s| (q, s)))
            .map(|(q, s)| position[self.step(q, s)].expect("closed under transitions"))
            .collect();
        let sub = Automaton {
            alphabet: self.alphabet.clone(),
            states,
            init: position[self.init].expect("initial state is reachable"),
            finals: keep.iter().map(|&q| self.finals[q]).collect(),
            delta,
        };
        let mono = AutomatonMorphism {
            source: sub.clone(),
            target: self.clone(),
            map: keep,
        };
        (sub, mono)
    }

    pub fn is_reachable(&self) -> bool {
        self.access_words().iter().all(Option::is_some)
    }

    /// Moore partition refinement: start from the final/non-final split and
    /// refine by the blocks of the successors under every letter, until stable.
    /// Every intermediate partition is checked to be symmetry-closed.
    pub fn nerode_partition(&self) -> Result<Congruence, AutomatonError> {
        let (n, m) = (self.states.len(), self.alphabet.len());
        let mut ids = normalize(&self.finals.iter().map(|&f| f as usize).collect::<Vec<_>>());
        let mut count = ids.iter().max().map_or(0, |&k| k + 1);
        let mut round = 0;
        loop {
            self.states
                .check_symmetry_closed(&Congruence::from_labels(&ids))
                .map_err(|e| match e {
                    BackendError::NotSymmetryClosed { label, .. } => {
                        AutomatonError::PartitionNotEquivariant { round, label }
                    }
                    other => other.into(),
                })?;
            let mut table: HashMap<Vec<usize>, usize> = HashMap::new();
            let mut next = Vec::with_capacity(n);
            for q in 0..n {
                let mut sig = Vec::with_capacity(m + 1);
                sig.push(ids[q]);
                sig.extend((0..m).map(|s| ids[self.step(q, s)]));
                let fresh = table.len();
                next.push(*table.entry(sig).or_insert(fresh));
            }
            round += 1;
            if table.len() == count {
                return Ok(Congruence::from_labels(&ids));
            }
            count = table.len();
            ids = next;
        }
    }

    /// Quotient of the reachable part by the Nerode partition. States of the
    /// result are ordered and named by their shortlex-least access word.
    pub fn nerode_quotient(&self) -> Result<(Automaton, AutomatonMorphism), AutomatonError> {
        let (reach, _) = self.reachable();
        reach.quotient_by_nerode()
    }

    fn quotient_by_nerode(&self) -> Result<(Automaton, AutomatonMorphism), AutomatonError> {
        let partition = self.nerode_partition()?;
        let block_of = partition.block_of();
        let blocks = partition.blocks();
        let m = self.alphabet.len();
        // BFS over blocks in letter order gives each block its shortlex-least word
        let mut order: Vec<usize> = Vec::with_capacity(blocks.len());
        let mut rank = vec![usize::MAX; blocks.len()];
        let mut words: Vec<Word> = Vec::with_capacity(blocks.len());
        let start = block_of[self.init];
        rank[start] = 0;
        order.push(start);
        words.push(Word::empty());
        let mut head = 0;
        while head < order.len() {
            let b = order[head];
            let rep = blocks[b][0];
            for s in 0..m {
                let t = block_of[self.step(rep, s)];
                if rank[t] == usize::MAX {
                    rank[t] = order.len();
                    order.push(t);
                    words.push(words[head].pushed(s));
                }
            }
            head += 1;
        }
        debug_assert_eq!(order.len(), blocks.len(), "quotient of a reachable automaton");
        let names = words.iter().map(|w| w.label(&self.alphabet)).collect();
        let action = self
            .states
            .actions()
            .iter()
            .map(|p| {
                let images = order
                    .iter()
                    .map(|&b| rank[block_of[p.apply(blocks[b][0])]])
                    .collect();
                crate::perm::Perm::from_images(images).expect("closed partition")
            })
            .collect();
        let states = FinObject::with_action(self.states.symmetry().clone(), names, action)?;
        let finals = order.iter().map(|&b| self.finals[blocks[b][0]]).collect();
        let delta = order
            .iter()
            .flat_map(|&b| (0..m).map(move |s| (b, s)))
            .map(|(b, s)| rank[block_of[self.step(blocks[b][0], s)]])
            .collect();
        let min = Automaton::new(self.alphabet.clone(), states, 0, finals, delta)?;
        let epi = AutomatonMorphism {
            source: self.clone(),
            target: min.clone(),
            map: block_of.iter().map(|&b| rank[b]).collect(),
        };
        Ok((min, epi))
    }

    /// Minimal automaton for the language, with the span
    /// `self ← reachable(self) → min` witnessing that `min` divides `self`.
    pub fn minimize(&self) -> Result<Minimization, AutomatonError> {
        let (reachable, mono) = self.reachable();
        let (min, epi) = reachable.quotient_by_nerode()?;
        for (leg, name) in [(&mono, "mono"), (&epi, "epi")] {
            let verdict = leg.check();
            if !verdict.is_valid() {
                return Err(AutomatonError::InvalidSpan(format!("{name}: {verdict}")));
            }
        }
        if !mono.is_injective() || !epi.is_surjective() {
            return Err(AutomatonError::InvalidSpan("leg has the wrong shape".into()));
        }
        Ok(Minimization {
            min,
            reachable,
            mono,
            epi,
        })
    }

    /// Reachable part with states in shortlex order of access words, as raw tables.
    pub fn canonical_form(&self) -> CanonicalForm {
        let words = self.access_words();
        let mut order: Vec<usize> = (0..self.states.len())
            .filter(|&q| words[q].is_some())
            .collect();
        order.sort_by(|&a, &b| {
            words[a]
                .as_ref()
                .unwrap()
                .shortlex_cmp(words[b].as_ref().unwrap())
        });
        let mut rank = vec![usize::MAX; self.states.len()];
        for (k, &q) in order.iter().enumerate() {
            rank[q] = k;
        }
        let m = self.alphabet.len();
        CanonicalForm {
            alphabet: self.alphabet.names().to_vec(),
            finals: order.iter().map(|&q| self.finals[q]).collect(),
            delta: order
                .iter()
                .flat_map(|&q| (0..m).map(move |s| (q, s)))
                .map(|(q, s)| rank[self.step(q, s)])
                .collect(),
            action: self
                .states
                .actions()
                .iter()
                .map(|p| order.iter().map(|&q| rank[p.apply(q)]).collect())
                .collect(),
        }
    }

    /// Isomorphism of reachable parts (including the symmetry action).
    pub fn isomorphic(&self, other: &Automaton) -> bool {
        self.canonical_form() == other.canonical_form()
    }

    /// Shortlex-least word on which the two automata disagree, found by
    /// breadth-first search of the synchronous product.
    pub fn distinguishing_word(&self, other: &Automaton) -> Result<Option<Word>, AutomatonError> {
        let letter_map = letter_correspondence(&self.alphabet, &other.alphabet)?;
        let width = other.states.len();
        let key = |p: usize, q: usize| p * width + q;
        let mut parent: HashMap<usize, (usize, usize)> = HashMap::new();
        let start = (self.init, other.init);
        let mut seen = vec![false; self.states.len() * width];
        seen[key(start.0, start.1)] = true;
        let mut queue = VecDeque::from([start]);
        while let Some((p, q)) = queue.pop_front() {
            if self.finals[p] != other.finals[q] {
                let mut letters = Vec::new();
                let mut cur = key(p, q);
                while let Some(&(prev, s)) = parent.get(&cur) {
                    letters.push(s);
                    cur = prev;
                }
                letters.reverse();
                return Ok(Some(Word(letters)));
            }
            for (s, &t) in letter_map.iter().enumerate() {
                let next = (self.step(p, s), other.step(q, t));
                let k = key(next.0, next.1);
                if !seen[k] {
                    seen[k] = true;
                    parent.insert(k, (key(p, q), s));
                    queue.push_back(next);
                }
            }
        }
        Ok(None)
    }

    pub fn equivalent(&self, other: &Automaton) -> Result<bool, AutomatonError> {
        Ok(self.distinguishing_word(other)?.is_none())
    }
}

/// Index in `b` of each letter of `a`, matched by name.
fn letter_correspondence(a: &FinObject, b: &FinObject) -> Result<Vec<usize>, AutomatonError> {
    if a.len() != b.len() {
        return Err(AutomatonError::AlphabetMismatch(format!(
            "{} letters against {}",
            a.len(),
            b.len()
        )));
    }
    a.names()
        .iter()
        .map(|n| {
            b.index_of(n)
                .ok_or_else(|| AutomatonError::AlphabetMismatch(format!("letter `{n}` missing")))
        })
        .collect()
}

fn normalize(labels: &[usize]) -> Vec<usize> {
    let mut table: HashMap<usize, usize> = HashMap::new();
    labels
        .iter()
        .map(|&l| {
            let fresh = table.len();
            *table.entry(l).or_insert(fresh)
        })
        .collect()
}

/// Raw tables of the reachable part in canonical state order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CanonicalForm {
    pub alphabet: Vec<String>,
    pub finals: Vec<bool>,
    pub delta: Vec<usize>,
    pub action: Vec<Vec<usize>>,
}

#[derive(Clone, Debug)]
pub struct Minimization {
    pub min: Automaton,
    pub reachable: Automaton,
    /// `reachable → input`
    pub mono: AutomatonMorphism,
    /// `reachable → min`
    pub epi: AutomatonMorphism,
}

/// A map of state carriers between two automata over the same alphabet.
#[derive(Clone, Debug)]
pub struct AutomatonMorphism {
    source: Automaton,
    target: Automaton,
    map: Vec<usize>,
}

impl AutomatonMorphism {
    /// Unchecked construction; use [`AutomatonMorphism::check`] for a verdict.
    pub fn new(source: Automaton, target: Automaton, map: Vec<usize>) -> Self {
        AutomatonMorphism {
            source,
            target,
            map,
        }
    }

    pub fn identity(a: &Automaton) -> Self {
        AutomatonMorphism::new(a.clone(), a.clone(), (0..a.state_count()).collect())
    }

    pub fn source(&self) -> &Automaton {
        &self.source
    }

    pub fn target(&self) -> &Automaton {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.target.state_count()];
        self.map.iter().all(|&y| !std::mem::replace(&mut seen[y], true))
    }

    pub fn is_surjective(&self) -> bool {
        let mut seen = vec![false; self.target.state_count()];
        for &y in &self.map {
            seen[y] = true;
        }
        seen.into_iter().all(|s| s)
    }

    /// Lists every violated condition, each with a witness.
    pub fn check(&self) -> MorphismVerdict {
        let (src, tgt) = (&self.source, &self.target);
        let mut violations = Vec::new();
        let sname = |q: usize| src.states.name(q).to_string();
        let Ok(letters) = letter_correspondence(&src.alphabet, &tgt.alphabet) else {
            violations.push(MorphismViolation::AlphabetMismatch);
            return MorphismVerdict { violations };
        };
        if !src.states.same_symmetry(&tgt.states) {
            violations.push(MorphismViolation::AlphabetMismatch);
            return MorphismVerdict { violations };
        }
        if self.map.len() != src.state_count() {
            violations.push(MorphismViolation::NotTotal {
                state: src
                    .states
                    .names()
                    .get(self.map.len())
                    .cloned()
                    .unwrap_or_default(),
            });
            return MorphismVerdict { violations };
        }
        if let Some(q) = self.map.iter().position(|&t| t >= tgt.state_count()) {
            violations.push(MorphismViolation::NotTotal { state: sname(q) });
            return MorphismVerdict { violations };
        }
        if self.map[src.init] != tgt.init {
            violations.push(MorphismViolation::Init {
                image: tgt.states.name(self.map[src.init]).into(),
                expected: tgt.states.name(tgt.init).into(),
            });
        }
        for q in 0..src.state_count() {
            if src.finals[q] != tgt.finals[self.map[q]] {
                violations.push(MorphismViolation::Final { state: sname(q) });
            }
            for (s, &t) in letters.iter().enumerate() {
                if self.map[src.step(q, s)] != tgt.step(self.map[q], t) {
                    violations.push(MorphismViolation::Delta {
                        state: sname(q),
                        letter: src.alphabet.name(s).into(),
                    });
                }
            }
        }
        for l in 0..src.states.actions().len() {
            for q in 0..src.state_count() {
                if self.map[src.states.act(l, q)] != tgt.states.act(l, self.map[q]) {
                    violations.push(MorphismViolation::Equivariance {
                        state: sname(q),
                        label: src.states.symmetry().label_name(l),
                    });
                    break;
                }
            }
        }
        MorphismVerdict { violations }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MorphismViolation {
    AlphabetMismatch,
    NotTotal { state: String },
    Init { image: String, expected: String },
    Final { state: String },
    Delta { state: String, letter: String },
    Equivariance { state: String, label: String },
}

impl fmt::Display for MorphismViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MorphismViolation::AlphabetMismatch => write!(f, "alphabets or symmetries differ"),
            MorphismViolation::NotTotal { state } => write!(f, "state `{state}` has no image"),
            MorphismViolation::Init { image, expected } => {
                write!(f, "initial state maps to `{image}`, expected `{expected}`")
            }
            MorphismViolation::Final { state } => {
                write!(f, "final status of `{state}` is not preserved")
            }
            MorphismViolation::Delta { state, letter } => {
                write!(f, "transition ({state}, {letter}) does not commute")
            }
            MorphismViolation::Equivariance { state, label } => {
                write!(f, "`{label}` does not commute at `{state}`")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MorphismVerdict {
    pub violations: Vec<MorphismViolation>,
}

impl MorphismVerdict {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for MorphismVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join("; "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set_alphabet(letters: &[&str]) -> FinObject {
        FinObject::set(letters.iter().copied()).unwrap()
    }

    fn states(n: usize) -> FinObject {
        FinObject::set((0..n).map(|i| format!("q{i}"))).unwrap()
    }

    /// Over {a, b}: state 1 iff the last letter read was `a`.
    fn ends_in_a() -> Automaton {
        Automaton::from_fn(set_alphabet(&["a", "b"]), states(2), 0, vec![false, true], |_, s| {
            if s == 0 {
                1
            } else {
                0
            }
        })
        .unwrap()
    }

    /// Counts a's mod 4, accepting counts 0 and 2: redundant for "even number of a's".
    fn even_a_four_states() -> Automaton {
        Automaton::from_fn(
            set_alphabet(&["a", "b"]),
            states(4),
            0,
            vec![true, false, true, false],
            |q, s| if s == 0 { (q + 1) % 4 } else { q },
        )
        .unwrap()
    }

    /// Brute-force residual classes: states are identified by their acceptance
    /// vector over all suffixes of length <= depth.
    fn residual_count(a: &Automaton, depth: usize) -> usize {
        let m = a.alphabet().len();
        let mut suffixes = vec![Vec::new()];
        let mut layer = vec![Vec::new()];
        for _ in 0..depth {
            let mut next = Vec::new();
            for w in &layer {
                for s in 0..m {
                    let mut v: Vec<usize> = w.clone();
                    v.push(s);
                    next.push(v);
                }
            }
            suffixes.extend(next.iter().cloned());
            layer = next;
        }
        let words = a.access_words();
        let mut sigs: Vec<Vec<bool>> = (0..a.state_count())
            .filter(|&q| words[q].is_some())
            .map(|q| {
                suffixes
                    .iter()
                    .map(|w| a.is_final(a.run_from(q, w).unwrap()))
                    .collect()
            })
            .collect();
        sigs.sort();
        sigs.dedup();
        sigs.len()
    }

    #[test]
    fn empty_word_runs_to_init() {
        let a = ends_in_a();
        assert_eq!(a.run(&[]).unwrap(), 0);
        assert_eq!(a.accepts(&[]).unwrap(), a.is_final(a.init()));
        assert!(a.accepts(&[1, 0]).unwrap());
        assert!(!a.accepts(&[0, 1]).unwrap());
        assert_eq!(a.run(&[2]), Err(AutomatonError::UnknownLetter(2)));
    }

    #[test]
    fn run_decomposes_over_concatenation() {
        let a = even_a_four_states();
        let u = [0, 1, 0, 0];
        let v = [1, 0, 1];
        let uv: Vec<usize> = u.iter().chain(&v).copied().collect();
        assert_eq!(a.run(&uv).unwrap(), a.run_from(a.run(&u).unwrap(), &v).unwrap());
    }

    #[test]
    fn ends_in_a_is_already_minimal() {
        let a = ends_in_a();
        assert_eq!(residual_count(&a, 4), 2);
        let m = a.minimize().unwrap();
        assert_eq!(m.min.state_count(), 2);
        assert!(m.min.isomorphic(&a));
    }

    #[test]
    fn even_number_of_a_collapses_to_two_states() {
        let a = even_a_four_states();
        assert_eq!(residual_count(&a, 4), 2);
        let m = a.minimize().unwrap();
        assert_eq!(m.min.state_count(), 2);
        assert!(a.equivalent(&m.min).unwrap());
    }

    #[test]
    fn unreachable_sink_is_dropped() {
        // state 2 is a sink nothing reaches
        let a = Automaton::from_fn(
            set_alphabet(&["a", "b"]),
            states(3),
            0,
            vec![false, true, false],
            |q, s| if q == 2 { 2 } else if s == 0 { 1 } else { 0 },
        )
        .unwrap();
        let (sub, mono) = a.reachable();
        assert_eq!(sub.state_count(), 2);
        assert!(mono.check().is_valid());
        assert!(mono.is_injective());
        let (again, _) = sub.reachable();
        assert_eq!(again, sub);
    }

    #[test]
    fn all_final_collapses_to_one_state() {
        let a = Automaton::from_fn(set_alphabet(&["a"]), states(3), 0, vec![true; 3], |q, _| {
            (q + 1) % 3
        })
        .unwrap();
        let (min, epi) = a.nerode_quotient().unwrap();
        assert_eq!(min.state_count(), 1);
        assert!(min.accepts(&[0, 0, 0, 0]).unwrap());
        assert!(epi.check().is_valid());
    }

    #[test]
    fn minimize_is_idempotent() {
        let m1 = even_a_four_states().minimize().unwrap().min;
        let m2 = m1.minimize().unwrap().min;
        assert_eq!(m1, m2);
    }

    #[test]
    fn minimized_states_are_named_by_shortlex_words() {
        let m = even_a_four_states().minimize().unwrap().min;
        assert_eq!(m.states().names(), &["ε", "a"]);
    }

    #[test]
    fn check_morphism_reports_final_violation() {
        let a = ends_in_a();
        let id = AutomatonMorphism::identity(&a);
        assert!(id.check().is_valid());
        let bad = AutomatonMorphism::new(a.clone(), a.clone(), vec![0, 0]);
        let verdict = bad.check();
        assert!(verdict
            .violations
            .contains(&MorphismViolation::Final { state: "q1".into() }));
    }

    #[test]
    fn contains_aa_variants_are_equivalent() {
        // 0: no progress, 1: just read a, 2: seen aa
        let a = Automaton::from_fn(
            set_alphabet(&["a", "b"]),
            states(3),
            0,
            vec![false, false, true],
            |q, s| match (q, s) {
                (2, _) => 2,
                (0, 0) => 1,
                (1, 0) => 2,
                _ => 0,
            },
        )
        .unwrap();
        // same language, states listed in a different order
        let b = Automaton::from_fn(
            set_alphabet(&["a", "b"]),
            states(3),
            2,
            vec![true, false, false],
            |q, s| match (q, s) {
                (0, _) => 0,
                (2, 0) => 1,
                (1, 0) => 0,
                _ => 2,
            },
        )
        .unwrap();
        // classical oracle: agreement on all words of length < |Qa| + |Qb|
        for len in 0..6 {
            for code in 0..(1usize << len) {
                let w: Vec<usize> = (0..len).map(|i| (code >> i) & 1).collect();
                assert_eq!(a.accepts(&w).unwrap(), b.accepts(&w).unwrap());
            }
        }
        assert!(a.equivalent(&b).unwrap());
        assert!(a.isomorphic(&b));
    }

    #[test]
    fn complement_is_distinguished_by_empty_word() {
        let a = ends_in_a();
        let w = a.distinguishing_word(&a.complement()).unwrap();
        assert_eq!(w, Some(Word::empty()));
    }

    #[test]
    fn distinguishing_word_is_shortlex_least() {
        let a = ends_in_a();
        let never = a.with_finals(vec![false, false]).unwrap();
        assert_eq!(a.distinguishing_word(&never).unwrap(), Some(Word(vec![0])));
    }

    #[test]
    fn partial_shapes_are_rejected() {
        let r = Automaton::new(set_alphabet(&["a"]), states(2), 0, vec![false, true], vec![1]);
        assert!(matches!(r, Err(AutomatonError::DeltaShape { .. })));
        let r = Automaton::new(set_alphabet(&["a"]), states(2), 0, vec![false, true], vec![1, 2]);
        assert!(matches!(r, Err(AutomatonError::TargetOutOfRange { .. })));
    }
}
