use std::collections::{BTreeSet, HashMap, VecDeque};

use super::{
    abstract_object, instantiate_object, pair_patterns, Atom, AtomPool, EquivariantMap, Instantiation,
    NomElement, NomObject, NominalError, OrbitDescriptor, PairPattern, MAX_POOL,
};
use crate::automaton::{Automaton, Word};

/// A transition pattern `Q(x, y), Σ(y, z) -> Q'(x, z)`.
///
/// Within a rule equal variable names denote equal atoms and distinct names
/// distinct atoms; the target may only use variables bound on the left.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaRule {
    pub state_orbit: usize,
    pub state_vars: Vec<String>,
    pub letter_orbit: usize,
    pub letter_vars: Vec<String>,
    pub target_orbit: usize,
    pub target_vars: Vec<String>,
}

/// A rule with variables replaced by generic atoms `1..`, state variables first.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Compiled {
    state: Vec<Atom>,
    letter: Vec<Atom>,
    target: Vec<Atom>,
    vars: usize,
}

/// A deterministic complete automaton whose state set and alphabet are
/// orbit-finite and whose transition function is given by rules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NomAutomaton {
    alphabet: NomObject,
    states: NomObject,
    init: usize,
    finals: Vec<bool>,
    rules: Vec<DeltaRule>,
    compiled: Vec<Compiled>,
}

/// The pool instantiation of an automaton, with the element lists of both carriers.
#[derive(Clone, Debug)]
pub struct InstantiatedAutomaton {
    pub automaton: Automaton,
    pub states: Instantiation,
    pub alphabet: Instantiation,
}

/// Result of nominal minimization: the minimal automaton and the span
/// `a ⊇ reachable → min`, the epi given symbolically on reachable orbits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NominalMinimization {
    pub min: NomAutomaton,
    /// Input orbits that are reachable, in input order.
    pub reachable: Vec<usize>,
    /// From the reachable orbits (as an object, in the order above) onto the
    /// minimal states.
    pub epi: EquivariantMap,
    /// Pool size used; the result was re-checked at `pool + 1`.
    pub pool: usize,
}

/// The reachable part, with the inclusion as a list of input orbits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NominalReachable {
    pub automaton: NomAutomaton,
    pub orbits: Vec<usize>,
}

fn compile(rule: &DeltaRule, states: &NomObject, alphabet: &NomObject, k: usize) -> Result<Compiled, NominalError> {
    let bad = |reason: String| NominalError::BadRule { rule: k, reason };
    let (qs, ls, ts) = (
        states
            .orbits()
            .get(rule.state_orbit)
            .ok_or_else(|| bad("unknown state orbit".into()))?,
        alphabet
            .orbits()
            .get(rule.letter_orbit)
            .ok_or_else(|| bad("unknown letter orbit".into()))?,
        states
            .orbits()
            .get(rule.target_orbit)
            .ok_or_else(|| bad("unknown target orbit".into()))?,
    );
    for (o, vars) in [(qs, &rule.state_vars), (ls, &rule.letter_vars), (ts, &rule.target_vars)] {
        if vars.len() != o.dim() {
            return Err(bad(format!(
                "orbit `{}` takes {} variables, got {}",
                o.name(),
                o.dim(),
                vars.len()
            )));
        }
        let distinct: BTreeSet<&String> = vars.iter().collect();
        if distinct.len() != vars.len() {
            return Err(bad(format!("repeated variable in `{}` pattern", o.name())));
        }
    }
    let mut ids: HashMap<&str, Atom> = HashMap::new();
    for v in rule.state_vars.iter().chain(&rule.letter_vars) {
        let next = ids.len() as Atom + 1;
        ids.entry(v.as_str()).or_insert(next);
    }
    let target = rule
        .target_vars
        .iter()
        .map(|v| {
            ids.get(v.as_str())
                .copied()
                .ok_or_else(|| bad(format!("variable `{v}` is not bound on the left")))
        })
        .collect::<Result<_, _>>()?;
    Ok(Compiled {
        state: rule.state_vars.iter().map(|v| ids[v.as_str()]).collect(),
        letter: rule.letter_vars.iter().map(|v| ids[v.as_str()]).collect(),
        target,
        vars: ids.len(),
    })
}

/// Every target tuple obtained by matching the rule against `(q, s)`.
fn bindings(
    c: &Compiled,
    qo: &OrbitDescriptor,
    so: &OrbitDescriptor,
    q: &[Atom],
    s: &[Atom],
) -> Vec<Vec<Atom>> {
    let mut out = Vec::new();
    for sigma in qo.stabilizer() {
        'tau: for tau in so.stabilizer() {
            let mut bind: Vec<Option<Atom>> = vec![None; c.vars + 1];
            let pairs = (0..q.len())
                .map(|i| (c.state[i], q[sigma.apply(i)]))
                .chain((0..s.len()).map(|j| (c.letter[j], s[tau.apply(j)])));
            for (g, a) in pairs {
                match bind[g as usize] {
                    Some(b) if b != a => continue 'tau,
                    _ => bind[g as usize] = Some(a),
                }
            }
            let used: BTreeSet<Atom> = bind.iter().flatten().copied().collect();
            if used.len() != c.vars {
                continue;
            }
            out.push(c.target.iter().map(|&g| bind[g as usize].expect("bound")).collect());
        }
    }
    out
}

/// Letter tuple realizing `pattern` against the state tuple `1..=dim`.
fn realize(pattern: &PairPattern, dim: usize) -> Vec<Atom> {
    let mut fresh = dim as Atom;
    pattern
        .iter()
        .map(|p| match p {
            Some(i) => *i as Atom + 1,
            None => {
                fresh += 1;
                fresh
            }
        })
        .collect()
}

impl NomAutomaton {
    /// Validates the automaton: the initial orbit has dimension 0, every rule
    /// is well formed and well defined, and on every orbit of state-letter
    /// pairs exactly one rule applies.
    pub fn new(
        alphabet: NomObject,
        states: NomObject,
        init: usize,
        finals: Vec<bool>,
        rules: Vec<DeltaRule>,
    ) -> Result<Self, NominalError> {
        let init_orbit = states
            .orbits()
            .get(init)
            .ok_or_else(|| NominalError::UnknownOrbit(format!("#{init}")))?;
        if init_orbit.dim() != 0 {
            return Err(NominalError::InitNotFixed {
                orbit: init_orbit.name().into(),
                dim: init_orbit.dim(),
            });
        }
        if finals.len() != states.orbit_count() {
            return Err(NominalError::FinalsShape {
                expected: states.orbit_count(),
                found: finals.len(),
            });
        }
        let compiled = rules
            .iter()
            .enumerate()
            .map(|(k, r)| compile(r, &states, &alphabet, k))
            .collect::<Result<Vec<_>, _>>()?;
        let a = NomAutomaton {
            alphabet,
            states,
            init,
            finals,
            rules,
            compiled,
        };
        for (k, (r, c)) in a.rules.iter().zip(&a.compiled).enumerate() {
            let qo = a.states.orbit(r.state_orbit);
            let so = a.alphabet.orbit(r.letter_orbit);
            let s = so.canonical(&c.letter);
            let to = a.states.orbit(r.target_orbit);
            let outputs: BTreeSet<Vec<Atom>> = bindings(c, qo, so, &c.state, &s)
                .into_iter()
                .map(|t| to.canonical(&t))
                .collect();
            if outputs.len() > 1 {
                return Err(NominalError::BadRule {
                    rule: k,
                    reason: format!(
                        "target depends on how the pattern is matched: {} different results",
                        outputs.len()
                    ),
                });
            }
        }
        // one representative per orbit of pairs, drawn from the pool 1..=d_Q+d_Σ
        for (qi, qo) in a.states.orbits().iter().enumerate() {
            let q = a.states.generic(qi, 1);
            for (si, so) in a.alphabet.orbits().iter().enumerate() {
                for p in pair_patterns(qo, so) {
                    let s = a.alphabet.element_unchecked(si, &realize(&p, qo.dim()));
                    let hits = a.matching_rules(&q, &s);
                    if hits.len() != 1 {
                        let (state, letter) = (a.states.display(&q), a.alphabet.display(&s));
                        return Err(if hits.is_empty() {
                            NominalError::MissingTransition { state, letter }
                        } else {
                            NominalError::AmbiguousTransition {
                                state,
                                letter,
                                rules: hits,
                            }
                        });
                    }
                }
            }
        }
        Ok(a)
    }

    pub fn alphabet(&self) -> &NomObject {
        &self.alphabet
    }

    pub fn states(&self) -> &NomObject {
        &self.states
    }

    pub fn init(&self) -> usize {
        self.init
    }

    pub fn init_element(&self) -> NomElement {
        self.states.generic(self.init, 1)
    }

    pub fn finals(&self) -> &[bool] {
        &self.finals
    }

    pub fn rules(&self) -> &[DeltaRule] {
        &self.rules
    }

    fn matching_rules(&self, q: &NomElement, s: &NomElement) -> Vec<usize> {
        (0..self.rules.len())
            .filter(|&k| self.apply_rule(k, q, s).is_some())
            .collect()
    }

    fn apply_rule(&self, k: usize, q: &NomElement, s: &NomElement) -> Option<NomElement> {
        let r = &self.rules[k];
        if r.state_orbit != q.orbit() || r.letter_orbit != s.orbit() {
            return None;
        }
        let t = bindings(
            &self.compiled[k],
            self.states.orbit(q.orbit()),
            self.alphabet.orbit(s.orbit()),
            q.atoms(),
            s.atoms(),
        )
        .into_iter()
        .next()?;
        Some(self.states.element_unchecked(r.target_orbit, &t))
    }

    pub fn step(&self, q: &NomElement, s: &NomElement) -> Result<NomElement, NominalError> {
        (0..self.rules.len())
            .find_map(|k| self.apply_rule(k, q, s))
            .ok_or_else(|| NominalError::MissingTransition {
                state: self.states.display(q),
                letter: self.alphabet.display(s),
            })
    }

    pub fn run(&self, word: &[NomElement]) -> Result<NomElement, NominalError> {
        word.iter()
            .try_fold(self.init_element(), |q, s| self.step(&q, s))
    }

    pub fn accepts(&self, word: &[NomElement]) -> Result<bool, NominalError> {
        Ok(self.finals[self.run(word)?.orbit()])
    }

    /// Largest state and letter dimensions.
    pub fn dims(&self) -> (usize, usize) {
        (self.states.max_dim(), self.alphabet.max_dim())
    }

    /// Rule `k` in input syntax, e.g. `Oa(x), A(y) -> Oa(x)`.
    pub fn rule_text(&self, k: usize) -> String {
        let r = &self.rules[k];
        let pat = |name: &str, vars: &[String]| {
            if vars.is_empty() {
                name.to_string()
            } else {
                format!("{name}({})", vars.join(","))
            }
        };
        format!(
            "{}, {} -> {}",
            pat(self.states.orbit(r.state_orbit).name(), &r.state_vars),
            pat(self.alphabet.orbit(r.letter_orbit).name(), &r.letter_vars),
            pat(self.states.orbit(r.target_orbit).name(), &r.target_vars),
        )
    }

    /// The finite automaton over all states and letters with atoms in the pool.
    pub fn instantiate(&self, pool: &AtomPool, cap: usize) -> Result<InstantiatedAutomaton, NominalError> {
        let (dq, ds) = self.dims();
        if pool.size() < dq.max(ds) {
            return Err(NominalError::PoolTooSmall {
                needed: dq.max(ds),
                size: pool.size(),
            });
        }
        let states = instantiate_object(&self.states, pool, cap)?;
        let alphabet = instantiate_object(&self.alphabet, pool, cap)?;
        let mut delta = Vec::with_capacity(states.len() * alphabet.len());
        for q in &states.elements {
            for s in &alphabet.elements {
                let t = self.step(q, s)?;
                delta.push(states.index_of(&t).expect("targets stay in the pool"));
            }
        }
        let init = states.index_of(&self.init_element()).expect("dimension 0");
        let finals = states.elements.iter().map(|e| self.finals[e.orbit()]).collect();
        let automaton = Automaton::new(
            alphabet.object.clone(),
            states.object.clone(),
            init,
            finals,
            delta,
        )?;
        Ok(InstantiatedAutomaton {
            automaton,
            states,
            alphabet,
        })
    }

    /// Orbits reachable from the initial state, found symbolically: one
    /// representative per orbit of state-letter pairs.
    pub fn reachable(&self) -> Result<NominalReachable, NominalError> {
        let mut seen = vec![false; self.states.orbit_count()];
        seen[self.init] = true;
        let mut queue = VecDeque::from([self.init]);
        while let Some(o) = queue.pop_front() {
            let q = self.states.generic(o, 1);
            for (si, so) in self.alphabet.orbits().iter().enumerate() {
                for p in pair_patterns(self.states.orbit(o), so) {
                    let s = self
                        .alphabet
                        .element_unchecked(si, &realize(&p, self.states.orbit(o).dim()));
                    let t = self.step(&q, &s)?.orbit();
                    if !seen[t] {
                        seen[t] = true;
                        queue.push_back(t);
                    }
                }
            }
        }
        let orbits: Vec<usize> = (0..seen.len()).filter(|&o| seen[o]).collect();
        let position: HashMap<usize, usize> = orbits.iter().enumerate().map(|(k, &o)| (o, k)).collect();
        let states = NomObject::new(orbits.iter().map(|&o| self.states.orbit(o).clone()).collect())?;
        let rules = self
            .rules
            .iter()
            .filter(|r| seen[r.state_orbit])
            .map(|r| DeltaRule {
                state_orbit: position[&r.state_orbit],
                target_orbit: position[&r.target_orbit],
                ..r.clone()
            })
            .collect();
        let finals = orbits.iter().map(|&o| self.finals[o]).collect();
        let automaton = NomAutomaton::new(self.alphabet.clone(), states, position[&self.init], finals, rules)?;
        Ok(NominalReachable { automaton, orbits })
    }

    /// Minimizes through the pool of `d_Q + d_Σ + margin` atoms and requires
    /// the identical result with one atom more.
    pub fn minimize(&self, margin: usize, cap: usize) -> Result<NominalMinimization, NominalError> {
        let (dq, ds) = self.dims();
        let b = dq + ds + margin;
        if b + 1 > MAX_POOL {
            return Err(NominalError::PoolTooLarge(b + 1));
        }
        let small = self.minimize_at(b, cap)?;
        let large = self.minimize_at(b + 1, cap)?;
        if (&small.min, &small.reachable, &small.epi) != (&large.min, &large.reachable, &large.epi) {
            let detail = if small.min.states.orbit_count() == large.min.states.orbit_count() {
                ": orbit descriptors differ".to_string()
            } else {
                String::new()
            };
            return Err(NominalError::StabilityGate {
                what: "minimization".into(),
                small_pool: b,
                small_orbits: small.min.states.orbit_count(),
                large_pool: b + 1,
                large_orbits: large.min.states.orbit_count(),
                detail,
            });
        }
        Ok(small)
    }

    fn minimize_at(&self, size: usize, cap: usize) -> Result<NominalMinimization, NominalError> {
        let pool = AtomPool::new(size)?;
        let inst = self.instantiate(&pool, cap)?;
        let mz = inst.automaton.minimize()?;
        let min = &mz.min;
        // original state index -> reachable index
        let mut reach_of = vec![None; inst.automaton.state_count()];
        for (r, &o) in mz.mono.map().iter().enumerate() {
            reach_of[o] = Some(r);
        }
        let mut bounds: Vec<Option<Vec<Atom>>> = vec![None; min.state_count()];
        for (r, &c) in mz.epi.map().iter().enumerate() {
            let atoms = inst.states.elements[mz.mono.map()[r]].atoms();
            if bounds[c].as_ref().is_none_or(|b| atoms.len() < b.len()) {
                bounds[c] = Some(atoms.to_vec());
            }
        }
        let bounds: Vec<Vec<Atom>> = bounds.into_iter().map(|b| b.expect("epi is onto")).collect();
        let abs = abstract_object(min.states(), &bounds, &|k| format!("q{k}"))?;

        let reachable: Vec<usize> = (0..self.states.orbit_count())
            .filter(|&o| {
                let rep = self.states.generic(o, 1);
                reach_of[inst.states.index_of(&rep).expect("in pool")].is_some()
            })
            .collect();
        let reach_obj = NomObject::new(reachable.iter().map(|&o| self.states.orbit(o).clone()).collect())?;
        let image_of = |k: usize| {
            let rep = self.states.generic(reachable[k], 1);
            let r = reach_of[inst.states.index_of(&rep)?]?;
            Some(abs.elements[mz.epi.map()[r]].clone())
        };
        // minimal orbits inherit the name of the first input orbit mapping onto them
        let mut names: Vec<Option<String>> = vec![None; abs.object.orbit_count()];
        for (k, &o) in reachable.iter().enumerate() {
            let target = image_of(k).expect("reachable").orbit();
            if names[target].is_none() {
                names[target] = Some(self.states.orbit(o).name().to_string());
            }
        }
        let min_states = NomObject::new(
            abs.object
                .orbits()
                .iter()
                .zip(names)
                .map(|(o, n)| o.renamed(n.expect("epi is onto")))
                .collect(),
        )?;
        let epi = EquivariantMap::from_representatives(&reach_obj, &min_states, image_of)?;

        let init = abs.elements[min.init()].orbit();
        let finals = (0..min_states.orbit_count())
            .map(|o| {
                let rep = abs.index_of(&min_states.generic(o, 1)).expect("generic element in pool");
                min.is_final(rep)
            })
            .collect();
        let mut rules = Vec::new();
        for (qo, qd) in min_states.orbits().iter().enumerate() {
            let q = min_states.generic(qo, 1);
            let qc = abs.index_of(&q).expect("generic element in pool");
            for (so, sd) in self.alphabet.orbits().iter().enumerate() {
                for p in pair_patterns(qd, sd) {
                    let letter = realize(&p, qd.dim());
                    let s = self.alphabet.element_unchecked(so, &letter);
                    let sc = inst.alphabet.index_of(&s).expect("pattern fits the pool");
                    let t = &abs.elements[min.step(qc, sc)];
                    let var = |a: Atom| {
                        if (a as usize) <= qd.dim() {
                            format!("x{a}")
                        } else {
                            format!("y{}", a as usize - qd.dim())
                        }
                    };
                    rules.push(DeltaRule {
                        state_orbit: qo,
                        state_vars: q.atoms().iter().map(|&a| var(a)).collect(),
                        letter_orbit: so,
                        letter_vars: letter.iter().map(|&a| var(a)).collect(),
                        target_orbit: t.orbit(),
                        target_vars: t.atoms().iter().map(|&a| var(a)).collect(),
                    });
                }
            }
        }
        let min = NomAutomaton::new(self.alphabet.clone(), min_states, init, finals, rules)?;
        Ok(NominalMinimization {
            min,
            reachable,
            epi,
            pool: size,
        })
    }

    /// Shortest distinguishing word, searched over a pool large enough for
    /// both state supports and one letter.
    pub fn distinguishing_word(&self, other: &NomAutomaton) -> Result<Option<Vec<NomElement>>, NominalError> {
        if self.alphabet != other.alphabet {
            return Err(NominalError::AlphabetMismatch);
        }
        let size = (self.states.max_dim() + other.states.max_dim() + self.alphabet.max_dim()).max(1);
        let pool = AtomPool::new(size)?;
        let cap = super::DEFAULT_CARRIER_CAP;
        let (a, b) = (self.instantiate(&pool, cap)?, other.instantiate(&pool, cap)?);
        Ok(a.automaton
            .distinguishing_word(&b.automaton)?
            .map(|Word(w)| w.into_iter().map(|s| a.alphabet.elements[s].clone()).collect()))
    }

    pub fn equivalent(&self, other: &NomAutomaton) -> Result<bool, NominalError> {
        Ok(self.distinguishing_word(other)?.is_none())
    }

    pub fn display_word(&self, word: &[NomElement]) -> String {
        if word.is_empty() {
            return "ε".into();
        }
        word.iter()
            .map(|s| self.alphabet.display(s))
            .collect::<Vec<_>>()
            .join(" ")
    }
}
