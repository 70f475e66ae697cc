//! The line-oriented automaton description format.
//!
//! ```text
//! backend: gset
//! group:
//!   elements: e s
//!   table:
//!     e: e s
//!     s: s e
//! object Sigma:
//!   elements: a b
//!   action s: a->b b->a
//! object Q:
//!   elements: p q
//!   action s: p->q q->p
//! automaton swap:
//!   alphabet: Sigma
//!   states: Q
//!   ...
//! ```
//!
//! `#` starts a comment and indentation is not significant. Nominal objects
//! list `orbit NAME: dim n [stab: (1 2), ...]` lines instead of elements, and
//! nominal delta lines are patterns such as `Oa(x), A(y) -> Oa(x)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use nerode_core::gset::{gset_object, FinGroup, GroupError, GroupHom};
use nerode_core::nominal::{DeltaRule, NomAutomaton, NomObject, NominalError, OrbitDescriptor};
use nerode_core::perm::Perm;
use nerode_core::{Automaton, AutomatonError, BackendError, BackendTag, FinObject, Symmetry};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Semantic(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error(transparent)]
    Nominal(#[from] NominalError),
}

impl FormatError {
    fn semantic(msg: impl Into<String>) -> Self {
        FormatError::Semantic(msg.into())
    }
}

/// The automaton inside a file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Machine {
    Finite(Automaton),
    Nominal(NomAutomaton),
}

/// A validated description file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    pub backend: BackendTag,
    pub group: Option<Arc<FinGroup>>,
    pub name: String,
    pub alphabet_name: String,
    pub states_name: String,
    pub machine: Machine,
}

impl Model {
    pub fn finite(&self) -> Option<&Automaton> {
        match &self.machine {
            Machine::Finite(a) => Some(a),
            Machine::Nominal(_) => None,
        }
    }

    pub fn nominal(&self) -> Option<&NomAutomaton> {
        match &self.machine {
            Machine::Nominal(a) => Some(a),
            Machine::Finite(_) => None,
        }
    }

    /// The same file around a different automaton.
    pub fn with_finite(&self, a: Automaton) -> Model {
        Model {
            machine: Machine::Finite(a),
            ..self.clone()
        }
    }

    pub fn with_nominal(&self, a: NomAutomaton) -> Model {
        Model {
            machine: Machine::Nominal(a),
            ..self.clone()
        }
    }
}

/// A line after comment stripping, with its position in the file.
#[derive(Clone, Debug)]
struct Line<'a> {
    number: usize,
    raw: &'a str,
    text: &'a str,
}

impl<'a> Line<'a> {
    fn column_of(&self, part: &str) -> usize {
        let offset = (part.as_ptr() as usize).saturating_sub(self.raw.as_ptr() as usize);
        let offset = offset.min(self.raw.len());
        self.raw[..offset].chars().count() + 1
    }

    fn error(&self, at: &str, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.number,
            column: self.column_of(at),
            message: message.into(),
        }
    }
}

fn lines(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let body = raw.split('#').next().unwrap_or("").trim();
            (!body.is_empty()).then_some(Line {
                number: i + 1,
                raw,
                text: body,
            })
        })
        .collect()
}

/// Splits `key: rest` when `key` is one of `keys`.
fn keyword<'a>(text: &'a str, keys: &[&str]) -> Option<(&'a str, &'a str)> {
    let (k, rest) = text.split_once(':')?;
    let k = k.trim();
    keys.contains(&k).then_some((k, rest.trim()))
}

fn is_name(token: &str) -> bool {
    !token.is_empty()
        && !token.contains(|c: char| c.is_whitespace() || matches!(c, ',' | ':' | '#' | '(' | ')'))
        && !token.contains("->")
}

fn names<'a>(line: &Line<'a>, rest: &'a str) -> Result<Vec<&'a str>, ParseError> {
    rest.split_whitespace()
        .map(|t| {
            if is_name(t) {
                Ok(t)
            } else {
                Err(line.error(t, format!("`{t}` is not a valid name")))
            }
        })
        .collect()
}

#[derive(Clone, Debug, Default)]
struct RawGroup<'a> {
    line: Option<Line<'a>>,
    elements: Option<(Line<'a>, Vec<&'a str>)>,
    table: Vec<(Line<'a>, &'a str, Vec<&'a str>)>,
    generators: Vec<(Line<'a>, &'a str, &'a str)>,
}

#[derive(Clone, Debug)]
enum RawObjectBody<'a> {
    Elements(Line<'a>, Vec<&'a str>),
    Action(Line<'a>, &'a str, Vec<(&'a str, &'a str)>),
    Orbit(Line<'a>, &'a str, usize, Vec<&'a str>),
}

#[derive(Clone, Debug)]
struct RawObject<'a> {
    line: Line<'a>,
    name: &'a str,
    body: Vec<RawObjectBody<'a>>,
}

#[derive(Clone, Debug, Default)]
struct RawAutomaton<'a> {
    line: Option<Line<'a>>,
    name: &'a str,
    fields: HashMap<&'a str, (Line<'a>, &'a str)>,
    delta: Vec<(Line<'a>, &'a str, &'a str, &'a str)>,
}

#[derive(Clone, Debug, Default)]
struct RawFile<'a> {
    backend: Option<(Line<'a>, &'a str)>,
    group: RawGroup<'a>,
    objects: Vec<RawObject<'a>>,
    automaton: RawAutomaton<'a>,
    map: Vec<(Line<'a>, &'a str, &'a str)>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Ctx {
    Top,
    Group,
    Table,
    Generators,
    Object,
    Automaton,
    Delta,
    Map,
}

fn parse_raw(text: &str) -> Result<RawFile<'_>, ParseError> {
    let mut file = RawFile::default();
    let mut ctx = Ctx::Top;
    for line in lines(text) {
        let t = line.text;
        if let Some((_, rest)) = keyword(t, &["backend"]) {
            if file.backend.is_some() {
                return Err(line.error(t, "duplicate `backend:` line"));
            }
            file.backend = Some((line.clone(), rest));
            ctx = Ctx::Top;
            continue;
        }
        if t == "group:" {
            if file.group.line.is_some() {
                return Err(line.error(t, "duplicate `group:` section"));
            }
            file.group.line = Some(line.clone());
            ctx = Ctx::Group;
            continue;
        }
        if t == "map:" {
            ctx = Ctx::Map;
            continue;
        }
        if let Some(head) = t.strip_prefix("object ") {
            let name = head
                .strip_suffix(':')
                .map(str::trim)
                .filter(|n| is_name(n))
                .ok_or_else(|| line.error(head, "expected `object NAME:`"))?;
            file.objects.push(RawObject {
                line: line.clone(),
                name,
                body: Vec::new(),
            });
            ctx = Ctx::Object;
            continue;
        }
        if let Some(head) = t.strip_prefix("automaton ") {
            if file.automaton.line.is_some() {
                return Err(line.error(t, "only one automaton per file"));
            }
            let name = head
                .strip_suffix(':')
                .map(str::trim)
                .filter(|n| is_name(n))
                .ok_or_else(|| line.error(head, "expected `automaton NAME:`"))?;
            file.automaton.line = Some(line.clone());
            file.automaton.name = name;
            ctx = Ctx::Automaton;
            continue;
        }
        match ctx {
            Ctx::Top => return Err(line.error(t, "expected a section header")),
            Ctx::Group | Ctx::Table | Ctx::Generators => {
                if let Some((_, rest)) = keyword(t, &["elements"]) {
                    file.group.elements = Some((line.clone(), names(&line, rest)?));
                    ctx = Ctx::Group;
                } else if t == "table:" {
                    ctx = Ctx::Table;
                } else if t == "generators:" {
                    ctx = Ctx::Generators;
                } else if ctx == Ctx::Table {
                    let (row, rest) = t
                        .split_once(':')
                        .ok_or_else(|| line.error(t, "expected `g: g·h1 g·h2 ...`"))?;
                    let row = row.trim();
                    if !is_name(row) {
                        return Err(line.error(row, format!("`{row}` is not a valid name")));
                    }
                    file.group.table.push((line.clone(), row, names(&line, rest)?));
                } else if ctx == Ctx::Generators {
                    let (g, cycles) = t
                        .split_once(':')
                        .ok_or_else(|| line.error(t, "expected `name: (1 2 3)`"))?;
                    let g = g.trim();
                    if !is_name(g) {
                        return Err(line.error(g, format!("`{g}` is not a valid name")));
                    }
                    file.group.generators.push((line.clone(), g, cycles.trim()));
                } else {
                    return Err(line.error(t, "expected `elements:`, `table:` or `generators:`"));
                }
            }
            Ctx::Object => {
                let obj = file.objects.last_mut().expect("inside an object");
                if let Some((_, rest)) = keyword(t, &["elements"]) {
                    obj.body.push(RawObjectBody::Elements(line.clone(), names(&line, rest)?));
                } else if let Some(head) = t.strip_prefix("action ") {
                    let (g, rest) = head
                        .split_once(':')
                        .ok_or_else(|| line.error(head, "expected `action G: x->y ...`"))?;
                    let g = g.trim();
                    if !is_name(g) {
                        return Err(line.error(g, format!("`{g}` is not a valid name")));
                    }
                    let mut pairs = Vec::new();
                    for tok in rest.split_whitespace() {
                        let (x, y) = tok
                            .split_once("->")
                            .filter(|(x, y)| is_name(x) && is_name(y))
                            .ok_or_else(|| line.error(tok, format!("expected `x->y`, found `{tok}`")))?;
                        pairs.push((x, y));
                    }
                    obj.body.push(RawObjectBody::Action(line.clone(), g, pairs));
                } else if let Some(head) = t.strip_prefix("orbit ") {
                    let (name, rest) = head
                        .split_once(':')
                        .ok_or_else(|| line.error(head, "expected `orbit NAME: dim n`"))?;
                    let name = name.trim();
                    if !is_name(name) {
                        return Err(line.error(name, format!("`{name}` is not a valid orbit name")));
                    }
                    let (dim_part, stab) = match rest.split_once("stab:") {
                        Some((d, s)) => (d.trim(), Some(s.trim())),
                        None => (rest.trim(), None),
                    };
                    let dim = dim_part
                        .strip_prefix("dim")
                        .map(str::trim)
                        .and_then(|d| d.parse::<usize>().ok())
                        .ok_or_else(|| line.error(dim_part, "expected `dim n`"))?;
                    let gens = match stab {
                        Some(s) if !s.is_empty() => s.split(',').map(str::trim).collect(),
                        _ => Vec::new(),
                    };
                    obj.body.push(RawObjectBody::Orbit(line.clone(), name, dim, gens));
                } else {
                    return Err(line.error(t, "expected `elements:`, `action G:` or `orbit NAME:`"));
                }
            }
            Ctx::Automaton | Ctx::Delta => {
                if let Some((k, rest)) = keyword(t, &["alphabet", "states", "init", "final"]) {
                    if file.automaton.fields.insert(k, (line.clone(), rest)).is_some() {
                        return Err(line.error(t, format!("duplicate `{k}:`")));
                    }
                    ctx = Ctx::Automaton;
                } else if t == "delta:" {
                    ctx = Ctx::Delta;
                } else if ctx == Ctx::Delta {
                    let (left, right) = t
                        .split_once("->")
                        .ok_or_else(|| line.error(t, "expected `state, letter -> state`"))?;
                    let comma = top_level_comma(left)
                        .ok_or_else(|| line.error(left, "expected `state, letter` before `->`"))?;
                    let (q, s) = (left[..comma].trim(), left[comma + 1..].trim());
                    let r = right.trim();
                    for part in [q, s, r] {
                        if part.is_empty() {
                            return Err(line.error(t, "empty component in transition"));
                        }
                    }
                    file.automaton.delta.push((line.clone(), q, s, r));
                } else {
                    return Err(line.error(
                        t,
                        "expected `alphabet:`, `states:`, `init:`, `final:` or `delta:`",
                    ));
                }
            }
            Ctx::Map => {
                let (g, h) = t
                    .split_once("->")
                    .map(|(g, h)| (g.trim(), h.trim()))
                    .filter(|(g, h)| is_name(g) && is_name(h))
                    .ok_or_else(|| line.error(t, "expected `g -> h`"))?;
                file.map.push((line.clone(), g, h));
            }
        }
    }
    Ok(file)
}

fn top_level_comma(s: &str) -> Option<usize> {
    let mut depth = 0i32;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => return Some(i),
            _ => {}
        }
    }
    None
}

/// `Name` or `Name(x, y)`.
fn pattern<'a>(line: &Line<'a>, text: &'a str) -> Result<(&'a str, Vec<&'a str>), ParseError> {
    let text = text.trim();
    match text.split_once('(') {
        None if is_name(text) => Ok((text, Vec::new())),
        None => Err(line.error(text, format!("`{text}` is not a valid pattern"))),
        Some((name, rest)) => {
            let name = name.trim();
            let inner = rest
                .trim_end()
                .strip_suffix(')')
                .ok_or_else(|| line.error(rest, "missing `)`"))?;
            if !is_name(name) {
                return Err(line.error(name, format!("`{name}` is not a valid orbit name")));
            }
            let vars: Vec<&str> = if inner.trim().is_empty() {
                Vec::new()
            } else {
                inner.split(',').map(str::trim).collect()
            };
            if let Some(v) = vars.iter().find(|v| !is_name(v)) {
                return Err(line.error(v, format!("`{v}` is not a valid variable")));
            }
            Ok((name, vars))
        }
    }
}

fn build_group(raw: &RawGroup<'_>) -> Result<FinGroup, FormatError> {
    let header = raw.line.as_ref().expect("group section present");
    if !raw.generators.is_empty() {
        if raw.elements.is_some() || !raw.table.is_empty() {
            return Err(header.error(header.text, "use either `generators:` or `elements:` with `table:`").into());
        }
        let mut parsed = Vec::new();
        let mut degree = 0;
        for (line, _, cycles) in &raw.generators {
            let max = cycles
                .split(|c: char| !c.is_ascii_digit())
                .filter_map(|n| n.parse::<usize>().ok())
                .max()
                .unwrap_or(0);
            degree = degree.max(max);
            parsed.push((line, cycles));
        }
        let mut gens = Vec::new();
        for ((line, name, _), (_, cycles)) in raw.generators.iter().zip(parsed) {
            let p = Perm::parse_cycles(degree, cycles).map_err(|e| line.error(cycles, e.to_string()))?;
            gens.push((name.to_string(), p));
        }
        return Ok(FinGroup::from_generators(&gens)?);
    }
    let (line, elements) = raw
        .elements
        .as_ref()
        .ok_or_else(|| header.error(header.text, "group needs `elements:` and `table:`, or `generators:`"))?;
    let index: HashMap<&str, usize> = elements.iter().enumerate().map(|(i, e)| (*e, i)).collect();
    if index.len() != elements.len() {
        return Err(line.error(line.text, "duplicate group element").into());
    }
    let mut rows: Vec<Option<Vec<usize>>> = vec![None; elements.len()];
    for (line, row, entries) in &raw.table {
        let r = *index
            .get(row)
            .ok_or_else(|| line.error(row, format!("unknown group element `{row}`")))?;
        let vals = entries
            .iter()
            .map(|e| {
                index
                    .get(e)
                    .copied()
                    .ok_or_else(|| line.error(e, format!("unknown group element `{e}`")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if rows[r].replace(vals).is_some() {
            return Err(line.error(row, format!("duplicate table row `{row}`")).into());
        }
    }
    let table = rows
        .into_iter()
        .enumerate()
        .map(|(i, r)| r.ok_or_else(|| FormatError::semantic(format!("table row for `{}` is missing", elements[i]))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FinGroup::from_table(
        elements.iter().map(|e| e.to_string()).collect(),
        table,
    )?)
}

fn build_finite_object(
    raw: &RawObject<'_>,
    group: Option<&Arc<FinGroup>>,
) -> Result<FinObject, FormatError> {
    let mut elements: Option<Vec<String>> = None;
    type Action<'r> = (&'r Line<'r>, &'r str, &'r Vec<(&'r str, &'r str)>);
    let mut actions: Vec<Action<'_>> = Vec::new();
    for body in &raw.body {
        match body {
            RawObjectBody::Elements(line, e) => {
                if elements.is_some() {
                    return Err(line.error(line.text, "duplicate `elements:`").into());
                }
                elements = Some(e.iter().map(|s| s.to_string()).collect());
            }
            RawObjectBody::Action(line, g, pairs) => actions.push((line, g, pairs)),
            RawObjectBody::Orbit(line, ..) => {
                return Err(line.error(line.text, "orbit declarations need `backend: nominal`").into())
            }
        }
    }
    let elements = elements.ok_or_else(|| FormatError::semantic(format!("object `{}` has no `elements:`", raw.name)))?;
    let index: HashMap<&str, usize> = elements.iter().enumerate().map(|(i, e)| (e.as_str(), i)).collect();
    match group {
        None => {
            if let Some((line, ..)) = actions.first() {
                return Err(FormatError::semantic(format!(
                    "line {}: actions need `backend: gset`",
                    line.number
                )));
            }
            Ok(FinObject::set(elements)?)
        }
        Some(g) => {
            let mut listed = Vec::new();
            for (line, name, pairs) in actions {
                let gi = g
                    .index_of(name)
                    .ok_or_else(|| FormatError::semantic(format!("line {}: unknown group element `{name}`", line.number)))?;
                let mut images: Vec<usize> = (0..elements.len()).collect();
                for (x, y) in pairs {
                    let (xi, yi) = (
                        *index.get(x).ok_or_else(|| {
                            FormatError::semantic(format!("line {}: unknown element `{x}` in object `{}`", line.number, raw.name))
                        })?,
                        *index.get(y).ok_or_else(|| {
                            FormatError::semantic(format!("line {}: unknown element `{y}` in object `{}`", line.number, raw.name))
                        })?,
                    );
                    images[xi] = yi;
                }
                let p = Perm::from_images(images).map_err(|_| {
                    FormatError::semantic(format!(
                        "line {}: action of `{name}` on `{}` is not a bijection",
                        line.number, raw.name
                    ))
                })?;
                listed.push((gi, p));
            }
            // group elements outside the span of the listed ones act trivially
            let mut span = subgroup(g, listed.iter().map(|(gi, _)| *gi));
            for gi in group_generators(g) {
                if !span.contains(&gi) {
                    listed.push((gi, Perm::identity(elements.len())));
                    span = subgroup(g, listed.iter().map(|(gi, _)| *gi));
                }
            }
            Ok(gset_object(g.clone(), elements, &listed)?)
        }
    }
}

fn build_nominal_object(raw: &RawObject<'_>) -> Result<NomObject, FormatError> {
    let mut orbits = Vec::new();
    for body in &raw.body {
        match body {
            RawObjectBody::Orbit(line, name, dim, gens) => {
                let gens = gens
                    .iter()
                    .map(|g| Perm::parse_cycles(*dim, g).map_err(|e| line.error(g, e.to_string())))
                    .collect::<Result<Vec<_>, _>>()?;
                orbits.push(OrbitDescriptor::new(*name, *dim, gens)?);
            }
            RawObjectBody::Elements(line, _) | RawObjectBody::Action(line, ..) => {
                return Err(FormatError::semantic(format!(
                    "line {}: nominal objects are declared by `orbit` lines",
                    line.number
                )))
            }
        }
    }
    Ok(NomObject::new(orbits)?)
}

fn field<'a, 'b>(raw: &'b RawAutomaton<'a>, key: &str) -> Result<&'b (Line<'a>, &'a str), FormatError> {
    raw.fields
        .get(key)
        .ok_or_else(|| FormatError::semantic(format!("automaton `{}` has no `{key}:`", raw.name)))
}

/// Parses and validates a description file.
pub fn parse(text: &str) -> Result<Model, FormatError> {
    let raw = parse_raw(text)?;
    let (bline, btext) = raw
        .backend
        .as_ref()
        .ok_or_else(|| ParseError {
            line: 1,
            column: 1,
            message: "missing `backend:` line".into(),
        })?;
    let backend = match *btext {
        "set" => BackendTag::Set,
        "gset" => BackendTag::GSet,
        "nominal" => BackendTag::Nominal,
        other => return Err(bline.error(other, format!("unknown backend `{other}`")).into()),
    };
    if raw.automaton.line.is_none() {
        return Err(FormatError::semantic("file has no `automaton` section"));
    }
    if let Some((line, ..)) = raw.map.first() {
        return Err(line.error(line.text, "`map:` belongs in a homomorphism file").into());
    }
    let group = match (backend, &raw.group.line) {
        (BackendTag::GSet, Some(_)) => Some(Arc::new(build_group(&raw.group)?)),
        (BackendTag::GSet, None) => return Err(FormatError::semantic("`backend: gset` needs a `group:` section")),
        (_, Some(line)) => {
            return Err(FormatError::semantic(format!(
                "line {}: `group:` needs `backend: gset`",
                line.number
            )))
        }
        (_, None) => None,
    };
    let mut seen = HashMap::new();
    for o in &raw.objects {
        if seen.insert(o.name, o.line.number).is_some() {
            return Err(FormatError::semantic(format!("line {}: duplicate object `{}`", o.line.number, o.name)));
        }
    }
    let ra = &raw.automaton;
    let find = |key: &str| -> Result<&RawObject<'_>, FormatError> {
        let (line, name) = field(ra, key)?;
        raw.objects
            .iter()
            .find(|o| o.name == *name)
            .ok_or_else(|| FormatError::semantic(format!("line {}: unknown object `{name}`", line.number)))
    };
    let (alpha_raw, states_raw) = (find("alphabet")?, find("states")?);
    let machine = if backend == BackendTag::Nominal {
        Machine::Nominal(build_nominal(ra, alpha_raw, states_raw)?)
    } else {
        Machine::Finite(build_finite(ra, alpha_raw, states_raw, group.as_ref())?)
    };
    Ok(Model {
        backend,
        group,
        name: ra.name.to_string(),
        alphabet_name: alpha_raw.name.to_string(),
        states_name: states_raw.name.to_string(),
        machine,
    })
}

fn build_finite(
    ra: &RawAutomaton<'_>,
    alpha_raw: &RawObject<'_>,
    states_raw: &RawObject<'_>,
    group: Option<&Arc<FinGroup>>,
) -> Result<Automaton, FormatError> {
    let alphabet = build_finite_object(alpha_raw, group)?;
    let states = build_finite_object(states_raw, group)?;
    let lookup = |obj: &FinObject, what: &str, line: &Line<'_>, name: &str| {
        obj.index_of(name).ok_or_else(|| {
            FormatError::semantic(format!("line {}: unknown {what} `{name}`", line.number))
        })
    };
    let (iline, itext) = field(ra, "init")?;
    let init = lookup(&states, "state", iline, itext)?;
    let (fline, ftext) = field(ra, "final")?;
    let mut finals = vec![false; states.len()];
    for f in names(fline, ftext)? {
        finals[lookup(&states, "state", fline, f)?] = true;
    }
    let m = alphabet.len();
    let mut delta: Vec<Option<usize>> = vec![None; states.len() * m];
    for (line, q, s, t) in &ra.delta {
        let (qi, si, ti) = (
            lookup(&states, "state", line, q)?,
            lookup(&alphabet, "letter", line, s)?,
            lookup(&states, "state", line, t)?,
        );
        if delta[qi * m + si].replace(ti).is_some() {
            return Err(FormatError::semantic(format!(
                "line {}: second transition for ({q}, {s})",
                line.number
            )));
        }
    }
    let delta = delta
        .into_iter()
        .enumerate()
        .map(|(k, t)| {
            t.ok_or_else(|| {
                FormatError::semantic(format!(
                    "missing transition for state `{}` on letter `{}`",
                    states.name(k / m),
                    alphabet.name(k % m)
                ))
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Automaton::new(alphabet, states, init, finals, delta)?)
}

fn build_nominal(
    ra: &RawAutomaton<'_>,
    alpha_raw: &RawObject<'_>,
    states_raw: &RawObject<'_>,
) -> Result<NomAutomaton, FormatError> {
    let alphabet = build_nominal_object(alpha_raw)?;
    let states = build_nominal_object(states_raw)?;
    let orbit = |obj: &NomObject, line: &Line<'_>, name: &str| {
        obj.index_of(name)
            .ok_or_else(|| FormatError::semantic(format!("line {}: unknown orbit `{name}`", line.number)))
    };
    let (iline, itext) = field(ra, "init")?;
    let init = orbit(&states, iline, itext)?;
    let (fline, ftext) = field(ra, "final")?;
    let mut finals = vec![false; states.orbit_count()];
    for f in names(fline, ftext)? {
        finals[orbit(&states, fline, f)?] = true;
    }
    let mut rules = Vec::new();
    for (line, q, s, t) in &ra.delta {
        let (qn, qv) = pattern(line, q)?;
        let (sn, sv) = pattern(line, s)?;
        let (tn, tv) = pattern(line, t)?;
        let own = |v: Vec<&str>| v.into_iter().map(String::from).collect();
        rules.push(DeltaRule {
            state_orbit: orbit(&states, line, qn)?,
            state_vars: own(qv),
            letter_orbit: orbit(&alphabet, line, sn)?,
            letter_vars: own(sv),
            target_orbit: orbit(&states, line, tn)?,
            target_vars: own(tv),
        });
    }
    let rule_lines: Vec<usize> = ra.delta.iter().map(|d| d.0.number).collect();
    NomAutomaton::new(alphabet, states, init, finals, rules).map_err(|e| match e {
        NominalError::BadRule { rule, reason } => {
            FormatError::semantic(format!("line {}: {reason}", rule_lines[rule]))
        }
        NominalError::AmbiguousTransition { state, letter, rules } => FormatError::semantic(format!(
            "ambiguous transition for state `{state}` on letter `{letter}`: rules on lines {} overlap",
            rules
                .iter()
                .map(|&r| rule_lines[r].to_string())
                .collect::<Vec<_>>()
                .join(", ")
        )),
        other => other.into(),
    })
}

/// A group homomorphism file: a `group:` section (the source) and a `map:`
/// section sending each source element into `target`.
pub fn parse_hom(text: &str, target: &Arc<FinGroup>) -> Result<GroupHom, FormatError> {
    let raw = parse_raw(text)?;
    if raw.group.line.is_none() {
        return Err(FormatError::semantic("homomorphism file has no `group:` section"));
    }
    if let Some(o) = raw.objects.first() {
        return Err(o.line.error(o.line.text, "homomorphism files contain only `group:` and `map:`").into());
    }
    let source = Arc::new(build_group(&raw.group)?);
    let mut map = vec![None; source.order()];
    for (line, g, h) in &raw.map {
        let gi = source
            .index_of(g)
            .ok_or_else(|| FormatError::semantic(format!("line {}: unknown source element `{g}`", line.number)))?;
        let hi = target
            .index_of(h)
            .ok_or_else(|| FormatError::semantic(format!("line {}: unknown target element `{h}`", line.number)))?;
        if map[gi].replace(hi).is_some() {
            return Err(FormatError::semantic(format!("line {}: `{g}` mapped twice", line.number)));
        }
    }
    let map = map
        .into_iter()
        .enumerate()
        .map(|(g, h)| h.ok_or_else(|| FormatError::semantic(format!("no image for `{}`", source.name(g)))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GroupHom::new(source, target.clone(), map)?)
}

fn subgroup(g: &FinGroup, gens: impl Iterator<Item = usize>) -> Vec<usize> {
    let gens: Vec<usize> = gens.collect();
    let mut found = vec![g.identity()];
    let mut head = 0;
    while head < found.len() {
        for &b in &gens {
            let c = g.mul(found[head], b);
            if !found.contains(&c) {
                found.push(c);
            }
        }
        head += 1;
    }
    found
}

/// Group elements whose actions determine all others, picked greedily.
fn group_generators(g: &FinGroup) -> Vec<usize> {
    let mut gens = Vec::new();
    let mut span = vec![g.identity()];
    for a in 0..g.order() {
        if !span.contains(&a) {
            gens.push(a);
            span = subgroup(g, gens.iter().copied());
        }
    }
    gens
}

fn emit_group(out: &mut String, g: &FinGroup) {
    out.push_str("group:\n");
    let _ = writeln!(out, "  elements: {}", g.names().join(" "));
    out.push_str("  table:\n");
    for (a, row) in g.table().iter().enumerate() {
        let entries: Vec<&str> = row.iter().map(|&b| g.name(b)).collect();
        let _ = writeln!(out, "    {}: {}", g.name(a), entries.join(" "));
    }
}

fn emit_finite_object(out: &mut String, name: &str, x: &FinObject) {
    let _ = writeln!(out, "object {name}:");
    let _ = writeln!(out, "  elements: {}", x.names().join(" "));
    if let Symmetry::Group(g) = x.symmetry() {
        for gi in group_generators(g) {
            let p = &x.actions()[gi];
            let moved: Vec<String> = (0..x.len())
                .filter(|&i| p.apply(i) != i)
                .map(|i| format!("{}->{}", x.name(i), x.name(p.apply(i))))
                .collect();
            if moved.is_empty() {
                let _ = writeln!(out, "  action {}:", g.name(gi));
            } else {
                let _ = writeln!(out, "  action {}: {}", g.name(gi), moved.join(" "));
            }
        }
    }
}

fn emit_nominal_object(out: &mut String, name: &str, x: &NomObject) {
    let _ = writeln!(out, "object {name}:");
    for o in x.orbits() {
        if o.generators().is_empty() {
            let _ = writeln!(out, "  orbit {}: dim {}", o.name(), o.dim());
        } else {
            let _ = writeln!(out, "  orbit {}: dim {} stab: {}", o.name(), o.dim(), o.stabilizer_text());
        }
    }
}

fn line_with_list(out: &mut String, key: &str, items: &[&str]) {
    if items.is_empty() {
        let _ = writeln!(out, "  {key}:");
    } else {
        let _ = writeln!(out, "  {key}: {}", items.join(" "));
    }
}

/// Writes a model back in the description format.
pub fn emit(model: &Model) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "backend: {}", model.backend);
    match &model.machine {
        Machine::Finite(a) => {
            if let Symmetry::Group(g) = a.states().symmetry() {
                emit_group(&mut out, g);
            }
            emit_finite_object(&mut out, &model.alphabet_name, a.alphabet());
            if model.states_name != model.alphabet_name {
                emit_finite_object(&mut out, &model.states_name, a.states());
            }
            let _ = writeln!(out, "automaton {}:", model.name);
            let _ = writeln!(out, "  alphabet: {}", model.alphabet_name);
            let _ = writeln!(out, "  states: {}", model.states_name);
            let _ = writeln!(out, "  init: {}", a.states().name(a.init()));
            let finals: Vec<&str> = (0..a.state_count())
                .filter(|&q| a.is_final(q))
                .map(|q| a.states().name(q))
                .collect();
            line_with_list(&mut out, "final", &finals);
            out.push_str("  delta:\n");
            for q in 0..a.state_count() {
                for s in 0..a.alphabet().len() {
                    let _ = writeln!(
                        out,
                        "    {}, {} -> {}",
                        a.states().name(q),
                        a.alphabet().name(s),
                        a.states().name(a.step(q, s))
                    );
                }
            }
        }
        Machine::Nominal(a) => {
            emit_nominal_object(&mut out, &model.alphabet_name, a.alphabet());
            if model.states_name != model.alphabet_name {
                emit_nominal_object(&mut out, &model.states_name, a.states());
            }
            let _ = writeln!(out, "automaton {}:", model.name);
            let _ = writeln!(out, "  alphabet: {}", model.alphabet_name);
            let _ = writeln!(out, "  states: {}", model.states_name);
            let _ = writeln!(out, "  init: {}", a.states().orbit(a.init()).name());
            let finals: Vec<&str> = (0..a.states().orbit_count())
                .filter(|&o| a.finals()[o])
                .map(|o| a.states().orbit(o).name())
                .collect();
            line_with_list(&mut out, "final", &finals);
            out.push_str("  delta:\n");
            for k in 0..a.rules().len() {
                let _ = writeln!(out, "    {}", a.rule_text(k));
            }
        }
    }
    out
}

/// Parses a word given as command-line tokens.
///
/// Finite alphabets take letter names. Nominal alphabets take `Name(1,2)`,
/// bare `Name` for dimension 0, or bare atom numbers for the unique
/// one-dimensional letter orbit.
pub fn parse_finite_word(a: &Automaton, tokens: &[String]) -> Result<Vec<usize>, FormatError> {
    tokens
        .iter()
        .flat_map(|t| t.split_whitespace())
        .map(|t| {
            a.alphabet()
                .index_of(t)
                .ok_or_else(|| FormatError::semantic(format!("unknown letter `{t}`")))
        })
        .collect()
}

pub fn parse_nominal_word(
    a: &NomAutomaton,
    tokens: &[String],
) -> Result<Vec<nerode_core::nominal::NomElement>, FormatError> {
    let alphabet = a.alphabet();
    let joined = tokens.join(" ");
    let mut out = Vec::new();
    let mut rest = joined.trim();
    while !rest.is_empty() {
        let end = match rest.find(|c: char| c.is_whitespace() || c == '(') {
            Some(i) if rest[i..].starts_with('(') => rest[i..]
                .find(')')
                .map(|j| i + j + 1)
                .ok_or_else(|| FormatError::semantic(format!("missing `)` in `{rest}`")))?,
            Some(i) => i,
            None => rest.len(),
        };
        let token = &rest[..end];
        rest = rest[end..].trim_start();
        if let Ok(atom) = token.parse::<u32>() {
            let ones: Vec<usize> = (0..alphabet.orbit_count())
                .filter(|&o| alphabet.orbit(o).dim() == 1)
                .collect();
            if ones.len() != 1 {
                return Err(FormatError::semantic(format!(
                    "bare atom `{token}` needs exactly one one-dimensional letter orbit, found {}",
                    ones.len()
                )));
            }
            out.push(alphabet.element(ones[0], &[atom])?);
            continue;
        }
        let (name, atoms) = match token.split_once('(') {
            None => (token, Vec::new()),
            Some((n, inner)) => {
                let inner = inner.trim_end_matches(')');
                let atoms = inner
                    .split(',')
                    .map(|x| {
                        x.trim()
                            .parse::<u32>()
                            .map_err(|_| FormatError::semantic(format!("`{x}` is not an atom")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                (n, atoms)
            }
        };
        let orbit = alphabet
            .index_of(name)
            .ok_or_else(|| FormatError::semantic(format!("unknown letter orbit `{name}`")))?;
        out.push(alphabet.element(orbit, &atoms)?);
    }
    Ok(out)
}

/// Orbit partition of a finite carrier, keyed by least element; used to
/// group output deterministically.
pub fn orbit_map(x: &FinObject) -> BTreeMap<usize, Vec<usize>> {
    x.orbits().into_iter().map(|o| (o[0], o)).collect()
}
