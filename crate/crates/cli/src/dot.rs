//! Graphviz output. Node and edge order follows element indices, so output is
//! byte-stable for a given input.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nerode_core::monoid::LMonoid;
use nerode_core::nominal::NomAutomaton;
use nerode_core::Automaton;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn shape(init: bool, accepting: bool) -> &'static str {
    match (init, accepting) {
        (true, true) => "shape=diamond, peripheries=2",
        (true, false) => "shape=diamond",
        (false, true) => "shape=doublecircle",
        (false, false) => "shape=circle",
    }
}

/// States grouped into one cluster per orbit when the carrier has a symmetry.
pub fn automaton(name: &str, a: &Automaton) -> String {
    let states = a.states();
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", quote(name));
    out.push_str("  rankdir=LR;\n");
    let node = |out: &mut String, indent: &str, q: usize| {
        let _ = writeln!(
            out,
            "{indent}{} [{}];",
            quote(states.name(q)),
            shape(q == a.init(), a.is_final(q))
        );
    };
    if states.symmetry().is_trivial() {
        for q in 0..states.len() {
            node(&mut out, "  ", q);
        }
    } else {
        for (k, orbit) in states.orbits().iter().enumerate() {
            let _ = writeln!(out, "  subgraph cluster_{k} {{");
            let _ = writeln!(out, "    label={};", quote(&format!("orbit {k}")));
            for &q in orbit {
                node(&mut out, "    ", q);
            }
            out.push_str("  }\n");
        }
    }
    for q in 0..states.len() {
        let mut edges: BTreeMap<usize, Vec<&str>> = BTreeMap::new();
        for s in 0..a.alphabet().len() {
            edges.entry(a.step(q, s)).or_default().push(a.alphabet().name(s));
        }
        for (t, letters) in edges {
            let _ = writeln!(
                out,
                "  {} -> {} [label={}];",
                quote(states.name(q)),
                quote(states.name(t)),
                quote(&letters.join(", "))
            );
        }
    }
    out.push_str("}\n");
    out
}

/// One node per state orbit and one edge per delta rule.
pub fn nominal_automaton(name: &str, a: &NomAutomaton) -> String {
    let states = a.states();
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", quote(name));
    out.push_str("  rankdir=LR;\n");
    for (k, o) in states.orbits().iter().enumerate() {
        let label = if o.dim() == 0 {
            o.name().to_string()
        } else {
            format!("{} (dim {})", o.name(), o.dim())
        };
        let _ = writeln!(
            out,
            "  {} [label={}, {}];",
            quote(o.name()),
            quote(&label),
            shape(k == a.init(), a.finals()[k])
        );
    }
    for (k, r) in a.rules().iter().enumerate() {
        let text = a.rule_text(k);
        // `Q(x), A(y) -> R(x)`: the edge label is the part up to the arrow
        let guard = text.split(" -> ").next().unwrap_or(&text);
        let _ = writeln!(
            out,
            "  {} -> {} [label={}];",
            quote(states.orbit(r.state_orbit).name()),
            quote(states.orbit(r.target_orbit).name()),
            quote(guard)
        );
    }
    out.push_str("}\n");
    out
}

/// Right Cayley graph of a monoid: `x -> x·s` for each letter `s`.
pub fn cayley(name: &str, lm: &LMonoid) -> String {
    let m = lm.monoid();
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", quote(name));
    let unit = m.unit();
    for x in 0..m.len() {
        let style = if x == unit { "shape=diamond" } else if lm.chi()[x] { "shape=doublecircle" } else { "shape=circle" };
        let _ = writeln!(out, "  {} [{style}];", quote(&lm.label(x)));
    }
    for x in 0..m.len() {
        let mut edges: BTreeMap<usize, Vec<&str>> = BTreeMap::new();
        for (s, &g) in lm.phi().iter().enumerate() {
            edges.entry(m.mul(x, g)).or_default().push(lm.alphabet().name(s));
        }
        for (t, letters) in edges {
            let _ = writeln!(
                out,
                "  {} -> {} [label={}];",
                quote(&lm.label(x)),
                quote(&lm.label(t)),
                quote(&letters.join(", "))
            );
        }
    }
    out.push_str("}\n");
    out
}
