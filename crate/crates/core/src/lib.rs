//! Deterministic automata, their minimization and their monoids over three
//! kinds of carriers: finite sets, finite sets with a group action, and
//! orbit-finite sets of atoms.

pub mod automaton;
pub mod backend;
pub mod finset;
pub mod gset;
pub mod monoid;
pub mod nominal;
pub mod perm;
pub mod random;

pub use automaton::{Automaton, AutomatonError, AutomatonMorphism, Minimization, Word};
pub use backend::{Backend, BackendError, BackendTag, Congruence, FinMorphism, FinObject, Symmetry};
