//! Annotation games for deterministic omega-automata families: decide
//! recognizability and separability, extract refuters and word certificates.

pub mod algebra;
pub mod alphabet;
pub mod automaton;
pub mod certificate;
pub mod determinize;
pub mod error;
pub mod fixtures;
pub mod formula;
pub mod game;
pub mod gamma;
pub mod graph;
pub mod hoa;
pub mod oracle;
pub mod pattern;
pub mod separation;
pub mod transducer;
pub mod zielonka_tree;

pub use alphabet::{Alphabet, LassoWord, Letter, Word};
pub use automaton::{Condition, DetOmegaAutomaton, NondetBuchiAutomaton, OmegaGraph, State};
pub use error::{Error, Result};
pub use formula::{Formula, MarkSet};
pub use game::{GameVerdict, Mode, Player};
pub use gamma::{make_gamma, GammaDescriptor, Shape};
pub use transducer::RefuterTransducer;
