//! Benchmark fixtures.

use inexpress::fixtures::{dollar_blocks, finitely_many_a, finitely_many_b, hierarchy_example};
use inexpress::oracle::{enumerate_dpws, EnumerationSpec};
use inexpress::{make_gamma, DetOmegaAutomaton, GammaDescriptor, Mode};

/// Named decision problems, from the two-state example up to the hierarchy one.
pub fn games() -> Vec<(&'static str, Mode, GammaDescriptor)> {
    let dbw = make_gamma("dbw").unwrap();
    vec![
        ("fix1/dbw", Mode::recognize(finitely_many_a()), dbw.clone()),
        ("dollar-blocks/dbw", Mode::recognize(dollar_blocks()), dbw.clone()),
        ("hierarchy/dcw", Mode::recognize(hierarchy_example()), make_gamma("dcw").unwrap()),
        ("hierarchy/weak", Mode::recognize(hierarchy_example()), make_gamma("weak").unwrap()),
        ("fix1/parity:0..2", Mode::recognize(finitely_many_a()), make_gamma("parity:0..2").unwrap()),
        ("eventual-letters/sep-dbw", Mode::separate(finitely_many_a(), finitely_many_b()), dbw),
    ]
}

/// Every third reduced parity automaton with three states over two letters.
pub fn corpus_sample() -> Vec<DetOmegaAutomaton> {
    enumerate_dpws(EnumerationSpec::new(3, 2, 0, 2).unwrap()).unwrap().step_by(3).collect()
}
