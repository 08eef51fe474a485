//! Small automata used in examples, tests and benchmarks.

use crate::alphabet::Alphabet;
use crate::automaton::{DetOmegaAutomaton, NondetBuchiAutomaton};
use crate::determinize::determinize_nbw;
use crate::pattern::{forms::*, OmegaPattern, Regex};

fn ab() -> Alphabet {
    Alphabet::from_chars("ab")
}

/// Finitely many `a`: states `qb` (color 1, initial) and `qa` (color 2).
pub fn finitely_many_a() -> DetOmegaAutomaton {
    DetOmegaAutomaton::parity(ab(), 0, vec![vec![1, 0], vec![1, 0]], vec![1, 2], 1, 2).unwrap()
}

/// Finitely many `b`, i.e. `(a+b)*·a^ω`.
pub fn finitely_many_b() -> DetOmegaAutomaton {
    DetOmegaAutomaton::parity(ab(), 0, vec![vec![0, 1], vec![0, 1]], vec![1, 2], 1, 2).unwrap()
}

pub fn accept_all(sigma: Alphabet) -> DetOmegaAutomaton {
    DetOmegaAutomaton::trivial(sigma, true)
}

pub fn reject_all(sigma: Alphabet) -> DetOmegaAutomaton {
    DetOmegaAutomaton::trivial(sigma, false)
}

fn det(nbw: &NondetBuchiAutomaton) -> DetOmegaAutomaton {
    determinize_nbw(nbw, 10_000).expect("fixture determinizes within the cap")
}

/// `($ + 0·{0,1,$}*·1)^ω` over `{0, 1, $}`, hand-built with eight states.
pub fn dollar_blocks() -> DetOmegaAutomaton {
    let s = Alphabet::new(&["0", "1", "$"]).unwrap();
    // 0 start, 1 after a $ block, 2 inside a block, 3 a block just opened,
    // 4 may close, 5 may close but the $ branch died, 6 closed by $, 7 dead.
    // Opening a block confirms the previous one and outranks a dying $ branch.
    let delta = vec![
        vec![3, 7, 1],
        vec![3, 7, 1],
        vec![2, 4, 2],
        vec![2, 4, 2],
        vec![3, 4, 6],
        vec![3, 4, 6],
        vec![3, 5, 6],
        vec![7, 7, 7],
    ];
    DetOmegaAutomaton::parity(s, 0, delta, vec![0, 1, 0, 3, 0, 2, 1, 0], 0, 3).unwrap()
}

/// The same language through the pattern automaton and determinization.
pub fn dollar_blocks_determinized() -> DetOmegaAutomaton {
    let s = Alphabet::new(&["0", "1", "$"]).unwrap();
    let block = Regex::union(vec![
        w(&[2]),
        cat(vec![w(&[0]), any_of(&[&[0], &[1], &[2]]), w(&[1])]),
    ]);
    let p = OmegaPattern::new(Regex::eps(), block).unwrap();
    det(&p.to_nbw(&s).unwrap())
}

/// `(a⁺·b·c*·d)*·a^ω + (a·b·d)^ω` over `{a, b, c, d}`.
pub fn hierarchy_example() -> DetOmegaAutomaton {
    let s = Alphabet::from_chars("abcd");
    let (a, b, c, d) = (0, 1, 2, 3);
    let first = OmegaPattern::new(
        Regex::star(cat(vec![w(&[a]), star(&[a]), w(&[b]), star(&[c]), w(&[d])])),
        w(&[a]),
    )
    .unwrap();
    let second = OmegaPattern::new(Regex::eps(), w(&[a, b, d])).unwrap();
    let nbw = first.to_nbw(&s).unwrap().union(&second.to_nbw(&s).unwrap()).unwrap();
    det(&nbw)
}

/// `a*·b^ω + b*·a^ω`.
pub fn eventually_constant_once() -> DetOmegaAutomaton {
    let s = ab();
    let p1 = OmegaPattern::new(star(&[0]), w(&[1])).unwrap();
    let p2 = OmegaPattern::new(star(&[1]), w(&[0])).unwrap();
    det(&p1.to_nbw(&s).unwrap().union(&p2.to_nbw(&s).unwrap()).unwrap())
}
