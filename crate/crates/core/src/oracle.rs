//! Independent checks used for cross-validation: Landweber's structural
//! criterion for DBW and exhaustive enumeration of small parity automata.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::algebra::to_parity;
use crate::alphabet::Alphabet;
use crate::automaton::DetOmegaAutomaton;
use crate::error::{Error, Result};
use crate::graph::sccs;

/// Sizes of the automata to enumerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationSpec {
    pub states: usize,
    pub letters: usize,
    pub low: u32,
    pub high: u32,
}

impl EnumerationSpec {
    pub fn new(states: usize, letters: usize, low: u32, high: u32) -> Result<Self> {
        let s = EnumerationSpec {
            states,
            letters,
            low,
            high,
        };
        s.check()?;
        Ok(s)
    }

    fn check(&self) -> Result<()> {
        if self.states == 0 || self.states > 4 || self.letters == 0 || self.letters > 3 {
            return Err(Error::BoundsExceeded(format!(
                "{} states over {} letters; at most 4 states and 3 letters",
                self.states, self.letters
            )));
        }
        if self.high < self.low || self.high - self.low > 3 {
            return Err(Error::BoundsExceeded(format!("color range {}..{}", self.low, self.high)));
        }
        Ok(())
    }

    /// Number of (table, coloring) combinations before trimming.
    pub fn raw_count(&self) -> u64 {
        let n = self.states as u64;
        let colors = (self.high - self.low + 1) as u64;
        n.pow((self.states * self.letters) as u32) * colors.pow(self.states as u32)
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet::from_chars(&"abc"[..self.letters])
    }

    /// The automaton with mixed-radix index `i`: colors vary fastest, then
    /// transitions in row order.
    pub fn nth(&self, mut i: u64) -> DetOmegaAutomaton {
        let n = self.states;
        let nc = (self.high - self.low + 1) as u64;
        let mut colors = Vec::with_capacity(n);
        for _ in 0..n {
            colors.push(self.low + (i % nc) as u32);
            i /= nc;
        }
        let mut delta = vec![vec![0; self.letters]; n];
        for row in delta.iter_mut() {
            for t in row.iter_mut() {
                *t = (i % n as u64) as usize;
                i /= n as u64;
            }
        }
        DetOmegaAutomaton::parity(self.alphabet(), 0, delta, colors, self.low, self.high).expect("enumerated automaton")
    }
}

/// Every automaton the enumeration describes, in index order.
pub fn enumerate_raw(spec: EnumerationSpec) -> Result<impl Iterator<Item = DetOmegaAutomaton>> {
    spec.check()?;
    Ok((0..spec.raw_count()).map(move |i| spec.nth(i)))
}

/// Reachable parts of the enumerated automata, each listed once up to renumbering.
pub fn enumerate_dpws(spec: EnumerationSpec) -> Result<impl Iterator<Item = DetOmegaAutomaton>> {
    let mut seen = HashSet::new();
    Ok(enumerate_raw(spec)?.filter_map(move |a| {
        let c = a.canonical();
        seen.insert(c.clone()).then_some(c)
    }))
}

fn parity_form(a: &DetOmegaAutomaton) -> DetOmegaAutomaton {
    if a.is_parity() {
        a.canonical()
    } else {
        to_parity(a).canonical()
    }
}

/// Nontrivial components of the states in `within` (and allowed by `keep`).
fn components(a: &DetOmegaAutomaton, within: &[bool]) -> Vec<Vec<usize>> {
    let n = a.num_states();
    let succ = |q: usize| a.delta()[q].clone();
    sccs(n, within, succ)
        .into_iter()
        .filter(|c| c.len() > 1 || a.delta()[c[0]].contains(&c[0]))
        .collect()
}

/// True iff no accepting strongly connected set lies inside a rejecting one.
///
/// A rejecting set with top color `d` sits in a component of the states
/// colored at most `d` that contains `d`; an accepting one with top color
/// `c < d` inside it sits in a component of its states colored at most `c`.
pub fn landweber_check(a: &DetOmegaAutomaton) -> bool {
    let p = parity_form(a);
    let n = p.num_states();
    let color: Vec<u32> = (0..n).map(|q| p.color(q).unwrap()).collect();
    let top = color.iter().copied().max().unwrap_or(0);
    for d in (0..=top).filter(|d| d % 2 == 0) {
        let below: Vec<bool> = color.iter().map(|&c| c <= d).collect();
        for s in components(&p, &below) {
            if !s.iter().any(|&q| color[q] == d) {
                continue;
            }
            for c in (1..d).filter(|c| c % 2 == 1) {
                let mut inner = vec![false; n];
                for &q in &s {
                    inner[q] = color[q] <= c;
                }
                if components(&p, &inner).iter().any(|k| k.iter().any(|&q| color[q] == c)) {
                    return false;
                }
            }
        }
    }
    true
}

/// The same criterion by listing every strongly connected set; up to 10 states.
pub fn landweber_exhaustive(a: &DetOmegaAutomaton) -> Result<bool> {
    let p = parity_form(a);
    let n = p.num_states();
    if n > 10 {
        return Err(Error::BoundsExceeded(format!("{n} states, exhaustive search stops at 10")));
    }
    let connected = |mask: u32| -> bool {
        let within: Vec<bool> = (0..n).map(|q| mask >> q & 1 == 1).collect();
        let comps = components(&p, &within);
        comps.len() == 1 && comps[0].len() == mask.count_ones() as usize
    };
    let accepting = |mask: u32| -> bool {
        let top = (0..n).filter(|q| mask >> q & 1 == 1).map(|q| p.color(q).unwrap()).max().unwrap();
        top % 2 == 1
    };
    let sets: Vec<(u32, bool)> = (1u32..1 << n).filter(|&m| connected(m)).map(|m| (m, accepting(m))).collect();
    for &(inner, acc) in &sets {
        if !acc {
            continue;
        }
        if sets.iter().any(|&(outer, acc2)| !acc2 && outer & inner == inner) {
            return Ok(false);
        }
    }
    Ok(true)
}
