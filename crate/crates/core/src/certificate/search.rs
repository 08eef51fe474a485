use std::collections::{HashMap, HashSet};

use serde::Serialize;

use super::{verify_certificate, CertMode, Certificate, Words};
use crate::algebra::{difference, graph_is_empty};
use crate::alphabet::{Alphabet, Letter, Word};
use crate::automaton::{DetOmegaAutomaton, OmegaGraph, State};
use crate::determinize::determinize_nbw;
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::game::Mode;
use crate::gamma::{GammaDescriptor, Shape};
use crate::pattern::{OmegaPattern, Regex};

/// Largest number of triples the brute-force search will look at.
pub const MAX_BRUTE_FORCE: u128 = 20_000_000;

fn run_from(a: &DetOmegaAutomaton, q: State, w: &[Letter]) -> State {
    w.iter().fold(q, |q, &l| a.succ(q, l))
}

/// States reached from `q` by any sequence of `x1`/`x2` blocks.
fn block_closure(a: &DetOmegaAutomaton, q: State, x1: &[Letter], x2: &[Letter]) -> Vec<State> {
    let mut seen = HashSet::from([q]);
    let mut stack = vec![q];
    while let Some(s) = stack.pop() {
        for b in [x1, x2] {
            let t = run_from(a, s, b);
            if seen.insert(t) {
                stack.push(t);
            }
        }
    }
    let mut v: Vec<State> = seen.into_iter().collect();
    v.sort_unstable();
    v
}

/// Whether `a` accepts `x1^ω` when started in `q`.
fn accepts_period_from(a: &DetOmegaAutomaton, q: State, x1: &[Letter]) -> bool {
    let mut order = vec![q];
    let mut s = q;
    loop {
        s = run_from(a, s, x1);
        if let Some(i) = order.iter().position(|&t| t == s) {
            let mut inf = 0;
            for &b in &order[i..] {
                let mut t = b;
                for &l in x1 {
                    t = a.succ(t, l);
                    inf |= a.marks(t);
                }
            }
            return a.formula().eval(inf);
        }
        order.push(s);
    }
}

/// Whether `a`, started in `q`, accepts some word of `(x1*·x2)^ω`.
fn meets_recurrent(a: &DetOmegaAutomaton, q: State, x1: &[Letter], x2: &[Letter]) -> bool {
    let mut hubs = block_closure(a, q, x1, x2);
    hubs.retain(|&s| s != q);
    hubs.insert(0, q);
    let hub_id: HashMap<State, usize> = hubs.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let f = a.formula();
    let used = a.all_marks().iter().fold(f.marks(), |m, &x| m | x);
    let bit = 64 - used.leading_zeros();
    // hub nodes first, then the inner steps of each block from each hub
    let mut succ: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new()]; hubs.len()];
    let mut marks = vec![0u64; hubs.len()];
    for (h, &s) in hubs.iter().enumerate() {
        for (k, b) in [x1, x2].into_iter().enumerate() {
            let mut prev = h;
            let mut t = s;
            for (i, &l) in b.iter().enumerate() {
                t = a.succ(t, l);
                let node = succ.len();
                succ.push(vec![Vec::new()]);
                marks.push(a.marks(t) | if k == 1 && i == 0 { 1 << bit } else { 0 });
                succ[prev][0].push(node);
                prev = node;
            }
            succ[prev][0].push(hub_id[&t]);
        }
    }
    let g = OmegaGraph {
        alphabet: Alphabet::new(&["e"]).unwrap(),
        initial: vec![0],
        succ,
        marks,
        formula: Formula::and(vec![f, Formula::Inf(bit)]),
    };
    !graph_is_empty(&g).0
}

/// Exact test of a three-word candidate: `x·(x1+x2)*·x1^ω ⊆ inside` and
/// `x·(x1*·x2)^ω` disjoint from `avoid`.
pub(crate) fn quick_check(inside: &DetOmegaAutomaton, avoid: &DetOmegaAutomaton, x: &Word, x1: &Word, x2: &Word) -> bool {
    let q = run_from(inside, inside.initial(), x);
    block_closure(inside, q, x1, x2)
        .iter()
        .all(|&s| accepts_period_from(inside, s, x1))
        && !meets_recurrent(avoid, run_from(avoid, avoid.initial(), x), x1, x2)
}

pub(crate) fn words_of_length(k: usize, n: usize) -> Vec<Word> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..k).map(move |l| {
                    let mut w = w.clone();
                    w.push(l);
                    w
                })
            })
            .collect();
    }
    out
}

/// Smallest valid three-word certificate by total length, then by
/// `(x, x1, x2)` in lexicographic order.
pub fn shortest_certificate_bruteforce(
    l: &DetOmegaAutomaton,
    g: &GammaDescriptor,
    cap: usize,
) -> Result<Option<Certificate>> {
    let flip = match g.shape {
        Shape::ThreeWord => g.dual,
        Shape::ThreeWordDual => !g.dual,
        _ => return Err(Error::ShapeUnsupported(g.name.clone())),
    };
    let k = l.alphabet().len() as u128;
    let mut budget: u128 = 0;
    for n in 2..=cap as u128 {
        budget = budget.saturating_add(n * (n - 1) / 2 * k.saturating_pow(n as u32));
    }
    if budget > MAX_BRUTE_FORCE {
        return Err(Error::BoundsExceeded(format!(
            "length cap {cap} needs {budget} candidates, more than {MAX_BRUTE_FORCE}"
        )));
    }
    let comp = l.complement();
    let target = if flip { &comp } else { l };
    let k = l.alphabet().len();
    let mode = Mode::recognize(l.clone());
    for n in 2..=cap {
        let mut stratum: Vec<(Word, Word, Word)> = Vec::new();
        for lx in 0..=n - 2 {
            for l1 in 1..=n - lx - 1 {
                let l2 = n - lx - l1;
                for x in words_of_length(k, lx) {
                    for x1 in words_of_length(k, l1) {
                        for x2 in words_of_length(k, l2) {
                            stratum.push((x.clone(), x1.clone(), x2));
                        }
                    }
                }
            }
        }
        stratum.sort();
        for (x, x1, x2) in stratum {
            if !quick_check(target, target, &x, &x1, &x2) {
                continue;
            }
            let c = Certificate::new(g, CertMode::Recognize, l.alphabet().clone(), Words::ThreeWord { x, x1, x2 })?;
            if verify_certificate(&c, &mode)?.valid {
                return Ok(Some(c));
            }
        }
    }
    Ok(None)
}

/// One of the five suggested radius languages and the pair it leads to.
#[derive(Debug, Clone, Serialize)]
pub struct Candidate {
    pub name: String,
    pub pattern: String,
    #[serde(skip)]
    pub radius: Option<DetOmegaAutomaton>,
    #[serde(skip)]
    pub pair: Option<(DetOmegaAutomaton, DetOmegaAutomaton)>,
    pub error: Option<String>,
}

impl Candidate {
    pub fn available(&self) -> bool {
        self.pair.is_some()
    }
}

/// Radius candidates `C0`..`C4` for a three-word certificate and a pair.
pub fn radius_candidates(
    c: &Certificate,
    l1: &DetOmegaAutomaton,
    l2: &DetOmegaAutomaton,
    cap: usize,
) -> Result<Vec<Candidate>> {
    let Words::ThreeWord { x, x1, x2 } = &c.words else {
        return Err(Error::ShapeUnsupported(format!("radius candidates need three words, got {}", c.shape)));
    };
    if c.shape != Shape::ThreeWord {
        return Err(Error::ShapeUnsupported(c.shape.to_string()));
    }
    let w = |v: &Word| Regex::word(v);
    let both = || Regex::union(vec![w(x1), w(x2)]);
    let pats = [
        OmegaPattern::new(w(x), both())?,
        OmegaPattern::new(Regex::concat(vec![w(x), Regex::star(both())]), w(x1))?,
        OmegaPattern::new(w(x), Regex::concat(vec![Regex::star(w(x2)), w(x1)]))?,
        OmegaPattern::new(w(x), Regex::concat(vec![Regex::star(w(x1)), w(x2)]))?,
        OmegaPattern::new(Regex::concat(vec![w(x), Regex::star(both())]), w(x2))?,
    ];
    let sigma = l1.alphabet();
    let mut out = Vec::new();
    for (i, p) in pats.iter().enumerate() {
        let built = p
            .to_nbw(sigma)
            .and_then(|n| determinize_nbw(&n, cap))
            .and_then(|r| {
                let pair = match i {
                    0 => (crate::algebra::reduce(&difference(l1, &r)?), crate::algebra::reduce(&difference(l2, &r)?)),
                    1 => (crate::algebra::reduce(&difference(l1, &r)?), l2.clone()),
                    _ => (l1.clone(), crate::algebra::reduce(&difference(l2, &r)?)),
                };
                Ok((r, pair))
            });
        let (radius, pair, error) = match built {
            Ok((r, pair)) => (Some(r), Some(pair), None),
            Err(e) => (None, None, Some(e.to_string())),
        };
        out.push(Candidate {
            name: format!("C{i}"),
            pattern: p.render(sigma),
            radius,
            pair,
            error,
        });
    }
    Ok(out)
}
