//! Word patterns `R·S^ω` with `R`, `S` regular expressions over explicit
//! words, and their Büchi automata.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, Letter, Word};
use crate::automaton::NondetBuchiAutomaton;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regex {
    Word(Word),
    Concat(Vec<Regex>),
    Union(Vec<Regex>),
    Star(Box<Regex>),
}

impl Regex {
    pub fn word(w: &[Letter]) -> Regex {
        Regex::Word(w.to_vec())
    }

    pub fn eps() -> Regex {
        Regex::Word(Vec::new())
    }

    pub fn star(r: Regex) -> Regex {
        Regex::Star(Box::new(r))
    }

    pub fn concat(parts: Vec<Regex>) -> Regex {
        Regex::Concat(parts)
    }

    pub fn union(parts: Vec<Regex>) -> Regex {
        Regex::Union(parts)
    }

    /// Union of the given words.
    pub fn words(ws: &[&[Letter]]) -> Regex {
        Regex::Union(ws.iter().map(|w| Regex::word(w)).collect())
    }

    pub fn nullable(&self) -> bool {
        match self {
            Regex::Word(w) => w.is_empty(),
            Regex::Concat(v) => v.iter().all(|r| r.nullable()),
            Regex::Union(v) => v.iter().any(|r| r.nullable()),
            Regex::Star(_) => true,
        }
    }

    /// Concatenated length of all word literals.
    pub fn size(&self) -> usize {
        match self {
            Regex::Word(w) => w.len(),
            Regex::Concat(v) | Regex::Union(v) => v.iter().map(|r| r.size()).sum(),
            Regex::Star(r) => r.size(),
        }
    }

    pub fn render(&self, sigma: &Alphabet) -> String {
        self.render_prec(sigma, 0)
    }

    fn render_prec(&self, sigma: &Alphabet, ctx: u8) -> String {
        let (s, prec) = match self {
            Regex::Word(w) if w.is_empty() => ("ε".to_string(), 3),
            Regex::Word(w) => (sigma.format_word(w), if w.len() == 1 { 3 } else { 2 }),
            Regex::Concat(v) => (
                v.iter()
                    .map(|r| r.render_prec(sigma, 2))
                    .collect::<Vec<_>>()
                    .join("·"),
                2,
            ),
            Regex::Union(v) => (
                v.iter()
                    .map(|r| r.render_prec(sigma, 1))
                    .collect::<Vec<_>>()
                    .join("+"),
                1,
            ),
            Regex::Star(r) => (format!("{}*", r.render_prec(sigma, 3)), 3),
        };
        if prec < ctx {
            format!("({s})")
        } else {
            s
        }
    }

    /// Whether the finite word matches; plain backtracking, test-scale only.
    pub fn matches(&self, w: &[Letter]) -> bool {
        self.ends(w, 0).contains(&w.len())
    }

    /// All `j` such that `w[i..j]` matches.
    fn ends(&self, w: &[Letter], i: usize) -> BTreeSet<usize> {
        match self {
            Regex::Word(v) => {
                let mut out = BTreeSet::new();
                if w.len() >= i + v.len() && w[i..i + v.len()] == v[..] {
                    out.insert(i + v.len());
                }
                out
            }
            Regex::Concat(parts) => {
                let mut cur = BTreeSet::from([i]);
                for p in parts {
                    cur = cur.iter().flat_map(|&k| p.ends(w, k)).collect();
                }
                cur
            }
            Regex::Union(parts) => parts.iter().flat_map(|p| p.ends(w, i)).collect(),
            Regex::Star(r) => {
                let mut all = BTreeSet::from([i]);
                let mut frontier = vec![i];
                while let Some(k) = frontier.pop() {
                    for j in r.ends(w, k) {
                        if all.insert(j) {
                            frontier.push(j);
                        }
                    }
                }
                all
            }
        }
    }
}

/// `prefix · period^ω`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OmegaPattern {
    pub prefix: Regex,
    pub period: Regex,
}

/// Positions of a linearized expression.
#[derive(Default)]
struct Lin {
    letters: Vec<Letter>,
    follow: Vec<BTreeSet<usize>>,
}

struct Info {
    nullable: bool,
    first: BTreeSet<usize>,
    last: BTreeSet<usize>,
}

impl Lin {
    fn add(&mut self, r: &Regex) -> Info {
        match r {
            Regex::Word(w) => {
                if w.is_empty() {
                    return Info {
                        nullable: true,
                        first: BTreeSet::new(),
                        last: BTreeSet::new(),
                    };
                }
                let base = self.letters.len();
                for (k, &l) in w.iter().enumerate() {
                    self.letters.push(l);
                    self.follow.push(BTreeSet::new());
                    if k > 0 {
                        self.follow[base + k - 1].insert(base + k);
                    }
                }
                Info {
                    nullable: false,
                    first: BTreeSet::from([base]),
                    last: BTreeSet::from([base + w.len() - 1]),
                }
            }
            Regex::Concat(parts) => {
                let mut acc = Info {
                    nullable: true,
                    first: BTreeSet::new(),
                    last: BTreeSet::new(),
                };
                for p in parts {
                    let i = self.add(p);
                    for &x in &acc.last {
                        self.follow[x].extend(i.first.iter().copied());
                    }
                    if acc.nullable {
                        acc.first.extend(i.first.iter().copied());
                    }
                    if i.nullable {
                        acc.last.extend(i.last);
                    } else {
                        acc.last = i.last;
                    }
                    acc.nullable &= i.nullable;
                }
                acc
            }
            Regex::Union(parts) => {
                let mut acc = Info {
                    nullable: false,
                    first: BTreeSet::new(),
                    last: BTreeSet::new(),
                };
                for p in parts {
                    let i = self.add(p);
                    acc.nullable |= i.nullable;
                    acc.first.extend(i.first);
                    acc.last.extend(i.last);
                }
                acc
            }
            Regex::Star(r) => {
                let i = self.add(r);
                for &x in &i.last {
                    self.follow[x].extend(i.first.iter().copied());
                }
                Info {
                    nullable: true,
                    ..i
                }
            }
        }
    }
}

impl OmegaPattern {
    pub fn new(prefix: Regex, period: Regex) -> Result<Self> {
        if period.nullable() {
            return Err(Error::EmptyBlock(
                "the repeated block must not accept the empty word".into(),
            ));
        }
        Ok(OmegaPattern { prefix, period })
    }

    /// `u·w^ω` for explicit words.
    pub fn lasso(u: &[Letter], w: &[Letter]) -> Result<Self> {
        Self::new(Regex::word(u), Regex::word(w))
    }

    pub fn render(&self, sigma: &Alphabet) -> String {
        let p = self.prefix.render_prec(sigma, 2);
        let s = self.period.render_prec(sigma, 3);
        if self.prefix == Regex::eps() {
            format!("{s}^ω")
        } else {
            format!("{p}·{s}^ω")
        }
    }

    /// Glushkov-style Büchi automaton. State 0 is initial, then prefix
    /// positions, period positions, and an accepting copy of each period
    /// position that starts a new iteration.
    pub fn to_nbw(&self, sigma: &Alphabet) -> Result<NondetBuchiAutomaton> {
        let k = sigma.len();
        let mut lr = Lin::default();
        let ir = lr.add(&self.prefix);
        let mut ls = Lin::default();
        let is = ls.add(&self.period);
        if is.nullable {
            return Err(Error::EmptyBlock("repeated block is nullable".into()));
        }
        for &l in lr.letters.iter().chain(ls.letters.iter()) {
            if l >= k {
                return Err(Error::UnknownLetter(format!("letter index {l}")));
            }
        }
        let nr = lr.letters.len();
        let ns = ls.letters.len();
        let r_state = |p: usize| 1 + p;
        let s_state = |p: usize| 1 + nr + p;
        let w_state = |p: usize| 1 + nr + ns + p;
        let n = 1 + nr + 2 * ns;
        let mut delta = vec![vec![Vec::new(); k]; n];
        let mut accepting = vec![false; n];
        for p in 0..ns {
            accepting[w_state(p)] = true;
        }
        let wrap: Vec<(Letter, usize)> = is
            .first
            .iter()
            .map(|&p| (ls.letters[p], w_state(p)))
            .collect();
        for &p in &ir.first {
            delta[0][lr.letters[p]].push(r_state(p));
        }
        if ir.nullable {
            for &(l, t) in &wrap {
                delta[0][l].push(t);
            }
        }
        for p in 0..nr {
            for &q in &lr.follow[p] {
                delta[r_state(p)][lr.letters[q]].push(r_state(q));
            }
            if ir.last.contains(&p) {
                for &(l, t) in &wrap {
                    delta[r_state(p)][l].push(t);
                }
            }
        }
        for p in 0..ns {
            for src in [s_state(p), w_state(p)] {
                for &q in &ls.follow[p] {
                    delta[src][ls.letters[q]].push(s_state(q));
                }
                if is.last.contains(&p) {
                    for &(l, t) in &wrap {
                        delta[src][l].push(t);
                    }
                }
            }
        }
        NondetBuchiAutomaton::new(sigma.clone(), vec![0], delta, accepting)
    }
}

/// Building blocks for the certificate patterns.
pub mod forms {
    use super::*;

    pub fn w(x: &[Letter]) -> Regex {
        Regex::word(x)
    }

    /// `(v1+…+vm)*`
    pub fn any_of(vs: &[&[Letter]]) -> Regex {
        Regex::star(Regex::words(vs))
    }

    pub fn star(x: &[Letter]) -> Regex {
        Regex::star(Regex::word(x))
    }

    pub fn cat(parts: Vec<Regex>) -> Regex {
        Regex::concat(parts)
    }
}
