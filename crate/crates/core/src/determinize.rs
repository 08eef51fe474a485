//! Büchi to parity determinization with compact Safra trees.

use std::collections::{BTreeSet, HashMap};

use crate::algebra::normalize_colors;
use crate::automaton::{DetOmegaAutomaton, NondetBuchiAutomaton, State};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Node {
    name: u32,
    label: BTreeSet<State>,
    children: Vec<Node>,
}

impl Node {
    fn max_name(&self) -> u32 {
        self.children
            .iter()
            .map(|c| c.max_name())
            .max()
            .unwrap_or(0)
            .max(self.name)
    }

    fn names(&self, out: &mut Vec<u32>) {
        out.push(self.name);
        for c in &self.children {
            c.names(out);
        }
    }

    fn spawn(&mut self, nbw: &NondetBuchiAutomaton, next: &mut u32) {
        for c in &mut self.children {
            c.spawn(nbw, next);
        }
        let f: BTreeSet<State> = self
            .label
            .iter()
            .copied()
            .filter(|&q| nbw.is_accepting(q))
            .collect();
        if !f.is_empty() {
            self.children.push(Node {
                name: *next,
                label: f,
                children: Vec::new(),
            });
            *next += 1;
        }
    }

    fn advance(&mut self, nbw: &NondetBuchiAutomaton, l: usize) {
        self.label = self
            .label
            .iter()
            .flat_map(|&q| nbw.succ(q, l).iter().copied())
            .collect();
        for c in &mut self.children {
            c.advance(nbw, l);
        }
    }

    /// A state stays only in the oldest sibling that holds it.
    fn horizontal(&mut self, allowed: &BTreeSet<State>) {
        self.label = self.label.intersection(allowed).copied().collect();
        let mut claimed = BTreeSet::new();
        for c in &mut self.children {
            let free: BTreeSet<State> = self.label.difference(&claimed).copied().collect();
            c.horizontal(&free);
            claimed.extend(c.label.iter().copied());
        }
    }

    fn drop_empty(&mut self, removed: &mut Vec<u32>) {
        self.children.retain(|c| {
            if c.label.is_empty() {
                c.names(removed);
                false
            } else {
                true
            }
        });
        for c in &mut self.children {
            c.drop_empty(removed);
        }
    }

    fn vertical(&mut self, removed: &mut Vec<u32>, marked: &mut Vec<u32>) {
        if !self.children.is_empty() {
            let union: BTreeSet<State> = self
                .children
                .iter()
                .flat_map(|c| c.label.iter().copied())
                .collect();
            if union == self.label {
                for c in &self.children {
                    c.names(removed);
                }
                self.children.clear();
                marked.push(self.name);
                return;
            }
        }
        for c in &mut self.children {
            c.vertical(removed, marked);
        }
    }

    fn rename(&mut self, map: &HashMap<u32, u32>) {
        self.name = map[&self.name];
        for c in &mut self.children {
            c.rename(map);
        }
    }
}

/// One transition; `None` is the empty tree. The priority uses the
/// min-even convention, `neutral` when nothing happened.
fn step(tree: &Node, nbw: &NondetBuchiAutomaton, l: usize, neutral: u32) -> (Option<Node>, u32) {
    let mut t = tree.clone();
    let mut next = t.max_name() + 1;
    t.spawn(nbw, &mut next);
    t.advance(nbw, l);
    let all = t.label.clone();
    t.horizontal(&all);
    if t.label.is_empty() {
        return (None, neutral);
    }
    let mut removed = Vec::new();
    let mut marked = Vec::new();
    t.drop_empty(&mut removed);
    t.vertical(&mut removed, &mut marked);
    let r = removed.iter().copied().min();
    let m = marked.iter().copied().min();
    // removal of a name outranks its green mark
    let prio = match (m, r) {
        (Some(m), Some(r)) if m < r => 2 * m,
        (Some(m), None) => 2 * m,
        (_, Some(r)) => 2 * r - 1,
        (None, None) => neutral,
    };
    let mut names = Vec::new();
    t.names(&mut names);
    names.sort_unstable();
    let map: HashMap<u32, u32> = names
        .iter()
        .enumerate()
        .map(|(i, &n)| (n, i as u32 + 1))
        .collect();
    t.rename(&map);
    (Some(t), prio.min(neutral))
}

/// Language-equivalent parity automaton; fails once more than `cap`
/// states are discovered.
pub fn determinize_nbw(nbw: &NondetBuchiAutomaton, cap: usize) -> Result<DetOmegaAutomaton> {
    Ok(normalize_colors(&determinize_raw(nbw, cap)?.canonical()))
}

pub(crate) fn determinize_raw(nbw: &NondetBuchiAutomaton, cap: usize) -> Result<DetOmegaAutomaton> {
    if cap == 0 {
        return Err(Error::Invalid("state cap must be positive".into()));
    }
    let k = nbw.alphabet().len();
    let neutral = 2 * (2 * nbw.num_states() as u32 + 2) + 1;
    let root = (!nbw.initial().is_empty()).then(|| Node {
        name: 1,
        label: nbw.initial().iter().copied().collect(),
        children: Vec::new(),
    });
    type Key = (Option<Node>, u32);
    let mut id: HashMap<Key, usize> = HashMap::new();
    let mut order: Vec<Key> = vec![(root, neutral)];
    id.insert(order[0].clone(), 0);
    let mut delta: Vec<Vec<usize>> = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let tree = order[i].0.clone();
        let mut row = Vec::with_capacity(k);
        for l in 0..k {
            let key = match &tree {
                Some(t) => step(t, nbw, l, neutral),
                None => (None, neutral),
            };
            let j = match id.get(&key) {
                Some(&j) => j,
                None => {
                    if order.len() >= cap {
                        return Err(Error::CapExceeded(cap));
                    }
                    id.insert(key.clone(), order.len());
                    order.push(key);
                    order.len() - 1
                }
            };
            row.push(j);
        }
        delta.push(row);
        i += 1;
    }
    // min-even priorities to max-odd colors, then squeeze the range
    let raw: Vec<u32> = order.iter().map(|(_, p)| neutral - p).collect();
    let mut distinct: Vec<u32> = raw.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let mut squeeze = HashMap::new();
    let mut cur: Option<u32> = None;
    for &c in &distinct {
        let v = match cur {
            None => c % 2,
            Some(p) if p % 2 == c % 2 => p,
            Some(p) => p + 1,
        };
        squeeze.insert(c, v);
        cur = Some(v);
    }
    let colors: Vec<u32> = raw.iter().map(|c| squeeze[c]).collect();
    let high = colors.iter().copied().max().unwrap().max(1);
    if high >= 64 {
        return Err(Error::CapExceeded(cap));
    }
    let low = colors.iter().copied().min().unwrap().min(1);
    // the first color is read once, so the start may reuse any state with the same tree
    let start = (1..order.len())
        .find(|&j| order[j].0 == order[0].0)
        .unwrap_or(0);
    DetOmegaAutomaton::parity(nbw.alphabet().clone(), start, delta, colors, low, high)
}
