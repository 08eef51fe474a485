//! Zielonka tree of an Emerson-Lei assertion and the parity automaton it
//! induces over mark-set letters.

use std::collections::{BTreeSet, HashSet, VecDeque};

use crate::formula::{Formula, MarkSet};

#[derive(Debug, Clone)]
struct Node {
    label: MarkSet,
    accepting: bool,
    children: Vec<usize>,
    parent: Option<usize>,
    depth: u32,
}

#[derive(Debug, Clone)]
pub struct ZielonkaTree {
    nodes: Vec<Node>,
    leaves: Vec<usize>,
    max_depth: u32,
}

impl ZielonkaTree {
    /// Tree over the marks of `universe`; marks outside it are ignored.
    pub fn new(formula: &Formula, universe: MarkSet) -> Self {
        let mut nodes = vec![Node {
            label: universe,
            accepting: formula.eval(universe),
            children: Vec::new(),
            parent: None,
            depth: 0,
        }];
        let mut i = 0;
        while i < nodes.len() {
            let (label, acc, depth) = (nodes[i].label, nodes[i].accepting, nodes[i].depth);
            for c in maximal_flips(formula, label, acc) {
                let id = nodes.len();
                nodes.push(Node {
                    label: c,
                    accepting: !acc,
                    children: Vec::new(),
                    parent: Some(i),
                    depth: depth + 1,
                });
                nodes[i].children.push(id);
            }
            i += 1;
        }
        let mut leaves = Vec::new();
        let mut stack = vec![0];
        while let Some(v) = stack.pop() {
            if nodes[v].children.is_empty() {
                leaves.push(v);
            }
            for &c in nodes[v].children.iter().rev() {
                stack.push(c);
            }
        }
        let max_depth = nodes.iter().map(|n| n.depth).max().unwrap_or(0);
        ZielonkaTree {
            nodes,
            leaves,
            max_depth,
        }
    }

    pub fn num_leaves(&self) -> usize {
        self.leaves.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn universe(&self) -> MarkSet {
        self.nodes[0].label
    }

    /// Largest priority `step` can emit.
    pub fn max_priority(&self) -> u32 {
        2 * self.max_depth + 1
    }

    fn leftmost_leaf(&self, mut v: usize) -> usize {
        while let Some(&c) = self.nodes[v].children.first() {
            v = c;
        }
        self.leaves.iter().position(|&l| l == v).unwrap()
    }

    pub fn initial_leaf(&self) -> usize {
        self.leftmost_leaf(0)
    }

    /// Reads a mark set from branch `leaf`; returns the next branch and a
    /// priority that is even exactly for accepting nodes, larger for
    /// shallower nodes.
    pub fn step(&self, leaf: usize, marks: MarkSet) -> (usize, u32) {
        let marks = marks & self.universe();
        let mut path = vec![self.leaves[leaf]];
        while let Some(p) = self.nodes[*path.last().unwrap()].parent {
            path.push(p);
        }
        // path runs leaf -> root; find the deepest node containing the letter
        let k = path
            .iter()
            .position(|&v| marks & !self.nodes[v].label == 0)
            .expect("root label contains every mark");
        let n = path[k];
        let node = &self.nodes[n];
        let prio = 2 * (self.max_depth - node.depth) + if node.accepting { 0 } else { 1 };
        if k == 0 {
            return (leaf, prio);
        }
        let child = path[k - 1];
        let pos = node.children.iter().position(|&c| c == child).unwrap();
        let next = node.children[(pos + 1) % node.children.len()];
        (self.leftmost_leaf(next), prio)
    }
}

/// Maximal subsets of `set` on which the assertion flips its value.
fn maximal_flips(formula: &Formula, set: MarkSet, value: bool) -> Vec<MarkSet> {
    let mut found: BTreeSet<MarkSet> = BTreeSet::new();
    let mut seen: HashSet<MarkSet> = HashSet::new();
    let mut queue = VecDeque::from([set]);
    seen.insert(set);
    while let Some(s) = queue.pop_front() {
        let mut bits = s;
        while bits != 0 {
            let b = bits & bits.wrapping_neg();
            bits ^= b;
            let t = s & !b;
            if !seen.insert(t) {
                continue;
            }
            if formula.eval(t) != value {
                found.insert(t);
            } else if t != 0 {
                queue.push_back(t);
            }
        }
    }
    let all: Vec<MarkSet> = found.into_iter().collect();
    let mut out: Vec<MarkSet> = all
        .iter()
        .copied()
        .filter(|&a| !all.iter().any(|&b| b != a && a & !b == 0))
        .collect();
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}
