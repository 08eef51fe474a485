//! Small graph helpers over index-based adjacency.

use std::collections::VecDeque;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

/// Strongly connected components of the subgraph induced by `allowed`.
/// Components come out with sorted members, ordered by their least member.
pub fn sccs<I>(n: usize, allowed: &[bool], succ: impl Fn(usize) -> I) -> Vec<Vec<usize>>
where
    I: IntoIterator<Item = usize>,
{
    let mut g: DiGraph<usize, ()> = DiGraph::new();
    let mut idx = vec![NodeIndex::end(); n];
    for v in 0..n {
        if allowed[v] {
            idx[v] = g.add_node(v);
        }
    }
    for v in 0..n {
        if !allowed[v] {
            continue;
        }
        for w in succ(v) {
            if allowed[w] {
                g.update_edge(idx[v], idx[w], ());
            }
        }
    }
    let mut comps: Vec<Vec<usize>> = tarjan_scc(&g)
        .into_iter()
        .map(|c| {
            let mut c: Vec<usize> = c.into_iter().map(|i| g[i]).collect();
            c.sort_unstable();
            c
        })
        .collect();
    comps.sort_by_key(|c| c[0]);
    comps
}

/// Whether the component has at least one internal edge.
pub fn nontrivial<I>(comp: &[usize], succ: impl Fn(usize) -> I) -> bool
where
    I: IntoIterator<Item = usize>,
{
    comp.len() > 1 || succ(comp[0]).into_iter().any(|w| w == comp[0])
}

/// Nodes reachable from `start` inside `allowed`.
pub fn reachable<I>(n: usize, start: &[usize], allowed: &[bool], succ: impl Fn(usize) -> I) -> Vec<bool>
where
    I: IntoIterator<Item = usize>,
{
    let mut seen = vec![false; n];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for &s in start {
        if allowed[s] && !seen[s] {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        for w in succ(v) {
            if allowed[w] && !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

/// Shortest labelled path from any of `start` to a node satisfying `goal`,
/// staying inside `allowed`. Edges are explored in the order `succ` yields
/// them, so ties go to the smallest label. Returns the labels and the node
/// sequence (including both endpoints).
pub fn bfs_path<I>(
    n: usize,
    start: &[usize],
    allowed: &[bool],
    goal: impl Fn(usize) -> bool,
    succ: impl Fn(usize) -> I,
) -> Option<(Vec<usize>, Vec<usize>)>
where
    I: IntoIterator<Item = (usize, usize)>,
{
    let mut prev: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for &s in start {
        if allowed[s] && !seen[s] {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        if goal(v) {
            let mut labels = Vec::new();
            let mut nodes = vec![v];
            let mut cur = v;
            while let Some((p, l)) = prev[cur] {
                labels.push(l);
                nodes.push(p);
                cur = p;
            }
            labels.reverse();
            nodes.reverse();
            return Some((labels, nodes));
        }
        for (l, w) in succ(v) {
            if allowed[w] && !seen[w] {
                seen[w] = true;
                prev[w] = Some((v, l));
                queue.push_back(w);
            }
        }
    }
    None
}

/// Shortest non-empty cycle through `v` inside `allowed`.
pub fn cycle_through<I>(
    n: usize,
    v: usize,
    allowed: &[bool],
    succ: impl Fn(usize) -> I + Copy,
) -> Option<(Vec<usize>, Vec<usize>)>
where
    I: IntoIterator<Item = (usize, usize)>,
{
    let mut best: Option<(Vec<usize>, Vec<usize>)> = None;
    for (l, w) in succ(v) {
        if !allowed[w] {
            continue;
        }
        if let Some((mut labels, mut nodes)) = bfs_path(n, &[w], allowed, |u| u == v, succ) {
            labels.insert(0, l);
            nodes.insert(0, v);
            if best.as_ref().is_none_or(|b| labels.len() < b.0.len()) {
                best = Some((labels, nodes));
            }
        }
    }
    best
}
