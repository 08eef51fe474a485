//! Products, complement, emptiness, inclusion and condition conversions.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::alphabet::{LassoWord, Letter};
use crate::automaton::{Condition, DetOmegaAutomaton, NondetBuchiAutomaton, OmegaGraph, State};
use crate::error::{Error, Result};
use crate::formula::{Formula, MarkSet};
use crate::graph::{bfs_path, cycle_through, nontrivial, reachable, sccs};
use crate::zielonka_tree::ZielonkaTree;

/// Anything that can stand on the left of an inclusion check.
pub trait AsGraph {
    fn as_graph(&self) -> OmegaGraph;
}

impl AsGraph for DetOmegaAutomaton {
    fn as_graph(&self) -> OmegaGraph {
        self.to_graph()
    }
}

impl AsGraph for NondetBuchiAutomaton {
    fn as_graph(&self) -> OmegaGraph {
        self.to_graph()
    }
}

impl AsGraph for OmegaGraph {
    fn as_graph(&self) -> OmegaGraph {
        self.clone()
    }
}

fn merged_names(a: &[String], b: &[String]) -> Vec<String> {
    let clash = a.iter().any(|n| b.contains(n));
    if !clash {
        return a.iter().chain(b.iter()).cloned().collect();
    }
    a.iter()
        .map(|n| format!("l{n}"))
        .chain(b.iter().map(|n| format!("r{n}")))
        .collect()
}

/// Synchronous product over the shared alphabet, reachable part in BFS order.
/// The marks of `b` are shifted past those of `a`; `combine` receives the two
/// acceptance assertions (the second already shifted).
pub fn product(
    a: &DetOmegaAutomaton,
    b: &DetOmegaAutomaton,
    combine: impl Fn(Formula, Formula) -> Formula,
) -> Result<DetOmegaAutomaton> {
    if a.alphabet() != b.alphabet() {
        return Err(Error::AlphabetMismatch(format!(
            "{} vs {}",
            a.alphabet(),
            b.alphabet()
        )));
    }
    let off = a.mark_names().len() as u32;
    if off as usize + b.mark_names().len() > 64 {
        return Err(Error::Invalid("product needs more than 64 marks".into()));
    }
    let k = a.alphabet().len();
    let mut id: HashMap<(State, State), usize> = HashMap::new();
    let mut order = vec![(a.initial(), b.initial())];
    id.insert(order[0], 0);
    let mut delta = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let (p, q) = order[i];
        let mut row = Vec::with_capacity(k);
        for l in 0..k {
            let t = (a.succ(p, l), b.succ(q, l));
            let next = order.len();
            let j = *id.entry(t).or_insert_with(|| {
                order.push(t);
                next
            });
            row.push(j);
        }
        delta.push(row);
        i += 1;
    }
    let marks = order
        .iter()
        .map(|&(p, q)| a.marks(p) | (b.marks(q) << off))
        .collect();
    let names = merged_names(a.mark_names(), b.mark_names());
    let f = combine(a.formula(), b.formula().shift(off));
    DetOmegaAutomaton::new(
        a.alphabet().clone(),
        0,
        delta,
        marks,
        names,
        Condition::EmersonLei(f),
    )
}

pub fn intersection(a: &DetOmegaAutomaton, b: &DetOmegaAutomaton) -> Result<DetOmegaAutomaton> {
    product(a, b, |x, y| Formula::and(vec![x, y]))
}

pub fn union(a: &DetOmegaAutomaton, b: &DetOmegaAutomaton) -> Result<DetOmegaAutomaton> {
    product(a, b, |x, y| Formula::or(vec![x, y]))
}

/// `L(a) \ L(b)`.
pub fn difference(a: &DetOmegaAutomaton, b: &DetOmegaAutomaton) -> Result<DetOmegaAutomaton> {
    product(a, b, |x, y| Formula::and(vec![x, y.negate()]))
}

pub fn complement(a: &DetOmegaAutomaton) -> DetOmegaAutomaton {
    a.complement()
}

/// Product of two nondeterministic graphs, conjunction of acceptance.
pub fn graph_product(a: &OmegaGraph, b: &OmegaGraph) -> Result<OmegaGraph> {
    if a.alphabet != b.alphabet {
        return Err(Error::AlphabetMismatch("inclusion operands".into()));
    }
    let off = a.mark_width();
    if off + b.mark_width() > 64 {
        return Err(Error::Invalid("product needs more than 64 marks".into()));
    }
    let k = a.alphabet.len();
    let mut id: HashMap<(State, State), usize> = HashMap::new();
    let mut order = Vec::new();
    let mut initial = Vec::new();
    for &p in &a.initial {
        for &q in &b.initial {
            id.insert((p, q), order.len());
            initial.push(order.len());
            order.push((p, q));
        }
    }
    let mut succ = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let (p, q) = order[i];
        let mut row = vec![Vec::new(); k];
        for (l, cell) in row.iter_mut().enumerate() {
            for &p2 in &a.succ[p][l] {
                for &q2 in &b.succ[q][l] {
                    let next = order.len();
                    let j = *id.entry((p2, q2)).or_insert_with(|| {
                        order.push((p2, q2));
                        next
                    });
                    cell.push(j);
                }
            }
        }
        succ.push(row);
        i += 1;
    }
    Ok(OmegaGraph {
        alphabet: a.alphabet.clone(),
        initial,
        succ,
        marks: order
            .iter()
            .map(|&(p, q)| a.marks[p] | (b.marks[q] << off))
            .collect(),
        formula: Formula::and(vec![a.formula.clone(), b.formula.shift(off)]),
    })
}

/// Restricts a graph to runs over the single word `w`.
pub fn graph_times_lasso(g: &OmegaGraph, w: &LassoWord) -> OmegaGraph {
    let plen = w.prefix.len();
    let total = plen + w.period.len();
    let next = |i: usize| if i + 1 < total { i + 1 } else { plen };
    let k = g.alphabet.len();
    let mut id: HashMap<(State, usize), usize> = HashMap::new();
    let mut order = Vec::new();
    let mut initial = Vec::new();
    for &q in &g.initial {
        id.insert((q, 0), order.len());
        initial.push(order.len());
        order.push((q, 0));
    }
    let mut succ = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let (q, pos) = order[i];
        let l = w.at(pos);
        let mut row = vec![Vec::new(); k];
        for &q2 in &g.succ[q][l] {
            let t = (q2, next(pos));
            let fresh = order.len();
            let j = *id.entry(t).or_insert_with(|| {
                order.push(t);
                fresh
            });
            row[l].push(j);
        }
        succ.push(row);
        i += 1;
    }
    OmegaGraph {
        alphabet: g.alphabet.clone(),
        initial,
        marks: order.iter().map(|&(q, _)| g.marks[q]).collect(),
        succ,
        formula: g.formula.clone(),
    }
}

fn comp_marks(marks: &[MarkSet], comp: &[usize]) -> MarkSet {
    comp.iter().fold(0, |a, &v| a | marks[v])
}

/// Emerson-Lei emptiness: search for a reachable strongly connected set whose
/// marks satisfy the assertion. When a component fails, one of its `Fin`
/// marks must be avoided, so each is removed in turn.
fn el_accepting_scs(
    g: &OmegaGraph,
    allowed: &[bool],
    memo: &mut HashSet<Vec<usize>>,
) -> Option<Vec<usize>> {
    let n = g.num_states();
    let fin = g.formula.fin_marks();
    for comp in sccs(n, allowed, |v| g.targets(v)) {
        if !nontrivial(&comp, |v| g.targets(v)) || !memo.insert(comp.clone()) {
            continue;
        }
        let m = comp_marks(&g.marks, &comp);
        if g.formula.eval(m) {
            return Some(comp);
        }
        let mut bits = fin & m;
        while bits != 0 {
            let b = bits & bits.wrapping_neg();
            bits ^= b;
            let mut sub = vec![false; n];
            for &v in &comp {
                sub[v] = g.marks[v] & b == 0;
            }
            if let Some(c) = el_accepting_scs(g, &sub, memo) {
                return Some(c);
            }
        }
    }
    None
}

/// Lasso through every state of the strongly connected set `comp`.
fn witness(g: &OmegaGraph, comp: &[usize]) -> LassoWord {
    let n = g.num_states();
    let all = vec![true; n];
    let v = comp[0];
    let (prefix, _) = bfs_path(n, &g.initial, &all, |u| u == v, |u| g.labelled(u).collect::<Vec<_>>())
        .expect("component is reachable");
    let mut inside = vec![false; n];
    for &u in comp {
        inside[u] = true;
    }
    let edges = |u: usize| -> Vec<(Letter, State)> { g.labelled(u).collect() };
    let mut period = Vec::new();
    if comp.len() == 1 {
        let (labels, _) = cycle_through(n, v, &inside, edges).expect("nontrivial component");
        period = labels;
    } else {
        let mut cur = v;
        for &u in comp[1..].iter().chain(std::iter::once(&v)) {
            let (labels, _) = bfs_path(n, &[cur], &inside, |x| x == u, edges).unwrap();
            period.extend(labels);
            cur = u;
        }
    }
    LassoWord::new(prefix, period).expect("non-empty cycle")
}

/// Emptiness of a nondeterministic graph; the witness is an accepted lasso.
pub fn graph_is_empty(g: &OmegaGraph) -> (bool, Option<LassoWord>) {
    let n = g.num_states();
    let reach = reachable(n, &g.initial, &vec![true; n], |v| g.targets(v));
    let mut memo = HashSet::new();
    match el_accepting_scs(g, &reach, &mut memo) {
        Some(c) => (false, Some(witness(g, &c))),
        None => (true, None),
    }
}

/// Parity emptiness by recursive decomposition on the top color of each
/// component: odd top colors accept, even ones are deleted.
fn parity_accepting_scs(a: &DetOmegaAutomaton, allowed: &[bool]) -> Option<Vec<usize>> {
    let n = a.num_states();
    let succ = |v: usize| a.delta()[v].clone();
    for comp in sccs(n, allowed, succ) {
        if !nontrivial(&comp, succ) {
            continue;
        }
        let top = comp.iter().map(|&v| a.color(v).unwrap()).max().unwrap();
        if top % 2 == 1 {
            return Some(comp);
        }
        let mut sub = vec![false; n];
        for &v in &comp {
            sub[v] = a.color(v).unwrap() != top;
        }
        if let Some(c) = parity_accepting_scs(a, &sub) {
            return Some(c);
        }
    }
    None
}

/// True iff the language is empty; otherwise an accepted lasso.
pub fn is_empty(a: &DetOmegaAutomaton) -> (bool, Option<LassoWord>) {
    if !a.is_parity() {
        return graph_is_empty(&a.to_graph());
    }
    let n = a.num_states();
    let reach = reachable(n, &[a.initial()], &vec![true; n], |v| a.delta()[v].clone());
    match parity_accepting_scs(a, &reach) {
        Some(c) => (false, Some(witness(&a.to_graph(), &c))),
        None => (true, None),
    }
}

/// `L(a) ⊆ L(b)`, with a counterexample in `L(a) \ L(b)` otherwise.
pub fn is_subset(a: &impl AsGraph, b: &DetOmegaAutomaton) -> Result<(bool, Option<LassoWord>)> {
    let p = graph_product(&a.as_graph(), &b.complement().to_graph())?;
    Ok(graph_is_empty(&p))
}

/// `L(a) ∩ L(b) = ∅`, with a common word otherwise.
pub fn is_disjoint(a: &impl AsGraph, b: &DetOmegaAutomaton) -> Result<(bool, Option<LassoWord>)> {
    let p = graph_product(&a.as_graph(), &b.to_graph())?;
    Ok(graph_is_empty(&p))
}

pub fn equivalent(a: &DetOmegaAutomaton, b: &DetOmegaAutomaton) -> Result<bool> {
    Ok(is_subset(a, b)?.0 && is_subset(b, a)?.0)
}

/// Parity automaton for the same language: Emerson-Lei conditions go through
/// the Zielonka tree of the assertion, then colors are compressed.
pub fn to_parity(a: &DetOmegaAutomaton) -> DetOmegaAutomaton {
    if a.is_parity() {
        return normalize_colors(a);
    }
    let f = a.formula();
    let used = a.all_marks().iter().fold(0, |x, y| x | y);
    let tree = ZielonkaTree::new(&f, used & f.marks());
    let k = a.alphabet().len();
    let mut id: HashMap<(State, usize), usize> = HashMap::new();
    let start = (a.initial(), tree.initial_leaf());
    let mut order = vec![start];
    id.insert(start, 0);
    let mut delta = Vec::new();
    let mut colors = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let (q, leaf) = order[i];
        let (leaf2, prio) = tree.step(leaf, a.marks(q));
        colors.push(prio + 1);
        let mut row = Vec::with_capacity(k);
        for l in 0..k {
            let t = (a.succ(q, l), leaf2);
            let next = order.len();
            let j = *id.entry(t).or_insert_with(|| {
                order.push(t);
                next
            });
            row.push(j);
        }
        delta.push(row);
        i += 1;
    }
    let high = tree.max_priority() + 1;
    let p = DetOmegaAutomaton::parity(a.alphabet().clone(), 0, delta, colors, 1, high.max(1))
        .expect("zielonka colors in range");
    normalize_colors(&p)
}

/// Parity automaton of the reachable part with states of equal color and
/// equivalent successors merged, then recolored.
pub fn reduce(a: &DetOmegaAutomaton) -> DetOmegaAutomaton {
    let p = to_parity(&a.canonical());
    let n = p.num_states();
    let mut class: Vec<usize> = (0..n).map(|q| p.color(q).unwrap() as usize).collect();
    let mut count = usize::MAX;
    loop {
        let mut ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let next: Vec<usize> = (0..n)
            .map(|q| {
                let key = (class[q], p.delta()[q].iter().map(|&t| class[t]).collect());
                let fresh = ids.len();
                *ids.entry(key).or_insert(fresh)
            })
            .collect();
        class = next;
        if ids.len() == count {
            break;
        }
        count = ids.len();
    }
    let mut rep = vec![usize::MAX; count];
    for q in (0..n).rev() {
        rep[class[q]] = q;
    }
    let delta = rep
        .iter()
        .map(|&q| p.delta()[q].iter().map(|&t| class[t]).collect())
        .collect();
    let colors = rep.iter().map(|&q| p.color(q).unwrap()).collect();
    let (low, high) = p.parity_range().unwrap();
    let q = DetOmegaAutomaton::parity(p.alphabet().clone(), class[p.initial()], delta, colors, low, high)
        .expect("quotient keeps colors");
    normalize_colors(&q.canonical())
}

/// Recolors a parity automaton with as few colors as its cycle structure
/// permits, keeping the verdict on every strongly connected set.
pub fn normalize_colors(a: &DetOmegaAutomaton) -> DetOmegaAutomaton {
    let n = a.num_states();
    let mut new: Vec<Option<u32>> = vec![None; n];
    let all = vec![true; n];
    recolor(a, &all, &mut new);
    let used: Vec<u32> = new.iter().flatten().copied().collect();
    let min = used.iter().copied().min().unwrap_or(0);
    let base = min - min % 2;
    let mut colors: Vec<u32> = new.iter().map(|c| c.unwrap_or(min) - base).collect();
    let mut low = colors.iter().copied().min().unwrap();
    let high = colors.iter().copied().max().unwrap().max(1);
    if low > 1 {
        low = 1;
    }
    if high == 1 && low == 1 && colors.iter().all(|&c| c == 1) {
        low = 0;
    }
    for c in colors.iter_mut() {
        *c = (*c).max(low);
    }
    DetOmegaAutomaton::parity(a.alphabet().clone(), a.initial(), a.delta().to_vec(), colors, low, high)
        .expect("recolored automaton")
}

fn recolor(a: &DetOmegaAutomaton, allowed: &[bool], new: &mut Vec<Option<u32>>) {
    let n = a.num_states();
    let succ = |v: usize| a.delta()[v].clone();
    for comp in sccs(n, allowed, succ) {
        if !nontrivial(&comp, succ) {
            continue;
        }
        let top = comp.iter().map(|&v| a.color(v).unwrap()).max().unwrap();
        let mut sub = vec![false; n];
        for &v in &comp {
            sub[v] = a.color(v).unwrap() != top;
        }
        recolor(a, &sub, new);
        let below = comp
            .iter()
            .filter(|&&v| sub[v])
            .filter_map(|&v| new[v])
            .max();
        let c = match below {
            None => top % 2,
            Some(b) if b % 2 == top % 2 => b,
            Some(b) => b + 1,
        };
        for &v in &comp {
            if !sub[v] {
                new[v] = Some(c);
            }
        }
    }
}

/// Deterministic automaton for the marks-sets read along a lasso, used by
/// sampling tests: the run on `w` as a sequence of states.
pub fn lasso_run(a: &DetOmegaAutomaton, w: &LassoWord, steps: usize) -> Vec<State> {
    let mut q = a.initial();
    let mut out = vec![q];
    for i in 0..steps {
        q = a.succ(q, w.at(i));
        out.push(q);
    }
    out
}

/// BFS over a deterministic automaton collecting the shortest word to each state.
pub fn access_words(a: &DetOmegaAutomaton) -> Vec<Option<Vec<Letter>>> {
    let mut words = vec![None; a.num_states()];
    words[a.initial()] = Some(Vec::new());
    let mut queue = VecDeque::from([a.initial()]);
    while let Some(q) = queue.pop_front() {
        for l in 0..a.alphabet().len() {
            let t = a.succ(q, l);
            if words[t].is_none() {
                let mut w = words[q].clone().unwrap();
                w.push(l);
                words[t] = Some(w);
                queue.push_back(t);
            }
        }
    }
    words
}
