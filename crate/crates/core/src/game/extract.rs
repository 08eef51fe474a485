use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{GameVerdict, Layout, Mode, Player, Tracker};
use crate::algebra::graph_is_empty;
use crate::alphabet::{Alphabet, LassoWord, Letter};
use crate::automaton::{Condition, DetOmegaAutomaton, OmegaGraph};
use crate::error::{Error, Result};
use crate::gamma::GammaDescriptor;
use crate::transducer::RefuterTransducer;

/// Prover's winning strategy as a machine over Σ labelling each state with
/// the annotation it announces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProverMachine {
    pub sigma: Alphabet,
    pub annotations: Alphabet,
    pub initial: usize,
    pub delta: Vec<Vec<usize>>,
    pub annotation: Vec<Letter>,
}

fn wrong(expected: Player, v: &GameVerdict) -> Error {
    Error::WrongWinner(format!("expected {expected:?} to win, but {:?} did", v.winner))
}

/// Reachable Refuter positions under the winning strategy become states;
/// the result is trimmed and minimized.
pub fn refuter_to_transducer(v: &GameVerdict) -> Result<RefuterTransducer> {
    if v.winner != Player::Refuter {
        return Err(wrong(Player::Refuter, v));
    }
    let a = &v.arena;
    let st = v.strategy();
    let na = a.annotations.len();
    let mut id: HashMap<usize, usize> = HashMap::new();
    let mut nodes: Vec<usize> = vec![usize::MAX];
    let mut delta: Vec<Vec<usize>> = Vec::new();
    let mut output: Vec<Option<Letter>> = vec![None];
    let mut intern = |r: usize, nodes: &mut Vec<usize>, output: &mut Vec<Option<Letter>>| -> Result<usize> {
        if let Some(&i) = id.get(&r) {
            return Ok(i);
        }
        let sigma = st[r].ok_or_else(|| Error::Invalid(format!("no refuter move at position {r}")))?;
        id.insert(r, nodes.len());
        nodes.push(r);
        output.push(Some(sigma));
        Ok(nodes.len() - 1)
    };
    let first: Vec<usize> = (0..na).map(|l| a.succ[a.initial][l]).collect();
    let mut row0 = Vec::new();
    for r in first {
        row0.push(intern(r, &mut nodes, &mut output)?);
    }
    delta.push(row0);
    let mut i = 1;
    while i < nodes.len() {
        let r = nodes[i];
        let p = a.succ[r][output[i].unwrap()];
        let mut row = Vec::with_capacity(na);
        for l in 0..na {
            row.push(intern(a.succ[p][l], &mut nodes, &mut output)?);
        }
        delta.push(row);
        i += 1;
    }
    let t = RefuterTransducer::new(a.annotations.clone(), a.sigma.clone(), 0, delta, output)?;
    Ok(t.minimize())
}

/// Reachable Prover positions under the winning strategy, minimized.
pub fn prover_machine(v: &GameVerdict) -> Result<ProverMachine> {
    if v.winner != Player::Prover {
        return Err(wrong(Player::Prover, v));
    }
    let a = &v.arena;
    let st = v.strategy();
    let ns = a.sigma.len();
    let mut id: HashMap<usize, usize> = HashMap::from([(a.initial, 0)]);
    let mut nodes = vec![a.initial];
    let mut delta = Vec::new();
    let mut annotation = Vec::new();
    let mut i = 0;
    while i < nodes.len() {
        let p = nodes[i];
        let ann = st[p].ok_or_else(|| Error::Invalid(format!("no prover move at position {p}")))?;
        annotation.push(ann);
        let r = a.succ[p][ann];
        let row = (0..ns)
            .map(|s| {
                let t = a.succ[r][s];
                let next = nodes.len();
                *id.entry(t).or_insert_with(|| {
                    nodes.push(t);
                    next
                })
            })
            .collect();
        delta.push(row);
        i += 1;
    }
    Ok(minimize_machine(ProverMachine {
        sigma: a.sigma.clone(),
        annotations: a.annotations.clone(),
        initial: 0,
        delta,
        annotation,
    }))
}

fn minimize_machine(m: ProverMachine) -> ProverMachine {
    let n = m.delta.len();
    let mut class: Vec<usize> = m.annotation.clone();
    let mut count = {
        let mut c = class.clone();
        c.sort_unstable();
        c.dedup();
        c.len()
    };
    loop {
        let mut ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let next: Vec<usize> = (0..n)
            .map(|s| {
                let key = (class[s], m.delta[s].iter().map(|&x| class[x]).collect());
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
    let mut renum: HashMap<usize, usize> = HashMap::new();
    let mut reps = Vec::new();
    let mut order = vec![m.initial];
    let mut i = 0;
    renum.insert(class[m.initial], 0);
    reps.push(m.initial);
    while i < order.len() {
        let s = order[i];
        for &t in &m.delta[s] {
            if let std::collections::hash_map::Entry::Vacant(e) = renum.entry(class[t]) {
                e.insert(reps.len());
                reps.push(t);
                order.push(t);
            }
        }
        i += 1;
    }
    ProverMachine {
        sigma: m.sigma.clone(),
        annotations: m.annotations.clone(),
        initial: 0,
        delta: reps
            .iter()
            .map(|&s| m.delta[s].iter().map(|&t| renum[&class[t]]).collect())
            .collect(),
        annotation: reps.iter().map(|&s| m.annotation[s]).collect(),
    }
}

impl ProverMachine {
    /// Automaton of the family: each state's marks come from its annotation.
    pub fn to_automaton(&self, g: &GammaDescriptor) -> Result<DetOmegaAutomaton> {
        if let Some((marks, names, cond)) = g.letter_condition() {
            let m = self.annotation.iter().map(|&a| marks[a]).collect();
            return DetOmegaAutomaton::new(self.sigma.clone(), self.initial, self.delta.clone(), m, names, cond);
        }
        // acceptance needs memory: pair each state with the acceptance state
        let acc = &g.l_acc;
        let start = (self.initial, acc.initial());
        let mut id: HashMap<(usize, usize), usize> = HashMap::from([(start, 0)]);
        let mut order = vec![start];
        let mut delta = Vec::new();
        let mut marks = Vec::new();
        let mut i = 0;
        while i < order.len() {
            let (p, ga) = order[i];
            let ga2 = acc.succ(ga, self.annotation[p]);
            marks.push(acc.marks(ga2));
            let row = (0..self.sigma.len())
                .map(|s| {
                    let t = (self.delta[p][s], ga2);
                    let next = order.len();
                    *id.entry(t).or_insert_with(|| {
                        order.push(t);
                        next
                    })
                })
                .collect();
            delta.push(row);
            i += 1;
        }
        let cond = match acc.condition() {
            Condition::Parity { low, high } => Condition::Parity { low: *low, high: *high },
            Condition::EmersonLei(f) => Condition::EmersonLei(f.clone()),
        };
        DetOmegaAutomaton::new(self.sigma.clone(), 0, delta, marks, acc.mark_names().to_vec(), cond)
    }
}

pub fn prover_to_automaton(v: &GameVerdict, g: &GammaDescriptor) -> Result<DetOmegaAutomaton> {
    prover_machine(v)?.to_automaton(g)
}

/// Product of the refuter with the play tracker over annotation inputs;
/// an accepted input is an annotation sequence on which Prover wins.
fn refuter_product(r: &RefuterTransducer, mode: &Mode, g: &GammaDescriptor) -> Result<Option<OmegaGraph>> {
    if r.inputs != g.annotations || &r.outputs != mode.sigma() {
        return Ok(None);
    }
    let t = Tracker::new(mode)?;
    let lay = Layout::new(&t, g)?;
    let na = g.annotations.len();
    let start = (r.initial, t.m.initial(), g.l_acc.initial(), g.l_struct.initial());
    let mut id: HashMap<(usize, usize, usize, usize), usize> = HashMap::from([(start, 0)]);
    let mut order = vec![start];
    let mut succ = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let (s, q, ga, gs) = order[i];
        let mut row = Vec::with_capacity(na);
        for a in 0..na {
            let s2 = r.delta[s][a];
            let Some(x) = r.output[s2] else {
                return Ok(None);
            };
            let tgt = (s2, t.m.succ(q, x), g.l_acc.succ(ga, a), g.l_struct.succ(gs, a));
            let next = order.len();
            let j = *id.entry(tgt).or_insert_with(|| {
                order.push(tgt);
                next
            });
            row.push(vec![j]);
        }
        succ.push(row);
        i += 1;
    }
    let marks = order
        .iter()
        .map(|&(_, q, ga, gs)| t.m.marks(q) | lay.g_marks(g, ga, gs))
        .collect();
    Ok(Some(OmegaGraph {
        alphabet: g.annotations.clone(),
        initial: vec![0],
        succ,
        marks,
        formula: lay.prover_formula(&t, g),
    }))
}

/// An annotation sequence on which the refuter's answers lose, if any.
/// A machine over the wrong alphabets or with a silent state loses on `None`
/// as well, reported as the empty lasso `Some` with no witness.
pub fn refuter_counterexample(
    r: &RefuterTransducer,
    mode: &Mode,
    g: &GammaDescriptor,
) -> Result<Option<Option<LassoWord>>> {
    match refuter_product(r, mode, g)? {
        None => Ok(Some(None)),
        Some(p) => {
            let (empty, w) = graph_is_empty(&p);
            Ok(if empty { None } else { Some(w) })
        }
    }
}

/// True iff every annotation sequence is answered by a losing play for Prover.
pub fn verify_refuter(r: &RefuterTransducer, mode: &Mode, g: &GammaDescriptor) -> Result<bool> {
    Ok(refuter_counterexample(r, mode, g)?.is_none())
}
