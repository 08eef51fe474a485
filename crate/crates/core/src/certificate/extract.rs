use std::collections::HashMap;

use super::{CertMode, Certificate, Words};
use crate::alphabet::{Letter, Word};
use crate::error::{Error, Result};
use crate::game::Mode;
use crate::gamma::{GammaDescriptor, Shape};
use crate::graph::{bfs_path, sccs};
use crate::transducer::RefuterTransducer;

/// The refuter with letters moved onto transitions and states of equal
/// behaviour merged.
struct Mealy {
    initial: usize,
    next: Vec<Vec<usize>>,
    out: Vec<Vec<Letter>>,
}

impl Mealy {
    fn new(r: &RefuterTransducer) -> Result<Mealy> {
        let n = r.num_states();
        let na = r.inputs.len();
        let mut out = vec![vec![0; na]; n];
        for s in 0..n {
            for a in 0..na {
                let t = r.delta[s][a];
                out[s][a] = r.output[t].ok_or_else(|| Error::Invalid(format!("state {t} has no output")))?;
            }
        }
        let mut class = vec![0usize; n];
        let mut count = 1;
        loop {
            let mut ids: HashMap<(usize, Vec<(Letter, usize)>), usize> = HashMap::new();
            let next: Vec<usize> = (0..n)
                .map(|s| {
                    let key = (class[s], (0..na).map(|a| (out[s][a], class[r.delta[s][a]])).collect());
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
        for s in (0..n).rev() {
            rep[class[s]] = s;
        }
        Ok(Mealy {
            initial: class[r.initial],
            next: rep.iter().map(|&s| r.delta[s].iter().map(|&t| class[t]).collect()).collect(),
            out: rep.iter().map(|&s| out[s].clone()).collect(),
        })
    }

    fn len(&self) -> usize {
        self.next.len()
    }
}

/// States visited and the inputs read between them.
#[derive(Debug, Clone)]
struct Walk {
    nodes: Vec<usize>,
    inputs: Vec<usize>,
}

impl Walk {
    fn at(s: usize) -> Walk {
        Walk {
            nodes: vec![s],
            inputs: Vec::new(),
        }
    }

    fn first(&self) -> usize {
        self.nodes[0]
    }

    fn last(&self) -> usize {
        *self.nodes.last().unwrap()
    }

    fn push(&mut self, a: usize, t: usize) {
        self.inputs.push(a);
        self.nodes.push(t);
    }

    fn join(mut self, b: &Walk) -> Walk {
        debug_assert_eq!(self.last(), b.first());
        self.nodes.extend_from_slice(&b.nodes[1..]);
        self.inputs.extend_from_slice(&b.inputs);
        self
    }

    fn emitted(&self, m: &Mealy) -> Word {
        self.inputs.iter().zip(&self.nodes).map(|(&a, &s)| m.out[s][a]).collect()
    }
}

/// Path and cycle read from `s` on the constant input `a`; the cycle starts
/// and ends at the returned entry state.
fn lasso(m: &Mealy, s: usize, a: usize) -> (Walk, Walk) {
    let mut seen = vec![usize::MAX; m.len()];
    let mut w = Walk::at(s);
    seen[s] = 0;
    loop {
        let v = m.next[w.last()][a];
        if seen[v] != usize::MAX {
            let i = seen[v];
            let path = Walk {
                nodes: w.nodes[..=i].to_vec(),
                inputs: w.inputs[..i].to_vec(),
            };
            let mut cycle = Walk {
                nodes: w.nodes[i..].to_vec(),
                inputs: w.inputs[i..].to_vec(),
            };
            cycle.push(a, v);
            return (path, cycle);
        }
        seen[v] = w.nodes.len();
        w.push(a, v);
    }
}

/// Shortest path from `from` to a state satisfying `goal`, over inputs `< bound`.
fn path_to(m: &Mealy, from: usize, bound: usize, goal: impl Fn(usize) -> bool) -> Option<Walk> {
    let n = m.len();
    bfs_path(n, &[from], &vec![true; n], goal, |v| (0..bound).map(move |a| (a, m.next[v][a])))
        .map(|(inputs, nodes)| Walk { nodes, inputs })
}

/// Nearest state from `from` lying in a bottom component of the graph
/// restricted to inputs `< bound`, with the path leading there.
fn enter_bottom(m: &Mealy, from: usize, bound: usize) -> Walk {
    let n = m.len();
    let succ = |v: usize| (0..bound).map(move |a| m.next[v][a]);
    let reach = crate::graph::reachable(n, &[from], &vec![true; n], succ);
    let mut comp = vec![usize::MAX; n];
    let comps = sccs(n, &reach, succ);
    for (i, c) in comps.iter().enumerate() {
        for &v in c {
            comp[v] = i;
        }
    }
    let bottom: Vec<bool> = comps
        .iter()
        .map(|c| c.iter().all(|&v| succ(v).all(|w| comp[w] == comp[v])))
        .collect();
    path_to(m, from, bound, |v| reach[v] && bottom[comp[v]]).expect("a bottom component is reachable")
}

/// Cycle through `s` that starts with input `first` and then uses inputs `< bound`.
fn cycle_via(m: &Mealy, s: usize, first: usize, bound: usize) -> Option<Walk> {
    let rest = path_to(m, m.next[s][first], bound, |v| v == s)?;
    let mut w = Walk::at(s);
    w.push(first, rest.first());
    Some(w.join(&rest))
}

/// `x` leads into a bottom component and along a `rej` lasso; `x1` is the
/// `rej` cycle and `x2` a cycle through the same state opened by `acc`.
fn three_word(m: &Mealy, g: &GammaDescriptor, na: usize) -> Result<Words> {
    let acc = g.letter("acc")?;
    let rej = g.letter("rej")?;
    let enter = enter_bottom(m, m.initial, na);
    let (to_cycle, rej_cycle) = lasso(m, enter.last(), rej);
    let acc_cycle = cycle_via(m, rej_cycle.first(), acc, na).expect("bottom components are strongly connected");
    Ok(Words::ThreeWord {
        x: enter.join(&to_cycle).emitted(m),
        x1: rej_cycle.emitted(m),
        x2: acc_cycle.emitted(m),
    })
}

/// Returns the path from `s` to the flower's centre and one cycle per input `0..=j`.
fn flower(m: &Mealy, j: usize, s: usize) -> (Walk, Vec<Walk>) {
    if j == 0 {
        let (path, cycle) = lasso(m, s, 0);
        return (path, vec![cycle]);
    }
    let enter = enter_bottom(m, s, j + 1);
    let (path, mut cycles) = flower(m, j - 1, enter.last());
    cycles.push(cycle_via(m, path.last(), j, j + 1).expect("the centre lies in a bottom component"));
    (enter.join(&path), cycles)
}

/// Extracts the certificate shape of `g` from a refuter for `mode`.
pub fn extract_certificate(r: &RefuterTransducer, g: &GammaDescriptor, mode: &Mode) -> Result<Certificate> {
    if r.inputs != g.annotations {
        return Err(Error::AlphabetMismatch("refuter inputs differ from the annotations".into()));
    }
    if matches!(g.shape, Shape::None) {
        return Err(Error::ShapeUnsupported(g.name.clone()));
    }
    let m = Mealy::new(r)?;
    let na = r.inputs.len();
    let s0 = m.initial;
    let words = match g.shape {
        Shape::ThreeWord | Shape::ThreeWordDual => three_word(&m, g, na)?,
        Shape::Flower { low, high } => {
            let (path, cycles) = flower(&m, (high - low) as usize, s0);
            Words::Flower {
                x: path.emitted(&m),
                blocks: cycles.iter().map(|c| c.emitted(&m)).collect(),
            }
        }
        Shape::WeakChain { low, high } => {
            let mut at = s0;
            let (mut hats, mut blocks) = (Vec::new(), Vec::new());
            for a in 0..=(high - low) as usize {
                let (path, cycle) = lasso(&m, at, a);
                hats.push(path.emitted(&m));
                blocks.push(cycle.emitted(&m));
                at = cycle.first();
            }
            Words::WeakChain { hats, blocks }
        }
        Shape::WeakFive => {
            let acc = g.letter("acc")?;
            let rej = g.letter("rej")?;
            let s = enter_bottom(&m, s0, na).last();
            let s1 = lasso(&m, s, rej).1.first();
            let s2 = lasso(&m, s, acc).1.first();
            let x = path_to(&m, s0, na, |v| v == s1).unwrap();
            let (_, c1) = lasso(&m, s1, rej);
            let p1 = path_to(&m, s1, na, |v| v == s2).expect("same bottom component");
            let (_, c2) = lasso(&m, s2, acc);
            let p2 = path_to(&m, s2, na, |v| v == s1).expect("same bottom component");
            Words::WeakFive {
                x: x.emitted(&m),
                x1: c1.emitted(&m),
                x2: p1.emitted(&m),
                x3: c2.emitted(&m),
                x4: p2.emitted(&m),
            }
        }
        Shape::BoundedSix => {
            let (p0, c0) = lasso(&m, s0, g.letter("?")?);
            let e = c0.first();
            let (p1, c1) = lasso(&m, e, g.letter("rej")?);
            let (p2, c2) = lasso(&m, e, g.letter("acc")?);
            Words::BoundedSix {
                hats: [p0.emitted(&m), p1.emitted(&m), p2.emitted(&m)],
                blocks: [c0.emitted(&m), c1.emitted(&m), c2.emitted(&m)],
            }
        }
        Shape::None => unreachable!(),
    };
    Certificate::new(g, CertMode::from(mode), mode.sigma().clone(), words)
}
