use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{dead_states, ArenaStats, Layout, Mode, Player, RabinPair, Tracker};
use crate::alphabet::Alphabet;
use crate::automaton::State;
use crate::error::{Error, Result};
use crate::formula::{Formula, MarkSet};
use crate::gamma::GammaDescriptor;
use crate::zielonka_tree::ZielonkaTree;

/// A position of the unexpanded game: tracker state, acceptance state and
/// structure state of the annotations read so far.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Position {
    Prover { q: State, acc: State, st: State },
    Refuter { q: State, acc: State, st: State },
    ProverSink,
    RefuterSink,
}

impl Position {
    pub fn owner(&self) -> Player {
        match self {
            Position::Prover { .. } | Position::ProverSink => Player::Prover,
            _ => Player::Refuter,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Winning {
    /// Max priority seen infinitely often; even favors Prover.
    Parity(Vec<u32>),
    /// Each side's objective as a disjunction of Rabin pairs.
    Rabin {
        refuter: Vec<RabinPair>,
        prover: Vec<RabinPair>,
    },
}

#[derive(Debug, Clone)]
pub struct Arena {
    pub sigma: Alphabet,
    pub annotations: Alphabet,
    pub positions: Vec<Position>,
    /// Condition memory carried by each node (Zielonka-tree branch).
    pub memory: Vec<usize>,
    pub owner: Vec<Player>,
    /// Successors indexed by letter: annotations at Prover nodes, Σ at Refuter nodes.
    pub succ: Vec<Vec<usize>>,
    pub initial: usize,
    pub winning: Winning,
    pub base_positions: usize,
}

/// Unexpanded game graph with marks.
pub(crate) struct Base {
    pub positions: Vec<Position>,
    pub succ: Vec<Vec<usize>>,
    pub marks: Vec<MarkSet>,
}

pub(crate) fn base_graph(t: &Tracker, g: &GammaDescriptor, lay: &Layout) -> Base {
    let dead = dead_states(g);
    let na = g.annotations.len();
    let ns = t.m.alphabet().len();
    let start = Position::Prover {
        q: t.m.initial(),
        acc: g.l_acc.initial(),
        st: g.l_struct.initial(),
    };
    let mut id: HashMap<Position, usize> = HashMap::from([(start, 0)]);
    let mut positions = vec![start];
    let mut succ = Vec::new();
    let mut i = 0;
    while i < positions.len() {
        let p = positions[i];
        let targets: Vec<Position> = match p {
            Position::Prover { q, acc, st } => (0..na)
                .map(|a| {
                    let st2 = g.l_struct.succ(st, a);
                    if dead[st2] {
                        Position::RefuterSink
                    } else {
                        Position::Refuter {
                            q,
                            acc: g.l_acc.succ(acc, a),
                            st: st2,
                        }
                    }
                })
                .collect(),
            Position::Refuter { q, acc, st } => (0..ns)
                .map(|s| Position::Prover {
                    q: t.m.succ(q, s),
                    acc,
                    st,
                })
                .collect(),
            Position::ProverSink => vec![Position::RefuterSink; na],
            Position::RefuterSink => vec![Position::ProverSink; ns],
        };
        let row = targets
            .into_iter()
            .map(|t| {
                let next = positions.len();
                *id.entry(t).or_insert_with(|| {
                    positions.push(t);
                    next
                })
            })
            .collect();
        succ.push(row);
        i += 1;
    }
    let marks = positions
        .iter()
        .map(|p| match *p {
            Position::Prover { q, .. } => t.m.marks(q),
            Position::Refuter { acc, st, .. } => lay.g_marks(g, acc, st),
            Position::ProverSink | Position::RefuterSink => 1 << lay.sink,
        })
        .collect();
    Base {
        positions,
        succ,
        marks,
    }
}

/// Game for `mode` and family `g` with the winning condition turned into
/// priorities through the Zielonka tree of Prover's objective.
pub fn build_arena(mode: &Mode, g: &GammaDescriptor) -> Result<Arena> {
    let sigma = mode.sigma().clone();
    if let Mode::Separate { l1, l2 } = mode {
        if l1.alphabet() != l2.alphabet() {
            return Err(Error::AlphabetMismatch(format!("{} vs {}", l1.alphabet(), l2.alphabet())));
        }
    }
    let t = Tracker::new(mode)?;
    let lay = Layout::new(&t, g)?;
    let base = base_graph(&t, g, &lay);
    let phi = Formula::and(vec![Formula::Fin(lay.sink), lay.prover_formula(&t, g)]);
    let used = base.marks.iter().fold(0, |a, b| a | b);
    let tree = ZielonkaTree::new(&phi, used & phi.marks());
    let start = (0usize, tree.initial_leaf());
    let mut id: HashMap<(usize, usize), usize> = HashMap::from([(start, 0)]);
    let mut order = vec![start];
    let mut succ = Vec::new();
    let mut prio = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let (p, leaf) = order[i];
        let (leaf2, pr) = tree.step(leaf, base.marks[p]);
        prio.push(pr);
        let row = base.succ[p]
            .iter()
            .map(|&p2| {
                let next = order.len();
                *id.entry((p2, leaf2)).or_insert_with(|| {
                    order.push((p2, leaf2));
                    next
                })
            })
            .collect();
        succ.push(row);
        i += 1;
    }
    Ok(Arena {
        sigma,
        annotations: g.annotations.clone(),
        positions: order.iter().map(|&(p, _)| base.positions[p]).collect(),
        memory: order.iter().map(|&(_, l)| l).collect(),
        owner: order.iter().map(|&(p, _)| base.positions[p].owner()).collect(),
        succ,
        initial: 0,
        winning: Winning::Parity(prio),
        base_positions: base.positions.len(),
    })
}

impl Arena {
    pub fn num_positions(&self) -> usize {
        self.positions.len()
    }

    pub fn stats(&self) -> ArenaStats {
        let mut leaves = self.memory.clone();
        leaves.sort_unstable();
        leaves.dedup();
        ArenaStats {
            base_positions: self.base_positions,
            positions: self.positions.len(),
            edges: self.succ.iter().map(|r| r.len()).sum(),
            memory: leaves.len(),
            max_priority: match &self.winning {
                Winning::Parity(p) => p.iter().copied().max().unwrap_or(0),
                Winning::Rabin { .. } => 0,
            },
        }
    }

    /// Human-readable listing: one line per position, then its moves.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "positions {} initial {}", self.positions.len(), self.initial);
        for (i, p) in self.positions.iter().enumerate() {
            let who = match self.owner[i] {
                Player::Prover => "P",
                Player::Refuter => "R",
            };
            let what = match p {
                Position::Prover { q, acc, st } | Position::Refuter { q, acc, st } => {
                    format!("q{q} a{acc} s{st}")
                }
                Position::ProverSink | Position::RefuterSink => "sink".to_string(),
            };
            let pr = match &self.winning {
                Winning::Parity(v) => format!(" prio {}", v[i]),
                Winning::Rabin { .. } => String::new(),
            };
            let _ = write!(s, "{i} {who} {what} mem {}{pr} :", self.memory[i]);
            let letters = match self.owner[i] {
                Player::Prover => &self.annotations,
                Player::Refuter => &self.sigma,
            };
            for (l, &t) in self.succ[i].iter().enumerate() {
                let _ = write!(s, " {}->{t}", letters.name(l));
            }
            s.push('\n');
        }
        if let Winning::Rabin { refuter, prover } = &self.winning {
            for (who, pairs) in [("refuter", refuter), ("prover", prover)] {
                for (k, pr) in pairs.iter().enumerate() {
                    let set = |v: &[bool]| {
                        v.iter()
                            .enumerate()
                            .filter(|(_, b)| **b)
                            .map(|(i, _)| i.to_string())
                            .collect::<Vec<_>>()
                            .join(",")
                    };
                    let _ = writeln!(s, "{who} pair {k}: inf {{{}}} fin {{{}}}", set(&pr.good), set(&pr.bad));
                }
            }
        }
        s
    }
}
