//! Annotation games: Refuter supplies letters of Σ, Prover answers with
//! annotations. Prover wins a play when the annotations respect the family's
//! structure and acceptance agrees with the input languages.

mod arena;
mod extract;
mod parity;
mod rabin;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::algebra::{is_empty, product, to_parity};
use crate::automaton::{Condition, DetOmegaAutomaton, State};
use crate::error::{Error, Result};
use crate::formula::{Formula, MarkSet};
use crate::gamma::{Family, GammaDescriptor};

pub use arena::{build_arena, Arena, Position, Winning};
pub use extract::{prover_machine, prover_to_automaton, refuter_counterexample, refuter_to_transducer, verify_refuter, ProverMachine};
pub use parity::{solve_parity, ParitySolution};
pub use rabin::{solve_rabin, RabinPair};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode")]
pub enum Mode {
    Recognize { l: DetOmegaAutomaton },
    Separate { l1: DetOmegaAutomaton, l2: DetOmegaAutomaton },
}

impl Mode {
    pub fn recognize(l: DetOmegaAutomaton) -> Self {
        Mode::Recognize { l }
    }

    pub fn separate(l1: DetOmegaAutomaton, l2: DetOmegaAutomaton) -> Self {
        Mode::Separate { l1, l2 }
    }

    pub fn sigma(&self) -> &crate::alphabet::Alphabet {
        match self {
            Mode::Recognize { l } => l.alphabet(),
            Mode::Separate { l1, .. } => l1.alphabet(),
        }
    }

    pub fn is_separate(&self) -> bool {
        matches!(self, Mode::Separate { .. })
    }

    /// The two languages that must land inside and outside acceptance.
    pub fn pair(&self) -> (DetOmegaAutomaton, DetOmegaAutomaton) {
        match self {
            Mode::Recognize { l } => (l.clone(), l.complement()),
            Mode::Separate { l1, l2 } => (l1.clone(), l2.clone()),
        }
    }

    /// Same games with the family dualized: the languages swap roles.
    pub fn swapped(&self) -> Mode {
        match self {
            Mode::Recognize { l } => Mode::Recognize { l: l.complement() },
            Mode::Separate { l1, l2 } => Mode::Separate {
                l1: l2.clone(),
                l2: l1.clone(),
            },
        }
    }

    /// Total number of input states.
    pub fn size(&self) -> usize {
        match self {
            Mode::Recognize { l } => l.num_states(),
            Mode::Separate { l1, l2 } => l1.num_states() * l2.num_states(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Player {
    Prover,
    Refuter,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Prover => Player::Refuter,
            Player::Refuter => Player::Prover,
        }
    }
}

/// Deterministic automaton reading the Σ-component of a play, with the
/// assertions for membership in the first and second language.
#[derive(Debug, Clone)]
pub(crate) struct Tracker {
    pub m: DetOmegaAutomaton,
    pub phi1: Formula,
    pub phi2: Formula,
}

impl Tracker {
    pub fn new(mode: &Mode) -> Result<Tracker> {
        match mode {
            Mode::Recognize { l } => Ok(Tracker {
                m: l.clone(),
                phi1: l.formula(),
                phi2: l.formula().negate(),
            }),
            Mode::Separate { l1, l2 } => {
                let m = product(l1, l2, |a, b| Formula::and(vec![a, b]))?;
                let off = l1.mark_names().len() as u32;
                Ok(Tracker {
                    phi1: l1.formula(),
                    phi2: l2.formula().shift(off),
                    m,
                })
            }
        }
    }

    pub fn width(&self) -> u32 {
        self.m.mark_names().len() as u32
    }
}

/// Mark layout shared by arenas and refuter checks.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Layout {
    pub acc: u32,
    pub st: u32,
    pub sink: u32,
}

impl Layout {
    pub fn new(t: &Tracker, g: &GammaDescriptor) -> Result<Layout> {
        let acc = t.width();
        let st = acc + g.l_acc.mark_names().len() as u32;
        let sink = st + g.l_struct.mark_names().len() as u32;
        if sink >= 64 {
            return Err(Error::Invalid("game needs more than 64 marks".into()));
        }
        Ok(Layout { acc, st, sink })
    }

    pub fn g_marks(&self, g: &GammaDescriptor, ga: State, gs: State) -> MarkSet {
        (g.l_acc.marks(ga) << self.acc) | (g.l_struct.marks(gs) << self.st)
    }

    /// Prover's objective over the combined marks, without the sink.
    pub fn prover_formula(&self, t: &Tracker, g: &GammaDescriptor) -> Formula {
        let acc = g.l_acc.formula().shift(self.acc);
        let st = g.l_struct.formula().shift(self.st);
        Formula::and(vec![
            st,
            Formula::or(vec![t.phi1.negate(), acc.clone()]),
            Formula::or(vec![t.phi2.negate(), acc.negate()]),
        ])
    }
}

/// Which solver produced a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    Generic,
    Rabin,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArenaStats {
    pub base_positions: usize,
    pub positions: usize,
    pub edges: usize,
    pub memory: usize,
    pub max_priority: u32,
}

#[derive(Debug, Clone)]
pub struct GameVerdict {
    pub winner: Player,
    pub arena: Arena,
    /// Letter chosen at each Prover position of Prover's winning region.
    pub prover_strategy: Option<Vec<Option<usize>>>,
    /// Letter chosen at each Refuter position of Refuter's winning region.
    pub refuter_strategy: Option<Vec<Option<usize>>>,
    pub stats: ArenaStats,
    pub route: Route,
}

impl GameVerdict {
    pub fn strategy(&self) -> &[Option<usize>] {
        match self.winner {
            Player::Prover => self.prover_strategy.as_deref().unwrap(),
            Player::Refuter => self.refuter_strategy.as_deref().unwrap(),
        }
    }
}

/// Parity-route solve of a built arena.
pub fn solve(arena: Arena, deadline: Option<Instant>) -> Result<GameVerdict> {
    let prio = match &arena.winning {
        Winning::Parity(p) => p.clone(),
        Winning::Rabin { .. } => {
            return Err(Error::Invalid("arena carries Rabin pairs; use the Rabin route".into()))
        }
    };
    let sol = solve_parity(&arena.owner, &arena.succ, &prio, deadline)?;
    let winner = if sol.prover_wins[arena.initial] {
        Player::Prover
    } else {
        Player::Refuter
    };
    let stats = arena.stats();
    let strat = sol.strategy;
    let (ps, rs) = match winner {
        Player::Prover => (Some(strat), None),
        Player::Refuter => (None, Some(strat)),
    };
    Ok(GameVerdict {
        winner,
        arena,
        prover_strategy: ps,
        refuter_strategy: rs,
        stats,
        route: Route::Generic,
    })
}

/// Runs the Rabin-pair route for `dbw` on parity inputs; `None` when that
/// route does not settle the game.
pub fn solve_dbw_rabin(mode: &Mode, g: &GammaDescriptor, deadline: Option<Instant>) -> Result<Option<GameVerdict>> {
    if g.family != Family::Dbw || g.dual {
        return Err(Error::Invalid("the Rabin route is specific to dbw".into()));
    }
    let pm = match mode {
        Mode::Recognize { l } => Mode::recognize(parity_of(l)),
        Mode::Separate { l1, l2 } => Mode::separate(parity_of(l1), parity_of(l2)),
    };
    rabin::dbw_route(&pm, g, deadline)
}

fn parity_of(a: &DetOmegaAutomaton) -> DetOmegaAutomaton {
    match a.condition() {
        Condition::Parity { .. } => a.clone(),
        Condition::EmersonLei(_) => to_parity(a),
    }
}

/// Solves the game for `mode` and `g`, preferring the Rabin route for dbw.
pub fn decide_game(mode: &Mode, g: &GammaDescriptor, deadline: Option<Instant>) -> Result<GameVerdict> {
    if g.family == Family::Dbw && !g.dual {
        if let Some(v) = solve_dbw_rabin(mode, g, deadline)? {
            return Ok(v);
        }
    }
    solve(build_arena(mode, g)?, deadline)
}

/// States of `l_struct` from which no word is accepted.
pub(crate) fn dead_states(g: &GammaDescriptor) -> Vec<bool> {
    let s = &g.l_struct;
    (0..s.num_states())
        .map(|q| {
            let from = DetOmegaAutomaton::new(
                s.alphabet().clone(),
                q,
                s.delta().to_vec(),
                s.all_marks().to_vec(),
                s.mark_names().to_vec(),
                s.condition().clone(),
            )
            .expect("same automaton, other start");
            is_empty(&from).0
        })
        .collect()
}

#[cfg(test)]
mod tests;
