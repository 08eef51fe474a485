//! Rabin games with positional strategies for the Rabin player, and the
//! pair-based game for Büchi annotations.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::arena::{base_graph, Arena, Position, Winning};
use super::parity::Game;
use super::{GameVerdict, Layout, Mode, Player, Route, Tracker};
use crate::error::{Error, Result};
use crate::gamma::GammaDescriptor;

/// Visit `good` infinitely often and `bad` only finitely often.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RabinPair {
    pub good: Vec<bool>,
    pub bad: Vec<bool>,
}

fn check(deadline: Option<Instant>) -> Result<()> {
    match deadline {
        Some(d) if Instant::now() >= d => Err(Error::Cancelled),
        _ => Ok(()),
    }
}

fn and(a: &[bool], b: &[bool]) -> Vec<bool> {
    a.iter().zip(b).map(|(x, y)| *x && *y).collect()
}

fn minus(a: &[bool], b: &[bool]) -> Vec<bool> {
    a.iter().zip(b).map(|(x, y)| *x && !*y).collect()
}

/// Rabin player's winning region inside the subgame `v`.
fn rabin(
    g: &Game,
    me: Player,
    pairs: &[RabinPair],
    active: &[usize],
    v: &[bool],
    strat: &mut [Option<usize>],
    deadline: Option<Instant>,
) -> Result<Vec<bool>> {
    check(deadline)?;
    let n = g.len();
    let mut won = vec![false; n];
    if active.is_empty() {
        return Ok(won);
    }
    let mut scratch = vec![None; n];
    'grow: loop {
        let rest = minus(v, &won);
        if !rest.iter().any(|&b| b) {
            break;
        }
        for &i in active {
            let pr = &pairs[i];
            let bad = g.attractor(me.opponent(), &rest, &pr.bad, &mut scratch);
            let mut z = minus(&rest, &bad);
            let others: Vec<usize> = active.iter().copied().filter(|&j| j != i).collect();
            loop {
                if !z.iter().any(|&b| b) {
                    break;
                }
                let good = and(&z, &pr.good);
                let mut a_strat = vec![None; n];
                let a = g.attractor(me, &z, &good, &mut a_strat);
                let sub = minus(&z, &a);
                let mut sub_strat = vec![None; n];
                let w = rabin(g, me, pairs, &others, &sub, &mut sub_strat, deadline)?;
                let lose = minus(&sub, &w);
                if lose.iter().any(|&b| b) {
                    let cut = g.attractor(me.opponent(), &z, &lose, &mut scratch);
                    z = minus(&z, &cut);
                    continue;
                }
                for x in 0..n {
                    if z[x] && g.owner[x] == me {
                        strat[x] = if sub[x] {
                            sub_strat[x]
                        } else if good[x] {
                            g.stay(x, &z)
                        } else {
                            a_strat[x]
                        };
                    }
                }
                break;
            }
            if z.iter().any(|&b| b) {
                let mut e_strat = vec![None; n];
                let reach = g.attractor(me, &rest, &z, &mut e_strat);
                for x in 0..n {
                    if reach[x] && !z[x] && g.owner[x] == me {
                        strat[x] = e_strat[x];
                    }
                    won[x] |= reach[x];
                }
                continue 'grow;
            }
        }
        break;
    }
    Ok(won)
}

/// Winning region of `me` for the disjunction of `pairs`, with a positional
/// strategy for `me` on that region.
pub fn solve_rabin(
    owner: &[Player],
    succ: &[Vec<usize>],
    me: Player,
    pairs: &[RabinPair],
    deadline: Option<Instant>,
) -> Result<(Vec<bool>, Vec<Option<usize>>)> {
    let g = Game::new(owner, succ);
    let n = g.len();
    let mut strat = vec![None; n];
    let active: Vec<usize> = (0..pairs.len()).filter(|&i| pairs[i].good.iter().any(|&b| b)).collect();
    let won = rabin(&g, me, pairs, &active, &vec![true; n], &mut strat, deadline)?;
    for x in 0..n {
        if !won[x] || owner[x] != me {
            strat[x] = None;
        }
    }
    Ok((won, strat))
}

/// Builds both players' pairs over positions that remember the last
/// annotation, then solves the Refuter side and the Prover side.
pub(crate) fn dbw_route(
    mode: &Mode,
    g: &GammaDescriptor,
    deadline: Option<Instant>,
) -> Result<Option<GameVerdict>> {
    let t = Tracker::new(mode)?;
    let lay = Layout::new(&t, g)?;
    let base = base_graph(&t, g, &lay);
    let acc = g.letter("acc")?;
    let (c1, r1, c2, r2): (Vec<u32>, (u32, u32), Vec<u32>, (u32, u32)) = match mode {
        Mode::Recognize { l } => {
            let lc = l.complement();
            let n = l.num_states();
            (
                (0..n).map(|q| l.color(q).unwrap()).collect(),
                l.parity_range().unwrap(),
                (0..n).map(|q| lc.color(q).unwrap()).collect(),
                lc.parity_range().unwrap(),
            )
        }
        Mode::Separate { l1, l2 } => {
            let w1 = l1.mark_names().len() as u32;
            let mask = (1u64 << w1) - 1;
            let m = &t.m;
            (
                (0..m.num_states()).map(|q| (m.marks(q) & mask).trailing_zeros()).collect(),
                l1.parity_range().unwrap(),
                (0..m.num_states()).map(|q| (m.marks(q) >> w1).trailing_zeros()).collect(),
                l2.parity_range().unwrap(),
            )
        }
    };
    let np = base.positions.len();
    let info: Vec<Option<(u32, u32, bool)>> = base
        .positions
        .iter()
        .map(|p| match *p {
            Position::Prover { q, acc: b, .. } => Some((c1[q], c2[q], b == acc)),
            _ => None,
        })
        .collect();
    let set = |f: &dyn Fn(u32, u32, bool) -> bool| -> Vec<bool> {
        (0..np)
            .map(|i| info[i].is_some_and(|(a, b, s)| f(a, b, s)))
            .collect()
    };
    let mut refuter = Vec::new();
    let mut prover = Vec::new();
    for c in r1.0..=r1.1 {
        let pair = RabinPair {
            good: set(&|x, _, s| !s && x == c),
            bad: set(&|x, _, s| s || x > c),
        };
        if c % 2 == 1 {
            refuter.push(pair);
        } else {
            prover.push(pair);
        }
    }
    for c in r2.0..=r2.1 {
        let pair = RabinPair {
            good: set(&|_, y, s| s && y == c),
            bad: set(&|_, y, _| y > c),
        };
        if c % 2 == 1 {
            refuter.push(pair);
        } else {
            prover.push(pair);
        }
    }
    let owner: Vec<Player> = base.positions.iter().map(|p| p.owner()).collect();
    let arena = Arena {
        sigma: mode.sigma().clone(),
        annotations: g.annotations.clone(),
        positions: base.positions.clone(),
        memory: vec![0; np],
        owner: owner.clone(),
        succ: base.succ.clone(),
        initial: 0,
        winning: Winning::Rabin {
            refuter: refuter.clone(),
            prover: prover.clone(),
        },
        base_positions: np,
    };
    let stats = arena.stats();
    let (won, strat) = solve_rabin(&owner, &base.succ, Player::Refuter, &refuter, deadline)?;
    if won[0] {
        return Ok(Some(GameVerdict {
            winner: Player::Refuter,
            arena,
            prover_strategy: None,
            refuter_strategy: Some(strat),
            stats,
            route: Route::Rabin,
        }));
    }
    let (won, strat) = solve_rabin(&owner, &base.succ, Player::Prover, &prover, deadline)?;
    if won[0] {
        return Ok(Some(GameVerdict {
            winner: Player::Prover,
            arena,
            prover_strategy: Some(strat),
            refuter_strategy: None,
            stats,
            route: Route::Rabin,
        }));
    }
    Ok(None)
}

