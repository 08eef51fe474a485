//! Recursive Zielonka solver for max-parity games; even priorities favor Prover.

use std::time::Instant;

use super::Player;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct ParitySolution {
    pub prover_wins: Vec<bool>,
    /// For each node in its owner's winning region, the chosen letter.
    pub strategy: Vec<Option<usize>>,
}

pub(crate) struct Game<'a> {
    pub owner: &'a [Player],
    pub succ: &'a [Vec<usize>],
    pub pred: Vec<Vec<usize>>,
}

impl<'a> Game<'a> {
    pub fn new(owner: &'a [Player], succ: &'a [Vec<usize>]) -> Self {
        let mut pred = vec![Vec::new(); succ.len()];
        for (v, row) in succ.iter().enumerate() {
            for &w in row {
                pred[w].push(v);
            }
        }
        Game { owner, succ, pred }
    }

    pub fn len(&self) -> usize {
        self.succ.len()
    }

    /// Nodes inside `within` from which `p` forces a visit to `target`;
    /// `strat` receives the attracting letter of `p`'s nodes outside the target.
    pub fn attractor(
        &self,
        p: Player,
        within: &[bool],
        target: &[bool],
        strat: &mut [Option<usize>],
    ) -> Vec<bool> {
        let n = self.len();
        let mut attr = vec![false; n];
        let mut count: Vec<usize> = (0..n)
            .map(|v| {
                if within[v] {
                    self.succ[v].iter().filter(|&&w| within[w]).count()
                } else {
                    0
                }
            })
            .collect();
        let mut queue = Vec::new();
        for v in 0..n {
            if within[v] && target[v] {
                attr[v] = true;
                queue.push(v);
            }
        }
        let mut head = 0;
        while head < queue.len() {
            let w = queue[head];
            head += 1;
            for &v in &self.pred[w] {
                if !within[v] || attr[v] {
                    continue;
                }
                if self.owner[v] == p {
                    strat[v] = self.succ[v].iter().position(|&t| attr[t]);
                    attr[v] = true;
                    queue.push(v);
                } else {
                    count[v] -= 1;
                    if count[v] == 0 {
                        attr[v] = true;
                        queue.push(v);
                    }
                }
            }
        }
        attr
    }

    /// Lowest letter leading inside `within`.
    pub fn stay(&self, v: usize, within: &[bool]) -> Option<usize> {
        self.succ[v].iter().position(|&t| within[t])
    }
}

fn minus(a: &[bool], b: &[bool]) -> Vec<bool> {
    a.iter().zip(b).map(|(x, y)| *x && !*y).collect()
}

fn player_of(prio: u32) -> Player {
    if prio % 2 == 0 {
        Player::Prover
    } else {
        Player::Refuter
    }
}

fn check(deadline: Option<Instant>) -> Result<()> {
    match deadline {
        Some(d) if Instant::now() >= d => Err(Error::Cancelled),
        _ => Ok(()),
    }
}

/// Returns the set of nodes of `v` won by Prover.
fn zielonka(
    g: &Game,
    prio: &[u32],
    v: &[bool],
    strat: &mut [Option<usize>],
    deadline: Option<Instant>,
) -> Result<Vec<bool>> {
    check(deadline)?;
    let n = g.len();
    let Some(d) = (0..n).filter(|&i| v[i]).map(|i| prio[i]).max() else {
        return Ok(vec![false; n]);
    };
    let p = player_of(d);
    let top: Vec<bool> = (0..n).map(|i| v[i] && prio[i] == d).collect();
    let mut attr_strat = vec![None; n];
    let a = g.attractor(p, v, &top, &mut attr_strat);
    let rest = minus(v, &a);
    let w1 = zielonka(g, prio, &rest, strat, deadline)?;
    let opp_region: Vec<bool> = (0..n)
        .map(|i| rest[i] && (w1[i] == (p.opponent() == Player::Prover)))
        .collect();
    if !opp_region.iter().any(|&b| b) {
        for i in 0..n {
            if a[i] && g.owner[i] == p {
                strat[i] = if top[i] { g.stay(i, v) } else { attr_strat[i] };
            }
        }
        return Ok(if p == Player::Prover { v.to_vec() } else { vec![false; n] });
    }
    let mut b_strat = vec![None; n];
    let b = g.attractor(p.opponent(), v, &opp_region, &mut b_strat);
    for i in 0..n {
        if b[i] && !opp_region[i] && g.owner[i] == p.opponent() {
            strat[i] = b_strat[i];
        }
    }
    let rest2 = minus(v, &b);
    let w2 = zielonka(g, prio, &rest2, strat, deadline)?;
    let opp_is_prover = p.opponent() == Player::Prover;
    Ok((0..n).map(|i| if b[i] { opp_is_prover } else { w2[i] }).collect())
}

/// Solves the game; ties between equally good moves go to the lowest letter.
pub fn solve_parity(
    owner: &[Player],
    succ: &[Vec<usize>],
    prio: &[u32],
    deadline: Option<Instant>,
) -> Result<ParitySolution> {
    let g = Game::new(owner, succ);
    let n = g.len();
    let mut strat = vec![None; n];
    let all = vec![true; n];
    let prover_wins = zielonka(&g, prio, &all, &mut strat, deadline)?;
    // keep only choices of winners inside their region
    for i in 0..n {
        let wins = prover_wins[i] == (owner[i] == Player::Prover);
        if !wins {
            strat[i] = None;
        }
    }
    Ok(ParitySolution { prover_wins, strategy: strat })
}
