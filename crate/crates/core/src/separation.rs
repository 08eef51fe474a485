//! Deciders for recognizability and separability, and the approximation
//! loop driven by certificates and radius languages.

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::algebra::{difference, equivalent, intersection, is_disjoint, is_subset, reduce, to_parity, union};
use crate::automaton::{DetOmegaAutomaton, NondetBuchiAutomaton};
use crate::alphabet::Word;
use crate::certificate::{extract_certificate, quick_check, radius_candidates, verify_certificate, words_of_length, Candidate, Certificate, Words};
use crate::determinize::determinize_nbw;
use crate::error::{Error, Result};
use crate::game::{decide_game, prover_to_automaton, refuter_to_transducer, verify_refuter, ArenaStats, Mode, Player, Route};
use crate::gamma::{make_gamma, GammaDescriptor, Shape};
use crate::transducer::RefuterTransducer;

/// Default state cap for the determinizations done here.
pub const DEFAULT_CAP: usize = 2_000;
/// Default number of approximation steps before a session gives up.
pub const DEFAULT_MAX_STEPS: usize = 16;
/// Prefixes tried when extending the previous certificate.
const PREFIX_SEARCH: usize = 4_096;

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub deadline: Option<Instant>,
    /// attach a certificate to refutations when the family has a shape
    pub certificate: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            deadline: None,
            certificate: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Recognizable,
    Separable,
    Refuted,
}

impl Decision {
    pub fn is_positive(self) -> bool {
        self != Decision::Refuted
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum Witness {
    Automaton {
        automaton: DetOmegaAutomaton,
    },
    Refuter {
        refuter: RefuterTransducer,
        certificate: Option<Certificate>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Verdict {
    pub decision: Decision,
    pub witness: Witness,
    pub stats: ArenaStats,
    pub route: Route,
    #[serde(skip)]
    pub solve_time: Duration,
}

impl PartialEq for Verdict {
    fn eq(&self, other: &Self) -> bool {
        self.decision == other.decision && self.witness == other.witness && self.stats == other.stats && self.route == other.route
    }
}

impl Verdict {
    pub fn automaton(&self) -> Option<&DetOmegaAutomaton> {
        match &self.witness {
            Witness::Automaton { automaton } => Some(automaton),
            Witness::Refuter { .. } => None,
        }
    }

    pub fn refuter(&self) -> Option<&RefuterTransducer> {
        match &self.witness {
            Witness::Refuter { refuter, .. } => Some(refuter),
            Witness::Automaton { .. } => None,
        }
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match &self.witness {
            Witness::Refuter { certificate, .. } => certificate.as_ref(),
            Witness::Automaton { .. } => None,
        }
    }
}

/// Whether `a` recognizes `L` (recognize) or separates the pair (separate).
pub fn check_positive(a: &DetOmegaAutomaton, mode: &Mode) -> Result<bool> {
    match mode {
        Mode::Recognize { l } => equivalent(a, l),
        Mode::Separate { l1, l2 } => Ok(is_subset(l1, a)?.0 && is_disjoint(a, l2)?.0),
    }
}

/// Solves the game and returns a checked witness for the winner.
pub fn decide(mode: &Mode, g: &GammaDescriptor, opts: &Options) -> Result<Verdict> {
    let t0 = Instant::now();
    let v = decide_game(mode, g, opts.deadline)?;
    let solve_time = t0.elapsed();
    let (decision, witness) = match v.winner {
        Player::Prover => {
            let automaton = prover_to_automaton(&v, g)?;
            if !check_positive(&automaton, mode)? {
                return Err(Error::Invalid("synthesized automaton fails its inclusion checks".into()));
            }
            let d = if mode.is_separate() {
                Decision::Separable
            } else {
                Decision::Recognizable
            };
            (d, Witness::Automaton { automaton })
        }
        Player::Refuter => {
            let refuter = refuter_to_transducer(&v)?;
            if !verify_refuter(&refuter, mode, g)? {
                return Err(Error::Invalid("extracted refuter fails verification".into()));
            }
            let certificate = if opts.certificate {
                match extract_certificate(&refuter, g, mode) {
                    Ok(c) => {
                        if !verify_certificate(&c, mode)?.valid {
                            return Err(Error::BadCertificate(format!("extracted {c} does not verify")));
                        }
                        Some(c)
                    }
                    Err(Error::ShapeUnsupported(_)) => None,
                    Err(e) => return Err(e),
                }
            } else {
                None
            };
            (Decision::Refuted, Witness::Refuter { refuter, certificate })
        }
    };
    Ok(Verdict {
        decision,
        witness,
        stats: v.stats,
        route: v.route,
        solve_time,
    })
}

/// Nondeterministic image of the refuter on the annotation words accepted by `ann`.
fn image(r: &RefuterTransducer, ann: &DetOmegaAutomaton) -> Result<NondetBuchiAutomaton> {
    let p = to_parity(ann);
    let (_, high) = p.parity_range().expect("parity");
    let na = r.inputs.len();
    // layer 0 guesses; layer c (odd) stays below color c and accepts on c
    let layers: Vec<u32> = std::iter::once(0).chain((1..=high).filter(|c| c % 2 == 1)).collect();
    let np = p.num_states();
    let ns = r.num_states();
    let id = |li: usize, s: usize, q: usize| (li * ns + s) * np + q;
    let total = layers.len() * ns * np;
    let mut delta = vec![vec![Vec::new(); r.outputs.len()]; total];
    let mut accepting = vec![false; total];
    for (li, &c) in layers.iter().enumerate() {
        for s in 0..ns {
            for q in 0..np {
                let v = id(li, s, q);
                accepting[v] = li > 0 && p.color(q) == Some(c);
                for a in 0..na {
                    let s2 = r.delta[s][a];
                    let x = r.output[s2].ok_or_else(|| Error::Invalid(format!("state {s2} has no output")))?;
                    let q2 = p.succ(q, a);
                    let col = p.color(q2).unwrap();
                    if li == 0 {
                        delta[v][x].push(id(0, s2, q2));
                        for (lj, &d) in layers.iter().enumerate().skip(1) {
                            if col <= d {
                                delta[v][x].push(id(lj, s2, q2));
                            }
                        }
                    } else if col <= c {
                        delta[v][x].push(id(li, s2, q2));
                    }
                }
            }
        }
    }
    NondetBuchiAutomaton::new(r.outputs.clone(), vec![id(0, r.initial, p.initial())], delta, accepting)
}

/// Outputs of `r` on structural annotation words that are rejected and
/// accepted respectively; for a refuter of `mode` they land inside and
/// outside the pair.
pub fn no_class_witness(
    r: &RefuterTransducer,
    g: &GammaDescriptor,
    mode: &Mode,
    cap: usize,
) -> Result<(DetOmegaAutomaton, DetOmegaAutomaton)> {
    if r.inputs != g.annotations {
        return Err(Error::AlphabetMismatch("refuter inputs differ from the annotations".into()));
    }
    let rejected = difference(&g.l_struct, &g.l_acc)?;
    let accepted = intersection(&g.l_struct, &g.l_acc)?;
    let w1 = reduce(&determinize_nbw(&image(r, &rejected)?, cap)?);
    let w2 = reduce(&determinize_nbw(&image(r, &accepted)?, cap)?);
    let (inside, outside) = mode.pair();
    if !is_subset(&w1, &inside)?.0 || !is_subset(&w2, &outside)?.0 {
        return Err(Error::Invalid("refuter image leaves the pair".into()));
    }
    Ok((w1, w2))
}

/// The single radius `(I↓ ∩ L) ∪ (I↑ ∖ L)` and the pair `⟨L ∖ I, comp(L ∪ I)⟩`.
pub fn radius_pair(
    l: &DetOmegaAutomaton,
    under: &DetOmegaAutomaton,
    over: &DetOmegaAutomaton,
) -> Result<(DetOmegaAutomaton, DetOmegaAutomaton)> {
    let i = union(&intersection(under, l)?, &difference(over, l)?)?;
    Ok((reduce(&difference(l, &i)?), reduce(&union(l, &i)?.complement())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "state")]
pub enum Status {
    Running,
    Separated { separator: DetOmegaAutomaton },
    Exhausted,
}

/// Candidate as shown to the caller.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Offer {
    pub name: String,
    pub pattern: String,
    pub available: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub l1: DetOmegaAutomaton,
    pub l2: DetOmegaAutomaton,
    pub verdict: Verdict,
    pub candidates: Vec<Offer>,
    /// candidate taken from this step, filled in by the next one
    pub choice: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ApproximationSession {
    pub id: String,
    pub family: String,
    pub original: DetOmegaAutomaton,
    pub max_steps: usize,
    pub cap: usize,
    pub history: Vec<Step>,
    pub status: Status,
    #[serde(skip)]
    offered: Vec<Candidate>,
}

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

/// Certificate for the new pair that strictly extends the prefix of `prev`:
/// first with the old blocks and a longer prefix, otherwise the extracted
/// one with its prefix padded by its first block.
fn extend_prefix(c: &Certificate, prev: &Certificate, l1: &DetOmegaAutomaton, l2: &DetOmegaAutomaton) -> Result<Certificate> {
    let (Words::ThreeWord { x: px, x1: p1, x2: p2 }, Words::ThreeWord { x, x1, x2 }) = (&prev.words, &c.words) else {
        return Ok(c.clone());
    };
    let g = c.gamma()?;
    let mode = Mode::separate(l1.clone(), l2.clone());
    let flip = g.dual ^ (g.shape == Shape::ThreeWordDual);
    let (inside, avoid) = if flip { (l2.clone(), l1.complement()) } else { (l1.clone(), l2.complement()) };
    let k = l1.alphabet().len();
    let mut tried = 0;
    for n in 1.. {
        if tried >= PREFIX_SEARCH {
            break;
        }
        for v in words_of_length(k, n) {
            tried += 1;
            let y: Word = px.iter().chain(&v).copied().collect();
            if quick_check(&inside, &avoid, &y, p1, p2) {
                let e = Certificate::new(&g, c.mode, c.alphabet.clone(), Words::ThreeWord { x: y, x1: p1.clone(), x2: p2.clone() })?;
                if verify_certificate(&e, &mode)?.valid {
                    return Ok(e);
                }
            }
        }
    }
    let mut y = x.clone();
    while y.len() <= px.len() {
        y.extend_from_slice(x1);
    }
    let e = Certificate::new(&g, c.mode, c.alphabet.clone(), Words::ThreeWord { x: y, x1: x1.clone(), x2: x2.clone() })?;
    if !verify_certificate(&e, &mode)?.valid {
        return Err(Error::BadCertificate(format!("padded {e} does not verify")));
    }
    Ok(e)
}

fn step_for(
    l1: DetOmegaAutomaton,
    l2: DetOmegaAutomaton,
    g: &GammaDescriptor,
    cap: usize,
    prev: Option<&Certificate>,
) -> Result<(Step, Vec<Candidate>)> {
    let mut verdict = decide(&Mode::separate(l1.clone(), l2.clone()), g, &Options::default())?;
    if let (Some(p), Witness::Refuter { certificate: Some(c), .. }) = (prev, &mut verdict.witness) {
        *c = extend_prefix(c, p, &l1, &l2)?;
    }
    let offered = match verdict.certificate() {
        Some(c) if c.shape == Shape::ThreeWord => radius_candidates(c, &l1, &l2, cap)?,
        _ => Vec::new(),
    };
    let candidates = offered
        .iter()
        .map(|c| Offer {
            name: c.name.clone(),
            pattern: c.pattern.clone(),
            available: c.available(),
            error: c.error.clone(),
        })
        .collect();
    Ok((
        Step {
            l1,
            l2,
            verdict,
            candidates,
            choice: None,
        },
        offered,
    ))
}

impl ApproximationSession {
    pub fn current(&self) -> (&DetOmegaAutomaton, &DetOmegaAutomaton) {
        let s = self.history.last().expect("a session has an initial step");
        (&s.l1, &s.l2)
    }

    pub fn last(&self) -> &Step {
        self.history.last().expect("a session has an initial step")
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        self.last().verdict.certificate()
    }

    pub fn candidates(&self) -> &[Offer] {
        &self.last().candidates
    }

    pub fn steps_taken(&self) -> usize {
        self.history.len() - 1
    }

    pub fn gamma(&self) -> Result<GammaDescriptor> {
        make_gamma(&self.family)
    }

    fn settle(&mut self) {
        self.status = match &self.last().verdict.witness {
            Witness::Automaton { automaton } => Status::Separated {
                separator: automaton.clone(),
            },
            Witness::Refuter { .. } => {
                if self.steps_taken() >= self.max_steps || !self.offered.iter().any(Candidate::available) {
                    Status::Exhausted
                } else {
                    Status::Running
                }
            }
        };
    }

    /// Resolves a candidate name or a policy (`always-Ck`, `round-robin`).
    pub fn resolve(&self, choice: &str) -> Result<String> {
        let choice = choice.trim();
        if let Some(k) = choice.strip_prefix("always-") {
            return Ok(k.to_uppercase());
        }
        if choice == "round-robin" {
            let n = self.offered.len();
            let start = self.steps_taken();
            return (0..n)
                .map(|i| (start + i) % n)
                .find(|&i| self.offered[i].available())
                .map(|i| self.offered[i].name.clone())
                .ok_or_else(|| Error::Session("no candidate is available".into()));
        }
        Ok(choice.to_uppercase())
    }

    /// Rebuilds the candidate automata after deserialization.
    fn restore(&mut self) -> Result<()> {
        if !self.offered.is_empty() || self.status != Status::Running {
            return Ok(());
        }
        let Some(c) = self.certificate() else {
            return Ok(());
        };
        let (l1, l2) = self.current();
        self.offered = radius_candidates(c, l1, l2, self.cap)?;
        Ok(())
    }
}

/// Opens a session on `⟨L, comp(L)⟩` and solves its first game.
pub fn approx_start(l: &DetOmegaAutomaton, g: &GammaDescriptor) -> Result<ApproximationSession> {
    approx_start_with(l, g, DEFAULT_MAX_STEPS, DEFAULT_CAP)
}

pub fn approx_start_with(l: &DetOmegaAutomaton, g: &GammaDescriptor, max_steps: usize, cap: usize) -> Result<ApproximationSession> {
    let (step, offered) = step_for(l.clone(), l.complement(), g, cap, None)?;
    let mut s = ApproximationSession {
        id: format!("session-{}", NEXT_ID.fetch_add(1, Ordering::Relaxed)),
        family: g.name.clone(),
        original: l.clone(),
        max_steps,
        cap,
        history: vec![step],
        status: Status::Running,
        offered,
    };
    s.settle();
    Ok(s)
}

/// Installs the pair of the chosen candidate and solves the new game.
pub fn approx_step(mut s: ApproximationSession, choice: &str) -> Result<ApproximationSession> {
    match s.status {
        Status::Running => {}
        Status::Exhausted => return Err(Error::Session("session is exhausted".into())),
        Status::Separated { .. } => return Err(Error::Session("session is already separated".into())),
    }
    s.restore()?;
    let name = s.resolve(choice)?;
    let cand = s
        .offered
        .iter()
        .find(|c| c.name == name)
        .ok_or_else(|| Error::Session(format!("unknown candidate `{name}`")))?;
    let (l1, l2) = cand
        .pair
        .clone()
        .ok_or_else(|| Error::Session(format!("candidate {name} is unavailable: {}", cand.error.clone().unwrap_or_default())))?;
    let g = s.gamma()?;
    let prev = s.certificate().cloned();
    let (step, offered) = step_for(l1, l2, &g, s.cap, prev.as_ref())?;
    s.history.last_mut().unwrap().choice = Some(name);
    s.history.push(step);
    s.offered = offered;
    s.settle();
    Ok(s)
}

impl ApproximationSession {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sessions serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mut s: ApproximationSession =
            serde_json::from_str(text).map_err(|e| Error::Session(format!("bad session record: {e}")))?;
        if s.history.is_empty() {
            return Err(Error::Session("session record has no steps".into()));
        }
        s.restore()?;
        Ok(s)
    }

    /// Re-runs the recorded choices from the original language.
    pub fn replay(&self) -> Result<ApproximationSession> {
        let g = self.gamma()?;
        let mut s = approx_start_with(&self.original, &g, self.max_steps, self.cap)?;
        s.id = self.id.clone();
        for step in &self.history {
            if let Some(c) = &step.choice {
                s = approx_step(s, c)?;
            }
        }
        Ok(s)
    }

    /// Whether replaying the record reproduces its history and status.
    pub fn replays_exactly(&self) -> Result<bool> {
        let r = self.replay()?;
        Ok(r.history == self.history && r.status == self.status)
    }
}

#[cfg(test)]
mod tests;
