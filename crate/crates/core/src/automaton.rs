use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, Letter, LassoWord};
use crate::error::{Error, Result};
use crate::formula::{Formula, MarkSet};

pub type State = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Condition {
    /// Max color visited infinitely often is odd; color `c` is mark `c`.
    Parity { low: u32, high: u32 },
    EmersonLei(Formula),
}

/// Deterministic automaton with total transitions and state-based marks.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DetOmegaAutomaton {
    alphabet: Alphabet,
    initial: State,
    delta: Vec<Vec<State>>,
    marks: Vec<MarkSet>,
    mark_names: Vec<String>,
    condition: Condition,
}

impl DetOmegaAutomaton {
    pub fn new(
        alphabet: Alphabet,
        initial: State,
        delta: Vec<Vec<State>>,
        marks: Vec<MarkSet>,
        mark_names: Vec<String>,
        condition: Condition,
    ) -> Result<Self> {
        let n = delta.len();
        if n == 0 {
            return Err(Error::Invalid("automaton needs at least one state".into()));
        }
        if initial >= n || marks.len() != n {
            return Err(Error::Invalid("initial state or labeling out of range".into()));
        }
        for (q, row) in delta.iter().enumerate() {
            if row.len() != alphabet.len() {
                let l = row.len().min(alphabet.len() - 1);
                return Err(Error::NotTotal {
                    state: q,
                    letter: alphabet.name(l).to_string(),
                });
            }
            if row.iter().any(|&t| t >= n) {
                return Err(Error::Invalid(format!("state {q} has a successor out of range")));
            }
        }
        if mark_names.len() > 64 {
            return Err(Error::Invalid("at most 64 marks are supported".into()));
        }
        match &condition {
            Condition::Parity { low, high } => {
                if *low > 1 || low > high {
                    return Err(Error::Invalid(format!("bad parity range {low}..{high}")));
                }
                for (q, &m) in marks.iter().enumerate() {
                    if m.count_ones() != 1 {
                        return Err(Error::Invalid(format!("state {q} must carry exactly one color")));
                    }
                    let c = m.trailing_zeros();
                    if c < *low || c > *high {
                        return Err(Error::ColorOutOfRange {
                            state: q,
                            color: c,
                            low: *low,
                            high: *high,
                        });
                    }
                }
            }
            Condition::EmersonLei(f) => {
                let all = if mark_names.len() == 64 {
                    u64::MAX
                } else {
                    (1u64 << mark_names.len()) - 1
                };
                if f.marks() & !all != 0 || marks.iter().any(|m| m & !all != 0) {
                    return Err(Error::Invalid("mark outside the declared universe".into()));
                }
            }
        }
        Ok(DetOmegaAutomaton {
            alphabet,
            initial,
            delta,
            marks,
            mark_names,
            condition,
        })
    }

    /// Parity automaton from per-state colors.
    pub fn parity(
        alphabet: Alphabet,
        initial: State,
        delta: Vec<Vec<State>>,
        colors: Vec<u32>,
        low: u32,
        high: u32,
    ) -> Result<Self> {
        if high >= 64 {
            return Err(Error::Invalid("color too large".into()));
        }
        let names = (0..=high).map(|c| c.to_string()).collect();
        let marks = colors.iter().map(|&c| 1u64 << c.min(63)).collect();
        Self::new(
            alphabet,
            initial,
            delta,
            marks,
            names,
            Condition::Parity { low, high },
        )
    }

    /// Single state accepting everything (`true`) or nothing.
    pub fn trivial(alphabet: Alphabet, accept: bool) -> Self {
        let k = alphabet.len();
        Self::parity(alphabet, 0, vec![vec![0; k]], vec![accept as u32], 0, 1).unwrap()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.delta.len()
    }

    pub fn initial(&self) -> State {
        self.initial
    }

    pub fn succ(&self, q: State, l: Letter) -> State {
        self.delta[q][l]
    }

    pub fn delta(&self) -> &[Vec<State>] {
        &self.delta
    }

    pub fn marks(&self, q: State) -> MarkSet {
        self.marks[q]
    }

    pub fn all_marks(&self) -> &[MarkSet] {
        &self.marks
    }

    pub fn mark_names(&self) -> &[String] {
        &self.mark_names
    }

    pub fn condition(&self) -> &Condition {
        &self.condition
    }

    pub fn is_parity(&self) -> bool {
        matches!(self.condition, Condition::Parity { .. })
    }

    pub fn color(&self, q: State) -> Option<u32> {
        match self.condition {
            Condition::Parity { .. } => Some(self.marks[q].trailing_zeros()),
            Condition::EmersonLei(_) => None,
        }
    }

    pub fn parity_range(&self) -> Option<(u32, u32)> {
        match self.condition {
            Condition::Parity { low, high } => Some((low, high)),
            Condition::EmersonLei(_) => None,
        }
    }

    /// The acceptance condition as an assertion over the marks.
    pub fn formula(&self) -> Formula {
        match &self.condition {
            Condition::Parity { low, high } => Formula::parity(*low, *high),
            Condition::EmersonLei(f) => f.clone(),
        }
    }

    pub fn run(&self, word: &[Letter]) -> State {
        word.iter().fold(self.initial, |q, &l| self.delta[q][l])
    }

    /// Marks visited infinitely often by the run on `w`.
    pub fn lasso_inf_marks(&self, w: &LassoWord) -> Result<MarkSet> {
        w.check_alphabet(&self.alphabet)?;
        let mut q = self.run(&w.prefix);
        let mut seen: HashMap<State, usize> = HashMap::new();
        let mut starts = Vec::new();
        while !seen.contains_key(&q) {
            seen.insert(q, starts.len());
            starts.push(q);
            q = w.period.iter().fold(q, |q, &l| self.delta[q][l]);
        }
        let mut inf = 0;
        for &s in &starts[seen[&q]..] {
            let mut p = s;
            for &l in &w.period {
                p = self.delta[p][l];
                inf |= self.marks[p];
            }
        }
        Ok(inf)
    }

    pub fn accepts(&self, w: &LassoWord) -> Result<bool> {
        Ok(self.formula().eval(self.lasso_inf_marks(w)?))
    }

    /// Reachable part renumbered in BFS order, letters explored in alphabet order.
    pub fn canonical(&self) -> Self {
        let n = self.num_states();
        let mut id = vec![usize::MAX; n];
        let mut order = vec![self.initial];
        id[self.initial] = 0;
        let mut queue = VecDeque::from([self.initial]);
        while let Some(q) = queue.pop_front() {
            for &t in &self.delta[q] {
                if id[t] == usize::MAX {
                    id[t] = order.len();
                    order.push(t);
                    queue.push_back(t);
                }
            }
        }
        DetOmegaAutomaton {
            alphabet: self.alphabet.clone(),
            initial: 0,
            delta: order
                .iter()
                .map(|&q| self.delta[q].iter().map(|&t| id[t]).collect())
                .collect(),
            marks: order.iter().map(|&q| self.marks[q]).collect(),
            mark_names: self.mark_names.clone(),
            condition: self.condition.clone(),
        }
    }

    pub fn with_condition(&self, marks: Vec<MarkSet>, names: Vec<String>, condition: Condition) -> Result<Self> {
        Self::new(
            self.alphabet.clone(),
            self.initial,
            self.delta.clone(),
            marks,
            names,
            condition,
        )
    }

    /// Same structure, acceptance flipped.
    pub fn complement(&self) -> Self {
        match &self.condition {
            Condition::Parity { low, high } => {
                let (shift_down, low2, high2) = if *low == 1 {
                    (true, 0, high - 1)
                } else {
                    (false, 1, high + 1)
                };
                let colors: Vec<u32> = (0..self.num_states())
                    .map(|q| {
                        let c = self.color(q).unwrap();
                        if shift_down {
                            // c >= 1: c+1-2
                            c - 1
                        } else {
                            c + 1
                        }
                    })
                    .collect();
                Self::parity(
                    self.alphabet.clone(),
                    self.initial,
                    self.delta.clone(),
                    colors,
                    low2,
                    high2,
                )
                .expect("shifted colors stay in range")
            }
            Condition::EmersonLei(f) => DetOmegaAutomaton {
                condition: Condition::EmersonLei(f.negate()),
                ..self.clone()
            },
        }
    }

    pub fn to_graph(&self) -> OmegaGraph {
        OmegaGraph {
            alphabet: self.alphabet.clone(),
            initial: vec![self.initial],
            succ: self
                .delta
                .iter()
                .map(|row| row.iter().map(|&t| vec![t]).collect())
                .collect(),
            marks: self.marks.clone(),
            formula: self.formula(),
        }
    }
}

/// Nondeterministic Büchi automaton; no totality requirement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NondetBuchiAutomaton {
    alphabet: Alphabet,
    initial: Vec<State>,
    delta: Vec<Vec<Vec<State>>>,
    accepting: Vec<bool>,
}

impl NondetBuchiAutomaton {
    pub fn new(
        alphabet: Alphabet,
        initial: Vec<State>,
        delta: Vec<Vec<Vec<State>>>,
        accepting: Vec<bool>,
    ) -> Result<Self> {
        let n = delta.len();
        if accepting.len() != n || initial.iter().any(|&q| q >= n) {
            return Err(Error::Invalid("NBW components disagree in size".into()));
        }
        for row in &delta {
            if row.len() != alphabet.len() {
                return Err(Error::Invalid("NBW row width differs from alphabet".into()));
            }
            if row.iter().flatten().any(|&t| t >= n) {
                return Err(Error::Invalid("NBW successor out of range".into()));
            }
        }
        let mut delta = delta;
        for row in &mut delta {
            for s in row.iter_mut() {
                s.sort_unstable();
                s.dedup();
            }
        }
        let mut initial = initial;
        initial.sort_unstable();
        initial.dedup();
        Ok(NondetBuchiAutomaton {
            alphabet,
            initial,
            delta,
            accepting,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.delta.len()
    }

    pub fn initial(&self) -> &[State] {
        &self.initial
    }

    pub fn succ(&self, q: State, l: Letter) -> &[State] {
        &self.delta[q][l]
    }

    pub fn is_accepting(&self, q: State) -> bool {
        self.accepting[q]
    }

    /// Disjoint union.
    pub fn union(&self, other: &Self) -> Result<Self> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch("union".into()));
        }
        let off = self.num_states();
        let mut delta = self.delta.clone();
        delta.extend(
            other
                .delta
                .iter()
                .map(|row| row.iter().map(|s| s.iter().map(|t| t + off).collect()).collect()),
        );
        let mut initial = self.initial.clone();
        initial.extend(other.initial.iter().map(|q| q + off));
        let mut accepting = self.accepting.clone();
        accepting.extend(other.accepting.iter());
        Self::new(self.alphabet.clone(), initial, delta, accepting)
    }

    pub fn to_graph(&self) -> OmegaGraph {
        OmegaGraph {
            alphabet: self.alphabet.clone(),
            initial: self.initial.clone(),
            succ: self.delta.clone(),
            marks: self.accepting.iter().map(|&a| a as u64).collect(),
            formula: Formula::Inf(0),
        }
    }

    pub fn accepts(&self, w: &LassoWord) -> Result<bool> {
        w.check_alphabet(&self.alphabet)?;
        Ok(!crate::algebra::graph_is_empty(&crate::algebra::graph_times_lasso(&self.to_graph(), w)).0)
    }
}

impl From<&DetOmegaAutomaton> for NondetBuchiAutomaton {
    /// Only meaningful for Büchi-shaped parity automata (colors 0/1).
    fn from(a: &DetOmegaAutomaton) -> Self {
        NondetBuchiAutomaton {
            alphabet: a.alphabet.clone(),
            initial: vec![a.initial],
            delta: a
                .delta
                .iter()
                .map(|row| row.iter().map(|&t| vec![t]).collect())
                .collect(),
            accepting: (0..a.num_states())
                .map(|q| a.formula().eval(a.marks(q)))
                .collect(),
        }
    }
}

/// Nondeterministic automaton with marks and an Emerson-Lei assertion;
/// the common currency of emptiness and inclusion checks.
#[derive(Debug, Clone)]
pub struct OmegaGraph {
    pub alphabet: Alphabet,
    pub initial: Vec<State>,
    pub succ: Vec<Vec<Vec<State>>>,
    pub marks: Vec<MarkSet>,
    pub formula: Formula,
}

impl OmegaGraph {
    pub fn num_states(&self) -> usize {
        self.succ.len()
    }

    pub fn targets(&self, q: State) -> impl Iterator<Item = State> + '_ {
        self.succ[q].iter().flatten().copied()
    }

    pub fn labelled(&self, q: State) -> impl Iterator<Item = (Letter, State)> + '_ {
        self.succ[q]
            .iter()
            .enumerate()
            .flat_map(|(l, ts)| ts.iter().map(move |&t| (l, t)))
    }

    /// Marks used by the assertion.
    pub fn mark_width(&self) -> u32 {
        let m = self.formula.marks() | self.marks.iter().fold(0, |a, b| a | b);
        64 - m.leading_zeros()
    }
}
