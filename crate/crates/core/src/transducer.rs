//! Refuter transducers: read annotations, answer with letters. The initial
//! state produces nothing; every other state carries the letter it emits
//! after being entered.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, LassoWord, Letter};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefuterTransducer {
    pub inputs: Alphabet,
    pub outputs: Alphabet,
    pub initial: usize,
    pub delta: Vec<Vec<usize>>,
    pub output: Vec<Option<Letter>>,
}

impl RefuterTransducer {
    pub fn new(
        inputs: Alphabet,
        outputs: Alphabet,
        initial: usize,
        delta: Vec<Vec<usize>>,
        output: Vec<Option<Letter>>,
    ) -> Result<Self> {
        let n = delta.len();
        if n == 0 || initial >= n || output.len() != n {
            return Err(Error::Invalid("malformed transducer".into()));
        }
        for row in &delta {
            if row.len() != inputs.len() || row.iter().any(|&t| t >= n) {
                return Err(Error::Invalid("transducer transitions must be total".into()));
            }
        }
        if output.iter().flatten().any(|&l| l >= outputs.len()) {
            return Err(Error::Invalid("output letter out of range".into()));
        }
        Ok(RefuterTransducer {
            inputs,
            outputs,
            initial,
            delta,
            output,
        })
    }

    pub fn num_states(&self) -> usize {
        self.delta.len()
    }

    pub fn step(&self, s: usize, a: Letter) -> (usize, Option<Letter>) {
        let t = self.delta[s][a];
        (t, self.output[t])
    }

    /// Letters produced while reading `y`.
    pub fn run(&self, y: &[Letter]) -> Result<Vec<Letter>> {
        let mut s = self.initial;
        let mut out = Vec::with_capacity(y.len());
        for &a in y {
            let (t, o) = self.step(s, a);
            out.push(o.ok_or_else(|| Error::Invalid(format!("state {t} has no output")))?);
            s = t;
        }
        Ok(out)
    }

    /// The answer to an ultimately periodic input, as a lasso.
    pub fn run_lasso(&self, y: &LassoWord) -> Result<LassoWord> {
        let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
        let p = y.prefix.len();
        let k = y.period.len();
        let mut s = self.initial;
        let mut out = Vec::new();
        let mut i = 0;
        loop {
            if i >= p {
                let key = (s, (i - p) % k);
                if let Some(&j) = seen.get(&key) {
                    let period = out[j..].to_vec();
                    out.truncate(j);
                    return Ok(LassoWord::new(out, period)?.canonical());
                }
                seen.insert(key, i);
            }
            let (t, o) = self.step(s, y.at(i));
            out.push(o.ok_or_else(|| Error::Invalid(format!("state {t} has no output")))?);
            s = t;
            i += 1;
        }
    }

    /// Reachable part in BFS order.
    pub fn trim(&self) -> Self {
        let n = self.num_states();
        let mut id = vec![usize::MAX; n];
        let mut order = vec![self.initial];
        id[self.initial] = 0;
        let mut i = 0;
        while i < order.len() {
            for &t in &self.delta[order[i]] {
                if id[t] == usize::MAX {
                    id[t] = order.len();
                    order.push(t);
                }
            }
            i += 1;
        }
        RefuterTransducer {
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            initial: 0,
            delta: order
                .iter()
                .map(|&s| self.delta[s].iter().map(|&t| id[t]).collect())
                .collect(),
            output: order.iter().map(|&s| self.output[s]).collect(),
        }
    }

    /// Moore minimization of the trimmed machine. The initial state's output
    /// is never observed, so it is merged into any class it agrees with on
    /// successors.
    pub fn minimize(&self) -> Self {
        let t = self.trim();
        let n = t.num_states();
        let mut class: Vec<usize> = {
            let mut ids: BTreeMap<Option<Letter>, usize> = BTreeMap::new();
            for o in &t.output {
                let next = ids.len();
                ids.entry(*o).or_insert(next);
            }
            t.output.iter().map(|o| ids[o]).collect()
        };
        loop {
            let mut ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
            let next: Vec<usize> = (0..n)
                .map(|s| {
                    let key = (class[s], t.delta[s].iter().map(|&x| class[x]).collect());
                    let fresh = ids.len();
                    *ids.entry(key).or_insert(fresh)
                })
                .collect();
            let stable = ids.len() == class.iter().max().map_or(0, |m| m + 1);
            class = next;
            if stable {
                break;
            }
        }
        let init = t.initial;
        let init_row: Vec<usize> = t.delta[init].iter().map(|&x| class[x]).collect();
        let alone = (0..n).all(|s| s == init || class[s] != class[init]);
        if t.output[init].is_none() && alone {
            if let Some(s) = (0..n).find(|&s| {
                s != init && t.delta[s].iter().map(|&x| class[x]).collect::<Vec<_>>() == init_row
            }) {
                let target = class[s];
                let old = class[init];
                for c in class.iter_mut() {
                    if *c == old {
                        *c = target;
                    }
                }
            }
        }
        // renumber classes in order of first member, initial first
        let mut renum: HashMap<usize, usize> = HashMap::new();
        let mut reps = Vec::new();
        for s in std::iter::once(init).chain(0..n) {
            if let std::collections::hash_map::Entry::Vacant(e) = renum.entry(class[s]) {
                e.insert(reps.len());
                reps.push(s);
            }
        }
        let out = RefuterTransducer {
            inputs: t.inputs.clone(),
            outputs: t.outputs.clone(),
            initial: 0,
            delta: reps
                .iter()
                .map(|&s| t.delta[s].iter().map(|&x| renum[&class[x]]).collect())
                .collect(),
            output: reps
                .iter()
                .map(|&s| {
                    if s == init && t.output[s].is_none() {
                        // merged initial keeps the class output
                        (0..n).filter(|&x| class[x] == class[s]).find_map(|x| t.output[x])
                    } else {
                        t.output[s]
                    }
                })
                .collect(),
        };
        out.trim()
    }

    /// Plain-text rendering: one line per state.
    pub fn render(&self) -> String {
        let mut s = format!("initial {}\n", self.initial);
        for (i, row) in self.delta.iter().enumerate() {
            let o = self.output[i].map_or("-", |l| self.outputs.name(l));
            s.push_str(&format!("{i} out {o} :"));
            for (a, &t) in row.iter().enumerate() {
                s.push_str(&format!(" {}->{t}", self.inputs.name(a)));
            }
            s.push('\n');
        }
        s
    }
}
