//! Families of deterministic automata described by an annotation alphabet
//! and two languages over it: the acceptance language and the structural
//! discipline of runs.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, LassoWord, Letter};
use crate::automaton::{Condition, DetOmegaAutomaton};
use crate::error::{Error, Result};
use crate::formula::{Formula, MarkSet};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    Dbw,
    Dcw,
    Parity { low: u32, high: u32 },
    Weak,
    WeakRange { low: u32, high: u32 },
    Bounded,
    El { formula: Formula, marks: Vec<String> },
    SuperParity { m: u32, n: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    ThreeWord,
    ThreeWordDual,
    Flower { low: u32, high: u32 },
    WeakChain { low: u32, high: u32 },
    WeakFive,
    BoundedSix,
    None,
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::ThreeWord => write!(f, "three-word"),
            Shape::ThreeWordDual => write!(f, "three-word-dual"),
            Shape::Flower { low, high } => write!(f, "flower({low},{high})"),
            Shape::WeakChain { low, high } => write!(f, "weak-chain({low},{high})"),
            Shape::WeakFive => write!(f, "weak-five"),
            Shape::BoundedSix => write!(f, "bounded-six"),
            Shape::None => write!(f, "none"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaDescriptor {
    pub name: String,
    pub family: Family,
    pub dual: bool,
    pub annotations: Alphabet,
    pub l_acc: DetOmegaAutomaton,
    pub l_struct: DetOmegaAutomaton,
    pub shape: Shape,
}

/// Automaton remembering the last letter read; state `l` carries `marks[l]`.
fn last_letter(
    sigma: &Alphabet,
    marks: Vec<MarkSet>,
    names: Vec<String>,
    condition: Condition,
) -> DetOmegaAutomaton {
    let k = sigma.len();
    let delta = (0..k).map(|_| (0..k).collect()).collect();
    DetOmegaAutomaton::new(sigma.clone(), 0, delta, marks, names, condition)
        .expect("last-letter automaton")
}

fn last_letter_parity(sigma: &Alphabet, colors: &[u32], low: u32, high: u32) -> DetOmegaAutomaton {
    let k = sigma.len();
    let delta = (0..k).map(|_| (0..k).collect()).collect();
    DetOmegaAutomaton::parity(sigma.clone(), 0, delta, colors.to_vec(), low, high)
        .expect("last-letter parity automaton")
}

/// States are letters plus a dead sink, entered when `ok(prev, next)` fails.
fn monotone(sigma: &Alphabet, ok: impl Fn(Letter, Letter) -> bool) -> DetOmegaAutomaton {
    let k = sigma.len();
    let dead = k;
    let mut delta: Vec<Vec<usize>> = (0..k)
        .map(|p| (0..k).map(|l| if ok(p, l) { l } else { dead }).collect())
        .collect();
    delta.push(vec![dead; k]);
    let mut marks = vec![0; k];
    marks.push(1);
    DetOmegaAutomaton::new(
        sigma.clone(),
        0,
        delta,
        marks,
        vec!["dead".into()],
        Condition::EmersonLei(Formula::Fin(0)),
    )
    .expect("monotone structure automaton")
}

fn acc_rej() -> Alphabet {
    Alphabet::new(&["acc", "rej"]).unwrap()
}

impl GammaDescriptor {
    pub fn new(family: Family) -> Result<Self> {
        let trivial = |a: &Alphabet| DetOmegaAutomaton::trivial(a.clone(), true);
        let (name, annotations, l_acc, l_struct, shape) = match &family {
            Family::Dbw => {
                let a = acc_rej();
                let acc = last_letter_parity(&a, &[1, 0], 0, 1);
                ("dbw".to_string(), a.clone(), acc, trivial(&a), Shape::ThreeWord)
            }
            Family::Dcw => {
                let a = acc_rej();
                let acc = last_letter_parity(&a, &[2, 1], 1, 2);
                ("dcw".to_string(), a.clone(), acc, trivial(&a), Shape::ThreeWordDual)
            }
            Family::Parity { low, high } => {
                check_range(*low, *high)?;
                let a = color_alphabet(*low, *high);
                let colors: Vec<u32> = (*low..=*high).collect();
                let acc = last_letter_parity(&a, &colors, *low, *high);
                (
                    format!("parity:{low}..{high}"),
                    a.clone(),
                    acc,
                    trivial(&a),
                    Shape::Flower {
                        low: *low,
                        high: *high,
                    },
                )
            }
            Family::Weak => {
                let a = acc_rej();
                let acc = last_letter_parity(&a, &[1, 0], 0, 1);
                let st = last_letter(
                    &a,
                    vec![1, 2],
                    vec!["ma".into(), "mr".into()],
                    Condition::EmersonLei(Formula::or(vec![Formula::Fin(0), Formula::Fin(1)])),
                );
                ("weak".to_string(), a, acc, st, Shape::WeakFive)
            }
            Family::WeakRange { low, high } => {
                check_range(*low, *high)?;
                let a = color_alphabet(*low, *high);
                let colors: Vec<u32> = (*low..=*high).collect();
                let acc = last_letter_parity(&a, &colors, *low, *high);
                let st = monotone(&a, |p, l| p <= l);
                (
                    format!("weak:{low}..{high}"),
                    a,
                    acc,
                    st,
                    Shape::WeakChain {
                        low: *low,
                        high: *high,
                    },
                )
            }
            Family::Bounded => {
                let a = Alphabet::new(&["acc", "rej", "?"]).unwrap();
                // only acc from some point on
                let acc = last_letter_parity(&a, &[1, 2, 2], 1, 2);
                // states: pre, A, R, dead
                let delta = vec![vec![1, 2, 0], vec![1, 3, 3], vec![3, 2, 3], vec![3, 3, 3]];
                let st = DetOmegaAutomaton::new(
                    a.clone(),
                    0,
                    delta,
                    vec![1, 0, 0, 2],
                    vec!["pre".into(), "dead".into()],
                    Condition::EmersonLei(Formula::and(vec![Formula::Fin(0), Formula::Fin(1)])),
                )?;
                ("bounded".to_string(), a, acc, st, Shape::BoundedSix)
            }
            Family::El { formula, marks } => {
                if marks.is_empty() || marks.len() > 6 {
                    return Err(Error::BadFamily("el needs between 1 and 6 marks".into()));
                }
                let syms: Vec<String> = (0..1u64 << marks.len())
                    .map(|s| {
                        let names: Vec<&str> = (0..marks.len())
                            .filter(|&m| s & (1 << m) != 0)
                            .map(|m| marks[m].as_str())
                            .collect();
                        format!("{{{}}}", names.join(","))
                    })
                    .collect();
                let a = Alphabet::new(&syms)?;
                let acc = last_letter(
                    &a,
                    (0..1u64 << marks.len()).collect(),
                    marks.clone(),
                    Condition::EmersonLei(formula.clone()),
                );
                (
                    format!("el:{}", formula.render(marks)),
                    a.clone(),
                    acc,
                    trivial(&a),
                    Shape::None,
                )
            }
            Family::SuperParity { m, n } => {
                if *m > 3 || *n > 3 {
                    return Err(Error::BadFamily("superparity is limited to m, n <= 3".into()));
                }
                let (m, n) = (*m as usize, *n as usize);
                let syms: Vec<String> = (0..=m)
                    .flat_map(|i| (0..=n).map(move |j| format!("{i},{j}")))
                    .collect();
                let a = Alphabet::new(&syms)?;
                // l_acc state (i, top) = last first component, largest second so far
                let state = |i: usize, t: usize| i * (n + 1) + t;
                let mut delta = Vec::new();
                let mut colors = Vec::new();
                for i in 0..=m {
                    for t in 0..=n {
                        delta.push(
                            (0..=m)
                                .flat_map(|i2| (0..=n).map(move |j2| state(i2, t.max(j2))))
                                .collect(),
                        );
                        colors.push((i + t) as u32);
                    }
                }
                let high = (m + n).max(1) as u32;
                let acc = DetOmegaAutomaton::parity(a.clone(), 0, delta, colors, 0, high)?;
                let st = monotone(&a, |p, l| p % (n + 1) <= l % (n + 1));
                (
                    format!("superparity:{m},{n}"),
                    a,
                    acc,
                    st,
                    Shape::None,
                )
            }
        };
        Ok(GammaDescriptor {
            name,
            family,
            dual: false,
            annotations,
            l_acc,
            l_struct,
            shape,
        })
    }

    /// Parses `dbw`, `dcw`, `parity:i..k`, `weak`, `weak:i..k`, `bounded`,
    /// `el:<assertion>`, `superparity:m,n`, or `dual(<family>)`.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if let Some(inner) = spec.strip_prefix("dual(").and_then(|s| s.strip_suffix(')')) {
            return Ok(Self::parse(inner)?.dualize());
        }
        let range = |s: &str| -> Result<(u32, u32)> {
            let (a, b) = s
                .split_once("..")
                .ok_or_else(|| Error::BadFamily(format!("expected i..k, got `{s}`")))?;
            let a = a.trim().parse().map_err(|_| Error::BadFamily(s.to_string()))?;
            let b = b.trim().parse().map_err(|_| Error::BadFamily(s.to_string()))?;
            Ok((a, b))
        };
        let family = match spec {
            "dbw" => Family::Dbw,
            "dcw" => Family::Dcw,
            "weak" => Family::Weak,
            "bounded" => Family::Bounded,
            _ => {
                if let Some(r) = spec.strip_prefix("parity:") {
                    let (low, high) = range(r)?;
                    Family::Parity { low, high }
                } else if let Some(r) = spec.strip_prefix("weak:") {
                    let (low, high) = range(r)?;
                    Family::WeakRange { low, high }
                } else if let Some(r) = spec.strip_prefix("superparity:") {
                    let (m, n) = r
                        .split_once(',')
                        .ok_or_else(|| Error::BadFamily(format!("expected m,n, got `{r}`")))?;
                    Family::SuperParity {
                        m: m.trim().parse().map_err(|_| Error::BadFamily(r.to_string()))?,
                        n: n.trim().parse().map_err(|_| Error::BadFamily(r.to_string()))?,
                    }
                } else if let Some(r) = spec.strip_prefix("el:") {
                    let mut marks = Vec::new();
                    let formula = Formula::parse(r, &mut marks)
                        .map_err(|e| Error::BadFamily(format!("assertion: {e}")))?;
                    Family::El { formula, marks }
                } else {
                    return Err(Error::BadFamily(format!("unknown family `{spec}`")));
                }
            }
        };
        Self::new(family)
    }

    /// Same annotations and structure, complemented acceptance.
    pub fn dualize(&self) -> Self {
        match (&self.family, self.dual) {
            (Family::Dbw, false) => return Self::new(Family::Dcw).unwrap(),
            (Family::Dcw, false) => return Self::new(Family::Dbw).unwrap(),
            _ => {}
        }
        let name = match self.name.strip_prefix("dual(").and_then(|s| s.strip_suffix(')')) {
            Some(inner) => inner.to_string(),
            None => format!("dual({})", self.name),
        };
        GammaDescriptor {
            name,
            family: self.family.clone(),
            dual: !self.dual,
            annotations: self.annotations.clone(),
            l_acc: self.l_acc.complement(),
            l_struct: self.l_struct.clone(),
            shape: self.shape,
        }
    }

    pub fn accepts_annotation(&self, y: &LassoWord) -> Result<bool> {
        self.l_acc.accepts(y)
    }

    pub fn structural(&self, y: &LassoWord) -> Result<bool> {
        self.l_struct.accepts(y)
    }

    pub fn has_trivial_struct(&self) -> bool {
        self.l_struct.num_states() == 1 && self.l_struct.formula().eval(self.l_struct.marks(0))
    }

    /// Per-letter marks and condition such that a run's annotation sequence
    /// is accepted iff its letter marks satisfy the condition. `None` when
    /// acceptance needs memory beyond the last letter.
    pub fn letter_condition(&self) -> Option<(Vec<MarkSet>, Vec<String>, Condition)> {
        let acc = &self.l_acc;
        let k = self.annotations.len();
        // last-letter shape: state l is reached by letter l from everywhere
        let memoryless = acc.num_states() == k
            && (0..k).all(|q| (0..k).all(|l| acc.succ(q, l) == l));
        memoryless.then(|| {
            (
                (0..k).map(|l| acc.marks(l)).collect(),
                acc.mark_names().to_vec(),
                acc.condition().clone(),
            )
        })
    }

    /// Annotation letter by name.
    pub fn letter(&self, name: &str) -> Result<Letter> {
        self.annotations.letter(name)
    }
}

impl fmt::Display for GammaDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

fn check_range(low: u32, high: u32) -> Result<()> {
    if low > 1 || low > high || high > 8 {
        return Err(Error::BadFamily(format!("bad color range {low}..{high}")));
    }
    Ok(())
}

fn color_alphabet(low: u32, high: u32) -> Alphabet {
    let syms: Vec<String> = (low..=high).map(|c| c.to_string()).collect();
    Alphabet::new(&syms).unwrap()
}

pub fn make_gamma(spec: &str) -> Result<GammaDescriptor> {
    GammaDescriptor::parse(spec)
}
