//! Word certificates: tuples of finite words whose pattern languages sit
//! inside or outside the language in a way no automaton of the family allows.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{is_disjoint, is_subset};
use crate::alphabet::{Alphabet, Word};
use crate::automaton::DetOmegaAutomaton;
use crate::error::{Error, Result};
use crate::game::Mode;
use crate::gamma::{make_gamma, GammaDescriptor, Shape};
use crate::pattern::{OmegaPattern, Regex};

mod extract;
mod rebuild;
mod search;

pub use extract::extract_certificate;
pub use rebuild::refuter_from_certificate;
pub use search::{radius_candidates, shortest_certificate_bruteforce, Candidate, MAX_BRUTE_FORCE};
pub(crate) use search::{quick_check, words_of_length};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CertMode {
    Recognize,
    Separate,
}

impl From<&Mode> for CertMode {
    fn from(m: &Mode) -> Self {
        if m.is_separate() {
            CertMode::Separate
        } else {
            CertMode::Recognize
        }
    }
}

/// Word payload; block lists are indexed by color minus the lowest color.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Words {
    ThreeWord { x: Word, x1: Word, x2: Word },
    Flower { x: Word, blocks: Vec<Word> },
    WeakChain { hats: Vec<Word>, blocks: Vec<Word> },
    WeakFive { x: Word, x1: Word, x2: Word, x3: Word, x4: Word },
    BoundedSix { hats: [Word; 3], blocks: [Word; 3] },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "Record", try_from = "Record")]
pub struct Certificate {
    pub shape: Shape,
    pub family: String,
    pub mode: CertMode,
    pub alphabet: Alphabet,
    pub words: Words,
}

/// Which side of the pair a pattern must fall into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// inside `L`, or inside `L1`
    Inside,
    /// disjoint from `L`, or inside `L2`
    Outside,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub pattern: String,
    pub side: Side,
    pub holds: bool,
    pub counterexample: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub valid: bool,
    pub checks: Vec<Check>,
}

fn cat(parts: Vec<Regex>) -> Regex {
    Regex::concat(parts)
}

fn w(x: &[usize]) -> Regex {
    Regex::word(x)
}

fn star_of(ws: &[&Word]) -> Regex {
    Regex::star(Regex::union(ws.iter().map(|x| w(x)).collect()))
}

impl Words {
    pub fn all(&self) -> Vec<&Word> {
        match self {
            Words::ThreeWord { x, x1, x2 } => vec![x, x1, x2],
            Words::Flower { x, blocks } => std::iter::once(x).chain(blocks).collect(),
            Words::WeakChain { hats, blocks } => hats.iter().chain(blocks).collect(),
            Words::WeakFive { x, x1, x2, x3, x4 } => vec![x, x1, x2, x3, x4],
            Words::BoundedSix { hats, blocks } => hats.iter().chain(blocks.iter()).collect(),
        }
    }

    fn plus_blocks(&self) -> Vec<&Word> {
        match self {
            Words::ThreeWord { x1, x2, .. } => vec![x1, x2],
            Words::Flower { blocks, .. } | Words::WeakChain { blocks, .. } => blocks.iter().collect(),
            Words::WeakFive { x1, x3, .. } => vec![x1, x3],
            Words::BoundedSix { blocks, .. } => blocks.iter().collect(),
        }
    }

    /// Patterns in their base orientation.
    fn patterns(&self, low: u32) -> Result<Vec<(OmegaPattern, Side)>> {
        let by_color = |l: u32| if l % 2 == 0 { Side::Inside } else { Side::Outside };
        Ok(match self {
            Words::ThreeWord { x, x1, x2 } => vec![
                (OmegaPattern::new(cat(vec![w(x), star_of(&[x1, x2])]), w(x1))?, Side::Inside),
                (OmegaPattern::new(w(x), cat(vec![star_of(&[x1]), w(x2)]))?, Side::Outside),
            ],
            Words::Flower { x, blocks } => {
                let all: Vec<&Word> = blocks.iter().collect();
                let mut v = Vec::new();
                for (j, b) in blocks.iter().enumerate() {
                    let period = if j == 0 {
                        w(b)
                    } else {
                        cat(vec![star_of(&all[..j]), w(b)])
                    };
                    let p = OmegaPattern::new(cat(vec![w(x), star_of(&all)]), period)?;
                    v.push((p, by_color(low + j as u32)));
                }
                v
            }
            Words::WeakChain { hats, blocks } => {
                let mut v = Vec::new();
                for j in 0..blocks.len() {
                    let mut prefix = Vec::new();
                    for m in 0..j {
                        prefix.push(w(&hats[m]));
                        prefix.push(star_of(&[&blocks[m]]));
                    }
                    prefix.push(w(&hats[j]));
                    let p = OmegaPattern::new(cat(prefix), w(&blocks[j]))?;
                    v.push((p, by_color(low + j as u32)));
                }
                v
            }
            Words::WeakFive { x, x1, x2, x3, x4 } => {
                let loopy = Regex::star(Regex::union(vec![
                    w(x1),
                    cat(vec![w(x2), star_of(&[x3]), w(x4)]),
                ]));
                vec![
                    (OmegaPattern::new(cat(vec![w(x), loopy.clone()]), w(x1))?, Side::Inside),
                    (OmegaPattern::new(cat(vec![w(x), loopy, w(x2)]), w(x3))?, Side::Outside),
                ]
            }
            Words::BoundedSix { hats, blocks } => {
                let head = |i: usize| cat(vec![w(&hats[0]), star_of(&[&blocks[0]]), w(&hats[i])]);
                vec![
                    (OmegaPattern::new(head(1), w(&blocks[1]))?, Side::Inside),
                    (OmegaPattern::new(head(2), w(&blocks[2]))?, Side::Outside),
                ]
            }
        })
    }
}

fn shape_matches(shape: Shape, words: &Words) -> bool {
    match (shape, words) {
        (Shape::ThreeWord | Shape::ThreeWordDual, Words::ThreeWord { .. }) => true,
        (Shape::Flower { low, high }, Words::Flower { blocks, .. }) => blocks.len() == (high - low + 1) as usize,
        (Shape::WeakChain { low, high }, Words::WeakChain { hats, blocks }) => {
            blocks.len() == (high - low + 1) as usize && hats.len() == blocks.len()
        }
        (Shape::WeakFive, Words::WeakFive { .. }) | (Shape::BoundedSix, Words::BoundedSix { .. }) => true,
        _ => false,
    }
}

fn low_of(shape: Shape) -> u32 {
    match shape {
        Shape::Flower { low, .. } | Shape::WeakChain { low, .. } => low,
        _ => 0,
    }
}

impl Certificate {
    pub fn new(g: &GammaDescriptor, mode: CertMode, alphabet: Alphabet, words: Words) -> Result<Self> {
        let c = Certificate {
            shape: g.shape,
            family: g.name.clone(),
            mode,
            alphabet,
            words,
        };
        c.validate()?;
        Ok(c)
    }

    /// `⟨ε, b, a⟩` for three words over `{a, b}`.
    pub fn three_word(family: &str, alphabet: &Alphabet, x: &str, x1: &str, x2: &str) -> Result<Self> {
        let g = make_gamma(family)?;
        let words = Words::ThreeWord {
            x: alphabet.parse_word(x)?,
            x1: alphabet.parse_word(x1)?,
            x2: alphabet.parse_word(x2)?,
        };
        Self::new(&g, CertMode::Recognize, alphabet.clone(), words)
    }

    fn validate(&self) -> Result<()> {
        if !shape_matches(self.shape, &self.words) {
            return Err(Error::BadCertificate(format!("words do not fit shape {}", self.shape)));
        }
        if self.words.plus_blocks().iter().any(|b| b.is_empty()) {
            return Err(Error::EmptyBlock("certificate blocks must be non-empty".into()));
        }
        if self.words.all().iter().any(|x| x.iter().any(|&l| l >= self.alphabet.len())) {
            return Err(Error::BadCertificate("letter outside the alphabet".into()));
        }
        Ok(())
    }

    pub fn gamma(&self) -> Result<GammaDescriptor> {
        let g = make_gamma(&self.family)?;
        if g.shape != self.shape {
            return Err(Error::BadCertificate(format!(
                "family {} expects shape {}, not {}",
                g.name, g.shape, self.shape
            )));
        }
        Ok(g)
    }

    pub fn length(&self) -> usize {
        self.words.all().iter().map(|x| x.len()).sum()
    }

    /// Patterns with the side each must fall into.
    pub fn patterns(&self) -> Result<Vec<(OmegaPattern, Side)>> {
        let g = self.gamma()?;
        let flip = g.dual ^ (self.shape == Shape::ThreeWordDual);
        Ok(self
            .words
            .patterns(low_of(self.shape))?
            .into_iter()
            .map(|(p, s)| {
                let s = match (s, flip) {
                    (s, false) => s,
                    (Side::Inside, true) => Side::Outside,
                    (Side::Outside, true) => Side::Inside,
                };
                (p, s)
            })
            .collect())
    }

    /// Named words in display order.
    pub fn named_words(&self) -> Vec<(String, &Word)> {
        let low = low_of(self.shape);
        match &self.words {
            Words::ThreeWord { x, x1, x2 } => vec![("x".into(), x), ("x1".into(), x1), ("x2".into(), x2)],
            Words::Flower { x, blocks } => std::iter::once(("x".to_string(), x))
                .chain(blocks.iter().enumerate().map(|(j, b)| (format!("x{}", low + j as u32), b)))
                .collect(),
            Words::WeakChain { hats, blocks } => {
                let mut v = Vec::new();
                for j in 0..blocks.len() {
                    v.push((format!("xhat{}", low + j as u32), &hats[j]));
                    v.push((format!("x{}", low + j as u32), &blocks[j]));
                }
                v
            }
            Words::WeakFive { x, x1, x2, x3, x4 } => vec![
                ("x".into(), x),
                ("x1".into(), x1),
                ("x2".into(), x2),
                ("x3".into(), x3),
                ("x4".into(), x4),
            ],
            Words::BoundedSix { hats, blocks } => (0..3)
                .flat_map(|i| [(format!("xhat{i}"), &hats[i]), (format!("x{i}"), &blocks[i])])
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::BadCertificate(e.to_string()))
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .named_words()
            .iter()
            .map(|(_, x)| {
                if x.is_empty() {
                    "ε".to_string()
                } else {
                    self.alphabet.format_word(x)
                }
            })
            .collect();
        write!(f, "⟨{}⟩", parts.join(", "))
    }
}

#[derive(Serialize, Deserialize)]
struct Record {
    shape: String,
    family: String,
    mode: CertMode,
    alphabet: Vec<String>,
    words: BTreeMap<String, String>,
}

impl From<Certificate> for Record {
    fn from(c: Certificate) -> Self {
        Record {
            shape: c.shape.to_string(),
            family: c.family.clone(),
            mode: c.mode,
            alphabet: c.alphabet.symbols().to_vec(),
            words: c
                .named_words()
                .into_iter()
                .map(|(k, x)| (k, c.alphabet.format_word(x)))
                .collect(),
        }
    }
}

impl TryFrom<Record> for Certificate {
    type Error = Error;

    fn try_from(r: Record) -> Result<Self> {
        let g = make_gamma(&r.family)?;
        if g.shape.to_string() != r.shape {
            return Err(Error::BadCertificate(format!(
                "family {} expects shape {}, not {}",
                g.name, g.shape, r.shape
            )));
        }
        let alphabet = Alphabet::new(&r.alphabet)?;
        let get = |k: &str| -> Result<Word> {
            let text = r
                .words
                .get(k)
                .ok_or_else(|| Error::BadCertificate(format!("missing word `{k}`")))?;
            alphabet.parse_word(text)
        };
        let words = match g.shape {
            Shape::ThreeWord | Shape::ThreeWordDual => Words::ThreeWord {
                x: get("x")?,
                x1: get("x1")?,
                x2: get("x2")?,
            },
            Shape::Flower { low, high } => Words::Flower {
                x: get("x")?,
                blocks: (low..=high).map(|l| get(&format!("x{l}"))).collect::<Result<_>>()?,
            },
            Shape::WeakChain { low, high } => Words::WeakChain {
                hats: (low..=high).map(|l| get(&format!("xhat{l}"))).collect::<Result<_>>()?,
                blocks: (low..=high).map(|l| get(&format!("x{l}"))).collect::<Result<_>>()?,
            },
            Shape::WeakFive => Words::WeakFive {
                x: get("x")?,
                x1: get("x1")?,
                x2: get("x2")?,
                x3: get("x3")?,
                x4: get("x4")?,
            },
            Shape::BoundedSix => Words::BoundedSix {
                hats: [get("xhat0")?, get("xhat1")?, get("xhat2")?],
                blocks: [get("x0")?, get("x1")?, get("x2")?],
            },
            Shape::None => return Err(Error::ShapeUnsupported(g.name)),
        };
        let c = Certificate {
            shape: g.shape,
            family: g.name,
            mode: r.mode,
            alphabet,
            words,
        };
        c.validate()?;
        Ok(c)
    }
}

/// Checks every pattern against `L` (recognition) or `⟨L1, L2⟩` (separation).
pub fn verify_certificate(c: &Certificate, inputs: &Mode) -> Result<Report> {
    if &c.alphabet != inputs.sigma() {
        return Err(Error::AlphabetMismatch(format!(
            "certificate over {}, automaton over {}",
            c.alphabet,
            inputs.sigma()
        )));
    }
    let mut checks = Vec::new();
    for (p, side) in c.patterns()? {
        let nbw = p.to_nbw(&c.alphabet)?;
        let (holds, cex) = match (inputs, side) {
            (Mode::Recognize { l }, Side::Inside) => is_subset(&nbw, l)?,
            (Mode::Recognize { l }, Side::Outside) => is_disjoint(&nbw, l)?,
            (Mode::Separate { l1, .. }, Side::Inside) => is_subset(&nbw, l1)?,
            (Mode::Separate { l2, .. }, Side::Outside) => is_subset(&nbw, l2)?,
        };
        checks.push(Check {
            pattern: p.render(&c.alphabet),
            side,
            holds,
            counterexample: cex.map(|w| w.format(&c.alphabet)),
        });
    }
    Ok(Report {
        valid: checks.iter().all(|k| k.holds),
        checks,
    })
}

/// Shorthand for the recognition case.
pub fn verify_for(c: &Certificate, l: &DetOmegaAutomaton) -> Result<bool> {
    Ok(verify_certificate(c, &Mode::recognize(l.clone()))?.valid)
}

#[cfg(test)]
mod tests;
