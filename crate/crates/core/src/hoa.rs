//! Line-oriented exchange format for automata with state-based acceptance.
//!
//! ```text
//! States: 2
//! Start: 0
//! Alphabet: a b
//! Acceptance: parity max odd 1..2
//! --BODY--
//! State: 0 {1}
//!   a -> 1
//!   b -> 0
//! State: 1 {2}
//!   a -> 1
//!   b -> 0
//! --END--
//! ```
//!
//! Header lines:
//!
//! * `States: n`, `Start: q [q ...]`, `Alphabet: l1 l2 ...` (required)
//! * `Type: deterministic | nondeterministic` (default deterministic)
//! * `Marks: m1 m2 ...` fixes mark order for `el` acceptance
//! * `Acceptance:` one of `parity max odd k` (colors `0..k`),
//!   `parity max odd i..k`, `Buchi`, `co-Buchi`, `el <assertion>`
//!
//! Each state block lists its marks in braces (colors for parity, mark names
//! for `el`, `{acc}` / `{}` for Büchi and co-Büchi) followed by one
//! `letter -> successors` line per letter. Nondeterministic documents may list
//! several or zero successors and must use `Buchi`. `#` starts a comment.

use std::fmt::Write as _;

use crate::alphabet::Alphabet;
use crate::automaton::{Condition, DetOmegaAutomaton, NondetBuchiAutomaton};
use crate::error::{Error, Result};
use crate::formula::{Formula, MarkSet};

#[derive(Debug, Clone, PartialEq)]
pub enum Parsed {
    Det(DetOmegaAutomaton),
    Nondet(NondetBuchiAutomaton),
}

impl Parsed {
    pub fn into_det(self) -> Result<DetOmegaAutomaton> {
        match self {
            Parsed::Det(a) => Ok(a),
            Parsed::Nondet(_) => Err(Error::Invalid("expected a deterministic automaton".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Acc {
    Parity(u32, u32),
    Buchi,
    CoBuchi,
    El(String, usize, usize),
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

struct Line<'a> {
    no: usize,
    text: &'a str,
    indent: usize,
}

fn col_of(line: &Line, part: &str) -> usize {
    // part is a subslice of line.text
    part.as_ptr() as usize - line.text.as_ptr() as usize + line.indent + 1
}

pub fn parse_automaton(text: &str) -> Result<Parsed> {
    let lines: Vec<Line> = text
        .lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let raw = raw.split('#').next().unwrap();
            let t = raw.trim_start();
            let indent = raw.len() - t.len();
            let t = t.trim_end();
            (!t.is_empty()).then_some(Line {
                no: i + 1,
                text: t,
                indent,
            })
        })
        .collect();
    let mut states = None;
    let mut start: Option<Vec<usize>> = None;
    let mut alphabet = None;
    let mut acceptance = None;
    let mut nondet = false;
    let mut mark_decl: Option<Vec<String>> = None;
    let mut i = 0;
    while i < lines.len() && lines[i].text != "--BODY--" {
        let l = &lines[i];
        let (key, rest) = l
            .text
            .split_once(':')
            .ok_or_else(|| syntax(l.no, l.indent + 1, "expected `Key: value` header"))?;
        let rest = rest.trim();
        let rcol = col_of(l, rest);
        match key {
            "States" => {
                let n: usize = rest
                    .parse()
                    .map_err(|_| syntax(l.no, rcol, "state count must be a number"))?;
                states = Some(n);
            }
            "Start" => {
                let v = rest
                    .split_whitespace()
                    .map(|s| s.parse::<usize>().map_err(|_| syntax(l.no, col_of(l, s), "bad state id")))
                    .collect::<Result<Vec<_>>>()?;
                start = Some(v);
            }
            "Alphabet" => {
                let syms: Vec<&str> = rest.split_whitespace().collect();
                alphabet = Some(
                    Alphabet::new(&syms).map_err(|e| syntax(l.no, rcol, e.to_string()))?,
                );
            }
            "Type" => match rest {
                "deterministic" => nondet = false,
                "nondeterministic" => nondet = true,
                _ => return Err(syntax(l.no, rcol, format!("unknown type `{rest}`"))),
            },
            "Marks" => mark_decl = Some(rest.split_whitespace().map(String::from).collect()),
            "Acceptance" => acceptance = Some(parse_acceptance(rest).ok_or_else(|| {
                Error::UnknownAcceptance(format!("line {}: {rest}", l.no))
            })?.with_pos(l.no, rcol)),
            _ => return Err(syntax(l.no, l.indent + 1, format!("unknown header `{key}`"))),
        }
        i += 1;
    }
    let end_line = lines.last().map_or(1, |l| l.no);
    if i == lines.len() {
        return Err(syntax(end_line, 1, "missing --BODY--"));
    }
    let n = states.ok_or_else(|| syntax(1, 1, "missing States header"))?;
    let start = start.ok_or_else(|| syntax(1, 1, "missing Start header"))?;
    let sigma = alphabet.ok_or_else(|| syntax(1, 1, "missing Alphabet header"))?;
    let acc = acceptance.ok_or_else(|| syntax(1, 1, "missing Acceptance header"))?;
    if n == 0 {
        return Err(syntax(1, 1, "at least one state is required"));
    }
    if let Some(&q) = start.iter().find(|&&q| q >= n) {
        return Err(syntax(1, 1, format!("start state {q} out of range")));
    }
    i += 1;

    let mut names: Vec<String> = mark_decl.unwrap_or_default();
    let el_formula = match &acc {
        Acc::El(text, line, col) => Some(Formula::parse(text, &mut names).map_err(|e| match e {
            Error::Syntax { column, message, .. } => syntax(*line, col + column - 1, message),
            e => e,
        })?),
        _ => None,
    };
    let mut labels: Vec<Option<Vec<&str>>> = vec![None; n];
    let mut succ: Vec<Vec<Option<Vec<usize>>>> = vec![vec![None; sigma.len()]; n];
    let mut cur: Option<usize> = None;
    let mut ended = false;
    while i < lines.len() {
        let l = &lines[i];
        i += 1;
        if l.text == "--END--" {
            ended = true;
            break;
        }
        if let Some(rest) = l.text.strip_prefix("State:") {
            let rest = rest.trim();
            let (id, marks) = match rest.find('{') {
                Some(p) => (rest[..p].trim(), Some(&rest[p..])),
                None => (rest, None),
            };
            let q: usize = id
                .parse()
                .map_err(|_| syntax(l.no, col_of(l, rest), "bad state id"))?;
            if q >= n {
                return Err(syntax(l.no, col_of(l, rest), format!("state {q} out of range")));
            }
            if labels[q].is_some() {
                return Err(syntax(l.no, col_of(l, rest), format!("state {q} defined twice")));
            }
            let inner = match marks {
                Some(m) => m
                    .strip_prefix('{')
                    .and_then(|m| m.strip_suffix('}'))
                    .ok_or_else(|| syntax(l.no, col_of(l, m), "unterminated mark set"))?,
                None => "",
            };
            labels[q] = Some(inner.split_whitespace().collect());
            cur = Some(q);
            continue;
        }
        let q = cur.ok_or_else(|| syntax(l.no, l.indent + 1, "transition before any State:"))?;
        let (letter, targets) = l
            .text
            .split_once("->")
            .ok_or_else(|| syntax(l.no, l.indent + 1, "expected `letter -> successor`"))?;
        let letter = letter.trim();
        let li = sigma
            .index(letter)
            .ok_or_else(|| syntax(l.no, l.indent + 1, format!("unknown letter `{letter}`")))?;
        if succ[q][li].is_some() {
            return Err(syntax(l.no, l.indent + 1, format!("duplicate transition on `{letter}`")));
        }
        let ts = targets
            .split_whitespace()
            .map(|s| match s.parse::<usize>() {
                Ok(t) if t < n => Ok(t),
                _ => Err(syntax(l.no, col_of(l, s), format!("bad successor `{s}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if !nondet && ts.len() != 1 {
            return Err(syntax(l.no, l.indent + 1, "deterministic transitions need exactly one successor"));
        }
        succ[q][li] = Some(ts);
    }
    if !ended {
        return Err(syntax(end_line, 1, "missing --END--"));
    }
    if let Some(q) = labels.iter().position(|x| x.is_none()) {
        return Err(syntax(end_line, 1, format!("state {q} has no block")));
    }

    if nondet {
        if acc != Acc::Buchi {
            return Err(Error::UnknownAcceptance(
                "nondeterministic documents must use Buchi".into(),
            ));
        }
        let accepting = labels
            .iter()
            .map(|m| buchi_flag(m.as_ref().unwrap()))
            .collect::<Result<Vec<_>>>()?;
        let delta = succ
            .into_iter()
            .map(|row| row.into_iter().map(|c| c.unwrap_or_default()).collect())
            .collect();
        return Ok(Parsed::Nondet(NondetBuchiAutomaton::new(
            sigma, start, delta, accepting,
        )?));
    }

    if start.len() != 1 {
        return Err(syntax(1, 1, "deterministic automata need exactly one start state"));
    }
    let mut delta = Vec::with_capacity(n);
    for (q, row) in succ.into_iter().enumerate() {
        let mut r = Vec::with_capacity(sigma.len());
        for (l, c) in row.into_iter().enumerate() {
            match c {
                Some(v) => r.push(v[0]),
                None => {
                    return Err(Error::NotTotal {
                        state: q,
                        letter: sigma.name(l).to_string(),
                    })
                }
            }
        }
        delta.push(r);
    }
    let labels: Vec<Vec<&str>> = labels.into_iter().map(|x| x.unwrap()).collect();
    let a = match acc {
        Acc::Parity(low, high) => {
            let colors = labels
                .iter()
                .enumerate()
                .map(|(q, m)| match m.as_slice() {
                    [c] => c
                        .parse::<u32>()
                        .map_err(|_| Error::Invalid(format!("state {q}: color `{c}` is not a number"))),
                    _ => Err(Error::Invalid(format!("state {q} must carry exactly one color"))),
                })
                .collect::<Result<Vec<_>>>()?;
            if let Some((q, &c)) = colors.iter().enumerate().find(|(_, &c)| c < low || c > high) {
                return Err(Error::ColorOutOfRange {
                    state: q,
                    color: c,
                    low,
                    high,
                });
            }
            DetOmegaAutomaton::parity(sigma, start[0], delta, colors, low, high)?
        }
        Acc::Buchi | Acc::CoBuchi => {
            let flags = labels.iter().map(buchi_flag).collect::<Result<Vec<_>>>()?;
            let (colors, low, high) = if acc == Acc::Buchi {
                (flags.iter().map(|&f| f as u32).collect(), 0, 1)
            } else {
                (flags.iter().map(|&f| 1 + f as u32).collect(), 1, 2)
            };
            DetOmegaAutomaton::parity(sigma, start[0], delta, colors, low, high)?
        }
        Acc::El(..) => {
            let mut marks = Vec::with_capacity(n);
            for m in &labels {
                let mut set: MarkSet = 0;
                for name in m {
                    let id = match names.iter().position(|x| x == name) {
                        Some(id) => id,
                        None => {
                            names.push(name.to_string());
                            names.len() - 1
                        }
                    };
                    if id >= 64 {
                        return Err(Error::Invalid("at most 64 marks are supported".into()));
                    }
                    set |= 1 << id;
                }
                marks.push(set);
            }
            DetOmegaAutomaton::new(
                sigma,
                start[0],
                delta,
                marks,
                names,
                Condition::EmersonLei(el_formula.unwrap()),
            )?
        }
    };
    Ok(Parsed::Det(a))
}

fn buchi_flag(m: &Vec<&str>) -> Result<bool> {
    match m.as_slice() {
        [] => Ok(false),
        ["acc"] | ["0"] => Ok(true),
        _ => Err(Error::Invalid(format!(
            "Büchi states carry `{{acc}}` or `{{}}`, got {{{}}}",
            m.join(" ")
        ))),
    }
}

impl Acc {
    fn with_pos(self, line: usize, col: usize) -> Acc {
        match self {
            Acc::El(t, _, c) => Acc::El(t, line, col + c),
            a => a,
        }
    }
}

fn parse_acceptance(text: &str) -> Option<Acc> {
    match text {
        "Buchi" => return Some(Acc::Buchi),
        "co-Buchi" => return Some(Acc::CoBuchi),
        _ => {}
    }
    if let Some(rest) = text.strip_prefix("parity max odd") {
        let rest = rest.trim();
        let (low, high) = match rest.split_once("..") {
            Some((a, b)) => (a.trim().parse().ok()?, b.trim().parse().ok()?),
            None => (0, rest.parse().ok()?),
        };
        return Some(Acc::Parity(low, high));
    }
    if let Some(rest) = text.strip_prefix("el ") {
        let off = text.len() - rest.len();
        return Some(Acc::El(rest.to_string(), 0, off));
    }
    None
}

/// Text form of a deterministic automaton; `parse_automaton(emit(a)) == a`.
pub fn emit(a: &DetOmegaAutomaton) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "States: {}", a.num_states());
    let _ = writeln!(s, "Start: {}", a.initial());
    let _ = writeln!(s, "Alphabet: {}", a.alphabet().symbols().join(" "));
    match a.condition() {
        Condition::Parity { low, high } => {
            let _ = writeln!(s, "Acceptance: parity max odd {low}..{high}");
        }
        Condition::EmersonLei(f) => {
            let _ = writeln!(s, "Marks: {}", a.mark_names().join(" "));
            let _ = writeln!(s, "Acceptance: el {}", f.render(a.mark_names()));
        }
    }
    s.push_str("--BODY--\n");
    for q in 0..a.num_states() {
        let marks: Vec<&str> = (0..a.mark_names().len())
            .filter(|&m| a.marks(q) & (1 << m) != 0)
            .map(|m| a.mark_names()[m].as_str())
            .collect();
        let _ = writeln!(s, "State: {q} {{{}}}", marks.join(" "));
        for l in 0..a.alphabet().len() {
            let _ = writeln!(s, "  {} -> {}", a.alphabet().name(l), a.succ(q, l));
        }
    }
    s.push_str("--END--\n");
    s
}

pub fn emit_nbw(a: &NondetBuchiAutomaton) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "Type: nondeterministic");
    let _ = writeln!(s, "States: {}", a.num_states());
    let starts: Vec<String> = a.initial().iter().map(|q| q.to_string()).collect();
    let _ = writeln!(s, "Start: {}", starts.join(" "));
    let _ = writeln!(s, "Alphabet: {}", a.alphabet().symbols().join(" "));
    s.push_str("Acceptance: Buchi\n--BODY--\n");
    for q in 0..a.num_states() {
        let _ = writeln!(s, "State: {q} {{{}}}", if a.is_accepting(q) { "acc" } else { "" });
        for l in 0..a.alphabet().len() {
            let ts: Vec<String> = a.succ(q, l).iter().map(|t| t.to_string()).collect();
            let _ = writeln!(s, "  {} -> {}", a.alphabet().name(l), ts.join(" "));
        }
    }
    s.push_str("--END--\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIX1: &str = "States: 2\nStart: 0\nAlphabet: a b\nAcceptance: parity max odd 1..2\n--BODY--\nState: 0 {1}\n  a -> 1\n  b -> 0\nState: 1 {2}\n  a -> 1\n  b -> 0\n--END--\n";

    #[test]
    fn round_trip() {
        let a = parse_automaton(FIX1).unwrap().into_det().unwrap();
        assert_eq!(emit(&a), FIX1);
    }

    #[test]
    fn missing_transition() {
        let d = FIX1.replacen("  b -> 0\n", "", 1);
        let e = parse_automaton(&d).unwrap_err();
        assert!(matches!(e, Error::NotTotal { state: 0, ref letter } if letter == "b"));
    }

    #[test]
    fn syntax_errors_carry_position() {
        let d = FIX1.replace("  a -> 1\n  b -> 0\nState: 1", "  a => 1\n  b -> 0\nState: 1");
        match parse_automaton(&d).unwrap_err() {
            Error::Syntax { line, column, .. } => assert_eq!((line, column), (7, 3)),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn el_documents() {
        let d = "States: 1\nStart: 0\nAlphabet: x\nAcceptance: el Inf(p) & !q\n--BODY--\nState: 0 {p}\n x -> 0\n--END--\n";
        let a = parse_automaton(d).unwrap().into_det().unwrap();
        assert_eq!(a.mark_names(), ["p", "q"]);
        let again = parse_automaton(&emit(&a)).unwrap().into_det().unwrap();
        assert_eq!(a, again);
    }

    #[test]
    fn unknown_acceptance() {
        let d = FIX1.replace("parity max odd 1..2", "Rabin 2");
        assert!(matches!(parse_automaton(&d), Err(Error::UnknownAcceptance(_))));
    }
}
