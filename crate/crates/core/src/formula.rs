//! Emerson-Lei assertions in positive normal form.
//!
//! A mark `m` holds when it is visited infinitely often, `!m` when it is
//! visited only finitely often. Mark sets are `u64` bitmasks.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type MarkSet = u64;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Formula {
    True,
    False,
    Inf(u32),
    Fin(u32),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

impl Formula {
    pub fn eval(&self, inf: MarkSet) -> bool {
        match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Inf(m) => inf & (1 << m) != 0,
            Formula::Fin(m) => inf & (1 << m) == 0,
            Formula::And(v) => v.iter().all(|f| f.eval(inf)),
            Formula::Or(v) => v.iter().any(|f| f.eval(inf)),
        }
    }

    /// Dual assertion, again in positive normal form.
    pub fn negate(&self) -> Formula {
        match self {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Inf(m) => Formula::Fin(*m),
            Formula::Fin(m) => Formula::Inf(*m),
            Formula::And(v) => Formula::or(v.iter().map(|f| f.negate()).collect()),
            Formula::Or(v) => Formula::and(v.iter().map(|f| f.negate()).collect()),
        }
    }

    pub fn and(parts: Vec<Formula>) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::True => {}
                Formula::False => return Formula::False,
                Formula::And(v) => out.extend(v),
                p => {
                    if !out.contains(&p) {
                        out.push(p)
                    }
                }
            }
        }
        match out.len() {
            0 => Formula::True,
            1 => out.pop().unwrap(),
            _ => Formula::And(out),
        }
    }

    pub fn or(parts: Vec<Formula>) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::False => {}
                Formula::True => return Formula::True,
                Formula::Or(v) => out.extend(v),
                p => {
                    if !out.contains(&p) {
                        out.push(p)
                    }
                }
            }
        }
        match out.len() {
            0 => Formula::False,
            1 => out.pop().unwrap(),
            _ => Formula::Or(out),
        }
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::or(vec![a.negate(), b])
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::or(vec![
            Formula::and(vec![a.clone(), b.clone()]),
            Formula::and(vec![a.negate(), b.negate()]),
        ])
    }

    /// "Maximal color visited infinitely often is odd", colors `low..=high`
    /// carried as marks with the same index.
    pub fn parity(low: u32, high: u32) -> Formula {
        let mut f = if low % 2 == 0 {
            Formula::False
        } else {
            Formula::Inf(low)
        };
        for c in low + 1..=high {
            f = if c % 2 == 1 {
                Formula::or(vec![Formula::Inf(c), f])
            } else {
                Formula::and(vec![Formula::Fin(c), f])
            };
        }
        f
    }

    /// Every mark mentioned.
    pub fn marks(&self) -> MarkSet {
        match self {
            Formula::True | Formula::False => 0,
            Formula::Inf(m) | Formula::Fin(m) => 1 << m,
            Formula::And(v) | Formula::Or(v) => v.iter().fold(0, |a, f| a | f.marks()),
        }
    }

    /// Marks occurring under a `Fin` literal.
    pub fn fin_marks(&self) -> MarkSet {
        match self {
            Formula::Fin(m) => 1 << m,
            Formula::True | Formula::False | Formula::Inf(_) => 0,
            Formula::And(v) | Formula::Or(v) => v.iter().fold(0, |a, f| a | f.fin_marks()),
        }
    }

    pub fn map_marks(&self, f: &impl Fn(u32) -> u32) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Inf(m) => Formula::Inf(f(*m)),
            Formula::Fin(m) => Formula::Fin(f(*m)),
            Formula::And(v) => Formula::And(v.iter().map(|x| x.map_marks(f)).collect()),
            Formula::Or(v) => Formula::Or(v.iter().map(|x| x.map_marks(f)).collect()),
        }
    }

    pub fn shift(&self, offset: u32) -> Formula {
        self.map_marks(&|m| m + offset)
    }

    pub fn render(&self, names: &[String]) -> String {
        let mut s = String::new();
        self.render_into(names, &mut s, 0);
        s
    }

    fn render_into(&self, names: &[String], s: &mut String, ctx: u8) {
        let name = |m: &u32| {
            names
                .get(*m as usize)
                .cloned()
                .unwrap_or_else(|| format!("m{m}"))
        };
        match self {
            Formula::True => s.push('t'),
            Formula::False => s.push('f'),
            Formula::Inf(m) => s.push_str(&name(m)),
            Formula::Fin(m) => {
                let _ = write!(s, "!{}", name(m));
            }
            Formula::And(v) | Formula::Or(v) => {
                let (op, prec) = if matches!(self, Formula::And(_)) {
                    (" & ", 2)
                } else {
                    (" | ", 1)
                };
                let paren = ctx > prec;
                if paren {
                    s.push('(');
                }
                for (i, f) in v.iter().enumerate() {
                    if i > 0 {
                        s.push_str(op);
                    }
                    f.render_into(names, s, prec + 1);
                }
                if paren {
                    s.push(')');
                }
            }
        }
    }

    /// Parses an assertion; unknown names are appended to `names`.
    ///
    /// Grammar: `or := and ('|' and)*`, `and := atom ('&' atom)*`,
    /// `atom := 't' | 'f' | name | '!' name | 'Inf(' name ')' | 'Fin(' name ')' | '(' or ')'`.
    pub fn parse(text: &str, names: &mut Vec<String>) -> Result<Formula> {
        let mut p = Parser {
            chars: text.chars().collect(),
            pos: 0,
            names,
        };
        let f = p.or()?;
        p.ws();
        if p.pos < p.chars.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(f)
    }
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    names: &'a mut Vec<String>,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Syntax {
            line: 1,
            column: self.pos + 1,
            message: msg.to_string(),
        }
    }

    fn ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.ws();
        self.chars.get(self.pos).copied()
    }

    fn or(&mut self) -> Result<Formula> {
        let mut parts = vec![self.and()?];
        while self.peek() == Some('|') {
            self.pos += 1;
            parts.push(self.and()?);
        }
        Ok(Formula::or(parts))
    }

    fn and(&mut self) -> Result<Formula> {
        let mut parts = vec![self.atom()?];
        while self.peek() == Some('&') {
            self.pos += 1;
            parts.push(self.atom()?);
        }
        Ok(Formula::and(parts))
    }

    fn ident(&mut self) -> Result<String> {
        self.ws();
        let start = self.pos;
        while self.pos < self.chars.len()
            && (self.chars[self.pos].is_alphanumeric() || self.chars[self.pos] == '_')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a mark name"));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn mark(&mut self, name: String) -> u32 {
        match self.names.iter().position(|n| *n == name) {
            Some(i) => i as u32,
            None => {
                self.names.push(name);
                (self.names.len() - 1) as u32
            }
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected `{c}`")))
        }
    }

    fn atom(&mut self) -> Result<Formula> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let f = self.or()?;
                self.expect(')')?;
                Ok(f)
            }
            Some('!') => {
                self.pos += 1;
                if self.peek() == Some('(') {
                    return Err(self.err("negation only applies to marks (positive normal form)"));
                }
                let n = self.ident()?;
                Ok(Formula::Fin(self.mark(n)))
            }
            Some(_) => {
                let id = self.ident()?;
                if (id == "Inf" || id == "Fin") && self.peek() == Some('(') {
                    self.pos += 1;
                    let n = self.ident()?;
                    self.expect(')')?;
                    let m = self.mark(n);
                    return Ok(if id == "Inf" {
                        Formula::Inf(m)
                    } else {
                        Formula::Fin(m)
                    });
                }
                match id.as_str() {
                    "t" | "true" => Ok(Formula::True),
                    "f" | "false" => Ok(Formula::False),
                    _ => Ok(Formula::Inf(self.mark(id))),
                }
            }
            None => Err(self.err("unexpected end of assertion")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_formula_matches_max_color() {
        for (low, high) in [(0, 0), (0, 1), (1, 2), (0, 3), (1, 4)] {
            let f = Formula::parity(low, high);
            for set in 1u64..(1 << (high + 1)) {
                if set & ((1 << low) - 1) != 0 {
                    continue;
                }
                let max = 63 - set.leading_zeros();
                assert_eq!(f.eval(set), max % 2 == 1, "{low}..{high} on {set:b}");
            }
        }
    }

    #[test]
    fn negation_is_complement() {
        let mut names = Vec::new();
        let f = Formula::parse("(a & !b) | c", &mut names).unwrap();
        assert_eq!(names, vec!["a", "b", "c"]);
        for s in 0..8 {
            assert_eq!(f.eval(s), !f.negate().eval(s));
        }
    }

    #[test]
    fn render_parse_round_trip() {
        let mut names = Vec::new();
        let f = Formula::parse("Inf(x) & (Fin(y) | z) & t", &mut names).unwrap();
        let text = f.render(&names);
        assert_eq!(text, "x & (!y | z)");
        let mut again = names.clone();
        assert_eq!(Formula::parse(&text, &mut again).unwrap(), f);
    }

    #[test]
    fn rejects_negated_groups() {
        let mut names = Vec::new();
        assert!(Formula::parse("!(a & b)", &mut names).is_err());
        assert!(Formula::parse("a &", &mut names).is_err());
    }
}
