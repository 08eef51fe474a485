use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Letters are referred to by their index in the alphabet.
pub type Letter = usize;
pub type Word = Vec<Letter>;

/// Ordered finite set of printable letter names.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new<S: AsRef<str>>(symbols: &[S]) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::Invalid("alphabet must be non-empty".into()));
        }
        let symbols: Vec<String> = symbols.iter().map(|s| s.as_ref().to_string()).collect();
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() || s.chars().any(|c| c.is_whitespace() || "()".contains(c)) {
                return Err(Error::Invalid(format!("bad letter name `{s}`")));
            }
            if symbols[..i].contains(s) {
                return Err(Error::Invalid(format!("duplicate letter `{s}`")));
            }
        }
        Ok(Alphabet { symbols })
    }

    /// Alphabet whose letters are the characters of `chars`.
    pub fn from_chars(chars: &str) -> Self {
        let v: Vec<String> = chars.chars().map(|c| c.to_string()).collect();
        Alphabet::new(&v).expect("valid character alphabet")
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn name(&self, l: Letter) -> &str {
        &self.symbols[l]
    }

    pub fn index(&self, name: &str) -> Option<Letter> {
        self.symbols.iter().position(|s| s == name)
    }

    pub fn letter(&self, name: &str) -> Result<Letter> {
        self.index(name)
            .ok_or_else(|| Error::UnknownLetter(name.to_string()))
    }

    fn single_chars(&self) -> bool {
        self.symbols.iter().all(|s| s.chars().count() == 1)
    }

    /// Renders a word; single-character alphabets concatenate, others use `.`.
    pub fn format_word(&self, w: &[Letter]) -> String {
        if self.single_chars() {
            w.iter().map(|&l| self.symbols[l].as_str()).collect()
        } else {
            w.iter()
                .map(|&l| self.symbols[l].as_str())
                .collect::<Vec<_>>()
                .join(".")
        }
    }

    /// Inverse of [`Alphabet::format_word`]; `ε` and the empty string denote the empty word.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let text = text.trim();
        if text.is_empty() || text == "ε" || text == "eps" {
            return Ok(Vec::new());
        }
        if text.contains('.') && !self.single_chars() {
            return text.split('.').map(|p| self.letter(p)).collect();
        }
        let mut out = Vec::new();
        let mut rest = text;
        while !rest.is_empty() {
            let best = self
                .symbols
                .iter()
                .enumerate()
                .filter(|(_, s)| rest.starts_with(s.as_str()))
                .max_by_key(|(_, s)| s.len());
            match best {
                Some((i, s)) => {
                    out.push(i);
                    rest = &rest[s.len()..];
                }
                None => {
                    let c: String = rest.chars().take(1).collect();
                    return Err(Error::UnknownLetter(c));
                }
            }
        }
        Ok(out)
    }
}

/// Ultimately periodic word `prefix · period^ω`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LassoWord {
    pub prefix: Word,
    pub period: Word,
}

impl LassoWord {
    pub fn new(prefix: Word, period: Word) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::EmptyBlock("lasso period".into()));
        }
        Ok(LassoWord { prefix, period })
    }

    /// Shortest equivalent form: primitive period, prefix folded into it.
    pub fn canonical(&self) -> LassoWord {
        let n = self.period.len();
        let root = (1..=n)
            .find(|&d| n % d == 0 && (d..n).all(|i| self.period[i] == self.period[i - d]))
            .unwrap_or(n);
        let mut prefix = self.prefix.clone();
        let mut period = self.period[..root].to_vec();
        while prefix.last().is_some_and(|l| Some(l) == period.last()) {
            prefix.pop();
            period.rotate_right(1);
        }
        LassoWord { prefix, period }
    }

    /// Letter at position `i` of the infinite word.
    pub fn at(&self, i: usize) -> Letter {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.period[(i - self.prefix.len()) % self.period.len()]
        }
    }

    pub fn check_alphabet(&self, sigma: &Alphabet) -> Result<()> {
        match self
            .prefix
            .iter()
            .chain(self.period.iter())
            .find(|&&l| l >= sigma.len())
        {
            Some(l) => Err(Error::UnknownLetter(format!("#{l}"))),
            None => Ok(()),
        }
    }

    pub fn format(&self, sigma: &Alphabet) -> String {
        format!(
            "{}({})",
            sigma.format_word(&self.prefix),
            sigma.format_word(&self.period)
        )
    }

    /// Parses the `prefix(period)` text form.
    pub fn parse(text: &str, sigma: &Alphabet) -> Result<Self> {
        let text = text.trim();
        let open = text.find('(').ok_or_else(|| Error::Syntax {
            line: 1,
            column: text.len() + 1,
            message: "expected `(`".into(),
        })?;
        if !text.ends_with(')') {
            return Err(Error::Syntax {
                line: 1,
                column: text.len(),
                message: "expected `)` at end".into(),
            });
        }
        let prefix = sigma.parse_word(&text[..open])?;
        let period = sigma.parse_word(&text[open + 1..text.len() - 1])?;
        LassoWord::new(prefix, period)
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.symbols.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn words_round_trip() {
        let s = Alphabet::from_chars("01$");
        let w = s.parse_word("01$").unwrap();
        assert_eq!(w, vec![0, 1, 2]);
        assert_eq!(s.format_word(&w), "01$");
        let multi = Alphabet::new(&["acc", "rej"]).unwrap();
        let w = multi.parse_word("acc.rej.acc").unwrap();
        assert_eq!(multi.format_word(&w), "acc.rej.acc");
        assert_eq!(multi.parse_word("accrej").unwrap(), vec![0, 1]);
    }

    #[test]
    fn lasso_text_form() {
        let s = Alphabet::from_chars("01$");
        let l = LassoWord::parse("01($)", &s).unwrap();
        assert_eq!(l.prefix, vec![0, 1]);
        assert_eq!(l.period, vec![2]);
        assert_eq!(l.format(&s), "01($)");
        assert!(LassoWord::parse("01()", &s).is_err());
        assert!(LassoWord::parse("0x(1)", &s).is_err());
        assert_eq!(l.at(5), 2);
    }

    #[test]
    fn rejects_duplicates() {
        assert!(Alphabet::new(&["a", "a"]).is_err());
        assert!(Alphabet::new::<&str>(&[]).is_err());
    }
}
