//! Post correspondence instances and their three-line text form.
//!
//! ```text
//! a b          alphabet, one letter per item
//! a ab bba     first list (r)
//! baa aa bb    second list (v)
//! ```

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::PcpError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PcpInstance {
    pub alphabet: BTreeSet<char>,
    pub r: Vec<Vec<char>>,
    pub v: Vec<Vec<char>>,
}

impl PcpInstance {
    /// Letters must be ASCII alphanumeric so they can appear in place names.
    pub fn new(alphabet: BTreeSet<char>, r: Vec<Vec<char>>, v: Vec<Vec<char>>) -> Result<Self, PcpError> {
        if r.is_empty() || r.len() != v.len() {
            return Err(PcpError::Invalid(format!("lists have {} and {} words", r.len(), v.len())));
        }
        if let Some(c) = alphabet.iter().find(|c| !c.is_ascii_alphanumeric()) {
            return Err(PcpError::Invalid(format!("letter `{c}` is not alphanumeric")));
        }
        for w in r.iter().chain(&v) {
            if w.is_empty() {
                return Err(PcpError::Invalid("empty word".into()));
            }
            if let Some(c) = w.iter().find(|c| !alphabet.contains(c)) {
                return Err(PcpError::Invalid(format!("letter `{c}` is not in the alphabet")));
            }
        }
        Ok(Self { alphabet, r, v })
    }

    /// Convenience constructor from string slices.
    pub fn from_words(alphabet: &str, r: &[&str], v: &[&str]) -> Result<Self, PcpError> {
        let words = |ws: &[&str]| ws.iter().map(|w| w.chars().collect()).collect();
        Self::new(alphabet.chars().filter(|c| !c.is_whitespace()).collect(), words(r), words(v))
    }

    pub fn parse(text: &str) -> Result<Self, PcpError> {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .collect();
        if lines.len() != 3 {
            let line = lines.get(3).map_or(text.lines().count(), |l| l.0);
            return Err(PcpError::Parse { line, msg: format!("expected 3 lines, found {}", lines.len()) });
        }
        let mut alphabet = BTreeSet::new();
        for tok in lines[0].1.split_whitespace() {
            let mut cs = tok.chars();
            match (cs.next(), cs.next()) {
                (Some(c), None) => {
                    alphabet.insert(c);
                }
                _ => return Err(PcpError::Parse { line: lines[0].0, msg: format!("`{tok}` is not a single letter") }),
            }
        }
        let words = |l: &str| l.split_whitespace().map(|w| w.chars().collect()).collect();
        Self::new(alphabet, words(lines[1].1), words(lines[2].1))
    }

    /// Number of index pairs.
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// Words of system player `k` (1 outputs `r`, 2 outputs `v`).
    pub fn words(&self, k: u8) -> &[Vec<char>] {
        if k == 1 {
            &self.r
        } else {
            &self.v
        }
    }

    /// Does the non-empty `seq` solve the instance?
    pub fn is_solution(&self, seq: &[usize]) -> bool {
        if seq.is_empty() || seq.iter().any(|&i| i >= self.len()) {
            return false;
        }
        let top: Vec<char> = seq.iter().flat_map(|&i| self.r[i].iter().copied()).collect();
        let bottom: Vec<char> = seq.iter().flat_map(|&i| self.v[i].iter().copied()).collect();
        top == bottom
    }
}

impl fmt::Display for PcpInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letters: Vec<String> = self.alphabet.iter().map(char::to_string).collect();
        let words = |ws: &[Vec<char>]| ws.iter().map(|w| w.iter().collect::<String>()).collect::<Vec<_>>().join(" ");
        writeln!(f, "{}", letters.join(" "))?;
        writeln!(f, "{}", words(&self.r))?;
        writeln!(f, "{}", words(&self.v))
    }
}
