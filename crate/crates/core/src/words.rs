//! Alphabets, finite words and word tuples.
//!
//! Letters are stored as `u8`, so alphabets are limited to 256 symbols. Text
//! encodings use the digits `0-9` followed by `a-z` for alphabets of size at
//! most 36, and dot-separated decimal integers for anything larger.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Alphabet sizes `(k_1, ..., k_m)` of a product of Cantor spaces.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Signature {
    sizes: Vec<u32>,
}

impl Signature {
    pub fn new(sizes: Vec<u32>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::EmptySignature);
        }
        if let Some(&bad) = sizes.iter().find(|&&k| !(2..=256).contains(&k)) {
            return Err(Error::InvalidAlphabet(bad));
        }
        Ok(Signature { sizes })
    }

    pub fn sizes(&self) -> &[u32] {
        &self.sizes
    }

    /// Number of coordinates `m`.
    pub fn dims(&self) -> usize {
        self.sizes.len()
    }

    pub fn size(&self, coord: usize) -> u32 {
        self.sizes[coord]
    }

    pub fn ensure_same(&self, other: &Signature) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::SignatureMismatch {
                expected: self.to_string(),
                found: other.to_string(),
            })
        }
    }

    /// Checks that `t` has one word per coordinate and respects every alphabet.
    pub fn check_tuple(&self, t: &WordTuple) -> Result<()> {
        if t.dims() != self.dims() {
            return Err(Error::SignatureMismatch {
                expected: format!("{} coordinates", self.dims()),
                found: format!("{} coordinates", t.dims()),
            });
        }
        for (w, &k) in t.words().iter().zip(&self.sizes) {
            if let Some(&a) = w.letters().iter().find(|&&a| u32::from(a) >= k) {
                return Err(Error::LetterOutOfRange {
                    letter: a.into(),
                    size: k,
                });
            }
        }
        Ok(())
    }

    /// The tuple of empty words, i.e. the whole space.
    pub fn empty_tuple(&self) -> WordTuple {
        WordTuple::new(vec![Word::empty(); self.dims()])
    }
}

impl TryFrom<Vec<u32>> for Signature {
    type Error = Error;

    fn try_from(sizes: Vec<u32>) -> Result<Self> {
        Signature::new(sizes)
    }
}

impl From<Signature> for Vec<u32> {
    fn from(sig: Signature) -> Self {
        sig.sizes
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, k) in self.sizes.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, ")")
    }
}

/// Result of comparing two words under the prefix order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrefixOrder {
    Equal,
    AIsPrefix,
    BIsPrefix,
    Incomparable,
}

/// A finite word; the alphabet is implied by the coordinate it lives in.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(letters: Vec<u8>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = Vec::with_capacity(self.len() + other.len());
        letters.extend_from_slice(&self.0);
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    pub fn push(&mut self, letter: u8) {
        self.0.push(letter);
    }

    pub fn child(&self, letter: u8) -> Word {
        let mut w = self.clone();
        w.push(letter);
        w
    }

    pub fn parent(&self) -> Option<Word> {
        self.0.split_last().map(|(_, rest)| Word(rest.to_vec()))
    }

    pub fn last(&self) -> Option<u8> {
        self.0.last().copied()
    }

    pub fn truncate(&self, len: usize) -> Word {
        Word(self.0[..len.min(self.len())].to_vec())
    }

    /// The suffix left after removing `prefix`, if `prefix` is one.
    pub fn strip_prefix(&self, prefix: &Word) -> Option<Word> {
        self.0.strip_prefix(prefix.letters()).map(|s| Word(s.to_vec()))
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn comparable(&self, other: &Word) -> bool {
        prefix_compare(self, other) != PrefixOrder::Incomparable
    }

    /// Text form for an alphabet of size `k`.
    pub fn render(&self, k: u32) -> String {
        if k <= 36 {
            self.0
                .iter()
                .map(|&a| char::from_digit(a.into(), 36).expect("letter below 36"))
                .collect()
        } else {
            self.0
                .iter()
                .map(|a| a.to_string())
                .collect::<Vec<_>>()
                .join(".")
        }
    }

    pub fn parse(text: &str, k: u32) -> Result<Word> {
        let text = text.trim();
        if text.is_empty() || text == "ε" {
            return Ok(Word::empty());
        }
        let letters: Vec<u32> = if k <= 36 {
            text.chars()
                .map(|c| {
                    c.to_digit(36)
                        .ok_or_else(|| Error::Parse(format!("invalid letter {c:?} in {text:?}")))
                })
                .collect::<Result<_>>()?
        } else {
            text.split('.')
                .map(|s| {
                    s.trim()
                        .parse::<u32>()
                        .map_err(|_| Error::Parse(format!("invalid letter {s:?} in {text:?}")))
                })
                .collect::<Result<_>>()?
        };
        letters
            .into_iter()
            .map(|a| {
                if a < k {
                    Ok(a as u8)
                } else {
                    Err(Error::LetterOutOfRange { letter: a, size: k })
                }
            })
            .collect::<Result<Vec<u8>>>()
            .map(Word)
    }
}

impl From<&[u8]> for Word {
    fn from(letters: &[u8]) -> Self {
        Word(letters.to_vec())
    }
}

pub fn prefix_compare(a: &Word, b: &Word) -> PrefixOrder {
    let common = a.len().min(b.len());
    if a.0[..common] != b.0[..common] {
        PrefixOrder::Incomparable
    } else if a.len() == b.len() {
        PrefixOrder::Equal
    } else if a.len() < b.len() {
        PrefixOrder::AIsPrefix
    } else {
        PrefixOrder::BIsPrefix
    }
}

/// One word per coordinate. Doubles as the multicylinder `u_1 X × ... × u_m X`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WordTuple(Vec<Word>);

impl WordTuple {
    pub fn new(words: Vec<Word>) -> Self {
        WordTuple(words)
    }

    pub fn words(&self) -> &[Word] {
        &self.0
    }

    pub fn word(&self, coord: usize) -> &Word {
        &self.0[coord]
    }

    pub fn dims(&self) -> usize {
        self.0.len()
    }

    pub fn total_len(&self) -> usize {
        self.0.iter().map(Word::len).sum()
    }

    pub fn is_empty_tuple(&self) -> bool {
        self.0.iter().all(Word::is_empty)
    }

    pub fn concat(&self, other: &WordTuple) -> WordTuple {
        WordTuple(self.0.iter().zip(&other.0).map(|(a, b)| a.concat(b)).collect())
    }

    pub fn with_word(&self, coord: usize, word: Word) -> WordTuple {
        let mut words = self.0.clone();
        words[coord] = word;
        WordTuple(words)
    }

    /// Coordinatewise prefix test: every word of `self` is a prefix of `other`'s.
    pub fn is_prefix_of(&self, other: &WordTuple) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a.is_prefix_of(b))
    }

    pub fn strip_prefix(&self, prefix: &WordTuple) -> Option<WordTuple> {
        self.0
            .iter()
            .zip(&prefix.0)
            .map(|(w, p)| w.strip_prefix(p))
            .collect::<Option<Vec<_>>>()
            .map(WordTuple)
    }

    pub fn render(&self, sig: &Signature) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .zip(sig.sizes())
            .map(|(w, &k)| w.render(k))
            .collect();
        format!("[{}]", parts.join(","))
    }

    /// Parses `[w_1,...,w_m]`; the brackets are optional.
    pub fn parse(text: &str, sig: &Signature) -> Result<WordTuple> {
        let inner = strip_brackets(text.trim(), '[', ']');
        let parts: Vec<&str> = inner.split(',').collect();
        if parts.len() != sig.dims() {
            return Err(Error::SignatureMismatch {
                expected: format!("{} coordinates", sig.dims()),
                found: format!("{} coordinates in {text:?}", parts.len()),
            });
        }
        parts
            .iter()
            .zip(sig.sizes())
            .map(|(p, &k)| Word::parse(p, k))
            .collect::<Result<Vec<_>>>()
            .map(WordTuple)
    }
}

pub(crate) fn strip_brackets(text: &str, open: char, close: char) -> &str {
    text.strip_prefix(open)
        .and_then(|t| t.strip_suffix(close))
        .unwrap_or(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s, 2).unwrap()
    }

    #[test]
    fn prefix_compare_cases() {
        assert_eq!(prefix_compare(&w("0"), &w("01")), PrefixOrder::AIsPrefix);
        assert_eq!(prefix_compare(&w(""), &w("")), PrefixOrder::Equal);
        assert_eq!(prefix_compare(&w("01"), &w("10")), PrefixOrder::Incomparable);
        assert_eq!(prefix_compare(&w("011"), &w("01")), PrefixOrder::BIsPrefix);
    }

    #[test]
    fn signature_rejects_small_alphabets() {
        assert_eq!(Signature::new(vec![2, 1]), Err(Error::InvalidAlphabet(1)));
        assert_eq!(Signature::new(vec![]), Err(Error::EmptySignature));
    }

    #[test]
    fn word_text_round_trip() {
        let sig = Signature::new(vec![2, 36, 40]).unwrap();
        let t = WordTuple::parse("[01,z9,39.0.12]", &sig).unwrap();
        assert_eq!(t.word(2).letters(), &[39, 0, 12]);
        assert_eq!(t.render(&sig), "[01,z9,39.0.12]");
        assert_eq!(WordTuple::parse("[,]", &Signature::new(vec![2, 2]).unwrap())
            .unwrap()
            .render(&Signature::new(vec![2, 2]).unwrap()), "[,]");
    }

    #[test]
    fn parse_rejects_bad_letters() {
        assert!(matches!(
            Word::parse("012", 2),
            Err(Error::LetterOutOfRange { letter: 2, size: 2 })
        ));
        let sig = Signature::new(vec![2]).unwrap();
        assert!(matches!(
            WordTuple::parse("[0,1]", &sig),
            Err(Error::SignatureMismatch { .. })
        ));
    }
}
