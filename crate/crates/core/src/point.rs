//! Eventually periodic points of a product of Cantor spaces.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::words::{strip_brackets, Signature, Word, WordTuple};

/// The sequence `pre · per · per · ...` in normal form.
///
/// Normal form: `per` is primitive and the last letter of `pre` differs from
/// the last letter of `per`. Two values denote the same sequence iff they are
/// structurally equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EventuallyPeriodic {
    pre: Word,
    per: Word,
}

impl EventuallyPeriodic {
    pub fn new(pre: Word, per: Word) -> Result<Self> {
        if per.is_empty() {
            return Err(Error::EmptyPeriod);
        }
        Ok(Self::normalized(pre.letters().to_vec(), per.letters().to_vec()))
    }

    /// The constant sequence `a^∞`.
    pub fn constant(letter: u8) -> Self {
        EventuallyPeriodic {
            pre: Word::empty(),
            per: Word::new(vec![letter]),
        }
    }

    fn normalized(mut pre: Vec<u8>, mut per: Vec<u8>) -> Self {
        let n = per.len();
        if let Some(d) = (1..n).find(|&d| n.is_multiple_of(d) && (d..n).all(|i| per[i] == per[i - d])) {
            per.truncate(d);
        }
        while let (Some(&a), Some(&b)) = (pre.last(), per.last()) {
            if a != b {
                break;
            }
            pre.pop();
            per.rotate_right(1);
        }
        EventuallyPeriodic {
            pre: Word::new(pre),
            per: Word::new(per),
        }
    }

    pub fn preperiod(&self) -> &Word {
        &self.pre
    }

    pub fn period(&self) -> &Word {
        &self.per
    }

    pub fn letter_at(&self, n: usize) -> u8 {
        let pre = self.pre.letters();
        if n < pre.len() {
            pre[n]
        } else {
            let per = self.per.letters();
            per[(n - pre.len()) % per.len()]
        }
    }

    /// The first `len` letters.
    pub fn unroll(&self, len: usize) -> Word {
        Word::new((0..len).map(|n| self.letter_at(n)).collect())
    }

    pub fn has_prefix(&self, w: &Word) -> bool {
        w.letters()
            .iter()
            .enumerate()
            .all(|(n, &a)| self.letter_at(n) == a)
    }

    /// Drops the first `n` letters.
    pub fn shift(&self, n: usize) -> Self {
        let pre = self.pre.letters();
        if n <= pre.len() {
            Self::normalized(pre[n..].to_vec(), self.per.letters().to_vec())
        } else {
            let mut per = self.per.letters().to_vec();
            let r = (n - pre.len()) % per.len();
            per.rotate_left(r);
            Self::normalized(Vec::new(), per)
        }
    }

    pub fn prepend(&self, w: &Word) -> Self {
        Self::normalized(w.concat(&self.pre).letters().to_vec(), self.per.letters().to_vec())
    }

    pub fn render(&self, k: u32) -> String {
        format!("{}({})", self.pre.render(k), self.per.render(k))
    }

    pub fn parse(text: &str, k: u32) -> Result<Self> {
        let text = text.trim();
        let open = text
            .find('(')
            .ok_or_else(|| Error::Parse(format!("missing '(' in point coordinate {text:?}")))?;
        let body = text[open + 1..]
            .strip_suffix(')')
            .ok_or_else(|| Error::Parse(format!("missing ')' in point coordinate {text:?}")))?;
        Self::new(Word::parse(&text[..open], k)?, Word::parse(body, k)?)
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, k: u32, max_pre: usize, max_per: usize) -> Self {
        let pre_len = rng.gen_range(0..=max_pre);
        let per_len = rng.gen_range(1..=max_per.max(1));
        let pre = (0..pre_len).map(|_| rng.gen_range(0..k) as u8).collect();
        let per = (0..per_len).map(|_| rng.gen_range(0..k) as u8).collect();
        Self::normalized(pre, per)
    }
}

/// A point of `X = ∏ X_{k_i}` with an eventually periodic sequence in every coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalPoint(Vec<EventuallyPeriodic>);

impl RationalPoint {
    pub fn new(coords: Vec<EventuallyPeriodic>) -> Self {
        RationalPoint(coords)
    }

    pub fn coords(&self) -> &[EventuallyPeriodic] {
        &self.0
    }

    pub fn coord(&self, i: usize) -> &EventuallyPeriodic {
        &self.0[i]
    }

    pub fn dims(&self) -> usize {
        self.0.len()
    }

    pub fn check_signature(&self, sig: &Signature) -> Result<()> {
        if self.dims() != sig.dims() {
            return Err(Error::SignatureMismatch {
                expected: format!("{} coordinates", sig.dims()),
                found: format!("{} coordinates", self.dims()),
            });
        }
        for (c, &k) in self.0.iter().zip(sig.sizes()) {
            let bad = c
                .pre
                .letters()
                .iter()
                .chain(c.per.letters())
                .find(|&&a| u32::from(a) >= k);
            if let Some(&a) = bad {
                return Err(Error::LetterOutOfRange {
                    letter: a.into(),
                    size: k,
                });
            }
        }
        Ok(())
    }

    /// True iff the point lies in the multicylinder `w`.
    pub fn has_prefix(&self, w: &WordTuple) -> bool {
        self.0.iter().zip(w.words()).all(|(c, w)| c.has_prefix(w))
    }

    /// Returns `x` with `self = w · x`.
    pub fn strip_prefix(&self, w: &WordTuple) -> Result<RationalPoint> {
        if !self.has_prefix(w) {
            return Err(Error::NotAPrefix(format!("{w:?}")));
        }
        Ok(RationalPoint(
            self.0
                .iter()
                .zip(w.words())
                .map(|(c, w)| c.shift(w.len()))
                .collect(),
        ))
    }

    pub fn prepend(&self, w: &WordTuple) -> RationalPoint {
        RationalPoint(
            self.0
                .iter()
                .zip(w.words())
                .map(|(c, w)| c.prepend(w))
                .collect(),
        )
    }

    /// The word tuple of the first `len` letters in every coordinate.
    pub fn unroll(&self, len: usize) -> WordTuple {
        WordTuple::new(self.0.iter().map(|c| c.unroll(len)).collect())
    }

    pub fn render(&self, sig: &Signature) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .zip(sig.sizes())
            .map(|(c, &k)| c.render(k))
            .collect();
        format!("[{}]", parts.join(","))
    }

    /// Parses `[pre(per),...]`.
    pub fn parse(text: &str, sig: &Signature) -> Result<RationalPoint> {
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
            .map(|(p, &k)| EventuallyPeriodic::parse(p, k))
            .collect::<Result<Vec<_>>>()
            .map(RationalPoint)
    }

    pub fn random<R: Rng + ?Sized>(
        rng: &mut R,
        sig: &Signature,
        max_pre: usize,
        max_per: usize,
    ) -> RationalPoint {
        RationalPoint(
            sig.sizes()
                .iter()
                .map(|&k| EventuallyPeriodic::random(rng, k, max_pre, max_per))
                .collect(),
        )
    }

    /// A random point inside the multicylinder `cell`.
    pub fn random_in<R: Rng + ?Sized>(
        rng: &mut R,
        sig: &Signature,
        cell: &WordTuple,
        max_pre: usize,
        max_per: usize,
    ) -> RationalPoint {
        Self::random(rng, sig, max_pre, max_per).prepend(cell)
    }
}

/// All distinct one-coordinate points with `|pre| <= max_pre` and `1 <= |per| <= max_per`.
pub fn enumerate_sequences(k: u32, max_pre: usize, max_per: usize) -> Vec<EventuallyPeriodic> {
    let mut out: Vec<EventuallyPeriodic> = Vec::new();
    for pre in all_words(k, max_pre) {
        for per in all_words(k, max_per).into_iter().filter(|w| !w.is_empty()) {
            out.push(EventuallyPeriodic::normalized(
                pre.letters().to_vec(),
                per.letters().to_vec(),
            ));
        }
    }
    out.sort();
    out.dedup();
    out
}

/// All points of `sig` whose coordinates come from [`enumerate_sequences`].
pub fn enumerate_points(sig: &Signature, max_pre: usize, max_per: usize) -> Vec<RationalPoint> {
    let mut points = vec![Vec::new()];
    for &k in sig.sizes() {
        let seqs = enumerate_sequences(k, max_pre, max_per);
        points = points
            .into_iter()
            .flat_map(|p: Vec<EventuallyPeriodic>| {
                seqs.iter().map(move |s| {
                    let mut q = p.clone();
                    q.push(s.clone());
                    q
                })
            })
            .collect();
    }
    points.into_iter().map(RationalPoint).collect()
}

/// Every word over `{0..k-1}` of length at most `max_len`, shortest first.
pub fn all_words(k: u32, max_len: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w| (0..k).map(move |a| w.child(a as u8)))
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

impl fmt::Display for EventuallyPeriodic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(36))
    }
}
