//! Localized subgroups and bounded searches for algebraic disjointness.
//!
//! `g` is algebraically disjoint from `f` when every `h` outside the
//! centralizer of `f` admits `f1, f2` in the centralizer of `g` with
//! `[f1, [f2, h]]` a nontrivial element of that centralizer. The quantifiers
//! range over an infinite group; here they range over finite balls in a
//! generating set, and verdicts carry the radii they were obtained at.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::clopen::Clopen;
use crate::error::{Error, Result};
use crate::point::RationalPoint;
use crate::table::Element;
use crate::words::Signature;

/// `e ∈ Γ_U`. Exact for clopen `U`: the open support lies in `U` iff the
/// regular support does.
pub fn in_localized_subgroup(e: &Element, u: &Clopen) -> Result<bool> {
    e.rsupp().subset(u)
}

/// A finite list of nontrivial elements over one signature.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    name: String,
    sig: Signature,
    elements: Vec<Element>,
}

impl GeneratorSet {
    pub fn new(name: impl Into<String>, elements: Vec<Element>) -> Result<Self> {
        let first = elements.first().ok_or(Error::EmptyGenerators)?;
        let sig = first.signature().clone();
        for (i, e) in elements.iter().enumerate() {
            sig.ensure_same(e.signature())?;
            if e.is_identity() {
                return Err(Error::InvalidBound(format!("generator {i} is the identity")));
            }
        }
        Ok(GeneratorSet {
            name: name.into(),
            sig,
            elements,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    /// Evaluates a word; letter `i + 1` is generator `i`, `-(i + 1)` its inverse.
    pub fn evaluate(&self, word: &[i32]) -> Result<Element> {
        let mut acc = Element::identity(&self.sig);
        for &letter in word {
            acc = acc.compose(&self.letter(letter)?)?;
        }
        Ok(acc)
    }

    fn letter(&self, letter: i32) -> Result<Element> {
        let idx = letter.unsigned_abs() as usize;
        if letter == 0 || idx > self.elements.len() {
            return Err(Error::Parse(format!("generator letter {letter} out of range")));
        }
        let g = &self.elements[idx - 1];
        Ok(if letter > 0 { g.clone() } else { g.invert() })
    }
}

#[derive(Debug, Clone)]
pub struct BallEntry {
    pub word: Vec<i32>,
    pub element: Element,
}

/// Distinct elements of word length at most `radius`, in breadth-first order.
#[derive(Debug, Clone)]
pub struct Ball {
    pub radius: usize,
    pub entries: Vec<BallEntry>,
}

impl Ball {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Images of a fixed probe set; equal elements always share a fingerprint.
struct Fingerprinter {
    probes: Vec<RationalPoint>,
}

impl Fingerprinter {
    fn new(sig: &Signature) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let probes = (0..24)
            .map(|_| RationalPoint::random(&mut rng, sig, 5, 3))
            .collect();
        Fingerprinter { probes }
    }

    fn fingerprint(&self, e: &Element) -> u64 {
        let mut h = DefaultHasher::new();
        for p in &self.probes {
            e.apply(p).expect("probe matches signature").hash(&mut h);
        }
        h.finish()
    }
}

/// Breadth-first enumeration of reduced words up to `radius`, deduplicated by
/// group equality.
pub fn ball(gens: &GeneratorSet, radius: usize) -> Ball {
    let sig = gens.signature();
    let fp = &Fingerprinter::new(sig);
    let letters: Vec<(i32, Element)> = (0..gens.elements.len())
        .flat_map(|i| {
            let g = &gens.elements[i];
            [((i + 1) as i32, g.clone()), (-((i + 1) as i32), g.invert())]
        })
        .collect();

    let identity = Element::identity(sig);
    let mut buckets: HashMap<u64, Vec<usize>> = HashMap::new();
    buckets.insert(fp.fingerprint(&identity), vec![0]);
    let mut entries = vec![BallEntry {
        word: Vec::new(),
        element: identity,
    }];
    let mut frontier = vec![0usize];

    for _ in 0..radius {
        let candidates: Vec<(Vec<i32>, Element, u64)> = frontier
            .par_iter()
            .flat_map_iter(|&idx| {
                let base = &entries[idx];
                letters
                    .iter()
                    .filter(move |(l, _)| base.word.last() != Some(&-*l))
                    .map(move |(l, g)| {
                        let mut word = base.word.clone();
                        word.push(*l);
                        let element = base.element.compose(g).expect("same signature");
                        let f = fp.fingerprint(&element);
                        (word, element, f)
                    })
            })
            .collect();

        let mut next = Vec::new();
        for (word, element, f) in candidates {
            let bucket = buckets.entry(f).or_default();
            let seen = bucket
                .iter()
                .any(|&j| entries[j].element.same_as(&element).expect("same signature"));
            if !seen {
                bucket.push(entries.len());
                next.push(entries.len());
                entries.push(BallEntry { word, element });
            }
        }
        frontier = next;
    }
    Ball { radius, entries }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum Verdict {
    /// Every `h` in the searched ball had a witness pair. Not a proof.
    VerifiedUpTo { radius: usize },
    /// No witness pair exists for `h` inside the `f1, f2` ball.
    Counterexample { h: Vec<i32> },
    Inconclusive { reason: String },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub h_enumerated: usize,
    pub h_outside_centralizer: usize,
    pub centralizer_size: usize,
    pub pairs_tested: u64,
}

/// A witness `[f1, [f2, h]] ∈ C(g) \ {1}` found for `h`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub h: Vec<i32>,
    pub f1: Vec<i32>,
    pub f2: Vec<i32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundedVerdict {
    pub verdict: Verdict,
    pub stats: SearchStats,
    pub witnesses: Vec<Witness>,
}

impl BoundedVerdict {
    pub fn is_verified(&self) -> bool {
        matches!(self.verdict, Verdict::VerifiedUpTo { .. })
    }
}

/// Balls shared by many disjointness queries.
pub struct DisjointnessSearch<'a> {
    pub h_ball: &'a Ball,
    pub f_ball: &'a Ball,
    /// Upper bound on `(f1, f2)` pairs examined for a single `h`.
    pub pair_budget: u64,
}

enum HOutcome {
    Found(Witness, u64),
    Exhausted(u64),
    OutOfBudget(u64),
}

impl<'a> DisjointnessSearch<'a> {
    pub fn new(h_ball: &'a Ball, f_ball: &'a Ball) -> Self {
        DisjointnessSearch {
            h_ball,
            f_ball,
            pair_budget: 1_000_000,
        }
    }

    /// Indices of `h_ball` entries that do not commute with `f`.
    pub fn noncommuting(&self, f: &Element) -> Vec<usize> {
        self.h_ball
            .entries
            .par_iter()
            .enumerate()
            .filter(|(_, h)| !h.element.commutes(f).expect("same signature"))
            .map(|(i, _)| i)
            .collect()
    }

    /// Indices of `f_ball` entries commuting with `g`.
    pub fn centralizer(&self, g: &Element) -> Vec<usize> {
        self.f_ball
            .entries
            .par_iter()
            .enumerate()
            .filter(|(_, c)| c.element.commutes(g).expect("same signature"))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn verdict(&self, g: &Element, f: &Element) -> BoundedVerdict {
        let hs = self.noncommuting(f);
        self.verdict_with(g, &hs)
    }

    /// Like [`verdict`](Self::verdict) with the `h` range precomputed.
    pub fn verdict_with(&self, g: &Element, hs: &[usize]) -> BoundedVerdict {
        let cent = self.centralizer(g);
        let mut stats = SearchStats {
            h_enumerated: self.h_ball.len(),
            h_outside_centralizer: hs.len(),
            centralizer_size: cent.len(),
            pairs_tested: 0,
        };
        let mut witnesses = Vec::new();
        let mut inconclusive = None;
        // chunks are scanned in order so the first counterexample is the
        // least one regardless of scheduling
        for chunk in hs.chunks(32) {
            let outcomes: Vec<HOutcome> = chunk
                .par_iter()
                .map(|&hi| self.search_h(g, hi, &cent))
                .collect();
            for (&hi, outcome) in chunk.iter().zip(outcomes) {
                match outcome {
                    HOutcome::Found(w, n) => {
                        stats.pairs_tested += n;
                        witnesses.push(w);
                    }
                    HOutcome::Exhausted(n) => {
                        stats.pairs_tested += n;
                        return BoundedVerdict {
                            verdict: Verdict::Counterexample {
                                h: self.h_ball.entries[hi].word.clone(),
                            },
                            stats,
                            witnesses,
                        };
                    }
                    HOutcome::OutOfBudget(n) => {
                        stats.pairs_tested += n;
                        inconclusive.get_or_insert_with(|| {
                            format!(
                                "pair budget {} exhausted for h = {:?}",
                                self.pair_budget, self.h_ball.entries[hi].word
                            )
                        });
                    }
                }
            }
        }
        let verdict = match inconclusive {
            Some(reason) => Verdict::Inconclusive { reason },
            None => Verdict::VerifiedUpTo {
                radius: self.h_ball.radius,
            },
        };
        BoundedVerdict {
            verdict,
            stats,
            witnesses,
        }
    }

    fn search_h(&self, g: &Element, hi: usize, cent: &[usize]) -> HOutcome {
        let h = &self.h_ball.entries[hi];
        let mut tested = 0u64;
        for &i2 in cent {
            let f2 = &self.f_ball.entries[i2];
            let inner = f2.element.commutator(&h.element).expect("same signature");
            if inner.is_identity() {
                continue;
            }
            for &i1 in cent {
                if tested >= self.pair_budget {
                    return HOutcome::OutOfBudget(tested);
                }
                tested += 1;
                let f1 = &self.f_ball.entries[i1];
                let c = f1.element.commutator(&inner).expect("same signature");
                if !c.is_identity() && c.commutes(g).expect("same signature") {
                    return HOutcome::Found(
                        Witness {
                            h: h.word.clone(),
                            f1: f1.word.clone(),
                            f2: f2.word.clone(),
                        },
                        tested,
                    );
                }
            }
        }
        HOutcome::Exhausted(tested)
    }
}

/// Bounded check of `g ◁ f`: `h` ranges over the radius-`rh` ball, `f1, f2`
/// over the radius-`rf` ball.
pub fn algebraically_disjoint(
    g: &Element,
    f: &Element,
    gens: &GeneratorSet,
    rh: usize,
    rf: usize,
) -> Result<BoundedVerdict> {
    gens.signature().ensure_same(g.signature())?;
    gens.signature().ensure_same(f.signature())?;
    let h_ball = ball(gens, rh);
    let f_ball = if rf == rh { h_ball.clone() } else { ball(gens, rf) };
    Ok(DisjointnessSearch::new(&h_ball, &f_ball).verdict(g, f))
}

/// Re-runs the search for a reported counterexample `h` and confirms that no
/// witness pair exists in the radius-`rf` ball.
pub fn replay_counterexample(
    g: &Element,
    f: &Element,
    gens: &GeneratorSet,
    h_word: &[i32],
    rf: usize,
) -> Result<bool> {
    let h = gens.evaluate(h_word)?;
    if h.commutes(f)? {
        return Ok(false);
    }
    let f_ball = ball(gens, rf);
    for f2 in &f_ball.entries {
        if !f2.element.commutes(g)? {
            continue;
        }
        let inner = f2.element.commutator(&h)?;
        for f1 in &f_ball.entries {
            if !f1.element.commutes(g)? {
                continue;
            }
            let c = f1.element.commutator(&inner)?;
            if !c.is_identity() && c.commutes(g)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Serialize)]
pub struct MembershipRow {
    pub word: Vec<i32>,
    /// `γ ∈ Γ_{rsupp(f)}`, exact.
    pub in_localized: bool,
    /// `γ` commutes with `g^12` for every verified `g`.
    pub commutes_with_all: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CandidateRecord {
    pub word: Vec<i32>,
    pub verdict: Verdict,
    pub rsupp_within_f: bool,
    pub rsupp_disjoint_from_f: bool,
    pub power12_is_identity: bool,
    /// Ball elements of `Γ_{rsupp(f)}` failing to commute with `g^12`.
    pub violations: Vec<Vec<i32>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Discrepancy {
    pub gamma: Vec<i32>,
    pub g: Vec<i32>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AlgSuppReport {
    pub radius: usize,
    pub ball_size: usize,
    pub rsupp_f: String,
    pub rows: Vec<MembershipRow>,
    pub candidates: Vec<CandidateRecord>,
    /// `γ ∈ Γ_{rsupp(f)}` but `γ` fails to commute with some verified `g^12`.
    pub containment_violations: Vec<Discrepancy>,
    /// `γ ∉ Γ_{rsupp(f)}` yet commuting with every verified `g^12`; expected
    /// at bounded radius and only reported.
    pub converse_gaps: Vec<Vec<i32>>,
}

impl AlgSuppReport {
    pub fn verified(&self) -> impl Iterator<Item = &CandidateRecord> {
        self.candidates
            .iter()
            .filter(|c| matches!(c.verdict, Verdict::VerifiedUpTo { .. }))
    }
}

/// Cross-checks `Γ_{rsupp(f)}` against the centralizer of `{g^12 : g ◁ f}`
/// on the radius-`radius` ball, with every `g` taken from the same ball.
pub fn check_alg_supp(f: &Element, gens: &GeneratorSet, radius: usize) -> Result<AlgSuppReport> {
    gens.signature().ensure_same(f.signature())?;
    let b = ball(gens, radius);
    let support = f.rsupp();
    let search = DisjointnessSearch::new(&b, &b);
    let hs = search.noncommuting(f);

    let lhs: Vec<bool> = b
        .entries
        .iter()
        .map(|e| in_localized_subgroup(&e.element, &support))
        .collect::<Result<_>>()?;

    let mut candidates = Vec::with_capacity(b.len());
    let mut rhs = vec![true; b.len()];
    let mut containment_violations = Vec::new();
    for g in &b.entries {
        let v = search.verdict_with(&g.element, &hs);
        let g_support = g.element.rsupp();
        let power = g.element.power(12);
        let mut violations = Vec::new();
        if v.is_verified() {
            let commuting: Vec<bool> = b
                .entries
                .par_iter()
                .map(|gamma| gamma.element.commutes(&power).expect("same signature"))
                .collect();
            for (i, ok) in commuting.into_iter().enumerate() {
                if !ok {
                    rhs[i] = false;
                    if lhs[i] {
                        violations.push(b.entries[i].word.clone());
                        containment_violations.push(Discrepancy {
                            gamma: b.entries[i].word.clone(),
                            g: g.word.clone(),
                        });
                    }
                }
            }
        }
        candidates.push(CandidateRecord {
            word: g.word.clone(),
            verdict: v.verdict,
            rsupp_within_f: g_support.subset(&support)?,
            rsupp_disjoint_from_f: g_support.is_disjoint_from(&support)?,
            power12_is_identity: power.is_identity(),
            violations,
        });
    }

    let rows: Vec<MembershipRow> = b
        .entries
        .iter()
        .zip(lhs.iter().zip(&rhs))
        .map(|(e, (&l, &r))| MembershipRow {
            word: e.word.clone(),
            in_localized: l,
            commutes_with_all: r,
        })
        .collect();
    let converse_gaps = rows
        .iter()
        .filter(|r| !r.in_localized && r.commutes_with_all)
        .map(|r| r.word.clone())
        .collect();
    Ok(AlgSuppReport {
        radius,
        ball_size: b.len(),
        rsupp_f: support.render(),
        rows,
        candidates,
        containment_violations,
        converse_gaps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig1() -> Signature {
        Signature::new(vec![2]).unwrap()
    }

    fn el(rows: &[(&str, &str)]) -> Element {
        Element::from_text_rows(&sig1(), rows).unwrap()
    }

    fn swap() -> Element {
        el(&[("[00]", "[01]"), ("[01]", "[00]"), ("[1]", "[1]")])
    }

    fn swap_right() -> Element {
        el(&[("[10]", "[11]"), ("[11]", "[10]"), ("[0]", "[0]")])
    }

    fn x0() -> Element {
        el(&[("[0]", "[00]"), ("[10]", "[01]"), ("[11]", "[1]")])
    }

    fn clopen(s: &str) -> Clopen {
        Clopen::parse(s, &sig1()).unwrap()
    }

    #[test]
    fn localized_membership_examples() {
        let id = Element::identity(&sig1());
        assert!(in_localized_subgroup(&id, &Clopen::empty(&sig1())).unwrap());
        assert!(in_localized_subgroup(&swap(), &clopen("{[0]}")).unwrap());
        assert!(!in_localized_subgroup(&swap(), &clopen("{[1]}")).unwrap());
    }

    #[test]
    fn ball_examples() {
        let gens = GeneratorSet::new("swap", vec![swap()]).unwrap();
        assert_eq!(ball(&gens, 0).len(), 1);
        assert_eq!(ball(&gens, 1).len(), 2);
        assert_eq!(ball(&gens, 3).len(), 2);

        let gens = GeneratorSet::new("mixed", vec![swap(), x0()]).unwrap();
        let mut last = 0;
        for r in 0..4 {
            let b = ball(&gens, r);
            assert!(b.len() >= last);
            last = b.len();
            for e in &b.entries {
                assert!(gens.evaluate(&e.word).unwrap().same_as(&e.element).unwrap());
            }
        }
    }

    #[test]
    fn generator_sets_reject_bad_input() {
        assert!(matches!(GeneratorSet::new("none", vec![]), Err(Error::EmptyGenerators)));
        assert!(GeneratorSet::new("id", vec![Element::identity(&sig1())]).is_err());
        let gens = GeneratorSet::new("swap", vec![swap()]).unwrap();
        assert!(gens.evaluate(&[2]).is_err());
    }

    #[test]
    fn zero_radius_is_vacuous() {
        let gens = GeneratorSet::new("v2", vec![swap(), x0()]).unwrap();
        let v = algebraically_disjoint(&Element::identity(&sig1()), &x0(), &gens, 0, 2).unwrap();
        assert_eq!(v.verdict, Verdict::VerifiedUpTo { radius: 0 });
        assert_eq!(v.stats.h_outside_centralizer, 0);
    }

    #[test]
    fn counterexamples_replay() {
        let gens = GeneratorSet::new("v2", vec![swap(), swap_right(), x0()]).unwrap();
        // g = x0 has full support, so nothing outside C(x0) should find
        // witnesses commuting with it for long.
        let v = algebraically_disjoint(&x0(), &swap(), &gens, 2, 2).unwrap();
        if let Verdict::Counterexample { h } = &v.verdict {
            assert!(replay_counterexample(&x0(), &swap(), &gens, h, 2).unwrap());
        } else {
            panic!("expected a counterexample, got {:?}", v.verdict);
        }
    }
}
