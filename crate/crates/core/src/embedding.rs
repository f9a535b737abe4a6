//! Coordinatewise embeddings `V_{k_1,...,k_m} → V_{l_1,...,l_n}` and the
//! coordinate projections that serve as their anchor maps.
//!
//! An [`EmbeddingSpec`] sends source coordinate `i` to target coordinate
//! `map[i]`; unmapped target coordinates are passive and carry the empty
//! word in every row of a pushed table. The projection `ρ: Y → X` reads the
//! mapped coordinates back.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::GeneratorSet;
use crate::clopen::{Clopen, MultiCylinder};
use crate::error::{Error, Result};
use crate::point::{EventuallyPeriodic, RationalPoint};
use crate::table::{random_element, Element, LocusFactor, Row, Table};
use crate::words::{Signature, Word, WordTuple};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddingSpec {
    source: Signature,
    target: Signature,
    map: Vec<usize>,
}

impl EmbeddingSpec {
    pub fn new(source: Signature, target: Signature, map: Vec<usize>) -> Result<Self> {
        if map.len() != source.dims() {
            return Err(Error::InvalidEmbedding(format!(
                "{} source coordinates but {} assignments",
                source.dims(),
                map.len()
            )));
        }
        for (i, &t) in map.iter().enumerate() {
            if t >= target.dims() {
                return Err(Error::InvalidEmbedding(format!(
                    "source coordinate {i} sent to missing target coordinate {t}"
                )));
            }
            if map[..i].contains(&t) {
                return Err(Error::InvalidEmbedding(format!(
                    "target coordinate {t} assigned twice"
                )));
            }
            if source.size(i) != target.size(t) {
                return Err(Error::InvalidEmbedding(format!(
                    "alphabet {} of source coordinate {i} differs from {} of target coordinate {t}",
                    source.size(i),
                    target.size(t)
                )));
            }
        }
        Ok(EmbeddingSpec {
            source,
            target,
            map,
        })
    }

    /// The embedding `V_2 → 2V_2` acting on the first coordinate.
    pub fn first_coordinate(k: u32, extra: usize) -> Self {
        let source = Signature::new(vec![k]).expect("valid alphabet");
        let target = Signature::new(vec![k; extra + 1]).expect("valid alphabet");
        EmbeddingSpec::new(source, target, vec![0]).expect("valid map")
    }

    pub fn source(&self) -> &Signature {
        &self.source
    }

    pub fn target(&self) -> &Signature {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    /// `other ∘ self`: first `self`, then `other`.
    pub fn then(&self, other: &EmbeddingSpec) -> Result<EmbeddingSpec> {
        self.target.ensure_same(&other.source)?;
        EmbeddingSpec::new(
            self.source.clone(),
            other.target.clone(),
            self.map.iter().map(|&t| other.map[t]).collect(),
        )
    }

    fn lift_tuple(&self, t: &WordTuple) -> WordTuple {
        let mut words = vec![Word::empty(); self.target.dims()];
        for (i, &j) in self.map.iter().enumerate() {
            words[j] = t.word(i).clone();
        }
        WordTuple::new(words)
    }

    pub fn push_forward(&self, e: &Element) -> Result<Element> {
        self.source.ensure_same(e.signature())?;
        let rows = e
            .rows()
            .iter()
            .map(|r| Row::new(self.lift_tuple(&r.v), self.lift_tuple(&r.u)))
            .collect();
        Element::new(Table::new(self.target.clone(), rows))
    }

    /// `ρ⁻¹(c)` for the coordinate projection `ρ`.
    pub fn anchor_preimage(&self, c: &Clopen) -> Result<Clopen> {
        self.source.ensure_same(c.signature())?;
        Clopen::new(
            &self.target,
            c.cells().iter().map(|cell| self.lift_tuple(cell)).collect(),
        )
    }

    /// The anchor projection `ρ(q)`.
    pub fn project(&self, q: &RationalPoint) -> Result<RationalPoint> {
        q.check_signature(&self.target)?;
        Ok(RationalPoint::new(
            self.map.iter().map(|&j| q.coord(j).clone()).collect(),
        ))
    }

    pub fn project_tuple(&self, t: &WordTuple) -> WordTuple {
        WordTuple::new(self.map.iter().map(|&j| t.word(j).clone()).collect())
    }
}

/// A fixed element of full support: the odometer-like table acting on the
/// first coordinate, conjugated by a seeded random element when `seed > 0`.
pub fn full_support_element(sig: &Signature, seed: u64) -> Element {
    let k = sig.size(0) as u8;
    let base = sig.empty_tuple();
    let at = |letters: &[u8]| base.with_word(0, Word::from(letters));
    let mut rows = Vec::new();
    for a in 0..k - 1 {
        rows.push(Row::new(at(&[a]), at(&[a + 1])));
    }
    for a in 0..k {
        rows.push(Row::new(at(&[k - 1, a]), at(&[0, a])));
    }
    let odometer = Element::new(Table::new(sig.clone(), rows)).expect("valid table");
    if seed == 0 {
        odometer
    } else {
        let g = random_element(sig, 3, seed).expect("positive depth");
        odometer.conjugate(&g).expect("same signature")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AnchorEntry {
    pub index: usize,
    pub preimage: String,
    pub support: String,
    pub supports_equal: bool,
    pub equivariant: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnchorReport {
    pub entries: Vec<AnchorEntry>,
    pub passed: bool,
}

/// `ρ⁻¹(rsupp γ) = rsupp Φ(γ)` for every element, plus `ρ(Φ(γ) q) = γ ρ(q)` on
/// `points_per_element` seeded random target points.
pub fn check_anchor(
    spec: &EmbeddingSpec,
    elements: &[Element],
    points_per_element: usize,
    seed: u64,
) -> Result<AnchorReport> {
    let entries = elements
        .par_iter()
        .enumerate()
        .map(|(index, gamma)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(index as u64));
            let pushed = spec.push_forward(gamma)?;
            let preimage = spec.anchor_preimage(&gamma.rsupp())?;
            let support = pushed.rsupp();
            let supports_equal = preimage.equals(&support)?;
            let mut equivariant = true;
            for _ in 0..points_per_element {
                let q = RationalPoint::random(&mut rng, spec.target(), 4, 3);
                let lhs = spec.project(&pushed.apply(&q)?)?;
                let rhs = gamma.apply(&spec.project(&q)?)?;
                equivariant &= lhs == rhs;
            }
            Ok(AnchorEntry {
                index,
                preimage: preimage.render(),
                support: support.render(),
                supports_equal,
                equivariant,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let passed = entries.iter().all(|e| e.supports_equal && e.equivariant);
    Ok(AnchorReport { entries, passed })
}

#[derive(Debug, Clone, Serialize)]
pub struct LrEntry {
    pub index: usize,
    /// `rsupp τ ⊆ rsupp γ`.
    pub source_side: bool,
    /// `rsupp Φ(τ) ⊆ rsupp Φ(γ)`.
    pub target_side: bool,
    pub consistent: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LrReport {
    pub entries: Vec<LrEntry>,
    pub passed: bool,
}

pub fn check_local_regularity(
    spec: &EmbeddingSpec,
    gamma: &Element,
    probes: &[Element],
) -> Result<LrReport> {
    let support = gamma.rsupp();
    let pushed_support = spec.push_forward(gamma)?.rsupp();
    let entries = probes
        .iter()
        .enumerate()
        .map(|(index, tau)| {
            let source_side = tau.rsupp().subset(&support)?;
            let target_side = spec.push_forward(tau)?.rsupp().subset(&pushed_support)?;
            Ok(LrEntry {
                index,
                source_side,
                target_side,
                consistent: source_side == target_side,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let passed = entries.iter().all(|e| e.consistent);
    Ok(LrReport { entries, passed })
}

/// One coordinate of a cell of a fixed-point set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum CellFactor {
    Prefix(Word),
    Point(EventuallyPeriodic),
}

fn meet_factor(a: &CellFactor, b: &CellFactor) -> Option<CellFactor> {
    use CellFactor::*;
    match (a, b) {
        (Prefix(x), Prefix(y)) => {
            if x.is_prefix_of(y) {
                Some(Prefix(y.clone()))
            } else if y.is_prefix_of(x) {
                Some(Prefix(x.clone()))
            } else {
                None
            }
        }
        (Prefix(w), Point(p)) | (Point(p), Prefix(w)) => p.has_prefix(w).then(|| Point(p.clone())),
        (Point(p), Point(q)) => (p == q).then(|| Point(p.clone())),
    }
}

type Cell = Vec<CellFactor>;

fn fixed_cells(e: &Element) -> Vec<Cell> {
    let mut cells: Vec<Cell> = e
        .rsupp()
        .complement()
        .cells()
        .iter()
        .map(|c| c.words().iter().cloned().map(CellFactor::Prefix).collect())
        .collect();
    for locus in e.fixed_locus().nonempty() {
        cells.push(
            locus
                .factors
                .iter()
                .enumerate()
                .map(|(i, f)| match f {
                    LocusFactor::SinglePoint(q) => CellFactor::Point(q.clone()),
                    _ => CellFactor::Prefix(locus.cell.word(i).clone()),
                })
                .collect(),
        );
    }
    cells
}

#[derive(Debug, Clone, Serialize)]
pub struct FullSupportReport {
    /// Clopen part of the common fixed set.
    pub fixed_clopen: String,
    /// Nowhere dense pieces of the common fixed set, one string per cell.
    pub nowhere_dense_cells: Vec<String>,
    /// A representative of each nowhere dense cell, unrolled to `depth`,
    /// confirmed fixed by every pushed generator.
    pub candidates: Vec<String>,
    pub certified_full_support: bool,
}

/// Common fixed set of `Φ(gens)`: the clopen part is exact; points fixed only
/// because of periodic loci are listed cell by cell.
pub fn check_full_support(
    spec: &EmbeddingSpec,
    gens: &GeneratorSet,
    depth: usize,
) -> Result<FullSupportReport> {
    spec.source().ensure_same(gens.signature())?;
    let pushed: Vec<Element> = gens
        .elements()
        .iter()
        .map(|g| spec.push_forward(g))
        .collect::<Result<_>>()?;
    let target = spec.target();
    let mut common: Vec<Cell> = vec![vec![CellFactor::Prefix(Word::empty()); target.dims()]];
    for g in &pushed {
        let mine = fixed_cells(g);
        let mut next = Vec::new();
        for a in &common {
            for b in &mine {
                if let Some(c) = a
                    .iter()
                    .zip(b)
                    .map(|(x, y)| meet_factor(x, y))
                    .collect::<Option<Cell>>()
                {
                    next.push(c);
                }
            }
        }
        next.sort();
        next.dedup();
        common = next;
    }

    let (clopen_cells, thin): (Vec<Cell>, Vec<Cell>) = common
        .into_iter()
        .partition(|c| c.iter().all(|f| matches!(f, CellFactor::Prefix(_))));
    let fixed_clopen = Clopen::from_union(
        target,
        clopen_cells.iter().map(|c| {
            WordTuple::new(
                c.iter()
                    .map(|f| match f {
                        CellFactor::Prefix(w) => w.clone(),
                        CellFactor::Point(_) => unreachable!(),
                    })
                    .collect(),
            )
        }),
    );

    let mut nowhere_dense_cells = Vec::new();
    let mut candidates = Vec::new();
    for cell in &thin {
        let parts: Vec<String> = cell
            .iter()
            .zip(target.sizes())
            .map(|(f, &k)| match f {
                CellFactor::Prefix(w) => format!("{}*", w.render(k)),
                CellFactor::Point(p) => p.render(k),
            })
            .collect();
        nowhere_dense_cells.push(format!("[{}]", parts.join(",")));
        let rep = RationalPoint::new(
            cell.iter()
                .map(|f| match f {
                    CellFactor::Prefix(w) => EventuallyPeriodic::constant(0).prepend(w),
                    CellFactor::Point(p) => p.clone(),
                })
                .collect(),
        );
        for g in &pushed {
            if g.moves(&rep)? {
                return Err(Error::InvalidBound(format!(
                    "representative {} of a fixed cell is moved",
                    rep.render(target)
                )));
            }
        }
        candidates.push(rep.unroll(depth).render(target));
    }
    Ok(FullSupportReport {
        certified_full_support: fixed_clopen.is_empty() && thin.is_empty(),
        fixed_clopen: fixed_clopen.render(),
        nowhere_dense_cells,
        candidates,
    })
}

/// Extends every source coordinate of `mu` by one letter, picking the child
/// whose pushed localized copy of `full` has `y` in its support. Only
/// target-side membership is consulted.
pub(crate) fn descend(
    spec: &EmbeddingSpec,
    full: &Element,
    y: &RationalPoint,
    mu: &MultiCylinder,
) -> Result<Option<MultiCylinder>> {
    let mut children = vec![mu.clone()];
    for coord in 0..spec.source().dims() {
        let k = spec.source().size(coord) as u8;
        children = children
            .iter()
            .flat_map(|c| (0..k).map(move |a| c.with_word(coord, c.word(coord).child(a))))
            .collect();
    }
    for child in children {
        let tau = full.localize(&child)?;
        if spec.push_forward(&tau)?.rsupp().contains_point(y) {
            return Ok(Some(child));
        }
    }
    Ok(None)
}

/// A source element `τ` with `y ∈ rsupp Φ(τ) ⊆ U`, obtained by localizing
/// `full` (an element of full support) to ever smaller source cylinders.
pub fn witness_local_density(
    spec: &EmbeddingSpec,
    y: &RationalPoint,
    u: &Clopen,
    full: &Element,
    probe_depth: usize,
) -> Result<Element> {
    spec.target().ensure_same(u.signature())?;
    spec.source().ensure_same(full.signature())?;
    y.check_signature(spec.target())?;
    if !u.contains_point(y) {
        return Err(Error::NoWitness(0));
    }
    let mut mu = spec.source().empty_tuple();
    for depth in 0..=probe_depth {
        let tau = full.localize(&mu)?;
        let support = spec.push_forward(&tau)?.rsupp();
        if support.contains_point(y) && support.subset(u)? {
            return Ok(tau);
        }
        if depth == probe_depth {
            break;
        }
        mu = match descend(spec, full, y, &mu)? {
            Some(child) => child,
            None => break,
        };
    }
    Err(Error::NoWitness(probe_depth))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iota() -> EmbeddingSpec {
        EmbeddingSpec::first_coordinate(2, 1)
    }

    fn v2() -> Signature {
        Signature::new(vec![2]).unwrap()
    }

    fn el(rows: &[(&str, &str)]) -> Element {
        Element::from_text_rows(&v2(), rows).unwrap()
    }

    fn swap() -> Element {
        el(&[("[00]", "[01]"), ("[01]", "[00]"), ("[1]", "[1]")])
    }

    fn odometer() -> Element {
        el(&[("[0]", "[1]"), ("[10]", "[00]"), ("[11]", "[01]")])
    }

    fn target_clopen(s: &str) -> Clopen {
        Clopen::parse(s, iota().target()).unwrap()
    }

    #[test]
    fn spec_validation() {
        let s2 = Signature::new(vec![2]).unwrap();
        let s23 = Signature::new(vec![2, 3]).unwrap();
        assert!(EmbeddingSpec::new(s2.clone(), s23.clone(), vec![1]).is_err());
        assert!(EmbeddingSpec::new(s2.clone(), s23.clone(), vec![2]).is_err());
        let s22 = Signature::new(vec![2, 2]).unwrap();
        assert!(EmbeddingSpec::new(s22.clone(), s22.clone(), vec![0, 0]).is_err());
        let swap_coords = EmbeddingSpec::new(s22.clone(), s22.clone(), vec![1, 0]).unwrap();
        let twice = swap_coords.then(&swap_coords).unwrap();
        assert_eq!(twice.map(), &[0, 1]);
    }

    #[test]
    fn push_forward_examples() {
        let spec = iota();
        assert!(spec.push_forward(&Element::identity(&v2())).unwrap().is_identity());
        let pushed = spec.push_forward(&swap()).unwrap();
        let expected = Element::from_text_rows(
            spec.target(),
            &[("[00,]", "[01,]"), ("[01,]", "[00,]"), ("[1,]", "[1,]")],
        )
        .unwrap();
        assert_eq!(pushed.table(), expected.table());
        let q = RationalPoint::parse("[00(1),1(0)]", spec.target()).unwrap();
        assert_eq!(pushed.apply(&q).unwrap().coord(1), q.coord(1));
    }

    #[test]
    fn preimage_examples() {
        let spec = iota();
        let whole = spec.anchor_preimage(&Clopen::whole(&v2())).unwrap();
        assert!(whole.equals(&Clopen::whole(spec.target())).unwrap());
        let c = spec.anchor_preimage(&Clopen::parse("{[0]}", &v2()).unwrap()).unwrap();
        assert_eq!(c.render(), "{ [0,] }");
    }

    #[test]
    fn anchor_examples() {
        let spec = iota();
        let report = check_anchor(&spec, &[Element::identity(&v2()), swap()], 5, 1).unwrap();
        assert!(report.passed);
        assert_eq!(report.entries[0].support, "{ }");
        assert_eq!(report.entries[1].support, "{ [0,] }");
        assert_eq!(report.entries[1].preimage, "{ [0,] }");
    }

    #[test]
    fn local_regularity_examples() {
        let spec = iota();
        let swap_right = el(&[("[10]", "[11]"), ("[11]", "[10]"), ("[0]", "[0]")]);
        let report = check_local_regularity(&spec, &swap(), &[swap(), swap_right]).unwrap();
        assert!(report.passed);
        assert!(report.entries[0].source_side && report.entries[0].target_side);
        assert!(!report.entries[1].source_side && !report.entries[1].target_side);
    }

    #[test]
    fn full_support_examples() {
        let spec = iota();
        let gens = GeneratorSet::new("odo", vec![odometer()]).unwrap();
        let r = check_full_support(&spec, &gens, 6).unwrap();
        assert!(r.certified_full_support);

        let gens = GeneratorSet::new("swap", vec![swap()]).unwrap();
        let r = check_full_support(&spec, &gens, 6).unwrap();
        assert_eq!(r.fixed_clopen, "{ [1,] }");
        assert!(!r.certified_full_support);

        let x0 = el(&[("[0]", "[00]"), ("[10]", "[01]"), ("[11]", "[1]")]);
        let gens = GeneratorSet::new("x0", vec![x0]).unwrap();
        let r = check_full_support(&spec, &gens, 4).unwrap();
        assert!(r.fixed_clopen == "{ }");
        // x0 fixes 0^∞ and 1^∞ in the first coordinate
        assert_eq!(r.nowhere_dense_cells.len(), 2);
        assert_eq!(r.candidates, vec!["[0000,0000]", "[1111,0000]"]);
    }

    #[test]
    fn density_witness_examples() {
        let spec = iota();
        let y = RationalPoint::parse("[(0),(1)]", spec.target()).unwrap();
        let full = odometer();
        let tau = witness_local_density(&spec, &y, &Clopen::whole(spec.target()), &full, 4).unwrap();
        assert_eq!(tau, full);
        let tau = witness_local_density(&spec, &y, &target_clopen("{[0,]}"), &full, 4).unwrap();
        assert_eq!(spec.push_forward(&tau).unwrap().rsupp().render(), "{ [0,] }");
        let tau = witness_local_density(&spec, &y, &target_clopen("{[00,]}"), &full, 4).unwrap();
        assert_eq!(tau.rsupp().render(), "{ [00] }");
        assert!(matches!(
            witness_local_density(&spec, &y, &target_clopen("{[1,]}"), &full, 4),
            Err(Error::NoWitness(_))
        ));
        // not saturated: no basic of the form [w,*] fits inside [0,0]
        assert!(matches!(
            witness_local_density(&spec, &y, &target_clopen("{[0,1]}"), &full, 4),
            Err(Error::NoWitness(4))
        ));
    }

    #[test]
    fn full_support_elements_have_full_support() {
        for sizes in [vec![2], vec![3], vec![2, 3]] {
            let sig = Signature::new(sizes).unwrap();
            for seed in 0..5 {
                let e = full_support_element(&sig, seed);
                assert!(e.rsupp().equals(&Clopen::whole(&sig)).unwrap());
            }
        }
    }
}
