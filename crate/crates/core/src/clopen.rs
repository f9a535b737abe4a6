//! Clopen subsets of `X = ∏ X_{k_i}` as finite disjoint unions of multicylinders.
//!
//! Every [`Clopen`] keeps its cells pairwise disjoint. Set operations are
//! exact and reduce to cylinder intersection and cylinder difference;
//! emptiness is structural (no cells), so equality and containment never
//! depend on the chosen representative.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::point::RationalPoint;
use crate::words::{prefix_compare, PrefixOrder, Signature, WordTuple};

/// The basic clopen set `u_1 X_{k_1} × ... × u_m X_{k_m}`.
pub type MultiCylinder = WordTuple;

/// Exact uniform product measure.
pub type Measure = BigRational;

/// Intersection of two multicylinders; `None` when some coordinate pair is incomparable.
pub fn intersect_cylinders(a: &MultiCylinder, b: &MultiCylinder) -> Option<MultiCylinder> {
    a.words()
        .iter()
        .zip(b.words())
        .map(|(x, y)| match prefix_compare(x, y) {
            PrefixOrder::Incomparable => None,
            PrefixOrder::AIsPrefix => Some(y.clone()),
            PrefixOrder::Equal | PrefixOrder::BIsPrefix => Some(x.clone()),
        })
        .collect::<Option<Vec<_>>>()
        .map(WordTuple::new)
}

pub fn disjoint(a: &MultiCylinder, b: &MultiCylinder) -> bool {
    a.words()
        .iter()
        .zip(b.words())
        .any(|(x, y)| !x.comparable(y))
}

/// `∏ k_i^{-|u_i|}`.
pub fn cylinder_measure(sig: &Signature, c: &MultiCylinder) -> Measure {
    let mut denom = BigInt::one();
    for (w, &k) in c.words().iter().zip(sig.sizes()) {
        denom *= BigInt::from(k).pow(w.len() as u32);
    }
    BigRational::new(BigInt::one(), denom)
}

/// `c \ d` as disjoint cylinders.
///
/// With `i = c ∩ d`, coordinate `j` contributes the off-path siblings along
/// `c_j ⊑ i_j`, with earlier coordinates pinned to `i` and later ones to `c`.
pub fn subtract_cylinder(sig: &Signature, c: &MultiCylinder, d: &MultiCylinder) -> Vec<MultiCylinder> {
    let Some(inter) = intersect_cylinders(c, d) else {
        return vec![c.clone()];
    };
    let mut out = Vec::new();
    let mut current = c.clone();
    for j in 0..sig.dims() {
        let target = inter.word(j);
        let start = c.word(j).len();
        for len in start..target.len() {
            let stem = target.truncate(len);
            let next = target.letters()[len];
            for a in 0..sig.size(j) as u8 {
                if a != next {
                    out.push(current.with_word(j, stem.child(a)));
                }
            }
        }
        current = current.with_word(j, target.clone());
    }
    out
}

/// The first overlapping pair of cells, if any.
pub fn find_overlap(cells: &[MultiCylinder]) -> Option<(usize, usize)> {
    for i in 0..cells.len() {
        for j in i + 1..cells.len() {
            if !disjoint(&cells[i], &cells[j]) {
                return Some((i, j));
            }
        }
    }
    None
}

/// Measure of a list of cells that must be pairwise disjoint.
pub fn measure_of_cells(sig: &Signature, cells: &[MultiCylinder]) -> Result<Measure> {
    if let Some((first, second)) = find_overlap(cells) {
        return Err(Error::OverlappingCells {
            first,
            second,
            side: crate::error::TableSide::Domain,
        });
    }
    Ok(cells
        .iter()
        .map(|c| cylinder_measure(sig, c))
        .fold(BigRational::zero(), |acc, m| acc + m))
}

/// Disjoint cells of total measure one cover `X` exactly.
pub fn is_partition(sig: &Signature, cells: &[MultiCylinder]) -> bool {
    matches!(measure_of_cells(sig, cells), Ok(m) if m.is_one())
}

#[derive(Debug, Clone)]
pub struct Clopen {
    sig: Signature,
    cells: Vec<MultiCylinder>,
}

impl Clopen {
    pub fn empty(sig: &Signature) -> Self {
        Clopen {
            sig: sig.clone(),
            cells: Vec::new(),
        }
    }

    pub fn whole(sig: &Signature) -> Self {
        Clopen {
            sig: sig.clone(),
            cells: vec![sig.empty_tuple()],
        }
    }

    pub fn cylinder(sig: &Signature, c: MultiCylinder) -> Self {
        Clopen {
            sig: sig.clone(),
            cells: vec![c],
        }
    }

    /// Cells must already be pairwise disjoint.
    pub fn new(sig: &Signature, cells: Vec<MultiCylinder>) -> Result<Self> {
        for c in &cells {
            sig.check_tuple(c)?;
        }
        if let Some((first, second)) = find_overlap(&cells) {
            return Err(Error::OverlappingCells {
                first,
                second,
                side: crate::error::TableSide::Domain,
            });
        }
        Ok(Clopen {
            sig: sig.clone(),
            cells,
        })
    }

    pub(crate) fn from_disjoint(sig: &Signature, cells: Vec<MultiCylinder>) -> Self {
        debug_assert!(find_overlap(&cells).is_none());
        Clopen {
            sig: sig.clone(),
            cells,
        }
    }

    /// The union of arbitrary (possibly overlapping) cells.
    pub fn from_union(sig: &Signature, cells: impl IntoIterator<Item = MultiCylinder>) -> Self {
        let mut acc = Clopen::empty(sig);
        for c in cells {
            let piece = Clopen::cylinder(sig, c).difference_unchecked(&acc);
            acc.cells.extend(piece.cells);
        }
        acc.normalize()
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn cells(&self) -> &[MultiCylinder] {
        &self.cells
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains_point(&self, p: &RationalPoint) -> bool {
        self.cells.iter().any(|c| p.has_prefix(c))
    }

    pub fn measure(&self) -> Measure {
        self.cells
            .iter()
            .map(|c| cylinder_measure(&self.sig, c))
            .fold(BigRational::zero(), |acc, m| acc + m)
    }

    fn difference_unchecked(&self, other: &Clopen) -> Clopen {
        let mut pieces = self.cells.clone();
        for d in &other.cells {
            pieces = pieces
                .iter()
                .flat_map(|c| subtract_cylinder(&self.sig, c, d))
                .collect();
            if pieces.is_empty() {
                break;
            }
        }
        Clopen::from_disjoint(&self.sig, pieces)
    }

    pub fn difference(&self, other: &Clopen) -> Result<Clopen> {
        self.sig.ensure_same(&other.sig)?;
        Ok(self.difference_unchecked(other).normalize())
    }

    pub fn complement(&self) -> Clopen {
        Clopen::whole(&self.sig).difference_unchecked(self).normalize()
    }

    pub fn intersect(&self, other: &Clopen) -> Result<Clopen> {
        self.sig.ensure_same(&other.sig)?;
        let cells = self
            .cells
            .iter()
            .flat_map(|a| other.cells.iter().filter_map(move |b| intersect_cylinders(a, b)))
            .collect();
        Ok(Clopen::from_disjoint(&self.sig, cells).normalize())
    }

    pub fn union(&self, other: &Clopen) -> Result<Clopen> {
        self.sig.ensure_same(&other.sig)?;
        let extra = other.difference_unchecked(self);
        let mut cells = self.cells.clone();
        cells.extend(extra.cells);
        Ok(Clopen::from_disjoint(&self.sig, cells).normalize())
    }

    pub fn subset(&self, other: &Clopen) -> Result<bool> {
        self.sig.ensure_same(&other.sig)?;
        Ok(self.difference_unchecked(other).is_empty())
    }

    pub fn equals(&self, other: &Clopen) -> Result<bool> {
        Ok(self.subset(other)? && other.subset(self)?)
    }

    pub fn is_disjoint_from(&self, other: &Clopen) -> Result<bool> {
        self.sig.ensure_same(&other.sig)?;
        Ok(self
            .cells
            .iter()
            .all(|a| other.cells.iter().all(|b| disjoint(a, b))))
    }

    /// Merges complete sibling families (coordinate 1 first) and sorts the cells.
    pub fn normalize(&self) -> Clopen {
        let mut set: BTreeSet<MultiCylinder> = self.cells.iter().cloned().collect();
        loop {
            let mut changed = false;
            for coord in 0..self.sig.dims() {
                while merge_siblings(&self.sig, &mut set, coord) {
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        Clopen {
            sig: self.sig.clone(),
            cells: set.into_iter().collect(),
        }
    }

    /// Refines every cell to words of exactly `depth[i]` letters in coordinate `i`.
    ///
    /// Cells already longer than the requested depth are kept as they are.
    pub fn refine_to(&self, depth: &[usize]) -> Vec<MultiCylinder> {
        let mut out = Vec::new();
        for c in &self.cells {
            let mut layer = vec![c.clone()];
            for (coord, &d) in depth.iter().enumerate() {
                let k = self.sig.size(coord);
                layer = layer
                    .into_iter()
                    .flat_map(|cell| extend_word(&cell, coord, d, k))
                    .collect();
            }
            out.extend(layer);
        }
        out
    }

    pub fn render(&self) -> String {
        if self.cells.is_empty() {
            return "{ }".to_string();
        }
        let parts: Vec<String> = self.cells.iter().map(|c| c.render(&self.sig)).collect();
        format!("{{ {} }}", parts.join("; "))
    }

    /// Parses `{ [..]; [..] }`; the cells may overlap and are disjointified.
    pub fn parse(text: &str, sig: &Signature) -> Result<Clopen> {
        let inner = crate::words::strip_brackets(text.trim(), '{', '}').trim();
        if inner.is_empty() {
            return Ok(Clopen::empty(sig));
        }
        let cells = inner
            .split(';')
            .map(|c| {
                let t = WordTuple::parse(c, sig)?;
                sig.check_tuple(&t)?;
                Ok(t)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Clopen::from_union(sig, cells))
    }
}

fn extend_word(cell: &MultiCylinder, coord: usize, depth: usize, k: u32) -> Vec<MultiCylinder> {
    let mut words = vec![cell.word(coord).clone()];
    while words[0].len() < depth {
        words = words
            .iter()
            .flat_map(|w| (0..k as u8).map(move |a| w.child(a)))
            .collect();
    }
    words.into_iter().map(|w| cell.with_word(coord, w)).collect()
}

fn merge_siblings(sig: &Signature, set: &mut BTreeSet<MultiCylinder>, coord: usize) -> bool {
    let k = sig.size(coord) as u8;
    let parents: BTreeSet<MultiCylinder> = set
        .iter()
        .filter_map(|c| c.word(coord).parent().map(|p| c.with_word(coord, p)))
        .collect();
    let mut merged = false;
    for parent in parents {
        let children: Vec<MultiCylinder> = (0..k)
            .map(|a| parent.with_word(coord, parent.word(coord).child(a)))
            .collect();
        if children.iter().all(|c| set.contains(c)) {
            for c in &children {
                set.remove(c);
            }
            set.insert(parent);
            merged = true;
        }
    }
    merged
}

/// Semantic equality of the denoted sets.
impl PartialEq for Clopen {
    fn eq(&self, other: &Self) -> bool {
        self.equals(other).unwrap_or(false)
    }
}

impl fmt::Display for Clopen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(sizes: &[u32]) -> Signature {
        Signature::new(sizes.to_vec()).unwrap()
    }

    fn cyl(s: &str, sig: &Signature) -> MultiCylinder {
        WordTuple::parse(s, sig).unwrap()
    }

    fn clopen(s: &str, sig: &Signature) -> Clopen {
        Clopen::parse(s, sig).unwrap()
    }

    fn rendered(c: &Clopen) -> String {
        c.render()
    }

    #[test]
    fn intersect_cylinder_examples() {
        let s = sig(&[2, 2]);
        assert_eq!(
            intersect_cylinders(&cyl("[0,1]", &s), &cyl("[01,]", &s)),
            Some(cyl("[01,1]", &s))
        );
        let s1 = sig(&[2]);
        assert_eq!(intersect_cylinders(&cyl("[0]", &s1), &cyl("[1]", &s1)), None);
        assert_eq!(
            intersect_cylinders(&cyl("[]", &s1), &cyl("[0110]", &s1)),
            Some(cyl("[0110]", &s1))
        );
    }

    #[test]
    fn complement_examples() {
        let s1 = sig(&[2]);
        assert_eq!(rendered(&clopen("{[0]}", &s1).complement()), "{ [1] }");
        assert_eq!(rendered(&clopen("{[00]}", &s1).complement()), "{ [01]; [1] }");
        let s2 = sig(&[2, 2]);
        let c = Clopen::whole(&s2).difference_unchecked(&clopen("{[0,0]}", &s2));
        assert_eq!(c.cells(), &[cyl("[1,]", &s2), cyl("[0,1]", &s2)]);
    }

    #[test]
    fn boolean_examples() {
        let s1 = sig(&[2]);
        let u = clopen("{[0]}", &s1).union(&clopen("{[1]}", &s1)).unwrap();
        assert!(u.equals(&Clopen::whole(&s1)).unwrap());
        assert!(clopen("{[01]}", &s1).subset(&clopen("{[0]}", &s1)).unwrap());
        let i = clopen("{[0];[10]}", &s1).intersect(&clopen("{[1]}", &s1)).unwrap();
        assert_eq!(rendered(&i), "{ [10] }");
    }

    #[test]
    fn measure_examples() {
        let s1 = sig(&[2]);
        let cells = vec![cyl("[0]", &s1), cyl("[10]", &s1), cyl("[11]", &s1)];
        assert!(measure_of_cells(&s1, &cells).unwrap().is_one());
        assert!(Clopen::whole(&s1).measure().is_one());
        let s3 = sig(&[3]);
        let m = measure_of_cells(&s3, &[cyl("[0]", &s3), cyl("[1]", &s3)]).unwrap();
        assert_eq!(m, BigRational::new(2.into(), 3.into()));
        assert!(matches!(
            measure_of_cells(&s1, &[cyl("[0]", &s1), cyl("[01]", &s1)]),
            Err(Error::OverlappingCells { first: 0, second: 1, .. })
        ));
    }

    #[test]
    fn partition_examples() {
        let s1 = sig(&[2]);
        assert!(is_partition(&s1, &[cyl("[0]", &s1), cyl("[10]", &s1), cyl("[11]", &s1)]));
        assert!(!is_partition(&s1, &[cyl("[0]", &s1), cyl("[01]", &s1)]));
        let s2 = sig(&[2, 2]);
        assert!(is_partition(&s2, &[cyl("[0,]", &s2), cyl("[1,0]", &s2), cyl("[1,1]", &s2)]));
        assert!(!is_partition(&s2, &[cyl("[0,]", &s2), cyl("[1,0]", &s2)]));
    }

    #[test]
    fn normalize_examples() {
        let s1 = sig(&[2]);
        let c = Clopen::new(&s1, vec![cyl("[00]", &s1), cyl("[01]", &s1)]).unwrap();
        assert_eq!(rendered(&c.normalize()), "{ [0] }");
        let c = Clopen::new(&s1, vec![cyl("[0]", &s1), cyl("[1]", &s1)]).unwrap();
        assert_eq!(rendered(&c.normalize()), "{ [] }");
        let s2 = sig(&[2, 2]);
        let c = Clopen::new(&s2, vec![cyl("[0,0]", &s2), cyl("[0,1]", &s2)]).unwrap();
        assert_eq!(rendered(&c.normalize()), "{ [0,] }");
    }

    #[test]
    fn empty_and_signature_errors() {
        let s1 = sig(&[2]);
        let s2 = sig(&[2, 2]);
        assert!(Clopen::empty(&s1).complement().equals(&Clopen::whole(&s1)).unwrap());
        assert!(Clopen::whole(&s1).union(&Clopen::whole(&s2)).is_err());
        assert!(Clopen::new(&s1, vec![cyl("[0]", &s1), cyl("[01]", &s1)]).is_err());
        assert_eq!(Clopen::parse("{ }", &s1).unwrap().cells().len(), 0);
    }

    #[test]
    fn refine_to_depth() {
        let s2 = sig(&[2, 3]);
        let cells = Clopen::whole(&s2).refine_to(&[1, 1]);
        assert_eq!(cells.len(), 6);
        assert!(is_partition(&s2, &cells));
    }

    #[test]
    fn contains_point() {
        let s1 = sig(&[2]);
        let c = clopen("{[0];[10]}", &s1);
        assert!(c.contains_point(&RationalPoint::parse("[10(1)]", &s1).unwrap()));
        assert!(!c.contains_point(&RationalPoint::parse("[(1)]", &s1).unwrap()));
    }
}
