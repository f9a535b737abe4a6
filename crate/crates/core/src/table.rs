//! Tables and the prefix-replacement homeomorphisms they induce.
//!
//! A table is a list of rows `(v, u)` of word tuples such that both the `v`
//! column and the `u` column partition `X`. The induced map sends `v·x` to
//! `u·x`. Elements are compared by composing with the inverse and checking
//! that every row of the quotient is trivial; no canonical minimal table is
//! ever computed.

use std::fmt;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clopen::{cylinder_measure, disjoint, intersect_cylinders, Clopen, MultiCylinder};
use crate::error::{Error, Result, TableSide};
use crate::point::{EventuallyPeriodic, RationalPoint};
use crate::words::{prefix_compare, PrefixOrder, Signature, WordTuple};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Row {
    pub v: WordTuple,
    pub u: WordTuple,
}

impl Row {
    pub fn new(v: WordTuple, u: WordTuple) -> Self {
        Row { v, u }
    }

    pub fn is_trivial(&self) -> bool {
        self.v == self.u
    }
}

/// A possibly invalid table; see [`validate`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Table {
    sig: Signature,
    rows: Vec<Row>,
}

impl Table {
    pub fn new(sig: Signature, rows: Vec<Row>) -> Self {
        Table { sig, rows }
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    fn sorted(mut self) -> Self {
        self.rows.sort();
        self
    }
}

/// Checks that both columns of `t` partition `X`.
pub fn validate(t: &Table) -> Result<()> {
    if t.rows.is_empty() {
        return Err(Error::EmptyTable);
    }
    for row in &t.rows {
        t.sig.check_tuple(&row.v)?;
        t.sig.check_tuple(&row.u)?;
    }
    check_column(&t.sig, t.rows.iter().map(|r| &r.v).collect(), TableSide::Domain)?;
    check_column(&t.sig, t.rows.iter().map(|r| &r.u).collect(), TableSide::Range)
}

fn check_column(sig: &Signature, cells: Vec<&WordTuple>, side: TableSide) -> Result<()> {
    for i in 0..cells.len() {
        for j in i + 1..cells.len() {
            if !disjoint(cells[i], cells[j]) {
                return Err(Error::OverlappingCells {
                    first: i,
                    second: j,
                    side,
                });
            }
        }
    }
    let total = cells
        .iter()
        .map(|c| cylinder_measure(sig, c))
        .fold(num_rational::BigRational::zero(), |acc, m| acc + m);
    if total.is_one() {
        Ok(())
    } else {
        Err(Error::MeasureDeficit {
            side,
            deficit: num_rational::BigRational::one() - total,
        })
    }
}

/// One factor of the fixed locus of a moved row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LocusFactor {
    /// `u_i = v_i`: the coordinate is unconstrained.
    Full,
    /// `u_i`, `v_i` comparable and distinct: only this sequence is fixed.
    SinglePoint(EventuallyPeriodic),
    /// `u_i`, `v_i` incomparable: nothing in the row is fixed.
    EmptyFactor,
}

/// Points of a moved row's `v`-cell fixed by the element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowLocus {
    pub row: usize,
    pub cell: MultiCylinder,
    pub factors: Vec<LocusFactor>,
}

impl RowLocus {
    pub fn is_empty(&self) -> bool {
        self.factors.contains(&LocusFactor::EmptyFactor)
    }

    pub fn contains(&self, p: &RationalPoint) -> bool {
        p.has_prefix(&self.cell)
            && self.factors.iter().enumerate().all(|(i, f)| match f {
                LocusFactor::Full => true,
                LocusFactor::SinglePoint(q) => p.coord(i) == q,
                LocusFactor::EmptyFactor => false,
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FixedLocus {
    pub rows: Vec<RowLocus>,
}

impl FixedLocus {
    pub fn contains(&self, p: &RationalPoint) -> bool {
        self.rows.iter().any(|r| r.contains(p))
    }

    /// Row loci that are not trivially empty.
    pub fn nonempty(&self) -> impl Iterator<Item = &RowLocus> {
        self.rows.iter().filter(|r| !r.is_empty())
    }
}

/// An element of `V_{k_1,...,k_m}`, held as any valid table representing it.
#[derive(Debug, Clone)]
pub struct Element {
    table: Table,
    identity: bool,
}

impl Element {
    pub fn new(table: Table) -> Result<Self> {
        validate(&table)?;
        Ok(Self::from_valid(table))
    }

    fn from_valid(table: Table) -> Self {
        let table = table.sorted();
        let identity = table.rows.iter().all(Row::is_trivial);
        Element { table, identity }
    }

    pub fn identity(sig: &Signature) -> Self {
        Self::from_valid(Table::new(
            sig.clone(),
            vec![Row::new(sig.empty_tuple(), sig.empty_tuple())],
        ))
    }

    /// Parses rows given as `(v, u)` text tuples, e.g. `("[0]", "[1]")`.
    pub fn from_text_rows(sig: &Signature, rows: &[(&str, &str)]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|(v, u)| Ok(Row::new(WordTuple::parse(v, sig)?, WordTuple::parse(u, sig)?)))
            .collect::<Result<Vec<_>>>()?;
        Element::new(Table::new(sig.clone(), rows))
    }

    pub fn table(&self) -> &Table {
        &self.table
    }

    pub fn signature(&self) -> &Signature {
        &self.table.sig
    }

    pub fn rows(&self) -> &[Row] {
        &self.table.rows
    }

    pub fn is_identity(&self) -> bool {
        self.identity
    }

    pub fn apply(&self, p: &RationalPoint) -> Result<RationalPoint> {
        p.check_signature(self.signature())?;
        let row = self
            .rows()
            .iter()
            .find(|r| p.has_prefix(&r.v))
            .expect("the v column partitions X");
        Ok(p.strip_prefix(&row.v)?.prepend(&row.u))
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Element) -> Result<Element> {
        self.signature().ensure_same(other.signature())?;
        if self.identity {
            return Ok(other.clone());
        }
        if other.identity {
            return Ok(self.clone());
        }
        let mut rows = Vec::new();
        for b in other.rows() {
            for a in self.rows() {
                if let Some(c) = intersect_cylinders(&b.u, &a.v) {
                    let w = c.strip_prefix(&b.u).expect("u_b is a prefix of the meet");
                    let w2 = c.strip_prefix(&a.v).expect("v_a is a prefix of the meet");
                    rows.push(Row::new(b.v.concat(&w), a.u.concat(&w2)));
                }
            }
        }
        Ok(Element::from_valid(Table::new(self.signature().clone(), rows)))
    }

    pub fn invert(&self) -> Element {
        let rows = self
            .rows()
            .iter()
            .map(|r| Row::new(r.u.clone(), r.v.clone()))
            .collect();
        Element::from_valid(Table::new(self.signature().clone(), rows))
    }

    /// Group equality.
    pub fn same_as(&self, other: &Element) -> Result<bool> {
        Ok(self.compose(&other.invert())?.is_identity())
    }

    pub fn commutes(&self, other: &Element) -> Result<bool> {
        let ab = self.compose(other)?;
        let ba = other.compose(self)?;
        ab.same_as(&ba)
    }

    /// `g · self · g⁻¹`.
    pub fn conjugate(&self, g: &Element) -> Result<Element> {
        g.compose(self)?.compose(&g.invert())
    }

    /// `[self, other] = self · other · self⁻¹ · other⁻¹`.
    pub fn commutator(&self, other: &Element) -> Result<Element> {
        self.compose(other)?
            .compose(&self.invert())?
            .compose(&other.invert())
    }

    pub fn power(&self, n: i64) -> Element {
        let mut base = if n < 0 { self.invert() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Element::identity(self.signature());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base).expect("same signature");
            }
            e >>= 1;
            if e > 0 {
                base = base.compose(&base).expect("same signature");
            }
        }
        acc
    }

    /// Regular support: the union of the `v`-cells of the moved rows.
    pub fn rsupp(&self) -> Clopen {
        Clopen::from_disjoint(
            self.signature(),
            self.rows()
                .iter()
                .filter(|r| !r.is_trivial())
                .map(|r| r.v.clone())
                .collect(),
        )
        .normalize()
    }

    /// The same set read off the `u` column.
    pub fn rsupp_from_range(&self) -> Clopen {
        Clopen::from_disjoint(
            self.signature(),
            self.rows()
                .iter()
                .filter(|r| !r.is_trivial())
                .map(|r| r.u.clone())
                .collect(),
        )
        .normalize()
    }

    pub fn fixed_locus(&self) -> FixedLocus {
        let rows = self
            .rows()
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.is_trivial())
            .map(|(j, r)| RowLocus {
                row: j,
                cell: r.v.clone(),
                factors: r
                    .v
                    .words()
                    .iter()
                    .zip(r.u.words())
                    .map(|(v, u)| match prefix_compare(v, u) {
                        PrefixOrder::Equal => LocusFactor::Full,
                        PrefixOrder::Incomparable => LocusFactor::EmptyFactor,
                        PrefixOrder::AIsPrefix | PrefixOrder::BIsPrefix => {
                            // v x = u x with the longer word equal to the shorter one times w
                            // forces x = w^∞.
                            let w = u.strip_prefix(v).or_else(|| v.strip_prefix(u)).unwrap();
                            let x = EventuallyPeriodic::new(crate::words::Word::empty(), w)
                                .expect("distinct comparable words differ in length");
                            LocusFactor::SinglePoint(x.prepend(v))
                        }
                    })
                    .collect(),
            })
            .collect();
        FixedLocus { rows }
    }

    /// True iff `p` is in the open support.
    pub fn moves(&self, p: &RationalPoint) -> Result<bool> {
        Ok(self.apply(p)? != *p)
    }

    /// Exact image of a clopen set.
    pub fn image_clopen(&self, c: &Clopen) -> Result<Clopen> {
        self.signature().ensure_same(c.signature())?;
        let mut cells = Vec::new();
        for cell in c.cells() {
            for r in self.rows() {
                if let Some(meet) = intersect_cylinders(cell, &r.v) {
                    let tail = meet.strip_prefix(&r.v).expect("v is a prefix of the meet");
                    cells.push(r.u.concat(&tail));
                }
            }
        }
        Ok(Clopen::from_disjoint(self.signature(), cells).normalize())
    }

    /// The copy of `self` acting inside the cylinder `mu` and trivially elsewhere.
    pub fn localize(&self, mu: &MultiCylinder) -> Result<Element> {
        self.signature().check_tuple(mu)?;
        let mut rows: Vec<Row> = self
            .rows()
            .iter()
            .map(|r| Row::new(mu.concat(&r.v), mu.concat(&r.u)))
            .collect();
        let outside = Clopen::cylinder(self.signature(), mu.clone()).complement();
        rows.extend(outside.cells().iter().map(|c| Row::new(c.clone(), c.clone())));
        Ok(Element::from_valid(Table::new(self.signature().clone(), rows)))
    }

    /// Splits row `j` along coordinate `coord` in both columns.
    pub fn refine_row(&self, j: usize, coord: usize) -> Element {
        let k = self.signature().size(coord) as u8;
        let mut rows = Vec::with_capacity(self.rows().len() + k as usize);
        for (i, r) in self.rows().iter().enumerate() {
            if i == j {
                for a in 0..k {
                    rows.push(Row::new(
                        r.v.with_word(coord, r.v.word(coord).child(a)),
                        r.u.with_word(coord, r.u.word(coord).child(a)),
                    ));
                }
            } else {
                rows.push(r.clone());
            }
        }
        Element::from_valid(Table::new(self.signature().clone(), rows))
    }

    pub fn render(&self) -> String {
        let sig = self.signature();
        let v: Vec<String> = self.rows().iter().map(|r| r.v.render(sig)).collect();
        let u: Vec<String> = self.rows().iter().map(|r| r.u.render(sig)).collect();
        format!("({}) -> ({})", v.join(" "), u.join(" "))
    }
}

/// Group equality (composition with the inverse is the identity).
impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other).unwrap_or(false)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// A seeded random element.
///
/// Two copies of the trivial partition are each split `depth` times (random
/// cell, uniform coordinate), then the smaller one keeps splitting until the
/// cell counts agree; the cells are paired by a random bijection.
pub fn random_element(sig: &Signature, depth: usize, seed: u64) -> Result<Element> {
    if depth == 0 {
        return Err(Error::InvalidBound("depth must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(random_element_with(sig, depth, &mut rng))
}

pub fn random_element_with<R: Rng + ?Sized>(sig: &Signature, depth: usize, rng: &mut R) -> Element {
    let mut left = vec![sig.empty_tuple()];
    let mut right = vec![sig.empty_tuple()];
    for _ in 0..depth {
        split_random_cell(sig, &mut left, rng, None);
        split_random_cell(sig, &mut right, rng, None);
    }
    while left.len() != right.len() {
        let (l, r) = (left.len(), right.len());
        let (small, gap) = if l < r {
            (&mut left, r - l)
        } else {
            (&mut right, l - r)
        };
        split_random_cell(sig, small, rng, Some(gap));
    }
    right.shuffle(rng);
    let rows = left.into_iter().zip(right).map(|(v, u)| Row::new(v, u)).collect();
    Element::from_valid(Table::new(sig.clone(), rows))
}

/// A random partition of `X` produced by `splits` random cell splits.
pub fn random_partition<R: Rng + ?Sized>(sig: &Signature, splits: usize, rng: &mut R) -> Vec<MultiCylinder> {
    let mut cells = vec![sig.empty_tuple()];
    for _ in 0..splits {
        split_random_cell(sig, &mut cells, rng, None);
    }
    cells
}

fn split_random_cell<R: Rng + ?Sized>(
    sig: &Signature,
    cells: &mut Vec<MultiCylinder>,
    rng: &mut R,
    gap: Option<usize>,
) {
    let idx = rng.gen_range(0..cells.len());
    // prefer a coordinate whose split does not overshoot the gap
    let fitting: Vec<usize> = match gap {
        Some(g) => (0..sig.dims())
            .filter(|&i| (sig.size(i) as usize - 1) <= g)
            .collect(),
        None => Vec::new(),
    };
    let coord = if fitting.is_empty() {
        rng.gen_range(0..sig.dims())
    } else {
        fitting[rng.gen_range(0..fitting.len())]
    };
    let cell = cells.swap_remove(idx);
    let k = sig.size(coord) as u8;
    for a in 0..k {
        cells.push(cell.with_word(coord, cell.word(coord).child(a)));
    }
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

    fn odometer() -> Element {
        el(&[("[0]", "[1]"), ("[10]", "[00]"), ("[11]", "[01]")])
    }

    fn pt(s: &str) -> RationalPoint {
        RationalPoint::parse(s, &sig1()).unwrap()
    }

    fn clopen(s: &str) -> Clopen {
        Clopen::parse(s, &sig1()).unwrap()
    }

    #[test]
    fn validate_examples() {
        assert!(Element::from_text_rows(&sig1(), &[("[0]", "[1]"), ("[10]", "[00]"), ("[11]", "[01]")]).is_ok());
        let t = |rows: &[(&str, &str)]| {
            let rows = rows
                .iter()
                .map(|(v, u)| Row::new(WordTuple::parse(v, &sig1()).unwrap(), WordTuple::parse(u, &sig1()).unwrap()))
                .collect();
            validate(&Table::new(sig1(), rows))
        };
        assert!(matches!(
            t(&[("[0]", "[0]"), ("[01]", "[1]")]),
            Err(Error::OverlappingCells { first: 0, second: 1, side: TableSide::Domain })
        ));
        match t(&[("[0]", "[]")]) {
            Err(Error::MeasureDeficit { side: TableSide::Domain, deficit }) => {
                assert_eq!(deficit, num_rational::BigRational::new(1.into(), 2.into()))
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(validate(&Table::new(sig1(), vec![])), Err(Error::EmptyTable)));
    }

    #[test]
    fn apply_examples() {
        let id = Element::identity(&sig1());
        assert_eq!(id.apply(&pt("[01(1)]")).unwrap(), pt("[01(1)]"));
        assert_eq!(swap().apply(&pt("[00(1)]")).unwrap(), pt("[01(1)]"));
        assert_eq!(odometer().apply(&pt("[(1)]")).unwrap(), pt("[01(1)]"));
    }

    #[test]
    fn compose_and_invert() {
        let id = Element::identity(&sig1());
        assert!(swap().compose(&swap()).unwrap().is_identity());
        assert_eq!(swap().compose(&id).unwrap(), swap());
        assert!(id.invert().is_identity());
        assert_eq!(swap().invert(), swap());
        let a = el(&[("[0]", "[00]"), ("[10]", "[01]"), ("[11]", "[1]")]);
        let b = el(&[("[00]", "[0]"), ("[01]", "[10]"), ("[1]", "[11]")]);
        assert_eq!(a.invert(), b);
        assert!(a.compose(&b).unwrap().is_identity());
    }

    #[test]
    fn identity_check() {
        assert!(el(&[("[0]", "[0]"), ("[1]", "[1]")]).is_identity());
        assert!(!swap().is_identity());
    }

    #[test]
    fn rsupp_examples() {
        assert!(Element::identity(&sig1()).rsupp().is_empty());
        assert_eq!(swap().rsupp().render(), "{ [0] }");
        assert_eq!(odometer().rsupp().render(), "{ [] }");
    }

    #[test]
    fn fixed_locus_examples() {
        let locus = swap().fixed_locus();
        assert!(locus.rows.iter().all(RowLocus::is_empty));
        let contract = el(&[("[0]", "[00]"), ("[10]", "[01]"), ("[11]", "[1]")]);
        let locus = contract.fixed_locus();
        let first = &locus.rows[0];
        assert_eq!(first.factors, vec![LocusFactor::SinglePoint(EventuallyPeriodic::constant(0))]);
        assert!(!contract.moves(&pt("[(0)]")).unwrap());
        assert!(Element::identity(&sig1()).fixed_locus().rows.is_empty());
    }

    #[test]
    fn commutation_examples() {
        let id = Element::identity(&sig1());
        assert!(swap().commutes(&id).unwrap());
        assert!(swap().commutes(&swap_right()).unwrap());
        assert!(!swap().commutes(&odometer()).unwrap());
    }

    #[test]
    fn conjugate_commutator_power() {
        assert!(odometer().commutator(&odometer()).unwrap().is_identity());
        assert!(swap().power(12).is_identity());
        // the odometer-like table flips the first letter, so it is an involution
        assert!(odometer().power(2).is_identity());
        let x0 = el(&[("[0]", "[00]"), ("[10]", "[01]"), ("[11]", "[1]")]);
        assert!(!x0.power(12).is_identity());
        assert_eq!(odometer().power(-2), odometer().invert().compose(&odometer().invert()).unwrap());
        let c = swap().conjugate(&odometer()).unwrap();
        let image = odometer().image_clopen(&clopen("{[0]}")).unwrap();
        assert!(c.rsupp().equals(&image).unwrap());
        assert_eq!(image.render(), "{ [1] }");
    }

    #[test]
    fn image_examples() {
        let id = Element::identity(&sig1());
        assert!(id.image_clopen(&clopen("{[01];[1]}")).unwrap().equals(&clopen("{[01];[1]}")).unwrap());
        assert_eq!(swap().image_clopen(&clopen("{[00]}")).unwrap().render(), "{ [01] }");
    }

    #[test]
    fn localize_examples() {
        let mu = WordTuple::parse("[1]", &sig1()).unwrap();
        assert!(Element::identity(&sig1()).localize(&mu).unwrap().is_identity());
        assert_eq!(swap().localize(&mu).unwrap().rsupp().render(), "{ [10] }");
        let a = odometer();
        let b = swap();
        let lhs = a.compose(&b).unwrap().localize(&mu).unwrap();
        let rhs = a.localize(&mu).unwrap().compose(&b.localize(&mu).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn random_elements_are_valid_and_deterministic() {
        for seed in 0..50 {
            for sizes in [vec![2], vec![3], vec![2, 2], vec![3, 4]] {
                let sig = Signature::new(sizes).unwrap();
                let e = random_element(&sig, 3, seed).unwrap();
                assert!(validate(e.table()).is_ok());
                assert_eq!(e.table(), random_element(&sig, 3, seed).unwrap().table());
            }
        }
        assert!(random_element(&sig1(), 0, 1).is_err());
    }

    #[test]
    fn depth_one_in_v2_is_swap_or_identity() {
        for seed in 0..20 {
            let e = random_element(&sig1(), 1, seed).unwrap();
            assert_eq!(e.rows().len(), 2);
        }
    }

    #[test]
    fn refinement_keeps_the_element() {
        let e = odometer();
        let r = e.refine_row(1, 0);
        assert_eq!(r.rows().len(), 4);
        assert_eq!(r, e);
        assert!(r.rsupp().equals(&e.rsupp()).unwrap());
    }

    #[test]
    fn signature_mismatch() {
        let s2 = Signature::new(vec![2, 2]).unwrap();
        let e2 = Element::identity(&s2);
        assert!(matches!(swap().compose(&e2), Err(Error::SignatureMismatch { .. })));
        assert!(swap().apply(&RationalPoint::parse("[(0),(1)]", &s2).unwrap()).is_err());
    }
}
