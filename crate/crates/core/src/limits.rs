//! Finite-depth limits of nested supports.
//!
//! Around a target point `y`, a chain of target basics
//! `V_1 ⊇ V_2 ⊇ ... ⊇ V_d` is built, each `V_j = rsupp Φ(τ_j)` with an
//! explicit source witness `τ_j`. Sending `V_j` to `rsupp τ_j` gives a
//! descending chain of source clopens; its common prefix is the anchor image
//! of `y` to the precision the chain reaches.

use serde::Serialize;

use crate::clopen::Clopen;
use crate::embedding::{descend, full_support_element, EmbeddingSpec};
use crate::error::{Error, Result};
use crate::point::RationalPoint;
use crate::table::Element;
use crate::words::{Word, WordTuple};

#[derive(Debug, Clone)]
pub struct ChainLink {
    pub witness: Element,
    /// `rsupp Φ(witness)`.
    pub basic: Clopen,
}

#[derive(Debug, Clone)]
pub struct CylinderChain {
    pub base: RationalPoint,
    pub links: Vec<ChainLink>,
}

impl CylinderChain {
    pub fn depth(&self) -> usize {
        self.links.len()
    }
}

/// Builds a chain of `depth` nested basics around `y`, using the full
/// support element selected by `seed`.
pub fn build_chain(
    spec: &EmbeddingSpec,
    y: &RationalPoint,
    depth: usize,
    seed: u64,
) -> Result<CylinderChain> {
    if depth == 0 {
        return Err(Error::InvalidBound("chain depth must be at least 1".into()));
    }
    y.check_signature(spec.target())?;
    let full = full_support_element(spec.source(), seed);
    let mut mu = spec.source().empty_tuple();
    let mut previous = Clopen::whole(spec.target());
    let mut links = Vec::with_capacity(depth);
    for j in 0..depth {
        mu = descend(spec, &full, y, &mu)?.ok_or(Error::NoWitness(j + 1))?;
        let witness = full.localize(&mu)?;
        let basic = spec.push_forward(&witness)?.rsupp();
        if !basic.contains_point(y) || !basic.subset(&previous)? {
            return Err(Error::NestingViolation(j));
        }
        previous = basic.clone();
        links.push(ChainLink { witness, basic });
    }
    Ok(CylinderChain {
        base: y.clone(),
        links,
    })
}

#[derive(Debug, Clone)]
pub struct LimitApproximation {
    /// `P(V_j) = rsupp τ_j`.
    pub source_chain: Vec<Clopen>,
    /// Longest common prefix of the cells of the last source clopen.
    pub prefix: WordTuple,
    pub precision: Vec<usize>,
}

/// Maps the chain to the source side and extracts the limit prefix.
pub fn p_map(chain: &CylinderChain) -> Result<LimitApproximation> {
    let source_chain: Vec<Clopen> = chain.links.iter().map(|l| l.witness.rsupp()).collect();
    for j in 1..source_chain.len() {
        let (outer, inner) = (&source_chain[j - 1], &source_chain[j]);
        if !inner.subset(outer)? {
            return Err(Error::NestingViolation(j));
        }
        let target_strict = !chain.links[j - 1].basic.subset(&chain.links[j].basic)?;
        let source_strict = !outer.subset(inner)?;
        if target_strict != source_strict {
            return Err(Error::NestingViolation(j));
        }
    }
    let last = source_chain
        .last()
        .ok_or_else(|| Error::InvalidBound("empty chain".into()))?;
    let prefix = common_prefix(last);
    let precision = prefix.words().iter().map(Word::len).collect();
    Ok(LimitApproximation {
        source_chain,
        prefix,
        precision,
    })
}

fn common_prefix(c: &Clopen) -> WordTuple {
    let dims = c.signature().dims();
    let Some(first) = c.cells().first() else {
        return c.signature().empty_tuple();
    };
    WordTuple::new(
        (0..dims)
            .map(|i| {
                let mut len = first.word(i).len();
                for cell in &c.cells()[1..] {
                    let w = cell.word(i);
                    len = first.word(i).letters()[..len]
                        .iter()
                        .zip(w.letters())
                        .take_while(|(a, b)| a == b)
                        .count();
                }
                first.word(i).truncate(len)
            })
            .collect(),
    )
}

/// `Φ(γ)·V_j` has witness `γ τ_j γ⁻¹`; its source image must be `γ·P(V_j)`.
pub fn p_map_equivariant(spec: &EmbeddingSpec, chain: &CylinderChain, gamma: &Element) -> Result<bool> {
    let pushed = spec.push_forward(gamma)?;
    for link in &chain.links {
        let moved_basic = pushed.image_clopen(&link.basic)?;
        let moved_witness = link.witness.conjugate(gamma)?;
        if !spec.push_forward(&moved_witness)?.rsupp().equals(&moved_basic)? {
            return Ok(false);
        }
        let lhs = moved_witness.rsupp();
        let rhs = gamma.image_clopen(&link.witness.rsupp())?;
        if !lhs.equals(&rhs)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Serialize)]
pub struct RhoResult {
    pub point: String,
    pub depth: usize,
    pub prefix: String,
    pub precision: Vec<usize>,
    /// Target basics of the chain, outermost first.
    pub basics: Vec<String>,
    /// Source supports of the chain witnesses.
    pub source_chain: Vec<String>,
    /// Direct coordinate projection of the point, truncated to the same precision.
    pub projection_prefix: String,
    pub agrees_with_projection: bool,
    #[serde(skip)]
    pub prefix_tuple: WordTuple,
}

/// The anchor image of `y` to `depth` letters, read off a nested chain, and
/// checked against the coordinate projection.
pub fn rho_eval(spec: &EmbeddingSpec, y: &RationalPoint, depth: usize, seed: u64) -> Result<RhoResult> {
    let chain = build_chain(spec, y, depth, seed)?;
    let limit = p_map(&chain)?;
    let projected = spec.project(y)?;
    let projection = WordTuple::new(
        limit
            .precision
            .iter()
            .enumerate()
            .map(|(i, &n)| projected.coord(i).unroll(n))
            .collect(),
    );
    let source = spec.source();
    Ok(RhoResult {
        point: y.render(spec.target()),
        depth,
        prefix: limit.prefix.render(source),
        precision: limit.precision.clone(),
        basics: chain.links.iter().map(|l| l.basic.render()).collect(),
        source_chain: limit.source_chain.iter().map(Clopen::render).collect(),
        projection_prefix: projection.render(source),
        agrees_with_projection: projection == limit.prefix,
        prefix_tuple: limit.prefix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::Signature;

    fn iota() -> EmbeddingSpec {
        EmbeddingSpec::first_coordinate(2, 1)
    }

    fn point(s: &str) -> RationalPoint {
        RationalPoint::parse(s, iota().target()).unwrap()
    }

    #[test]
    fn chain_around_a_point() {
        let chain = build_chain(&iota(), &point("[(0),(1)]"), 3, 0).unwrap();
        let basics: Vec<String> = chain.links.iter().map(|l| l.basic.render()).collect();
        assert_eq!(basics, vec!["{ [0,] }", "{ [00,] }", "{ [000,] }"]);
        let limit = p_map(&chain).unwrap();
        let source: Vec<String> = limit.source_chain.iter().map(Clopen::render).collect();
        assert_eq!(source, vec!["{ [0] }", "{ [00] }", "{ [000] }"]);
        assert_eq!(limit.prefix.render(iota().source()), "[000]");
    }

    #[test]
    fn depth_one_chain() {
        let chain = build_chain(&iota(), &point("[1(0),(01)]"), 1, 0).unwrap();
        assert_eq!(chain.depth(), 1);
        assert!(chain.links[0].basic.contains_point(&chain.base));
        assert!(build_chain(&iota(), &point("[(0),(1)]"), 0, 0).is_err());
    }

    #[test]
    fn rho_examples() {
        let r = rho_eval(&iota(), &point("[(0),(1)]"), 4, 0).unwrap();
        assert_eq!(r.prefix, "[0000]");
        assert!(r.agrees_with_projection);
        let r = rho_eval(&iota(), &point("[(01),(0)]"), 4, 0).unwrap();
        assert_eq!(r.prefix, "[0101]");
        assert!(r.agrees_with_projection);
        assert!(matches!(
            rho_eval(&iota(), &point("[(0),(1)]"), 0, 0),
            Err(Error::InvalidBound(_))
        ));
    }

    #[test]
    fn seeds_agree() {
        let y = point("[10(110),1(0)]");
        let a = rho_eval(&iota(), &y, 6, 0).unwrap();
        let b = rho_eval(&iota(), &y, 6, 17).unwrap();
        assert_eq!(a.prefix, b.prefix);
    }

    #[test]
    fn permuted_coordinates() {
        let s = Signature::new(vec![2, 3]).unwrap();
        let t = Signature::new(vec![3, 2, 2]).unwrap();
        let spec = EmbeddingSpec::new(s.clone(), t.clone(), vec![2, 0]).unwrap();
        let y = RationalPoint::parse("[(21),(0),1(01)]", &t).unwrap();
        let r = rho_eval(&spec, &y, 3, 0).unwrap();
        assert_eq!(r.prefix, "[101,212]");
        assert!(r.agrees_with_projection);
    }

    #[test]
    fn chain_is_equivariant() {
        let spec = iota();
        let chain = build_chain(&spec, &point("[(0),(1)]"), 4, 0).unwrap();
        for seed in 0..10 {
            let gamma = crate::table::random_element(spec.source(), 3, seed).unwrap();
            assert!(p_map_equivariant(&spec, &chain, &gamma).unwrap());
        }
    }
}
