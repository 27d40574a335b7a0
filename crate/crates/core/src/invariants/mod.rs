//! Invariants of virtual closures.
//!
//! Functions taking a [`GaussCode`] and an optional closure permutation
//! accept either an open code with `Some(sigma)` or a closed code with
//! `None`. Orientation-sensitive invariants (writhe normalization, arrow,
//! affine index, odd writhe) are evaluated on the oriented closed code
//! produced by [`gauss_closure`].

mod moves;
mod statesum;

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::closure::{self, gauss_closure, ClosedVirtualDiagram, ClosureError};
use crate::diagram::{DiagramError, GaussCode, GaussError, PlanarDiagram, Role, Sign};
use crate::involution::Involution;
use crate::polynomial::{Laurent, VarT};
use crate::{AffinePoly, ArrowPoly, LaurentPoly, Q};

pub use moves::{r1_variant, r2_variants, r3_variants, Kink};
pub use statesum::{max_crossings, DEFAULT_MAX_CROSSINGS};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InvariantError {
    #[error("{count} classical crossings exceed the limit of {limit} (set LINKOID_MAX_CROSSINGS to override)")]
    TooManyCrossings { count: usize, limit: usize },
    #[error("an open code needs a closure permutation")]
    MissingSigma,
    #[error("size mismatch: code has {0} open strands, permutation acts on {1}")]
    SizeMismatch(usize, usize),
    #[error("closure has {0} components; this invariant needs exactly one")]
    MultiComponent(usize),
    #[error(transparent)]
    Closure(#[from] ClosureError),
    #[error(transparent)]
    Gauss(#[from] GaussError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

/// The oriented closed code of `(g, sigma)`.
pub fn oriented_closure(g: &GaussCode, sigma: Option<&Involution>) -> Result<GaussCode, InvariantError> {
    if g.open_count() == 0 {
        return Ok(g.clone());
    }
    let s = sigma.ok_or(InvariantError::MissingSigma)?;
    let tau = g.open_permutation()?;
    if tau.n() != s.n() {
        return Err(InvariantError::SizeMismatch(tau.n(), s.n()));
    }
    Ok(gauss_closure(g, s)?)
}

/// Sum of classical crossing signs of the code as given.
pub fn writhe(g: &GaussCode) -> i32 {
    g.writhe()
}

/// The generalized bracket, computed directly on the open code: endpoints
/// are joined by `sigma` inside the state sum.
pub fn bracket(g: &GaussCode, sigma: Option<&Involution>) -> Result<LaurentPoly, InvariantError> {
    let net = statesum::Network::new(g, sigma)?;
    Ok(statesum::bracket(&net))
}

fn normalization(writhe: i32) -> LaurentPoly {
    let sign = if writhe % 2 == 0 { 1 } else { -1 };
    Laurent::monomial(-3 * writhe, Q::from_integer(sign))
}

/// `(-A^3)^{-w} <L^sigma>` with `w` the writhe of the oriented closure.
pub fn jones(g: &GaussCode, sigma: Option<&Involution>) -> Result<LaurentPoly, InvariantError> {
    let closed = oriented_closure(g, sigma)?;
    let b = bracket(g, sigma)?;
    Ok(&normalization(closed.writhe()) * &b)
}

/// Unnormalized arrow polynomial of the oriented closure.
pub fn arrow(g: &GaussCode, sigma: Option<&Involution>) -> Result<ArrowPoly, InvariantError> {
    let closed = oriented_closure(g, sigma)?;
    let net = statesum::Network::new(&closed, None)?;
    Ok(statesum::arrow(&net))
}

/// Normalized arrow polynomial, `(-A^3)^{-w}` times [`arrow`].
pub fn normalized_arrow(g: &GaussCode, sigma: Option<&Involution>) -> Result<ArrowPoly, InvariantError> {
    let closed = oriented_closure(g, sigma)?;
    let net = statesum::Network::new(&closed, None)?;
    Ok(&normalization(closed.writhe()).to_arrow() * &statesum::arrow(&net))
}

fn single_loop(g: &GaussCode, sigma: Option<&Involution>) -> Result<GaussCode, InvariantError> {
    let closed = oriented_closure(g, sigma)?;
    match closed.strands().len() {
        1 => Ok(closed),
        k => Err(InvariantError::MultiComponent(k)),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AffineIndex {
    #[serde(serialize_with = "display")]
    pub polynomial: AffinePoly,
    /// `W_K(c)` per crossing.
    pub weights: BTreeMap<u32, i32>,
    /// `W_+(c)` per crossing.
    pub w_plus: BTreeMap<u32, i32>,
    /// Arc labels along the traversal; the last equals the first.
    pub labels: Vec<i32>,
}

/// Affine index polynomial of a one-component closure.
///
/// Arcs are labelled along the closed code starting from 0. At a crossing
/// the strand entering from the left (the over strand at a positive
/// crossing, the under strand at a negative one) decreases its label by
/// one, the other strand increases it. With `a`, `b` the incoming labels of
/// the left and right strands, `W_+ = a - b - 1` and `W_K = sgn(c) W_+`.
pub fn affine_index(g: &GaussCode, sigma: Option<&Involution>) -> Result<AffineIndex, InvariantError> {
    let closed = single_loop(g, sigma)?;
    let ps = &closed.strands()[0].passages;
    let mut labels = Vec::with_capacity(ps.len() + 1);
    let mut incoming: BTreeMap<u32, (Option<i32>, Option<i32>)> = BTreeMap::new();
    let mut label = 0i32;
    for p in ps {
        labels.push(label);
        let left = (p.role == Role::Over) == (p.sign == Sign::Positive);
        let e = incoming.entry(p.crossing).or_default();
        if left {
            e.0 = Some(label);
            label -= 1;
        } else {
            e.1 = Some(label);
            label += 1;
        }
    }
    labels.push(label);
    let signs = closed.crossings();
    let mut polynomial = AffinePoly::zero();
    let mut weights = BTreeMap::new();
    let mut w_plus = BTreeMap::new();
    for (c, (a, b)) in incoming {
        let (a, b) = (a.expect("left passage"), b.expect("right passage"));
        let wp = a - b - 1;
        let s = signs[&c].value();
        let w = s * wp;
        w_plus.insert(c, wp);
        weights.insert(c, w);
        polynomial.add_term(w, s as i64);
        polynomial.add_term(0, -(s as i64));
    }
    Ok(AffineIndex { polynomial, weights, w_plus, labels })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OddWrithe {
    pub value: i32,
    pub odd_crossings: Vec<u32>,
}

/// Sum of signs over crossings with an odd number of symbols between their
/// two occurrences in the cyclic code of a one-component closure.
pub fn odd_writhe(g: &GaussCode, sigma: Option<&Involution>) -> Result<OddWrithe, InvariantError> {
    let closed = single_loop(g, sigma)?;
    let ps = &closed.strands()[0].passages;
    let mut first: BTreeMap<u32, usize> = BTreeMap::new();
    let mut odd = Vec::new();
    let mut value = 0;
    for (i, p) in ps.iter().enumerate() {
        if let Some(&j) = first.get(&p.crossing) {
            if (i - j - 1) % 2 == 1 {
                odd.push(p.crossing);
                value += p.sign.value();
            }
        } else {
            first.insert(p.crossing, i);
        }
    }
    odd.sort_unstable();
    Ok(OddWrithe { value, odd_crossings: odd })
}

/// Virtual crossings of the reduced routed closure: an upper bound for the height.
pub fn height_bound(d: &PlanarDiagram, sigma: &Involution) -> Result<usize, InvariantError> {
    let c = closure::virtual_closure(d, sigma)?;
    Ok(closure::reduce_virtual(&c).virtual_count())
}

/// Genus of the canonical surface of a closed diagram.
///
/// Bands run through virtual crossings without meeting, so the ribbon
/// graph has the classical crossings as vertices; boundary circles are
/// found by the same face traversal used for planar diagrams.
pub fn genus_bound(c: &ClosedVirtualDiagram) -> usize {
    genus_of(c.diagram())
}

pub(crate) fn genus_of(d: &PlanarDiagram) -> usize {
    use crate::diagram::{EStrand, Embedding, VertexKind};
    let classical = |v: &u32| matches!(d.vertices.get(v), Some(VertexKind::Classical { .. }));
    let deg = d.vertices.iter().filter(|(v, _)| classical(v)).map(|(&v, _)| (v, 4u8)).collect();
    let strands = d
        .strands
        .iter()
        .map(|s| EStrand {
            passages: s
                .passages
                .iter()
                .filter(|p| classical(&p.vertex))
                .map(|p| (p.vertex, d.pos(p.vertex, p.slot)))
                .collect(),
            ends: None,
        })
        .collect();
    let ribbon = Embedding { deg, strands, merges: vec![] };
    let faces = ribbon.faces();
    faces.euler_characteristics().iter().map(|&chi| ((2 - chi) / 2) as usize).sum()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvariantReport {
    pub sigma: String,
    pub component_count: usize,
    pub classical_crossings: usize,
    pub writhe: i32,
    #[serde(serialize_with = "display")]
    pub bracket: LaurentPoly,
    #[serde(serialize_with = "display")]
    pub jones: LaurentPoly,
    #[serde(serialize_with = "display")]
    pub arrow: ArrowPoly,
    #[serde(serialize_with = "display_opt")]
    pub affine: Option<AffinePoly>,
    pub odd_writhe: Option<i32>,
    pub height_bound: usize,
    pub genus_bound: usize,
}

fn display<T: std::fmt::Display, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn display_opt<T: std::fmt::Display, S: serde::Serializer>(v: &Option<T>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.collect_str(v),
        None => s.serialize_none(),
    }
}

/// Every invariant of the closure of `d` along `sigma`.
pub fn report(d: &PlanarDiagram, sigma: &Involution) -> Result<InvariantReport, InvariantError> {
    let g = d.to_gauss()?;
    let closed = oriented_closure(&g, Some(sigma))?;
    let routed = closure::virtual_closure(d, sigma)?;
    let reduced = closure::reduce_virtual(&routed);
    let one = closed.strands().len() == 1;
    Ok(InvariantReport {
        sigma: sigma.to_string(),
        component_count: closed.strands().len(),
        classical_crossings: g.crossing_count(),
        writhe: closed.writhe(),
        bracket: bracket(&g, Some(sigma))?,
        jones: jones(&g, Some(sigma))?,
        arrow: arrow(&g, Some(sigma))?,
        affine: if one { Some(affine_index(&g, Some(sigma))?.polynomial) } else { None },
        odd_writhe: if one { Some(odd_writhe(&g, Some(sigma))?.value) } else { None },
        height_bound: reduced.virtual_count(),
        genus_bound: genus_bound(&reduced),
    })
}

impl InvariantReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// Value of an affine polynomial at `t = 1`.
pub fn affine_at_one(p: &Laurent<i64, VarT>) -> i64 {
    p.eval_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(s: &str) -> GaussCode {
        s.parse().unwrap()
    }

    fn sig(s: &str) -> Involution {
        s.parse().unwrap()
    }

    fn lp(s: &str) -> LaurentPoly {
        s.parse().unwrap()
    }

    #[test]
    fn crossingless_linkoid_gives_power_of_d() {
        let g = code("1-2:; 3-4:");
        let d = LaurentPoly::loop_value();
        assert_eq!(bracket(&g, Some(&sig("(1 2)(3 4)"))).unwrap(), d);
        assert_eq!(bracket(&g, Some(&sig("(1 3)(2 4)"))).unwrap(), LaurentPoly::one());
        let g3 = code("1-2:; 3-4:; 5-6:");
        assert_eq!(bracket(&g3, Some(&sig("(1 2)(3 4)(5 6)"))).unwrap(), d.pow(2));
    }

    // four-state hand expansion: A^2 d + 2 + A^-2 d for a positive Hopf link
    #[test]
    fn hopf_link_bracket() {
        let g = code("loop: O1+ U2+; loop: U1+ O2+");
        assert_eq!(bracket(&g, None).unwrap(), lp("-A^4 - A^-4"));
        assert_eq!(jones(&g, None).unwrap(), lp("-A^-2 - A^-10"));
    }

    #[test]
    fn trefoil_jones() {
        let g = code("loop: O1- U2- O3- U1- O2- U3-");
        // left-handed trefoil, V(t) = -t^-4 + t^-3 + t^-1 with t = A^-4
        assert_eq!(jones(&g, None).unwrap(), lp("-A^16 + A^12 + A^4"));
        let a = affine_index(&g, None).unwrap();
        assert!(a.polynomial.is_zero());
        assert!(a.weights.values().all(|&w| w == 0));
        assert_eq!(odd_writhe(&g, None).unwrap().value, 0);
    }

    #[test]
    fn virtual_trefoil_from_open_code() {
        let g = code("1-2: O1+ U2+; 3-4: U1+ O2+");
        let s = sig("(1 4)(2 3)");
        let expected = &normalization(2) * &lp("A^2 - A^-4 + 1");
        assert_eq!(jones(&g, Some(&s)).unwrap(), expected);
        assert_eq!(expected, lp("A^-4 + A^-6 - A^-10"));
        let ow = odd_writhe(&g, Some(&s)).unwrap();
        assert_eq!((ow.value, ow.odd_crossings), (2, vec![1, 2]));
    }

    #[test]
    fn knotoid_arrow_example() {
        // one positive crossing on two strands closed back onto themselves
        let g = code("1-2: O1+; 3-4: U1+");
        let a = arrow(&g, Some(&sig("(1 2)(3 4)"))).unwrap();
        assert_eq!(a.to_string(), "A + A^-1*K1");
    }

    #[test]
    fn arrow_specializes_to_bracket() {
        for (c, s) in [
            ("1-2: O1+ O2+; 3-4: U1+ U2+", "(1 4)(2 3)"),
            ("1-2: O1+ U2-; 3-4: U1+ O2-", "(1 3)(2 4)"),
            ("1-2: O1- U2+ O3+; 3-4: U1- O2+ U3+", "(1 2)(3 4)"),
        ] {
            let g = code(c);
            let s = sig(s);
            assert_eq!(arrow(&g, Some(&s)).unwrap().specialize_k_to_one(), bracket(&g, Some(&s)).unwrap());
        }
    }

    #[test]
    fn virtual_trefoil_report() {
        let d = PlanarDiagram::from_gauss(&code("1-2: O1+ U2+; 3-4: U1+ O2+")).unwrap();
        let r = report(&d, &sig("(1 4)(2 3)")).unwrap();
        assert_eq!((r.component_count, r.writhe, r.height_bound, r.genus_bound), (1, 2, 1, 1));
        assert_eq!(r.odd_writhe, Some(2));
        let hopf = report(&d, &sig("(1 2)(3 4)")).unwrap();
        assert_eq!((hopf.component_count, hopf.height_bound, hopf.genus_bound), (2, 0, 0));
        assert_eq!(hopf.affine, None);
    }

    #[test]
    fn multi_component_rejected() {
        let g = code("1-2: O1+ U2+; 3-4: U1+ O2+");
        assert_eq!(
            affine_index(&g, Some(&sig("(1 2)(3 4)"))).unwrap_err(),
            InvariantError::MultiComponent(2)
        );
    }
}
