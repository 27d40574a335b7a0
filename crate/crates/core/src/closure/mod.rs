//! Virtual closures of linkoid diagrams.
//!
//! A closure joins endpoint `i` to endpoint `sigma(i)` by an arc that meets
//! the rest of the diagram only in virtual crossings. Arcs are routed along
//! shortest paths of the dual graph; [`reduce_virtual`] then tries other
//! insertion orders and removes virtual monogons and bigons.

mod excise;
mod gauss;
mod reduce;
mod route;

use std::hash::{DefaultHasher, Hash, Hasher};

use serde_json::{json, Value};
use thiserror::Error;

use crate::diagram::{io, DiagramError, GaussCode, GaussError, PlanarDiagram, VertexId};
use crate::involution::{Involution, InvolutionError};

pub use excise::excise_virtual;
pub use gauss::gauss_closure;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClosureError {
    #[error("size mismatch: diagram has {0} open strands, permutation acts on {1}")]
    SizeMismatch(usize, usize),
    #[error(transparent)]
    InvalidDiagram(#[from] DiagramError),
    #[error(transparent)]
    Gauss(#[from] GaussError),
    #[error(transparent)]
    Involution(#[from] InvolutionError),
    #[error("expected a closed diagram")]
    NotClosed,
    #[error("virtual crossing {0} lies on no arc free of classical crossings")]
    NoExcisableArc(VertexId),
}

/// Where a closed diagram came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    /// Fingerprint of the source linkoid's normalized JSON.
    pub source: String,
    pub sigma: Involution,
}

/// A closed diagram produced by closing a linkoid.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedVirtualDiagram {
    diagram: PlanarDiagram,
    provenance: Provenance,
    /// The linkoid itself, kept so that arcs can be rerouted.
    source: Option<Box<PlanarDiagram>>,
}

/// Stable identifier of a diagram within one build.
pub fn fingerprint(d: &PlanarDiagram) -> String {
    let mut h = DefaultHasher::new();
    d.to_json().hash(&mut h);
    format!("{:016x}", h.finish())
}

impl ClosedVirtualDiagram {
    pub fn diagram(&self) -> &PlanarDiagram {
        &self.diagram
    }

    pub fn into_diagram(self) -> PlanarDiagram {
        self.diagram
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn virtual_count(&self) -> usize {
        self.diagram.virtual_count()
    }

    pub fn classical_count(&self) -> usize {
        self.diagram.classical_count()
    }

    pub fn component_count(&self) -> usize {
        self.diagram.strands.len()
    }

    pub fn to_gauss(&self) -> Result<GaussCode, ClosureError> {
        Ok(self.diagram.to_gauss()?)
    }

    pub fn to_json_value(&self) -> Value {
        let p = json!({
            "source": self.provenance.source,
            "sigma": self.provenance.sigma.to_string(),
        });
        io::to_value(&self.diagram, Some(p))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).unwrap()
    }

    /// Read a closed diagram with its provenance block. The source linkoid
    /// is not stored in the file, so reductions of the result cannot reroute.
    pub fn from_json(text: &str) -> Result<ClosedVirtualDiagram, ClosureError> {
        let (diagram, prov) = io::parse_with_provenance(text)?;
        let bad = |m: &str| DiagramError::Parse { locus: "provenance".into(), message: m.into() };
        let prov = prov.ok_or_else(|| bad("missing field \"provenance\""))?;
        let source = prov.get("source").and_then(Value::as_str).ok_or_else(|| bad("missing source"))?;
        let sigma = prov
            .get("sigma")
            .and_then(Value::as_str)
            .ok_or_else(|| bad("missing sigma"))?
            .parse::<Involution>()?;
        diagram.check()?;
        if !diagram.is_closed() {
            return Err(ClosureError::NotClosed);
        }
        Ok(ClosedVirtualDiagram {
            diagram,
            provenance: Provenance { source: source.to_string(), sigma },
            source: None,
        })
    }
}

fn prepare(d: &PlanarDiagram, sigma: &Involution) -> Result<(PlanarDiagram, Involution), ClosureError> {
    d.check()?;
    let tau = d.open_strand_permutation()?;
    if tau.n() != sigma.n() {
        return Err(ClosureError::SizeMismatch(tau.n(), sigma.n()));
    }
    Ok((d.with_positional_slots(), tau))
}

/// Insert the arcs `(i, sigma(i))` in the given order.
fn route(d: &PlanarDiagram, tau: &Involution, sigma: &Involution, order: &[(u32, u32)]) -> PlanarDiagram {
    let mut w = route::Work::new(d);
    for &(i, j) in order {
        w.insert_arc(i, j);
    }
    w.finish(tau, sigma)
}

/// Close `d` along `sigma`, inserting arcs in ascending order of their smaller label.
pub fn virtual_closure(d: &PlanarDiagram, sigma: &Involution) -> Result<ClosedVirtualDiagram, ClosureError> {
    let (work, tau) = prepare(d, sigma)?;
    let diagram = route(&work, &tau, sigma, &sigma.pairs());
    Ok(ClosedVirtualDiagram {
        diagram,
        provenance: Provenance { source: fingerprint(d), sigma: sigma.clone() },
        source: Some(Box::new(d.clone())),
    })
}

/// Closure along the strand permutation: every strand closed on itself.
pub fn strand_closure(d: &PlanarDiagram) -> Result<ClosedVirtualDiagram, ClosureError> {
    let tau = d.open_strand_permutation()?;
    virtual_closure(d, &tau)
}

/// Largest number of open strands for which every arc insertion order is tried.
pub const REROUTE_LIMIT: usize = 4;

/// Remove virtual crossings without touching classical ones.
///
/// When the source linkoid is known and has at most [`REROUTE_LIMIT`]
/// strands, every arc insertion order is routed; each candidate is then
/// simplified by virtual monogon and bigon removal, and the one with the
/// fewest virtual crossings is kept (earliest order on ties).
pub fn reduce_virtual(c: &ClosedVirtualDiagram) -> ClosedVirtualDiagram {
    let mut best = reduce::simplify(&c.diagram);
    if let Some(src) = &c.source {
        let sigma = &c.provenance.sigma;
        if let Ok((work, tau)) = prepare(src, sigma) {
            let pairs = sigma.pairs();
            if pairs.len() <= REROUTE_LIMIT {
                use itertools::Itertools;
                for order in pairs.iter().copied().permutations(pairs.len()) {
                    let cand = reduce::simplify(&route(&work, &tau, sigma, &order));
                    if cand.virtual_count() < best.virtual_count() {
                        best = cand;
                    }
                }
            }
        }
    }
    ClosedVirtualDiagram { diagram: best, provenance: c.provenance.clone(), source: c.source.clone() }
}

/// One-sided certificate that the closure along `sigma` is a classical link diagram.
pub fn is_link_type(d: &PlanarDiagram, sigma: &Involution) -> Result<bool, ClosureError> {
    Ok(reduce_virtual(&virtual_closure(d, sigma)?).virtual_count() == 0)
}
