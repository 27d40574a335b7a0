//! Planar linkoid diagrams and their Gauss codes.
//!
//! A [`PlanarDiagram`] is a rotation system: every crossing lists its four
//! slots in counterclockwise order, and strands record through which slot
//! they enter each crossing. Slots are arbitrary small integers `0..4`; the
//! rotation decides where they sit. At a classical crossing the over strand
//! occupies two opposite slots, conventionally `(0, 2)`.

mod faces;
mod gauss;
pub(crate) mod io;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::involution::{Involution, InvolutionError};

pub use faces::Corner;
pub(crate) use faces::{EStrand, Embedding, FaceStructure, UnionFind};
pub use gauss::{GaussCode, GaussError, GaussPassage, GaussStrand, Role};

pub type VertexId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn value(self) -> i32 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }

    pub fn from_value(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Positive),
            -1 => Some(Sign::Negative),
            _ => None,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VertexKind {
    /// `over` holds the two slots of the over strand. A declared sign is
    /// checked against the one implied by the rotation.
    Classical { over: [u8; 2], sign: Option<Sign> },
    Virtual,
    Endpoint { label: u32 },
}

impl VertexKind {
    pub fn degree(&self) -> u8 {
        match self {
            VertexKind::Endpoint { .. } => 1,
            _ => 4,
        }
    }
}

/// A strand passing through `vertex`, entering by `slot`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Passage {
    pub vertex: VertexId,
    pub slot: u8,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strand {
    pub passages: Vec<Passage>,
    /// Foot and head endpoint vertices; `None` for a closed component.
    pub ends: Option<(VertexId, VertexId)>,
}

/// Puts a connected component inside a face of another one: the face
/// containing corner `outer` of the component is identified with the face
/// containing corner `host`. A corner `(v, s)` is the sector following slot
/// `s` counterclockwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ComponentPlacement {
    pub host: (VertexId, u8),
    pub outer: (VertexId, u8),
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PlanarDiagram {
    pub vertices: BTreeMap<VertexId, VertexKind>,
    /// Counterclockwise slot order of every crossing.
    pub rotation: BTreeMap<VertexId, [u8; 4]>,
    pub strands: Vec<Strand>,
    /// Keyed by connected component, numbered in order of first strand.
    pub placement: BTreeMap<usize, ComponentPlacement>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    UnknownVertex(VertexId),
    MissingRotation(VertexId),
    BadRotation(VertexId),
    BadOverPair(VertexId),
    BadSlot { vertex: VertexId, slot: u8 },
    EndpointMisuse(VertexId),
    EndpointLabels(String),
    CrossingNeverPassed(VertexId),
    CrossingPassedOnce(VertexId),
    CrossingPassedTooOften(VertexId),
    OverUnderMismatch(VertexId),
    VirtualSameAxis(VertexId),
    EdgeEndUsedTwice { vertex: VertexId, slot: u8 },
    EdgeEndUnused { vertex: VertexId, slot: u8 },
    SignMismatch { vertex: VertexId, declared: Sign, computed: Sign },
    NonPlanar { component: usize, euler: i64 },
    BadPlacement(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            UnknownVertex(v) => write!(f, "unknown vertex: {v}"),
            MissingRotation(v) => write!(f, "missing rotation: vertex {v}"),
            BadRotation(v) => write!(f, "rotation is not an ordering of slots 0..3: vertex {v}"),
            BadOverPair(v) => write!(f, "over pair is not two opposite slots: vertex {v}"),
            BadSlot { vertex, slot } => write!(f, "bad slot {slot} at vertex {vertex}"),
            EndpointMisuse(v) => write!(f, "endpoint not used exactly once as a strand end: vertex {v}"),
            EndpointLabels(s) => write!(f, "endpoint labels do not form 1..2n: {s}"),
            CrossingNeverPassed(v) => write!(f, "crossing never passed: vertex {v}"),
            CrossingPassedOnce(v) => write!(f, "crossing passed once: vertex {v}"),
            CrossingPassedTooOften(v) => write!(f, "crossing passed more than twice: vertex {v}"),
            OverUnderMismatch(v) => {
                write!(f, "crossing not passed once over and once under: vertex {v}")
            }
            VirtualSameAxis(v) => write!(f, "virtual crossing passed twice along one axis: vertex {v}"),
            EdgeEndUsedTwice { vertex, slot } => {
                write!(f, "edge-end used twice: vertex {vertex} slot {slot}")
            }
            EdgeEndUnused { vertex, slot } => write!(f, "edge-end unused: vertex {vertex} slot {slot}"),
            SignMismatch { vertex, declared, computed } => write!(
                f,
                "declared sign {} disagrees with rotation sign {} at vertex {vertex}",
                declared.value(),
                computed.value()
            ),
            NonPlanar { component, euler } => {
                write!(f, "non-planar rotation: component {component} has V - E + F = {euler}")
            }
            BadPlacement(s) => write!(f, "bad placement: {s}"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagramError {
    #[error("invalid diagram: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("parse error at {locus}: {message}")]
    Parse { locus: String, message: String },
    #[error("diagram has a closed component")]
    ClosedComponent,
    #[error(transparent)]
    Gauss(#[from] GaussError),
    #[error(transparent)]
    Involution(#[from] InvolutionError),
}

impl PlanarDiagram {
    pub fn n_strands(&self) -> usize {
        self.strands.len()
    }

    pub fn is_closed(&self) -> bool {
        self.strands.iter().all(|s| s.ends.is_none())
    }

    pub fn classical_count(&self) -> usize {
        self.vertices.values().filter(|k| matches!(k, VertexKind::Classical { .. })).count()
    }

    pub fn virtual_count(&self) -> usize {
        self.vertices.values().filter(|k| matches!(k, VertexKind::Virtual)).count()
    }

    pub fn label(&self, v: VertexId) -> Option<u32> {
        match self.vertices.get(&v) {
            Some(VertexKind::Endpoint { label }) => Some(*label),
            _ => None,
        }
    }

    /// Vertex carrying endpoint label `label`.
    pub fn endpoint(&self, label: u32) -> Option<VertexId> {
        self.vertices.iter().find_map(|(&v, k)| match k {
            VertexKind::Endpoint { label: l } if *l == label => Some(v),
            _ => None,
        })
    }

    /// Counterclockwise position of `slot` at `v`; endpoints have the single position 0.
    pub fn pos(&self, v: VertexId, slot: u8) -> u8 {
        match self.rotation.get(&v) {
            Some(r) => r.iter().position(|&s| s == slot).expect("slot in rotation") as u8,
            None => 0,
        }
    }

    pub fn slot_at(&self, v: VertexId, pos: u8) -> u8 {
        match self.rotation.get(&v) {
            Some(r) => r[pos as usize % 4],
            None => 0,
        }
    }

    pub fn opposite_slot(&self, v: VertexId, slot: u8) -> u8 {
        self.slot_at(v, (self.pos(v, slot) + 2) % 4)
    }

    pub(crate) fn embedding(&self) -> Embedding {
        let deg = self.vertices.iter().map(|(&v, k)| (v, k.degree())).collect();
        let strands = self
            .strands
            .iter()
            .map(|s| EStrand {
                passages: s.passages.iter().map(|p| (p.vertex, self.pos(p.vertex, p.slot))).collect(),
                ends: s.ends.map(|(a, b)| ((a, 0), (b, 0))),
            })
            .collect();
        let merges = self
            .placement
            .values()
            .map(|p| {
                (
                    (p.host.0, self.pos(p.host.0, p.host.1)),
                    (p.outer.0, self.pos(p.outer.0, p.outer.1)),
                )
            })
            .collect();
        Embedding { deg, strands, merges }
    }

    /// Face structure of a structurally sound diagram.
    pub(crate) fn faces(&self) -> FaceStructure {
        self.embedding().faces()
    }

    /// Number of faces of the embedded diagram on the sphere.
    pub fn face_count(&self) -> usize {
        self.faces().face_count
    }

    /// Number of connected components, counting passage-free loops.
    pub fn connected_components(&self) -> usize {
        let f = self.faces();
        f.component_count + f.free_loops
    }

    fn structural_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (&v, k) in &self.vertices {
            if k.degree() == 4 {
                match self.rotation.get(&v) {
                    None => out.push(Violation::MissingRotation(v)),
                    Some(r) => {
                        let set: BTreeSet<u8> = r.iter().copied().collect();
                        if set != (0..4).collect() {
                            out.push(Violation::BadRotation(v));
                        } else if let VertexKind::Classical { over, .. } = k {
                            if over.iter().any(|&s| s > 3)
                                || (self.pos(v, over[0]) + 2) % 4 != self.pos(v, over[1])
                            {
                                out.push(Violation::BadOverPair(v));
                            }
                        }
                    }
                }
            }
        }
        for &v in self.rotation.keys() {
            if !self.vertices.contains_key(&v) {
                out.push(Violation::UnknownVertex(v));
            }
        }
        if !out.is_empty() {
            return out;
        }

        // endpoints
        let mut end_use: BTreeMap<VertexId, usize> = BTreeMap::new();
        let mut passes: BTreeMap<VertexId, Vec<u8>> = BTreeMap::new();
        for s in &self.strands {
            if let Some((a, b)) = s.ends {
                for e in [a, b] {
                    match self.vertices.get(&e) {
                        None => out.push(Violation::UnknownVertex(e)),
                        Some(VertexKind::Endpoint { .. }) => *end_use.entry(e).or_default() += 1,
                        Some(_) => out.push(Violation::EndpointMisuse(e)),
                    }
                }
            }
            for p in &s.passages {
                match self.vertices.get(&p.vertex) {
                    None => out.push(Violation::UnknownVertex(p.vertex)),
                    Some(VertexKind::Endpoint { .. }) => out.push(Violation::EndpointMisuse(p.vertex)),
                    Some(_) if p.slot > 3 => {
                        out.push(Violation::BadSlot { vertex: p.vertex, slot: p.slot })
                    }
                    Some(_) => passes.entry(p.vertex).or_default().push(p.slot),
                }
            }
        }
        let mut labels = Vec::new();
        for (&v, k) in &self.vertices {
            if let VertexKind::Endpoint { label } = k {
                labels.push(*label);
                if end_use.get(&v).copied().unwrap_or(0) != 1 {
                    out.push(Violation::EndpointMisuse(v));
                }
            }
        }
        labels.sort_unstable();
        let open = self.strands.iter().filter(|s| s.ends.is_some()).count();
        let expected: Vec<u32> = (1..=2 * open as u32).collect();
        if labels != expected {
            out.push(Violation::EndpointLabels(format!(
                "found {labels:?} for {open} open strand(s)"
            )));
        }

        // crossings
        for (&v, k) in &self.vertices {
            let slots = passes.get(&v).map(Vec::as_slice).unwrap_or(&[]);
            match k {
                VertexKind::Endpoint { .. } => {}
                _ if slots.is_empty() => out.push(Violation::CrossingNeverPassed(v)),
                _ if slots.len() == 1 => out.push(Violation::CrossingPassedOnce(v)),
                _ if slots.len() > 2 => out.push(Violation::CrossingPassedTooOften(v)),
                VertexKind::Classical { over, .. } => {
                    let a = over.contains(&slots[0]);
                    let b = over.contains(&slots[1]);
                    if a == b {
                        out.push(Violation::OverUnderMismatch(v));
                    }
                }
                VertexKind::Virtual => {
                    if self.pos(v, slots[0]) % 2 == self.pos(v, slots[1]) % 2 {
                        out.push(Violation::VirtualSameAxis(v));
                    }
                }
            }
        }
        if !out.is_empty() {
            return out;
        }
        for d in self.embedding().defects() {
            match d {
                faces::EmbeddingDefect::HalfEdgeUsedTwice(v, p) => {
                    out.push(Violation::EdgeEndUsedTwice { vertex: v, slot: self.slot_at(v, p) })
                }
                faces::EmbeddingDefect::HalfEdgeUnused(v, p) => {
                    out.push(Violation::EdgeEndUnused { vertex: v, slot: self.slot_at(v, p) })
                }
                faces::EmbeddingDefect::UnknownVertex(v) => out.push(Violation::UnknownVertex(v)),
            }
        }
        out
    }

    /// All violated invariants; empty means the diagram is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = self.structural_violations();
        if !out.is_empty() {
            return out;
        }
        let computed = self.compute_signs();
        for (&v, k) in &self.vertices {
            if let VertexKind::Classical { sign: Some(declared), .. } = k {
                let c = computed[&v];
                if c != *declared {
                    out.push(Violation::SignMismatch { vertex: v, declared: *declared, computed: c });
                }
            }
        }
        let faces = self.faces();
        for (c, chi) in faces.euler_characteristics().into_iter().enumerate() {
            if chi != 2 {
                out.push(Violation::NonPlanar { component: c, euler: chi });
            }
        }
        for (&c, p) in &self.placement {
            if c >= faces.component_count {
                out.push(Violation::BadPlacement(format!("no component {c}")));
                continue;
            }
            for (v, s) in [p.host, p.outer] {
                let ok = match self.vertices.get(&v) {
                    Some(k) => s < k.degree(),
                    None => false,
                };
                if !ok {
                    out.push(Violation::BadPlacement(format!("no corner ({v}, {s})")));
                }
            }
            if faces.vertex_component.get(&p.outer.0) != Some(&c) {
                out.push(Violation::BadPlacement(format!(
                    "outer corner of component {c} lies on another component"
                )));
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    pub fn check(&self) -> Result<(), DiagramError> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(DiagramError::Invalid(v))
        }
    }

    /// Signs implied by the rotation and strand orientations. Assumes structural validity.
    fn compute_signs(&self) -> BTreeMap<VertexId, Sign> {
        let mut entries: BTreeMap<VertexId, (Option<u8>, Option<u8>)> = BTreeMap::new();
        for s in &self.strands {
            for p in &s.passages {
                if let Some(VertexKind::Classical { over, .. }) = self.vertices.get(&p.vertex) {
                    let e = entries.entry(p.vertex).or_default();
                    if over.contains(&p.slot) {
                        e.0 = Some(p.slot);
                    } else {
                        e.1 = Some(p.slot);
                    }
                }
            }
        }
        entries
            .into_iter()
            .filter_map(|(v, (o, u))| {
                let (o, u) = (o?, u?);
                let over_exit = (self.pos(v, o) + 2) % 4;
                let under_exit = (self.pos(v, u) + 2) % 4;
                Some((v, if under_exit == (over_exit + 1) % 4 { Sign::Positive } else { Sign::Negative }))
            })
            .collect()
    }

    /// Crossing signs of a valid diagram, keyed by vertex.
    pub fn signs(&self) -> Result<BTreeMap<VertexId, Sign>, DiagramError> {
        self.check()?;
        Ok(self.compute_signs())
    }

    pub fn writhe(&self) -> Result<i32, DiagramError> {
        Ok(self.signs()?.values().map(|s| s.value()).sum())
    }

    /// The Gauss code: classical passages only, crossing ids equal to vertex ids.
    pub fn to_gauss(&self) -> Result<GaussCode, DiagramError> {
        let signs = self.signs()?;
        let strands = self
            .strands
            .iter()
            .map(|s| GaussStrand {
                passages: s
                    .passages
                    .iter()
                    .filter_map(|p| match &self.vertices[&p.vertex] {
                        VertexKind::Classical { over, .. } => Some(GaussPassage {
                            crossing: p.vertex,
                            role: if over.contains(&p.slot) { Role::Over } else { Role::Under },
                            sign: signs[&p.vertex],
                        }),
                        _ => None,
                    })
                    .collect(),
                ends: s.ends.map(|(a, b)| (self.label(a).unwrap(), self.label(b).unwrap())),
            })
            .collect();
        Ok(GaussCode::new(strands)?)
    }

    pub fn strand_permutation(&self) -> Result<Involution, DiagramError> {
        let mut pairs = Vec::new();
        for s in &self.strands {
            let (a, b) = s.ends.ok_or(DiagramError::ClosedComponent)?;
            let (la, lb) = (self.label(a), self.label(b));
            match (la, lb) {
                (Some(x), Some(y)) => pairs.push((x, y)),
                _ => return Err(DiagramError::Invalid(vec![Violation::EndpointMisuse(a)])),
            }
        }
        Ok(Involution::from_pairs(&pairs)?)
    }

    /// Endpoint pairing of the open strands; closed strands are ignored.
    pub fn open_strand_permutation(&self) -> Result<Involution, DiagramError> {
        let mut pairs = Vec::new();
        for s in &self.strands {
            if let Some((a, b)) = s.ends {
                match (self.label(a), self.label(b)) {
                    (Some(x), Some(y)) => pairs.push((x, y)),
                    _ => return Err(DiagramError::Invalid(vec![Violation::EndpointMisuse(a)])),
                }
            }
        }
        Ok(Involution::from_pairs(&pairs)?)
    }

    /// Recompute the placement after an edit.
    ///
    /// `class` maps a corner `(vertex, position)` to the face it belonged to
    /// before the edit, with faces merged by the edit already identified.
    /// Components meeting a common class are placed in one another along a
    /// spanning tree rooted at component 0.
    pub(crate) fn rebuild_placement(&mut self, class: impl Fn(Corner) -> Option<usize>) {
        self.placement.clear();
        let fs = self.faces();
        if fs.component_count < 2 {
            return;
        }
        // class -> list of (component, a corner of that component's face in the class)
        let mut members: BTreeMap<usize, Vec<(usize, Corner)>> = BTreeMap::new();
        for corners in &fs.raw_face_corners {
            let comp = fs.vertex_component[&corners[0].0];
            if let Some(k) = corners.iter().find_map(|&c| class(c)) {
                let e = members.entry(k).or_default();
                if !e.iter().any(|(c, _)| *c == comp) {
                    e.push((comp, *corners.iter().min().unwrap()));
                }
            }
        }
        let mut by_comp: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (&k, ms) in &members {
            for (c, _) in ms {
                by_comp.entry(*c).or_default().push(k);
            }
        }
        let mut placed = vec![false; fs.component_count];
        placed[0] = true;
        let mut queue = std::collections::VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for k in by_comp.get(&x).cloned().unwrap_or_default() {
                let host = members[&k].iter().find(|(c, _)| *c == x).unwrap().1;
                for &(y, outer) in &members[&k] {
                    if placed[y] {
                        continue;
                    }
                    placed[y] = true;
                    queue.push_back(y);
                    self.placement.insert(
                        y,
                        ComponentPlacement {
                            host: (host.0, self.slot_at(host.0, host.1)),
                            outer: (outer.0, self.slot_at(outer.0, outer.1)),
                        },
                    );
                }
            }
        }
    }

    /// Same diagram with every rotation rewritten to `[0, 1, 2, 3]`, so slots equal positions.
    pub fn with_positional_slots(&self) -> PlanarDiagram {
        let mut d = self.clone();
        for (&v, k) in d.vertices.iter_mut() {
            if let VertexKind::Classical { over, .. } = k {
                *over = [self.pos(v, over[0]), self.pos(v, over[1])];
                over.sort_unstable();
            }
        }
        for s in &mut d.strands {
            for p in &mut s.passages {
                p.slot = self.pos(p.vertex, p.slot);
            }
        }
        for p in d.placement.values_mut() {
            p.host.1 = self.pos(p.host.0, p.host.1);
            p.outer.1 = self.pos(p.outer.0, p.outer.1);
        }
        for r in d.rotation.values_mut() {
            *r = [0, 1, 2, 3];
        }
        d
    }

    /// Mirror image: over and under exchanged at every classical crossing.
    pub fn mirror(&self) -> PlanarDiagram {
        let mut d = self.clone();
        for (&v, k) in d.vertices.iter_mut() {
            if let VertexKind::Classical { over, sign } = k {
                let a = self.slot_at(v, (self.pos(v, over[0]) + 1) % 4);
                let b = self.opposite_slot(v, a);
                *over = [a.min(b), a.max(b)];
                *sign = sign.map(Sign::flip);
            }
        }
        d
    }

    /// Reverse the orientation of strand `i`, swapping foot and head.
    pub fn reverse_strand(&mut self, i: usize) {
        let rev: Vec<Passage> = self.strands[i]
            .passages
            .iter()
            .rev()
            .map(|p| Passage { vertex: p.vertex, slot: self.opposite_slot(p.vertex, p.slot) })
            .collect();
        let s = &mut self.strands[i];
        s.passages = rev;
        s.ends = s.ends.map(|(a, b)| (b, a));
        // declared signs may now be stale
        let touched: BTreeSet<VertexId> = s.passages.iter().map(|p| p.vertex).collect();
        for v in touched {
            if let Some(VertexKind::Classical { sign, .. }) = self.vertices.get_mut(&v) {
                *sign = None;
            }
        }
    }

    /// Fill in declared signs from the rotation.
    pub fn with_computed_signs(mut self) -> PlanarDiagram {
        let signs = self.compute_signs();
        for (v, k) in self.vertices.iter_mut() {
            if let VertexKind::Classical { sign, .. } = k {
                *sign = signs.get(v).copied();
            }
        }
        self
    }

    /// Build the unique diagram realizing a Gauss code of classical crossings.
    ///
    /// Crossings become vertices with their code ids and identity rotation;
    /// endpoint with label `l` gets vertex id `base + l` where `base` exceeds
    /// every crossing id. Fails with a `NonPlanar` violation if the code has
    /// no planar realization.
    pub fn from_gauss(code: &GaussCode) -> Result<PlanarDiagram, DiagramError> {
        let base = code.crossings().keys().max().map_or(0, |m| m + 1);
        let mut d = PlanarDiagram::default();
        for (&c, &sign) in &code.crossings() {
            d.vertices.insert(c, VertexKind::Classical { over: [0, 2], sign: Some(sign) });
            d.rotation.insert(c, [0, 1, 2, 3]);
        }
        for s in code.strands() {
            let passages = s
                .passages
                .iter()
                .map(|p| Passage {
                    vertex: p.crossing,
                    slot: match (p.role, p.sign) {
                        (Role::Over, _) => 2,
                        (Role::Under, Sign::Positive) => 3,
                        (Role::Under, Sign::Negative) => 1,
                    },
                })
                .collect();
            let ends = s.ends.map(|(a, b)| {
                d.vertices.insert(base + a, VertexKind::Endpoint { label: a });
                d.vertices.insert(base + b, VertexKind::Endpoint { label: b });
                (base + a, base + b)
            });
            d.strands.push(Strand { passages, ends });
        }
        d.check()?;
        Ok(d)
    }
}
