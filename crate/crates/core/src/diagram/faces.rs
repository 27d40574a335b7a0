//! Face traversal on rotation systems.
//!
//! An [`Embedding`] is a diagram reduced to what the traversal needs: the
//! degree of every vertex and the strands as sequences of `(vertex, entry
//! position)` pairs, positions counted counterclockwise. Faces are orbits of
//! the map sending a dart arriving at position `q` to the dart leaving at
//! position `q - 1`, i.e. each dart is assigned the face on its left.

use std::collections::{BTreeMap, HashMap};

use super::VertexId;

/// The angular sector at `vertex` from position `pos` counterclockwise to `pos + 1`.
pub type Corner = (VertexId, u8);

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct EStrand {
    pub passages: Vec<(VertexId, u8)>,
    /// `(start, end)` half-edges for open strands; `None` for closed ones.
    pub ends: Option<((VertexId, u8), (VertexId, u8))>,
}

#[derive(Clone, Debug, Default)]
pub(crate) struct Embedding {
    pub deg: BTreeMap<VertexId, u8>,
    pub strands: Vec<EStrand>,
    /// Explicit face identifications between distinct connected components:
    /// `(host corner, component corner)`.
    pub merges: Vec<(Corner, Corner)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Edge {
    pub strand: usize,
    /// Segment `k` ends at passage `k` (or at the strand's end when `k` equals the length).
    pub seg: usize,
    pub start: (VertexId, u8),
    pub end: (VertexId, u8),
}

#[derive(Clone, Debug)]
pub(crate) struct FaceStructure {
    pub edges: Vec<Edge>,
    /// Face (after merges) on the left of dart `2e` (along the strand) and `2e + 1` (against it).
    pub dart_face: Vec<usize>,
    pub corner_face: HashMap<Corner, usize>,
    pub face_count: usize,
    /// Faces before placement merges.
    pub raw_dart_face: Vec<usize>,
    pub raw_face_corners: Vec<Vec<Corner>>,
    /// Connected component of every vertex, numbered by first strand touching it.
    pub vertex_component: BTreeMap<VertexId, usize>,
    pub component_count: usize,
    /// Closed strands without passages.
    pub free_loops: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum EmbeddingDefect {
    HalfEdgeUsedTwice(VertexId, u8),
    HalfEdgeUnused(VertexId, u8),
    UnknownVertex(VertexId),
}

pub(crate) struct UnionFind(Vec<usize>);

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    pub(crate) fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.0[hi] = lo;
        true
    }
}

impl Embedding {
    pub fn exit_pos(&self, v: VertexId, entry: u8) -> u8 {
        let d = self.deg[&v];
        (entry + d / 2) % d
    }

    pub fn edges(&self) -> Vec<Edge> {
        let mut edges = Vec::new();
        for (si, s) in self.strands.iter().enumerate() {
            let l = s.passages.len();
            let exit = |k: usize| {
                let (v, e) = s.passages[k];
                (v, self.exit_pos(v, e))
            };
            match s.ends {
                Some((a, b)) => {
                    for k in 0..=l {
                        let start = if k == 0 { a } else { exit(k - 1) };
                        let end = if k == l { b } else { s.passages[k] };
                        edges.push(Edge { strand: si, seg: k, start, end });
                    }
                }
                None => {
                    for k in 0..l {
                        let start = exit((k + l - 1) % l);
                        edges.push(Edge { strand: si, seg: k, start, end: s.passages[k] });
                    }
                }
            }
        }
        edges
    }

    /// Check that every half-edge of every vertex is used by exactly one edge end.
    pub fn defects(&self) -> Vec<EmbeddingDefect> {
        let mut used: HashMap<(VertexId, u8), usize> = HashMap::new();
        let mut out = Vec::new();
        for e in self.edges() {
            for h in [e.start, e.end] {
                if !self.deg.contains_key(&h.0) {
                    out.push(EmbeddingDefect::UnknownVertex(h.0));
                    continue;
                }
                *used.entry(h).or_default() += 1;
            }
        }
        for (&v, &d) in &self.deg {
            for p in 0..d {
                match used.get(&(v, p)).copied().unwrap_or(0) {
                    0 => out.push(EmbeddingDefect::HalfEdgeUnused(v, p)),
                    1 => {}
                    _ => out.push(EmbeddingDefect::HalfEdgeUsedTwice(v, p)),
                }
            }
        }
        out.sort_by_key(|d| format!("{d:?}"));
        out.dedup();
        out
    }

    /// Faces of the embedding. Requires `defects()` to be empty.
    pub fn faces(&self) -> FaceStructure {
        let edges = self.edges();
        let mut half: HashMap<(VertexId, u8), usize> = HashMap::with_capacity(edges.len() * 2);
        for (i, e) in edges.iter().enumerate() {
            half.insert(e.start, 2 * i);
            half.insert(e.end, 2 * i + 1);
        }
        let arrive = |d: usize| if d % 2 == 0 { edges[d / 2].end } else { edges[d / 2].start };
        let ndarts = edges.len() * 2;
        let mut raw = vec![usize::MAX; ndarts];
        let mut orbits: Vec<(Vec<usize>, Vec<Corner>)> = Vec::new();
        for d0 in 0..ndarts {
            if raw[d0] != usize::MAX {
                continue;
            }
            let id = orbits.len();
            let mut darts = Vec::new();
            let mut corners = Vec::new();
            let mut d = d0;
            loop {
                raw[d] = id;
                darts.push(d);
                let (v, q) = arrive(d);
                let deg = self.deg[&v];
                let out = (q + deg - 1) % deg;
                corners.push((v, out));
                // leaving from the start of edge e is dart 2e, from its end dart 2e + 1
                d = half[&(v, out)];
                if d == d0 {
                    break;
                }
            }
            orbits.push((darts, corners));
        }
        // number raw faces by smallest corner
        let mut order: Vec<usize> = (0..orbits.len()).collect();
        let mins: Vec<Corner> = orbits.iter().map(|o| *o.1.iter().min().unwrap()).collect();
        order.sort_by_key(|&i| mins[i]);
        let mut renum = vec![0; orbits.len()];
        for (new, &old) in order.iter().enumerate() {
            renum[old] = new;
        }
        let raw_dart_face: Vec<usize> = raw.iter().map(|&f| renum[f]).collect();
        let mut raw_face_corners = vec![Vec::new(); orbits.len()];
        for (old, (_, corners)) in orbits.into_iter().enumerate() {
            raw_face_corners[renum[old]] = corners;
        }

        // connected components
        let verts: Vec<VertexId> = self.deg.keys().copied().collect();
        let vidx: HashMap<VertexId, usize> = verts.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let mut uf = UnionFind::new(verts.len());
        for e in &edges {
            uf.union(vidx[&e.start.0], vidx[&e.end.0]);
        }
        let mut vertex_component = BTreeMap::new();
        let mut comp_of_root: HashMap<usize, usize> = HashMap::new();
        let mut free_loops = 0;
        for s in &self.strands {
            let first = match (s.passages.first(), s.ends) {
                (Some(p), _) => p.0,
                (None, Some((a, _))) => a.0,
                (None, None) => {
                    free_loops += 1;
                    continue;
                }
            };
            let r = uf.find(vidx[&first]);
            let next = comp_of_root.len();
            comp_of_root.entry(r).or_insert(next);
        }
        for &v in &verts {
            let r = uf.find(vidx[&v]);
            let next = comp_of_root.len();
            let c = *comp_of_root.entry(r).or_insert(next);
            vertex_component.insert(v, c);
        }
        let component_count = comp_of_root.len();

        // placement merges between components
        let mut corner_raw: HashMap<Corner, usize> = HashMap::new();
        for (f, cs) in raw_face_corners.iter().enumerate() {
            for &c in cs {
                corner_raw.insert(c, f);
            }
        }
        let face_comp: Vec<usize> =
            raw_face_corners.iter().map(|cs| vertex_component[&cs[0].0]).collect();
        let mut fuf = UnionFind::new(raw_face_corners.len());
        let mut cuf = UnionFind::new(component_count);
        let mut placed = vec![false; component_count];
        for &(host, own) in &self.merges {
            let (Some(&fh), Some(&fo)) = (corner_raw.get(&host), corner_raw.get(&own)) else {
                continue;
            };
            let (ch, co) = (face_comp[fh], face_comp[fo]);
            if cuf.find(ch) == cuf.find(co) {
                continue;
            }
            cuf.union(ch, co);
            fuf.union(fh, fo);
            placed[co] = true;
        }
        // remaining components share the outer face: their largest face
        let mut outer: Vec<Option<usize>> = vec![None; component_count];
        for (f, cs) in raw_face_corners.iter().enumerate() {
            let c = face_comp[f];
            match outer[c] {
                Some(g) if raw_face_corners[g].len() >= cs.len() => {}
                _ => outer[c] = Some(f),
            }
        }
        let mut anchor: Option<usize> = None;
        for c in 0..component_count {
            if placed[c] {
                continue;
            }
            let Some(f) = outer[c] else { continue };
            match anchor {
                None => anchor = Some(f),
                Some(a) => {
                    if cuf.find(c) != cuf.find(face_comp[a]) {
                        cuf.union(c, face_comp[a]);
                        fuf.union(a, f);
                    }
                }
            }
        }
        let mut merged_id: HashMap<usize, usize> = HashMap::new();
        let mut final_of_raw = vec![0; raw_face_corners.len()];
        for f in 0..raw_face_corners.len() {
            let r = fuf.find(f);
            let next = merged_id.len();
            final_of_raw[f] = *merged_id.entry(r).or_insert(next);
        }
        let dart_face = raw_dart_face.iter().map(|&f| final_of_raw[f]).collect();
        let corner_face = corner_raw.iter().map(|(c, &f)| (*c, final_of_raw[f])).collect();

        FaceStructure {
            edges,
            dart_face,
            corner_face,
            face_count: merged_id.len(),
            raw_dart_face,
            raw_face_corners,
            vertex_component,
            component_count,
            free_loops,
        }
    }
}

impl FaceStructure {
    /// `V - E + F` for each connected component, using unmerged faces.
    pub fn euler_characteristics(&self) -> Vec<i64> {
        let mut chi = vec![0i64; self.component_count];
        for c in self.vertex_component.values() {
            chi[*c] += 1;
        }
        for e in &self.edges {
            chi[self.vertex_component[&e.start.0]] -= 1;
        }
        for cs in &self.raw_face_corners {
            chi[self.vertex_component[&cs[0].0]] += 1;
        }
        chi
    }
}
