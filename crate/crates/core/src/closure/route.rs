//! Routing closure arcs through the face graph.

use std::collections::{BTreeMap, VecDeque};

use crate::diagram::{EStrand, Embedding, FaceStructure, PlanarDiagram, Strand, VertexId, VertexKind, Passage};
use crate::involution::Involution;

/// A diagram being closed. Positions equal slots throughout.
pub(super) struct Work {
    pub emb: Embedding,
    pub kinds: BTreeMap<VertexId, VertexKind>,
    pub label_vertex: BTreeMap<u32, VertexId>,
    next_id: VertexId,
    /// `(strand index, from label, to label)` of every inserted arc.
    pub arcs: Vec<(usize, u32, u32)>,
    open_strands: usize,
}

impl Work {
    /// `d` must be valid and use positional slots.
    pub fn new(d: &PlanarDiagram) -> Work {
        let emb = d.embedding();
        let label_vertex = d
            .vertices
            .iter()
            .filter_map(|(&v, k)| match k {
                VertexKind::Endpoint { label } => Some((*label, v)),
                _ => None,
            })
            .collect();
        Work {
            emb,
            kinds: d.vertices.clone(),
            label_vertex,
            next_id: d.vertices.keys().max().map_or(1, |m| m + 1),
            arcs: Vec::new(),
            open_strands: d.strands.len(),
        }
    }

    /// Shortest dual path from face `from` to face `to` as `(edge, arc comes from the left)`.
    fn dual_path(fs: &FaceStructure, from: usize, to: usize) -> Vec<(usize, bool)> {
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); fs.face_count];
        for e in 0..fs.edges.len() {
            let (a, b) = (fs.dart_face[2 * e], fs.dart_face[2 * e + 1]);
            if a != b {
                adj[a].push((b, e));
                adj[b].push((a, e));
            }
        }
        let mut dist = vec![usize::MAX; fs.face_count];
        dist[to] = 0;
        let mut queue = VecDeque::from([to]);
        while let Some(x) = queue.pop_front() {
            for &(y, _) in &adj[x] {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        assert!(dist[from] != usize::MAX, "faces of one sphere are connected");
        let mut path = Vec::new();
        let mut x = from;
        while x != to {
            let &(y, e) = adj[x]
                .iter()
                .filter(|(y, _)| dist[*y] + 1 == dist[x])
                .min()
                .expect("a step towards the target");
            path.push((e, fs.dart_face[2 * e] == x));
            x = y;
        }
        path
    }

    /// Join endpoints `i` and `j` by an arc of virtual crossings.
    pub fn insert_arc(&mut self, i: u32, j: u32) {
        let fs = self.emb.faces();
        let (vi, vj) = (self.label_vertex[&i], self.label_vertex[&j]);
        let path = Self::dual_path(&fs, fs.corner_face[&(vi, 0)], fs.corner_face[&(vj, 0)]);
        let mut arc = Vec::with_capacity(path.len());
        let mut inserts: Vec<(usize, usize, VertexId)> = Vec::new();
        for (e, from_left) in path {
            let w = self.next_id;
            self.next_id += 1;
            self.kinds.insert(w, VertexKind::Virtual);
            self.emb.deg.insert(w, 4);
            let edge = fs.edges[e];
            inserts.push((edge.strand, edge.seg, w));
            arc.push((w, if from_left { 1 } else { 3 }));
        }
        inserts.sort_by(|a, b| (b.0, b.1).cmp(&(a.0, a.1)));
        for (s, seg, w) in inserts {
            self.emb.strands[s].passages.insert(seg, (w, 2));
        }
        self.emb.deg.insert(vi, 2);
        self.emb.deg.insert(vj, 2);
        self.emb.strands.push(EStrand { passages: arc, ends: Some(((vi, 1), (vj, 1))) });
        self.arcs.push((self.emb.strands.len() - 1, i, j));
    }

    /// Merge strands and arcs into closed strands and drop the joints.
    pub fn finish(self, tau: &Involution, sigma: &Involution) -> PlanarDiagram {
        let fs = self.emb.faces();
        let reverse = |ps: &[(VertexId, u8)]| -> Vec<(VertexId, u8)> {
            ps.iter().rev().map(|&(v, p)| (v, (p + 2) % 4)).collect()
        };
        // label -> (strand, label is its foot)
        let mut at: BTreeMap<u32, (usize, bool)> = BTreeMap::new();
        let mut arc_at: BTreeMap<u32, (usize, bool)> = BTreeMap::new();
        for (s, st) in self.emb.strands.iter().enumerate().take(self.open_strands) {
            if let Some(((a, _), (b, _))) = st.ends {
                let la = label_of(&self.kinds, a);
                let lb = label_of(&self.kinds, b);
                at.insert(la, (s, true));
                at.insert(lb, (s, false));
            }
        }
        for &(s, i, j) in &self.arcs {
            arc_at.insert(i, (s, true));
            arc_at.insert(j, (s, false));
        }
        let mut visited = vec![false; self.emb.strands.len()];
        let mut closed: Vec<Vec<(VertexId, u8)>> = Vec::new();
        for start in 1..=tau.labels() as u32 {
            if visited[at[&start].0] {
                continue;
            }
            let mut ps = Vec::new();
            let mut label = start;
            loop {
                let (s, foot) = at[&label];
                visited[s] = true;
                let p = &self.emb.strands[s].passages;
                ps.extend(if foot { p.clone() } else { reverse(p) });
                let exit = tau.apply(label);
                let (a, a_foot) = arc_at[&exit];
                let p = &self.emb.strands[a].passages;
                ps.extend(if a_foot { p.clone() } else { reverse(p) });
                label = sigma.apply(exit);
                if label == start {
                    break;
                }
            }
            closed.push(ps);
        }
        for (s, st) in self.emb.strands.iter().enumerate().take(self.open_strands) {
            if st.ends.is_none() {
                closed.push(st.passages.clone());
                visited[s] = true;
            }
        }

        let mut d = PlanarDiagram::default();
        for (&v, k) in &self.kinds {
            if !matches!(k, VertexKind::Endpoint { .. }) {
                d.vertices.insert(v, k.clone());
                d.rotation.insert(v, [0, 1, 2, 3]);
            }
        }
        for ps in closed {
            d.strands.push(Strand {
                passages: ps.into_iter().map(|(vertex, slot)| Passage { vertex, slot }).collect(),
                ends: None,
            });
        }
        for k in d.vertices.values_mut() {
            if let VertexKind::Classical { sign, .. } = k {
                *sign = None;
            }
        }
        let mut d = d.with_computed_signs();
        d.rebuild_placement(|c| fs.corner_face.get(&c).copied());
        d
    }
}

fn label_of(kinds: &BTreeMap<VertexId, VertexKind>, v: VertexId) -> u32 {
    match kinds[&v] {
        VertexKind::Endpoint { label } => label,
        _ => unreachable!("strand ends at an endpoint"),
    }
}
