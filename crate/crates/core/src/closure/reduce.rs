//! Virtual Reidemeister I and II simplification.

use std::collections::{BTreeMap, BTreeSet};

use crate::diagram::{Corner, PlanarDiagram, UnionFind, VertexId, VertexKind};

enum Move {
    /// Drop `(strand, passage index)` pairs and the listed vertices;
    /// merge the listed corner classes.
    Remove { passages: Vec<(usize, usize)>, vertices: Vec<VertexId>, merge: Vec<(Corner, Corner)> },
}

fn is_virtual(d: &PlanarDiagram, v: VertexId) -> bool {
    matches!(d.vertices.get(&v), Some(VertexKind::Virtual))
}

/// Passage indices `(k - 1, k)` at the ends of segment `seg` of closed strand `s`.
fn seg_passages(d: &PlanarDiagram, s: usize, seg: usize) -> [(usize, usize); 2] {
    let l = d.strands[s].passages.len();
    [(s, (seg + l - 1) % l), (s, seg)]
}

fn find_move(d: &PlanarDiagram) -> Option<Move> {
    let fs = d.faces();
    let mut corners: BTreeMap<usize, Vec<Corner>> = BTreeMap::new();
    for (&c, &f) in &fs.corner_face {
        corners.entry(f).or_default().push(c);
    }
    let mut darts: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (dart, &f) in fs.dart_face.iter().enumerate() {
        darts.entry(f).or_default().push(dart);
    }
    for cs in corners.values_mut() {
        cs.sort_unstable();
    }
    // monogons first
    for (f, cs) in &corners {
        if let [(v, p)] = cs[..] {
            if !is_virtual(d, v) || darts[f].len() != 1 {
                continue;
            }
            let e = fs.edges[darts[f][0] / 2];
            if e.start.0 != v || e.end.0 != v {
                continue;
            }
            return Some(Move::Remove {
                passages: seg_passages(d, e.strand, e.seg).to_vec(),
                vertices: vec![v],
                merge: vec![((v, p), (v, (p + 2) % 4))],
            });
        }
    }
    for (f, cs) in &corners {
        if let [(u, p), (w, q)] = cs[..] {
            if u == w || !is_virtual(d, u) || !is_virtual(d, w) || darts[f].len() != 2 {
                continue;
            }
            let (e1, e2) = (darts[f][0] / 2, darts[f][1] / 2);
            if e1 == e2 {
                continue;
            }
            let ends: BTreeSet<VertexId> = [u, w].into();
            let ok = [e1, e2].iter().all(|&e| {
                let e = fs.edges[e];
                [e.start.0, e.end.0].into_iter().collect::<BTreeSet<_>>() == ends
            });
            if !ok {
                continue;
            }
            let mut passages: Vec<(usize, usize)> = [e1, e2]
                .iter()
                .flat_map(|&e| seg_passages(d, fs.edges[e].strand, fs.edges[e].seg))
                .collect();
            passages.sort_unstable();
            passages.dedup();
            if passages.len() != 4 {
                continue;
            }
            return Some(Move::Remove {
                passages,
                vertices: vec![u, w],
                merge: vec![((u, p), (u, (p + 2) % 4)), ((u, p), (w, (q + 2) % 4))],
            });
        }
    }
    None
}

fn apply(d: &PlanarDiagram, m: Move) -> PlanarDiagram {
    let Move::Remove { mut passages, vertices, merge } = m;
    let fs = d.faces();
    let mut uf = UnionFind::new(fs.face_count);
    for (a, b) in merge {
        uf.union(fs.corner_face[&a], fs.corner_face[&b]);
    }
    let class: Vec<usize> = (0..fs.face_count).map(|f| uf.find(f)).collect();
    let mut out = d.clone();
    passages.sort_unstable_by(|a, b| b.cmp(a));
    for (s, k) in passages {
        out.strands[s].passages.remove(k);
    }
    for v in vertices {
        out.vertices.remove(&v);
        out.rotation.remove(&v);
    }
    out.rebuild_placement(|c| fs.corner_face.get(&c).map(|&f| class[f]));
    out
}

/// Apply virtual monogon and bigon removals until none is left.
pub(super) fn simplify(d: &PlanarDiagram) -> PlanarDiagram {
    let mut d = d.with_positional_slots();
    while let Some(m) = find_move(&d) {
        d = apply(&d, m);
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{Passage, Strand};

    fn virt(d: &mut PlanarDiagram, v: VertexId) {
        d.vertices.insert(v, VertexKind::Virtual);
        d.rotation.insert(v, [0, 1, 2, 3]);
    }

    fn strand(ps: &[(VertexId, u8)]) -> Strand {
        Strand { passages: ps.iter().map(|&(vertex, slot)| Passage { vertex, slot }).collect(), ends: None }
    }

    #[test]
    fn virtual_kink_is_removed() {
        let mut d = PlanarDiagram::default();
        virt(&mut d, 1);
        d.strands.push(strand(&[(1, 2), (1, 1)]));
        assert!(d.is_valid(), "{:?}", d.validate());
        let r = simplify(&d);
        assert_eq!(r.virtual_count(), 0);
        assert!(r.is_valid());
    }

    #[test]
    fn virtual_bigon_is_removed() {
        // two loops crossing each other twice at virtual crossings
        let mut d = PlanarDiagram::default();
        virt(&mut d, 1);
        virt(&mut d, 2);
        d.strands.push(strand(&[(1, 2), (2, 2)]));
        d.strands.push(strand(&[(1, 1), (2, 3)]));
        assert!(d.is_valid(), "{:?}", d.validate());
        let r = simplify(&d);
        assert_eq!(r.virtual_count(), 0);
        assert_eq!(r.strands.len(), 2);
        assert!(r.is_valid(), "{:?}", r.validate());
    }
}
