//! Cutting a closed virtual diagram open along virtual arcs.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::ClosureError;
use crate::diagram::{PlanarDiagram, Passage, Strand, UnionFind, VertexId, VertexKind};
use crate::involution::Involution;

/// A maximal run of virtual passages on a closed strand, as cyclic passage indices.
struct Run {
    strand: usize,
    idx: Vec<usize>,
    /// The strand carries no classical passage at all.
    whole: bool,
}

fn runs(d: &PlanarDiagram) -> Vec<Run> {
    let classical = |v: VertexId| matches!(d.vertices[&v], VertexKind::Classical { .. });
    let mut out = Vec::new();
    for (s, st) in d.strands.iter().enumerate() {
        let ps = &st.passages;
        let l = ps.len();
        let Some(c0) = ps.iter().position(|p| classical(p.vertex)) else {
            if l > 0 {
                out.push(Run { strand: s, idx: (0..l).collect(), whole: true });
            }
            continue;
        };
        let mut cur = Vec::new();
        for t in 1..=l {
            let i = (c0 + t) % l;
            if classical(ps[i].vertex) {
                if !cur.is_empty() {
                    out.push(Run { strand: s, idx: std::mem::take(&mut cur), whole: false });
                }
            } else {
                cur.push(i);
            }
        }
    }
    out
}

/// Remove arcs of virtual passages until no virtual crossing is left.
///
/// Runs of consecutive virtual passages are chosen greedily, most uncovered
/// virtual crossings first, and every virtual crossing on a chosen run is
/// deleted. The `j`-th cut creates the foot `2j - 1` of the piece after it
/// and the head `2j` of the piece before it, so the returned permutation is
/// `(1 2)(3 4)...`.
pub fn excise_virtual(v: &PlanarDiagram) -> Result<(PlanarDiagram, Involution), ClosureError> {
    v.check()?;
    if !v.is_closed() {
        return Err(ClosureError::NotClosed);
    }
    let d = v.with_positional_slots();
    let all = runs(&d);
    let mut uncovered: BTreeSet<VertexId> =
        d.vertices.iter().filter(|(_, k)| matches!(k, VertexKind::Virtual)).map(|(&v, _)| v).collect();
    let run_vertices: Vec<BTreeSet<VertexId>> = all
        .iter()
        .map(|r| r.idx.iter().map(|&i| d.strands[r.strand].passages[i].vertex).collect())
        .collect();
    let mut chosen = BTreeSet::new();
    while let Some(&first) = uncovered.iter().next() {
        let best = (0..all.len())
            .max_by_key(|&r| (run_vertices[r].intersection(&uncovered).count(), std::cmp::Reverse(r)))
            .filter(|&r| run_vertices[r].intersection(&uncovered).count() > 0)
            .ok_or(ClosureError::NoExcisableArc(first))?;
        for w in &run_vertices[best] {
            uncovered.remove(w);
        }
        chosen.insert(best);
    }
    let removed: BTreeSet<VertexId> = chosen.iter().flat_map(|&r| run_vertices[r].iter().copied()).collect();

    let fs = d.faces();
    let edge_of: HashMap<(usize, usize), usize> =
        fs.edges.iter().enumerate().map(|(i, e)| ((e.strand, e.seg), i)).collect();
    let mut uf = UnionFind::new(fs.face_count);
    for &r in &chosen {
        let run = &all[r];
        let l = d.strands[run.strand].passages.len();
        let segs: Vec<usize> = if run.whole {
            (0..l).collect()
        } else {
            run.idx.iter().copied().chain(std::iter::once((run.idx[run.idx.len() - 1] + 1) % l)).collect()
        };
        for k in segs {
            let e = edge_of[&(run.strand, k)];
            uf.union(fs.dart_face[2 * e], fs.dart_face[2 * e + 1]);
        }
    }
    for &w in &removed {
        for p in 1..4 {
            uf.union(fs.corner_face[&(w, 0)], fs.corner_face[&(w, p)]);
        }
    }
    let class: Vec<usize> = (0..fs.face_count).map(|f| uf.find(f)).collect();

    // cuts per strand, in strand order and then cyclic order along the strand
    let mut cuts: BTreeMap<usize, Vec<(usize, u32)>> = BTreeMap::new();
    let mut cut_face: BTreeMap<u32, usize> = BTreeMap::new();
    let mut j = 0u32;
    for &r in &chosen {
        let run = &all[r];
        j += 1;
        cuts.entry(run.strand).or_default().push((r, j));
        let e = edge_of[&(run.strand, run.idx[0])];
        cut_face.insert(2 * j - 1, class[fs.dart_face[2 * e]]);
        cut_face.insert(2 * j, class[fs.dart_face[2 * e]]);
    }

    let base = d.vertices.keys().max().map_or(0, |m| m + 1);
    let mut out = PlanarDiagram::default();
    for (&v, k) in &d.vertices {
        if !removed.contains(&v) {
            out.vertices.insert(v, k.clone());
            out.rotation.insert(v, [0, 1, 2, 3]);
        }
    }
    let keep = |p: &Passage| !removed.contains(&p.vertex);
    for (s, st) in d.strands.iter().enumerate() {
        let l = st.passages.len();
        let Some(cs) = cuts.get(&s) else {
            out.strands.push(Strand { passages: st.passages.iter().copied().filter(keep).collect(), ends: None });
            continue;
        };
        for (t, &(r, jr)) in cs.iter().enumerate() {
            let (r2, jn) = cs[(t + 1) % cs.len()];
            let passages: Vec<Passage> = if all[r].whole {
                Vec::new()
            } else {
                let from = (all[r].idx[all[r].idx.len() - 1] + 1) % l;
                let to = all[r2].idx[0];
                let len = (to + l - from) % l;
                (0..len).map(|i| st.passages[(from + i) % l]).filter(keep).collect()
            };
            let (foot, head) = (2 * jr - 1, 2 * jn);
            out.vertices.insert(base + foot, VertexKind::Endpoint { label: foot });
            out.vertices.insert(base + head, VertexKind::Endpoint { label: head });
            out.strands.push(Strand { passages, ends: Some((base + foot, base + head)) });
        }
    }
    out.rebuild_placement(|c| match out_label(c.0, base) {
        Some(l) => cut_face.get(&l).copied(),
        None => fs.corner_face.get(&c).map(|&f| class[f]),
    });
    let out = out.with_computed_signs();
    let pairs: Vec<(u32, u32)> = (1..=j).map(|k| (2 * k - 1, 2 * k)).collect();
    Ok((out, Involution::from_pairs(&pairs)?))
}

fn out_label(v: VertexId, base: VertexId) -> Option<u32> {
    (v > base).then(|| v - base)
}

#[cfg(test)]
mod tests {
    use super::super::{reduce_virtual, virtual_closure};
    use super::*;

    #[test]
    fn classical_diagram_is_untouched() {
        let g = "loop: O1- U2- O3- U1- O2- U3-".parse().unwrap();
        let d = PlanarDiagram::from_gauss(&g).unwrap();
        let (e, sigma) = excise_virtual(&d).unwrap();
        assert_eq!(sigma.n(), 0);
        assert_eq!(e.to_gauss().unwrap(), d.to_gauss().unwrap());
    }

    #[test]
    fn virtual_trefoil_reopens_and_recloses() {
        let g = "1-2: O1+ U2+; 3-4: U1+ O2+".parse().unwrap();
        let d = PlanarDiagram::from_gauss(&g).unwrap();
        let c = reduce_virtual(&virtual_closure(&d, &"(1 4)(2 3)".parse().unwrap()).unwrap());
        let (open, sigma) = excise_virtual(c.diagram()).unwrap();
        assert!(open.is_valid(), "{:?}", open.validate());
        assert_eq!(open.virtual_count(), 0);
        assert_eq!(open.classical_count(), 2);
        let back = virtual_closure(&open, &sigma).unwrap();
        assert_eq!(back.to_gauss().unwrap().canonical(), c.to_gauss().unwrap().canonical());
    }
}
