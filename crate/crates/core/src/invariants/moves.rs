//! Scripted Reidemeister moves on classical linkoid diagrams.
//!
//! Moves are performed on the Gauss code and realized again with
//! [`PlanarDiagram::from_gauss`]. A candidate is accepted only if it is
//! planar and the new crossings bound the expected bigon or triangle face,
//! which certifies that it is the diagram obtained by the move.

use std::collections::BTreeSet;

use crate::diagram::{
    DiagramError, GaussCode, GaussPassage, GaussStrand, PlanarDiagram, Role, Sign, VertexId,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Kink {
    pub sign: Sign,
    /// Whether the strand passes over first.
    pub over_first: bool,
}

fn next_id(g: &GaussCode) -> u32 {
    g.crossings().keys().max().map_or(1, |m| m + 1)
}

fn insert(strands: &mut [GaussStrand], strand: usize, at: usize, ps: &[GaussPassage]) {
    let v = &mut strands[strand].passages;
    for (i, p) in ps.iter().enumerate() {
        v.insert(at + i, *p);
    }
}

/// Add a kink on segment `seg` (before passage `seg`) of strand `strand`.
pub fn r1_variant(
    d: &PlanarDiagram,
    strand: usize,
    seg: usize,
    kink: Kink,
) -> Result<PlanarDiagram, DiagramError> {
    let g = d.to_gauss()?;
    let c = next_id(&g);
    let mut strands = g.into_strands();
    let (r1, r2) = if kink.over_first { (Role::Over, Role::Under) } else { (Role::Under, Role::Over) };
    let ps = [
        GaussPassage { crossing: c, role: r1, sign: kink.sign },
        GaussPassage { crossing: c, role: r2, sign: kink.sign },
    ];
    insert(&mut strands, strand, seg, &ps);
    PlanarDiagram::from_gauss(&GaussCode::new(strands)?)
}

/// Faces of `d` whose corners sit at exactly the given crossings, one corner each.
fn has_face_on(d: &PlanarDiagram, crossings: &BTreeSet<VertexId>) -> bool {
    d.faces().raw_face_corners.iter().any(|cs| {
        cs.len() == crossings.len() && cs.iter().map(|c| c.0).collect::<BTreeSet<_>>() == *crossings
    })
}

/// Every R2 move creating a bigon between two segments, in a fixed order.
pub fn r2_variants(d: &PlanarDiagram) -> Result<Vec<PlanarDiagram>, DiagramError> {
    let g = d.to_gauss()?;
    let (a, b) = (next_id(&g), next_id(&g) + 1);
    let segs: Vec<(usize, usize)> = g
        .strands()
        .iter()
        .enumerate()
        .flat_map(|(i, s)| {
            let n = if s.ends.is_some() { s.passages.len() + 1 } else { s.passages.len().max(1) };
            (0..n).map(move |k| (i, k))
        })
        .collect();
    let want: BTreeSet<VertexId> = [a, b].into();
    let mut out = Vec::new();
    for (x, &sx) in segs.iter().enumerate() {
        for &sy in &segs[x + 1..] {
            for (sa, reversed) in [(Sign::Positive, false), (Sign::Positive, true), (Sign::Negative, false), (Sign::Negative, true)] {
                let sb = sa.flip();
                let over = [
                    GaussPassage { crossing: a, role: Role::Over, sign: sa },
                    GaussPassage { crossing: b, role: Role::Over, sign: sb },
                ];
                let mut under = [
                    GaussPassage { crossing: a, role: Role::Under, sign: sa },
                    GaussPassage { crossing: b, role: Role::Under, sign: sb },
                ];
                if reversed {
                    under.reverse();
                }
                for swap in [false, true] {
                    let (first, second) = if swap { (&under, &over) } else { (&over, &under) };
                    let mut strands = g.clone().into_strands();
                    // insert at the later position first so indices stay valid
                    if sx.0 == sy.0 {
                        insert(&mut strands, sy.0, sy.1, second);
                        insert(&mut strands, sx.0, sx.1, first);
                    } else {
                        insert(&mut strands, sx.0, sx.1, first);
                        insert(&mut strands, sy.0, sy.1, second);
                    }
                    let Ok(code) = GaussCode::new(strands) else { continue };
                    if let Ok(e) = PlanarDiagram::from_gauss(&code) {
                        if has_face_on(&e, &want) {
                            out.push(e);
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Every R3 move across a triangular face of `d`.
pub fn r3_variants(d: &PlanarDiagram) -> Result<Vec<PlanarDiagram>, DiagramError> {
    let g = d.to_gauss()?;
    let e = PlanarDiagram::from_gauss(&g)?;
    let faces = e.faces();
    let mut out = Vec::new();
    let mut seen_sets = BTreeSet::new();
    for (f, corners) in faces.raw_face_corners.iter().enumerate() {
        let set: BTreeSet<VertexId> = corners.iter().map(|c| c.0).collect();
        if corners.len() != 3 || set.len() != 3 || !seen_sets.insert(set.clone()) {
            continue;
        }
        if set.iter().any(|v| e.label(*v).is_some()) {
            continue;
        }
        // the three sides: consecutive passage pairs (strand, index of first)
        let mut sides = Vec::new();
        for (di, &face) in faces.raw_dart_face.iter().enumerate() {
            if face != f {
                continue;
            }
            let edge = faces.edges[di / 2];
            let s = &g.strands()[edge.strand];
            let len = s.passages.len();
            let first = match s.ends {
                Some(_) if edge.seg == 0 || edge.seg == len => None,
                Some(_) => Some(edge.seg - 1),
                None => Some((edge.seg + len - 1) % len),
            };
            match first {
                Some(k) => sides.push((edge.strand, k)),
                None => break,
            }
        }
        if sides.len() != 3 {
            continue;
        }
        let roles = |(s, k): (usize, usize)| {
            let ps = &g.strands()[s].passages;
            (ps[k].role, ps[(k + 1) % ps.len()].role)
        };
        if !sides.iter().any(|&sd| {
            let (r, q) = roles(sd);
            r == q
        }) {
            continue;
        }
        let mut strands = g.clone().into_strands();
        for &(s, k) in &sides {
            let len = strands[s].passages.len();
            strands[s].passages.swap(k, (k + 1) % len);
        }
        let Ok(code) = GaussCode::new(strands) else { continue };
        if let Ok(moved) = PlanarDiagram::from_gauss(&code) {
            if has_face_on(&moved, &set) {
                out.push(moved);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diagram(s: &str) -> PlanarDiagram {
        PlanarDiagram::from_gauss(&s.parse().unwrap()).unwrap()
    }

    #[test]
    fn kink_changes_writhe_by_its_sign() {
        let d = diagram("1-2:");
        let k = r1_variant(&d, 0, 0, Kink { sign: Sign::Negative, over_first: true }).unwrap();
        assert_eq!(k.writhe().unwrap(), -1);
        assert_eq!(k.classical_count(), 1);
    }

    #[test]
    fn r2_on_two_parallel_strands() {
        let d = diagram("1-2:; 3-4:");
        let vs = r2_variants(&d).unwrap();
        assert!(!vs.is_empty());
        for v in &vs {
            assert_eq!(v.classical_count(), 2);
            assert_eq!(v.writhe().unwrap(), 0);
        }
    }

    #[test]
    fn r3_on_a_triangle() {
        // three strands: a over b and c, b over c, arranged around a triangle
        let d = diagram("1-2: O1+ O2+; 3-4: U1+ O3+; 5-6: U2+ U3+");
        let r2 = r2_variants(&d).unwrap();
        assert!(!r2.is_empty());
        let r3 = r3_variants(&d).unwrap();
        for v in &r3 {
            assert_eq!(v.classical_count(), 3);
            assert_eq!(v.writhe().unwrap(), d.writhe().unwrap());
            assert_ne!(v.to_gauss().unwrap(), d.to_gauss().unwrap());
        }
    }
}
