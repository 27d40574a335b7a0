//! Orthogonal projection of curve sets to linkoid diagrams.

use std::collections::HashMap;

use thiserror::Error;

use super::{dist, Point, PolyCurveSet};
use crate::diagram::{GaussCode, GaussPassage, GaussStrand, PlanarDiagram, Role, Sign, UnionFind};

/// Regularity thresholds. `eps` defaults to `1e-9` times the diameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub eps: Option<f64>,
    pub eps_angle: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { eps: None, eps_angle: 1e-6 }
    }
}

impl Tolerances {
    pub(crate) fn resolve(&self, c: &PolyCurveSet) -> (f64, f64) {
        (self.eps.unwrap_or(1e-9 * c.diameter()), self.eps_angle)
    }
}

/// Why a direction does not give a regular projection. Segments are `(curve, index)`.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Irregularity {
    #[error("direction is not a unit vector")]
    NotUnit,
    #[error("segment {0:?} projects to a point")]
    DegenerateSegment((usize, usize)),
    #[error("segments {0:?} and {1:?} overlap in projection")]
    Overlap((usize, usize), (usize, usize)),
    #[error("segments {0:?} and {1:?} cross near a vertex")]
    CrossingNearVertex((usize, usize), (usize, usize)),
    #[error("segments {0:?} and {1:?} cross at an angle below tolerance")]
    ShallowCrossing((usize, usize), (usize, usize)),
    #[error("segments {0:?} and {1:?} meet in space")]
    Intersecting((usize, usize), (usize, usize)),
    #[error("two crossings within tolerance at segments {0:?} and {1:?}")]
    CloseCrossings((usize, usize), (usize, usize)),
    #[error("endpoint {0} lies on segment {1:?}")]
    EndpointNearStrand(u32, (usize, usize)),
}

type P2 = [f64; 2];

fn sub(a: P2, b: P2) -> P2 {
    [a[0] - b[0], a[1] - b[1]]
}
fn cross(a: P2, b: P2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}
fn dot(a: P2, b: P2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}
fn norm(a: P2) -> f64 {
    dot(a, a).sqrt()
}
fn lerp(a: P2, b: P2, t: f64) -> P2 {
    [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
}

fn point_segment_distance(p: P2, a: P2, b: P2) -> f64 {
    let r = sub(b, a);
    let t = (dot(sub(p, a), r) / dot(r, r)).clamp(0.0, 1.0);
    norm(sub(p, lerp(a, b, t)))
}

/// Orthonormal `(u, v)` with `u x v = xi`.
pub(crate) fn frame(xi: &Point) -> (Point, Point) {
    let a = if xi[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let c3 = |a: &Point, b: &Point| [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
    let u = c3(&a, xi);
    let n = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
    let u = [u[0] / n, u[1] / n, u[2] / n];
    let v = c3(xi, &u);
    (u, v)
}

struct Seg {
    curve: usize,
    idx: usize,
    p: P2,
    q: P2,
    dp: f64,
    dq: f64,
}

impl Seg {
    fn id(&self) -> (usize, usize) {
        (self.curve, self.idx)
    }
}

struct Crossing {
    at: P2,
    over: (usize, usize, f64),
    under: (usize, usize, f64),
    sign: Sign,
}

/// Project `c` along `xi` (viewer on the `+xi` side).
///
/// Crossings are numbered by first appearance along the curves in order.
/// Each curve becomes one strand with its own labels; components lying in
/// faces of other components are placed by casting rays in the plane.
pub fn project(c: &PolyCurveSet, xi: &Point, tol: &Tolerances) -> Result<PlanarDiagram, Irregularity> {
    let len = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
    if (len - 1.0).abs() > 1e-12 {
        return Err(Irregularity::NotUnit);
    }
    let (eps, eps_angle) = tol.resolve(c);
    let (u, v) = frame(xi);
    let d3 = |a: &Point, b: &Point| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let flat: Vec<Vec<P2>> = c.curves().iter().map(|cv| cv.iter().map(|p| [d3(p, &u), d3(p, &v)]).collect()).collect();
    let depth: Vec<Vec<f64>> = c.curves().iter().map(|cv| cv.iter().map(|p| d3(p, xi)).collect()).collect();

    let mut segs = Vec::new();
    for (ci, pts) in flat.iter().enumerate() {
        for k in 0..pts.len() - 1 {
            let s = Seg { curve: ci, idx: k, p: pts[k], q: pts[k + 1], dp: depth[ci][k], dq: depth[ci][k + 1] };
            if norm(sub(s.q, s.p)) < eps {
                return Err(Irregularity::DegenerateSegment(s.id()));
            }
            segs.push(s);
        }
    }

    // endpoints coinciding in space are joined: the segments ending there are adjacent
    let ends: Vec<(u32, usize, bool)> =
        c.labels().iter().enumerate().flat_map(|(i, &(a, b))| [(a, i, false), (b, i, true)]).collect();
    let end_point = |&(_, ci, last): &(u32, usize, bool)| {
        let cv = &c.curves()[ci];
        if last { cv[cv.len() - 1] } else { cv[0] }
    };
    let end_seg = |&(_, ci, last): &(u32, usize, bool)| (ci, if last { c.curves()[ci].len() - 2 } else { 0 });
    let mut joined: Vec<((usize, usize), (usize, usize))> = Vec::new();
    for (i, a) in ends.iter().enumerate() {
        for b in &ends[i + 1..] {
            if dist(&end_point(a), &end_point(b)) < eps {
                joined.push((end_seg(a), end_seg(b)));
            }
        }
    }
    let adjacent = |a: &Seg, b: &Seg| {
        (a.curve == b.curve && a.idx.abs_diff(b.idx) == 1)
            || joined.iter().any(|&(x, y)| (x, y) == (a.id(), b.id()) || (y, x) == (a.id(), b.id()))
    };

    for e in &ends {
        let (ci, k) = end_seg(e);
        let p = {
            let cv = &flat[ci];
            if e.2 { cv[cv.len() - 1] } else { cv[0] }
        };
        for s in &segs {
            let own = s.id() == (ci, k)
                || joined.iter().any(|&(x, y)| (x == (ci, k) && y == s.id()) || (y == (ci, k) && x == s.id()));
            if !own && point_segment_distance(p, s.p, s.q) < eps {
                return Err(Irregularity::EndpointNearStrand(e.0, s.id()));
            }
        }
    }

    let mut crossings: Vec<Crossing> = Vec::new();
    for (i, a) in segs.iter().enumerate() {
        for b in &segs[i + 1..] {
            let (r, w) = (sub(a.q, a.p), sub(b.q, b.p));
            let (lr, lw) = (norm(r), norm(w));
            let sin = cross(r, w) / (lr * lw);
            if adjacent(a, b) {
                if sin.abs() < eps_angle && dot(r, w) < 0.0 {
                    return Err(Irregularity::Overlap(a.id(), b.id()));
                }
                continue;
            }
            if sin.abs() < eps_angle {
                let near = [
                    point_segment_distance(a.p, b.p, b.q),
                    point_segment_distance(a.q, b.p, b.q),
                    point_segment_distance(b.p, a.p, a.q),
                    point_segment_distance(b.q, a.p, a.q),
                ];
                if near.iter().any(|&x| x < eps) {
                    return Err(Irregularity::Overlap(a.id(), b.id()));
                }
                // parallel segments can still cross at a tiny angle
                let d = sub(b.p, a.p);
                let denom = cross(r, w);
                if denom != 0.0 {
                    let t = cross(d, w) / denom;
                    let s = cross(d, r) / denom;
                    if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&s) {
                        return Err(Irregularity::ShallowCrossing(a.id(), b.id()));
                    }
                }
                continue;
            }
            let d = sub(b.p, a.p);
            let denom = cross(r, w);
            let t = cross(d, w) / denom;
            let s = cross(d, r) / denom;
            let (mt, ms) = (eps / lr, eps / lw);
            if t < -mt || t > 1.0 + mt || s < -ms || s > 1.0 + ms {
                continue;
            }
            if t < mt || t > 1.0 - mt || s < ms || s > 1.0 - ms {
                return Err(Irregularity::CrossingNearVertex(a.id(), b.id()));
            }
            let za = a.dp + t * (a.dq - a.dp);
            let zb = b.dp + s * (b.dq - b.dp);
            if (za - zb).abs() < eps {
                return Err(Irregularity::Intersecting(a.id(), b.id()));
            }
            let (over, under, ro, ru) =
                if za > zb { ((a.curve, a.idx, t), (b.curve, b.idx, s), r, w) } else { ((b.curve, b.idx, s), (a.curve, a.idx, t), w, r) };
            let sign = if cross(ro, ru) > 0.0 { Sign::Positive } else { Sign::Negative };
            crossings.push(Crossing { at: lerp(a.p, a.q, t), over, under, sign });
        }
    }
    for (i, x) in crossings.iter().enumerate() {
        for y in &crossings[i + 1..] {
            if norm(sub(x.at, y.at)) < eps {
                let seg = |z: &Crossing| (z.over.0, z.over.1);
                return Err(Irregularity::CloseCrossings(seg(x), seg(y)));
            }
        }
    }
    // passages along each curve, in order
    let mut along: Vec<Vec<(usize, f64, usize, Role)>> = vec![Vec::new(); c.n()];
    for (k, x) in crossings.iter().enumerate() {
        along[x.over.0].push((x.over.1, x.over.2, k, Role::Over));
        along[x.under.0].push((x.under.1, x.under.2, k, Role::Under));
    }
    for a in &mut along {
        a.sort_by(|x, y| (x.0, x.1).partial_cmp(&(y.0, y.1)).unwrap());
    }
    let mut id: HashMap<usize, u32> = HashMap::new();
    for a in &along {
        for &(_, _, k, _) in a {
            let next = id.len() as u32 + 1;
            id.entry(k).or_insert(next);
        }
    }
    let strands = along
        .iter()
        .zip(c.labels())
        .map(|(a, &ends)| GaussStrand {
            passages: a
                .iter()
                .map(|&(_, _, k, role)| GaussPassage { crossing: id[&k], role, sign: crossings[k].sign })
                .collect(),
            ends: Some(ends),
        })
        .collect();
    let code = GaussCode::new(strands).expect("projection yields a consistent code");
    let mut d = PlanarDiagram::from_gauss(&code).expect("projection is planar");
    place(&mut d, c, &flat, &along);
    Ok(d)
}

/// Record which face of the other components each component lies in.
fn place(d: &mut PlanarDiagram, c: &PolyCurveSet, flat: &[Vec<P2>], along: &[Vec<(usize, f64, usize, Role)>]) {
    let fs = d.faces();
    if fs.component_count < 2 {
        return;
    }
    let base = d.vertices.keys().filter(|v| d.label(**v).is_none()).max().map_or(0, |m| m + 1);
    let comp_of: Vec<usize> = c.labels().iter().map(|&(a, _)| fs.vertex_component[&(base + a)]).collect();
    let edge_of: HashMap<(usize, usize), usize> =
        fs.edges.iter().enumerate().map(|(i, e)| ((e.strand, e.seg), i)).collect();
    // raw face to the left (or right) of curve `ci` at segment `k`, parameter `t`
    let side_face = |ci: usize, k: usize, t: f64, left: bool| {
        let seg = along[ci].iter().filter(|x| (x.0, x.1) < (k, t)).count();
        let e = edge_of[&(ci, seg)];
        fs.raw_dart_face[2 * e + usize::from(!left)]
    };
    let raw_faces = fs.raw_face_corners.len();
    let outside = raw_faces;
    let mut uf = UnionFind::new(raw_faces + 1);
    let dir: P2 = [0.3f64.cos(), 0.3f64.sin()];
    for comp in 0..fs.component_count {
        let curves: Vec<usize> = (0..c.n()).filter(|&i| comp_of[i] == comp).collect();
        if curves.is_empty() {
            continue;
        }
        let (ci, j) = curves
            .iter()
            .flat_map(|&ci| (0..flat[ci].len()).map(move |j| (ci, j)))
            .max_by(|&(a, i), &(b, k)| dot(flat[a][i], dir).partial_cmp(&dot(flat[b][k], dir)).unwrap())
            .unwrap();
        let pts = &flat[ci];
        let p = pts[j];
        let own = if j == 0 {
            side_face(ci, 0, 0.0, true)
        } else if j == pts.len() - 1 {
            side_face(ci, j - 1, 1.0, true)
        } else {
            // left of the path at p is the counterclockwise sweep from the outgoing to the reversed incoming direction
            let out = sub(pts[j + 1], p);
            let back = sub(pts[j - 1], p);
            let angle = |x: P2| {
                let a = cross(out, x).atan2(dot(out, x));
                if a < 0.0 { a + std::f64::consts::TAU } else { a }
            };
            side_face(ci, j - 1, 1.0, angle(dir) < angle(back))
        };
        let mut best: Option<(f64, usize, usize, f64, bool)> = None;
        for (cj, other) in flat.iter().enumerate() {
            if comp_of[cj] == comp {
                continue;
            }
            for k in 0..other.len() - 1 {
                let (a, b) = (other[k], other[k + 1]);
                let w = sub(b, a);
                let denom = cross(dir, w);
                if denom == 0.0 {
                    continue;
                }
                let d0 = sub(a, p);
                let lambda = cross(d0, w) / denom;
                let s = cross(d0, dir) / denom;
                if lambda > 0.0 && (0.0..=1.0).contains(&s) && best.is_none_or(|x| lambda < x.0) {
                    best = Some((lambda, cj, k, s, cross(w, sub(p, a)) > 0.0));
                }
            }
        }
        let target = match best {
            Some((_, cj, k, s, left)) => side_face(cj, k, s, left),
            None => outside,
        };
        uf.union(own, target);
    }
    let class: Vec<usize> = (0..raw_faces).map(|f| uf.find(f)).collect();
    let corner_raw: HashMap<(u32, u8), usize> = fs
        .raw_face_corners
        .iter()
        .enumerate()
        .flat_map(|(f, cs)| cs.iter().map(move |&c| (c, f)))
        .collect();
    d.rebuild_placement(|corner| corner_raw.get(&corner).map(|&f| class[f]));
}
