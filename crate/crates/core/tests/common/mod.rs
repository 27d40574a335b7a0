#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use linkoid::curves3d::{Point, PolyCurveSet};
use linkoid::diagram::Role;
use linkoid::{GaussCode, Involution, PlanarDiagram, Sign};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn fixture(name: &str) -> PlanarDiagram {
    let text = std::fs::read_to_string(fixture_path(&format!("{name}.json"))).unwrap();
    PlanarDiagram::from_json(&text).unwrap()
}

/// Open linkoid fixtures.
pub const LINKOIDS: [&str; 6] = ["fix1", "fix2", "fix3", "ex4_10", "fix5", "fix6"];

pub fn inv(s: &str) -> Involution {
    s.parse().unwrap()
}

pub fn code(s: &str) -> GaussCode {
    s.parse().unwrap()
}

/// Integer Laurent polynomial as exponent -> coefficient, zeros dropped.
pub type Poly = BTreeMap<i32, i64>;

fn mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            *out.entry(ea + eb).or_default() += ca * cb;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

/// Kauffman bracket of a closed code by direct enumeration of all states.
///
/// Every passage has an in-node and an out-node; consecutive passages are
/// joined along the strand, and each crossing is smoothed either in the
/// orientation-respecting way (in(over)-out(under), in(under)-out(over)) or
/// the other way (in-in, out-out). The A-smoothing of a positive crossing is
/// the oriented one.
pub fn oracle_bracket(g: &GaussCode) -> Poly {
    assert!(g.is_closed());
    let mut passages = Vec::new();
    let mut next = Vec::new();
    let mut free = 0;
    for s in g.strands() {
        if s.passages.is_empty() {
            free += 1;
            continue;
        }
        let base = passages.len();
        let k = s.passages.len();
        for (i, p) in s.passages.iter().enumerate() {
            passages.push(*p);
            next.push(base + (i + 1) % k);
        }
    }
    let mut at: BTreeMap<u32, (usize, usize, Sign)> = BTreeMap::new();
    for (i, p) in passages.iter().enumerate() {
        let e = at.entry(p.crossing).or_insert((usize::MAX, usize::MAX, p.sign));
        if p.role == Role::Over {
            e.0 = i;
        } else {
            e.1 = i;
        }
    }
    let crossings: Vec<(usize, usize, Sign)> = at.into_values().collect();
    let d: Poly = [(2, -1), (-2, -1)].into();
    let mut total = Poly::new();
    let nodes = 2 * passages.len();
    for state in 0u64..(1 << crossings.len()) {
        let mut adj = vec![Vec::new(); nodes];
        let mut link = |a: usize, b: usize| {
            adj[a].push(b);
            adj[b].push(a);
        };
        for (i, &j) in next.iter().enumerate() {
            link(2 * i + 1, 2 * j);
        }
        let mut a_count = 0i32;
        for (k, &(o, u, sign)) in crossings.iter().enumerate() {
            let a_smoothing = state >> k & 1 == 0;
            let oriented = a_smoothing == (sign == Sign::Positive);
            if a_smoothing {
                a_count += 1;
            }
            if oriented {
                link(2 * o, 2 * u + 1);
                link(2 * u, 2 * o + 1);
            } else {
                link(2 * o, 2 * u);
                link(2 * o + 1, 2 * u + 1);
            }
        }
        let mut seen = vec![false; nodes];
        let mut loops = free;
        for s in 0..nodes {
            if seen[s] {
                continue;
            }
            loops += 1;
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(x) = stack.pop() {
                for &y in &adj[x] {
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        let b_count = crossings.len() as i32 - a_count;
        let mut term: Poly = [(a_count - b_count, 1)].into();
        for _ in 1..loops {
            term = mul(&term, &d);
        }
        for (e, c) in term {
            *total.entry(e).or_default() += c;
        }
    }
    total.retain(|_, c| *c != 0);
    total
}

/// Jones polynomial `(-A^3)^(-w) <K>` of a closed code.
pub fn oracle_jones(g: &GaussCode) -> Poly {
    let w = g.writhe();
    let sign = if w % 2 == 0 { 1 } else { -1 };
    oracle_bracket(g).into_iter().map(|(e, c)| (e - 3 * w, sign * c)).collect()
}

pub fn poly_of(p: &linkoid::LaurentPoly) -> Poly {
    p.terms().map(|(e, c)| (e, i64::try_from(*c.numer()).unwrap() / i64::try_from(*c.denom()).unwrap())).collect()
}

/// A random planar code with `strands` open strands and `k` crossings, labels `(2i+1, 2i+2)`.
pub fn random_planar(rng: &mut impl Rng, strands: usize, k: u32) -> PlanarDiagram {
    loop {
        let mut toks: Vec<(u32, char)> = (1..=k).flat_map(|c| [(c, 'O'), (c, 'U')]).collect();
        toks.shuffle(rng);
        let mut cuts: Vec<usize> = (0..strands - 1).map(|_| rng.random_range(0..=toks.len())).collect();
        cuts.sort_unstable();
        cuts.insert(0, 0);
        cuts.push(toks.len());
        let signs: Vec<char> = (0..k).map(|_| if rng.random_bool(0.5) { '+' } else { '-' }).collect();
        let text: Vec<String> = cuts
            .windows(2)
            .enumerate()
            .map(|(i, w)| {
                let ps: Vec<String> =
                    toks[w[0]..w[1]].iter().map(|&(c, r)| format!("{r}{c}{}", signs[c as usize - 1])).collect();
                format!("{}-{}: {}", 2 * i + 1, 2 * i + 2, ps.join(" "))
            })
            .collect();
        if let Ok(d) = PlanarDiagram::from_gauss(&code(&text.join("; "))) {
            return d;
        }
    }
}

/// Point of the standard trefoil parametrization at angle `t`.
pub fn trefoil_at(t: f64) -> Point {
    [t.sin() + 2.0 * (2.0 * t).sin(), t.cos() - 2.0 * (2.0 * t).cos(), -(3.0 * t).sin()]
}

fn d3(a: &Point, b: &Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

pub fn closed_trefoil(m: usize) -> PolyCurveSet {
    let tau = std::f64::consts::TAU;
    let mut pts: Vec<Point> = (0..m).map(|k| trefoil_at(tau * k as f64 / m as f64)).collect();
    pts.push(pts[0]);
    PolyCurveSet::new(vec![pts], None).unwrap()
}

/// The closed trefoil cut open so that the endpoint distance is `frac` of the diameter.
pub fn open_trefoil(m: usize, frac: f64) -> PolyCurveSet {
    let tau = std::f64::consts::TAU;
    let diameter = closed_trefoil(m).diameter();
    let end = (0..20000)
        .map(|k| tau * (1.0 - k as f64 / 20000.0))
        .find(|&t| d3(&trefoil_at(0.0), &trefoil_at(t)) >= frac * diameter)
        .unwrap();
    let mut pts: Vec<Point> = (0..m).map(|k| tau * k as f64 / m as f64).take_while(|&t| t < end).map(trefoil_at).collect();
    pts.push(trefoil_at(end));
    PolyCurveSet::new(vec![pts], None).unwrap()
}
