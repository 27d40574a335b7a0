//! Bracket and arrow state sums over Gauss codes.
//!
//! Every classical crossing contributes four nodes indexed by their
//! counterclockwise position (over-out at 0, over-in at 2; under-out at 1 for
//! a positive crossing and at 3 for a negative one). Endpoints contribute one
//! node per label. Segments join consecutive passages; the closure
//! permutation joins endpoint nodes. A state pairs the four nodes of every
//! crossing, after which every node has degree two and the loops of the
//! resulting 2-regular graph are exactly the closed curves of the smoothed
//! virtual closure.

use std::collections::HashMap;

use rayon::prelude::*;

use super::InvariantError;
use crate::diagram::{GaussCode, Role, Sign};
use crate::involution::Involution;
use crate::polynomial::{Arrow, ArrowMonomial, Laurent};
use crate::Q;

/// Largest crossing count accepted without an override.
pub const DEFAULT_MAX_CROSSINGS: usize = 28;

/// The active crossing limit: `LINKOID_MAX_CROSSINGS` if set, else the default.
pub fn max_crossings() -> usize {
    std::env::var("LINKOID_MAX_CROSSINGS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_CROSSINGS)
}

pub(crate) struct Network {
    crossings: usize,
    /// Sign of each crossing, in node-block order.
    signs: Vec<Sign>,
    /// External partner of every node (segment or closure link).
    ext: Vec<u32>,
    /// Closure partner of endpoint nodes; `u32::MAX` elsewhere.
    sigma: Vec<u32>,
    free_loops: usize,
}

fn role_pos(role: Role, sign: Sign, outgoing: bool) -> u32 {
    match (role, outgoing, sign) {
        (Role::Over, true, _) => 0,
        (Role::Over, false, _) => 2,
        (Role::Under, true, Sign::Positive) => 1,
        (Role::Under, false, Sign::Positive) => 3,
        (Role::Under, true, Sign::Negative) => 3,
        (Role::Under, false, Sign::Negative) => 1,
    }
}

impl Network {
    pub fn new(g: &GaussCode, sigma: Option<&Involution>) -> Result<Network, InvariantError> {
        let crossings = g.crossings();
        let limit = max_crossings();
        if crossings.len() > limit {
            return Err(InvariantError::TooManyCrossings { count: crossings.len(), limit });
        }
        let index: HashMap<u32, usize> = crossings.keys().enumerate().map(|(i, &c)| (c, i)).collect();
        let signs: Vec<Sign> = crossings.values().copied().collect();
        let c = signs.len();
        let labels = 2 * g.open_count();
        if labels > 0 {
            let s = sigma.ok_or(InvariantError::MissingSigma)?;
            if s.labels() != labels {
                return Err(InvariantError::SizeMismatch(labels / 2, s.n()));
            }
        }
        let nodes = 4 * c + labels;
        let mut ext = vec![u32::MAX; nodes];
        let mut sig = vec![u32::MAX; nodes];
        let node = |p: &crate::diagram::GaussPassage, outgoing: bool| {
            4 * index[&p.crossing] as u32 + role_pos(p.role, p.sign, outgoing)
        };
        let end_node = |label: u32| (4 * c) as u32 + label - 1;
        let mut free_loops = 0;
        let mut link = |a: u32, b: u32| {
            ext[a as usize] = b;
            ext[b as usize] = a;
        };
        for s in g.strands() {
            let ps = &s.passages;
            match s.ends {
                Some((foot, head)) => {
                    let mut prev = end_node(foot);
                    for p in ps {
                        link(prev, node(p, false));
                        prev = node(p, true);
                    }
                    link(prev, end_node(head));
                }
                None if ps.is_empty() => free_loops += 1,
                None => {
                    for k in 0..ps.len() {
                        link(node(&ps[k], true), node(&ps[(k + 1) % ps.len()], false));
                    }
                }
            }
        }
        if let Some(s) = sigma {
            if labels > 0 {
                for l in 1..=labels as u32 {
                    sig[end_node(l) as usize] = end_node(s.apply(l));
                }
            }
        }
        Ok(Network { crossings: c, signs, ext, sigma: sig, free_loops })
    }

    #[inline]
    fn internal(&self, state: u64, x: u32) -> u32 {
        let k = x as usize / 4;
        if k >= self.crossings {
            return self.sigma[x as usize];
        }
        let p = x % 4;
        let base = x - p;
        let q = if state >> k & 1 == 1 {
            // A-smoothing pairs positions (1, 2) and (3, 0)
            if p % 2 == 1 {
                (p + 1) % 4
            } else {
                (p + 3) % 4
            }
        } else {
            p ^ 1
        };
        base + q
    }

    fn disoriented(&self, state: u64, k: usize) -> bool {
        let a = state >> k & 1 == 1;
        // the A-smoothing is oriented at a positive crossing
        a != (self.signs[k] == Sign::Positive)
    }

    fn loop_count(&self, state: u64, seen: &mut [bool]) -> u32 {
        seen.iter_mut().for_each(|s| *s = false);
        let mut loops = self.free_loops as u32;
        for start in 0..seen.len() as u32 {
            if seen[start as usize] {
                continue;
            }
            loops += 1;
            let mut x = start;
            loop {
                seen[x as usize] = true;
                let y = self.internal(state, x);
                seen[y as usize] = true;
                x = self.ext[y as usize];
                if x == start {
                    break;
                }
            }
        }
        loops
    }

    /// Loop count and the K-monomial of a state.
    fn arrow_state(&self, state: u64, seen: &mut [bool], word: &mut Vec<i8>) -> (u32, Vec<(u32, u32)>) {
        seen.iter_mut().for_each(|s| *s = false);
        let mut loops = self.free_loops as u32;
        let mut ks: Vec<u32> = Vec::new();
        for start in 0..seen.len() as u32 {
            if seen[start as usize] {
                continue;
            }
            loops += 1;
            word.clear();
            let mut x = start;
            loop {
                seen[x as usize] = true;
                let y = self.internal(state, x);
                seen[y as usize] = true;
                let k = x as usize / 4;
                if k < self.crossings && self.disoriented(state, k) {
                    let (a, b) = (x % 4, y % 4);
                    word.push(if b == (a + 1) % 4 { 1 } else { -1 });
                }
                x = self.ext[y as usize];
                if x == start {
                    break;
                }
            }
            let i = reduced_half_length(word);
            if i > 0 {
                ks.push(i);
            }
        }
        ks.sort_unstable();
        let mut mono: Vec<(u32, u32)> = Vec::new();
        for i in ks {
            match mono.last_mut() {
                Some((j, e)) if *j == i => *e += 1,
                _ => mono.push((i, 1)),
            }
        }
        (loops, mono)
    }
}

/// Half the length of a cyclic cusp word after cancelling adjacent equal tags.
pub(crate) fn reduced_half_length(word: &[i8]) -> u32 {
    debug_assert!(word.len() % 2 == 0, "odd cusp count on a loop");
    let mut stack: Vec<i8> = Vec::with_capacity(word.len());
    for &t in word {
        if stack.last() == Some(&t) {
            stack.pop();
        } else {
            stack.push(t);
        }
    }
    let (mut lo, mut hi) = (0, stack.len());
    while hi - lo >= 2 && stack[lo] == stack[hi - 1] {
        lo += 1;
        hi -= 1;
    }
    ((hi - lo) / 2) as u32
}

const CHUNK_BITS: u32 = 12;

fn chunks(c: usize) -> (u64, u64) {
    let total = 1u64 << c;
    let size = 1u64 << CHUNK_BITS.min(c as u32);
    (total.div_ceil(size), size)
}

fn d_power(k: i64, cache: &mut HashMap<i64, Laurent<Q>>) -> Laurent<Q> {
    cache
        .entry(k)
        .or_insert_with(|| {
            if k >= 0 {
                Laurent::<Q>::loop_value().pow(k as u32)
            } else {
                // only reachable for the empty diagram
                Laurent::one()
            }
        })
        .clone()
}

/// `Σ_S A^{α(S)} d^{loops(S) - 1}`.
pub(crate) fn bracket(net: &Network) -> Laurent<Q> {
    let c = net.crossings;
    let (nchunks, size) = chunks(c);
    let total = 1u64 << c;
    let nodes = net.ext.len();
    let counts: HashMap<(u32, u32), u64> = (0..nchunks)
        .into_par_iter()
        .map(|ch| {
            let mut local: HashMap<(u32, u32), u64> = HashMap::new();
            let mut seen = vec![false; nodes];
            for state in ch * size..((ch + 1) * size).min(total) {
                let loops = net.loop_count(state, &mut seen);
                *local.entry((state.count_ones(), loops)).or_default() += 1;
            }
            local
        })
        .reduce(HashMap::new, merge);
    let mut keys: Vec<_> = counts.into_iter().collect();
    keys.sort_unstable();
    let mut cache = HashMap::new();
    let mut out = Laurent::zero();
    for ((na, loops), n) in keys {
        let alpha = 2 * na as i32 - c as i32;
        let term = d_power(loops as i64 - 1, &mut cache).shift(alpha).scale(&Q::from_integer(n as i128));
        out = &out + &term;
    }
    out
}

/// The arrow state sum; the code must be consistently oriented.
pub(crate) fn arrow(net: &Network) -> Arrow<Q> {
    let c = net.crossings;
    let (nchunks, size) = chunks(c);
    let total = 1u64 << c;
    let nodes = net.ext.len();
    type Key = (u32, u32, Vec<(u32, u32)>);
    let counts: HashMap<Key, u64> = (0..nchunks)
        .into_par_iter()
        .map(|ch| {
            let mut local: HashMap<Key, u64> = HashMap::new();
            let mut seen = vec![false; nodes];
            let mut word = Vec::new();
            for state in ch * size..((ch + 1) * size).min(total) {
                let (loops, mono) = net.arrow_state(state, &mut seen, &mut word);
                *local.entry((state.count_ones(), loops, mono)).or_default() += 1;
            }
            local
        })
        .reduce(HashMap::new, merge);
    let mut keys: Vec<_> = counts.into_iter().collect();
    keys.sort_unstable();
    let mut cache = HashMap::new();
    let mut out = Arrow::zero();
    for ((na, loops, mono), n) in keys {
        let alpha = 2 * na as i32 - c as i32;
        let base = d_power(loops as i64 - 1, &mut cache).shift(alpha);
        for (e, coef) in base.terms() {
            let m = ArrowMonomial::new(e, mono.iter().copied());
            out.add_term(m, coef * Q::from_integer(n as i128));
        }
    }
    out
}

fn merge<K: std::hash::Hash + Eq>(mut a: HashMap<K, u64>, b: HashMap<K, u64>) -> HashMap<K, u64> {
    if a.len() < b.len() {
        return merge(b, a);
    }
    for (k, v) in b {
        *a.entry(k).or_default() += v;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cusp_reduction() {
        assert_eq!(reduced_half_length(&[]), 0);
        assert_eq!(reduced_half_length(&[1, 1]), 0);
        assert_eq!(reduced_half_length(&[1, -1]), 1);
        assert_eq!(reduced_half_length(&[1, -1, -1, 1]), 0);
        assert_eq!(reduced_half_length(&[1, -1, 1, -1]), 2);
        assert_eq!(reduced_half_length(&[-1, 1, -1, -1, 1, -1]), 0);
        assert_eq!(reduced_half_length(&[-1, 1, -1, 1, 1, -1]), 1);
    }
}
