//! Fixed-point-free involutions on the endpoint labels `1..=2n`, their
//! enumeration, and the orbits of the dihedral group they generate.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Largest strand count accepted by [`enumerate_hn`].
pub const MAX_ENUMERATION_STRANDS: usize = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InvolutionError {
    #[error("labels must form 1..=2n with every label paired exactly once ({0})")]
    NotAnInvolution(String),
    #[error("involutions act on different label sets ({0} vs {1} strands)")]
    SizeMismatch(usize, usize),
    #[error("refusing to enumerate H_n for n = {0} (limit {MAX_ENUMERATION_STRANDS})")]
    TooLarge(usize),
    #[error("cannot parse cycle notation {0:?}")]
    Parse(String),
}

/// A fixed-point-free involution on `{1, ..., 2n}`, stored one-indexed.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Involution {
    // image[i - 1] = sigma(i)
    image: Vec<u32>,
}

impl Involution {
    /// Build from the image list `[sigma(1), ..., sigma(2n)]`.
    pub fn from_images(image: Vec<u32>) -> Result<Self, InvolutionError> {
        let m = image.len();
        if m % 2 != 0 {
            return Err(InvolutionError::NotAnInvolution(format!("{m} labels")));
        }
        for (i, &j) in image.iter().enumerate() {
            let i = i as u32 + 1;
            if j == 0 || j as usize > m {
                return Err(InvolutionError::NotAnInvolution(format!("label {j} out of range")));
            }
            if j == i {
                return Err(InvolutionError::NotAnInvolution(format!("{i} is a fixed point")));
            }
            if image[j as usize - 1] != i {
                return Err(InvolutionError::NotAnInvolution(format!("{i} -> {j} is not paired back")));
            }
        }
        Ok(Involution { image })
    }

    /// Build from a list of disjoint transpositions.
    pub fn from_pairs(pairs: &[(u32, u32)]) -> Result<Self, InvolutionError> {
        let m = pairs.len() * 2;
        let mut image = vec![0u32; m];
        for &(a, b) in pairs {
            for (x, y) in [(a, b), (b, a)] {
                if x == 0 || x as usize > m {
                    return Err(InvolutionError::NotAnInvolution(format!("label {x} out of range")));
                }
                if image[x as usize - 1] != 0 {
                    return Err(InvolutionError::NotAnInvolution(format!("label {x} used twice")));
                }
                image[x as usize - 1] = y;
            }
        }
        Self::from_images(image)
    }

    /// The standard pairing `(1 2)(3 4)...(2n-1 2n)`.
    pub fn standard(n: usize) -> Self {
        let pairs: Vec<(u32, u32)> = (0..n as u32).map(|i| (2 * i + 1, 2 * i + 2)).collect();
        Self::from_pairs(&pairs).expect("standard pairing is valid")
    }

    /// Number of strands `n` (the involution acts on `2n` labels).
    pub fn n(&self) -> usize {
        self.image.len() / 2
    }

    pub fn labels(&self) -> usize {
        self.image.len()
    }

    pub fn apply(&self, label: u32) -> u32 {
        self.image[label as usize - 1]
    }

    pub fn images(&self) -> &[u32] {
        &self.image
    }

    /// Transpositions `(a b)` with `a < b`, ordered by `a`.
    pub fn pairs(&self) -> Vec<(u32, u32)> {
        self.image
            .iter()
            .enumerate()
            .filter_map(|(i, &j)| {
                let i = i as u32 + 1;
                (i < j).then_some((i, j))
            })
            .collect()
    }

    fn check_same(&self, other: &Involution) -> Result<(), InvolutionError> {
        if self.labels() != other.labels() {
            return Err(InvolutionError::SizeMismatch(self.n(), other.n()));
        }
        Ok(())
    }
}

impl fmt::Display for Involution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.image.is_empty() {
            return write!(f, "()");
        }
        for (a, b) in self.pairs() {
            write!(f, "({a} {b})")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Involution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Involution{self}")
    }
}

impl FromStr for Involution {
    type Err = InvolutionError;

    /// Parses cycle notation such as `"(1 4)(2 3)"`; whitespace and commas
    /// inside a cycle are separators.
    fn from_str(s: &str) -> Result<Self, InvolutionError> {
        let bad = || InvolutionError::Parse(s.to_string());
        if s.trim() == "()" {
            return Ok(Involution { image: Vec::new() });
        }
        let mut pairs = Vec::new();
        let mut rest = s.trim();
        while !rest.is_empty() {
            let body = rest.strip_prefix('(').ok_or_else(bad)?;
            let close = body.find(')').ok_or_else(bad)?;
            let nums: Vec<u32> = body[..close]
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<u32>().map_err(|_| bad()))
                .collect::<Result<_, _>>()?;
            if nums.len() != 2 {
                return Err(bad());
            }
            pairs.push((nums[0], nums[1]));
            rest = body[close + 1..].trim_start();
        }
        if pairs.is_empty() {
            return Err(bad());
        }
        Self::from_pairs(&pairs)
    }
}

impl Serialize for Involution {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Involution {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `|H_n| = (2n - 1)!!`.
pub fn hn_size(n: usize) -> u64 {
    (1..=n as u64).map(|k| 2 * k - 1).product()
}

/// All fixed-point-free involutions on `2n` labels in lexicographic order of
/// their image lists, built by pairing the smallest unpaired label first.
pub fn enumerate_hn(n: usize) -> Result<Vec<Involution>, InvolutionError> {
    if n == 0 {
        return Err(InvolutionError::NotAnInvolution("n must be positive".into()));
    }
    if n > MAX_ENUMERATION_STRANDS {
        return Err(InvolutionError::TooLarge(n));
    }
    let m = 2 * n;
    let mut out = Vec::with_capacity(hn_size(n) as usize);
    let mut image = vec![0u32; m];
    fn rec(image: &mut Vec<u32>, out: &mut Vec<Involution>) {
        let Some(first) = image.iter().position(|&x| x == 0) else {
            out.push(Involution { image: image.clone() });
            return;
        };
        for partner in first + 1..image.len() {
            if image[partner] == 0 {
                image[first] = partner as u32 + 1;
                image[partner] = first as u32 + 1;
                rec(image, out);
                image[first] = 0;
                image[partner] = 0;
            }
        }
    }
    rec(&mut image, &mut out);
    Ok(out)
}

/// Partition of the labels into orbits of `<tau, sigma>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SegmentCyclePartition {
    /// Each orbit in traversal order, starting at its smallest label.
    pub orbits: Vec<Vec<u32>>,
}

impl SegmentCyclePartition {
    pub fn count(&self) -> usize {
        self.orbits.len()
    }

    /// Orbits as sorted label sets, for order-insensitive comparison.
    pub fn sorted_sets(&self) -> Vec<Vec<u32>> {
        let mut v: Vec<Vec<u32>> = self
            .orbits
            .iter()
            .map(|o| {
                let mut o = o.clone();
                o.sort_unstable();
                o
            })
            .collect();
        v.sort();
        v
    }
}

/// Orbits of the group generated by `tau` and `sigma`. Each orbit is walked by
/// alternating `tau`, `sigma`, `tau`, ... from its smallest label.
pub fn segment_cycles(tau: &Involution, sigma: &Involution) -> Result<SegmentCyclePartition, InvolutionError> {
    tau.check_same(sigma)?;
    let m = tau.labels();
    let mut seen = vec![false; m + 1];
    let mut orbits = Vec::new();
    for start in 1..=m as u32 {
        if seen[start as usize] {
            continue;
        }
        let mut orbit = Vec::new();
        let mut x = start;
        loop {
            seen[x as usize] = true;
            orbit.push(x);
            let y = tau.apply(x);
            seen[y as usize] = true;
            orbit.push(y);
            x = sigma.apply(y);
            if x == start {
                break;
            }
        }
        orbits.push(orbit);
    }
    Ok(SegmentCyclePartition { orbits })
}

fn compose(a: &[u32], b: &[u32]) -> Vec<u32> {
    // (a . b)(i) = a(b(i))
    b.iter().map(|&x| a[x as usize - 1]).collect()
}

fn fixed_points(p: &[u32]) -> usize {
    p.iter().enumerate().filter(|(i, &x)| *i as u32 + 1 == x).count()
}

/// Order of the permutation `tau . sigma`.
pub fn rotation_order(tau: &Involution, sigma: &Involution) -> Result<u64, InvolutionError> {
    tau.check_same(sigma)?;
    let p = compose(&tau.image, &sigma.image);
    let mut seen = vec![false; p.len()];
    let mut order = 1u64;
    for i in 0..p.len() {
        if seen[i] {
            continue;
        }
        let mut len = 0u64;
        let mut j = i;
        while !seen[j] {
            seen[j] = true;
            j = p[j] as usize - 1;
            len += 1;
        }
        order = order.lcm(&len);
    }
    Ok(order)
}

/// Number of segment cycles by Burnside's lemma over the dihedral group
/// `{(tau sigma)^k, sigma (tau sigma)^k : 0 <= k < m}`, `m` the order of `tau sigma`.
pub fn burnside_count(tau: &Involution, sigma: &Involution) -> Result<usize, InvolutionError> {
    let m = rotation_order(tau, sigma)?;
    let rot = compose(&tau.image, &sigma.image);
    let mut power: Vec<u32> = (1..=tau.labels() as u32).collect();
    let mut total = 0usize;
    for _ in 0..m {
        total += fixed_points(&power);
        total += fixed_points(&compose(&sigma.image, &power));
        power = compose(&rot, &power);
    }
    let group_order = 2 * m as usize;
    debug_assert_eq!(total % group_order, 0);
    Ok(total / group_order)
}
