//! Signed Gauss codes of open and closed strands.
//!
//! Text form: strands separated by `;`, each `foot-head:` (open) or `loop:`
//! (closed) followed by passages such as `O3+` or `U12-`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use super::Sign;
use crate::involution::{Involution, InvolutionError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Over,
    Under,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GaussPassage {
    pub crossing: u32,
    pub role: Role,
    pub sign: Sign,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussStrand {
    pub passages: Vec<GaussPassage>,
    /// `(foot label, head label)`; `None` when closed.
    pub ends: Option<(u32, u32)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct GaussCode {
    strands: Vec<GaussStrand>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GaussError {
    #[error("crossing {0} appears {1} time(s), expected 2")]
    CrossingCount(u32, usize),
    #[error("crossing {0} is not passed once over and once under")]
    OverUnder(u32),
    #[error("crossing {0} carries two different signs")]
    SignMismatch(u32),
    #[error("code has a closed component")]
    ClosedComponent,
    #[error("bad gauss code: {0}")]
    Parse(String),
    #[error(transparent)]
    Involution(#[from] InvolutionError),
}

impl GaussCode {
    pub fn new(strands: Vec<GaussStrand>) -> Result<GaussCode, GaussError> {
        let mut seen: BTreeMap<u32, Vec<&GaussPassage>> = BTreeMap::new();
        for s in &strands {
            for p in &s.passages {
                seen.entry(p.crossing).or_default().push(p);
            }
        }
        for (&c, ps) in &seen {
            if ps.len() != 2 {
                return Err(GaussError::CrossingCount(c, ps.len()));
            }
            if ps[0].role == ps[1].role {
                return Err(GaussError::OverUnder(c));
            }
            if ps[0].sign != ps[1].sign {
                return Err(GaussError::SignMismatch(c));
            }
        }
        Ok(GaussCode { strands })
    }

    pub fn strands(&self) -> &[GaussStrand] {
        &self.strands
    }

    pub fn into_strands(self) -> Vec<GaussStrand> {
        self.strands
    }

    /// Sign of every crossing.
    pub fn crossings(&self) -> BTreeMap<u32, Sign> {
        self.strands
            .iter()
            .flat_map(|s| s.passages.iter().map(|p| (p.crossing, p.sign)))
            .collect()
    }

    pub fn crossing_count(&self) -> usize {
        self.strands.iter().map(|s| s.passages.len()).sum::<usize>() / 2
    }

    pub fn writhe(&self) -> i32 {
        self.crossings().values().map(|s| s.value()).sum()
    }

    pub fn is_closed(&self) -> bool {
        self.strands.iter().all(|s| s.ends.is_none())
    }

    pub fn open_count(&self) -> usize {
        self.strands.iter().filter(|s| s.ends.is_some()).count()
    }

    pub fn strand_permutation(&self) -> Result<Involution, GaussError> {
        let pairs = self
            .strands
            .iter()
            .map(|s| s.ends.ok_or(GaussError::ClosedComponent))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Involution::from_pairs(&pairs)?)
    }

    /// Endpoint pairing of the open strands; closed strands are ignored.
    pub fn open_permutation(&self) -> Result<Involution, GaussError> {
        let pairs: Vec<(u32, u32)> = self.strands.iter().filter_map(|s| s.ends).collect();
        Ok(Involution::from_pairs(&pairs)?)
    }

    /// A representative independent of where each closed strand starts and
    /// of strand order: every closed strand is rotated to its smallest
    /// rotation and closed strands are sorted after the open ones.
    pub fn canonical(&self) -> GaussCode {
        let key = |p: &GaussPassage| (p.crossing, p.role, p.sign);
        let mut open: Vec<GaussStrand> = Vec::new();
        let mut closed: Vec<GaussStrand> = Vec::new();
        for s in &self.strands {
            if s.ends.is_some() {
                open.push(s.clone());
                continue;
            }
            let n = s.passages.len();
            let best = (0..n.max(1))
                .min_by_key(|&r| (0..n).map(|i| key(&s.passages[(r + i) % n])).collect::<Vec<_>>())
                .unwrap_or(0);
            let passages = (0..n).map(|i| s.passages[(best + i) % n]).collect();
            closed.push(GaussStrand { passages, ends: None });
        }
        closed.sort_by_key(|s| s.passages.iter().map(key).collect::<Vec<_>>());
        open.extend(closed);
        GaussCode { strands: open }
    }

    /// Over and under exchanged, every sign flipped.
    pub fn mirror(&self) -> GaussCode {
        let strands = self
            .strands
            .iter()
            .map(|s| GaussStrand {
                passages: s
                    .passages
                    .iter()
                    .map(|p| GaussPassage {
                        crossing: p.crossing,
                        role: match p.role {
                            Role::Over => Role::Under,
                            Role::Under => Role::Over,
                        },
                        sign: p.sign.flip(),
                    })
                    .collect(),
                ends: s.ends,
            })
            .collect();
        GaussCode { strands }
    }
}

impl fmt::Display for GaussPassage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = if self.role == Role::Over { 'O' } else { 'U' };
        let s = if self.sign == Sign::Positive { '+' } else { '-' };
        write!(f, "{r}{}{s}", self.crossing)
    }
}

impl fmt::Display for GaussCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.strands.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            match s.ends {
                Some((a, b)) => write!(f, "{a}-{b}:")?,
                None => write!(f, "loop:")?,
            }
            for p in &s.passages {
                write!(f, " {p}")?;
            }
        }
        Ok(())
    }
}

fn parse_passage(tok: &str) -> Result<GaussPassage, GaussError> {
    let bad = || GaussError::Parse(format!("passage {tok:?}"));
    let mut chars = tok.chars();
    let role = match chars.next() {
        Some('O') | Some('o') => Role::Over,
        Some('U') | Some('u') => Role::Under,
        _ => return Err(bad()),
    };
    let rest = chars.as_str();
    let (num, sign) = match rest.chars().last() {
        Some('+') => (&rest[..rest.len() - 1], Sign::Positive),
        Some('-') => (&rest[..rest.len() - 1], Sign::Negative),
        _ => return Err(bad()),
    };
    let crossing = num.parse().map_err(|_| bad())?;
    Ok(GaussPassage { crossing, role, sign })
}

impl FromStr for GaussCode {
    type Err = GaussError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut strands = Vec::new();
        for part in s.split(';') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (head, body) = part
                .split_once(':')
                .ok_or_else(|| GaussError::Parse(format!("missing ':' in {part:?}")))?;
            let head = head.trim();
            let ends = if head == "loop" {
                None
            } else {
                let (a, b) = head
                    .split_once('-')
                    .ok_or_else(|| GaussError::Parse(format!("bad strand ends {head:?}")))?;
                let a = a.trim().parse().map_err(|_| GaussError::Parse(format!("label {a:?}")))?;
                let b = b.trim().parse().map_err(|_| GaussError::Parse(format!("label {b:?}")))?;
                Some((a, b))
            };
            let passages =
                body.split_whitespace().map(parse_passage).collect::<Result<Vec<_>, _>>()?;
            strands.push(GaussStrand { passages, ends });
        }
        GaussCode::new(strands)
    }
}

impl Serialize for GaussCode {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GaussCode {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
