//! Virtual spectra: the closures of a linkoid over every closure permutation.
//!
//! Closures are grouped by the fingerprint `(components, Jones, normalized
//! arrow)`. Equal fingerprints do not prove equivalent closures, so a
//! deduplicated spectrum has at most as many entries as the true one.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::closure::{self, ClosedVirtualDiagram, ClosureError};
use crate::diagram::PlanarDiagram;
use crate::invariants::{self, InvariantError, InvariantReport};
use crate::involution::{enumerate_hn, Involution, InvolutionError};
use crate::{ArrowPoly, LaurentPoly, Q};

/// Largest strand count accepted.
pub const MAX_STRANDS: usize = 6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error("{0} strands exceed the limit of {MAX_STRANDS}")]
    TooLarge(usize),
    #[error("selector {0} is not supported by {1}")]
    UnsupportedSelector(Selector, &'static str),
    #[error("selector {0} is undefined on some entry")]
    Undefined(Selector),
    #[error("averages need a deduplicated spectrum")]
    NeedsDeduped,
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error(transparent)]
    Closure(#[from] ClosureError),
    #[error(transparent)]
    Involution(#[from] InvolutionError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// One entry per fingerprint.
    Deduped,
    /// One entry per closure permutation.
    Multiset,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Selector {
    Jones,
    Arrow,
    HeightBound,
    GenusBound,
    ComponentCount,
    OddWrithe,
}

impl Selector {
    pub const ALL: [Selector; 6] = [
        Selector::Jones,
        Selector::Arrow,
        Selector::HeightBound,
        Selector::GenusBound,
        Selector::ComponentCount,
        Selector::OddWrithe,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Selector::Jones => "jones",
            Selector::Arrow => "arrow",
            Selector::HeightBound => "height",
            Selector::GenusBound => "genus",
            Selector::ComponentCount => "components",
            Selector::OddWrithe => "odd_writhe",
        }
    }

    pub fn parse(s: &str) -> Option<Selector> {
        Selector::ALL.into_iter().find(|x| x.name() == s)
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fingerprint {
    pub component_count: usize,
    pub jones: LaurentPoly,
    /// Normalized arrow polynomial.
    pub arrow: ArrowPoly,
}

impl Fingerprint {
    fn key(&self) -> (usize, String, String) {
        (self.component_count, self.jones.to_string(), self.arrow.to_string())
    }
}

#[derive(Clone, Debug)]
pub struct SpectrumEntry {
    pub representative: Involution,
    /// Every closure permutation with this fingerprint, in enumeration order.
    pub class: Vec<Involution>,
    pub fingerprint: Fingerprint,
    /// The reduced closure of the representative.
    pub closure: ClosedVirtualDiagram,
    pub report: InvariantReport,
}

#[derive(Clone, Debug)]
pub struct Spectrum {
    pub entries: Vec<SpectrumEntry>,
    pub mode: Mode,
}

/// A value of a selector on one entry.
#[derive(Clone, Debug, PartialEq)]
pub enum SpectralValue {
    Integer(i64),
    Laurent(LaurentPoly),
    Arrow(ArrowPoly),
    /// The selector does not apply, e.g. odd writhe of a link.
    Undefined,
}

impl fmt::Display for SpectralValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectralValue::Integer(k) => write!(f, "{k}"),
            SpectralValue::Laurent(p) => write!(f, "{p}"),
            SpectralValue::Arrow(p) => write!(f, "{p}"),
            SpectralValue::Undefined => write!(f, "n/a"),
        }
    }
}

/// The mean of a selector over a spectrum.
#[derive(Clone, Debug, PartialEq)]
pub enum SpectralAverage {
    Rational(Q),
    Laurent(LaurentPoly),
    Arrow(ArrowPoly),
}

impl fmt::Display for SpectralAverage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectralAverage::Rational(q) => write!(f, "{q}"),
            SpectralAverage::Laurent(p) => write!(f, "{p}"),
            SpectralAverage::Arrow(p) => write!(f, "{p}"),
        }
    }
}

fn evaluate(d: &PlanarDiagram, sigma: &Involution) -> Result<SpectrumEntry, SpectrumError> {
    let g = d.to_gauss().map_err(ClosureError::from)?;
    let report = invariants::report(d, sigma)?;
    let arrow = invariants::normalized_arrow(&g, Some(sigma))?;
    let closure = closure::reduce_virtual(&closure::virtual_closure(d, sigma)?);
    Ok(SpectrumEntry {
        representative: sigma.clone(),
        class: vec![sigma.clone()],
        fingerprint: Fingerprint {
            component_count: report.component_count,
            jones: report.jones.clone(),
            arrow,
        },
        closure,
        report,
    })
}

/// Close `d` along every σ in `H_n`, in enumeration order.
pub fn virtual_spectrum(d: &PlanarDiagram, mode: Mode) -> Result<Spectrum, SpectrumError> {
    let n = d.open_strand_permutation().map_err(ClosureError::from)?.n();
    if n > MAX_STRANDS {
        return Err(SpectrumError::TooLarge(n));
    }
    let sigmas = enumerate_hn(n)?;
    let all: Vec<SpectrumEntry> =
        sigmas.par_iter().map(|s| evaluate(d, s)).collect::<Result<_, _>>()?;
    let entries = match mode {
        Mode::Multiset => all,
        Mode::Deduped => {
            let mut index: BTreeMap<(usize, String, String), usize> = BTreeMap::new();
            let mut out: Vec<SpectrumEntry> = Vec::new();
            for e in all {
                match index.get(&e.fingerprint.key()) {
                    Some(&i) => out[i].class.push(e.representative),
                    None => {
                        index.insert(e.fingerprint.key(), out.len());
                        out.push(e);
                    }
                }
            }
            out
        }
    };
    Ok(Spectrum { entries, mode })
}

impl SpectrumEntry {
    pub fn value(&self, f: Selector) -> SpectralValue {
        let r = &self.report;
        match f {
            Selector::Jones => SpectralValue::Laurent(r.jones.clone()),
            Selector::Arrow => SpectralValue::Arrow(self.fingerprint.arrow.clone()),
            Selector::HeightBound => SpectralValue::Integer(r.height_bound as i64),
            Selector::GenusBound => SpectralValue::Integer(r.genus_bound as i64),
            Selector::ComponentCount => SpectralValue::Integer(r.component_count as i64),
            Selector::OddWrithe => r.odd_writhe.map_or(SpectralValue::Undefined, |w| SpectralValue::Integer(w as i64)),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "sigma": self.representative.to_string(),
            "class": self.class.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            "fingerprint": {
                "components": self.fingerprint.component_count,
                "jones": self.fingerprint.jones.to_string(),
                "arrow": self.fingerprint.arrow.to_string(),
            },
            "virtual_crossings": self.closure.virtual_count(),
            "report": self.report.to_json(),
        })
    }
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Total number of closure permutations covered.
    pub fn class_total(&self) -> usize {
        self.entries.iter().map(|e| e.class.len()).sum()
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.entries.iter().map(SpectrumEntry::to_json).collect())
    }
}

/// Values of `f` over the entries, in enumeration order of their representatives.
pub fn spectral_values(s: &Spectrum, f: Selector) -> Vec<SpectralValue> {
    s.entries.iter().map(|e| e.value(f)).collect()
}

/// Exact mean of `f` over a deduplicated spectrum, one representative per entry.
pub fn avg_spectral(s: &Spectrum, f: Selector) -> Result<SpectralAverage, SpectrumError> {
    if s.mode != Mode::Deduped {
        return Err(SpectrumError::NeedsDeduped);
    }
    let values = spectral_values(s, f);
    let k = Q::from_integer(values.len() as i128);
    match f {
        Selector::Jones => {
            let ps: Vec<LaurentPoly> = values
                .into_iter()
                .map(|v| match v {
                    SpectralValue::Laurent(p) => p,
                    _ => unreachable!(),
                })
                .collect();
            Ok(SpectralAverage::Laurent(LaurentPoly::mean(&ps).expect("non-empty spectrum")))
        }
        Selector::Arrow => {
            let ps: Vec<ArrowPoly> = values
                .into_iter()
                .map(|v| match v {
                    SpectralValue::Arrow(p) => p,
                    _ => unreachable!(),
                })
                .collect();
            Ok(SpectralAverage::Arrow(ArrowPoly::mean(&ps).expect("non-empty spectrum")))
        }
        _ => {
            let mut sum = Q::from_integer(0);
            for v in values {
                match v {
                    SpectralValue::Integer(x) => sum += Q::from_integer(x as i128),
                    _ => return Err(SpectrumError::Undefined(f)),
                }
            }
            Ok(SpectralAverage::Rational(sum / k))
        }
    }
}

/// Minimum of an integer-valued selector, skipping entries where it is undefined.
pub fn min_spectral(s: &Spectrum, f: Selector) -> Result<i64, SpectrumError> {
    if matches!(f, Selector::Jones | Selector::Arrow) {
        return Err(SpectrumError::UnsupportedSelector(f, "min_spectral"));
    }
    spectral_values(s, f)
        .into_iter()
        .filter_map(|v| match v {
            SpectralValue::Integer(x) => Some(x),
            _ => None,
        })
        .min()
        .ok_or(SpectrumError::Undefined(f))
}

/// What a comparison of two spectra can conclude.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Comparison {
    /// Some closure type occurs in one spectrum and not the other.
    DistinctLinkoids,
    /// The fingerprints agree; this does not prove equivalence.
    Undecided,
}

/// Compare the fingerprints of two spectra, with their class sizes.
pub fn compare(a: &Spectrum, b: &Spectrum) -> Comparison {
    let keys = |s: &Spectrum| {
        let mut k: Vec<((usize, String, String), usize)> =
            s.entries.iter().map(|e| (e.fingerprint.key(), e.class.len())).collect();
        if s.mode == Mode::Multiset {
            let mut merged: BTreeMap<(usize, String, String), usize> = BTreeMap::new();
            for (key, n) in k {
                *merged.entry(key).or_default() += n;
            }
            k = merged.into_iter().collect();
        }
        k.sort();
        k
    };
    if keys(a) == keys(b) {
        Comparison::Undecided
    } else {
        Comparison::DistinctLinkoids
    }
}
