//! Monte Carlo averages of closure invariants over projection directions.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, UnitSphere};
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use super::{dist, project, Irregularity, Point, PolyCurveSet};
use crate::closure;
use crate::diagram::PlanarDiagram;
use crate::invariants::{self, InvariantError};
use crate::involution::{burnside_count, enumerate_hn, Involution, InvolutionError};
use crate::polynomial::{ArrowMonomial, RealPoly, ToRealTerms};

/// Attempts per sample index before giving up on finding a regular direction.
pub const RESAMPLE_BUDGET: usize = 50;

/// Largest number of curves accepted by [`weighted_spectrum`] and [`spectral_measure`].
pub const MAX_CURVES: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Observable {
    Jones,
    /// Normalized arrow polynomial.
    Arrow,
    Height,
    Genus,
    OddWrithe,
    Affine,
}

impl Observable {
    pub const ALL: [Observable; 6] = [
        Observable::Jones,
        Observable::Arrow,
        Observable::Height,
        Observable::Genus,
        Observable::OddWrithe,
        Observable::Affine,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Observable::Jones => "jones",
            Observable::Arrow => "arrow",
            Observable::Height => "height",
            Observable::Genus => "genus",
            Observable::OddWrithe => "odd_writhe",
            Observable::Affine => "affine",
        }
    }

    pub fn parse(s: &str) -> Option<Observable> {
        let s = match s {
            "height_bound" => "height",
            "genus_bound" => "genus",
            other => other,
        };
        Observable::ALL.into_iter().find(|o| o.name() == s)
    }

    fn variable(self) -> &'static str {
        if self == Observable::Affine { "t" } else { "A" }
    }

    fn needs_one_component(self) -> bool {
        matches!(self, Observable::OddWrithe | Observable::Affine)
    }
}

impl std::fmt::Display for Observable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("at least one sample is required")]
    NoSamples,
    #[error("{0} curves exceed the limit of {MAX_CURVES}")]
    TooLarge(usize),
    #[error("size mismatch: {0} curves, permutation acts on {1}")]
    SizeMismatch(usize, usize),
    #[error("closure has {0} components; this invariant needs exactly one")]
    MultiComponent(usize),
    #[error("no regular direction for sample {index} after {attempts} attempts (last: {last})")]
    SamplingFailure { index: usize, attempts: usize, last: Irregularity },
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error(transparent)]
    Involution(#[from] InvolutionError),
}

/// Sampling parameters shared by all estimators.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SamplingConfig {
    pub samples: usize,
    pub seed: u64,
    pub tolerances: super::Tolerances,
}

impl SamplingConfig {
    pub fn new(samples: usize, seed: u64) -> Self {
        SamplingConfig { samples, seed, tolerances: Default::default() }
    }
}

fn stream(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// `n` independent uniform directions; direction `i` is the first draw of substream `i`.
pub fn sample_directions(n: usize, seed: u64) -> Result<Vec<Point>, MeasureError> {
    if n == 0 {
        return Err(MeasureError::NoSamples);
    }
    Ok((0..n).map(|i| UnitSphere.sample(&mut stream(seed, i))).collect())
}

struct Projections {
    dirs: Vec<Point>,
    diagrams: Vec<PlanarDiagram>,
    rejected: usize,
}

/// One regular projection per sample index; irregular draws are replaced by
/// the next draw of the same substream.
fn regular_projections(c: &PolyCurveSet, cfg: &SamplingConfig) -> Result<Projections, MeasureError> {
    if cfg.samples == 0 {
        return Err(MeasureError::NoSamples);
    }
    let found: Vec<Result<(Point, PlanarDiagram, usize), MeasureError>> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(cfg.seed, i);
            let mut last = Irregularity::NotUnit;
            for attempt in 0..RESAMPLE_BUDGET {
                let xi: Point = UnitSphere.sample(&mut rng);
                match project(c, &xi, &cfg.tolerances) {
                    Ok(d) => return Ok((xi, d, attempt)),
                    Err(e) => last = e,
                }
            }
            Err(MeasureError::SamplingFailure { index: i, attempts: RESAMPLE_BUDGET, last })
        })
        .collect();
    let mut out = Projections { dirs: Vec::new(), diagrams: Vec::new(), rejected: 0 };
    for r in found {
        let (xi, d, rejected) = r?;
        out.dirs.push(xi);
        out.diagrams.push(d);
        out.rejected += rejected;
    }
    Ok(out)
}

fn scalar(x: i64) -> BTreeMap<ArrowMonomial, f64> {
    if x == 0 {
        BTreeMap::new()
    } else {
        BTreeMap::from([(ArrowMonomial::a_power(0), x as f64)])
    }
}

/// Exact value of `f` on the closure of one projection, as real coefficients.
fn evaluate(d: &PlanarDiagram, sigma: &Involution, f: Observable) -> Result<BTreeMap<ArrowMonomial, f64>, InvariantError> {
    let g = d.to_gauss()?;
    Ok(match f {
        Observable::Jones => invariants::jones(&g, Some(sigma))?.to_real_terms(),
        Observable::Arrow => invariants::normalized_arrow(&g, Some(sigma))?.to_real_terms(),
        Observable::Height => scalar(invariants::height_bound(d, sigma)? as i64),
        Observable::Genus => {
            let c = closure::reduce_virtual(&closure::virtual_closure(d, sigma)?);
            scalar(invariants::genus_bound(&c) as i64)
        }
        Observable::OddWrithe => scalar(invariants::odd_writhe(&g, Some(sigma))?.value as i64),
        Observable::Affine => invariants::affine_index(&g, Some(sigma))?.polynomial.to_real_terms(),
    })
}

fn check_sigma(c: &PolyCurveSet, sigma: &Involution, f: Observable) -> Result<(), MeasureError> {
    if sigma.n() != c.n() {
        return Err(MeasureError::SizeMismatch(c.n(), sigma.n()));
    }
    if f.needs_one_component() {
        let k = burnside_count(&c.tau(), sigma)?;
        if k != 1 {
            return Err(MeasureError::MultiComponent(k));
        }
    }
    Ok(())
}

fn evaluate_all(
    p: &Projections,
    sigma: &Involution,
    f: Observable,
) -> Result<Vec<BTreeMap<ArrowMonomial, f64>>, MeasureError> {
    let vals: Result<Vec<_>, InvariantError> = p.diagrams.par_iter().map(|d| evaluate(d, sigma, f)).collect();
    Ok(vals?)
}

/// A sampled average with its per-direction values.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureEstimate {
    pub observable: Observable,
    /// `None` for the spectral measure, which mixes all closures.
    pub sigma: Option<Involution>,
    pub value: RealPoly,
    pub samples: usize,
    pub seed: u64,
    pub rejected: usize,
    pub directions: Vec<Point>,
    pub per_direction: Vec<BTreeMap<ArrowMonomial, f64>>,
}

impl MeasureEstimate {
    fn new(f: Observable, sigma: Option<Involution>, cfg: &SamplingConfig, p: &Projections, vals: Vec<BTreeMap<ArrowMonomial, f64>>) -> Self {
        MeasureEstimate {
            observable: f,
            sigma,
            value: RealPoly::from_samples(f.variable(), &vals),
            samples: cfg.samples,
            seed: cfg.seed,
            rejected: p.rejected,
            directions: p.dirs.clone(),
            per_direction: vals,
        }
    }

    /// JSON summary; `dump` adds every direction with its value.
    pub fn to_json(&self, dump: bool) -> Value {
        let mut v = json!({
            "observable": self.observable.name(),
            "sigma": self.sigma.as_ref().map(|s| s.to_string()),
            "value": self.value.mean_string(),
            "stderr": self.value.stderr_map(),
            "samples": self.samples,
            "seed": self.seed,
            "rejected": self.rejected,
        });
        if dump {
            let var = self.observable.variable();
            v["per_direction"] = self
                .directions
                .iter()
                .zip(&self.per_direction)
                .map(|(xi, t)| json!({"xi": xi, "value": RealPoly::from_samples(var, std::slice::from_ref(t)).mean_string()}))
                .collect();
        }
        v
    }
}

/// Average of `f` over closures along `sigma` of projections in uniformly random directions.
pub fn measure(c: &PolyCurveSet, sigma: &Involution, f: Observable, cfg: &SamplingConfig) -> Result<MeasureEstimate, MeasureError> {
    check_sigma(c, sigma, f)?;
    let p = regular_projections(c, cfg)?;
    let vals = evaluate_all(&p, sigma, f)?;
    Ok(MeasureEstimate::new(f, Some(sigma.clone()), cfg, &p, vals))
}

/// Mean endpoint distance `(1/2n) sum_i d(i, sigma(i))`.
fn weight(c: &PolyCurveSet, sigma: &Involution) -> f64 {
    let labels = sigma.labels() as u32;
    let total: f64 = (1..=labels)
        .map(|i| dist(&c.endpoint(i).unwrap(), &c.endpoint(sigma.apply(i)).unwrap()))
        .sum();
    total / labels as f64
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedEntry {
    pub sigma: Involution,
    pub weight: f64,
    pub estimate: MeasureEstimate,
}

/// Estimates for every closure permutation from one shared set of projections.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedSpectrum {
    pub entries: Vec<WeightedEntry>,
    pub w_min: f64,
}

impl WeightedSpectrum {
    pub fn to_json(&self, dump: bool) -> Value {
        json!({
            "w_min": self.w_min,
            "entries": self.entries.iter().map(|e| json!({
                "sigma": e.sigma.to_string(),
                "weight": e.weight,
                "estimate": e.estimate.to_json(dump),
            })).collect::<Vec<_>>(),
        })
    }

    /// Factor `w_min / w_sigma` of each entry; at `w_min = 0` the coincident closures get 1 and the rest 0.
    pub fn factors(&self) -> Vec<f64> {
        self.entries
            .iter()
            .map(|e| {
                if self.w_min == 0.0 {
                    if e.weight == 0.0 { 1.0 } else { 0.0 }
                } else {
                    self.w_min / e.weight
                }
            })
            .collect()
    }
}

fn weighted_parts(c: &PolyCurveSet, f: Observable, cfg: &SamplingConfig) -> Result<(WeightedSpectrum, Projections), MeasureError> {
    if c.n() > MAX_CURVES {
        return Err(MeasureError::TooLarge(c.n()));
    }
    let sigmas = enumerate_hn(c.n())?;
    for s in &sigmas {
        check_sigma(c, s, f)?;
    }
    let p = regular_projections(c, cfg)?;
    let mut entries = Vec::with_capacity(sigmas.len());
    for sigma in sigmas {
        let vals = evaluate_all(&p, &sigma, f)?;
        let estimate = MeasureEstimate::new(f, Some(sigma.clone()), cfg, &p, vals);
        entries.push(WeightedEntry { weight: weight(c, &sigma), sigma, estimate });
    }
    let w_min = entries.iter().map(|e| e.weight).fold(f64::INFINITY, f64::min);
    Ok((WeightedSpectrum { entries, w_min }, p))
}

/// Estimates of `f` for every closure permutation, with weights `w_sigma`.
pub fn weighted_spectrum(c: &PolyCurveSet, f: Observable, cfg: &SamplingConfig) -> Result<WeightedSpectrum, MeasureError> {
    Ok(weighted_parts(c, f, cfg)?.0)
}

/// `sum_sigma (w_min / w_sigma) F_sigma`, combined per direction before averaging.
pub fn spectral_measure(c: &PolyCurveSet, f: Observable, cfg: &SamplingConfig) -> Result<MeasureEstimate, MeasureError> {
    let (ws, p) = weighted_parts(c, f, cfg)?;
    let factors = ws.factors();
    let vals = (0..cfg.samples)
        .map(|k| {
            let mut sum: BTreeMap<ArrowMonomial, f64> = BTreeMap::new();
            for (e, &w) in ws.entries.iter().zip(&factors) {
                if w == 0.0 {
                    continue;
                }
                for (m, x) in &e.estimate.per_direction[k] {
                    *sum.entry(m.clone()).or_default() += w * x;
                }
            }
            sum
        })
        .collect();
    Ok(MeasureEstimate::new(f, None, cfg, &p, vals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::LaurentPoly;
    use std::f64::consts::TAU;

    fn trefoil(m: usize, gap: f64) -> PolyCurveSet {
        let pt = |t: f64| [t.sin() + 2.0 * (2.0 * t).sin(), t.cos() - 2.0 * (2.0 * t).cos(), -(3.0 * t).sin()];
        let end = TAU * (1.0 - gap);
        let mut pts: Vec<Point> = (0..m).map(|k| pt(end * k as f64 / m as f64)).collect();
        pts.push(if gap == 0.0 { pts[0] } else { pt(end) });
        PolyCurveSet::new(vec![pts], None).unwrap()
    }

    fn jones_poly(p: &str) -> BTreeMap<ArrowMonomial, f64> {
        p.parse::<LaurentPoly>().unwrap().to_real_terms()
    }

    #[test]
    fn directions_are_reproducible_and_spread() {
        let a = sample_directions(1000, 7).unwrap();
        assert_eq!(a, sample_directions(1000, 7).unwrap());
        assert_ne!(a, sample_directions(1000, 8).unwrap());
        let mean = a.iter().fold([0.0; 3], |s, p| [s[0] + p[0], s[1] + p[1], s[2] + p[2]]).map(|x| x / 1000.0);
        assert!((mean[0].powi(2) + mean[1].powi(2) + mean[2].powi(2)).sqrt() < 0.1);
        assert!(a.iter().all(|p| ((p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt() - 1.0).abs() < 1e-12));
        assert_eq!(sample_directions(0, 1), Err(MeasureError::NoSamples));
    }

    #[test]
    fn straight_segment_has_trivial_jones() {
        let c = PolyCurveSet::new(vec![vec![[0.0, 0.0, 0.0], [1.0, 2.0, 3.0]]], None).unwrap();
        let e = measure(&c, &c.tau(), Observable::Jones, &SamplingConfig::new(50, 3)).unwrap();
        assert_eq!(e.value.mean_string(), "1");
        assert_eq!(e.value.max_stderr(), 0.0);
    }

    #[test]
    fn closed_trefoil_is_constant() {
        let c = trefoil(48, 0.0);
        let e = measure(&c, &c.tau(), Observable::Jones, &SamplingConfig::new(60, 11)).unwrap();
        assert_eq!(e.value.max_stderr(), 0.0);
        let right = jones_poly("-A^16 + A^12 + A^4");
        let left = jones_poly("A^-4 + A^-12 - A^-16");
        assert!(e.per_direction.iter().all(|v| *v == e.per_direction[0]));
        assert!(e.per_direction[0] == right || e.per_direction[0] == left);
    }

    #[test]
    fn odd_writhe_needs_one_component() {
        let c = PolyCurveSet::new(
            vec![vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]], vec![[0.0, 1.0, 0.0], [1.0, 1.0, 1.0]]],
            None,
        )
        .unwrap();
        let cfg = SamplingConfig::new(5, 1);
        assert_eq!(measure(&c, &c.tau(), Observable::OddWrithe, &cfg), Err(MeasureError::MultiComponent(2)));
        assert!(measure(&c, &"(1 3)(2 4)".parse().unwrap(), Observable::OddWrithe, &cfg).is_ok());
    }

    #[test]
    fn coincident_closure_dominates_spectral_measure() {
        // curve 0 ends where curve 1 starts, and curve 1 ends where curve 0 starts
        let c = PolyCurveSet::new(
            vec![
                vec![[0.0, 0.0, 0.0], [1.0, 0.3, 0.5], [2.0, 0.0, 0.0]],
                vec![[2.0, 0.0, 0.0], [1.0, -0.4, -0.7], [0.0, 0.0, 0.0]],
            ],
            None,
        )
        .unwrap();
        let cfg = SamplingConfig::new(30, 5);
        let ws = weighted_spectrum(&c, Observable::Jones, &cfg).unwrap();
        assert_eq!(ws.entries.len(), 3);
        assert_eq!(ws.w_min, 0.0);
        let sigma: Involution = "(1 4)(2 3)".parse().unwrap();
        let zero: Vec<_> = ws.entries.iter().filter(|e| e.weight == 0.0).map(|e| e.sigma.clone()).collect();
        assert_eq!(zero, vec![sigma.clone()]);
        let sm = spectral_measure(&c, Observable::Jones, &cfg).unwrap();
        let m = measure(&c, &sigma, Observable::Jones, &cfg).unwrap();
        assert_eq!(sm.value, m.value);
    }
}
