//! Command-line front end for the `linkoid` library.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use linkoid::closure::{self, ClosedVirtualDiagram};
use linkoid::curves3d::{self, Observable, PolyCurveSet, SamplingConfig, Tolerances};
use linkoid::invariants;
use linkoid::involution::{self, enumerate_hn};
use linkoid::spectrum::{self, Mode, Selector, SpectralValue};
use linkoid::{Involution, PlanarDiagram};

/// Each verb and the library operations it exposes.
pub const VERBS: &[(&str, &[&str])] = &[
    ("validate", &["validate", "parse", "to_gauss", "strand_permutation"]),
    ("invariants", &["report", "writhe", "jones", "bracket", "arrow", "affine_index", "odd_writhe", "height_bound", "genus_bound"]),
    (
        "closure",
        &["virtual_closure", "strand_closure", "reduce_virtual", "gauss_closure", "is_link_type", "segment_cycles", "burnside_count"],
    ),
    ("spectrum", &["virtual_spectrum", "avg_spectral", "min_spectral", "spectral_values"]),
    ("measure", &["project", "sample_directions", "measure"]),
    ("weighted-spectrum", &["weighted_spectrum"]),
    ("spectral-measure", &["spectral_measure"]),
    ("enum-involutions", &["enumerate_hn"]),
    ("excise", &["excise_virtual"]),
];

#[derive(Parser, Debug)]
#[command(name = "linkoid", version, about = "Invariants of linkoids via virtual closure")]
pub struct Cli {
    /// Worker threads for parallel computations.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Crossing limit for state sums (overrides LINKOID_MAX_CROSSINGS).
    #[arg(long, global = true)]
    pub max_crossings: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct Sampling {
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Absolute regularity tolerance; default is 1e-9 times the diameter.
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, default_value_t = 1e-6)]
    pub eps_angle: f64,
    /// Include every direction and its value.
    #[arg(long)]
    pub dump_samples: bool,
}

impl Sampling {
    fn config(&self) -> SamplingConfig {
        SamplingConfig {
            samples: self.samples,
            seed: self.seed,
            tolerances: Tolerances { eps: self.eps, eps_angle: self.eps_angle },
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Deduped,
    Multiset,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a diagram file and list violations.
    Validate { file: PathBuf },
    /// Invariants of the closure of a linkoid along sigma.
    Invariants {
        file: PathBuf,
        #[arg(long, value_parser = parse_sigma)]
        sigma: Option<Involution>,
        /// One of jones, bracket, arrow, normalized_arrow, affine, odd_writhe, height, genus, writhe.
        #[arg(long)]
        invariant: Option<String>,
    },
    /// The virtual closure of a linkoid along sigma.
    Closure {
        file: PathBuf,
        /// Defaults to the strand permutation.
        #[arg(long, value_parser = parse_sigma)]
        sigma: Option<Involution>,
        /// Skip virtual crossing reduction.
        #[arg(long)]
        no_reduce: bool,
        /// Print the closed Gauss code and the link-type test instead of the diagram.
        #[arg(long)]
        gauss: bool,
    },
    /// Closures along every closure permutation.
    Spectrum {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "deduped")]
        mode: ModeArg,
        /// Report values, mean and minimum of one selector.
        #[arg(long)]
        invariant: Option<String>,
        #[arg(long)]
        csv: bool,
    },
    /// Average of an invariant over projections of open curves.
    Measure {
        file: PathBuf,
        #[arg(long, value_parser = parse_sigma)]
        sigma: Option<Involution>,
        #[arg(long, default_value = "jones")]
        invariant: String,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Measures for every closure permutation with their weights.
    WeightedSpectrum {
        file: PathBuf,
        #[arg(long, default_value = "jones")]
        invariant: String,
        #[command(flatten)]
        sampling: Sampling,
        #[arg(long)]
        csv: bool,
    },
    /// Weighted combination of the weighted spectrum.
    SpectralMeasure {
        file: PathBuf,
        #[arg(long, default_value = "jones")]
        invariant: String,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// All closure permutations on 2n labels, one per line.
    EnumInvolutions {
        n: usize,
        #[arg(long)]
        json: bool,
    },
    /// Cut virtual crossings out of a closed diagram.
    Excise { file: PathBuf },
}

fn parse_sigma(s: &str) -> Result<Involution, String> {
    s.parse::<Involution>().map_err(|e| e.to_string())
}

/// Failure of a parsed command.
#[derive(Debug)]
pub struct Failure(pub String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn diagram(path: &Path) -> Result<PlanarDiagram, Failure> {
    Ok(PlanarDiagram::from_json(&read(path)?)?)
}

fn curves(path: &Path) -> Result<PolyCurveSet, Failure> {
    let text = read(path)?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        Ok(PolyCurveSet::from_csv(&text)?)
    } else {
        Ok(PolyCurveSet::from_json(&text)?)
    }
}

fn observable(name: &str) -> Result<Observable, Failure> {
    Observable::parse(name).ok_or_else(|| Failure(format!("unknown invariant {name:?}")))
}

fn selector(name: &str) -> Result<Selector, Failure> {
    Selector::parse(name).ok_or_else(|| Failure(format!("unknown invariant {name:?}")))
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json") + "\n"
}

fn csv_line(fields: &[String]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(fields).expect("in-memory write");
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

fn invariant_value(d: &PlanarDiagram, sigma: &Involution, name: &str) -> Result<Value, Failure> {
    let g = d.to_gauss()?;
    let s = Some(sigma);
    Ok(match name {
        "jones" => json!(invariants::jones(&g, s)?.to_string()),
        "bracket" => json!(invariants::bracket(&g, s)?.to_string()),
        "arrow" => json!(invariants::arrow(&g, s)?.to_string()),
        "normalized_arrow" => json!(invariants::normalized_arrow(&g, s)?.to_string()),
        "affine" => {
            let a = invariants::affine_index(&g, s)?;
            json!({"polynomial": a.polynomial.to_string(), "weights": a.weights, "w_plus": a.w_plus})
        }
        "odd_writhe" => {
            let o = invariants::odd_writhe(&g, s)?;
            json!({"value": o.value, "odd_crossings": o.odd_crossings})
        }
        "height" | "height_bound" => json!(invariants::height_bound(d, sigma)?),
        "genus" | "genus_bound" => {
            let c = closure::reduce_virtual(&closure::virtual_closure(d, sigma)?);
            json!(invariants::genus_bound(&c))
        }
        "writhe" => json!(invariants::writhe(&invariants::oriented_closure(&g, s)?)),
        other => return Err(Failure(format!("unknown invariant {other:?}"))),
    })
}

/// Run a parsed command, returning its standard output.
pub fn execute(cli: Cli) -> Result<String, Failure> {
    const LIMIT_VAR: &str = "LINKOID_MAX_CROSSINGS";
    let previous = std::env::var_os(LIMIT_VAR);
    if let Some(k) = cli.max_crossings {
        std::env::set_var(LIMIT_VAR, k.to_string());
    }
    let result = match cli.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(Failure::from)
            .and_then(|pool| pool.install(|| dispatch(cli.command))),
        None => dispatch(cli.command),
    };
    if cli.max_crossings.is_some() {
        match previous {
            Some(v) => std::env::set_var(LIMIT_VAR, v),
            None => std::env::remove_var(LIMIT_VAR),
        }
    }
    result
}

fn dispatch(command: Command) -> Result<String, Failure> {
    match command {
        Command::Validate { file } => {
            let d = diagram(&file)?;
            let v = d.validate();
            let (gauss, tau) = if v.is_empty() {
                (Some(d.to_gauss()?.to_string()), Some(d.strand_permutation()?.to_string()))
            } else {
                (None, None)
            };
            Ok(pretty(&json!({
                "valid": v.is_empty(),
                "violations": v.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                "gauss": gauss,
                "strand_permutation": tau,
            })))
        }
        Command::Invariants { file, sigma, invariant } => {
            let d = diagram(&file)?;
            let sigma = match sigma {
                Some(s) => s,
                None => d.open_strand_permutation()?,
            };
            match invariant {
                Some(name) => Ok(pretty(&json!({
                    "sigma": sigma.to_string(),
                    "invariant": name,
                    "value": invariant_value(&d, &sigma, &name)?,
                }))),
                None => Ok(pretty(&invariants::report(&d, &sigma)?.to_json())),
            }
        }
        Command::Closure { file, sigma, no_reduce, gauss } => {
            let d = diagram(&file)?;
            let tau = d.open_strand_permutation()?;
            if gauss {
                let sigma = sigma.unwrap_or_else(|| tau.clone());
                return Ok(pretty(&json!({
                    "sigma": sigma.to_string(),
                    "gauss": closure::gauss_closure(&d.to_gauss()?, &sigma)?.to_string(),
                    "link_type": closure::is_link_type(&d, &sigma)?,
                    "components": involution::burnside_count(&tau, &sigma)?,
                    "segment_cycles": involution::segment_cycles(&tau, &sigma)?.sorted_sets(),
                })));
            }
            let c = match sigma {
                Some(sigma) => closure::virtual_closure(&d, &sigma)?,
                None => closure::strand_closure(&d)?,
            };
            let c = if no_reduce { c } else { closure::reduce_virtual(&c) };
            Ok(pretty(&c.to_json_value()))
        }
        Command::Spectrum { file, mode, invariant, csv } => {
            let d = diagram(&file)?;
            let mode = match mode {
                ModeArg::Deduped => Mode::Deduped,
                ModeArg::Multiset => Mode::Multiset,
            };
            let s = spectrum::virtual_spectrum(&d, mode)?;
            if csv {
                let mut out = csv_line(&["sigma", "class", "components", "jones", "arrow", "height", "genus", "odd_writhe"].map(String::from));
                for e in &s.entries {
                    let r = &e.report;
                    out += &csv_line(&[
                        e.representative.to_string(),
                        e.class.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" "),
                        r.component_count.to_string(),
                        r.jones.to_string(),
                        e.fingerprint.arrow.to_string(),
                        r.height_bound.to_string(),
                        r.genus_bound.to_string(),
                        r.odd_writhe.map_or(String::new(), |w| w.to_string()),
                    ]);
                }
                return Ok(out);
            }
            let Some(name) = invariant else {
                return Ok(pretty(&json!({"mode": format!("{mode:?}").to_lowercase(), "entries": s.to_json()})));
            };
            let f = selector(&name)?;
            let values: Vec<Value> = spectrum::spectral_values(&s, f)
                .iter()
                .map(|v| match v {
                    SpectralValue::Integer(k) => json!(k),
                    SpectralValue::Undefined => Value::Null,
                    other => json!(other.to_string()),
                })
                .collect();
            let avg = spectrum::avg_spectral(&s, f).map(|a| a.to_string()).ok();
            let min = spectrum::min_spectral(&s, f).ok();
            Ok(pretty(&json!({
                "invariant": f.name(),
                "sigmas": s.entries.iter().map(|e| e.representative.to_string()).collect::<Vec<_>>(),
                "values": values,
                "average": avg,
                "minimum": min,
            })))
        }
        Command::Measure { file, sigma, invariant, sampling } => {
            let c = curves(&file)?;
            let sigma = sigma.unwrap_or_else(|| c.tau());
            let e = curves3d::measure(&c, &sigma, observable(&invariant)?, &sampling.config())?;
            Ok(pretty(&e.to_json(sampling.dump_samples)))
        }
        Command::WeightedSpectrum { file, invariant, sampling, csv } => {
            let c = curves(&file)?;
            let ws = curves3d::weighted_spectrum(&c, observable(&invariant)?, &sampling.config())?;
            if csv {
                let mut out = csv_line(&["sigma", "weight", "factor", "value"].map(String::from));
                for (e, k) in ws.entries.iter().zip(ws.factors()) {
                    out += &csv_line(&[e.sigma.to_string(), e.weight.to_string(), k.to_string(), e.estimate.value.mean_string()]);
                }
                return Ok(out);
            }
            Ok(pretty(&ws.to_json(sampling.dump_samples)))
        }
        Command::SpectralMeasure { file, invariant, sampling } => {
            let c = curves(&file)?;
            let e = curves3d::spectral_measure(&c, observable(&invariant)?, &sampling.config())?;
            Ok(pretty(&e.to_json(sampling.dump_samples)))
        }
        Command::EnumInvolutions { n, json } => {
            let all = enumerate_hn(n)?;
            if json {
                return Ok(pretty(&json!(all.iter().map(|s| s.to_string()).collect::<Vec<_>>())));
            }
            Ok(all.iter().map(|s| format!("{s}\n")).collect())
        }
        Command::Excise { file } => {
            let c = ClosedVirtualDiagram::from_json(&read(&file)?)
                .map(ClosedVirtualDiagram::into_diagram)
                .or_else(|_| diagram(&file))?;
            let (l, sigma) = closure::excise_virtual(&c)?;
            Ok(pretty(&json!({"sigma": sigma.to_string(), "linkoid": l.to_json_value()})))
        }
    }
}

/// Parse `args` (including the program name) and run; returns the exit code and the text for stdout and stderr.
pub fn run<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return if code == 0 { (0, e.to_string(), String::new()) } else { (2, String::new(), e.to_string()) };
        }
    };
    match execute(cli) {
        Ok(out) => (0, out, String::new()),
        Err(Failure(msg)) => (1, pretty(&json!({"error": msg})), String::new()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_fields_are_quoted_when_needed() {
        let line = csv_line(&["(1 2)".into(), "A^2 + 1".into(), "a,b".into(), "say \"hi\"".into()]);
        assert_eq!(line, "(1 2),A^2 + 1,\"a,b\",\"say \"\"hi\"\"\"\n");
    }

    #[test]
    fn sigma_and_names_parse() {
        assert_eq!(parse_sigma("(1 4)(2 3)").unwrap().to_string(), "(1 4)(2 3)");
        assert!(parse_sigma("(1 1)").is_err());
        assert!(observable("height_bound").is_ok());
        assert!(selector("nonsense").is_err());
    }

    #[test]
    fn usage_errors_go_to_stderr() {
        let (code, out, err) = run(["linkoid", "enum-involutions"]);
        assert_eq!((code, out.is_empty()), (2, true));
        assert!(err.contains("Usage"));
    }
}
