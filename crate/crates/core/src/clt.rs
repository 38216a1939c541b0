//! CLT experiments: drift and variance estimation, normalized observables,
//! Kolmogorov–Smirnov checks, zero-variance detection and cross-component
//! agreement.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::actions::{ActionSpec, IsometricAction};
use crate::error::{Error, Result};
use crate::graph::{AutomatonDocument, GraphStructure, Path};
use crate::markov::{prefix_distribution, DEFAULT_BUDGET};
use crate::sampler::{enumerate_sphere, par_samples, SphereSampler};
use crate::spectral::{Diagnosis, SpectralData};
use crate::stats::{self, ks_statistic, Moments};

/// Plateau tolerance of the zero-variance probe.
pub const PLATEAU_TOLERANCE: f64 = 1e-9;
/// `σ̂²` at or below this never counts as positive.
pub const VARIANCE_FLOOR: f64 = 1e-9;
/// Lengths up to this are estimated by full enumeration.
pub const EXACT_MAX_LEN: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AutomatonSource {
    Path(String),
    Inline(AutomatonDocument),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Lengths {
    One(usize),
    Many(Vec<usize>),
}

impl Lengths {
    pub fn to_vec(&self) -> Vec<usize> {
        match self {
            Lengths::One(n) => vec![*n],
            Lengths::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Mc,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Observable {
    Displacement,
    Translation,
}

impl Observable {
    pub fn name(self) -> &'static str {
        match self {
            Observable::Displacement => "displacement",
            Observable::Translation => "translation",
        }
    }
}

fn default_samples() -> usize {
    10_000
}

fn default_observables() -> Vec<Observable> {
    vec![Observable::Displacement]
}

fn default_true() -> bool {
    true
}

fn default_probe_maxlen() -> usize {
    8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub automaton: AutomatonSource,
    pub action: ActionSpec,
    pub n: Lengths,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default = "default_observables")]
    pub observables: Vec<Observable>,
    #[serde(default)]
    pub per_component: bool,
    /// Report prefix strata when the structure has period `p > 1`.
    #[serde(default = "default_true")]
    pub stratify: bool,
    #[serde(default = "default_probe_maxlen")]
    pub probe_maxlen: usize,
    /// Record the fraction of samples with `(go, g⁻¹o)_o > ½√n`.
    #[serde(default)]
    pub gromov_check: bool,
    #[serde(default)]
    pub budget: Option<u64>,
}

impl ExperimentConfig {
    pub fn new(automaton: AutomatonSource, action: ActionSpec, n: usize, samples: usize, seed: u64) -> Self {
        ExperimentConfig {
            automaton,
            action,
            n: Lengths::One(n),
            samples,
            seed: Some(seed),
            mode: Mode::Mc,
            observables: default_observables(),
            per_component: false,
            stratify: true,
            probe_maxlen: default_probe_maxlen(),
            gromov_check: false,
            budget: None,
        }
    }

    pub fn from_graph(graph: &GraphStructure, action: ActionSpec, n: usize, samples: usize, seed: u64) -> Self {
        Self::new(AutomatonSource::Inline(graph.to_document()), action, n, samples, seed)
    }

    /// Loads the automaton, resolving relative paths against `base`.
    pub fn load_automaton(&self, base: Option<&std::path::Path>) -> Result<GraphStructure> {
        match &self.automaton {
            AutomatonSource::Inline(doc) => GraphStructure::from_document(doc),
            AutomatonSource::Path(p) => {
                let path = match base {
                    Some(b) => b.join(p),
                    None => p.into(),
                };
                let text = std::fs::read_to_string(&path).map_err(|source| Error::Io {
                    path: path.display().to_string(),
                    source,
                })?;
                crate::graph::load_graph_structure(&text)
            }
        }
    }
}

/// `φ(g) = (d(o,go) − ℓ‖g‖)/√‖g‖`.
pub fn normalized_value(graph: &GraphStructure, path: &Path, action: &IsometricAction, drift: f64) -> Result<f64> {
    if path.is_empty() {
        return Err(Error::InvalidInput("normalized value of the empty path".into()));
    }
    let d = action.displacement(&path.word(graph))?;
    let n = path.len() as f64;
    Ok((d - drift * n) / n.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriftVariance {
    pub drift: f64,
    pub variance: f64,
    pub drift_se: f64,
    pub variance_se: f64,
    pub exact: bool,
    pub samples: usize,
}

impl DriftVariance {
    fn from_moments(m: &Moments, n: usize, exact: bool) -> Self {
        let nf = n as f64;
        DriftVariance {
            drift: m.mean / nf,
            variance: m.variance / nf,
            drift_se: if exact { 0.0 } else { (m.variance / m.count as f64).sqrt() / nf },
            variance_se: m.variance_se / nf,
            exact,
            samples: m.count,
        }
    }
}

/// `ℓ̂ = mean/n`, `σ̂² = var/n` of displacement over the sphere of radius `n`:
/// exact by enumeration for `n ≤ 6`, Monte Carlo otherwise.
pub fn estimate_drift_variance(
    graph: &GraphStructure,
    action: &IsometricAction,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<DriftVariance> {
    if n < 2 {
        return Err(Error::InvalidInput("n must be at least 2".into()));
    }
    if n <= EXACT_MAX_LEN {
        let values = enumerate_sphere(graph, n, DEFAULT_BUDGET)?
            .map(|p| action.displacement(&p.word(graph)))
            .collect::<Result<Vec<f64>>>()?;
        if values.is_empty() {
            return Err(Error::EmptySphere(n));
        }
        return Ok(DriftVariance::from_moments(&stats::population_moments(&values), n, true));
    }
    let sampler = SphereSampler::new(graph, n);
    let values = par_samples(samples, seed, |rng, _| {
        let p = sampler.sample(rng, n)?;
        action.displacement(&p.word(graph))
    })?;
    Ok(DriftVariance::from_moments(&stats::moments(&values), n, false))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Zero,
    Positive,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroVarianceProbe {
    pub maxlen: usize,
    /// Exact drift `mean(d)/maxlen` over the sphere of radius `maxlen`.
    pub drift: f64,
    /// `D(n) = max_{Sₙ} |d(o,go) − ℓ̂n|` for `n = 1..=maxlen`.
    pub defects: Vec<f64>,
    pub plateau: bool,
    pub verdict: Verdict,
    /// Path maximizing the defect at `maxlen` (smallest displacement, then
    /// first in enumeration order).
    pub witness: Option<String>,
    pub certified_range: usize,
}

/// Exhaustive defect profile up to `maxlen`; `zero` iff `D(maxlen) = D(maxlen−2)`.
pub fn zero_variance_probe(
    graph: &GraphStructure,
    action: &IsometricAction,
    maxlen: usize,
    budget: u64,
) -> Result<ZeroVarianceProbe> {
    if maxlen < 3 {
        return Err(Error::InvalidInput("probe length must be at least 3".into()));
    }
    let spheres: Vec<Vec<(Path, f64)>> = (0..=maxlen)
        .map(|n| {
            enumerate_sphere(graph, n, budget)?
                .map(|p| {
                    let d = action.displacement(&p.word(graph))?;
                    Ok((p, d))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let top = &spheres[maxlen];
    if top.is_empty() {
        return Err(Error::EmptySphere(maxlen));
    }
    let ds: Vec<f64> = top.iter().map(|(_, d)| *d).collect();
    let drift = stats::mean(&ds) / maxlen as f64;
    let mut defects = Vec::with_capacity(maxlen);
    let mut witness = None;
    for (n, sphere) in spheres.iter().enumerate().skip(1) {
        let mut best: Option<(f64, f64, &Path)> = None;
        for (p, d) in sphere {
            let defect = (d - drift * n as f64).abs();
            let better = match best {
                None => true,
                Some((bd, bdisp, _)) => defect > bd + 1e-12 || ((defect - bd).abs() <= 1e-12 && *d < bdisp),
            };
            if better {
                best = Some((defect, *d, p));
            }
        }
        defects.push(best.map_or(0.0, |b| b.0));
        if n == maxlen {
            witness = best.map(|b| b.2.format(graph));
        }
    }
    let plateau = (defects[maxlen - 1] - defects[maxlen - 3]).abs() <= PLATEAU_TOLERANCE;
    Ok(ZeroVarianceProbe {
        maxlen,
        drift,
        plateau,
        verdict: if plateau { Verdict::Zero } else { Verdict::Positive },
        witness: if plateau { None } else { witness },
        defects,
        certified_range: maxlen,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObservableReport {
    pub observable: Observable,
    pub drift: f64,
    pub variance: f64,
    pub drift_se: f64,
    pub variance_se: f64,
    /// KS distance of `(x − ℓ̂n)/√n` to `N(0, σ̂²)` (point mass if the verdict is zero),
    /// with `ℓ̂, σ̂²` taken from the reference observable.
    pub ks: f64,
    pub reference: Observable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stratum {
    pub prefix: String,
    pub end: usize,
    /// Limit mass from the prefix distribution.
    pub limit_mass: f64,
    /// Exact conditional mass `c(end, n−r)/c(v₀, n)`.
    pub exact_mass: f64,
    pub empirical: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentEstimate {
    pub vertices: Vec<usize>,
    #[serde(flatten)]
    pub estimate: DriftVariance,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentAgreement {
    pub components: Vec<ComponentEstimate>,
    /// Largest `|Δℓ̂| / (2·combined SE)` and `|Δσ̂²| / (2·combined SE)` over pairs.
    pub drift_ratio: f64,
    pub variance_ratio: f64,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GromovCheck {
    pub threshold: f64,
    pub fraction_above: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub n: usize,
    pub samples: usize,
    pub observables: Vec<ObservableReport>,
    pub verdict: Verdict,
    /// `max |d(o,go) − ℓ̂n|` over the drawn samples.
    pub max_defect: f64,
    pub ks_convention: &'static str,
    pub strata: Option<Vec<Stratum>>,
    pub components: Option<ComponentAgreement>,
    pub gromov: Option<GromovCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CltReport {
    pub action: String,
    pub group: String,
    pub mode: Mode,
    pub seed: Option<u64>,
    pub lambda: f64,
    pub period: usize,
    pub diagnosis: Diagnosis,
    pub probe: ZeroVarianceProbe,
    pub runs: Vec<RunReport>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleRow {
    pub index: usize,
    pub length: usize,
    pub observable: Observable,
    pub normalized: f64,
}

pub struct ExperimentOutput {
    pub report: CltReport,
    pub rows: Vec<SampleRow>,
}

pub const CSV_HEADER: &str = "index,length,observable,normalized";

pub fn write_csv<W: Write>(rows: &[SampleRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(w, "{},{},{},{}", r.index, r.length, r.observable.name(), r.normalized)?;
    }
    Ok(())
}

#[derive(Debug, Clone)]
struct Sample {
    displacement: f64,
    translation: Option<f64>,
    gromov: Option<f64>,
    prefix: Vec<usize>,
}

fn observe(
    graph: &GraphStructure,
    action: &IsometricAction,
    path: &Path,
    translation: bool,
    gromov: bool,
    prefix_len: usize,
) -> Result<Sample> {
    let w = path.word(graph);
    let displacement = action.displacement(&w)?;
    let translation = if translation {
        Some(action.translation_length(&w)?.value)
    } else {
        None
    };
    let gromov = if gromov {
        let inv = action.group().inverse_word(&w)?;
        Some(action.gromov_product(&w, &inv)?)
    } else {
        None
    };
    Ok(Sample {
        displacement,
        translation,
        gromov,
        prefix: path.edges[..prefix_len].to_vec(),
    })
}

/// Derived seed for the `i`-th maximal component.
fn component_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_add((i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Runs the full pipeline: spectral data, zero-variance probe, sampling and
/// statistics for every requested length.
pub fn run_experiment(config: &ExperimentConfig, base: Option<&std::path::Path>) -> Result<ExperimentOutput> {
    let graph = config.load_automaton(base).map_err(Error::at("load"))?;
    run_experiment_on(&graph, config)
}

pub fn run_experiment_on(graph: &GraphStructure, config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let budget = config.budget.unwrap_or(DEFAULT_BUDGET);
    let action = IsometricAction::new(&config.action, graph.group()).map_err(Error::at("action"))?;
    let spectral = SpectralData::compute(graph).map_err(Error::at("spectral"))?;
    let probe = zero_variance_probe(graph, &action, config.probe_maxlen, budget).map_err(Error::at("probe"))?;
    let seed = match (config.mode, config.seed) {
        (Mode::Mc, None) => return Err(Error::InvalidInput("a seed is required for Monte Carlo runs".into())),
        (_, s) => s,
    };
    let lengths = config.n.to_vec();
    if lengths.is_empty() || lengths.contains(&0) {
        return Err(Error::InvalidInput("lengths must be positive".into()));
    }
    let want_translation = config.observables.contains(&Observable::Translation);
    let want_displacement = config.observables.contains(&Observable::Displacement) || config.observables.is_empty();
    let max_n = *lengths.iter().max().expect("nonempty");
    let sampler = match config.mode {
        Mode::Mc => Some(SphereSampler::new(graph, max_n)),
        Mode::Exact => None,
    };
    let mut runs = Vec::new();
    let mut rows = Vec::new();
    for &n in &lengths {
        let r = if config.stratify && spectral.period > 1 { n % spectral.period } else { 0 };
        let samples: Vec<Sample> = match &sampler {
            Some(s) => par_samples(config.samples, seed.expect("checked"), |rng, _| {
                let p = s.sample(rng, n)?;
                observe(graph, &action, &p, want_translation, config.gromov_check, r)
            })
            .map_err(Error::at("sampling"))?,
            None => enumerate_sphere(graph, n, budget)
                .map_err(Error::at("enumeration"))?
                .map(|p| observe(graph, &action, &p, want_translation, config.gromov_check, r))
                .collect::<Result<_>>()?,
        };
        if samples.is_empty() {
            return Err(Error::EmptySphere(n));
        }
        let exact = config.mode == Mode::Exact;
        let moments = |xs: &[f64]| if exact { stats::population_moments(xs) } else { stats::moments(xs) };
        let disp: Vec<f64> = samples.iter().map(|s| s.displacement).collect();
        let dref = DriftVariance::from_moments(&moments(&disp), n, exact);
        let max_defect = disp.iter().map(|d| (d - dref.drift * n as f64).abs()).fold(0.0, f64::max);
        let verdict = match probe.verdict {
            Verdict::Zero if max_defect <= probe.defects[probe.maxlen - 1] + PLATEAU_TOLERANCE => Verdict::Zero,
            Verdict::Positive if dref.variance > VARIANCE_FLOOR => Verdict::Positive,
            _ => Verdict::Indeterminate,
        };
        let sigma = if verdict == Verdict::Zero { 0.0 } else { dref.variance.sqrt() };
        let sqrt_n = (n as f64).sqrt();
        let mut observables = Vec::new();
        let mut series: Vec<(Observable, Vec<f64>)> = Vec::new();
        if want_displacement {
            series.push((Observable::Displacement, disp.clone()));
        }
        if want_translation {
            series.push((
                Observable::Translation,
                samples.iter().map(|s| s.translation.expect("requested")).collect(),
            ));
        }
        for (obs, xs) in &series {
            let est = DriftVariance::from_moments(&moments(xs), n, exact);
            let normalized: Vec<f64> = xs.iter().map(|x| (x - dref.drift * n as f64) / sqrt_n).collect();
            observables.push(ObservableReport {
                observable: *obs,
                drift: est.drift,
                variance: est.variance,
                drift_se: est.drift_se,
                variance_se: est.variance_se,
                ks: ks_statistic(&normalized, sigma),
                reference: Observable::Displacement,
            });
            rows.extend(normalized.into_iter().enumerate().map(|(index, normalized)| SampleRow {
                index,
                length: n,
                observable: *obs,
                normalized,
            }));
        }
        let strata = if config.stratify && spectral.period > 1 {
            Some(strata(graph, &spectral, n, r, &samples)?)
        } else {
            None
        };
        let components = if config.per_component {
            Some(component_agreement(graph, &action, config, n, seed).map_err(Error::at("per-component"))?)
        } else {
            None
        };
        let gromov = config.gromov_check.then(|| {
            let threshold = 0.5 * sqrt_n;
            let above = samples.iter().filter(|s| s.gromov.expect("requested") > threshold).count();
            GromovCheck {
                threshold,
                fraction_above: above as f64 / samples.len() as f64,
            }
        });
        runs.push(RunReport {
            n,
            samples: samples.len(),
            observables,
            verdict,
            max_defect,
            ks_convention: if verdict == Verdict::Zero { "dirac" } else { "normal" },
            strata,
            components,
            gromov,
        });
    }
    Ok(ExperimentOutput {
        report: CltReport {
            action: config.action.to_string(),
            group: graph.group().kind().to_string(),
            mode: config.mode,
            seed,
            lambda: spectral.lambda,
            period: spectral.period,
            diagnosis: spectral.diagnosis,
            probe,
            runs,
        },
        rows,
    })
}

fn strata(graph: &GraphStructure, spectral: &SpectralData, n: usize, r: usize, samples: &[Sample]) -> Result<Vec<Stratum>> {
    let limit = prefix_distribution(graph, spectral, r)?;
    let total = graph.count_paths(graph.initial(), n)?;
    let mut seen: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for s in samples {
        *seen.entry(s.prefix.clone()).or_default() += 1;
    }
    limit
        .into_iter()
        .map(|pm| {
            let end = pm.path.end(graph);
            let completions = graph.count_paths(end, n - r)?;
            Ok(Stratum {
                prefix: pm.path.format(graph),
                end,
                limit_mass: pm.mass,
                exact_mass: crate::bignum::ratio(&completions, &total),
                empirical: seen.get(&pm.path.edges).copied().unwrap_or(0) as f64 / samples.len() as f64,
            })
        })
        .collect()
}

fn component_agreement(
    graph: &GraphStructure,
    action: &IsometricAction,
    config: &ExperimentConfig,
    n: usize,
    seed: Option<u64>,
) -> Result<ComponentAgreement> {
    let report = graph.components();
    let mut components = Vec::new();
    for (i, c) in report.maximal_components().enumerate() {
        let sub = graph.restrict(&c.vertices)?;
        let starts: Vec<usize> = (0..sub.vertex_count()).collect();
        let values: Vec<f64> = match config.mode {
            Mode::Mc => {
                let s = SphereSampler::new(&sub, n);
                par_samples(config.samples, component_seed(seed.expect("checked"), i), |rng, _| {
                    let p = s.sample_any_start(rng, &starts, n)?;
                    action.displacement(&p.word(&sub))
                })?
            }
            Mode::Exact => {
                let mut v = Vec::new();
                for &start in &starts {
                    let g = sub.with_initial(start)?;
                    for p in enumerate_sphere(&g, n, config.budget.unwrap_or(DEFAULT_BUDGET))? {
                        v.push(action.displacement(&p.word(&g))?);
                    }
                }
                v
            }
        };
        let exact = config.mode == Mode::Exact;
        let m = if exact { stats::population_moments(&values) } else { stats::moments(&values) };
        components.push(ComponentEstimate {
            vertices: c.vertices.clone(),
            estimate: DriftVariance::from_moments(&m, n, exact),
        });
    }
    let (mut drift_ratio, mut variance_ratio) = (0.0f64, 0.0f64);
    for (i, a) in components.iter().enumerate() {
        for b in &components[i + 1..] {
            let (x, y) = (&a.estimate, &b.estimate);
            let ratio = |d: f64, se: f64| if d == 0.0 { 0.0 } else { d / (2.0 * se) };
            drift_ratio = drift_ratio.max(ratio((x.drift - y.drift).abs(), x.drift_se.hypot(y.drift_se)));
            variance_ratio = variance_ratio.max(ratio(
                (x.variance - y.variance).abs(),
                x.variance_se.hypot(y.variance_se),
            ));
        }
    }
    Ok(ComponentAgreement {
        components,
        agree: drift_ratio <= 1.0 && variance_ratio <= 1.0,
        drift_ratio,
        variance_ratio,
    })
}
