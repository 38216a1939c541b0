//! Perron–Frobenius data of a transition matrix.
//!
//! Everything here is computed from exact path counts: `λ` from ratios of
//! counts inside each recurrent component, `ρ`, `u` and `M∞` from
//! `Mⁿ/λⁿ` along multiples of the structure period.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::bignum;
use crate::error::{Error, Result};
use crate::graph::{ComponentReport, GraphStructure};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralConfig {
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Horizon `N` of the Jordan growth test.
    pub jordan_horizon: usize,
    /// `sup_{(N/2,N]} ‖Mⁿ/λⁿ‖ / sup_{(N/4,N/2]} ‖Mⁿ/λⁿ‖` above this flags a Jordan block.
    pub jordan_factor: f64,
    /// Relative tolerance when comparing component radii with `λ`.
    pub maximal_tolerance: f64,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        SpectralConfig {
            tolerance: 1e-9,
            max_iterations: 10_000,
            jordan_horizon: 2_000,
            jordan_factor: 1.5,
            maximal_tolerance: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Diagnosis {
    Primitive,
    Semisimple,
    AlmostSemisimple { period: usize },
    NotAlmostSemisimple,
    /// No cycles at all: every path has bounded length.
    FiniteLanguage,
}

impl Diagnosis {
    pub fn is_semisimple(self) -> bool {
        matches!(self, Diagnosis::Primitive | Diagnosis::Semisimple)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SemisimplicityReport {
    pub diagnosis: Diagnosis,
    #[serde(serialize_with = "sig12_opt")]
    pub lambda: Option<f64>,
    pub period: Option<usize>,
    pub maximal_chain_length: usize,
    #[serde(serialize_with = "sig12_opt")]
    pub growth_ratio: Option<f64>,
    pub jordan_horizon: usize,
    pub jordan_factor: f64,
    pub tolerance: f64,
}

/// Perron–Frobenius data of an almost semisimple structure.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralData {
    #[serde(serialize_with = "sig12")]
    pub lambda: f64,
    #[serde(serialize_with = "sig12_vec")]
    pub rho: Vec<f64>,
    #[serde(serialize_with = "sig12_vec")]
    pub u: Vec<f64>,
    #[serde(serialize_with = "sig12_mat")]
    pub limit_matrix: Vec<Vec<f64>>,
    pub period: usize,
    pub diagnosis: Diagnosis,
    pub tolerance: f64,
}

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn sig12<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(round12(*x))
}

fn sig12_opt<S: Serializer>(x: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_some(&round12(*v)),
        None => s.serialize_none(),
    }
}

fn sig12_vec<S: Serializer>(x: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(x.iter().map(|&v| round12(v)))
}

fn sig12_mat<S: Serializer>(x: &[Vec<f64>], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(x.iter().map(|row| row.iter().map(|&v| round12(v)).collect::<Vec<_>>()))
}

/// Perron root of the strongly connected component `component` with the
/// given period, from ratios of exact path counts along period multiples.
pub fn irreducible_radius(graph: &GraphStructure, component: &[usize], period: usize, cfg: &SpectralConfig) -> f64 {
    let n = graph.vertex_count();
    let mut inside = vec![false; n];
    for &v in component {
        inside[v] = true;
    }
    let internal: Vec<(usize, usize)> = graph
        .edges()
        .iter()
        .filter(|e| inside[e.from] && inside[e.to])
        .map(|e| (e.from, e.to))
        .collect();
    let mut x: Vec<BigUint> = (0..n).map(|v| if inside[v] { BigUint::one() } else { BigUint::zero() }).collect();
    let total = |x: &[BigUint]| x.iter().sum::<BigUint>();
    let mut prev_total = total(&x);
    let mut prev_ratio = f64::NAN;
    let mut ratios: Vec<f64> = Vec::new();
    let mut stable = 0;
    let threshold = cfg.tolerance * 1e-4;
    let max_blocks = (cfg.max_iterations / period).max(4);
    for _ in 0..max_blocks {
        for _ in 0..period {
            let mut next = vec![BigUint::zero(); n];
            for &(a, b) in &internal {
                next[a] += &x[b];
            }
            x = next;
        }
        let t = total(&x);
        let r = bignum::ratio(&t, &prev_total);
        prev_total = t;
        ratios.push(r);
        if (r - prev_ratio).abs() <= threshold * r {
            stable += 1;
            if stable >= 3 {
                return r.powf(1.0 / period as f64);
            }
        } else {
            stable = 0;
        }
        prev_ratio = r;
    }
    // No geometric convergence: average the logarithms over the last half.
    let tail = &ratios[ratios.len() / 2..];
    let mean_ln = tail.iter().map(|r| r.ln()).sum::<f64>() / tail.len() as f64;
    (mean_ln / period as f64).exp()
}

/// Leading (Perron) eigenvalue of the transition matrix.
pub fn leading_eigenvalue(graph: &GraphStructure) -> Result<f64> {
    graph.components().lambda.ok_or(Error::FiniteLanguage)
}

fn period_of(report: &ComponentReport) -> Result<usize> {
    report.structure_period.ok_or(Error::FiniteLanguage)
}

/// `(ρ, u)` with `ρᵢ = lim eᵢᵀMⁿ1/λⁿ` and `uᵢ = lim e₀ᵀMⁿeᵢ/λⁿ`, limits
/// taken along multiples of the structure period.
pub fn pf_vectors(graph: &GraphStructure, lambda: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    pf_vectors_with(graph, lambda, &SpectralConfig::default())
}

pub fn pf_vectors_with(graph: &GraphStructure, lambda: f64, cfg: &SpectralConfig) -> Result<(Vec<f64>, Vec<f64>)> {
    let report = ComponentReport::compute(graph, cfg);
    let p = period_of(&report)?;
    let ln_l = lambda.ln();
    let nv = graph.vertex_count();
    let mut counts = vec![BigUint::one(); nv];
    let mut row = vec![BigUint::zero(); nv];
    row[graph.initial()] = BigUint::one();
    let mut steps = 0usize;
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    while steps < cfg.max_iterations {
        for _ in 0..p {
            counts = graph.step_counts(&counts);
            row = graph.step_row(&row);
        }
        steps += p;
        let rho: Vec<f64> = counts.iter().map(|c| bignum::scaled(c, ln_l, steps)).collect();
        let u: Vec<f64> = row.iter().map(|c| bignum::scaled(c, ln_l, steps)).collect();
        if let Some((pr, pu)) = &prev {
            let scale = rho.iter().chain(&u).fold(1.0f64, |m, &x| m.max(x.abs()));
            let diff = max_abs_diff(&rho, pr).max(max_abs_diff(&u, pu));
            if diff <= 1e-2 * cfg.tolerance * scale {
                return Ok((rho, u));
            }
        }
        prev = Some((rho, u));
    }
    Err(Error::NotAlmostSemisimple {
        tolerance: cfg.tolerance,
        iterations: steps,
    })
}

/// `M∞ = lim M^{pk}/λ^{pk}`.
pub fn limit_matrix(graph: &GraphStructure, lambda: f64, period: usize, cfg: &SpectralConfig) -> Result<Vec<Vec<f64>>> {
    let ln_l = lambda.ln();
    let nv = graph.vertex_count();
    let mut rows: Vec<Vec<BigUint>> = (0..nv)
        .map(|i| (0..nv).map(|j| if i == j { BigUint::one() } else { BigUint::zero() }).collect())
        .collect();
    let mut steps = 0usize;
    let mut prev: Option<Vec<Vec<f64>>> = None;
    while steps < cfg.max_iterations {
        for _ in 0..period {
            rows = rows.iter().map(|r| graph.step_row(r)).collect();
        }
        steps += period;
        let scaled: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| r.iter().map(|c| bignum::scaled(c, ln_l, steps)).collect())
            .collect();
        if let Some(pm) = &prev {
            let scale = scaled.iter().flatten().fold(1.0f64, |m, &x| m.max(x.abs()));
            let diff = scaled
                .iter()
                .zip(pm)
                .map(|(a, b)| max_abs_diff(a, b))
                .fold(0.0, f64::max);
            if diff <= 1e-2 * cfg.tolerance * scale {
                return Ok(scaled);
            }
        }
        prev = Some(scaled);
    }
    Err(Error::NotAlmostSemisimple {
        tolerance: cfg.tolerance,
        iterations: steps,
    })
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// `sup ‖Mⁿ/λⁿ‖∞` over `n ∈ (N/2, N]` divided by the same over `(N/4, N/2]`.
fn jordan_growth_ratio(graph: &GraphStructure, lambda: f64, horizon: usize) -> f64 {
    let m = graph.transition_matrix();
    let nv = graph.vertex_count();
    let mut x: Vec<Vec<f64>> = (0..nv)
        .map(|i| (0..nv).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let (mut early, mut late) = (0.0f64, 0.0f64);
    for n in 1..=horizon {
        x = x
            .iter()
            .map(|row| {
                (0..nv)
                    .map(|j| (0..nv).map(|k| row[k] * m[k][j] as f64).sum::<f64>() / lambda)
                    .collect()
            })
            .collect();
        let norm = x.iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
        if n > horizon / 4 && n <= horizon / 2 {
            early = early.max(norm);
        } else if n > horizon / 2 {
            late = late.max(norm);
        }
    }
    late / early
}

/// Classifies the transition matrix as primitive, semisimple, almost
/// semisimple of some period, or not almost semisimple.
///
/// Two signals feed the verdict: a chain of two maximal components joined
/// by a path (which forces a Jordan block at `λ`), and polynomial growth of
/// `‖Mⁿ/λⁿ‖` over the configured horizon.
pub fn semisimplicity_report(graph: &GraphStructure) -> SemisimplicityReport {
    semisimplicity_report_with(graph, &SpectralConfig::default())
}

pub fn semisimplicity_report_with(graph: &GraphStructure, cfg: &SpectralConfig) -> SemisimplicityReport {
    let comps = ComponentReport::compute(graph, cfg);
    let base = |diagnosis, growth_ratio| SemisimplicityReport {
        diagnosis,
        lambda: comps.lambda,
        period: comps.structure_period,
        maximal_chain_length: comps.maximal_chain_length,
        growth_ratio,
        jordan_horizon: cfg.jordan_horizon,
        jordan_factor: cfg.jordan_factor,
        tolerance: cfg.tolerance,
    };
    let (Some(lambda), Some(p)) = (comps.lambda, comps.structure_period) else {
        return base(Diagnosis::FiniteLanguage, None);
    };
    let growth = jordan_growth_ratio(graph, lambda, cfg.jordan_horizon);
    if comps.maximal_chain_length >= 2 || growth > cfg.jordan_factor {
        return base(Diagnosis::NotAlmostSemisimple, Some(growth));
    }
    let diagnosis = if p > 1 {
        Diagnosis::AlmostSemisimple { period: p }
    } else if comps.components.len() == 1 {
        Diagnosis::Primitive
    } else {
        Diagnosis::Semisimple
    };
    base(diagnosis, Some(growth))
}

impl SpectralData {
    pub fn compute(graph: &GraphStructure) -> Result<Self> {
        Self::compute_with(graph, &SpectralConfig::default())
    }

    pub fn compute_with(graph: &GraphStructure, cfg: &SpectralConfig) -> Result<Self> {
        let report = semisimplicity_report_with(graph, cfg);
        match report.diagnosis {
            Diagnosis::FiniteLanguage => return Err(Error::FiniteLanguage),
            Diagnosis::NotAlmostSemisimple => {
                return Err(Error::NotAlmostSemisimple {
                    tolerance: cfg.tolerance,
                    iterations: cfg.jordan_horizon,
                })
            }
            _ => {}
        }
        let lambda = report.lambda.expect("cyclic structure has λ");
        let period = report.period.expect("cyclic structure has a period");
        let (rho, u) = pf_vectors_with(graph, lambda, cfg)?;
        let limit_matrix = limit_matrix(graph, lambda, period, cfg)?;
        Ok(SpectralData {
            lambda,
            rho,
            u,
            limit_matrix,
            period,
            diagnosis: report.diagnosis,
            tolerance: cfg.tolerance,
        })
    }
}
