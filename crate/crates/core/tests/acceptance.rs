//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::time::{Duration, Instant};

use coarse_clt::actions::{ActionSpec, IsometricAction};
use coarse_clt::clt::{
    run_experiment_on, zero_variance_probe, ExperimentConfig, Observable, RunReport, Verdict,
};
use coarse_clt::combings::fellow_traveler_constant;
use coarse_clt::fixtures;
use coarse_clt::markov::{parry_chain, return_time_identities, tv_counting_vs_markov, DEFAULT_BUDGET};
use coarse_clt::sampler::enumerate_sphere;
use coarse_clt::spectral::{leading_eigenvalue, semisimplicity_report, Diagnosis};
use coarse_clt::{GraphStructure, SpectralData};
use num_bigint::BigUint;

const SEED: u64 = 20_240_601;

const LAMBDA_TOL: f64 = 1e-9;
const IDENTITY_TOL: f64 = 1e-6;
const TV_TIE: f64 = 1e-12;
const TV_LENGTHS: [usize; 5] = [4, 6, 8, 10, 12];
const HYPERPLANE_DRIFT: (f64, f64) = (0.49, 0.51);
const HYPERPLANE_VARIANCE: (f64, f64) = (0.115, 0.135);
const HYPERPLANE_KS: f64 = 0.02;
const CERTIFY_TOL: f64 = 1e-3;
const TRANSLATION_DRIFT_TOL: f64 = 0.01;
const TRANSLATION_VARIANCE_TOL: f64 = 0.02;
const TRANSLATION_KS: f64 = 0.025;
const SANOV_VARIANCE_MIN: f64 = 0.01;
const SANOV_KS: f64 = 0.05;
const SANOV_GROMOV_FRACTION: f64 = 0.05;

type Outcome = Result<(bool, String), String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn single_run(graph: &GraphStructure, cfg: &ExperimentConfig) -> Result<RunReport, String> {
    let out = run_experiment_on(graph, cfg).map_err(err)?;
    out.report.runs.into_iter().next().ok_or_else(|| "no run".to_string())
}

fn c1_counting() -> Outcome {
    let f2 = fixtures::free2().count_table(20);
    let z2 = fixtures::z2().count_table(20);
    let d = fixtures::infinite_dihedral().count_table(20);
    let mut bad = Vec::new();
    for n in 1..=20usize {
        let three = BigUint::from(3u32).pow(n as u32 - 1);
        if f2[n][0] != BigUint::from(4u32) * three {
            bad.push(format!("F2 n={n}"));
        }
        if z2[n][0] != BigUint::from(4 * n) {
            bad.push(format!("Z2 n={n}"));
        }
        if d[n][0] != BigUint::from(2u32) {
            bad.push(format!("D n={n}"));
        }
    }
    Ok((bad.is_empty(), format!("n=1..20, mismatches {bad:?}")))
}

fn c2_spectral() -> Outcome {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let gm = leading_eigenvalue(&fixtures::golden_mean()).map_err(err)?;
    let f2 = leading_eigenvalue(&fixtures::free2()).map_err(err)?;
    let j = semisimplicity_report(&fixtures::jordan()).diagnosis;
    let c = semisimplicity_report(&fixtures::two_cycle()).diagnosis;
    let ok = (gm - phi).abs() <= LAMBDA_TOL
        && (f2 - 3.0).abs() <= LAMBDA_TOL
        && j == Diagnosis::NotAlmostSemisimple
        && c == Diagnosis::AlmostSemisimple { period: 2 };
    Ok((ok, format!("lambda(gm)={gm:.12}, lambda(F2)={f2:.12}, jordan={j:?}, two-cycle={c:?}")))
}

fn c3_return_time() -> Outcome {
    let g = fixtures::golden_mean();
    let chain = parry_chain(&g, &SpectralData::compute(&g).map_err(err)?).map_err(err)?;
    let r = return_time_identities(&chain, 0, 30).map_err(err)?;
    let occ1 = r.occupation_residuals[1];
    let ok = r.return_time_residual < IDENTITY_TOL && occ1 < IDENTITY_TOL;
    Ok((
        ok,
        format!(
            "R_30={:.13}, 1/pi0={:.13}, |pi1 - n1/R|={occ1:.2e}",
            r.expected_return_time, r.inverse_pi
        ),
    ))
}

fn decreasing_with_one_tie(tv: &[f64]) -> bool {
    let mut ties = 0;
    for w in tv.windows(2) {
        if w[1] < w[0] {
            continue;
        }
        if w[1] - w[0] <= TV_TIE {
            ties += 1;
        } else {
            return false;
        }
    }
    ties <= 1
}

fn c4_tv() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, g) in [("golden-mean", fixtures::golden_mean()), ("F2", fixtures::free2())] {
        let chain = parry_chain(&g, &SpectralData::compute(&g).map_err(err)?).map_err(err)?;
        let tv = TV_LENGTHS
            .iter()
            .map(|&n| tv_counting_vs_markov(&g, &chain, n, DEFAULT_BUDGET).map(|r| r.total_variation))
            .collect::<Result<Vec<f64>, _>>()
            .map_err(err)?;
        let good = decreasing_with_one_tie(&tv);
        ok &= good;
        let shown: Vec<String> = tv.iter().map(|t| format!("{t:.4e}")).collect();
        detail.push(format!("{name} {} [{}]", if good { "ok" } else { "not decreasing" }, shown.join(", ")));
    }
    Ok((ok, detail.join("; ")))
}

fn c5_zero_variance() -> Outcome {
    let g = fixtures::free2();
    let action = IsometricAction::new(&ActionSpec::CayleyTree, g.group()).map_err(err)?;
    let probe = zero_variance_probe(&g, &action, 8, DEFAULT_BUDGET).map_err(err)?;
    let cfg = ExperimentConfig::from_graph(&g, ActionSpec::CayleyTree, 500, 100_000, SEED);
    let run = single_run(&g, &cfg)?;
    let ok = probe.verdict == Verdict::Zero
        && probe.defects.iter().all(|&d| d == 0.0)
        && run.verdict == Verdict::Zero
        && run.max_defect == 0.0
        && run.samples == 100_000;
    Ok((
        ok,
        format!("probe defects {:?}, n=500 verdict {:?}, max defect {}", probe.defects, run.verdict, run.max_defect),
    ))
}

/// Exact mean and variance of the `a`-count over spheres of radius `n ≤ 14`,
/// then slopes from consecutive lengths.
fn certify_hyperplane() -> Result<(f64, f64), String> {
    let g = fixtures::free2();
    let action = IsometricAction::new(&ActionSpec::hyperplane("a"), g.group()).map_err(err)?;
    let mut stats = Vec::new();
    for n in 10..=14 {
        let (mut s1, mut s2, mut m) = (0.0, 0.0, 0.0);
        for p in enumerate_sphere(&g, n, DEFAULT_BUDGET).map_err(err)? {
            let d = action.displacement(&p.word(&g)).map_err(err)?;
            s1 += d;
            s2 += d * d;
            m += 1.0;
        }
        let mean = s1 / m;
        stats.push((n as f64, mean, s2 / m - mean * mean));
    }
    let k = stats.len();
    let (n0, e0, v0) = stats[k - 2];
    let (n1, e1, v1) = stats[k - 1];
    Ok(((e1 - e0) / (n1 - n0), (v1 - v0) / (n1 - n0)))
}

fn c6_hyperplane() -> Outcome {
    let (ell, sigma2) = certify_hyperplane()?;
    let certified = (ell - 0.5).abs() < CERTIFY_TOL && (sigma2 - 0.125).abs() < CERTIFY_TOL;
    let g = fixtures::free2();
    let cfg = ExperimentConfig::from_graph(&g, ActionSpec::hyperplane("a"), 2000, 100_000, SEED);
    let run = single_run(&g, &cfg)?;
    let o = &run.observables[0];
    let ok = certified
        && (HYPERPLANE_DRIFT.0..=HYPERPLANE_DRIFT.1).contains(&o.drift)
        && (HYPERPLANE_VARIANCE.0..=HYPERPLANE_VARIANCE.1).contains(&o.variance)
        && o.ks <= HYPERPLANE_KS;
    Ok((
        ok,
        format!(
            "exact slopes l={ell:.6} s2={sigma2:.6}; n=2000 l={:.5} s2={:.5} KS={:.4}",
            o.drift, o.variance, o.ks
        ),
    ))
}

fn c7_translation() -> Outcome {
    let g = fixtures::free2();
    let mut cfg = ExperimentConfig::from_graph(&g, ActionSpec::hyperplane("a"), 2000, 100_000, SEED);
    cfg.observables = vec![Observable::Displacement, Observable::Translation];
    let run = single_run(&g, &cfg)?;
    let find = |obs| run.observables.iter().find(|o| o.observable == obs).ok_or("missing observable");
    let d = find(Observable::Displacement)?;
    let t = find(Observable::Translation)?;
    let ok = (t.drift - d.drift).abs() <= TRANSLATION_DRIFT_TOL
        && (t.variance - d.variance).abs() <= TRANSLATION_VARIANCE_TOL
        && t.ks <= TRANSLATION_KS;
    Ok((
        ok,
        format!(
            "translation l={:.5} s2={:.5} vs displacement l={:.5} s2={:.5}, KS={:.4}",
            t.drift, t.variance, d.drift, d.variance, t.ks
        ),
    ))
}

fn c8_sanov() -> Outcome {
    let g = fixtures::sanov();
    let mut cfg = ExperimentConfig::from_graph(&g, ActionSpec::matrix(), 1000, 10_000, SEED);
    cfg.gromov_check = true;
    let run = single_run(&g, &cfg)?;
    let o = &run.observables[0];
    let frac = run.gromov.as_ref().map_or(1.0, |c| c.fraction_above);
    let ok = o.variance > SANOV_VARIANCE_MIN && o.ks <= SANOV_KS && frac < SANOV_GROMOV_FRACTION;
    Ok((
        ok,
        format!("l={:.4} s2={:.4} KS={:.4} gromov fraction={frac:.4}", o.drift, o.variance, o.ks),
    ))
}

fn c9_components() -> Outcome {
    let g = fixtures::doubled_free2();
    let mut cfg = ExperimentConfig::from_graph(&g, ActionSpec::hyperplane("a"), 1000, 20_000, SEED);
    cfg.per_component = true;
    let run = single_run(&g, &cfg)?;
    let c = run.components.ok_or("no component report")?;
    let ok = c.components.len() == 2 && c.agree && c.drift_ratio <= 1.0 && c.variance_ratio <= 1.0;
    let est: Vec<String> = c
        .components
        .iter()
        .map(|e| format!("l={:.4}±{:.4} s2={:.4}±{:.4}", e.estimate.drift, e.estimate.drift_se, e.estimate.variance, e.estimate.variance_se))
        .collect();
    Ok((
        ok,
        format!("{}; ratios {:.3}, {:.3}", est.join(" | "), c.drift_ratio, c.variance_ratio),
    ))
}

fn c10_fellow_traveler() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, g) in [("F2", fixtures::free2()), ("Z2", fixtures::z2())] {
        let b = vec![vec![], g.group().parse_word("a").map_err(err)?];
        let k6 = fellow_traveler_constant(&g, &b, 6, DEFAULT_BUDGET).map_err(err)?.constant;
        let k8 = fellow_traveler_constant(&g, &b, 8, DEFAULT_BUDGET).map_err(err)?.constant;
        ok &= k6 == k8;
        detail.push(format!("{name} K(6)={k6} K(8)={k8}"));
    }
    Ok((ok, detail.join(", ")))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("counting", Duration::from_secs(1), c1_counting),
        ("spectral", Duration::from_secs(1), c2_spectral),
        ("return-time", Duration::from_secs(1), c3_return_time),
        ("counting-vs-markov-tv", Duration::from_secs(30), c4_tv),
        ("zero-variance", Duration::from_secs(10), c5_zero_variance),
        ("hyperplane-clt", Duration::from_secs(120), c6_hyperplane),
        ("translation-clt", Duration::from_secs(120), c7_translation),
        ("sanov-h2", Duration::from_secs(300), c8_sanov),
        ("cross-component", Duration::from_secs(120), c9_components),
        ("fellow-traveler", Duration::from_secs(60), c10_fellow_traveler),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (passed, detail) = match outcome {
            Ok((p, d)) => (p && elapsed < *budget, d),
            Err(e) => (false, format!("error: {e}")),
        };
        if !passed {
            failed += 1;
        }
        println!(
            "{} criterion {:>2} {name}: {detail} [{:.2}s / {}s]",
            if passed { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
