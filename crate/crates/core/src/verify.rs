//! Desk-scale oracle suite run by `coarse-clt verify --fixtures`.

use num_bigint::BigUint;
use serde::Serialize;

use crate::actions::{ActionSpec, IsometricAction};
use crate::clt::{zero_variance_probe, Verdict};
use crate::combings::{fellow_traveler_constant, raag_shortlex_combing, CommutationGraph, CoxeterKind};
use crate::error::Result;
use crate::fixtures;
use crate::group::Group;
use crate::markov::{parry_chain, prime_loops, return_time_identities, DEFAULT_BUDGET};
use crate::sampler::{chunk_rng, enumerate_sphere, SphereSampler};
use crate::spectral::{leading_eigenvalue, semisimplicity_report, Diagnosis, SpectralData};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, run: impl FnOnce() -> Result<(bool, String)>) -> Check {
    match run() {
        Ok((passed, detail)) => Check { name, passed, detail },
        Err(e) => Check {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

pub fn run_fixture_checks() -> Vec<Check> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    vec![
        check("free-sphere-counts", || {
            let g = fixtures::free2();
            let table = g.count_table(20);
            let ok = (1..=20).all(|n| table[n][0] == BigUint::from(4u32) * BigUint::from(3u32).pow(n as u32 - 1));
            Ok((ok, "c(v0,n) = 4*3^(n-1), n <= 20".into()))
        }),
        check("z2-sphere-counts", || {
            let t = fixtures::z2().count_table(20);
            Ok(((1..=20).all(|n| t[n][0] == BigUint::from(4 * n)), "c(v0,n) = 4n".into()))
        }),
        check("dihedral-sphere-counts", || {
            let t = fixtures::infinite_dihedral().count_table(20);
            Ok(((1..=20).all(|n| t[n][0] == BigUint::from(2u32)), "c(v0,n) = 2".into()))
        }),
        check("free-vs-empty-raag", || {
            let a = fixtures::free2().count_table(8);
            let cg = CommutationGraph::new(&["a", "b"], &[], CoxeterKind::Artin);
            let b = raag_shortlex_combing(&cg)?.count_table(8);
            Ok(((0..=8).all(|n| a[n][0] == b[n][0]), "equal sphere counts n <= 8".into()))
        }),
        check("golden-mean-lambda", || {
            let l = leading_eigenvalue(&fixtures::golden_mean())?;
            Ok(((l - phi).abs() < 1e-9, format!("lambda = {l}")))
        }),
        check("free-lambda", || {
            let l = leading_eigenvalue(&fixtures::free2())?;
            Ok(((l - 3.0).abs() < 1e-9, format!("lambda = {l}")))
        }),
        check("diagnoses", || {
            let j = semisimplicity_report(&fixtures::jordan()).diagnosis;
            let c = semisimplicity_report(&fixtures::two_cycle()).diagnosis;
            let ok = j == Diagnosis::NotAlmostSemisimple && c == Diagnosis::AlmostSemisimple { period: 2 };
            Ok((ok, format!("jordan: {j:?}, two-cycle: {c:?}")))
        }),
        check("golden-mean-parry", || {
            let g = fixtures::golden_mean();
            let c = parry_chain(&g, &SpectralData::compute(&g)?)?;
            let ok = (c.edge_prob[0] - 1.0 / phi).abs() < 1e-9
                && (c.edge_prob[2] - 1.0).abs() < 1e-9
                && c.stationarity_residual() < 1e-9;
            Ok((ok, format!("pi = {:?}", c.pi)))
        }),
        check("return-time-identities", || {
            let g = fixtures::golden_mean();
            let c = parry_chain(&g, &SpectralData::compute(&g)?)?;
            let r = return_time_identities(&c, 0, 30)?;
            let ok = r.return_time_residual < 1e-6 && r.max_occupation_residual < 1e-6;
            Ok((ok, format!("R_30 = {}, 1/pi0 = {}", r.expected_return_time, r.inverse_pi)))
        }),
        check("golden-mean-prime-loops", || {
            let g = fixtures::golden_mean();
            let loops = prime_loops(&g, 0, 3, DEFAULT_BUDGET)?;
            let words: Vec<String> = loops.iter().map(|l| l.format(&g)).collect();
            Ok((words == ["x", "y z"], format!("{words:?}")))
        }),
        check("sampler-support", || {
            let g = fixtures::golden_mean();
            let s = SphereSampler::new(&g, 5);
            let mut rng = chunk_rng(1, 0);
            let mut seen = std::collections::BTreeSet::new();
            for _ in 0..2000 {
                seen.insert(s.sample(&mut rng, 5)?);
            }
            let all: std::collections::BTreeSet<_> = enumerate_sphere(&g, 5, DEFAULT_BUDGET)?.collect();
            Ok((seen == all, format!("{} distinct outcomes", seen.len())))
        }),
        check("tree-zero-variance", || {
            let g = fixtures::free2();
            let a = IsometricAction::new(&ActionSpec::CayleyTree, g.group())?;
            let p = zero_variance_probe(&g, &a, 8, DEFAULT_BUDGET)?;
            Ok((p.verdict == Verdict::Zero, format!("defects {:?}", p.defects)))
        }),
        check("sanov-displacement", || {
            let g = Group::new(fixtures::sanov_group())?;
            let a = IsometricAction::new(&ActionSpec::matrix(), &g)?;
            let d = a.displacement(&g.parse_word("a")?)?;
            Ok(((d - 3f64.acosh()).abs() < 1e-12, format!("d = {d}")))
        }),
        check("fellow-traveler", || {
            let g = fixtures::free2();
            let b = vec![vec![], g.group().parse_word("a")?];
            let r = fellow_traveler_constant(&g, &b, 6, DEFAULT_BUDGET)?;
            Ok((r.constant <= 2, format!("constant {}", r.constant)))
        }),
    ]
}
