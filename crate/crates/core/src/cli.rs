//! Command-line front end.

use std::ffi::OsString;
use std::path::{Path as FsPath, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::clt::{run_experiment, write_csv, ExperimentConfig};
use crate::combings::{free_group_combing, raag_shortlex_combing, CommutationGraph, CoxeterKind};
use crate::error::{Error, Result};
use crate::graph::{load_graph_structure, ComponentReport, GraphStructure};
use crate::markov::{first_return_measure, parry_chain, return_time_identities, tv_counting_vs_markov, DEFAULT_BUDGET};
use crate::sampler::{par_samples, SphereSampler};
use crate::spectral::{semisimplicity_report, SemisimplicityReport, SpectralData};
use crate::verify::run_fixture_checks;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;

/// Environment variable overriding enumeration budgets.
pub const BUDGET_ENV: &str = "COARSE_CLT_BUDGET";

#[derive(Debug, Parser)]
#[command(name = "coarse-clt", version, about = "Geodesic automata, Parry chains and CLT experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Components, semisimplicity and Perron-Frobenius data of an automaton.
    Analyze {
        automaton: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Uniform samples from the sphere of radius N.
    Sample {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long)]
        length: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = PathFormat::Words)]
        format: PathFormat,
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
    /// Prime loops and return-time identities at a vertex.
    Loops {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long, default_value_t = 0)]
        vertex: usize,
        /// Cutoff for the identity sums.
        #[arg(long, default_value_t = 30)]
        max_len: usize,
        /// Cutoff for the listed loops.
        #[arg(long, default_value_t = 8)]
        list_len: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Counting-vs-Markov total variation at the given lengths.
    Tv {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long, num_args = 1.., default_values_t = [4, 6, 8, 10, 12])]
        n: Vec<usize>,
        #[command(flatten)]
        out: Output,
    },
    /// Emit a built-in combing as an automaton document.
    Comb {
        #[arg(long, group = "family")]
        free: Option<usize>,
        /// Comma-separated generators of a right-angled Artin group.
        #[arg(long, group = "family")]
        raag: Option<String>,
        /// Comma-separated generators of a right-angled Coxeter group.
        #[arg(long, group = "family")]
        racg: Option<String>,
        /// Commuting pairs such as `a-b,b-c`.
        #[arg(long, default_value = "")]
        commute: String,
        #[command(flatten)]
        out: Output,
    },
    /// Run a CLT experiment.
    Clt {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
        #[command(flatten)]
        out: Output,
    },
    /// Run the oracle suite.
    Verify {
        #[arg(long, required = true)]
        fixtures: bool,
    },
}

#[derive(Debug, Args)]
struct Output {
    /// Write the report here instead of standard output.
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PathFormat {
    Words,
    Edges,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub config: serde_json::Value,
    pub tool_version: &'static str,
    pub seed: Option<u64>,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<String>,
    pub runtime_seconds: f64,
}

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
struct AnalyzeReport {
    vertices: usize,
    initial: usize,
    edges: usize,
    group: String,
    components: ComponentReport,
    semisimplicity: SemisimplicityReport,
    spectral: Option<SpectralData>,
}

/// Runs the CLI and returns the process exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn budget() -> Result<u64> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("{BUDGET_ENV} must be a positive integer, got '{v}'"))),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn read(path: &FsPath) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load(path: &FsPath) -> Result<(GraphStructure, Vec<u8>)> {
    let bytes = read(path)?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| Error::Malformed("automaton is not UTF-8".into()))?;
    Ok((load_graph_structure(&text)?, bytes))
}

fn emit(out: &Output, text: &str) -> Result<Option<String>> {
    match &out.output {
        Some(p) => {
            write_file(p, text.as_bytes())?;
            Ok(Some(p.display().to_string()))
        }
        None => {
            print!("{text}");
            Ok(None)
        }
    }
}

fn write_file(p: &FsPath, bytes: &[u8]) -> Result<()> {
    std::fs::write(p, bytes).map_err(|source| Error::Io {
        path: p.display().to_string(),
        source,
    })
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn digest(path: &FsPath, bytes: &[u8]) -> InputDigest {
    InputDigest {
        path: path.display().to_string(),
        sha256: hex::encode(Sha256::digest(bytes)),
    }
}

fn run(command: Command) -> Result<i32> {
    match command {
        Command::Analyze { automaton, out } => {
            let (g, _) = load(&automaton)?;
            let semisimplicity = semisimplicity_report(&g);
            let spectral = match semisimplicity.diagnosis {
                crate::spectral::Diagnosis::FiniteLanguage | crate::spectral::Diagnosis::NotAlmostSemisimple => None,
                _ => Some(SpectralData::compute(&g)?),
            };
            let report = AnalyzeReport {
                vertices: g.vertex_count(),
                initial: g.initial(),
                edges: g.edges().len(),
                group: g.group().kind().to_string(),
                components: g.components(),
                semisimplicity,
                spectral,
            };
            emit(&out, &json(&report))?;
            Ok(EXIT_OK)
        }
        Command::Sample {
            automaton,
            length,
            count,
            seed,
            format,
            manifest,
            out,
        } => {
            let start = Instant::now();
            let (g, bytes) = load(&automaton)?;
            let sampler = SphereSampler::new(&g, length);
            let lines = par_samples(count, seed, |rng, _| {
                let p = sampler.sample(rng, length)?;
                Ok(match format {
                    PathFormat::Words => p.format(&g),
                    PathFormat::Edges => p.edges.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" "),
                })
            })?;
            let mut text = String::new();
            for l in lines {
                text.push_str(&l);
                text.push('\n');
            }
            let written = emit(&out, &text)?;
            if let Some(m) = manifest {
                let config = serde_json::json!({
                    "automaton": automaton.display().to_string(),
                    "length": length,
                    "count": count,
                    "format": format!("{format:?}").to_lowercase(),
                });
                write_manifest(&m, "sample", config, Some(seed), vec![digest(&automaton, &bytes)], written, start)?;
            }
            Ok(EXIT_OK)
        }
        Command::Loops {
            automaton,
            vertex,
            max_len,
            list_len,
            out,
        } => {
            let (g, _) = load(&automaton)?;
            let s = SpectralData::compute(&g)?;
            let chain = parry_chain(&g, &s)?;
            let loops = first_return_measure(&chain, vertex, list_len.min(max_len), budget()?)?;
            let identities = return_time_identities(&chain, vertex, max_len)?;
            emit(&out, &json(&serde_json::json!({ "loops": loops, "identities": identities })))?;
            Ok(EXIT_OK)
        }
        Command::Tv { automaton, n, out } => {
            let (g, _) = load(&automaton)?;
            let s = SpectralData::compute(&g)?;
            let chain = parry_chain(&g, &s)?;
            let b = budget()?;
            let reports = n
                .iter()
                .map(|&k| tv_counting_vs_markov(&g, &chain, k, b))
                .collect::<Result<Vec<_>>>()?;
            emit(&out, &json(&reports))?;
            Ok(EXIT_OK)
        }
        Command::Comb {
            free,
            raag,
            racg,
            commute,
            out,
        } => {
            let g = match (free, raag, racg) {
                (Some(k), None, None) => free_group_combing(k)?,
                (None, Some(gens), None) => right_angled(&gens, &commute, CoxeterKind::Artin)?,
                (None, None, Some(gens)) => right_angled(&gens, &commute, CoxeterKind::Coxeter)?,
                _ => return Err(Error::InvalidInput("pass exactly one of --free, --raag, --racg".into())),
            };
            emit(&out, &g.to_json())?;
            Ok(EXIT_OK)
        }
        Command::Clt {
            config,
            seed,
            csv,
            manifest,
            jobs,
            out,
        } => {
            let start = Instant::now();
            let bytes = read(&config)?;
            let mut cfg: ExperimentConfig = serde_json::from_slice(&bytes)?;
            cfg.seed = Some(seed);
            if cfg.budget.is_none() {
                cfg.budget = Some(budget()?);
            }
            let base = config.parent().map(FsPath::to_path_buf);
            let mut inputs = vec![digest(&config, &bytes)];
            if let crate::clt::AutomatonSource::Path(p) = &cfg.automaton {
                let path = base.as_deref().map_or_else(|| PathBuf::from(p), |b| b.join(p));
                inputs.push(digest(&path, &read(&path)?));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs.unwrap_or(0))
                .build()
                .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
            let output = pool.install(|| run_experiment(&cfg, base.as_deref()))?;
            let mut outputs = Vec::new();
            outputs.extend(emit(&out, &json(&output.report))?);
            if let Some(p) = &csv {
                let mut buf = Vec::new();
                write_csv(&output.rows, &mut buf).expect("writing to memory");
                write_file(p, &buf)?;
                outputs.push(p.display().to_string());
            }
            if let Some(m) = manifest {
                let resolved = serde_json::to_value(&cfg)?;
                write_manifest_many(&m, "clt", resolved, Some(seed), inputs, outputs, start)?;
            }
            Ok(EXIT_OK)
        }
        Command::Verify { fixtures: _ } => {
            let checks = run_fixture_checks();
            let mut failed = 0;
            for c in &checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                failed += usize::from(!c.passed);
            }
            println!("{} checks, {} failed", checks.len(), failed);
            Ok(if failed == 0 { EXIT_OK } else { EXIT_VERIFY })
        }
    }
}

fn right_angled(gens: &str, commute: &str, kind: CoxeterKind) -> Result<GraphStructure> {
    let generators: Vec<&str> = gens.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    let pairs = commute
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|p| {
            p.split_once('-')
                .ok_or_else(|| Error::InvalidInput(format!("commuting pair '{p}' must look like a-b")))
        })
        .collect::<Result<Vec<_>>>()?;
    let cg = CommutationGraph::new(&generators, &pairs, kind);
    if cg.is_join() {
        eprintln!("warning: the commutation graph is a join; the group splits as a direct product");
    }
    raag_shortlex_combing(&cg)
}

fn write_manifest(
    path: &FsPath,
    subcommand: &str,
    config: serde_json::Value,
    seed: Option<u64>,
    inputs: Vec<InputDigest>,
    output: Option<String>,
    start: Instant,
) -> Result<()> {
    write_manifest_many(path, subcommand, config, seed, inputs, output.into_iter().collect(), start)
}

fn write_manifest_many(
    path: &FsPath,
    subcommand: &str,
    config: serde_json::Value,
    seed: Option<u64>,
    inputs: Vec<InputDigest>,
    mut outputs: Vec<String>,
    start: Instant,
) -> Result<()> {
    outputs.push(path.display().to_string());
    let manifest = RunManifest {
        subcommand: subcommand.to_string(),
        config,
        tool_version: env!("CARGO_PKG_VERSION"),
        seed,
        inputs,
        outputs,
        runtime_seconds: start.elapsed().as_secs_f64(),
    };
    write_file(path, json(&manifest).as_bytes())
}
