//! The Parry Markov chain of a semisimple structure, first-return measures
//! on prime loops, the return-time identities, period-reduction prefix
//! distributions and the counting-vs-Markov total variation.

use std::collections::VecDeque;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

use crate::bignum;
use crate::error::{Error, Result};
use crate::graph::{GraphStructure, Path};
use crate::spectral::SpectralData;

/// Default cap on enumerated paths.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Serialize)]
pub struct MarkovChain {
    /// Initial distribution `πᵢ = uᵢρᵢ/ρ₀`.
    pub pi: Vec<f64>,
    /// Per-edge probability `ρⱼ/(λρᵢ)`.
    pub edge_prob: Vec<f64>,
    pub lambda: f64,
    pub rho: Vec<f64>,
    #[serde(skip)]
    graph: GraphStructure,
}

/// Builds the Parry chain. Requires a semisimple structure; for period
/// `p > 1` build it on `graph.power_graph(p)` instead.
pub fn parry_chain(graph: &GraphStructure, spectral: &SpectralData) -> Result<MarkovChain> {
    if !spectral.diagnosis.is_semisimple() {
        return Err(Error::NotSemisimple {
            period: spectral.period,
        });
    }
    let rho = &spectral.rho;
    let rho0 = rho[graph.initial()];
    let pi: Vec<f64> = spectral.u.iter().zip(rho).map(|(u, r)| u * r / rho0).collect();
    let edge_prob = graph
        .edges()
        .iter()
        .map(|e| {
            if rho[e.from] > 0.0 {
                rho[e.to] / (spectral.lambda * rho[e.from])
            } else {
                0.0
            }
        })
        .collect();
    Ok(MarkovChain {
        pi,
        edge_prob,
        lambda: spectral.lambda,
        rho: rho.clone(),
        graph: graph.clone(),
    })
}

impl MarkovChain {
    pub fn graph(&self) -> &GraphStructure {
        &self.graph
    }

    /// Product of edge probabilities along `path`.
    pub fn path_probability(&self, path: &Path) -> f64 {
        path.edges.iter().map(|&e| self.edge_prob[e]).product()
    }

    /// `max_j |Σᵢ πᵢ p_ij − π_j|`.
    pub fn stationarity_residual(&self) -> f64 {
        let mut flow = vec![0.0; self.pi.len()];
        for (k, e) in self.graph.edges().iter().enumerate() {
            flow[e.to] += self.pi[e.from] * self.edge_prob[k];
        }
        flow.iter().zip(&self.pi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// `max_i |Σ_out p − 1|` over vertices with positive outgoing mass.
    pub fn row_sum_residual(&self) -> f64 {
        (0..self.graph.vertex_count())
            .map(|v| self.graph.out_edges(v).iter().map(|&e| self.edge_prob[e]).sum::<f64>())
            .filter(|&s| s > 0.0)
            .map(|s| (s - 1.0).abs())
            .fold(0.0, f64::max)
    }

    fn require_maximal(&self, v: usize) -> Result<()> {
        self.graph.check_vertex(v)?;
        if self.pi[v] > 0.0 {
            Ok(())
        } else {
            Err(Error::NotMaximal(v))
        }
    }
}

/// Shortest distance from every vertex to `target` (`usize::MAX` if unreachable).
fn distances_to(graph: &GraphStructure, target: usize) -> Vec<usize> {
    let n = graph.vertex_count();
    let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in graph.edges() {
        incoming[e.to].push(e.from);
    }
    let mut dist = vec![usize::MAX; n];
    dist[target] = 0;
    let mut queue = VecDeque::from([target]);
    while let Some(w) = queue.pop_front() {
        for &u in &incoming[w] {
            if dist[u] == usize::MAX {
                dist[u] = dist[w] + 1;
                queue.push_back(u);
            }
        }
    }
    dist
}

/// Prime loops at `v` of length at most `max_len`, ordered by length and
/// then lexicographically by edge index. Errors only if more than `budget`
/// loops would be produced.
pub fn prime_loops(graph: &GraphStructure, v: usize, max_len: usize, budget: u64) -> Result<Vec<Path>> {
    graph.check_vertex(v)?;
    let dist = distances_to(graph, v);
    let mut loops = Vec::new();
    let mut stack = Vec::new();
    let mut produced = 0u64;
    loop_dfs(graph, v, v, max_len, &dist, &mut stack, &mut |edges| {
        produced += 1;
        if produced > budget {
            return Err(Error::BudgetExceeded {
                required: format!("more than {budget} loops"),
                budget,
            });
        }
        loops.push(Path {
            start: v,
            edges: edges.to_vec(),
        });
        Ok(())
    })?;
    loops.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.edges.cmp(&b.edges)));
    Ok(loops)
}

fn loop_dfs<F>(
    graph: &GraphStructure,
    base: usize,
    at: usize,
    max_len: usize,
    dist: &[usize],
    stack: &mut Vec<usize>,
    emit: &mut F,
) -> Result<()>
where
    F: FnMut(&[usize]) -> Result<()>,
{
    for &e in graph.out_edges(at) {
        let to = graph.edge(e).to;
        let len = stack.len() + 1;
        if to == base {
            stack.push(e);
            emit(stack)?;
            stack.pop();
        } else if dist[to] != usize::MAX && len + dist[to] <= max_len {
            stack.push(e);
            loop_dfs(graph, base, to, max_len, dist, stack, emit)?;
            stack.pop();
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct LoopMeasure {
    pub base: usize,
    pub max_len: usize,
    /// Loops as edge-index arrays with their probabilities.
    pub loops: Vec<WeightedLoop>,
    pub captured_mass: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightedLoop {
    pub edges: Vec<usize>,
    pub probability: f64,
}

/// First-return measure on prime loops at `v` up to length `max_len`.
pub fn first_return_measure(chain: &MarkovChain, v: usize, max_len: usize, budget: u64) -> Result<LoopMeasure> {
    chain.require_maximal(v)?;
    let loops = prime_loops(chain.graph(), v, max_len, budget)?;
    let loops: Vec<WeightedLoop> = loops
        .into_iter()
        .map(|l| WeightedLoop {
            probability: chain.path_probability(&l),
            edges: l.edges,
        })
        .collect();
    let captured_mass = loops.iter().map(|l| l.probability).sum();
    Ok(LoopMeasure {
        base: v,
        max_len,
        loops,
        captured_mass,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub base: usize,
    pub max_len: usize,
    /// Truncated expected return time `R_L = Σ ‖l‖ μ_v(l)`.
    pub expected_return_time: f64,
    pub inverse_pi: f64,
    pub captured_mass: f64,
    /// `n_w`: mass of paths from `v` to `w` avoiding `v` internally (`n_v = 1`).
    pub visit_mass: Vec<f64>,
    pub pi: Vec<f64>,
    pub return_time_residual: f64,
    /// `|π_w − n_w/R_L|` per vertex.
    pub occupation_residuals: Vec<f64>,
    pub max_occupation_residual: f64,
}

/// Truncated return-time identities `R = 1/π_v` and `π_w = n_w/R`.
///
/// Sums over loops and taboo paths are accumulated by dynamic programming
/// over lengths, so large cutoffs do not enumerate paths.
pub fn return_time_identities(chain: &MarkovChain, v: usize, max_len: usize) -> Result<IdentityReport> {
    chain.require_maximal(v)?;
    let graph = chain.graph();
    let n = graph.vertex_count();
    // mass[w] = probability of length-k paths v → w not visiting v after step 0.
    let mut mass = vec![0.0; n];
    mass[v] = 1.0;
    let mut visit_mass = vec![0.0; n];
    visit_mass[v] = 1.0;
    let (mut expected, mut captured) = (0.0, 0.0);
    for k in 1..=max_len {
        let mut next = vec![0.0; n];
        for (e, edge) in graph.edges().iter().enumerate() {
            let m = mass[edge.from];
            if m != 0.0 {
                next[edge.to] += m * chain.edge_prob[e];
            }
        }
        let returned = std::mem::replace(&mut next[v], 0.0);
        expected += k as f64 * returned;
        captured += returned;
        for w in 0..n {
            if w != v {
                visit_mass[w] += next[w];
            }
        }
        mass = next;
    }
    let occupation_residuals: Vec<f64> = (0..n)
        .map(|w| (chain.pi[w] - visit_mass[w] / expected).abs())
        .collect();
    let inverse_pi = 1.0 / chain.pi[v];
    Ok(IdentityReport {
        base: v,
        max_len,
        expected_return_time: expected,
        inverse_pi,
        captured_mass: captured,
        max_occupation_residual: occupation_residuals.iter().copied().fold(0.0, f64::max),
        occupation_residuals,
        visit_mass,
        pi: chain.pi.clone(),
        return_time_residual: (expected - inverse_pi).abs(),
    })
}

/// All length-`n` paths from `v` in lexicographic order of edge indices.
pub fn paths_of_length(graph: &GraphStructure, v: usize, n: usize, budget: u64) -> Result<Vec<Path>> {
    let count = graph.count_paths(v, n)?;
    if count > BigUint::from(budget) {
        return Err(Error::BudgetExceeded {
            required: count.to_string(),
            budget,
        });
    }
    let mut out = Vec::new();
    let mut stack = Vec::with_capacity(n);
    fixed_length_dfs(graph, v, n, &mut stack, &mut |edges| {
        out.push(Path {
            start: v,
            edges: edges.to_vec(),
        })
    });
    Ok(out)
}

fn fixed_length_dfs<F: FnMut(&[usize])>(graph: &GraphStructure, at: usize, n: usize, stack: &mut Vec<usize>, f: &mut F) {
    if stack.len() == n {
        f(stack);
        return;
    }
    for &e in graph.out_edges(at) {
        stack.push(e);
        fixed_length_dfs(graph, graph.edge(e).to, n, stack, f);
        stack.pop();
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PrefixMass {
    pub path: Path,
    pub mass: f64,
}

/// Distribution of the length-`r` prefix `g₀` of a uniform path of length
/// `pn + r` as `n → ∞`: `μ(g₀) = (eᵢ M∞ 1)/(e₀ Mʳ M∞ 1)` for `g₀` ending at `vᵢ`.
pub fn prefix_distribution(graph: &GraphStructure, spectral: &SpectralData, r: usize) -> Result<Vec<PrefixMass>> {
    if r >= spectral.period {
        return Err(Error::InvalidInput(format!(
            "residue {r} must be less than the period {}",
            spectral.period
        )));
    }
    let weight: Vec<f64> = spectral.limit_matrix.iter().map(|row| row.iter().sum()).collect();
    let paths = paths_of_length(graph, graph.initial(), r, DEFAULT_BUDGET)?;
    let total: f64 = paths.iter().map(|p| weight[p.end(graph)]).sum();
    if total <= 0.0 {
        return Err(Error::EmptySphere(r));
    }
    Ok(paths
        .into_iter()
        .map(|path| {
            let mass = weight[path.end(graph)] / total;
            PrefixMass { path, mass }
        })
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct TvReport {
    pub n: usize,
    /// Trimmed length `⌊ln n⌋` at each end.
    pub trim: usize,
    pub middle_length: usize,
    pub total_variation: f64,
    pub paths_enumerated: u64,
    pub log_base: &'static str,
}

/// `⌊ln n⌋`.
pub fn log_trim(n: usize) -> usize {
    (n as f64).ln().floor() as usize
}

/// Exact total variation between the law of the middle subpath (positions
/// `⌊ln n⌋` to `n − ⌊ln n⌋`) of a uniform length-`n` path from `v₀` and the
/// chain's path distribution of the same length.
pub fn tv_counting_vs_markov(graph: &GraphStructure, chain: &MarkovChain, n: usize, budget: u64) -> Result<TvReport> {
    let trim = log_trim(n.max(1));
    if n < 2 * trim + 1 {
        return Err(Error::InvalidInput(format!("n = {n} leaves no middle subpath")));
    }
    let middle = n - 2 * trim;
    let nv = graph.vertex_count();
    let prefix = graph.paths_from(graph.initial(), trim)?;
    let suffix = graph.count_paths_all(trim);
    let total = graph.count_paths(graph.initial(), n)?;
    if total.is_zero() {
        return Err(Error::EmptySphere(n));
    }
    let starts: Vec<usize> = (0..nv).filter(|&w| !prefix[w].is_zero() || chain.pi[w] > 0.0).collect();
    let middle_counts = graph.count_paths_all(middle);
    let required: BigUint = starts.iter().map(|&w| &middle_counts[w]).sum();
    if required > BigUint::from(budget) {
        return Err(Error::BudgetExceeded {
            required: required.to_string(),
            budget,
        });
    }
    // Counting weight of a middle path from i to j is prefix[i]·suffix[j]/total.
    let mut tv = 0.0;
    let mut enumerated = 0u64;
    let mut stack = Vec::with_capacity(middle);
    for &w in &starts {
        let mut probs = Vec::with_capacity(middle + 1);
        probs.push(chain.pi[w]);
        weighted_dfs(graph, chain, w, middle, &mut stack, &mut probs, &mut |end, p| {
            enumerated += 1;
            let counting = if prefix[w].is_zero() || suffix[end].is_zero() {
                0.0
            } else {
                bignum::ratio(&(&prefix[w] * &suffix[end]), &total)
            };
            tv += (counting - p).abs();
        });
    }
    Ok(TvReport {
        n,
        trim,
        middle_length: middle,
        total_variation: 0.5 * tv,
        paths_enumerated: enumerated,
        log_base: "natural",
    })
}

fn weighted_dfs<F: FnMut(usize, f64)>(
    graph: &GraphStructure,
    chain: &MarkovChain,
    at: usize,
    n: usize,
    stack: &mut Vec<usize>,
    probs: &mut Vec<f64>,
    f: &mut F,
) {
    if stack.len() == n {
        f(at, *probs.last().expect("initial mass"));
        return;
    }
    let p = *probs.last().expect("initial mass");
    for &e in graph.out_edges(at) {
        stack.push(e);
        probs.push(p * chain.edge_prob[e]);
        weighted_dfs(graph, chain, graph.edge(e).to, n, stack, probs, f);
        probs.pop();
        stack.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn chain(g: &GraphStructure) -> MarkovChain {
        parry_chain(g, &SpectralData::compute(g).unwrap()).unwrap()
    }

    #[test]
    fn golden_mean_parry() {
        let g = fixtures::golden_mean();
        let c = chain(&g);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((c.edge_prob[0] - 1.0 / phi).abs() < 1e-9);
        assert!((c.edge_prob[1] - 1.0 / (phi * phi)).abs() < 1e-9);
        assert!((c.edge_prob[2] - 1.0).abs() < 1e-9);
        assert!((c.pi[0] - 0.7236067977).abs() < 1e-9);
        assert!(c.stationarity_residual() < 1e-9);
        assert!(c.row_sum_residual() < 1e-9);
    }

    #[test]
    fn free_group_parry_is_uniform() {
        let g = fixtures::free2();
        let c = chain(&g);
        assert_eq!(c.pi[0], 0.0);
        for v in 1..5 {
            assert!((c.pi[v] - 0.25).abs() < 1e-9);
        }
        for (k, e) in g.edges().iter().enumerate() {
            if e.from != 0 {
                assert!((c.edge_prob[k] - 1.0 / 3.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn periodic_structure_is_rejected() {
        let g = fixtures::two_cycle();
        let s = SpectralData::compute(&g).unwrap();
        assert!(matches!(parry_chain(&g, &s), Err(Error::NotSemisimple { period: 2 })));
    }

    #[test]
    fn golden_mean_loops() {
        let g = fixtures::golden_mean();
        let loops = prime_loops(&g, 0, 3, 100).unwrap();
        let words: Vec<String> = loops.iter().map(|l| l.format(&g)).collect();
        assert_eq!(words, ["x", "y z"]);
        assert_eq!(prime_loops(&fixtures::two_cycle(), 1, 4, 100).unwrap().len(), 1);
        assert_eq!(prime_loops(&fixtures::self_loop(), 0, 5, 100).unwrap().len(), 1);
    }

    #[test]
    fn golden_mean_first_return() {
        let c = chain(&fixtures::golden_mean());
        let m = first_return_measure(&c, 0, 2, 100).unwrap();
        assert!((m.captured_mass - 1.0).abs() < 1e-9);
        assert!(first_return_measure(&chain(&fixtures::free2()), 0, 2, 100).is_err());
    }

    #[test]
    fn self_loop_identities() {
        let c = chain(&fixtures::self_loop());
        let r = return_time_identities(&c, 0, 1).unwrap();
        assert_eq!(r.expected_return_time, 1.0);
        assert_eq!(r.return_time_residual, 0.0);
    }

    #[test]
    fn prefix_distribution_point_masses() {
        let g = fixtures::free2();
        let s = SpectralData::compute(&g).unwrap();
        let d = prefix_distribution(&g, &s, 0).unwrap();
        assert_eq!(d.len(), 1);
        assert!((d[0].mass - 1.0).abs() < 1e-12);
        assert!(prefix_distribution(&g, &s, 1).is_err());

        let c = fixtures::two_cycle();
        let s = SpectralData::compute(&c).unwrap();
        let d = prefix_distribution(&c, &s, 1).unwrap();
        assert_eq!(d.len(), 1);
        assert!((d[0].mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn self_loop_tv_is_zero() {
        let g = fixtures::self_loop();
        let c = chain(&g);
        for n in [3, 7, 12] {
            assert!(tv_counting_vs_markov(&g, &c, n, DEFAULT_BUDGET).unwrap().total_variation < 1e-15);
        }
    }

    #[test]
    fn tv_budget_guard() {
        let g = fixtures::free2();
        let c = chain(&g);
        assert!(matches!(
            tv_counting_vs_markov(&g, &c, 12, 100),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
