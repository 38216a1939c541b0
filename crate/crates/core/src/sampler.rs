//! Exact uniform sampling and enumeration of length-`n` paths, Markov path
//! sampling, and deterministic chunked parallel sampling.
//!
//! A uniform path is built edge by edge: at vertex `v` with `k` steps left,
//! edge `v → t` is taken with probability `c(t,k−1)/c(v,k)`. The choice
//! uses a uniform real `U` revealed 64 bits at a time. Float boundaries
//! settle almost every draw from the first word; draws landing within
//! `1e-12` of a boundary are settled exactly against the integer counts.

use num_bigint::BigUint;
use num_traits::Zero;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::bignum;
use crate::error::{Error, Result};
use crate::graph::{GraphStructure, Path};
use crate::markov::MarkovChain;

/// Samples per RNG substream.
pub const CHUNK: usize = 4096;

const MARGIN: f64 = 1e-12;
const TWO64: f64 = 18_446_744_073_709_551_616.0;

/// Count tables `c(v,k)` for `k ≤ max_len` and float cumulative boundaries.
#[derive(Debug, Clone)]
pub struct SphereSampler {
    graph: GraphStructure,
    max_len: usize,
    /// `table[k][v] = c(v,k)`.
    table: Vec<Vec<BigUint>>,
    /// `bounds[k][v]`: cumulative fractions over `out_edges(v)`, `k ≥ 1`.
    bounds: Vec<Vec<Vec<f64>>>,
}

impl SphereSampler {
    pub fn new(graph: &GraphStructure, max_len: usize) -> Self {
        let table = graph.count_table(max_len);
        let nv = graph.vertex_count();
        let mut bounds = vec![Vec::new()];
        for k in 1..=max_len {
            let row = (0..nv)
                .map(|v| {
                    let total = &table[k][v];
                    let mut acc = BigUint::zero();
                    let mut b = vec![0.0];
                    for &e in graph.out_edges(v) {
                        acc += &table[k - 1][graph.edge(e).to];
                        b.push(if total.is_zero() { 0.0 } else { bignum::ratio(&acc, total) });
                    }
                    b
                })
                .collect();
            bounds.push(row);
        }
        SphereSampler {
            graph: graph.clone(),
            max_len,
            table,
            bounds,
        }
    }

    pub fn graph(&self) -> &GraphStructure {
        &self.graph
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    /// `c(v, k)`.
    pub fn count(&self, v: usize, k: usize) -> &BigUint {
        &self.table[k][v]
    }

    /// Uniform length-`n` path from the initial vertex.
    pub fn sample<R: RngCore>(&self, rng: &mut R, n: usize) -> Result<Path> {
        self.sample_from(rng, self.graph.initial(), n)
    }

    /// Uniform length-`n` path from `v`: each has probability `1/c(v,n)`.
    pub fn sample_from<R: RngCore>(&self, rng: &mut R, v: usize, n: usize) -> Result<Path> {
        self.graph.check_vertex(v)?;
        if n > self.max_len {
            return Err(Error::InvalidInput(format!(
                "length {n} exceeds the table depth {}",
                self.max_len
            )));
        }
        if self.table[n][v].is_zero() {
            return Err(Error::EmptySphere(n));
        }
        let mut at = v;
        let mut edges = Vec::with_capacity(n);
        for k in (1..=n).rev() {
            let out = self.graph.out_edges(at);
            let j = self.choose(rng, &self.bounds[k][at], |j| {
                out[..j].iter().map(|&e| &self.table[k - 1][self.graph.edge(e).to]).sum()
            }, &self.table[k][at]);
            let e = out[j];
            edges.push(e);
            at = self.graph.edge(e).to;
        }
        Ok(Path { start: v, edges })
    }

    /// Uniform length-`n` path among all paths starting at any of `starts`.
    pub fn sample_any_start<R: RngCore>(&self, rng: &mut R, starts: &[usize], n: usize) -> Result<Path> {
        if n > self.max_len {
            return Err(Error::InvalidInput(format!(
                "length {n} exceeds the table depth {}",
                self.max_len
            )));
        }
        let total: BigUint = starts.iter().map(|&v| &self.table[n][v]).sum();
        if total.is_zero() {
            return Err(Error::EmptySphere(n));
        }
        let mut acc = BigUint::zero();
        let mut b = vec![0.0];
        for &v in starts {
            acc += &self.table[n][v];
            b.push(bignum::ratio(&acc, &total));
        }
        let j = self.choose(rng, &b, |j| starts[..j].iter().map(|&v| &self.table[n][v]).sum(), &total);
        self.sample_from(rng, starts[j], n)
    }

    /// Index `j` with `C_j ≤ U·T < C_{j+1}` for a uniform real `U`.
    ///
    /// `fast` holds `C_j/T` as floats; `exact(j)` returns `C_j`.
    fn choose<R: RngCore>(&self, rng: &mut R, fast: &[f64], exact: impl Fn(usize) -> BigUint, total: &BigUint) -> usize {
        let m = fast.len() - 1;
        let first = rng.next_u64();
        let x = first as f64 / TWO64;
        let j = fast[1..].partition_point(|&b| b <= x).min(m - 1);
        if x - fast[j] > MARGIN && fast[j + 1] - x > MARGIN {
            return j;
        }
        // U ∈ [a/2^B, (a+1)/2^B); refine until one interval contains it.
        let mut a = BigUint::from(first);
        let mut bits = 64u64;
        let bounds: Vec<BigUint> = (0..=m).map(|j| if j == m { total.clone() } else { exact(j) }).collect();
        loop {
            let lo = &a * total;
            let hi = (&a + 1u32) * total;
            for j in 0..m {
                if bounds[j] == bounds[j + 1] {
                    continue;
                }
                let cj = &bounds[j] << bits;
                let cj1 = &bounds[j + 1] << bits;
                if cj <= lo && hi <= cj1 {
                    return j;
                }
            }
            a = (a << 64u32) + BigUint::from(rng.next_u64());
            bits += 64;
        }
    }
}

/// Lexicographic stream (by edge index) of all length-`n` paths from the
/// initial vertex.
pub struct SphereIter<'a> {
    graph: &'a GraphStructure,
    alive: Vec<Vec<bool>>,
    n: usize,
    /// `(vertex, position in out_edges)` per depth.
    stack: Vec<(usize, usize)>,
    edges: Vec<usize>,
    done: bool,
}

/// Enumerates the sphere of radius `n`; errors if it has more than `budget` paths.
pub fn enumerate_sphere(graph: &GraphStructure, n: usize, budget: u64) -> Result<SphereIter<'_>> {
    let table = graph.count_table(n);
    let size = &table[n][graph.initial()];
    if *size > BigUint::from(budget) {
        return Err(Error::BudgetExceeded {
            required: size.to_string(),
            budget,
        });
    }
    let alive = table.iter().map(|row| row.iter().map(|c| !c.is_zero()).collect()).collect::<Vec<Vec<bool>>>();
    let done = !alive[n][graph.initial()];
    Ok(SphereIter {
        graph,
        alive,
        n,
        stack: vec![(graph.initial(), 0)],
        edges: Vec::with_capacity(n),
        done,
    })
}

impl Iterator for SphereIter<'_> {
    type Item = Path;

    fn next(&mut self) -> Option<Path> {
        if self.done {
            return None;
        }
        loop {
            if self.edges.len() == self.n {
                let path = Path {
                    start: self.graph.initial(),
                    edges: self.edges.clone(),
                };
                // backtrack one level so the next call continues the search
                self.stack.pop();
                if self.edges.pop().is_none() {
                    self.done = true;
                }
                return Some(path);
            }
            let Some(&mut (v, ref mut pos)) = self.stack.last_mut() else {
                self.done = true;
                return None;
            };
            let out = self.graph.out_edges(v);
            let remaining = self.n - self.edges.len() - 1;
            let mut advanced = false;
            while *pos < out.len() {
                let e = out[*pos];
                *pos += 1;
                let to = self.graph.edge(e).to;
                if self.alive[remaining][to] {
                    self.edges.push(e);
                    self.stack.push((to, 0));
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                self.stack.pop();
                if self.edges.pop().is_none() {
                    self.done = true;
                    return None;
                }
            }
        }
    }
}

/// A length-`n` path of the Markov chain: start from `π`, then edges by `p_ij`.
pub fn sample_markov<R: RngCore>(chain: &MarkovChain, rng: &mut R, n: usize) -> Result<Path> {
    let graph = chain.graph();
    let start = pick(rng, &chain.pi).ok_or_else(|| Error::InvalidInput("initial distribution has no mass".into()))?;
    let mut at = start;
    let mut edges = Vec::with_capacity(n);
    for _ in 0..n {
        let out = graph.out_edges(at);
        let probs: Vec<f64> = out.iter().map(|&e| chain.edge_prob[e]).collect();
        let j = pick(rng, &probs).ok_or_else(|| Error::InvalidInput(format!("vertex {at} has no outgoing mass")))?;
        edges.push(out[j]);
        at = graph.edge(out[j]).to;
    }
    Ok(Path { start, edges })
}

fn pick<R: RngCore>(rng: &mut R, weights: &[f64]) -> Option<usize> {
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return None;
    }
    let x = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    let mut last = None;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            acc += w;
            last = Some(i);
            if x < acc {
                return Some(i);
            }
        }
    }
    last
}

/// The RNG for chunk `chunk` of a run seeded with `seed`.
pub fn chunk_rng(seed: u64, chunk: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

/// Evaluates `f(rng, index)` for `index < count`, in parallel over chunks of
/// [`CHUNK`] samples with one substream per chunk; output is in index order
/// and does not depend on the number of worker threads.
pub fn par_samples<T, F>(count: usize, seed: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut ChaCha20Rng, usize) -> Result<T> + Sync,
{
    let chunks = count.div_ceil(CHUNK);
    let parts: Vec<Result<Vec<T>>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(seed, c);
            (c * CHUNK..((c + 1) * CHUNK).min(count)).map(|i| f(&mut rng, i)).collect()
        })
        .collect();
    let mut out = Vec::with_capacity(count);
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}
