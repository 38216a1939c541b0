//! Graph structures `(Γ, v₀, ev)`: finite directed graphs whose edges are
//! labeled by words in a group, with a distinguished initial vertex.

use std::collections::VecDeque;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Group, GroupSpec, Word};
use crate::spectral;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub label: Word,
}

/// A finite directed graph with initial vertex and edge labels.
///
/// Immutable after construction.
#[derive(Debug, Clone)]
pub struct GraphStructure {
    vertex_count: usize,
    initial: usize,
    group: Group,
    edges: Vec<Edge>,
    out: Vec<Vec<usize>>,
}

/// On-disk form of a graph structure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutomatonDocument {
    pub vertices: usize,
    pub initial: usize,
    pub group: GroupSpec,
    pub edges: Vec<EdgeDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDocument {
    pub from: usize,
    pub to: usize,
    pub label: String,
}

/// Parses an automaton document.
pub fn load_graph_structure(source: &str) -> Result<GraphStructure> {
    let doc: AutomatonDocument = serde_json::from_str(source)?;
    GraphStructure::from_document(&doc)
}

impl GraphStructure {
    pub fn new(group: Group, vertex_count: usize, initial: usize, edges: Vec<Edge>) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::Malformed("a graph structure needs at least one vertex".into()));
        }
        if initial >= vertex_count {
            return Err(Error::DanglingVertex {
                index: initial,
                vertices: vertex_count,
                context: "initial vertex".into(),
            });
        }
        let alphabet_len = group.alphabet().len();
        let mut out = vec![Vec::new(); vertex_count];
        for (i, e) in edges.iter().enumerate() {
            for v in [e.from, e.to] {
                if v >= vertex_count {
                    return Err(Error::DanglingVertex {
                        index: v,
                        vertices: vertex_count,
                        context: format!("edge {i}"),
                    });
                }
            }
            if let Some(&x) = e.label.iter().find(|&&x| x as usize >= alphabet_len) {
                return Err(Error::UnknownLabel {
                    label: format!("#{x}"),
                    context: format!("edge {i}"),
                });
            }
            out[e.from].push(i);
        }
        Ok(GraphStructure {
            vertex_count,
            initial,
            group,
            edges,
            out,
        })
    }

    pub fn from_document(doc: &AutomatonDocument) -> Result<Self> {
        let group = Group::new(doc.group.clone())?;
        let mut edges = Vec::with_capacity(doc.edges.len());
        for (i, e) in doc.edges.iter().enumerate() {
            for v in [e.from, e.to] {
                if v >= doc.vertices {
                    return Err(Error::DanglingVertex {
                        index: v,
                        vertices: doc.vertices,
                        context: format!("edge {i}"),
                    });
                }
            }
            let label = group.parse_word(&e.label).map_err(|err| match err {
                Error::UnknownLabel { label, .. } => Error::UnknownLabel {
                    label,
                    context: format!("edge {i}"),
                },
                other => other,
            })?;
            edges.push(Edge {
                from: e.from,
                to: e.to,
                label,
            });
        }
        Self::new(group, doc.vertices, doc.initial, edges)
    }

    pub fn to_document(&self) -> AutomatonDocument {
        AutomatonDocument {
            vertices: self.vertex_count,
            initial: self.initial,
            group: self.group.spec().clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeDocument {
                    from: e.from,
                    to: e.to,
                    label: self.group.format_word(&e.label),
                })
                .collect(),
        }
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_document()).expect("document serializes");
        s.push('\n');
        s
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> &Edge {
        &self.edges[i]
    }

    /// Outgoing edge indices of `v`, in increasing order.
    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn with_initial(&self, initial: usize) -> Result<Self> {
        Self::new(self.group.clone(), self.vertex_count, initial, self.edges.clone())
    }

    pub(crate) fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.vertex_count {
            Ok(())
        } else {
            Err(Error::InvalidVertex(v))
        }
    }

    /// Number of edges from `i` to `j`, as a dense matrix.
    pub fn transition_matrix(&self) -> Vec<Vec<u64>> {
        let mut m = vec![vec![0u64; self.vertex_count]; self.vertex_count];
        for e in &self.edges {
            m[e.from][e.to] += 1;
        }
        m
    }

    /// One step of the backward count recursion `c(v,k) = Σ_{v→w} c(w,k−1)`.
    pub(crate) fn step_counts(&self, prev: &[BigUint]) -> Vec<BigUint> {
        (0..self.vertex_count)
            .map(|v| {
                self.out[v]
                    .iter()
                    .fold(BigUint::zero(), |acc, &e| acc + &prev[self.edges[e].to])
            })
            .collect()
    }

    /// Exact number of length-`n` paths starting at `v`.
    pub fn count_paths(&self, v: usize, n: usize) -> Result<BigUint> {
        self.check_vertex(v)?;
        let mut c = vec![BigUint::one(); self.vertex_count];
        for _ in 0..n {
            c = self.step_counts(&c);
        }
        Ok(c.swap_remove(v))
    }

    /// Number of length-`n` paths from every vertex.
    pub fn count_paths_all(&self, n: usize) -> Vec<BigUint> {
        let mut c = vec![BigUint::one(); self.vertex_count];
        for _ in 0..n {
            c = self.step_counts(&c);
        }
        c
    }

    /// `table[k][v]` = number of length-`k` paths from `v`, for `k ≤ n`.
    pub fn count_table(&self, n: usize) -> Vec<Vec<BigUint>> {
        let mut table = Vec::with_capacity(n + 1);
        table.push(vec![BigUint::one(); self.vertex_count]);
        for k in 1..=n {
            let next = self.step_counts(&table[k - 1]);
            table.push(next);
        }
        table
    }

    /// Row vector `e_vᵀ Mⁿ`: number of length-`n` paths from `v` to each vertex.
    pub fn paths_from(&self, v: usize, n: usize) -> Result<Vec<BigUint>> {
        self.check_vertex(v)?;
        let mut row = vec![BigUint::zero(); self.vertex_count];
        row[v] = BigUint::one();
        for _ in 0..n {
            row = self.step_row(&row);
        }
        Ok(row)
    }

    pub(crate) fn step_row(&self, row: &[BigUint]) -> Vec<BigUint> {
        let mut next = vec![BigUint::zero(); self.vertex_count];
        for e in &self.edges {
            if !row[e.from].is_zero() {
                next[e.to] += &row[e.from];
            }
        }
        next
    }

    /// `Mᵐ` over exact integers.
    pub fn path_count_matrix(&self, m: usize) -> Vec<Vec<BigUint>> {
        (0..self.vertex_count)
            .map(|v| self.paths_from(v, m).expect("valid vertex"))
            .collect()
    }

    /// Strongly connected components with growth classification.
    pub fn components(&self) -> ComponentReport {
        ComponentReport::compute(self, &spectral::SpectralConfig::default())
    }

    /// The `p`-step structure: one edge per length-`p` path, labeled by the
    /// concatenated word. Its transition matrix is `Mᵖ`.
    pub fn power_graph(&self, p: usize, budget: u64) -> Result<GraphStructure> {
        if p == 0 {
            return Err(Error::InvalidInput("power must be positive".into()));
        }
        let total: BigUint = (0..self.vertex_count)
            .map(|v| self.count_paths(v, p).expect("valid vertex"))
            .sum();
        if total > BigUint::from(budget) {
            return Err(Error::BudgetExceeded {
                required: total.to_string(),
                budget,
            });
        }
        let mut edges = Vec::new();
        for v in 0..self.vertex_count {
            let mut stack: Vec<usize> = Vec::with_capacity(p);
            self.power_edges(v, v, p, &mut stack, &mut edges);
        }
        Self::new(self.group.clone(), self.vertex_count, self.initial, edges)
    }

    fn power_edges(&self, origin: usize, at: usize, p: usize, stack: &mut Vec<usize>, out: &mut Vec<Edge>) {
        if stack.len() == p {
            let label = stack.iter().flat_map(|&e| self.edges[e].label.iter().copied()).collect();
            out.push(Edge {
                from: origin,
                to: at,
                label,
            });
            return;
        }
        for &e in &self.out[at] {
            stack.push(e);
            self.power_edges(origin, self.edges[e].to, p, stack, out);
            stack.pop();
        }
    }

    /// Period of a strongly connected component: gcd of its cycle lengths.
    pub fn period(&self, component: &[usize]) -> Result<usize> {
        let Some(&root) = component.first() else {
            return Err(Error::InvalidInput("empty component".into()));
        };
        for &v in component {
            self.check_vertex(v)?;
        }
        let mut inside = vec![false; self.vertex_count];
        for &v in component {
            inside[v] = true;
        }
        let mut level: Vec<Option<usize>> = vec![None; self.vertex_count];
        level[root] = Some(0);
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &e in &self.out[v] {
                let w = self.edges[e].to;
                if inside[w] && level[w].is_none() {
                    level[w] = Some(level[v].unwrap() + 1);
                    queue.push_back(w);
                }
            }
        }
        if component.iter().any(|&v| level[v].is_none()) {
            return Err(Error::InvalidInput(
                "vertex set is not strongly connected".into(),
            ));
        }
        let mut g = 0usize;
        let mut internal_edges = 0usize;
        for &v in component {
            for &e in &self.out[v] {
                let w = self.edges[e].to;
                if inside[w] {
                    internal_edges += 1;
                    let (lv, lw) = (level[v].unwrap() as i64, level[w].unwrap() as i64);
                    g = g.gcd(&((lv + 1 - lw).unsigned_abs() as usize));
                }
            }
        }
        if internal_edges == 0 {
            return Err(Error::TransientComponent(format!(
                "component {component:?} has no cycle"
            )));
        }
        Ok(g)
    }

    /// Induced structure on `vertices` (renumbered in the given order); the
    /// first listed vertex becomes the initial vertex.
    pub fn restrict(&self, vertices: &[usize]) -> Result<GraphStructure> {
        let mut index = vec![usize::MAX; self.vertex_count];
        for (i, &v) in vertices.iter().enumerate() {
            self.check_vertex(v)?;
            index[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| index[e.from] != usize::MAX && index[e.to] != usize::MAX)
            .map(|e| Edge {
                from: index[e.from],
                to: index[e.to],
                label: e.label.clone(),
            })
            .collect();
        Self::new(self.group.clone(), vertices.len(), 0, edges)
    }
}

/// A finite path: start vertex and composable edge sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Path {
    pub start: usize,
    pub edges: Vec<usize>,
}

impl Path {
    pub fn empty(start: usize) -> Self {
        Path {
            start,
            edges: Vec::new(),
        }
    }

    pub fn new(graph: &GraphStructure, start: usize, edges: Vec<usize>) -> Result<Self> {
        graph.check_vertex(start)?;
        let mut at = start;
        for (k, &e) in edges.iter().enumerate() {
            let edge = graph
                .edges
                .get(e)
                .ok_or_else(|| Error::InvalidInput(format!("no edge {e}")))?;
            if edge.from != at {
                return Err(Error::InvalidInput(format!(
                    "edge {e} at position {k} does not start at vertex {at}"
                )));
            }
            at = edge.to;
        }
        Ok(Path { start, edges })
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn end(&self, graph: &GraphStructure) -> usize {
        self.edges.last().map_or(self.start, |&e| graph.edges[e].to)
    }

    /// The evaluated word `ḡ`.
    pub fn word(&self, graph: &GraphStructure) -> Word {
        self.edges
            .iter()
            .flat_map(|&e| graph.edges[e].label.iter().copied())
            .collect()
    }

    /// `g(i)`: the length-`i` prefix, or the whole path when `i ≥ ‖g‖`.
    pub fn prefix(&self, i: usize) -> Path {
        Path {
            start: self.start,
            edges: self.edges[..i.min(self.edges.len())].to_vec(),
        }
    }

    pub fn format(&self, graph: &GraphStructure) -> String {
        graph.group().format_word(&self.word(graph))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentInfo {
    pub vertices: Vec<usize>,
    /// Contains at least one cycle.
    pub recurrent: bool,
    /// Perron root of the component's transition matrix (0 when transient).
    pub spectral_radius: f64,
    pub period: Option<usize>,
    pub maximal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentReport {
    pub components: Vec<ComponentInfo>,
    pub vertex_component: Vec<usize>,
    /// Spectral radius of the whole transition matrix; `None` if acyclic.
    pub lambda: Option<f64>,
    pub large_growth: Vec<usize>,
    pub small_growth: Vec<usize>,
    /// lcm of the periods of the maximal components.
    pub structure_period: Option<usize>,
    /// Longest chain of maximal components joined by directed paths.
    pub maximal_chain_length: usize,
    pub period_rule: &'static str,
}

impl ComponentReport {
    pub fn compute(graph: &GraphStructure, cfg: &spectral::SpectralConfig) -> Self {
        let n = graph.vertex_count();
        let adjacency: Vec<Vec<usize>> = (0..n)
            .map(|v| graph.out_edges(v).iter().map(|&e| graph.edge(e).to).collect())
            .collect();
        // Tarjan returns components in reverse topological order.
        let mut sccs = tarjan_scc(&adjacency);
        for c in &mut sccs {
            c.sort_unstable();
        }
        let mut vertex_component = vec![0; n];
        for (i, c) in sccs.iter().enumerate() {
            for &v in c {
                vertex_component[v] = i;
            }
        }
        let mut components: Vec<ComponentInfo> = sccs
            .iter()
            .map(|c| {
                let period = graph.period(c).ok();
                let spectral_radius = match period {
                    Some(p) => spectral::irreducible_radius(graph, c, p, cfg),
                    None => 0.0,
                };
                ComponentInfo {
                    vertices: c.clone(),
                    recurrent: period.is_some(),
                    spectral_radius,
                    period,
                    maximal: false,
                }
            })
            .collect();
        let lambda = components
            .iter()
            .filter(|c| c.recurrent)
            .map(|c| c.spectral_radius)
            .fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.max(r))));
        if let Some(l) = lambda {
            for c in &mut components {
                c.maximal = c.recurrent && (c.spectral_radius - l).abs() <= cfg.maximal_tolerance * l;
            }
        }

        // Longest chain of maximal components; successors of component i have
        // smaller indices in Tarjan order.
        let mut chain = vec![0usize; components.len()];
        for i in 0..components.len() {
            let mut best = 0;
            for &v in &components[i].vertices {
                for &w in &adjacency[v] {
                    let j = vertex_component[w];
                    if j != i {
                        best = best.max(chain[j]);
                    }
                }
            }
            chain[i] = best + usize::from(components[i].maximal);
        }
        let maximal_chain_length = chain.iter().copied().max().unwrap_or(0);

        let mut large = vec![false; n];
        let mut queue: VecDeque<usize> = VecDeque::new();
        let mut reverse = vec![Vec::new(); n];
        for (v, ws) in adjacency.iter().enumerate() {
            for &w in ws {
                reverse[w].push(v);
            }
        }
        for c in components.iter().filter(|c| c.maximal) {
            for &v in &c.vertices {
                large[v] = true;
                queue.push_back(v);
            }
        }
        while let Some(w) = queue.pop_front() {
            for &v in &reverse[w] {
                if !large[v] {
                    large[v] = true;
                    queue.push_back(v);
                }
            }
        }
        let structure_period = components
            .iter()
            .filter(|c| c.maximal)
            .filter_map(|c| c.period)
            .fold(None, |acc: Option<usize>, p| Some(acc.map_or(p, |a| a.lcm(&p))));

        ComponentReport {
            components,
            vertex_component,
            lambda,
            large_growth: (0..n).filter(|&v| large[v]).collect(),
            small_growth: (0..n).filter(|&v| !large[v]).collect(),
            structure_period,
            maximal_chain_length,
            period_rule: "lcm over maximal components",
        }
    }

    pub fn maximal_components(&self) -> impl Iterator<Item = &ComponentInfo> {
        self.components.iter().filter(|c| c.maximal)
    }

    pub fn is_large_growth(&self, v: usize) -> bool {
        self.large_growth.binary_search(&v).is_ok()
    }
}

pub(crate) fn tarjan_scc(graph: &[Vec<usize>]) -> Vec<Vec<usize>> {
    struct State {
        index: usize,
        stack: Vec<usize>,
        on_stack: Vec<bool>,
        idx: Vec<Option<usize>>,
        low: Vec<usize>,
        comps: Vec<Vec<usize>>,
    }

    fn connect(v: usize, graph: &[Vec<usize>], s: &mut State) {
        s.idx[v] = Some(s.index);
        s.low[v] = s.index;
        s.index += 1;
        s.stack.push(v);
        s.on_stack[v] = true;
        for &w in &graph[v] {
            match s.idx[w] {
                None => {
                    connect(w, graph, s);
                    s.low[v] = s.low[v].min(s.low[w]);
                }
                Some(iw) if s.on_stack[w] => s.low[v] = s.low[v].min(iw),
                _ => {}
            }
        }
        if Some(s.low[v]) == s.idx[v] {
            let mut comp = Vec::new();
            loop {
                let w = s.stack.pop().expect("stack underflow");
                s.on_stack[w] = false;
                comp.push(w);
                if w == v {
                    break;
                }
            }
            s.comps.push(comp);
        }
    }

    let n = graph.len();
    let mut s = State {
        index: 0,
        stack: Vec::new(),
        on_stack: vec![false; n],
        idx: vec![None; n],
        low: vec![0; n],
        comps: Vec::new(),
    };
    for v in 0..n {
        if s.idx[v].is_none() {
            connect(v, graph, &mut s);
        }
    }
    s.comps
}
