//! Built-in geodesic combings: the no-backtracking automaton for free
//! groups and shortlex automata for right-angled Artin and Coxeter groups,
//! together with brute-force checks of their fellow-traveler property.

use std::collections::HashMap;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, GraphStructure, Path};
use crate::group::{Group, GroupKind, GroupSpec, Letter, Word};

/// Thick bicombings are taken from the literature for the built-ins; the
/// property is not checked algorithmically.
pub const THICKNESS: &str = "by-citation";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoxeterKind {
    Artin,
    Coxeter,
}

/// Simplicial commutation graph on an ordered generating set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommutationGraph {
    pub generators: Vec<String>,
    pub commuting: Vec<[String; 2]>,
    pub kind: CoxeterKind,
}

impl CommutationGraph {
    pub fn new(generators: &[&str], commuting: &[(&str, &str)], kind: CoxeterKind) -> Self {
        CommutationGraph {
            generators: generators.iter().map(|s| s.to_string()).collect(),
            commuting: commuting.iter().map(|(a, b)| [a.to_string(), b.to_string()]).collect(),
            kind,
        }
    }

    pub fn group_spec(&self) -> GroupSpec {
        match self.kind {
            CoxeterKind::Artin => GroupSpec::Raag {
                generators: self.generators.clone(),
                commuting: self.commuting.clone(),
            },
            CoxeterKind::Coxeter => GroupSpec::Racg {
                generators: self.generators.clone(),
                commuting: self.commuting.clone(),
            },
        }
    }

    /// Whether the graph is a join, i.e. the group splits as a direct product.
    pub fn is_join(&self) -> bool {
        let n = self.generators.len();
        if n < 2 {
            return false;
        }
        let idx: HashMap<&str, usize> = self.generators.iter().enumerate().map(|(i, g)| (g.as_str(), i)).collect();
        let mut adj = vec![vec![false; n]; n];
        for [a, b] in &self.commuting {
            if let (Some(&i), Some(&j)) = (idx.get(a.as_str()), idx.get(b.as_str())) {
                adj[i][j] = true;
                adj[j][i] = true;
            }
        }
        // Join iff the complement graph is disconnected.
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for w in 0..n {
                if w != v && !adj[v][w] && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.iter().any(|s| !s)
    }
}

/// No-backtracking automaton for the free group of rank `k`: a start vertex
/// plus one vertex per letter, the letter vertex recording the last letter read.
pub fn free_group_combing(k: usize) -> Result<GraphStructure> {
    if k < 2 {
        return Err(Error::InvalidInput(format!(
            "free group of rank {k} is elementary; rank must be at least 2"
        )));
    }
    let group = Group::free(k)?;
    let letters: Vec<Letter> = group.alphabet().letters().collect();
    let vertex = |x: Letter| x as usize + 1;
    let mut edges = Vec::new();
    for &x in &letters {
        edges.push(Edge {
            from: 0,
            to: vertex(x),
            label: vec![x],
        });
    }
    for &x in &letters {
        for &y in &letters {
            if group.alphabet().inverse(x) != Some(y) {
                edges.push(Edge {
                    from: vertex(x),
                    to: vertex(y),
                    label: vec![y],
                });
            }
        }
    }
    GraphStructure::new(group, letters.len() + 1, 0, edges)
}

/// Shortlex automaton for a right-angled Artin or Coxeter group.
///
/// A state is the set of letters that may not be read next. After reading
/// `z` from state `B` the new state is
///
/// ```text
/// { y ∈ B : y commutes with z } ∪ { z⁻¹ } ∪ { y < z : y commutes with z }
/// ```
///
/// (`z⁻¹ = z` for Coxeter groups). A word is accepted iff it never reads a
/// blocked letter, which holds iff it has no factor `x u x⁻¹` with `u`
/// commuting with `x` and no factor `x u y` with `y < x` commuting with `x u`.
/// Those are exactly the shortlex-least geodesics.
pub fn raag_shortlex_combing(cg: &CommutationGraph) -> Result<GraphStructure> {
    if cg.generators.is_empty() {
        return Err(Error::InvalidInput("empty generator set".into()));
    }
    let group = Group::new(cg.group_spec())?;
    let alphabet = group.alphabet();
    if alphabet.len() > 128 {
        return Err(Error::InvalidInput("at most 128 letters are supported".into()));
    }
    let letters: Vec<Letter> = alphabet.letters().collect();
    let bit = |x: Letter| 1u128 << x;

    let mut states: Vec<u128> = vec![0];
    let mut index: HashMap<u128, usize> = HashMap::from([(0, 0)]);
    let mut edges = Vec::new();
    let mut next_state = 0;
    while next_state < states.len() {
        let blocked = states[next_state];
        for &z in &letters {
            if blocked & bit(z) != 0 {
                continue;
            }
            let mut succ = bit(alphabet.inverse(z).expect("right-angled letters have inverses"));
            for &y in &letters {
                let commutes = group.commutes(y, z);
                if commutes && (blocked & bit(y) != 0 || y < z) {
                    succ |= bit(y);
                }
            }
            let target = *index.entry(succ).or_insert_with(|| {
                states.push(succ);
                states.len() - 1
            });
            edges.push(Edge {
                from: next_state,
                to: target,
                label: vec![z],
            });
        }
        next_state += 1;
    }
    GraphStructure::new(group, states.len(), 0, edges)
}

/// The accepted path from the initial vertex evaluating to the same element
/// as `word`.
pub fn geodesic_representative(graph: &GraphStructure, word: &[Letter]) -> Result<Path> {
    let normal = graph.group().reduce(word)?;
    let mut at = graph.initial();
    let mut edges = Vec::with_capacity(normal.len());
    for &x in &normal {
        let e = graph
            .out_edges(at)
            .iter()
            .copied()
            .find(|&e| graph.edge(e).label.as_slice() == [x])
            .ok_or_else(|| {
                Error::InvalidInput(format!(
                    "structure does not accept the normal form '{}'",
                    graph.group().format_word(&normal)
                ))
            })?;
        edges.push(e);
        at = graph.edge(e).to;
    }
    Ok(Path {
        start: graph.initial(),
        edges,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FellowTravelerReport {
    /// `max d_G(ḡ(i), b₁·h̄(i))` over all checked triples.
    pub constant: usize,
    /// `max |‖g‖ − ‖h‖|`.
    pub length_defect: usize,
    pub maxlen: usize,
    pub paths_checked: u64,
    pub witness: Option<FellowTravelerWitness>,
    pub thickness: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct FellowTravelerWitness {
    pub h: String,
    pub b1: String,
    pub b2: String,
    pub g: String,
    pub position: usize,
}

/// Brute-force fellow-traveler constant: for all paths `h` from `v₀` of
/// length at most `maxlen` and `b₁, b₂ ∈ B`, compare the combing path `g`
/// of `b₁ h̄ b₂` with `b₁·h̄` prefix by prefix.
pub fn fellow_traveler_constant(
    graph: &GraphStructure,
    b: &[Word],
    maxlen: usize,
    budget: u64,
) -> Result<FellowTravelerReport> {
    let group = graph.group();
    if !group.has_word_problem() {
        return Err(Error::InvalidInput("fellow traveler check needs a word problem".into()));
    }
    let table = graph.count_table(maxlen);
    let total: BigUint = table.iter().map(|row| &row[graph.initial()]).sum();
    if total > BigUint::from(budget) {
        return Err(Error::BudgetExceeded {
            required: total.to_string(),
            budget,
        });
    }
    let mut report = FellowTravelerReport {
        constant: 0,
        length_defect: 0,
        maxlen,
        paths_checked: 0,
        witness: None,
        thickness: THICKNESS,
    };
    let mut stack: Vec<usize> = Vec::new();
    visit_paths(graph, graph.initial(), maxlen, &mut stack, &mut |edges| {
        report.paths_checked += 1;
        let h = Path {
            start: graph.initial(),
            edges: edges.to_vec(),
        };
        let h_word = h.word(graph);
        for b1 in b {
            for b2 in b {
                let target = group.concat(&[b1, &h_word, b2]);
                let g = geodesic_representative(graph, &target)?;
                report.length_defect = report.length_defect.max(g.len().abs_diff(h.len()));
                for i in 0..=g.len().max(h.len()) {
                    let gi = g.prefix(i).word(graph);
                    let hi = group.concat(&[b1, &h.prefix(i).word(graph)]);
                    let d = group.distance(&gi, &hi)?;
                    if d > report.constant || (report.witness.is_none() && d == report.constant) {
                        report.constant = d;
                        report.witness = Some(FellowTravelerWitness {
                            h: group.format_word(&h_word),
                            b1: group.format_word(b1),
                            b2: group.format_word(b2),
                            g: g.format(graph),
                            position: i,
                        });
                    }
                }
            }
        }
        Ok(())
    })?;
    Ok(report)
}

/// Calls `f` on every path from `v` of length at most `maxlen`, in
/// lexicographic order of edge indices (shorter prefixes first).
fn visit_paths<F>(graph: &GraphStructure, v: usize, maxlen: usize, stack: &mut Vec<usize>, f: &mut F) -> Result<()>
where
    F: FnMut(&[usize]) -> Result<()>,
{
    f(stack)?;
    if stack.len() == maxlen {
        return Ok(());
    }
    for &e in graph.out_edges(v) {
        stack.push(e);
        visit_paths(graph, graph.edge(e).to, maxlen, stack, f)?;
        stack.pop();
    }
    Ok(())
}

/// Whether the structure carries one of the groups the built-in combings use.
pub fn is_builtin_group(graph: &GraphStructure) -> bool {
    matches!(
        graph.group().kind(),
        GroupKind::Free | GroupKind::Artin | GroupKind::Coxeter | GroupKind::Matrix
    )
}
