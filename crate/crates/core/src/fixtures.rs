//! Small named structures used by tests, the `verify` suite and the docs.

use crate::combings::{free_group_combing, raag_shortlex_combing, CommutationGraph, CoxeterKind};
use crate::graph::{Edge, GraphStructure};
use crate::group::{Group, GroupSpec, MatrixGenerator, Scalar};

fn opaque(letters: &[&str]) -> Group {
    Group::new(GroupSpec::Opaque {
        letters: letters.iter().map(|s| s.to_string()).collect(),
    })
    .expect("fixture alphabet is valid")
}

fn build(group: Group, vertices: usize, edges: &[(usize, usize, &str)]) -> GraphStructure {
    let edges = edges
        .iter()
        .map(|&(from, to, label)| Edge {
            from,
            to,
            label: group.parse_word(label).expect("fixture label is valid"),
        })
        .collect();
    GraphStructure::new(group, vertices, 0, edges).expect("fixture is valid")
}

/// Golden-mean shift: `x` loops at 0, `y` goes 0→1, `z` returns 1→0.
pub fn golden_mean() -> GraphStructure {
    build(opaque(&["x", "y", "z"]), 2, &[(0, 0, "x"), (0, 1, "y"), (1, 0, "z")])
}

/// Directed 2-cycle.
pub fn two_cycle() -> GraphStructure {
    build(opaque(&["x", "y"]), 2, &[(0, 1, "x"), (1, 0, "y")])
}

pub fn self_loop() -> GraphStructure {
    build(opaque(&["x"]), 1, &[(0, 0, "x")])
}

/// Self-loops at two vertices joined by one edge: `M = [[1,1],[0,1]]`.
pub fn jordan() -> GraphStructure {
    build(opaque(&["x", "y", "z"]), 2, &[(0, 0, "x"), (0, 1, "y"), (1, 1, "z")])
}

/// One vertex, no edges.
pub fn single_vertex() -> GraphStructure {
    build(opaque(&["x"]), 1, &[])
}

pub fn free2() -> GraphStructure {
    free_group_combing(2).expect("rank 2")
}

/// The free-group automaton with its letter component duplicated: the start
/// vertex feeds two isomorphic maximal components.
pub fn doubled_free2() -> GraphStructure {
    let f2 = free2();
    let mut edges = Vec::new();
    for copy in 0..2 {
        let shift = 4 * copy;
        for e in f2.edges() {
            let from = if e.from == 0 { 0 } else { e.from + shift };
            edges.push(Edge {
                from,
                to: e.to + shift,
                label: e.label.clone(),
            });
        }
    }
    edges.sort_by_key(|e| e.from);
    GraphStructure::new(f2.group().clone(), 9, 0, edges).expect("doubled structure is valid")
}

/// `Z²` as the right-angled Artin group on a complete graph with two vertices.
pub fn z2() -> GraphStructure {
    raag_shortlex_combing(&CommutationGraph::new(&["a", "b"], &[("a", "b")], CoxeterKind::Artin)).expect("valid")
}

/// Infinite dihedral group as a right-angled Coxeter group.
pub fn infinite_dihedral() -> GraphStructure {
    raag_shortlex_combing(&CommutationGraph::new(&["a", "b"], &[], CoxeterKind::Coxeter)).expect("valid")
}

/// Sanov subgroup `⟨[[1,2],[0,1]], [[1,0],[2,1]]⟩` of `SL₂(Z)`, free of rank 2.
pub fn sanov_group() -> GroupSpec {
    let n = |x: f64| Scalar::Number(x);
    GroupSpec::Matrix {
        generators: vec![
            MatrixGenerator {
                name: "a".into(),
                matrix: [n(1.0), n(2.0), n(0.0), n(1.0)],
            },
            MatrixGenerator {
                name: "b".into(),
                matrix: [n(1.0), n(0.0), n(2.0), n(1.0)],
            },
        ],
    }
}

/// No-backtracking automaton for the Sanov subgroup.
pub fn sanov() -> GraphStructure {
    let f2 = free2();
    let group = Group::new(sanov_group()).expect("valid");
    GraphStructure::new(group, f2.vertex_count(), 0, f2.edges().to_vec()).expect("valid")
}
