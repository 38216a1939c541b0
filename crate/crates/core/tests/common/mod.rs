#![allow(dead_code)]

use coarse_clt::graph::Edge;
use coarse_clt::{GraphStructure, Group, GroupSpec};
use proptest::prelude::*;

pub fn opaque(k: usize) -> Group {
    Group::new(GroupSpec::Opaque {
        letters: (0..k).map(|i| format!("x{i}")).collect(),
    })
    .unwrap()
}

/// Random graph on `2..=max_v` vertices with edges labeled by single letters.
pub fn random_graph(max_v: usize, max_e: usize) -> impl Strategy<Value = GraphStructure> {
    (2..=max_v).prop_flat_map(move |n| {
        prop::collection::vec((0..n, 0..n), 1..=max_e).prop_map(move |pairs| {
            let edges = pairs
                .iter()
                .enumerate()
                .map(|(i, &(from, to))| Edge {
                    from,
                    to,
                    label: vec![(i % 4) as u16],
                })
                .collect();
            GraphStructure::new(opaque(4), n, 0, edges).unwrap()
        })
    })
}

/// Random strongly connected graph: a Hamiltonian cycle plus extra edges.
pub fn strongly_connected(max_v: usize, extra: usize) -> impl Strategy<Value = GraphStructure> {
    (2..=max_v).prop_flat_map(move |n| {
        prop::collection::vec((0..n, 0..n), 1..=extra).prop_map(move |pairs| {
            let mut edges: Vec<Edge> = (0..n)
                .map(|v| Edge {
                    from: v,
                    to: (v + 1) % n,
                    label: vec![0],
                })
                .collect();
            for &(from, to) in &pairs {
                edges.push(Edge { from, to, label: vec![1] });
            }
            GraphStructure::new(opaque(2), n, 0, edges).unwrap()
        })
    })
}

/// Dense integer matrix product.
pub fn mat_mul(a: &[Vec<u128>], b: &[Vec<u128>]) -> Vec<Vec<u128>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

pub fn mat_pow(m: &[Vec<u128>], p: usize) -> Vec<Vec<u128>> {
    let n = m.len();
    let mut r: Vec<Vec<u128>> = (0..n).map(|i| (0..n).map(|j| u128::from(i == j)).collect()).collect();
    for _ in 0..p {
        r = mat_mul(&r, m);
    }
    r
}

pub fn matrix_of(g: &GraphStructure) -> Vec<Vec<u128>> {
    g.transition_matrix()
        .into_iter()
        .map(|row| row.into_iter().map(u128::from).collect())
        .collect()
}
