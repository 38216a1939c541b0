//! Geodesic automata on finitely generated groups, their Perron–Frobenius
//! and Parry Markov data, exact sampling of spheres, and an empirical
//! harness for central limit theorems of displacement and translation
//! length.

pub mod actions;
pub mod bignum;
pub mod cli;
pub mod clt;
pub mod combings;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod group;
pub mod markov;
pub mod sampler;
pub mod spectral;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
pub use graph::{load_graph_structure, ComponentReport, GraphStructure, Path};
pub use group::{Group, GroupKind, GroupSpec, Letter, Word};
pub use spectral::{Diagnosis, SpectralConfig, SpectralData};
