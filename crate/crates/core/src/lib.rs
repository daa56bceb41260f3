//! Matrix-polytope stability problems built from graph reductions.
//!
//! Graphs are turned into families of block matrices whose convex hull
//! contains a stable (resp. unstable, M-matrix, Hurwitz) member exactly when
//! the graph has a large independent set (resp. clique). The crate builds
//! those families, decides the questions with certified witnesses, checks
//! the closed-form spectra against a dense eigensolver, and simulates
//! switched continuous-time systems on the resulting polytopes.

pub mod error;
pub mod graph;
pub mod matrix;
pub mod optimize;
pub mod reductions;
pub mod simplex;
pub mod spectral;
pub mod switched;

pub use error::DimensionMismatch;
pub use graph::Graph;
pub use matrix::Matrix;
pub use simplex::SimplexPoint;
