//! Spectral analysis of finite regular and bipartite biregular graphs as
//! `L^p`-expanders.
//!
//! The library computes Satake parameters from the adjacency spectrum,
//! classifies graphs by the least `p` for which they are `L^p`-expanders,
//! verifies the operator calculus of the covering tree (vertex Hecke
//! operators, the Iwahori algebra on directed edges, raising/lowering
//! operators and their matrix models) on concrete graphs, and measures the
//! `L^p` growth of geometric realizations on truncated universal covers.
//!
//! Module map:
//!
//! * [`graph`] — edge-list ingestion, validation, regularity classification,
//!   directed-edge indexing, and a configuration-model generator.
//! * [`cover`] — depth-`R` truncation of the universal covering tree, lifts,
//!   spherical averaging, sectorial/spherical eigenfunctions, shell norms.
//! * [`satake`] — exact Laurent-polynomial Satake images, numeric `A_k(θ)`,
//!   temperedness exponents, and the 2x2 / 3x3 / 4x4 matrix models.
//! * [`hecke`] — concrete operator actions on graphs: `A_k` by recurrence,
//!   the edge generators, normal-form words, `U`/`D`, and the relation suite.
//! * [`spectral`] — eigendecomposition, expander classification, the
//!   non-backtracking spectrum with zeta cross-checks, and the norm-bound
//!   and approximate-eigenvector validations.
//! * [`verify`] — the full fixture battery behind `lpx verify`.

pub mod cover;
pub mod fixtures;
pub mod graph;
pub mod hecke;
pub mod linalg;
pub mod report;
pub mod rng;
pub mod satake;
pub mod spectral;
pub mod verify;

pub use graph::{Graph, RegularityClass};
pub use spectral::{BiregularReport, SpectralReport};
