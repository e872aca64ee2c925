//! Optimal linear arrangements of Halin graphs.
//!
//! A Halin graph is a plane tree without degree-2 vertices whose leaves are
//! joined by a cycle. Every arrangement costs at least `2(n−1)` plus the
//! optimal cost of the tree alone; when the tree is recursively balanced
//! that bound is attained and [`halin_ola`] constructs such an arrangement in
//! `O(n log n)`.

pub mod cli;
pub mod generators;
pub mod graph;
pub mod halin_ola;
pub mod io;
pub mod layout;
pub mod property_suite;
pub mod tree_ola;

pub use generators::GenSpec;
pub use graph::{EmbeddedTree, Graph, HalinGraph, VertexId};
pub use halin_ola::{
    certify, direct_rbt_halin_ola, halin_lower_bound, rearrange_to_halin_ola, OlaCertificate,
    SwapTrace,
};
pub use layout::{halin_la_cost, la_cost, Layout};
pub use tree_ola::{brute_force_ola, rbt_ola};
