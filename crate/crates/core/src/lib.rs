//! Mutual-space generation for multi-client mixed-reality telepresence.
//!
//! Client floorplans are aligned to a host floorplan ([`matching`]), users are
//! placed around the chosen interaction target ([`placement`]), and each
//! client receives a walled subspace of the host floor ([`subspace`]).
//! [`pipeline::run_method`] runs one method end to end and [`evaluation`]
//! sweeps methods over a corpus.
//!
//! The guide under `book/` covers each stage with runnable examples.

pub mod config;
pub mod corpus;
pub mod evaluation;
pub mod floorplan;
pub mod geometry;
pub mod matching;
pub mod pipeline;
pub mod placement;
pub mod render;
pub mod scenegraph;
pub mod subspace;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/floorplans.md")]
    mod floorplans {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/matching.md")]
    mod matching {}
    #[doc = include_str!("../../../book/src/placement.md")]
    mod placement {}
    #[doc = include_str!("../../../book/src/subspaces.md")]
    mod subspaces {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
