//! Reasoning about robot institutions: admissibility of groundings, norm
//! verification over timed trajectories, grounding search and planning.

pub mod admissibility;
pub mod groundsearch;
pub mod model;
pub mod planner;
pub mod semantics;
pub mod specfmt;
pub mod verifier;

pub use model::*;
