//! Dynamic programming over tree decompositions, with per-node table
//! algorithms expressed as relational-algebra operations on an in-memory
//! table engine.
//!
//! The pieces fit together as follows: [`instance`] parses DIMACS-style
//! inputs and builds primal graphs, [`decomp`] computes and transforms tree
//! decompositions, [`relalg`] provides the table engine, [`engine`] drives
//! the bottom-up traversal through a generic placeholder pipeline, and
//! [`problems`] supplies the placeholder bundles for #SAT, #o-COL, MinVC,
//! partial MaxSAT and MinIDS together with brute-force oracles.

pub mod decomp;
pub mod engine;
pub mod instance;
pub mod problems;
pub mod relalg;
