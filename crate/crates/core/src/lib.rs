//! Differentiable forward reasoning by message passing on a bipartite
//! graph of ground atoms and ground-clause conjunctions.
pub mod diff;
pub mod graph;
pub mod ground;
pub mod ilp;
pub mod lang;
pub mod oracle;
pub mod reason;
pub mod rng;
pub mod synth;
pub mod tasks;
