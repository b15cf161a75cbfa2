//! Core library of the vandalism-detection benchmark: corpus synthesis and
//! I/O, a replay protocol with bounded look-ahead, causal feature
//! extraction, bagged decision-tree learning, and ranking evaluation.

pub mod corpus;
pub mod eval;
pub mod features;
pub mod learning;
pub mod rng;
pub mod stream;
