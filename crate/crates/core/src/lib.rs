pub mod canonicalize;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod extract;
pub mod graph;
pub mod matching;
pub mod metrics;
pub mod network;
pub mod pipeline;
pub mod robustness;
pub mod synth;

pub use error::{Error, Result};
