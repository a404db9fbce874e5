//! Structure-only adversarial attacks against node classification, the
//! topological attributes those attacks disturb, and random-forest detectors
//! that tell adversarial samples apart from clean ones.

pub mod attacks;
pub mod eval;
pub mod attributes;
pub mod error;
pub mod forest;
pub mod graph;
pub mod io;
pub mod synth;

pub use error::{Error, Result};
pub use graph::{EdgeFlip, EgoSubgraph, FlipAction, Graph, NodeId};
