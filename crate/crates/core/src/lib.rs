//! Structural checks, orientation-based reductions, spread sampling and
//! spanning-embedding experiments for randomly perturbed graphs.

pub mod density;
pub mod embed;
pub mod enumerate;
pub mod error;
pub mod expansion;
pub mod experiments;
mod flow;
pub mod generators;
pub mod graph;
pub mod io;
pub mod orient;
pub mod rational;
pub mod reduction;
pub mod spread;
pub mod stats;

pub use error::{Error, Result};
pub use graph::{Edge, Graph, Vertex, VertexSet};
pub use orient::Orientation;
