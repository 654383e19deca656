pub mod catalog;
pub mod chordal;
pub mod cpc;
pub mod deletion;
pub mod error;
pub mod generators;
pub mod graph;
pub mod hardness;
pub mod oracle;
pub mod pipeline;
pub mod skeleton;
pub mod solver;
pub mod svd;

pub use error::{EspError, Result};
pub use graph::{DistanceMatrix, Graph, Path, Vertex, INF};
pub use oracle::EspAnswer;
