//! Alignment of collections of contiguous spatial supports.
//!
//! Every input collection partitions one shared set of weighted units into
//! contiguous supports. An alignment is a single such partition; turning a
//! collection into it costs the population of every unit that changes
//! support. The goal is to minimise the largest cost over all collections.

pub mod assignment;
pub mod distance;
pub mod error;
pub mod generate;
pub mod grouping;
pub mod io;
pub mod model;
pub mod multialign;
pub mod oracle;
pub mod pairalign;
pub mod render;
pub mod solver1d;

pub use distance::{
    disagreement_set, objective, unit_distance, validate_alignment, weighted_distance, Alignment,
    Correspondence, LabelMap,
};
pub use error::{Error, Result};
pub use model::{
    validate, AdjacencyGraph, Collection, Instance, Layout, Partition, UnitId, Violation,
};
