//! Knowledge-quantity index (KQI) over citation DAGs: volume propagation,
//! per-node scores, growth analysis, knowledge veins and a
//! preferential-attachment simulator.

pub mod aggregate;
pub mod analysis;
pub mod error;
pub mod fragment;
pub mod graph;
pub mod io;
pub mod kqi;
pub mod sim;
pub mod vein;

pub use error::{KqiError, Result};
pub use graph::{CitationGraph, DecaySpec, GraphBuilder, GroupKind, PaperNode, SnapshotSpec, SUPER_ROOT_ID};
pub use kqi::{compute_kqi, compute_volumes, kqi_all, node_kqi, KqiTable, VolumeTable};
