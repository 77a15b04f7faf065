//! Successive edge-disjoint shortest paths and minimum-cost `k`-flows on
//! the complete graph `K_n` with i.i.d. uniform or exponential edge weights.
//!
//! The crate pairs exact algorithms (dense Dijkstra, greedy extraction,
//! successive-shortest-path min-cost flow, Walecki decompositions) with
//! samplers and analytic formulas for the quantities they should match:
//! order-statistic means, shortest-path-tree radii, and tail bounds.

mod dijkstra;
pub mod error;
pub mod harness;
pub mod kflow;
pub mod order_stats;
pub mod paths;
pub mod spt;
pub mod stats;
pub mod tail_bounds;
pub mod walecki;
pub mod weights;

pub use error::{Error, Result};
pub use kflow::{min_cost_k_flow, FlowResult};
pub use paths::{shortest_path, successive_paths, PathRecord, SuccessiveResult};
pub use weights::{StorageMode, WeightModel, WeightedCompleteGraph};
