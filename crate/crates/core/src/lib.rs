//! Collaborative online exploration of unknown trees by `k` robots.
//!
//! The crate is organised around a synchronous round engine ([`engine`]) that
//! drives an [`engine::Explorer`] over a hidden [`tree::World`] while keeping
//! the shared partially explored map in an [`view::ExplorationView`].
//!
//! * [`bfdn`]: Breadth-First Depth-Next, the base algorithm.
//! * [`urns`]: the balls-in-urns game behind the reanchoring bound.
//! * [`extensions`]: central-planner, breakdown and graph variants.
//! * [`recursive`]: anchor-based algorithms, the divide-depth construction and
//!   `BFDN_ℓ`.
//! * [`workbench`]: generators, baselines, bound formulas and sweeps.
//! * [`audit`]: replay-based verification of traces.

pub mod audit;
pub mod bfdn;
pub mod engine;
pub mod error;
pub mod extensions;
pub mod recursive;
pub mod trace_io;
pub mod tree;
pub mod urns;
pub mod view;
pub mod workbench;

pub use engine::{run, Explorer, MobilityMask, RunConfig, RunTrace, Selection, StopRule};
pub use error::{EngineError, GameError, MaskError, SweepError, TraceError, TreeError};
pub use tree::{Graph, Tree, World};
pub use view::{EdgeStatus, ExplorationView};

/// Dense node identifier. The root / origin is always `0`.
pub type NodeId = usize;
/// Dense, globally unique edge identifier.
pub type EdgeId = usize;
/// Robot index in `0..k`.
pub type RobotId = usize;
