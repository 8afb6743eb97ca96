//! Variants of BFDN under restricted communication, adversarial breakdowns
//! and general graphs with a distance oracle.

pub mod breakdown;
pub mod graph;
pub mod grid;
pub mod planner;

pub use breakdown::{breakdown_threshold, parse_mask, read_mask_file, run_with_breakdowns, BreakdownRun};
pub use graph::{graph_bound, run_graph_bfdn, GraphRun};
pub use grid::{gen_grid_with_obstacles, random_grid, Grid, Rect};
pub use planner::{
    memory_budget, partition_step, port_bits, run_planner_bfdn, run_planner_bfdn_logged, Access, AccessKind, AccessLog,
    NoLog, PartitionCounter, PlannerBfdn, PlannerRun, PlannerState, PortPath, RecordingLog, RobotMemory,
};
