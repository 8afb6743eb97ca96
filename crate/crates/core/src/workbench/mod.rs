//! Instance generators, baselines, closed-form bounds and experiment sweeps.

pub mod baselines;
pub mod bounds;
pub mod generators;
pub mod sweep;

pub use baselines::{offline_schedule, single_dfs, Dfs, OfflineSchedule};
pub use bounds::{bound_table, BoundRow};
pub use generators::{gen_complete_tree, gen_random_tree, gen_spider};
pub use sweep::{read_sweep_csv, run_cell, sweep, write_sweep_csv, Algorithm, Cell, Generator, SweepRow, SweepSpec};
