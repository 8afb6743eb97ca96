//! Batch runs over a matrix of generators, algorithms, robot counts and
//! seeds, one CSV row per run.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bfdn::{run_bfdn, theorem1_bound};
use crate::error::{SweepError, TraceError};
use crate::extensions::run_planner_bfdn;
use crate::recursive::run_bfdn_ell;
use crate::tree::{Tree, World};
use crate::workbench::baselines::{offline_schedule, single_dfs};
use crate::workbench::bounds::within;
use crate::workbench::generators::{gen_complete_tree, gen_random_tree, gen_spider};

/// Environment variable replacing every seed of a sweep.
pub const SEED_ENV: &str = "COTEX_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Generator {
    /// Uniform random recursive tree on `n` nodes; uses the seed.
    Random {
        n: usize,
    },
    Spider {
        legs: usize,
        len: usize,
    },
    Complete {
        b: usize,
        depth: u32,
    },
}

impl Generator {
    pub fn build(&self, seed: u64) -> Result<Tree, SweepError> {
        match *self {
            Generator::Random { n } => Ok(gen_random_tree(n, seed)),
            Generator::Spider { legs, len } => Ok(gen_spider(legs, len)),
            Generator::Complete { b, depth } => {
                gen_complete_tree(b, depth).map_err(|e| SweepError::Cell { cell: self.to_string(), msg: e.to_string() })
            }
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Random { n } => write!(f, "random:{n}"),
            Generator::Spider { legs, len } => write!(f, "spider:{legs}x{len}"),
            Generator::Complete { b, depth } => write!(f, "complete:{b}x{depth}"),
        }
    }
}

fn pair(text: &str) -> Option<(usize, usize)> {
    let (a, b) = text.split_once('x')?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

impl FromStr for Generator {
    type Err = SweepError;

    /// `random:N`, `spider:LEGSxLEN` or `complete:BxDEPTH`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SweepError::Parse { what: "generator", text: s.to_string() };
        let (kind, args) = s.split_once(':').ok_or_else(bad)?;
        match kind.trim() {
            "random" => Ok(Generator::Random { n: args.trim().parse().map_err(|_| bad())? }),
            "spider" => pair(args).map(|(legs, len)| Generator::Spider { legs, len }).ok_or_else(bad),
            "complete" => pair(args)
                .and_then(|(b, d)| Some(Generator::Complete { b, depth: u32::try_from(d).ok()? }))
                .ok_or_else(bad),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Bfdn,
    BfdnEll {
        ell: u32,
    },
    Planner,
    /// Single-robot depth-first search; only valid with `k = 1`.
    Dfs,
    /// Euler-tour split computed with full knowledge of the tree.
    Offline,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algorithm::Bfdn => f.write_str("bfdn"),
            Algorithm::BfdnEll { ell } => write!(f, "bfdn_ell:{ell}"),
            Algorithm::Planner => f.write_str("planner"),
            Algorithm::Dfs => f.write_str("dfs"),
            Algorithm::Offline => f.write_str("offline"),
        }
    }
}

impl FromStr for Algorithm {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SweepError::Parse { what: "algorithm", text: s.to_string() };
        match s.trim() {
            "bfdn" => Ok(Algorithm::Bfdn),
            "planner" => Ok(Algorithm::Planner),
            "dfs" => Ok(Algorithm::Dfs),
            "offline" => Ok(Algorithm::Offline),
            other => {
                let ell = other.strip_prefix("bfdn_ell:").ok_or_else(bad)?;
                let ell: u32 = ell.parse().map_err(|_| bad())?;
                if ell == 0 {
                    return Err(bad());
                }
                Ok(Algorithm::BfdnEll { ell })
            }
        }
    }
}

/// One run of the matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Cell {
    pub generator: Generator,
    pub algorithm: Algorithm,
    pub k: usize,
    pub seed: u64,
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} / {} / k={} / seed={}", self.generator, self.algorithm, self.k, self.seed)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SweepSpec {
    pub generators: Vec<Generator>,
    pub algorithms: Vec<Algorithm>,
    pub ks: Vec<usize>,
    pub seeds: Vec<u64>,
}

impl SweepSpec {
    /// Cells ordered by generator, algorithm, k, then seed. The single-robot
    /// DFS baseline only gets cells with `k = 1`.
    pub fn cells(&self) -> Vec<Cell> {
        let mut cells = Vec::new();
        for &generator in &self.generators {
            for &algorithm in &self.algorithms {
                for &k in &self.ks {
                    if algorithm == Algorithm::Dfs && k != 1 {
                        continue;
                    }
                    for &seed in &self.seeds {
                        cells.push(Cell { generator, algorithm, k, seed });
                    }
                }
            }
        }
        cells
    }

    /// Replaces the seeds with the value of `COTEX_SEED` when it is set.
    pub fn with_env_seed(mut self) -> Result<Self, SweepError> {
        if let Ok(text) = std::env::var(SEED_ENV) {
            let seed = text.trim().parse().map_err(|_| SweepError::Parse { what: SEED_ENV, text })?;
            self.seeds = vec![seed];
        }
        Ok(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub generator: String,
    pub n: usize,
    #[serde(rename = "D")]
    pub depth: u32,
    #[serde(rename = "Delta")]
    pub delta: usize,
    pub k: usize,
    pub algorithm: String,
    pub seed: u64,
    pub runtime: usize,
    pub edge_events: usize,
    pub bound: f64,
    pub bound_ok: bool,
}

impl SweepRow {
    /// The cell that produced this row.
    pub fn cell(&self) -> Result<Cell, SweepError> {
        Ok(Cell { generator: self.generator.parse()?, algorithm: self.algorithm.parse()?, k: self.k, seed: self.seed })
    }
}

pub fn run_cell(cell: &Cell) -> Result<SweepRow, SweepError> {
    let fail = |msg: String| SweepError::Cell { cell: cell.to_string(), msg };
    if cell.k == 0 {
        return Err(fail("k must be at least 1".into()));
    }
    let tree = cell.generator.build(cell.seed)?;
    let (n, depth, delta, k) = (tree.n(), tree.depth(), tree.max_degree(), cell.k);
    let (runtime, edge_events, bound, ok) = match cell.algorithm {
        Algorithm::Bfdn => {
            let trace = run_bfdn(&tree, k).map_err(|e| fail(e.to_string()))?;
            let bound = theorem1_bound(n, depth, k, delta);
            let done = trace.explored && trace.all_at_origin(0);
            (trace.runtime, trace.counters.edge_events, bound, done && within(trace.runtime, bound))
        }
        Algorithm::BfdnEll { ell } => {
            let run = run_bfdn_ell(&tree, ell, k).map_err(|e| fail(e.to_string()))?;
            let done = run.trace.all_at_origin(0);
            (run.trace.runtime, run.trace.counters.edge_events, run.bound, done && run.bound_ok)
        }
        Algorithm::Planner => {
            let run = run_planner_bfdn(&tree, k).map_err(|e| fail(e.to_string()))?;
            let done = run.trace.explored && run.trace.all_at_origin(0);
            (run.trace.runtime, run.trace.counters.edge_events, run.bound, done && run.bound_ok)
        }
        Algorithm::Dfs => {
            if k != 1 {
                return Err(fail("dfs runs a single robot".into()));
            }
            let trace = single_dfs(&tree).map_err(|e| fail(e.to_string()))?;
            let exact = 2 * (n - 1);
            (trace.runtime, trace.counters.edge_events, exact as f64, trace.explored && trace.runtime == exact)
        }
        Algorithm::Offline => {
            let s = offline_schedule(&tree, k);
            let bound = 2.0 * ((n - 1).div_ceil(k) + depth as usize) as f64;
            (s.makespan, 2 * (n - 1), bound, within(s.makespan, bound))
        }
    };
    Ok(SweepRow {
        generator: cell.generator.to_string(),
        n,
        depth,
        delta,
        k,
        algorithm: cell.algorithm.to_string(),
        seed: cell.seed,
        runtime,
        edge_events,
        bound,
        bound_ok: ok,
    })
}

/// Runs every cell in parallel; rows keep the order of [`SweepSpec::cells`].
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, SweepError> {
    spec.cells().par_iter().map(run_cell).collect()
}

pub fn write_sweep_csv(rows: &[SweepRow], out: impl Write) -> Result<(), TraceError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record([
        "generator",
        "n",
        "D",
        "Delta",
        "k",
        "algorithm",
        "seed",
        "runtime",
        "edge_events",
        "bound",
        "bound_ok",
    ])?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_sweep_csv(input: impl std::io::Read) -> Result<Vec<SweepRow>, TraceError> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().map(|row| row.map_err(TraceError::from)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for g in ["random:500", "spider:4x5", "complete:2x3"] {
            assert_eq!(g.parse::<Generator>().unwrap().to_string(), g);
        }
        for a in ["bfdn", "bfdn_ell:2", "planner", "dfs", "offline"] {
            assert_eq!(a.parse::<Algorithm>().unwrap().to_string(), a);
        }
        assert!("spider:4".parse::<Generator>().is_err());
        assert!("bfdn_ell:0".parse::<Algorithm>().is_err());
    }

    #[test]
    fn one_cell_one_row() {
        let spec = SweepSpec {
            generators: vec![Generator::Random { n: 200 }],
            algorithms: vec![Algorithm::Bfdn],
            ks: vec![4],
            seeds: vec![1],
        };
        let rows = sweep(&spec).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].bound_ok);
    }

    #[test]
    fn spiders_meet_the_bound() {
        let spec = SweepSpec {
            generators: [2, 4, 8].iter().map(|&legs| Generator::Spider { legs, len: 10 }).collect(),
            algorithms: vec![Algorithm::Bfdn],
            ks: vec![4],
            seeds: vec![0],
        };
        let rows = sweep(&spec).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.bound_ok));
    }

    #[test]
    fn empty_matrix_writes_header_only() {
        let rows = sweep(&SweepSpec::default()).unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(&rows, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "generator,n,D,Delta,k,algorithm,seed,runtime,edge_events,bound,bound_ok\n"
        );
    }

    #[test]
    fn rows_replay_from_csv() {
        let spec = SweepSpec {
            generators: vec![Generator::Random { n: 150 }, Generator::Complete { b: 3, depth: 3 }],
            algorithms: vec![Algorithm::Bfdn, Algorithm::BfdnEll { ell: 2 }, Algorithm::Planner, Algorithm::Offline],
            ks: vec![1, 4],
            seeds: vec![3, 4],
        };
        let rows = sweep(&spec).unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(&rows, &mut buf).unwrap();
        let back = read_sweep_csv(buf.as_slice()).unwrap();
        assert_eq!(back.len(), rows.len());
        for (row, read) in rows.iter().zip(&back) {
            assert_eq!(&run_cell(&read.cell().unwrap()).unwrap(), row);
        }
    }
}
