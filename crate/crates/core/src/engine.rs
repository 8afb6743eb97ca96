//! Synchronous round loop shared by every exploration algorithm.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::EngineError;
use crate::tree::World;
use crate::view::{Crossing, EdgeStatus, ExplorationView};
use crate::{EdgeId, NodeId, RobotId};

/// A robot's move for one round. `Up` at the origin means staying put.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Selection {
    Edge(EdgeId),
    Up,
    Stay,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Shallow,
    Deep,
}

/// An anchor assignment made while selecting moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reanchor {
    pub robot: RobotId,
    pub node: NodeId,
    pub depth: u32,
}

/// Everything an explorer returns for one round.
#[derive(Debug, Clone, Default)]
pub struct Decision {
    pub selections: Vec<Selection>,
    pub reanchors: Vec<Reanchor>,
    pub phase: Option<Phase>,
    pub active_count: Option<usize>,
    /// Set during rebalancing rounds in which activity requirements are
    /// not expected to hold.
    pub suspended: bool,
}

impl Decision {
    pub fn stay(k: usize) -> Self {
        Decision { selections: vec![Selection::Stay; k], ..Default::default() }
    }
}

/// Read-only state handed to an explorer each round.
pub struct RoundContext<'a> {
    pub world: &'a dyn World,
    pub view: &'a ExplorationView,
    pub positions: &'a [NodeId],
    pub movable: &'a [bool],
    pub round: usize,
}

pub trait Explorer {
    fn name(&self) -> String;

    /// Selections for all `k` robots. Robots that are not movable must stay.
    fn select(&mut self, ctx: &RoundContext<'_>) -> Result<Decision, EngineError>;

    /// Called after the moves of a round have been applied; `ctx` shows the
    /// new positions.
    fn after_round(&mut self, _ctx: &RoundContext<'_>, _record: &RoundRecord) -> Result<(), EngineError> {
        Ok(())
    }

    /// Current anchor of a robot, when the algorithm has one.
    fn anchor(&self, _robot: RobotId) -> Option<NodeId> {
        None
    }
}

/// Per-round movement permissions.
#[derive(Debug, Clone, PartialEq)]
pub enum MobilityMask {
    /// Every robot may move every round.
    Ones,
    /// Each robot independently movable with probability `p`.
    Bernoulli { p: f64, seed: u64 },
    /// Exactly one robot movable per round, cycling through indices.
    RoundRobin,
    /// Explicit rows of `k` bits, repeated cyclically.
    Explicit(Vec<Vec<bool>>),
    /// Blocks every robot anchored at the most loaded non-root anchor.
    BlockHeaviestAnchor,
}

impl MobilityMask {
    pub fn is_ones(&self) -> bool {
        matches!(self, MobilityMask::Ones)
    }
}

struct MaskState {
    mask: MobilityMask,
    rng: Option<ChaCha8Rng>,
}

impl MaskState {
    fn new(mask: &MobilityMask) -> Self {
        let rng = match mask {
            MobilityMask::Bernoulli { seed, .. } => Some(ChaCha8Rng::seed_from_u64(*seed)),
            _ => None,
        };
        MaskState { mask: mask.clone(), rng }
    }

    fn fill(&mut self, round: usize, out: &mut [bool], anchor: impl Fn(RobotId) -> Option<NodeId>) {
        let k = out.len();
        match &self.mask {
            MobilityMask::Ones => out.fill(true),
            MobilityMask::Bernoulli { p, .. } => {
                let rng = self.rng.as_mut().expect("seeded");
                for bit in out.iter_mut() {
                    *bit = rng.gen_bool(p.clamp(0.0, 1.0));
                }
            }
            MobilityMask::RoundRobin => {
                out.fill(false);
                out[(round - 1) % k] = true;
            }
            MobilityMask::Explicit(rows) => {
                if rows.is_empty() {
                    out.fill(true);
                } else {
                    let row = &rows[(round - 1) % rows.len()];
                    for (i, bit) in out.iter_mut().enumerate() {
                        *bit = row.get(i).copied().unwrap_or(false);
                    }
                }
            }
            MobilityMask::BlockHeaviestAnchor => {
                let mut load: BTreeMap<NodeId, usize> = BTreeMap::new();
                for i in 0..k {
                    if let Some(v) = anchor(i).filter(|&v| v != 0) {
                        *load.entry(v).or_default() += 1;
                    }
                }
                // max load, smallest node id on ties
                let target = load.iter().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0))).map(|(&v, _)| v);
                for (i, bit) in out.iter_mut().enumerate() {
                    *bit = target.is_none() || anchor(i) != target;
                }
                if out.iter().all(|b| !b) {
                    out.fill(true);
                }
            }
        }
    }
}

/// A(M) over the first `up_to_round` rows: average number of permitted
/// moves per robot.
pub fn mean_mobility(rows: &[Vec<bool>], up_to_round: usize) -> f64 {
    let k = rows.first().map_or(1, Vec::len).max(1);
    let bits: usize = rows.iter().take(up_to_round).map(|r| r.iter().filter(|&&b| b).count()).sum();
    bits as f64 / k as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopRule {
    /// Stop at the first round in which no robot moves although all may.
    Quiescent,
    /// Stop as soon as no dangling edge remains.
    Explored,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub k: usize,
    pub mask: MobilityMask,
    /// Defaults to [`default_round_limit`].
    pub round_limit: Option<usize>,
    pub stop: StopRule,
    /// With [`StopRule::Explored`], also stop once A(M) reaches this value.
    pub mobility_budget: Option<f64>,
    /// Allow several robots to cross the same dangling edge in one round.
    pub shared_dangling: bool,
}

impl RunConfig {
    pub fn new(k: usize) -> Self {
        RunConfig {
            k,
            mask: MobilityMask::Ones,
            round_limit: None,
            stop: StopRule::Quiescent,
            mobility_budget: None,
            shared_dangling: false,
        }
    }

    pub fn with_mask(mut self, mask: MobilityMask) -> Self {
        self.mask = mask;
        self
    }

    pub fn with_stop(mut self, stop: StopRule) -> Self {
        self.stop = stop;
        self
    }

    pub fn with_round_limit(mut self, limit: usize) -> Self {
        self.round_limit = Some(limit);
        self
    }
}

/// `ceil(10 * (2n/k + D^2 (ln k + 2)))`.
pub fn default_round_limit(n: usize, depth: u32, k: usize) -> usize {
    let d = f64::from(depth);
    let k = k.max(1) as f64;
    (10.0 * (2.0 * n as f64 / k + d * d * (k.ln() + 2.0))).ceil() as usize + 10
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Move {
    pub robot: RobotId,
    pub from: NodeId,
    pub to: NodeId,
    pub edge: EdgeId,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub moves: Vec<Move>,
    /// Edges that stopped dangling by being traversed this round.
    pub discovered: Vec<EdgeId>,
    /// Movable robots that did not change position.
    pub idle: Vec<RobotId>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub blocked: Vec<RobotId>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub closed: Vec<EdgeId>,
    /// Edges with an edge event (first downward or first upward crossing).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub events: Vec<EdgeId>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reanchors: Vec<Reanchor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase: Option<Phase>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub active_count: Option<usize>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub suspended: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Counters {
    pub reanchors_by_depth: BTreeMap<u32, usize>,
    pub idle_rounds: usize,
    pub moves_per_robot: Vec<usize>,
    pub idle_per_robot: Vec<usize>,
    pub edge_events: usize,
    pub closed_edges: usize,
    pub edge_traversals: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub algorithm: String,
    pub k: usize,
    pub n: usize,
    pub m: usize,
    pub depth: u32,
    pub max_degree: usize,
    pub rounds: Vec<RoundRecord>,
    /// Rounds in which at least one robot moved.
    pub runtime: usize,
    pub final_positions: Vec<NodeId>,
    pub explored: bool,
    /// Round at the end of which no dangling edge remained.
    pub completion_round: Option<usize>,
    pub counters: Counters,
}

impl RunTrace {
    /// Permission rows as a `k`-bit matrix, one row per recorded round.
    pub fn mask_rows(&self) -> Vec<Vec<bool>> {
        self.rounds
            .iter()
            .map(|r| {
                let mut row = vec![true; self.k];
                for &i in &r.blocked {
                    row[i] = false;
                }
                row
            })
            .collect()
    }

    pub fn mean_mobility(&self, up_to_round: usize) -> f64 {
        mean_mobility(&self.mask_rows(), up_to_round)
    }

    pub fn all_at_origin(&self, origin: NodeId) -> bool {
        self.final_positions.iter().all(|&p| p == origin)
    }
}

/// State visible to a per-round observer, after moves are applied.
pub struct Observation<'a> {
    pub world: &'a dyn World,
    pub view: &'a ExplorationView,
    pub positions: &'a [NodeId],
    pub record: &'a RoundRecord,
}

/// Runs `explorer` to completion.
pub fn run(world: &dyn World, explorer: &mut dyn Explorer, config: &RunConfig) -> Result<RunTrace, EngineError> {
    run_observed(world, explorer, config, |_, _| Ok(()))
}

/// Like [`run`], calling `observer` after every recorded round.
pub fn run_observed<E, F>(
    world: &dyn World,
    explorer: &mut E,
    config: &RunConfig,
    mut observer: F,
) -> Result<RunTrace, EngineError>
where
    E: Explorer + ?Sized,
    F: FnMut(&Observation<'_>, &E) -> Result<(), EngineError>,
{
    let k = config.k;
    if k == 0 {
        return Err(EngineError::NoRobots);
    }
    let n = world.node_count();
    let origin = world.origin();
    let limit = config.round_limit.unwrap_or_else(|| default_round_limit(world.edge_count() + 1, world.depth(), k));
    let mut view = ExplorationView::new(world);
    let mut positions = vec![origin; k];
    let mut movable = vec![true; k];
    let mut mask = MaskState::new(&config.mask);
    let mut counters = Counters {
        moves_per_robot: vec![0; k],
        idle_per_robot: vec![0; k],
        edge_traversals: vec![0; world.edge_count()],
        ..Default::default()
    };
    let mut up_event = vec![false; world.edge_count()];
    let mut claimed: Vec<Option<RobotId>> = vec![None; world.edge_count()];
    let mut rounds = Vec::new();
    let mut runtime = 0;
    let mut mobility = 0usize;
    let mut completion_round = view.fully_explored().then_some(0);

    for round in 1.. {
        if config.stop == StopRule::Explored && view.fully_explored() {
            break;
        }
        if round > limit {
            return Err(EngineError::NonTermination(limit));
        }
        mask.fill(round, &mut movable, |i| explorer.anchor(i));
        let decision = {
            let ctx = RoundContext { world, view: &view, positions: &positions, movable: &movable, round };
            explorer.select(&ctx)?
        };
        if decision.selections.len() != k {
            return Err(EngineError::SelectionCount { expected: k, got: decision.selections.len() });
        }

        // legality of the whole round is checked before anything moves
        let mut touched = Vec::new();
        let mut illegal = None;
        for (i, sel) in decision.selections.iter().enumerate() {
            if !movable[i] && *sel != Selection::Stay {
                illegal = Some(EngineError::BlockedMove { round, robot: i });
                break;
            }
            if let Selection::Edge(e) = *sel {
                let (a, b) = world.endpoints(e);
                if a != positions[i] && b != positions[i] {
                    illegal = Some(EngineError::NotIncident { round, robot: i, edge: e, node: positions[i] });
                    break;
                }
                if view.status(e) == EdgeStatus::Dangling && !config.shared_dangling {
                    if let Some(first) = claimed[e] {
                        illegal = Some(EngineError::DoubleSelection { round, edge: e, first, second: i });
                        break;
                    }
                    claimed[e] = Some(i);
                    touched.push(e);
                }
            }
            if *sel == Selection::Up && positions[i] != origin && view.parent_edge(positions[i]).is_none() {
                illegal = Some(EngineError::NoParent { round, robot: i, node: positions[i] });
                break;
            }
        }
        for e in touched {
            claimed[e] = None;
        }
        if let Some(err) = illegal {
            return Err(err);
        }

        let mut record = RoundRecord {
            round,
            reanchors: decision.reanchors,
            phase: decision.phase,
            active_count: decision.active_count,
            suspended: decision.suspended,
            ..Default::default()
        };
        for (i, sel) in decision.selections.iter().enumerate() {
            if !movable[i] {
                record.blocked.push(i);
                continue;
            }
            let from = positions[i];
            let edge = match *sel {
                Selection::Stay => None,
                Selection::Up => view.parent_edge(from),
                Selection::Edge(e) => Some(e),
            };
            let Some(e) = edge else {
                record.idle.push(i);
                continue;
            };
            let to = world.other_end(e, from);
            match view.cross(world, e, from) {
                Crossing::Discovered(_) => {
                    record.discovered.push(e);
                    record.events.push(e);
                }
                Crossing::Closed => record.closed.push(e),
                Crossing::Known => {
                    if view.status(e) == EdgeStatus::Traversed && view.parent_edge(from) == Some(e) && !up_event[e] {
                        up_event[e] = true;
                        record.events.push(e);
                    }
                }
            }
            positions[i] = to;
            counters.moves_per_robot[i] += 1;
            counters.edge_traversals[e] += 1;
            record.moves.push(Move { robot: i, from, to, edge: e });
        }

        let moved = !record.moves.is_empty();
        let all_movable = record.blocked.is_empty();
        if config.stop == StopRule::Quiescent && !moved && all_movable {
            break;
        }
        if moved {
            runtime += 1;
        }
        for &i in &record.idle {
            counters.idle_per_robot[i] += 1;
        }
        if !record.idle.is_empty() && moved {
            counters.idle_rounds += 1;
        }
        for r in &record.reanchors {
            if r.depth >= 1 {
                *counters.reanchors_by_depth.entry(r.depth).or_default() += 1;
            }
        }
        counters.edge_events += record.events.len();
        counters.closed_edges += record.closed.len();
        mobility += k - record.blocked.len();
        if completion_round.is_none() && view.fully_explored() {
            completion_round = Some(round);
        }
        {
            let ctx = RoundContext { world, view: &view, positions: &positions, movable: &movable, round };
            explorer.after_round(&ctx, &record)?;
        }
        observer(&Observation { world, view: &view, positions: &positions, record: &record }, explorer)?;
        rounds.push(record);
        if let Some(budget) = config.mobility_budget {
            if config.stop == StopRule::Explored && mobility as f64 / k as f64 >= budget {
                break;
            }
        }
    }

    Ok(RunTrace {
        algorithm: explorer.name(),
        k,
        n,
        m: world.edge_count(),
        depth: world.depth(),
        max_degree: world.max_degree(),
        rounds,
        runtime,
        final_positions: positions,
        explored: view.fully_explored(),
        completion_round,
        counters,
    })
}
