//! BFDN with a central planner at the root and robots holding
//! `Δ + D⌈log2 Δ⌉` bits of memory.
//!
//! The planner only ever sees the memories of robots standing at the root.
//! Away from the root a robot sees the node-local `PARTITION` counter and
//! the set of finished ports of the node it stands on.

use std::collections::{BTreeMap, BTreeSet};

use crate::engine::{Decision, Explorer, Reanchor, RoundContext, RoundRecord, RunConfig, RunTrace, Selection};
use crate::error::EngineError;
use crate::tree::{Tree, World};
use crate::{NodeId, RobotId};

/// A node named by the ports followed from the root (1-based).
pub type PortPath = Vec<u32>;

/// Bits needed to store one port number.
pub fn port_bits(delta: usize) -> usize {
    if delta <= 1 {
        0
    } else {
        (usize::BITS - (delta - 1).leading_zeros()) as usize
    }
}

/// `Δ + D⌈log2 Δ⌉`.
pub fn memory_budget(delta: usize, depth: u32) -> usize {
    delta + depth as usize * port_bits(delta)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RobotMemory {
    stack: Vec<u32>,
    finished: Vec<bool>,
}

impl RobotMemory {
    pub fn new(delta: usize) -> Self {
        RobotMemory { stack: Vec::new(), finished: vec![false; delta] }
    }

    /// Port stack; the next port is at the end.
    pub fn stack(&self) -> &[u32] {
        &self.stack
    }

    /// Bit `j - 1` is set when port `j` of the anchor was finished (or does
    /// not exist) at the last visit.
    pub fn finished(&self) -> &[bool] {
        &self.finished
    }

    pub fn bits(&self) -> usize {
        self.stack.len() * port_bits(self.finished.len()) + self.finished.len()
    }
}

/// Node-local `PARTITION` state: the next port to hand out at each node.
#[derive(Debug, Clone)]
pub struct PartitionCounter {
    next: Vec<u32>,
    origin: NodeId,
}

impl PartitionCounter {
    pub fn new(world: &dyn World) -> Self {
        let next = (0..world.node_count()).map(|v| world.ports(v).len() as u32).collect();
        PartitionCounter { next, origin: world.origin() }
    }

    /// Hands out ports in decreasing order. Once exhausted, a non-root node
    /// answers port 1 (up) and the root answers `None` (stay).
    pub fn step(&mut self, node: NodeId) -> Option<u32> {
        let floor = if node == self.origin { 1 } else { 2 };
        let c = self.next[node];
        if c >= floor {
            self.next[node] = c - 1;
            Some(c)
        } else if node == self.origin {
            None
        } else {
            Some(1)
        }
    }
}

pub fn partition_step(counter: &mut PartitionCounter, node: NodeId) -> Option<u32> {
    counter.step(node)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AccessKind {
    Partition,
    ReadFinished,
    MarkFinished,
    PlannerRead,
}

/// One read or write of state outside a robot's own memory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Access {
    pub round: usize,
    pub robot: RobotId,
    pub kind: AccessKind,
    /// Node whose local state was touched (the root for planner reads).
    pub node: NodeId,
    /// Where the robot actually stood.
    pub robot_at: NodeId,
}

pub trait AccessLog {
    fn record(&mut self, access: Access);
}

/// Discards every access.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoLog;

impl AccessLog for NoLog {
    fn record(&mut self, _access: Access) {}
}

/// Keeps every access for later inspection.
#[derive(Debug, Clone, Default)]
pub struct RecordingLog {
    pub accesses: Vec<Access>,
}

impl AccessLog for RecordingLog {
    fn record(&mut self, access: Access) {
        self.accesses.push(access);
    }
}

impl RecordingLog {
    /// Accesses to a node other than the robot's own position, and planner
    /// reads of robots away from the root.
    pub fn forbidden(&self, origin: NodeId) -> Vec<Access> {
        self.accesses
            .iter()
            .filter(|a| a.node != a.robot_at || (a.kind == AccessKind::PlannerRead && a.robot_at != origin))
            .copied()
            .collect()
    }
}

/// The planner's bookkeeping: anchors `A` at working depth `d`, the subset
/// `R` known to be done, children `A'` and the subset `R'` known finished.
#[derive(Debug, Clone)]
pub struct PlannerState {
    depth: u32,
    a: BTreeSet<PortPath>,
    r: BTreeSet<PortPath>,
    a_next: BTreeSet<PortPath>,
    r_next: BTreeSet<PortPath>,
    anchors: Vec<Option<PortPath>>,
    issued: BTreeSet<PortPath>,
    done: bool,
}

impl PlannerState {
    pub fn new(k: usize) -> Self {
        PlannerState {
            depth: 0,
            a: BTreeSet::from([Vec::new()]),
            r: BTreeSet::new(),
            a_next: BTreeSet::new(),
            r_next: BTreeSet::new(),
            anchors: vec![None; k],
            issued: BTreeSet::new(),
            done: false,
        }
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn anchors_at_depth(&self) -> &BTreeSet<PortPath> {
        &self.a
    }

    pub fn returned(&self) -> &BTreeSet<PortPath> {
        &self.r
    }

    pub fn children(&self) -> &BTreeSet<PortPath> {
        &self.a_next
    }

    pub fn returned_children(&self) -> &BTreeSet<PortPath> {
        &self.r_next
    }

    /// Anchor the planner last gave to `robot`, while it is away.
    pub fn anchor_of(&self, robot: RobotId) -> Option<&PortPath> {
        self.anchors[robot].as_ref()
    }

    pub fn is_finished(&self) -> bool {
        self.done
    }

    /// One planner step for the robots standing at the root. Returns the new
    /// anchor of each listed robot, or `None` once exploration is over.
    pub fn planner_round(
        &mut self,
        returning: &[(RobotId, &RobotMemory)],
    ) -> Result<Vec<(RobotId, Option<PortPath>)>, EngineError> {
        for &(i, mem) in returning {
            if let Some(anchor) = self.anchors[i].take() {
                self.read(i, &anchor, mem)?;
            }
        }
        if !self.done && self.a.iter().all(|v| self.r.contains(v)) {
            self.a = self.a_next.difference(&self.r_next).cloned().collect();
            self.r.clear();
            self.a_next.clear();
            self.r_next.clear();
            self.depth += 1;
            self.done = self.a.is_empty();
        }
        let mut out = Vec::with_capacity(returning.len());
        let mut load: BTreeMap<&PortPath, usize> =
            self.a.iter().filter(|v| !self.r.contains(*v)).map(|v| (v, 0)).collect();
        for x in self.anchors.iter().flatten() {
            if let Some(c) = load.get_mut(x) {
                *c += 1;
            }
        }
        for &(i, _) in returning {
            if self.done {
                out.push((i, None));
                continue;
            }
            let (&target, c) = load.iter_mut().min_by_key(|(_, c)| **c).expect("A minus R is non-empty");
            *c += 1;
            let target = target.clone();
            self.issued.insert(target.clone());
            self.anchors[i] = Some(target.clone());
            out.push((i, Some(target)));
        }
        Ok(out)
    }

    fn read(&mut self, robot: RobotId, anchor: &PortPath, mem: &RobotMemory) -> Result<(), EngineError> {
        let level = anchor.len() as u32;
        let first = if anchor.is_empty() { 1 } else { 2 };
        let children = (first..=mem.finished.len() as u32).map(|j| {
            let mut c = anchor.clone();
            c.push(j);
            (c, mem.finished[j as usize - 1])
        });
        if level == self.depth {
            if !self.a.contains(anchor) {
                return Err(EngineError::Planner(format!("robot {robot} reports anchor {anchor:?} outside A")));
            }
            self.r.insert(anchor.clone());
            for (c, fin) in children {
                if fin {
                    self.r_next.insert(c.clone());
                }
                self.a_next.insert(c);
            }
        } else if level < self.depth && self.issued.contains(anchor) {
            // an older anchor says nothing about the children of A
        } else {
            return Err(EngineError::Planner(format!("robot {robot} reports unknown anchor {anchor:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    /// At the root, waiting for the planner.
    Returned,
    /// Unstacking the port path to the anchor.
    Descend,
    /// `PARTITION`-driven depth-first walk below the anchor.
    Explore,
    /// Walking port 1 back to the root.
    Ascend,
}

/// The simulated robots together with the planner and the node-local state.
pub struct PlannerBfdn<L: AccessLog = NoLog> {
    planner: PlannerState,
    memories: Vec<RobotMemory>,
    modes: Vec<Mode>,
    anchor_nodes: Vec<NodeId>,
    counter: PartitionCounter,
    finished: Vec<Vec<bool>>,
    budget: usize,
    peak: usize,
    round: usize,
    log: L,
}

impl<L: AccessLog> PlannerBfdn<L> {
    pub fn new(tree: &Tree, k: usize, log: L) -> Self {
        let delta = tree.max_degree();
        PlannerBfdn {
            planner: PlannerState::new(k),
            memories: vec![RobotMemory::new(delta); k],
            modes: vec![Mode::Returned; k],
            anchor_nodes: vec![tree.origin(); k],
            counter: PartitionCounter::new(tree),
            finished: (0..tree.n()).map(|v| vec![false; tree.ports(v).len()]).collect(),
            budget: memory_budget(delta, tree.depth()),
            peak: 0,
            round: 0,
            log,
        }
    }

    pub fn planner(&self) -> &PlannerState {
        &self.planner
    }

    pub fn memory(&self, robot: RobotId) -> &RobotMemory {
        &self.memories[robot]
    }

    /// Largest memory footprint seen so far, in bits.
    pub fn peak_bits(&self) -> usize {
        self.peak
    }

    pub fn budget_bits(&self) -> usize {
        self.budget
    }

    pub fn into_log(self) -> L {
        self.log
    }

    fn access(&mut self, robot: RobotId, kind: AccessKind, node: NodeId, robot_at: NodeId) {
        self.log.record(Access { round: self.round, robot, kind, node, robot_at });
    }

    fn partition(&mut self, robot: RobotId, node: NodeId, at: NodeId) -> Option<u32> {
        self.access(robot, AccessKind::Partition, node, at);
        self.counter.step(node)
    }

    /// Copies the finished ports of the anchor the robot stands on.
    fn observe_anchor(&mut self, world: &dyn World, robot: RobotId, node: NodeId, at: NodeId) {
        self.access(robot, AccessKind::ReadFinished, node, at);
        let fin = &self.finished[node];
        let is_root = node == world.origin();
        for (j, bit) in self.memories[robot].finished.iter_mut().enumerate() {
            *bit = match fin.get(j) {
                Some(&f) => f || (j == 0 && !is_root),
                None => true,
            };
        }
    }

    fn port_edge(world: &dyn World, node: NodeId, port: u32) -> Selection {
        Selection::Edge(world.ports(node)[port as usize - 1])
    }

    fn check_memory(&mut self) -> Result<(), EngineError> {
        for (i, m) in self.memories.iter().enumerate() {
            let used = m.bits();
            self.peak = self.peak.max(used);
            if used > self.budget {
                return Err(EngineError::MemoryBudget { robot: i, used, budget: self.budget });
            }
        }
        Ok(())
    }
}

fn follow(world: &dyn World, path: &[u32]) -> NodeId {
    path.iter().fold(world.origin(), |v, &p| world.other_end(world.ports(v)[p as usize - 1], v))
}

impl<L: AccessLog> Explorer for PlannerBfdn<L> {
    fn name(&self) -> String {
        "bfdn_planner".into()
    }

    fn select(&mut self, ctx: &RoundContext<'_>) -> Result<Decision, EngineError> {
        self.round = ctx.round;
        let world = ctx.world;
        let root = world.origin();
        let k = self.modes.len();
        let mut decision = Decision::stay(k);
        let mut handled = vec![false; k];

        // robots anchored at the root keep partitioning it
        for (i, &pos) in ctx.positions.iter().enumerate() {
            if pos == root && self.modes[i] == Mode::Explore && self.memories[i].stack.is_empty() {
                handled[i] = self.start_at_root(world, i, pos, &mut decision);
            }
        }

        let returning: Vec<RobotId> = (0..k).filter(|&i| self.modes[i] == Mode::Returned).collect();
        for &i in &returning {
            self.access(i, AccessKind::PlannerRead, root, ctx.positions[i]);
        }
        let reads: Vec<(RobotId, &RobotMemory)> = returning.iter().map(|&i| (i, &self.memories[i])).collect();
        let assignments = self.planner.planner_round(&reads)?;
        for (i, target) in assignments {
            handled[i] = true;
            let Some(path) = target else { continue };
            let node = follow(world, &path);
            decision.reanchors.push(Reanchor { robot: i, node, depth: path.len() as u32 });
            self.anchor_nodes[i] = node;
            self.memories[i].stack = path.iter().rev().copied().collect();
            if let Some(p) = self.memories[i].stack.pop() {
                self.modes[i] = Mode::Descend;
                decision.selections[i] = Self::port_edge(world, root, p);
            } else {
                self.modes[i] = Mode::Explore;
                self.start_at_root(world, i, ctx.positions[i], &mut decision);
            }
        }

        for i in (0..k).filter(|&i| !handled[i]) {
            let pos = ctx.positions[i];
            decision.selections[i] = match self.modes[i] {
                Mode::Descend => {
                    let p = self.memories[i]
                        .stack
                        .pop()
                        .ok_or_else(|| EngineError::Corrupted(format!("robot {i} descends with an empty stack")))?;
                    Self::port_edge(world, pos, p)
                }
                Mode::Explore => {
                    let at_anchor = self.memories[i].stack.is_empty();
                    if at_anchor {
                        self.observe_anchor(world, i, pos, pos);
                    }
                    match self.partition(i, pos, pos) {
                        Some(p) if p >= 2 => {
                            self.memories[i].stack.push(p);
                            Self::port_edge(world, pos, p)
                        }
                        _ => {
                            if at_anchor {
                                self.modes[i] = Mode::Ascend;
                            } else {
                                self.memories[i].stack.pop();
                            }
                            Selection::Up
                        }
                    }
                }
                Mode::Ascend => Selection::Up,
                Mode::Returned => Selection::Stay,
            };
        }
        Ok(decision)
    }

    fn after_round(&mut self, ctx: &RoundContext<'_>, record: &RoundRecord) -> Result<(), EngineError> {
        let world = ctx.world;
        let root = world.origin();
        for mv in &record.moves {
            if mv.from != root && world.port_index(mv.edge, mv.from) == 0 {
                let j = world.port_index(mv.edge, mv.to);
                self.access(mv.robot, AccessKind::MarkFinished, mv.to, ctx.positions[mv.robot]);
                self.finished[mv.to][j] = true;
            }
        }
        for i in 0..self.modes.len() {
            match self.modes[i] {
                Mode::Descend if self.memories[i].stack.is_empty() => self.modes[i] = Mode::Explore,
                Mode::Ascend if ctx.positions[i] == root => self.modes[i] = Mode::Returned,
                _ => {}
            }
        }
        self.check_memory()
    }

    fn anchor(&self, robot: RobotId) -> Option<NodeId> {
        Some(self.anchor_nodes[robot])
    }
}

impl<L: AccessLog> PlannerBfdn<L> {
    /// A root-anchored robot at the root takes the next root port, or
    /// reports back to the planner once the root is exhausted.
    fn start_at_root(&mut self, world: &dyn World, robot: RobotId, at: NodeId, decision: &mut Decision) -> bool {
        let root = world.origin();
        self.observe_anchor(world, robot, root, at);
        match self.partition(robot, root, at) {
            Some(p) => {
                self.memories[robot].stack.push(p);
                decision.selections[robot] = Self::port_edge(world, root, p);
                true
            }
            None => {
                self.modes[robot] = Mode::Returned;
                false
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlannerRun {
    pub trace: RunTrace,
    pub peak_memory_bits: usize,
    pub memory_budget_bits: usize,
    /// `2n/k + D^2 (min{ln k, ln Δ} + 2)`.
    pub bound: f64,
    pub bound_ok: bool,
}

/// Runs the planner variant; fails if a robot ever exceeds its memory budget.
pub fn run_planner_bfdn(tree: &Tree, k: usize) -> Result<PlannerRun, EngineError> {
    run_planner_bfdn_logged(tree, k, NoLog).map(|(run, _)| run)
}

pub fn run_planner_bfdn_logged<L: AccessLog>(tree: &Tree, k: usize, log: L) -> Result<(PlannerRun, L), EngineError> {
    let mut explorer = PlannerBfdn::new(tree, k, log);
    let config = RunConfig { shared_dangling: true, ..RunConfig::new(k) };
    let trace = crate::engine::run(tree, &mut explorer, &config)?;
    let bound = crate::bfdn::theorem1_bound(tree.n(), tree.depth(), k, tree.max_degree());
    let run = PlannerRun {
        peak_memory_bits: explorer.peak_bits(),
        memory_budget_bits: explorer.budget_bits(),
        bound_ok: crate::workbench::bounds::within(trace.runtime, bound),
        bound,
        trace,
    };
    Ok((run, explorer.into_log()))
}
