//! Breadth-First Depth-Next.
//!
//! A robot at the root is (re)anchored to the least loaded open node of
//! minimal depth, walks there along known edges (breadth-first moves), and
//! then explores below it depth-first: take the lowest-port dangling edge no
//! other robot took this round, or go up.

use std::collections::BTreeMap;

use crate::engine::{Decision, Explorer, Reanchor, RoundContext, RoundRecord, RunConfig, RunTrace, Selection};
use crate::error::EngineError;
use crate::tree::World;
use crate::view::ExplorationView;
use crate::{EdgeId, NodeId, RobotId};

/// Picks the anchor among `candidates` (ascending ids) with the fewest
/// robots; the first zero-load candidate wins immediately.
pub fn least_loaded(candidates: impl Iterator<Item = NodeId>, load: &[u32]) -> Option<NodeId> {
    let mut best: Option<(u32, NodeId)> = None;
    for v in candidates {
        let l = load[v];
        if best.is_none_or(|(bl, _)| l < bl) {
            best = Some((l, v));
            if l == 0 {
                break;
            }
        }
    }
    best.map(|(_, v)| v)
}

/// The Reanchor procedure over the whole view.
pub fn reanchor_target(view: &ExplorationView, load: &[u32], origin: NodeId) -> NodeId {
    view.min_open_depth().and_then(|d| least_loaded(view.open_at_depth(d), load)).unwrap_or(origin)
}

#[derive(Debug, Clone)]
pub struct Bfdn {
    anchors: Vec<NodeId>,
    /// Remaining breadth-first moves; the next edge is at the end.
    stacks: Vec<Vec<EdgeId>>,
    load: Vec<u32>,
    selected: Vec<bool>,
    /// Edge to walk back through after a closing crossing (graph worlds).
    backtrack: Vec<Option<EdgeId>>,
}

impl Bfdn {
    pub fn new(world: &dyn World, k: usize) -> Self {
        let mut load = vec![0u32; world.node_count()];
        load[world.origin()] = k as u32;
        Bfdn {
            anchors: vec![world.origin(); k],
            stacks: vec![Vec::new(); k],
            load,
            selected: vec![false; world.edge_count()],
            backtrack: vec![None; k],
        }
    }

    pub fn anchors(&self) -> &[NodeId] {
        &self.anchors
    }

    /// Robots currently anchored at `v`.
    pub fn load(&self, v: NodeId) -> u32 {
        self.load[v]
    }

    pub fn stack(&self, robot: RobotId) -> &[EdgeId] {
        &self.stacks[robot]
    }

    fn reanchor(&mut self, ctx: &RoundContext<'_>, i: RobotId) -> Reanchor {
        let v = reanchor_target(ctx.view, &self.load, ctx.world.origin());
        self.load[self.anchors[i]] -= 1;
        self.load[v] += 1;
        self.anchors[i] = v;
        let mut path = ctx.view.path_from_root(ctx.world, v);
        path.reverse();
        self.stacks[i] = path;
        Reanchor { robot: i, node: v, depth: ctx.view.depth(v) }
    }
}

impl Explorer for Bfdn {
    fn name(&self) -> String {
        "bfdn".into()
    }

    fn select(&mut self, ctx: &RoundContext<'_>) -> Result<Decision, EngineError> {
        let k = self.anchors.len();
        let origin = ctx.world.origin();
        let mut decision = Decision::stay(k);
        let mut taken = Vec::new();
        for i in (0..k).filter(|&i| ctx.movable[i]) {
            let pos = ctx.positions[i];
            if let Some(e) = self.backtrack[i].take() {
                decision.selections[i] = Selection::Edge(e);
                continue;
            }
            if pos == origin {
                decision.reanchors.push(self.reanchor(ctx, i));
            }
            if let Some(e) = self.stacks[i].pop() {
                let (a, b) = ctx.world.endpoints(e);
                if a != pos && b != pos {
                    return Err(EngineError::Corrupted(format!(
                        "robot {i}: stack edge {e} does not start at node {pos}"
                    )));
                }
                decision.selections[i] = Selection::Edge(e);
                continue;
            }
            let selected = &self.selected;
            match ctx.view.first_dangling(ctx.world, pos, |e| !selected[e]) {
                Some(e) => {
                    self.selected[e] = true;
                    taken.push(e);
                    decision.selections[i] = Selection::Edge(e);
                }
                None => decision.selections[i] = Selection::Up,
            }
        }
        for e in taken {
            self.selected[e] = false;
        }
        Ok(decision)
    }

    fn after_round(&mut self, _ctx: &RoundContext<'_>, record: &RoundRecord) -> Result<(), EngineError> {
        if !record.closed.is_empty() {
            for mv in &record.moves {
                if record.closed.contains(&mv.edge) {
                    self.backtrack[mv.robot] = Some(mv.edge);
                }
            }
        }
        Ok(())
    }

    fn anchor(&self, robot: RobotId) -> Option<NodeId> {
        Some(self.anchors[robot])
    }
}

/// Runs plain BFDN with `k` robots and full mobility.
pub fn run_bfdn(world: &dyn World, k: usize) -> Result<RunTrace, EngineError> {
    let mut bfdn = Bfdn::new(world, k);
    crate::engine::run(world, &mut bfdn, &RunConfig::new(k))
}

/// Anchor assignments per depth `1..D-1`, read from a trace.
pub fn reanchor_histogram(trace: &RunTrace) -> BTreeMap<u32, usize> {
    trace.counters.reanchors_by_depth.clone()
}

/// `k (min{ln k, ln Δ} + 2)`.
pub fn reanchor_bound(k: usize, max_degree: usize) -> f64 {
    k as f64 * ((k as f64).ln().min((max_degree.max(1) as f64).ln()) + 2.0)
}

/// `2n/k + D^2 (min{ln Δ, ln k} + 2)`.
pub fn theorem1_bound(n: usize, depth: u32, k: usize, max_degree: usize) -> f64 {
    let d = f64::from(depth);
    let kf = k as f64;
    2.0 * n as f64 / kf + d * d * ((max_degree.max(1) as f64).ln().min(kf.ln()) + 2.0)
}

/// Depths whose reanchor count exceeds the per-depth bound.
pub fn histogram_violations(trace: &RunTrace) -> Vec<(u32, usize)> {
    let bound = reanchor_bound(trace.k, trace.max_degree);
    trace
        .counters
        .reanchors_by_depth
        .iter()
        .filter(|&(&d, &c)| d >= 1 && d < trace.depth && c as f64 > bound)
        .map(|(&d, &c)| (d, c))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run, RunConfig};
    use crate::tree::Tree;

    fn star(leaves: usize) -> Tree {
        Tree::from_edges(&(1..=leaves).map(|c| (0, c)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn star_first_round_distinct_edges() {
        let t = star(2);
        let mut b = Bfdn::new(&t, 2);
        let view = ExplorationView::new(&t);
        let ctx = RoundContext { world: &t, view: &view, positions: &[0, 0], movable: &[true, true], round: 1 };
        let d = b.select(&ctx).unwrap();
        assert_eq!(d.selections, vec![Selection::Edge(0), Selection::Edge(1)]);
        assert!(d.reanchors.iter().all(|r| r.node == 0));
    }

    #[test]
    fn star_runtime_two() {
        for k in 1..6 {
            let trace = run_bfdn(&star(k), k).unwrap();
            assert_eq!(trace.runtime, 2);
            assert!(trace.all_at_origin(0));
            assert!(reanchor_histogram(&trace).is_empty());
        }
    }

    #[test]
    fn four_node_path_single_robot() {
        let t = Tree::from_edges(&[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(run_bfdn(&t, 1).unwrap().runtime, 6);
    }

    #[test]
    fn least_loaded_breaks_ties_by_id() {
        let load = [0, 2, 0, 1];
        assert_eq!(least_loaded([1].into_iter(), &load), Some(1));
        assert_eq!(least_loaded([1, 2].into_iter(), &load), Some(2));
        assert_eq!(least_loaded([1, 3].into_iter(), &load), Some(3));
        assert_eq!(least_loaded(std::iter::empty(), &load), None);
    }

    #[test]
    fn explored_tree_anchors_root() {
        let t = Tree::from_edges(&[(0, 1)]).unwrap();
        let mut view = ExplorationView::new(&t);
        view.cross(&t, 0, 0);
        assert_eq!(reanchor_target(&view, &[1, 0], 0), 0);
    }

    #[test]
    fn mid_subtree_robot_goes_up() {
        let t = Tree::from_edges(&[(0, 1), (1, 2)]).unwrap();
        let mut b = Bfdn::new(&t, 1);
        let mut cfg = RunConfig::new(1);
        cfg.round_limit = Some(100);
        let trace = run(&t, &mut b, &cfg).unwrap();
        // down, down, up, up
        assert_eq!(trace.runtime, 4);
        assert_eq!(trace.rounds[2].moves[0].to, 1);
    }
}
