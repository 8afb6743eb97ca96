//! The eight invariants every anchor-based algorithm maintains.

use std::collections::BTreeMap;
use std::fmt;

use crate::engine::RoundRecord;
use crate::tree::{Tree, World};
use crate::view::{EdgeStatus, ExplorationView};
use crate::NodeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Invariant {
    DfsOpenCoverage,
    ParallelPositions,
    PartialExploration,
    LimitedAnchorDepth,
    InactiveDepth,
    OpenNodeCoverage,
    ShallowActivity,
    DeepActivity,
}

impl Invariant {
    pub const ALL: [Invariant; 8] = [
        Invariant::DfsOpenCoverage,
        Invariant::ParallelPositions,
        Invariant::PartialExploration,
        Invariant::LimitedAnchorDepth,
        Invariant::InactiveDepth,
        Invariant::OpenNodeCoverage,
        Invariant::ShallowActivity,
        Invariant::DeepActivity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Invariant::DfsOpenCoverage => "DFS Open Coverage",
            Invariant::ParallelPositions => "Parallel Positions",
            Invariant::PartialExploration => "Partial Exploration",
            Invariant::LimitedAnchorDepth => "Limited Anchor Depth",
            Invariant::InactiveDepth => "Inactive Depth",
            Invariant::OpenNodeCoverage => "Open Node Coverage",
            Invariant::ShallowActivity => "Shallow Activity",
            Invariant::DeepActivity => "Deep Activity",
        }
    }
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnchorViolation {
    pub invariant: Invariant,
    pub detail: String,
}

impl fmt::Display for AnchorViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.invariant, self.detail)
    }
}

/// State of an anchor-based run at the end of a round.
pub struct AnchorSnapshot<'a> {
    pub tree: &'a Tree,
    pub view: &'a ExplorationView,
    pub positions: &'a [NodeId],
    pub active: &'a [bool],
    /// Meaningful for active robots only.
    pub anchors: &'a [NodeId],
    pub depth_budget: u32,
    pub k_star: usize,
    /// Robot triggered an edge event this round.
    pub edge_event: &'a [bool],
    /// Edge has been crossed from child to parent.
    pub up_seen: &'a [bool],
    /// State when this round's moves were chosen; the activity invariants
    /// are skipped without it.
    pub start: Option<&'a RoundStart>,
}

/// Activity flags at the start of a round, after anchors were updated and
/// before anyone moved.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RoundStart {
    pub active: Vec<bool>,
    /// Some active anchor is above the depth budget or still open.
    pub shallow: bool,
    /// Every active anchor sits at the depth budget and is closed.
    pub all_deep: bool,
}

impl RoundStart {
    pub fn new(tree: &Tree, view: &ExplorationView, active: &[bool], anchors: &[NodeId], depth_budget: u32) -> Self {
        let mut shallow = false;
        let mut all_deep = true;
        for i in (0..active.len()).filter(|&i| active[i]) {
            let v = anchors[i];
            let dv = tree.node_depth(v);
            shallow |= dv < depth_budget || view.is_open(v);
            all_deep &= dv == depth_budget && !view.is_open(v);
        }
        RoundStart { active: active.to_vec(), shallow, all_deep }
    }
}

/// Evaluates all eight invariants in `O(n + k D)`; one entry per broken
/// invariant, naming the first offending node or robot.
pub fn check_anchor_invariants(s: &AnchorSnapshot<'_>) -> Vec<AnchorViolation> {
    let tree = s.tree;
    let view = s.view;
    let n = tree.n();
    let k = s.positions.len();
    let order = view.discovery_order();
    let mut out = Vec::new();
    let mut fail = |invariant: Invariant, detail: String| {
        if !out.iter().any(|v: &AnchorViolation| v.invariant == invariant) {
            out.push(AnchorViolation { invariant, detail });
        }
    };

    let mut on_path = vec![false; n];
    for &u in s.positions {
        let mut x = Some(u);
        while let Some(v) = x.filter(|&v| !on_path[v]) {
            on_path[v] = true;
            x = tree.parent(v);
        }
    }
    let mut here = vec![0usize; n];
    for &u in s.positions {
        here[u] += 1;
    }
    let mut below = here.clone();
    for &v in order.iter().rev() {
        if let Some(p) = tree.parent(v) {
            below[p] += below[v];
        }
    }
    let mut covered = vec![false; n];
    for i in (0..k).filter(|&i| s.active[i]) {
        covered[s.anchors[i]] = true;
    }
    for &v in order {
        if let Some(p) = tree.parent(v) {
            covered[v] |= covered[p];
            if below[v] >= 2 && view.is_open(p) {
                fail(Invariant::ParallelPositions, format!("node {p} is open above {} robots", below[v]));
            }
        }
        if view.is_open(v) {
            if !on_path[v] {
                fail(Invariant::DfsOpenCoverage, format!("open node {v} is on no robot's root path"));
            }
            if !covered[v] {
                fail(Invariant::OpenNodeCoverage, format!("open node {v} is outside every active sub-tree"));
            }
        }
    }

    for i in 0..k {
        let u = s.positions[i];
        if !s.active[i] {
            if tree.node_depth(u) > s.depth_budget {
                fail(Invariant::InactiveDepth, format!("inactive robot {i} at depth {}", tree.node_depth(u)));
            }
            continue;
        }
        let v = s.anchors[i];
        let dv = tree.node_depth(v);
        if dv > s.depth_budget {
            fail(Invariant::LimitedAnchorDepth, format!("robot {i} anchored at depth {dv}"));
        }
        if tree.is_ancestor(v, u) {
            let mut x = u;
            while x != v {
                let e = tree.parent_edge(x).expect("below anchor");
                if view.status(e) != EdgeStatus::Traversed || s.up_seen[e] {
                    fail(
                        Invariant::PartialExploration,
                        format!("robot {i}: edge {e} between anchor {v} and {u} is not half explored"),
                    );
                    break;
                }
                x = tree.parent(x).expect("below anchor");
            }
        }
    }
    if let Some(st) = s.start {
        let active_count = st.active.iter().filter(|&&a| a).count();
        if st.shallow && active_count < s.k_star {
            fail(
                Invariant::ShallowActivity,
                format!("{active_count} active robots while running shallow (k* = {})", s.k_star),
            );
        }
        if st.all_deep {
            if let Some(i) = (0..k).find(|&i| st.active[i] && !s.edge_event[i]) {
                fail(Invariant::DeepActivity, format!("active robot {i} triggered no edge event while running deep"));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Default)]
pub struct InvariantReport {
    pub rounds_checked: usize,
    /// Rounds inside rebalancing windows, where the activity invariants are
    /// not evaluated.
    pub suspended_rounds: usize,
    /// Violations in rounds outside rebalancing windows.
    pub counts: BTreeMap<Invariant, usize>,
    /// Violations seen inside rebalancing windows, kept for inspection.
    pub suspended_counts: BTreeMap<Invariant, usize>,
    /// First few violations with their round.
    pub examples: Vec<(usize, AnchorViolation)>,
}

impl InvariantReport {
    pub fn ok(&self) -> bool {
        self.counts.is_empty()
    }
}

/// Checks every round of a run from the engine's observer hook.
#[derive(Debug, Clone)]
pub struct InvariantMonitor {
    up_seen: Vec<bool>,
    pub report: InvariantReport,
}

impl InvariantMonitor {
    pub fn new(tree: &Tree) -> Self {
        InvariantMonitor { up_seen: vec![false; tree.edge_count()], report: InvariantReport::default() }
    }

    /// Records the round's upward crossings; then, unless `terminated`,
    /// checks the invariants. `start` is the activity state from which the
    /// round's moves were chosen.
    #[allow(clippy::too_many_arguments)]
    pub fn observe(
        &mut self,
        tree: &Tree,
        view: &ExplorationView,
        positions: &[NodeId],
        record: &RoundRecord,
        active: &[bool],
        anchors: &[NodeId],
        depth_budget: u32,
        k_star: usize,
        start: Option<&RoundStart>,
        terminated: bool,
    ) {
        let mut edge_event = vec![false; positions.len()];
        for &e in &record.events {
            if let Some(mv) = record.moves.iter().find(|m| m.edge == e) {
                edge_event[mv.robot] = true;
            }
        }
        for mv in &record.moves {
            if tree.parent_edge(mv.from) == Some(mv.edge) {
                self.up_seen[mv.edge] = true;
            }
        }
        if terminated {
            return;
        }
        self.report.rounds_checked += 1;
        if record.suspended {
            self.report.suspended_rounds += 1;
        }
        let snap = AnchorSnapshot {
            tree,
            view,
            positions,
            active,
            anchors,
            depth_budget,
            k_star,
            edge_event: &edge_event,
            up_seen: &self.up_seen,
            start: start.filter(|_| !record.suspended),
        };
        for v in check_anchor_invariants(&snap) {
            if record.suspended {
                *self.report.suspended_counts.entry(v.invariant).or_default() += 1;
                continue;
            }
            *self.report.counts.entry(v.invariant).or_default() += 1;
            if self.report.examples.len() < 20 {
                self.report.examples.push((record.round, v));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[allow(clippy::too_many_arguments)]
    fn snapshot<'a>(
        tree: &'a Tree,
        view: &'a ExplorationView,
        positions: &'a [NodeId],
        active: &'a [bool],
        anchors: &'a [NodeId],
        edge_event: &'a [bool],
        up_seen: &'a [bool],
        start: Option<&'a RoundStart>,
    ) -> AnchorSnapshot<'a> {
        AnchorSnapshot {
            tree,
            view,
            positions,
            active,
            anchors,
            depth_budget: 1,
            k_star: 2,
            edge_event,
            up_seen,
            start,
        }
    }

    #[test]
    fn initial_positions_are_clean() {
        let t = Tree::from_edges(&[(0, 1), (0, 2), (1, 3)]).unwrap();
        let view = ExplorationView::new(&t);
        let start = RoundStart::new(&t, &view, &[true, true], &[0, 0], 1);
        let s = snapshot(&t, &view, &[0, 0], &[true, true], &[0, 0], &[false, false], &[false; 3], Some(&start));
        // the first round has not happened yet, so nothing can be required of it
        let v: Vec<_> = check_anchor_invariants(&s).into_iter().map(|v| v.invariant).collect();
        assert!(v.is_empty(), "{v:?}");
    }

    #[test]
    fn open_node_outside_active_subtrees() {
        let t = Tree::from_edges(&[(0, 1), (0, 2), (1, 3)]).unwrap();
        let mut view = ExplorationView::new(&t);
        view.cross(&t, 0, 0);
        view.cross(&t, 1, 0);
        // node 1 is open but the only active robot is anchored at 2
        let s = snapshot(&t, &view, &[1, 2], &[false, true], &[0, 2], &[false, false], &[false; 3], None);
        let v: Vec<_> = check_anchor_invariants(&s).into_iter().map(|v| v.invariant).collect();
        assert_eq!(v, vec![Invariant::OpenNodeCoverage]);
    }

    #[test]
    fn idle_robot_while_deep() {
        let t = Tree::from_edges(&[(0, 1), (0, 2), (1, 3), (2, 4)]).unwrap();
        let mut view = ExplorationView::new(&t);
        for (e, from) in [(0, 0), (1, 0), (2, 1), (3, 2)] {
            view.cross(&t, e, from);
        }
        // both anchors at depth 1 and closed; robot 1 sits at its anchor
        let start = RoundStart::new(&t, &view, &[true, true], &[1, 2], 1);
        assert!(start.all_deep && !start.shallow);
        let up = [false; 4];
        let s = snapshot(&t, &view, &[3, 2], &[true, true], &[1, 2], &[true, false], &up, Some(&start));
        let v: Vec<_> = check_anchor_invariants(&s).into_iter().map(|v| v.invariant).collect();
        assert!(v.contains(&Invariant::DeepActivity), "{v:?}");
    }

    #[test]
    fn crowded_open_node_and_walked_back_path() {
        let t = Tree::from_edges(&[(0, 1), (1, 2), (1, 3)]).unwrap();
        let mut view = ExplorationView::new(&t);
        view.cross(&t, 0, 0);
        view.cross(&t, 1, 1);
        // node 1 is still open with two robots below it
        let up = [true, false, false];
        let s = snapshot(&t, &view, &[2, 2], &[true, true], &[0, 0], &[true, true], &up, None);
        let v: Vec<_> = check_anchor_invariants(&s).into_iter().map(|v| v.invariant).collect();
        assert!(v.contains(&Invariant::ParallelPositions));
        assert!(v.contains(&Invariant::PartialExploration));
        assert!(!v.contains(&Invariant::InactiveDepth));
    }

    #[test]
    fn depth_budget_violations() {
        let t = Tree::from_edges(&[(0, 1), (1, 2)]).unwrap();
        let mut view = ExplorationView::new(&t);
        view.cross(&t, 0, 0);
        view.cross(&t, 1, 1);
        let s = snapshot(&t, &view, &[2, 2], &[true, false], &[2, 0], &[false, false], &[false; 2], None);
        let mut v: Vec<_> = check_anchor_invariants(&s).into_iter().map(|v| v.invariant).collect();
        v.sort();
        assert_eq!(v, vec![Invariant::LimitedAnchorDepth, Invariant::InactiveDepth]);
    }

    #[test]
    fn too_few_active_while_shallow() {
        let t = Tree::from_edges(&[(0, 1), (0, 2)]).unwrap();
        let view = ExplorationView::new(&t);
        let start = RoundStart::new(&t, &view, &[true, false], &[0, 0], 1);
        let s = snapshot(&t, &view, &[0, 0], &[true, false], &[0, 0], &[false, false], &[false; 2], Some(&start));
        let v: Vec<_> = check_anchor_invariants(&s).into_iter().map(|v| v.invariant).collect();
        assert_eq!(v, vec![Invariant::ShallowActivity]);
    }
}
