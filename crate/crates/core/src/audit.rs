//! Replays a BFDN trace on a fresh view and checks the structural claims of
//! its analysis.

use std::fmt;

use crate::engine::RunTrace;
use crate::tree::{Tree, World};
use crate::view::{EdgeStatus, ExplorationView};
use crate::{EdgeId, NodeId, RobotId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// More rounds with a non-moving robot than `D + 1`.
    IdleRounds {
        rounds: usize,
        limit: usize,
    },
    /// A dangling edge first crossed by several robots at once.
    SharedFirstTraversal {
        round: usize,
        edge: EdgeId,
        robots: usize,
    },
    /// An excursion whose explored-edge count is not `(T_x - 2d) / 2`.
    Excursion {
        robot: RobotId,
        start: usize,
        depth: u32,
        duration: usize,
        explored: usize,
    },
    /// An open node outside every anchored subtree.
    DanglingCoverage {
        round: usize,
        node: NodeId,
    },
    /// A node below every anchor with unexplored descendants but not
    /// exactly one robot in its subtree.
    Hosting {
        round: usize,
        node: NodeId,
        robots: usize,
    },
    NotAtRoot {
        robot: RobotId,
        node: NodeId,
    },
    Unexplored {
        dangling: usize,
    },
    EdgeEvents {
        count: usize,
        limit: usize,
    },
    Conservation {
        total: usize,
        expected: usize,
    },
    /// The trace does not replay on this tree.
    Replay {
        round: usize,
        msg: String,
    },
}

impl Violation {
    /// Short name of the property that failed.
    pub fn claim(&self) -> &'static str {
        match self {
            Violation::IdleRounds { .. } => "claim 1 (idle rounds)",
            Violation::SharedFirstTraversal { .. } => "claim 2 (single first traversal)",
            Violation::Excursion { .. } => "claim 3 (excursion identity)",
            Violation::DanglingCoverage { .. } => "claim 4 (dangling coverage)",
            Violation::Hosting { .. } => "claim 5 (hosting)",
            Violation::NotAtRoot { .. } => "final position",
            Violation::Unexplored { .. } => "completeness",
            Violation::EdgeEvents { .. } => "edge events",
            Violation::Conservation { .. } => "conservation",
            Violation::Replay { .. } => "replay",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {:?}", self.claim(), self)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AuditOptions {
    /// Check the dangling-coverage and hosting claims after every round.
    pub per_round: bool,
}

impl AuditOptions {
    pub fn for_size(n: usize) -> Self {
        AuditOptions { per_round: n <= 2000 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AuditReport {
    pub violations: Vec<Violation>,
    pub idle_rounds: usize,
    pub excursions: usize,
    pub rounds_checked: usize,
}

impl AuditReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

struct Excursion {
    start: usize,
    depth: u32,
    explored: usize,
}

pub fn audit_trace(trace: &RunTrace, tree: &Tree, opts: AuditOptions) -> AuditReport {
    let k = trace.k;
    let mut report = AuditReport::default();
    let full_mobility = trace.rounds.iter().all(|r| r.blocked.is_empty());
    let mut view = ExplorationView::new(tree);
    let mut positions = vec![0; k];
    let mut anchors = vec![0; k];
    let mut anchor_depth = vec![0u32; k];
    let mut open: Vec<Option<Excursion>> = (0..k).map(|_| None).collect();
    let mut crossers = vec![0usize; tree.edge_count()];
    let mut moved = vec![0usize; k];
    let mut idle = vec![0usize; k];
    let mut events = 0usize;
    let mut up_seen = vec![false; tree.edge_count()];

    for rec in &trace.rounds {
        for r in &rec.reanchors {
            anchors[r.robot] = r.node;
            anchor_depth[r.robot] = r.depth;
        }
        for mv in &rec.moves {
            if view.status(mv.edge) == EdgeStatus::Dangling {
                crossers[mv.edge] += 1;
            }
        }
        for mv in &rec.moves {
            if crossers[mv.edge] > 1 {
                report.violations.push(Violation::SharedFirstTraversal {
                    round: rec.round,
                    edge: mv.edge,
                    robots: crossers[mv.edge],
                });
                crossers[mv.edge] = 0;
            }
        }
        for mv in &rec.moves {
            let (a, b) = tree.endpoints(mv.edge);
            if positions[mv.robot] != mv.from || !((a == mv.from && b == mv.to) || (b == mv.from && a == mv.to)) {
                report.violations.push(Violation::Replay {
                    round: rec.round,
                    msg: format!("robot {} cannot move {} -> {}", mv.robot, mv.from, mv.to),
                });
                return report;
            }
            let fresh = view.status(mv.edge) == EdgeStatus::Dangling;
            if fresh {
                events += 1;
            } else if tree.parent_edge(mv.from) == Some(mv.edge) && !up_seen[mv.edge] {
                up_seen[mv.edge] = true;
                events += 1;
            }
            view.cross(tree, mv.edge, mv.from);
            crossers[mv.edge] = 0;
            positions[mv.robot] = mv.to;
            moved[mv.robot] += 1;

            if mv.from == 0 {
                open[mv.robot] = Some(Excursion { start: rec.round, depth: anchor_depth[mv.robot], explored: 0 });
            }
            if let Some(x) = open[mv.robot].as_mut() {
                x.explored += usize::from(fresh);
            }
            if mv.to == 0 {
                if let Some(x) = open[mv.robot].take() {
                    report.excursions += 1;
                    let duration = rec.round + 1 - x.start;
                    if full_mobility && 2 * x.explored + 2 * x.depth as usize != duration {
                        report.violations.push(Violation::Excursion {
                            robot: mv.robot,
                            start: x.start,
                            depth: x.depth,
                            duration,
                            explored: x.explored,
                        });
                    }
                }
            }
        }
        for &i in &rec.idle {
            idle[i] += 1;
        }
        if !rec.idle.is_empty() && !rec.moves.is_empty() {
            report.idle_rounds += 1;
        }
        if opts.per_round {
            check_coverage(tree, &view, &positions, &anchors, &anchor_depth, rec.round, &mut report.violations);
            report.rounds_checked += 1;
        }
    }

    let limit = trace.depth as usize + 1;
    if full_mobility && report.idle_rounds > limit {
        report.violations.push(Violation::IdleRounds { rounds: report.idle_rounds, limit });
    }
    if full_mobility {
        for (i, &p) in positions.iter().enumerate() {
            if p != 0 {
                report.violations.push(Violation::NotAtRoot { robot: i, node: p });
            }
        }
        let runtime = trace.rounds.iter().filter(|r| !r.moves.is_empty()).count();
        let total: usize = moved.iter().sum::<usize>() + idle.iter().sum::<usize>();
        if total != k * runtime {
            report.violations.push(Violation::Conservation { total, expected: k * runtime });
        }
    }
    if !view.fully_explored() {
        report.violations.push(Violation::Unexplored { dangling: view.dangling_count() });
    }
    let cap = 2 * (tree.n() - 1);
    if events > cap {
        report.violations.push(Violation::EdgeEvents { count: events, limit: cap });
    }
    report
}

/// Dangling coverage and hosting on the current state, in `O(n)`.
fn check_coverage(
    tree: &Tree,
    view: &ExplorationView,
    positions: &[NodeId],
    anchors: &[NodeId],
    anchor_depth: &[u32],
    round: usize,
    out: &mut Vec<Violation>,
) {
    let n = tree.n();
    let order = view.discovery_order();
    let mut covered = vec![false; n];
    for &a in anchors {
        covered[a] = true;
    }
    for &v in order {
        if let Some(p) = tree.parent(v) {
            covered[v] |= covered[p];
        }
        if view.is_open(v) && !covered[v] {
            out.push(Violation::DanglingCoverage { round, node: v });
        }
    }

    let deepest = anchor_depth.iter().copied().max().unwrap_or(0);
    let mut has_open = vec![false; n];
    let mut robots = vec![0usize; n];
    for &p in positions {
        robots[p] += 1;
    }
    for &v in order.iter().rev() {
        has_open[v] |= view.is_open(v);
        if let Some(p) = tree.parent(v) {
            has_open[p] |= has_open[v];
            robots[p] += robots[v];
        }
    }
    for &v in order {
        if view.depth(v) > deepest && has_open[v] && robots[v] != 1 {
            out.push(Violation::Hosting { round, node: v, robots: robots[v] });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bfdn::run_bfdn;
    use crate::tree::Tree;
    use crate::workbench::{gen_random_tree, gen_spider};

    #[test]
    fn star_has_no_idle_rounds() {
        let star = gen_spider(3, 1);
        let trace = run_bfdn(&star, 3).unwrap();
        let report = audit_trace(&trace, &star, AuditOptions { per_round: true });
        assert!(report.ok(), "{:?}", report.violations);
        assert_eq!(report.idle_rounds, 0);
    }

    #[test]
    fn random_trees_pass_all_but_idle_count() {
        for seed in 0..20 {
            let t = gen_random_tree(150, seed);
            for k in [1, 2, 3, 8] {
                let trace = run_bfdn(&t, k).unwrap();
                let report = audit_trace(&trace, &t, AuditOptions { per_round: true });
                let other: Vec<_> =
                    report.violations.iter().filter(|v| !matches!(v, Violation::IdleRounds { .. })).collect();
                assert!(other.is_empty(), "seed {seed} k {k}: {other:?}");
            }
        }
    }

    #[test]
    fn late_descent_exceeds_idle_limit() {
        // robot 2 is sent towards node 5 in the round that explores the last edge
        let t = Tree::from_edges(&[(0, 1), (0, 2), (1, 3), (2, 4), (3, 5), (5, 6)]).unwrap();
        let trace = run_bfdn(&t, 3).unwrap();
        assert_eq!(trace.completion_round, Some(4));
        let report = audit_trace(&trace, &t, AuditOptions { per_round: true });
        assert_eq!(report.violations, vec![Violation::IdleRounds { rounds: 6, limit: 5 }]);
    }

    #[test]
    fn tampered_trace_is_caught() {
        let t = gen_spider(2, 2);
        let mut trace = run_bfdn(&t, 2).unwrap();
        trace.rounds[0].moves[1].edge = trace.rounds[0].moves[0].edge;
        trace.rounds[0].moves[1].to = trace.rounds[0].moves[0].to;
        let report = audit_trace(&trace, &t, AuditOptions { per_round: false });
        assert!(report.violations.iter().any(|v| matches!(v, Violation::SharedFirstTraversal { .. })));
    }
}
