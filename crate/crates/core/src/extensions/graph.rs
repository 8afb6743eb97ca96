//! BFDN on a general graph whose robots know their distance to the origin.

use crate::bfdn::Bfdn;
use crate::engine::{RunConfig, RunTrace};
use crate::error::EngineError;
use crate::tree::{Graph, World};
use crate::view::{EdgeStatus, ExplorationView};
use crate::EdgeId;

/// `2m/k + D^2 (min{ln Δ, ln k} + 2)` with `m` edges and radius `D`.
pub fn graph_bound(m: usize, depth: u32, k: usize, max_degree: usize) -> f64 {
    crate::bfdn::theorem1_bound(m, depth, k, max_degree)
}

#[derive(Debug, Clone)]
pub struct GraphRun {
    pub trace: RunTrace,
    pub closed: Vec<EdgeId>,
    /// Edges crossed without ever closing.
    pub tree_edges: Vec<EdgeId>,
    pub bound: f64,
    pub bound_ok: bool,
    /// The never-closed edges form a breadth-first spanning tree.
    pub bfs_tree: bool,
    /// Every closed edge was crossed at most twice.
    pub closed_traversals_ok: bool,
}

pub fn run_graph_bfdn(graph: &Graph, k: usize) -> Result<GraphRun, EngineError> {
    let mut bfdn = Bfdn::new(graph, k);
    let trace = crate::engine::run(graph, &mut bfdn, &RunConfig::new(k))?;

    // replay the moves to recover each edge's final status
    let mut view = ExplorationView::new(graph);
    for rec in &trace.rounds {
        for mv in &rec.moves {
            view.cross(graph, mv.edge, mv.from);
        }
    }
    let m = graph.edge_count();
    let closed: Vec<EdgeId> = (0..m).filter(|&e| view.status(e) == EdgeStatus::Closed).collect();
    let tree_edges: Vec<EdgeId> = (0..m).filter(|&e| view.status(e) == EdgeStatus::Traversed).collect();
    let closed_traversals_ok = closed.iter().all(|&e| trace.counters.edge_traversals[e] <= 2);
    let bfs_tree = is_bfs_tree(graph, &tree_edges);
    let bound = graph_bound(m, graph.depth(), k, graph.max_degree());
    Ok(GraphRun {
        bound_ok: crate::workbench::bounds::within(trace.runtime, bound),
        bound,
        bfs_tree,
        closed_traversals_ok,
        closed,
        tree_edges,
        trace,
    })
}

/// `n - 1` edges, each joining distances `d` and `d + 1`, giving every
/// non-origin node exactly one parent.
fn is_bfs_tree(graph: &Graph, edges: &[EdgeId]) -> bool {
    let n = graph.node_count();
    if edges.len() + 1 != n {
        return false;
    }
    let mut has_parent = vec![false; n];
    for &e in edges {
        let (a, b) = graph.endpoints(e);
        let (da, db) = (graph.distance(a), graph.distance(b));
        let child = if db == da + 1 {
            b
        } else if da == db + 1 {
            a
        } else {
            return false;
        };
        if std::mem::replace(&mut has_parent[child], true) {
            return false;
        }
    }
    (0..n).all(|v| v == graph.origin() || has_parent[v])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bfdn::run_bfdn;
    use crate::workbench::gen_random_tree;

    #[test]
    fn tree_as_graph_matches_plain_bfdn() {
        let t = gen_random_tree(80, 3);
        let g = Graph::from_tree(&t);
        let run = run_graph_bfdn(&g, 4).unwrap();
        assert!(run.closed.is_empty() && run.bfs_tree);
        let plain = run_bfdn(&t, 4).unwrap();
        assert_eq!(run.trace.rounds, plain.rounds);
    }

    #[test]
    fn four_cycle_closes_one_edge() {
        let g = Graph::new(4, &[(0, 1), (0, 2), (1, 3), (2, 3)], 0, None).unwrap();
        for k in 1..=3 {
            let run = run_graph_bfdn(&g, k).unwrap();
            assert_eq!(run.closed.len(), 1);
            assert!(run.bfs_tree && run.closed_traversals_ok && run.bound_ok && run.trace.explored);
        }
    }
}
