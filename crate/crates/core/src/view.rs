//! The partially explored world shared by all robots.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::ViewError;
use crate::tree::World;
use crate::{EdgeId, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeStatus {
    Unknown,
    Dangling,
    Traversed,
    Closed,
}

/// What happened when a robot crossed an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Crossing {
    /// The edge was dangling and its far end is now discovered.
    Discovered(NodeId),
    /// The edge was dangling and has been closed without discovering anything.
    Closed,
    /// A known (traversed or closed) edge.
    Known,
}

#[derive(Debug, Clone)]
pub struct ExplorationView {
    discovered: Vec<bool>,
    depth: Vec<u32>,
    parent_edge: Vec<Option<EdgeId>>,
    status: Vec<EdgeStatus>,
    dangling_at: Vec<u32>,
    open_by_depth: Vec<BTreeSet<NodeId>>,
    min_open: usize,
    dangling_total: usize,
    discovered_nodes: usize,
    order: Vec<NodeId>,
}

impl ExplorationView {
    /// Fresh view with only the origin revealed.
    pub fn new(world: &dyn World) -> Self {
        let n = world.node_count();
        let mut view = ExplorationView {
            discovered: vec![false; n],
            depth: vec![0; n],
            parent_edge: vec![None; n],
            status: vec![EdgeStatus::Unknown; world.edge_count()],
            dangling_at: vec![0; n],
            open_by_depth: vec![BTreeSet::new(); world.depth() as usize + 2],
            min_open: 0,
            dangling_total: 0,
            discovered_nodes: 0,
            order: Vec::with_capacity(n),
        };
        view.mark_discovered(world, world.origin(), None);
        view
    }

    pub fn is_discovered(&self, v: NodeId) -> bool {
        self.discovered[v]
    }

    pub fn discovered_count(&self) -> usize {
        self.discovered_nodes
    }

    /// Discovered nodes in discovery order (origin first).
    pub fn discovery_order(&self) -> &[NodeId] {
        &self.order
    }

    pub fn depth(&self, v: NodeId) -> u32 {
        self.depth[v]
    }

    /// The traversed edge through which `v` was discovered.
    pub fn parent_edge(&self, v: NodeId) -> Option<EdgeId> {
        self.parent_edge[v]
    }

    pub fn status(&self, e: EdgeId) -> EdgeStatus {
        self.status[e]
    }

    pub fn dangling_count(&self) -> usize {
        self.dangling_total
    }

    pub fn fully_explored(&self) -> bool {
        self.dangling_total == 0
    }

    /// Number of dangling edges incident to `v`.
    pub fn dangling_degree(&self, v: NodeId) -> u32 {
        self.dangling_at[v]
    }

    pub fn is_open(&self, v: NodeId) -> bool {
        self.dangling_at[v] > 0
    }

    /// Smallest depth of an open node, if any.
    pub fn min_open_depth(&self) -> Option<u32> {
        (self.min_open < self.open_by_depth.len()).then_some(self.min_open as u32)
    }

    /// Open nodes at depth `d` in ascending id order.
    pub fn open_at_depth(&self, d: u32) -> impl Iterator<Item = NodeId> + '_ {
        self.open_by_depth.get(d as usize).into_iter().flatten().copied()
    }

    pub fn open_count_at_depth(&self, d: u32) -> usize {
        self.open_by_depth.get(d as usize).map_or(0, BTreeSet::len)
    }

    /// Dangling edges whose discovered endpoint has depth `d`, in
    /// ascending (node id, port) order.
    pub fn dangling_edges_at_depth(&self, world: &dyn World, d: u32) -> Vec<(NodeId, EdgeId)> {
        self.open_at_depth(d)
            .flat_map(|v| {
                world.ports(v).iter().filter(|&&e| self.status[e] == EdgeStatus::Dangling).map(move |&e| (v, e))
            })
            .collect()
    }

    /// Lowest-port dangling edge at `v` accepted by `free`.
    pub fn first_dangling(&self, world: &dyn World, v: NodeId, mut free: impl FnMut(EdgeId) -> bool) -> Option<EdgeId> {
        if self.dangling_at[v] == 0 {
            return None;
        }
        world.ports(v).iter().copied().find(|&e| self.status[e] == EdgeStatus::Dangling && free(e))
    }

    /// Traversed edges from the origin to `v`.
    pub fn path_from_root(&self, world: &dyn World, v: NodeId) -> Vec<EdgeId> {
        let mut path = Vec::with_capacity(self.depth[v] as usize);
        let mut x = v;
        while let Some(e) = self.parent_edge[x] {
            path.push(e);
            x = world.other_end(e, x);
        }
        path.reverse();
        path
    }

    /// Reveals `node`, reached through `via` (or the origin when `via` is
    /// `None`). Already-discovered nodes are left unchanged.
    pub fn reveal(&mut self, world: &dyn World, node: NodeId, via: Option<EdgeId>) -> Result<(), ViewError> {
        if self.discovered[node] {
            return Ok(());
        }
        match via {
            None if node != world.origin() => return Err(ViewError::NotAdjacent(node)),
            Some(e) => {
                let (a, b) = world.endpoints(e);
                let from = if a == node { b } else { a };
                if (a != node && b != node) || !self.discovered[from] {
                    return Err(ViewError::NotAdjacent(node));
                }
                if self.status[e] == EdgeStatus::Dangling {
                    self.resolve(world, e, EdgeStatus::Traversed);
                }
            }
            None => {}
        }
        self.mark_discovered(world, node, via);
        Ok(())
    }

    /// Applies the crossing of `e` from `from` by one robot.
    ///
    /// On trees a dangling edge always leads to a new node. Otherwise the far
    /// end is discovered only if it is new and strictly farther from the
    /// origin; in every other case the edge closes.
    pub fn cross(&mut self, world: &dyn World, e: EdgeId, from: NodeId) -> Crossing {
        if self.status[e] != EdgeStatus::Dangling {
            return Crossing::Known;
        }
        let to = world.other_end(e, from);
        if world.is_tree() || (!self.discovered[to] && world.distance(to) > world.distance(from)) {
            self.resolve(world, e, EdgeStatus::Traversed);
            self.mark_discovered(world, to, Some(e));
            Crossing::Discovered(to)
        } else {
            self.resolve(world, e, EdgeStatus::Closed);
            Crossing::Closed
        }
    }

    fn mark_discovered(&mut self, world: &dyn World, node: NodeId, via: Option<EdgeId>) {
        self.discovered[node] = true;
        self.discovered_nodes += 1;
        self.order.push(node);
        self.parent_edge[node] = via;
        self.depth[node] = match via {
            None => 0,
            Some(e) => self.depth[world.other_end(e, node)] + 1,
        };
        debug_assert!(!world.is_tree() || self.depth[node] == world.distance(node));
        for &e in world.ports(node) {
            match self.status[e] {
                EdgeStatus::Unknown => {
                    self.status[e] = EdgeStatus::Dangling;
                    self.dangling_total += 1;
                    self.bump(node, 1);
                }
                EdgeStatus::Dangling => self.bump(node, 1),
                _ => {}
            }
        }
        self.settle();
    }

    fn resolve(&mut self, world: &dyn World, e: EdgeId, to: EdgeStatus) {
        debug_assert_eq!(self.status[e], EdgeStatus::Dangling);
        self.status[e] = to;
        self.dangling_total -= 1;
        let (a, b) = world.endpoints(e);
        for v in [a, b] {
            if self.discovered[v] {
                self.bump(v, -1);
            }
        }
        self.settle();
    }

    fn bump(&mut self, v: NodeId, delta: i32) {
        let before = self.dangling_at[v];
        self.dangling_at[v] = before.checked_add_signed(delta).expect("dangling count underflow");
        let d = self.depth[v] as usize;
        if d >= self.open_by_depth.len() {
            self.open_by_depth.resize(d + 2, BTreeSet::new());
        }
        if before == 0 && delta > 0 {
            self.open_by_depth[d].insert(v);
            self.min_open = self.min_open.min(d);
        } else if self.dangling_at[v] == 0 {
            self.open_by_depth[d].remove(&v);
        }
    }

    fn settle(&mut self) {
        while self.min_open < self.open_by_depth.len() && self.open_by_depth[self.min_open].is_empty() {
            self.min_open += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{Graph, Tree};

    #[test]
    fn star_root_has_all_edges_dangling() {
        let star = Tree::from_edges(&[(0, 1), (0, 2), (0, 3)]).unwrap();
        let view = ExplorationView::new(&star);
        assert_eq!(view.dangling_count(), 3);
        assert_eq!(view.dangling_edges_at_depth(&star, 0).len(), 3);
        assert_eq!(view.min_open_depth(), Some(0));
    }

    #[test]
    fn leaf_and_internal_crossings() {
        let t = Tree::from_edges(&[(0, 1), (0, 2), (2, 3), (2, 4)]).unwrap();
        let mut view = ExplorationView::new(&t);
        assert_eq!(view.cross(&t, 0, 0), Crossing::Discovered(1));
        assert_eq!(view.dangling_count(), 1);
        assert_eq!(view.cross(&t, 1, 0), Crossing::Discovered(2));
        assert_eq!(view.dangling_count(), 2);
        assert_eq!(view.status(1), EdgeStatus::Traversed);
        assert_eq!(view.min_open_depth(), Some(1));
        assert_eq!(view.cross(&t, 1, 2), Crossing::Known);
    }

    #[test]
    fn path_frontier_at_depth_two() {
        let path = Tree::from_edges(&[(0, 1), (1, 2), (2, 3)]).unwrap();
        let mut view = ExplorationView::new(&path);
        view.cross(&path, 0, 0);
        view.cross(&path, 1, 1);
        assert_eq!(view.dangling_edges_at_depth(&path, 2), vec![(2, 2)]);
        for d in [0, 1, 3] {
            assert!(view.dangling_edges_at_depth(&path, d).is_empty());
        }
        view.cross(&path, 2, 2);
        assert!(view.fully_explored());
        assert_eq!(view.min_open_depth(), None);
    }

    #[test]
    fn reveal_requires_adjacency() {
        let path = Tree::from_edges(&[(0, 1), (1, 2)]).unwrap();
        let mut view = ExplorationView::new(&path);
        assert_eq!(view.reveal(&path, 2, Some(1)), Err(ViewError::NotAdjacent(2)));
        assert_eq!(view.reveal(&path, 2, None), Err(ViewError::NotAdjacent(2)));
        view.reveal(&path, 1, Some(0)).unwrap();
        assert_eq!(view.status(0), EdgeStatus::Traversed);
    }

    #[test]
    fn four_cycle_closes_one_edge() {
        let g = Graph::new(4, &[(0, 1), (0, 2), (1, 3), (2, 3)], 0, None).unwrap();
        let mut view = ExplorationView::new(&g);
        assert_eq!(view.cross(&g, 0, 0), Crossing::Discovered(1));
        assert_eq!(view.cross(&g, 2, 1), Crossing::Discovered(3));
        // 3 -> 2 goes back towards the origin
        assert_eq!(view.cross(&g, 3, 3), Crossing::Closed);
        assert_eq!(view.cross(&g, 1, 0), Crossing::Discovered(2));
        assert!(view.fully_explored());
    }
}
