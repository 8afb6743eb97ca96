//! Anchor-based exploration: depth-limited BFDN, the divide-depth functor
//! and BFDN_ℓ with its doubling depth schedule.

mod bfdn1;
mod divide;
pub mod ell;
pub mod invariants;

use crate::engine::{Reanchor, Selection};
use crate::tree::{Tree, World};
use crate::view::ExplorationView;
use crate::{EdgeId, NodeId, RobotId};

pub use ell::{
    bfdn_ell_params, run_anchor_based, run_anchor_based_checked, run_bfdn_ell, run_bfdn_ell_checked,
    shallow_efficiency_audit, theorem3_bound, AnchorRunner, AnchorState, BfdnEll, EllParams, EllRun, StageAudit,
    StageRecord,
};
pub use invariants::{
    check_anchor_invariants, AnchorSnapshot, AnchorViolation, Invariant, InvariantMonitor, InvariantReport, RoundStart,
};

/// Activity flag and anchor of every robot, shared by nested instances.
#[derive(Debug, Clone)]
pub struct Book {
    pub anchor: Vec<NodeId>,
    pub active: Vec<bool>,
}

impl Book {
    pub fn new(k: usize, root: NodeId) -> Self {
        Book { anchor: vec![root; k], active: vec![false; k] }
    }

    pub fn active_count(&self, robots: &[RobotId]) -> usize {
        robots.iter().filter(|&&i| self.active[i]).count()
    }
}

/// Read-only world state for one round.
pub(crate) struct Ctx<'a> {
    pub tree: &'a Tree,
    pub view: &'a ExplorationView,
    pub positions: &'a [NodeId],
}

/// Moves and anchor changes collected from all instances in one round.
pub(crate) struct RoundOut {
    pub selections: Vec<Selection>,
    pub reanchors: Vec<Reanchor>,
    /// Dangling edges already chosen this round.
    pub taken: Vec<EdgeId>,
}

pub(crate) trait Instance {
    /// Updates anchors and activity from the current positions. Called once
    /// per round before `select`.
    fn refresh(&mut self, ctx: &Ctx<'_>, book: &mut Book);
    fn select(&mut self, ctx: &Ctx<'_>, book: &mut Book, out: &mut RoundOut);
    /// No robot will move again under this instance.
    fn is_done(&self) -> bool;
    fn is_deep(&self) -> bool;
    /// Currently moving robots between sub-trees.
    fn in_transit(&self) -> bool;
}

/// Shape of an anchor-based algorithm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Recipe {
    /// Depth-limited BFDN with `robots` robots and depth budget `depth`.
    Leaf { robots: usize, depth: u32 },
    /// Divide-depth functor over `inner`.
    Divide { inner: Box<Recipe>, n_team: usize, n_iter: usize, k_star: usize },
}

/// BFDN whose anchors never go deeper than `d`.
pub fn bfdn1_depth_limited(k: usize, d: u32) -> Recipe {
    Recipe::Leaf { robots: k, depth: d }
}

/// Runs `n_iter` iterations of parallel `inner` instances on up to
/// `n_team` sub-trees, interrupting each iteration when fewer than `k_star`
/// robots remain active.
pub fn divide_depth(inner: Recipe, n_team: usize, n_iter: usize, k_star: usize) -> Recipe {
    Recipe::Divide { inner: Box::new(inner), n_team, n_iter, k_star }
}

impl Recipe {
    pub fn robots(&self) -> usize {
        match self {
            Recipe::Leaf { robots, .. } => *robots,
            Recipe::Divide { inner, n_team, .. } => n_team * inner.robots(),
        }
    }

    pub fn depth(&self) -> u32 {
        match self {
            Recipe::Leaf { depth, .. } => *depth,
            Recipe::Divide { inner, n_iter, .. } => (*n_iter as u32).saturating_mul(inner.depth()),
        }
    }

    /// Activity parameter `k*`.
    pub fn k_star(&self) -> usize {
        match self {
            Recipe::Leaf { robots, .. } => *robots,
            Recipe::Divide { k_star, .. } => *k_star,
        }
    }

    /// Starts an instance on `T(root)` for `robots`, with absolute anchor
    /// depth capped at `limit`.
    pub(crate) fn instantiate(
        &self,
        ctx: &Ctx<'_>,
        book: &mut Book,
        root: NodeId,
        robots: Vec<RobotId>,
        limit: u32,
        stop_after_last: bool,
    ) -> Box<dyn Instance> {
        match self {
            Recipe::Leaf { .. } => Box::new(bfdn1::Bfdn1::new(ctx, book, root, robots, limit)),
            Recipe::Divide { inner, n_team, n_iter, k_star } => Box::new(divide::Divide::new(
                ctx,
                book,
                divide::DivideSpec {
                    root,
                    robots,
                    inner: (**inner).clone(),
                    n_team: *n_team,
                    n_iter: *n_iter,
                    k_star: *k_star,
                    limit,
                    stop_after_last,
                },
            )),
        }
    }
}

/// Edges of the tree path from `from` to `to`, in walking order.
pub(crate) fn tree_path(tree: &Tree, from: NodeId, to: NodeId) -> Vec<EdgeId> {
    let top = tree.lca(from, to);
    let mut up = Vec::new();
    let mut x = from;
    while x != top {
        up.push(tree.parent_edge(x).expect("below lca"));
        x = tree.parent(x).expect("below lca");
    }
    let mut down = Vec::new();
    let mut y = to;
    while y != top {
        down.push(tree.parent_edge(y).expect("below lca"));
        y = tree.parent(y).expect("below lca");
    }
    down.reverse();
    up.extend(down);
    up
}

/// Smallest depth `>= depth(root)` holding an open node of `T(root)`.
pub(crate) fn min_open_depth_in(ctx: &Ctx<'_>, root: NodeId, max_depth: Option<u32>) -> Option<u32> {
    let start = ctx.tree.node_depth(root);
    let top = ctx.view.min_open_depth()?.max(start);
    let end = max_depth.unwrap_or(ctx.tree.depth()).min(ctx.tree.depth());
    (top..=end).find(|&d| ctx.view.open_at_depth(d).any(|v| ctx.tree.is_ancestor(root, v)))
}
