//! BFDN restricted to a sub-tree, with anchors capped at an absolute depth.

use std::collections::HashMap;

use super::{min_open_depth_in, tree_path, Book, Ctx, Instance, RoundOut};
use crate::engine::{Reanchor, Selection};
use crate::{EdgeId, NodeId, RobotId};

pub(crate) struct Bfdn1 {
    root: NodeId,
    robots: Vec<RobotId>,
    limit: u32,
    /// Per local robot; the next edge is at the end.
    stacks: Vec<Vec<EdgeId>>,
    load: HashMap<NodeId, u32>,
    pending: Vec<Reanchor>,
    deep: bool,
    done: bool,
}

impl Bfdn1 {
    /// Robots already inside `T(root)` keep a valid anchor; everyone else
    /// is anchored at `root`.
    pub(crate) fn new(ctx: &Ctx<'_>, book: &mut Book, root: NodeId, robots: Vec<RobotId>, limit: u32) -> Self {
        let tree = ctx.tree;
        let mut stacks = Vec::with_capacity(robots.len());
        let mut load = HashMap::new();
        for &i in &robots {
            let pos = ctx.positions[i];
            let old = book.anchor[i];
            let keep = book.active[i] && pos != root && tree.is_ancestor(root, old) && tree.node_depth(old) <= limit;
            let anchor = if keep { old } else { root };
            let mut stack = if tree.is_ancestor(anchor, pos) { Vec::new() } else { tree_path(tree, pos, anchor) };
            stack.reverse();
            stacks.push(stack);
            book.anchor[i] = anchor;
            book.active[i] = true;
            *load.entry(anchor).or_insert(0) += 1;
        }
        Bfdn1 { root, robots, limit, stacks, load, pending: Vec::new(), deep: false, done: false }
    }

    fn move_load(&mut self, from: NodeId, to: NodeId) {
        if let Some(c) = self.load.get_mut(&from) {
            *c = c.saturating_sub(1);
        }
        *self.load.entry(to).or_insert(0) += 1;
    }

    fn drop_load(&mut self, from: NodeId) {
        if let Some(c) = self.load.get_mut(&from) {
            *c = c.saturating_sub(1);
        }
    }
}

impl Instance for Bfdn1 {
    fn refresh(&mut self, ctx: &Ctx<'_>, book: &mut Book) {
        if self.done {
            return;
        }
        let tree = ctx.tree;
        let open_min = min_open_depth_in(ctx, self.root, None);
        let shallow = open_min.is_some_and(|m| m <= self.limit);
        for li in 0..self.robots.len() {
            let i = self.robots[li];
            if !book.active[i] {
                continue;
            }
            let u = ctx.positions[i];
            let v = book.anchor[i];
            let below = v != u && tree.is_ancestor(v, u);
            // re-anchor down the robot's own path once everything up to the
            // anchor's depth is closed
            if below {
                let target = self.limit.min(tree.node_depth(u)).min(open_min.unwrap_or(u32::MAX));
                if target > tree.node_depth(v) {
                    let mut w = u;
                    while tree.node_depth(w) > target {
                        w = tree.parent(w).expect("non-root");
                    }
                    self.move_load(v, w);
                    book.anchor[i] = w;
                    self.pending.push(Reanchor { robot: i, node: w, depth: tree.node_depth(w) });
                }
            }
            let v = book.anchor[i];
            let strictly_below = v != u && tree.is_ancestor(v, u);
            if !shallow && !strictly_below {
                book.active[i] = false;
                self.stacks[li].clear();
                self.drop_load(v);
            }
        }
        self.deep = !shallow;
        self.done = self.robots.iter().all(|&i| !book.active[i]);
    }

    fn select(&mut self, ctx: &Ctx<'_>, book: &mut Book, out: &mut RoundOut) {
        out.reanchors.append(&mut self.pending);
        if self.done {
            return;
        }
        let tree = ctx.tree;
        let mut candidates: Option<Vec<NodeId>> = None;
        for li in 0..self.robots.len() {
            let i = self.robots[li];
            if !book.active[i] {
                continue;
            }
            let pos = ctx.positions[i];
            if pos == self.root && !self.deep {
                let cands =
                    candidates.get_or_insert_with(|| match min_open_depth_in(ctx, self.root, Some(self.limit)) {
                        Some(d) => ctx.view.open_at_depth(d).filter(|&v| tree.is_ancestor(self.root, v)).collect(),
                        None => Vec::new(),
                    });
                let mut best: Option<(u32, NodeId)> = None;
                for &v in cands.iter() {
                    let c = self.load.get(&v).copied().unwrap_or(0);
                    if best.is_none_or(|(bc, _)| c < bc) {
                        best = Some((c, v));
                        if c == 0 {
                            break;
                        }
                    }
                }
                if let Some((_, v)) = best {
                    let old = book.anchor[i];
                    self.move_load(old, v);
                    book.anchor[i] = v;
                    let mut stack = tree_path(tree, self.root, v);
                    stack.reverse();
                    self.stacks[li] = stack;
                    out.reanchors.push(Reanchor { robot: i, node: v, depth: tree.node_depth(v) });
                }
            }
            if let Some(e) = self.stacks[li].pop() {
                out.selections[i] = Selection::Edge(e);
                continue;
            }
            let taken = &out.taken;
            match ctx.view.first_dangling(tree, pos, |e| !taken.contains(&e)) {
                Some(e) => {
                    out.taken.push(e);
                    out.selections[i] = Selection::Edge(e);
                }
                None if pos == self.root => out.selections[i] = Selection::Stay,
                None => out.selections[i] = Selection::Up,
            }
        }
    }

    fn is_done(&self) -> bool {
        self.done
    }

    fn is_deep(&self) -> bool {
        self.deep
    }

    fn in_transit(&self) -> bool {
        false
    }
}
