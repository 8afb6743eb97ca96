//! The divide-depth functor: iterations of parallel inner instances on
//! disjoint sub-trees, each iteration pushing anchors `d'` deeper.

use super::{tree_path, Book, Ctx, Instance, Recipe, RoundOut};
use crate::engine::Selection;
use crate::{EdgeId, NodeId, RobotId};

pub(crate) struct DivideSpec {
    pub root: NodeId,
    pub robots: Vec<RobotId>,
    pub inner: Recipe,
    pub n_team: usize,
    pub n_iter: usize,
    pub k_star: usize,
    /// Absolute depth cap for anchors.
    pub limit: u32,
    /// Stop after the last iteration instead of running deep.
    pub stop_after_last: bool,
}

enum Stage {
    Begin,
    Transit { teams: Vec<(NodeId, Vec<RobotId>)>, paths: Vec<(RobotId, Vec<EdgeId>)> },
    Running(Vec<Box<dyn Instance>>),
    Deep(Vec<Box<dyn Instance>>),
    Interrupted,
    Finished,
}

pub(crate) struct Divide {
    spec: DivideSpec,
    iter: usize,
    /// Robots that have progressed below the current roots.
    progressed: Vec<RobotId>,
    roots: Vec<NodeId>,
    stage: Stage,
}

impl Divide {
    pub(crate) fn new(ctx: &Ctx<'_>, book: &mut Book, spec: DivideSpec) -> Self {
        let progressed: Vec<RobotId> =
            spec.robots.iter().copied().filter(|&i| book.active[i] && ctx.positions[i] != spec.root).collect();
        for &i in &spec.robots {
            if !progressed.contains(&i) {
                book.anchor[i] = spec.root;
                book.active[i] = ctx.positions[i] == spec.root;
            }
        }
        let roots = vec![spec.root];
        Divide { spec, iter: 0, progressed, roots, stage: Stage::Begin }
    }

    fn inner_limit(&self, ctx: &Ctx<'_>, r: NodeId) -> u32 {
        (ctx.tree.node_depth(r) + self.spec.inner.depth()).min(self.spec.limit)
    }

    /// Splits robots into one team per root, progressed robots staying with
    /// the root above their anchor and fresh robots filling up in index
    /// order. Leftover fresh robots wait inactive.
    fn begin_iteration(&mut self, ctx: &Ctx<'_>, book: &mut Book) -> Stage {
        self.iter += 1;
        let team_size = self.spec.inner.robots();
        assert!(self.roots.len() <= self.spec.n_team, "more sub-tree roots than teams");
        let mut teams: Vec<(NodeId, Vec<RobotId>)> = self.roots.iter().map(|&r| (r, Vec::new())).collect();
        for &i in &self.progressed {
            let t = teams
                .iter_mut()
                .find(|(r, _)| ctx.tree.is_ancestor(*r, book.anchor[i]))
                .expect("progressed robot outside every root");
            t.1.push(i);
        }
        let mut fresh = self.spec.robots.iter().copied().filter(|i| !self.progressed.contains(i));
        let mut paths = Vec::new();
        for (r, team) in teams.iter_mut() {
            assert!(team.len() <= team_size, "more progressed robots than a team holds");
            while team.len() < team_size {
                let Some(i) = fresh.next() else { break };
                team.push(i);
                book.anchor[i] = *r;
                book.active[i] = true;
                let mut path = tree_path(ctx.tree, ctx.positions[i], *r);
                path.reverse();
                paths.push((i, path));
            }
            team.sort_unstable();
        }
        for i in fresh {
            book.active[i] = false;
        }
        Stage::Transit { teams, paths }
    }

    fn end_iteration(&mut self, ctx: &Ctx<'_>, book: &Book) -> Stage {
        self.progressed = self.spec.robots.iter().copied().filter(|&i| book.active[i]).collect();
        let target =
            (ctx.tree.node_depth(self.spec.root) + self.iter as u32 * self.spec.inner.depth()).min(self.spec.limit);
        debug_assert!(
            self.progressed.iter().all(|&i| ctx.tree.node_depth(book.anchor[i]) == target),
            "anchors did not reach depth {target} after iteration {}: {:?} root {} limit {}",
            self.iter,
            self.progressed
                .iter()
                .map(|&i| (i, book.anchor[i], ctx.tree.node_depth(book.anchor[i]), ctx.positions[i]))
                .collect::<Vec<_>>(),
            self.spec.root,
            self.spec.limit
        );
        let mut roots: Vec<NodeId> = self.progressed.iter().map(|&i| book.anchor[i]).collect();
        roots.sort_unstable();
        roots.dedup();
        self.roots = roots;
        if self.iter < self.spec.n_iter {
            Stage::Begin
        } else if self.spec.stop_after_last {
            Stage::Interrupted
        } else {
            Stage::Finished
        }
    }
}

impl Instance for Divide {
    fn refresh(&mut self, ctx: &Ctx<'_>, book: &mut Book) {
        loop {
            match std::mem::replace(&mut self.stage, Stage::Finished) {
                Stage::Begin => self.stage = self.begin_iteration(ctx, book),
                Stage::Transit { teams, paths } => {
                    if paths.iter().any(|(_, p)| !p.is_empty()) {
                        self.stage = Stage::Transit { teams, paths };
                        return;
                    }
                    let instances = teams
                        .into_iter()
                        .map(|(r, team)| {
                            let limit = self.inner_limit(ctx, r);
                            self.spec.inner.instantiate(ctx, book, r, team, limit, false)
                        })
                        .collect();
                    self.stage = Stage::Running(instances);
                }
                Stage::Running(mut instances) => {
                    for inst in instances.iter_mut() {
                        inst.refresh(ctx, book);
                    }
                    if book.active_count(&self.spec.robots) >= self.spec.k_star {
                        self.stage = Stage::Running(instances);
                        return;
                    }
                    match self.end_iteration(ctx, book) {
                        Stage::Finished => {
                            // last iteration: keep running the same instances deep
                            let done = instances.iter().all(|x| x.is_done());
                            self.stage = if done { Stage::Finished } else { Stage::Deep(instances) };
                            return;
                        }
                        next => self.stage = next,
                    }
                }
                Stage::Deep(mut instances) => {
                    for inst in instances.iter_mut() {
                        inst.refresh(ctx, book);
                    }
                    let done = instances.iter().all(|x| x.is_done());
                    self.stage = if done { Stage::Finished } else { Stage::Deep(instances) };
                    return;
                }
                s @ (Stage::Interrupted | Stage::Finished) => {
                    self.stage = s;
                    return;
                }
            }
        }
    }

    fn select(&mut self, ctx: &Ctx<'_>, book: &mut Book, out: &mut RoundOut) {
        match &mut self.stage {
            Stage::Transit { paths, .. } => {
                for (i, path) in paths.iter_mut() {
                    if let Some(e) = path.pop() {
                        out.selections[*i] = Selection::Edge(e);
                    }
                }
            }
            Stage::Running(instances) | Stage::Deep(instances) => {
                for inst in instances.iter_mut() {
                    inst.select(ctx, book, out);
                }
            }
            _ => {}
        }
    }

    fn is_done(&self) -> bool {
        matches!(self.stage, Stage::Interrupted | Stage::Finished)
    }

    fn is_deep(&self) -> bool {
        match &self.stage {
            Stage::Deep(instances) => instances.iter().all(|x| x.is_deep() || x.is_done()),
            Stage::Running(instances) if self.iter == self.spec.n_iter => {
                instances.iter().all(|x| x.is_deep() || x.is_done())
            }
            Stage::Finished => true,
            _ => false,
        }
    }

    fn in_transit(&self) -> bool {
        match &self.stage {
            Stage::Transit { .. } => true,
            Stage::Running(instances) | Stage::Deep(instances) => instances.iter().any(|x| x.in_transit()),
            _ => false,
        }
    }
}
