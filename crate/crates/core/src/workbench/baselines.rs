use crate::engine::{run, Decision, Explorer, RoundContext, RunConfig, RunTrace, Selection};
use crate::error::EngineError;
use crate::tree::{Tree, World};
use crate::NodeId;

/// Classical single-robot depth-first search: lowest-port dangling edge,
/// otherwise up.
#[derive(Debug, Default, Clone)]
pub struct Dfs;

impl Explorer for Dfs {
    fn name(&self) -> String {
        "dfs".into()
    }

    fn select(&mut self, ctx: &RoundContext<'_>) -> Result<Decision, EngineError> {
        if ctx.positions.len() != 1 {
            return Err(EngineError::SelectionCount { expected: 1, got: ctx.positions.len() });
        }
        let mut d = Decision::stay(1);
        if ctx.movable[0] {
            let pos = ctx.positions[0];
            d.selections[0] = match ctx.view.first_dangling(ctx.world, pos, |_| true) {
                Some(e) => Selection::Edge(e),
                None => Selection::Up,
            };
        }
        Ok(d)
    }
}

pub fn single_dfs(world: &dyn World) -> Result<RunTrace, EngineError> {
    run(world, &mut Dfs, &RunConfig::new(1))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OfflineSchedule {
    /// Node sequence walked by each robot, starting and ending at the root.
    pub walks: Vec<Vec<NodeId>>,
    pub makespan: usize,
    /// `max{ceil(2(n-1)/k), D}`.
    pub floor: usize,
}

/// Nodes visited by a depth-first walk, children in port order.
pub fn euler_tour(tree: &Tree) -> Vec<NodeId> {
    let mut tour = vec![0];
    let mut stack = vec![(0usize, 0usize)];
    while let Some(&mut (v, ref mut next)) = stack.last_mut() {
        if let Some(&c) = tree.children(v).get(*next) {
            *next += 1;
            tour.push(c);
            stack.push((c, 0));
        } else {
            stack.pop();
            if let Some(&(p, _)) = stack.last() {
                tour.push(p);
            }
        }
    }
    tour
}

fn root_path_nodes(tree: &Tree, v: NodeId) -> Vec<NodeId> {
    let mut path = vec![v];
    let mut x = v;
    while let Some(p) = tree.parent(x) {
        path.push(p);
        x = p;
    }
    path.reverse();
    path
}

/// Splits the Euler tour into `k` contiguous pieces; each robot walks to
/// its piece, follows it, and returns.
pub fn offline_schedule(tree: &Tree, k: usize) -> OfflineSchedule {
    let k = k.max(1);
    let tour = euler_tour(tree);
    let moves = tour.len() - 1;
    let seg = moves.div_ceil(k).max(1);
    let mut walks = Vec::with_capacity(k);
    for i in 0..k {
        let start = (i * seg).min(moves);
        let end = ((i + 1) * seg).min(moves);
        if start >= end {
            walks.push(vec![0]);
            continue;
        }
        let mut walk = root_path_nodes(tree, tour[start]);
        walk.extend_from_slice(&tour[start + 1..=end]);
        let mut back = root_path_nodes(tree, tour[end]);
        back.reverse();
        walk.extend_from_slice(&back[1..]);
        walks.push(walk);
    }
    let makespan = walks.iter().map(|w| w.len() - 1).max().unwrap_or(0);
    let floor = (2 * (tree.n() - 1)).div_ceil(k).max(tree.depth() as usize);
    OfflineSchedule { walks, makespan, floor }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workbench::generators::{gen_random_tree, gen_spider};

    #[test]
    fn dfs_takes_twice_the_edges() {
        for n in [2, 5, 500] {
            let t = gen_random_tree(n, n as u64);
            assert_eq!(single_dfs(&t).unwrap().runtime, 2 * (n - 1));
        }
        assert_eq!(single_dfs(&gen_spider(1, 4)).unwrap().runtime, 8);
    }

    #[test]
    fn euler_tour_closes() {
        let t = gen_random_tree(50, 1);
        let tour = euler_tour(&t);
        assert_eq!(tour.len(), 2 * 49 + 1);
        assert_eq!((tour[0], tour[98]), (0, 0));
    }

    #[test]
    fn schedule_examples() {
        let t = gen_random_tree(40, 2);
        assert_eq!(offline_schedule(&t, 1).makespan, 78);
        assert_eq!(offline_schedule(&gen_spider(5, 1), 5).makespan, 2);
        let path = gen_spider(1, 4);
        let s = offline_schedule(&path, 2);
        assert!(s.makespan <= 12);
        assert!(s.makespan >= s.floor);
    }

    #[test]
    fn walks_are_connected_and_cover_every_edge() {
        let t = gen_random_tree(200, 5);
        let s = offline_schedule(&t, 7);
        let mut seen = vec![false; t.n()];
        for w in &s.walks {
            assert_eq!((w[0], *w.last().unwrap()), (0, 0));
            for pair in w.windows(2) {
                assert!(t.parent(pair[0]) == Some(pair[1]) || t.parent(pair[1]) == Some(pair[0]));
                seen[pair[1]] = true;
            }
        }
        assert!(seen[1..].iter().all(|&b| b));
    }
}
