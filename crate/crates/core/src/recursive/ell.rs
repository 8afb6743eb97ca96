//! BFDN_ℓ: depth-doubling stages of nested divide-depth instances.

use serde::Serialize;

use super::invariants::{InvariantMonitor, InvariantReport, RoundStart};
use super::{divide_depth, Book, Ctx, Instance, Recipe, RoundOut};
use crate::engine::{run_observed, Decision, Explorer, Phase, RoundContext, RunConfig, RunTrace, Selection};
use crate::error::EngineError;
use crate::tree::{Tree, World};
use crate::workbench::bounds::{bfdn_ell_bound, within};
use crate::{NodeId, RobotId};

/// Stages beyond this depth exponent are never needed (`2^64 > D`).
const MAX_STAGES: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EllParams {
    pub ell: u32,
    pub k: usize,
    /// Largest integer with `m^ℓ <= k`.
    pub m: usize,
    /// Robots actually used, `m^ℓ`.
    pub big_k: usize,
    pub warning: Option<String>,
}

pub fn bfdn_ell_params(ell: u32, k: usize) -> EllParams {
    let ell = ell.max(1);
    let pow = |m: usize| (0..ell).try_fold(1usize, |acc, _| acc.checked_mul(m));
    let mut m = 1;
    while pow(m + 1).is_some_and(|p| p <= k) {
        m += 1;
    }
    let big_k = pow(m).expect("m^ℓ <= k");
    let warning =
        (big_k == 1 && k > 1).then(|| format!("k = {k} is below 2^{ell}; BFDN_{ell} degenerates to a single robot"));
    EllParams { ell, k, m, big_k, warning }
}

/// `4n/k^{1/ℓ} + 2^{ℓ+1}(ℓ + 1 + min{ln Δ, ln k / ℓ}) D^{1+1/ℓ}`.
pub fn theorem3_bound(n: usize, depth: u32, k: usize, max_degree: usize, ell: u32) -> f64 {
    bfdn_ell_bound(n, depth, k, max_degree, ell)
}

fn pow2(e: u64) -> u32 {
    if e >= 31 {
        1 << 31
    } else {
        1 << e
    }
}

/// Recipe of stage `j`: anchors go down to `2^{jℓ}` using `m^ℓ` robots.
pub(crate) fn stage_recipe(ell: u32, m: usize, j: u32) -> Recipe {
    let leaf = Recipe::Leaf { robots: m, depth: pow2(u64::from(j)) };
    if ell <= 1 {
        return divide_depth(leaf, 1, 1, m);
    }
    let iters = pow2(u64::from(j)) as usize;
    (2..=ell).fold(leaf, |inner, _| divide_depth(inner, m, iters, m))
}

/// Rounds spent in one depth stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StageRecord {
    pub j: u32,
    /// Anchor depth budget `2^{jℓ}`.
    pub depth: u32,
    pub k_star: usize,
    pub first_round: usize,
    pub last_round: usize,
}

/// What the invariant monitor needs to see of an anchor-based explorer.
pub trait AnchorState {
    fn book(&self) -> &Book;
    fn depth_budget(&self) -> u32;
    fn k_star(&self) -> usize;
    /// Exploration is over and robots are heading home.
    fn terminated(&self) -> bool;
    /// Activity state from which the last round's moves were chosen.
    fn round_start(&self) -> Option<&RoundStart>;
}

/// Shared plumbing: the book, the running instance and the return leg.
struct Driver<'t> {
    tree: &'t Tree,
    book: Book,
    start: Option<RoundStart>,
    instance: Option<Box<dyn Instance>>,
    returning: bool,
}

impl<'t> Driver<'t> {
    fn new(tree: &'t Tree, k: usize) -> Self {
        Driver { tree, book: Book::new(k, tree.origin()), start: None, instance: None, returning: false }
    }

    fn return_leg(&self, ctx: &RoundContext<'_>) -> Decision {
        let origin = self.tree.origin();
        let selections =
            ctx.positions.iter().map(|&p| if p == origin { Selection::Stay } else { Selection::Up }).collect();
        Decision { selections, ..Default::default() }
    }

    fn emit(&mut self, cx: &Ctx<'_>, depth_budget: u32) -> Result<Decision, EngineError> {
        let k = cx.positions.len();
        let inst = self.instance.as_mut().expect("instance running");
        let mut out = RoundOut { selections: vec![Selection::Stay; k], reanchors: Vec::new(), taken: Vec::new() };
        inst.select(cx, &mut self.book, &mut out);
        self.start = Some(RoundStart::new(self.tree, cx.view, &self.book.active, &self.book.anchor, depth_budget));
        let origin = self.tree.origin();
        let moving = out.selections.iter().zip(cx.positions).any(|(s, &p)| match s {
            Selection::Edge(_) => true,
            Selection::Up => p != origin,
            Selection::Stay => false,
        });
        if !moving && !cx.view.fully_explored() {
            return Err(EngineError::Corrupted("anchor-based run stalled before exploring the tree".into()));
        }
        Ok(Decision {
            selections: out.selections,
            reanchors: out.reanchors,
            phase: Some(if inst.is_deep() { Phase::Deep } else { Phase::Shallow }),
            active_count: Some(self.book.active.iter().filter(|&&a| a).count()),
            suspended: inst.in_transit(),
        })
    }
}

/// BFDN_ℓ over `k` robots, of which `m^ℓ` take part.
pub struct BfdnEll<'t> {
    driver: Driver<'t>,
    params: EllParams,
    stages: Vec<StageRecord>,
}

impl<'t> BfdnEll<'t> {
    pub fn new(tree: &'t Tree, ell: u32, k: usize) -> Self {
        BfdnEll { driver: Driver::new(tree, k), params: bfdn_ell_params(ell, k), stages: Vec::new() }
    }

    pub fn params(&self) -> &EllParams {
        &self.params
    }

    pub fn stages(&self) -> &[StageRecord] {
        &self.stages
    }
}

impl Explorer for BfdnEll<'_> {
    fn name(&self) -> String {
        "bfdn_ell".into()
    }

    fn select(&mut self, ctx: &RoundContext<'_>) -> Result<Decision, EngineError> {
        let d = &mut self.driver;
        if ctx.view.fully_explored() {
            d.returning = true;
        }
        if d.returning {
            return Ok(d.return_leg(ctx));
        }
        let cx = Ctx { tree: d.tree, view: ctx.view, positions: ctx.positions };
        loop {
            if d.instance.is_none() {
                let j = self.stages.last().map_or(1, |s| s.j + 1);
                if j >= MAX_STAGES {
                    return Err(EngineError::Corrupted("depth schedule exhausted".into()));
                }
                let recipe = stage_recipe(self.params.ell, self.params.m, j);
                let robots: Vec<RobotId> = (0..self.params.big_k).collect();
                d.instance = Some(recipe.instantiate(&cx, &mut d.book, d.tree.origin(), robots, recipe.depth(), true));
                self.stages.push(StageRecord {
                    j,
                    depth: recipe.depth(),
                    k_star: recipe.k_star(),
                    first_round: ctx.round,
                    last_round: ctx.round,
                });
            }
            let inst = d.instance.as_mut().expect("instance running");
            inst.refresh(&cx, &mut d.book);
            if !inst.is_done() {
                break;
            }
            d.instance = None;
        }
        let s = self.stages.last_mut().expect("a stage is running");
        s.last_round = ctx.round;
        d.emit(&cx, s.depth)
    }

    fn anchor(&self, robot: RobotId) -> Option<NodeId> {
        Some(self.driver.book.anchor[robot])
    }
}

impl AnchorState for BfdnEll<'_> {
    fn book(&self) -> &Book {
        &self.driver.book
    }

    fn depth_budget(&self) -> u32 {
        self.stages.last().map_or(0, |s| s.depth)
    }

    fn k_star(&self) -> usize {
        self.stages.last().map_or(self.params.m, |s| s.k_star)
    }

    fn terminated(&self) -> bool {
        self.driver.returning
    }

    fn round_start(&self) -> Option<&RoundStart> {
        self.driver.start.as_ref()
    }
}

/// Runs a single anchor-based recipe from the root, then brings every
/// robot home. Nodes deeper than the recipe's depth budget may stay
/// unexplored.
pub struct AnchorRunner<'t> {
    driver: Driver<'t>,
    recipe: Recipe,
}

impl<'t> AnchorRunner<'t> {
    pub fn new(tree: &'t Tree, recipe: Recipe) -> Self {
        AnchorRunner { driver: Driver::new(tree, recipe.robots()), recipe }
    }
}

impl Explorer for AnchorRunner<'_> {
    fn name(&self) -> String {
        "anchor_based".into()
    }

    fn select(&mut self, ctx: &RoundContext<'_>) -> Result<Decision, EngineError> {
        let d = &mut self.driver;
        if ctx.view.fully_explored() {
            d.returning = true;
        }
        if !d.returning {
            let cx = Ctx { tree: d.tree, view: ctx.view, positions: ctx.positions };
            if d.instance.is_none() {
                let robots: Vec<RobotId> = (0..self.recipe.robots()).collect();
                let depth = self.recipe.depth();
                d.instance = Some(self.recipe.instantiate(&cx, &mut d.book, d.tree.origin(), robots, depth, false));
            }
            let inst = d.instance.as_mut().expect("instance running");
            inst.refresh(&cx, &mut d.book);
            if !inst.is_done() {
                return d.emit(&cx, self.recipe.depth());
            }
            d.returning = true;
        }
        Ok(d.return_leg(ctx))
    }

    fn anchor(&self, robot: RobotId) -> Option<NodeId> {
        Some(self.driver.book.anchor[robot])
    }
}

impl AnchorState for AnchorRunner<'_> {
    fn book(&self) -> &Book {
        &self.driver.book
    }

    fn depth_budget(&self) -> u32 {
        self.recipe.depth()
    }

    fn k_star(&self) -> usize {
        self.recipe.k_star()
    }

    fn terminated(&self) -> bool {
        self.driver.returning
    }

    fn round_start(&self) -> Option<&RoundStart> {
        self.driver.start.as_ref()
    }
}

fn observed<E: Explorer + AnchorState>(
    tree: &Tree,
    explorer: &mut E,
    k: usize,
) -> Result<(RunTrace, InvariantReport), EngineError> {
    let mut monitor = InvariantMonitor::new(tree);
    let trace = run_observed(tree, explorer, &RunConfig::new(k), |obs, ex: &E| {
        let book = ex.book();
        monitor.observe(
            tree,
            obs.view,
            obs.positions,
            obs.record,
            &book.active,
            &book.anchor,
            ex.depth_budget(),
            ex.k_star(),
            ex.round_start(),
            ex.terminated(),
        );
        Ok(())
    })?;
    Ok((trace, monitor.report))
}

pub fn run_anchor_based(tree: &Tree, recipe: Recipe) -> Result<RunTrace, EngineError> {
    let k = recipe.robots();
    crate::engine::run(tree, &mut AnchorRunner::new(tree, recipe), &RunConfig::new(k))
}

/// Like [`run_anchor_based`], checking the anchor invariants every round.
pub fn run_anchor_based_checked(tree: &Tree, recipe: Recipe) -> Result<(RunTrace, InvariantReport), EngineError> {
    let k = recipe.robots();
    observed(tree, &mut AnchorRunner::new(tree, recipe), k)
}

#[derive(Debug, Clone)]
pub struct EllRun {
    pub trace: RunTrace,
    pub params: EllParams,
    pub stages: Vec<StageRecord>,
    pub bound: f64,
    pub bound_ok: bool,
}

fn finish(tree: &Tree, ex: BfdnEll<'_>, trace: RunTrace) -> EllRun {
    let bound = theorem3_bound(tree.n(), tree.depth(), ex.params.k, tree.max_degree(), ex.params.ell);
    let bound_ok = trace.explored && within(trace.runtime, bound);
    EllRun { trace, params: ex.params, stages: ex.stages, bound, bound_ok }
}

pub fn run_bfdn_ell(tree: &Tree, ell: u32, k: usize) -> Result<EllRun, EngineError> {
    let mut ex = BfdnEll::new(tree, ell, k);
    let trace = crate::engine::run(tree, &mut ex, &RunConfig::new(k))?;
    Ok(finish(tree, ex, trace))
}

/// Like [`run_bfdn_ell`], checking the anchor invariants every round.
pub fn run_bfdn_ell_checked(tree: &Tree, ell: u32, k: usize) -> Result<(EllRun, InvariantReport), EngineError> {
    let mut ex = BfdnEll::new(tree, ell, k);
    let (trace, report) = observed(tree, &mut ex, k)?;
    Ok((finish(tree, ex, trace), report))
}

/// Per-stage comparison of rounds against edge events.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageAudit {
    pub j: u32,
    pub depth: u32,
    pub rounds: usize,
    pub events: usize,
    /// `max(0, T - E / k*)`.
    pub overhead: f64,
    /// `c_ℓ d^{1+1/ℓ}` with `c_ℓ = min{ln Δ, ln m} + ℓ + 1`.
    pub limit: f64,
    pub ok: bool,
}

/// Checks that every stage wastes at most `c_ℓ d^{1+1/ℓ}` rounds beyond
/// what its edge events pay for.
pub fn shallow_efficiency_audit(run: &EllRun) -> Vec<StageAudit> {
    let ell = f64::from(run.params.ell);
    let lg = (run.trace.max_degree.max(1) as f64).ln().min((run.params.m as f64).ln());
    let c = lg + ell + 1.0;
    run.stages
        .iter()
        .map(|s| {
            let in_stage = run.trace.rounds.iter().filter(|r| (s.first_round..=s.last_round).contains(&r.round));
            let (rounds, events) = in_stage.fold((0, 0), |(t, e), r| (t + 1, e + r.events.len()));
            let overhead = (rounds as f64 - events as f64 / s.k_star.max(1) as f64).max(0.0);
            let limit = c * f64::from(s.depth).powf(1.0 + 1.0 / ell);
            StageAudit { j: s.j, depth: s.depth, rounds, events, overhead, limit, ok: overhead <= limit }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bfdn::run_bfdn;
    use crate::recursive::bfdn1_depth_limited;
    use crate::tree::Tree;
    use crate::workbench::{gen_complete_tree, gen_random_tree, gen_spider};

    #[test]
    fn params_pick_largest_power() {
        let p = bfdn_ell_params(2, 16);
        assert_eq!((p.m, p.big_k), (4, 16));
        assert_eq!(bfdn_ell_params(2, 17).big_k, 16);
        assert_eq!(bfdn_ell_params(1, 5).big_k, 5);
        let p = bfdn_ell_params(3, 7);
        assert_eq!(p.big_k, 1);
        assert!(p.warning.is_some());
        assert!(bfdn_ell_params(3, 1).warning.is_none());
    }

    #[test]
    fn stage_depths_follow_schedule() {
        for ell in 1..=3 {
            for j in 1..4 {
                let r = stage_recipe(ell, 3, j);
                assert_eq!(r.depth(), 1 << (j * ell));
                assert_eq!(r.robots(), 3usize.pow(ell));
            }
        }
    }

    #[test]
    fn unlimited_leaf_matches_bfdn() {
        for seed in 0..10 {
            let t = gen_random_tree(120, seed);
            for k in [1, 2, 4] {
                let plain = run_bfdn(&t, k).unwrap();
                let leaf = run_anchor_based(&t, bfdn1_depth_limited(k, t.depth())).unwrap();
                let done = plain.completion_round.unwrap();
                assert_eq!(leaf.completion_round, Some(done), "seed {seed} k {k}");
                for (a, b) in plain.rounds.iter().zip(&leaf.rounds).take(done) {
                    assert_eq!(a.moves, b.moves, "seed {seed} k {k} round {}", a.round);
                }
            }
        }
    }

    #[test]
    fn star_with_unit_budget() {
        let star = gen_spider(6, 1);
        let (trace, report) = run_anchor_based_checked(&star, bfdn1_depth_limited(3, 1)).unwrap();
        assert!(trace.explored && trace.all_at_origin(0));
        assert!(report.ok(), "{report:?}");
    }

    /// Binary tree of depth 2 with a path of `legs[i]` edges below each leaf.
    fn brush(legs: [usize; 4]) -> Tree {
        let mut edges = vec![(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)];
        for (i, &len) in legs.iter().enumerate() {
            let mut prev = 3 + i;
            for _ in 0..len {
                let next = edges.len() + 1;
                edges.push((prev, next));
                prev = next;
            }
        }
        Tree::from_edges(&edges).unwrap()
    }

    #[test]
    fn divide_pushes_anchors_past_inner_budget() {
        let t = brush([1, 2, 3, 12]);
        let recipe = divide_depth(bfdn1_depth_limited(2, 2), 2, 2, 2);
        assert_eq!(recipe.depth(), 4);
        let (trace, report) = run_anchor_based_checked(&t, recipe).unwrap();
        assert!(trace.explored && trace.all_at_origin(0));
        let deepest = trace.rounds.iter().flat_map(|r| &r.reanchors).map(|r| r.depth).max();
        assert_eq!(deepest, Some(4));
        assert!(report.ok(), "{report:?}");
        assert!(report.suspended_rounds > 0);
    }

    #[test]
    fn divide_checked_on_binary_tree() {
        let t = gen_complete_tree(2, 6).unwrap();
        let (trace, report) = run_anchor_based_checked(&t, divide_depth(bfdn1_depth_limited(2, 2), 2, 2, 2)).unwrap();
        assert!(trace.explored && trace.all_at_origin(0));
        assert!(report.ok(), "{report:?}");
    }

    #[test]
    fn bfdn_ell_explores_within_bound() {
        for seed in 0..8 {
            let t = gen_random_tree(300, seed);
            for (ell, k) in [(1, 4), (2, 4), (2, 9), (2, 17), (3, 8), (3, 30)] {
                let (run, report) = run_bfdn_ell_checked(&t, ell, k).unwrap();
                assert!(run.trace.explored && run.trace.all_at_origin(0), "seed {seed} ell {ell} k {k}");
                assert!(run.bound_ok, "seed {seed} ell {ell} k {k}: {} > {}", run.trace.runtime, run.bound);
                assert!(report.ok(), "seed {seed} ell {ell} k {k}: {report:?}");
                assert!(shallow_efficiency_audit(&run).iter().all(|a| a.ok), "seed {seed} ell {ell} k {k}");
            }
        }
    }

    #[test]
    fn single_team_single_iteration_is_identity() {
        for seed in 0..6 {
            let t = gen_random_tree(150, seed);
            let leaf = run_anchor_based(&t, bfdn1_depth_limited(3, 2)).unwrap();
            let wrapped = run_anchor_based(&t, divide_depth(bfdn1_depth_limited(3, 2), 1, 1, 3)).unwrap();
            assert_eq!(leaf.rounds, wrapped.rounds, "seed {seed}");
        }
    }

    #[test]
    fn limited_leaf_ends_shallow_with_anchors_at_budget() {
        let t = gen_complete_tree(2, 4).unwrap();
        let trace = run_anchor_based(&t, bfdn1_depth_limited(4, 2)).unwrap();
        assert!(trace.explored);
        let first_deep = trace.rounds.iter().position(|r| r.phase == Some(Phase::Deep)).expect("runs deep");
        let mut anchors = vec![0; 4];
        for r in &trace.rounds[..=first_deep] {
            for a in &r.reanchors {
                anchors[a.robot] = a.node;
            }
        }
        let active = trace.rounds[first_deep].active_count.unwrap();
        assert!(active <= 4);
        assert!(anchors.iter().all(|&v| t.node_depth(v) == 2), "{anchors:?}");
    }

    #[test]
    fn shallow_tree_finishes_early() {
        for seed in 0..5 {
            let t = gen_random_tree(40, seed);
            let recipe = divide_depth(bfdn1_depth_limited(2, 8), 2, 4, 2);
            assert!(recipe.depth() > t.depth());
            let (trace, report) = run_anchor_based_checked(&t, recipe).unwrap();
            assert!(trace.explored && trace.all_at_origin(0));
            assert!(report.ok(), "{report:?}");
        }
    }

    #[test]
    fn star_stage_overhead_is_small() {
        let star = gen_spider(12, 1);
        let run = run_bfdn_ell(&star, 1, 4).unwrap();
        let audit = shallow_efficiency_audit(&run);
        let c1 = (12f64).ln().min(4f64.ln()) + 2.0;
        assert!(audit.iter().all(|a| a.overhead <= c1 * f64::from(a.depth).powi(2)), "{audit:?}");
    }
}
