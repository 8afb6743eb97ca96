use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use cotex_core::audit::{audit_trace, AuditOptions};
use cotex_core::bfdn::{run_bfdn, theorem1_bound};
use cotex_core::extensions::{
    gen_grid_with_obstacles, parse_mask, run_graph_bfdn, run_planner_bfdn, run_with_breakdowns, Rect,
};
use cotex_core::recursive::run_bfdn_ell;
use cotex_core::trace_io::{
    infer_robot_count, read_trace_jsonl, rebuild_trace, write_summary_csv, write_trace_jsonl, SummaryRow,
};
use cotex_core::urns::{optimal_adversary, play, theorem2_bound, Adversary, GameState, Greedy, RandomAdversary};
use cotex_core::workbench::{bound_table, single_dfs, sweep as run_sweep, write_sweep_csv, Generator, SweepSpec};
use cotex_core::{Graph, RunTrace, Tree, World};

use crate::{AdversaryKind, Algo, BoundsArgs, GameArgs, GenArgs, Model, RunArgs, SweepArgs, VerifyArgs, WorldArgs};

enum Loaded {
    Tree(Tree),
    Graph(Graph),
}

impl Loaded {
    fn tree(self) -> Result<Tree> {
        match self {
            Loaded::Tree(t) => Ok(t),
            Loaded::Graph(_) => bail!("this command needs a tree; graphs and grids only run with `--model graph`"),
        }
    }

    fn graph(self) -> Graph {
        match self {
            Loaded::Tree(t) => Graph::from_tree(&t),
            Loaded::Graph(g) => g,
        }
    }
}

fn parse_wxh(text: &str) -> Result<(usize, usize)> {
    let (w, h) = text.split_once('x').with_context(|| format!("grid size `{text}` is not WxH"))?;
    Ok((w.trim().parse()?, h.trim().parse()?))
}

fn parse_rect(text: &str) -> Result<Rect> {
    let v: Vec<usize> = text
        .split(',')
        .map(|s| s.trim().parse())
        .collect::<Result<_, _>>()
        .with_context(|| format!("obstacle `{text}` is not x1,y1,x2,y2"))?;
    let [x1, y1, x2, y2] = v[..] else { bail!("obstacle `{text}` needs four coordinates") };
    Ok(Rect::new(x1, y1, x2, y2))
}

fn load_world(args: &WorldArgs, seed: u64, as_graph: bool) -> Result<Loaded> {
    if let Some(spec) = &args.grid {
        let (w, h) = parse_wxh(spec)?;
        let rects = args.obstacles.iter().map(|o| parse_rect(o)).collect::<Result<Vec<_>>>()?;
        return Ok(Loaded::Graph(gen_grid_with_obstacles(w, h, &rects)?.graph));
    }
    if let Some(path) = &args.input {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        return Ok(if as_graph { Loaded::Graph(Graph::parse(&text)?) } else { Loaded::Tree(Tree::parse(&text)?) });
    }
    let spec = args.generator.as_deref().context("one of --generator, --input or --grid is required")?;
    let generator: Generator = spec.parse()?;
    Ok(Loaded::Tree(generator.build(seed)?))
}

/// A file when `path` is given, stdout otherwise.
fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn gen(a: GenArgs) -> Result<()> {
    let world = load_world(&a.world, a.seed, false)?;
    let text = match world {
        Loaded::Tree(t) if !a.as_graph => t.to_text(),
        other => other.graph().to_text(),
    };
    let mut out = sink(a.output.as_deref())?;
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

/// Trace, bound and (when the bound is not the criterion) an explicit verdict.
struct Outcome {
    trace: RunTrace,
    bound: f64,
    verdict: Option<bool>,
}

fn execute(a: &RunArgs) -> Result<Outcome> {
    let model = match (a.model, a.algo) {
        (None, Algo::Planner) => Some(Model::Planner),
        (m, _) => m,
    };
    if a.mask != "ones" && model != Some(Model::Breakdown) {
        bail!("--mask applies only to `--model breakdown`");
    }
    if model.is_some() && !matches!(a.algo, Algo::Bfdn | Algo::Planner) {
        bail!("--model runs BFDN; drop --algo or use --algo bfdn");
    }
    let world = load_world(&a.world, a.seed, model == Some(Model::Graph))?;
    Ok(match model {
        Some(Model::Graph) => {
            let run = run_graph_bfdn(&world.graph(), a.k)?;
            Outcome { trace: run.trace, bound: run.bound, verdict: None }
        }
        Some(Model::Planner) => {
            let run = run_planner_bfdn(&world.tree()?, a.k)?;
            Outcome { trace: run.trace, bound: run.bound, verdict: None }
        }
        Some(Model::Breakdown) => {
            let tree = world.tree()?;
            let mask = parse_mask(&a.mask, a.k, a.seed)?;
            let run = run_with_breakdowns(&tree, a.k, mask)?;
            Outcome { trace: run.trace, bound: run.threshold, verdict: Some(run.explored_at_threshold) }
        }
        None => {
            let tree = world.tree()?;
            match a.algo {
                Algo::Bfdn => {
                    let trace = run_bfdn(&tree, a.k)?;
                    let bound = theorem1_bound(tree.n(), tree.depth(), a.k, tree.max_degree());
                    Outcome { trace, bound, verdict: None }
                }
                Algo::BfdnEll => {
                    let run = run_bfdn_ell(&tree, a.ell, a.k)?;
                    if let Some(w) = &run.params.warning {
                        eprintln!("warning: {w}");
                    }
                    Outcome { trace: run.trace, bound: run.bound, verdict: None }
                }
                Algo::Dfs => {
                    ensure!(a.k == 1, "dfs is a single-robot baseline; use --k 1");
                    let trace = single_dfs(&tree)?;
                    Outcome { trace, bound: 2.0 * (tree.n() - 1) as f64, verdict: None }
                }
                Algo::Planner => unreachable!("planner is routed through the planner model"),
            }
        }
    })
}

pub fn run(a: RunArgs) -> Result<()> {
    let out = execute(&a)?;
    if let Some(path) = &a.trace {
        let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
        write_trace_jsonl(&out.trace, &mut w)?;
        w.flush()?;
    }
    let mut row = SummaryRow::new(&out.trace, a.seed, out.bound);
    if let Some(v) = out.verdict {
        row.bound_ok = v;
    }
    let mut w = sink(a.summary.as_deref())?;
    write_summary_csv(&[row], &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn game(a: GameArgs) -> Result<()> {
    let init = match a.init.split_once(':') {
        None if a.init == "standard" => GameState::standard(a.k, a.delta),
        Some(("generalized", u)) => {
            GameState::generalized(a.k, u.trim().parse().context("generalized:u needs an integer u")?, a.delta)?
        }
        _ => bail!("unknown init `{}` (expected standard or generalized:u)", a.init),
    };
    let mut adversary: Box<dyn Adversary> = match a.adversary {
        AdversaryKind::Greedy => Box::new(Greedy),
        AdversaryKind::Random => Box::new(RandomAdversary::new(a.seed)),
        AdversaryKind::Optimal => Box::new(optimal_adversary(init.k().max(init.total() as usize), a.delta)?),
    };
    let outcome = play(adversary.as_mut(), &init)?;
    let mut out = io::stdout().lock();
    writeln!(out, "adversary: {}", adversary.name())?;
    writeln!(out, "length: {}", outcome.length)?;
    writeln!(out, "bound: {:.4}", theorem2_bound(a.k, a.delta))?;
    writeln!(out, "max_spread: {}", outcome.max_spread)?;
    writeln!(out, "t,adversary,player,loads")?;
    for s in &outcome.steps {
        let loads: Vec<String> = s.loads.iter().map(u32::to_string).collect();
        writeln!(out, "{},{},{},{}", s.t, s.adversary, s.player, loads.join(" "))?;
    }
    Ok(())
}

pub fn sweep(a: SweepArgs) -> Result<()> {
    let spec = SweepSpec {
        generators: a.generators.iter().map(|g| g.parse()).collect::<Result<_, _>>()?,
        algorithms: a.algos.iter().map(|g| g.parse()).collect::<Result<_, _>>()?,
        ks: a.ks,
        seeds: a.seeds,
    }
    .with_env_seed()?;
    let rows = run_sweep(&spec)?;
    let mut w = sink(a.output.as_deref())?;
    write_sweep_csv(&rows, &mut w)?;
    w.flush()?;
    let failed = rows.iter().filter(|r| !r.bound_ok).count();
    ensure!(failed == 0, "{failed} of {} rows exceed their bound", rows.len());
    Ok(())
}

pub fn bounds(a: BoundsArgs) -> Result<()> {
    let (n, depth, delta) = match &a.input {
        Some(path) => {
            let t =
                Tree::parse(&std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?)?;
            (t.n(), t.depth(), t.max_degree())
        }
        None => (a.n.unwrap_or_default(), a.depth.unwrap_or_default(), a.delta.unwrap_or_default()),
    };
    ensure!(n >= 1 && a.k >= 1, "n and k must be at least 1");
    let mut out = io::stdout().lock();
    writeln!(out, "algorithm,value,online,best_online")?;
    for r in bound_table(n, depth, a.k, delta, &a.ells) {
        writeln!(out, "{},{:.4},{},{}", r.algorithm, r.value, r.online, r.best_online)?;
    }
    Ok(())
}

pub fn verify(a: VerifyArgs) -> Result<()> {
    let tree =
        Tree::parse(&std::fs::read_to_string(&a.tree).with_context(|| format!("reading {}", a.tree.display()))?)?;
    let file = File::open(&a.trace).with_context(|| format!("opening {}", a.trace.display()))?;
    let rounds = read_trace_jsonl(BufReader::new(file))?;
    let k = match a.k {
        Some(k) => k,
        None => infer_robot_count(&rounds).context("cannot infer the robot count from an empty trace; pass --k")?,
    };
    let trace = rebuild_trace(&tree, "bfdn", k, rounds);
    let report = audit_trace(&trace, &tree, AuditOptions::for_size(tree.n()));
    let mut out = io::stdout().lock();
    writeln!(out, "rounds: {}", trace.rounds.len())?;
    writeln!(out, "runtime: {}", trace.runtime)?;
    writeln!(out, "explored: {}", trace.explored)?;
    writeln!(out, "idle_rounds: {}", report.idle_rounds)?;
    writeln!(out, "excursions: {}", report.excursions)?;
    for v in &report.violations {
        writeln!(out, "violation: {v}")?;
    }
    ensure!(report.ok(), "{} violation(s)", report.violations.len());
    writeln!(out, "ok")?;
    Ok(())
}
