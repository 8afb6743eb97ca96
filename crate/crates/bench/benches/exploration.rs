use std::hint::black_box;

use cotex_core::bfdn::run_bfdn;
use cotex_core::extensions::{random_grid, run_graph_bfdn, run_planner_bfdn};
use cotex_core::recursive::run_bfdn_ell;
use cotex_core::urns::{play, GameState, Greedy, ValueTable};
use cotex_core::workbench::{gen_random_tree, gen_spider, offline_schedule};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn bfdn(c: &mut Criterion) {
    let mut g = c.benchmark_group("bfdn");
    let tree = gen_random_tree(5000, 1);
    for k in [1usize, 8, 64, 512] {
        g.bench_with_input(BenchmarkId::new("random5000", k), &k, |b, &k| {
            b.iter(|| run_bfdn(&tree, k).unwrap().runtime)
        });
    }
    let spider = gen_spider(32, 100);
    g.bench_function("spider32x100/k32", |b| b.iter(|| run_bfdn(&spider, 32).unwrap().runtime));
    g.finish();
}

fn bfdn_ell(c: &mut Criterion) {
    let mut g = c.benchmark_group("bfdn_ell");
    g.sample_size(10);
    let tree = gen_random_tree(2000, 2);
    for (ell, k) in [(1u32, 16usize), (2, 16), (3, 64)] {
        g.bench_function(format!("random2000/l{ell}k{k}"), |b| {
            b.iter(|| run_bfdn_ell(&tree, ell, k).unwrap().trace.runtime)
        });
    }
    g.finish();
}

fn extensions(c: &mut Criterion) {
    let mut g = c.benchmark_group("extensions");
    g.sample_size(20);
    let tree = gen_random_tree(2000, 3);
    g.bench_function("planner/random2000/k16", |b| b.iter(|| run_planner_bfdn(&tree, 16).unwrap().trace.runtime));
    let grid = random_grid(40, 40, 12, 4).unwrap();
    g.bench_function("graph/grid40/k16", |b| b.iter(|| run_graph_bfdn(&grid.graph, 16).unwrap().trace.runtime));
    g.bench_function("offline/random2000/k16", |b| b.iter(|| offline_schedule(&tree, 16).makespan));
    g.finish();
}

fn urns(c: &mut Criterion) {
    let mut g = c.benchmark_group("urns");
    g.bench_function("value_table/k256", |b| b.iter(|| ValueTable::new(black_box(256), 64).get(256, 256)));
    let init = GameState::standard(1024, 1024);
    g.bench_function("greedy/k1024", |b| b.iter(|| play(&mut Greedy, &init).unwrap().length));
    g.finish();
}

criterion_group!(benches, bfdn, bfdn_ell, extensions, urns);
criterion_main!(benches);
