use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn cotex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cotex")).args(args).output().expect("spawn cotex")
}

fn cotex_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cotex")).args(args).env(key, value).output().expect("spawn cotex")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn tmp(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn gen_run_verify_round_trip() {
    let tree = tmp("rt_tree.txt");
    let trace = tmp("rt_trace.jsonl");
    let summary = tmp("rt_summary.csv");
    stdout(&cotex(&["gen", "--generator", "random:120", "--seed", "5", "-o", p(&tree)]));
    assert!(std::fs::read_to_string(&tree).unwrap().starts_with("120\n"));
    stdout(&cotex(&["run", "--input", p(&tree), "--k", "4", "--trace", p(&trace), "--summary", p(&summary)]));
    let csv = std::fs::read_to_string(&summary).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "n,D,Delta,k,algorithm,seed,runtime,edge_events,bound,bound_ok");
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "120");
    assert_eq!(row[4], "bfdn");
    assert_eq!(row[9], "true");
    assert_eq!(std::fs::read_to_string(&trace).unwrap().lines().count(), row[6].parse::<usize>().unwrap());
    let out = stdout(&cotex(&["verify", "--trace", p(&trace), "--tree", p(&tree)]));
    assert!(out.contains("explored: true"), "{out}");
}

#[test]
fn verify_rejects_a_trace_for_another_tree() {
    let tree = tmp("bad_tree.txt");
    let other = tmp("bad_other.txt");
    let trace = tmp("bad_trace.jsonl");
    stdout(&cotex(&["gen", "--generator", "spider:3x4", "-o", p(&tree)]));
    stdout(&cotex(&["gen", "--generator", "spider:2x6", "-o", p(&other)]));
    stdout(&cotex(&["run", "--input", p(&tree), "--k", "3", "--trace", p(&trace)]));
    let o = cotex(&["verify", "--trace", p(&trace), "--tree", p(&other)]);
    assert!(!o.status.success());
}

#[test]
fn bfdn_ell_trace_has_phase_columns() {
    let trace = tmp("ell_trace.jsonl");
    let out = stdout(&cotex(&[
        "run",
        "--generator",
        "random:200",
        "--algo",
        "bfdn_ell",
        "--ell",
        "2",
        "--k",
        "9",
        "--trace",
        p(&trace),
    ]));
    assert!(out.contains(",bfdn_ell,"), "{out}");
    let first = std::fs::read_to_string(&trace).unwrap().lines().next().unwrap().to_owned();
    assert!(first.contains("\"phase\"") && first.contains("\"active_count\""), "{first}");
}

#[test]
fn extension_models_run() {
    let grid = stdout(&cotex(&["run", "--grid", "6x5", "--obstacle", "2,1,3,2", "--model", "graph", "--k", "3"]));
    assert!(grid.lines().nth(1).unwrap().ends_with(",true"), "{grid}");
    let planner = stdout(&cotex(&["run", "--generator", "random:80", "--model", "planner", "--k", "4"]));
    assert!(planner.contains("bfdn_planner"), "{planner}");
    let mask = tmp("mask.txt");
    std::fs::write(&mask, "# alternate\n1010\n0101\n").unwrap();
    let spec = format!("file:{}", p(&mask));
    let broken =
        stdout(&cotex(&["run", "--generator", "random:60", "--model", "breakdown", "--mask", &spec, "--k", "4"]));
    assert!(broken.lines().nth(1).unwrap().ends_with(",true"), "{broken}");
    let bern = stdout(&cotex(&[
        "run",
        "--generator",
        "random:60",
        "--model",
        "breakdown",
        "--mask",
        "bernoulli:0.5",
        "--seed",
        "3",
        "--k",
        "4",
    ]));
    assert_eq!(bern.lines().count(), 2);
}

#[test]
fn gen_grid_emits_graph_with_distances() {
    let out = stdout(&cotex(&["gen", "--grid", "4x3", "--obstacle", "1,1,2,1"]));
    let header: Vec<usize> = out.lines().next().unwrap().split_whitespace().map(|t| t.parse().unwrap()).collect();
    assert_eq!(header, vec![10, 10, 0]);
    assert!(out.contains("\ndist\n"));
}

#[test]
fn game_prints_length_bound_and_steps() {
    let out = stdout(&cotex(&["game", "--k", "5", "--delta", "5", "--adversary", "optimal"]));
    let length: usize = out.lines().find_map(|l| l.strip_prefix("length: ")).unwrap().parse().unwrap();
    let bound: f64 = out.lines().find_map(|l| l.strip_prefix("bound: ")).unwrap().parse().unwrap();
    assert!(length as f64 <= bound);
    let header = out.lines().position(|l| l == "t,adversary,player,loads").unwrap();
    assert_eq!(out.lines().count() - header - 1, length);
    let gen = stdout(&cotex(&["game", "--k", "6", "--delta", "3", "--init", "generalized:2", "--adversary", "random"]));
    assert!(gen.contains("length: "));
    assert!(!cotex(&["game", "--k", "3", "--delta", "3", "--init", "weird"]).status.success());
}

#[test]
fn sweep_honours_seed_override_and_replays() {
    let args = [
        "sweep",
        "--generators",
        "random:60,spider:3x5",
        "--algos",
        "bfdn,bfdn_ell:2,dfs,offline",
        "--ks",
        "1,3",
        "--seeds",
        "1,2",
    ];
    let out = stdout(&cotex_env(&args, "COTEX_SEED", "77"));
    let rows: Vec<&str> = out.lines().skip(1).collect();
    // dfs only runs with k = 1, so the k = 3 dfs cells are skipped
    assert_eq!(rows.len(), 2 * (3 * 2 + 1));
    assert!(rows.iter().all(|r| r.split(',').nth(6) == Some("77")), "{out}");
    let again = stdout(&cotex_env(&args, "COTEX_SEED", "77"));
    assert_eq!(out, again);
}

#[test]
fn bounds_table_marks_best_online() {
    let out =
        stdout(&cotex(&["bounds", "--n", "100000", "--depth", "20", "--delta", "100", "--k", "1000", "--ells", "2,3"]));
    let best: Vec<&str> = out.lines().filter(|l| l.ends_with(",true,true")).collect();
    assert_eq!(best.len(), 1, "{out}");
}

#[test]
fn bad_arguments_fail() {
    assert!(!cotex(&["run", "--generator", "random:10", "--algo", "dfs", "--k", "2"]).status.success());
    assert!(!cotex(&["run", "--generator", "nonsense:3", "--k", "2"]).status.success());
    assert!(!cotex(&["run", "--generator", "random:10", "--mask", "bernoulli:0.5", "--k", "2"]).status.success());
}
