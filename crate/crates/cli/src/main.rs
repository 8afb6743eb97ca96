//! `cotex`: generate worlds, run explorations, play the urns game, sweep
//! parameter grids and re-audit saved traces.

mod commands;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "cotex", version, about = "Collaborative tree exploration simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a tree, or a graph with distances, to a file or stdout.
    Gen(GenArgs),
    /// Run one exploration and write its JSONL trace and summary CSV.
    Run(RunArgs),
    /// Play the balls-in-urns game with the balancing player.
    Game(GameArgs),
    /// Run a grid of generators, algorithms, team sizes and seeds.
    Sweep(SweepArgs),
    /// Print the runtime bounds for given parameters.
    Bounds(BoundsArgs),
    /// Re-audit a saved BFDN trace against its tree.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct WorldArgs {
    /// `random:N`, `spider:LxN` or `complete:BxD`.
    #[arg(long, conflicts_with_all = ["input", "grid"])]
    generator: Option<String>,
    /// Tree file (or graph file with `--model graph`).
    #[arg(long, conflicts_with = "grid")]
    input: Option<PathBuf>,
    /// Grid graph `WxH`.
    #[arg(long)]
    grid: Option<String>,
    /// Obstacle rectangle `x1,y1,x2,y2`; repeatable.
    #[arg(long = "obstacle", requires = "grid")]
    obstacles: Vec<String>,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    world: WorldArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Emit the tree in graph format.
    #[arg(long)]
    as_graph: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Bfdn,
    #[value(name = "bfdn_ell")]
    BfdnEll,
    Planner,
    Dfs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Model {
    Planner,
    Breakdown,
    Graph,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    world: WorldArgs,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, value_enum, default_value_t = Algo::Bfdn)]
    algo: Algo,
    #[arg(long, default_value_t = 2)]
    ell: u32,
    #[arg(long, value_enum)]
    model: Option<Model>,
    /// `ones`, `bernoulli:p`, `roundrobin`, `heaviest` or `file:path`.
    #[arg(long, default_value = "ones")]
    mask: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSONL trace destination.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Summary CSV destination; stdout when omitted.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Player {
    Balancing,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AdversaryKind {
    Greedy,
    Random,
    Optimal,
}

#[derive(Args)]
struct GameArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    delta: u32,
    #[arg(long, value_enum, default_value_t = Player::Balancing)]
    player: Player,
    #[arg(long, value_enum, default_value_t = AdversaryKind::Greedy)]
    adversary: AdversaryKind,
    /// `standard` or `generalized:u`.
    #[arg(long, default_value = "standard")]
    init: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated generator specs.
    #[arg(long, value_delimiter = ',', required = true)]
    generators: Vec<String>,
    /// Comma-separated algorithms: `bfdn`, `bfdn_ell:L`, `planner`, `dfs`, `offline`.
    #[arg(long, value_delimiter = ',', required = true)]
    algos: Vec<String>,
    #[arg(long, value_delimiter = ',', required = true)]
    ks: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    seeds: Vec<u64>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    /// Read n, D and Δ from this tree file instead of the flags.
    #[arg(long, conflicts_with_all = ["n", "depth", "delta"])]
    input: Option<PathBuf>,
    #[arg(long, required_unless_present = "input")]
    n: Option<usize>,
    #[arg(long, required_unless_present = "input")]
    depth: Option<u32>,
    #[arg(long, required_unless_present = "input")]
    delta: Option<usize>,
    #[arg(long)]
    k: usize,
    #[arg(long, value_delimiter = ',', default_value = "2,3")]
    ells: Vec<u32>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    trace: PathBuf,
    #[arg(long)]
    tree: PathBuf,
    /// Robot count; inferred from the first round when omitted.
    #[arg(long)]
    k: Option<usize>,
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Gen(a) => commands::gen(a),
        Command::Run(a) => commands::run(a),
        Command::Game(a) => commands::game(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Bounds(a) => commands::bounds(a),
        Command::Verify(a) => commands::verify(a),
    }
}
