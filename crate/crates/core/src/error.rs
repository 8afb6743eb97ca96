use thiserror::Error;

use crate::{EdgeId, NodeId, RobotId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("cycle detected at edge ({0}, {1})")]
    Cycle(NodeId, NodeId),
    #[error("input is disconnected: node {0} is unreachable from the root")]
    Disconnected(NodeId),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(NodeId, NodeId),
    #[error("self loop at node {0}")]
    SelfLoop(NodeId),
    #[error("invalid distance labelling: {0}")]
    BadDistance(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("instance too large: {0} nodes")]
    TooLarge(usize),
    #[error("grid origin (0,0) is covered by an obstacle")]
    OriginBlocked,
    #[error("grid distance differs from Manhattan distance at ({x},{y}): {graph} != {manhattan}")]
    NotManhattan { x: usize, y: usize, graph: u32, manhattan: u32 },
    #[error("could not generate a valid obstacle layout after {0} attempts")]
    GenerationFailed(usize),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ViewError {
    #[error("node {0} is not adjacent to any discovered edge")]
    NotAdjacent(NodeId),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("round {round}: robot {robot} selected edge {edge}, which is not incident to node {node}")]
    NotIncident { round: usize, robot: RobotId, edge: EdgeId, node: NodeId },
    #[error("round {round}: robots {first} and {second} both selected dangling edge {edge}")]
    DoubleSelection { round: usize, edge: EdgeId, first: RobotId, second: RobotId },
    #[error("round {round}: robot {robot} selected `up` at node {node}, which has no known parent edge")]
    NoParent { round: usize, robot: RobotId, node: NodeId },
    #[error("round {round}: blocked robot {robot} was given a move")]
    BlockedMove { round: usize, robot: RobotId },
    #[error("explorer returned {got} selections for {expected} robots")]
    SelectionCount { expected: usize, got: usize },
    #[error("round limit {0} exceeded: run did not terminate")]
    NonTermination(usize),
    #[error("robot count must be at least 1")]
    NoRobots,
    #[error("internal algorithm state corrupted: {0}")]
    Corrupted(String),
    #[error("memory budget exceeded by robot {robot}: {used} > {budget} bits")]
    MemoryBudget { robot: RobotId, used: usize, budget: usize },
    #[error("planner: {0}")]
    Planner(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("urn {0} is out of range")]
    OutOfRange(usize),
    #[error("urn {0} is empty")]
    EmptyUrn(usize),
    #[error("the game is already over")]
    GameOver,
    #[error("invalid initial state: {0}")]
    BadInit(String),
    #[error("state space too large for exhaustive search (k={k}, delta={delta}; limit 6)")]
    TooLarge { k: usize, delta: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MaskError {
    #[error("unknown mask `{0}` (expected ones, bernoulli:p, roundrobin, heaviest or file:path)")]
    Unknown(String),
    #[error("invalid bernoulli probability `{0}`")]
    Probability(String),
    #[error("mask file line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("cannot read mask file {path}: {msg}")]
    Io { path: String, msg: String },
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("trace line {line}: {msg}")]
    Json { line: usize, msg: String },
    #[error("trace is empty")]
    Empty,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SweepError {
    #[error("cannot parse {what} `{text}`")]
    Parse { what: &'static str, text: String },
    #[error("{cell}: {msg}")]
    Cell { cell: String, msg: String },
}
