//! Grid graphs with rectangular obstacles, origin at cell (0, 0).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::TreeError;
use crate::tree::{Graph, World};
use crate::NodeId;

const MAX_CELLS: usize = 10_000_000;
const MAX_ATTEMPTS: usize = 1000;

/// Axis-aligned rectangle of blocked cells, corners inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub x1: usize,
    pub y1: usize,
    pub x2: usize,
    pub y2: usize,
}

impl Rect {
    pub fn new(x1: usize, y1: usize, x2: usize, y2: usize) -> Self {
        Rect { x1: x1.min(x2), y1: y1.min(y2), x2: x1.max(x2), y2: y1.max(y2) }
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        (self.x1..=self.x2).contains(&x) && (self.y1..=self.y2).contains(&y)
    }
}

#[derive(Debug, Clone)]
pub struct Grid {
    pub width: usize,
    pub height: usize,
    pub obstacles: Vec<Rect>,
    pub graph: Graph,
    cells: Vec<(usize, usize)>,
    ids: Vec<Option<NodeId>>,
}

impl Grid {
    /// Coordinates of a node.
    pub fn cell(&self, v: NodeId) -> (usize, usize) {
        self.cells[v]
    }

    /// Node at `(x, y)`, if the cell is free.
    pub fn node_at(&self, x: usize, y: usize) -> Option<NodeId> {
        if x < self.width && y < self.height {
            self.ids[y * self.width + x]
        } else {
            None
        }
    }
}

/// Builds the grid minus the obstacles. Free cells are numbered row by row.
/// Fails if the origin is blocked, the free region is disconnected, or some
/// free cell's graph distance differs from `x + y`.
pub fn gen_grid_with_obstacles(width: usize, height: usize, obstacles: &[Rect]) -> Result<Grid, TreeError> {
    let total = width.checked_mul(height).filter(|&c| c <= MAX_CELLS).ok_or(TreeError::TooLarge(usize::MAX))?;
    if total == 0 {
        return Err(TreeError::TooLarge(0));
    }
    if obstacles.iter().any(|r| r.contains(0, 0)) {
        return Err(TreeError::OriginBlocked);
    }
    let mut ids = vec![None; total];
    let mut cells = Vec::new();
    for y in 0..height {
        for x in 0..width {
            if !obstacles.iter().any(|r| r.contains(x, y)) {
                ids[y * width + x] = Some(cells.len());
                cells.push((x, y));
            }
        }
    }
    let mut edges = Vec::new();
    for &(x, y) in &cells {
        let v = ids[y * width + x].expect("free cell");
        if x + 1 < width {
            if let Some(u) = ids[y * width + x + 1] {
                edges.push((v, u));
            }
        }
        if y + 1 < height {
            if let Some(u) = ids[(y + 1) * width + x] {
                edges.push((v, u));
            }
        }
    }
    let graph = Graph::new(cells.len(), &edges, 0, None)?;
    for (v, &(x, y)) in cells.iter().enumerate() {
        let manhattan = (x + y) as u32;
        if graph.distance(v) != manhattan {
            return Err(TreeError::NotManhattan { x, y, graph: graph.distance(v), manhattan });
        }
    }
    Ok(Grid { width, height, obstacles: obstacles.to_vec(), graph, cells, ids })
}

/// Draws `n_obstacles` random rectangles (each side at most a quarter of
/// the grid) until the layout is valid.
pub fn random_grid(width: usize, height: usize, n_obstacles: usize, seed: u64) -> Result<Grid, TreeError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        let rects: Vec<Rect> = (0..n_obstacles)
            .map(|_| {
                let w = rng.gen_range(1..=(width / 4).max(1));
                let h = rng.gen_range(1..=(height / 4).max(1));
                let x = rng.gen_range(0..width);
                let y = rng.gen_range(0..height);
                Rect::new(x, y, (x + w - 1).min(width - 1), (y + h - 1).min(height - 1))
            })
            .collect();
        match gen_grid_with_obstacles(width, height, &rects) {
            Ok(g) => return Ok(g),
            Err(TreeError::TooLarge(c)) => return Err(TreeError::TooLarge(c)),
            Err(_) => continue,
        }
    }
    Err(TreeError::GenerationFailed(MAX_ATTEMPTS))
}
