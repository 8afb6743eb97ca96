use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::TreeError;
use crate::tree::Tree;

/// Largest tree the generators will build.
pub const MAX_NODES: usize = 10_000_000;

/// Uniform random recursive tree: node `i` picks its parent uniformly in
/// `0..i`.
pub fn gen_random_tree(n: usize, seed: u64) -> Tree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges: Vec<_> = (1..n.max(1)).map(|i| (rng.gen_range(0..i), i)).collect();
    Tree::from_edges(&edges).expect("recursive trees are valid")
}

/// `legs` disjoint paths of length `len` hanging from the root.
pub fn gen_spider(legs: usize, len: usize) -> Tree {
    let mut edges = Vec::with_capacity(legs * len);
    for j in 0..legs {
        let base = 1 + j * len;
        for t in 0..len {
            let parent = if t == 0 { 0 } else { base + t - 1 };
            edges.push((parent, base + t));
        }
    }
    Tree::from_edges(&edges).expect("spiders are valid")
}

/// Complete `b`-ary tree of depth `depth`, numbered level by level.
pub fn gen_complete_tree(b: usize, depth: u32) -> Result<Tree, TreeError> {
    let mut n: usize = 1;
    let mut level: usize = 1;
    for _ in 0..depth {
        level = level.checked_mul(b).ok_or(TreeError::TooLarge(usize::MAX))?;
        n = n.checked_add(level).ok_or(TreeError::TooLarge(usize::MAX))?;
        if n > MAX_NODES {
            return Err(TreeError::TooLarge(n));
        }
    }
    let edges: Vec<_> = (1..n).map(|v| ((v - 1) / b.max(1), v)).collect();
    Tree::from_edges(&edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::World;

    #[test]
    fn random_tree_shapes() {
        assert_eq!(gen_random_tree(1, 3).n(), 1);
        let two = gen_random_tree(2, 3);
        assert_eq!((two.n(), two.depth()), (2, 1));
        assert_eq!(gen_random_tree(500, 9), gen_random_tree(500, 9));
    }

    #[test]
    fn spider_shapes() {
        let p = gen_spider(1, 3);
        assert_eq!((p.n(), p.depth(), p.max_degree()), (4, 3, 2));
        let s = gen_spider(3, 1);
        assert_eq!((s.n(), s.depth(), s.max_degree()), (4, 1, 3));
        let t = gen_spider(4, 5);
        assert_eq!((t.n(), t.depth(), t.max_degree()), (21, 5, 4));
    }

    #[test]
    fn complete_shapes() {
        assert_eq!(gen_complete_tree(2, 3).unwrap().n(), 15);
        let path = gen_complete_tree(1, 5).unwrap();
        assert_eq!((path.n(), path.depth(), path.max_degree()), (6, 5, 2));
        assert_eq!(gen_complete_tree(3, 2).unwrap().n(), 13);
        assert!(matches!(gen_complete_tree(10, 8), Err(TreeError::TooLarge(_))));
    }
}
