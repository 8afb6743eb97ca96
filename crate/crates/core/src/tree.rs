//! Hidden worlds: rooted trees and graphs with a distance oracle.
//!
//! Both carry port-numbered adjacency. Ports are 1-based in the public
//! vocabulary (`port(v, 1)` is the first port) and stored 0-based.

use std::collections::{HashSet, VecDeque};
use std::fmt::Write as _;

use crate::error::TreeError;
use crate::{EdgeId, NodeId};

/// Read-only access to the structure robots move on.
pub trait World: Sync {
    fn node_count(&self) -> usize;
    fn edge_count(&self) -> usize;
    /// Ordered incident edges of `v`; index `j - 1` is port `j`.
    fn ports(&self, v: NodeId) -> &[EdgeId];
    fn endpoints(&self, e: EdgeId) -> (NodeId, NodeId);
    /// 0-based port index of `e` at its endpoint `v`.
    fn port_index(&self, e: EdgeId, v: NodeId) -> usize;
    /// Distance to the origin: tree depth, or the graph distance oracle.
    fn distance(&self, v: NodeId) -> u32;
    /// Tree depth or graph radius.
    fn depth(&self) -> u32;
    fn max_degree(&self) -> usize;
    fn is_tree(&self) -> bool;

    fn origin(&self) -> NodeId {
        0
    }

    fn other_end(&self, e: EdgeId, v: NodeId) -> NodeId {
        let (a, b) = self.endpoints(e);
        if a == v {
            b
        } else {
            a
        }
    }
}

/// A rooted tree with stable dense ids. Root is node `0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree {
    parent: Vec<Option<NodeId>>,
    parent_edge: Vec<Option<EdgeId>>,
    children: Vec<Vec<NodeId>>,
    ports: Vec<Vec<EdgeId>>,
    /// (parent, child) for every edge id.
    edges: Vec<(NodeId, NodeId)>,
    edge_port: Vec<[u32; 2]>,
    depth: Vec<u32>,
    height: u32,
    max_degree: usize,
    tin: Vec<u32>,
    tout: Vec<u32>,
}

impl Tree {
    /// Builds a tree from `(parent, child)` pairs. The pairs are treated as
    /// undirected and re-rooted at node `0`; edge ids follow input order.
    pub fn from_edges(edge_list: &[(NodeId, NodeId)]) -> Result<Tree, TreeError> {
        let n = edge_list.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(1);
        let mut seen = HashSet::with_capacity(edge_list.len());
        let mut dsu: Vec<usize> = (0..n).collect();
        fn find(dsu: &mut [usize], mut x: usize) -> usize {
            while dsu[x] != x {
                dsu[x] = dsu[dsu[x]];
                x = dsu[x];
            }
            x
        }
        let mut adj: Vec<Vec<(NodeId, EdgeId)>> = vec![Vec::new(); n];
        for (e, &(a, b)) in edge_list.iter().enumerate() {
            if a == b {
                return Err(TreeError::SelfLoop(a));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(TreeError::DuplicateEdge(a, b));
            }
            let (ra, rb) = (find(&mut dsu, a), find(&mut dsu, b));
            if ra == rb {
                return Err(TreeError::Cycle(a, b));
            }
            dsu[ra] = rb;
            adj[a].push((b, e));
            adj[b].push((a, e));
        }

        let mut parent = vec![None; n];
        let mut parent_edge = vec![None; n];
        let mut depth = vec![0u32; n];
        let mut visited = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::from([0usize]);
        visited[0] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &(w, e) in &adj[v] {
                if !visited[w] {
                    visited[w] = true;
                    parent[w] = Some(v);
                    parent_edge[w] = Some(e);
                    depth[w] = depth[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        if let Some(v) = visited.iter().position(|&x| !x) {
            return Err(TreeError::Disconnected(v));
        }

        let mut edges = vec![(0, 0); edge_list.len()];
        let mut children = vec![Vec::new(); n];
        for v in 1..n {
            let p = parent[v].expect("non-root has a parent");
            edges[parent_edge[v].unwrap()] = (p, v);
            children[p].push(v);
        }
        for c in &mut children {
            c.sort_unstable();
        }
        Ok(Self::assemble(parent, parent_edge, children, edges, depth))
    }

    fn assemble(
        parent: Vec<Option<NodeId>>,
        parent_edge: Vec<Option<EdgeId>>,
        children: Vec<Vec<NodeId>>,
        edges: Vec<(NodeId, NodeId)>,
        depth: Vec<u32>,
    ) -> Tree {
        let n = parent.len();
        let mut ports = Vec::with_capacity(n);
        let mut edge_port = vec![[0u32; 2]; edges.len()];
        for v in 0..n {
            let mut p = Vec::with_capacity(children[v].len() + 1);
            if let Some(e) = parent_edge[v] {
                edge_port[e][1] = 0;
                p.push(e);
            }
            for &c in &children[v] {
                let e = parent_edge[c].unwrap();
                edge_port[e][0] = p.len() as u32;
                p.push(e);
            }
            ports.push(p);
        }
        let max_degree = ports.iter().map(Vec::len).max().unwrap_or(0);
        let height = depth.iter().copied().max().unwrap_or(0);

        let mut tin = vec![0u32; n];
        let mut tout = vec![0u32; n];
        let mut clock = 0u32;
        let mut stack = vec![(0usize, 0usize)];
        tin[0] = 0;
        while let Some(&mut (v, ref mut next)) = stack.last_mut() {
            if *next < children[v].len() {
                let c = children[v][*next];
                *next += 1;
                clock += 1;
                tin[c] = clock;
                stack.push((c, 0));
            } else {
                tout[v] = clock;
                stack.pop();
            }
        }

        Tree { parent, parent_edge, children, ports, edges, edge_port, depth, height, max_degree, tin, tout }
    }

    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.parent[v]
    }

    pub fn parent_edge(&self, v: NodeId) -> Option<EdgeId> {
        self.parent_edge[v]
    }

    pub fn children(&self, v: NodeId) -> &[NodeId] {
        &self.children[v]
    }

    /// (parent, child) of edge `e`.
    pub fn edge(&self, e: EdgeId) -> (NodeId, NodeId) {
        self.edges[e]
    }

    pub fn node_depth(&self, v: NodeId) -> u32 {
        self.depth[v]
    }

    /// Edge behind 1-based port `j` of `v`.
    pub fn port(&self, v: NodeId, j: usize) -> Option<EdgeId> {
        j.checked_sub(1).and_then(|i| self.ports[v].get(i).copied())
    }

    /// `a` is an ancestor of `b` (or equal).
    pub fn is_ancestor(&self, a: NodeId, b: NodeId) -> bool {
        self.tin[a] <= self.tin[b] && self.tout[b] <= self.tout[a]
    }

    /// Child of `a` on the path towards its strict descendant `b`.
    pub fn child_toward(&self, a: NodeId, b: NodeId) -> Option<NodeId> {
        if a == b || !self.is_ancestor(a, b) {
            return None;
        }
        let mut v = b;
        while self.parent[v] != Some(a) {
            v = self.parent[v]?;
        }
        Some(v)
    }

    pub fn lca(&self, mut a: NodeId, mut b: NodeId) -> NodeId {
        while self.depth[a] > self.depth[b] {
            a = self.parent[a].unwrap();
        }
        while self.depth[b] > self.depth[a] {
            b = self.parent[b].unwrap();
        }
        while a != b {
            a = self.parent[a].unwrap();
            b = self.parent[b].unwrap();
        }
        a
    }

    /// Edges from the root down to `v`.
    pub fn root_path(&self, v: NodeId) -> Vec<EdgeId> {
        let mut path = Vec::with_capacity(self.depth[v] as usize);
        let mut x = v;
        while let Some(e) = self.parent_edge[x] {
            path.push(e);
            x = self.parent[x].unwrap();
        }
        path.reverse();
        path
    }

    /// `(parent, child)` list in edge-id order; round-trips through
    /// [`Tree::from_edges`].
    pub fn edge_list(&self) -> Vec<(NodeId, NodeId)> {
        self.edges.clone()
    }

    /// Text format: first line `n`, then `n - 1` lines `parent child`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{}", self.n()).unwrap();
        for &(p, c) in &self.edges {
            writeln!(s, "{p} {c}").unwrap();
        }
        s
    }

    pub fn parse(text: &str) -> Result<Tree, TreeError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line, first) = lines.next().ok_or(TreeError::Parse { line: 1, msg: "empty input".into() })?;
        let n: usize =
            first.parse().map_err(|_| TreeError::Parse { line, msg: format!("bad node count `{first}`") })?;
        let mut edges = Vec::with_capacity(n.saturating_sub(1));
        for (line, l) in lines {
            edges.push(parse_pair(line, l)?);
        }
        if edges.len() + 1 != n.max(1) {
            return Err(TreeError::Parse {
                line: 0,
                msg: format!("expected {} edges, found {}", n.saturating_sub(1), edges.len()),
            });
        }
        let tree = Tree::from_edges(&edges)?;
        if tree.n() != n.max(1) {
            return Err(TreeError::Disconnected(tree.n().min(n)));
        }
        Ok(tree)
    }
}

fn parse_pair(line: usize, l: &str) -> Result<(usize, usize), TreeError> {
    let mut it = l.split_whitespace().map(str::parse::<usize>);
    match (it.next(), it.next(), it.next()) {
        (Some(Ok(a)), Some(Ok(b)), None) => Ok((a, b)),
        _ => Err(TreeError::Parse { line, msg: format!("expected two node ids, got `{l}`") }),
    }
}

impl World for Tree {
    fn node_count(&self) -> usize {
        self.n()
    }
    fn edge_count(&self) -> usize {
        self.edges.len()
    }
    fn ports(&self, v: NodeId) -> &[EdgeId] {
        &self.ports[v]
    }
    fn endpoints(&self, e: EdgeId) -> (NodeId, NodeId) {
        self.edges[e]
    }
    fn port_index(&self, e: EdgeId, v: NodeId) -> usize {
        let (p, _) = self.edges[e];
        self.edge_port[e][usize::from(p != v)] as usize
    }
    fn distance(&self, v: NodeId) -> u32 {
        self.depth[v]
    }
    fn depth(&self) -> u32 {
        self.height
    }
    fn max_degree(&self) -> usize {
        self.max_degree
    }
    fn is_tree(&self) -> bool {
        true
    }
}

/// Connected undirected graph with an exact distance oracle to the origin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    edges: Vec<(NodeId, NodeId)>,
    ports: Vec<Vec<EdgeId>>,
    edge_port: Vec<[u32; 2]>,
    dist: Vec<u32>,
    radius: u32,
    max_degree: usize,
    origin: NodeId,
}

impl Graph {
    /// Ports at each node are ordered by neighbour id. When `dist` is `None`
    /// it is computed by breadth-first search from `origin`.
    pub fn new(
        n: usize,
        edge_list: &[(NodeId, NodeId)],
        origin: NodeId,
        dist: Option<Vec<u32>>,
    ) -> Result<Graph, TreeError> {
        let mut seen = HashSet::new();
        let mut adj: Vec<Vec<(NodeId, EdgeId)>> = vec![Vec::new(); n];
        for (e, &(a, b)) in edge_list.iter().enumerate() {
            if a >= n || b >= n {
                return Err(TreeError::Parse { line: 0, msg: format!("edge ({a},{b}) out of range") });
            }
            if a == b {
                return Err(TreeError::SelfLoop(a));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(TreeError::DuplicateEdge(a, b));
            }
            adj[a].push((b, e));
            adj[b].push((a, e));
        }
        let bfs = bfs_distances(&adj, origin);
        if let Some(v) = bfs.iter().position(Option::is_none) {
            return Err(TreeError::Disconnected(v));
        }
        let bfs: Vec<u32> = bfs.into_iter().map(Option::unwrap).collect();
        let dist = match dist {
            None => bfs,
            Some(d) => {
                if d.len() != n {
                    return Err(TreeError::BadDistance(format!("{} labels for {n} nodes", d.len())));
                }
                if d[origin] != 0 {
                    return Err(TreeError::BadDistance("origin distance is not 0".into()));
                }
                for &(a, b) in edge_list {
                    if d[a].abs_diff(d[b]) > 1 {
                        return Err(TreeError::BadDistance(format!("edge ({a},{b}) spans {} and {}", d[a], d[b])));
                    }
                }
                if d != bfs {
                    return Err(TreeError::BadDistance("labels differ from true graph distances".into()));
                }
                d
            }
        };
        let mut edge_port = vec![[0u32; 2]; edge_list.len()];
        let mut ports = Vec::with_capacity(n);
        for (v, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            for (i, &(_, e)) in list.iter().enumerate() {
                let (a, _) = edge_list[e];
                edge_port[e][usize::from(a != v)] = i as u32;
            }
            ports.push(list.iter().map(|&(_, e)| e).collect::<Vec<_>>());
        }
        let radius = dist.iter().copied().max().unwrap_or(0);
        let max_degree = ports.iter().map(Vec::len).max().unwrap_or(0);
        Ok(Graph { edges: edge_list.to_vec(), ports, edge_port, dist, radius, max_degree, origin })
    }

    /// The same tree viewed as a graph; ports keep the tree's order.
    pub fn from_tree(tree: &Tree) -> Graph {
        let n = tree.n();
        let edges = tree.edge_list();
        let mut edge_port = vec![[0u32; 2]; edges.len()];
        for (e, &(p, c)) in edges.iter().enumerate() {
            edge_port[e] = [tree.port_index(e, p) as u32, tree.port_index(e, c) as u32];
        }
        Graph {
            ports: (0..n).map(|v| tree.ports(v).to_vec()).collect(),
            edges,
            edge_port,
            dist: (0..n).map(|v| tree.node_depth(v)).collect(),
            radius: tree.depth(),
            max_degree: tree.max_degree(),
            origin: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.ports.len()
    }

    pub fn edge_list(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    /// `nodes m origin`, then `m` lines `u v`, then a `dist` line followed by
    /// one distance per node.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{} {} {}", self.n(), self.edges.len(), self.origin).unwrap();
        for &(a, b) in &self.edges {
            writeln!(s, "{a} {b}").unwrap();
        }
        writeln!(s, "dist").unwrap();
        for d in &self.dist {
            writeln!(s, "{d}").unwrap();
        }
        s
    }

    pub fn parse(text: &str) -> Result<Graph, TreeError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line, header) = lines.next().ok_or(TreeError::Parse { line: 1, msg: "empty input".into() })?;
        let head: Vec<usize> = header
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| TreeError::Parse { line, msg: format!("bad header `{header}`") })?;
        let [n, m, origin] = head[..] else {
            return Err(TreeError::Parse { line, msg: "header must be `nodes m origin`".into() });
        };
        let mut edges = Vec::with_capacity(m);
        for _ in 0..m {
            let (line, l) = lines.next().ok_or(TreeError::Parse { line: 0, msg: "missing edge lines".into() })?;
            edges.push(parse_pair(line, l)?);
        }
        let dist = match lines.next() {
            None => None,
            Some((_, "dist")) => {
                let mut d = Vec::with_capacity(n);
                for (line, l) in lines.by_ref() {
                    for tok in l.split_whitespace() {
                        d.push(
                            tok.parse().map_err(|_| TreeError::Parse { line, msg: format!("bad distance `{tok}`") })?,
                        );
                    }
                }
                Some(d)
            }
            Some((line, l)) => return Err(TreeError::Parse { line, msg: format!("unexpected `{l}`") }),
        };
        Graph::new(n, &edges, origin, dist)
    }
}

fn bfs_distances(adj: &[Vec<(NodeId, EdgeId)>], origin: NodeId) -> Vec<Option<u32>> {
    let mut dist = vec![None; adj.len()];
    if adj.is_empty() {
        return dist;
    }
    dist[origin] = Some(0);
    let mut queue = VecDeque::from([origin]);
    while let Some(v) = queue.pop_front() {
        let d = dist[v].unwrap();
        for &(w, _) in &adj[v] {
            if dist[w].is_none() {
                dist[w] = Some(d + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

impl World for Graph {
    fn node_count(&self) -> usize {
        self.n()
    }
    fn edge_count(&self) -> usize {
        self.edges.len()
    }
    fn ports(&self, v: NodeId) -> &[EdgeId] {
        &self.ports[v]
    }
    fn endpoints(&self, e: EdgeId) -> (NodeId, NodeId) {
        self.edges[e]
    }
    fn port_index(&self, e: EdgeId, v: NodeId) -> usize {
        let (a, _) = self.edges[e];
        self.edge_port[e][usize::from(a != v)] as usize
    }
    fn distance(&self, v: NodeId) -> u32 {
        self.dist[v]
    }
    fn depth(&self) -> u32 {
        self.radius
    }
    fn max_degree(&self) -> usize {
        self.max_degree
    }
    fn is_tree(&self) -> bool {
        false
    }
    fn origin(&self) -> NodeId {
        self.origin
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge() {
        let t = Tree::from_edges(&[(0, 1)]).unwrap();
        assert_eq!((t.n(), t.depth(), t.max_degree()), (2, 1, 1));
    }

    #[test]
    fn star_and_path() {
        let star = Tree::from_edges(&[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!((star.n(), star.depth(), star.max_degree()), (4, 1, 3));
        let path = Tree::from_edges(&[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!((path.n(), path.depth(), path.max_degree()), (4, 3, 2));
    }

    #[test]
    fn port_one_is_parent() {
        let t = Tree::from_edges(&[(0, 2), (2, 5), (2, 3), (0, 1), (3, 4)]).unwrap();
        for v in 1..t.n() {
            assert_eq!(t.port(v, 1), t.parent_edge(v));
        }
        // children of 2 in ascending id order after the parent port
        let kids: Vec<_> = t.ports(2)[1..].iter().map(|&e| t.edge(e).1).collect();
        assert_eq!(kids, vec![3, 5]);
        assert_eq!(t.port(0, 1).map(|e| t.edge(e).1), Some(1));
        for e in 0..t.edge_count() {
            let (p, c) = t.edge(e);
            assert_eq!(t.ports(p)[t.port_index(e, p)], e);
            assert_eq!(t.ports(c)[t.port_index(e, c)], e);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(Tree::from_edges(&[(0, 1), (1, 2), (2, 0)]), Err(TreeError::Cycle(2, 0)));
        assert_eq!(Tree::from_edges(&[(0, 1), (1, 0)]), Err(TreeError::DuplicateEdge(1, 0)));
        assert!(matches!(Tree::from_edges(&[(0, 1), (2, 3)]), Err(TreeError::Disconnected(_))));
    }

    #[test]
    fn ancestry_and_lca() {
        let t = Tree::from_edges(&[(0, 1), (0, 2), (1, 3), (1, 4), (4, 5)]).unwrap();
        assert!(t.is_ancestor(1, 5));
        assert!(!t.is_ancestor(2, 5));
        assert_eq!(t.lca(3, 5), 1);
        assert_eq!(t.child_toward(1, 5), Some(4));
        assert_eq!(t.root_path(5).len(), 3);
    }

    #[test]
    fn text_round_trip() {
        let t = Tree::from_edges(&[(0, 1), (0, 2), (2, 3)]).unwrap();
        assert_eq!(Tree::parse(&t.to_text()).unwrap(), t);
        let g = Graph::new(4, &[(0, 1), (0, 2), (1, 3), (2, 3)], 0, None).unwrap();
        assert_eq!(Graph::parse(&g.to_text()).unwrap(), g);
        let no_dist = Graph::parse("4 4 0\n0 1\n0 2\n1 3\n2 3\n").unwrap();
        assert_eq!(no_dist.distance(3), 2);
    }

    #[test]
    fn graph_rejects_wrong_distances() {
        assert!(Graph::new(3, &[(0, 1), (1, 2)], 0, Some(vec![0, 1, 1])).is_err());
        assert!(Graph::new(3, &[(0, 1), (1, 2)], 0, Some(vec![0, 2, 3])).is_err());
    }
}
