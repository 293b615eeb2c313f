//! Finite simple graphs with a distinguished boundary set, bond
//! configurations on their edges and the connectivity queries built on top.
//!
//! Vertices are dense indices `0..vertex_count`. Every edge has a stable
//! index, which is how [`BondConfig`] refers to it.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::path::Path;

use rand::Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    boundary: Vec<usize>,
    is_boundary: Vec<bool>,
    // (neighbor, edge index) per vertex
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl Graph {
    /// Validates and builds a graph. Edge endpoints are stored with the
    /// smaller index first; edge order is preserved.
    pub fn new(vertex_count: usize, edges: &[(usize, usize)], boundary: &[usize]) -> Result<Self> {
        let mut seen = HashSet::with_capacity(edges.len());
        let mut stored = Vec::with_capacity(edges.len());
        let mut adjacency = vec![Vec::new(); vertex_count];
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= vertex_count {
                    return Err(Error::VertexOutOfRange { vertex: x, count: vertex_count });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(Error::DuplicateEdge(key.0, key.1));
            }
            let idx = stored.len();
            stored.push(key);
            adjacency[u].push((v, idx));
            adjacency[v].push((u, idx));
        }
        let mut is_boundary = vec![false; vertex_count];
        for &b in boundary {
            if b >= vertex_count {
                return Err(Error::VertexOutOfRange { vertex: b, count: vertex_count });
            }
            is_boundary[b] = true;
        }
        let boundary = (0..vertex_count).filter(|&v| is_boundary[v]).collect();
        Ok(Graph { vertex_count, edges: stored, boundary, is_boundary, adjacency })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, index: usize) -> (usize, usize) {
        self.edges[index]
    }

    /// Sorted boundary vertices.
    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.is_boundary[v]
    }

    /// `(neighbor, edge index)` pairs incident to `v`.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.vertex_count).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        self.adjacency.get(u)?.iter().find(|&&(w, _)| w == v).map(|&(_, e)| e)
    }

    /// Same vertices and edges with a different boundary set.
    pub fn with_boundary(&self, boundary: &[usize]) -> Result<Self> {
        Graph::new(self.vertex_count, &self.edges, boundary)
    }

    pub fn is_connected(&self) -> bool {
        if self.vertex_count == 0 {
            return true;
        }
        let all = BondConfig::all_open(self.edge_count());
        connected_components(self, &all).map(|p| p.component_count == 1).unwrap_or(false)
    }

    pub fn is_tree(&self) -> bool {
        self.vertex_count > 0 && self.edge_count() + 1 == self.vertex_count && self.is_connected()
    }

    /// Identifies all boundary vertices into a single vertex, dropping the
    /// resulting self-loops and keeping one copy of each parallel edge.
    /// The merged vertex gets index 0; the remaining vertices keep their
    /// relative order.
    pub fn contract_boundary(&self) -> Result<Contraction> {
        if self.boundary.is_empty() {
            return Err(Error::EmptyBoundary);
        }
        let mut vertex_map = vec![0usize; self.vertex_count];
        let mut next = 1;
        for v in 0..self.vertex_count {
            if !self.is_boundary[v] {
                vertex_map[v] = next;
                next += 1;
            }
        }
        let mut seen = BTreeSet::new();
        let mut edges = Vec::new();
        for &(u, v) in &self.edges {
            let (a, b) = (vertex_map[u], vertex_map[v]);
            if a == b {
                continue;
            }
            if seen.insert((a.min(b), a.max(b))) {
                edges.push((a, b));
            }
        }
        let graph = Graph::new(next, &edges, &[0])?;
        Ok(Contraction { graph, vertex_map })
    }

    // ---- generators ----

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::new(n, &edges, &[]).expect("path edges are valid")
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter(format!("cycle needs at least 3 vertices, got {n}")));
        }
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::new(n, &edges, &[])
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push((i, j));
            }
        }
        Graph::new(n, &edges, &[]).expect("complete graph edges are valid")
    }

    /// `width × height` grid, vertex `(x, y)` at index `y * width + x`.
    pub fn grid(width: usize, height: usize, boundary: GridBoundary) -> Self {
        let idx = |x: usize, y: usize| y * width + x;
        let mut edges = Vec::new();
        for y in 0..height {
            for x in 0..width {
                if x + 1 < width {
                    edges.push((idx(x, y), idx(x + 1, y)));
                }
                if y + 1 < height {
                    edges.push((idx(x, y), idx(x, y + 1)));
                }
            }
        }
        let frame: Vec<usize> = match boundary {
            GridBoundary::None => Vec::new(),
            GridBoundary::Frame => (0..height)
                .flat_map(|y| (0..width).map(move |x| (x, y)))
                .filter(|&(x, y)| x == 0 || y == 0 || x + 1 == width || y + 1 == height)
                .map(|(x, y)| idx(x, y))
                .collect(),
        };
        Graph::new(width * height, &edges, &frame).expect("grid edges are valid")
    }

    /// Uniform random recursive tree: vertex `i > 0` attaches to a uniform
    /// earlier vertex.
    pub fn random_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (rng.random_range(0..i), i)).collect();
        Graph::new(n, &edges, &[]).expect("tree edges are valid")
    }

    // ---- edge-list text format ----

    /// Parses the edge-list format: first line the vertex count, then one
    /// `u v` pair per line, then an optional `boundary: i j k ...` line.
    /// Blank lines and lines starting with `#` are ignored.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).enumerate().filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (_, first) = lines.next().ok_or_else(|| Error::Parse("empty edge list".into()))?;
        let n: usize =
            first.parse().map_err(|_| Error::Parse(format!("line 1: expected vertex count, got {first:?}")))?;
        let mut edges = Vec::new();
        let mut boundary = Vec::new();
        let parse_idx = |tok: &str, line: usize| -> Result<usize> {
            tok.parse().map_err(|_| Error::Parse(format!("line {}: bad vertex {tok:?}", line + 1)))
        };
        for (lineno, line) in lines {
            if let Some(rest) = line.strip_prefix("boundary:") {
                for tok in rest.split_whitespace() {
                    boundary.push(parse_idx(tok, lineno)?);
                }
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 2 {
                return Err(Error::Parse(format!("line {}: expected `u v`, got {line:?}", lineno + 1)));
            }
            edges.push((parse_idx(toks[0], lineno)?, parse_idx(toks[1], lineno)?));
        }
        Graph::new(n, &edges, &boundary)
    }

    pub fn load_edge_list(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Graph::parse_edge_list(&text)
    }

    pub fn to_edge_list(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.vertex_count)?;
        for (u, v) in &self.edges {
            writeln!(f, "{u} {v}")?;
        }
        write!(f, "boundary:")?;
        for b in &self.boundary {
            write!(f, " {b}")?;
        }
        writeln!(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridBoundary {
    None,
    Frame,
}

/// Result of [`Graph::contract_boundary`].
#[derive(Debug, Clone)]
pub struct Contraction {
    pub graph: Graph,
    /// Old vertex index to new vertex index; boundary vertices map to 0.
    pub vertex_map: Vec<usize>,
}

/// One open/closed bit per edge, indexed like [`Graph::edges`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BondConfig {
    bits: Vec<bool>,
}

impl BondConfig {
    pub fn all_closed(edge_count: usize) -> Self {
        BondConfig { bits: vec![false; edge_count] }
    }

    pub fn all_open(edge_count: usize) -> Self {
        BondConfig { bits: vec![true; edge_count] }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        BondConfig { bits }
    }

    /// Bit `e` of `mask` becomes the state of edge `e`.
    pub fn from_mask(mask: u64, edge_count: usize) -> Self {
        assert!(edge_count <= 64, "mask encoding supports at most 64 edges");
        BondConfig { bits: (0..edge_count).map(|e| mask >> e & 1 == 1).collect() }
    }

    pub fn to_mask(&self) -> u64 {
        assert!(self.bits.len() <= 64, "mask encoding supports at most 64 edges");
        self.bits.iter().enumerate().fold(0u64, |m, (e, &b)| if b { m | 1 << e } else { m })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn is_open(&self, edge: usize) -> bool {
        self.bits[edge]
    }

    pub fn set(&mut self, edge: usize, open: bool) {
        self.bits[edge] = open;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn open_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

/// Disjoint-set forest with path compression and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}

/// Vertex partition into ω-clusters. Ids are contiguous and assigned in
/// order of the smallest vertex of each cluster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub component_id: Vec<usize>,
    pub component_count: usize,
}

impl Partition {
    pub fn same_component(&self, a: usize, b: usize) -> bool {
        self.component_id[a] == self.component_id[b]
    }

    pub fn members(&self, component: usize) -> impl Iterator<Item = usize> + '_ {
        self.component_id.iter().enumerate().filter(move |&(_, &c)| c == component).map(|(v, _)| v)
    }

    /// For each component, whether it contains a boundary vertex.
    pub fn touches_boundary(&self, graph: &Graph) -> Vec<bool> {
        let mut touch = vec![false; self.component_count];
        for &b in graph.boundary() {
            touch[self.component_id[b]] = true;
        }
        touch
    }
}

fn check_bond_len(graph: &Graph, bonds: &BondConfig) -> Result<()> {
    if bonds.len() != graph.edge_count() {
        return Err(Error::BondLength { expected: graph.edge_count(), got: bonds.len() });
    }
    Ok(())
}

pub fn connected_components(graph: &Graph, bonds: &BondConfig) -> Result<Partition> {
    check_bond_len(graph, bonds)?;
    let n = graph.vertex_count();
    let mut uf = UnionFind::new(n);
    for (e, &(u, v)) in graph.edges().iter().enumerate() {
        if bonds.is_open(e) {
            uf.union(u, v);
        }
    }
    let mut root_id = vec![usize::MAX; n];
    let mut component_id = vec![0; n];
    let mut count = 0;
    for v in 0..n {
        let r = uf.find(v);
        if root_id[r] == usize::MAX {
            root_id[r] = count;
            count += 1;
        }
        component_id[v] = root_id[r];
    }
    Ok(Partition { component_id, component_count: count })
}

/// Whether the ω-cluster of `vertex` contains a boundary vertex.
pub fn reaches_boundary(graph: &Graph, bonds: &BondConfig, vertex: usize) -> Result<bool> {
    check_bond_len(graph, bonds)?;
    if vertex >= graph.vertex_count() {
        return Err(Error::VertexOutOfRange { vertex, count: graph.vertex_count() });
    }
    Ok(cluster_of(graph, bonds, &[vertex]).iter().any(|&v| graph.is_boundary(v)))
}

/// All vertices ω-connected to at least one vertex of `seeds`, sorted.
pub(crate) fn cluster_of(graph: &Graph, bonds: &BondConfig, seeds: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; graph.vertex_count()];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for &s in seeds {
        if !seen[s] {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        for &(w, e) in graph.neighbors(u) {
            if bonds.is_open(e) && !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    (0..graph.vertex_count()).filter(|&v| seen[v]).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelMode {
    Below,
    Above,
}

/// Whether some path from the boundary to `target` has every vertex,
/// endpoints included, strictly below (or above) `level`.
pub fn level_connected(graph: &Graph, heights: &[f64], level: f64, mode: LevelMode, target: usize) -> bool {
    let ok = |v: usize| match mode {
        LevelMode::Below => heights[v] < level,
        LevelMode::Above => heights[v] > level,
    };
    if !ok(target) {
        return false;
    }
    let mut seen = vec![false; graph.vertex_count()];
    let mut queue = VecDeque::new();
    for &b in graph.boundary() {
        if ok(b) {
            seen[b] = true;
            queue.push_back(b);
        }
    }
    while let Some(u) = queue.pop_front() {
        if u == target {
            return true;
        }
        for &(w, _) in graph.neighbors(u) {
            if !seen[w] && ok(w) {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    false
}
