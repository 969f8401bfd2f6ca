//! Signed multigraphs: parsing, switching, balance testing, and the
//! component structure of spanning subgraphs.
//!
//! Vertices are indices `0..n`. Edges are identified by their position in
//! the edge list; that position is also the default linear order on the
//! edges. Loops are rejected at construction, parallel edges are allowed.
//!
//! The text format is line-based: the first non-comment line is `n m`,
//! followed by `m` lines `u v s` with `s` one of `+`, `-`, `+1`, `-1`.
//! Blank lines and lines starting with `#` are skipped.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::{EdgeId, Vertex, MAX_EDGES};

/// Edge sign, `+1` or `-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flipped(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn is_negative(self) -> bool {
        self == Sign::Minus
    }

    /// `σ(e)·c`.
    pub fn apply(self, c: i32) -> i32 {
        match self {
            Sign::Plus => c,
            Sign::Minus => -c,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// A signed edge between two distinct vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: Vertex,
    pub v: Vertex,
    pub sign: Sign,
}

impl Edge {
    /// The endpoint that is not `w`. `w` must be an endpoint.
    pub fn other(&self, w: Vertex) -> Vertex {
        if w == self.u {
            self.v
        } else {
            debug_assert_eq!(w, self.v);
            self.u
        }
    }
}

/// A subset of edge positions packed into a 64-bit mask.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeSet(pub u64);

impl EdgeSet {
    pub const EMPTY: EdgeSet = EdgeSet(0);

    pub fn single(e: EdgeId) -> EdgeSet {
        assert!(e < MAX_EDGES);
        EdgeSet(1 << e)
    }

    pub fn from_edges<I: IntoIterator<Item = EdgeId>>(edges: I) -> EdgeSet {
        let mut s = EdgeSet::EMPTY;
        for e in edges {
            s = s.with(e);
        }
        s
    }

    /// All edge positions `0..m`.
    pub fn full(m: usize) -> EdgeSet {
        assert!(m <= MAX_EDGES);
        if m == MAX_EDGES {
            EdgeSet(u64::MAX)
        } else {
            EdgeSet((1 << m) - 1)
        }
    }

    pub fn contains(self, e: EdgeId) -> bool {
        e < MAX_EDGES && self.0 & (1 << e) != 0
    }

    pub fn with(self, e: EdgeId) -> EdgeSet {
        assert!(e < MAX_EDGES);
        EdgeSet(self.0 | (1 << e))
    }

    pub fn without(self, e: EdgeId) -> EdgeSet {
        assert!(e < MAX_EDGES);
        EdgeSet(self.0 & !(1 << e))
    }

    pub fn union(self, other: EdgeSet) -> EdgeSet {
        EdgeSet(self.0 | other.0)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset_of(self, other: EdgeSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Edge positions in ascending order.
    pub fn iter(self) -> EdgeSetIter {
        EdgeSetIter(self.0)
    }
}

impl FromIterator<EdgeId> for EdgeSet {
    fn from_iter<I: IntoIterator<Item = EdgeId>>(iter: I) -> EdgeSet {
        EdgeSet::from_edges(iter)
    }
}

impl fmt::Debug for EdgeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

pub struct EdgeSetIter(u64);

impl Iterator for EdgeSetIter {
    type Item = EdgeId;

    fn next(&mut self) -> Option<EdgeId> {
        if self.0 == 0 {
            return None;
        }
        let e = self.0.trailing_zeros() as EdgeId;
        self.0 &= self.0 - 1;
        Some(e)
    }
}

/// One connected component of a spanning subgraph.
///
/// `vertices` and `edges` are sorted ascending; `vertices[0]` is the
/// smallest vertex of the component. Isolated vertices form components with
/// empty edge lists, which are trivially balanced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<EdgeId>,
    pub balanced: bool,
}

/// Components of a spanning subgraph classified by balance.
///
/// Components are ordered by their smallest vertex. `unbalanced_vertices`
/// is the sorted union of the vertex sets of the unbalanced components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentReport {
    pub components: Vec<Component>,
    pub balanced_count: usize,
    pub unbalanced_vertices: Vec<Vertex>,
}

impl ComponentReport {
    pub fn balanced(&self) -> impl Iterator<Item = &Component> {
        self.components.iter().filter(|c| c.balanced)
    }

    pub fn is_balanced(&self) -> bool {
        self.balanced_count == self.components.len()
    }
}

/// The unique bipartition of a balanced component whose crossing edges are
/// exactly the negative ones. `x2` is the side holding the component's
/// smallest vertex; `x1` is the other side (possibly empty). Both are
/// sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HararySplit {
    pub x1: Vec<Vertex>,
    pub x2: Vec<Vertex>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: loop edge at vertex {v}")]
    LoopEdge { line: usize, v: Vertex },
    #[error("line {line}: vertex {v} out of range for n = {n}")]
    VertexOutOfRange { line: usize, v: usize, n: usize },
    #[error("edge count mismatch: header says {expected}, file has {found}")]
    EdgeCountMismatch { expected: usize, found: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("operation requires a balanced component")]
    UnbalancedComponent,
}

/// An undirected signed multigraph with vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedGraph {
    n: usize,
    edges: Vec<Edge>,
}

impl SignedGraph {
    /// Panics on loops or out-of-range endpoints; use [`SignedGraph::parse`]
    /// for untrusted input.
    pub fn new(n: usize, edges: &[(Vertex, Vertex, Sign)]) -> SignedGraph {
        let edges = edges
            .iter()
            .map(|&(u, v, sign)| {
                assert!(u < n && v < n, "edge ({u},{v}) out of range for n = {n}");
                assert!(u != v, "loop edge at vertex {u}");
                Edge { u, v, sign }
            })
            .collect();
        SignedGraph { n, edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, e: EdgeId) -> Edge {
        self.edges[e]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn parse(text: &str) -> Result<SignedGraph, ParseError> {
        let mut lines = text.lines().enumerate().filter_map(|(i, raw)| {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                None
            } else {
                Some((i + 1, line))
            }
        });

        let (header_line, header) = lines.next().ok_or_else(|| ParseError::Malformed {
            line: 0,
            reason: "missing header line \"n m\"".into(),
        })?;
        let mut it = header.split_whitespace();
        let malformed_header = || ParseError::Malformed {
            line: header_line,
            reason: format!("expected header \"n m\", got {header:?}"),
        };
        let n: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(malformed_header)?;
        let m: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(malformed_header)?;
        if it.next().is_some() {
            return Err(malformed_header());
        }

        let edge_lines: Vec<(usize, &str)> = lines.collect();
        if edge_lines.len() != m {
            return Err(ParseError::EdgeCountMismatch {
                expected: m,
                found: edge_lines.len(),
            });
        }

        let mut edges = Vec::with_capacity(m);
        for (lineno, line) in edge_lines {
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let malformed = |reason: String| ParseError::Malformed { line: lineno, reason };
            if tokens.len() != 3 {
                return Err(malformed(format!("expected \"u v s\", got {line:?}")));
            }
            let endpoint = |t: &str| -> Result<usize, ParseError> {
                t.parse()
                    .map_err(|_| malformed(format!("bad vertex {t:?}")))
            };
            let u = endpoint(tokens[0])?;
            let v = endpoint(tokens[1])?;
            let sign = match tokens[2] {
                "+" | "+1" => Sign::Plus,
                "-" | "-1" => Sign::Minus,
                t => return Err(malformed(format!("bad sign {t:?}"))),
            };
            for w in [u, v] {
                if w >= n {
                    return Err(ParseError::VertexOutOfRange { line: lineno, v: w, n });
                }
            }
            if u == v {
                return Err(ParseError::LoopEdge { line: lineno, v: u });
            }
            edges.push(Edge { u, v, sign });
        }
        Ok(SignedGraph { n, edges })
    }

    /// The graph switched at `X`: edges with exactly one endpoint in `X`
    /// change sign. Vertex order and edge order are preserved.
    pub fn switched(&self, x: &[Vertex]) -> SignedGraph {
        let mut in_x = vec![false; self.n];
        for &v in x {
            assert!(v < self.n, "switch vertex {v} out of range for n = {}", self.n);
            in_x[v] = true;
        }
        let edges = self
            .edges
            .iter()
            .map(|&Edge { u, v, sign }| Edge {
                u,
                v,
                sign: if in_x[u] != in_x[v] { sign.flipped() } else { sign },
            })
            .collect();
        SignedGraph { n: self.n, edges }
    }

    /// Components of the spanning subgraph with edge set `f`.
    pub fn components_of(&self, f: EdgeSet) -> ComponentReport {
        self.components_from(f.iter())
    }

    /// Components of the whole graph.
    pub fn components_all(&self) -> ComponentReport {
        self.components_from(0..self.m())
    }

    fn components_from<I: IntoIterator<Item = EdgeId>>(&self, edge_ids: I) -> ComponentReport {
        let ids: Vec<EdgeId> = edge_ids.into_iter().collect();
        let mut adj: Vec<Vec<(Vertex, EdgeId)>> = vec![Vec::new(); self.n];
        for &e in &ids {
            let Edge { u, v, .. } = self.edges[e];
            adj[u].push((v, e));
            adj[v].push((u, e));
        }

        // BFS labeling: side[v] flips across negative edges along the BFS
        // tree; any edge contradicting the labels witnesses an unbalanced
        // cycle in its component.
        const UNSEEN: usize = usize::MAX;
        let mut comp_of = vec![UNSEEN; self.n];
        let mut side = vec![false; self.n];
        let mut components: Vec<Component> = Vec::new();
        for root in 0..self.n {
            if comp_of[root] != UNSEEN {
                continue;
            }
            let id = components.len();
            comp_of[root] = id;
            let mut vertices = Vec::new();
            let mut queue = VecDeque::from([root]);
            while let Some(x) = queue.pop_front() {
                vertices.push(x);
                for &(w, e) in &adj[x] {
                    if comp_of[w] == UNSEEN {
                        comp_of[w] = id;
                        side[w] = side[x] ^ self.edges[e].sign.is_negative();
                        queue.push_back(w);
                    }
                }
            }
            vertices.sort_unstable();
            components.push(Component { vertices, edges: Vec::new(), balanced: true });
        }
        for &e in &ids {
            let Edge { u, v, sign } = self.edges[e];
            let comp = &mut components[comp_of[u]];
            comp.edges.push(e);
            if side[u] ^ side[v] != sign.is_negative() {
                comp.balanced = false;
            }
        }
        for comp in &mut components {
            comp.edges.sort_unstable();
        }

        let balanced_count = components.iter().filter(|c| c.balanced).count();
        let mut unbalanced_vertices: Vec<Vertex> = components
            .iter()
            .filter(|c| !c.balanced)
            .flat_map(|c| c.vertices.iter().copied())
            .collect();
        unbalanced_vertices.sort_unstable();
        ComponentReport { components, balanced_count, unbalanced_vertices }
    }

    /// Whether the spanning subgraph with edge set `f` is balanced, i.e.
    /// contains no cycle with an odd number of negative edges.
    pub fn is_balanced(&self, f: EdgeSet) -> bool {
        // Union-find where parity[v] records the sign parity of the path
        // from v to its parent.
        let mut parent: Vec<usize> = (0..self.n).collect();
        let mut parity = vec![false; self.n];
        fn find(parent: &mut [usize], parity: &mut [bool], v: usize) -> (usize, bool) {
            let mut root = v;
            let mut p = false;
            while parent[root] != root {
                p ^= parity[root];
                root = parent[root];
            }
            // Compress the path, re-rooting each parity at the root.
            let mut cur = v;
            let mut cur_p = p;
            while parent[cur] != root {
                let next = parent[cur];
                let next_p = cur_p ^ parity[cur];
                parent[cur] = root;
                parity[cur] = cur_p;
                cur = next;
                cur_p = next_p;
            }
            (root, p)
        }

        for e in f.iter() {
            let Edge { u, v, sign } = self.edges[e];
            let (ru, pu) = find(&mut parent, &mut parity, u);
            let (rv, pv) = find(&mut parent, &mut parity, v);
            if ru == rv {
                if pu ^ pv != sign.is_negative() {
                    return false;
                }
            } else {
                parent[ru] = rv;
                parity[ru] = pu ^ pv ^ sign.is_negative();
            }
        }
        true
    }

    /// The Harary bipartition of a balanced component: deleting no vertices,
    /// the negative edges are exactly those crossing `x1`/`x2`.
    ///
    /// `comp` must come from [`SignedGraph::components_of`] /
    /// [`SignedGraph::components_all`] on this graph.
    pub fn harary_split(&self, comp: &Component) -> Result<HararySplit, GraphError> {
        if !comp.balanced {
            return Err(GraphError::UnbalancedComponent);
        }
        let mut adj: Vec<Vec<(Vertex, EdgeId)>> = vec![Vec::new(); self.n];
        for &e in &comp.edges {
            let Edge { u, v, .. } = self.edges[e];
            adj[u].push((v, e));
            adj[v].push((u, e));
        }
        let root = comp.vertices[0];
        let mut side = vec![None; self.n];
        side[root] = Some(false);
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            let sx = side[x].unwrap();
            for &(w, e) in &adj[x] {
                let sw = sx ^ self.edges[e].sign.is_negative();
                match side[w] {
                    None => {
                        side[w] = Some(sw);
                        queue.push_back(w);
                    }
                    Some(s) if s != sw => return Err(GraphError::UnbalancedComponent),
                    Some(_) => {}
                }
            }
        }
        let mut x1 = Vec::new();
        let mut x2 = Vec::new();
        for &v in &comp.vertices {
            // Isolated-from-root vertices cannot occur in a connected
            // component; side is Some for all of comp.vertices.
            if side[v].unwrap_or(false) {
                x1.push(v);
            } else {
                x2.push(v);
            }
        }
        Ok(HararySplit { x1, x2 })
    }

    /// Some cycle with an odd number of negative edges inside the spanning
    /// subgraph `f`, as an edge sequence in cyclic order, or `None` if `f`
    /// is balanced.
    pub fn find_unbalanced_cycle(&self, f: EdgeSet) -> Option<Vec<EdgeId>> {
        let mut adj: Vec<Vec<(Vertex, EdgeId)>> = vec![Vec::new(); self.n];
        for e in f.iter() {
            let Edge { u, v, .. } = self.edges[e];
            adj[u].push((v, e));
            adj[v].push((u, e));
        }

        let mut visited = vec![false; self.n];
        let mut side = vec![false; self.n];
        let mut depth = vec![0usize; self.n];
        let mut parent_edge: Vec<Option<EdgeId>> = vec![None; self.n];
        let mut parent: Vec<Vertex> = (0..self.n).collect();
        let mut tree_edge = vec![false; self.m()];

        for root in 0..self.n {
            if visited[root] {
                continue;
            }
            visited[root] = true;
            let mut queue = VecDeque::from([root]);
            while let Some(x) = queue.pop_front() {
                for &(w, e) in &adj[x] {
                    if !visited[w] {
                        visited[w] = true;
                        side[w] = side[x] ^ self.edges[e].sign.is_negative();
                        depth[w] = depth[x] + 1;
                        parent[w] = x;
                        parent_edge[w] = Some(e);
                        tree_edge[e] = true;
                        queue.push_back(w);
                    }
                }
            }
        }

        for e in f.iter() {
            let Edge { u, v, sign } = self.edges[e];
            if tree_edge[e] || side[u] ^ side[v] == sign.is_negative() {
                continue;
            }
            // Tree path u -> lca, then lca -> v, then the closing edge.
            let (mut a, mut b) = (u, v);
            let mut up_a = Vec::new();
            let mut up_b = Vec::new();
            while depth[a] > depth[b] {
                up_a.push(parent_edge[a].unwrap());
                a = parent[a];
            }
            while depth[b] > depth[a] {
                up_b.push(parent_edge[b].unwrap());
                b = parent[b];
            }
            while a != b {
                up_a.push(parent_edge[a].unwrap());
                a = parent[a];
                up_b.push(parent_edge[b].unwrap());
                b = parent[b];
            }
            let mut cycle = up_a;
            cycle.extend(up_b.into_iter().rev());
            cycle.push(e);
            return Some(cycle);
        }
        None
    }
}

impl FromStr for SignedGraph {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<SignedGraph, ParseError> {
        SignedGraph::parse(s)
    }
}

impl fmt::Display for SignedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.n, self.m())?;
        for Edge { u, v, sign } in &self.edges {
            writeln!(f, "{u} {v} {sign}")?;
        }
        Ok(())
    }
}
