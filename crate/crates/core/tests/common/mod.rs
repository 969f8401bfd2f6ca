//! Helpers shared by the integration suites: fixture loading, graph and
//! list generators, and oracles that recompute results by the most direct
//! route available so the library's faster paths have something independent
//! to answer to.

// Each test target compiles this module afresh and uses its own subset.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use itertools::Itertools;
use num_bigint::BigUint;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use sgchrom::circuits::{Barbell, Cycle};
use sgchrom::counting::{Color, ListAssignment};
use sgchrom::graph::{EdgeSet, Sign, SignedGraph};
use sgchrom::{EdgeId, Vertex};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture(name: &str) -> SignedGraph {
    let text = std::fs::read_to_string(fixture_path(name))
        .unwrap_or_else(|e| panic!("fixture {name}: {e}"));
    text.parse().unwrap_or_else(|e| panic!("fixture {name}: {e}"))
}

/// All loop-free edge multisets of size `m_min..=m_max` over `n` labeled
/// vertices whose union is connected and spans all `n` vertices. For
/// `n = 1` that is just the edgeless graph.
pub fn connected_edge_multisets(
    n: usize,
    m_max: usize,
) -> Vec<Vec<(Vertex, Vertex)>> {
    if n == 1 {
        return vec![vec![]];
    }
    let pairs: Vec<(Vertex, Vertex)> = (0..n).array_combinations().map(|[u, v]| (u, v)).collect();
    let mut out = Vec::new();
    for m in (n - 1)..=m_max {
        for combo in pairs.iter().combinations_with_replacement(m) {
            let edges: Vec<(Vertex, Vertex)> = combo.into_iter().copied().collect();
            if spans_connected(n, &edges) {
                out.push(edges);
            }
        }
    }
    out
}

fn spans_connected(n: usize, edges: &[(Vertex, Vertex)]) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    let mut components = n;
    for &(u, v) in edges {
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        if ru != rv {
            parent[ru] = rv;
            components -= 1;
        }
    }
    components == 1
}

/// Every sign pattern over the given underlying edges.
pub fn sign_patterns(n: usize, edges: &[(Vertex, Vertex)]) -> Vec<SignedGraph> {
    let m = edges.len();
    (0..1u32 << m)
        .map(|bits| {
            let signed: Vec<(Vertex, Vertex, Sign)> = edges
                .iter()
                .enumerate()
                .map(|(i, &(u, v))| {
                    let sign = if bits >> i & 1 == 1 { Sign::Minus } else { Sign::Plus };
                    (u, v, sign)
                })
                .collect();
            SignedGraph::new(n, &signed)
        })
        .collect()
}

pub fn random_signed_graph(rng: &mut ChaCha8Rng, n_max: usize, m_max: usize) -> SignedGraph {
    let n = rng.random_range(1..=n_max);
    let m = if n < 2 { 0 } else { rng.random_range(0..=m_max) };
    let edges: Vec<(Vertex, Vertex, Sign)> = (0..m)
        .map(|_| {
            let u = rng.random_range(0..n);
            let v = (u + rng.random_range(1..n)) % n;
            let sign = if rng.random_bool(0.5) { Sign::Minus } else { Sign::Plus };
            (u.min(v), u.max(v), sign)
        })
        .collect();
    SignedGraph::new(n, &edges)
}

/// An all-positive forest: each vertex after the first attaches to at most
/// one earlier vertex.
pub fn random_forest(rng: &mut ChaCha8Rng, n_max: usize) -> SignedGraph {
    let n = rng.random_range(1..=n_max);
    let mut edges = Vec::new();
    for v in 1..n {
        if rng.random_bool(0.8) {
            edges.push((rng.random_range(0..v), v, Sign::Plus));
        }
    }
    SignedGraph::new(n, &edges)
}

/// Lists of varying size (1..=max_size) with colors from [-bound, bound].
pub fn random_assignment(
    rng: &mut ChaCha8Rng,
    n: usize,
    max_size: usize,
    bound: i32,
) -> ListAssignment {
    let lists = (0..n)
        .map(|_| {
            let size = rng.random_range(1..=max_size);
            let mut list = BTreeSet::new();
            while list.len() < size {
                list.insert(rng.random_range(-bound..=bound));
            }
            list
        })
        .collect();
    ListAssignment::new(lists).expect("generated lists are non-empty")
}

/// Lists of exact size k with colors from [-bound, bound].
pub fn random_k_assignment(
    rng: &mut ChaCha8Rng,
    n: usize,
    k: u32,
    bound: i32,
) -> ListAssignment {
    assert!(2 * bound + 1 >= k as i32, "universe too small for size-k lists");
    let lists = (0..n)
        .map(|_| {
            let mut list = BTreeSet::new();
            while list.len() < k as usize {
                list.insert(rng.random_range(-bound..=bound));
            }
            list
        })
        .collect();
    ListAssignment::new(lists).expect("generated lists are non-empty")
}

pub fn random_vertex_subset(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vertex> {
    (0..n).filter(|_| rng.random_bool(0.5)).collect()
}

/// Census by unpruned enumeration: walk all 2^m subsets and drop those
/// containing a broken circuit. The asserts restate the structural fact
/// that surviving subsets are independent: never more than n edges, and n
/// edges only when unbalanced.
pub fn oracle_census(g: &SignedGraph, broken: &[EdgeSet]) -> (Vec<u64>, Vec<u64>) {
    let (n, m) = (g.n(), g.m());
    let mut c = vec![0u64; n + 1];
    let mut c_star = vec![0u64; n];
    for mask in 0u64..(1 << m) {
        let f = EdgeSet(mask);
        if broken.iter().any(|b| b.is_subset_of(f)) {
            continue;
        }
        let size = f.len();
        assert!(size <= n, "subset without broken circuits exceeds n edges");
        let balanced = g.is_balanced(f);
        if size == n {
            assert!(!balanced, "a balanced subset without broken circuits is a forest");
        } else if balanced {
            c_star[size] += 1;
        }
        c[size] += 1;
    }
    (c, c_star)
}

/// Classical proper colorings with colors 0..k-1 and the plain rule
/// c(u) != c(v), signs ignored. Direct recursion, nothing shared with the
/// library counters.
pub fn naive_classical_count(g: &SignedGraph, k: u32) -> BigUint {
    fn rec(g: &SignedGraph, k: u32, chosen: &mut Vec<u32>) -> u64 {
        let v = chosen.len();
        if v == g.n() {
            return 1;
        }
        let mut total = 0;
        'colors: for c in 0..k {
            for e in g.edges() {
                let (a, b) = (e.u, e.v);
                if a == v && b < v && chosen[b] == c {
                    continue 'colors;
                }
                if b == v && a < v && chosen[a] == c {
                    continue 'colors;
                }
            }
            chosen.push(c);
            total += rec(g, k, chosen);
            chosen.pop();
        }
        total
    }
    BigUint::from(rec(g, k, &mut Vec::new()))
}

/// Walks the cycle's edges and returns its vertices in traversal order,
/// asserting along the way that they really form one simple closed walk.
pub fn cycle_vertices(g: &SignedGraph, edges: &[EdgeId]) -> Vec<Vertex> {
    assert!(edges.len() >= 2, "cycles have at least two edges");
    let first = g.edge(edges[0]);
    // Start from the endpoint of edge 0 that edge 1 does not touch, so the
    // walk enters edge 1 at their shared vertex. For a digon either works.
    let second = g.edge(edges[1]);
    let start = if edges.len() == 2 || (first.u != second.u && first.u != second.v) {
        first.u
    } else {
        first.v
    };
    let mut vertices = vec![start];
    let mut at = start;
    for &e in edges {
        at = g.edge(e).other(at);
        vertices.push(at);
    }
    assert_eq!(*vertices.last().unwrap(), vertices[0], "cycle edges must close up");
    vertices.pop();
    let distinct: BTreeSet<Vertex> = vertices.iter().copied().collect();
    assert_eq!(distinct.len(), vertices.len(), "cycle vertices must be distinct");
    vertices
}

pub fn assert_cycle_valid(g: &SignedGraph, c: &Cycle) {
    let distinct: BTreeSet<EdgeId> = c.edges.iter().copied().collect();
    assert_eq!(distinct.len(), c.edges.len(), "cycle edges must be distinct");
    cycle_vertices(g, &c.edges);
    let negatives = c.edges.iter().filter(|&&e| g.edge(e).sign.is_negative()).count();
    assert_eq!(c.balanced, negatives % 2 == 0, "balance flag must match sign parity");
}

/// Re-validates a barbell against its definition: two unbalanced cycles
/// sharing exactly one vertex (empty path), or vertex-disjoint cycles
/// joined by a simple path meeting them only at its endpoints.
pub fn assert_barbell_valid(g: &SignedGraph, b: &Barbell) {
    assert_cycle_valid(g, &b.cycle1);
    assert_cycle_valid(g, &b.cycle2);
    assert!(!b.cycle1.balanced && !b.cycle2.balanced, "barbell cycles are unbalanced");
    let v1: BTreeSet<Vertex> = cycle_vertices(g, &b.cycle1.edges).into_iter().collect();
    let v2: BTreeSet<Vertex> = cycle_vertices(g, &b.cycle2.edges).into_iter().collect();
    let all = b.cycle1.edge_set().union(b.cycle2.edge_set());
    let path_set: EdgeSet = b.path.iter().copied().collect();
    assert_eq!(path_set.len(), b.path.len(), "path edges must be distinct");
    assert_eq!(
        b.cycle1.edge_set().0 & b.cycle2.edge_set().0,
        0,
        "cycle edge sets must be disjoint"
    );
    assert_eq!(all.0 & path_set.0, 0, "path edges must avoid both cycles");
    if b.path.is_empty() {
        assert_eq!(v1.intersection(&v2).count(), 1, "trivial path means one shared vertex");
        return;
    }
    assert_eq!(v1.intersection(&v2).count(), 0, "cycles joined by a path are disjoint");
    // Reconstruct the path walk from its endpoint in cycle1.
    let mut remaining: Vec<EdgeId> = b.path.clone();
    let start = {
        let endpoints: Vec<Vertex> = path_endpoints(g, &remaining);
        assert_eq!(endpoints.len(), 2, "path must be open");
        *endpoints
            .iter()
            .find(|v| v1.contains(v))
            .expect("one path endpoint lies on cycle1")
    };
    let mut at = start;
    let mut seen = vec![at];
    while !remaining.is_empty() {
        let pos = remaining
            .iter()
            .position(|&e| g.edge(e).u == at || g.edge(e).v == at)
            .expect("path edges must chain");
        at = g.edge(remaining.remove(pos)).other(at);
        seen.push(at);
    }
    assert!(v2.contains(&at), "path must end on cycle2");
    let distinct: BTreeSet<Vertex> = seen.iter().copied().collect();
    assert_eq!(distinct.len(), seen.len(), "path vertices must be distinct");
    for v in &seen[1..seen.len() - 1] {
        assert!(!v1.contains(v) && !v2.contains(v), "path interior avoids both cycles");
    }
}

fn path_endpoints(g: &SignedGraph, path: &[EdgeId]) -> Vec<Vertex> {
    let mut degree: std::collections::BTreeMap<Vertex, usize> = Default::default();
    for &e in path {
        *degree.entry(g.edge(e).u).or_default() += 1;
        *degree.entry(g.edge(e).v).or_default() += 1;
    }
    degree.into_iter().filter(|&(_, d)| d == 1).map(|(v, _)| v).collect()
}

/// A random sign-respecting bijection on [-bound, bound]: magnitudes are
/// permuted, each magnitude's sign may flip, zero stays put.
pub fn random_odd_bijection(rng: &mut ChaCha8Rng, bound: i32) -> impl Fn(Color) -> Color {
    use rand::seq::SliceRandom;
    let mut magnitudes: Vec<i32> = (1..=bound).collect();
    magnitudes.shuffle(rng);
    let flips: Vec<bool> = (0..bound).map(|_| rng.random_bool(0.5)).collect();
    move |c: Color| {
        if c == 0 {
            return 0;
        }
        let image = magnitudes[(c.abs() - 1) as usize];
        let image = if flips[(c.abs() - 1) as usize] { -image } else { image };
        if c < 0 {
            -image
        } else {
            image
        }
    }
}

pub fn map_assignment(l: &ListAssignment, f: impl Fn(Color) -> Color) -> ListAssignment {
    let lists = l.lists().iter().map(|s| s.iter().map(|&c| f(c)).collect()).collect();
    ListAssignment::new(lists).expect("bijections preserve non-emptiness")
}
