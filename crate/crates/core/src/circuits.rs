//! Circuits, broken circuits, and the counting machinery built on them.
//!
//! The circuits of a signed graph are its balanced cycles together with its
//! barbells (two unbalanced cycles joined at a single vertex or by a path).
//! Removing the order-maximum edge from a circuit leaves a broken circuit;
//! subsets of edges containing no broken circuit ("NBC subsets") have at
//! most `n` edges and drive both the chromatic quasi-polynomial pair and a
//! pruned list-coloring count.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::counting::{signed_subset_term, Count, ListAssignment};
use crate::graph::{Edge, EdgeSet, SignedGraph};
use crate::{Caps, EdgeId, ResourceError, Vertex, MAX_EDGES};

/// A simple cycle of at least two edges, listed in traversal order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cycle {
    pub edges: Vec<EdgeId>,
    /// Even number of negative edges.
    pub balanced: bool,
}

impl Cycle {
    pub fn edge_set(&self) -> EdgeSet {
        self.edges.iter().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Two unbalanced cycles tied together: either they share exactly one
/// vertex and `path` is empty, or they are vertex-disjoint and `path` walks
/// from a vertex of `cycle1` to a vertex of `cycle2`, meeting the cycles
/// only at its endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Barbell {
    pub cycle1: Cycle,
    pub cycle2: Cycle,
    pub path: Vec<EdgeId>,
}

impl Barbell {
    pub fn edge_set(&self) -> EdgeSet {
        self.cycle1
            .edge_set()
            .union(self.cycle2.edge_set())
            .union(self.path.iter().copied().collect())
    }
}

/// A circuit: a balanced cycle or a barbell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Circuit {
    BalancedCycle(Cycle),
    Barbell(Barbell),
}

impl Circuit {
    pub fn edge_set(&self) -> EdgeSet {
        match self {
            Circuit::BalancedCycle(c) => c.edge_set(),
            Circuit::Barbell(b) => b.edge_set(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrderError {
    #[error("edge order must be a permutation of 0..{m}")]
    NotPermutation { m: usize },
}

/// A linear order on the edge positions `0..m`.
///
/// The default order is by input position. A custom order is given as a
/// permutation listing the positions from smallest to largest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeOrder {
    rank: Vec<usize>,
}

impl EdgeOrder {
    pub fn identity(m: usize) -> EdgeOrder {
        EdgeOrder { rank: (0..m).collect() }
    }

    pub fn from_permutation(perm: &[EdgeId]) -> Result<EdgeOrder, OrderError> {
        let m = perm.len();
        let mut rank = vec![usize::MAX; m];
        for (r, &e) in perm.iter().enumerate() {
            if e >= m || rank[e] != usize::MAX {
                return Err(OrderError::NotPermutation { m });
            }
            rank[e] = r;
        }
        Ok(EdgeOrder { rank })
    }

    pub fn len(&self) -> usize {
        self.rank.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rank.is_empty()
    }

    /// Position of edge `e` in the order, `0` smallest.
    pub fn rank(&self, e: EdgeId) -> usize {
        self.rank[e]
    }

    /// The order-maximum edge of a non-empty set.
    pub fn max_edge(&self, set: EdgeSet) -> EdgeId {
        set.iter()
            .max_by_key(|&e| self.rank[e])
            .expect("max_edge of an empty set")
    }
}

/// Traversal budget: circuit enumeration refuses to walk forever even when
/// few circuits are ultimately found.
fn work_limit(caps: &Caps) -> u64 {
    (caps.circuits as u64).saturating_mul(1024).max(1 << 22)
}

/// All simple cycles (length >= 2; parallel edge pairs count), sorted by
/// edge-set bit pattern. Each cycle is found from its smallest vertex, once
/// per direction class.
pub fn enumerate_cycles(g: &SignedGraph, caps: &Caps) -> Result<Vec<Cycle>, ResourceError> {
    let m = g.m();
    if m > MAX_EDGES {
        return Err(ResourceError::EdgeWidth { m });
    }
    let n = g.n();
    let mut adj: Vec<Vec<(Vertex, EdgeId)>> = vec![Vec::new(); n];
    for (e, &Edge { u, v, .. }) in g.edges().iter().enumerate() {
        adj[u].push((v, e));
        adj[v].push((u, e));
    }
    for a in &mut adj {
        a.sort_unstable();
    }

    struct Dfs<'a> {
        g: &'a SignedGraph,
        adj: &'a [Vec<(Vertex, EdgeId)>],
        anchor: Vertex,
        on_path: Vec<bool>,
        path: Vec<EdgeId>,
        cycles: Vec<Cycle>,
        work: u64,
        work_limit: u64,
        cap: usize,
    }

    impl Dfs<'_> {
        fn run(&mut self, current: Vertex) -> Result<(), ResourceError> {
            for idx in 0..self.adj[current].len() {
                let (w, e) = self.adj[current][idx];
                self.work += 1;
                if self.work > self.work_limit {
                    return Err(ResourceError::CircuitCap { cap: self.cap });
                }
                if w == self.anchor {
                    // Closing edge; keep one direction per cycle by
                    // requiring first edge < closing edge.
                    if self.path.first().is_some_and(|&first| first < e) {
                        let mut edges = self.path.clone();
                        edges.push(e);
                        let negs = edges
                            .iter()
                            .filter(|&&e| self.g.edge(e).sign.is_negative())
                            .count();
                        self.cycles.push(Cycle { edges, balanced: negs % 2 == 0 });
                        if self.cycles.len() > self.cap {
                            return Err(ResourceError::CircuitCap { cap: self.cap });
                        }
                    }
                } else if w > self.anchor && !self.on_path[w] {
                    self.on_path[w] = true;
                    self.path.push(e);
                    self.run(w)?;
                    self.path.pop();
                    self.on_path[w] = false;
                }
            }
            Ok(())
        }
    }

    let mut dfs = Dfs {
        g,
        adj: &adj,
        anchor: 0,
        on_path: vec![false; n],
        path: Vec::new(),
        cycles: Vec::new(),
        work: 0,
        work_limit: work_limit(caps),
        cap: caps.circuits,
    };
    for anchor in 0..n {
        dfs.anchor = anchor;
        dfs.on_path[anchor] = true;
        dfs.run(anchor)?;
        dfs.on_path[anchor] = false;
    }
    let mut cycles = dfs.cycles;
    cycles.sort_by_key(Cycle::edge_set);
    Ok(cycles)
}

fn cycle_vertex_marks(g: &SignedGraph, cycle: &Cycle) -> Vec<bool> {
    let mut marks = vec![false; g.n()];
    for &e in &cycle.edges {
        let Edge { u, v, .. } = g.edge(e);
        marks[u] = true;
        marks[v] = true;
    }
    marks
}

fn barbells_from(
    g: &SignedGraph,
    cycles: &[Cycle],
    caps: &Caps,
) -> Result<Vec<Barbell>, ResourceError> {
    let n = g.n();
    let unbalanced: Vec<&Cycle> = cycles.iter().filter(|c| !c.balanced).collect();
    let marks: Vec<Vec<bool>> = unbalanced.iter().map(|c| cycle_vertex_marks(g, c)).collect();

    let mut adj: Vec<Vec<(Vertex, EdgeId)>> = vec![Vec::new(); n];
    for (e, &Edge { u, v, .. }) in g.edges().iter().enumerate() {
        adj[u].push((v, e));
        adj[v].push((u, e));
    }
    for a in &mut adj {
        a.sort_unstable();
    }

    struct PathDfs<'a> {
        adj: &'a [Vec<(Vertex, EdgeId)>],
        from: &'a [bool],
        to: &'a [bool],
        on_path: Vec<bool>,
        path: Vec<EdgeId>,
        found: Vec<Vec<EdgeId>>,
        work: u64,
        work_limit: u64,
        cap: usize,
    }

    impl PathDfs<'_> {
        fn run(&mut self, current: Vertex) -> Result<(), ResourceError> {
            for idx in 0..self.adj[current].len() {
                let (w, e) = self.adj[current][idx];
                self.work += 1;
                if self.work > self.work_limit {
                    return Err(ResourceError::CircuitCap { cap: self.cap });
                }
                if self.to[w] {
                    // A connecting path ends at its first contact with the
                    // target cycle.
                    let mut path = self.path.clone();
                    path.push(e);
                    self.found.push(path);
                } else if !self.from[w] && !self.on_path[w] {
                    self.on_path[w] = true;
                    self.path.push(e);
                    self.run(w)?;
                    self.path.pop();
                    self.on_path[w] = false;
                }
            }
            Ok(())
        }
    }

    let mut out: Vec<Barbell> = Vec::new();
    let mut seen: HashSet<u64> = HashSet::new();
    let mut work = 0u64;
    let limit = work_limit(caps);
    for i in 0..unbalanced.len() {
        for j in (i + 1)..unbalanced.len() {
            let shared = (0..n).filter(|&v| marks[i][v] && marks[j][v]).count();
            let mut record =
                |b: Barbell, out: &mut Vec<Barbell>| -> Result<(), ResourceError> {
                    if seen.insert(b.edge_set().0) {
                        out.push(b);
                        if cycles.len() + out.len() > caps.circuits {
                            return Err(ResourceError::CircuitCap { cap: caps.circuits });
                        }
                    }
                    Ok(())
                };
            match shared {
                1 => record(
                    Barbell {
                        cycle1: unbalanced[i].clone(),
                        cycle2: unbalanced[j].clone(),
                        path: Vec::new(),
                    },
                    &mut out,
                )?,
                0 => {
                    let mut dfs = PathDfs {
                        adj: &adj,
                        from: &marks[i],
                        to: &marks[j],
                        on_path: vec![false; n],
                        path: Vec::new(),
                        found: Vec::new(),
                        work,
                        work_limit: limit,
                        cap: caps.circuits,
                    };
                    for start in (0..n).filter(|&v| marks[i][v]) {
                        dfs.run(start)?;
                    }
                    work = dfs.work;
                    for path in dfs.found {
                        record(
                            Barbell {
                                cycle1: unbalanced[i].clone(),
                                cycle2: unbalanced[j].clone(),
                                path,
                            },
                            &mut out,
                        )?;
                    }
                }
                _ => {}
            }
        }
    }
    out.sort_by_key(Barbell::edge_set);
    Ok(out)
}

/// All barbells, deduplicated by edge set and sorted by edge-set bit
/// pattern.
pub fn enumerate_barbells(g: &SignedGraph, caps: &Caps) -> Result<Vec<Barbell>, ResourceError> {
    let cycles = enumerate_cycles(g, caps)?;
    barbells_from(g, &cycles, caps)
}

/// All circuits — balanced cycles and barbells — sorted by edge-set bit
/// pattern.
pub fn circuits(g: &SignedGraph, caps: &Caps) -> Result<Vec<Circuit>, ResourceError> {
    let cycles = enumerate_cycles(g, caps)?;
    let barbells = barbells_from(g, &cycles, caps)?;
    let mut out: Vec<Circuit> = cycles
        .into_iter()
        .filter(|c| c.balanced)
        .map(Circuit::BalancedCycle)
        .chain(barbells.into_iter().map(Circuit::Barbell))
        .collect();
    if out.len() > caps.circuits {
        return Err(ResourceError::CircuitCap { cap: caps.circuits });
    }
    out.sort_by_key(Circuit::edge_set);
    Ok(out)
}

/// A circuit with its order-maximum edge removed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BrokenCircuit {
    pub edges: EdgeSet,
    /// Number of circuits producing this edge set.
    pub multiplicity: usize,
    /// The first producing circuit in enumeration order.
    pub source: Circuit,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BrokenCircuitSet {
    /// Distinct broken circuits, ascending by edge-set bit pattern.
    pub broken: Vec<BrokenCircuit>,
    /// The inclusion-minimal broken edge sets, same order. A subset avoids
    /// every broken circuit iff it avoids these.
    pub minimal: Vec<EdgeSet>,
}

pub fn broken_circuits(
    g: &SignedGraph,
    order: &EdgeOrder,
    caps: &Caps,
) -> Result<BrokenCircuitSet, ResourceError> {
    assert_eq!(order.len(), g.m(), "edge order size must match m");
    let mut map: BTreeMap<EdgeSet, BrokenCircuit> = BTreeMap::new();
    for circuit in circuits(g, caps)? {
        let es = circuit.edge_set();
        let bc = es.without(order.max_edge(es));
        match map.entry(bc) {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                o.get_mut().multiplicity += 1;
            }
            std::collections::btree_map::Entry::Vacant(va) => {
                va.insert(BrokenCircuit { edges: bc, multiplicity: 1, source: circuit });
            }
        }
    }
    let broken: Vec<BrokenCircuit> = map.into_values().collect();

    let mut by_size: Vec<EdgeSet> = broken.iter().map(|b| b.edges).collect();
    by_size.sort_by_key(|s| (s.len(), *s));
    let mut minimal: Vec<EdgeSet> = Vec::new();
    for s in by_size {
        if !minimal.iter().any(|t| t.is_subset_of(s)) {
            minimal.push(s);
        }
    }
    minimal.sort();
    Ok(BrokenCircuitSet { broken, minimal })
}

/// Visits every subset of `0..m` containing none of the given minimal
/// broken circuits, the empty set first, each exactly once. Positions are
/// added in ascending order, so a forbidden set can only complete when its
/// largest position joins — that is the only membership test needed.
pub(crate) fn for_each_nbc_subset(
    m: usize,
    minimal_broken: &[EdgeSet],
    f: &mut impl FnMut(EdgeSet),
) {
    let mut by_top: Vec<Vec<EdgeSet>> = vec![Vec::new(); m];
    for &bc in minimal_broken {
        if let Some(top) = bc.iter().last() {
            by_top[top].push(bc);
        } else {
            // The empty set is a broken circuit only if some circuit is a
            // single edge, which cannot happen (cycles have >= 2 edges).
            // Guard anyway: nothing avoids it.
            return;
        }
    }

    fn rec(
        current: EdgeSet,
        start: usize,
        m: usize,
        by_top: &[Vec<EdgeSet>],
        f: &mut impl FnMut(EdgeSet),
    ) {
        for e in start..m {
            if by_top[e].iter().any(|bc| bc.without(e).is_subset_of(current)) {
                continue;
            }
            let next = current.with(e);
            f(next);
            rec(next, e + 1, m, by_top, f);
        }
    }

    f(EdgeSet::EMPTY);
    rec(EdgeSet::EMPTY, 0, m, &by_top, f);
}

/// Sizes of the no-broken-circuit subsets: `c[i]` counts those with `i`
/// edges (lengths `n+1`), `c_star[i]` those whose spanning subgraph is
/// additionally balanced (length `n`). Every such subset has at most `n`
/// edges, and at exactly `n` edges it is never balanced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NbcCensus {
    pub c: Vec<u64>,
    pub c_star: Vec<u64>,
}

pub fn nbc_census(
    g: &SignedGraph,
    order: &EdgeOrder,
    caps: &Caps,
) -> Result<NbcCensus, ResourceError> {
    let (n, m) = (g.n(), g.m());
    if m > caps.subset_edges {
        return Err(ResourceError::SubsetCap { m, cap: caps.subset_edges });
    }
    let bcs = broken_circuits(g, order, caps)?;
    let mut c = vec![0u64; n + 1];
    let mut c_star = vec![0u64; n];
    for_each_nbc_subset(m, &bcs.minimal, &mut |f| {
        let size = f.len();
        assert!(size <= n, "no-broken-circuit subset exceeds n edges");
        c[size] += 1;
        if size < n && g.is_balanced(f) {
            c_star[size] += 1;
        }
    });
    Ok(NbcCensus { c, c_star })
}

/// The chromatic quasi-polynomial pair in descending powers `k^n .. k^0`:
/// `odd` counts proper colorings at odd `k`, `even` at even `k`. Both have
/// `n+1` entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiPolynomial {
    pub odd: Vec<i128>,
    pub even: Vec<i128>,
}

impl QuasiPolynomial {
    pub fn n(&self) -> usize {
        self.odd.len() - 1
    }

    pub fn eval_odd(&self, k: u64) -> BigInt {
        horner(&self.odd, k)
    }

    pub fn eval_even(&self, k: u64) -> BigInt {
        horner(&self.even, k)
    }

    /// The proper-coloring count at `k`, dispatching on parity.
    pub fn eval(&self, k: u64) -> Count {
        let value = if k % 2 == 1 { self.eval_odd(k) } else { self.eval_even(k) };
        debug_assert!(!value.is_negative());
        value.to_biguint().expect("coloring counts are non-negative")
    }
}

fn horner(coeffs: &[i128], k: u64) -> BigInt {
    let mut acc = BigInt::zero();
    for &c in coeffs {
        acc = acc * k + BigInt::from(c);
    }
    acc
}

/// Quasi-polynomial from the census: the coefficient of `k^(n-i)` is
/// `(-1)^i c[i]` in the odd polynomial and `(-1)^i c_star[i]` in the even
/// one (whose constant term is zero). The empty graph gives the constant 1.
pub fn quasi_polynomial(
    g: &SignedGraph,
    order: &EdgeOrder,
    caps: &Caps,
) -> Result<QuasiPolynomial, ResourceError> {
    let n = g.n();
    if n == 0 {
        return Ok(QuasiPolynomial { odd: vec![1], even: vec![1] });
    }
    let census = nbc_census(g, order, caps)?;
    let signed = |i: usize, raw: u64| {
        let v = raw as i128;
        if i % 2 == 1 {
            -v
        } else {
            v
        }
    };
    let odd: Vec<i128> = census.c.iter().enumerate().map(|(i, &v)| signed(i, v)).collect();
    let mut even: Vec<i128> =
        census.c_star.iter().enumerate().map(|(i, &v)| signed(i, v)).collect();
    even.push(0);
    Ok(QuasiPolynomial { odd, even })
}

/// List-coloring count summed over no-broken-circuit subsets only. Agrees
/// with full inclusion-exclusion; the pruned sum touches far fewer sets.
pub fn nbc_list_count(
    g: &SignedGraph,
    l: &ListAssignment,
    order: &EdgeOrder,
    caps: &Caps,
) -> Result<Count, ResourceError> {
    let m = g.m();
    if m > caps.subset_edges {
        return Err(ResourceError::SubsetCap { m, cap: caps.subset_edges });
    }
    assert_eq!(l.len(), g.n(), "list assignment size must match n");
    let bcs = broken_circuits(g, order, caps)?;
    let mut sum = BigInt::zero();
    for_each_nbc_subset(m, &bcs.minimal, &mut |f| {
        sum += signed_subset_term(g, f, l);
    });
    debug_assert!(!sum.is_negative());
    Ok(sum.to_biguint().expect("pruned inclusion-exclusion sum is a count"))
}
