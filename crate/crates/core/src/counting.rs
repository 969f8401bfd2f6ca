//! Exact coloring counters.
//!
//! Colors are integers; the palette for `k` colors is the symmetric set
//! `M_k` from [`color_set`]. A coloring is proper when `c(u) != σ(e)·c(v)`
//! across every edge. Counting routes here: plain backtracking over all
//! colorings, and inclusion-exclusion over spanning subgraphs driven by the
//! per-component quantities [`beta`] and [`gamma`].
//!
//! List assignments come in a line-based text format, one line per vertex:
//! `v: c1 c2 ... ck`. Every vertex must appear exactly once.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::graph::{Component, ComponentReport, EdgeSet, GraphError, Sign, SignedGraph};
use crate::{Caps, ResourceError, Vertex, MAX_EDGES};

pub type Color = i32;

/// Exact coloring count; these grow like `k^n`.
pub type Count = BigUint;

/// The palette `M_k`: `{0, ±1, …, ±t}` for `k = 2t+1` and `{±1, …, ±t}`
/// for `k = 2t`. Always `|M_k| = k`, and `M_k` is closed under negation;
/// `0` is present exactly when `k` is odd.
pub fn color_set(k: u32) -> BTreeSet<Color> {
    let t = (k / 2) as Color;
    let mut m = BTreeSet::new();
    if k % 2 == 1 {
        m.insert(0);
    }
    for a in 1..=t {
        m.insert(a);
        m.insert(-a);
    }
    m
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ListError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: vertex {v} out of range for n = {n}")]
    VertexOutOfRange { line: usize, v: usize, n: usize },
    #[error("line {line}: vertex {v} listed twice")]
    DuplicateVertex { line: usize, v: Vertex },
    #[error("line {line}: duplicate color {c} in the list of vertex {v}")]
    DuplicateColor { line: usize, v: Vertex, c: Color },
    #[error("vertex {v} has an empty list")]
    EmptyList { v: Vertex },
    #[error("missing list for vertex {v}")]
    MissingVertex { v: Vertex },
}

/// A color list for every vertex `0..n`. Lists are non-empty sets; they
/// need not share a size.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ListAssignment {
    lists: Vec<BTreeSet<Color>>,
}

impl ListAssignment {
    pub fn new(lists: Vec<BTreeSet<Color>>) -> Result<ListAssignment, ListError> {
        for (v, l) in lists.iter().enumerate() {
            if l.is_empty() {
                return Err(ListError::EmptyList { v });
            }
        }
        Ok(ListAssignment { lists })
    }

    /// The uniform assignment giving every vertex the full palette `M_k`.
    pub fn uniform(n: usize, k: u32) -> ListAssignment {
        assert!(k >= 1 || n == 0, "empty lists are not a list assignment");
        ListAssignment { lists: vec![color_set(k); n] }
    }

    pub fn parse(text: &str, n: usize) -> Result<ListAssignment, ListError> {
        let mut lists: Vec<Option<BTreeSet<Color>>> = vec![None; n];
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let lineno = i + 1;
            let malformed = |reason: String| ListError::Malformed { line: lineno, reason };
            let (head, tail) = line
                .split_once(':')
                .ok_or_else(|| malformed(format!("expected \"v: colors\", got {line:?}")))?;
            let v: usize = head
                .trim()
                .parse()
                .map_err(|_| malformed(format!("bad vertex {:?}", head.trim())))?;
            if v >= n {
                return Err(ListError::VertexOutOfRange { line: lineno, v, n });
            }
            if lists[v].is_some() {
                return Err(ListError::DuplicateVertex { line: lineno, v });
            }
            let mut colors = BTreeSet::new();
            for tok in tail.split_whitespace() {
                let c: Color = tok
                    .parse()
                    .map_err(|_| malformed(format!("bad color {tok:?}")))?;
                if !colors.insert(c) {
                    return Err(ListError::DuplicateColor { line: lineno, v, c });
                }
            }
            if colors.is_empty() {
                return Err(ListError::EmptyList { v });
            }
            lists[v] = Some(colors);
        }
        let mut out = Vec::with_capacity(n);
        for (v, l) in lists.into_iter().enumerate() {
            out.push(l.ok_or(ListError::MissingVertex { v })?);
        }
        Ok(ListAssignment { lists: out })
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }

    pub fn list(&self, v: Vertex) -> &BTreeSet<Color> {
        &self.lists[v]
    }

    pub fn lists(&self) -> &[BTreeSet<Color>] {
        &self.lists
    }

    /// No list contains `0`.
    pub fn is_zero_free(&self) -> bool {
        self.lists.iter().all(|l| !l.contains(&0))
    }

    /// Every list contains `0`.
    pub fn is_zero_included(&self) -> bool {
        self.lists.iter().all(|l| l.contains(&0))
    }

    /// Every list has exactly `k` colors.
    pub fn is_k_assignment(&self, k: u32) -> bool {
        self.lists.iter().all(|l| l.len() == k as usize)
    }

    /// The assignment switched at `X`: lists of vertices in `X` are negated
    /// elementwise. Mirrors [`SignedGraph::switched`].
    pub fn switched(&self, x: &[Vertex]) -> ListAssignment {
        let mut in_x = vec![false; self.len()];
        for &v in x {
            assert!(v < self.len(), "switch vertex {v} out of range");
            in_x[v] = true;
        }
        let lists = self
            .lists
            .iter()
            .enumerate()
            .map(|(v, l)| {
                if in_x[v] {
                    l.iter().map(|&c| -c).collect()
                } else {
                    l.clone()
                }
            })
            .collect();
        ListAssignment { lists }
    }

    /// Every list negated.
    pub fn negated(&self) -> ListAssignment {
        let all: Vec<Vertex> = (0..self.len()).collect();
        self.switched(&all)
    }
}

impl fmt::Display for ListAssignment {
    /// The same `v: c1 c2 ...` format accepted by [`ListAssignment::parse`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (v, l) in self.lists.iter().enumerate() {
            write!(f, "{v}:")?;
            for c in l {
                write!(f, " {c}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Backtracking count over explicit candidate lists. Vertices are colored
/// in index order; counts stay within `u128` for anything enumerable.
pub(crate) fn backtrack_count(g: &SignedGraph, lists: &[&[Color]]) -> u128 {
    let n = g.n();
    debug_assert_eq!(lists.len(), n);
    // Constraints from each vertex towards smaller-indexed neighbors.
    let mut back: Vec<Vec<(Vertex, Sign)>> = vec![Vec::new(); n];
    for e in g.edges() {
        let (lo, hi) = if e.u < e.v { (e.u, e.v) } else { (e.v, e.u) };
        back[hi].push((lo, e.sign));
    }

    fn rec(
        v: usize,
        n: usize,
        lists: &[&[Color]],
        back: &[Vec<(Vertex, Sign)>],
        chosen: &mut Vec<Color>,
    ) -> u128 {
        if v == n {
            return 1;
        }
        let mut total = 0;
        'colors: for &c in lists[v] {
            for &(w, s) in &back[v] {
                if chosen[w] == s.apply(c) {
                    continue 'colors;
                }
            }
            chosen[v] = c;
            total += rec(v + 1, n, lists, back, chosen);
        }
        total
    }

    let mut chosen = vec![0; n];
    rec(0, n, lists, &back, &mut chosen)
}

/// Number of proper colorings of `g` from the palette `M_k`, by brute force.
pub fn brute_count_k(g: &SignedGraph, k: u32) -> Count {
    let palette: Vec<Color> = color_set(k).into_iter().collect();
    let lists = vec![palette.as_slice(); g.n()];
    Count::from(backtrack_count(g, &lists))
}

/// Number of proper colorings with `c(v) ∈ L(v)`, by brute force.
pub fn brute_count_list(g: &SignedGraph, l: &ListAssignment) -> Count {
    assert_eq!(l.len(), g.n(), "list assignment size must match n");
    let owned: Vec<Vec<Color>> = l.lists().iter().map(|s| s.iter().copied().collect()).collect();
    let lists: Vec<&[Color]> = owned.iter().map(Vec::as_slice).collect();
    Count::from(backtrack_count(g, &lists))
}

/// `β(T, L)`: the number of colors shared by every list of the balanced
/// component `T` after negating the lists on one Harary side.
///
/// Negating on the other side gives the same value — negation is a
/// bijection between the two intersections — so the choice of side does
/// not matter. Errors if `T` is unbalanced.
pub fn beta(g: &SignedGraph, comp: &Component, l: &ListAssignment) -> Result<u64, GraphError> {
    let split = g.harary_split(comp)?;
    let negate = |v: Vertex| split.x1.binary_search(&v).is_ok();
    let first = comp.vertices[0];
    let mut count = 0;
    'candidates: for &c in l.list(first) {
        let shared = if negate(first) { -c } else { c };
        for &v in &comp.vertices[1..] {
            let need = if negate(v) { -shared } else { shared };
            if !l.list(v).contains(&need) {
                continue 'candidates;
            }
        }
        count += 1;
    }
    Ok(count)
}

/// `γ(⟨F⟩, L)`: `1` unless some vertex of an unbalanced component of the
/// spanning subgraph lacks color `0`, in which case `0`.
pub fn gamma(g: &SignedGraph, f: EdgeSet, l: &ListAssignment) -> bool {
    gamma_of_report(&g.components_of(f), l)
}

/// [`gamma`] evaluated on a precomputed component report.
pub fn gamma_of_report(report: &ComponentReport, l: &ListAssignment) -> bool {
    report.unbalanced_vertices.iter().all(|&v| l.list(v).contains(&0))
}

/// The signed summand for one spanning subgraph:
/// `(-1)^{|F|} · γ(⟨F⟩, L) · ∏_j β(T_j, L)` over balanced components `T_j`.
pub(crate) fn signed_subset_term(g: &SignedGraph, f: EdgeSet, l: &ListAssignment) -> BigInt {
    let report = g.components_of(f);
    if !gamma_of_report(&report, l) {
        return BigInt::zero();
    }
    let mut prod = BigInt::one();
    for comp in report.balanced() {
        let b = beta(g, comp, l).expect("component reported balanced");
        if b == 0 {
            return BigInt::zero();
        }
        prod *= b;
    }
    if f.len() % 2 == 1 {
        -prod
    } else {
        prod
    }
}

/// List-coloring count by inclusion-exclusion over all `2^m` spanning
/// subgraphs. Exact but exponential; refuses to run past the subset cap.
pub fn inclusion_exclusion_count(
    g: &SignedGraph,
    l: &ListAssignment,
    caps: &Caps,
) -> Result<Count, ResourceError> {
    let m = g.m();
    if m > caps.subset_edges {
        return Err(ResourceError::SubsetCap { m, cap: caps.subset_edges });
    }
    if m > MAX_EDGES {
        return Err(ResourceError::EdgeWidth { m });
    }
    assert_eq!(l.len(), g.n(), "list assignment size must match n");
    let mut sum = BigInt::zero();
    for mask in 0..(1u128 << m) {
        sum += signed_subset_term(g, EdgeSet(mask as u64), l);
    }
    debug_assert!(!sum.is_negative());
    Ok(sum.to_biguint().expect("inclusion-exclusion sum is a count"))
}
