//! Edge-count thresholds and bounded searches over k-list assignments.
//!
//! For a signed graph whose palette size `k` is large against the edge
//! count, no assignment of k-lists admits fewer proper colorings than the
//! uniform palette `M_k` itself. The searches here look for violations of
//! that picture inside a bounded universe of colors, and the structure
//! checks inspect what the minimizing assignments look like.

use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::circuits::{broken_circuits, for_each_nbc_subset, quasi_polynomial, EdgeOrder};
use crate::counting::{backtrack_count, brute_count_k, Color, Count, ListAssignment};
use crate::graph::SignedGraph;
use crate::{Caps, EdgeId, ResourceError, Vertex};

/// `ln(1 + √2)`, accurate to well under 1e-9.
pub const LN_1_PLUS_SQRT_2: f64 = 0.881_373_587_019_543;

/// Edge-count thresholds for palette minimality, with the least palette
/// sizes of each parity strictly above the sharper one.
#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdReport {
    pub m: usize,
    /// `C(m,3) + C(m,4) + m - 1`.
    pub t1: i64,
    /// `(m - 1) / ln(1 + √2)`.
    pub t2: f64,
    pub min_odd_k: u64,
    pub min_even_k: u64,
}

fn binom(n: i64, r: i64) -> i64 {
    if n < r {
        return 0;
    }
    let mut acc = 1i64;
    for i in 0..r {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

fn least_k_above(t2: f64, want_odd: bool) -> u64 {
    let mut k: u64 = if want_odd { 1 } else { 2 };
    while (k as f64) <= t2 {
        k += 2;
    }
    k
}

pub fn thresholds(m: usize) -> ThresholdReport {
    let mm = m as i64;
    let t1 = binom(mm, 3) + binom(mm, 4) + mm - 1;
    let t2 = (m as f64 - 1.0) / LN_1_PLUS_SQRT_2;
    ThresholdReport {
        m,
        t1,
        t2,
        min_odd_k: least_k_above(t2, true),
        min_even_k: least_k_above(t2, false),
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExtremalError {
    #[error("vertex {vertex}: list has {found} colors, expected k = {expected}")]
    ListSizeMismatch { vertex: Vertex, expected: u32, found: usize },
    #[error("no {mode} {k}-subsets exist in [-{universe_bound}, {universe_bound}]")]
    UniverseTooSmall { k: u32, mode: Mode, universe_bound: u32 },
    #[error("not an all-positive forest: {reason}")]
    NotAForest { reason: String },
    #[error(transparent)]
    Resource(#[from] ResourceError),
}

/// `α(e, L)`: for a k-list assignment, `k` minus the number of colors of
/// `L(v)` whose image under `σ(e)` lies in `L(u)`. Zero means the two lists
/// clash completely across the edge.
pub fn alpha(
    g: &SignedGraph,
    e: EdgeId,
    l: &ListAssignment,
    k: u32,
) -> Result<u32, ExtremalError> {
    let edge = g.edge(e);
    for v in [edge.u, edge.v] {
        let found = l.list(v).len();
        if found != k as usize {
            return Err(ExtremalError::ListSizeMismatch { vertex: v, expected: k, found });
        }
    }
    let lu = l.list(edge.u);
    let shared = l
        .list(edge.v)
        .iter()
        .filter(|&&c| lu.contains(&edge.sign.apply(c)))
        .count() as u32;
    Ok(k - shared)
}

/// Which k-lists the search draws from `[-U, U]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// All k-subsets.
    Any,
    /// Only k-subsets avoiding 0.
    ZeroFree,
    /// Only k-subsets containing 0.
    ZeroIncluded,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Any => "any",
            Mode::ZeroFree => "zero-free",
            Mode::ZeroIncluded => "zero-included",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Every assignment in the space, up to first-vertex relabeling.
    Exhaustive,
    /// Independent uniform draws of one candidate list per vertex.
    Random { trials: u64, seed: u64 },
}

/// Search space and budget for [`minimize_over_assignments`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub k: u32,
    pub mode: Mode,
    /// Colors are drawn from `[-universe_bound, universe_bound]`.
    pub universe_bound: u32,
    pub strategy: Strategy,
    /// An exhaustive search refuses to start if the nominal space exceeds
    /// this many evaluations.
    pub budget: u128,
    /// At most this many minimizers are retained.
    pub minimizer_cap: usize,
}

impl SearchConfig {
    /// Defaults: universe `[-k, k]`, exhaustive, 10^8 budget.
    pub fn new(k: u32, mode: Mode) -> SearchConfig {
        assert!(k >= 1, "palettes need at least one color");
        SearchConfig {
            k,
            mode,
            universe_bound: k,
            strategy: Strategy::Exhaustive,
            budget: 100_000_000,
            minimizer_cap: 100_000,
        }
    }
}

/// What a search over k-list assignments found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOutcome {
    /// Assignments actually evaluated.
    pub evaluated: u64,
    /// Smallest list-coloring count seen.
    pub min_count: Count,
    /// Lexicographically smallest assignment attaining it.
    pub argmin: ListAssignment,
    /// The proper-coloring count the minimum is measured against: the
    /// quasi-polynomial of matching parity (zero-free = even, zero-included
    /// = odd, any = the parity of k) evaluated at k.
    pub canonical_count: Count,
    /// True when some assignment undercut the canonical count.
    pub counterexample_found: bool,
    /// Minimizing assignments seen, ascending lexicographically.
    pub minimizers: Vec<ListAssignment>,
    /// True when more minimizers existed than were retained.
    pub minimizers_truncated: bool,
}

fn universe(mode: Mode, u: u32) -> Vec<Color> {
    let u = u as Color;
    (-u..=u)
        .filter(|&c| c != 0 || mode != Mode::ZeroFree)
        .collect()
}

fn candidate_lists(mode: Mode, k: u32, u: u32) -> Vec<Vec<Color>> {
    let k = k as usize;
    let univ = universe(mode, u);
    let mut out: Vec<Vec<Color>> = match mode {
        Mode::Any | Mode::ZeroFree => univ.into_iter().combinations(k).collect(),
        Mode::ZeroIncluded => {
            let nonzero: Vec<Color> = univ.into_iter().filter(|&c| c != 0).collect();
            nonzero
                .into_iter()
                .combinations(k - 1)
                .map(|mut l| {
                    l.push(0);
                    l.sort_unstable();
                    l
                })
                .collect()
        }
    };
    out.sort();
    out
}

/// Canonical orbit representative of a sorted list under odd bijections of
/// the colors (`φ(-x) = -φ(x)`). Such relabelings preserve coloring counts
/// and the candidate family, so an exhaustive search may fix the first
/// vertex's list to representatives only. The orbit is determined by
/// whether 0 is present and how the nonzero magnitudes pair up; the
/// representative packs the paired magnitudes first.
fn canonical_representative(list: &[Color]) -> Vec<Color> {
    let has_zero = list.contains(&0);
    let mut mags: Vec<u32> = list
        .iter()
        .filter(|&&c| c != 0)
        .map(|&c| c.unsigned_abs())
        .collect();
    mags.sort_unstable();
    let mut pairs = 0i64;
    let mut singles = 0i64;
    let mut i = 0;
    while i < mags.len() {
        if i + 1 < mags.len() && mags[i] == mags[i + 1] {
            pairs += 1;
            i += 2;
        } else {
            singles += 1;
            i += 1;
        }
    }
    let mut rep: Vec<Color> = Vec::with_capacity(list.len());
    if has_zero {
        rep.push(0);
    }
    for a in 1..=pairs {
        rep.push(a as Color);
        rep.push(-(a as Color));
    }
    for a in (pairs + 1)..=(pairs + singles) {
        rep.push(a as Color);
    }
    rep.sort_unstable();
    rep
}

/// Precompiled pruned inclusion-exclusion over the no-broken-circuit
/// subsets: per subset, its sign, its balanced components as
/// (vertex, negate-side) memberships, and the vertices its unbalanced
/// components force to hold color 0. Lists are evaluated as bit masks over
/// the color universe.
struct NbcEngine {
    terms: Vec<Term>,
    zero_bit: Option<u64>,
}

struct Term {
    negative: bool,
    balanced: Vec<Vec<(Vertex, bool)>>,
    needs_zero: Vec<Vertex>,
}

impl NbcEngine {
    fn build(
        g: &SignedGraph,
        caps: &Caps,
        zero_bit: Option<u64>,
    ) -> Result<NbcEngine, ResourceError> {
        let m = g.m();
        if m > caps.subset_edges {
            return Err(ResourceError::SubsetCap { m, cap: caps.subset_edges });
        }
        let order = EdgeOrder::identity(m);
        let bcs = broken_circuits(g, &order, caps)?;
        let mut terms = Vec::new();
        for_each_nbc_subset(m, &bcs.minimal, &mut |f| {
            let report = g.components_of(f);
            let mut balanced = Vec::new();
            for comp in report.balanced() {
                let split = g.harary_split(comp).expect("component reported balanced");
                let members = comp
                    .vertices
                    .iter()
                    .map(|&v| (v, split.x1.binary_search(&v).is_ok()))
                    .collect();
                balanced.push(members);
            }
            terms.push(Term {
                negative: f.len() % 2 == 1,
                balanced,
                needs_zero: report.unbalanced_vertices,
            });
        });
        Ok(NbcEngine { terms, zero_bit })
    }

    fn gamma_holds(&self, term: &Term, mask: &[u64]) -> bool {
        match self.zero_bit {
            _ if term.needs_zero.is_empty() => true,
            Some(zb) => term.needs_zero.iter().all(|&v| mask[v] & zb != 0),
            None => false,
        }
    }

    fn eval(&self, mask: &[u64], neg_mask: &[u64]) -> BigUint {
        match self.eval_fast(mask, neg_mask) {
            Some(v) => BigUint::from(v),
            None => self.eval_exact(mask, neg_mask),
        }
    }

    fn eval_fast(&self, mask: &[u64], neg_mask: &[u64]) -> Option<u128> {
        let mut sum: i128 = 0;
        'terms: for t in &self.terms {
            if !self.gamma_holds(t, mask) {
                continue;
            }
            let mut prod: i128 = 1;
            for comp in &t.balanced {
                let mut inter = !0u64;
                for &(v, neg) in comp {
                    inter &= if neg { neg_mask[v] } else { mask[v] };
                }
                match inter.count_ones() {
                    0 => continue 'terms,
                    b => prod = prod.checked_mul(b as i128)?,
                }
            }
            sum = sum.checked_add(if t.negative { -prod } else { prod })?;
        }
        debug_assert!(sum >= 0);
        u128::try_from(sum).ok()
    }

    fn eval_exact(&self, mask: &[u64], neg_mask: &[u64]) -> BigUint {
        let mut sum = BigInt::zero();
        'terms: for t in &self.terms {
            if !self.gamma_holds(t, mask) {
                continue;
            }
            let mut prod = BigInt::one();
            for comp in &t.balanced {
                let mut inter = !0u64;
                for &(v, neg) in comp {
                    inter &= if neg { neg_mask[v] } else { mask[v] };
                }
                match inter.count_ones() {
                    0 => continue 'terms,
                    b => prod *= b as u64,
                }
            }
            if t.negative {
                sum -= prod;
            } else {
                sum += prod;
            }
        }
        debug_assert!(!sum.is_negative());
        sum.to_biguint().expect("pruned inclusion-exclusion sum is a count")
    }
}

enum Evaluator {
    Nbc { engine: NbcEngine, cand_masks: Vec<(u64, u64)> },
    Brute,
}

impl Evaluator {
    fn eval(
        &self,
        g: &SignedGraph,
        cands: &[Vec<Color>],
        idx: &[usize],
        scratch: &mut (Vec<u64>, Vec<u64>),
    ) -> BigUint {
        match self {
            Evaluator::Nbc { engine, cand_masks } => {
                let (mask, neg_mask) = scratch;
                mask.clear();
                neg_mask.clear();
                for &i in idx {
                    let (m, nm) = cand_masks[i];
                    mask.push(m);
                    neg_mask.push(nm);
                }
                engine.eval(mask, neg_mask)
            }
            Evaluator::Brute => {
                let lists: Vec<&[Color]> = idx.iter().map(|&i| cands[i].as_slice()).collect();
                BigUint::from(backtrack_count(g, &lists))
            }
        }
    }
}

struct MinTracker {
    cap: usize,
    best: Option<BigUint>,
    minimizers: BTreeSet<Vec<usize>>,
    truncated: bool,
}

impl MinTracker {
    fn new(cap: usize) -> MinTracker {
        MinTracker { cap, best: None, minimizers: BTreeSet::new(), truncated: false }
    }

    fn observe(&mut self, idx: &[usize], value: BigUint) {
        let is_new_min = match &self.best {
            None => true,
            Some(b) => value < *b,
        };
        if is_new_min {
            self.best = Some(value);
            self.minimizers.clear();
            self.truncated = false;
            self.minimizers.insert(idx.to_vec());
            return;
        }
        if self.best.as_ref() == Some(&value) && !self.minimizers.contains(idx) {
            if self.minimizers.len() < self.cap {
                self.minimizers.insert(idx.to_vec());
            } else {
                self.truncated = true;
            }
        }
    }
}

fn canonical_comparator(
    g: &SignedGraph,
    cfg: &SearchConfig,
    caps: &Caps,
) -> Result<Count, ExtremalError> {
    let order = EdgeOrder::identity(g.m());
    let k = cfg.k as u64;
    match quasi_polynomial(g, &order, caps) {
        Ok(qp) => {
            let value = match cfg.mode {
                Mode::Any => return Ok(qp.eval(k)),
                Mode::ZeroFree => qp.eval_even(k),
                Mode::ZeroIncluded => qp.eval_odd(k),
            };
            Ok(value.to_biguint().expect("coloring counts are non-negative"))
        }
        Err(err) => {
            // Without the polynomial the comparator is still reachable by
            // brute force whenever the palette parity matches the mode.
            let parity_ok = match cfg.mode {
                Mode::Any => true,
                Mode::ZeroFree => cfg.k.is_multiple_of(2),
                Mode::ZeroIncluded => cfg.k % 2 == 1,
            };
            if parity_ok {
                Ok(brute_count_k(g, cfg.k))
            } else {
                Err(err.into())
            }
        }
    }
}

fn saturating_power(base: usize, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u128);
    }
    acc
}

fn assignment_from(cands: &[Vec<Color>], idx: &[usize]) -> ListAssignment {
    ListAssignment::new(
        idx.iter()
            .map(|&i| cands[i].iter().copied().collect())
            .collect(),
    )
    .expect("candidate lists are non-empty")
}

/// Minimizes the list-coloring count over all assignments drawing one
/// candidate k-list per vertex from `[-U, U]`, and compares the minimum
/// against the canonical proper-coloring count.
///
/// The exhaustive strategy walks assignments in lexicographic order,
/// restricting the first vertex to canonical orbit representatives (see
/// [`canonical_representative`]); this changes neither the minimum nor any
/// relabeling-invariant property of the minimizer set. The random strategy
/// draws every vertex uniformly and is reproducible from its seed.
///
/// Counting uses the pruned subset engine when the caps allow it and plain
/// backtracking otherwise; both are exact.
pub fn minimize_over_assignments(
    g: &SignedGraph,
    cfg: &SearchConfig,
    caps: &Caps,
) -> Result<SearchOutcome, ExtremalError> {
    assert!(cfg.k >= 1, "palettes need at least one color");
    let n = g.n();
    let cands = candidate_lists(cfg.mode, cfg.k, cfg.universe_bound);
    if cands.is_empty() {
        return Err(ExtremalError::UniverseTooSmall {
            k: cfg.k,
            mode: cfg.mode,
            universe_bound: cfg.universe_bound,
        });
    }
    let canonical_count = canonical_comparator(g, cfg, caps)?;

    let univ = universe(cfg.mode, cfg.universe_bound);
    let evaluator = if univ.len() <= 64 {
        match NbcEngine::build(g, caps, zero_bit_of(&univ)) {
            Ok(engine) => {
                let cand_masks = cands.iter().map(|c| masks_for(&univ, c)).collect();
                Evaluator::Nbc { engine, cand_masks }
            }
            // Caps forbid the pruned engine; fall back to backtracking,
            // which is exact and needs no enumeration of subsets.
            Err(_) => Evaluator::Brute,
        }
    } else {
        Evaluator::Brute
    };

    let mut tracker = MinTracker::new(cfg.minimizer_cap);
    let mut scratch = (Vec::with_capacity(n), Vec::with_capacity(n));
    let mut evaluated: u64 = 0;
    let mut idx = vec![0usize; n];

    match cfg.strategy {
        Strategy::Exhaustive => {
            let nominal = saturating_power(cands.len(), n);
            if nominal > cfg.budget {
                return Err(ResourceError::SearchBudget { needed: nominal, budget: cfg.budget }
                    .into());
            }
            if n == 0 {
                let value = evaluator.eval(g, &cands, &idx, &mut scratch);
                tracker.observe(&idx, value);
                evaluated = 1;
            } else {
                let first_choices: Vec<usize> = (0..cands.len())
                    .filter(|&i| canonical_representative(&cands[i]) == cands[i])
                    .collect();
                debug_assert!(!first_choices.is_empty());
                let mut cursor = vec![0usize; n];
                'space: loop {
                    idx[0] = first_choices[cursor[0]];
                    idx[1..].copy_from_slice(&cursor[1..]);
                    let value = evaluator.eval(g, &cands, &idx, &mut scratch);
                    tracker.observe(&idx, value);
                    evaluated += 1;
                    let mut v = n - 1;
                    loop {
                        cursor[v] += 1;
                        let limit = if v == 0 { first_choices.len() } else { cands.len() };
                        if cursor[v] < limit {
                            break;
                        }
                        cursor[v] = 0;
                        if v == 0 {
                            break 'space;
                        }
                        v -= 1;
                    }
                }
            }
        }
        Strategy::Random { trials, seed } => {
            assert!(trials >= 1, "random search needs at least one trial");
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..trials {
                for slot in idx.iter_mut() {
                    *slot = rng.random_range(0..cands.len());
                }
                let value = evaluator.eval(g, &cands, &idx, &mut scratch);
                tracker.observe(&idx, value);
                evaluated += 1;
            }
        }
    }

    let min_count = tracker.best.expect("at least one assignment was evaluated");
    let minimizers: Vec<ListAssignment> = tracker
        .minimizers
        .iter()
        .map(|idx| assignment_from(&cands, idx))
        .collect();
    let argmin = minimizers.first().cloned().expect("minimum was attained");
    let counterexample_found = min_count < canonical_count;
    Ok(SearchOutcome {
        evaluated,
        min_count,
        argmin,
        canonical_count,
        counterexample_found,
        minimizers,
        minimizers_truncated: tracker.truncated,
    })
}

fn zero_bit_of(univ: &[Color]) -> Option<u64> {
    univ.binary_search(&0).ok().map(|i| 1u64 << i)
}

fn masks_for(univ: &[Color], list: &[Color]) -> (u64, u64) {
    let mut mask = 0u64;
    let mut neg_mask = 0u64;
    for &c in list {
        let i = univ.binary_search(&c).expect("list color inside universe");
        let j = univ.binary_search(&-c).expect("universe closed under negation");
        mask |= 1 << i;
        neg_mask |= 1 << j;
    }
    (mask, neg_mask)
}

/// The shapes forced on assignments attaining the minimum: every edge
/// fully clashed (`α = 0`) and, on unbalanced components, every list
/// closed under negation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureReport {
    /// `α` per edge position.
    pub alphas: Vec<u32>,
    pub all_alpha_zero: bool,
    /// Per unbalanced component of the whole graph: its vertices and
    /// whether all its lists satisfy `L(v) = -L(v)`.
    pub unbalanced_negation: Vec<(Vec<Vertex>, bool)>,
    pub all_unbalanced_negation_closed: bool,
}

pub fn check_minimizer_structure(
    g: &SignedGraph,
    l: &ListAssignment,
    k: u32,
) -> Result<StructureReport, ExtremalError> {
    assert_eq!(l.len(), g.n(), "list assignment size must match n");
    let mut alphas = Vec::with_capacity(g.m());
    for e in 0..g.m() {
        alphas.push(alpha(g, e, l, k)?);
    }
    let report = g.components_all();
    let unbalanced_negation: Vec<(Vec<Vertex>, bool)> = report
        .components
        .iter()
        .filter(|c| !c.balanced)
        .map(|c| {
            let closed = c.vertices.iter().all(|&v| {
                let list = l.list(v);
                list.iter().all(|&x| list.contains(&-x))
            });
            (c.vertices.clone(), closed)
        })
        .collect();
    Ok(StructureReport {
        all_alpha_zero: alphas.iter().all(|&a| a == 0),
        all_unbalanced_negation_closed: unbalanced_negation.iter().all(|&(_, c)| c),
        alphas,
        unbalanced_negation,
    })
}

/// For an all-positive forest with `t` trees and k-lists everywhere, the
/// shortfall of the per-tree shared-color product against `k^t` is bounded
/// by `k^(t-1) · Σ_e (k - |L(u) ∩ L(v)|)`. Returns whether the bound
/// holds (it always should).
pub fn forest_gap_check(
    g: &SignedGraph,
    l: &ListAssignment,
    k: u32,
) -> Result<bool, ExtremalError> {
    assert_eq!(l.len(), g.n(), "list assignment size must match n");
    for v in 0..g.n() {
        let found = l.list(v).len();
        if found != k as usize {
            return Err(ExtremalError::ListSizeMismatch { vertex: v, expected: k, found });
        }
    }
    if let Some(e) = g.edges().iter().position(|e| e.sign.is_negative()) {
        return Err(ExtremalError::NotAForest { reason: format!("edge {e} is negative") });
    }
    let report = g.components_all();
    for comp in &report.components {
        if comp.edges.len() != comp.vertices.len() - 1 {
            return Err(ExtremalError::NotAForest {
                reason: format!("component of vertex {} contains a cycle", comp.vertices[0]),
            });
        }
    }
    let t = report.components.len();
    if t == 0 {
        return Ok(true);
    }

    let k_big = BigInt::from(k);
    let mut prod = BigInt::one();
    for comp in &report.components {
        let mut shared: BTreeSet<Color> = l.list(comp.vertices[0]).clone();
        for &v in &comp.vertices[1..] {
            shared = shared.intersection(l.list(v)).copied().collect();
        }
        prod *= BigInt::from(shared.len());
    }
    let lhs = k_big.pow(t as u32) - prod;

    let mut defects = BigInt::zero();
    for e in g.edges() {
        let inter = l.list(e.u).intersection(l.list(e.v)).count();
        defects += BigInt::from(k as usize - inter);
    }
    let rhs = k_big.pow(t as u32 - 1) * defects;
    Ok(lhs <= rhs)
}
