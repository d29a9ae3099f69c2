//! Graph regularity, hypergraph copy counting and removal, and the
//! progression encoding.
//!
//! Densities count ordered pairs: `d(U, U') = |E ∩ (U × U')| / (|U||U'|)`,
//! so an edge inside `U ∩ U'` is counted in both orientations.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use bitvec::prelude::*;
use rayon::prelude::*;
use thiserror::Error;

use crate::budget::{power_size, Budget, BudgetExceeded};
use crate::parser::{line_tokens, parse_usize_tok, tok_span, ParseError, SourceSpan};
use crate::rational::Rational;

/// Largest part size for which `is_epsilon_regular` enumerates subsets.
pub const DEFAULT_EXACT_CAP: usize = 15;

/// Distinct copy sets above which removal switches to the greedy cover.
pub const EXACT_REMOVAL_LIMIT: usize = 10_000;

const BRANCH_NODE_LIMIT: u64 = 5_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegularityError {
    #[error("vertex {vertex} out of range for {n} vertices")]
    OutOfRange { vertex: usize, n: usize },
    #[error("self-loop at {0}")]
    SelfLoop(usize),
    #[error("edge has {found} vertices, expected {expected}")]
    EdgeSize { expected: usize, found: usize },
    #[error("edge repeats vertex {0}")]
    RepeatedVertex(usize),
    #[error("vertex sets must be nonempty")]
    EmptyPart,
    #[error("part of size {size} exceeds the exact cap {cap}")]
    CapExceeded { size: usize, cap: usize },
    #[error("epsilon must lie in (0, 1), got {0}")]
    BadEpsilon(Rational),
    #[error("need 1 <= k_min <= k_max and k_min <= |V|, got k_min = {k_min}, k_max = {k_max}, |V| = {n}")]
    PartitionBounds { k_min: usize, k_max: usize, n: usize },
    #[error("pattern is {pattern}-uniform but the host is {host}-uniform")]
    Uniformity { pattern: usize, host: usize },
    #[error("set element {element} outside [1, {n}]")]
    SetOutOfRange { element: usize, n: usize },
    #[error("k must be at least 1")]
    ZeroK,
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}

/// An undirected graph on `0..n` stored as adjacency bit rows.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<BitVec>,
    loops: bool,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n, self.edges())
    }
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            n,
            adj: vec![bitvec![0; n]; n],
            loops: false,
        }
    }

    /// A graph that accepts self-loops.
    pub fn with_loops(n: usize) -> Self {
        Graph {
            loops: true,
            ..Graph::new(n)
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, RegularityError> {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn from_fn(n: usize, mut adjacent: impl FnMut(usize, usize) -> bool) -> Self {
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                if adjacent(u, v) {
                    g.add_edge(u, v).expect("distinct vertices in range");
                }
            }
        }
        g
    }

    pub fn complete(n: usize) -> Self {
        Graph::from_fn(n, |_, _| true)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), RegularityError> {
        for w in [u, v] {
            if w >= self.n {
                return Err(RegularityError::OutOfRange { vertex: w, n: self.n });
            }
        }
        if u == v && !self.loops {
            return Err(RegularityError::SelfLoop(u));
        }
        self.adj[u].set(v, true);
        self.adj[v].set(u, true);
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn allows_loops(&self) -> bool {
        self.loops
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u][v]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].count_ones()
    }

    /// Edges as `(u, v)` with `u <= v`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|u| self.adj[u].iter_ones().filter(move |&v| v >= u).map(move |v| (u, v)))
            .collect()
    }

    /// `|E ∩ (U × U')|` over ordered pairs.
    pub fn edge_count_between(&self, u: &[usize], u2: &[usize]) -> usize {
        u.iter().map(|&a| u2.iter().filter(|&&b| self.adj[a][b]).count()).sum()
    }

    fn check_set(&self, set: &[usize]) -> Result<(), RegularityError> {
        if set.is_empty() {
            return Err(RegularityError::EmptyPart);
        }
        match set.iter().find(|&&v| v >= self.n) {
            Some(&v) => Err(RegularityError::OutOfRange { vertex: v, n: self.n }),
            None => Ok(()),
        }
    }
}

/// `d(U, U')`.
pub fn density(g: &Graph, u: &[usize], u2: &[usize]) -> Result<Rational, RegularityError> {
    g.check_set(u)?;
    g.check_set(u2)?;
    Ok(Rational::ratio(g.edge_count_between(u, u2), u.len() * u2.len()))
}

/// How a regularity verdict was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegularityMode {
    Exact,
    Heuristic,
    /// Exact when both sets are within the cap, heuristic otherwise.
    Auto { cap: usize },
}

/// Subsets `V ⊆ U`, `V' ⊆ U'` of admissible size whose density deviates by
/// at least ε.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub v: Vec<usize>,
    pub v2: Vec<usize>,
    pub base_density: Rational,
    pub witness_density: Rational,
}

impl Witness {
    /// Rechecks the witness from scratch.
    pub fn validate(&self, g: &Graph, u: &[usize], u2: &[usize], eps: &Rational) -> bool {
        let uset: HashSet<usize> = u.iter().copied().collect();
        let u2set: HashSet<usize> = u2.iter().copied().collect();
        let distinct = |s: &[usize]| s.iter().collect::<HashSet<_>>().len() == s.len();
        if self.v.is_empty() || self.v2.is_empty() || !distinct(&self.v) || !distinct(&self.v2) {
            return false;
        }
        if !self.v.iter().all(|x| uset.contains(x)) || !self.v2.iter().all(|x| u2set.contains(x)) {
            return false;
        }
        if Rational::from(self.v.len()) < eps * Rational::from(u.len())
            || Rational::from(self.v2.len()) < eps * Rational::from(u2.len())
        {
            return false;
        }
        let (Ok(d), Ok(dv)) = (density(g, u, u2), density(g, &self.v, &self.v2)) else {
            return false;
        };
        d == self.base_density && dv == self.witness_density && (d - dv).abs() >= *eps
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Regular,
    /// The heuristic found no witness; nothing is certified.
    RegularUncertified,
    Irregular(Witness),
}

impl Verdict {
    pub fn is_certified_regular(&self) -> bool {
        matches!(self, Verdict::Regular)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Irregular(w) => Some(w),
            _ => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Regular => write!(f, "regular"),
            Verdict::RegularUncertified => write!(f, "regular (not certified)"),
            Verdict::Irregular(w) => write!(
                f,
                "irregular: V = {:?}, V' = {:?}, d(V, V') = {} vs {}",
                w.v, w.v2, w.witness_density, w.base_density
            ),
        }
    }
}

fn check_eps(eps: &Rational) -> Result<(), RegularityError> {
    if eps.is_positive() && eps < &Rational::one() {
        Ok(())
    } else {
        Err(RegularityError::BadEpsilon(eps.clone()))
    }
}

/// `⌈ε·size⌉`, the least admissible subset size.
fn min_size(eps: &Rational, size: usize) -> usize {
    let x = eps * Rational::from(size);
    let q = x.numer() / x.denom();
    let q: usize = q.try_into().expect("fits");
    if Rational::from(q) == x {
        q.max(1)
    } else {
        q + 1
    }
}

/// Integer form of `|E0/(a b) − e/(s t)| ≥ p/q`.
struct DeviationTest {
    e0: i128,
    ab: i128,
    p: i128,
    q: i128,
}

impl DeviationTest {
    fn new(e0: usize, a: usize, b: usize, eps: &Rational) -> Self {
        DeviationTest {
            e0: e0 as i128,
            ab: (a * b) as i128,
            p: eps.numer().try_into().expect("small epsilon"),
            q: eps.denom().try_into().expect("small epsilon"),
        }
    }

    fn deviates(&self, e: usize, s: usize, t: usize) -> bool {
        let st = (s * t) as i128;
        self.q * (self.e0 * st - e as i128 * self.ab).abs() >= self.p * self.ab * st
    }
}

/// Finds `V'` of some admissible size for a fixed `V`, given the degrees of
/// `B`'s vertices into `V`. The extreme sums for each size are the `s`
/// largest and the `s` smallest degrees.
fn best_partner(degs: &mut [(usize, usize)], vlen: usize, smin: usize, test: &DeviationTest) -> Option<Vec<usize>> {
    degs.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));
    let m = degs.len();
    let mut prefix = vec![0usize; m + 1];
    for i in 0..m {
        prefix[i + 1] = prefix[i] + degs[i].0;
    }
    for s in smin..=m {
        if test.deviates(prefix[s], vlen, s) {
            return Some(degs[..s].iter().map(|d| d.1).collect());
        }
        if test.deviates(prefix[m] - prefix[m - s], vlen, s) {
            return Some(degs[m - s..].iter().map(|d| d.1).collect());
        }
    }
    None
}

fn exact_search(g: &Graph, a: &[usize], b: &[usize], eps: &Rational, budget: &Budget) -> Result<Option<(Vec<usize>, Vec<usize>)>, RegularityError> {
    budget.charge(((1u64 << a.len()) * b.len() as u64).max(1))?;
    let nb: Vec<u32> = b
        .iter()
        .map(|&y| a.iter().enumerate().fold(0u32, |m, (i, &x)| m | ((g.adj[x][y] as u32) << i)))
        .collect();
    let e0: usize = nb.iter().map(|m| m.count_ones() as usize).sum();
    let test = DeviationTest::new(e0, a.len(), b.len(), eps);
    let (smin_a, smin_b) = (min_size(eps, a.len()), min_size(eps, b.len()));
    let found = (1u32..1 << a.len()).into_par_iter().find_map_first(|mask| {
        let vlen = mask.count_ones() as usize;
        if vlen < smin_a {
            return None;
        }
        let mut degs: Vec<(usize, usize)> = nb
            .iter()
            .zip(b)
            .map(|(m, &y)| ((m & mask).count_ones() as usize, y))
            .collect();
        best_partner(&mut degs, vlen, smin_b, &test).map(|v2| {
            let v = (0..a.len()).filter(|i| mask >> i & 1 == 1).map(|i| a[i]).collect();
            (v, v2)
        })
    });
    Ok(found)
}

fn heuristic_search(g: &Graph, a: &[usize], b: &[usize], eps: &Rational, budget: &Budget) -> Result<Option<(Vec<usize>, Vec<usize>)>, RegularityError> {
    budget.charge((2 * a.len() * a.len() * b.len()) as u64)?;
    let e0 = g.edge_count_between(a, b);
    let test = DeviationTest::new(e0, a.len(), b.len(), eps);
    let (smin_a, smin_b) = (min_size(eps, a.len()), min_size(eps, b.len()));
    let mut by_degree: Vec<(usize, usize)> = a
        .iter()
        .map(|&x| (b.iter().filter(|&&y| g.adj[x][y]).count(), x))
        .collect();
    by_degree.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));
    let m = by_degree.len();
    for s in smin_a..=m {
        for v in [&by_degree[..s], &by_degree[m - s..]] {
            let v: Vec<usize> = v.iter().map(|d| d.1).collect();
            let mut degs: Vec<(usize, usize)> = b
                .iter()
                .map(|&y| (v.iter().filter(|&&x| g.adj[x][y]).count(), y))
                .collect();
            if let Some(v2) = best_partner(&mut degs, s, smin_b, &test) {
                return Ok(Some((v, v2)));
            }
        }
    }
    Ok(None)
}

/// Decides whether `U` and `U'` are ε-regular. Irregular verdicts always
/// carry a witness. Exact search enumerates subsets of the smaller side; for
/// each it optimizes `V'` over sorted degrees, which covers all `V'`.
pub fn is_epsilon_regular(
    g: &Graph,
    u: &[usize],
    u2: &[usize],
    eps: &Rational,
    mode: RegularityMode,
    budget: &Budget,
) -> Result<Verdict, RegularityError> {
    g.check_set(u)?;
    g.check_set(u2)?;
    check_eps(eps)?;
    let exact = match mode {
        RegularityMode::Exact => {
            let cap = DEFAULT_EXACT_CAP;
            if let Some(&size) = [u.len(), u2.len()].iter().find(|&&s| s > cap) {
                return Err(RegularityError::CapExceeded { size, cap });
            }
            true
        }
        RegularityMode::Heuristic => false,
        RegularityMode::Auto { cap } => u.len() <= cap.min(31) && u2.len() <= cap.min(31),
    };
    let swap = u2.len() < u.len();
    let (a, b) = if swap { (u2, u) } else { (u, u2) };
    let found = if exact {
        exact_search(g, a, b, eps, budget)?
    } else {
        heuristic_search(g, a, b, eps, budget)?
    };
    Ok(match found {
        Some((va, vb)) => {
            let (v, v2) = if swap { (vb, va) } else { (va, vb) };
            let witness_density = density(g, &v, &v2)?;
            Verdict::Irregular(Witness {
                v,
                v2,
                base_density: density(g, u, u2)?,
                witness_density,
            })
        }
        None if exact => Verdict::Regular,
        None => Verdict::RegularUncertified,
    })
}

/// `Σ_{i,j} (|U_i||U_j| / |V|²) d(U_i, U_j)²` over ordered pairs of parts.
pub fn energy(g: &Graph, parts: &[Vec<usize>]) -> Rational {
    let n2 = Rational::from(g.n * g.n);
    let mut total = Rational::zero();
    for a in parts {
        for b in parts {
            let e = g.edge_count_between(a, b);
            total += Rational::ratio(e * e, a.len() * b.len());
        }
    }
    total / n2
}

/// A vertex partition with its refinement history.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub parts: Vec<Vec<usize>>,
    pub log: Vec<RefinementStep>,
}

impl Partition {
    /// `k` contiguous blocks of near-equal size.
    pub fn blocks(n: usize, k: usize) -> Self {
        let mut parts = vec![Vec::new(); k];
        for v in 0..n {
            parts[v * k / n].push(v);
        }
        Partition { parts, log: Vec::new() }
    }

    pub fn singletons(n: usize) -> Self {
        Partition::blocks(n, n)
    }

    pub fn is_valid(&self, n: usize) -> bool {
        let mut seen = vec![false; n];
        for p in &self.parts {
            if p.is_empty() {
                return false;
            }
            for &v in p {
                if v >= n || seen[v] {
                    return false;
                }
                seen[v] = true;
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Refines each part by membership in every set of `cuts`.
    pub fn refine(&self, cuts: &[Vec<usize>]) -> Vec<Vec<usize>> {
        let cut_sets: Vec<HashSet<usize>> = cuts.iter().map(|c| c.iter().copied().collect()).collect();
        let mut out = Vec::new();
        for part in &self.parts {
            let mut cells: Vec<(Vec<bool>, Vec<usize>)> = Vec::new();
            for &v in part {
                let sig: Vec<bool> = cut_sets.iter().map(|c| c.contains(&v)).collect();
                match cells.iter_mut().find(|c| c.0 == sig) {
                    Some(c) => c.1.push(v),
                    None => cells.push((sig, vec![v])),
                }
            }
            out.extend(cells.into_iter().map(|c| c.1));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinementStep {
    pub parts_before: usize,
    pub parts_after: usize,
    /// Irregular mass (ordered vertex pairs) that triggered the step.
    pub irregular_mass: usize,
    pub witnesses: usize,
    pub energy_before: Rational,
    pub energy_after: Rational,
}

impl RefinementStep {
    pub fn increment(&self) -> Rational {
        &self.energy_after - &self.energy_before
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairReport {
    pub i: usize,
    pub j: usize,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionOutcome {
    /// Irregular mass is at most `ε|V|²`.
    BoundMet,
    /// Refining would exceed `K_max` parts.
    KmaxExhausted,
    /// Mass is over the bound but every offending pair is merely uncertified.
    NoWitness,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionReport {
    pub partition: Partition,
    pub eps: Rational,
    /// Verdicts for every pair `i <= j`; the relation is symmetric.
    pub pairs: Vec<PairReport>,
    /// `Σ |U_i||U_j|` over ordered pairs not certified regular.
    pub irregular_mass: usize,
    pub vertex_count: usize,
    pub energy: Rational,
    pub outcome: PartitionOutcome,
}

impl PartitionReport {
    pub fn total_mass(&self) -> usize {
        self.vertex_count * self.vertex_count
    }

    pub fn bound(&self) -> Rational {
        &self.eps * Rational::from(self.total_mass())
    }

    /// True when no pair relies on the heuristic.
    pub fn certified(&self) -> bool {
        self.pairs.iter().all(|p| !matches!(p.verdict, Verdict::RegularUncertified))
    }

    pub fn energy_log(&self) -> Vec<Rational> {
        let mut log: Vec<Rational> = self.partition.log.iter().map(|s| s.energy_before.clone()).collect();
        log.push(self.energy.clone());
        log
    }
}

fn classify_pairs(
    g: &Graph,
    parts: &[Vec<usize>],
    eps: &Rational,
    cap: usize,
    budget: &Budget,
) -> Result<(Vec<PairReport>, usize), RegularityError> {
    let idx: Vec<(usize, usize)> = (0..parts.len()).flat_map(|i| (i..parts.len()).map(move |j| (i, j))).collect();
    let pairs = idx
        .into_iter()
        .map(|(i, j)| {
            let verdict = is_epsilon_regular(g, &parts[i], &parts[j], eps, RegularityMode::Auto { cap }, budget)?;
            Ok(PairReport { i, j, verdict })
        })
        .collect::<Result<Vec<_>, RegularityError>>()?;
    let mass = pairs
        .iter()
        .filter(|p| !p.verdict.is_certified_regular())
        .map(|p| {
            let m = parts[p.i].len() * parts[p.j].len();
            if p.i == p.j {
                m
            } else {
                2 * m
            }
        })
        .sum();
    Ok((pairs, mass))
}

/// Energy-increment regularization. Starts from `k_min` blocks; while the
/// irregular mass exceeds `ε|V|²` it refines every part by all witness
/// sets lying in it.
pub fn regularity_partition(
    g: &Graph,
    eps: &Rational,
    k_min: usize,
    k_max: usize,
    cap: usize,
    budget: &Budget,
) -> Result<PartitionReport, RegularityError> {
    check_eps(eps)?;
    let n = g.n;
    if k_min == 0 || k_min > k_max || k_min > n {
        return Err(RegularityError::PartitionBounds { k_min, k_max, n });
    }
    let bound = eps * Rational::from(n * n);
    let mut partition = Partition::blocks(n, k_min);
    loop {
        let (pairs, mass) = classify_pairs(g, &partition.parts, eps, cap, budget)?;
        let current = energy(g, &partition.parts);
        let finish = |partition: Partition, pairs, outcome| PartitionReport {
            partition,
            eps: eps.clone(),
            pairs,
            irregular_mass: mass,
            vertex_count: n,
            energy: current.clone(),
            outcome,
        };
        if Rational::from(mass) <= bound {
            return Ok(finish(partition, pairs, PartitionOutcome::BoundMet));
        }
        let mut cuts = Vec::new();
        for p in &pairs {
            if let Some(w) = p.verdict.witness() {
                cuts.push(w.v.clone());
                cuts.push(w.v2.clone());
            }
        }
        if cuts.is_empty() {
            return Ok(finish(partition, pairs, PartitionOutcome::NoWitness));
        }
        let refined = partition.refine(&cuts);
        if refined.len() > k_max {
            return Ok(finish(partition, pairs, PartitionOutcome::KmaxExhausted));
        }
        let after = energy(g, &refined);
        partition.log.push(RefinementStep {
            parts_before: partition.parts.len(),
            parts_after: refined.len(),
            irregular_mass: mass,
            witnesses: cuts.len() / 2,
            energy_before: current.clone(),
            energy_after: after,
        });
        partition.parts = refined;
    }
}

/// A `k`-uniform hypergraph on `0..n`; edges are stored sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    n: usize,
    k: usize,
    edges: BTreeSet<Vec<usize>>,
}

impl Hypergraph {
    pub fn new(n: usize, k: usize) -> Result<Self, RegularityError> {
        if k == 0 {
            return Err(RegularityError::ZeroK);
        }
        Ok(Hypergraph {
            n,
            k,
            edges: BTreeSet::new(),
        })
    }

    pub fn from_edges(n: usize, k: usize, edges: &[Vec<usize>]) -> Result<Self, RegularityError> {
        let mut h = Hypergraph::new(n, k)?;
        for e in edges {
            h.add_edge(e)?;
        }
        Ok(h)
    }

    /// All `k`-subsets of `0..n`.
    pub fn complete(n: usize, k: usize) -> Result<Self, RegularityError> {
        let mut h = Hypergraph::new(n, k)?;
        let mut stack = vec![(Vec::new(), 0usize)];
        while let Some((e, next)) = stack.pop() {
            if e.len() == k {
                h.edges.insert(e);
                continue;
            }
            for v in next..n {
                let mut e2 = e.clone();
                e2.push(v);
                stack.push((e2, v + 1));
            }
        }
        Ok(h)
    }

    pub fn triangle() -> Self {
        Hypergraph::complete(3, 2).expect("k = 2")
    }

    pub fn from_graph(g: &Graph) -> Result<Self, RegularityError> {
        let edges: Vec<Vec<usize>> = g.edges().into_iter().map(|(u, v)| vec![u, v]).collect();
        Hypergraph::from_edges(g.n, 2, &edges)
    }

    fn normalize(&self, edge: &[usize]) -> Result<Vec<usize>, RegularityError> {
        if edge.len() != self.k {
            return Err(RegularityError::EdgeSize {
                expected: self.k,
                found: edge.len(),
            });
        }
        let mut e = edge.to_vec();
        e.sort_unstable();
        for w in e.windows(2) {
            if w[0] == w[1] {
                return Err(RegularityError::RepeatedVertex(w[0]));
            }
        }
        if let Some(&v) = e.iter().find(|&&v| v >= self.n) {
            return Err(RegularityError::OutOfRange { vertex: v, n: self.n });
        }
        Ok(e)
    }

    pub fn add_edge(&mut self, edge: &[usize]) -> Result<bool, RegularityError> {
        let e = self.normalize(edge)?;
        Ok(self.edges.insert(e))
    }

    pub fn remove_edge(&mut self, edge: &[usize]) -> bool {
        let mut e = edge.to_vec();
        e.sort_unstable();
        self.edges.remove(&e)
    }

    /// Membership of an arbitrary vertex list; lists with repeats are never edges.
    pub fn contains(&self, edge: &[usize]) -> bool {
        let mut e = edge.to_vec();
        e.sort_unstable();
        self.edges.contains(&e)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn uniformity(&self) -> usize {
        self.k
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.edges.iter()
    }
}

/// Pattern edges grouped by their largest vertex, so each can be checked
/// as soon as it is fully assigned.
fn edges_by_last(pattern: &Hypergraph) -> Vec<Vec<Vec<usize>>> {
    let mut out = vec![Vec::new(); pattern.n];
    for e in &pattern.edges {
        out[*e.last().unwrap()].push(e.clone());
    }
    out
}

struct CopySearch<'a> {
    host: &'a Hypergraph,
    checks: Vec<Vec<Vec<usize>>>,
    injective: bool,
    budget: &'a Budget,
}

impl CopySearch<'_> {
    fn fits(&self, image: &[usize], v: usize) -> bool {
        if self.injective && image[..v].contains(&image[v]) {
            return false;
        }
        let mut buf = Vec::with_capacity(self.host.k);
        self.checks[v].iter().all(|e| {
            buf.clear();
            buf.extend(e.iter().map(|&w| image[w]));
            self.host.contains(&buf)
        })
    }

    fn walk(&self, image: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) -> Result<(), BudgetExceeded> {
        let v = image.len();
        if v == self.checks.len() {
            visit(image);
            return Ok(());
        }
        self.budget.charge(self.host.n as u64)?;
        for c in 0..self.host.n {
            image.push(c);
            if self.fits(image, v) {
                self.walk(image, visit)?;
            }
            image.pop();
        }
        Ok(())
    }
}

fn copy_search<'a>(pattern: &Hypergraph, host: &'a Hypergraph, injective: bool, budget: &'a Budget) -> Result<CopySearch<'a>, RegularityError> {
    if pattern.k != host.k {
        return Err(RegularityError::Uniformity {
            pattern: pattern.k,
            host: host.k,
        });
    }
    budget.check_size(power_size(host.n, pattern.n))?;
    Ok(CopySearch {
        host,
        checks: edges_by_last(pattern),
        injective,
        budget,
    })
}

fn count_with(pattern: &Hypergraph, host: &Hypergraph, injective: bool, budget: &Budget) -> Result<u64, RegularityError> {
    let search = copy_search(pattern, host, injective, budget)?;
    if search.checks.is_empty() {
        return Ok(1);
    }
    let counts: Vec<u64> = (0..host.n)
        .into_par_iter()
        .map(|c| {
            let mut image = vec![c];
            if !search.fits(&image, 0) {
                return Ok(0);
            }
            let mut count = 0u64;
            search.walk(&mut image, &mut |_| count += 1)?;
            Ok(count)
        })
        .collect::<Result<_, BudgetExceeded>>()?;
    Ok(counts.into_iter().sum())
}

/// Labeled maps `W → V` sending every pattern edge to a host edge.
pub fn count_copies(pattern: &Hypergraph, host: &Hypergraph, budget: &Budget) -> Result<u64, RegularityError> {
    count_with(pattern, host, false, budget)
}

/// As [`count_copies`] but only injective maps.
pub fn count_copies_injective(pattern: &Hypergraph, host: &Hypergraph, budget: &Budget) -> Result<u64, RegularityError> {
    count_with(pattern, host, true, budget)
}

/// Every labeled copy, as the image of each pattern vertex.
pub fn enumerate_copies(pattern: &Hypergraph, host: &Hypergraph, budget: &Budget) -> Result<Vec<Vec<usize>>, RegularityError> {
    let search = copy_search(pattern, host, false, budget)?;
    let mut out = Vec::new();
    if search.checks.is_empty() {
        return Ok(vec![Vec::new()]);
    }
    for c in 0..host.n {
        let mut image = vec![c];
        if search.fits(&image, 0) {
            search.walk(&mut image, &mut |img| out.push(img.to_vec()))?;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RemovalMethod {
    BranchAndBound,
    Greedy,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RemovalReport {
    pub removed: Vec<Vec<usize>>,
    pub copies_before: u64,
    /// Copies that use distinct host edge sets.
    pub distinct_copies: usize,
    pub method: RemovalMethod,
    /// True when the removal is a proven minimum hitting set.
    pub optimal: bool,
    pub copies_after: u64,
    /// `ε|V|^k`.
    pub bound: Rational,
}

impl RemovalReport {
    pub fn within_bound(&self) -> bool {
        Rational::from(self.removed.len()) <= self.bound
    }
}

fn greedy_cover(sets: &[Vec<usize>], edge_count: usize) -> Vec<usize> {
    let mut hit = vec![false; sets.len()];
    let mut chosen = Vec::new();
    while hit.iter().any(|h| !h) {
        let mut freq = vec![0usize; edge_count];
        for (s, h) in sets.iter().zip(&hit) {
            if !h {
                for &e in s {
                    freq[e] += 1;
                }
            }
        }
        let best = (0..edge_count).max_by_key(|&e| (freq[e], std::cmp::Reverse(e))).unwrap();
        chosen.push(best);
        for (s, h) in sets.iter().zip(hit.iter_mut()) {
            if s.contains(&best) {
                *h = true;
            }
        }
    }
    chosen
}

struct BranchAndBound<'a> {
    sets: &'a [Vec<usize>],
    best: Vec<usize>,
    nodes: u64,
    exhausted: bool,
}

impl BranchAndBound<'_> {
    fn unhit<'b>(&'b self, chosen: &'b [usize]) -> impl Iterator<Item = &'b Vec<usize>> + 'b {
        self.sets.iter().filter(move |s| !s.iter().any(|e| chosen.contains(e)))
    }

    /// Size of a greedy packing of pairwise edge-disjoint unhit sets.
    fn lower_bound(&self, chosen: &[usize]) -> usize {
        let mut used: HashSet<usize> = HashSet::new();
        let mut count = 0;
        for s in self.unhit(chosen) {
            if s.iter().all(|e| !used.contains(e)) {
                used.extend(s.iter().copied());
                count += 1;
            }
        }
        count
    }

    fn search(&mut self, chosen: &mut Vec<usize>) {
        self.nodes += 1;
        if self.nodes > BRANCH_NODE_LIMIT {
            self.exhausted = true;
            return;
        }
        let Some(branch) = self.unhit(chosen).min_by_key(|s| s.len()).cloned() else {
            if chosen.len() < self.best.len() {
                self.best = chosen.clone();
            }
            return;
        };
        if chosen.len() + self.lower_bound(chosen) >= self.best.len() {
            return;
        }
        for e in branch {
            chosen.push(e);
            self.search(chosen);
            chosen.pop();
            if self.exhausted {
                return;
            }
        }
    }
}

/// Deletes a set of host edges meeting every copy of `pattern`: a minimum
/// hitting set by branch and bound when there are at most
/// [`EXACT_REMOVAL_LIMIT`] distinct copies, otherwise the greedy cover.
pub fn remove_copies(
    pattern: &Hypergraph,
    host: &Hypergraph,
    eps: &Rational,
    budget: &Budget,
) -> Result<(Hypergraph, RemovalReport), RegularityError> {
    let copies = enumerate_copies(pattern, host, budget)?;
    let edge_list: Vec<&Vec<usize>> = host.edges.iter().collect();
    let edge_index: HashMap<&Vec<usize>, usize> = edge_list.iter().enumerate().map(|(i, e)| (*e, i)).collect();
    let mut sets: BTreeSet<Vec<usize>> = BTreeSet::new();
    for image in &copies {
        let mut s: Vec<usize> = pattern
            .edges
            .iter()
            .map(|e| {
                let mut img: Vec<usize> = e.iter().map(|&w| image[w]).collect();
                img.sort_unstable();
                edge_index[&img]
            })
            .collect();
        s.sort_unstable();
        s.dedup();
        sets.insert(s);
    }
    let sets: Vec<Vec<usize>> = sets.into_iter().collect();
    let greedy = greedy_cover(&sets, edge_list.len());
    let (chosen, method, optimal) = if sets.len() <= EXACT_REMOVAL_LIMIT {
        let mut bb = BranchAndBound {
            sets: &sets,
            best: greedy,
            nodes: 0,
            exhausted: false,
        };
        bb.search(&mut Vec::new());
        let optimal = !bb.exhausted;
        (bb.best, RemovalMethod::BranchAndBound, optimal)
    } else {
        (greedy, RemovalMethod::Greedy, false)
    };
    let mut removed: Vec<Vec<usize>> = chosen.iter().map(|&i| edge_list[i].clone()).collect();
    removed.sort();
    let mut after = host.clone();
    for e in &removed {
        after.remove_edge(e);
    }
    let copies_after = count_copies(pattern, &after, budget)?;
    let bound = eps * Rational::from(host.n).pow(host.k as u32);
    let report = RemovalReport {
        removed,
        copies_before: copies.len() as u64,
        distinct_copies: sets.len(),
        method,
        optimal,
        copies_after,
        bound,
    };
    Ok((after, report))
}

/// The `(k+1)`-partite `k`-uniform hypergraph encoding `(k+1)`-term
/// progressions in `A ⊆ [1, n]`. Parts `X_1..X_k` are copies of `[1, n]`
/// and `X_{k+1}` a copy of `[1, k²n]`.
#[derive(Debug, Clone)]
pub struct ApEncoding {
    pub n: usize,
    pub k: usize,
    pub set: BTreeSet<usize>,
    pub hypergraph: Hypergraph,
    offsets: Vec<usize>,
}

fn check_subset(a: &[usize], n: usize) -> Result<BTreeSet<usize>, RegularityError> {
    match a.iter().find(|&&x| x == 0 || x > n) {
        Some(&x) => Err(RegularityError::SetOutOfRange { element: x, n }),
        None => Ok(a.iter().copied().collect()),
    }
}

/// Value of the face omitting part `omit` (1-based; `k+1` is the last part).
/// `xs` holds all `k+1` coordinates; the omitted one is ignored.
fn face_value(xs: &[i64], omit: usize) -> i64 {
    let k = xs.len() - 1;
    if omit == k + 1 {
        return (1..=k).map(|i| i as i64 * xs[i - 1]).sum();
    }
    let others = (1..=k).filter(|&j| j != omit);
    let weighted: i64 = others.clone().map(|j| j as i64 * xs[j - 1]).sum();
    let plain: i64 = others.map(|j| xs[j - 1]).sum();
    weighted + omit as i64 * (xs[k] - plain)
}

impl ApEncoding {
    pub fn part_size(&self, part: usize) -> usize {
        if part == self.k + 1 {
            self.k * self.k * self.n
        } else {
            self.n
        }
    }

    /// Vertex id of value `x` (1-based) in part `part` (1-based).
    pub fn vertex(&self, part: usize, x: usize) -> usize {
        self.offsets[part - 1] + x - 1
    }

    /// Counts choices `x_i ∈ X_i` spanning a complete `k`-uniform pattern,
    /// split by whether `x_{k+1} = Σ x_i`. Returns `(d ≠ 0, d = 0)` counts.
    pub fn count_pattern_copies(&self, budget: &Budget) -> Result<(u64, u64), RegularityError> {
        let k = self.k;
        let firsts = power_size(self.n, k);
        budget.check_size(firsts.saturating_mul(self.part_size(k + 1) as u128))?;
        let results: Vec<(u64, u64)> = (0..firsts as usize)
            .into_par_iter()
            .map(|idx| {
                let mut xs: Vec<usize> = crate::structures::decode_tuple(self.n, k, idx).into_iter().map(|x| x + 1).collect();
                let base: Vec<usize> = (1..=k).map(|p| self.vertex(p, xs[p - 1])).collect();
                if !self.hypergraph.contains(&base) {
                    return (0, 0);
                }
                let sum: usize = xs.iter().sum();
                xs.push(0);
                let (mut good, mut degenerate) = (0, 0);
                for last in 1..=self.part_size(k + 1) {
                    xs[k] = last;
                    let all_faces = (1..=k).all(|omit| {
                        let face: Vec<usize> = (1..=k + 1).filter(|&p| p != omit).map(|p| self.vertex(p, xs[p - 1])).collect();
                        self.hypergraph.contains(&face)
                    });
                    if all_faces {
                        if last == sum {
                            degenerate += 1;
                        } else {
                            good += 1;
                        }
                    }
                }
                (good, degenerate)
            })
            .collect();
        budget.charge((firsts as u64).saturating_mul(self.part_size(k + 1) as u64))?;
        Ok(results.into_iter().fold((0, 0), |acc, r| (acc.0 + r.0, acc.1 + r.1)))
    }
}

/// Builds the encoding by evaluating every face condition.
pub fn ap_encode(a: &[usize], n: usize, k: usize, budget: &Budget) -> Result<ApEncoding, RegularityError> {
    if k == 0 {
        return Err(RegularityError::ZeroK);
    }
    let set = check_subset(a, n)?;
    let sizes: Vec<usize> = (1..=k + 1).map(|p| if p == k + 1 { k * k * n } else { n }).collect();
    let mut offsets = vec![0];
    for s in &sizes {
        offsets.push(offsets.last().unwrap() + s);
    }
    let total = *offsets.last().unwrap();
    offsets.pop();
    let mut enc = ApEncoding {
        n,
        k,
        set,
        hypergraph: Hypergraph::new(total, k)?,
        offsets,
    };
    for omit in (1..=k + 1).rev() {
        let parts: Vec<usize> = (1..=k + 1).filter(|&p| p != omit).collect();
        let dims: Vec<usize> = parts.iter().map(|&p| sizes[p - 1]).collect();
        let count: usize = dims.iter().product();
        budget.charge(count as u64)?;
        for mut idx in 0..count {
            let mut xs = vec![0i64; k + 1];
            for (slot, &p) in parts.iter().enumerate().rev() {
                xs[p - 1] = (idx % dims[slot]) as i64 + 1;
                idx /= dims[slot];
            }
            let value = face_value(&xs, omit);
            if value >= 1 && enc.set.contains(&(value as usize)) {
                let edge: Vec<usize> = parts.iter().map(|&p| enc.vertex(p, xs[p - 1] as usize)).collect();
                enc.hypergraph.add_edge(&edge)?;
            }
        }
    }
    Ok(enc)
}

/// Progressions `(a, a+d, ..., a+kd) ⊆ A` with `d ≠ 0`.
pub fn progressions(a: &BTreeSet<usize>, k: usize) -> Vec<(usize, i64)> {
    let Some(&max) = a.iter().next_back() else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for &start in a {
        for d in -(max as i64)..=(max as i64) {
            if d == 0 {
                continue;
            }
            let all = (1..=k as i64).all(|i| {
                let t = start as i64 + i * d;
                t >= 1 && a.contains(&(t as usize))
            });
            if all {
                out.push((start, d));
            }
        }
    }
    out
}

/// Direct count of progressions weighted by the encoding's multiplicity:
/// the number of `x ∈ [1, n]^k` with `Σ i·x_i = a` and
/// `1 <= d + Σ x_i <= k²n`.
pub fn direct_ap_count(a: &[usize], n: usize, k: usize) -> Result<u64, RegularityError> {
    if k == 0 {
        return Err(RegularityError::ZeroK);
    }
    let set = check_subset(a, n)?;
    let aps = progressions(&set, k);
    // representations of each weighted sum, keyed by (Σ i x_i, Σ x_i)
    let mut reps: HashMap<(i64, i64), u64> = HashMap::new();
    for idx in 0..n.pow(k as u32) {
        let xs = crate::structures::decode_tuple(n, k, idx);
        let w: i64 = xs.iter().enumerate().map(|(i, &x)| (i as i64 + 1) * (x as i64 + 1)).sum();
        let s: i64 = xs.iter().map(|&x| x as i64 + 1).sum();
        *reps.entry((w, s)).or_default() += 1;
    }
    let top = (k * k * n) as i64;
    Ok(aps
        .iter()
        .map(|&(start, d)| {
            reps.iter()
                .filter(|(&(w, s), _)| w == start as i64 && (1..=top).contains(&(d + s)))
                .map(|(_, &c)| c)
                .sum::<u64>()
        })
        .sum())
}

/// Parses `graph <n> [loops]` followed by one `u v` edge per line.
pub fn parse_graph(text: &str) -> Result<Graph, ParseError> {
    let lines = line_tokens(text);
    let mut rows = lines.iter().filter(|l| !l.is_empty());
    let header = rows
        .next()
        .ok_or_else(|| ParseError::syntax("expected `graph <n>`", SourceSpan::new(0, text.len())))?;
    if header[0].1 != "graph" || header.len() < 2 || header.len() > 3 {
        return Err(ParseError::syntax("expected `graph <n> [loops]`", tok_span(header[0])));
    }
    let n = parse_usize_tok(header[1], "a vertex count")?;
    let mut g = match header.get(2) {
        None => Graph::new(n),
        Some(&(_, "loops")) => Graph::with_loops(n),
        Some(&t) => return Err(ParseError::syntax(format!("unexpected `{}`", t.1), tok_span(t))),
    };
    for line in rows {
        if line.len() != 2 {
            return Err(ParseError::syntax("an edge line has exactly two vertices", tok_span(line[0])));
        }
        let u = parse_usize_tok(line[0], "a vertex")?;
        let v = parse_usize_tok(line[1], "a vertex")?;
        let span = SourceSpan::new(line[0].0, line[1].0 + line[1].1.len());
        g.add_edge(u, v).map_err(|e| ParseError::syntax(e.to_string(), span))?;
    }
    Ok(g)
}

pub fn print_graph(g: &Graph) -> String {
    let mut out = format!("graph {}{}\n", g.n, if g.loops { " loops" } else { "" });
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

/// Parses `hypergraph <n> <k>` followed by one edge of `k` vertices per line.
pub fn parse_hypergraph(text: &str) -> Result<Hypergraph, ParseError> {
    let lines = line_tokens(text);
    let mut rows = lines.iter().filter(|l| !l.is_empty());
    let header = rows
        .next()
        .ok_or_else(|| ParseError::syntax("expected `hypergraph <n> <k>`", SourceSpan::new(0, text.len())))?;
    if header[0].1 != "hypergraph" || header.len() != 3 {
        return Err(ParseError::syntax("expected `hypergraph <n> <k>`", tok_span(header[0])));
    }
    let n = parse_usize_tok(header[1], "a vertex count")?;
    let k = parse_usize_tok(header[2], "a uniformity")?;
    let mut h = Hypergraph::new(n, k).map_err(|e| ParseError::syntax(e.to_string(), tok_span(header[2])))?;
    for line in rows {
        let edge = line
            .iter()
            .map(|&t| parse_usize_tok(t, "a vertex"))
            .collect::<Result<Vec<_>, _>>()?;
        let last = line.last().unwrap();
        let span = SourceSpan::new(line[0].0, last.0 + last.1.len());
        h.add_edge(&edge).map_err(|e| ParseError::syntax(e.to_string(), span))?;
    }
    Ok(h)
}

pub fn print_hypergraph(h: &Hypergraph) -> String {
    let mut out = format!("hypergraph {} {}\n", h.n, h.k);
    for e in &h.edges {
        let cells: Vec<String> = e.iter().map(|v| v.to_string()).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gowers::{cond_expect, FiniteAlgebra, GridFunction};
    use crate::structures::{DefinableSet, MeasureSpace};

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn c4() -> Graph {
        Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap()
    }

    fn half_graph() -> (Graph, Vec<usize>, Vec<usize>) {
        let g = Graph::from_fn(12, |a, b| a < 6 && b >= 6 && a <= b - 6);
        (g, (0..6).collect(), (6..12).collect())
    }

    #[test]
    fn densities() {
        let g = c4();
        assert_eq!(density(&g, &[0, 1], &[2, 3]).unwrap(), q("1/2"));
        let kb = Graph::from_fn(6, |a, b| a < 3 && b >= 3);
        assert_eq!(density(&kb, &[0, 1, 2], &[3, 4, 5]).unwrap(), Rational::one());
        assert_eq!(density(&Graph::new(4), &[0, 1], &[2, 3]).unwrap(), Rational::zero());
        assert!(matches!(density(&g, &[], &[1]), Err(RegularityError::EmptyPart)));
    }

    #[test]
    fn regularity_verdicts() {
        let b = Budget::default();
        let kb = Graph::from_fn(8, |a, c| a < 4 && c >= 4);
        for eps in ["1/10", "1/3", "9/10"] {
            let v = is_epsilon_regular(&kb, &[0, 1, 2, 3], &[4, 5, 6, 7], &q(eps), RegularityMode::Exact, &b).unwrap();
            assert_eq!(v, Verdict::Regular);
            let v = is_epsilon_regular(&Graph::new(8), &[0, 1, 2, 3], &[4, 5, 6, 7], &q(eps), RegularityMode::Exact, &b).unwrap();
            assert_eq!(v, Verdict::Regular);
        }
        let (g, u, u2) = half_graph();
        let eps = q("1/4");
        let v = is_epsilon_regular(&g, &u, &u2, &eps, RegularityMode::Exact, &b).unwrap();
        let w = v.witness().expect("half graph is irregular");
        assert!(w.validate(&g, &u, &u2, &eps));
        let h = is_epsilon_regular(&g, &u, &u2, &eps, RegularityMode::Heuristic, &b).unwrap();
        assert!(h.witness().unwrap().validate(&g, &u, &u2, &eps));
        let big: Vec<usize> = (0..16).collect();
        assert!(matches!(
            is_epsilon_regular(&Graph::new(16), &big, &big, &eps, RegularityMode::Exact, &b),
            Err(RegularityError::CapExceeded { .. })
        ));
    }

    #[test]
    fn partitions() {
        let b = Budget::default();
        let eps = q("1/3");
        let report = regularity_partition(&Graph::complete(10), &eps, 1, 64, DEFAULT_EXACT_CAP, &b).unwrap();
        assert_eq!(report.partition.parts.len(), 1);
        assert_eq!(report.irregular_mass, 0);
        let (g, _, _) = half_graph();
        let report = regularity_partition(&g, &q("1/4"), 2, 64, DEFAULT_EXACT_CAP, &b).unwrap();
        assert_eq!(report.outcome, PartitionOutcome::BoundMet);
        assert!(report.partition.is_valid(12));
        assert!(Rational::from(report.irregular_mass) <= report.bound());
        for step in &report.partition.log {
            assert!(step.increment() >= q("1/4").pow(5) / Rational::from_integer(16));
        }
        let singles = Partition::singletons(12);
        let (pairs, mass) = classify_pairs(&g, &singles.parts, &eps, DEFAULT_EXACT_CAP, &b).unwrap();
        assert!(pairs.iter().all(|p| p.verdict == Verdict::Regular));
        assert_eq!(mass, 0);
    }

    #[test]
    fn energy_is_squared_conditional_expectation() {
        let g = c4();
        let parts = vec![vec![0, 1], vec![2, 3]];
        let space = MeasureSpace::counting(4).unwrap();
        let edges = DefinableSet::from_fn(&space, 2, |t| g.adjacent(t[0], t[1]));
        let chi = GridFunction::indicator(&edges);
        let gens: Vec<_> = parts
            .iter()
            .flat_map(|p| {
                let row = DefinableSet::from_fn(&space, 2, |t| p.contains(&t[0]));
                let col = DefinableSet::from_fn(&space, 2, |t| p.contains(&t[1]));
                [(row, Some([0].into_iter().collect())), (col, Some([1].into_iter().collect()))]
            })
            .collect();
        let alg = FiniteAlgebra::generated(&space, 2, &gens).unwrap();
        let e = cond_expect(&chi, &alg).unwrap();
        assert_eq!(e.inner(&e).unwrap(), energy(&g, &parts));
    }

    #[test]
    fn copy_counts() {
        let b = Budget::default();
        let tri = Hypergraph::triangle();
        let k3 = Hypergraph::complete(3, 2).unwrap();
        assert_eq!(count_copies(&tri, &k3, &b).unwrap(), 6);
        assert_eq!(count_copies(&tri, &Hypergraph::new(5, 2).unwrap(), &b).unwrap(), 0);
        let edge = Hypergraph::complete(2, 2).unwrap();
        let c4h = Hypergraph::from_graph(&c4()).unwrap();
        assert_eq!(count_copies(&edge, &c4h, &b).unwrap(), 8);
        // an isolated pattern vertex maps anywhere
        let mut lone = Hypergraph::new(3, 2).unwrap();
        lone.add_edge(&[0, 1]).unwrap();
        assert_eq!(count_copies(&lone, &c4h, &b).unwrap(), 32);
        assert_eq!(count_copies_injective(&lone, &c4h, &b).unwrap(), 16);
    }

    #[test]
    fn removals() {
        let b = Budget::default();
        let eps = q("1/10");
        let tri = Hypergraph::triangle();
        let (_, r) = remove_copies(&tri, &Hypergraph::complete(3, 2).unwrap(), &eps, &b).unwrap();
        assert_eq!((r.removed.len(), r.copies_after, r.optimal), (1, 0, true));
        let two = Hypergraph::from_edges(6, 2, &[vec![0, 1], vec![1, 2], vec![0, 2], vec![3, 4], vec![4, 5], vec![3, 5]]).unwrap();
        let (after, r) = remove_copies(&tri, &two, &eps, &b).unwrap();
        assert_eq!(r.removed.len(), 2);
        assert_eq!(count_copies(&tri, &after, &b).unwrap(), 0);
        let (_, r) = remove_copies(&tri, &Hypergraph::new(4, 2).unwrap(), &eps, &b).unwrap();
        assert!(r.removed.is_empty());
        // K_5 needs 4 deletions to become triangle-free
        let (_, r) = remove_copies(&tri, &Hypergraph::complete(5, 2).unwrap(), &eps, &b).unwrap();
        assert_eq!(r.removed.len(), 4);
    }

    #[test]
    fn ap_encoding_examples() {
        let b = Budget::default();
        let enc = ap_encode(&[], 3, 2, &b).unwrap();
        assert_eq!(enc.hypergraph.edge_count(), 0);
        assert_eq!(enc.count_pattern_copies(&b).unwrap().0, 0);
        assert_eq!(direct_ap_count(&[], 3, 2).unwrap(), 0);
        let enc = ap_encode(&[1, 2, 3], 3, 2, &b).unwrap();
        let (good, _) = enc.count_pattern_copies(&b).unwrap();
        assert!(good > 0);
        assert_eq!(good, direct_ap_count(&[1, 2, 3], 3, 2).unwrap());
        let enc = ap_encode(&[1, 2], 3, 2, &b).unwrap();
        assert_eq!(enc.count_pattern_copies(&b).unwrap().0, 0);
        assert_eq!(direct_ap_count(&[1, 2], 3, 2).unwrap(), 0);
        assert!(ap_encode(&[4], 3, 2, &b).is_err());
    }

    #[test]
    fn files_round_trip() {
        let g = parse_graph("graph 4  # a cycle\n0 1\n1 2\n2 3\n3 0\n").unwrap();
        assert_eq!(g, c4());
        assert_eq!(parse_graph(&print_graph(&g)).unwrap(), g);
        let err = parse_graph("graph 3\n0 3\n").unwrap_err();
        assert_eq!(err.span, SourceSpan::new(8, 11));
        let h = parse_hypergraph("hypergraph 4 3\n0 1 2\n1 2 3\n").unwrap();
        assert_eq!(parse_hypergraph(&print_hypergraph(&h)).unwrap(), h);
        assert!(parse_hypergraph("hypergraph 4 3\n0 1\n").is_err());
    }
}
