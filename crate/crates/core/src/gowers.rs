//! Gowers uniformity norms, dual functions and conditional expectations.
//!
//! All norms are returned as exact `2^k`-th powers; [`root_display`] renders
//! the root as a decimal for display only.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::budget::{power_size, Budget, BudgetExceeded};
use crate::parser::{line_tokens, parse_rational_tok, parse_usize_tok, tok_span, ParseError, SourceSpan};
use crate::rational::Rational;
use crate::structures::{decode_tuple, encode_tuple, DefinableSet, MeasureSpace, StructureError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GowersError {
    #[error("group table is not an abelian group: {0}")]
    NotAGroup(String),
    #[error("function has arity {found}, expected {expected}")]
    Arity { expected: usize, found: usize },
    #[error("function lives on a universe of size {found}, expected {expected}")]
    Size { expected: usize, found: usize },
    #[error("expected {expected} table entries, found {found}")]
    TableLength { expected: usize, found: usize },
    #[error("value {value} exceeds the declared bound {bound}")]
    Unbounded { value: Rational, bound: Rational },
    #[error("k must be at least 1")]
    ZeroK,
    #[error("set for coordinates {0:?} depends on other coordinates")]
    NotCylindrical(Vec<usize>),
    #[error("expected exactly one set per (k-1)-subset of coordinates")]
    MissingCylinder,
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}

/// A finite abelian group given by its addition table on `0..n`.
#[derive(Debug, Clone)]
pub struct AbelianGroup {
    n: usize,
    add: Vec<usize>,
    zero: usize,
    neg: Vec<usize>,
}

impl AbelianGroup {
    /// `Z_n` with `a + b = (a + b) mod n`.
    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1, "empty group");
        let add = (0..n * n).map(|i| (i / n + i % n) % n).collect();
        let neg = (0..n).map(|a| (n - a) % n).collect();
        AbelianGroup { n, add, zero: 0, neg }
    }

    /// `Z_{n_1} × ... × Z_{n_r}`, elements encoded in mixed radix with the
    /// first factor most significant.
    pub fn product(orders: &[usize]) -> Self {
        assert!(orders.iter().all(|&o| o >= 1), "empty factor");
        let n: usize = orders.iter().product();
        let digits = |mut a: usize| {
            let mut d = vec![0; orders.len()];
            for i in (0..orders.len()).rev() {
                d[i] = a % orders[i];
                a /= orders[i];
            }
            d
        };
        let undigits = |d: &[usize]| d.iter().zip(orders).fold(0, |acc, (&x, &o)| acc * o + x);
        let mut add = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                let (da, db) = (digits(a), digits(b));
                let s: Vec<usize> = (0..orders.len()).map(|i| (da[i] + db[i]) % orders[i]).collect();
                add[a * n + b] = undigits(&s);
            }
        }
        AbelianGroup::from_table(n, add, 0).expect("products of cyclic groups are abelian")
    }

    /// Validates closure, identity, inverses, commutativity and associativity.
    pub fn from_table(n: usize, add: Vec<usize>, zero: usize) -> Result<Self, GowersError> {
        let bad = |m: String| Err(GowersError::NotAGroup(m));
        if n == 0 {
            return bad("empty group".into());
        }
        if add.len() != n * n {
            return Err(GowersError::TableLength {
                expected: n * n,
                found: add.len(),
            });
        }
        if zero >= n {
            return bad(format!("zero element {zero} out of range"));
        }
        if let Some(&e) = add.iter().find(|&&e| e >= n) {
            return bad(format!("entry {e} out of range"));
        }
        let op = |a: usize, b: usize| add[a * n + b];
        let mut neg = vec![usize::MAX; n];
        for a in 0..n {
            if op(zero, a) != a {
                return bad(format!("{zero} is not an identity for {a}"));
            }
            for b in 0..n {
                if op(a, b) != op(b, a) {
                    return bad(format!("{a} + {b} != {b} + {a}"));
                }
                if op(a, b) == zero {
                    neg[a] = b;
                }
                for c in 0..n {
                    if op(op(a, b), c) != op(a, op(b, c)) {
                        return bad(format!("associativity fails at ({a}, {b}, {c})"));
                    }
                }
            }
            if neg[a] == usize::MAX {
                return bad(format!("{a} has no inverse"));
            }
        }
        Ok(AbelianGroup { n, add, zero, neg })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        self.add[a * self.n + b]
    }

    pub fn neg(&self, a: usize) -> usize {
        self.neg[a]
    }
}

/// A rational-valued table on `M^k` together with the unary weights of `M`.
#[derive(Clone, PartialEq, Eq)]
pub struct GridFunction {
    arity: usize,
    n: usize,
    values: Vec<Rational>,
    weights: Arc<Vec<Rational>>,
}

impl fmt::Debug for GridFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GridFunction(n={}, k={}, {:?})", self.n, self.arity, self.values)
    }
}

impl GridFunction {
    /// A table under normalized counting weights.
    pub fn new(n: usize, arity: usize, values: Vec<Rational>) -> Result<Self, GowersError> {
        let w = vec![Rational::ratio(1, n); n];
        Self::with_weights(arity, values, w)
    }

    pub fn with_weights(arity: usize, values: Vec<Rational>, weights: Vec<Rational>) -> Result<Self, GowersError> {
        let n = weights.len();
        if n == 0 {
            return Err(StructureError::EmptyUniverse.into());
        }
        if arity == 0 {
            return Err(GowersError::ZeroK);
        }
        let expected = n.pow(arity as u32);
        if values.len() != expected {
            return Err(GowersError::TableLength {
                expected,
                found: values.len(),
            });
        }
        if let Some(w) = weights.iter().find(|w| w.is_negative()) {
            return Err(StructureError::NegativeWeight(w.clone()).into());
        }
        Ok(GridFunction {
            arity,
            n,
            values,
            weights: Arc::new(weights),
        })
    }

    /// Tabulates `f` under normalized counting weights.
    pub fn from_fn(n: usize, arity: usize, f: impl Fn(&[usize]) -> Rational) -> Self {
        let values = (0..n.pow(arity as u32)).map(|i| f(&decode_tuple(n, arity, i))).collect();
        GridFunction::new(n, arity, values).expect("table matches its shape")
    }

    /// The indicator of a definable set, over that set's measure space.
    pub fn indicator(set: &DefinableSet) -> Self {
        let values = (0..set.space().tuple_count(set.arity()))
            .map(|i| if set.contains_index(i) { Rational::one() } else { Rational::zero() })
            .collect();
        GridFunction::with_weights(set.arity(), values, set.space().weights().to_vec()).expect("shape from the set")
    }

    pub fn constant(n: usize, arity: usize, c: Rational) -> Self {
        GridFunction::new(n, arity, vec![c; n.pow(arity as u32)]).expect("shape")
    }

    /// `f(h_1, ..., h_k) = g(h_1 + ... + h_k)`.
    pub fn sum_composition(group: &AbelianGroup, g: &GridFunction, k: usize) -> Result<Self, GowersError> {
        check_unary(group, g)?;
        let n = group.order();
        let values = (0..n.pow(k as u32))
            .map(|i| {
                let s = decode_tuple(n, k, i).into_iter().fold(group.zero(), |acc, h| group.add(acc, h));
                g.values[s].clone()
            })
            .collect();
        GridFunction::with_weights(k, values, g.weights.to_vec())
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn value(&self, tuple: &[usize]) -> &Rational {
        &self.values[encode_tuple(self.n, tuple)]
    }

    /// Largest absolute value.
    pub fn bound(&self) -> Rational {
        self.values.iter().map(Rational::abs).max().unwrap_or_default()
    }

    pub fn check_bound(&self, bound: &Rational) -> Result<(), GowersError> {
        match self.values.iter().find(|v| &v.abs() > bound) {
            Some(v) => Err(GowersError::Unbounded {
                value: v.clone(),
                bound: bound.clone(),
            }),
            None => Ok(()),
        }
    }

    fn tuple_weight(&self, idx: usize) -> Rational {
        let mut w = Rational::one();
        let mut i = idx;
        for _ in 0..self.arity {
            w *= &self.weights[i % self.n];
            i /= self.n;
        }
        w
    }

    /// `Σ f(ā) w(ā)`.
    pub fn integral(&self) -> Rational {
        (0..self.values.len())
            .filter(|&i| !self.values[i].is_zero())
            .map(|i| &self.values[i] * self.tuple_weight(i))
            .sum()
    }

    /// Pointwise product; both sides must share shape and weights.
    pub fn mul(&self, other: &GridFunction) -> Result<GridFunction, GowersError> {
        self.same_shape(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Ok(GridFunction {
            values,
            ..self.clone()
        })
    }

    /// `Σ f g w`.
    pub fn inner(&self, other: &GridFunction) -> Result<Rational, GowersError> {
        Ok(self.mul(other)?.integral())
    }

    fn same_shape(&self, other: &GridFunction) -> Result<(), GowersError> {
        if self.arity != other.arity {
            return Err(GowersError::Arity {
                expected: self.arity,
                found: other.arity,
            });
        }
        if self.weights != other.weights {
            return Err(GowersError::Size {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }
}

fn check_unary(group: &AbelianGroup, g: &GridFunction) -> Result<(), GowersError> {
    if g.arity != 1 {
        return Err(GowersError::Arity {
            expected: 1,
            found: g.arity,
        });
    }
    if g.n != group.order() {
        return Err(GowersError::Size {
            expected: group.order(),
            found: g.n,
        });
    }
    Ok(())
}

fn charge(budget: &Budget, units: u128) -> Result<(), BudgetExceeded> {
    budget.check_size(units)?;
    budget.charge(units as u64)
}

/// `‖g‖_{U^k}^{2^k} = |G|^{-(k+1)} Σ_x Σ_h̄ Π_ω g(x + ω·h̄)`.
pub fn gowers_norm_pow(
    group: &AbelianGroup,
    g: &GridFunction,
    k: usize,
    budget: &Budget,
) -> Result<Rational, GowersError> {
    check_unary(group, g)?;
    if k == 0 {
        return Err(GowersError::ZeroK);
    }
    let n = group.order();
    charge(budget, power_size(n, k + 1).saturating_mul(1 << k))?;
    let total: Rational = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut acc = Rational::zero();
            let mut point = vec![0usize; 1 << k];
            for hidx in 0..n.pow(k as u32) {
                let h = decode_tuple(n, k, hidx);
                point[0] = x;
                let mut prod = g.values[x].clone();
                for w in 1usize..(1 << k) {
                    let top = usize::BITS - 1 - w.leading_zeros();
                    let rest = w & !(1 << top);
                    point[w] = group.add(point[rest], h[top as usize]);
                    if prod.is_zero() {
                        continue;
                    }
                    prod *= &g.values[point[w]];
                }
                acc += prod;
            }
            acc
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    Ok(total / Rational::from(n).pow(k as u32 + 1))
}

/// The same quantity via `x = Σ h⁰_i`, `h_i = h¹_i − h⁰_i`:
/// `|G|^{-2k} Σ_{h⁰, h¹} Π_ω g(Σ_i h_i^{ω(i)})`.
pub fn gowers_norm_pow_subst(
    group: &AbelianGroup,
    g: &GridFunction,
    k: usize,
    budget: &Budget,
) -> Result<Rational, GowersError> {
    check_unary(group, g)?;
    if k == 0 {
        return Err(GowersError::ZeroK);
    }
    let n = group.order();
    charge(budget, power_size(n, 2 * k).saturating_mul(1 << k))?;
    let total: Rational = (0..n.pow(k as u32))
        .into_par_iter()
        .map(|i0| {
            let h0 = decode_tuple(n, k, i0);
            let mut acc = Rational::zero();
            for i1 in 0..n.pow(k as u32) {
                let h1 = decode_tuple(n, k, i1);
                let mut prod = Rational::one();
                for w in 0usize..(1 << k) {
                    let s = (0..k).fold(group.zero(), |acc, i| {
                        group.add(acc, if w >> i & 1 == 1 { h1[i] } else { h0[i] })
                    });
                    prod *= &g.values[s];
                    if prod.is_zero() {
                        break;
                    }
                }
                acc += prod;
            }
            acc
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    Ok(total / Rational::from(n).pow(2 * k as u32))
}

/// Index of the tuple `(h^{ω(1)}_1, ..., h^{ω(k)}_k)`.
fn mixed_index(n: usize, h0: &[usize], h1: &[usize], w: usize) -> usize {
    let k = h0.len();
    (0..k).fold(0, |acc, i| acc * n + if w >> i & 1 == 1 { h1[i] } else { h0[i] })
}

/// `‖f‖_{U^k_∞}^{2^k} = Σ_{h⁰, h¹ ∈ M^k} Π_ω f(h^ω) · w(h⁰) w(h¹)`.
pub fn gowers_box_pow(f: &GridFunction, budget: &Budget) -> Result<Rational, GowersError> {
    let (n, k) = (f.n, f.arity);
    charge(budget, power_size(n, 2 * k).saturating_mul(1 << k))?;
    let count = n.pow(k as u32);
    let total: Rational = (0..count)
        .into_par_iter()
        .map(|i0| {
            let w0 = f.tuple_weight(i0);
            if w0.is_zero() {
                return Rational::zero();
            }
            let h0 = decode_tuple(n, k, i0);
            let mut acc = Rational::zero();
            for i1 in 0..count {
                let h1 = decode_tuple(n, k, i1);
                let mut prod = f.tuple_weight(i1);
                for w in 0usize..(1 << k) {
                    if prod.is_zero() {
                        break;
                    }
                    prod *= &f.values[mixed_index(n, &h0, &h1, w)];
                }
                acc += prod;
            }
            acc * w0
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    Ok(total)
}

/// `D(f)(h⁰) = Σ_{h¹} Π_{ω ≠ 0} f(h^ω) w(h¹)`.
pub fn dual_function(f: &GridFunction, budget: &Budget) -> Result<GridFunction, GowersError> {
    let (n, k) = (f.n, f.arity);
    charge(budget, power_size(n, 2 * k).saturating_mul(1 << k))?;
    let count = n.pow(k as u32);
    let values: Vec<Rational> = (0..count)
        .into_par_iter()
        .map(|i0| {
            let h0 = decode_tuple(n, k, i0);
            let mut acc = Rational::zero();
            for i1 in 0..count {
                let h1 = decode_tuple(n, k, i1);
                let mut prod = f.tuple_weight(i1);
                for w in 1usize..(1 << k) {
                    if prod.is_zero() {
                        break;
                    }
                    prod *= &f.values[mixed_index(n, &h0, &h1, w)];
                }
                acc += prod;
            }
            acc
        })
        .collect();
    Ok(GridFunction {
        values,
        ..f.clone()
    })
}

/// Decimal rendering of `pow^{1/2^k}` with 20 digits, for display only.
pub fn root_display(pow: &Rational, k: usize) -> String {
    if pow.is_negative() {
        return format!("-{}", pow.abs().root_decimal(1 << k, 20));
    }
    pow.root_decimal(1 << k, 20)
}

/// True if membership in `set` depends only on the coordinates in `coords`.
pub fn depends_only_on(set: &DefinableSet, coords: &[usize]) -> bool {
    let n = set.space().size();
    let k = set.arity();
    let mut seen: HashMap<Vec<usize>, bool> = HashMap::new();
    for i in 0..set.space().tuple_count(k) {
        let t = decode_tuple(n, k, i);
        let key: Vec<usize> = coords.iter().map(|&c| t[c]).collect();
        let member = set.contains_index(i);
        if *seen.entry(key).or_insert(member) != member {
            return false;
        }
    }
    true
}

/// A finite algebra of subsets of `M^k`, stored as its atoms.
#[derive(Debug, Clone)]
pub struct FiniteAlgebra {
    space: Arc<MeasureSpace>,
    arity: usize,
    /// Atom index of every tuple.
    atom_of: Vec<usize>,
    atoms: usize,
    /// For each generator, the coordinates it was declared to depend on.
    tags: Vec<Option<BTreeSet<usize>>>,
}

impl FiniteAlgebra {
    /// The algebra generated by `sets`; atoms are the nonempty Boolean
    /// combinations. Optional tags record which coordinates a generator
    /// depends on and are checked.
    pub fn generated(
        space: &Arc<MeasureSpace>,
        arity: usize,
        sets: &[(DefinableSet, Option<BTreeSet<usize>>)],
    ) -> Result<Self, GowersError> {
        for (s, tag) in sets {
            if s.arity() != arity {
                return Err(StructureError::ArityMismatch(arity, s.arity()).into());
            }
            if !Arc::ptr_eq(s.space(), space) && s.space().weights() != space.weights() {
                return Err(StructureError::ForeignSet.into());
            }
            if let Some(tag) = tag {
                let coords: Vec<usize> = tag.iter().copied().collect();
                if !depends_only_on(s, &coords) {
                    return Err(GowersError::NotCylindrical(coords));
                }
            }
        }
        let count = space.tuple_count(arity);
        let mut index: HashMap<Vec<bool>, usize> = HashMap::new();
        let mut atom_of = Vec::with_capacity(count);
        for i in 0..count {
            let sig: Vec<bool> = sets.iter().map(|(s, _)| s.contains_index(i)).collect();
            let next = index.len();
            atom_of.push(*index.entry(sig).or_insert(next));
        }
        Ok(FiniteAlgebra {
            space: space.clone(),
            arity,
            atom_of,
            atoms: index.len(),
            tags: sets.iter().map(|(_, t)| t.clone()).collect(),
        })
    }

    /// `{∅, M^k}`.
    pub fn trivial(space: &Arc<MeasureSpace>, arity: usize) -> Self {
        FiniteAlgebra::generated(space, arity, &[]).expect("no generators")
    }

    /// The power set: every tuple is an atom.
    pub fn finest(space: &Arc<MeasureSpace>, arity: usize) -> Self {
        let count = space.tuple_count(arity);
        FiniteAlgebra {
            space: space.clone(),
            arity,
            atom_of: (0..count).collect(),
            atoms: count,
            tags: Vec::new(),
        }
    }

    pub fn atom_count(&self) -> usize {
        self.atoms
    }

    pub fn atom_of(&self, idx: usize) -> usize {
        self.atom_of[idx]
    }

    pub fn tags(&self) -> &[Option<BTreeSet<usize>>] {
        &self.tags
    }

    /// The atoms as sets.
    pub fn atoms(&self) -> Vec<DefinableSet> {
        let mut out = vec![DefinableSet::empty(&self.space, self.arity); self.atoms];
        for (i, &a) in self.atom_of.iter().enumerate() {
            let t = self.space.decode(self.arity, i);
            out[a].insert(&t).expect("tuple in range");
        }
        out
    }
}

/// `E(f | 𝒜)`: on each atom the weighted mean of `f`, zero on null atoms.
pub fn cond_expect(f: &GridFunction, algebra: &FiniteAlgebra) -> Result<GridFunction, GowersError> {
    if f.arity != algebra.arity {
        return Err(GowersError::Arity {
            expected: algebra.arity,
            found: f.arity,
        });
    }
    if f.weights() != algebra.space.weights() {
        return Err(StructureError::ForeignSet.into());
    }
    let mut mass = vec![Rational::zero(); algebra.atoms];
    let mut integral = vec![Rational::zero(); algebra.atoms];
    for i in 0..f.values.len() {
        let w = f.tuple_weight(i);
        let a = algebra.atom_of[i];
        integral[a] += &f.values[i] * &w;
        mass[a] += w;
    }
    let mean: Vec<Rational> = integral
        .into_iter()
        .zip(&mass)
        .map(|(s, m)| if m.is_zero() { Rational::zero() } else { s / m })
        .collect();
    let values = algebra.atom_of.iter().map(|&a| mean[a].clone()).collect();
    Ok(GridFunction {
        values,
        ..f.clone()
    })
}

/// All `(k−1)`-subsets of `0..k`, each listed in increasing order; the
/// subset missing coordinate `i` comes at position `k − 1 − i`.
pub fn cylinder_index_sets(k: usize) -> Vec<Vec<usize>> {
    (0..k).rev().map(|skip| (0..k).filter(|&c| c != skip).collect()).collect()
}

fn cylinder_product(f: &GridFunction, cylinders: &[(Vec<usize>, DefinableSet)]) -> Result<GridFunction, GowersError> {
    let k = f.arity;
    let wanted: BTreeSet<Vec<usize>> = cylinder_index_sets(k).into_iter().collect();
    let given: BTreeSet<Vec<usize>> = cylinders.iter().map(|(i, _)| i.clone()).collect();
    if given != wanted || cylinders.len() != wanted.len() {
        return Err(GowersError::MissingCylinder);
    }
    let mut g = f.clone();
    for (coords, set) in cylinders {
        if set.arity() != k || set.space().size() != f.n {
            return Err(StructureError::ArityMismatch(k, set.arity()).into());
        }
        if !depends_only_on(set, coords) {
            return Err(GowersError::NotCylindrical(coords.clone()));
        }
        for (i, v) in g.values.iter_mut().enumerate() {
            if !set.contains_index(i) {
                *v = Rational::zero();
            }
        }
    }
    Ok(g)
}

/// `(‖f Π χ_{B_I}‖^{2^k}, ‖f‖^{2^k})` for one cylinder `B_I` per `(k−1)`-set `I`.
pub fn box_multiplication_check(
    f: &GridFunction,
    cylinders: &[(Vec<usize>, DefinableSet)],
    budget: &Budget,
) -> Result<(Rational, Rational), GowersError> {
    let g = cylinder_product(f, cylinders)?;
    Ok((gowers_box_pow(&g, budget)?, gowers_box_pow(f, budget)?))
}

/// Outcome of [`positivity_criterion`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Positivity {
    pub norm_positive: bool,
    /// `None` when the cylinder search was too large to run.
    pub correlation_found: Option<bool>,
    /// A witness: for each `(k−1)`-set, the projected tuples kept.
    pub witness: Option<Vec<Vec<Vec<usize>>>>,
}

impl Positivity {
    pub fn agree(&self) -> Option<bool> {
        self.correlation_found.map(|c| c == self.norm_positive)
    }
}

/// Largest exhaustive cylinder search, as a bit count `k · n^{k−1}`.
pub const CYLINDER_SEARCH_BITS: usize = 16;

/// Compares `‖f‖_{U^k_∞} > 0` with the existence of cylinder sets `B_I`
/// (one per `(k−1)`-set `I`) such that `Σ f Π χ_{B_I} w ≠ 0`, the latter
/// found by exhaustive search over all cylinder choices.
pub fn positivity_criterion(f: &GridFunction, budget: &Budget) -> Result<Positivity, GowersError> {
    let norm_positive = gowers_box_pow(f, budget)?.is_positive();
    let (n, k) = (f.n, f.arity);
    let proj_count = n.pow(k as u32 - 1);
    let bits = k * proj_count;
    if bits > CYLINDER_SEARCH_BITS {
        return Ok(Positivity {
            norm_positive,
            correlation_found: None,
            witness: None,
        });
    }
    let index_sets = cylinder_index_sets(k);
    let count = n.pow(k as u32);
    charge(budget, (1u128 << bits).saturating_mul(count as u128))?;
    // projection index of every tuple onto each index set
    let proj: Vec<Vec<usize>> = (0..count)
        .map(|i| {
            let t = decode_tuple(n, k, i);
            index_sets
                .iter()
                .map(|coords| coords.iter().fold(0, |acc, &c| acc * n + t[c]))
                .collect()
        })
        .collect();
    let weighted: Vec<Rational> = (0..count).map(|i| &f.values[i] * f.tuple_weight(i)).collect();
    let found = (0u64..1 << bits).into_par_iter().find_first(|&mask| {
        let mut s = Rational::zero();
        for i in 0..count {
            if weighted[i].is_zero() {
                continue;
            }
            let inside = proj[i]
                .iter()
                .enumerate()
                .all(|(j, &p)| mask >> (j * proj_count + p) & 1 == 1);
            if inside {
                s += &weighted[i];
            }
        }
        !s.is_zero()
    });
    let witness = found.map(|mask| {
        (0..k)
            .map(|j| {
                (0..proj_count)
                    .filter(|&p| mask >> (j * proj_count + p) & 1 == 1)
                    .map(|p| decode_tuple(n, k - 1, p))
                    .collect()
            })
            .collect()
    });
    Ok(Positivity {
        norm_positive,
        correlation_found: Some(found.is_some()),
        witness,
    })
}

/// Parses `function-table <arity>` followed by `n^arity` rationals in
/// lexicographic order, under normalized counting weights.
pub fn parse_grid_function(text: &str) -> Result<GridFunction, ParseError> {
    let toks: Vec<(usize, &str)> = line_tokens(text).into_iter().flatten().collect();
    let whole = SourceSpan::new(0, text.len());
    if toks.len() < 2 || toks[0].1 != "function-table" {
        return Err(ParseError::syntax("expected `function-table <arity>`", whole));
    }
    let arity = parse_usize_tok(toks[1], "an arity")?;
    if arity == 0 {
        return Err(ParseError::syntax("arity must be positive", tok_span(toks[1])));
    }
    let values = toks[2..]
        .iter()
        .map(|&t| parse_rational_tok(t))
        .collect::<Result<Vec<_>, _>>()?;
    let n = (1..=values.len()).find(|n| n.pow(arity as u32) >= values.len()).unwrap_or(0);
    if n == 0 || n.pow(arity as u32) != values.len() {
        return Err(ParseError::syntax(
            format!("{} entries is not n^{arity} for any n", values.len()),
            whole,
        ));
    }
    Ok(GridFunction::new(n, arity, values).expect("shape checked"))
}

/// Parses `group <n> [zero <z>]` followed by the `n × n` addition table,
/// row `a` listing `a + 0, ..., a + (n−1)`.
pub fn parse_group(text: &str) -> Result<AbelianGroup, ParseError> {
    let toks: Vec<(usize, &str)> = line_tokens(text).into_iter().flatten().collect();
    let whole = SourceSpan::new(0, text.len());
    if toks.len() < 2 || toks[0].1 != "group" {
        return Err(ParseError::syntax("expected `group <n>`", whole));
    }
    let n = parse_usize_tok(toks[1], "a group order")?;
    let mut rest = &toks[2..];
    let mut zero = 0;
    if rest.first().map(|t| t.1) == Some("zero") {
        let tok = *rest.get(1).ok_or_else(|| ParseError::syntax("expected the zero element", tok_span(rest[0])))?;
        zero = parse_usize_tok(tok, "an element")?;
        rest = &rest[2..];
    }
    let table = rest
        .iter()
        .map(|&t| parse_usize_tok(t, "an element"))
        .collect::<Result<Vec<_>, _>>()?;
    AbelianGroup::from_table(n, table, zero).map_err(|e| ParseError::syntax(e.to_string(), whole))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn unary(vals: &[&str]) -> GridFunction {
        GridFunction::new(vals.len(), 1, vals.iter().map(|v| q(v)).collect()).unwrap()
    }

    #[test]
    fn spec_examples() {
        let b = Budget::default();
        let z4 = AbelianGroup::cyclic(4);
        for k in 1..=3 {
            assert_eq!(gowers_norm_pow(&z4, &unary(&["1", "1", "1", "1"]), k, &b).unwrap(), Rational::one());
        }
        let z2 = AbelianGroup::cyclic(2);
        let alt = unary(&["1", "-1"]);
        assert_eq!(gowers_norm_pow(&z2, &alt, 2, &b).unwrap(), Rational::one());
        assert_eq!(gowers_norm_pow_subst(&z2, &alt, 1, &b).unwrap(), Rational::zero());
        let delta = unary(&["1", "0", "0", "0"]);
        assert_eq!(gowers_norm_pow(&z4, &delta, 1, &b).unwrap(), q("1/16"));
        let z3 = AbelianGroup::cyclic(3);
        assert_eq!(gowers_norm_pow_subst(&z3, &unary(&["2/3", "2/3", "2/3"]), 2, &b).unwrap(), q("16/81"));
    }

    #[test]
    fn box_norm_of_sum_composition_matches_subst_form() {
        let b = Budget::default();
        let z3 = AbelianGroup::cyclic(3);
        let g = unary(&["1/2", "-1", "3/4"]);
        for k in 1..=3 {
            let f = GridFunction::sum_composition(&z3, &g, k).unwrap();
            assert_eq!(
                gowers_box_pow(&f, &b).unwrap(),
                gowers_norm_pow_subst(&z3, &g, k, &b).unwrap()
            );
        }
    }

    #[test]
    fn dual_identity_on_diagonal() {
        let b = Budget::default();
        let f = GridFunction::from_fn(2, 2, |t| if t[0] == t[1] { Rational::one() } else { Rational::zero() });
        let d = dual_function(&f, &b).unwrap();
        assert_eq!(f.inner(&d).unwrap(), gowers_box_pow(&f, &b).unwrap());
        let one = GridFunction::constant(3, 2, Rational::one());
        assert_eq!(dual_function(&one, &b).unwrap(), one);
        let zero = GridFunction::constant(3, 2, Rational::zero());
        assert_eq!(dual_function(&zero, &b).unwrap(), zero);
    }

    #[test]
    fn product_set_indicator() {
        // χ_{A×B} on Z_2²: each coordinate contributes μ(A)², μ(B)²
        let b = Budget::default();
        let f = GridFunction::from_fn(2, 2, |t| if t[0] == 0 { Rational::one() } else { Rational::zero() });
        assert_eq!(gowers_box_pow(&f, &b).unwrap(), q("1/4"));
    }

    #[test]
    fn conditional_expectation() {
        let space = MeasureSpace::counting(2).unwrap();
        let e = DefinableSet::from_tuples(&space, 2, &[vec![0, 0], vec![1, 1]]).unwrap();
        let f = GridFunction::indicator(&e);
        let triv = cond_expect(&f, &FiniteAlgebra::trivial(&space, 2)).unwrap();
        assert!(triv.values().iter().all(|v| v == &q("1/2")));
        assert_eq!(cond_expect(&f, &FiniteAlgebra::finest(&space, 2)).unwrap(), f);
        let var_space = MeasureSpace::new(vec![q("1/2"), q("0")]).unwrap();
        let g = GridFunction::with_weights(1, vec![q("3"), q("5")], vec![q("1/2"), q("0")]).unwrap();
        let side = DefinableSet::from_tuples(&var_space, 1, &[vec![1]]).unwrap();
        let alg = FiniteAlgebra::generated(&var_space, 1, &[(side, None)]).unwrap();
        // the atom {1} has measure zero, so its value is 0
        assert_eq!(cond_expect(&g, &alg).unwrap().values(), &[q("3"), q("0")][..]);
    }

    #[test]
    fn cylinder_tags_are_checked() {
        let space = MeasureSpace::counting(2).unwrap();
        let diag = DefinableSet::from_tuples(&space, 2, &[vec![0, 0], vec![1, 1]]).unwrap();
        let tag: BTreeSet<usize> = [0].into_iter().collect();
        assert!(matches!(
            FiniteAlgebra::generated(&space, 2, &[(diag, Some(tag))]),
            Err(GowersError::NotCylindrical(_))
        ));
    }

    #[test]
    fn box_multiplication_examples() {
        let b = Budget::default();
        let space = MeasureSpace::counting(2).unwrap();
        let f = GridFunction::from_fn(2, 2, |t| Rational::from_integer((t[0] + 2 * t[1]) as i64 - 1));
        let full = || DefinableSet::full(&space, 2);
        let (a, c) = box_multiplication_check(&f, &[(vec![0], full()), (vec![1], full())], &b).unwrap();
        assert_eq!(a, c);
        let (a, _) = box_multiplication_check(
            &f,
            &[(vec![0], DefinableSet::empty(&space, 2)), (vec![1], full())],
            &b,
        )
        .unwrap();
        assert!(a.is_zero());
        let diag = DefinableSet::from_tuples(&space, 2, &[vec![0, 0], vec![1, 1]]).unwrap();
        assert!(box_multiplication_check(&f, &[(vec![0], diag), (vec![1], full())], &b).is_err());
    }

    #[test]
    fn positivity_examples() {
        let b = Budget::default();
        let zero = positivity_criterion(&GridFunction::constant(2, 2, Rational::zero()), &b).unwrap();
        assert_eq!((zero.norm_positive, zero.correlation_found), (false, Some(false)));
        let one = positivity_criterion(&GridFunction::constant(2, 2, Rational::one()), &b).unwrap();
        assert_eq!((one.norm_positive, one.correlation_found), (true, Some(true)));
        let f = GridFunction::from_fn(2, 2, |t| if t[0] == t[1] { q("1/2") } else { q("-1/2") });
        assert_eq!(positivity_criterion(&f, &b).unwrap().agree(), Some(true));
        let big = GridFunction::constant(5, 3, Rational::one());
        assert_eq!(positivity_criterion(&big, &b).unwrap().correlation_found, None);
    }

    #[test]
    fn group_tables() {
        let g = AbelianGroup::product(&[2, 2]);
        assert_eq!(g.order(), 4);
        assert_eq!(g.add(3, 3), 0);
        assert!(AbelianGroup::from_table(2, vec![0, 1, 1, 1], 0).is_err());
        // a non-commutative table is not accepted
        let s3_like = vec![0, 1, 2, 1, 0, 0, 2, 1, 0];
        assert!(AbelianGroup::from_table(3, s3_like, 0).is_err());
    }

    #[test]
    fn grid_file() {
        let f = parse_grid_function("function-table 2\n1 0\n0 1/2\n").unwrap();
        assert_eq!((f.size(), f.arity()), (2, 2));
        assert_eq!(f.value(&[1, 1]), &q("1/2"));
        assert!(parse_grid_function("function-table 2\n1 0 1\n").is_err());
    }

    #[test]
    fn group_file() {
        let g = parse_group("group 2\n0 1\n1 0\n").unwrap();
        assert_eq!((g.order(), g.add(1, 1)), (2, 0));
        assert!(parse_group("group 2\n0 1\n0 0\n").is_err());
    }

    #[test]
    fn root_rendering() {
        assert_eq!(root_display(&q("1/16"), 2), "0.50000000000000000000");
    }
}
