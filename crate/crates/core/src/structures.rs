//! Finite measured structures.
//!
//! A [`FiniteStructure`] interprets a [`Signature`] over the universe
//! `{0, .., n-1}` and carries one nonnegative weight per element. The
//! measure on `M^k` is the product measure `μ(A) = Σ_{ā∈A} Π_i w(a_i)`, so
//! products are exact by construction. Subsets of `M^k` are
//! [`DefinableSet`]s: bitsets in lexicographic tuple order.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use bitvec::prelude::*;
use thiserror::Error;

use crate::rational::Rational;
use crate::syntax::{Signature, SyntaxError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("universe must be nonempty")]
    EmptyUniverse,
    #[error("non-total function `{name}`: expected {expected} entries, found {found}")]
    NonTotalFunction {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("element {element} out of range for universe of size {size}")]
    OutOfRange { element: usize, size: usize },
    #[error("expected {expected} weights, found {found}")]
    WeightCount { expected: usize, found: usize },
    #[error("weight {0} is negative")]
    NegativeWeight(Rational),
    #[error("weights sum to {actual}, not the declared total {declared}")]
    WeightTotal { declared: Rational, actual: Rational },
    #[error("arity mismatch: {0} vs {1}")]
    ArityMismatch(usize, usize),
    #[error("sets belong to different structures")]
    ForeignSet,
    #[error("tuple of length {found} given for relation `{name}` of arity {arity}")]
    TupleLength {
        name: String,
        arity: usize,
        found: usize,
    },
    #[error("constant `{0}` has no interpretation")]
    MissingConstant(String),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
}

/// Value flag attached to a measured set: approximated from above (`Plus`),
/// from below (`Minus`), or exact (`Dot`). Concrete finite structures are
/// `Dot` everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum VFlag {
    Plus,
    Minus,
    #[default]
    Dot,
}

impl fmt::Display for VFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VFlag::Plus => "⊕",
            VFlag::Minus => "⊖",
            VFlag::Dot => "⊙",
        })
    }
}

static NEXT_SPACE_ID: AtomicU64 = AtomicU64::new(1);

/// The universe size together with the unary weights that induce every
/// product measure. Shared by a structure and all sets drawn from it.
#[derive(Debug)]
pub struct MeasureSpace {
    id: u64,
    size: usize,
    weights: Vec<Rational>,
    total: Rational,
    uniform: bool,
}

impl MeasureSpace {
    pub fn new(weights: Vec<Rational>) -> Result<Arc<Self>, StructureError> {
        if weights.is_empty() {
            return Err(StructureError::EmptyUniverse);
        }
        if let Some(w) = weights.iter().find(|w| w.is_negative()) {
            return Err(StructureError::NegativeWeight(w.clone()));
        }
        let total: Rational = weights.iter().sum();
        let uniform = weights.iter().all(|w| w == &weights[0]);
        Ok(Arc::new(MeasureSpace {
            id: NEXT_SPACE_ID.fetch_add(1, Ordering::Relaxed),
            size: weights.len(),
            weights,
            total,
            uniform,
        }))
    }

    /// Normalized counting measure on `n` points.
    pub fn counting(n: usize) -> Result<Arc<Self>, StructureError> {
        if n == 0 {
            return Err(StructureError::EmptyUniverse);
        }
        MeasureSpace::new(vec![Rational::ratio(1, n); n])
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, a: usize) -> &Rational {
        &self.weights[a]
    }

    /// Total mass `W = Σ w`.
    pub fn total(&self) -> &Rational {
        &self.total
    }

    pub fn is_uniform(&self) -> bool {
        self.uniform
    }

    /// `n^k`.
    pub fn tuple_count(&self, arity: usize) -> usize {
        self.size.pow(arity as u32)
    }

    /// Product weight `Π_i w(a_i)` of the tuple with lexicographic index `idx`.
    pub fn tuple_weight(&self, arity: usize, idx: usize) -> Rational {
        let mut w = Rational::one();
        let mut rest = idx;
        for _ in 0..arity {
            w *= &self.weights[rest % self.size];
            rest /= self.size;
        }
        w
    }

    pub fn decode(&self, arity: usize, idx: usize) -> Vec<usize> {
        decode_tuple(self.size, arity, idx)
    }

    pub fn encode(&self, tuple: &[usize]) -> usize {
        encode_tuple(self.size, tuple)
    }
}

/// Lexicographic index of a tuple over `{0..n-1}` (first coordinate most significant).
pub fn encode_tuple(n: usize, tuple: &[usize]) -> usize {
    tuple.iter().fold(0, |acc, &a| acc * n + a)
}

pub fn decode_tuple(n: usize, arity: usize, mut idx: usize) -> Vec<usize> {
    let mut out = vec![0; arity];
    for slot in out.iter_mut().rev() {
        *slot = idx % n;
        idx /= n;
    }
    out
}

/// A subset of `M^k` as a bitset in lexicographic tuple order.
#[derive(Clone)]
pub struct DefinableSet {
    space: Arc<MeasureSpace>,
    arity: usize,
    bits: BitVec,
}

impl fmt::Debug for DefinableSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let members: Vec<Vec<usize>> = self.tuples().collect();
        f.debug_struct("DefinableSet")
            .field("arity", &self.arity)
            .field("members", &members)
            .finish()
    }
}

impl PartialEq for DefinableSet {
    fn eq(&self, other: &Self) -> bool {
        self.space.id == other.space.id && self.arity == other.arity && self.bits == other.bits
    }
}

impl DefinableSet {
    pub fn empty(space: &Arc<MeasureSpace>, arity: usize) -> Self {
        DefinableSet {
            space: Arc::clone(space),
            arity,
            bits: bitvec![0; space.tuple_count(arity)],
        }
    }

    pub fn full(space: &Arc<MeasureSpace>, arity: usize) -> Self {
        DefinableSet {
            space: Arc::clone(space),
            arity,
            bits: bitvec![1; space.tuple_count(arity)],
        }
    }

    pub fn from_fn(
        space: &Arc<MeasureSpace>,
        arity: usize,
        mut member: impl FnMut(&[usize]) -> bool,
    ) -> Self {
        let count = space.tuple_count(arity);
        let mut bits = BitVec::with_capacity(count);
        let mut tuple = vec![0; arity];
        for _ in 0..count {
            bits.push(member(&tuple));
            increment(&mut tuple, space.size);
        }
        DefinableSet {
            space: Arc::clone(space),
            arity,
            bits,
        }
    }

    pub fn from_tuples(
        space: &Arc<MeasureSpace>,
        arity: usize,
        tuples: &[Vec<usize>],
    ) -> Result<Self, StructureError> {
        let mut set = DefinableSet::empty(space, arity);
        for t in tuples {
            set.insert(t)?;
        }
        Ok(set)
    }

    pub(crate) fn from_bits(space: &Arc<MeasureSpace>, arity: usize, bits: BitVec) -> Self {
        debug_assert_eq!(bits.len(), space.tuple_count(arity));
        DefinableSet {
            space: Arc::clone(space),
            arity,
            bits,
        }
    }

    pub fn insert(&mut self, tuple: &[usize]) -> Result<(), StructureError> {
        if tuple.len() != self.arity {
            return Err(StructureError::ArityMismatch(self.arity, tuple.len()));
        }
        if let Some(&a) = tuple.iter().find(|&&a| a >= self.space.size) {
            return Err(StructureError::OutOfRange {
                element: a,
                size: self.space.size,
            });
        }
        let idx = self.space.encode(tuple);
        self.bits.set(idx, true);
        Ok(())
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn space(&self) -> &Arc<MeasureSpace> {
        &self.space
    }

    pub fn bits(&self) -> &BitSlice {
        &self.bits
    }

    pub fn contains(&self, tuple: &[usize]) -> bool {
        tuple.len() == self.arity
            && tuple.iter().all(|&a| a < self.space.size)
            && self.bits[self.space.encode(tuple)]
    }

    pub fn contains_index(&self, idx: usize) -> bool {
        self.bits[idx]
    }

    pub fn count(&self) -> usize {
        self.bits.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.not_any()
    }

    pub fn tuples(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        self.bits
            .iter_ones()
            .map(move |idx| self.space.decode(self.arity, idx))
    }

    /// Exact product measure of the set. For normalized counting measure this
    /// is `|S| / n^k`.
    pub fn measure(&self) -> Rational {
        if self.space.uniform {
            let count = self.count();
            return Rational::from(count) * self.space.weights[0].pow(self.arity as u32);
        }
        self.bits
            .iter_ones()
            .map(|idx| self.space.tuple_weight(self.arity, idx))
            .sum()
    }

    fn compatible(&self, other: &DefinableSet) -> Result<(), StructureError> {
        if self.space.id != other.space.id {
            return Err(StructureError::ForeignSet);
        }
        if self.arity != other.arity {
            return Err(StructureError::ArityMismatch(self.arity, other.arity));
        }
        Ok(())
    }

    pub fn union(&self, other: &DefinableSet) -> Result<DefinableSet, StructureError> {
        self.compatible(other)?;
        let mut bits = self.bits.clone();
        bits |= &other.bits;
        Ok(DefinableSet::from_bits(&self.space, self.arity, bits))
    }

    pub fn intersection(&self, other: &DefinableSet) -> Result<DefinableSet, StructureError> {
        self.compatible(other)?;
        let mut bits = self.bits.clone();
        bits &= &other.bits;
        Ok(DefinableSet::from_bits(&self.space, self.arity, bits))
    }

    pub fn difference(&self, other: &DefinableSet) -> Result<DefinableSet, StructureError> {
        self.compatible(other)?;
        let mut bits = self.bits.clone();
        bits &= !other.bits.clone();
        Ok(DefinableSet::from_bits(&self.space, self.arity, bits))
    }

    pub fn complement(&self) -> DefinableSet {
        DefinableSet::from_bits(&self.space, self.arity, !self.bits.clone())
    }

    pub fn is_subset(&self, other: &DefinableSet) -> Result<bool, StructureError> {
        self.compatible(other)?;
        Ok(self.bits.iter_ones().all(|i| other.bits[i]))
    }

    /// Cartesian product `A × B ⊆ M^{m+n}`.
    pub fn product(&self, other: &DefinableSet) -> Result<DefinableSet, StructureError> {
        if self.space.id != other.space.id {
            return Err(StructureError::ForeignSet);
        }
        let arity = self.arity + other.arity;
        let right = other.space.tuple_count(other.arity);
        let mut bits = bitvec![0; self.space.tuple_count(arity)];
        for i in self.bits.iter_ones() {
            for j in other.bits.iter_ones() {
                bits.set(i * right + j, true);
            }
        }
        Ok(DefinableSet::from_bits(&self.space, arity, bits))
    }

    /// `{ σ(ā) : ā ∈ A }` where `σ(ā)_i = a_{perm[i]}`.
    pub fn permute(&self, perm: &[usize]) -> Result<DefinableSet, StructureError> {
        if perm.len() != self.arity {
            return Err(StructureError::ArityMismatch(self.arity, perm.len()));
        }
        let mut out = DefinableSet::empty(&self.space, self.arity);
        for t in self.tuples() {
            let moved: Vec<usize> = perm.iter().map(|&p| t[p]).collect();
            out.insert(&moved)?;
        }
        Ok(out)
    }

    /// Fiber `B^x = { ȳ : (x̄, ȳ) ∈ B }` over a prefix `x̄`.
    pub fn section(&self, prefix: &[usize]) -> Result<DefinableSet, StructureError> {
        if prefix.len() > self.arity {
            return Err(StructureError::ArityMismatch(self.arity, prefix.len()));
        }
        let rest = self.arity - prefix.len();
        let width = self.space.tuple_count(rest);
        let start = self.space.encode(prefix) * width;
        let bits: BitVec = self.bits[start..start + width].to_bitvec();
        Ok(DefinableSet::from_bits(&self.space, rest, bits))
    }
}

fn increment(tuple: &mut [usize], n: usize) {
    for slot in tuple.iter_mut().rev() {
        *slot += 1;
        if *slot < n {
            return;
        }
        *slot = 0;
    }
}

/// Iterates all tuples of `{0..n-1}^arity` in lexicographic order.
pub fn all_tuples(n: usize, arity: usize) -> impl Iterator<Item = Vec<usize>> {
    let count = n.pow(arity as u32);
    (0..count).map(move |i| decode_tuple(n, arity, i))
}

/// `μ(A × B) = μ(A) · μ(B)`, checked exactly by materializing `A × B`.
pub fn product_measure_check(a: &DefinableSet, b: &DefinableSet) -> Result<bool, StructureError> {
    let ab = a.product(b)?;
    Ok(ab.measure() == a.measure() * b.measure())
}

#[derive(Debug, Clone)]
struct FunctionTable {
    arity: usize,
    table: Vec<usize>,
}

/// A finite first-order structure with product measures induced by unary
/// weights. Immutable once built.
#[derive(Debug, Clone)]
pub struct FiniteStructure {
    signature: Signature,
    space: Arc<MeasureSpace>,
    constants: HashMap<String, usize>,
    functions: HashMap<String, FunctionTable>,
    relations: HashMap<String, DefinableSet>,
}

impl FiniteStructure {
    pub fn builder(size: usize) -> StructureBuilder {
        StructureBuilder::new(size)
    }

    pub fn size(&self) -> usize {
        self.space.size
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn space(&self) -> &Arc<MeasureSpace> {
        &self.space
    }

    pub fn weights(&self) -> &[Rational] {
        &self.space.weights
    }

    pub fn constant(&self, name: &str) -> Option<usize> {
        self.constants.get(name).copied()
    }

    pub fn apply(&self, name: &str, args: &[usize]) -> Option<usize> {
        let f = self.functions.get(name)?;
        if f.arity != args.len() {
            return None;
        }
        Some(f.table[encode_tuple(self.space.size, args)])
    }

    pub fn holds(&self, name: &str, args: &[usize]) -> Option<bool> {
        let r = self.relations.get(name)?;
        if r.arity != args.len() {
            return None;
        }
        Some(r.bits[encode_tuple(self.space.size, args)])
    }

    pub fn relation(&self, name: &str) -> Option<&DefinableSet> {
        self.relations.get(name)
    }

    pub fn function_table(&self, name: &str) -> Option<(usize, &[usize])> {
        self.functions
            .get(name)
            .map(|f| (f.arity, f.table.as_slice()))
    }

    pub fn empty_set(&self, arity: usize) -> DefinableSet {
        DefinableSet::empty(&self.space, arity)
    }

    pub fn full_set(&self, arity: usize) -> DefinableSet {
        DefinableSet::full(&self.space, arity)
    }

    pub fn set_from_fn(&self, arity: usize, member: impl FnMut(&[usize]) -> bool) -> DefinableSet {
        DefinableSet::from_fn(&self.space, arity, member)
    }

    /// All value flags on a concrete structure are exact.
    pub fn flag(&self, _set: &DefinableSet) -> VFlag {
        VFlag::Dot
    }
}

/// Incremental constructor for [`FiniteStructure`].
#[derive(Debug, Clone)]
pub struct StructureBuilder {
    size: usize,
    weights: Option<Vec<Rational>>,
    declared_total: Option<Rational>,
    signature: Signature,
    constants: HashMap<String, usize>,
    functions: HashMap<String, FunctionTable>,
    relations: HashMap<String, (usize, Vec<Vec<usize>>)>,
    errors: Vec<StructureError>,
}

impl StructureBuilder {
    pub fn new(size: usize) -> Self {
        StructureBuilder {
            size,
            weights: None,
            declared_total: None,
            signature: Signature::default(),
            constants: HashMap::new(),
            functions: HashMap::new(),
            relations: HashMap::new(),
            errors: Vec::new(),
        }
    }

    fn record<T>(&mut self, r: Result<T, SyntaxError>) {
        if let Err(e) = r {
            self.errors.push(e.into());
        }
    }

    pub fn weights(mut self, weights: Vec<Rational>) -> Self {
        self.weights = Some(weights);
        self
    }

    /// Requires the weights to sum to exactly `total`.
    pub fn declared_total(mut self, total: Rational) -> Self {
        self.declared_total = Some(total);
        self
    }

    pub fn constant(mut self, name: &str, element: usize) -> Self {
        let r = self.signature.add_constant(name);
        self.record(r);
        self.constants.insert(name.to_string(), element);
        self
    }

    pub fn function(mut self, name: &str, arity: usize, table: Vec<usize>) -> Self {
        let r = self.signature.add_function(name, arity);
        self.record(r);
        self.functions
            .insert(name.to_string(), FunctionTable { arity, table });
        self
    }

    pub fn function_from(self, name: &str, arity: usize, f: impl Fn(&[usize]) -> usize) -> Self {
        let table = all_tuples(self.size, arity).map(|t| f(&t)).collect();
        self.function(name, arity, table)
    }

    pub fn relation(mut self, name: &str, arity: usize, tuples: Vec<Vec<usize>>) -> Self {
        let r = self.signature.add_relation(name, arity);
        self.record(r);
        self.relations.insert(name.to_string(), (arity, tuples));
        self
    }

    pub fn relation_from(self, name: &str, arity: usize, f: impl Fn(&[usize]) -> bool) -> Self {
        let tuples = all_tuples(self.size, arity).filter(|t| f(t)).collect();
        self.relation(name, arity, tuples)
    }

    pub fn build(self) -> Result<FiniteStructure, StructureError> {
        if let Some(e) = self.errors.into_iter().next() {
            return Err(e);
        }
        if self.size == 0 {
            return Err(StructureError::EmptyUniverse);
        }
        let n = self.size;
        let space = match self.weights {
            None => MeasureSpace::counting(n)?,
            Some(w) => {
                if w.len() != n {
                    return Err(StructureError::WeightCount {
                        expected: n,
                        found: w.len(),
                    });
                }
                MeasureSpace::new(w)?
            }
        };
        if let Some(declared) = self.declared_total {
            if &declared != space.total() {
                return Err(StructureError::WeightTotal {
                    declared,
                    actual: space.total().clone(),
                });
            }
        }
        for &e in self.constants.values() {
            if e >= n {
                return Err(StructureError::OutOfRange {
                    element: e,
                    size: n,
                });
            }
        }
        for (name, f) in &self.functions {
            let expected = n.pow(f.arity as u32);
            if f.table.len() != expected {
                return Err(StructureError::NonTotalFunction {
                    name: name.clone(),
                    expected,
                    found: f.table.len(),
                });
            }
            if let Some(&e) = f.table.iter().find(|&&e| e >= n) {
                return Err(StructureError::OutOfRange {
                    element: e,
                    size: n,
                });
            }
        }
        let mut relations = HashMap::new();
        for (name, (arity, tuples)) in self.relations {
            if let Some(t) = tuples.iter().find(|t| t.len() != arity) {
                return Err(StructureError::TupleLength {
                    name,
                    arity,
                    found: t.len(),
                });
            }
            relations.insert(name, DefinableSet::from_tuples(&space, arity, &tuples)?);
        }
        for c in self.signature.constants() {
            if !self.constants.contains_key(c) {
                return Err(StructureError::MissingConstant(c.clone()));
            }
        }
        Ok(FiniteStructure {
            signature: self.signature,
            space,
            constants: self.constants,
            functions: self.functions,
            relations,
        })
    }
}

/// Ready-made structures used throughout the examples and tests.
pub mod library {
    use super::*;

    /// `Z_n` written multiplicatively: binary `mul`, identity `e`.
    pub fn cyclic_group(n: usize) -> Result<FiniteStructure, StructureError> {
        FiniteStructure::builder(n)
            .constant("e", 0)
            .function_from("mul", 2, |t| (t[0] + t[1]) % n)
            .build()
    }

    /// The six permutations of `{0,1,2}` in lexicographic order, composed
    /// as functions (`(p·q)(i) = p(q(i))`). Element 0 is the identity.
    pub fn symmetric_group_3() -> Result<FiniteStructure, StructureError> {
        let perms = s3_permutations();
        let index = |p: &[usize; 3]| perms.iter().position(|q| q == p).unwrap();
        FiniteStructure::builder(6)
            .constant("e", 0)
            .function_from("mul", 2, |t| {
                let (p, q) = (perms[t[0]], perms[t[1]]);
                index(&[p[q[0]], p[q[1]], p[q[2]]])
            })
            .build()
    }

    pub fn s3_permutations() -> Vec<[usize; 3]> {
        vec![
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z4() -> FiniteStructure {
        library::cyclic_group(4).unwrap()
    }

    #[test]
    fn counting_measure_examples() {
        let m = z4();
        assert_eq!(m.full_set(2).measure(), Rational::one());
        let diag = m.set_from_fn(2, |t| t[0] == t[1]);
        assert_eq!(diag.measure(), Rational::new(1, 4));
    }

    #[test]
    fn weighted_singleton() {
        let m = FiniteStructure::builder(3)
            .weights(vec![Rational::new(1, 2), Rational::new(1, 4), Rational::new(1, 4)])
            .build()
            .unwrap();
        let s = m.set_from_fn(1, |t| t[0] == 0);
        assert_eq!(s.measure(), Rational::new(1, 2));
        assert_eq!(m.full_set(1).measure(), Rational::one());
    }

    #[test]
    fn product_check_examples() {
        let m = z4();
        let a = m.set_from_fn(1, |t| t[0] < 2);
        let b = m.set_from_fn(1, |t| t[0] == 0);
        assert!(product_measure_check(&a, &b).unwrap());
        assert_eq!(a.product(&b).unwrap().measure(), Rational::new(1, 8));
        assert_eq!(a.product(&b).unwrap().count(), 2);
        assert!(product_measure_check(&m.empty_set(1), &b).unwrap());
        assert!(product_measure_check(&m.full_set(1), &m.full_set(1)).unwrap());
    }

    #[test]
    fn boolean_ops() {
        let m = z4();
        let e = m.empty_set(2);
        assert_eq!(e.complement(), m.full_set(2));
        let a = m.set_from_fn(2, |t| t[0] <= t[1]);
        assert!(a.difference(&a).unwrap().is_empty());
        let b = m.set_from_fn(2, |t| t[0] % 2 == 0);
        let lhs = a.union(&b).unwrap().measure() + a.intersection(&b).unwrap().measure();
        assert_eq!(lhs, a.measure() + b.measure());
        assert!(matches!(
            a.union(&m.full_set(1)),
            Err(StructureError::ArityMismatch(2, 1))
        ));
        let other = z4();
        assert!(matches!(
            a.union(&other.full_set(2)),
            Err(StructureError::ForeignSet)
        ));
    }

    #[test]
    fn section_and_permute() {
        let m = z4();
        let a = m.set_from_fn(2, |t| t[0] < t[1]);
        let s = a.section(&[1]).unwrap();
        assert_eq!(s.tuples().collect::<Vec<_>>(), vec![vec![2], vec![3]]);
        let flipped = a.permute(&[1, 0]).unwrap();
        assert!(flipped.contains(&[3, 0]));
        assert!(!flipped.contains(&[0, 3]));
        assert_eq!(flipped.measure(), a.measure());
    }

    #[test]
    fn builder_validation() {
        assert_eq!(
            FiniteStructure::builder(0).build().unwrap_err(),
            StructureError::EmptyUniverse
        );
        let e = FiniteStructure::builder(2)
            .function("f", 1, vec![0])
            .build()
            .unwrap_err();
        assert!(matches!(e, StructureError::NonTotalFunction { .. }));
        let e = FiniteStructure::builder(2)
            .relation("R", 1, vec![vec![5]])
            .build()
            .unwrap_err();
        assert!(matches!(e, StructureError::OutOfRange { element: 5, .. }));
        let e = FiniteStructure::builder(2)
            .weights(vec![Rational::new(1, 2), Rational::new(1, 4)])
            .declared_total(Rational::one())
            .build()
            .unwrap_err();
        assert!(matches!(e, StructureError::WeightTotal { .. }));
    }

    #[test]
    fn s3_is_nonabelian() {
        let g = library::symmetric_group_3().unwrap();
        assert_eq!(g.apply("mul", &[0, 3]), Some(3));
        let commuting = (0..6)
            .filter(|&x| g.apply("mul", &[x, 1]) == g.apply("mul", &[1, x]))
            .count();
        assert_eq!(commuting, 2);
    }
}
