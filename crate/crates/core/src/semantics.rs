//! Satisfaction of formulae in finite structures.
//!
//! Formulae are compiled to a slot-indexed tree before evaluation: every
//! variable occurrence points at a position in a flat environment, and each
//! measure node remembers which slots its value depends on so repeated
//! subevaluations with the same parameters are answered from a memo table.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::budget::{power_size, Budget, BudgetExceeded};
use crate::parser::print_formula;
use crate::rational::Rational;
use crate::structures::{DefinableSet, FiniteStructure, StructureError, VFlag};
use crate::syntax::{Cmp, Formula, Signature, SyntaxError, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticError {
    #[error("unbound free variable `{0}`")]
    Unbound(String),
    #[error("valuation assigns {element} to `{var}`, outside a universe of size {size}")]
    OutOfRange {
        var: String,
        element: usize,
        size: usize,
    },
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}

/// Assignment of universe elements to variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Valuation(BTreeMap<String, usize>);

impl Valuation {
    pub fn new() -> Self {
        Valuation::default()
    }

    pub fn with(mut self, var: &str, element: usize) -> Self {
        self.0.insert(var.to_string(), element);
        self
    }

    pub fn set(&mut self, var: &str, element: usize) {
        self.0.insert(var.to_string(), element);
    }

    pub fn get(&self, var: &str) -> Option<usize> {
        self.0.get(var).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.0.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

impl<S: AsRef<str>> FromIterator<(S, usize)> for Valuation {
    fn from_iter<I: IntoIterator<Item = (S, usize)>>(iter: I) -> Self {
        Valuation(iter.into_iter().map(|(k, v)| (k.as_ref().to_string(), v)).collect())
    }
}

/// The measure-constructor clause. With flag ⊙ this is plain `<` or `≤`.
pub fn measure_clause(cmp: Cmp, mu: &Rational, r: &Rational, flag: VFlag) -> bool {
    match mu.cmp(r) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => match cmp {
            Cmp::Lt => flag == VFlag::Minus,
            Cmp::Le => flag != VFlag::Plus,
        },
    }
}

/// One computed measure-constructor subevaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasureEvent {
    pub formula: String,
    pub params: Vec<(String, usize)>,
    pub count: usize,
    pub measure: Rational,
    pub cmp: Cmp,
    pub threshold: Rational,
    pub flag: VFlag,
    pub holds: bool,
}

impl fmt::Display for MeasureEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(
            f,
            "{} [{}]: |set| = {}, mu = {} {} {} -> {}",
            self.formula,
            params.join(", "),
            self.count,
            self.measure,
            self.cmp.symbol(),
            self.threshold,
            self.holds
        )
    }
}

#[derive(Debug, Clone)]
pub struct EvalOptions {
    pub budget: u64,
    pub trace: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            budget: crate::budget::DEFAULT_BUDGET,
            trace: false,
        }
    }
}

/// Result of [`eval_with`].
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub value: bool,
    /// Work units spent.
    pub work: u64,
    pub trace: Vec<MeasureEvent>,
    /// For a formula whose outermost node is a measure constructor, its
    /// measured value, comparison, threshold and flag.
    pub top_measure: Option<(Rational, Cmp, Rational, VFlag)>,
}

#[derive(Debug)]
enum CTerm<'a> {
    Slot(usize),
    Elem(usize),
    App(&'a [usize], Vec<CTerm<'a>>),
}

#[derive(Debug)]
enum Node<'a> {
    Eq(CTerm<'a>, CTerm<'a>),
    Atom(&'a DefinableSet, Vec<CTerm<'a>>),
    Not(Box<Node<'a>>),
    And(Box<Node<'a>>, Box<Node<'a>>),
    Or(Box<Node<'a>>, Box<Node<'a>>),
    Implies(Box<Node<'a>>, Box<Node<'a>>),
    Forall(usize, Box<Node<'a>>),
    Exists(usize, Box<Node<'a>>),
    Meas(Box<MeasNode<'a>>),
}

#[derive(Debug)]
struct MeasNode<'a> {
    id: usize,
    slots: Vec<usize>,
    cmp: Cmp,
    threshold: Rational,
    body: Node<'a>,
    /// Slots of the free variables of the whole measure formula.
    key: Vec<(String, usize)>,
    text: Option<String>,
}

struct Compiler<'a> {
    m: &'a FiniteStructure,
    slots: usize,
    meas: usize,
    trace: bool,
}

impl<'a> Compiler<'a> {
    fn fresh(&mut self) -> usize {
        self.slots += 1;
        self.slots - 1
    }

    fn term(&self, t: &Term, scope: &HashMap<String, usize>) -> Result<CTerm<'a>, SemanticError> {
        Ok(match t {
            Term::Var(v) => CTerm::Slot(*scope.get(v).ok_or_else(|| SemanticError::Unbound(v.clone()))?),
            Term::Const(c) => CTerm::Elem(
                self.m
                    .constant(c)
                    .ok_or_else(|| SyntaxError::UnknownSymbol(c.clone()))?,
            ),
            Term::App(f, args) => {
                let (_, table) = self
                    .m
                    .function_table(f)
                    .ok_or_else(|| SyntaxError::UnknownSymbol(f.clone()))?;
                let args = args.iter().map(|a| self.term(a, scope)).collect::<Result<_, _>>()?;
                CTerm::App(table, args)
            }
        })
    }

    fn node(&mut self, f: &Formula, scope: &mut HashMap<String, usize>) -> Result<Node<'a>, SemanticError> {
        Ok(match f {
            Formula::Eq(a, b) => Node::Eq(self.term(a, scope)?, self.term(b, scope)?),
            Formula::Atom(r, args) => {
                let set = self
                    .m
                    .relation(r)
                    .ok_or_else(|| SyntaxError::UnknownSymbol(r.clone()))?;
                let args = args.iter().map(|a| self.term(a, scope)).collect::<Result<_, _>>()?;
                Node::Atom(set, args)
            }
            Formula::Not(a) => Node::Not(Box::new(self.node(a, scope)?)),
            Formula::And(a, b) => Node::And(Box::new(self.node(a, scope)?), Box::new(self.node(b, scope)?)),
            Formula::Or(a, b) => Node::Or(Box::new(self.node(a, scope)?), Box::new(self.node(b, scope)?)),
            Formula::Implies(a, b) => {
                Node::Implies(Box::new(self.node(a, scope)?), Box::new(self.node(b, scope)?))
            }
            Formula::Forall(v, body) | Formula::Exists(v, body) => {
                let slot = self.fresh();
                let saved = scope.insert(v.clone(), slot);
                let inner = self.node(body, scope);
                restore(scope, v, saved);
                let inner = Box::new(inner?);
                if matches!(f, Formula::Forall(..)) {
                    Node::Forall(slot, inner)
                } else {
                    Node::Exists(slot, inner)
                }
            }
            Formula::Meas(m) => {
                let key = f
                    .free_vars()
                    .into_iter()
                    .map(|v| {
                        let slot = *scope.get(&v).ok_or_else(|| SemanticError::Unbound(v.clone()))?;
                        Ok((v, slot))
                    })
                    .collect::<Result<Vec<_>, SemanticError>>()?;
                let slots: Vec<usize> = m.vars().iter().map(|_| self.fresh()).collect();
                let saved: Vec<Option<usize>> = m
                    .vars()
                    .iter()
                    .zip(&slots)
                    .map(|(v, &s)| scope.insert(v.clone(), s))
                    .collect();
                let body = self.node(m.body(), scope);
                for (v, old) in m.vars().iter().zip(saved).rev() {
                    restore(scope, v, old);
                }
                let id = self.meas;
                self.meas += 1;
                Node::Meas(Box::new(MeasNode {
                    id,
                    slots,
                    cmp: m.cmp(),
                    threshold: m.threshold().clone(),
                    body: body?,
                    key,
                    text: self.trace.then(|| print_formula(f)),
                }))
            }
        })
    }
}

fn restore(scope: &mut HashMap<String, usize>, v: &str, old: Option<usize>) {
    match old {
        Some(s) => {
            scope.insert(v.to_string(), s);
        }
        None => {
            scope.remove(v);
        }
    }
}

struct Machine<'a, 'b> {
    m: &'a FiniteStructure,
    budget: &'b Budget,
    memo: HashMap<(usize, Vec<usize>), (usize, Rational)>,
    trace: Option<Vec<MeasureEvent>>,
}

impl Machine<'_, '_> {
    fn term(&self, t: &CTerm<'_>, env: &[usize]) -> usize {
        match t {
            CTerm::Slot(s) => env[*s],
            CTerm::Elem(e) => *e,
            CTerm::App(table, args) => {
                let n = self.m.size();
                let idx = args.iter().fold(0, |acc, a| acc * n + self.term(a, env));
                table[idx]
            }
        }
    }

    fn eval(&mut self, node: &Node<'_>, env: &mut Vec<usize>) -> Result<bool, SemanticError> {
        Ok(match node {
            Node::Eq(a, b) => self.term(a, env) == self.term(b, env),
            Node::Atom(set, args) => {
                let n = self.m.size();
                let idx = args.iter().fold(0, |acc, a| acc * n + self.term(a, env));
                set.contains_index(idx)
            }
            Node::Not(a) => !self.eval(a, env)?,
            Node::And(a, b) => self.eval(a, env)? && self.eval(b, env)?,
            Node::Or(a, b) => self.eval(a, env)? || self.eval(b, env)?,
            Node::Implies(a, b) => !self.eval(a, env)? || self.eval(b, env)?,
            Node::Forall(slot, body) => {
                self.budget.charge(self.m.size() as u64)?;
                let mut all = true;
                for e in 0..self.m.size() {
                    env[*slot] = e;
                    if !self.eval(body, env)? {
                        all = false;
                        break;
                    }
                }
                all
            }
            Node::Exists(slot, body) => {
                self.budget.charge(self.m.size() as u64)?;
                let mut any = false;
                for e in 0..self.m.size() {
                    env[*slot] = e;
                    if self.eval(body, env)? {
                        any = true;
                        break;
                    }
                }
                any
            }
            Node::Meas(mn) => {
                let (_, mu) = self.measure(mn, env)?;
                measure_clause(mn.cmp, &mu, &mn.threshold, VFlag::Dot)
            }
        })
    }

    /// Size and measure of the body's extension at the current parameters.
    fn measure(&mut self, mn: &MeasNode<'_>, env: &mut Vec<usize>) -> Result<(usize, Rational), SemanticError> {
        let key = (mn.id, mn.key.iter().map(|&(_, s)| env[s]).collect::<Vec<_>>());
        if let Some(hit) = self.memo.get(&key) {
            return Ok(hit.clone());
        }
        let n = self.m.size();
        let k = mn.slots.len();
        self.budget.check_size(power_size(n, k))?;
        self.budget.charge(power_size(n, k) as u64)?;
        let space = self.m.space().clone();
        let mut count = 0usize;
        let mut weighted = Rational::zero();
        let mut digits = vec![0usize; k];
        'outer: loop {
            for (d, &s) in digits.iter().zip(&mn.slots) {
                env[s] = *d;
            }
            if self.eval(&mn.body, env)? {
                count += 1;
                if !space.is_uniform() {
                    let w: Rational = digits.iter().map(|&a| space.weight(a)).product();
                    weighted += w;
                }
            }
            // odometer, last coordinate fastest
            let mut i = k;
            loop {
                if i == 0 {
                    break 'outer;
                }
                i -= 1;
                digits[i] += 1;
                if digits[i] < n {
                    break;
                }
                digits[i] = 0;
            }
        }
        let mu = if space.is_uniform() {
            Rational::from(count) * space.weight(0).pow(k as u32)
        } else {
            weighted
        };
        if let Some(trace) = self.trace.as_mut() {
            trace.push(MeasureEvent {
                formula: mn.text.clone().unwrap_or_default(),
                params: mn.key.iter().map(|(v, s)| (v.clone(), env[*s])).collect(),
                count,
                measure: mu.clone(),
                cmp: mn.cmp,
                threshold: mn.threshold.clone(),
                flag: VFlag::Dot,
                holds: measure_clause(mn.cmp, &mu, &mn.threshold, VFlag::Dot),
            });
        }
        self.memo.insert(key, (count, mu.clone()));
        Ok((count, mu))
    }
}

struct Prepared<'a> {
    root: Node<'a>,
    env: Vec<usize>,
    /// Slots for the tuple variables of an extension, in order.
    tuple_slots: Vec<usize>,
}

fn prepare<'a>(
    m: &'a FiniteStructure,
    f: &Formula,
    tuple: &[String],
    s: &Valuation,
    trace: bool,
) -> Result<Prepared<'a>, SemanticError> {
    f.check(m.signature())?;
    let mut c = Compiler {
        m,
        slots: 0,
        meas: 0,
        trace,
    };
    let mut scope = HashMap::new();
    let mut initial = Vec::new();
    let mut tuple_slots = Vec::new();
    for v in tuple {
        if scope.contains_key(v) {
            return Err(SyntaxError::RepeatedMeasureVar(v.clone()).into());
        }
        let slot = c.fresh();
        scope.insert(v.clone(), slot);
        tuple_slots.push(slot);
        initial.push((slot, 0));
    }
    for v in f.free_vars() {
        if scope.contains_key(&v) {
            continue;
        }
        let e = s.get(&v).ok_or_else(|| SemanticError::Unbound(v.clone()))?;
        if e >= m.size() {
            return Err(SemanticError::OutOfRange {
                var: v,
                element: e,
                size: m.size(),
            });
        }
        let slot = c.fresh();
        scope.insert(v, slot);
        initial.push((slot, e));
    }
    let root = c.node(f, &mut scope)?;
    let mut env = vec![0; c.slots];
    for (slot, e) in initial {
        env[slot] = e;
    }
    Ok(Prepared { root, env, tuple_slots })
}

/// `𝔐 ⊨ φ[s]` with the default budget.
pub fn eval(m: &FiniteStructure, f: &Formula, s: &Valuation) -> Result<bool, SemanticError> {
    Ok(eval_with(m, f, s, &EvalOptions::default())?.value)
}

pub fn eval_with(
    m: &FiniteStructure,
    f: &Formula,
    s: &Valuation,
    opts: &EvalOptions,
) -> Result<Evaluation, SemanticError> {
    let budget = Budget::new(opts.budget);
    eval_in_budget(m, f, s, &budget, opts.trace)
}

/// Like [`eval_with`] but drawing on a caller-owned budget.
pub fn eval_in_budget(
    m: &FiniteStructure,
    f: &Formula,
    s: &Valuation,
    budget: &Budget,
    trace: bool,
) -> Result<Evaluation, SemanticError> {
    let used_before = budget.used();
    let mut p = prepare(m, f, &[], s, trace)?;
    let mut mach = Machine {
        m,
        budget,
        memo: HashMap::new(),
        trace: trace.then(Vec::new),
    };
    let value = mach.eval(&p.root, &mut p.env)?;
    let top_measure = match &p.root {
        Node::Meas(mn) => {
            let (_, mu) = mach.measure(mn, &mut p.env)?;
            Some((mu, mn.cmp, mn.threshold.clone(), VFlag::Dot))
        }
        _ => None,
    };
    Ok(Evaluation {
        value,
        work: budget.used() - used_before,
        trace: mach.trace.unwrap_or_default(),
        top_measure,
    })
}

/// `φ(M, b̄)`: all tuples `ā` over `tuple` with `𝔐 ⊨ φ[params, ā/x̄]`.
pub fn extension(
    m: &FiniteStructure,
    f: &Formula,
    tuple: &[String],
    params: &Valuation,
) -> Result<DefinableSet, SemanticError> {
    extension_in_budget(m, f, tuple, params, &Budget::default())
}

pub fn extension_in_budget(
    m: &FiniteStructure,
    f: &Formula,
    tuple: &[String],
    params: &Valuation,
    budget: &Budget,
) -> Result<DefinableSet, SemanticError> {
    let mut p = prepare(m, f, tuple, params, false)?;
    let k = tuple.len();
    budget.check_size(power_size(m.size(), k))?;
    budget.charge(power_size(m.size(), k) as u64)?;
    let mut mach = Machine {
        m,
        budget,
        memo: HashMap::new(),
        trace: None,
    };
    let mut members = Vec::new();
    for t in crate::structures::all_tuples(m.size(), k) {
        for (&slot, &e) in p.tuple_slots.iter().zip(&t) {
            p.env[slot] = e;
        }
        if mach.eval(&p.root, &mut p.env)? {
            members.push(t);
        }
    }
    Ok(DefinableSet::from_tuples(m.space(), k, &members)?)
}

/// A variable name based on `base` that is not a symbol of `sig` and not in `avoid`.
pub fn fresh_var(sig: &Signature, base: &str, avoid: &BTreeSet<String>) -> String {
    let mut candidate = base.to_string();
    let mut i = 0;
    while sig.kind(&candidate).is_some() || avoid.contains(&candidate) {
        i += 1;
        candidate = format!("{base}{i}");
    }
    candidate
}

/// Truth of `∀x m[y] ≤ q . (x = y)`: every singleton has measure at most `q`.
pub fn check_continuity(m: &FiniteStructure, q: &Rational) -> bool {
    let sig = m.signature();
    let x = fresh_var(sig, "x", &BTreeSet::new());
    let y = fresh_var(sig, "y", &[x.clone()].into_iter().collect());
    let body = Formula::eq(Term::var(&x), Term::var(&y));
    let f = Formula::forall(&x, Formula::meas(&[y.as_str()], Cmp::Le, q.clone(), body).expect("valid measure"));
    eval(m, &f, &Valuation::new()).expect("closed sentence over the structure's own signature")
}

/// Conjunction of `m[x] ≤ 1 . (x = x)` and `¬ m[x] ≤ q . (x = x)` over the
/// supplied `qs`. When `μ(M) < 1` one more instance is added at `q = μ(M)`
/// (or `1/2` if `μ(M) = 0`); it is the instance that fails, so the result
/// is exactly `μ(M) = 1` whatever `qs` is.
pub fn check_probability(m: &FiniteStructure, qs: &[Rational]) -> bool {
    let sig = m.signature();
    let x = fresh_var(sig, "x", &BTreeSet::new());
    let body = || Formula::eq(Term::var(&x), Term::var(&x));
    let le = |q: Rational| Formula::meas(&[x.as_str()], Cmp::Le, q, body()).expect("valid measure");
    let mut instances = vec![le(Rational::one())];
    let mut all_q: Vec<Rational> = qs.to_vec();
    let total = m.space().total();
    if total < &Rational::one() {
        all_q.push(if total.is_positive() { total.clone() } else { Rational::new(1, 2) });
    }
    for q in all_q {
        instances.push(Formula::not(le(q)));
    }
    instances
        .iter()
        .all(|f| eval(m, f, &Valuation::new()).expect("closed sentence"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;
    use crate::structures::library::{cyclic_group, symmetric_group_3};

    fn holds(m: &FiniteStructure, text: &str, s: &Valuation) -> bool {
        let f = parse_formula(text, m.signature()).unwrap();
        eval(m, &f, s).unwrap()
    }

    #[test]
    fn clause_table() {
        let half = Rational::new(1, 2);
        let lt = Rational::new(1, 3);
        for flag in [VFlag::Plus, VFlag::Minus, VFlag::Dot] {
            assert!(measure_clause(Cmp::Lt, &lt, &half, flag));
            assert!(!measure_clause(Cmp::Le, &half, &lt, flag));
        }
        assert!(!measure_clause(Cmp::Lt, &half, &half, VFlag::Dot));
        assert!(measure_clause(Cmp::Lt, &half, &half, VFlag::Minus));
        assert!(!measure_clause(Cmp::Lt, &half, &half, VFlag::Plus));
        assert!(measure_clause(Cmp::Le, &half, &half, VFlag::Dot));
        assert!(measure_clause(Cmp::Le, &half, &half, VFlag::Minus));
        assert!(!measure_clause(Cmp::Le, &half, &half, VFlag::Plus));
    }

    #[test]
    fn centralizer_of_identity_is_everything() {
        let z4 = cyclic_group(4).unwrap();
        assert!(!holds(&z4, "forall y . m[x] < 9/10 . (mul(x,y) = mul(y,x))", &Valuation::new()));
        assert!(holds(&z4, "m[x] <= 0 . ~(x = x)", &Valuation::new()));
    }

    #[test]
    fn s3_transposition_centralizer() {
        let s3 = symmetric_group_3().unwrap();
        // element 1 is a transposition
        let s = Valuation::new().with("g", 1);
        assert!(holds(&s3, "m[x] < 1/2 . (mul(x,g) = mul(g,x))", &s));
        assert!(holds(&s3, "m[x] <= 1/3 . (mul(x,g) = mul(g,x))", &s));
        assert!(!holds(&s3, "m[x] < 1/3 . (mul(x,g) = mul(g,x))", &s));
    }

    #[test]
    fn unbound_and_out_of_range() {
        let z4 = cyclic_group(4).unwrap();
        let f = parse_formula("x = e", z4.signature()).unwrap();
        assert_eq!(eval(&z4, &f, &Valuation::new()), Err(SemanticError::Unbound("x".into())));
        assert!(matches!(
            eval(&z4, &f, &Valuation::new().with("x", 9)),
            Err(SemanticError::OutOfRange { .. })
        ));
    }

    #[test]
    fn extensions() {
        let z4 = cyclic_group(4).unwrap();
        let f = parse_formula("x = e", z4.signature()).unwrap();
        let set = extension(&z4, &f, &["x".into()], &Valuation::new()).unwrap();
        assert_eq!(set.tuples().collect::<Vec<_>>(), vec![vec![0]]);
        assert_eq!(set.measure(), Rational::new(1, 4));

        let g = FiniteStructure::builder(4)
            .relation("E", 2, vec![vec![0, 1], vec![1, 0], vec![1, 2], vec![2, 1], vec![2, 3], vec![3, 2], vec![2, 0], vec![0, 2]])
            .build()
            .unwrap();
        let row = parse_formula("E(x,y)", g.signature()).unwrap();
        let set = extension(&g, &row, &["x".into()], &Valuation::new().with("y", 2)).unwrap();
        assert_eq!(set.tuples().collect::<Vec<_>>(), vec![vec![0], vec![1], vec![3]]);
        let low = parse_formula("m[y] <= 1/4 . E(x,y)", g.signature()).unwrap();
        let set = extension(&g, &low, &["x".into()], &Valuation::new()).unwrap();
        // degrees are 2, 2, 3, 1
        assert_eq!(set.tuples().collect::<Vec<_>>(), vec![vec![3]]);
    }

    #[test]
    fn weighted_measure() {
        let m = FiniteStructure::builder(3)
            .weights(vec![Rational::new(1, 2), Rational::new(1, 3), Rational::new(1, 6)])
            .relation("P", 1, vec![vec![0], vec![2]])
            .build()
            .unwrap();
        assert!(holds(&m, "m[x] <= 2/3 . P(x)", &Valuation::new()));
        assert!(!holds(&m, "m[x] < 2/3 . P(x)", &Valuation::new()));
        assert!(holds(&m, "m[x,y] <= 4/9 . (P(x) & P(y))", &Valuation::new()));
        assert!(!holds(&m, "m[x,y] < 4/9 . (P(x) & P(y))", &Valuation::new()));
    }

    #[test]
    fn continuity_and_probability() {
        let z4 = cyclic_group(4).unwrap();
        assert!(check_continuity(&z4, &Rational::new(1, 4)));
        assert!(!check_continuity(&z4, &Rational::new(1, 5)));
        let atom = FiniteStructure::builder(3)
            .weights(vec![Rational::one(), Rational::zero(), Rational::zero()])
            .build()
            .unwrap();
        assert!(!check_continuity(&atom, &Rational::new(1, 2)));

        let qs = [Rational::new(1, 2), Rational::new(3, 4)];
        assert!(check_probability(&z4, &qs));
        let half = FiniteStructure::builder(2)
            .weights(vec![Rational::new(1, 4), Rational::new(1, 4)])
            .build()
            .unwrap();
        assert!(!check_probability(&half, &[Rational::new(1, 4)]));
        let two = FiniteStructure::builder(2)
            .weights(vec![Rational::one(), Rational::one()])
            .build()
            .unwrap();
        assert!(!check_probability(&two, &qs));
    }

    #[test]
    fn trace_and_memo() {
        let z4 = cyclic_group(4).unwrap();
        let f = parse_formula("forall y . m[x] <= 1/4 . (mul(x,y) = e)", z4.signature()).unwrap();
        let out = eval_with(
            &z4,
            &f,
            &Valuation::new(),
            &EvalOptions {
                trace: true,
                ..EvalOptions::default()
            },
        )
        .unwrap();
        assert!(out.value);
        assert_eq!(out.trace.len(), 4);
        assert!(out.trace.iter().all(|e| e.count == 1 && e.measure == Rational::new(1, 4)));
        let tight = EvalOptions {
            budget: 10,
            trace: false,
        };
        assert!(matches!(eval_with(&z4, &f, &Valuation::new(), &tight), Err(SemanticError::Budget(_))));
    }

    #[test]
    fn top_measure_reported() {
        let z4 = cyclic_group(4).unwrap();
        let f = parse_formula("m[x] <= 1/4 . (x = e)", z4.signature()).unwrap();
        let out = eval_with(&z4, &f, &Valuation::new(), &EvalOptions::default()).unwrap();
        assert!(out.value);
        assert_eq!(
            out.top_measure,
            Some((Rational::new(1, 4), Cmp::Le, Rational::new(1, 4), VFlag::Dot))
        );
    }
}
