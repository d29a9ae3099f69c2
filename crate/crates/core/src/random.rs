//! Seeded generators for structures and formulae.
//!
//! Everything here takes an explicit RNG so that a fixed seed reproduces the
//! same corpus bit for bit.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::rational::Rational;
use crate::structures::{FiniteStructure, StructureError};
use crate::syntax::{expand_abbrev, AnyCmp, Formula, Signature, Term};

/// A random structure on `n` elements over the fixed signature
/// `c; f/1; P/1, Q/1, E/2`. Half the time the measure is counting, otherwise
/// random weights with denominators up to 6, some of them zero.
pub fn random_structure<R: Rng>(rng: &mut R, n: usize) -> Result<FiniteStructure, StructureError> {
    let mut b = FiniteStructure::builder(n).constant("c", rng.gen_range(0..n));
    let table: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
    b = b.function("f", 1, table);
    for name in ["P", "Q"] {
        let p = rng.gen_range(1..=4) as f64 / 5.0;
        let tuples = (0..n).filter(|_| rng.gen_bool(p)).map(|a| vec![a]).collect();
        b = b.relation(name, 1, tuples);
    }
    let p = rng.gen_range(1..=4) as f64 / 5.0;
    let mut edges = Vec::new();
    for a in 0..n {
        for c in 0..n {
            if rng.gen_bool(p) {
                edges.push(vec![a, c]);
            }
        }
    }
    b = b.relation("E", 2, edges);
    if rng.gen_bool(0.5) {
        let weights = (0..n)
            .map(|_| {
                if rng.gen_bool(0.2) {
                    Rational::zero()
                } else {
                    Rational::new(rng.gen_range(1..=6), rng.gen_range(1..=6))
                }
            })
            .collect();
        b = b.weights(weights);
    }
    b.build()
}

/// Shape limits for [`FormulaGen`].
#[derive(Debug, Clone, Copy)]
pub struct FormulaShape {
    pub depth: usize,
    pub max_rank: usize,
    /// Largest measure-variable tuple.
    pub max_meas_vars: usize,
    /// Largest denominator for thresholds.
    pub max_den: i64,
}

impl Default for FormulaShape {
    fn default() -> Self {
        FormulaShape {
            depth: 3,
            max_rank: 2,
            max_meas_vars: 2,
            max_den: 12,
        }
    }
}

/// Random formulae over a signature. Bound variables are drawn fresh
/// (`u0`, `u1`, ...) unless `reuse_names` is set, in which case binders may
/// shadow names already in scope.
pub struct FormulaGen<'a> {
    sig: &'a Signature,
    shape: FormulaShape,
    counter: usize,
    pub reuse_names: bool,
    pub allow_ge_gt: bool,
}

impl<'a> FormulaGen<'a> {
    pub fn new(sig: &'a Signature, shape: FormulaShape) -> Self {
        FormulaGen {
            sig,
            shape,
            counter: 0,
            reuse_names: false,
            allow_ge_gt: true,
        }
    }

    fn fresh<R: Rng>(&mut self, rng: &mut R, scope: &[String]) -> String {
        if self.reuse_names && !scope.is_empty() && rng.gen_bool(0.3) {
            return scope.choose(rng).unwrap().clone();
        }
        loop {
            let name = format!("u{}", self.counter);
            self.counter += 1;
            if self.sig.kind(&name).is_none() && !scope.contains(&name) {
                return name;
            }
        }
    }

    pub fn threshold<R: Rng>(&self, rng: &mut R) -> Rational {
        let d = rng.gen_range(1..=self.shape.max_den);
        Rational::new(rng.gen_range(0..=d), d)
    }

    /// A term over `scope`, with at most one level of function application.
    pub fn term<R: Rng>(&self, rng: &mut R, scope: &[String], allow_app: bool) -> Term {
        let consts = self.sig.constants();
        let funcs = self.sig.functions();
        loop {
            match rng.gen_range(0..6) {
                0..=2 if !scope.is_empty() => return Term::Var(scope.choose(rng).unwrap().clone()),
                3 if !consts.is_empty() => return Term::Const(consts.choose(rng).unwrap().clone()),
                4 | 5 if allow_app && !funcs.is_empty() => {
                    let (f, arity) = funcs.choose(rng).unwrap();
                    let args = (0..*arity).map(|_| self.term(rng, scope, false)).collect();
                    return Term::App(f.clone(), args);
                }
                _ if scope.is_empty() && consts.is_empty() => {
                    panic!("no closed terms available: empty scope and no constants")
                }
                _ => {}
            }
        }
    }

    fn leaf<R: Rng>(&self, rng: &mut R, scope: &[String]) -> Formula {
        let rels = self.sig.relations();
        if !rels.is_empty() && rng.gen_bool(0.65) {
            let (r, arity) = rels.choose(rng).unwrap();
            let args = (0..*arity).map(|_| self.term(rng, scope, true)).collect();
            Formula::Atom(r.clone(), args)
        } else {
            Formula::Eq(self.term(rng, scope, true), self.term(rng, scope, true))
        }
    }

    /// A formula whose free variables are among `scope`. Requires `scope`
    /// to be nonempty or the signature to have a constant.
    pub fn formula<R: Rng>(&mut self, rng: &mut R, scope: &[String]) -> Formula {
        let (depth, rank) = (self.shape.depth, self.shape.max_rank);
        self.build(rng, scope, depth, rank)
    }

    fn build<R: Rng>(&mut self, rng: &mut R, scope: &[String], depth: usize, rank: usize) -> Formula {
        if depth == 0 {
            if scope.is_empty() && self.sig.constants().is_empty() {
                let v = self.fresh(rng, scope);
                let leaf = self.leaf(rng, std::slice::from_ref(&v));
                return Formula::exists(&v, leaf);
            }
            return self.leaf(rng, scope);
        }
        let needs_binder = scope.is_empty() && self.sig.constants().is_empty();
        let choice = if needs_binder {
            rng.gen_range(5..8)
        } else {
            rng.gen_range(0..9)
        };
        match choice {
            0 => self.leaf(rng, scope),
            1 => Formula::not(self.build(rng, scope, depth - 1, rank)),
            2 => Formula::and(
                self.build(rng, scope, depth - 1, rank),
                self.build(rng, scope, depth - 1, rank),
            ),
            3 => Formula::or(
                self.build(rng, scope, depth - 1, rank),
                self.build(rng, scope, depth - 1, rank),
            ),
            4 => Formula::implies(
                self.build(rng, scope, depth - 1, rank),
                self.build(rng, scope, depth - 1, rank),
            ),
            5 | 6 => {
                let v = self.fresh(rng, scope);
                let mut inner = scope.to_vec();
                if !inner.contains(&v) {
                    inner.push(v.clone());
                }
                let body = self.build(rng, &inner, depth - 1, rank);
                if choice == 5 {
                    Formula::forall(&v, body)
                } else {
                    Formula::exists(&v, body)
                }
            }
            _ if rank > 0 => {
                let k = rng.gen_range(1..=self.shape.max_meas_vars);
                let mut vars: Vec<String> = Vec::new();
                let mut inner = scope.to_vec();
                while vars.len() < k {
                    let v = self.fresh(rng, &inner);
                    if vars.contains(&v) {
                        continue;
                    }
                    if !inner.contains(&v) {
                        inner.push(v.clone());
                    }
                    vars.push(v);
                }
                let body = self.build(rng, &inner, depth - 1, rank - 1);
                let cmp = if self.allow_ge_gt {
                    *[AnyCmp::Lt, AnyCmp::Le, AnyCmp::Ge, AnyCmp::Gt].choose(rng).unwrap()
                } else {
                    *[AnyCmp::Lt, AnyCmp::Le].choose(rng).unwrap()
                };
                let q = self.threshold(rng);
                expand_abbrev(&vars, cmp, q, body).expect("distinct measure variables")
            }
            _ => {
                let v = self.fresh(rng, scope);
                let mut inner = scope.to_vec();
                if !inner.contains(&v) {
                    inner.push(v.clone());
                }
                Formula::exists(&v, self.build(rng, &inner, depth - 1, rank))
            }
        }
    }
}
