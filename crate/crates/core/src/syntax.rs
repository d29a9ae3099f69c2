//! Abstract syntax of approximate measure logic.
//!
//! Formulae are ordinary first-order formulae plus the measure constructor
//! `m[x1,...,xn] ⋈ q . φ`, which binds `x1..xn` like a quantifier and
//! compares the measure of `φ`'s extension against the threshold `q`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("symbol `{0}` declared more than once")]
    DuplicateSymbol(String),
    #[error("symbol `{0}` must have positive arity")]
    ZeroArity(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("`{name}` expects {expected} arguments, found {found}")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("`{0}` is not a function symbol")]
    NotAFunction(String),
    #[error("`{0}` is not a relation symbol")]
    NotARelation(String),
    #[error("variable `{0}` repeated in measure variable list")]
    RepeatedMeasureVar(String),
    #[error("measure variable list is empty")]
    EmptyMeasureVars,
    #[error("threshold {0} is negative")]
    NegativeThreshold(Rational),
    #[error("variable `{0}` clashes with a constant symbol")]
    VariableIsConstant(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolKind {
    Constant,
    Function(usize),
    Relation(usize),
}

/// A first-order signature. Names are unique across all three kinds.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    constants: Vec<String>,
    functions: Vec<(String, usize)>,
    relations: Vec<(String, usize)>,
    index: HashMap<String, SymbolKind>,
}

impl Signature {
    pub fn new(
        constants: Vec<String>,
        functions: Vec<(String, usize)>,
        relations: Vec<(String, usize)>,
    ) -> Result<Self, SyntaxError> {
        let mut sig = Signature::default();
        for c in constants {
            sig.add_constant(&c)?;
        }
        for (f, a) in functions {
            sig.add_function(&f, a)?;
        }
        for (r, a) in relations {
            sig.add_relation(&r, a)?;
        }
        Ok(sig)
    }

    fn claim(&mut self, name: &str, kind: SymbolKind) -> Result<(), SyntaxError> {
        if self.index.contains_key(name) {
            return Err(SyntaxError::DuplicateSymbol(name.to_string()));
        }
        self.index.insert(name.to_string(), kind);
        Ok(())
    }

    pub fn add_constant(&mut self, name: &str) -> Result<(), SyntaxError> {
        self.claim(name, SymbolKind::Constant)?;
        self.constants.push(name.to_string());
        Ok(())
    }

    pub fn add_function(&mut self, name: &str, arity: usize) -> Result<(), SyntaxError> {
        if arity == 0 {
            return Err(SyntaxError::ZeroArity(name.to_string()));
        }
        self.claim(name, SymbolKind::Function(arity))?;
        self.functions.push((name.to_string(), arity));
        Ok(())
    }

    pub fn add_relation(&mut self, name: &str, arity: usize) -> Result<(), SyntaxError> {
        if arity == 0 {
            return Err(SyntaxError::ZeroArity(name.to_string()));
        }
        self.claim(name, SymbolKind::Relation(arity))?;
        self.relations.push((name.to_string(), arity));
        Ok(())
    }

    pub fn kind(&self, name: &str) -> Option<SymbolKind> {
        self.index.get(name).copied()
    }

    pub fn constants(&self) -> &[String] {
        &self.constants
    }

    pub fn functions(&self) -> &[(String, usize)] {
        &self.functions
    }

    pub fn relations(&self) -> &[(String, usize)] {
        &self.relations
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Const(String),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Const(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn check(&self, sig: &Signature) -> Result<(), SyntaxError> {
        match self {
            Term::Var(v) => match sig.kind(v) {
                Some(SymbolKind::Constant) => Err(SyntaxError::VariableIsConstant(v.clone())),
                _ => Ok(()),
            },
            Term::Const(c) => match sig.kind(c) {
                Some(SymbolKind::Constant) => Ok(()),
                _ => Err(SyntaxError::UnknownSymbol(c.clone())),
            },
            Term::App(f, args) => match sig.kind(f) {
                Some(SymbolKind::Function(a)) if a == args.len() => {
                    args.iter().try_for_each(|t| t.check(sig))
                }
                Some(SymbolKind::Function(a)) => Err(SyntaxError::ArityMismatch {
                    name: f.clone(),
                    expected: a,
                    found: args.len(),
                }),
                Some(_) => Err(SyntaxError::NotAFunction(f.clone())),
                None => Err(SyntaxError::UnknownSymbol(f.clone())),
            },
        }
    }
}

/// Comparison used by the core measure constructor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cmp {
    Lt,
    Le,
}

impl Cmp {
    pub fn symbol(self) -> &'static str {
        match self {
            Cmp::Lt => "<",
            Cmp::Le => "<=",
        }
    }
}

/// All four comparisons; `Ge` and `Gt` are abbreviations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AnyCmp {
    Lt,
    Le,
    Ge,
    Gt,
}

/// The body of a measure constructor. Fields are private so that every
/// value satisfies the distinct-variable and nonnegative-threshold rules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Measure {
    vars: Vec<String>,
    cmp: Cmp,
    threshold: Rational,
    body: Box<Formula>,
}

impl Measure {
    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn cmp(&self) -> Cmp {
        self.cmp
    }

    pub fn threshold(&self) -> &Rational {
        &self.threshold
    }

    pub fn body(&self) -> &Formula {
        &self.body
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    Eq(Term, Term),
    Atom(String, Vec<Term>),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
    Meas(Measure),
}

/// Nesting depth of measure constructors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rank(pub usize);

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Formula {
    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Eq(a, b)
    }

    pub fn atom(rel: &str, args: Vec<Term>) -> Formula {
        Formula::Atom(rel.to_string(), args)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn forall(v: &str, f: Formula) -> Formula {
        Formula::Forall(v.to_string(), Box::new(f))
    }

    pub fn exists(v: &str, f: Formula) -> Formula {
        Formula::Exists(v.to_string(), Box::new(f))
    }

    /// `m[vars] cmp threshold . body`, rejecting repeated variables,
    /// an empty variable list and negative thresholds.
    pub fn meas<S: AsRef<str>>(
        vars: &[S],
        cmp: Cmp,
        threshold: Rational,
        body: Formula,
    ) -> Result<Formula, SyntaxError> {
        if vars.is_empty() {
            return Err(SyntaxError::EmptyMeasureVars);
        }
        let mut seen = BTreeSet::new();
        for v in vars {
            if !seen.insert(v.as_ref()) {
                return Err(SyntaxError::RepeatedMeasureVar(v.as_ref().to_string()));
            }
        }
        if threshold.is_negative() {
            return Err(SyntaxError::NegativeThreshold(threshold));
        }
        Ok(Formula::Meas(Measure {
            vars: vars.iter().map(|v| v.as_ref().to_string()).collect(),
            cmp,
            threshold,
            body: Box::new(body),
        }))
    }

    /// Universal closure over the given variables, outermost first.
    pub fn forall_all<S: AsRef<str>>(vars: &[S], body: Formula) -> Formula {
        vars.iter()
            .rev()
            .fold(body, |acc, v| Formula::forall(v.as_ref(), acc))
    }

    pub fn rank(&self) -> Rank {
        Rank(self.rank_value())
    }

    fn rank_value(&self) -> usize {
        match self {
            Formula::Eq(..) | Formula::Atom(..) => 0,
            Formula::Not(f) | Formula::Forall(_, f) | Formula::Exists(_, f) => f.rank_value(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.rank_value().max(b.rank_value())
            }
            Formula::Meas(m) => m.body.rank_value() + 1,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Eq(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Formula::Atom(_, args) => args.iter().for_each(|t| t.collect_vars(out)),
            Formula::Not(f) => f.collect_free(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_free(out);
                b.collect_free(out);
            }
            Formula::Forall(v, f) | Formula::Exists(v, f) => {
                let mut inner = f.free_vars();
                inner.remove(v);
                out.extend(inner);
            }
            Formula::Meas(m) => {
                let mut inner = m.body.free_vars();
                for v in &m.vars {
                    inner.remove(v);
                }
                out.extend(inner);
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Checks every symbol against `sig` (existence, kind, arity).
    pub fn check(&self, sig: &Signature) -> Result<(), SyntaxError> {
        match self {
            Formula::Eq(a, b) => {
                a.check(sig)?;
                b.check(sig)
            }
            Formula::Atom(r, args) => match sig.kind(r) {
                Some(SymbolKind::Relation(a)) if a == args.len() => {
                    args.iter().try_for_each(|t| t.check(sig))
                }
                Some(SymbolKind::Relation(a)) => Err(SyntaxError::ArityMismatch {
                    name: r.clone(),
                    expected: a,
                    found: args.len(),
                }),
                Some(_) => Err(SyntaxError::NotARelation(r.clone())),
                None => Err(SyntaxError::UnknownSymbol(r.clone())),
            },
            Formula::Not(f) => f.check(sig),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.check(sig)?;
                b.check(sig)
            }
            Formula::Forall(v, f) | Formula::Exists(v, f) => {
                if sig.kind(v) == Some(SymbolKind::Constant) {
                    return Err(SyntaxError::VariableIsConstant(v.clone()));
                }
                f.check(sig)
            }
            Formula::Meas(m) => {
                if let Some(v) = m
                    .vars
                    .iter()
                    .find(|v| sig.kind(v) == Some(SymbolKind::Constant))
                {
                    return Err(SyntaxError::VariableIsConstant(v.clone()));
                }
                m.body.check(sig)
            }
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Eq(..) | Formula::Atom(..) => 1,
            Formula::Not(f) | Formula::Forall(_, f) | Formula::Exists(_, f) => 1 + f.size(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                1 + a.size() + b.size()
            }
            Formula::Meas(m) => 1 + m.body.size(),
        }
    }
}

/// Builds a measure formula with any of the four comparisons:
/// `≥ q` becomes `¬ m < q` and `> q` becomes `¬ m ≤ q`; `<` and `≤` are
/// returned as the core constructor unchanged.
pub fn expand_abbrev<S: AsRef<str>>(
    vars: &[S],
    cmp: AnyCmp,
    q: Rational,
    body: Formula,
) -> Result<Formula, SyntaxError> {
    match cmp {
        AnyCmp::Lt => Formula::meas(vars, Cmp::Lt, q, body),
        AnyCmp::Le => Formula::meas(vars, Cmp::Le, q, body),
        AnyCmp::Ge => Ok(Formula::not(Formula::meas(vars, Cmp::Lt, q, body)?)),
        AnyCmp::Gt => Ok(Formula::not(Formula::meas(vars, Cmp::Le, q, body)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &str) -> Formula {
        Formula::atom("P", vec![Term::var(v)])
    }

    fn half() -> Rational {
        Rational::new(1, 2)
    }

    #[test]
    fn rank_examples() {
        assert_eq!(p("x").rank(), Rank(0));
        let m = Formula::meas(&["x"], Cmp::Lt, half(), p("x")).unwrap();
        assert_eq!(m.rank(), Rank(1));
        let inner = Formula::meas(
            &["z"],
            Cmp::Lt,
            Rational::new(1, 4),
            Formula::atom("R", vec![Term::var("x"), Term::var("z"), Term::var("y")]),
        )
        .unwrap();
        let outer = Formula::forall(
            "y",
            Formula::meas(&["x"], Cmp::Le, Rational::new(1, 3), inner).unwrap(),
        );
        assert_eq!(outer.rank(), Rank(2));
        let mixed = Formula::or(p("x"), m);
        assert_eq!(mixed.rank(), Rank(1));
    }

    #[test]
    fn free_vars_examples() {
        let rxy = Formula::atom("R", vec![Term::var("x"), Term::var("y")]);
        let m = Formula::meas(&["x"], Cmp::Lt, half(), rxy.clone()).unwrap();
        assert_eq!(m.free_vars(), BTreeSet::from(["y".to_string()]));
        let conj = Formula::and(p("x"), Formula::atom("Q", vec![Term::var("y")]));
        assert_eq!(
            conj.free_vars(),
            BTreeSet::from(["x".to_string(), "y".to_string()])
        );
        let closed = Formula::forall(
            "y",
            Formula::meas(&["x"], Cmp::Le, Rational::zero(), rxy).unwrap(),
        );
        assert!(closed.free_vars().is_empty());
    }

    #[test]
    fn constructor_rejects_bad_measures() {
        assert_eq!(
            Formula::meas(&["x", "x"], Cmp::Lt, half(), p("x")),
            Err(SyntaxError::RepeatedMeasureVar("x".into()))
        );
        assert!(matches!(
            Formula::meas(&["x"], Cmp::Lt, Rational::new(-1, 2), p("x")),
            Err(SyntaxError::NegativeThreshold(_))
        ));
        let empty: [&str; 0] = [];
        assert_eq!(
            Formula::meas(&empty, Cmp::Lt, half(), p("x")),
            Err(SyntaxError::EmptyMeasureVars)
        );
    }

    #[test]
    fn abbreviations_expand_to_negations() {
        let ge = expand_abbrev(&["x"], AnyCmp::Ge, half(), p("x")).unwrap();
        assert_eq!(
            ge,
            Formula::not(Formula::meas(&["x"], Cmp::Lt, half(), p("x")).unwrap())
        );
        let gt = expand_abbrev(&["x"], AnyCmp::Gt, Rational::zero(), p("x")).unwrap();
        assert_eq!(
            gt,
            Formula::not(Formula::meas(&["x"], Cmp::Le, Rational::zero(), p("x")).unwrap())
        );
        let core = expand_abbrev(&["x"], AnyCmp::Lt, half(), p("x")).unwrap();
        assert_eq!(core, Formula::meas(&["x"], Cmp::Lt, half(), p("x")).unwrap());
        assert_eq!(ge.rank(), core.rank());
    }

    #[test]
    fn signature_rejects_duplicates_and_zero_arity() {
        assert!(Signature::new(vec!["e".into()], vec![("e".into(), 2)], vec![]).is_err());
        assert!(Signature::new(vec![], vec![], vec![("P".into(), 0)]).is_err());
        let sig = Signature::new(vec!["e".into()], vec![("mul".into(), 2)], vec![]).unwrap();
        assert_eq!(sig.kind("mul"), Some(SymbolKind::Function(2)));
    }

    #[test]
    fn check_reports_arity_mismatch() {
        let sig = Signature::new(vec![], vec![], vec![("P".into(), 1)]).unwrap();
        let bad = Formula::atom("P", vec![Term::var("x"), Term::var("y")]);
        assert!(matches!(
            bad.check(&sig),
            Err(SyntaxError::ArityMismatch { .. })
        ));
        assert!(p("x").check(&sig).is_ok());
    }
}
