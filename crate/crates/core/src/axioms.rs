//! Axiom schemes as data, their instantiation, and empirical soundness checks.
//!
//! A scheme is a [`Template`] with holes for `φ` and `ψ`, measure nodes over
//! variable groups (`x̄`, `ȳ`, `x̄ȳ`, a permutation of `x̄`) and thresholds
//! written as [`RatExpr`]s over the parameters `t, t', q, r`. Rational atoms
//! such as `t < qr` become instantiation side conditions.

use std::collections::BTreeSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::budget::Budget;
use crate::parser::print_formula;
use crate::random::{FormulaGen, FormulaShape};
use crate::rational::Rational;
use crate::semantics::{eval_in_budget, extension_in_budget, SemanticError, Valuation};
use crate::structures::{all_tuples, FiniteStructure};
use crate::syntax::{expand_abbrev, AnyCmp, Formula, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AxiomError {
    #[error("unknown scheme `{0}`")]
    UnknownScheme(String),
    #[error("side condition violated: {0}")]
    SideCondition(String),
    #[error("missing parameter `{0}`")]
    MissingParameter(&'static str),
    #[error("variable capture: `{var}` may not occur free in {hole}")]
    VariableCapture { var: String, hole: &'static str },
    #[error("scheme needs {0}")]
    BadShape(String),
    #[error(transparent)]
    Semantic(#[from] SemanticError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeGroup {
    Aml,
    I,
    F,
    FPlus,
}

impl SchemeGroup {
    pub fn name(self) -> &'static str {
        match self {
            SchemeGroup::Aml => "AML",
            SchemeGroup::I => "I",
            SchemeGroup::F => "F",
            SchemeGroup::FPlus => "F+",
        }
    }

    /// Parses a comma-separated list such as `AML,I,F,F+`.
    pub fn parse_list(text: &str) -> Result<Vec<SchemeGroup>, AxiomError> {
        let mut out = Vec::new();
        for part in text.split(',').map(str::trim) {
            let g = match part {
                "AML" | "aml" => SchemeGroup::Aml,
                "I" | "i" => SchemeGroup::I,
                "F" | "f" => SchemeGroup::F,
                "F+" | "f+" => SchemeGroup::FPlus,
                other => return Err(AxiomError::UnknownScheme(other.to_string())),
            };
            if !out.contains(&g) {
                out.push(g);
            }
        }
        Ok(out)
    }
}

/// Which variable tuple a measure node or closure binds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarGroup {
    X,
    Y,
    XY,
    SigmaX,
}

/// Threshold expressions over the scheme parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RatExpr {
    T,
    T2,
    Q,
    R,
    Zero,
    Add(Box<RatExpr>, Box<RatExpr>),
    Mul(Box<RatExpr>, Box<RatExpr>),
}

impl RatExpr {
    fn add(a: RatExpr, b: RatExpr) -> RatExpr {
        RatExpr::Add(Box::new(a), Box::new(b))
    }

    fn mul(a: RatExpr, b: RatExpr) -> RatExpr {
        RatExpr::Mul(Box::new(a), Box::new(b))
    }

    pub fn eval(&self, p: &SchemeParams) -> Result<Rational, AxiomError> {
        let get = |v: &Option<Rational>, name| v.clone().ok_or(AxiomError::MissingParameter(name));
        Ok(match self {
            RatExpr::T => get(&p.t, "t")?,
            RatExpr::T2 => get(&p.t2, "t'")?,
            RatExpr::Q => get(&p.q, "q")?,
            RatExpr::R => get(&p.r, "r")?,
            RatExpr::Zero => Rational::zero(),
            RatExpr::Add(a, b) => a.eval(p)? + b.eval(p)?,
            RatExpr::Mul(a, b) => a.eval(p)? * b.eval(p)?,
        })
    }

    fn collect(&self, out: &mut BTreeSet<&'static str>) {
        match self {
            RatExpr::T => {
                out.insert("t");
            }
            RatExpr::T2 => {
                out.insert("t'");
            }
            RatExpr::Q => {
                out.insert("q");
            }
            RatExpr::R => {
                out.insert("r");
            }
            RatExpr::Zero => {}
            RatExpr::Add(a, b) | RatExpr::Mul(a, b) => {
                a.collect(out);
                b.collect(out);
            }
        }
    }
}

impl fmt::Display for RatExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RatExpr::T => f.write_str("t"),
            RatExpr::T2 => f.write_str("t'"),
            RatExpr::Q => f.write_str("q"),
            RatExpr::R => f.write_str("r"),
            RatExpr::Zero => f.write_str("0"),
            RatExpr::Add(a, b) => write!(f, "({a} + {b})"),
            RatExpr::Mul(a, b) => write!(f, "{a}{b}"),
        }
    }
}

/// Scheme body with holes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Template {
    Phi,
    Psi,
    /// `x₁ ≠ x₁` for the first variable of `x̄`.
    FirstXNeqSelf,
    Not(Box<Template>),
    And(Vec<Template>),
    Or(Box<Template>, Box<Template>),
    Implies(Box<Template>, Box<Template>),
    ForallX(Box<Template>),
    Meas(VarGroup, AnyCmp, RatExpr, Box<Template>),
}

fn meas(g: VarGroup, c: AnyCmp, e: RatExpr, body: Template) -> Template {
    Template::Meas(g, c, e, Box::new(body))
}

fn imp(a: Template, b: Template) -> Template {
    Template::Implies(Box::new(a), Box::new(b))
}

fn conj(parts: Vec<Template>) -> Template {
    Template::And(parts)
}

fn both() -> Template {
    conj(vec![Template::Phi, Template::Psi])
}

fn either() -> Template {
    Template::Or(Box::new(Template::Phi), Box::new(Template::Psi))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SideCondition {
    Less(RatExpr, RatExpr),
    Positive(RatExpr),
}

impl SideCondition {
    fn check(&self, p: &SchemeParams) -> Result<(), AxiomError> {
        match self {
            SideCondition::Less(a, b) => {
                let (va, vb) = (a.eval(p)?, b.eval(p)?);
                if va < vb {
                    Ok(())
                } else {
                    Err(AxiomError::SideCondition(format!("{a} < {b} fails: {va} >= {vb}")))
                }
            }
            SideCondition::Positive(a) => {
                let v = a.eval(p)?;
                if v.is_positive() {
                    Ok(())
                } else {
                    Err(AxiomError::SideCondition(format!("{a} > 0 fails: {a} = {v}")))
                }
            }
        }
    }
}

/// How `φ` and `ψ` relate to the variable tuples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    /// `φ(x̄, z̄)`, `ψ(x̄, z̄)`.
    Single,
    /// `φ(x̄, z̄)`, `ψ(ȳ, z̄)`.
    Product,
    /// `φ(x̄, ȳ, z̄)`, `ψ(x̄, z̄)`.
    Fubini,
    /// `φ(x̄, z̄)` with a permutation of `x̄`.
    Permutation,
}

#[derive(Debug, Clone)]
pub struct Scheme {
    pub id: &'static str,
    pub group: SchemeGroup,
    pub shape: Shape,
    pub template: Template,
    pub side: Vec<SideCondition>,
}

impl Scheme {
    /// Parameter names the scheme reads.
    pub fn parameters(&self) -> BTreeSet<&'static str> {
        fn walk(t: &Template, out: &mut BTreeSet<&'static str>) {
            match t {
                Template::Phi | Template::Psi | Template::FirstXNeqSelf => {}
                Template::Not(a) | Template::ForallX(a) => walk(a, out),
                Template::And(v) => v.iter().for_each(|a| walk(a, out)),
                Template::Or(a, b) | Template::Implies(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                Template::Meas(_, _, e, body) => {
                    e.collect(out);
                    walk(body, out);
                }
            }
        }
        let mut out = BTreeSet::new();
        walk(&self.template, &mut out);
        for s in &self.side {
            match s {
                SideCondition::Less(a, b) => {
                    a.collect(&mut out);
                    b.collect(&mut out);
                }
                SideCondition::Positive(a) => a.collect(&mut out),
            }
        }
        out
    }

    fn uses_psi(&self) -> bool {
        fn walk(t: &Template) -> bool {
            match t {
                Template::Psi => true,
                Template::Phi | Template::FirstXNeqSelf => false,
                Template::Not(a) | Template::ForallX(a) | Template::Meas(_, _, _, a) => walk(a),
                Template::And(v) => v.iter().any(walk),
                Template::Or(a, b) | Template::Implies(a, b) => walk(a) || walk(b),
            }
        }
        walk(&self.template)
    }
}

/// The full scheme table.
pub fn schemes() -> Vec<Scheme> {
    use AnyCmp::{Ge, Gt, Le, Lt};
    use RatExpr::{Q, R, T, T2};
    use Template::{Phi, Psi};
    use VarGroup::{SigmaX, X, XY, Y};
    let s = |id, group, shape, template, side| Scheme {
        id,
        group,
        shape,
        template,
        side,
    };
    let aml = SchemeGroup::Aml;
    let mut out = vec![
        s("Emptyset-a", aml, Shape::Single, meas(X, Le, RatExpr::Zero, Template::FirstXNeqSelf), vec![]),
        s("Emptyset-b", aml, Shape::Single, meas(X, Ge, RatExpr::Zero, Template::FirstXNeqSelf), vec![]),
    ];
    for (id, c) in [("Comparability-a", Lt), ("Comparability-b", Le)] {
        out.push(s(
            id,
            aml,
            Shape::Single,
            imp(
                Template::ForallX(Box::new(imp(Phi, Psi))),
                imp(meas(X, c, T, Psi), meas(X, c, T, Phi)),
            ),
            vec![],
        ));
    }
    out.push(s(
        "Coherence-a",
        aml,
        Shape::Single,
        imp(meas(X, Lt, T, Phi), meas(X, Le, T, Phi)),
        vec![],
    ));
    out.push(s(
        "Coherence-b",
        aml,
        Shape::Single,
        imp(meas(X, Le, T, Phi), meas(X, Lt, T2, Phi)),
        vec![SideCondition::Less(T, T2)],
    ));
    let sum = || RatExpr::add(T, T2);
    for (id, c1, c2, c3) in [("Additivity-a", Le, Le, Le), ("Additivity-b", Le, Lt, Lt)] {
        out.push(s(
            id,
            aml,
            Shape::Single,
            imp(conj(vec![meas(X, c1, T, Phi), meas(X, c2, T2, Psi)]), meas(X, c3, sum(), either())),
            vec![],
        ));
    }
    for (id, c1, c2, c3) in [("Additivity-c", Ge, Ge, Ge), ("Additivity-d", Ge, Gt, Gt)] {
        out.push(s(
            id,
            aml,
            Shape::Single,
            imp(
                conj(vec![meas(X, c1, T, Phi), meas(X, c2, T2, Psi), meas(X, Le, RatExpr::Zero, both())]),
                meas(X, c3, sum(), either()),
            ),
            vec![],
        ));
    }
    let prod = || RatExpr::mul(T, T2);
    for (id, c1, c2, c3, positive) in [
        ("Product-a", Le, Le, Le, false),
        ("Product-b", Le, Lt, Lt, true),
        ("Product-c", Ge, Ge, Ge, false),
        ("Product-d", Ge, Gt, Gt, true),
    ] {
        out.push(s(
            id,
            aml,
            Shape::Product,
            imp(conj(vec![meas(X, c1, T, Phi), meas(Y, c2, T2, Psi)]), meas(XY, c3, prod(), both())),
            if positive { vec![SideCondition::Positive(T)] } else { vec![] },
        ));
    }
    for (id, c) in [("I-a", Le), ("I-b", Lt)] {
        out.push(s(
            id,
            SchemeGroup::I,
            Shape::Permutation,
            imp(meas(X, c, T, Phi), meas(SigmaX, c, T, Phi)),
            vec![],
        ));
    }
    let qr = || RatExpr::mul(Q, R);
    let fubini = |inner: AnyCmp, outer: AnyCmp, concl: AnyCmp, thr: RatExpr| {
        imp(
            conj(vec![
                Template::ForallX(Box::new(imp(Psi, meas(Y, inner, R, Phi)))),
                meas(X, outer, Q, Psi),
            ]),
            meas(XY, concl, thr, both()),
        )
    };
    out.push(s(
        "F-a",
        SchemeGroup::F,
        Shape::Fubini,
        fubini(Ge, Ge, Gt, T),
        vec![SideCondition::Less(T, qr())],
    ));
    out.push(s(
        "F-b",
        SchemeGroup::F,
        Shape::Fubini,
        fubini(Le, Le, Lt, T),
        vec![SideCondition::Less(qr(), T)],
    ));
    let pos = SideCondition::Positive;
    for (id, inner, outer, concl, side) in [
        ("F+-a", Ge, Ge, Ge, vec![]),
        ("F+-b", Gt, Ge, Gt, vec![pos(Q)]),
        ("F+-c", Ge, Gt, Gt, vec![pos(R)]),
        ("F+-d", Le, Le, Le, vec![]),
        ("F+-e", Lt, Le, Lt, vec![pos(Q), pos(R)]),
        ("F+-f", Le, Lt, Lt, vec![pos(R)]),
    ] {
        out.push(s(id, SchemeGroup::FPlus, Shape::Fubini, fubini(inner, outer, concl, qr()), side));
    }
    out
}

pub fn scheme(id: &str) -> Result<Scheme, AxiomError> {
    let norm = id.replace('⁺', "+");
    schemes()
        .into_iter()
        .find(|s| s.id == norm)
        .ok_or_else(|| AxiomError::UnknownScheme(id.to_string()))
}

/// Rational parameters and the coordinate permutation for scheme I.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SchemeParams {
    pub t: Option<Rational>,
    pub t2: Option<Rational>,
    pub q: Option<Rational>,
    pub r: Option<Rational>,
    pub perm: Option<Vec<usize>>,
}

impl fmt::Display for SchemeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (name, v) in [("t", &self.t), ("t'", &self.t2), ("q", &self.q), ("r", &self.r)] {
            if let Some(v) = v {
                parts.push(format!("{name}={v}"));
            }
        }
        if let Some(p) = &self.perm {
            let p: Vec<String> = p.iter().map(|i| (i + 1).to_string()).collect();
            parts.push(format!("sigma=({})", p.join(" ")));
        }
        f.write_str(&parts.join(" "))
    }
}

/// A fully substituted scheme instance.
#[derive(Debug, Clone)]
pub struct SchemeInstance {
    pub scheme: &'static str,
    pub phi: Formula,
    pub psi: Option<Formula>,
    pub params: SchemeParams,
    /// Parameter variables `z̄`, in closure order.
    pub zvars: Vec<String>,
    /// Body under the closure.
    pub matrix: Formula,
    /// `∀z̄ matrix`.
    pub sentence: Formula,
}

impl SchemeInstance {
    pub fn summary(&self) -> String {
        let mut s = format!("phi={}", print_formula(&self.phi));
        if let Some(psi) = &self.psi {
            s.push_str(&format!(" psi={}", print_formula(psi)));
        }
        let p = self.params.to_string();
        if !p.is_empty() {
            s.push(' ');
            s.push_str(&p);
        }
        s
    }
}

struct Vars<'a> {
    x: &'a [String],
    y: &'a [String],
    perm: Option<&'a [usize]>,
}

impl Vars<'_> {
    fn group(&self, g: VarGroup) -> Result<Vec<String>, AxiomError> {
        Ok(match g {
            VarGroup::X => self.x.to_vec(),
            VarGroup::Y => self.y.to_vec(),
            VarGroup::XY => self.x.iter().chain(self.y).cloned().collect(),
            VarGroup::SigmaX => {
                let p = self.perm.ok_or(AxiomError::MissingParameter("sigma"))?;
                p.iter().map(|&i| self.x[i].clone()).collect()
            }
        })
    }
}

fn fill(
    t: &Template,
    vars: &Vars<'_>,
    phi: &Formula,
    psi: Option<&Formula>,
    p: &SchemeParams,
) -> Result<Formula, AxiomError> {
    Ok(match t {
        Template::Phi => phi.clone(),
        Template::Psi => psi.cloned().ok_or(AxiomError::BadShape("a formula for psi".into()))?,
        Template::FirstXNeqSelf => {
            let x = Term::var(&vars.x[0]);
            Formula::not(Formula::eq(x.clone(), x))
        }
        Template::Not(a) => Formula::not(fill(a, vars, phi, psi, p)?),
        Template::And(parts) => {
            let mut it = parts.iter();
            let first = fill(it.next().expect("nonempty conjunction"), vars, phi, psi, p)?;
            it.try_fold(first, |acc, t| Ok::<_, AxiomError>(Formula::and(acc, fill(t, vars, phi, psi, p)?)))?
        }
        Template::Or(a, b) => Formula::or(fill(a, vars, phi, psi, p)?, fill(b, vars, phi, psi, p)?),
        Template::Implies(a, b) => Formula::implies(fill(a, vars, phi, psi, p)?, fill(b, vars, phi, psi, p)?),
        Template::ForallX(a) => Formula::forall_all(vars.x, fill(a, vars, phi, psi, p)?),
        Template::Meas(g, c, e, body) => {
            let vs = vars.group(*g)?;
            let q = e.eval(p)?;
            expand_abbrev(&vs, *c, q, fill(body, vars, phi, psi, p)?).map_err(|e| AxiomError::BadShape(e.to_string()))?
        }
    })
}

/// Substitutes `φ`, `ψ` and the parameters into `scheme`, checking side
/// conditions and that no variable of `φ` or `ψ` would be captured by a
/// binder it is not meant for. The result is closed by `∀` over the
/// remaining free variables in sorted order.
pub fn instantiate(
    scheme: &Scheme,
    x: &[String],
    y: &[String],
    phi: &Formula,
    psi: Option<&Formula>,
    params: &SchemeParams,
) -> Result<SchemeInstance, AxiomError> {
    if x.is_empty() {
        return Err(AxiomError::BadShape("a nonempty x tuple".into()));
    }
    let needs_y = matches!(scheme.shape, Shape::Product | Shape::Fubini);
    if needs_y && y.is_empty() {
        return Err(AxiomError::BadShape("a nonempty y tuple".into()));
    }
    let all: Vec<&String> = x.iter().chain(if needs_y { y } else { &[] }).collect();
    let distinct: BTreeSet<&String> = all.iter().copied().collect();
    if distinct.len() != all.len() {
        return Err(AxiomError::BadShape("distinct tuple variables".into()));
    }
    for s in &scheme.side {
        s.check(params)?;
    }
    for name in scheme.parameters() {
        let present = match name {
            "t" => params.t.is_some(),
            "t'" => params.t2.is_some(),
            "q" => params.q.is_some(),
            "r" => params.r.is_some(),
            _ => true,
        };
        if !present {
            return Err(AxiomError::MissingParameter(name));
        }
    }
    if let Some(v) = [&params.t, &params.t2, &params.q, &params.r]
        .into_iter()
        .flatten()
        .find(|v| v.is_negative())
    {
        return Err(AxiomError::SideCondition(format!("parameter {v} is negative")));
    }
    let psi = if scheme.uses_psi() {
        Some(psi.ok_or(AxiomError::BadShape("a formula for psi".into()))?)
    } else {
        None
    };
    let forbid = |f: &Formula, banned: &[String], hole: &'static str| -> Result<(), AxiomError> {
        let free = f.free_vars();
        match banned.iter().find(|v| free.contains(*v)) {
            Some(v) => Err(AxiomError::VariableCapture { var: v.clone(), hole }),
            None => Ok(()),
        }
    };
    match scheme.shape {
        Shape::Single => {}
        Shape::Product => {
            forbid(phi, y, "phi")?;
            if let Some(psi) = psi {
                forbid(psi, x, "psi")?;
            }
        }
        Shape::Fubini => {
            if let Some(psi) = psi {
                forbid(psi, y, "psi")?;
            }
        }
        Shape::Permutation => {
            let p = params.perm.as_ref().ok_or(AxiomError::MissingParameter("sigma"))?;
            let mut sorted = p.clone();
            sorted.sort_unstable();
            if sorted != (0..x.len()).collect::<Vec<_>>() {
                return Err(AxiomError::BadShape(format!("a permutation of 0..{}", x.len())));
            }
        }
    }
    let vars = Vars {
        x,
        y: if needs_y { y } else { &[] },
        perm: params.perm.as_deref(),
    };
    let matrix = fill(&scheme.template, &vars, phi, psi, params)?;
    let zvars: Vec<String> = matrix.free_vars().into_iter().collect();
    let sentence = Formula::forall_all(&zvars, matrix.clone());
    Ok(SchemeInstance {
        scheme: scheme.id,
        phi: phi.clone(),
        psi: psi.cloned(),
        params: params.clone(),
        zvars,
        matrix,
        sentence,
    })
}

/// Verdict for one instance.
#[derive(Debug, Clone)]
pub struct InstanceResult {
    pub scheme: &'static str,
    pub summary: String,
    pub holds: bool,
    /// Parameter valuation at which the matrix fails.
    pub witness: Option<Valuation>,
}

#[derive(Debug, Clone, Default)]
pub struct SoundnessReport {
    pub results: Vec<InstanceResult>,
}

impl SoundnessReport {
    pub fn total(&self) -> usize {
        self.results.len()
    }

    pub fn held(&self) -> usize {
        self.results.iter().filter(|r| r.holds).count()
    }

    pub fn failures(&self) -> impl Iterator<Item = &InstanceResult> {
        self.results.iter().filter(|r| !r.holds)
    }

    pub fn all_hold(&self) -> bool {
        self.results.iter().all(|r| r.holds)
    }
}

/// Evaluates every instance in `m`. Failures carry the first falsifying
/// valuation of the closure variables in lexicographic order.
pub fn check_soundness(
    m: &FiniteStructure,
    instances: &[SchemeInstance],
    budget: &Budget,
) -> Result<SoundnessReport, SemanticError> {
    let results = instances
        .par_iter()
        .map(|inst| check_instance(m, inst, budget))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SoundnessReport { results })
}

fn check_instance(
    m: &FiniteStructure,
    inst: &SchemeInstance,
    budget: &Budget,
) -> Result<InstanceResult, SemanticError> {
    let holds = eval_in_budget(m, &inst.sentence, &Valuation::new(), budget, false)?.value;
    let mut witness = None;
    if !holds {
        for t in all_tuples(m.size(), inst.zvars.len()) {
            let s: Valuation = inst.zvars.iter().zip(&t).map(|(v, &e)| (v.as_str(), e)).collect();
            if !eval_in_budget(m, &inst.matrix, &s, budget, false)?.value {
                witness = Some(s);
                break;
            }
        }
    }
    Ok(InstanceResult {
        scheme: inst.scheme,
        summary: inst.summary(),
        holds,
        witness,
    })
}

/// Seeded generator of scheme instances tuned to a structure: thresholds
/// are drawn near the measures actually realised so that boundary cases
/// (`t = μ`, `t = μ ± 1/d`) come up often.
pub struct InstanceGenerator {
    rng: ChaCha8Rng,
    max_den: i64,
}

impl InstanceGenerator {
    pub fn new(seed: u64) -> Self {
        InstanceGenerator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            max_den: 12,
        }
    }

    fn random_rational(&mut self) -> Rational {
        let d = self.rng.gen_range(1..=self.max_den);
        Rational::new(self.rng.gen_range(0..=d), d)
    }

    /// A threshold near `mu` or, a quarter of the time, uniformly random.
    fn near(&mut self, mu: &Rational) -> Rational {
        let d = self.rng.gen_range(1..=self.max_den);
        let step = Rational::new(1, d);
        let v = match self.rng.gen_range(0..4) {
            0 => mu.clone(),
            1 => mu + &step,
            2 => mu - &step,
            _ => self.random_rational(),
        };
        if v.is_negative() {
            Rational::zero()
        } else {
            v
        }
    }

    fn probe_valuation(&mut self, m: &FiniteStructure, z: &[String]) -> Valuation {
        z.iter().map(|v| (v.as_str(), self.rng.gen_range(0..m.size()))).collect()
    }

    fn measure_at(
        &self,
        m: &FiniteStructure,
        f: &Formula,
        vars: &[String],
        s: &Valuation,
        budget: &Budget,
    ) -> Result<Rational, SemanticError> {
        Ok(extension_in_budget(m, f, vars, s, budget)?.measure())
    }

    /// Minimum or maximum over `x̄ ∈ ψ` of `μ(φ(x̄, ·))`, or `None` if `ψ` is empty there.
    fn fiber_extreme(
        &mut self,
        m: &FiniteStructure,
        phi: &Formula,
        psi: &Formula,
        x: &[String],
        y: &[String],
        s: &Valuation,
        budget: &Budget,
    ) -> Result<Option<Rational>, SemanticError> {
        let psi_set = extension_in_budget(m, psi, x, s, budget)?;
        let want_max = self.rng.gen_bool(0.5);
        let mut best: Option<Rational> = None;
        for a in psi_set.tuples() {
            let mut s2 = s.clone();
            for (v, &e) in x.iter().zip(&a) {
                s2.set(v, e);
            }
            let mu = self.measure_at(m, phi, y, &s2, budget)?;
            best = Some(match best {
                None => mu,
                Some(b) if want_max => b.max(mu),
                Some(b) => b.min(mu),
            });
        }
        Ok(best)
    }

    /// One instance of `scheme` for structure `m`.
    pub fn generate(
        &mut self,
        m: &FiniteStructure,
        scheme: &Scheme,
        budget: &Budget,
    ) -> Result<SchemeInstance, AxiomError> {
        let sig = m.signature();
        let (nx, ny) = match scheme.shape {
            Shape::Single => (self.rng.gen_range(1..=2), 0),
            Shape::Permutation => (self.rng.gen_range(2..=3), 0),
            Shape::Product | Shape::Fubini => {
                if self.rng.gen_bool(0.5) {
                    (1, 1)
                } else if self.rng.gen_bool(0.5) {
                    (1, 2)
                } else {
                    (2, 1)
                }
            }
        };
        let nz = self.rng.gen_range(0..=1);
        let name = |p: &str, i: usize| format!("{p}{i}");
        let x: Vec<String> = (1..=nx).map(|i| name("x", i)).collect();
        let y: Vec<String> = (1..=ny).map(|i| name("y", i)).collect();
        let z: Vec<String> = (1..=nz).map(|i| name("z", i)).collect();
        for v in x.iter().chain(&y).chain(&z) {
            assert!(sig.kind(v).is_none(), "variable name {v} clashes with a symbol");
        }
        let shape = FormulaShape {
            depth: 2,
            max_rank: 1,
            max_meas_vars: 1,
            max_den: self.max_den,
        };
        let mut gen = FormulaGen::new(sig, shape);
        let xz: Vec<String> = x.iter().chain(&z).cloned().collect();
        let yz: Vec<String> = y.iter().chain(&z).cloned().collect();
        let xyz: Vec<String> = x.iter().chain(&y).chain(&z).cloned().collect();
        let phi_scope = match scheme.shape {
            Shape::Fubini => &xyz,
            _ => &xz,
        };
        let psi_scope = match scheme.shape {
            Shape::Product => &yz,
            _ => &xz,
        };
        let phi = gen.formula(&mut self.rng, phi_scope);
        let chi = gen.formula(&mut self.rng, psi_scope);
        // shape ψ so that antecedents are satisfied reasonably often
        let psi = match (scheme.shape, self.rng.gen_range(0..4)) {
            (Shape::Single, 0) => Formula::or(phi.clone(), chi),
            (Shape::Single, 1) => Formula::and(chi, Formula::not(phi.clone())),
            (Shape::Single, 2) => Formula::and(phi.clone(), chi),
            _ => chi,
        };
        let probe = self.probe_valuation(m, &z);
        let mu_phi = self.measure_at(
            m,
            &phi,
            if scheme.shape == Shape::Fubini { &xyz[..x.len() + y.len()] } else { &x },
            &probe,
            budget,
        )?;
        let mu_psi = self.measure_at(
            m,
            &psi,
            if scheme.shape == Shape::Product { &y } else { &x },
            &probe,
            budget,
        )?;
        let mut params = SchemeParams::default();
        let wanted = scheme.parameters();
        for attempt in 0..32 {
            params = SchemeParams::default();
            if wanted.contains("t") {
                params.t = Some(self.near(&mu_phi));
            }
            if wanted.contains("t'") {
                params.t2 = Some(self.near(&mu_psi));
            }
            if wanted.contains("q") {
                params.q = Some(self.near(&mu_psi));
            }
            if wanted.contains("r") {
                let fiber = self.fiber_extreme(m, &phi, &psi, &x, &y, &probe, budget)?;
                params.r = Some(match fiber {
                    Some(r) => self.near(&r),
                    None => self.random_rational(),
                });
            }
            if scheme.id == "F-a" || scheme.id == "F-b" {
                // t just across q·r
                let qr = params.q.clone().unwrap() * params.r.clone().unwrap();
                let d = self.rng.gen_range(1..=self.max_den);
                let step = Rational::new(1, d);
                params.t = Some(if scheme.id == "F-a" { &qr - &step } else { &qr + &step });
            }
            if scheme.id == "Coherence-b" && self.rng.gen_bool(0.5) {
                let d = self.rng.gen_range(1..=self.max_den);
                params.t2 = Some(params.t.clone().unwrap() + Rational::new(1, d));
            }
            if scheme.shape == Shape::Permutation {
                let mut p: Vec<usize> = (0..x.len()).collect();
                p.shuffle(&mut self.rng);
                params.perm = Some(p);
            }
            let negative = [&params.t, &params.t2, &params.q, &params.r]
                .into_iter()
                .flatten()
                .any(|v| v.is_negative());
            if !negative && scheme.side.iter().all(|s| s.check(&params).is_ok()) {
                break;
            }
            if attempt == 31 {
                params = fallback(scheme, &params);
            }
        }
        instantiate(scheme, &x, &y, &phi, Some(&psi), &params)
    }

    /// `count` instances cycling through the schemes of `groups`.
    pub fn generate_many(
        &mut self,
        m: &FiniteStructure,
        groups: &[SchemeGroup],
        count: usize,
        budget: &Budget,
    ) -> Result<Vec<SchemeInstance>, AxiomError> {
        let table: Vec<Scheme> = schemes().into_iter().filter(|s| groups.contains(&s.group)).collect();
        if table.is_empty() {
            return Ok(Vec::new());
        }
        (0..count)
            .map(|i| self.generate(m, &table[i % table.len()], budget))
            .collect()
    }
}

/// Parameters that satisfy every side condition of the table.
fn fallback(scheme: &Scheme, draft: &SchemeParams) -> SchemeParams {
    let mut p = draft.clone();
    let half = Rational::new(1, 2);
    for v in [&mut p.t, &mut p.t2, &mut p.q, &mut p.r].into_iter().flatten() {
        if !v.is_positive() {
            *v = half.clone();
        }
    }
    match scheme.id {
        "Coherence-b" => p.t2 = Some(p.t.clone().unwrap() + Rational::new(1, 12)),
        "F-a" => {
            p.q = Some(half.clone());
            p.r = Some(half.clone());
            p.t = Some(Rational::new(1, 6));
        }
        "F-b" => {
            p.q = Some(half.clone());
            p.r = Some(half.clone());
            p.t = Some(Rational::new(1, 3));
        }
        _ => {}
    }
    p
}

/// Decides a quantifier-free sentence over `(ℚ≥0, +, ·, <, 0, 1, constants)`,
/// e.g. `(2/3 + 1/6) < 1`. Accepts `+`, `*` or `·`, comparisons
/// `= != < <= > >=`, connectives `~ & | ->` and parentheses.
pub fn q_oracle(text: &str) -> Result<bool, QOracleError> {
    let toks = q_lex(text)?;
    let mut p = QParser { toks, pos: 0 };
    let v = p.implication()?;
    if p.pos != p.toks.len() {
        return Err(QOracleError(format!("unexpected `{}`", p.toks[p.pos])));
    }
    match v {
        QValue::Bool(b) => Ok(b),
        QValue::Num(_) => Err(QOracleError("a term is not a sentence".into())),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed arithmetic sentence: {0}")]
pub struct QOracleError(String);

enum QValue {
    Num(Rational),
    Bool(bool),
}

fn q_lex(text: &str) -> Result<Vec<String>, QOracleError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_digit() || chars[j] == '/') {
                j += 1;
            }
            out.push(chars[i..j].iter().collect());
            i = j;
        } else {
            let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
            if ["<=", ">=", "!=", "->"].contains(&two.as_str()) {
                out.push(two);
                i += 2;
            } else if "+*·<>=()~&|".contains(c) {
                out.push(if c == '·' { "*".into() } else { c.to_string() });
                i += 1;
            } else {
                return Err(QOracleError(format!("unexpected character `{c}`")));
            }
        }
    }
    Ok(out)
}

struct QParser {
    toks: Vec<String>,
    pos: usize,
}

impl QParser {
    fn peek(&self) -> Option<&str> {
        self.toks.get(self.pos).map(String::as_str)
    }

    fn eat(&mut self, t: &str) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn boolean(v: QValue) -> Result<bool, QOracleError> {
        match v {
            QValue::Bool(b) => Ok(b),
            QValue::Num(n) => Err(QOracleError(format!("expected a sentence, found the term {n}"))),
        }
    }

    fn number(v: QValue) -> Result<Rational, QOracleError> {
        match v {
            QValue::Num(n) => Ok(n),
            QValue::Bool(_) => Err(QOracleError("expected a term, found a sentence".into())),
        }
    }

    fn implication(&mut self) -> Result<QValue, QOracleError> {
        let lhs = self.disjunction()?;
        if self.eat("->") {
            let a = Self::boolean(lhs)?;
            let b = Self::boolean(self.implication()?)?;
            return Ok(QValue::Bool(!a || b));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<QValue, QOracleError> {
        let mut lhs = self.conjunction()?;
        while self.eat("|") {
            let a = Self::boolean(lhs)?;
            let b = Self::boolean(self.conjunction()?)?;
            lhs = QValue::Bool(a || b);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<QValue, QOracleError> {
        let mut lhs = self.comparison()?;
        while self.eat("&") {
            let a = Self::boolean(lhs)?;
            let b = Self::boolean(self.comparison()?)?;
            lhs = QValue::Bool(a && b);
        }
        Ok(lhs)
    }

    fn comparison(&mut self) -> Result<QValue, QOracleError> {
        if self.eat("~") {
            return Ok(QValue::Bool(!Self::boolean(self.comparison()?)?));
        }
        let lhs = self.sum()?;
        let op = match self.peek() {
            Some(op @ ("=" | "!=" | "<" | "<=" | ">" | ">=")) => op.to_string(),
            _ => return Ok(lhs),
        };
        self.pos += 1;
        let a = Self::number(lhs)?;
        let b = Self::number(self.sum()?)?;
        Ok(QValue::Bool(match op.as_str() {
            "=" => a == b,
            "!=" => a != b,
            "<" => a < b,
            "<=" => a <= b,
            ">" => a > b,
            _ => a >= b,
        }))
    }

    fn sum(&mut self) -> Result<QValue, QOracleError> {
        let mut lhs = self.product()?;
        while self.eat("+") {
            let a = Self::number(lhs)?;
            let b = Self::number(self.product()?)?;
            lhs = QValue::Num(a + b);
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<QValue, QOracleError> {
        let mut lhs = self.atom()?;
        while self.eat("*") {
            let a = Self::number(lhs)?;
            let b = Self::number(self.atom()?)?;
            lhs = QValue::Num(a * b);
        }
        Ok(lhs)
    }

    fn atom(&mut self) -> Result<QValue, QOracleError> {
        if self.eat("(") {
            let v = self.implication()?;
            if !self.eat(")") {
                return Err(QOracleError("missing `)`".into()));
            }
            return Ok(v);
        }
        match self.peek() {
            Some(t) if t.starts_with(|c: char| c.is_ascii_digit()) => {
                let q = t
                    .parse::<Rational>()
                    .map_err(|e| QOracleError(format!("`{t}`: {e}")))?;
                self.pos += 1;
                Ok(QValue::Num(q))
            }
            Some(t) => Err(QOracleError(format!("unexpected `{t}`"))),
            None => Err(QOracleError("unexpected end of input".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;
    use crate::random::random_structure;
    use crate::structures::library::cyclic_group;
    use crate::syntax::Signature;

    fn v(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn emptyset_instance_text() {
        let sig = Signature::default();
        let phi = parse_formula("x = x", &sig).unwrap();
        let inst = instantiate(&scheme("Emptyset-a").unwrap(), &v(&["x"]), &[], &phi, None, &SchemeParams::default())
            .unwrap();
        assert_eq!(print_formula(&inst.sentence), "m[x] <= 0 . ~(x = x)");
    }

    #[test]
    fn product_instance_text() {
        let sig = Signature::new(vec![], vec![], vec![("P".into(), 1), ("Q".into(), 1)]).unwrap();
        let phi = parse_formula("P(x)", &sig).unwrap();
        let psi = parse_formula("Q(y)", &sig).unwrap();
        let params = SchemeParams {
            t: Some(r("1/2")),
            t2: Some(r("1/3")),
            ..Default::default()
        };
        let inst = instantiate(&scheme("Product-a").unwrap(), &v(&["x"]), &v(&["y"]), &phi, Some(&psi), &params)
            .unwrap();
        assert!(print_formula(&inst.sentence).ends_with("m[x,y] <= 1/6 . (P(x) & Q(y))"));
        // ψ may not mention x
        let bad = parse_formula("Q(x)", &sig).unwrap();
        assert!(matches!(
            instantiate(&scheme("Product-a").unwrap(), &v(&["x"]), &v(&["y"]), &phi, Some(&bad), &params),
            Err(AxiomError::VariableCapture { .. })
        ));
    }

    #[test]
    fn side_conditions_enforced() {
        let sig = Signature::new(vec![], vec![], vec![("E".into(), 2)]).unwrap();
        let phi = parse_formula("E(x,y)", &sig).unwrap();
        let psi = parse_formula("x = x", &sig).unwrap();
        let params = SchemeParams {
            t: Some(r("1/4")),
            q: Some(r("1/2")),
            r: Some(r("1/2")),
            ..Default::default()
        };
        let err = instantiate(&scheme("F-a").unwrap(), &v(&["x"]), &v(&["y"]), &phi, Some(&psi), &params);
        assert!(matches!(err, Err(AxiomError::SideCondition(_))));
        let ok = SchemeParams {
            t: Some(r("1/5")),
            ..params
        };
        assert!(instantiate(&scheme("F-a").unwrap(), &v(&["x"]), &v(&["y"]), &phi, Some(&psi), &ok).is_ok());
        assert!(scheme("Nope").is_err());
    }

    #[test]
    fn fubini_example_on_z4() {
        let z4 = FiniteStructure::builder(4)
            .constant("e", 0)
            .relation_from("E", 2, |t| (t[0] + t[1]) % 2 == 0)
            .build()
            .unwrap();
        let phi = parse_formula("E(x,y)", z4.signature()).unwrap();
        let psi = parse_formula("x = e", z4.signature()).unwrap();
        let params = SchemeParams {
            q: Some(r("1/4")),
            r: Some(r("1/2")),
            ..Default::default()
        };
        let inst = instantiate(&scheme("F+-d").unwrap(), &v(&["x"]), &v(&["y"]), &phi, Some(&psi), &params).unwrap();
        let report = check_soundness(&z4, &[inst], &Budget::default()).unwrap();
        assert!(report.all_hold());
    }

    #[test]
    fn zero_threshold_counterexample_motivates_side_condition() {
        // Product-b with t = 0 would claim μ(φ∧ψ) < 0.
        let z2 = cyclic_group(2).unwrap();
        let sig = z2.signature();
        let phi = parse_formula("~(x = x)", sig).unwrap();
        let psi = parse_formula("y = e", sig).unwrap();
        let zero = SchemeParams {
            t: Some(Rational::zero()),
            t2: Some(Rational::one()),
            ..Default::default()
        };
        assert!(instantiate(&scheme("Product-b").unwrap(), &v(&["x"]), &v(&["y"]), &phi, Some(&psi), &zero).is_err());
    }

    #[test]
    fn generated_instances_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut gen = InstanceGenerator::new(11);
        let budget = Budget::default();
        for n in 1..=4 {
            let m = random_structure(&mut rng, n).unwrap();
            let groups = [SchemeGroup::Aml, SchemeGroup::I, SchemeGroup::F, SchemeGroup::FPlus];
            let insts = gen.generate_many(&m, &groups, 40, &budget).unwrap();
            let report = check_soundness(&m, &insts, &budget).unwrap();
            for f in report.failures() {
                panic!("{} failed: {} at {:?}", f.scheme, f.summary, f.witness);
            }
            assert_eq!(report.total(), 40);
        }
    }

    #[test]
    fn group_list_parsing() {
        assert_eq!(
            SchemeGroup::parse_list("AML,I,F,F+").unwrap(),
            vec![SchemeGroup::Aml, SchemeGroup::I, SchemeGroup::F, SchemeGroup::FPlus]
        );
        assert!(SchemeGroup::parse_list("AML,G").is_err());
    }

    #[test]
    fn arithmetic_oracle() {
        assert!(q_oracle("1/2 · 1/3 = 1/6").unwrap());
        assert!(!q_oracle("1/3 < 1/4").unwrap());
        assert!(q_oracle("(2/3 + 1/6) < 1").unwrap());
        assert!(q_oracle("1 < 2 & ~(2 <= 1) -> 0 = 0").unwrap());
        assert!(q_oracle("1/2 +").is_err());
        assert!(q_oracle("1/2").is_err());
        assert!(q_oracle("1/0 = 1").is_err());
    }
}
