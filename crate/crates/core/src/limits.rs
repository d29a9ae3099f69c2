//! Eventual behaviour along finite families of structures: truth profiles,
//! limiting measures with value flags, upper Banach density and the cyclic
//! window comparison.
//!
//! "Almost all indices" is read as "every index from some `i₀` to the end
//! of the computed range". Nothing is extrapolated past the range.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::budget::Budget;
use crate::parser::{line_tokens, parse_usize_tok, tok_span, ParseError, SourceSpan};
use crate::rational::Rational;
use crate::semantics::{eval_in_budget, extension_in_budget, measure_clause, SemanticError, Valuation};
use crate::structures::{FiniteStructure, StructureError, VFlag};
use crate::syntax::{Cmp, Formula, Term};

/// Default number of trailing indices that must agree.
pub const DEFAULT_SLACK: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LimitError {
    #[error("empty index range [{lo}, {hi}]")]
    EmptyRange { lo: usize, hi: usize },
    #[error("formula has free variables {0:?} outside the measured tuple")]
    NotClosed(Vec<String>),
    #[error("unknown membership rule `{0}`")]
    UnknownRule(String),
    #[error("set element {element} outside [1, {n}]")]
    SetOutOfRange { element: usize, n: usize },
    #[error("max(U) = {max} must be below N = {n}")]
    ShiftTooLarge { max: usize, n: usize },
    #[error(transparent)]
    Semantic(#[from] SemanticError),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// Membership rules for unary predicates on `Z_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    Even,
    Odd,
    Zero,
    /// `x ≠ 0` with `2x = 0`; nonempty exactly when `n` is even.
    Involution,
    All,
    None,
}

impl Rule {
    pub fn parse(id: &str) -> Option<Rule> {
        Some(match id {
            "even" => Rule::Even,
            "odd" => Rule::Odd,
            "zero" => Rule::Zero,
            "involution" => Rule::Involution,
            "all" => Rule::All,
            "none" => Rule::None,
            _ => return Option::None,
        })
    }

    pub fn id(self) -> &'static str {
        match self {
            Rule::Even => "even",
            Rule::Odd => "odd",
            Rule::Zero => "zero",
            Rule::Involution => "involution",
            Rule::All => "all",
            Rule::None => "none",
        }
    }

    pub fn holds(self, x: usize, n: usize) -> bool {
        match self {
            Rule::Even => x % 2 == 0,
            Rule::Odd => x % 2 == 1,
            Rule::Zero => x == 0,
            Rule::Involution => x != 0 && (2 * x) % n == 0,
            Rule::All => true,
            Rule::None => false,
        }
    }
}

type Generator = dyn Fn(usize) -> Result<FiniteStructure, StructureError> + Send + Sync;

/// Structures `𝔐_i` for `i` in `[lo, hi]`.
#[derive(Clone)]
pub struct StructureFamily {
    lo: usize,
    hi: usize,
    description: String,
    generator: Arc<Generator>,
}

impl fmt::Debug for StructureFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StructureFamily({}, [{}, {}])", self.description, self.lo, self.hi)
    }
}

impl StructureFamily {
    pub fn new(
        lo: usize,
        hi: usize,
        description: impl Into<String>,
        generator: impl Fn(usize) -> Result<FiniteStructure, StructureError> + Send + Sync + 'static,
    ) -> Result<Self, LimitError> {
        if lo > hi {
            return Err(LimitError::EmptyRange { lo, hi });
        }
        Ok(StructureFamily {
            lo,
            hi,
            description: description.into(),
            generator: Arc::new(generator),
        })
    }

    /// `Z_{scale·i}` with identity `e`, `mul`, and the given unary predicates.
    pub fn cyclic(lo: usize, hi: usize, scale: usize, predicates: Vec<(String, Rule)>) -> Result<Self, LimitError> {
        if lo == 0 || scale == 0 {
            return Err(LimitError::EmptyRange { lo, hi });
        }
        let names: Vec<String> = predicates.iter().map(|(p, r)| format!("{p}={}", r.id())).collect();
        let size = if scale == 1 { "i".to_string() } else { format!("{scale}i") };
        let desc = format!("cyclic Z_{size} [{}]", names.join(", "));
        StructureFamily::new(lo, hi, desc, move |i| {
            let n = scale * i;
            let mut b = FiniteStructure::builder(n)
                .constant("e", 0)
                .function_from("mul", 2, move |t| (t[0] + t[1]) % n);
            for (name, rule) in &predicates {
                let rule = *rule;
                b = b.relation_from(name, 1, move |t| rule.holds(t[0], n));
            }
            b.build()
        })
    }

    /// `[1, i]` with predicate `E ∩ [1, i]` and `f(x) = x + 1` for `x < i`,
    /// `f(i) = 1`. Element `x` stands for the integer `x + 1`.
    pub fn interval(set: BTreeSet<usize>, lo: usize, hi: usize) -> Result<Self, LimitError> {
        if lo == 0 {
            return Err(LimitError::EmptyRange { lo, hi });
        }
        let desc = format!("interval E = {:?}", set);
        StructureFamily::new(lo, hi, desc, move |i| interval_system(&set, i))
    }

    pub fn range(&self) -> (usize, usize) {
        (self.lo, self.hi)
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn structure(&self, i: usize) -> Result<FiniteStructure, StructureError> {
        (self.generator)(i)
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<usize> {
        self.lo..=self.hi
    }
}

/// The cyclic system on `[1, n]` for `E`.
pub fn interval_system(set: &BTreeSet<usize>, n: usize) -> Result<FiniteStructure, StructureError> {
    FiniteStructure::builder(n)
        .relation_from("E", 1, |t| set.contains(&(t[0] + 1)))
        .function_from("f", 1, move |t| (t[0] + 1) % n)
        .build()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileVerdict {
    EventuallyTrue(usize),
    EventuallyFalse(usize),
    Undetermined,
}

impl fmt::Display for ProfileVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileVerdict::EventuallyTrue(i) => write!(f, "EventuallyTrue({i})"),
            ProfileVerdict::EventuallyFalse(i) => write!(f, "EventuallyFalse({i})"),
            ProfileVerdict::Undetermined => write!(f, "Undetermined"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthProfile {
    pub values: Vec<(usize, bool)>,
    pub slack: usize,
    pub verdict: ProfileVerdict,
}

/// Smallest index from which every recorded value equals the last one.
fn stable_from<T: PartialEq>(values: &[(usize, T)]) -> Option<usize> {
    let last = &values.last()?.1;
    let start = values.iter().rposition(|(_, v)| v != last).map_or(0, |p| p + 1);
    Some(values[start].0)
}

/// Evaluates `sentence` in every member. The verdict is eventual truth or
/// falsity from the least stable index `i₀`, provided `i₀ < hi − slack`.
pub fn truth_profile(
    family: &StructureFamily,
    sentence: &Formula,
    slack: usize,
    budget: &Budget,
) -> Result<TruthProfile, LimitError> {
    let free: Vec<String> = sentence.free_vars().into_iter().collect();
    if !free.is_empty() {
        return Err(LimitError::NotClosed(free));
    }
    let values = family
        .indices()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|i| {
            let m = family.structure(i)?;
            Ok((i, eval_in_budget(&m, sentence, &Valuation::new(), budget, false)?.value))
        })
        .collect::<Result<Vec<_>, LimitError>>()?;
    let i0 = stable_from(&values).expect("nonempty range");
    let verdict = if i0 + slack < family.hi {
        if values.last().unwrap().1 {
            ProfileVerdict::EventuallyTrue(i0)
        } else {
            ProfileVerdict::EventuallyFalse(i0)
        }
    } else {
        ProfileVerdict::Undetermined
    };
    Ok(TruthProfile { values, slack, verdict })
}

/// How the tail of a measure sequence relates to the limit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LimitBehaviour {
    /// The tail is constant.
    Constant,
    /// The tail approaches `r` strictly from one side.
    Approaches,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitMeasure {
    pub measures: Vec<(usize, Rational)>,
    pub r: Rational,
    /// The standard part of the limit, when one is detected.
    pub limit: Option<Rational>,
    /// Flag of the limit measure relative to `r`.
    pub flag: Option<VFlag>,
    pub behaviour: LimitBehaviour,
    /// Smallest and largest tail values.
    pub tail_range: (Rational, Rational),
    pub slack: usize,
    pub tolerance: Rational,
}

impl LimitMeasure {
    /// Truth of `m[x̄] ⋈ r . φ` in the limit under the flag clauses.
    pub fn induced(&self, cmp: Cmp) -> Option<bool> {
        Some(measure_clause(cmp, self.limit.as_ref()?, &self.r, self.flag?))
    }
}

/// Options for [`limit_measure`].
#[derive(Debug, Clone)]
pub struct LimitOptions {
    pub slack: usize,
    /// How close the last tail value must be to `r` for an approach to count;
    /// `None` means `1/hi`.
    pub tolerance: Option<Rational>,
}

impl Default for LimitOptions {
    fn default() -> Self {
        LimitOptions {
            slack: DEFAULT_SLACK,
            tolerance: None,
        }
    }
}

/// Tracks `μ_i(φ(M_i))` and reads off the limit at `r`. A constant tail `c`
/// is the limit with flag ⊙. A tail whose values lie strictly on one side of
/// `r`, move monotonically towards it, and end within the tolerance gives
/// limit `r` with ⊕ (from above) or ⊖ (from below). Anything else is
/// undetermined.
pub fn limit_measure(
    family: &StructureFamily,
    formula: &Formula,
    vars: &[String],
    r: &Rational,
    opts: &LimitOptions,
    budget: &Budget,
) -> Result<LimitMeasure, LimitError> {
    let stray: Vec<String> = formula.free_vars().into_iter().filter(|v| !vars.contains(v)).collect();
    if !stray.is_empty() {
        return Err(LimitError::NotClosed(stray));
    }
    let measures = family
        .indices()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|i| {
            let m = family.structure(i)?;
            let set = extension_in_budget(&m, formula, vars, &Valuation::new(), budget)?;
            Ok((i, set.measure()))
        })
        .collect::<Result<Vec<_>, LimitError>>()?;
    let tolerance = opts
        .tolerance
        .clone()
        .unwrap_or_else(|| Rational::ratio(1, family.hi.max(1)));
    let start = measures.len().saturating_sub(opts.slack + 1);
    let tail: Vec<&Rational> = measures[start..].iter().map(|(_, m)| m).collect();
    let tail_range = (
        (*tail.iter().min().unwrap()).clone(),
        (*tail.iter().max().unwrap()).clone(),
    );
    let mut out = LimitMeasure {
        measures: measures.clone(),
        r: r.clone(),
        limit: None,
        flag: None,
        behaviour: LimitBehaviour::Undetermined,
        tail_range,
        slack: opts.slack,
        tolerance: tolerance.clone(),
    };
    if tail.len() < 2 {
        return Ok(out);
    }
    if tail.iter().all(|m| *m == tail[0]) {
        out.limit = Some(tail[0].clone());
        out.flag = Some(VFlag::Dot);
        out.behaviour = LimitBehaviour::Constant;
        return Ok(out);
    }
    let above = tail.iter().all(|m| *m > r);
    let below = tail.iter().all(|m| *m < r);
    let dist: Vec<Rational> = tail.iter().map(|m| (*m - r).abs()).collect();
    let monotone = dist.windows(2).all(|w| w[1] <= w[0]);
    if (above || below) && monotone && dist.last().unwrap() <= &tolerance {
        out.limit = Some(r.clone());
        out.flag = Some(if above { VFlag::Plus } else { VFlag::Minus });
        out.behaviour = LimitBehaviour::Approaches;
    }
    Ok(out)
}

/// Finite upper Banach density of `E ⊆ [1, N]`: the largest `|W ∩ E| / |W|`
/// over windows `W = {a, ..., a+L−1} ⊆ [1, N]` with `L ≥ L_min`. Zero when no
/// window fits.
pub fn banach_density(set: &BTreeSet<usize>, n: usize, l_min: usize) -> Result<Rational, LimitError> {
    check_set(set, n)?;
    let mut prefix = vec![0usize; n + 1];
    for x in 1..=n {
        prefix[x] = prefix[x - 1] + set.contains(&x) as usize;
    }
    let mut best = Rational::zero();
    for len in l_min.max(1)..=n {
        let top = (1..=n + 1 - len).map(|a| prefix[a + len - 1] - prefix[a - 1]).max().unwrap_or(0);
        let d = Rational::ratio(top, len);
        if d > best {
            best = d;
        }
    }
    Ok(best)
}

fn check_set(set: &BTreeSet<usize>, n: usize) -> Result<(), LimitError> {
    match set.iter().find(|&&x| x == 0 || x > n) {
        Some(&x) => Err(LimitError::SetOutOfRange { element: x, n }),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FurstenbergReport {
    /// `μ(∩_{i∈U} f^{-i}(E))` in the cyclic system on `[1, N]`.
    pub cyclic: Rational,
    /// `|{x ∈ [1, N] : x + i ∈ E for all i ∈ U}| / N`.
    pub window: Rational,
    /// `max(U) / N`.
    pub bound: Rational,
}

impl FurstenbergReport {
    pub fn holds(&self) -> bool {
        (&self.cyclic - &self.window).abs() <= self.bound
    }
}

/// The cyclic density is evaluated as the measure of
/// `⋀_{i∈U} E(f^i(x))` in the interval system; the window density is
/// counted directly.
pub fn furstenberg_check(
    set: &BTreeSet<usize>,
    n: usize,
    shifts: &BTreeSet<usize>,
    budget: &Budget,
) -> Result<FurstenbergReport, LimitError> {
    check_set(set, n)?;
    let max = shifts.iter().next_back().copied().unwrap_or(0);
    if max >= n {
        return Err(LimitError::ShiftTooLarge { max, n });
    }
    let m = interval_system(set, n)?;
    let x = || Term::var("x");
    let conj = shifts
        .iter()
        .map(|&i| {
            let t = (0..i).fold(x(), |t, _| Term::App("f".into(), vec![t]));
            Formula::atom("E", vec![t])
        })
        .reduce(Formula::and)
        .unwrap_or_else(|| Formula::eq(x(), x()));
    let cyclic = extension_in_budget(&m, &conj, &["x".to_string()], &Valuation::new(), budget)?.measure();
    let hits = (1..=n).filter(|x| shifts.iter().all(|i| set.contains(&(x + i)))).count();
    Ok(FurstenbergReport {
        cyclic,
        window: Rational::ratio(hits, n),
        bound: Rational::ratio(max, n),
    })
}

/// Parses `set` followed by positive integers.
pub fn parse_set(text: &str) -> Result<BTreeSet<usize>, ParseError> {
    let toks: Vec<(usize, &str)> = line_tokens(text).into_iter().flatten().collect();
    match toks.first() {
        Some(&(_, "set")) => {}
        Some(&t) => return Err(ParseError::syntax("expected `set`", tok_span(t))),
        None => return Err(ParseError::syntax("expected `set`", SourceSpan::new(0, text.len()))),
    }
    let mut out = BTreeSet::new();
    for &t in &toks[1..] {
        let x = parse_usize_tok(t, "a positive integer")?;
        if x == 0 {
            return Err(ParseError::syntax("set elements are positive", tok_span(t)));
        }
        out.insert(x);
    }
    Ok(out)
}

pub fn print_set(set: &BTreeSet<usize>) -> String {
    let body: Vec<String> = set.iter().map(|x| x.to_string()).collect();
    format!("set {}\n", body.join(" "))
}

/// A parsed family file. Interval families name their set file, which is
/// resolved by the caller.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilySpec {
    Cyclic {
        lo: usize,
        hi: usize,
        scale: usize,
        predicates: Vec<(String, Rule)>,
    },
    Interval {
        set_file: String,
        lo: usize,
        hi: usize,
    },
}

impl FamilySpec {
    /// Builds the family; `load_set` reads an interval family's set file.
    pub fn build(
        &self,
        load_set: impl FnOnce(&str) -> Result<BTreeSet<usize>, LimitError>,
    ) -> Result<StructureFamily, LimitError> {
        match self {
            FamilySpec::Cyclic {
                lo,
                hi,
                scale,
                predicates,
            } => StructureFamily::cyclic(*lo, *hi, *scale, predicates.clone()),
            FamilySpec::Interval { set_file, lo, hi } => StructureFamily::interval(load_set(set_file)?, *lo, *hi),
        }
    }
}

/// Parses `family cyclic <lo> <hi> [scale <s>] (predicate <name> <rule>)*`
/// or `family interval <set-file> <lo> <hi>`.
pub fn parse_family(text: &str) -> Result<FamilySpec, ParseError> {
    let toks: Vec<(usize, &str)> = line_tokens(text).into_iter().flatten().collect();
    let whole = SourceSpan::new(0, text.len());
    if toks.len() < 2 || toks[0].1 != "family" {
        return Err(ParseError::syntax("expected `family cyclic ...` or `family interval ...`", whole));
    }
    let need = |i: usize| {
        toks.get(i)
            .copied()
            .ok_or_else(|| ParseError::syntax("unexpected end of family file", SourceSpan::new(text.len(), text.len())))
    };
    let range = |i: usize| -> Result<(usize, usize), ParseError> {
        let lo = parse_usize_tok(need(i)?, "a lower index")?;
        let hi = parse_usize_tok(need(i + 1)?, "an upper index")?;
        if lo == 0 || lo > hi {
            let span = SourceSpan::new(need(i)?.0, need(i + 1)?.0 + need(i + 1)?.1.len());
            return Err(ParseError::syntax("need 1 <= lo <= hi", span));
        }
        Ok((lo, hi))
    };
    match toks[1].1 {
        "cyclic" => {
            let (lo, hi) = range(2)?;
            let mut scale = 1;
            let mut predicates = Vec::new();
            let mut i = 4;
            while i < toks.len() {
                match toks[i].1 {
                    "scale" => {
                        scale = parse_usize_tok(need(i + 1)?, "a scale")?;
                        if scale == 0 {
                            return Err(ParseError::syntax("scale must be positive", tok_span(toks[i + 1])));
                        }
                        i += 2;
                    }
                    "predicate" => {
                        let name = need(i + 1)?;
                        let rule_tok = need(i + 2)?;
                        let rule = Rule::parse(rule_tok.1).ok_or_else(|| {
                            ParseError::syntax(format!("unknown membership rule `{}`", rule_tok.1), tok_span(rule_tok))
                        })?;
                        predicates.push((name.1.to_string(), rule));
                        i += 3;
                    }
                    _ => return Err(ParseError::syntax("expected `scale` or `predicate`", tok_span(toks[i]))),
                }
            }
            Ok(FamilySpec::Cyclic {
                lo,
                hi,
                scale,
                predicates,
            })
        }
        "interval" => {
            let file = need(2)?;
            let (lo, hi) = range(3)?;
            if let Some(&extra) = toks.get(5) {
                return Err(ParseError::syntax("unexpected token", tok_span(extra)));
            }
            Ok(FamilySpec::Interval {
                set_file: file.1.to_string(),
                lo,
                hi,
            })
        }
        other => Err(ParseError::syntax(format!("unknown family kind `{other}`"), tok_span(toks[1]))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn zn(lo: usize, hi: usize) -> StructureFamily {
        StructureFamily::cyclic(lo, hi, 1, vec![("P".into(), Rule::Involution), ("Ev".into(), Rule::Even)]).unwrap()
    }

    fn formula(fam: &StructureFamily, text: &str) -> Formula {
        let m = fam.structure(fam.range().1).unwrap();
        parse_formula(text, m.signature()).unwrap()
    }

    #[test]
    fn profiles() {
        let b = Budget::default();
        let fam = zn(1, 20);
        let p = truth_profile(&fam, &formula(&fam, "m[x] <= 1/3 . (x = e)"), DEFAULT_SLACK, &b).unwrap();
        assert_eq!(p.verdict, ProfileVerdict::EventuallyTrue(3));
        assert!(!p.values[0].1 && !p.values[1].1 && p.values[2].1);
        let p = truth_profile(&fam, &formula(&fam, "forall x. x = x"), DEFAULT_SLACK, &b).unwrap();
        assert_eq!(p.verdict, ProfileVerdict::EventuallyTrue(1));
        let p = truth_profile(&fam, &formula(&fam, "exists x. P(x)"), DEFAULT_SLACK, &b).unwrap();
        assert_eq!(p.verdict, ProfileVerdict::Undetermined);
        let p = truth_profile(&zn(1, 4), &formula(&fam, "forall x. x = x"), DEFAULT_SLACK, &b).unwrap();
        assert_eq!(p.verdict, ProfileVerdict::Undetermined);
    }

    #[test]
    fn limits() {
        let b = Budget::default();
        let fam = zn(1, 30);
        let x = vec!["x".to_string()];
        let lm = limit_measure(&fam, &formula(&fam, "x = e"), &x, &Rational::zero(), &LimitOptions::default(), &b).unwrap();
        assert_eq!((lm.limit.clone(), lm.flag), (Some(Rational::zero()), Some(VFlag::Plus)));
        assert_eq!(lm.induced(Cmp::Lt), Some(false));
        assert_eq!(lm.induced(Cmp::Le), Some(false));
        let lm = limit_measure(&fam, &formula(&fam, "x = x"), &x, &Rational::one(), &LimitOptions::default(), &b).unwrap();
        assert_eq!((lm.flag, lm.induced(Cmp::Le)), (Some(VFlag::Dot), Some(true)));
        let evens = StructureFamily::cyclic(1, 15, 2, vec![("Ev".into(), Rule::Even)]).unwrap();
        let lm = limit_measure(&evens, &formula(&evens, "Ev(x)"), &x, &q("1/2"), &LimitOptions::default(), &b).unwrap();
        assert_eq!((lm.limit, lm.behaviour), (Some(q("1/2")), LimitBehaviour::Constant));
        // 1/n does not approach 1/2
        let lm = limit_measure(&fam, &formula(&fam, "x = e"), &x, &q("1/2"), &LimitOptions::default(), &b).unwrap();
        assert_eq!(lm.behaviour, LimitBehaviour::Undetermined);
        assert_eq!(lm.induced(Cmp::Lt), None);
    }

    #[test]
    fn densities() {
        let full: BTreeSet<usize> = (1..=10).collect();
        assert_eq!(banach_density(&full, 10, 3).unwrap(), Rational::one());
        let one: BTreeSet<usize> = [1].into_iter().collect();
        assert_eq!(banach_density(&one, 10, 5).unwrap(), q("1/5"));
        assert_eq!(banach_density(&one, 10, 11).unwrap(), Rational::zero());
        assert!(banach_density(&one, 0, 1).is_err());
    }

    #[test]
    fn furstenberg() {
        let b = Budget::default();
        let evens: BTreeSet<usize> = (1..=10).filter(|x| x % 2 == 0).collect();
        let r = furstenberg_check(&evens, 10, &[0].into_iter().collect(), &b).unwrap();
        assert_eq!((r.cyclic.clone(), r.window.clone()), (q("1/2"), q("1/2")));
        let r = furstenberg_check(&evens, 10, &[0, 2].into_iter().collect(), &b).unwrap();
        assert!(r.holds());
        let full: BTreeSet<usize> = (1..=10).collect();
        let r = furstenberg_check(&full, 10, &[0, 3].into_iter().collect(), &b).unwrap();
        assert_eq!((r.cyclic.clone(), r.window.clone()), (Rational::one(), q("7/10")));
        assert!(r.holds());
        assert!(furstenberg_check(&full, 10, &[10].into_iter().collect(), &b).is_err());
    }

    #[test]
    fn files() {
        let s = parse_set("set 2 4 6\n8 10 # evens\n").unwrap();
        assert_eq!(parse_set(&print_set(&s)).unwrap(), s);
        assert!(parse_set("set 0").is_err());
        let f = parse_family("family cyclic 1 20 scale 2 predicate Ev even\n").unwrap();
        assert_eq!(
            f,
            FamilySpec::Cyclic {
                lo: 1,
                hi: 20,
                scale: 2,
                predicates: vec![("Ev".into(), Rule::Even)]
            }
        );
        let f = parse_family("family interval evens.set 5 10").unwrap();
        assert!(matches!(f, FamilySpec::Interval { ref set_file, .. } if set_file == "evens.set"));
        let err = parse_family("family cyclic 1 20 predicate P bogus").unwrap_err();
        assert_eq!(err.span, SourceSpan::new(31, 36));
    }
}
