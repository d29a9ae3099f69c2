//! The `aml` command line.
//!
//! Exit codes: 0 success, 1 a check failed, 2 parse or input error,
//! 3 semantic error, 4 budget exhausted. Failures also print a line
//! `error reason=<code> message="..."` on stderr.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::axioms::{check_soundness, AxiomError, InstanceGenerator, SchemeGroup};
use crate::budget::{Budget, BudgetExceeded, DEFAULT_BUDGET};
use crate::gowers::{
    dual_function, gowers_box_pow, gowers_norm_pow, gowers_norm_pow_subst, parse_grid_function, parse_group,
    positivity_criterion, root_display, AbelianGroup, GowersError, GridFunction,
};
use crate::limits::{
    banach_density, furstenberg_check, limit_measure, parse_family, parse_set, truth_profile, LimitError, LimitOptions,
    DEFAULT_SLACK,
};
use crate::parser::{parse_formula, parse_structure, ParseError, ParseErrorKind};
use crate::rational::Rational;
use crate::regularity::{
    ap_encode, count_copies, count_copies_injective, direct_ap_count, parse_graph, parse_hypergraph,
    regularity_partition, remove_copies, PartitionOutcome, RegularityError, DEFAULT_EXACT_CAP,
};
use crate::semantics::{eval_in_budget, extension_in_budget, SemanticError, Valuation};
use crate::structures::FiniteStructure;
use crate::syntax::{Cmp, Formula, Signature};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Records,
}

/// Settings shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Work-unit budget for enumerations.
    #[arg(long, global = true, env = "AML_BUDGET", default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Print every measure-constructor subevaluation.
    #[arg(long, global = true)]
    pub trace: bool,
    /// Largest part size checked exactly for regularity.
    #[arg(long, global = true, default_value_t = DEFAULT_EXACT_CAP)]
    pub exact_cap: usize,
}

#[derive(Debug, Parser)]
#[command(name = "aml", version, about = "Approximate measure logic on finite structures")]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a formula in a structure.
    Eval {
        structure: PathBuf,
        /// Formula text, or `@file` to read it from a file.
        formula: String,
        /// Variable bindings `x=2`.
        #[arg(long = "bind", value_name = "VAR=ELEM")]
        bind: Vec<String>,
    },
    /// Measure the extension of a formula.
    Measure {
        structure: PathBuf,
        formula: String,
        /// Comma-separated measured variables; defaults to the free variables
        /// not bound by --bind.
        #[arg(long)]
        vars: Option<String>,
        #[arg(long = "bind", value_name = "VAR=ELEM")]
        bind: Vec<String>,
    },
    /// Generate scheme instances and check that they hold.
    CheckAxioms {
        #[arg(required = true)]
        structures: Vec<PathBuf>,
        #[arg(long, default_value = "AML,I,F,F+")]
        schemes: String,
        /// Instances per structure.
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
    /// Gowers norm powers.
    Gowers {
        /// Group name (`z4`, `z2-group`, `z2xz2`) or group file.
        group: Option<String>,
        /// Comma-separated values of g on the group.
        #[arg(long)]
        g: Option<String>,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// A `function-table` file for the box norm.
        #[arg(long)]
        table: Option<PathBuf>,
        /// Also print the dual function and check its identity.
        #[arg(long)]
        dual: bool,
        /// Also run the cylinder positivity search.
        #[arg(long)]
        positivity: bool,
    },
    /// Regularity partition of a graph.
    Regularity {
        graph: PathBuf,
        #[arg(long, default_value = "1/3")]
        eps: String,
        #[arg(long, default_value_t = 2)]
        kmin: usize,
        #[arg(long, default_value_t = 64)]
        kmax: usize,
    },
    /// Copy counting and removal in hypergraphs.
    Hypergraph {
        pattern: PathBuf,
        host: PathBuf,
        #[arg(long, default_value = "1/10")]
        eps: String,
        #[arg(long)]
        remove: bool,
    },
    /// Encode progressions in a set as a partite hypergraph.
    ApEncode {
        /// Set file or comma-separated elements.
        #[arg(long = "A", value_name = "SET")]
        set: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
    /// Truth profile or limiting measure along a family.
    Limit {
        family: PathBuf,
        formula: String,
        /// Threshold; switches from a truth profile to a limiting measure.
        #[arg(long)]
        r: Option<String>,
        #[arg(long)]
        vars: Option<String>,
        #[arg(long, default_value_t = DEFAULT_SLACK)]
        slack: usize,
        #[arg(long)]
        tolerance: Option<String>,
    },
    /// Finite upper Banach density.
    Density {
        #[arg(long = "E", value_name = "SET")]
        set: String,
        #[arg(long = "N")]
        n: usize,
        #[arg(long = "Lmin", default_value_t = 1)]
        l_min: usize,
    },
    /// Cyclic versus window densities of shifted intersections.
    Furstenberg {
        #[arg(long = "E", value_name = "SET")]
        set: String,
        #[arg(long = "N")]
        n: usize,
        #[arg(long = "U", value_name = "SHIFTS")]
        shifts: String,
    },
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }

    fn parse(message: impl Into<String>) -> Self {
        CliError::new(2, message)
    }

    fn reason(&self) -> &'static str {
        match self.code {
            1 => "check-failed",
            2 => "parse",
            3 => "semantic",
            4 => "budget",
            _ => "internal",
        }
    }
}

impl From<BudgetExceeded> for CliError {
    fn from(e: BudgetExceeded) -> Self {
        CliError::new(4, e.to_string())
    }
}

impl From<SemanticError> for CliError {
    fn from(e: SemanticError) -> Self {
        match e {
            SemanticError::Budget(b) => b.into(),
            e => CliError::new(3, e.to_string()),
        }
    }
}

impl From<AxiomError> for CliError {
    fn from(e: AxiomError) -> Self {
        match e {
            AxiomError::Semantic(s) => s.into(),
            AxiomError::UnknownScheme(_) => CliError::parse(e.to_string()),
            e => CliError::new(3, e.to_string()),
        }
    }
}

impl From<GowersError> for CliError {
    fn from(e: GowersError) -> Self {
        match e {
            GowersError::Budget(b) => b.into(),
            e => CliError::new(3, e.to_string()),
        }
    }
}

impl From<RegularityError> for CliError {
    fn from(e: RegularityError) -> Self {
        match e {
            RegularityError::Budget(b) => b.into(),
            e => CliError::new(3, e.to_string()),
        }
    }
}

impl From<LimitError> for CliError {
    fn from(e: LimitError) -> Self {
        match e {
            LimitError::Semantic(s) => s.into(),
            e => CliError::new(3, e.to_string()),
        }
    }
}

/// Byte offset to `line:column`, both 1-based.
fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.chars().rev().take_while(|&c| c != '\n').count() + 1;
    (line, col)
}

fn located(source: &str, text: &str, e: ParseError) -> CliError {
    let (line, col) = line_col(text, e.span.start);
    let code = match e.kind {
        ParseErrorKind::Symbol(_) => 3,
        _ => 2,
    };
    CliError::new(code, format!("{source}:{line}:{col}: {} (bytes {})", e.kind, e.span))
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))
}

fn load_structure(path: &Path) -> Result<FiniteStructure, CliError> {
    let text = read(path)?;
    parse_structure(&text).map_err(|e| located(&path.display().to_string(), &text, e))
}

fn load_formula(arg: &str, sig: &Signature) -> Result<Formula, CliError> {
    let (source, text) = match arg.strip_prefix('@') {
        Some(file) => (file.to_string(), read(Path::new(file))?),
        None => ("formula".to_string(), arg.to_string()),
    };
    parse_formula(text.trim(), sig).map_err(|e| located(&source, text.trim(), e))
}

fn parse_rational(text: &str, what: &str) -> Result<Rational, CliError> {
    text.trim()
        .parse()
        .map_err(|_| CliError::parse(format!("{what}: `{text}` is not a rational")))
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| CliError::parse(format!("{what}: bad entry `{s}`"))))
        .collect()
}

fn parse_bindings(binds: &[String], m: &FiniteStructure) -> Result<Valuation, CliError> {
    let mut val = Valuation::new();
    for b in binds {
        let (var, elem) = b
            .split_once('=')
            .ok_or_else(|| CliError::parse(format!("binding `{b}` is not VAR=ELEM")))?;
        let e: usize = elem
            .trim()
            .parse()
            .or_else(|_| m.constant(elem.trim()).ok_or(()))
            .map_err(|_| CliError::parse(format!("binding `{b}`: unknown element `{elem}`")))?;
        val.set(var.trim(), e);
    }
    Ok(val)
}

/// A set given as a file path, or inline as comma-separated integers.
fn load_set(arg: &str) -> Result<BTreeSet<usize>, CliError> {
    let path = Path::new(arg);
    if path.exists() {
        let text = read(path)?;
        return parse_set(&text).map_err(|e| located(arg, &text, e));
    }
    Ok(parse_list::<usize>(arg, "set")?.into_iter().collect())
}

fn parse_group_arg(arg: &str) -> Result<AbelianGroup, CliError> {
    let path = Path::new(arg);
    if path.exists() {
        let text = read(path)?;
        return parse_group(&text).map_err(|e| located(arg, &text, e));
    }
    let name = arg.trim_end_matches("-group");
    let orders = name
        .split('x')
        .map(|f| f.strip_prefix(['z', 'Z']).and_then(|n| n.parse::<usize>().ok()).filter(|&n| n > 0))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| CliError::parse(format!("`{arg}` is neither a group file nor a name like z4 or z2xz3")))?;
    Ok(if orders.len() == 1 {
        AbelianGroup::cyclic(orders[0])
    } else {
        AbelianGroup::product(&orders)
    })
}

/// Formats one record as `key=value` pairs.
fn record(pairs: &[(&str, String)]) -> String {
    let cells: Vec<String> = pairs
        .iter()
        .map(|(k, v)| {
            if v.is_empty() || v.contains([' ', '"', '=']) {
                format!("{k}=\"{}\"", v.replace('\\', "\\\\").replace('"', "\\\""))
            } else {
                format!("{k}={v}")
            }
        })
        .collect();
    cells.join(" ")
}

struct Output<'a> {
    format: Format,
    out: &'a mut (dyn Write + Send),
}

impl Output<'_> {
    fn text(&mut self, line: impl AsRef<str>) -> Result<(), CliError> {
        if self.format == Format::Text {
            self.line(line.as_ref())?;
        }
        Ok(())
    }

    fn record(&mut self, pairs: &[(&str, String)]) -> Result<(), CliError> {
        if self.format == Format::Records {
            self.line(&record(pairs))?;
        }
        Ok(())
    }

    fn line(&mut self, s: &str) -> Result<(), CliError> {
        writeln!(self.out, "{s}").map_err(|e| CliError::new(2, format!("write failed: {e}")))
    }
}

/// Runs the CLI on `args` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut (dyn Write + Send), err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 {
                write!(out, "{e}")
            } else {
                write!(err, "{e}")
            };
            return code;
        }
    };
    if cli.config.budget == 0 {
        let _ = writeln!(err, "error reason=parse message=\"budget must be positive\"");
        return 2;
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.config.threads).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error reason=internal message=\"{e}\"");
            return 70;
        }
    };
    let mut output = Output {
        format: cli.config.format,
        out,
    };
    match pool.install(|| dispatch(&cli.command, &cli.config, &mut output)) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "{}", record(&[("error reason", e.reason().to_string()), ("message", e.message.clone())]));
            e.code
        }
    }
}

fn dispatch(cmd: &Command, cfg: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    let budget = Budget::new(cfg.budget);
    match cmd {
        Command::Eval {
            structure,
            formula,
            bind,
        } => cmd_eval(structure, formula, bind, cfg, &budget, out),
        Command::Measure {
            structure,
            formula,
            vars,
            bind,
        } => cmd_measure(structure, formula, vars.as_deref(), bind, &budget, out),
        Command::CheckAxioms {
            structures,
            schemes,
            count,
        } => cmd_check_axioms(structures, schemes, *count, cfg, &budget, out),
        Command::Gowers {
            group,
            g,
            k,
            table,
            dual,
            positivity,
        } => cmd_gowers(group.as_deref(), g.as_deref(), *k, table.as_deref(), *dual, *positivity, &budget, out),
        Command::Regularity {
            graph,
            eps,
            kmin,
            kmax,
        } => cmd_regularity(graph, eps, *kmin, *kmax, cfg, &budget, out),
        Command::Hypergraph {
            pattern,
            host,
            eps,
            remove,
        } => cmd_hypergraph(pattern, host, eps, *remove, &budget, out),
        Command::ApEncode { set, n, k } => cmd_ap_encode(set, *n, *k, &budget, out),
        Command::Limit {
            family,
            formula,
            r,
            vars,
            slack,
            tolerance,
        } => cmd_limit(family, formula, r.as_deref(), vars.as_deref(), *slack, tolerance.as_deref(), &budget, out),
        Command::Density { set, n, l_min } => cmd_density(set, *n, *l_min, out),
        Command::Furstenberg { set, n, shifts } => cmd_furstenberg(set, *n, shifts, &budget, out),
    }
}

fn cmd_eval(
    structure: &Path,
    formula: &str,
    bind: &[String],
    cfg: &RunConfig,
    budget: &Budget,
    out: &mut Output,
) -> Result<(), CliError> {
    let m = load_structure(structure)?;
    let f = load_formula(formula, m.signature())?;
    let val = parse_bindings(bind, &m)?;
    let ev = eval_in_budget(&m, &f, &val, budget, cfg.trace)?;
    if cfg.trace {
        for e in &ev.trace {
            out.text(format!("trace {e}"))?;
            let params: Vec<String> = e.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            out.record(&[
                ("kind", "trace".into()),
                ("formula", e.formula.clone()),
                ("params", params.join(",")),
                ("count", e.count.to_string()),
                ("mu", e.measure.to_string()),
                ("cmp", e.cmp.symbol().into()),
                ("threshold", e.threshold.to_string()),
                ("flag", e.flag.to_string()),
                ("holds", e.holds.to_string()),
            ])?;
        }
    }
    match &ev.top_measure {
        Some((mu, cmp, r, flag)) => {
            out.text(format!("{} (mu = {mu}, {} {r}, flag {flag})", ev.value, cmp.symbol()))?;
            out.record(&[
                ("kind", "eval".into()),
                ("value", ev.value.to_string()),
                ("mu", mu.to_string()),
                ("approx", mu.to_decimal(6)),
                ("cmp", cmp.symbol().into()),
                ("threshold", r.to_string()),
                ("flag", flag.to_string()),
            ])?;
        }
        None => {
            out.text(ev.value.to_string())?;
            out.record(&[("kind", "eval".into()), ("value", ev.value.to_string())])?;
        }
    }
    Ok(())
}

fn cmd_measure(
    structure: &Path,
    formula: &str,
    vars: Option<&str>,
    bind: &[String],
    budget: &Budget,
    out: &mut Output,
) -> Result<(), CliError> {
    let m = load_structure(structure)?;
    let f = load_formula(formula, m.signature())?;
    let val = parse_bindings(bind, &m)?;
    let vars: Vec<String> = match vars {
        Some(v) => parse_list(v, "vars")?,
        None => f.free_vars().into_iter().filter(|v| val.get(v).is_none()).collect(),
    };
    let set = extension_in_budget(&m, &f, &vars, &val, budget)?;
    let mu = set.measure();
    out.text(format!(
        "mu[{}] = {mu} (approx {}), {} of {} tuples",
        vars.join(","),
        mu.to_decimal(6),
        set.count(),
        m.space().tuple_count(vars.len())
    ))?;
    out.record(&[
        ("kind", "measure".into()),
        ("vars", vars.join(",")),
        ("mu", mu.to_string()),
        ("approx", mu.to_decimal(6)),
        ("count", set.count().to_string()),
        ("tuples", m.space().tuple_count(vars.len()).to_string()),
    ])?;
    Ok(())
}

fn cmd_check_axioms(
    paths: &[PathBuf],
    schemes: &str,
    count: usize,
    cfg: &RunConfig,
    budget: &Budget,
    out: &mut Output,
) -> Result<(), CliError> {
    let groups = SchemeGroup::parse_list(schemes)?;
    let mut gen = InstanceGenerator::new(cfg.seed);
    let (mut held, mut total) = (0, 0);
    for path in paths {
        let m = load_structure(path)?;
        let instances = gen.generate_many(&m, &groups, count, budget)?;
        let report = check_soundness(&m, &instances, budget)?;
        for f in report.failures() {
            let witness = f.witness.as_ref().map(|w| w.to_string()).unwrap_or_default();
            out.text(format!("FAIL {} {} at {witness}", f.scheme, f.summary))?;
            out.record(&[
                ("kind", "failure".into()),
                ("file", path.display().to_string()),
                ("scheme", f.scheme.into()),
                ("instance", f.summary.clone()),
                ("witness", witness),
            ])?;
        }
        if cfg.trace {
            for r in &report.results {
                out.text(format!("{} {} {}", if r.holds { "ok" } else { "FAIL" }, r.scheme, r.summary))?;
            }
        }
        let label = if paths.len() > 1 {
            format!("{}: ", path.display())
        } else {
            String::new()
        };
        out.text(format!("{label}{}/{} hold", report.held(), report.total()))?;
        out.record(&[
            ("kind", "soundness".into()),
            ("file", path.display().to_string()),
            ("held", report.held().to_string()),
            ("total", report.total().to_string()),
        ])?;
        held += report.held();
        total += report.total();
    }
    if paths.len() > 1 {
        out.text(format!("total {held}/{total} hold"))?;
    }
    if held == total {
        Ok(())
    } else {
        Err(CliError::new(1, format!("{} of {total} instances failed", total - held)))
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_gowers(
    group: Option<&str>,
    g: Option<&str>,
    k: usize,
    table: Option<&Path>,
    dual: bool,
    positivity: bool,
    budget: &Budget,
    out: &mut Output,
) -> Result<(), CliError> {
    let f = match (table, group, g) {
        (Some(path), None, None) => {
            let text = read(path)?;
            parse_grid_function(&text).map_err(|e| located(&path.display().to_string(), &text, e))?
        }
        (None, Some(group), Some(g)) => {
            let group = parse_group_arg(group)?;
            let values: Vec<Rational> = g
                .split(',')
                .map(|v| parse_rational(v, "--g"))
                .collect::<Result<_, _>>()?;
            let g = GridFunction::new(group.order(), 1, values)?;
            let pow = gowers_norm_pow(&group, &g, k, budget)?;
            let subst = gowers_norm_pow_subst(&group, &g, k, budget)?;
            if pow != subst {
                return Err(CliError::new(1, format!("forms disagree: {pow} vs {subst}")));
            }
            out.text(format!("U^{k} power = {pow}"))?;
            out.text(format!("U^{k} norm approx {}", root_display(&pow, k)))?;
            out.record(&[
                ("kind", "gowers".into()),
                ("k", k.to_string()),
                ("power", pow.to_string()),
                ("approx", root_display(&pow, k)),
            ])?;
            GridFunction::sum_composition(&group, &g, k)?
        }
        _ => return Err(CliError::parse("give either GROUP with --g, or --table")),
    };
    let k = f.arity();
    if table.is_some() {
        let pow = gowers_box_pow(&f, budget)?;
        out.text(format!("box U^{k} power = {pow}"))?;
        out.text(format!("box U^{k} norm approx {}", root_display(&pow, k)))?;
        out.record(&[
            ("kind", "gowers-box".into()),
            ("k", k.to_string()),
            ("power", pow.to_string()),
            ("approx", root_display(&pow, k)),
        ])?;
    }
    if dual {
        let d = dual_function(&f, budget)?;
        let cells: Vec<String> = d.values().iter().map(Rational::to_string).collect();
        let lhs = f.inner(&d)?;
        let pow = gowers_box_pow(&f, budget)?;
        out.text(format!("dual = {}", cells.join(" ")))?;
        out.text(format!("sum f*D(f) = {lhs}, identity {}", if lhs == pow { "holds" } else { "FAILS" }))?;
        out.record(&[
            ("kind", "dual".into()),
            ("values", cells.join(",")),
            ("inner", lhs.to_string()),
            ("power", pow.to_string()),
        ])?;
        if lhs != pow {
            return Err(CliError::new(1, "dual identity failed"));
        }
    }
    if positivity {
        let p = positivity_criterion(&f, budget)?;
        let found = match p.correlation_found {
            Some(b) => b.to_string(),
            None => "unknown".into(),
        };
        out.text(format!("norm positive = {}, cylinder correlation = {found}", p.norm_positive))?;
        out.record(&[
            ("kind", "positivity".into()),
            ("norm_positive", p.norm_positive.to_string()),
            ("correlation", found),
        ])?;
        if p.agree() == Some(false) {
            return Err(CliError::new(1, "positivity criterion disagrees"));
        }
    }
    Ok(())
}

fn cmd_regularity(
    path: &Path,
    eps: &str,
    kmin: usize,
    kmax: usize,
    cfg: &RunConfig,
    budget: &Budget,
    out: &mut Output,
) -> Result<(), CliError> {
    let text = read(path)?;
    let g = parse_graph(&text).map_err(|e| located(&path.display().to_string(), &text, e))?;
    let eps = parse_rational(eps, "--eps")?;
    let rep = regularity_partition(&g, &eps, kmin, kmax, cfg.exact_cap, budget)?;
    for (i, part) in rep.partition.parts.iter().enumerate() {
        let cells: Vec<String> = part.iter().map(|v| v.to_string()).collect();
        out.text(format!("part {i} ({}): {}", part.len(), cells.join(" ")))?;
        out.record(&[
            ("kind", "part".into()),
            ("index", i.to_string()),
            ("size", part.len().to_string()),
            ("members", cells.join(",")),
        ])?;
    }
    for p in rep.pairs.iter().filter(|p| !p.verdict.is_certified_regular()) {
        out.text(format!("pair ({}, {}) {}", p.i, p.j, p.verdict))?;
        let (v, v2) = match p.verdict.witness() {
            Some(w) => (format!("{:?}", w.v), format!("{:?}", w.v2)),
            None => (String::new(), String::new()),
        };
        out.record(&[
            ("kind", "pair".into()),
            ("i", p.i.to_string()),
            ("j", p.j.to_string()),
            ("verdict", p.verdict.to_string()),
            ("V", v),
            ("V2", v2),
        ])?;
    }
    let log: Vec<String> = rep.energy_log().iter().map(Rational::to_string).collect();
    out.text(format!("energy log: {}", log.join(" -> ")))?;
    let sign = if Rational::from(rep.irregular_mass) <= rep.bound() {
        "≤"
    } else {
        ">"
    };
    let outcome = match rep.outcome {
        PartitionOutcome::BoundMet => "bound met",
        PartitionOutcome::KmaxExhausted => "K_max exhausted",
        PartitionOutcome::NoWitness => "no witness to refine by",
    };
    let certified = if rep.certified() { "" } else { " (not certified)" };
    out.text(format!(
        "irregular mass {}/{} {sign} {eps}{certified}; {} parts, {outcome}",
        rep.irregular_mass,
        rep.total_mass(),
        rep.partition.parts.len()
    ))?;
    out.record(&[
        ("kind", "regularity".into()),
        ("parts", rep.partition.parts.len().to_string()),
        ("irregular_mass", rep.irregular_mass.to_string()),
        ("total", rep.total_mass().to_string()),
        ("eps", eps.to_string()),
        ("certified", rep.certified().to_string()),
        ("outcome", outcome.into()),
        ("energy", log.join(",")),
    ])?;
    if rep.outcome == PartitionOutcome::BoundMet {
        Ok(())
    } else {
        Err(CliError::new(1, outcome))
    }
}

fn cmd_hypergraph(pattern: &Path, host: &Path, eps: &str, remove: bool, budget: &Budget, out: &mut Output) -> Result<(), CliError> {
    let load = |p: &Path| {
        let text = read(p)?;
        parse_hypergraph(&text).map_err(|e| located(&p.display().to_string(), &text, e))
    };
    let (pat, h) = (load(pattern)?, load(host)?);
    let eps = parse_rational(eps, "--eps")?;
    let copies = count_copies(&pat, &h, budget)?;
    let injective = count_copies_injective(&pat, &h, budget)?;
    out.text(format!("copies = {copies} (injective {injective})"))?;
    out.record(&[
        ("kind", "copies".into()),
        ("labeled", copies.to_string()),
        ("injective", injective.to_string()),
    ])?;
    if remove {
        let (_, rep) = remove_copies(&pat, &h, &eps, budget)?;
        let edges: Vec<String> = rep
            .removed
            .iter()
            .map(|e| e.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("-"))
            .collect();
        let within = if rep.within_bound() { "≤" } else { ">" };
        out.text(format!(
            "removed {} edges{}: {}",
            rep.removed.len(),
            if rep.optimal { " (minimum)" } else { "" },
            edges.join(" ")
        ))?;
        out.text(format!("copies after removal = {}; {} {within} {}", rep.copies_after, rep.removed.len(), rep.bound))?;
        out.record(&[
            ("kind", "removal".into()),
            ("removed", rep.removed.len().to_string()),
            ("edges", edges.join(",")),
            ("optimal", rep.optimal.to_string()),
            ("copies_after", rep.copies_after.to_string()),
            ("bound", rep.bound.to_string()),
        ])?;
        if rep.copies_after != 0 {
            return Err(CliError::new(1, "copies remain after removal"));
        }
    }
    Ok(())
}

fn cmd_ap_encode(set: &str, n: usize, k: usize, budget: &Budget, out: &mut Output) -> Result<(), CliError> {
    let a: Vec<usize> = load_set(set)?.into_iter().collect();
    let enc = ap_encode(&a, n, k, budget)?;
    let (good, degenerate) = enc.count_pattern_copies(budget)?;
    let direct = direct_ap_count(&a, n, k)?;
    out.text(format!(
        "{} vertices, {} edges; copies with d != 0: {good}, with d = 0: {degenerate}; direct count: {direct}",
        enc.hypergraph.vertex_count(),
        enc.hypergraph.edge_count()
    ))?;
    out.record(&[
        ("kind", "ap-encode".into()),
        ("vertices", enc.hypergraph.vertex_count().to_string()),
        ("edges", enc.hypergraph.edge_count().to_string()),
        ("copies", good.to_string()),
        ("degenerate", degenerate.to_string()),
        ("direct", direct.to_string()),
    ])?;
    if good == direct {
        Ok(())
    } else {
        Err(CliError::new(1, "copy count and direct count differ"))
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_limit(
    path: &Path,
    formula: &str,
    r: Option<&str>,
    vars: Option<&str>,
    slack: usize,
    tolerance: Option<&str>,
    budget: &Budget,
    out: &mut Output,
) -> Result<(), CliError> {
    let text = read(path)?;
    let spec = parse_family(&text).map_err(|e| located(&path.display().to_string(), &text, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let family = spec.build(|file| {
        let p = base.join(file);
        let text = std::fs::read_to_string(&p).map_err(|e| LimitError::UnknownRule(format!("{}: {e}", p.display())))?;
        parse_set(&text).map_err(|e| LimitError::UnknownRule(format!("{}: {e}", p.display())))
    });
    let family = family.map_err(|e| match e {
        LimitError::UnknownRule(m) => CliError::parse(m),
        e => e.into(),
    })?;
    let probe = family.structure(family.range().0).map_err(|e| CliError::new(3, e.to_string()))?;
    let f = load_formula(formula, probe.signature())?;
    out.text(format!("family {} over [{}, {}], slack {slack}", family.description(), family.range().0, family.range().1))?;
    match r {
        None => {
            let p = truth_profile(&family, &f, slack, budget)?;
            let row: String = p.values.iter().map(|(_, v)| if *v { 'T' } else { 'F' }).collect();
            out.text(format!("profile {row}"))?;
            out.text(format!("verdict {}", p.verdict))?;
            out.record(&[
                ("kind", "profile".into()),
                ("values", row),
                ("verdict", p.verdict.to_string()),
            ])?;
        }
        Some(r) => {
            let r = parse_rational(r, "--r")?;
            let vars: Vec<String> = match vars {
                Some(v) => parse_list(v, "vars")?,
                None => f.free_vars().into_iter().collect(),
            };
            let opts = LimitOptions {
                slack,
                tolerance: tolerance.map(|t| parse_rational(t, "--tolerance")).transpose()?,
            };
            let lm = limit_measure(&family, &f, &vars, &r, &opts, budget)?;
            let mut tail = String::new();
            for (i, m) in &lm.measures[lm.measures.len().saturating_sub(slack + 1)..] {
                let _ = write!(tail, " {i}:{m}");
            }
            out.text(format!("tail{tail}"))?;
            let show = |v: Option<bool>| v.map_or("undetermined".to_string(), |b| b.to_string());
            let (limit, flag) = match (&lm.limit, lm.flag) {
                (Some(l), Some(fl)) => (l.to_string(), fl.to_string()),
                _ => (format!("in [{}, {}]", lm.tail_range.0, lm.tail_range.1), "undetermined".into()),
            };
            out.text(format!("limit {limit}, flag {flag}, behaviour {:?}", lm.behaviour))?;
            out.text(format!(
                "m < {r}: {}; m <= {r}: {}",
                show(lm.induced(Cmp::Lt)),
                show(lm.induced(Cmp::Le))
            ))?;
            out.record(&[
                ("kind", "limit".into()),
                ("r", r.to_string()),
                ("limit", limit),
                ("flag", flag),
                ("lt", show(lm.induced(Cmp::Lt))),
                ("le", show(lm.induced(Cmp::Le))),
            ])?;
        }
    }
    Ok(())
}

fn cmd_density(set: &str, n: usize, l_min: usize, out: &mut Output) -> Result<(), CliError> {
    let e = load_set(set)?;
    let d = banach_density(&e, n, l_min)?;
    out.text(format!("density = {d} (approx {})", d.to_decimal(6)))?;
    out.record(&[
        ("kind", "density".into()),
        ("N", n.to_string()),
        ("Lmin", l_min.to_string()),
        ("density", d.to_string()),
        ("approx", d.to_decimal(6)),
    ])?;
    Ok(())
}

fn cmd_furstenberg(set: &str, n: usize, shifts: &str, budget: &Budget, out: &mut Output) -> Result<(), CliError> {
    let e = load_set(set)?;
    let u: BTreeSet<usize> = parse_list::<usize>(shifts, "--U")?.into_iter().collect();
    let r = furstenberg_check(&e, n, &u, budget)?;
    let diff = (&r.cyclic - &r.window).abs();
    let rel = if r.holds() { "≤" } else { ">" };
    out.text(format!("cyclic = {}, window = {}, |difference| = {diff} {rel} {}", r.cyclic, r.window, r.bound))?;
    out.record(&[
        ("kind", "furstenberg".into()),
        ("cyclic", r.cyclic.to_string()),
        ("window", r.window.to_string()),
        ("difference", diff.to_string()),
        ("bound", r.bound.to_string()),
        ("holds", r.holds().to_string()),
    ])?;
    if r.holds() {
        Ok(())
    } else {
        Err(CliError::new(1, "bound violated"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn records_quote_spaces() {
        assert_eq!(record(&[("a", "1".into()), ("b", "x y".into())]), "a=1 b=\"x y\"");
        assert_eq!(record(&[("c", "".into())]), "c=\"\"");
    }

    #[test]
    fn positions() {
        assert_eq!(line_col("ab\ncd", 4), (2, 2));
        assert_eq!(line_col("ab", 0), (1, 1));
    }

    #[test]
    fn group_names() {
        assert_eq!(parse_group_arg("z2-group").unwrap().order(), 2);
        assert_eq!(parse_group_arg("z2xz3").unwrap().order(), 6);
        assert!(parse_group_arg("q8").is_err());
    }
}
