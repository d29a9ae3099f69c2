//! Concrete text syntax for formulae and structure files.
//!
//! Formula grammar, loosest binding first:
//!
//! ```text
//! formula := impl
//! impl    := disj ("->" impl)?
//! disj    := conj ("|" conj)*
//! conj    := neg ("&" neg)*
//! neg     := "~" neg | quant | "(" formula ")" | atom
//! quant   := ("forall" | "exists") var "." formula
//!          | "m[" var ("," var)* "]" cmp rational "." formula
//! cmp     := "<" | "<=" | ">" | ">="
//! atom    := Rel "(" term ("," term)* ")" | term "=" term
//! ```
//!
//! `>` and `>=` are expanded on the spot, so parsed ASTs only contain the
//! core comparisons. [`print_formula`] produces text that parses back to a
//! structurally equal AST.

use std::fmt;

use thiserror::Error;

use crate::rational::Rational;
use crate::structures::{FiniteStructure, StructureBuilder, StructureError};
use crate::syntax::{expand_abbrev, AnyCmp, Formula, Signature, SymbolKind, SyntaxError, Term};

/// Byte range `[start, end)` into the parsed input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        SourceSpan { start, end }
    }

    fn join(self, other: SourceSpan) -> SourceSpan {
        SourceSpan::new(self.start.min(other.start), self.end.max(other.end))
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error(transparent)]
    Symbol(#[from] SyntaxError),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at {span}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub span: SourceSpan,
}

impl ParseError {
    pub(crate) fn syntax(msg: impl Into<String>, span: SourceSpan) -> Self {
        ParseError {
            kind: ParseErrorKind::Syntax(msg.into()),
            span,
        }
    }

    fn symbol(e: SyntaxError, span: SourceSpan) -> Self {
        ParseError {
            kind: ParseErrorKind::Symbol(e),
            span,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(String),
    MeasOpen,
    LParen,
    RParen,
    RBracket,
    Comma,
    Dot,
    Slash,
    Minus,
    Eq,
    Lt,
    Le,
    Gt,
    Ge,
    Tilde,
    Amp,
    Pipe,
    Arrow,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Int(s) => write!(f, "`{s}`"),
            Tok::MeasOpen => f.write_str("`m[`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Slash => f.write_str("`/`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Lt => f.write_str("`<`"),
            Tok::Le => f.write_str("`<=`"),
            Tok::Gt => f.write_str("`>`"),
            Tok::Ge => f.write_str("`>=`"),
            Tok::Tilde => f.write_str("`~`"),
            Tok::Amp => f.write_str("`&`"),
            Tok::Pipe => f.write_str("`|`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let single = |t: Tok| (t, SourceSpan::new(start, start + 1));
        let tok = match c {
            b'(' => single(Tok::LParen),
            b')' => single(Tok::RParen),
            b']' => single(Tok::RBracket),
            b',' => single(Tok::Comma),
            b'.' => single(Tok::Dot),
            b'/' => single(Tok::Slash),
            b'=' => single(Tok::Eq),
            b'~' => single(Tok::Tilde),
            b'&' => single(Tok::Amp),
            b'|' => single(Tok::Pipe),
            b'-' if bytes.get(i + 1) == Some(&b'>') => (Tok::Arrow, SourceSpan::new(start, start + 2)),
            b'-' => single(Tok::Minus),
            b'<' if bytes.get(i + 1) == Some(&b'=') => (Tok::Le, SourceSpan::new(start, start + 2)),
            b'<' => single(Tok::Lt),
            b'>' if bytes.get(i + 1) == Some(&b'=') => (Tok::Ge, SourceSpan::new(start, start + 2)),
            b'>' => single(Tok::Gt),
            b'0'..=b'9' => {
                let mut j = i;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                (Tok::Int(text[i..j].to_string()), SourceSpan::new(start, j))
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut j = i;
                while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_' || bytes[j] == b'\'') {
                    j += 1;
                }
                let word = &text[i..j];
                if word == "m" && bytes.get(j) == Some(&b'[') {
                    (Tok::MeasOpen, SourceSpan::new(start, j + 1))
                } else {
                    (Tok::Ident(word.to_string()), SourceSpan::new(start, j))
                }
            }
            _ => {
                let ch = text[i..].chars().next().unwrap();
                return Err(ParseError::syntax(
                    format!("unexpected character `{ch}`"),
                    SourceSpan::new(start, start + ch.len_utf8()),
                ));
            }
        };
        i = tok.1.end;
        out.push(tok);
    }
    out.push((Tok::Eof, SourceSpan::new(text.len(), text.len())));
    Ok(out)
}

struct FormulaParser<'a> {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
    sig: &'a Signature,
}

impl<'a> FormulaParser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, SourceSpan) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<SourceSpan, ParseError> {
        if *self.peek() == want {
            Ok(self.bump().1)
        } else {
            Err(ParseError::syntax(
                format!("expected {want}, found {}", self.peek()),
                self.span(),
            ))
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disj()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disj(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conj()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            let rhs = self.conj()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.neg()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.neg()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn neg(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::not(self.neg()?))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(w) if w == "forall" || w == "exists" => {
                self.bump();
                let (var, _) = self.variable()?;
                self.expect(Tok::Dot)?;
                let body = self.formula()?;
                Ok(if w == "forall" {
                    Formula::forall(&var, body)
                } else {
                    Formula::exists(&var, body)
                })
            }
            Tok::MeasOpen => self.measure(),
            _ => self.atom(),
        }
    }

    fn variable(&mut self) -> Result<(String, SourceSpan), ParseError> {
        match self.bump() {
            (Tok::Ident(v), span) if v != "forall" && v != "exists" => {
                match self.sig.kind(&v) {
                    None => Ok((v, span)),
                    Some(_) => Err(ParseError::syntax(
                        format!("`{v}` is a declared symbol, not a variable"),
                        span,
                    )),
                }
            }
            (t, span) => Err(ParseError::syntax(format!("expected a variable, found {t}"), span)),
        }
    }

    fn measure(&mut self) -> Result<Formula, ParseError> {
        let open = self.expect(Tok::MeasOpen)?;
        let mut vars = Vec::new();
        let (v, _) = self.variable()?;
        vars.push(v);
        while *self.peek() == Tok::Comma {
            self.bump();
            let (v, vspan) = self.variable()?;
            if vars.contains(&v) {
                return Err(ParseError::symbol(SyntaxError::RepeatedMeasureVar(v), vspan));
            }
            vars.push(v);
        }
        let close = self.expect(Tok::RBracket)?;
        let (cmp_tok, cmp_span) = self.bump();
        let cmp = match cmp_tok {
            Tok::Lt => AnyCmp::Lt,
            Tok::Le => AnyCmp::Le,
            Tok::Gt => AnyCmp::Gt,
            Tok::Ge => AnyCmp::Ge,
            t => {
                return Err(ParseError::syntax(
                    format!("expected a comparison, found {t}"),
                    cmp_span,
                ))
            }
        };
        let (q, qspan) = self.rational()?;
        if q.is_negative() {
            return Err(ParseError::symbol(SyntaxError::NegativeThreshold(q), qspan));
        }
        self.expect(Tok::Dot)?;
        let body = self.formula()?;
        expand_abbrev(&vars, cmp, q, body).map_err(|e| ParseError::symbol(e, open.join(close)))
    }

    fn rational(&mut self) -> Result<(Rational, SourceSpan), ParseError> {
        let start = self.span();
        let negative = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let num = match self.bump() {
            (Tok::Int(s), _) => s,
            (t, span) => return Err(ParseError::syntax(format!("expected a rational, found {t}"), span)),
        };
        let mut end = self.toks[self.pos - 1].1;
        let mut text = if negative { format!("-{num}") } else { num };
        if *self.peek() == Tok::Slash {
            self.bump();
            match self.bump() {
                (Tok::Int(d), span) => {
                    end = span;
                    text.push('/');
                    text.push_str(&d);
                }
                (t, span) => {
                    return Err(ParseError::syntax(format!("expected a denominator, found {t}"), span))
                }
            }
        }
        let span = start.join(end);
        let q = text
            .parse::<Rational>()
            .map_err(|e| ParseError::syntax(e.to_string(), span))?;
        Ok((q, span))
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        if let Tok::Ident(name) = self.peek().clone() {
            if let Some(SymbolKind::Relation(arity)) = self.sig.kind(&name) {
                let start = self.bump().1;
                self.expect(Tok::LParen)?;
                let args = self.term_list()?;
                let end = self.expect(Tok::RParen)?;
                if args.len() != arity {
                    return Err(ParseError::symbol(
                        SyntaxError::ArityMismatch {
                            name,
                            expected: arity,
                            found: args.len(),
                        },
                        start.join(end),
                    ));
                }
                return Ok(Formula::Atom(name, args));
            }
        }
        let lhs = self.term()?;
        self.expect(Tok::Eq)?;
        let rhs = self.term()?;
        Ok(Formula::Eq(lhs, rhs))
    }

    fn term_list(&mut self) -> Result<Vec<Term>, ParseError> {
        let mut args = vec![self.term()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            args.push(self.term()?);
        }
        Ok(args)
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let (tok, span) = self.bump();
        let name = match tok {
            Tok::Ident(name) if name != "forall" && name != "exists" => name,
            t => return Err(ParseError::syntax(format!("expected a term, found {t}"), span)),
        };
        match self.sig.kind(&name) {
            Some(SymbolKind::Constant) => Ok(Term::Const(name)),
            Some(SymbolKind::Function(arity)) => {
                self.expect(Tok::LParen)?;
                let args = self.term_list()?;
                let end = self.expect(Tok::RParen)?;
                if args.len() != arity {
                    return Err(ParseError::symbol(
                        SyntaxError::ArityMismatch {
                            name,
                            expected: arity,
                            found: args.len(),
                        },
                        span.join(end),
                    ));
                }
                Ok(Term::App(name, args))
            }
            Some(SymbolKind::Relation(_)) => Err(ParseError::symbol(SyntaxError::NotAFunction(name), span)),
            None if *self.peek() == Tok::LParen => {
                Err(ParseError::symbol(SyntaxError::UnknownSymbol(name), span))
            }
            None => Ok(Term::Var(name)),
        }
    }
}

/// Parses a formula against `sig`. All symbols must be declared; any
/// identifier that is not a symbol is a variable.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, ParseError> {
    let mut p = FormulaParser {
        toks: lex(text)?,
        pos: 0,
        sig,
    };
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return Err(ParseError::syntax(
            format!("unexpected {} after formula", p.peek()),
            p.span(),
        ));
    }
    Ok(f)
}

pub fn print_term(t: &Term) -> String {
    match t {
        Term::Var(v) | Term::Const(v) => v.clone(),
        Term::App(f, args) => {
            let args: Vec<String> = args.iter().map(print_term).collect();
            format!("{f}({})", args.join(","))
        }
    }
}

/// Canonical text for `φ`; `parse_formula(print_formula(φ))` is `φ` again.
pub fn print_formula(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(f, &mut out, true, true);
    out
}

fn opens_to_right(f: &Formula) -> bool {
    match f {
        Formula::Forall(..) | Formula::Exists(..) | Formula::Meas(_) => true,
        Formula::Not(inner) => opens_to_right(inner),
        _ => false,
    }
}

fn is_binary(f: &Formula) -> bool {
    matches!(f, Formula::And(..) | Formula::Or(..) | Formula::Implies(..))
}

fn write_operand(f: &Formula, out: &mut String, wrap: bool, tail: bool) {
    if wrap {
        out.push('(');
        write_formula(f, out, true, true);
        out.push(')');
    } else {
        write_formula(f, out, false, tail);
    }
}

/// `tail` is set when nothing follows `f` before the end of its enclosing
/// group, so a trailing quantifier may stay unparenthesized.
fn write_formula(f: &Formula, out: &mut String, top: bool, tail: bool) {
    match f {
        Formula::Eq(a, b) => {
            if top {
                out.push_str(&format!("{} = {}", print_term(a), print_term(b)));
            } else {
                out.push_str(&format!("({} = {})", print_term(a), print_term(b)));
            }
        }
        Formula::Atom(r, args) => {
            let args: Vec<String> = args.iter().map(print_term).collect();
            out.push_str(&format!("{r}({})", args.join(",")));
        }
        Formula::Not(inner) => {
            out.push('~');
            if opens_to_right(inner) {
                out.push(' ');
            }
            write_operand(inner, out, is_binary(inner), tail);
        }
        Formula::And(a, b) => {
            write_operand(a, out, is_binary(a) || opens_to_right(a), false);
            out.push_str(" & ");
            write_operand(b, out, is_binary(b) || (opens_to_right(b) && !tail), tail);
        }
        Formula::Or(a, b) => {
            let wrap_a = matches!(**a, Formula::Implies(..)) || opens_to_right(a);
            write_operand(a, out, wrap_a, false);
            out.push_str(" | ");
            let wrap_b = matches!(**b, Formula::Or(..) | Formula::Implies(..)) || (opens_to_right(b) && !tail);
            write_operand(b, out, wrap_b, tail);
        }
        Formula::Implies(a, b) => {
            write_operand(a, out, matches!(**a, Formula::Implies(..)) || opens_to_right(a), false);
            out.push_str(" -> ");
            write_operand(b, out, opens_to_right(b) && !tail, tail);
        }
        Formula::Forall(v, body) | Formula::Exists(v, body) => {
            let kw = if matches!(f, Formula::Forall(..)) { "forall" } else { "exists" };
            out.push_str(&format!("{kw} {v} . "));
            write_body(body, out, tail);
        }
        Formula::Meas(m) => {
            out.push_str(&format!(
                "m[{}] {} {} . ",
                m.vars().join(","),
                m.cmp().symbol(),
                m.threshold()
            ));
            write_body(m.body(), out, tail);
        }
    }
}

fn write_body(body: &Formula, out: &mut String, tail: bool) {
    if is_binary(body) || matches!(body, Formula::Eq(..)) {
        out.push('(');
        write_formula(body, out, true, true);
        out.push(')');
    } else {
        write_formula(body, out, false, tail);
    }
}

/// Splits text into (byte offset, token) pairs, skipping `#` comments.
pub(crate) fn line_tokens(text: &str) -> Vec<Vec<(usize, &str)>> {
    let mut lines = Vec::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let content = match line.find('#') {
            Some(h) => &line[..h],
            None => line,
        };
        let mut toks = Vec::new();
        let mut pos = 0;
        for piece in content.split_whitespace() {
            let rel = content[pos..].find(piece).unwrap() + pos;
            toks.push((offset + rel, piece));
            pos = rel + piece.len();
        }
        lines.push(toks);
        offset += line.len();
    }
    lines
}

pub(crate) fn tok_span(tok: (usize, &str)) -> SourceSpan {
    SourceSpan::new(tok.0, tok.0 + tok.1.len())
}

pub(crate) fn parse_usize_tok(tok: (usize, &str), what: &str) -> Result<usize, ParseError> {
    tok.1
        .parse::<usize>()
        .map_err(|_| ParseError::syntax(format!("expected {what}, found `{}`", tok.1), tok_span(tok)))
}

pub(crate) fn parse_rational_tok(tok: (usize, &str)) -> Result<Rational, ParseError> {
    tok.1
        .parse::<Rational>()
        .map_err(|e| ParseError::syntax(e.to_string(), tok_span(tok)))
}

fn structure_err(e: StructureError, span: SourceSpan) -> ParseError {
    ParseError {
        kind: ParseErrorKind::Structure(e),
        span,
    }
}

/// Parses the line-oriented structure file format:
///
/// ```text
/// universe 4
/// measure counting                      # or: measure weights 1/2 1/4 1/4 [total 1]
/// constant e 0
/// function mul 2
/// 0 1 2 3  1 2 3 0  2 3 0 1  3 0 1 2    # n^arity entries, lexicographic order
/// relation E 2
/// 0 1
/// 1 0
/// end
/// ```
pub fn parse_structure(text: &str) -> Result<FiniteStructure, ParseError> {
    let whole = SourceSpan::new(0, text.len());
    let lines = line_tokens(text);
    let toks: Vec<(usize, usize, &str)> = lines
        .iter()
        .enumerate()
        .flat_map(|(ln, l)| l.iter().map(move |&(o, t)| (ln, o, t)))
        .collect();
    let at = |i: usize| (toks[i].1, toks[i].2);
    if toks.is_empty() {
        return Err(ParseError::syntax("missing `universe` header", whole));
    }
    if toks[0].2 != "universe" || toks.len() < 2 {
        return Err(ParseError::syntax("file must start with `universe <n>`", tok_span(at(0))));
    }
    let n = parse_usize_tok(at(1), "a universe size")?;
    let header_span = tok_span(at(0)).join(tok_span(at(1)));
    if n == 0 {
        return Err(structure_err(StructureError::EmptyUniverse, header_span));
    }
    let mut builder = StructureBuilder::new(n);
    let mut last_span = header_span;
    let mut i = 2;
    let line_of = |i: usize| toks[i].0;
    // rest of the tokens on the same line as token i (inclusive)
    let line_end = |i: usize| {
        let ln = toks[i].0;
        let mut j = i;
        while j < toks.len() && toks[j].0 == ln {
            j += 1;
        }
        j
    };
    let check_elem = |tok: (usize, &str)| -> Result<usize, ParseError> {
        let e = parse_usize_tok(tok, "an element")?;
        if e >= n {
            return Err(structure_err(
                StructureError::OutOfRange { element: e, size: n },
                tok_span(tok),
            ));
        }
        Ok(e)
    };
    while i < toks.len() {
        let kw = at(i);
        let kw_span = tok_span(kw);
        last_span = kw_span;
        let end = line_end(i);
        let args: Vec<(usize, &str)> = (i + 1..end).map(at).collect();
        match kw.1 {
            "measure" => {
                match args.first().map(|t| t.1) {
                    Some("counting") if args.len() == 1 => {}
                    Some("weights") => {
                        let mut rest = &args[1..];
                        let mut total = None;
                        if rest.len() >= 2 && rest[rest.len() - 2].1 == "total" {
                            total = Some(parse_rational_tok(rest[rest.len() - 1])?);
                            rest = &rest[..rest.len() - 2];
                        }
                        let weights = rest
                            .iter()
                            .map(|&t| parse_rational_tok(t))
                            .collect::<Result<Vec<_>, _>>()?;
                        let span = args.last().map(|&t| kw_span.join(tok_span(t))).unwrap_or(kw_span);
                        if weights.len() != n {
                            return Err(structure_err(
                                StructureError::WeightCount {
                                    expected: n,
                                    found: weights.len(),
                                },
                                span,
                            ));
                        }
                        if let Some(w) = weights.iter().find(|w| w.is_negative()) {
                            return Err(structure_err(StructureError::NegativeWeight(w.clone()), span));
                        }
                        if let Some(t) = total {
                            let actual: Rational = weights.iter().sum();
                            if actual != t {
                                return Err(structure_err(
                                    StructureError::WeightTotal { declared: t, actual },
                                    span,
                                ));
                            }
                            builder = builder.declared_total(t);
                        }
                        builder = builder.weights(weights);
                    }
                    _ => {
                        return Err(ParseError::syntax(
                            "expected `measure counting` or `measure weights ...`",
                            kw_span,
                        ))
                    }
                }
                i = end;
            }
            "constant" => {
                if args.len() != 2 {
                    return Err(ParseError::syntax("expected `constant <name> <element>`", kw_span));
                }
                let e = check_elem(args[1])?;
                builder = builder.constant(args[0].1, e);
                i = end;
            }
            "function" => {
                if args.len() != 2 {
                    return Err(ParseError::syntax("expected `function <name> <arity>`", kw_span));
                }
                let name = args[0].1;
                let arity = parse_usize_tok(args[1], "an arity")?;
                if arity == 0 {
                    return Err(ParseError::symbol(SyntaxError::ZeroArity(name.to_string()), tok_span(args[1])));
                }
                let expected = n.pow(arity as u32);
                let mut table = Vec::with_capacity(expected);
                let mut j = end;
                while table.len() < expected && j < toks.len() && toks[j].2.parse::<usize>().is_ok() {
                    table.push(check_elem(at(j))?);
                    j += 1;
                }
                if table.len() < expected {
                    return Err(structure_err(
                        StructureError::NonTotalFunction {
                            name: name.to_string(),
                            expected,
                            found: table.len(),
                        },
                        kw_span.join(tok_span(args[1])),
                    ));
                }
                if j < toks.len() && line_of(j) == line_of(j - 1) && j > end {
                    return Err(ParseError::syntax(
                        format!("function `{name}` has more than {expected} entries"),
                        tok_span(at(j)),
                    ));
                }
                builder = builder.function(name, arity, table);
                i = j;
            }
            "relation" => {
                if args.len() != 2 {
                    return Err(ParseError::syntax("expected `relation <name> <arity>`", kw_span));
                }
                let name = args[0].1;
                let arity = parse_usize_tok(args[1], "an arity")?;
                if arity == 0 {
                    return Err(ParseError::symbol(SyntaxError::ZeroArity(name.to_string()), tok_span(args[1])));
                }
                let mut tuples = Vec::new();
                let mut j = end;
                loop {
                    if j >= toks.len() {
                        return Err(ParseError::syntax(
                            format!("relation `{name}` is missing its terminating `end`"),
                            kw_span,
                        ));
                    }
                    if toks[j].2 == "end" {
                        j += 1;
                        break;
                    }
                    let le = line_end(j);
                    let row: Vec<(usize, &str)> = (j..le).map(at).collect();
                    if row.len() != arity {
                        let span = tok_span(row[0]).join(tok_span(*row.last().unwrap()));
                        return Err(structure_err(
                            StructureError::TupleLength {
                                name: name.to_string(),
                                arity,
                                found: row.len(),
                            },
                            span,
                        ));
                    }
                    tuples.push(row.iter().map(|&t| check_elem(t)).collect::<Result<Vec<_>, _>>()?);
                    j = le;
                }
                builder = builder.relation(name, arity, tuples);
                i = j;
            }
            "universe" => {
                return Err(ParseError::syntax("duplicate `universe` header", kw_span));
            }
            other => {
                return Err(ParseError::syntax(format!("unknown directive `{other}`"), kw_span));
            }
        }
    }
    builder.build().map_err(|e| match e {
        StructureError::Syntax(s) => ParseError::symbol(s, last_span),
        other => structure_err(other, last_span),
    })
}

/// Renders a structure in the file format accepted by [`parse_structure`].
pub fn print_structure(m: &FiniteStructure) -> String {
    let mut out = format!("universe {}\n", m.size());
    if m.space().is_uniform() && m.space().total() == &Rational::one() {
        out.push_str("measure counting\n");
    } else {
        let w: Vec<String> = m.weights().iter().map(|w| w.to_string()).collect();
        out.push_str(&format!("measure weights {}\n", w.join(" ")));
    }
    let sig = m.signature();
    for c in sig.constants() {
        out.push_str(&format!("constant {c} {}\n", m.constant(c).unwrap()));
    }
    for (f, arity) in sig.functions() {
        let (_, table) = m.function_table(f).unwrap();
        let entries: Vec<String> = table.iter().map(|e| e.to_string()).collect();
        out.push_str(&format!("function {f} {arity}\n{}\n", entries.join(" ")));
    }
    for (r, arity) in sig.relations() {
        out.push_str(&format!("relation {r} {arity}\n"));
        for t in m.relation(r).unwrap().tuples() {
            let t: Vec<String> = t.iter().map(|e| e.to_string()).collect();
            out.push_str(&t.join(" "));
            out.push('\n');
        }
        out.push_str("end\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Cmp;

    fn sig() -> Signature {
        Signature::new(
            vec!["e".into()],
            vec![("mul".into(), 2)],
            vec![("P".into(), 1), ("Q".into(), 1), ("E".into(), 2)],
        )
        .unwrap()
    }

    fn parse(s: &str) -> Formula {
        parse_formula(s, &sig()).unwrap()
    }

    fn px() -> Formula {
        Formula::atom("P", vec![Term::var("x")])
    }

    #[test]
    fn measure_examples() {
        assert_eq!(
            parse("m[x] < 1/2 . P(x)"),
            Formula::meas(&["x"], Cmp::Lt, Rational::new(1, 2), px()).unwrap()
        );
        let exy = Formula::atom("E", vec![Term::var("x"), Term::var("y")]);
        assert_eq!(
            parse("forall y . m[x] >= 1/3 . E(x,y)"),
            Formula::forall(
                "y",
                Formula::not(Formula::meas(&["x"], Cmp::Lt, Rational::new(1, 3), exy).unwrap())
            )
        );
        let body = Formula::and(px(), Formula::atom("Q", vec![Term::var("y")]));
        assert_eq!(
            parse("m[x,y] <= 3/4 . (P(x) & Q(y))"),
            Formula::meas(&["x", "y"], Cmp::Le, Rational::new(3, 4), body).unwrap()
        );
    }

    #[test]
    fn precedence() {
        let f = parse("~P(x) & Q(x) | P(y) -> Q(y) -> P(x)");
        let expected = Formula::implies(
            Formula::or(
                Formula::and(Formula::not(px()), Formula::atom("Q", vec![Term::var("x")])),
                Formula::atom("P", vec![Term::var("y")]),
            ),
            Formula::implies(Formula::atom("Q", vec![Term::var("y")]), px()),
        );
        assert_eq!(f, expected);
        // quantifier bodies extend to the right
        let g = parse("forall x . P(x) & Q(x)");
        assert!(matches!(g, Formula::Forall(_, ref b) if matches!(**b, Formula::And(..))));
    }

    #[test]
    fn terms_and_equality() {
        let f = parse("mul(x,e) = x");
        assert_eq!(
            f,
            Formula::Eq(
                Term::App("mul".into(), vec![Term::var("x"), Term::Const("e".into())]),
                Term::var("x")
            )
        );
    }

    #[test]
    fn printing_is_canonical() {
        let f = Formula::meas(
            &["x"],
            Cmp::Le,
            Rational::zero(),
            Formula::not(Formula::Eq(Term::var("x"), Term::var("x"))),
        )
        .unwrap();
        assert_eq!(print_formula(&f), "m[x] <= 0 . ~(x = x)");
        let g = expand_abbrev(&["x"], AnyCmp::Ge, Rational::new(1, 2), px()).unwrap();
        let text = print_formula(&g);
        assert_eq!(text, "~ m[x] < 1/2 . P(x)");
        assert_eq!(parse(&text), g);
    }

    #[test]
    fn roundtrip_tricky_shapes() {
        for s in [
            "(forall x . P(x)) & Q(y)",
            "(~ exists x . P(x)) | Q(y)",
            "(P(x) -> Q(x)) -> P(y)",
            "P(x) | (Q(x) | P(y))",
            "P(x) & (Q(x) & P(y))",
            "~(P(x) & Q(x))",
            "m[x,y] < 1 . (m[z] <= 1/2 . E(x,z))",
            "forall y . m[x] < 9/10 . (mul(x,y) = mul(y,x))",
        ] {
            let f = parse(s);
            let printed = print_formula(&f);
            assert_eq!(parse(&printed), f, "{s} -> {printed}");
        }
    }

    #[test]
    fn errors_carry_spans() {
        let cases = [
            ("m[x,x] < 1 . P(x)", "repeated"),
            ("m[x] < -1/2 . P(x)", "negative"),
            ("R(x)", "unknown"),
            ("P(x,y)", "expects"),
            ("m[x] < 1/0 . P(x)", "zero"),
            ("P(x) &", "expected"),
            ("forall . P(x)", "variable"),
            ("P(x) $ Q(x)", "unexpected"),
        ];
        for (text, needle) in cases {
            let err = parse_formula(text, &sig()).unwrap_err();
            assert!(err.span.start <= err.span.end && err.span.end <= text.len(), "{text}");
            assert!(err.to_string().contains(needle), "{text}: {err}");
        }
    }

    #[test]
    fn structure_file_z4() {
        let text = "universe 4\n# cyclic group\nconstant e 0\nfunction mul 2\n0 1 2 3\n1 2 3 0\n2 3 0 1\n3 0 1 2\n";
        let m = parse_structure(text).unwrap();
        assert_eq!(m.size(), 4);
        assert_eq!(m.weights(), &vec![Rational::new(1, 4); 4][..]);
        assert_eq!(m.apply("mul", &[3, 2]), Some(1));
        let again = parse_structure(&print_structure(&m)).unwrap();
        assert_eq!(again.function_table("mul"), m.function_table("mul"));
    }

    #[test]
    fn structure_file_errors() {
        let missing = "universe 2\nfunction f 1\n0\nrelation R 1\n0\nend\n";
        let err = parse_structure(missing).unwrap_err();
        assert!(err.to_string().contains("non-total function"), "{err}");
        let range = "universe 2\nrelation R 1\n3\nend\n";
        assert!(matches!(
            parse_structure(range).unwrap_err().kind,
            ParseErrorKind::Structure(StructureError::OutOfRange { element: 3, .. })
        ));
        let empty = "universe 0\n";
        assert!(matches!(
            parse_structure(empty).unwrap_err().kind,
            ParseErrorKind::Structure(StructureError::EmptyUniverse)
        ));
        let total = "universe 3\nmeasure weights 1/2 1/4 1/8 total 1\n";
        assert!(matches!(
            parse_structure(total).unwrap_err().kind,
            ParseErrorKind::Structure(StructureError::WeightTotal { .. })
        ));
        for bad in [missing, range, empty, total, "", "relation R 1\n"] {
            let e = parse_structure(bad).unwrap_err();
            assert!(e.span.end <= bad.len());
        }
    }

    #[test]
    fn weighted_structure_sums_exactly() {
        let m = parse_structure("universe 3\nmeasure weights 1/2 1/4 1/4 total 1\n").unwrap();
        assert_eq!(m.space().total(), &Rational::one());
        assert_eq!(m.full_set(1).measure(), Rational::one());
    }
}
