//! `.spec` files: the textual image of the builder chain.
//!
//! ```text
//! specification clock_specification
//!
//! requirement requirement_1 states that execution of "clock.tick"
//!   does not change "clock.hour"
//!   for clock of type CLOCK
//!   if in the beginning "clock.minute < 59".
//! ```
//!
//! Line breaks and indentation between tokens are insignificant, `--`
//! starts a comment, and `.` ends a requirement the way `.period` ends a
//! chain. A syntax error skips to the next `.` and parsing resumes there.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::diag::{Diagnostic, SourceSpan};
use crate::fragment::{
    parse_bool_expr, parse_call, parse_query, BoolExpr, Fragment, FragmentError, QueryPath,
};
use crate::ident::{Identifier, TypeName};
use crate::model::{EffectKind, ModelError, Requirement, Specification, VariableBinding};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    /// Contents of a double-quoted fragment.
    Str(String),
    Dot,
    Other(char),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    /// Column of the first character; for strings, of the opening quote.
    column: usize,
    /// Length in characters, quotes included.
    len: usize,
}

impl Token {
    fn describe(&self) -> String {
        match &self.tok {
            Tok::Word(w) => format!("`{w}`"),
            Tok::Str(s) => format!("\"{s}\""),
            Tok::Dot => "`.`".into(),
            Tok::Other(c) => format!("`{c}`"),
        }
    }
}

struct Lexed {
    tokens: Vec<Token>,
    errors: Vec<(usize, usize, usize, String)>,
}

fn lex(text: &str) -> Lexed {
    let mut tokens = Vec::new();
    let mut errors = Vec::new();
    for (line_idx, line) in text.split('\n').enumerate() {
        let line_no = line_idx + 1;
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let column = i + 1;
            if c.is_whitespace() {
                i += 1;
            } else if c == '-' && chars.get(i + 1) == Some(&'-') {
                break;
            } else if c.is_ascii_alphanumeric() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                tokens.push(Token {
                    tok: Tok::Word(chars[start..i].iter().collect()),
                    line: line_no,
                    column,
                    len: i - start,
                });
            } else if c == '"' {
                let start = i;
                i += 1;
                while i < chars.len() && chars[i] != '"' {
                    i += 1;
                }
                let content: String = chars[start + 1..i].iter().collect();
                if i == chars.len() {
                    errors.push((line_no, column, i - start, "unterminated string".to_string()));
                } else {
                    i += 1;
                }
                tokens.push(Token {
                    tok: Tok::Str(content),
                    line: line_no,
                    column,
                    len: i - start,
                });
            } else {
                tokens.push(Token {
                    tok: if c == '.' { Tok::Dot } else { Tok::Other(c) },
                    line: line_no,
                    column,
                    len: 1,
                });
                i += 1;
            }
        }
    }
    Lexed { tokens, errors }
}

/// Where each component of a parsed requirement sits in its file.
/// Fragment spans cover the text between the quotes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RequirementSpans {
    pub label: SourceSpan,
    pub action: SourceSpan,
    pub target: SourceSpan,
    /// `(variable, type)` per binding, in binding order.
    pub bindings: Vec<(SourceSpan, SourceSpan)>,
    pub guard: Option<SourceSpan>,
}

/// Spans for every requirement of a parsed file, in requirement order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SourceMap {
    pub file: PathBuf,
    pub header: Option<SourceSpan>,
    pub requirements: Vec<RequirementSpans>,
}

impl SourceMap {
    pub fn requirement(&self, index: usize) -> Option<&RequirementSpans> {
        self.requirements.get(index)
    }

    /// Fallback span used when no better location exists.
    pub fn file_start(&self) -> SourceSpan {
        SourceSpan::new(&self.file, 1, 1, 0)
    }
}

/// Everything `parse_specogram_partial` recovers from a file.
#[derive(Debug, Clone)]
pub struct ParsedSpecogram {
    /// `None` only when the header itself is unusable.
    pub spec: Option<Specification>,
    pub source_map: SourceMap,
    pub diagnostics: Vec<Diagnostic>,
}

/// Parses a file, failing when any error diagnostic is produced.
pub fn parse_specogram(text: &str, file: impl AsRef<Path>) -> Result<Specification, Vec<Diagnostic>> {
    let parsed = parse_specogram_partial(text, file);
    match parsed.spec {
        Some(spec) if !crate::diag::has_errors(&parsed.diagnostics) => Ok(spec),
        _ => Err(parsed.diagnostics),
    }
}

/// Parses a file, keeping every well-formed requirement alongside the
/// diagnostics for the malformed ones.
pub fn parse_specogram_partial(text: &str, file: impl AsRef<Path>) -> ParsedSpecogram {
    let file = file.as_ref().to_path_buf();
    let lexed = lex(text);
    let mut p = FileParser {
        file: file.clone(),
        tokens: lexed.tokens,
        pos: 0,
        diagnostics: Vec::new(),
        last_line: text.split('\n').count(),
    };
    for (line, column, len, message) in lexed.errors {
        let span = p.span_at(line, column, len);
        p.diagnostics
            .push(Diagnostic::error("UnterminatedString", message, span));
    }

    let mut source_map = SourceMap {
        file,
        header: None,
        requirements: Vec::new(),
    };
    let spec = match p.header() {
        Ok((name, span)) => {
            source_map.header = Some(span);
            Some(Specification::new(name))
        }
        Err(d) => {
            p.diagnostics.push(d);
            p.skip_past_dot();
            None
        }
    };
    let mut spec = spec;
    while p.pos < p.tokens.len() {
        let start = p.pos;
        match p.requirement() {
            Ok((req, spans)) => {
                let Some(spec) = spec.as_mut() else { continue };
                let label = req.label().clone();
                match spec.add_requirement(req) {
                    Ok(()) => source_map.requirements.push(spans),
                    Err(_) => p.diagnostics.push(Diagnostic::error(
                        "DuplicateLabel",
                        format!("requirement `{label}` is already defined"),
                        spans.label,
                    )),
                }
            }
            Err(d) => {
                p.diagnostics.push(d);
                // Semantic errors are found after the `.` has been read.
                let terminated = p.pos > start && p.tokens[p.pos - 1].tok == Tok::Dot;
                if !terminated {
                    p.skip_past_dot();
                }
            }
        }
    }
    p.diagnostics.sort_by_key(|d| (d.span.line, d.span.column));
    ParsedSpecogram {
        spec,
        source_map,
        diagnostics: p.diagnostics,
    }
}

struct FileParser {
    file: PathBuf,
    tokens: Vec<Token>,
    pos: usize,
    diagnostics: Vec<Diagnostic>,
    last_line: usize,
}

type Parsed<T> = Result<T, Diagnostic>;

impl FileParser {
    fn span_at(&self, line: usize, column: usize, len: usize) -> SourceSpan {
        SourceSpan::new(&self.file, line, column, len)
    }

    fn span_of(&self, t: &Token) -> SourceSpan {
        self.span_at(t.line, t.column, t.len)
    }

    /// Span of the text between a string token's quotes.
    fn content_span(&self, t: &Token) -> SourceSpan {
        let len = match &t.tok {
            Tok::Str(s) => s.chars().count(),
            _ => t.len,
        };
        self.span_at(t.line, t.column + 1, len)
    }

    fn here(&self) -> SourceSpan {
        match self.tokens.get(self.pos) {
            Some(t) => self.span_of(t),
            None => match self.tokens.last() {
                Some(t) => self.span_at(t.line, t.column + t.len, 0),
                None => self.span_at(self.last_line.max(1), 1, 0),
            },
        }
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_word(&self) -> Option<&str> {
        match self.peek() {
            Some(Token {
                tok: Tok::Word(w), ..
            }) => Some(w),
            _ => None,
        }
    }

    fn expected(&self, what: &str) -> Diagnostic {
        let found = self
            .peek()
            .map(|t| t.describe())
            .unwrap_or_else(|| "end of file".into());
        Diagnostic::error("Syntax", format!("expected {what}, found {found}"), self.here())
    }

    fn skip_past_dot(&mut self) {
        while let Some(t) = self.tokens.get(self.pos) {
            self.pos += 1;
            if t.tok == Tok::Dot {
                break;
            }
        }
    }

    fn keywords(&mut self, phrase: &str) -> Parsed<()> {
        for word in phrase.split(' ') {
            if self.peek_word() != Some(word) {
                return Err(self.expected(&format!("`{phrase}`")));
            }
            self.pos += 1;
        }
        Ok(())
    }

    fn at_phrase(&self, phrase: &str) -> bool {
        phrase.split(' ').enumerate().all(|(k, word)| {
            matches!(self.tokens.get(self.pos + k), Some(Token { tok: Tok::Word(w), .. }) if w == word)
        })
    }

    fn word<T>(
        &mut self,
        what: &str,
        make: impl FnOnce(&str) -> Result<T, crate::ident::IdentError>,
    ) -> Parsed<(T, SourceSpan)> {
        let Some(t) = self.peek().cloned() else {
            return Err(self.expected(what));
        };
        let Tok::Word(w) = &t.tok else {
            return Err(self.expected(what));
        };
        let span = self.span_of(&t);
        let value = make(w).map_err(|e| {
            Diagnostic::error(
                "IllegalIdentifier",
                format!("`{w}` is not a well-formed {what}: {e}"),
                self.span_at(t.line, t.column + e.position(), 1),
            )
        })?;
        self.pos += 1;
        Ok((value, span))
    }

    fn fragment<T>(
        &mut self,
        what: &str,
        parse: impl FnOnce(&str) -> Result<T, FragmentError>,
    ) -> Parsed<(T, SourceSpan)> {
        let t = match self.peek() {
            Some(t @ Token { tok: Tok::Str(_), .. }) => t.clone(),
            _ => return Err(self.expected(&format!("a quoted {what}"))),
        };
        let Tok::Str(text) = &t.tok else { unreachable!() };
        let content = self.content_span(&t);
        let value = parse(text).map_err(|e| {
            let span = self.span_at(content.line, content.column + e.span.start, e.span.len);
            Diagnostic::error(
                e.kind.code(),
                format!("in {what} \"{text}\": {}", e.message),
                span,
            )
        })?;
        self.pos += 1;
        Ok((value, content))
    }

    fn header(&mut self) -> Parsed<(Identifier, SourceSpan)> {
        self.keywords("specification")?;
        self.word("specification name", Identifier::from_str)
    }

    /// The label runs up to `states`; several tokens there mean the label
    /// contains characters an identifier may not.
    fn label(&mut self) -> Parsed<(Identifier, SourceSpan)> {
        let start = self.pos;
        while let Some(t) = self.peek() {
            if matches!(&t.tok, Tok::Word(w) if w == "states") || matches!(t.tok, Tok::Str(_) | Tok::Dot) {
                break;
            }
            self.pos += 1;
        }
        let label_tokens = &self.tokens[start..self.pos];
        let Some(first) = label_tokens.first().cloned() else {
            return Err(self.expected("a requirement label"));
        };
        let same_line: Vec<&Token> = label_tokens.iter().take_while(|t| t.line == first.line).collect();
        let last = same_line.last().expect("first token is on its own line");
        let width = last.column + last.len - first.column;
        let text = match (&first.tok, label_tokens.len()) {
            (Tok::Word(w), 1) => w.clone(),
            _ => {
                // Rebuild the label as it appears on the line, spaces included.
                let mut s = String::new();
                let mut col = first.column;
                for t in &same_line {
                    while col < t.column {
                        s.push(' ');
                        col += 1;
                    }
                    s.push_str(&raw_text(t));
                    col += t.len;
                }
                s
            }
        };
        let span = self.span_at(first.line, first.column, width);
        match Identifier::new(text.as_str()) {
            Ok(id) if label_tokens.len() == 1 => Ok((id, span)),
            Ok(_) => Err(Diagnostic::error(
                "IllegalIdentifier",
                "requirement label spans several lines".to_string(),
                span,
            )),
            Err(e) => Err(Diagnostic::error(
                "IllegalIdentifier",
                format!("requirement label `{text}` is not a well-formed identifier: {e}"),
                self.span_at(first.line, first.column + e.position(), 1),
            )),
        }
    }

    fn requirement(&mut self) -> Parsed<(Requirement, RequirementSpans)> {
        self.keywords("requirement")?;
        let (label, label_span) = self.label()?;
        self.keywords("states that execution of")?;
        let (action, action_span) = self.fragment("call", parse_call)?;

        let effect_ctor: fn(QueryPath) -> EffectKind = if self.at_phrase("does not change") {
            self.pos += 3;
            EffectKind::DoesNotChange
        } else if self.at_phrase("increments") {
            self.pos += 1;
            EffectKind::Increments
        } else if self.at_phrase("decrements") {
            self.pos += 1;
            EffectKind::Decrements
        } else {
            return Err(self.expected("`does not change`, `increments` or `decrements`"));
        };
        let (target, target_span) = self.fragment("query", parse_query)?;
        let effect = effect_ctor(target);

        let mut bindings: Vec<VariableBinding> = Vec::new();
        let mut binding_spans = Vec::new();
        loop {
            self.keywords("for")?;
            let (variable, var_span) = self.word("variable name", Identifier::from_str)?;
            if bindings.iter().any(|b| b.variable == variable) {
                return Err(Diagnostic::error(
                    "DuplicateBinding",
                    format!("variable `{variable}` is bound twice"),
                    var_span,
                ));
            }
            self.keywords("of type")?;
            let (declared_type, type_span) = self.word("type name", TypeName::from_str)?;
            bindings.push(VariableBinding::new(variable, declared_type));
            binding_spans.push((var_span, type_span));
            if !self.at_phrase("for") {
                break;
            }
        }

        let mut guard: Option<(BoolExpr, SourceSpan)> = None;
        if self.at_phrase("if in the beginning") {
            self.pos += 4;
            guard = Some(self.fragment("condition", parse_bool_expr)?);
        }
        match self.peek() {
            Some(Token { tok: Tok::Dot, .. }) => self.pos += 1,
            _ => {
                let what = if guard.is_some() {
                    "`.` ending the requirement"
                } else {
                    "`for`, `if in the beginning` or `.` ending the requirement"
                };
                return Err(self.expected(what));
            }
        }

        let spans = RequirementSpans {
            label: label_span.clone(),
            action: action_span.clone(),
            target: target_span.clone(),
            bindings: binding_spans,
            guard: guard.as_ref().map(|(_, s)| s.clone()),
        };
        let (guard_expr, guard_span) = match guard {
            Some((g, s)) => (Some(g), Some(s)),
            None => (None, None),
        };
        let unbound_site = |bound: &BTreeSet<&Identifier>| {
            let mut sites: Vec<(BTreeSet<Identifier>, &SourceSpan)> = vec![
                (action.free_roots(), &action_span),
                (effect.target().free_roots(), &target_span),
            ];
            if let (Some(g), Some(s)) = (&guard_expr, &guard_span) {
                sites.push((g.free_roots(), s));
            }
            sites
                .into_iter()
                .find(|(roots, _)| roots.iter().any(|r| !bound.contains(r)))
                .map(|(_, s)| s.clone())
        };
        let bound: BTreeSet<&Identifier> = bindings.iter().map(|b| &b.variable).collect();
        let site = unbound_site(&bound).unwrap_or_else(|| label_span.clone());
        Requirement::new(label, action, effect, bindings, guard_expr)
            .map(|req| (req, spans))
            .map_err(|e| match e {
                ModelError::UnboundVariable(_) => Diagnostic::error("UnboundVariable", e.to_string(), site),
                other => Diagnostic::error("InvalidRequirement", other.to_string(), label_span),
            })
    }
}

fn raw_text(t: &Token) -> String {
    match &t.tok {
        Tok::Word(w) => w.clone(),
        Tok::Str(s) => format!("\"{s}\""),
        Tok::Dot => ".".into(),
        Tok::Other(c) => c.to_string(),
    }
}

/// Canonical layout: one clause per line, two-space continuation indent.
pub fn format_specogram(spec: &Specification) -> String {
    let mut out = format!("specification {}\n", spec.name());
    for req in spec.requirements() {
        out.push('\n');
        out.push_str(&format!(
            "requirement {} states that execution of \"{}\"\n",
            req.label(),
            req.action().render()
        ));
        out.push_str(&format!(
            "  {} \"{}\"",
            req.effect().phrase(),
            req.effect().target().render()
        ));
        for b in req.bindings() {
            out.push_str(&format!("\n  for {} of type {}", b.variable, b.declared_type));
        }
        if let Some(g) = req.guard() {
            out.push_str(&format!("\n  if in the beginning \"{}\"", g.render()));
        }
        out.push_str(".\n");
    }
    out
}

/// Source map of `spec` as laid out by [`format_specogram`], for
/// specifications that were built in code rather than read from a file.
pub fn synthesized_source_map(spec: &Specification, file: impl AsRef<Path>) -> SourceMap {
    parse_specogram_partial(&format_specogram(spec), file).source_map
}
