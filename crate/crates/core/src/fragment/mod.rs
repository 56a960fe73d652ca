//! Quoted domain snippets: qualified calls, query paths and guard conditions.
//!
//! Grammar of guard conditions, loosest binding first:
//!
//! ```text
//! or_expr   -> and_expr ("or" and_expr)*
//! and_expr  -> not_expr ("and" not_expr)*
//! not_expr  -> "not" not_expr | comparison
//! comparison-> arith (("<" | "<=" | ">" | ">=" | "=" | "/=") arith)?
//! arith     -> atom (("+" | "-") atom)*
//! atom      -> INT | "-" INT | path | "True" | "False" | "(" or_expr ")"
//! path      -> IDENT ("." IDENT)+
//! ```
//!
//! Parsing is untyped at first; operands are then checked to be conditions
//! or integer expressions as their position demands.

mod lexer;
mod parser;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::ident::Identifier;

pub use parser::{parse_bool_expr, parse_call, parse_query};

/// Half-open range of character offsets into a fragment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub len: usize,
}

impl Span {
    pub fn new(start: usize, len: usize) -> Self {
        Span { start, len }
    }

    pub fn end(&self) -> usize {
        self.start + self.len
    }

    fn to(self, other: Span) -> Span {
        Span::new(self.start, other.end().saturating_sub(self.start))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FragmentErrorKind {
    EmptyInput,
    MissingDot,
    IllegalIdentifier,
    TrailingGarbage,
    UnbalancedParenthesis,
    UnknownOperator,
    DanglingOperand,
    IntegerOverflow,
    /// A condition appeared where an integer was needed or the reverse.
    TypeMismatch,
    NestingTooDeep,
}

impl FragmentErrorKind {
    pub fn code(&self) -> &'static str {
        match self {
            FragmentErrorKind::EmptyInput => "EmptyInput",
            FragmentErrorKind::MissingDot => "MissingDot",
            FragmentErrorKind::IllegalIdentifier => "IllegalIdentifier",
            FragmentErrorKind::TrailingGarbage => "TrailingGarbage",
            FragmentErrorKind::UnbalancedParenthesis => "UnbalancedParenthesis",
            FragmentErrorKind::UnknownOperator => "UnknownOperator",
            FragmentErrorKind::DanglingOperand => "DanglingOperand",
            FragmentErrorKind::IntegerOverflow => "IntegerOverflow",
            FragmentErrorKind::TypeMismatch => "TypeMismatch",
            FragmentErrorKind::NestingTooDeep => "NestingTooDeep",
        }
    }
}

/// A rejected fragment, with the offending range of the input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} (at position {})", span.start)]
pub struct FragmentError {
    pub kind: FragmentErrorKind,
    pub span: Span,
    pub message: String,
}

impl FragmentError {
    pub(crate) fn new(kind: FragmentErrorKind, span: Span, message: impl Into<String>) -> Self {
        FragmentError {
            kind,
            span,
            message: message.into(),
        }
    }

    pub fn position(&self) -> usize {
        self.span.start
    }
}

/// A dotted path `root.feature(.feature)*`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct DottedPath {
    root: Identifier,
    path: Vec<Identifier>,
}

impl DottedPath {
    fn new(root: Identifier, path: Vec<Identifier>) -> Option<Self> {
        (!path.is_empty()).then_some(DottedPath { root, path })
    }

    fn write(&self, f: &mut impl fmt::Write, skip_root: bool) -> fmt::Result {
        if !skip_root {
            f.write_str(self.root.as_str())?;
        }
        for (i, seg) in self.path.iter().enumerate() {
            if i > 0 || !skip_root {
                f.write_char('.')?;
            }
            f.write_str(seg.as_str())?;
        }
        Ok(())
    }
}

macro_rules! dotted {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(DottedPath);

        impl $name {
            /// Returns `None` when `path` is empty.
            pub fn new(root: Identifier, path: Vec<Identifier>) -> Option<Self> {
                DottedPath::new(root, path).map(Self)
            }

            pub fn root(&self) -> &Identifier {
                &self.0.root
            }

            /// Feature names after the root; never empty.
            pub fn path(&self) -> &[Identifier] {
                &self.0.path
            }

            /// The last feature name.
            pub fn feature(&self) -> &Identifier {
                self.0.path.last().expect("path is never empty")
            }

            /// Renders the path without its root, e.g. `hour` for `clock.hour`.
            pub fn render_without_root(&self) -> String {
                let mut out = String::new();
                self.0.write(&mut out, true).expect("writing to a String");
                out
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.write(f, false)
            }
        }
    };
}

dotted! {
    /// The action of a requirement, e.g. `clock.tick`.
    QualifiedCall
}

dotted! {
    /// A value-yielding path, e.g. `clock.hour`.
    QueryPath
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CompareOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl CompareOp {
    pub const ALL: [CompareOp; 6] = [
        CompareOp::Lt,
        CompareOp::Le,
        CompareOp::Gt,
        CompareOp::Ge,
        CompareOp::Eq,
        CompareOp::Ne,
    ];

    pub fn symbol(&self) -> &'static str {
        match self {
            CompareOp::Lt => "<",
            CompareOp::Le => "<=",
            CompareOp::Gt => ">",
            CompareOp::Ge => ">=",
            CompareOp::Eq => "=",
            CompareOp::Ne => "/=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Arith {
    Query(QueryPath),
    Int(i64),
    Add(Box<Arith>, Box<Arith>),
    Sub(Box<Arith>, Box<Arith>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BoolExpr {
    Compare {
        left: Arith,
        op: CompareOp,
        right: Arith,
    },
    And(Box<BoolExpr>, Box<BoolExpr>),
    Or(Box<BoolExpr>, Box<BoolExpr>),
    Not(Box<BoolExpr>),
    True,
    False,
}

#[allow(clippy::should_implement_trait)]
impl BoolExpr {
    pub fn compare(left: Arith, op: CompareOp, right: Arith) -> Self {
        BoolExpr::Compare { left, op, right }
    }

    pub fn and(l: BoolExpr, r: BoolExpr) -> Self {
        BoolExpr::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: BoolExpr, r: BoolExpr) -> Self {
        BoolExpr::Or(Box::new(l), Box::new(r))
    }

    pub fn not(e: BoolExpr) -> Self {
        BoolExpr::Not(Box::new(e))
    }

    pub fn is_true(&self) -> bool {
        matches!(self, BoolExpr::True)
    }

    /// Every query reference, left to right.
    pub fn queries(&self) -> Vec<&QueryPath> {
        let mut out = Vec::new();
        self.collect_queries(&mut out);
        out
    }

    fn collect_queries<'a>(&'a self, out: &mut Vec<&'a QueryPath>) {
        match self {
            BoolExpr::Compare { left, right, .. } => {
                left.collect_queries(out);
                right.collect_queries(out);
            }
            BoolExpr::And(l, r) | BoolExpr::Or(l, r) => {
                l.collect_queries(out);
                r.collect_queries(out);
            }
            BoolExpr::Not(e) => e.collect_queries(out),
            BoolExpr::True | BoolExpr::False => {}
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            BoolExpr::Or(..) => 1,
            BoolExpr::And(..) => 2,
            BoolExpr::Not(..) => 3,
            BoolExpr::Compare { .. } | BoolExpr::True | BoolExpr::False => 4,
        }
    }

    /// Renders with a custom spelling for query references.
    pub fn render_with(&self, query: &dyn Fn(&QueryPath) -> String) -> String {
        let mut out = String::new();
        self.write(&mut out, 0, query);
        out
    }

    fn write(&self, out: &mut String, min_prec: u8, query: &dyn Fn(&QueryPath) -> String) {
        let parens = self.precedence() < min_prec;
        if parens {
            out.push('(');
        }
        match self {
            BoolExpr::Compare { left, op, right } => {
                left.write(out, 0, query);
                out.push(' ');
                out.push_str(op.symbol());
                out.push(' ');
                right.write(out, 0, query);
            }
            BoolExpr::Or(l, r) => {
                l.write(out, 1, query);
                out.push_str(" or ");
                r.write(out, 2, query);
            }
            BoolExpr::And(l, r) => {
                l.write(out, 2, query);
                out.push_str(" and ");
                r.write(out, 3, query);
            }
            BoolExpr::Not(e) => {
                out.push_str("not ");
                e.write(out, 3, query);
            }
            BoolExpr::True => out.push_str("True"),
            BoolExpr::False => out.push_str("False"),
        }
        if parens {
            out.push(')');
        }
    }
}

#[allow(clippy::should_implement_trait)]
impl Arith {
    pub fn add(l: Arith, r: Arith) -> Self {
        Arith::Add(Box::new(l), Box::new(r))
    }

    pub fn sub(l: Arith, r: Arith) -> Self {
        Arith::Sub(Box::new(l), Box::new(r))
    }

    fn collect_queries<'a>(&'a self, out: &mut Vec<&'a QueryPath>) {
        match self {
            Arith::Query(q) => out.push(q),
            Arith::Int(_) => {}
            Arith::Add(l, r) | Arith::Sub(l, r) => {
                l.collect_queries(out);
                r.collect_queries(out);
            }
        }
    }

    fn write(&self, out: &mut String, min_prec: u8, query: &dyn Fn(&QueryPath) -> String) {
        match self {
            Arith::Query(q) => out.push_str(&query(q)),
            Arith::Int(v) => out.push_str(&v.to_string()),
            Arith::Add(l, r) | Arith::Sub(l, r) => {
                let parens = min_prec > 1;
                if parens {
                    out.push('(');
                }
                l.write(out, 1, query);
                out.push_str(if matches!(self, Arith::Add(..)) {
                    " + "
                } else {
                    " - "
                });
                r.write(out, 2, query);
                if parens {
                    out.push(')');
                }
            }
        }
    }
}

impl fmt::Display for Arith {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        self.write(&mut out, 0, &|q| q.to_string());
        f.write_str(&out)
    }
}

impl fmt::Display for BoolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_with(&|q| q.to_string()))
    }
}

/// Operations shared by every fragment AST.
pub trait Fragment {
    /// Root identifiers of every call or query reference.
    fn free_roots(&self) -> BTreeSet<Identifier>;

    /// Canonical single-spaced text; reparses to an equal AST.
    fn render(&self) -> String;
}

impl Fragment for QualifiedCall {
    fn free_roots(&self) -> BTreeSet<Identifier> {
        BTreeSet::from([self.root().clone()])
    }

    fn render(&self) -> String {
        self.to_string()
    }
}

impl Fragment for QueryPath {
    fn free_roots(&self) -> BTreeSet<Identifier> {
        BTreeSet::from([self.root().clone()])
    }

    fn render(&self) -> String {
        self.to_string()
    }
}

impl Fragment for BoolExpr {
    fn free_roots(&self) -> BTreeSet<Identifier> {
        self.queries().into_iter().map(|q| q.root().clone()).collect()
    }

    fn render(&self) -> String {
        self.to_string()
    }
}
