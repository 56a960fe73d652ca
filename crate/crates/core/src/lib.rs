//! Requirements written as structured natural language, compiled into a
//! LaTeX document, seamless-requirement test routines, inferred contracts
//! and a traceability table.
//!
//! Requirements can be authored in code through the staged builder in
//! [`vocabulary`] or in `.spec` files read by [`frontend`]. Both produce the
//! same [`Specification`], from which [`views`] generates every output.

pub mod canonical;
pub mod diag;
pub mod domain;
pub mod fragment;
pub mod frontend;
pub mod ident;
pub mod model;
pub mod views;
pub mod vocabulary;

#[cfg(feature = "proptest")]
pub mod arbitrary;

pub use canonical::{from_canonical_text, to_canonical_text, CanonicalError};
pub use diag::{Diagnostic, Severity, SourceSpan};
pub use domain::{check_against_model, find_inconsistencies, parse_domain_model, DomainModel};
pub use fragment::{
    parse_bool_expr, parse_call, parse_query, Arith, BoolExpr, CompareOp, Fragment, FragmentError,
    FragmentErrorKind, QualifiedCall, QueryPath,
};
pub use frontend::{format_specogram, parse_specogram, parse_specogram_partial, SourceMap};
pub use ident::{validate_identifier, IdentError, Identifier, TypeName};
pub use model::{EffectKind, ModelError, Requirement, Specification, VariableBinding};
pub use views::{EmitOptions, GeneratedArtifact, ViewKind};
pub use vocabulary::VocabularyError;
