//! The staged requirement builder.
//!
//! Each stage is a distinct type and only offers the phrases that may
//! grammatically follow it:
//!
//! ```text
//! Specification --requirement--> Labeled --states_that_execution_of--> ActionGiven
//! ActionGiven --does_not_change | increments | decrements--> EffectGiven
//! EffectGiven, VarTyped --for_--> VarNamed --of_type--> VarTyped
//! VarTyped --if_in_the_beginning--> Guarded
//! VarTyped, Guarded --period--> ()
//! ```
//!
//! Phrases are grouped into traits so that a phrase shared by two stages
//! (`for_`, `period`) has one definition. Import them with
//! `use specogram::vocabulary::*`.
//!
//! ```
//! use specogram::vocabulary::*;
//! use specogram::Specification;
//!
//! let mut spec = Specification::further_referred_to_as("clock_specification")?;
//! spec.requirement("requirement_1")?
//!     .states_that_execution_of("clock.tick")?
//!     .does_not_change("clock.hour")?
//!     .for_("clock")?
//!     .of_type("CLOCK")?
//!     .if_in_the_beginning("clock.minute < 59")?
//!     .period()?;
//! assert_eq!(spec.len(), 1);
//! # Ok::<(), VocabularyError>(())
//! ```
//!
//! Fragments are parsed by the call that receives them, so a malformed
//! snippet fails at the phrase that introduced it. A chain dropped before
//! `period` leaves the specification untouched; every stage is `#[must_use]`
//! so the compiler warns about such chains.

use thiserror::Error;

use crate::fragment::{
    parse_bool_expr, parse_call, parse_query, BoolExpr, FragmentError, QualifiedCall, QueryPath,
};
use crate::ident::{IdentError, Identifier, TypeName};
use crate::model::{EffectKind, ModelError, Requirement, Specification, VariableBinding};
use crate::views::{self, EmitOptions, GeneratedArtifact};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VocabularyError {
    #[error("`{text}` is not a well-formed identifier: {source}")]
    IllegalIdentifier { text: String, source: IdentError },
    #[error("`{text}`: {source}")]
    Fragment { text: String, source: FragmentError },
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn identifier(text: &str) -> Result<Identifier, VocabularyError> {
    Identifier::new(text).map_err(|source| VocabularyError::IllegalIdentifier {
        text: text.to_owned(),
        source,
    })
}

fn fragment<T>(
    text: &str,
    parse: impl FnOnce(&str) -> Result<T, FragmentError>,
) -> Result<T, VocabularyError> {
    parse(text).map_err(|source| VocabularyError::Fragment {
        text: text.to_owned(),
        source,
    })
}

impl Specification {
    /// Creates an empty, named specification.
    pub fn further_referred_to_as(name: &str) -> Result<Self, VocabularyError> {
        Ok(Specification::new(identifier(name)?))
    }

    /// The seamless-requirement (parameterized unit test) class.
    pub fn writes_seamless_requirements(&self, options: &EmitOptions) -> GeneratedArtifact {
        views::emit_puts(self, options)
    }

    /// The natural-language LaTeX document.
    pub fn writes_latex(&self) -> GeneratedArtifact {
        views::emit_latex(self)
    }
}

#[must_use = "a requirement chain registers nothing until it ends with `.period()`"]
#[derive(Debug)]
pub struct Labeled<'s> {
    spec: &'s mut Specification,
    label: Identifier,
}

#[must_use = "a requirement chain registers nothing until it ends with `.period()`"]
#[derive(Debug)]
pub struct ActionGiven<'s> {
    spec: &'s mut Specification,
    label: Identifier,
    action: QualifiedCall,
}

#[derive(Debug)]
struct Head<'s> {
    spec: &'s mut Specification,
    label: Identifier,
    action: QualifiedCall,
    effect: EffectKind,
}

#[must_use = "a requirement chain registers nothing until it ends with `.period()`"]
#[derive(Debug)]
pub struct EffectGiven<'s> {
    head: Head<'s>,
}

#[must_use = "a requirement chain registers nothing until it ends with `.period()`"]
#[derive(Debug)]
pub struct VarNamed<'s> {
    head: Head<'s>,
    bindings: Vec<VariableBinding>,
    variable: Identifier,
}

#[must_use = "a requirement chain registers nothing until it ends with `.period()`"]
#[derive(Debug)]
pub struct VarTyped<'s> {
    head: Head<'s>,
    bindings: Vec<VariableBinding>,
}

#[must_use = "a requirement chain registers nothing until it ends with `.period()`"]
#[derive(Debug)]
pub struct Guarded<'s> {
    head: Head<'s>,
    bindings: Vec<VariableBinding>,
    guard: BoolExpr,
}

/// Opens a requirement chain; labels it for traceability.
pub trait DefinesRequirement<'s> {
    fn requirement(self, label: &str) -> Result<Labeled<'s>, VocabularyError>;
}

pub trait StatesThatExecutionOf<'s> {
    fn states_that_execution_of(self, call: &str) -> Result<ActionGiven<'s>, VocabularyError>;
}

/// The effect phrases.
pub trait StatesEffect<'s> {
    fn does_not_change(self, query: &str) -> Result<EffectGiven<'s>, VocabularyError>;
    fn increments(self, query: &str) -> Result<EffectGiven<'s>, VocabularyError>;
    fn decrements(self, query: &str) -> Result<EffectGiven<'s>, VocabularyError>;
}

pub trait ForVariable<'s> {
    fn for_(self, variable: &str) -> Result<VarNamed<'s>, VocabularyError>;
}

pub trait OfType<'s> {
    fn of_type(self, type_name: &str) -> Result<VarTyped<'s>, VocabularyError>;
}

pub trait IfInTheBeginning<'s> {
    fn if_in_the_beginning(self, condition: &str) -> Result<Guarded<'s>, VocabularyError>;
}

/// Ends the chain and registers the requirement. Yields nothing.
pub trait Period {
    fn period(self) -> Result<(), VocabularyError>;
}

impl<'s> DefinesRequirement<'s> for &'s mut Specification {
    fn requirement(self, label: &str) -> Result<Labeled<'s>, VocabularyError> {
        Ok(Labeled {
            label: identifier(label)?,
            spec: self,
        })
    }
}

impl<'s> StatesThatExecutionOf<'s> for Labeled<'s> {
    fn states_that_execution_of(self, call: &str) -> Result<ActionGiven<'s>, VocabularyError> {
        Ok(ActionGiven {
            action: fragment(call, parse_call)?,
            spec: self.spec,
            label: self.label,
        })
    }
}

impl<'s> ActionGiven<'s> {
    fn with_effect(
        self,
        query: &str,
        effect: fn(QueryPath) -> EffectKind,
    ) -> Result<EffectGiven<'s>, VocabularyError> {
        let target = fragment(query, parse_query)?;
        Ok(EffectGiven {
            head: Head {
                spec: self.spec,
                label: self.label,
                action: self.action,
                effect: effect(target),
            },
        })
    }
}

impl<'s> StatesEffect<'s> for ActionGiven<'s> {
    fn does_not_change(self, query: &str) -> Result<EffectGiven<'s>, VocabularyError> {
        self.with_effect(query, EffectKind::DoesNotChange)
    }

    fn increments(self, query: &str) -> Result<EffectGiven<'s>, VocabularyError> {
        self.with_effect(query, EffectKind::Increments)
    }

    fn decrements(self, query: &str) -> Result<EffectGiven<'s>, VocabularyError> {
        self.with_effect(query, EffectKind::Decrements)
    }
}

fn name_variable<'s>(
    head: Head<'s>,
    bindings: Vec<VariableBinding>,
    variable: &str,
) -> Result<VarNamed<'s>, VocabularyError> {
    let variable = identifier(variable)?;
    if bindings.iter().any(|b| b.variable == variable) {
        return Err(ModelError::DuplicateBinding(variable).into());
    }
    Ok(VarNamed {
        head,
        bindings,
        variable,
    })
}

impl<'s> ForVariable<'s> for EffectGiven<'s> {
    fn for_(self, variable: &str) -> Result<VarNamed<'s>, VocabularyError> {
        name_variable(self.head, Vec::new(), variable)
    }
}

impl<'s> ForVariable<'s> for VarTyped<'s> {
    fn for_(self, variable: &str) -> Result<VarNamed<'s>, VocabularyError> {
        name_variable(self.head, self.bindings, variable)
    }
}

impl<'s> OfType<'s> for VarNamed<'s> {
    fn of_type(self, type_name: &str) -> Result<VarTyped<'s>, VocabularyError> {
        let declared_type =
            TypeName::new(type_name).map_err(|source| VocabularyError::IllegalIdentifier {
                text: type_name.to_owned(),
                source,
            })?;
        let mut bindings = self.bindings;
        bindings.push(VariableBinding::new(self.variable, declared_type));
        Ok(VarTyped {
            head: self.head,
            bindings,
        })
    }
}

impl<'s> IfInTheBeginning<'s> for VarTyped<'s> {
    fn if_in_the_beginning(self, condition: &str) -> Result<Guarded<'s>, VocabularyError> {
        Ok(Guarded {
            guard: fragment(condition, parse_bool_expr)?,
            head: self.head,
            bindings: self.bindings,
        })
    }
}

fn register(
    head: Head<'_>,
    bindings: Vec<VariableBinding>,
    guard: Option<BoolExpr>,
) -> Result<(), VocabularyError> {
    let req = Requirement::new(head.label, head.action, head.effect, bindings, guard)?;
    head.spec.add_requirement(req)?;
    Ok(())
}

impl Period for VarTyped<'_> {
    fn period(self) -> Result<(), VocabularyError> {
        register(self.head, self.bindings, None)
    }
}

impl Period for Guarded<'_> {
    fn period(self) -> Result<(), VocabularyError> {
        register(self.head, self.bindings, Some(self.guard))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fragment::{Fragment, FragmentErrorKind};

    fn figure_1(spec: &mut Specification) -> Result<(), VocabularyError> {
        spec.requirement("requirement_1")?
            .states_that_execution_of("clock.tick")?
            .does_not_change("clock.hour")?
            .for_("clock")?
            .of_type("CLOCK")?
            .if_in_the_beginning("clock.minute < 59")?
            .period()
    }

    fn spec() -> Specification {
        Specification::further_referred_to_as("clock_specification").unwrap()
    }

    #[test]
    fn figure_1_chain_registers_requirement() {
        let mut s = spec();
        figure_1(&mut s).unwrap();
        assert_eq!(s.len(), 1);
        let r = &s.requirements()[0];
        assert_eq!(r.label().as_str(), "requirement_1");
        assert_eq!(r.action().render(), "clock.tick");
        assert!(matches!(r.effect(), EffectKind::DoesNotChange(t) if t.render() == "clock.hour"));
        assert_eq!(r.bindings()[0].to_string(), "clock: CLOCK");
        assert_eq!(r.guard().unwrap().render(), "clock.minute < 59");
    }

    #[test]
    fn malformed_label() {
        let mut s = spec();
        let err = s.requirement("requirement 1").unwrap_err();
        assert_eq!(
            err,
            VocabularyError::IllegalIdentifier {
                text: "requirement 1".into(),
                source: IdentError::IllegalCharacterAt(11),
            }
        );
        assert!(matches!(
            s.requirement("").unwrap_err(),
            VocabularyError::IllegalIdentifier {
                source: IdentError::EmptyInput,
                ..
            }
        ));
    }

    #[test]
    fn fragment_errors_surface_at_their_phrase() {
        let mut s = spec();
        let err = s
            .requirement("r")
            .unwrap()
            .states_that_execution_of("clock")
            .unwrap_err();
        assert!(matches!(
            err,
            VocabularyError::Fragment {
                source: FragmentError {
                    kind: FragmentErrorKind::MissingDot,
                    ..
                },
                ..
            }
        ));
        let err = s
            .requirement("r")
            .unwrap()
            .states_that_execution_of("clock.tick")
            .unwrap()
            .does_not_change("clock..hour")
            .unwrap_err();
        match err {
            VocabularyError::Fragment { source, .. } => {
                assert_eq!(source.kind, FragmentErrorKind::IllegalIdentifier);
                assert_eq!(source.span.start, 6);
            }
            other => panic!("{other:?}"),
        }
        let err = s
            .requirement("r")
            .unwrap()
            .states_that_execution_of("clock.tick")
            .unwrap()
            .increments("clock.minute")
            .unwrap()
            .for_("clock")
            .unwrap()
            .of_type("CLOCK")
            .unwrap()
            .if_in_the_beginning("clock.minute <")
            .unwrap_err();
        assert!(matches!(
            err,
            VocabularyError::Fragment {
                source: FragmentError {
                    kind: FragmentErrorKind::DanglingOperand,
                    ..
                },
                ..
            }
        ));
        assert!(s.is_empty());
    }

    #[test]
    fn unguarded_and_true_guard() {
        let mut s = spec();
        s.requirement("r1")
            .unwrap()
            .states_that_execution_of("counter.bump")
            .unwrap()
            .increments("counter.value")
            .unwrap()
            .for_("counter")
            .unwrap()
            .of_type("COUNTER")
            .unwrap()
            .period()
            .unwrap();
        s.requirement("r2")
            .unwrap()
            .states_that_execution_of("counter.bump")
            .unwrap()
            .decrements("counter.value")
            .unwrap()
            .for_("counter")
            .unwrap()
            .of_type("COUNTER")
            .unwrap()
            .if_in_the_beginning("True")
            .unwrap()
            .period()
            .unwrap();
        assert_eq!(s.requirements()[0].guard(), None);
        assert_eq!(s.requirements()[1].guard(), Some(&BoolExpr::True));
        assert!(matches!(s.requirements()[0].effect(), EffectKind::Increments(_)));
    }

    #[test]
    fn duplicate_binding_fails_fast() {
        let mut s = spec();
        let err = s
            .requirement("r")
            .unwrap()
            .states_that_execution_of("clock.tick")
            .unwrap()
            .does_not_change("clock.hour")
            .unwrap()
            .for_("clock")
            .unwrap()
            .of_type("CLOCK")
            .unwrap()
            .for_("clock")
            .unwrap_err();
        assert_eq!(
            err,
            VocabularyError::Model(ModelError::DuplicateBinding(Identifier::new("clock").unwrap()))
        );
    }

    #[test]
    fn two_bindings_in_call_order() {
        let mut s = spec();
        s.requirement("transfer")
            .unwrap()
            .states_that_execution_of("a.withdraw")
            .unwrap()
            .does_not_change("b.balance")
            .unwrap()
            .for_("a")
            .unwrap()
            .of_type("T1")
            .unwrap()
            .for_("b")
            .unwrap()
            .of_type("T2")
            .unwrap()
            .period()
            .unwrap();
        let names: Vec<_> = s.requirements()[0]
            .bindings()
            .iter()
            .map(|b| b.to_string())
            .collect();
        assert_eq!(names, ["a: T1", "b: T2"]);
    }

    #[test]
    fn unbound_guard_variable() {
        let mut s = spec();
        let err = s
            .requirement("r")
            .unwrap()
            .states_that_execution_of("clock.tick")
            .unwrap()
            .does_not_change("clock.hour")
            .unwrap()
            .for_("clock")
            .unwrap()
            .of_type("CLOCK")
            .unwrap()
            .if_in_the_beginning("server.load < 3")
            .unwrap()
            .period()
            .unwrap_err();
        assert_eq!(
            err,
            VocabularyError::Model(ModelError::UnboundVariable(vec![
                Identifier::new("server").unwrap()
            ]))
        );
        assert!(s.is_empty());
    }

    #[test]
    fn duplicate_label_on_period() {
        let mut s = spec();
        figure_1(&mut s).unwrap();
        let err = figure_1(&mut s).unwrap_err();
        assert!(matches!(
            err,
            VocabularyError::Model(ModelError::DuplicateLabel(_))
        ));
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn abandoned_chain_leaves_spec_unchanged() {
        let mut s = spec();
        let before = s.clone();
        let stage = s
            .requirement("r")
            .unwrap()
            .states_that_execution_of("clock.tick")
            .unwrap()
            .does_not_change("clock.hour")
            .unwrap()
            .for_("clock")
            .unwrap()
            .of_type("CLOCK")
            .unwrap();
        drop(stage);
        assert_eq!(s, before);
    }
}
