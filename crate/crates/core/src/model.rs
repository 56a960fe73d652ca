//! Requirements and specifications.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::fragment::{BoolExpr, Fragment, QualifiedCall, QueryPath};
use crate::ident::{Identifier, TypeName};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VariableBinding {
    pub variable: Identifier,
    pub declared_type: TypeName,
}

impl VariableBinding {
    pub fn new(variable: Identifier, declared_type: TypeName) -> Self {
        VariableBinding {
            variable,
            declared_type,
        }
    }
}

impl fmt::Display for VariableBinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.variable, self.declared_type)
    }
}

/// What executing the action does to the target query.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum EffectKind {
    DoesNotChange(QueryPath),
    /// New value is the old value plus one.
    Increments(QueryPath),
    /// New value is the old value minus one.
    Decrements(QueryPath),
}

impl EffectKind {
    pub fn target(&self) -> &QueryPath {
        match self {
            EffectKind::DoesNotChange(t) | EffectKind::Increments(t) | EffectKind::Decrements(t) => t,
        }
    }

    /// The natural-language verb phrase: `does not change`, `increments`, `decrements`.
    pub fn phrase(&self) -> &'static str {
        match self {
            EffectKind::DoesNotChange(_) => "does not change",
            EffectKind::Increments(_) => "increments",
            EffectKind::Decrements(_) => "decrements",
        }
    }

    /// Keyword used by the canonical document.
    pub fn keyword(&self) -> &'static str {
        match self {
            EffectKind::DoesNotChange(_) => "does_not_change",
            EffectKind::Increments(_) => "increments",
            EffectKind::Decrements(_) => "decrements",
        }
    }

    /// Whether the target must be integer-valued.
    pub fn is_arithmetic(&self) -> bool {
        !matches!(self, EffectKind::DoesNotChange(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("requirement `{0}` already exists in the specification")]
    DuplicateLabel(Identifier),
    #[error("variable `{0}` is bound twice")]
    DuplicateBinding(Identifier),
    #[error("unbound variable{}: {}", if .0.len() > 1 { "s" } else { "" }, join(.0))]
    UnboundVariable(Vec<Identifier>),
    #[error("a requirement needs at least one variable binding")]
    NoBindings,
}

fn join(ids: &[Identifier]) -> String {
    ids.iter()
        .map(|i| format!("`{i}`"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// A labelled requirement: executing `action` has `effect`, for the
/// given variables, when `guard` holds beforehand.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Requirement {
    label: Identifier,
    action: QualifiedCall,
    effect: EffectKind,
    bindings: Vec<VariableBinding>,
    guard: Option<BoolExpr>,
}

impl Requirement {
    /// Builds a requirement, checking that bindings are unique and that
    /// every root used by the action, effect and guard is bound.
    pub fn new(
        label: Identifier,
        action: QualifiedCall,
        effect: EffectKind,
        bindings: Vec<VariableBinding>,
        guard: Option<BoolExpr>,
    ) -> Result<Self, ModelError> {
        if bindings.is_empty() {
            return Err(ModelError::NoBindings);
        }
        let mut bound = BTreeSet::new();
        for b in &bindings {
            if !bound.insert(b.variable.clone()) {
                return Err(ModelError::DuplicateBinding(b.variable.clone()));
            }
        }
        let req = Requirement {
            label,
            action,
            effect,
            bindings,
            guard,
        };
        let unbound: Vec<_> = req
            .free_roots()
            .into_iter()
            .filter(|r| !bound.contains(r))
            .collect();
        if !unbound.is_empty() {
            return Err(ModelError::UnboundVariable(unbound));
        }
        Ok(req)
    }

    pub fn label(&self) -> &Identifier {
        &self.label
    }

    pub fn action(&self) -> &QualifiedCall {
        &self.action
    }

    pub fn effect(&self) -> &EffectKind {
        &self.effect
    }

    pub fn bindings(&self) -> &[VariableBinding] {
        &self.bindings
    }

    /// The guard as written; `None` when the requirement is unconditional.
    pub fn guard(&self) -> Option<&BoolExpr> {
        self.guard.as_ref()
    }

    /// The guard with an absent one read as `True`.
    pub fn effective_guard(&self) -> &BoolExpr {
        self.guard.as_ref().unwrap_or(&BoolExpr::True)
    }

    /// True when the guard is absent or literally `True`.
    pub fn is_unconditional(&self) -> bool {
        self.effective_guard().is_true()
    }

    pub fn binding_of(&self, variable: &Identifier) -> Option<&VariableBinding> {
        self.bindings.iter().find(|b| &b.variable == variable)
    }

    /// Roots referenced by the action, effect target and guard.
    pub fn free_roots(&self) -> BTreeSet<Identifier> {
        let mut roots = self.action.free_roots();
        roots.extend(self.effect.target().free_roots());
        if let Some(g) = &self.guard {
            roots.extend(g.free_roots());
        }
        roots
    }

    /// Lower-case reading of the requirement, e.g.
    /// `execution of clock.tick does not change clock.hour if in the beginning clock.minute < 59`.
    pub fn sentence(&self) -> String {
        let mut s = format!(
            "execution of {} {} {}",
            self.action.render(),
            self.effect.phrase(),
            self.effect.target().render()
        );
        if !self.is_unconditional() {
            s.push_str(" if in the beginning ");
            s.push_str(&self.effective_guard().render());
        }
        s
    }
}

/// An ordered, uniquely labelled collection of requirements.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Specification {
    name: Identifier,
    requirements: Vec<Requirement>,
}

impl Specification {
    pub fn new(name: Identifier) -> Self {
        Specification {
            name,
            requirements: Vec::new(),
        }
    }

    pub fn name(&self) -> &Identifier {
        &self.name
    }

    /// Requirements in authoring order.
    pub fn requirements(&self) -> &[Requirement] {
        &self.requirements
    }

    pub fn get(&self, label: &Identifier) -> Option<&Requirement> {
        self.requirements.iter().find(|r| &r.label == label)
    }

    pub fn len(&self) -> usize {
        self.requirements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requirements.is_empty()
    }

    /// Appends `req`, rejecting a label that is already present.
    pub fn add_requirement(&mut self, req: Requirement) -> Result<(), ModelError> {
        if self.get(&req.label).is_some() {
            return Err(ModelError::DuplicateLabel(req.label));
        }
        self.requirements.push(req);
        Ok(())
    }

    /// Consuming variant of [`Specification::add_requirement`].
    pub fn with_requirement(mut self, req: Requirement) -> Result<Self, ModelError> {
        self.add_requirement(req)?;
        Ok(self)
    }
}
