//! Optional registry of classes with their commands and queries, used to
//! check that a specification talks about things that exist.
//!
//! ```text
//! class CLOCK
//!   command tick
//!   query hour : INTEGER
//!   query minute : INTEGER
//! end
//! ```

use std::fmt;
use std::path::Path;

use crate::diag::{Diagnostic, Severity, SourceSpan};
use crate::fragment::QueryPath;
use crate::frontend::SourceMap;
use crate::ident::{Identifier, TypeName};
use crate::model::{Requirement, Specification};

/// The only numeric type recognised for `increments` and `decrements`.
pub const INTEGER: &str = "INTEGER";

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FeatureKind {
    Command,
    Query(TypeName),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FeatureDecl {
    pub name: Identifier,
    pub kind: FeatureKind,
}

impl FeatureDecl {
    pub fn command(name: Identifier) -> Self {
        FeatureDecl {
            name,
            kind: FeatureKind::Command,
        }
    }

    pub fn query(name: Identifier, result_type: TypeName) -> Self {
        FeatureDecl {
            name,
            kind: FeatureKind::Query(result_type),
        }
    }

    pub fn is_command(&self) -> bool {
        self.kind == FeatureKind::Command
    }

    pub fn result_type(&self) -> Option<&TypeName> {
        match &self.kind {
            FeatureKind::Command => None,
            FeatureKind::Query(t) => Some(t),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClassDecl {
    name: TypeName,
    features: Vec<FeatureDecl>,
}

impl ClassDecl {
    pub fn new(name: TypeName) -> Self {
        ClassDecl {
            name,
            features: Vec::new(),
        }
    }

    pub fn name(&self) -> &TypeName {
        &self.name
    }

    pub fn features(&self) -> &[FeatureDecl] {
        &self.features
    }

    pub fn feature(&self, name: &Identifier) -> Option<&FeatureDecl> {
        self.features.iter().find(|f| &f.name == name)
    }

    /// Returns the feature back when its name is taken.
    pub fn add_feature(&mut self, feature: FeatureDecl) -> Result<(), FeatureDecl> {
        if self.feature(&feature.name).is_some() {
            return Err(feature);
        }
        self.features.push(feature);
        Ok(())
    }

    pub fn remove_feature(&mut self, name: &Identifier) -> Option<FeatureDecl> {
        let idx = self.features.iter().position(|f| &f.name == name)?;
        Some(self.features.remove(idx))
    }

    pub fn feature_mut(&mut self, name: &Identifier) -> Option<&mut FeatureDecl> {
        self.features.iter_mut().find(|f| &f.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct DomainModel {
    classes: Vec<ClassDecl>,
}

impl DomainModel {
    pub fn new() -> Self {
        DomainModel::default()
    }

    pub fn classes(&self) -> &[ClassDecl] {
        &self.classes
    }

    pub fn class(&self, name: &TypeName) -> Option<&ClassDecl> {
        self.classes.iter().find(|c| &c.name == name)
    }

    pub fn class_mut(&mut self, name: &TypeName) -> Option<&mut ClassDecl> {
        self.classes.iter_mut().find(|c| &c.name == name)
    }

    /// Returns the class back when its name is taken.
    pub fn add_class(&mut self, class: ClassDecl) -> Result<(), ClassDecl> {
        if self.class(&class.name).is_some() {
            return Err(class);
        }
        self.classes.push(class);
        Ok(())
    }

    pub fn remove_class(&mut self, name: &TypeName) -> Option<ClassDecl> {
        let idx = self.classes.iter().position(|c| &c.name == name)?;
        Some(self.classes.remove(idx))
    }
}

/// Regenerates model text that [`parse_domain_model`] reads back equal.
impl fmt::Display for DomainModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, class) in self.classes.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            writeln!(f, "class {}", class.name)?;
            for feature in &class.features {
                match &feature.kind {
                    FeatureKind::Command => writeln!(f, "  command {}", feature.name)?,
                    FeatureKind::Query(t) => writeln!(f, "  query {} : {}", feature.name, t)?,
                }
            }
            writeln!(f, "end")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct Word {
    text: String,
    line: usize,
    column: usize,
}

fn words(text: &str) -> Vec<Word> {
    let mut out = Vec::new();
    for (line_idx, line) in text.split('\n').enumerate() {
        let code = match line.find("--") {
            Some(idx) => &line[..idx],
            None => line,
        };
        let chars: Vec<char> = code.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            if chars[i].is_whitespace() {
                i += 1;
                continue;
            }
            let start = i;
            if chars[i] == ':' {
                i += 1;
            } else {
                while i < chars.len() && !chars[i].is_whitespace() && chars[i] != ':' {
                    i += 1;
                }
            }
            out.push(Word {
                text: chars[start..i].iter().collect(),
                line: line_idx + 1,
                column: start + 1,
            });
        }
    }
    out
}

/// Reads a domain-model file; reports every syntax and duplicate error.
pub fn parse_domain_model(text: &str, file: impl AsRef<Path>) -> Result<DomainModel, Vec<Diagnostic>> {
    let file = file.as_ref();
    let words = words(text);
    let last_line = text.split('\n').count();
    let span = |w: &Word| SourceSpan::new(file, w.line, w.column, w.text.chars().count());
    let eof = || SourceSpan::new(file, last_line, 1, 0);
    let mut diags = Vec::new();
    let mut model = DomainModel::new();
    let mut i = 0;

    let expect = |i: usize, what: &str| -> Diagnostic {
        match words.get(i) {
            Some(w) => Diagnostic::error("Syntax", format!("expected {what}, found `{}`", w.text), span(w)),
            None => Diagnostic::error("Syntax", format!("expected {what}, found end of file"), eof()),
        }
    };
    let name_at = |i: usize, what: &str| -> Result<&Word, Diagnostic> {
        let w = words.get(i).ok_or_else(|| expect(i, what))?;
        if matches!(w.text.as_str(), ":" | "end" | "command" | "query" | "class") {
            return Err(expect(i, what));
        }
        Ok(w)
    };
    let ident_error = |w: &Word, e: crate::ident::IdentError, what: &str| {
        Diagnostic::error(
            "IllegalIdentifier",
            format!("`{}` is not a well-formed {what}: {e}", w.text),
            SourceSpan::new(file, w.line, w.column + e.position(), 1),
        )
    };

    'classes: while i < words.len() {
        if words[i].text != "class" {
            diags.push(expect(i, "`class`"));
            // Resynchronise on the next class.
            i += 1;
            while i < words.len() && words[i].text != "class" {
                i += 1;
            }
            continue;
        }
        i += 1;
        let class_word = match name_at(i, "class name") {
            Ok(w) => w,
            Err(d) => {
                diags.push(d);
                continue;
            }
        };
        i += 1;
        let mut class = match TypeName::new(class_word.text.as_str()) {
            Ok(n) => Some(ClassDecl::new(n)),
            Err(e) => {
                diags.push(ident_error(class_word, e, "class name"));
                None
            }
        };
        loop {
            let Some(w) = words.get(i) else {
                diags.push(expect(i, "`end`"));
                break 'classes;
            };
            match w.text.as_str() {
                "end" => {
                    i += 1;
                    break;
                }
                "command" | "query" => {
                    let is_query = w.text == "query";
                    i += 1;
                    let name_word = match name_at(i, "feature name") {
                        Ok(w) => w,
                        Err(d) => {
                            diags.push(d);
                            continue;
                        }
                    };
                    i += 1;
                    let name = Identifier::new(name_word.text.as_str())
                        .map_err(|e| ident_error(name_word, e, "feature name"));
                    let kind = if is_query {
                        if words.get(i).map(|w| w.text.as_str()) != Some(":") {
                            diags.push(expect(i, "`:` and a result type"));
                            continue;
                        }
                        i += 1;
                        let type_word = match name_at(i, "result type") {
                            Ok(w) => w,
                            Err(d) => {
                                diags.push(d);
                                continue;
                            }
                        };
                        i += 1;
                        match TypeName::new(type_word.text.as_str()) {
                            Ok(t) => Some(FeatureKind::Query(t)),
                            Err(e) => {
                                diags.push(ident_error(type_word, e, "type name"));
                                None
                            }
                        }
                    } else {
                        Some(FeatureKind::Command)
                    };
                    match (name, kind, class.as_mut()) {
                        (Ok(name), Some(kind), Some(class)) => {
                            if let Err(dup) = class.add_feature(FeatureDecl { name, kind }) {
                                diags.push(Diagnostic::error(
                                    "DuplicateFeature",
                                    format!("feature `{}` is already declared in `{}`", dup.name, class.name),
                                    span(name_word),
                                ));
                            }
                        }
                        (Err(d), _, _) => diags.push(d),
                        _ => {}
                    }
                }
                _ => {
                    diags.push(expect(i, "`command`, `query` or `end`"));
                    i += 1;
                }
            }
        }
        if let Some(class) = class {
            if let Err(dup) = model.add_class(class) {
                diags.push(Diagnostic::error(
                    "DuplicateClass",
                    format!("class `{}` is already declared", dup.name),
                    span(class_word),
                ));
            }
        }
    }
    if diags.is_empty() {
        Ok(model)
    } else {
        Err(diags)
    }
}

/// Where in a requirement a finding applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Site {
    Binding(usize),
    Action,
    Target,
    Guard,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FindingKind {
    UnknownType {
        type_name: TypeName,
    },
    UnknownFeature {
        class: TypeName,
        feature: Identifier,
    },
    /// `execution of` names a query.
    ActionNotCommand {
        feature: Identifier,
    },
    /// An effect targets a command.
    EffectNotQuery {
        feature: Identifier,
    },
    /// A guard reads a command.
    GuardNotQuery {
        feature: Identifier,
    },
    NonIntegerTarget {
        feature: Identifier,
        result_type: TypeName,
    },
    /// A path goes through a query whose result class is not in the model.
    UnresolvedPath {
        through: Identifier,
        type_name: TypeName,
    },
}

impl FindingKind {
    pub fn code(&self) -> &'static str {
        match self {
            FindingKind::UnknownType { .. } => "UnknownType",
            FindingKind::UnknownFeature { .. } => "UnknownFeature",
            FindingKind::ActionNotCommand { .. } => "ActionNotCommand",
            FindingKind::EffectNotQuery { .. } => "EffectNotQuery",
            FindingKind::GuardNotQuery { .. } => "GuardNotQuery",
            FindingKind::NonIntegerTarget { .. } => "NonIntegerTarget",
            FindingKind::UnresolvedPath { .. } => "UnresolvedPath",
        }
    }

    pub fn severity(&self) -> Severity {
        match self {
            FindingKind::UnresolvedPath { .. } => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

impl fmt::Display for FindingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FindingKind::UnknownType { type_name } => write!(f, "class `{type_name}` does not exist"),
            FindingKind::UnknownFeature { class, feature } => {
                write!(f, "class `{class}` has no feature `{feature}`")
            }
            FindingKind::ActionNotCommand { feature } => {
                write!(
                    f,
                    "`{feature}` is a query; execution of a requirement's action needs a command"
                )
            }
            FindingKind::EffectNotQuery { feature } => {
                write!(f, "`{feature}` is a command; an effect must target a query")
            }
            FindingKind::GuardNotQuery { feature } => {
                write!(f, "`{feature}` is a command; a guard may only read queries")
            }
            FindingKind::NonIntegerTarget { feature, result_type } => write!(
                f,
                "`{feature}` yields `{result_type}`; increments and decrements need `{INTEGER}`"
            ),
            FindingKind::UnresolvedPath { through, type_name } => write!(
                f,
                "cannot resolve past `{through}`: class `{type_name}` is not in the model"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Finding {
    /// Index of the requirement in its specification.
    pub requirement: usize,
    pub site: Site,
    pub kind: FindingKind,
}

impl Finding {
    pub fn severity(&self) -> Severity {
        self.kind.severity()
    }

    /// Locates the finding through `map`.
    pub fn to_diagnostic(&self, map: &SourceMap) -> Diagnostic {
        let span = map
            .requirement(self.requirement)
            .and_then(|spans| match self.site {
                Site::Binding(i) => spans.bindings.get(i).map(|(_, ty)| ty.clone()),
                Site::Action => Some(spans.action.clone()),
                Site::Target => Some(spans.target.clone()),
                Site::Guard => spans.guard.clone(),
            })
            .unwrap_or_else(|| map.file_start());
        Diagnostic {
            severity: self.severity(),
            code: self.kind.code(),
            message: self.kind.to_string(),
            span,
        }
    }
}

enum Resolved<'m> {
    Feature(&'m FeatureDecl),
    /// Stopped early; the reason, if any, is already recorded.
    Stopped,
}

struct Checker<'a> {
    model: &'a DomainModel,
    findings: Vec<Finding>,
    requirement: usize,
}

impl<'a> Checker<'a> {
    fn report(&mut self, site: Site, kind: FindingKind) {
        self.findings.push(Finding {
            requirement: self.requirement,
            site,
            kind,
        });
    }

    /// Walks `root.seg1.seg2...` through the model. Only classes that are
    /// present are descended into.
    fn resolve(
        &mut self,
        req: &Requirement,
        root: &Identifier,
        path: &[Identifier],
        site: Site,
    ) -> Resolved<'a> {
        let Some(binding) = req.binding_of(root) else {
            return Resolved::Stopped;
        };
        let Some(mut class) = self.model.class(&binding.declared_type) else {
            return Resolved::Stopped;
        };
        for (i, segment) in path.iter().enumerate() {
            let Some(feature) = class.feature(segment) else {
                self.report(
                    site,
                    FindingKind::UnknownFeature {
                        class: class.name.clone(),
                        feature: segment.clone(),
                    },
                );
                return Resolved::Stopped;
            };
            if i + 1 == path.len() {
                return Resolved::Feature(feature);
            }
            match &feature.kind {
                FeatureKind::Query(result) => match self.model.class(result) {
                    Some(next) => class = next,
                    None => {
                        self.report(
                            site,
                            FindingKind::UnresolvedPath {
                                through: segment.clone(),
                                type_name: result.clone(),
                            },
                        );
                        return Resolved::Stopped;
                    }
                },
                FeatureKind::Command => {
                    self.report(
                        site,
                        match site {
                            Site::Action => FindingKind::ActionNotCommand {
                                feature: segment.clone(),
                            },
                            Site::Guard => FindingKind::GuardNotQuery {
                                feature: segment.clone(),
                            },
                            _ => FindingKind::EffectNotQuery {
                                feature: segment.clone(),
                            },
                        },
                    );
                    return Resolved::Stopped;
                }
            }
        }
        Resolved::Stopped
    }

    fn resolve_query(&mut self, req: &Requirement, q: &QueryPath, site: Site) -> Resolved<'a> {
        self.resolve(req, q.root(), q.path(), site)
    }

    fn check(&mut self, req: &Requirement) {
        for (i, b) in req.bindings().iter().enumerate() {
            if self.model.class(&b.declared_type).is_none() {
                self.report(
                    Site::Binding(i),
                    FindingKind::UnknownType {
                        type_name: b.declared_type.clone(),
                    },
                );
            }
        }

        let action = req.action();
        if let Resolved::Feature(f) = self.resolve(req, action.root(), action.path(), Site::Action) {
            if !f.is_command() {
                self.report(
                    Site::Action,
                    FindingKind::ActionNotCommand {
                        feature: f.name.clone(),
                    },
                );
            }
        }

        let effect = req.effect();
        if let Resolved::Feature(f) = self.resolve_query(req, effect.target(), Site::Target) {
            match f.result_type() {
                None => self.report(
                    Site::Target,
                    FindingKind::EffectNotQuery {
                        feature: f.name.clone(),
                    },
                ),
                Some(t) if effect.is_arithmetic() && t.as_str() != INTEGER => self.report(
                    Site::Target,
                    FindingKind::NonIntegerTarget {
                        feature: f.name.clone(),
                        result_type: t.clone(),
                    },
                ),
                Some(_) => {}
            }
        }

        if let Some(guard) = req.guard() {
            for q in guard.queries() {
                if let Resolved::Feature(f) = self.resolve_query(req, q, Site::Guard) {
                    if f.is_command() {
                        self.report(
                            Site::Guard,
                            FindingKind::GuardNotQuery {
                                feature: f.name.clone(),
                            },
                        );
                    }
                }
            }
        }
    }
}

/// Every inconsistency between `spec` and `model`, in requirement order.
/// An empty result means the specification is fully consistent.
pub fn find_inconsistencies(spec: &Specification, model: &DomainModel) -> Vec<Finding> {
    let mut checker = Checker {
        model,
        findings: Vec::new(),
        requirement: 0,
    };
    for (i, req) in spec.requirements().iter().enumerate() {
        checker.requirement = i;
        checker.check(req);
    }
    checker.findings
}

/// [`find_inconsistencies`] as positioned diagnostics.
pub fn check_against_model(spec: &Specification, model: &DomainModel, map: &SourceMap) -> Vec<Diagnostic> {
    find_inconsistencies(spec, model)
        .iter()
        .map(|f| f.to_diagnostic(map))
        .collect()
}
