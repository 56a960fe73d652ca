//! Generated views of a specification.
//!
//! Every view is a pure function of the specification (and, for the
//! seamless requirements, the frame flag), so regenerating yields the
//! same bytes.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::fragment::{Arith, BoolExpr, Fragment, QueryPath};
use crate::ident::TypeName;
use crate::model::{EffectKind, Requirement, Specification};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ViewKind {
    Latex,
    Puts,
    Contracts,
    Trace,
}

impl ViewKind {
    pub const ALL: [ViewKind; 4] = [
        ViewKind::Latex,
        ViewKind::Puts,
        ViewKind::Contracts,
        ViewKind::Trace,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ViewKind::Latex => "latex",
            ViewKind::Puts => "puts",
            ViewKind::Contracts => "contracts",
            ViewKind::Trace => "trace",
        }
    }

    /// Output file name for a specification called `spec_name`.
    pub fn file_name(&self, spec_name: &str) -> String {
        match self {
            ViewKind::Latex => format!("{spec_name}_requirements.tex"),
            ViewKind::Puts => format!("{spec_name}_puts.e"),
            ViewKind::Contracts => format!("{spec_name}_contracts.txt"),
            ViewKind::Trace => format!("{spec_name}_trace.txt"),
        }
    }
}

impl fmt::Display for ViewKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ViewError {
    #[error("unknown view `{0}` (expected latex, puts, contracts or trace)")]
    UnknownView(String),
    #[error("at least one view must be selected")]
    NoViews,
}

impl FromStr for ViewKind {
    type Err = ViewError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ViewKind::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| ViewError::UnknownView(s.to_owned()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmitOptions {
    /// Emit `modify (...)` frame clauses in seamless requirements.
    pub frames: bool,
    views: BTreeSet<ViewKind>,
    pub output_dir: PathBuf,
}

impl EmitOptions {
    pub fn new(views: impl IntoIterator<Item = ViewKind>) -> Result<Self, ViewError> {
        let views: BTreeSet<_> = views.into_iter().collect();
        if views.is_empty() {
            return Err(ViewError::NoViews);
        }
        Ok(EmitOptions {
            frames: false,
            views,
            output_dir: PathBuf::from("."),
        })
    }

    /// Every view.
    pub fn all() -> Self {
        EmitOptions::new(ViewKind::ALL).expect("nonempty")
    }

    pub fn with_frames(mut self, frames: bool) -> Self {
        self.frames = frames;
        self
    }

    pub fn with_output_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.output_dir = dir.into();
        self
    }

    pub fn views(&self) -> impl Iterator<Item = ViewKind> + '_ {
        self.views.iter().copied()
    }
}

/// The LaTeX document and the seamless requirements.
impl Default for EmitOptions {
    fn default() -> Self {
        EmitOptions::new([ViewKind::Latex, ViewKind::Puts]).expect("nonempty")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedArtifact {
    pub view: ViewKind,
    pub relative_path: PathBuf,
    pub content: Vec<u8>,
}

impl GeneratedArtifact {
    fn new(view: ViewKind, spec: &Specification, content: String) -> Self {
        GeneratedArtifact {
            view,
            relative_path: PathBuf::from(view.file_name(spec.name().as_str())),
            content: content.into_bytes(),
        }
    }

    pub fn text(&self) -> &str {
        std::str::from_utf8(&self.content).expect("views are generated as UTF-8")
    }
}

/// Emits the selected views, in [`ViewKind`] order.
pub fn generate(spec: &Specification, options: &EmitOptions) -> Vec<GeneratedArtifact> {
    options
        .views()
        .map(|view| match view {
            ViewKind::Latex => emit_latex(spec),
            ViewKind::Puts => emit_puts(spec, options),
            ViewKind::Contracts => emit_contracts(spec),
            ViewKind::Trace => emit_trace(spec),
        })
        .collect()
}

/// Writes artifacts under `dir`, creating it if needed. Returns the
/// written paths.
pub fn write_artifacts(artifacts: &[GeneratedArtifact], dir: &Path) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    artifacts
        .iter()
        .map(|a| {
            let path = dir.join(&a.relative_path);
            fs::write(&path, &a.content)?;
            Ok(path)
        })
        .collect()
}

fn latex_escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '_' | '&' | '%' | '$' | '#' | '{' | '}' => {
                out.push('\\');
                out.push(c);
            }
            _ => out.push(c),
        }
    }
    out
}

fn math(fragment: &str) -> String {
    format!("${}$", latex_escape(fragment))
}

/// The sentence of one description item, e.g.
/// `Execution of $clock.tick$ does not change $clock.hour$ if, in the beginning, $clock.minute < 59$.`
pub fn latex_sentence(req: &Requirement) -> String {
    let mut s = format!(
        "Execution of {} {} {}",
        math(&req.action().render()),
        req.effect().phrase(),
        math(&req.effect().target().render())
    );
    if !req.is_unconditional() {
        s.push_str(" if, in the beginning, ");
        s.push_str(&math(&req.effective_guard().render()));
    }
    s.push('.');
    s
}

pub fn emit_latex(spec: &Specification) -> GeneratedArtifact {
    let mut out = String::new();
    out.push_str("\\documentclass{article}\n");
    out.push_str("\\begin{document}\n");
    out.push_str(&format!("\\section*{{{}}}\n", latex_escape(spec.name().as_str())));
    out.push_str("\\begin{description}\n");
    for req in spec.requirements() {
        out.push_str(&format!(
            "\\item[{}:] {}\n",
            latex_escape(req.label().as_str()),
            latex_sentence(req)
        ));
    }
    out.push_str("\\end{description}\n");
    out.push_str("\\end{document}\n");
    GeneratedArtifact::new(ViewKind::Latex, spec, out)
}

/// Name of the seamless requirement generated for `req`.
pub fn routine_name(req: &Requirement) -> String {
    format!("check_{}", req.label())
}

/// The postcondition expressing the effect, e.g. `clock.hour ~ old clock.hour`.
fn postcondition(effect: &EffectKind, target: &str) -> String {
    match effect {
        EffectKind::DoesNotChange(_) => format!("{target} ~ old {target}"),
        EffectKind::Increments(_) => format!("{target} = old {target} + 1"),
        EffectKind::Decrements(_) => format!("{target} = old {target} - 1"),
    }
}

/// One seamless requirement routine, readable top to bottom through its
/// comments. Lines carry no class-level indentation.
pub fn seamless_requirement(req: &Requirement, frames: bool) -> String {
    let mut lines = vec![routine_name(req)];
    let head = format!(
        "-- execution of {} {} {}",
        req.action().render(),
        req.effect().phrase(),
        req.effect().target().render()
    );
    if req.is_unconditional() {
        lines.push(format!("{head} :"));
    } else {
        lines.push(head);
        lines.push(format!(
            "-- if in the beginning {} :",
            req.effective_guard().render()
        ));
    }
    lines.push("-- for any".into());
    let params: Vec<String> = req.bindings().iter().map(|b| b.to_string()).collect();
    lines.push(format!("    ({})", params.join(", ")));
    if frames {
        let vars: Vec<&str> = req.bindings().iter().map(|b| b.variable.as_str()).collect();
        lines.push(format!("  modify ({})", vars.join(", ")));
    }
    if !req.is_unconditional() {
        lines.push("-- which".into());
        lines.push("  require".into());
        lines.push("-- that".into());
        lines.push(format!("    {}", req.effective_guard().render()));
    }
    lines.push("  do".into());
    lines.push("-- executing".into());
    lines.push(format!("    {}", req.action().render()));
    lines.push("-- will".into());
    lines.push("  ensure".into());
    lines.push("-- that".into());
    let target = req.effect().target().render();
    lines.push(format!("    {}", postcondition(req.effect(), &target)));
    lines.push("  end".into());
    let mut out = lines.join("\n");
    out.push('\n');
    out
}

fn class_name(spec: &Specification) -> String {
    format!("{}_REQUIREMENTS", spec.name().as_str().to_ascii_uppercase())
}

pub fn emit_puts(spec: &Specification, options: &EmitOptions) -> GeneratedArtifact {
    let mut out = String::new();
    out.push_str("class\n");
    out.push_str(&format!("  {}\n", class_name(spec)));
    out.push_str("\nfeature -- Seamless requirements\n");
    for req in spec.requirements() {
        out.push('\n');
        for line in seamless_requirement(req, options.frames).lines() {
            out.push_str("  ");
            out.push_str(line);
            out.push('\n');
        }
    }
    out.push_str("\nend\n");
    GeneratedArtifact::new(ViewKind::Puts, spec, out)
}

/// Where a requirement's contract clause lands: its bound class and the
/// action feature. `None` for requirements that are not reduced to a
/// contract (several bindings, or an action reached through a query).
pub fn contract_location(req: &Requirement) -> Option<(&TypeName, &str)> {
    match (req.bindings(), req.action().path()) {
        ([binding], [feature]) => Some((&binding.declared_type, feature.as_str())),
        _ => None,
    }
}

fn strip(q: &QueryPath) -> String {
    q.render_without_root()
}

/// `old` must cover every query the guard reads. Since `old` binds tighter
/// than any operator, the bare prefix form only fits a comparison whose sole
/// query is its whole left operand.
fn old_guard(guard: &BoolExpr) -> String {
    let rendered = guard.render_with(&strip);
    match guard {
        _ if guard.queries().is_empty() => rendered,
        BoolExpr::Compare {
            left: Arith::Query(_),
            ..
        } if guard.queries().len() == 1 => format!("old {rendered}"),
        _ => format!("old ({rendered})"),
    }
}

/// The contract clause for `req` inside its bound class, e.g.
/// `old minute < 59 implies hour ~ old hour`.
pub fn contract_clause(req: &Requirement) -> String {
    let effect = postcondition(req.effect(), &strip(req.effect().target()));
    if req.is_unconditional() {
        effect
    } else {
        format!("{} implies {effect}", old_guard(req.effective_guard()))
    }
}

/// Clauses per feature, per class.
type ClauseTable<'a> = Vec<(&'a TypeName, Vec<(&'a str, Vec<String>)>)>;

pub fn emit_contracts(spec: &Specification) -> GeneratedArtifact {
    // class -> feature -> clauses, all in first-appearance order
    let mut classes: ClauseTable = Vec::new();
    let mut unreduced = Vec::new();
    for req in spec.requirements() {
        let Some((class, feature)) = contract_location(req) else {
            unreduced.push(req.label().as_str());
            continue;
        };
        let idx = match classes.iter().position(|(c, _)| *c == class) {
            Some(i) => i,
            None => {
                classes.push((class, Vec::new()));
                classes.len() - 1
            }
        };
        let features = &mut classes[idx].1;
        let fidx = match features.iter().position(|(f, _)| *f == feature) {
            Some(i) => i,
            None => {
                features.push((feature, Vec::new()));
                features.len() - 1
            }
        };
        features[fidx].1.push(contract_clause(req));
    }

    let mut out = format!("-- Contracts inferred from {}\n", spec.name());
    for (class, features) in &classes {
        out.push_str(&format!("\nclass {class}\n"));
        for (feature, clauses) in features {
            out.push_str(&format!("  {feature}\n    do\n    ensure\n"));
            for clause in clauses {
                out.push_str(&format!("      {clause}\n"));
            }
            out.push_str("    end\n");
        }
        out.push_str("end\n");
    }
    if !unreduced.is_empty() {
        out.push_str("\n-- Not reduced to contract clauses:\n");
        for label in unreduced {
            out.push_str(&format!("--   {label}\n"));
        }
    }
    GeneratedArtifact::new(ViewKind::Contracts, spec, out)
}

/// `CLASS.feature` or `unreduced`.
pub fn contract_location_text(req: &Requirement) -> String {
    match contract_location(req) {
        Some((class, feature)) => format!("{class}.{feature}"),
        None => "unreduced".into(),
    }
}

pub fn emit_trace(spec: &Specification) -> GeneratedArtifact {
    let header = ["label", "requirement", "put routine", "contract"].map(String::from);
    let mut rows = vec![header];
    for req in spec.requirements() {
        rows.push([
            req.label().to_string(),
            req.sentence(),
            routine_name(req),
            contract_location_text(req),
        ]);
    }
    let mut widths = [0usize; 4];
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    for row in &rows {
        let mut line = String::new();
        for (i, cell) in row.iter().enumerate() {
            if i > 0 {
                line.push_str(" | ");
            }
            if i + 1 < row.len() {
                line.push_str(&format!("{cell:<width$}", width = widths[i]));
            } else {
                line.push_str(cell);
            }
        }
        out.push_str(&line);
        out.push('\n');
    }
    GeneratedArtifact::new(ViewKind::Trace, spec, out)
}
