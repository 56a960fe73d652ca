//! Line-oriented persistence format.
//!
//! ```text
//! specification: clock_specification
//!
//! requirement: requirement_1
//! action: clock.tick
//! effect: does_not_change
//! target: clock.hour
//! binding: clock : CLOCK
//! guard: clock.minute < 59
//! ```
//!
//! Fields appear in exactly this order; `binding` repeats, `guard` is
//! optional. Each requirement block is preceded by one blank line.

use std::str::FromStr;

use thiserror::Error;

use crate::fragment::{parse_bool_expr, parse_call, parse_query, Fragment, FragmentError};
use crate::ident::{Identifier, TypeName};
use crate::model::{EffectKind, Requirement, Specification, VariableBinding};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CanonicalError {
    #[error("{line}:{column}: malformed document: {message}")]
    MalformedDocument {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{line}: missing field `{field}`")]
    SchemaViolation { line: usize, field: &'static str },
}

/// Deterministic canonical text for `spec`.
pub fn to_canonical_text(spec: &Specification) -> String {
    let mut out = format!("specification: {}\n", spec.name());
    for req in spec.requirements() {
        out.push('\n');
        out.push_str(&format!("requirement: {}\n", req.label()));
        out.push_str(&format!("action: {}\n", req.action().render()));
        out.push_str(&format!("effect: {}\n", req.effect().keyword()));
        out.push_str(&format!("target: {}\n", req.effect().target().render()));
        for b in req.bindings() {
            out.push_str(&format!("binding: {} : {}\n", b.variable, b.declared_type));
        }
        if let Some(g) = req.guard() {
            out.push_str(&format!("guard: {}\n", g.render()));
        }
    }
    out
}

struct Field<'a> {
    line: usize,
    key: &'a str,
    value: &'a str,
    /// 1-based column where `value` starts.
    value_column: usize,
}

fn malformed(line: usize, column: usize, message: impl Into<String>) -> CanonicalError {
    CanonicalError::MalformedDocument {
        line,
        column,
        message: message.into(),
    }
}

fn split_field(line_no: usize, line: &str) -> Result<Field<'_>, CanonicalError> {
    let Some((key, rest)) = line.split_once(':') else {
        return Err(malformed(line_no, 1, "expected `key: value`"));
    };
    if key.is_empty() || !key.chars().all(|c| c.is_ascii_lowercase()) {
        return Err(malformed(line_no, 1, format!("invalid field name `{key}`")));
    }
    let value = rest.trim_start();
    let value_column = key.chars().count() + 1 + (rest.chars().count() - value.chars().count()) + 1;
    Ok(Field {
        line: line_no,
        key,
        value: value.trim_end(),
        value_column,
    })
}

fn ident_at<T>(
    field: &Field<'_>,
    parse: impl FnOnce(&str) -> Result<T, crate::ident::IdentError>,
) -> Result<T, CanonicalError> {
    parse(field.value).map_err(|e| {
        malformed(
            field.line,
            field.value_column + e.position(),
            format!("`{}`: {e}", field.value),
        )
    })
}

fn fragment_at<T>(
    field: &Field<'_>,
    parse: impl FnOnce(&str) -> Result<T, FragmentError>,
) -> Result<T, CanonicalError> {
    parse(field.value).map_err(|e| malformed(field.line, field.value_column + e.span.start, e.message))
}

/// Parses a canonical document back into a specification.
pub fn from_canonical_text(text: &str) -> Result<Specification, CanonicalError> {
    let mut blocks: Vec<Vec<Field<'_>>> = Vec::new();
    let mut current: Vec<Field<'_>> = Vec::new();
    for (i, line) in text.split('\n').enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            if !current.is_empty() {
                blocks.push(std::mem::take(&mut current));
            }
            continue;
        }
        current.push(split_field(line_no, line)?);
    }
    if !current.is_empty() {
        blocks.push(current);
    }

    let mut blocks = blocks.into_iter();
    let header = blocks.next().ok_or(CanonicalError::SchemaViolation {
        line: 1,
        field: "specification",
    })?;
    let first = &header[0];
    if first.key != "specification" {
        return Err(CanonicalError::SchemaViolation {
            line: first.line,
            field: "specification",
        });
    }
    let mut spec = Specification::new(ident_at(first, Identifier::from_str)?);
    let mut rest: Vec<Vec<Field<'_>>> = Vec::new();
    if header.len() > 1 {
        // The header may run straight into the first requirement.
        rest.push(header.into_iter().skip(1).collect());
    }
    rest.extend(blocks);
    for block in rest {
        let req = parse_block(block)?;
        let (line, label) = (req.0, req.1.label().clone());
        spec.add_requirement(req.1)
            .map_err(|_| malformed(line, 1, format!("duplicate requirement label `{label}`")))?;
    }
    Ok(spec)
}

fn parse_block(block: Vec<Field<'_>>) -> Result<(usize, Requirement), CanonicalError> {
    let start = block[0].line;
    let mut fields = block.into_iter().peekable();
    let mut last_line = start;

    let mut take = |name: &'static str| -> Result<Field<'_>, CanonicalError> {
        match fields.next() {
            Some(f) if f.key == name => {
                last_line = f.line;
                Ok(f)
            }
            Some(f) => Err(CanonicalError::SchemaViolation {
                line: f.line,
                field: name,
            }),
            None => Err(CanonicalError::SchemaViolation {
                line: last_line + 1,
                field: name,
            }),
        }
    };
    let label_field = take("requirement")?;
    let label = ident_at(&label_field, Identifier::from_str)?;
    let action = fragment_at(&take("action")?, parse_call)?;
    let effect_field = take("effect")?;
    let target = fragment_at(&take("target")?, parse_query)?;
    let effect = match effect_field.value {
        "does_not_change" => EffectKind::DoesNotChange(target),
        "increments" => EffectKind::Increments(target),
        "decrements" => EffectKind::Decrements(target),
        other => {
            return Err(malformed(
                effect_field.line,
                effect_field.value_column,
                format!("unknown effect `{other}`"),
            ))
        }
    };
    let mut bindings = vec![parse_binding(&take("binding")?)?];

    let mut guard = None;
    for f in fields {
        match f.key {
            "binding" if guard.is_none() => bindings.push(parse_binding(&f)?),
            "guard" if guard.is_none() => guard = Some(fragment_at(&f, parse_bool_expr)?),
            other => {
                return Err(malformed(f.line, 1, format!("unexpected field `{other}`")));
            }
        }
    }
    let req = Requirement::new(label, action, effect, bindings, guard)
        .map_err(|e| malformed(start, 1, e.to_string()))?;
    Ok((start, req))
}

fn parse_binding(field: &Field<'_>) -> Result<VariableBinding, CanonicalError> {
    let Some((var, ty)) = field.value.split_once(':') else {
        return Err(malformed(
            field.line,
            field.value_column,
            "expected `<var> : <TYPE>`",
        ));
    };
    let var_field = Field {
        line: field.line,
        key: field.key,
        value: var.trim(),
        value_column: field.value_column,
    };
    let ty_trimmed = ty.trim_start();
    let ty_field = Field {
        line: field.line,
        key: field.key,
        value: ty_trimmed.trim_end(),
        value_column: field.value_column
            + var.chars().count()
            + 1
            + (ty.chars().count() - ty_trimmed.chars().count()),
    };
    Ok(VariableBinding::new(
        ident_at(&var_field, Identifier::from_str)?,
        ident_at(&ty_field, TypeName::from_str)?,
    ))
}
