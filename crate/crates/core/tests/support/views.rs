//! Reads each view back and checks it against the requirements it came
//! from.

use std::collections::BTreeMap;

use proptest::prelude::*;
use specogram::views::{self, emit_contracts, emit_latex, emit_puts, emit_trace};
use specogram::{EffectKind, EmitOptions, Fragment, Requirement, Specification};

fn unescape_latex(s: &str) -> String {
    s.replace("\\_", "_")
}

/// Math-mode pieces of the description item for `req`.
fn latex_fragments(doc: &str, req: &Requirement) -> Vec<String> {
    let prefix = format!("\\item[{}:] ", req.label().as_str().replace('_', "\\_"));
    let line = doc
        .lines()
        .find(|l| l.starts_with(&prefix))
        .expect("item present");
    line.split('$').skip(1).step_by(2).map(unescape_latex).collect()
}

/// Lines of the routine for `req`, trimmed.
fn routine_lines(puts: &str, req: &Requirement) -> Vec<String> {
    let head = format!("  check_{}", req.label());
    let mut lines = puts.lines().skip_while(|l| *l != head);
    let mut out = Vec::new();
    for l in lines.by_ref() {
        out.push(l.trim().to_string());
        if l == "    end" {
            break;
        }
    }
    assert!(!out.is_empty(), "routine for {} missing", req.label());
    out
}

fn line_after(lines: &[String], marker: &[&str]) -> Option<String> {
    lines
        .windows(marker.len() + 1)
        .find(|w| w[..marker.len()].iter().zip(marker).all(|(a, b)| a == b))
        .map(|w| w[marker.len()].clone())
}

/// `(class, feature) -> ensure clauses` read back from the contracts file.
pub fn contract_clauses(text: &str) -> BTreeMap<(String, String), Vec<String>> {
    let mut out: BTreeMap<(String, String), Vec<String>> = BTreeMap::new();
    let (mut class, mut feature, mut in_ensure) = (String::new(), String::new(), false);
    for line in text.lines() {
        if let Some(c) = line.strip_prefix("class ") {
            class = c.to_string();
        } else if line.starts_with("    ensure") {
            in_ensure = true;
        } else if line.starts_with("    end") {
            in_ensure = false;
        } else if in_ensure {
            out.entry((class.clone(), feature.clone()))
                .or_default()
                .push(line.trim().to_string());
        } else if let Some(f) = line.strip_prefix("  ") {
            if !f.starts_with(' ') {
                feature = f.to_string();
            }
        }
    }
    out
}

/// Removes `var.` wherever it starts a path.
fn strip_root(text: &str, var: &str) -> String {
    let prefix = format!("{var}.");
    let mut out = String::new();
    let mut i = 0;
    while i < text.len() {
        let at_boundary = text[..i]
            .chars()
            .last()
            .is_none_or(|c| !(c.is_ascii_alphanumeric() || c == '_' || c == '.'));
        if at_boundary && text[i..].starts_with(&prefix) {
            i += prefix.len();
            continue;
        }
        let c = text[i..].chars().next().unwrap();
        out.push(c);
        i += c.len_utf8();
    }
    out
}

pub fn postcondition(effect: &EffectKind) -> String {
    let t = effect.target().render();
    match effect {
        EffectKind::DoesNotChange(_) => format!("{t} ~ old {t}"),
        EffectKind::Increments(_) => format!("{t} = old {t} + 1"),
        EffectKind::Decrements(_) => format!("{t} = old {t} - 1"),
    }
}

pub fn check_cross_view(spec: &Specification, frames: bool) -> Result<(), TestCaseError> {
    let latex = emit_latex(spec);
    let puts = emit_puts(spec, &EmitOptions::all().with_frames(frames));
    let contracts = emit_contracts(spec);
    let trace = emit_trace(spec);
    let clauses = contract_clauses(contracts.text());
    let mut used: BTreeMap<(String, String), usize> = BTreeMap::new();
    let trace_rows: Vec<Vec<&str>> = trace
        .text()
        .lines()
        .skip(1)
        .map(|l| l.split(" | ").map(str::trim).collect())
        .collect();
    prop_assert_eq!(trace_rows.len(), spec.len());

    for (i, req) in spec.requirements().iter().enumerate() {
        let action = req.action().render();
        let target = req.effect().target().render();
        let guard = (!req.is_unconditional()).then(|| req.effective_guard().render());

        let mut want = vec![action.clone(), target.clone()];
        want.extend(guard.clone());
        prop_assert_eq!(latex_fragments(latex.text(), req), want);

        let lines = routine_lines(puts.text(), req);
        prop_assert_eq!(line_after(&lines, &["-- executing"]), Some(action.clone()));
        prop_assert_eq!(
            line_after(&lines, &["ensure", "-- that"]),
            Some(postcondition(req.effect()))
        );
        prop_assert_eq!(line_after(&lines, &["require", "-- that"]), guard.clone());

        let row = &trace_rows[i];
        prop_assert_eq!(row[0], req.label().as_str());
        prop_assert_eq!(row[1], req.sentence());
        prop_assert_eq!(row[2], format!("check_{}", req.label()));

        match views::contract_location(req) {
            Some((class, feature)) => {
                prop_assert_eq!(req.bindings().len(), 1);
                let var = req.bindings()[0].variable.as_str();
                let key = (class.to_string(), feature.to_string());
                prop_assert_eq!(row[3], format!("{class}.{feature}"));
                let n = used.entry(key.clone()).or_default();
                let clause = clauses[&key][*n].clone();
                *n += 1;
                let effect = strip_root(&postcondition(req.effect()), var);
                match &guard {
                    None => prop_assert_eq!(clause, effect),
                    Some(g) => {
                        let (antecedent, consequent) = clause.split_once(" implies ").unwrap();
                        prop_assert_eq!(consequent, effect);
                        let g = strip_root(g, var);
                        let bare = match antecedent.strip_prefix("old (") {
                            Some(b) => b.strip_suffix(')').unwrap(),
                            None => antecedent.strip_prefix("old ").unwrap_or(antecedent),
                        };
                        prop_assert_eq!(bare, g.as_str());
                    }
                }
            }
            None => {
                prop_assert_eq!(row[3], "unreduced");
                let listed = contracts.text().contains(&format!("--   {}\n", req.label()));
                prop_assert!(listed);
            }
        }
    }
    for (key, n) in used {
        prop_assert_eq!(clauses[&key].len(), n, "extra clauses under {:?}", key);
    }
    Ok(())
}
