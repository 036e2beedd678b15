// Canonical `.hrim` layout. Two-space indentation, elements before schemas,
// group members on one line each, one blank line between top-level items.

use std::fmt::Write;

use crate::diag::Finding;
use crate::model::{
    common_requirements, validate_model, ComponentModel, ElementKind, InterfaceElement, Literal, Obligation, Record,
    Schema,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormatError {
    #[error("model is invalid ({} finding(s))", .0.len())]
    InvalidModel(Vec<Finding>),
}

fn quoted(text: &str) -> String {
    Literal::Str(text.to_string()).to_string()
}

/// Attribute list for an element, in canonical order.
fn attributes(element: &InterfaceElement, in_group: Option<&InterfaceElement>) -> Vec<String> {
    let mut out = Vec::new();
    let (show_obligation, show_category) = match in_group {
        None => (true, true),
        Some(_) if element.kind != ElementKind::Parameter => (true, true),
        Some(first) => (
            element.obligation != Obligation::Optional,
            std::ptr::eq(first, element) || first.category != element.category,
        ),
    };
    if show_obligation {
        out.push(format!("obligation: {}", element.obligation.as_str()));
    }
    if show_category {
        out.push(format!("category: {}", element.category.as_str()));
    }
    if let Some(direction) = element.direction {
        out.push(format!("direction: {}", direction.as_str()));
    }
    if let Some(schema) = &element.schema {
        out.push(format!("schema: {schema}"));
    }
    if element.required_in_group {
        out.push("requires: group".to_string());
    }
    if let Some(param) = &element.param {
        out.push(format!("type: {}", param.ty));
        if let Some(unit) = &param.unit {
            out.push(format!("unit {}", quoted(unit)));
        }
        if let Some(default) = &param.default {
            out.push(format!("default: {default}"));
        }
    }
    out
}

fn write_record(out: &mut String, record: &Record, indent: &str) {
    for c in &record.constants {
        let _ = writeln!(out, "{indent}constant {}: {} value: {}", c.name, c.ty, c.value);
    }
    for f in &record.fields {
        let _ = write!(out, "{indent}field {}: {}", f.name, f.field_type);
        if let Some(unit) = &f.unit {
            let _ = write!(out, " unit {}", quoted(unit));
        }
        out.push('\n');
    }
}

fn write_schema(out: &mut String, schema: &Schema) {
    let keyword = match schema {
        Schema::Message(_) => "message",
        Schema::Service(_) => "srv",
        Schema::Action(_) => "action_schema",
    };
    let _ = writeln!(out, "  {keyword} {} {{", schema.name());
    match schema {
        Schema::Message(m) => write_record(out, &m.body, "    "),
        _ => {
            for (section, record) in schema.sections() {
                let _ = writeln!(out, "    {section} {{");
                write_record(out, record, "      ");
                out.push_str("    }\n");
            }
        }
    }
    out.push_str("  }\n");
}

/// Renders a valid model in canonical form. The output parses back to an
/// equal model and formatting it again yields the same text.
pub fn format_model(model: &ComponentModel) -> Result<String, FormatError> {
    let findings = validate_model(model);
    if findings.iter().any(Finding::is_error) {
        return Err(FormatError::InvalidModel(findings));
    }

    let mut items: Vec<String> = Vec::new();
    let common = common_requirements(&model.device_name);
    let mut i = 0;
    let mut common_written = false;
    while i < model.elements.len() {
        let element = &model.elements[i];
        if !common_written && model.elements[i..].starts_with(&common) {
            items.push("  @common\n".to_string());
            common_written = true;
            i += common.len();
            continue;
        }
        match &element.group {
            None => {
                let mut block = format!("  {} {} {{\n", element.kind, element.name);
                for attr in attributes(element, None) {
                    let _ = writeln!(block, "    {attr}");
                }
                block.push_str("  }\n");
                items.push(block);
                i += 1;
            }
            Some(group) => {
                let mut block = format!("  group {group} {{\n");
                let first = element;
                while i < model.elements.len() && model.elements[i].group.as_ref() == Some(group) {
                    let member = &model.elements[i];
                    let _ = writeln!(
                        block,
                        "    {} {} {{ {} }}",
                        member.kind,
                        member.name,
                        attributes(member, Some(first)).join(" ")
                    );
                    i += 1;
                }
                block.push_str("  }\n");
                items.push(block);
            }
        }
    }
    for schema in &model.schemas {
        let mut block = String::new();
        write_schema(&mut block, schema);
        items.push(block);
    }

    let mut out = format!("model {} {{\n  kind: {}\n", model.device_name, model.kind);
    for (n, item) in items.iter().enumerate() {
        // `@common` sits directly under `kind:` when it comes first
        if !(n == 0 && item == "  @common\n") {
            out.push('\n');
        }
        out.push_str(item);
    }
    out.push_str("}\n");
    Ok(out)
}
