//! Checks module descriptors against a component model and decides whether
//! two modules can replace each other.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use serde::Serialize;

use crate::descriptor::{ClaimedElement, ModuleDescriptor};
use crate::diag::{Code, Finding, Locus};
use crate::model::{ComponentModel, ElementKind, FieldType, InterfaceElement, Obligation, Record, Schema};
use crate::naming::{parse, NamePattern};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConformanceReport {
    pub model: String,
    pub module: String,
    pub conformant: bool,
    pub findings: Vec<Finding>,
}

impl ConformanceReport {
    /// One `<severity> <code> <subject>: <message>` line per finding, then
    /// the verdict.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for f in &self.findings {
            let _ = writeln!(out, "{f}");
        }
        let verdict = if self.conformant { "conformant" } else { "nonconformant" };
        let _ = writeln!(out, "{verdict}");
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn codes(&self) -> Vec<Code> {
        self.findings.iter().map(|f| f.code).collect()
    }
}

type Resolver<'a> = &'a dyn Fn(&str) -> Option<&'a Schema>;

fn records_equal(a: &Record, ra: Resolver, b: &Record, rb: Resolver, seen: &mut HashSet<(String, String)>) -> bool {
    a.constants == b.constants
        && a.fields.len() == b.fields.len()
        && a.fields.iter().zip(&b.fields).all(|(fa, fb)| {
            fa.name == fb.name
                && fa.unit == fb.unit
                && match (&fa.field_type, &fb.field_type) {
                    (FieldType::Nested { schema: na }, FieldType::Nested { schema: nb }) => {
                        na == nb && schemas_equal(na, ra, nb, rb, seen)
                    }
                    (ta, tb) => ta == tb,
                }
        })
}

/// Structural, order-sensitive comparison through nested references.
fn schemas_equal(a: &str, ra: Resolver, b: &str, rb: Resolver, seen: &mut HashSet<(String, String)>) -> bool {
    if !seen.insert((a.to_string(), b.to_string())) {
        return true;
    }
    match (ra(a), rb(b)) {
        (Some(sa), Some(sb)) => {
            let (secs_a, secs_b) = (sa.sections(), sb.sections());
            std::mem::discriminant(sa) == std::mem::discriminant(sb)
                && secs_a.len() == secs_b.len()
                && secs_a.iter().zip(&secs_b).all(|((_, x), (_, y))| records_equal(x, ra, y, rb, seen))
        }
        _ => false,
    }
}

fn element_mismatch(
    element: &InterfaceElement,
    claimed: &ClaimedElement,
    model: &ComponentModel,
    descriptor: &ModuleDescriptor,
) -> Option<(Code, String)> {
    if claimed.kind != element.kind {
        return Some((Code::E_SCHEMA_MISMATCH, format!("claimed as a {}, the model declares a {}", claimed.kind, element.kind)));
    }
    if element.kind == ElementKind::Topic && claimed.direction != element.direction {
        let show = |d: Option<crate::model::Direction>| d.map_or("none", |d| d.as_str());
        return Some((
            Code::E_DIRECTION_MISMATCH,
            format!("claimed {}, the model declares {}", show(claimed.direction), show(element.direction)),
        ));
    }
    if let Some(param) = &element.param {
        if claimed.param_type != Some(param.ty) || claimed.unit != param.unit {
            let claimed_ty = claimed.param_type.map_or("none".to_string(), |t| t.to_string());
            return Some((
                Code::E_SCHEMA_MISMATCH,
                format!(
                    "claimed {claimed_ty} [{}], the model declares {} [{}]",
                    claimed.unit.as_deref().unwrap_or("-"),
                    param.ty,
                    param.unit.as_deref().unwrap_or("-")
                ),
            ));
        }
        return None;
    }
    let expected = element.schema.as_deref().unwrap_or_default();
    let got = claimed.schema.as_deref().unwrap_or_default();
    if expected != got {
        return Some((Code::E_SCHEMA_MISMATCH, format!("claims schema {got}, the model declares {expected}")));
    }
    let rm = |n: &str| model.resolve_schema(n);
    let rd = |n: &str| descriptor.resolve_schema(n);
    if !schemas_equal(expected, &rm, got, &rd, &mut HashSet::new()) {
        return Some((Code::E_SCHEMA_MISMATCH, format!("schema {got} differs from the model's definition")));
    }
    None
}

fn path_problem(claimed: &ClaimedElement, descriptor: &ModuleDescriptor) -> Option<String> {
    let path = claimed.path.as_deref()?;
    let pattern = match claimed.kind {
        ElementKind::Service => NamePattern::ServicePath,
        _ => NamePattern::Topic,
    };
    let parts = match parse(pattern, path) {
        Ok(parts) => parts,
        Err(e) => return Some(format!("path `{path}` is not a valid {} name: {e}", pattern.as_str())),
    };
    let leaf = parts.topic_name.as_deref().or(parts.service_name.as_deref());
    let ok = parts.device_kind == Some(descriptor.kind)
        && parts.device_name.as_deref() == Some(descriptor.device_name.as_str())
        && parts.instance_id == descriptor.identity.instance
        && leaf == Some(claimed.name.as_str());
    (!ok).then(|| format!("path `{path}` does not name this element of this module"))
}

/// Checks what a module claims against the model it implements.
///
/// Findings follow model declaration order, then descriptor order for
/// elements the model does not know.
pub fn check(descriptor: &ModuleDescriptor, model: &ComponentModel) -> ConformanceReport {
    let mut findings = Vec::new();
    if descriptor.kind != model.kind || descriptor.device_name != model.device_name {
        findings.push(Finding::new(
            Code::E_KIND_MISMATCH,
            &descriptor.device_name,
            format!(
                "module is {} {}, the model describes {} {}",
                descriptor.kind, descriptor.device_name, model.kind, model.device_name
            ),
            Locus::Model,
        ));
    }

    for element in &model.elements {
        if let Some(group) = element.group.as_ref().and_then(|g| model.group(g)) {
            if group.members.first() == Some(&element.name) {
                let present: Vec<&str> =
                    group.members.iter().filter(|m| descriptor.element(m).is_some()).map(String::as_str).collect();
                let missing: Vec<&str> = model
                    .members_of(&group.name)
                    .filter(|m| m.required_in_group && descriptor.element(&m.name).is_none())
                    .map(|m| m.name.as_str())
                    .collect();
                if !present.is_empty() && !missing.is_empty() {
                    findings.push(Finding::new(
                        Code::E_GROUP_PARTIAL,
                        &group.name,
                        format!("{} present but {} missing", present.join(", "), missing.join(", ")),
                        Locus::Group { name: group.name.clone() },
                    ));
                }
            }
        }

        let locus = Locus::Element { name: element.name.clone() };
        match descriptor.element(&element.name) {
            None if element.obligation == Obligation::Mandatory => findings.push(Finding::new(
                Code::E_MISSING_MANDATORY,
                &element.name,
                format!("mandatory {} is not provided", element.kind),
                locus,
            )),
            None => {}
            Some(claimed) => {
                if let Some((code, message)) = element_mismatch(element, claimed, model, descriptor) {
                    findings.push(Finding::new(code, &element.name, message, locus.clone()));
                }
                if let Some(message) = path_problem(claimed, descriptor) {
                    findings.push(Finding::new(Code::E_NAMING, &element.name, message, locus));
                }
            }
        }
    }

    for claimed in &descriptor.elements {
        if model.element(&claimed.name).is_none() {
            findings.push(Finding::new(
                Code::W_UNKNOWN_ELEMENT,
                &claimed.name,
                format!("{} is not part of the model", claimed.kind),
                Locus::Element { name: claimed.name.clone() },
            ));
        }
    }

    ConformanceReport {
        model: model.device_name.clone(),
        module: format!("{} {}", descriptor.device_name, descriptor.identity),
        conformant: !findings.iter().any(Finding::is_error),
        findings,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SwapVerdict {
    pub interchangeable: bool,
    pub explanation: String,
}

fn expand(out: &mut String, name: &str, resolve: Resolver, depth: usize) {
    let Some(schema) = resolve(name) else {
        let _ = write!(out, "?{name}");
        return;
    };
    let _ = write!(out, "{name}{{");
    for (section, record) in schema.sections() {
        let _ = write!(out, "{section}:");
        for c in &record.constants {
            let _ = write!(out, "{} {}={};", c.ty, c.name, c.value);
        }
        for f in &record.fields {
            let _ = write!(out, "{} {} {:?};", f.field_type, f.name, f.unit);
            if let (FieldType::Nested { schema }, true) = (&f.field_type, depth < 16) {
                expand(out, schema, resolve, depth + 1);
            }
        }
    }
    out.push('}');
}

/// Identity-free interface signature of each claimed element.
fn signatures(descriptor: &ModuleDescriptor) -> BTreeMap<&str, String> {
    let resolve = |n: &str| descriptor.resolve_schema(n);
    descriptor
        .elements
        .iter()
        .map(|e| {
            let mut sig = format!("{} {:?} {:?} {:?} ", e.kind, e.direction, e.param_type, e.unit);
            if let Some(schema) = &e.schema {
                expand(&mut sig, schema, &resolve, 0);
            }
            (e.name.as_str(), sig)
        })
        .collect()
}

/// Whether `a` and `b` can replace each other: both conform to `model` and
/// expose the same interface. Identity and configured parameter values do
/// not matter.
pub fn interchangeable(a: &ModuleDescriptor, b: &ModuleDescriptor, model: &ComponentModel) -> SwapVerdict {
    for (label, d) in [("a", a), ("b", b)] {
        let report = check(d, model);
        if !report.conformant {
            let first = report.findings.iter().find(|f| f.is_error()).expect("an error");
            return SwapVerdict {
                interchangeable: false,
                explanation: format!("module {label} ({}) is not conformant: {first}", d.identity),
            };
        }
    }
    let (sa, sb) = (signatures(a), signatures(b));
    let names: std::collections::BTreeSet<&str> = sa.keys().chain(sb.keys()).copied().collect();
    for name in names {
        let explanation = match (sa.get(name), sb.get(name)) {
            (Some(_), None) => format!("element `{name}` is provided by a but not by b"),
            (None, Some(_)) => format!("element `{name}` is provided by b but not by a"),
            (Some(x), Some(y)) if x != y => format!("element `{name}` differs between a and b"),
            _ => continue,
        };
        return SwapVerdict { interchangeable: false, explanation };
    }
    SwapVerdict { interchangeable: true, explanation: format!("{} elements match", sa.len()) }
}
