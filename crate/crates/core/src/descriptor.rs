//! Module descriptors: what a physical module claims to implement.

use std::path::Path;

use serde::Serialize;

use crate::catalog;
use crate::diag::{Code, Diagnostic, Finding, Locus};
use crate::lang::{parse_descriptor, SourceFile, SpanMap};
use crate::model::{
    check_schema, DeviceKind, Direction, ElementKind, Identity, InterfaceElement, Literal, Primitive, Schema,
};

/// One element a module claims to expose.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClaimedElement {
    pub kind: ElementKind,
    pub name: String,
    pub direction: Option<Direction>,
    pub schema: Option<String>,
    pub param_type: Option<Primitive>,
    pub unit: Option<String>,
    /// Configured parameter value; not part of the interface.
    pub value: Option<Literal>,
    /// Explicit name the module publishes under, checked against naming.
    pub path: Option<String>,
}

impl ClaimedElement {
    /// The claim a module makes when it implements `element` exactly.
    pub fn from_model(element: &InterfaceElement) -> Self {
        ClaimedElement {
            kind: element.kind,
            name: element.name.clone(),
            direction: element.direction,
            schema: element.schema.clone(),
            param_type: element.param.as_ref().map(|p| p.ty),
            unit: element.param.as_ref().and_then(|p| p.unit.clone()),
            value: element.param.as_ref().and_then(|p| p.default.clone()),
            path: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModuleDescriptor {
    pub identity: Identity,
    pub kind: DeviceKind,
    pub device_name: String,
    pub elements: Vec<ClaimedElement>,
    /// Schema bodies declared by the module. Undeclared names fall back to
    /// the builtin generics.
    pub schemas: Vec<Schema>,
}

impl ModuleDescriptor {
    pub fn element(&self, name: &str) -> Option<&ClaimedElement> {
        self.elements.iter().find(|e| e.name == name)
    }

    pub fn resolve_schema(&self, name: &str) -> Option<&Schema> {
        self.schemas.iter().find(|s| s.name() == name).or_else(|| catalog::generic_schema(name))
    }

    /// Every claimed schema reference must resolve, and declared schemas
    /// must be well formed.
    pub fn check_references(&self) -> Vec<Finding> {
        let mut out = Vec::new();
        for element in &self.elements {
            if let Some(schema) = &element.schema {
                if self.resolve_schema(schema).is_none() {
                    out.push(Finding::new(
                        Code::E_UNRESOLVED_SCHEMA,
                        &element.name,
                        format!("schema `{schema}` is neither declared nor a generic message"),
                        Locus::Element { name: element.name.clone() },
                    ));
                }
            }
        }
        for schema in &self.schemas {
            out.extend(check_schema(schema, |n| self.resolve_schema(n).is_some()));
        }
        out
    }

    /// Builds the descriptor of a module implementing every element of a
    /// model with its declared schemas and defaults.
    pub fn implementing(model: &crate::model::ComponentModel, identity: Identity) -> Self {
        ModuleDescriptor {
            identity,
            kind: model.kind,
            device_name: model.device_name.clone(),
            elements: model.elements.iter().map(ClaimedElement::from_model).collect(),
            schemas: model.schemas.clone(),
        }
    }
}

/// Outcome of parsing a `.hrimd` file.
#[derive(Debug, Clone)]
pub struct ParsedDescriptor {
    pub descriptor: Option<ModuleDescriptor>,
    pub diagnostics: Vec<Diagnostic>,
    pub spans: SpanMap,
}

impl ParsedDescriptor {
    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(Diagnostic::is_error)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum DescriptorError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: invalid module identity")]
    InvalidIdentity { path: String, diagnostics: Vec<Diagnostic> },
    #[error("{path}: descriptor has {} error(s)", diagnostics.len())]
    Parse { path: String, diagnostics: Vec<Diagnostic> },
}

impl DescriptorError {
    pub fn diagnostics(&self) -> &[Diagnostic] {
        match self {
            DescriptorError::Io { .. } => &[],
            DescriptorError::InvalidIdentity { diagnostics, .. } | DescriptorError::Parse { diagnostics, .. } => {
                diagnostics
            }
        }
    }
}

/// Parses descriptor text, failing on any error diagnostic.
pub fn descriptor_from_source(source: &SourceFile) -> Result<ModuleDescriptor, DescriptorError> {
    let parsed = parse_descriptor(source);
    let path = source.path().to_string();
    let errors: Vec<Diagnostic> = parsed.diagnostics.into_iter().filter(Diagnostic::is_error).collect();
    if errors.iter().any(|d| matches!(d.code, Code::E_INVALID_IDENTITY | Code::E_MISSING_IDENTITY)) {
        return Err(DescriptorError::InvalidIdentity { path, diagnostics: errors });
    }
    match parsed.descriptor {
        Some(descriptor) if errors.is_empty() => Ok(descriptor),
        _ => Err(DescriptorError::Parse { path, diagnostics: errors }),
    }
}

pub fn load_descriptor(path: &Path) -> Result<ModuleDescriptor, DescriptorError> {
    let source = SourceFile::read(path)
        .map_err(|source| DescriptorError::Io { path: path.display().to_string(), source })?;
    descriptor_from_source(&source)
}
