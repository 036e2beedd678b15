//! The model-definition language: `.hrim` component models and `.hrimd`
//! module descriptors share one tokenizer and one recursive-descent parser.

mod format;
mod lexer;
mod parser;

use std::collections::HashMap;

use crate::diag::{Diagnostic, Locus, Span};
use crate::model::ComponentModel;

pub use format::{format_model, FormatError};
pub use lexer::{is_number, tokenize, Keyword, Lexer, Token, TokenKind};
pub use parser::{parse_descriptor, parse_model};

/// A source text with line endings normalized to LF.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceFile {
    path: String,
    text: String,
}

impl SourceFile {
    pub fn new(path: impl Into<String>, raw: &str) -> Self {
        let text = raw.replace("\r\n", "\n").replace('\r', "\n");
        SourceFile { path: path.into(), text }
    }

    pub fn read(path: &std::path::Path) -> std::io::Result<Self> {
        let raw = std::fs::read_to_string(path)?;
        Ok(SourceFile::new(path.display().to_string(), &raw))
    }

    pub fn path(&self) -> &str {
        &self.path
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    /// Span covering the last character, or an empty span for empty text.
    pub fn end_span(&self) -> Span {
        let mut lexer = Lexer::new(self);
        let mut last = Span::default();
        for tok in lexer.by_ref().flatten() {
            last = tok.span;
        }
        last
    }
}

/// Source spans of parsed items, keyed by what findings point at.
#[derive(Debug, Clone, Default)]
pub struct SpanMap {
    map: HashMap<Locus, Span>,
    model: Span,
}

impl SpanMap {
    pub(crate) fn insert(&mut self, locus: Locus, span: Span) {
        self.map.entry(locus).or_insert(span);
    }

    pub(crate) fn set_model(&mut self, span: Span) {
        self.model = span;
    }

    /// The span for `locus`, falling back to the owning schema and then to
    /// the model header.
    pub fn lookup(&self, locus: &Locus) -> Span {
        if let Some(span) = self.map.get(locus) {
            return *span;
        }
        let fallback = match locus {
            Locus::Field { schema, .. } => Some(Locus::Schema { name: schema.clone() }),
            Locus::Unit { owner } => match owner.split_once('.') {
                Some((schema, field)) => Some(Locus::Field { schema: schema.to_string(), field: field.to_string() }),
                None => Some(Locus::Element { name: owner.clone() }),
            },
            _ => None,
        };
        fallback.map_or(self.model, |l| self.lookup(&l))
    }
}

/// Outcome of parsing a `.hrim` file.
#[derive(Debug, Clone)]
pub struct ParsedModel {
    /// Present whenever a model block was found, even if items had errors.
    pub model: Option<ComponentModel>,
    pub diagnostics: Vec<Diagnostic>,
    pub spans: SpanMap,
}

impl ParsedModel {
    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(Diagnostic::is_error)
    }

    /// The model, if it parsed and validated without errors.
    pub fn valid_model(&self) -> Option<&ComponentModel> {
        if self.has_errors() {
            None
        } else {
            self.model.as_ref()
        }
    }

    /// Unit findings for the parsed model, anchored to source spans.
    pub fn unit_diagnostics(&self) -> Vec<Diagnostic> {
        let Some(model) = &self.model else { return Vec::new() };
        crate::units::check_units(model)
            .iter()
            .map(|f| Diagnostic::from_finding(f, self.spans.lookup(&f.locus)))
            .collect()
    }
}
