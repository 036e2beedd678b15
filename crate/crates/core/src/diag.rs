//! Findings, diagnostics and the closed registry of finding codes.

use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        }
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

macro_rules! codes {
    ($($variant:ident => $text:literal,)*) => {
        /// Every code a finding or diagnostic may carry.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        #[allow(non_camel_case_types)]
        pub enum Code {
            $($variant,)*
        }

        impl Code {
            pub const ALL: &'static [Code] = &[$(Code::$variant,)*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(Code::$variant => $text,)*
                }
            }

            pub fn from_name(text: &str) -> Option<Code> {
                match text {
                    $($text => Some(Code::$variant),)*
                    _ => None,
                }
            }
        }
    };
}

codes! {
    // lexical
    E_ILLEGAL_CHAR => "E_ILLEGAL_CHAR",
    E_UNTERMINATED_STRING => "E_UNTERMINATED_STRING",
    // syntax
    E_UNEXPECTED_TOKEN => "E_UNEXPECTED_TOKEN",
    E_NO_MODEL_BLOCK => "E_NO_MODEL_BLOCK",
    E_EXTRA_MODEL_BLOCK => "E_EXTRA_MODEL_BLOCK",
    E_MISSING_KIND => "E_MISSING_KIND",
    E_UNKNOWN_KIND => "E_UNKNOWN_KIND",
    E_MISSING_DIRECTION => "E_MISSING_DIRECTION",
    E_MISSING_OBLIGATION => "E_MISSING_OBLIGATION",
    E_MISSING_CATEGORY => "E_MISSING_CATEGORY",
    E_MISSING_SCHEMA => "E_MISSING_SCHEMA",
    E_MISSING_TYPE => "E_MISSING_TYPE",
    E_UNEXPECTED_ATTRIBUTE => "E_UNEXPECTED_ATTRIBUTE",
    E_DUPLICATE_ATTRIBUTE => "E_DUPLICATE_ATTRIBUTE",
    E_DUPLICATE_ELEMENT => "E_DUPLICATE_ELEMENT",
    E_DUPLICATE_SCHEMA => "E_DUPLICATE_SCHEMA",
    E_DUPLICATE_GROUP => "E_DUPLICATE_GROUP",
    E_INVALID_VALUE => "E_INVALID_VALUE",
    E_UNKNOWN_TYPE => "E_UNKNOWN_TYPE",
    E_MISSING_IDENTITY => "E_MISSING_IDENTITY",
    E_INVALID_IDENTITY => "E_INVALID_IDENTITY",
    E_MALFORMED_NAME => "E_MALFORMED_NAME",
    // model structure
    E_MISSING_COMMON => "E_MISSING_COMMON",
    E_COMMON_MISMATCH => "E_COMMON_MISMATCH",
    E_NO_DEVICE_PURPOSE => "E_NO_DEVICE_PURPOSE",
    E_UNRESOLVED_SCHEMA => "E_UNRESOLVED_SCHEMA",
    E_SCHEMA_KIND => "E_SCHEMA_KIND",
    E_OBLIGATION_CATEGORY => "E_OBLIGATION_CATEGORY",
    E_ELEMENT_SHAPE => "E_ELEMENT_SHAPE",
    E_GROUP_CATEGORY => "E_GROUP_CATEGORY",
    E_GROUP_MEMBERSHIP => "E_GROUP_MEMBERSHIP",
    E_EMPTY_GROUP => "E_EMPTY_GROUP",
    E_DUPLICATE_FIELD => "E_DUPLICATE_FIELD",
    E_DUPLICATE_CONSTANT => "E_DUPLICATE_CONSTANT",
    // units
    E_MISSING_UNIT => "E_MISSING_UNIT",
    E_UNKNOWN_UNIT => "E_UNKNOWN_UNIT",
    E_NON_NUMERIC_UNIT => "E_NON_NUMERIC_UNIT",
    // conformance
    E_KIND_MISMATCH => "E_KIND_MISMATCH",
    E_MISSING_MANDATORY => "E_MISSING_MANDATORY",
    E_GROUP_PARTIAL => "E_GROUP_PARTIAL",
    E_SCHEMA_MISMATCH => "E_SCHEMA_MISMATCH",
    E_DIRECTION_MISMATCH => "E_DIRECTION_MISMATCH",
    E_NAMING => "E_NAMING",
    W_UNKNOWN_ELEMENT => "W_UNKNOWN_ELEMENT",
}

impl Code {
    pub fn default_severity(self) -> Severity {
        if self.as_str().starts_with("W_") {
            Severity::Warning
        } else {
            Severity::Error
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Code {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

/// What a finding is about, so that a front end holding source spans can
/// point at it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Locus {
    Model,
    Element { name: String },
    Group { name: String },
    Schema { name: String },
    Field { schema: String, field: String },
    Unit { owner: String },
}

/// A coded finding produced by a checker. Findings are data, never failures.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub code: Code,
    pub severity: Severity,
    pub subject: String,
    pub message: String,
    #[serde(skip)]
    pub locus: Locus,
}

impl Finding {
    pub fn new(code: Code, subject: impl Into<String>, message: impl Into<String>, locus: Locus) -> Self {
        Finding {
            code,
            severity: code.default_severity(),
            subject: subject.into(),
            message: message.into(),
            locus,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Finding {
    /// `<severity> <code> <subject>: <message>`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}: {}", self.severity, self.code, self.subject, self.message)
    }
}

/// 1-based line and column plus a byte offset into the normalized text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
    pub offset: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Span {
    pub start: Pos,
    pub end: Pos,
}

impl Span {
    pub fn new(start: Pos, end: Pos) -> Self {
        Span { start, end }
    }

    pub fn to(self, other: Span) -> Span {
        Span { start: self.start, end: other.end }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}-{}:{}",
            self.start.line, self.start.col, self.end.line, self.end.col
        )
    }
}

/// A finding anchored to a source span.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: Code,
    pub message: String,
    pub span: Span,
}

impl Diagnostic {
    pub fn error(code: Code, message: impl Into<String>, span: Span) -> Self {
        Diagnostic { severity: Severity::Error, code, message: message.into(), span }
    }

    pub fn from_finding(finding: &Finding, span: Span) -> Self {
        Diagnostic {
            severity: finding.severity,
            code: finding.code,
            message: format!("{}: {}", finding.subject, finding.message),
            span,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// `<path>:<line>:<col>: <severity>[<code>]: <message>`
    pub fn render(&self, path: &str) -> String {
        format!(
            "{}:{}:{}: {}[{}]: {}",
            path, self.span.start.line, self.span.start.col, self.severity, self.code, self.message
        )
    }
}
