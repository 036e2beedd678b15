//! Rendering, parsing and validation of the nine package/node/topic/file/
//! parameter name patterns.
//!
//! Identity tokens are fixed-width (four lowercase hex characters), so names
//! are parsed by taking the device kind from the left and identity tokens
//! from the right; whatever remains is the device name, which may itself
//! contain underscores.

use std::fmt;
use std::str::FromStr;

use crate::diag::{Code, Finding, Locus};
use crate::model::{DeviceKind, HexToken, Primitive};

const PREFIX: &str = "hrim_";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NamePattern {
    Package,
    Node,
    Topic,
    MessageFile,
    GenericMessageFile,
    ServicePath,
    ServiceFile,
    ActionFile,
    ParameterTag,
}

impl NamePattern {
    pub const ALL: [NamePattern; 9] = [
        NamePattern::Package,
        NamePattern::Node,
        NamePattern::Topic,
        NamePattern::MessageFile,
        NamePattern::GenericMessageFile,
        NamePattern::ServicePath,
        NamePattern::ServiceFile,
        NamePattern::ActionFile,
        NamePattern::ParameterTag,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            NamePattern::Package => "package",
            NamePattern::Node => "node",
            NamePattern::Topic => "topic",
            NamePattern::MessageFile => "message_file",
            NamePattern::GenericMessageFile => "generic_message_file",
            NamePattern::ServicePath => "service_path",
            NamePattern::ServiceFile => "service_file",
            NamePattern::ActionFile => "action_file",
            NamePattern::ParameterTag => "parameter_tag",
        }
    }

    /// Every character any valid name of this pattern can contain.
    pub fn alphabet(self) -> fn(char) -> bool {
        match self {
            NamePattern::Package | NamePattern::Node => |c| matches!(c, 'a'..='z' | '0'..='9' | '_'),
            NamePattern::Topic | NamePattern::ServicePath => |c| matches!(c, 'a'..='z' | '0'..='9' | '_' | '/'),
            NamePattern::MessageFile
            | NamePattern::GenericMessageFile
            | NamePattern::ServiceFile
            | NamePattern::ActionFile => |c| c.is_ascii_alphanumeric() || matches!(c, '_' | '/' | '.'),
            NamePattern::ParameterTag => {
                |c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '+' | '-' | ' ' | '=' | '"')
            }
        }
    }
}

impl FromStr for NamePattern {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        NamePattern::ALL.into_iter().find(|p| p.as_str() == s).ok_or(())
    }
}

impl fmt::Display for NamePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Placeholder values for a name. Only the parts a pattern uses are set.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NameParts {
    pub device_kind: Option<DeviceKind>,
    pub device_name: Option<String>,
    pub vendor_id: Option<HexToken>,
    pub product_id: Option<HexToken>,
    pub instance_id: Option<HexToken>,
    pub topic_name: Option<String>,
    pub message_name: Option<String>,
    pub service_name: Option<String>,
    pub action_name: Option<String>,
    pub parameter_name: Option<String>,
    pub data_type: Option<String>,
    pub parameter_value: Option<String>,
}

impl NameParts {
    pub fn device(kind: DeviceKind, name: &str) -> Self {
        NameParts { device_kind: Some(kind), device_name: Some(name.to_string()), ..Default::default() }
    }

    pub fn vendor(mut self, vendor: HexToken) -> Self {
        self.vendor_id = Some(vendor);
        self
    }

    pub fn product(mut self, product: HexToken) -> Self {
        self.product_id = Some(product);
        self
    }

    pub fn instance(mut self, instance: HexToken) -> Self {
        self.instance_id = Some(instance);
        self
    }

    pub fn topic(mut self, topic: &str) -> Self {
        self.topic_name = Some(topic.to_string());
        self
    }

    pub fn message(mut self, message: &str) -> Self {
        self.message_name = Some(message.to_string());
        self
    }

    pub fn service(mut self, service: &str) -> Self {
        self.service_name = Some(service.to_string());
        self
    }

    pub fn action(mut self, action: &str) -> Self {
        self.action_name = Some(action.to_string());
        self
    }

    pub fn parameter(name: &str, data_type: &str, value: &str) -> Self {
        NameParts {
            parameter_name: Some(name.to_string()),
            data_type: Some(data_type.to_string()),
            parameter_value: Some(value.to_string()),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NamingError {
    #[error("missing placeholder <{0}>")]
    MissingPart(&'static str),
    #[error("malformed <{part}> token `{token}`")]
    MalformedToken { part: &'static str, token: String },
    #[error("`{text}` does not match the {pattern} pattern")]
    NoMatch { pattern: NamePattern, text: String },
    #[error("`{0}` is not a device kind")]
    UnknownKind(String),
    #[error("ambiguous name `{0}`")]
    AmbiguousName(String),
}

/// `[a-z][a-z0-9]*(_[a-z0-9]+)*`
pub fn is_snake_case(s: &str) -> bool {
    let mut parts = s.split('_');
    let Some(first) = parts.next() else { return false };
    let lower_alnum = |p: &str| !p.is_empty() && p.bytes().all(|b| b.is_ascii_lowercase() || b.is_ascii_digit());
    first.as_bytes().first().is_some_and(u8::is_ascii_lowercase) && lower_alnum(first) && parts.all(lower_alnum)
}

/// `[A-Z][A-Za-z0-9]*`
pub fn is_pascal_case(s: &str) -> bool {
    s.as_bytes().first().is_some_and(u8::is_ascii_uppercase) && s.bytes().all(|b| b.is_ascii_alphanumeric())
}

/// `[A-Z][A-Z0-9]*(_[A-Z0-9]+)*`
pub fn is_upper_snake(s: &str) -> bool {
    let mut parts = s.split('_');
    let Some(first) = parts.next() else { return false };
    let upper_alnum = |p: &str| !p.is_empty() && p.bytes().all(|b| b.is_ascii_uppercase() || b.is_ascii_digit());
    first.as_bytes().first().is_some_and(u8::is_ascii_uppercase) && upper_alnum(first) && parts.all(upper_alnum)
}

/// Parameter values are restricted to a quote- and space-free token.
pub fn is_parameter_value(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric() || matches!(b, b'_' | b'.' | b'+' | b'-'))
}

fn require<T: Clone>(value: &Option<T>, part: &'static str) -> Result<T, NamingError> {
    value.clone().ok_or(NamingError::MissingPart(part))
}

fn snake(value: &Option<String>, part: &'static str) -> Result<String, NamingError> {
    let token = require(value, part)?;
    if is_snake_case(&token) {
        Ok(token)
    } else {
        Err(NamingError::MalformedToken { part, token })
    }
}

fn pascal(value: &Option<String>, part: &'static str) -> Result<String, NamingError> {
    let token = require(value, part)?;
    if is_pascal_case(&token) {
        Ok(token)
    } else {
        Err(NamingError::MalformedToken { part, token })
    }
}

fn device_prefix(parts: &NameParts) -> Result<String, NamingError> {
    let kind = require(&parts.device_kind, "device_kind")?;
    let name = snake(&parts.device_name, "device_name")?;
    Ok(format!("{PREFIX}{kind}_{name}"))
}

/// Substitutes `parts` into `pattern`. Parts the pattern does not use are ignored.
pub fn render(pattern: NamePattern, parts: &NameParts) -> Result<String, NamingError> {
    Ok(match pattern {
        NamePattern::Package => {
            let prefix = device_prefix(parts)?;
            let vendor = require(&parts.vendor_id, "vendor_id")?;
            let product = require(&parts.product_id, "product_id")?;
            format!("{prefix}_{vendor}_{product}")
        }
        NamePattern::Node => {
            let prefix = device_prefix(parts)?;
            let instance = require(&parts.instance_id, "instance_id")?;
            format!("{prefix}_{instance}")
        }
        NamePattern::Topic => {
            let node = render(NamePattern::Node, parts)?;
            format!("{node}/{}", snake(&parts.topic_name, "topic_name")?)
        }
        NamePattern::ServicePath => {
            let node = render(NamePattern::Node, parts)?;
            format!("{node}/{}", snake(&parts.service_name, "service_name")?)
        }
        NamePattern::MessageFile => {
            let prefix = device_prefix(parts)?;
            format!("{prefix}_msgs/msg/{}.msg", pascal(&parts.message_name, "message_name")?)
        }
        NamePattern::GenericMessageFile => {
            format!("{PREFIX}generic_msgs/msg/{}.msg", pascal(&parts.message_name, "message_name")?)
        }
        NamePattern::ServiceFile => {
            let prefix = device_prefix(parts)?;
            format!("{prefix}_srvs/srv/{}.srv", pascal(&parts.service_name, "service_name")?)
        }
        NamePattern::ActionFile => {
            let prefix = device_prefix(parts)?;
            format!("{prefix}_action/{}.action", pascal(&parts.action_name, "action_name")?)
        }
        NamePattern::ParameterTag => {
            let name = snake(&parts.parameter_name, "parameter_name")?;
            let data_type = require(&parts.data_type, "data_type")?;
            if data_type.parse::<Primitive>().is_err() {
                return Err(NamingError::MalformedToken { part: "data_type", token: data_type });
            }
            let value = require(&parts.parameter_value, "parameter_value")?;
            if !is_parameter_value(&value) {
                return Err(NamingError::MalformedToken { part: "parameter_value", token: value });
            }
            format!("param name=\"{name}\" type=\"{data_type}\" value=\"{value}\"")
        }
    })
}

fn no_match(pattern: NamePattern, text: &str) -> NamingError {
    NamingError::NoMatch { pattern, text: text.to_string() }
}

/// Splits `hrim_<kind>_<rest>` into kind and rest.
fn split_kind<'a>(pattern: NamePattern, text: &'a str, body: &'a str) -> Result<(DeviceKind, &'a str), NamingError> {
    let rest = match body.strip_prefix(PREFIX) {
        Some(rest) => rest,
        None if body.to_ascii_lowercase().starts_with(PREFIX) => {
            return Err(NamingError::MalformedToken { part: "hrim", token: body[..4].to_string() })
        }
        None => return Err(no_match(pattern, text)),
    };
    let (kind_text, rest) = rest.split_once('_').ok_or_else(|| no_match(pattern, text))?;
    match kind_text.parse::<DeviceKind>() {
        Ok(kind) => Ok((kind, rest)),
        Err(()) if !kind_text.is_empty() && kind_text.bytes().all(|b| b.is_ascii_lowercase() || b.is_ascii_digit()) => {
            Err(NamingError::UnknownKind(kind_text.to_string()))
        }
        Err(()) => Err(NamingError::MalformedToken { part: "device_kind", token: kind_text.to_string() }),
    }
}

/// Takes one `_xxxx` identity token off the right end of `rest`.
fn pop_hex<'a>(pattern: NamePattern, text: &str, rest: &'a str, part: &'static str) -> Result<(&'a str, HexToken), NamingError> {
    if rest.len() < 6 || !rest.is_char_boundary(rest.len() - 5) {
        return Err(no_match(pattern, text));
    }
    let (head, tail) = rest.split_at(rest.len() - 5);
    let token = tail.strip_prefix('_').ok_or_else(|| no_match(pattern, text))?;
    let hex = HexToken::parse(token).map_err(|_| NamingError::MalformedToken { part, token: token.to_string() })?;
    Ok((head, hex))
}

fn device_name(rest: &str) -> Result<String, NamingError> {
    if is_snake_case(rest) {
        Ok(rest.to_string())
    } else {
        Err(NamingError::MalformedToken { part: "device_name", token: rest.to_string() })
    }
}

fn check_snake(token: &str, part: &'static str) -> Result<String, NamingError> {
    if is_snake_case(token) {
        Ok(token.to_string())
    } else {
        Err(NamingError::MalformedToken { part, token: token.to_string() })
    }
}

fn check_pascal(token: &str, part: &'static str) -> Result<String, NamingError> {
    if is_pascal_case(token) {
        Ok(token.to_string())
    } else {
        Err(NamingError::MalformedToken { part, token: token.to_string() })
    }
}

/// Parses a node name `hrim_<kind>_<name>_<instance>`.
fn parse_node(pattern: NamePattern, text: &str, node: &str) -> Result<NameParts, NamingError> {
    let (kind, rest) = split_kind(pattern, text, node)?;
    let (rest, instance) = pop_hex(pattern, text, rest, "instance_id")?;
    Ok(NameParts::device(kind, &device_name(rest)?).instance(instance))
}

/// Parses a file path `hrim_<kind>_<name><suffix><stem><ext>`.
fn parse_device_file(
    pattern: NamePattern,
    text: &str,
    suffix: &str,
    ext: &str,
    part: &'static str,
) -> Result<(NameParts, String), NamingError> {
    let (package, stem) = text.rsplit_once(suffix).ok_or_else(|| no_match(pattern, text))?;
    let stem = stem.strip_suffix(ext).ok_or_else(|| no_match(pattern, text))?;
    let (kind, rest) = split_kind(pattern, text, package)?;
    let stem = check_pascal(stem, part)?;
    Ok((NameParts::device(kind, &device_name(rest)?), stem))
}

/// Inverse of [`render`].
pub fn parse(pattern: NamePattern, text: &str) -> Result<NameParts, NamingError> {
    match pattern {
        NamePattern::Package => {
            let (kind, rest) = split_kind(pattern, text, text)?;
            let (rest, product) = pop_hex(pattern, text, rest, "product_id")?;
            let (rest, vendor) = pop_hex(pattern, text, rest, "vendor_id")?;
            Ok(NameParts::device(kind, &device_name(rest)?).vendor(vendor).product(product))
        }
        NamePattern::Node => parse_node(pattern, text, text),
        NamePattern::Topic | NamePattern::ServicePath => {
            let (node, leaf) = text.split_once('/').ok_or_else(|| no_match(pattern, text))?;
            let parts = parse_node(pattern, text, node)?;
            Ok(if pattern == NamePattern::Topic {
                parts.topic(&check_snake(leaf, "topic_name")?)
            } else {
                parts.service(&check_snake(leaf, "service_name")?)
            })
        }
        NamePattern::MessageFile => {
            let (parts, stem) = parse_device_file(pattern, text, "_msgs/msg/", ".msg", "message_name")?;
            Ok(parts.message(&stem))
        }
        NamePattern::GenericMessageFile => {
            let stem = match text.strip_prefix("hrim_generic_msgs/msg/") {
                Some(rest) => rest.strip_suffix(".msg").ok_or_else(|| no_match(pattern, text))?,
                None if text.to_ascii_lowercase().starts_with(PREFIX) && !text.starts_with(PREFIX) => {
                    return Err(NamingError::MalformedToken { part: "hrim", token: text[..4].to_string() })
                }
                None => return Err(no_match(pattern, text)),
            };
            Ok(NameParts::default().message(&check_pascal(stem, "message_name")?))
        }
        NamePattern::ServiceFile => {
            let (parts, stem) = parse_device_file(pattern, text, "_srvs/srv/", ".srv", "service_name")?;
            Ok(parts.service(&stem))
        }
        NamePattern::ActionFile => {
            let (parts, stem) = parse_device_file(pattern, text, "_action/", ".action", "action_name")?;
            Ok(parts.action(&stem))
        }
        NamePattern::ParameterTag => parse_parameter_tag(text),
    }
}

fn parse_parameter_tag(text: &str) -> Result<NameParts, NamingError> {
    let pattern = NamePattern::ParameterTag;
    let attr = |rest: &'_ str, key: &str| -> Result<(String, usize), NamingError> {
        let open = format!("{key}=\"");
        let body = rest.strip_prefix(open.as_str()).ok_or_else(|| no_match(pattern, text))?;
        let end = body.find('"').ok_or_else(|| no_match(pattern, text))?;
        Ok((body[..end].to_string(), open.len() + end + 1))
    };
    let rest = text.strip_prefix("param ").ok_or_else(|| no_match(pattern, text))?;
    let (name, used) = attr(rest, "name")?;
    let rest = rest[used..].strip_prefix(' ').ok_or_else(|| no_match(pattern, text))?;
    let (data_type, used) = attr(rest, "type")?;
    let rest = rest[used..].strip_prefix(' ').ok_or_else(|| no_match(pattern, text))?;
    let (value, used) = attr(rest, "value")?;
    if used != rest.len() {
        return Err(no_match(pattern, text));
    }
    let name = check_snake(&name, "parameter_name")?;
    if data_type.parse::<Primitive>().is_err() {
        return Err(NamingError::MalformedToken { part: "data_type", token: data_type });
    }
    if !is_parameter_value(&value) {
        return Err(NamingError::MalformedToken { part: "parameter_value", token: value });
    }
    Ok(NameParts::parameter(&name, &data_type, &value))
}

/// Lint-style wrapper over [`parse`]: `true` iff the name parses.
pub fn validate(pattern: NamePattern, text: &str) -> (bool, Vec<Finding>) {
    match parse(pattern, text) {
        Ok(_) => (true, Vec::new()),
        Err(err) => (
            false,
            vec![Finding::new(Code::E_NAMING, text, format!("{pattern}: {err}"), Locus::Model)],
        ),
    }
}
