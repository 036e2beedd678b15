//! Domain types for component models and the structural validator.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::catalog;
use crate::diag::{Code, Finding, Locus};
use crate::naming::{is_pascal_case, is_snake_case, is_upper_snake};

/// The six top-level module classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DeviceKind {
    Sensor,
    Actuator,
    Communication,
    Cognition,
    Ui,
    Power,
}

impl DeviceKind {
    pub const ALL: [DeviceKind; 6] = [
        DeviceKind::Sensor,
        DeviceKind::Actuator,
        DeviceKind::Communication,
        DeviceKind::Cognition,
        DeviceKind::Ui,
        DeviceKind::Power,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DeviceKind::Sensor => "sensor",
            DeviceKind::Actuator => "actuator",
            DeviceKind::Communication => "communication",
            DeviceKind::Cognition => "cognition",
            DeviceKind::Ui => "ui",
            DeviceKind::Power => "power",
        }
    }

    /// Position in the closed enumeration; the wire value of `ID.device_kind`.
    pub fn index(self) -> u8 {
        DeviceKind::ALL.iter().position(|k| *k == self).unwrap() as u8
    }
}

impl FromStr for DeviceKind {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        DeviceKind::ALL.into_iter().find(|k| k.as_str() == s).ok_or(())
    }
}

impl fmt::Display for DeviceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Four lowercase hex characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HexToken([u8; 4]);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("`{0}` is not a 4-character lowercase hex token")]
pub struct InvalidToken(pub String);

impl HexToken {
    pub fn parse(text: &str) -> Result<Self, InvalidToken> {
        let bytes = text.as_bytes();
        if bytes.len() != 4 || !bytes.iter().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f')) {
            return Err(InvalidToken(text.to_string()));
        }
        Ok(HexToken([bytes[0], bytes[1], bytes[2], bytes[3]]))
    }

    pub fn from_u16(value: u16) -> Self {
        HexToken::parse(&format!("{value:04x}")).unwrap()
    }

    pub fn as_str(&self) -> &str {
        // Only ASCII hex digits are ever stored.
        std::str::from_utf8(&self.0).unwrap()
    }
}

impl FromStr for HexToken {
    type Err = InvalidToken;

    fn from_str(s: &str) -> Result<Self, InvalidToken> {
        HexToken::parse(s)
    }
}

impl fmt::Display for HexToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for HexToken {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

/// Vendor, product and (for running instances) instance identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Identity {
    pub vendor: HexToken,
    pub product: HexToken,
    pub instance: Option<HexToken>,
}

impl Identity {
    pub fn new(vendor: HexToken, product: HexToken, instance: Option<HexToken>) -> Self {
        Identity { vendor, product, instance }
    }

    pub fn parse(vendor: &str, product: &str, instance: Option<&str>) -> Result<Self, InvalidToken> {
        Ok(Identity {
            vendor: vendor.parse()?,
            product: product.parse()?,
            instance: instance.map(str::parse).transpose()?,
        })
    }
}

/// `vendor/product/instance`, with `-` for a missing instance.
impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.instance {
            Some(i) => write!(f, "{}/{}/{}", self.vendor, self.product, i),
            None => write!(f, "{}/{}/-", self.vendor, self.product),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Obligation {
    Mandatory,
    Optional,
}

impl Obligation {
    pub fn as_str(self) -> &'static str {
        match self {
            Obligation::Mandatory => "mandatory",
            Obligation::Optional => "optional",
        }
    }

    /// `M` or `O`, as used in model summaries.
    pub fn label(self) -> char {
        match self {
            Obligation::Mandatory => 'M',
            Obligation::Optional => 'O',
        }
    }
}

impl FromStr for Obligation {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "mandatory" => Ok(Obligation::Mandatory),
            "optional" => Ok(Obligation::Optional),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementCategory {
    DevicePurpose,
    CommonRequirement,
    AdditionalCapability,
    OptionalHardware,
}

impl ElementCategory {
    pub const ALL: [ElementCategory; 4] = [
        ElementCategory::DevicePurpose,
        ElementCategory::CommonRequirement,
        ElementCategory::AdditionalCapability,
        ElementCategory::OptionalHardware,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ElementCategory::DevicePurpose => "device_purpose",
            ElementCategory::CommonRequirement => "common_requirement",
            ElementCategory::AdditionalCapability => "additional_capability",
            ElementCategory::OptionalHardware => "optional_hardware",
        }
    }

    /// The obligation every element of this category must carry.
    pub fn required_obligation(self) -> Obligation {
        match self {
            ElementCategory::DevicePurpose | ElementCategory::CommonRequirement => Obligation::Mandatory,
            ElementCategory::AdditionalCapability | ElementCategory::OptionalHardware => Obligation::Optional,
        }
    }
}

impl FromStr for ElementCategory {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        ElementCategory::ALL.into_iter().find(|c| c.as_str() == s).ok_or(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementKind {
    Topic,
    Service,
    Action,
    Parameter,
}

impl ElementKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ElementKind::Topic => "topic",
            ElementKind::Service => "service",
            ElementKind::Action => "action",
            ElementKind::Parameter => "parameter",
        }
    }
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Published,
    Subscribed,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Published => "published",
            Direction::Subscribed => "subscribed",
        }
    }
}

impl FromStr for Direction {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "published" => Ok(Direction::Published),
            "subscribed" => Ok(Direction::Subscribed),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Primitive {
    Bool,
    Byte,
    Char,
    Int8,
    Int16,
    Int32,
    Int64,
    Uint8,
    Uint16,
    Uint32,
    Uint64,
    Float32,
    Float64,
    String,
}

impl Primitive {
    pub const ALL: [Primitive; 14] = [
        Primitive::Bool,
        Primitive::Byte,
        Primitive::Char,
        Primitive::Int8,
        Primitive::Int16,
        Primitive::Int32,
        Primitive::Int64,
        Primitive::Uint8,
        Primitive::Uint16,
        Primitive::Uint32,
        Primitive::Uint64,
        Primitive::Float32,
        Primitive::Float64,
        Primitive::String,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Primitive::Bool => "bool",
            Primitive::Byte => "byte",
            Primitive::Char => "char",
            Primitive::Int8 => "int8",
            Primitive::Int16 => "int16",
            Primitive::Int32 => "int32",
            Primitive::Int64 => "int64",
            Primitive::Uint8 => "uint8",
            Primitive::Uint16 => "uint16",
            Primitive::Uint32 => "uint32",
            Primitive::Uint64 => "uint64",
            Primitive::Float32 => "float32",
            Primitive::Float64 => "float64",
            Primitive::String => "string",
        }
    }

    /// Integer and floating-point types. These must always carry a unit.
    pub fn is_numeric(self) -> bool {
        self.is_integer() || self.is_float()
    }

    pub fn is_integer(self) -> bool {
        matches!(
            self,
            Primitive::Int8
                | Primitive::Int16
                | Primitive::Int32
                | Primitive::Int64
                | Primitive::Uint8
                | Primitive::Uint16
                | Primitive::Uint32
                | Primitive::Uint64
        )
    }

    pub fn is_float(self) -> bool {
        matches!(self, Primitive::Float32 | Primitive::Float64)
    }

    /// Whether `literal` is an acceptable constant/default for this type.
    pub fn accepts(self, literal: &Literal) -> bool {
        if let Literal::Number(text) = literal {
            if !crate::lang::is_number(text) {
                return false;
            }
        }
        match (self, literal) {
            (Primitive::Bool, Literal::Bool(_)) => true,
            (Primitive::String, Literal::Str(_)) => true,
            (p, Literal::Number(text)) if p.is_float() => text.parse::<f64>().is_ok(),
            (p, Literal::Number(text)) if p.is_integer() || p == Primitive::Byte || p == Primitive::Char => {
                let unsigned = matches!(
                    p,
                    Primitive::Uint8 | Primitive::Uint16 | Primitive::Uint32 | Primitive::Uint64 | Primitive::Byte | Primitive::Char
                );
                if unsigned {
                    text.parse::<u64>().is_ok()
                } else {
                    text.parse::<i64>().is_ok()
                }
            }
            _ => false,
        }
    }
}

impl FromStr for Primitive {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        Primitive::ALL.into_iter().find(|p| p.as_str() == s).ok_or(())
    }
}

impl fmt::Display for Primitive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldType {
    Primitive { ty: Primitive },
    /// `len = None` is an unbounded array.
    Array { elem: Primitive, len: Option<u32> },
    Nested { schema: String },
}

impl FieldType {
    pub fn primitive(ty: Primitive) -> Self {
        FieldType::Primitive { ty }
    }

    pub fn unbounded(elem: Primitive) -> Self {
        FieldType::Array { elem, len: None }
    }

    pub fn nested(schema: impl Into<String>) -> Self {
        FieldType::Nested { schema: schema.into() }
    }

    /// The primitive underlying scalars and arrays.
    pub fn base_primitive(&self) -> Option<Primitive> {
        match self {
            FieldType::Primitive { ty } => Some(*ty),
            FieldType::Array { elem, .. } => Some(*elem),
            FieldType::Nested { .. } => None,
        }
    }

    pub fn is_numeric(&self) -> bool {
        self.base_primitive().is_some_and(Primitive::is_numeric)
    }
}

impl fmt::Display for FieldType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldType::Primitive { ty } => write!(f, "{ty}"),
            FieldType::Array { elem, len: None } => write!(f, "{elem}[]"),
            FieldType::Array { elem, len: Some(n) } => write!(f, "{elem}[{n}]"),
            FieldType::Nested { schema } => f.write_str(schema),
        }
    }
}

/// A literal value as written in source. Numbers keep their lexeme so that
/// `85.0` and `85` stay distinct.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(untagged)]
pub enum Literal {
    Number(String),
    Str(String),
    Bool(bool),
}

impl Literal {
    pub fn number(text: impl Into<String>) -> Self {
        Literal::Number(text.into())
    }

    /// The bare value text, without string quoting.
    pub fn raw(&self) -> String {
        match self {
            Literal::Number(n) => n.clone(),
            Literal::Str(s) => s.clone(),
            Literal::Bool(b) => b.to_string(),
        }
    }
}

impl fmt::Display for Literal {
    /// Source form: strings are quoted with `\"` and `\\` escapes.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Number(n) => f.write_str(n),
            Literal::Bool(b) => write!(f, "{b}"),
            Literal::Str(s) => {
                f.write_str("\"")?;
                for c in s.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FieldDef {
    pub name: String,
    pub field_type: FieldType,
    /// `None` means no unit was declared.
    pub unit: Option<String>,
}

impl FieldDef {
    pub fn new(name: impl Into<String>, field_type: FieldType, unit: Option<&str>) -> Self {
        FieldDef { name: name.into(), field_type, unit: unit.map(str::to_string) }
    }

    pub fn scalar(name: impl Into<String>, ty: Primitive, unit: &str) -> Self {
        FieldDef::new(name, FieldType::primitive(ty), Some(unit))
    }

    /// A field with no unit; only meaningful for non-numeric types.
    pub fn plain(name: impl Into<String>, field_type: FieldType) -> Self {
        FieldDef::new(name, field_type, None)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ConstantDef {
    pub name: String,
    pub ty: Primitive,
    pub value: Literal,
}

impl ConstantDef {
    pub fn new(name: impl Into<String>, ty: Primitive, value: Literal) -> Self {
        ConstantDef { name: name.into(), ty, value }
    }
}

/// An ordered list of fields plus named constants: a message body or one
/// section of a service/action.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize)]
pub struct Record {
    pub fields: Vec<FieldDef>,
    pub constants: Vec<ConstantDef>,
}

impl Record {
    pub fn new(fields: Vec<FieldDef>) -> Self {
        Record { fields, constants: Vec::new() }
    }

    pub fn with_constants(mut self, constants: Vec<ConstantDef>) -> Self {
        self.constants = constants;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct MessageSchema {
    pub name: String,
    pub body: Record,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ServiceSchema {
    pub name: String,
    pub request: Record,
    pub response: Record,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ActionSchema {
    pub name: String,
    pub goal: Record,
    pub result: Record,
    pub feedback: Record,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "schema_kind", rename_all = "lowercase")]
pub enum Schema {
    Message(MessageSchema),
    Service(ServiceSchema),
    Action(ActionSchema),
}

impl Schema {
    pub fn message(name: impl Into<String>, body: Record) -> Self {
        Schema::Message(MessageSchema { name: name.into(), body })
    }

    pub fn name(&self) -> &str {
        match self {
            Schema::Message(m) => &m.name,
            Schema::Service(s) => &s.name,
            Schema::Action(a) => &a.name,
        }
    }

    /// Named sections in file order. Messages have a single unnamed section.
    pub fn sections(&self) -> Vec<(&'static str, &Record)> {
        match self {
            Schema::Message(m) => vec![("", &m.body)],
            Schema::Service(s) => vec![("request", &s.request), ("response", &s.response)],
            Schema::Action(a) => vec![("goal", &a.goal), ("result", &a.result), ("feedback", &a.feedback)],
        }
    }

    /// The element kind this schema can back.
    pub fn element_kind(&self) -> ElementKind {
        match self {
            Schema::Message(_) => ElementKind::Topic,
            Schema::Service(_) => ElementKind::Service,
            Schema::Action(_) => ElementKind::Action,
        }
    }

    /// Names of nested schemas referenced by any field.
    pub fn nested_refs(&self) -> Vec<&str> {
        self.sections()
            .into_iter()
            .flat_map(|(_, r)| r.fields.iter())
            .filter_map(|f| match &f.field_type {
                FieldType::Nested { schema } => Some(schema.as_str()),
                _ => None,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ParamSpec {
    pub ty: Primitive,
    pub unit: Option<String>,
    pub default: Option<Literal>,
}

/// One topic, service, action or parameter of a component model.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct InterfaceElement {
    pub kind: ElementKind,
    pub name: String,
    pub direction: Option<Direction>,
    pub schema: Option<String>,
    pub param: Option<ParamSpec>,
    pub obligation: Obligation,
    pub category: ElementCategory,
    pub group: Option<String>,
    pub required_in_group: bool,
}

impl InterfaceElement {
    pub fn topic(name: &str, direction: Direction, schema: &str, category: ElementCategory) -> Self {
        InterfaceElement {
            kind: ElementKind::Topic,
            name: name.to_string(),
            direction: Some(direction),
            schema: Some(schema.to_string()),
            param: None,
            obligation: category.required_obligation(),
            category,
            group: None,
            required_in_group: false,
        }
    }

    pub fn service(name: &str, schema: &str, category: ElementCategory) -> Self {
        InterfaceElement {
            kind: ElementKind::Service,
            direction: None,
            ..InterfaceElement::topic(name, Direction::Published, schema, category)
        }
    }

    pub fn action(name: &str, schema: &str, category: ElementCategory) -> Self {
        InterfaceElement {
            kind: ElementKind::Action,
            direction: None,
            ..InterfaceElement::topic(name, Direction::Published, schema, category)
        }
    }

    pub fn parameter(
        name: &str,
        ty: Primitive,
        unit: Option<&str>,
        default: Option<Literal>,
        category: ElementCategory,
    ) -> Self {
        InterfaceElement {
            kind: ElementKind::Parameter,
            name: name.to_string(),
            direction: None,
            schema: None,
            param: Some(ParamSpec { ty, unit: unit.map(str::to_string), default }),
            obligation: category.required_obligation(),
            category,
            group: None,
            required_in_group: false,
        }
    }

    pub fn in_group(mut self, group: &str, required: bool) -> Self {
        self.group = Some(group.to_string());
        self.required_in_group = required;
        self
    }

    pub fn with_obligation(mut self, obligation: Obligation) -> Self {
        self.obligation = obligation;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct OptionalGroup {
    pub name: String,
    pub members: Vec<String>,
}

/// A compiled device sub-type model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentModel {
    pub kind: DeviceKind,
    pub device_name: String,
    pub elements: Vec<InterfaceElement>,
    pub groups: Vec<OptionalGroup>,
    /// Locally defined schemas in declaration order. Generic schemas are
    /// resolved through the catalog.
    pub schemas: Vec<Schema>,
}

/// Names of the six common-requirement topics, in canonical order.
pub const COMMON_TOPICS: [&str; 6] = ["id", "power", "status", "specs", "simulation3d", "simulationurdf"];

/// `rotary_servo` -> `RotaryServo`.
pub fn pascal_case(snake: &str) -> String {
    snake
        .split('_')
        .map(|part| {
            let mut chars = part.chars();
            match chars.next() {
                Some(first) => first.to_ascii_uppercase().to_string() + chars.as_str(),
                None => String::new(),
            }
        })
        .collect()
}

/// `Specs<DeviceName>` for a device name.
pub fn specs_schema_name(device_name: &str) -> String {
    format!("Specs{}", pascal_case(device_name))
}

/// The six common-requirement topics bound to their schemas.
pub fn common_requirements(device_name: &str) -> Vec<InterfaceElement> {
    let specs = specs_schema_name(device_name);
    COMMON_TOPICS
        .iter()
        .map(|&name| {
            let schema = match name {
                "id" => "ID",
                "power" => "Power",
                "status" => "Status",
                "specs" => specs.as_str(),
                "simulation3d" => "Simulation3D",
                "simulationurdf" => "SimulationURDF",
                _ => unreachable!(),
            };
            InterfaceElement::topic(name, Direction::Published, schema, ElementCategory::CommonRequirement)
        })
        .collect()
}

impl ComponentModel {
    pub fn new(kind: DeviceKind, device_name: &str) -> Self {
        ComponentModel {
            kind,
            device_name: device_name.to_string(),
            elements: Vec::new(),
            groups: Vec::new(),
            schemas: Vec::new(),
        }
    }

    pub fn element(&self, name: &str) -> Option<&InterfaceElement> {
        self.elements.iter().find(|e| e.name == name)
    }

    pub fn local_schema(&self, name: &str) -> Option<&Schema> {
        self.schemas.iter().find(|s| s.name() == name)
    }

    /// Looks a schema up locally, then among the builtin generics.
    pub fn resolve_schema(&self, name: &str) -> Option<&Schema> {
        self.local_schema(name).or_else(|| catalog::generic_schema(name))
    }

    pub fn group(&self, name: &str) -> Option<&OptionalGroup> {
        self.groups.iter().find(|g| g.name == name)
    }

    pub fn members_of<'a>(&'a self, group: &'a str) -> impl Iterator<Item = &'a InterfaceElement> + 'a {
        self.elements.iter().filter(move |e| e.group.as_deref() == Some(group))
    }

    /// Appends an element, registering its group if it has one.
    pub fn push(&mut self, element: InterfaceElement) {
        if let Some(group) = &element.group {
            match self.groups.iter_mut().find(|g| &g.name == group) {
                Some(g) => g.members.push(element.name.clone()),
                None => self.groups.push(OptionalGroup { name: group.clone(), members: vec![element.name.clone()] }),
            }
        }
        self.elements.push(element);
    }
}

/// Checks every structural invariant of a component model.
///
/// Returns an empty list iff the model is valid. Findings follow element
/// declaration order, then groups, then schemas, then model-level rules.
pub fn validate_model(model: &ComponentModel) -> Vec<Finding> {
    let mut out = Vec::new();

    if !is_snake_case(&model.device_name) {
        out.push(Finding::new(
            Code::E_MALFORMED_NAME,
            &model.device_name,
            "device name is not snake_case",
            Locus::Model,
        ));
    }

    let mut seen = HashSet::new();
    for element in &model.elements {
        check_element(model, element, &mut seen, &mut out);
    }

    check_groups(model, &mut out);

    let mut schema_names = HashSet::new();
    for schema in &model.schemas {
        if !schema_names.insert(schema.name()) {
            out.push(Finding::new(
                Code::E_DUPLICATE_SCHEMA,
                schema.name(),
                "schema defined more than once",
                Locus::Schema { name: schema.name().to_string() },
            ));
        }
        out.extend(check_schema(schema, |n| model.resolve_schema(n).is_some()));
    }

    for (expected, name) in common_requirements(&model.device_name).iter().zip(COMMON_TOPICS) {
        match model.element(name) {
            None => out.push(Finding::new(
                Code::E_MISSING_COMMON,
                name,
                "common-requirement topic is missing",
                Locus::Model,
            )),
            Some(actual) if actual != expected => out.push(Finding::new(
                Code::E_COMMON_MISMATCH,
                name,
                format!(
                    "common-requirement topic must be a mandatory published topic with schema {}",
                    expected.schema.as_deref().unwrap_or_default()
                ),
                Locus::Element { name: name.to_string() },
            )),
            Some(_) => {}
        }
    }

    let has_purpose = model
        .elements
        .iter()
        .any(|e| e.category == ElementCategory::DevicePurpose && e.kind != ElementKind::Parameter);
    if !has_purpose {
        out.push(Finding::new(
            Code::E_NO_DEVICE_PURPOSE,
            &model.device_name,
            "no device-purpose topic, service or action",
            Locus::Model,
        ));
    }

    out
}

fn check_element<'a>(
    model: &ComponentModel,
    element: &'a InterfaceElement,
    seen: &mut HashSet<&'a str>,
    out: &mut Vec<Finding>,
) {
    let name = element.name.as_str();
    let locus = || Locus::Element { name: name.to_string() };

    if !is_snake_case(name) {
        out.push(Finding::new(Code::E_MALFORMED_NAME, name, "element name is not snake_case", locus()));
    }
    if !seen.insert(name) {
        out.push(Finding::new(Code::E_DUPLICATE_ELEMENT, name, "element declared more than once", locus()));
    }

    if element.obligation != element.category.required_obligation() {
        out.push(Finding::new(
            Code::E_OBLIGATION_CATEGORY,
            name,
            format!(
                "category {} requires obligation {}",
                element.category.as_str(),
                element.category.required_obligation().as_str()
            ),
            locus(),
        ));
    }

    let shape_ok = match element.kind {
        ElementKind::Topic => element.direction.is_some() && element.schema.is_some() && element.param.is_none(),
        ElementKind::Service | ElementKind::Action => {
            element.direction.is_none() && element.schema.is_some() && element.param.is_none()
        }
        ElementKind::Parameter => element.direction.is_none() && element.schema.is_none() && element.param.is_some(),
    };
    if !shape_ok {
        out.push(Finding::new(
            Code::E_ELEMENT_SHAPE,
            name,
            format!("malformed {}: direction/schema/type combination is invalid", element.kind),
            locus(),
        ));
    }

    if let Some(schema_ref) = &element.schema {
        match model.resolve_schema(schema_ref) {
            None => out.push(Finding::new(
                Code::E_UNRESOLVED_SCHEMA,
                name,
                format!("schema {schema_ref} is not defined"),
                locus(),
            )),
            Some(schema) if schema.element_kind() != element.kind => out.push(Finding::new(
                Code::E_SCHEMA_KIND,
                name,
                format!("{} cannot be backed by {} schema {schema_ref}", element.kind, schema.element_kind()),
                locus(),
            )),
            Some(_) => {}
        }
    }

    match &element.group {
        Some(group) => {
            if !matches!(
                element.category,
                ElementCategory::AdditionalCapability | ElementCategory::OptionalHardware
            ) {
                out.push(Finding::new(
                    Code::E_GROUP_CATEGORY,
                    name,
                    format!("group member must be optional, found category {}", element.category.as_str()),
                    locus(),
                ));
            }
            let listed = model.group(group).is_some_and(|g| g.members.iter().any(|m| m == name));
            if !listed {
                out.push(Finding::new(
                    Code::E_GROUP_MEMBERSHIP,
                    name,
                    format!("element claims group {group} but is not listed as a member"),
                    locus(),
                ));
            }
        }
        None if element.required_in_group => out.push(Finding::new(
            Code::E_GROUP_MEMBERSHIP,
            name,
            "required_in_group is set on an element outside any group",
            locus(),
        )),
        None => {}
    }
}

fn check_groups(model: &ComponentModel, out: &mut Vec<Finding>) {
    let mut names = HashSet::new();
    for group in &model.groups {
        let locus = || Locus::Group { name: group.name.clone() };
        if !names.insert(group.name.as_str()) {
            out.push(Finding::new(Code::E_DUPLICATE_GROUP, &group.name, "group declared more than once", locus()));
        }
        if !is_snake_case(&group.name) {
            out.push(Finding::new(Code::E_MALFORMED_NAME, &group.name, "group name is not snake_case", locus()));
        }
        if group.members.is_empty() {
            out.push(Finding::new(Code::E_EMPTY_GROUP, &group.name, "group has no members", locus()));
            continue;
        }
        // Members must be exactly the elements tagged with this group, listed
        // contiguously and in declaration order.
        let positions: Vec<Option<usize>> = group
            .members
            .iter()
            .map(|m| {
                model
                    .elements
                    .iter()
                    .position(|e| &e.name == m && e.group.as_deref() == Some(group.name.as_str()))
            })
            .collect();
        let tagged = model.members_of(&group.name).count();
        let contiguous = positions.iter().all(Option::is_some)
            && positions.windows(2).all(|w| w[1] == w[0].map(|p| p + 1))
            && tagged == group.members.len();
        if !contiguous {
            out.push(Finding::new(
                Code::E_GROUP_MEMBERSHIP,
                &group.name,
                "group members must be the tagged elements, declared contiguously",
                locus(),
            ));
        }
    }
}

/// Per-schema checks shared by models and descriptors: naming, per-section
/// uniqueness, nested reference resolution and constant types.
pub fn check_schema(schema: &Schema, resolves: impl Fn(&str) -> bool) -> Vec<Finding> {
    let mut out = Vec::new();
    let schema_name = schema.name();
    if !is_pascal_case(schema_name) {
        out.push(Finding::new(
            Code::E_MALFORMED_NAME,
            schema_name,
            "schema name is not PascalCase",
            Locus::Schema { name: schema_name.to_string() },
        ));
    }
    for (section, record) in schema.sections() {
        let qualify = |n: &str| if section.is_empty() { n.to_string() } else { format!("{section}.{n}") };
        let mut fields: HashMap<&str, ()> = HashMap::new();
        for field in &record.fields {
            let locus = Locus::Field { schema: schema_name.to_string(), field: qualify(&field.name) };
            let subject = format!("{schema_name}.{}", qualify(&field.name));
            if !is_snake_case(&field.name) {
                out.push(Finding::new(Code::E_MALFORMED_NAME, &subject, "field name is not snake_case", locus.clone()));
            }
            if fields.insert(&field.name, ()).is_some() {
                out.push(Finding::new(Code::E_DUPLICATE_FIELD, &subject, "field declared more than once", locus.clone()));
            }
            if let FieldType::Nested { schema: nested } = &field.field_type {
                if !resolves(nested) {
                    out.push(Finding::new(
                        Code::E_UNRESOLVED_SCHEMA,
                        &subject,
                        format!("nested schema {nested} is not defined"),
                        locus,
                    ));
                }
            }
        }
        let mut constants = HashSet::new();
        for constant in &record.constants {
            let subject = format!("{schema_name}.{}", qualify(&constant.name));
            let locus = Locus::Field { schema: schema_name.to_string(), field: qualify(&constant.name) };
            if !is_upper_snake(&constant.name) {
                out.push(Finding::new(Code::E_MALFORMED_NAME, &subject, "constant name is not UPPER_SNAKE", locus.clone()));
            }
            if !constants.insert(constant.name.as_str()) {
                out.push(Finding::new(
                    Code::E_DUPLICATE_CONSTANT,
                    &subject,
                    "constant declared more than once",
                    locus.clone(),
                ));
            }
            if !constant.ty.accepts(&constant.value) {
                out.push(Finding::new(
                    Code::E_INVALID_VALUE,
                    &subject,
                    format!("value {} does not fit type {}", constant.value, constant.ty),
                    locus,
                ));
            }
        }
    }
    out
}
