// Random generators shared by the integration tests. Everything is driven by
// a seeded StdRng so failures reproduce.

#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

use hrim::model::{
    common_requirements, specs_schema_name, ActionSchema, ComponentModel, ConstantDef, DeviceKind, Direction,
    ElementCategory, ElementKind, FieldDef, FieldType, HexToken, InterfaceElement, Literal, Primitive, Record, Schema,
    ServiceSchema, COMMON_TOPICS,
};
use hrim::naming::{NameParts, NamePattern};

pub const WORDS: &[&str] = &[
    "arm", "base", "joint", "lidar", "gripper", "x", "a1", "link", "topic", "field", "unit", "group", "model", "kind",
    "goal", "torque", "v2", "imu", "z9", "rate",
];

pub fn snake(rng: &mut StdRng, max_parts: usize) -> String {
    let n = rng.gen_range(1..=max_parts);
    (0..n).map(|_| *WORDS.choose(rng).unwrap()).collect::<Vec<_>>().join("_")
}

pub fn pascal(rng: &mut StdRng) -> String {
    let n = rng.gen_range(1..=3);
    (0..n)
        .map(|_| {
            let w = WORDS.choose(rng).unwrap();
            w[..1].to_uppercase() + &w[1..]
        })
        .collect()
}

pub fn upper(rng: &mut StdRng) -> String {
    snake(rng, 3).to_uppercase()
}

pub fn hex(rng: &mut StdRng) -> HexToken {
    HexToken::from_u16(rng.gen())
}

pub fn kind(rng: &mut StdRng) -> DeviceKind {
    *DeviceKind::ALL.choose(rng).unwrap()
}

/// Parts for `pattern` with every placeholder the pattern needs.
pub fn name_parts(rng: &mut StdRng, pattern: NamePattern) -> NameParts {
    let device = NameParts::device(kind(rng), &snake(rng, 3));
    match pattern {
        NamePattern::Package => device.vendor(hex(rng)).product(hex(rng)),
        NamePattern::Node => device.instance(hex(rng)),
        NamePattern::Topic => device.instance(hex(rng)).topic(&snake(rng, 3)),
        NamePattern::MessageFile => device.message(&pascal(rng)),
        NamePattern::GenericMessageFile => NameParts::default().message(&pascal(rng)),
        NamePattern::ServicePath => device.instance(hex(rng)).service(&snake(rng, 3)),
        NamePattern::ServiceFile => device.service(&pascal(rng)),
        NamePattern::ActionFile => device.action(&pascal(rng)),
        NamePattern::ParameterTag => {
            let ty = Primitive::ALL.choose(rng).unwrap().as_str();
            let values = ["85.0", "0", "-3", "true", "1e-3", "a_b", "v1.2+x"];
            NameParts::parameter(&snake(rng, 3), ty, values.choose(rng).unwrap())
        }
    }
}

const UNITS: &[&str] = &["m", "rad/s", "N*m", "kg*m^2", "celsius", "percent", "V", "A", "W", "Hz", "m/s^2", "dimensionless"];

fn literal_for(rng: &mut StdRng, ty: Primitive) -> Literal {
    match ty {
        Primitive::Bool => Literal::Bool(rng.gen()),
        Primitive::String => {
            let samples = ["", "plain", "with \"quotes\"", "back\\slash", "tab\tand #hash"];
            Literal::Str(samples.choose(rng).unwrap().to_string())
        }
        t if t.is_float() => {
            let choices = [format!("{}.{}", rng.gen_range(-50..50), rng.gen_range(0..100)), "1e3".into(), "-2.5E-2".into()];
            Literal::number(choices.choose(rng).unwrap().clone())
        }
        Primitive::Int8 | Primitive::Int16 | Primitive::Int32 | Primitive::Int64 => {
            Literal::number(rng.gen_range(-100..100).to_string())
        }
        _ => Literal::number(rng.gen_range(0..200).to_string()),
    }
}

fn field(rng: &mut StdRng, name: String, nested: &[String]) -> FieldDef {
    let roll = rng.gen_range(0..10);
    if roll == 0 && !nested.is_empty() {
        return FieldDef::plain(name, FieldType::nested(nested.choose(rng).unwrap().clone()));
    }
    let ty = *Primitive::ALL.choose(rng).unwrap();
    let field_type = match rng.gen_range(0..5) {
        0 => FieldType::unbounded(ty),
        1 => FieldType::Array { elem: ty, len: Some(rng.gen_range(1..9)) },
        _ => FieldType::primitive(ty),
    };
    let unit = field_type.is_numeric().then(|| UNITS.choose(rng).unwrap().to_string());
    FieldDef { name, field_type, unit }
}

fn record(rng: &mut StdRng, nested: &[String]) -> Record {
    let mut fields: Vec<FieldDef> = Vec::new();
    for _ in 0..rng.gen_range(0..5) {
        let name = snake(rng, 2);
        if fields.iter().all(|f| f.name != name) {
            fields.push(field(rng, name, nested));
        }
    }
    let mut constants: Vec<ConstantDef> = Vec::new();
    for _ in 0..rng.gen_range(0..3) {
        let name = upper(rng);
        if constants.iter().all(|c| c.name != name) {
            let ty = *Primitive::ALL.choose(rng).unwrap();
            let value = literal_for(rng, ty);
            constants.push(ConstantDef::new(name, ty, value));
        }
    }
    Record { fields, constants }
}

/// A random model that passes validation. Covers every element kind,
/// groups, nested and generic references, arrays, constants and defaults.
pub fn model(rng: &mut StdRng) -> ComponentModel {
    let device = snake(rng, 3);
    let mut model = ComponentModel::new(kind(rng), &device);
    let mut names: Vec<String> = COMMON_TOPICS.iter().map(|s| s.to_string()).collect();
    let mut schema_names: Vec<String> = vec![specs_schema_name(&device)];
    let fresh_schema = |rng: &mut StdRng, taken: &mut Vec<String>| loop {
        let name = pascal(rng);
        if !taken.contains(&name) && !hrim::catalog::is_generic(&name) {
            taken.push(name.clone());
            return name;
        }
    };
    let mut fresh_element = |rng: &mut StdRng| loop {
        let name = snake(rng, 2);
        if !names.contains(&name) {
            names.push(name.clone());
            return name;
        }
    };

    let mut elements = Vec::new();
    let mut wanted: Vec<(String, ElementKind)> = Vec::new();

    // at least one device-purpose element that is not a parameter
    let purpose_schema = fresh_schema(rng, &mut schema_names);
    wanted.push((purpose_schema.clone(), ElementKind::Topic));
    let purpose_name = fresh_element(rng);
    elements.push(vec![InterfaceElement::topic(&purpose_name, Direction::Subscribed, &purpose_schema, ElementCategory::DevicePurpose)]);

    let mut make = |rng: &mut StdRng, category: ElementCategory, wanted: &mut Vec<(String, ElementKind)>, schema_names: &mut Vec<String>| {
        let name = fresh_element(rng);
        match rng.gen_range(0..4) {
            0 => {
                let ty = *Primitive::ALL.choose(rng).unwrap();
                let unit = (ty.is_numeric() || rng.gen_bool(0.1)).then(|| *UNITS.choose(rng).unwrap());
                let default = rng.gen_bool(0.6).then(|| literal_for(rng, ty));
                InterfaceElement::parameter(&name, ty, unit, default, category)
            }
            k => {
                let (kind, schema) = if rng.gen_bool(0.2) && k == 1 {
                    (ElementKind::Topic, hrim::catalog::GENERIC_NAMES.choose(rng).unwrap().to_string())
                } else {
                    let kind = [ElementKind::Topic, ElementKind::Service, ElementKind::Action][k - 1];
                    let schema = fresh_schema(rng, schema_names);
                    wanted.push((schema.clone(), kind));
                    (kind, schema)
                };
                match kind {
                    ElementKind::Topic => {
                        let dir = if rng.gen() { Direction::Published } else { Direction::Subscribed };
                        InterfaceElement::topic(&name, dir, &schema, category)
                    }
                    ElementKind::Service => InterfaceElement::service(&name, &schema, category),
                    _ => InterfaceElement::action(&name, &schema, category),
                }
            }
        }
    };

    for _ in 0..rng.gen_range(0..6) {
        let category = *[ElementCategory::DevicePurpose, ElementCategory::AdditionalCapability, ElementCategory::OptionalHardware]
            .choose(rng)
            .unwrap();
        elements.push(vec![make(rng, category, &mut wanted, &mut schema_names)]);
    }
    let mut group_names: Vec<String> = Vec::new();
    for _ in 0..rng.gen_range(0..3) {
        let group = snake(rng, 2);
        if group_names.contains(&group) {
            continue;
        }
        group_names.push(group.clone());
        let mut members = Vec::new();
        for _ in 0..rng.gen_range(1..4) {
            let category = *[ElementCategory::AdditionalCapability, ElementCategory::OptionalHardware].choose(rng).unwrap();
            let required = rng.gen_bool(0.4);
            members.push(make(rng, category, &mut wanted, &mut schema_names).in_group(&group, required));
        }
        elements.push(members);
    }
    elements.shuffle(rng);
    let common_at = rng.gen_range(0..=elements.len());
    elements.insert(common_at, common_requirements(&device));
    for element in elements.into_iter().flatten() {
        model.push(element);
    }

    // schemas: messages first so later schemas can nest them
    let mut messages: Vec<String> = hrim::catalog::GENERIC_NAMES.iter().map(|s| s.to_string()).collect();
    let mut schemas = vec![Schema::message(specs_schema_name(&device), record(rng, &messages))];
    messages.push(specs_schema_name(&device));
    wanted.sort_by_key(|(_, k)| *k != ElementKind::Topic);
    for (name, kind) in wanted {
        let schema = match kind {
            ElementKind::Topic => Schema::message(name.clone(), record(rng, &messages)),
            ElementKind::Service => Schema::Service(ServiceSchema {
                name: name.clone(),
                request: record(rng, &messages),
                response: record(rng, &messages),
            }),
            _ => Schema::Action(ActionSchema {
                name: name.clone(),
                goal: record(rng, &messages),
                result: record(rng, &messages),
                feedback: record(rng, &messages),
            }),
        };
        if kind == ElementKind::Topic {
            messages.push(name);
        }
        schemas.push(schema);
    }
    schemas.shuffle(rng);
    model.schemas = schemas;
    model
}
