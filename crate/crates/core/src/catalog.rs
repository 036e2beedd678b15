//! Builtin generic message schemas and the reference component models.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::model::{
    common_requirements, ComponentModel, ConstantDef, DeviceKind, Direction, ElementCategory, FieldDef, FieldType,
    InterfaceElement, Literal, Primitive, Record, Schema,
};

/// Names in the `hrim_generic_msgs` namespace.
pub const GENERIC_NAMES: [&str; 5] = ["ID", "Power", "Status", "Simulation3D", "SimulationURDF"];

/// Canonical source of the rotary servomotor model.
pub const ROTARY_SERVO_SOURCE: &str = include_str!("../catalog/rotary_servo.hrim");
/// Canonical source of the camera model.
pub const CAMERA_SOURCE: &str = include_str!("../catalog/camera.hrim");

fn uint8_constants(names: &[&str]) -> Vec<ConstantDef> {
    names
        .iter()
        .enumerate()
        .map(|(i, n)| ConstantDef::new(*n, Primitive::Uint8, Literal::number(i.to_string())))
        .collect()
}

fn string(name: &str) -> FieldDef {
    FieldDef::plain(name, FieldType::primitive(Primitive::String))
}

fn float64(name: &str, unit: &str) -> FieldDef {
    FieldDef::scalar(name, Primitive::Float64, unit)
}

fn build_generics() -> BTreeMap<String, Schema> {
    let id = Record::new(vec![
        FieldDef::scalar("device_kind", Primitive::Uint8, "dimensionless"),
        string("device_name"),
        string("vendor_id"),
        string("product_id"),
        string("instance_id"),
        string("hrim_version"),
    ])
    .with_constants(uint8_constants(&["SENSOR", "ACTUATOR", "COMMUNICATION", "COGNITION", "UI", "POWER"]));

    let power = Record::new(vec![
        float64("voltage", "V"),
        float64("current", "A"),
        float64("power_consumption", "W"),
        FieldDef::scalar("source", Primitive::Uint8, "dimensionless"),
    ])
    .with_constants(uint8_constants(&["SUPPLY", "POE"]));

    let status = Record::new(vec![
        FieldDef::scalar("cpu_usage", Primitive::Float32, "percent"),
        FieldDef::scalar("ram_usage", Primitive::Float32, "percent"),
        float64("uptime", "s"),
    ]);

    let simulation_3d = Record::new(vec![
        string("format"),
        FieldDef::plain("payload", FieldType::unbounded(Primitive::Byte)),
    ]);

    let simulation_urdf = Record::new(vec![
        string("urdf_fragment"),
        FieldDef::plain("mesh_references", FieldType::unbounded(Primitive::String)),
    ]);

    [
        ("ID", id),
        ("Power", power),
        ("Status", status),
        ("Simulation3D", simulation_3d),
        ("SimulationURDF", simulation_urdf),
    ]
    .into_iter()
    .map(|(name, body)| (name.to_string(), Schema::message(name, body)))
    .collect()
}

/// The five generic messages keyed by name.
pub fn builtin_generics() -> &'static BTreeMap<String, Schema> {
    static GENERICS: OnceLock<BTreeMap<String, Schema>> = OnceLock::new();
    GENERICS.get_or_init(build_generics)
}

pub fn generic_schema(name: &str) -> Option<&'static Schema> {
    builtin_generics().get(name)
}

pub fn is_generic(name: &str) -> bool {
    generic_schema(name).is_some()
}

/// Rotary servomotor: a goal topic as device purpose, state and acceleration
/// as additional capabilities, and temperature sensing plus reconfiguration
/// as optional hardware.
pub fn builtin_rotary_servo() -> ComponentModel {
    use ElementCategory::*;

    let mut model = ComponentModel::new(DeviceKind::Actuator, "rotary_servo");
    for element in common_requirements("rotary_servo") {
        model.push(element);
    }
    model.push(InterfaceElement::topic("goal", Direction::Subscribed, "GoalRotaryServo", DevicePurpose));
    model.push(InterfaceElement::topic("state", Direction::Published, "StateRotaryServo", AdditionalCapability));
    model.push(InterfaceElement::topic(
        "acceleration",
        Direction::Subscribed,
        "GoalAcceleration",
        AdditionalCapability,
    ));
    model.push(
        InterfaceElement::topic("temperature", Direction::Published, "Temperature", OptionalHardware)
            .in_group("temperature_sensing", false),
    );
    for (name, default) in [("min_temperature", "0.0"), ("max_temperature", "85.0")] {
        model.push(
            InterfaceElement::parameter(
                name,
                Primitive::Float64,
                Some("celsius"),
                Some(Literal::number(default)),
                OptionalHardware,
            )
            .in_group("temperature_sensing", true),
        );
    }
    model.push(InterfaceElement::topic(
        "reconfiguration",
        Direction::Published,
        "Reconfiguration",
        OptionalHardware,
    ));

    model.schemas = vec![
        Schema::message(
            "SpecsRotaryServo",
            Record::new(vec![
                float64("rated_speed", "rad/s"),
                float64("range_min", "rad"),
                float64("range_max", "rad"),
                float64("max_torque", "N*m"),
                float64("temperature_range_min", "celsius"),
                float64("temperature_range_max", "celsius"),
            ]),
        ),
        Schema::message(
            "GoalRotaryServo",
            Record::new(vec![float64("position", "rad"), float64("velocity", "rad/s"), float64("effort", "N*m")]),
        ),
        Schema::message(
            "StateRotaryServo",
            Record::new(vec![
                FieldDef::plain("goal_reached", FieldType::primitive(Primitive::Bool)),
                float64("position", "rad"),
                float64("velocity", "rad/s"),
                float64("effort", "N*m"),
                FieldDef::scalar("error_code", Primitive::Uint8, "dimensionless"),
            ])
            .with_constants(uint8_constants(&["NO_ERROR", "OVERHEAT", "OVERLOAD", "OUT_OF_RANGE"])),
        ),
        Schema::message("GoalAcceleration", Record::new(vec![float64("acceleration", "rad/s^2")])),
        Schema::message("Temperature", Record::new(vec![float64("temperature", "celsius")])),
        Schema::message("Reconfiguration", Record::new(vec![string("descriptor")])),
    ];
    model
}

/// Camera: an image topic as device purpose, brightness control as an
/// additional capability, and an embedded microphone as optional hardware.
pub fn builtin_camera() -> ComponentModel {
    use ElementCategory::*;

    let mut model = ComponentModel::new(DeviceKind::Sensor, "camera");
    for element in common_requirements("camera") {
        model.push(element);
    }
    model.push(InterfaceElement::topic("image", Direction::Published, "Image", DevicePurpose));
    model.push(InterfaceElement::parameter(
        "brightness",
        Primitive::Float64,
        Some("percent"),
        Some(Literal::number("50.0")),
        AdditionalCapability,
    ));
    model.push(
        InterfaceElement::topic("audio", Direction::Published, "Audio", OptionalHardware).in_group("microphone", false),
    );

    let dimensionless_u32 = |name: &str| FieldDef::scalar(name, Primitive::Uint32, "dimensionless");
    model.schemas = vec![
        Schema::message(
            "SpecsCamera",
            Record::new(vec![
                dimensionless_u32("resolution_width"),
                dimensionless_u32("resolution_height"),
                float64("frame_rate", "Hz"),
                float64("horizontal_fov", "rad"),
            ]),
        ),
        Schema::message(
            "Image",
            Record::new(vec![
                dimensionless_u32("width"),
                dimensionless_u32("height"),
                string("encoding"),
                FieldDef::plain("data", FieldType::unbounded(Primitive::Byte)),
            ]),
        ),
        Schema::message(
            "Audio",
            Record::new(vec![
                FieldDef::scalar("sample_rate", Primitive::Uint32, "Hz"),
                FieldDef::plain("data", FieldType::unbounded(Primitive::Byte)),
            ]),
        ),
    ];
    model
}

/// Names accepted by [`builtin`].
pub fn catalog_names() -> &'static [&'static str] {
    &["camera", "rotary_servo"]
}

pub fn builtin(name: &str) -> Option<ComponentModel> {
    match name {
        "rotary_servo" => Some(builtin_rotary_servo()),
        "camera" => Some(builtin_camera()),
        _ => None,
    }
}
