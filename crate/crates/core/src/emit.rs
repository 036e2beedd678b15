//! Interface-definition file generation: `.msg`, `.srv`, `.action` files
//! plus a manifest, laid out in HRIM package directories.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use crate::diag::Finding;
use crate::model::{validate_model, ComponentModel, ElementKind, FieldType, Identity, InterfaceElement, Record, Schema};
use crate::naming::{render, NameParts, NamePattern};
use crate::catalog;

/// Relative path and contents of every generated file, sorted by path.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GeneratedTree {
    pub files: Vec<(String, Vec<u8>)>,
}

impl GeneratedTree {
    pub fn get(&self, path: &str) -> Option<&[u8]> {
        self.files.iter().find(|(p, _)| p == path).map(|(_, b)| b.as_slice())
    }

    pub fn paths(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(|(p, _)| p.as_str())
    }
}

#[derive(Debug, Clone, Default)]
pub struct EmitOptions {
    /// Optional groups left out of the generated interface.
    pub without: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum EmitError {
    #[error("model is invalid ({} finding(s))", .0.len())]
    InvalidModel(Vec<Finding>),
    #[error("an instance id is required to render runtime paths")]
    IdentityRequired,
    #[error("no optional group named `{0}`")]
    UnknownGroup(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0} already exists (use force to overwrite)")]
    WouldOverwrite(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WriteSummary {
    pub files_written: usize,
    pub bytes: usize,
}

pub fn emit(model: &ComponentModel, identity: &Identity) -> Result<GeneratedTree, EmitError> {
    emit_with(model, identity, &EmitOptions::default())
}

fn type_text(ty: &FieldType) -> String {
    match ty {
        FieldType::Nested { schema } if catalog::is_generic(schema) => format!("hrim_generic_msgs/{schema}"),
        other => other.to_string(),
    }
}

fn record_text(out: &mut String, record: &Record) {
    for c in &record.constants {
        let _ = writeln!(out, "{} {}={}", c.ty, c.name, c.value.raw());
    }
    for f in &record.fields {
        let _ = write!(out, "{} {}", type_text(&f.field_type), f.name);
        if let (true, Some(unit)) = (f.field_type.is_numeric(), &f.unit) {
            let _ = write!(out, "  # {unit}");
        }
        out.push('\n');
    }
}

/// File body for a schema: sections separated by `---` lines.
pub fn schema_text(schema: &Schema) -> String {
    let mut out = String::new();
    for (i, (_, record)) in schema.sections().into_iter().enumerate() {
        if i > 0 {
            out.push_str("---\n");
        }
        record_text(&mut out, record);
    }
    out
}

/// Schemas reachable from `roots` through nested fields.
fn reachable<'a>(model: &'a ComponentModel, roots: impl Iterator<Item = &'a str>) -> BTreeSet<String> {
    let mut seen = BTreeSet::new();
    let mut stack: Vec<&str> = roots.collect();
    while let Some(name) = stack.pop() {
        if !seen.insert(name.to_string()) {
            continue;
        }
        if let Some(schema) = model.resolve_schema(name) {
            stack.extend(schema.nested_refs());
        }
    }
    seen
}

fn runtime_path(parts: &NameParts, element: &InterfaceElement) -> String {
    let pattern = match element.kind {
        ElementKind::Service => NamePattern::ServicePath,
        _ => NamePattern::Topic,
    };
    let parts = match element.kind {
        ElementKind::Service => parts.clone().service(&element.name),
        _ => parts.clone().topic(&element.name),
    };
    render(pattern, &parts).expect("validated element names render")
}

pub fn emit_with(model: &ComponentModel, identity: &Identity, options: &EmitOptions) -> Result<GeneratedTree, EmitError> {
    let findings = validate_model(model);
    if findings.iter().any(Finding::is_error) {
        return Err(EmitError::InvalidModel(findings));
    }
    let instance = identity.instance.ok_or(EmitError::IdentityRequired)?;
    for group in &options.without {
        if model.group(group).is_none() {
            return Err(EmitError::UnknownGroup(group.clone()));
        }
    }
    let excluded = |e: &InterfaceElement| e.group.as_ref().is_some_and(|g| options.without.contains(g));
    let included: Vec<&InterfaceElement> = model.elements.iter().filter(|e| !excluded(e)).collect();

    let used = reachable(model, included.iter().filter_map(|e| e.schema.as_deref()));
    let dropped = reachable(model, model.elements.iter().filter(|e| excluded(e)).filter_map(|e| e.schema.as_deref()));

    let device = NameParts::device(model.kind, &model.device_name);
    let mut files: Vec<(String, Vec<u8>)> = Vec::new();

    for schema in &model.schemas {
        let name = schema.name();
        if !used.contains(name) && dropped.contains(name) {
            continue;
        }
        let (pattern, parts) = match schema {
            Schema::Message(_) => (NamePattern::MessageFile, device.clone().message(name)),
            Schema::Service(_) => (NamePattern::ServiceFile, device.clone().service(name)),
            Schema::Action(_) => (NamePattern::ActionFile, device.clone().action(name)),
        };
        let path = render(pattern, &parts).expect("validated schema names render");
        files.push((path, schema_text(schema).into_bytes()));
    }
    for name in used.iter().filter(|n| catalog::is_generic(n)) {
        let schema = catalog::generic_schema(name).expect("generic");
        let path = render(NamePattern::GenericMessageFile, &NameParts::default().message(name)).expect("generic name");
        files.push((path, schema_text(schema).into_bytes()));
    }

    let node = device.clone().instance(instance);
    let package = render(NamePattern::Package, &device.clone().vendor(identity.vendor).product(identity.product))
        .expect("identity tokens are valid");
    let mut manifest = String::new();
    for element in &included {
        let target = match &element.param {
            Some(p) => p.ty.to_string(),
            None => element.schema.clone().unwrap_or_default(),
        };
        let _ = writeln!(
            manifest,
            "{} {} {} {}",
            element.obligation.label(),
            element.kind,
            runtime_path(&node, element),
            target
        );
    }
    files.push((format!("{package}/manifest.txt"), manifest.into_bytes()));

    files.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(GeneratedTree { files })
}

/// Writes every file of `tree` under `out_dir`. Without `force`, nothing is
/// written if any target file already exists.
pub fn write_tree(tree: &GeneratedTree, out_dir: &Path, force: bool) -> Result<WriteSummary, EmitError> {
    if !force {
        if let Some((path, _)) = tree.files.iter().find(|(p, _)| out_dir.join(p).exists()) {
            return Err(EmitError::WouldOverwrite(out_dir.join(path).display().to_string()));
        }
    }
    let mut summary = WriteSummary::default();
    for (path, bytes) in &tree.files {
        let target = out_dir.join(path);
        let io = |source| EmitError::Io { path: target.display().to_string(), source };
        if let Some(parent) = target.parent() {
            std::fs::create_dir_all(parent).map_err(io)?;
        }
        std::fs::write(&target, bytes).map_err(io)?;
        summary.files_written += 1;
        summary.bytes += bytes.len();
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{builtin_camera, builtin_rotary_servo};
    use crate::model::{ElementCategory, FieldDef, Primitive, ServiceSchema, ActionSchema};
    use crate::naming::validate;

    fn identity() -> Identity {
        Identity::parse("a0b1", "c2d3", Some("0001")).unwrap()
    }

    fn text(tree: &GeneratedTree, path: &str) -> String {
        String::from_utf8(tree.get(path).unwrap_or_else(|| panic!("{path} missing")).to_vec()).unwrap()
    }

    #[test]
    fn goal_message_body() {
        let tree = emit(&builtin_rotary_servo(), &identity()).unwrap();
        assert_eq!(
            text(&tree, "hrim_actuator_rotary_servo_msgs/msg/GoalRotaryServo.msg"),
            "float64 position  # rad\nfloat64 velocity  # rad/s\nfloat64 effort  # N*m\n"
        );
        assert!(tree.get("hrim_generic_msgs/msg/ID.msg").is_some());
    }

    #[test]
    fn constants_come_first() {
        let tree = emit(&builtin_rotary_servo(), &identity()).unwrap();
        let power = text(&tree, "hrim_generic_msgs/msg/Power.msg");
        assert!(power.starts_with("uint8 SUPPLY=0\nuint8 POE=1\nfloat64 voltage  # V\n"), "{power}");
        let sim = text(&tree, "hrim_generic_msgs/msg/Simulation3D.msg");
        assert_eq!(sim, "string format\nbyte[] payload\n");
    }

    #[test]
    fn manifest_lists_every_element() {
        let tree = emit(&builtin_rotary_servo(), &identity()).unwrap();
        let manifest = text(&tree, "hrim_actuator_rotary_servo_a0b1_c2d3/manifest.txt");
        let lines: Vec<&str> = manifest.lines().collect();
        assert_eq!(lines.len(), 13);
        assert_eq!(lines[0], "M topic hrim_actuator_rotary_servo_0001/id ID");
        assert!(lines.contains(&"O parameter hrim_actuator_rotary_servo_0001/max_temperature float64"));
    }

    #[test]
    fn paths_are_sorted_and_valid() {
        let tree = emit(&builtin_camera(), &identity()).unwrap();
        let paths: Vec<&str> = tree.paths().collect();
        let mut sorted = paths.clone();
        sorted.sort();
        assert_eq!(paths, sorted);
        for path in paths {
            let ok = path.ends_with("manifest.txt")
                || validate(NamePattern::MessageFile, path).0
                || validate(NamePattern::GenericMessageFile, path).0;
            assert!(ok, "{path}");
        }
    }

    #[test]
    fn group_exclusion() {
        let camera = builtin_camera();
        let full = emit(&camera, &identity()).unwrap();
        let without = emit_with(&camera, &identity(), &EmitOptions { without: vec!["microphone".into()] }).unwrap();
        let manifest = |t: &GeneratedTree| text(t, "hrim_sensor_camera_a0b1_c2d3/manifest.txt");
        assert!(manifest(&full).contains("/audio "));
        assert!(!manifest(&without).contains("/audio "));
        assert!(without.get("hrim_sensor_camera_msgs/msg/Audio.msg").is_none());
        assert!(matches!(
            emit_with(&camera, &identity(), &EmitOptions { without: vec!["nope".into()] }),
            Err(EmitError::UnknownGroup(_))
        ));
    }

    #[test]
    fn identity_required() {
        let id = Identity::parse("a0b1", "c2d3", None).unwrap();
        assert!(matches!(emit(&builtin_camera(), &id), Err(EmitError::IdentityRequired)));
    }

    #[test]
    fn services_and_actions() {
        let mut model = builtin_camera();
        model.push(crate::model::InterfaceElement::service("calibrate", "Calibrate", ElementCategory::AdditionalCapability));
        model.push(crate::model::InterfaceElement::action("sweep", "Sweep", ElementCategory::AdditionalCapability));
        model.schemas.push(Schema::Service(ServiceSchema {
            name: "Calibrate".into(),
            request: Record::new(vec![FieldDef::scalar("exposure", Primitive::Float64, "s")]),
            response: Record::new(vec![FieldDef::plain("ok", FieldType::primitive(Primitive::Bool))]),
        }));
        model.schemas.push(Schema::Action(ActionSchema {
            name: "Sweep".into(),
            goal: Record::new(vec![FieldDef::scalar("angle", Primitive::Float64, "rad")]),
            result: Record::default(),
            feedback: Record::new(vec![FieldDef::plain("status", FieldType::nested("Status"))]),
        }));
        let tree = emit(&model, &identity()).unwrap();
        assert_eq!(text(&tree, "hrim_sensor_camera_srvs/srv/Calibrate.srv"), "float64 exposure  # s\n---\nbool ok\n");
        assert_eq!(
            text(&tree, "hrim_sensor_camera_action/Sweep.action"),
            "float64 angle  # rad\n---\n---\nhrim_generic_msgs/Status status\n"
        );
        let manifest = text(&tree, "hrim_sensor_camera_a0b1_c2d3/manifest.txt");
        assert!(manifest.contains("O service hrim_sensor_camera_0001/calibrate Calibrate\n"));
    }

    #[test]
    fn write_tree_guard_and_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        assert_eq!(write_tree(&GeneratedTree::default(), dir.path(), false).unwrap(), WriteSummary::default());
        let tree = emit(&builtin_rotary_servo(), &identity()).unwrap();
        let summary = write_tree(&tree, dir.path(), false).unwrap();
        assert_eq!(summary.files_written, tree.files.len());
        for (path, bytes) in &tree.files {
            assert_eq!(&std::fs::read(dir.path().join(path)).unwrap(), bytes);
        }
        assert!(matches!(write_tree(&tree, dir.path(), false), Err(EmitError::WouldOverwrite(_))));
        assert!(write_tree(&tree, dir.path(), true).is_ok());
    }
}
