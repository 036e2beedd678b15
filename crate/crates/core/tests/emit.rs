mod common;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use hrim::catalog::builtin_rotary_servo;
use hrim::emit::{emit, emit_with, schema_text, write_tree, EmitError, EmitOptions};
use hrim::model::{ConstantDef, FieldDef, FieldType, Identity, Literal, Primitive, Record, Schema};

fn identity() -> Identity {
    Identity::parse("a0b1", "c2d3", Some("0001")).unwrap()
}

/// A small reader for the interface file format, written against the file
/// layout alone: constants are `<type> <NAME>=<raw>`, fields are
/// `<type> <name>` with an optional `  # <unit>`, sections split on `---`.
fn read_msg(text: &str) -> Vec<Record> {
    let mut sections = vec![Record::default()];
    for line in text.lines() {
        if line == "---" {
            sections.push(Record::default());
            continue;
        }
        let record = sections.last_mut().unwrap();
        let (ty, rest) = line.split_once(' ').expect("type and name");
        let name_end = rest.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_')).unwrap_or(rest.len());
        if rest[name_end..].starts_with('=') {
            let prim: Primitive = ty.parse().unwrap();
            let raw = &rest[name_end + 1..];
            let value = match prim {
                Primitive::String => Literal::Str(raw.to_string()),
                Primitive::Bool => Literal::Bool(raw.parse().unwrap()),
                _ => Literal::number(raw),
            };
            record.constants.push(ConstantDef::new(&rest[..name_end], prim, value));
            continue;
        }
        let (name, unit) = match rest.split_once("  # ") {
            Some((n, u)) => (n, Some(u)),
            None => (rest, None),
        };
        let field_type = if let Some(open) = ty.find('[') {
            let elem: Primitive = ty[..open].parse().unwrap();
            let len = &ty[open + 1..ty.len() - 1];
            FieldType::Array { elem, len: (!len.is_empty()).then(|| len.parse().unwrap()) }
        } else if let Ok(prim) = ty.parse::<Primitive>() {
            FieldType::primitive(prim)
        } else {
            FieldType::nested(ty.strip_prefix("hrim_generic_msgs/").unwrap_or(ty))
        };
        record.fields.push(FieldDef::new(name, field_type, unit));
    }
    sections
}

fn owned(schema: &Schema) -> Vec<Record> {
    schema.sections().into_iter().map(|(_, r)| r.clone()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn msg_files_read_back_to_their_schema(seed: u64) {
        let model = common::model(&mut StdRng::seed_from_u64(seed));
        for schema in &model.schemas {
            prop_assert_eq!(read_msg(&schema_text(schema)), owned(schema), "{}", schema_text(schema));
        }
    }

    #[test]
    fn emission_is_deterministic_and_sorted(seed: u64) {
        let model = common::model(&mut StdRng::seed_from_u64(seed));
        let a = emit(&model, &identity()).unwrap();
        let b = emit(&model, &identity()).unwrap();
        prop_assert_eq!(&a, &b);
        let paths: Vec<&str> = a.paths().collect();
        let mut sorted = paths.clone();
        sorted.sort();
        prop_assert_eq!(paths, sorted);
        for (path, body) in &a.files {
            let text = std::str::from_utf8(body).unwrap();
            prop_assert!(text.is_empty() || text.ends_with('\n'), "{}", path);
        }
    }
}

#[test]
fn catalog_files_match_golden() {
    let golden = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("catalog/golden/rotary_servo");
    let tree = emit(&builtin_rotary_servo(), &identity()).unwrap();
    for (path, body) in &tree.files {
        assert_eq!(&std::fs::read(golden.join(path)).unwrap(), body, "{path}");
    }
    assert_eq!(tree.files.len(), 12);
}

#[test]
fn excluded_group_drops_its_files() {
    let model = builtin_rotary_servo();
    let options = EmitOptions { without: vec!["temperature_sensing".into()] };
    let tree = emit_with(&model, &identity(), &options).unwrap();
    let full = emit(&model, &identity()).unwrap();
    let manifest = |t: &hrim::emit::GeneratedTree| {
        String::from_utf8(t.get("hrim_actuator_rotary_servo_a0b1_c2d3/manifest.txt").unwrap().to_vec()).unwrap()
    };
    assert!(!manifest(&tree).contains("_temperature "));
    // the temperature topic and its two limit parameters
    assert_eq!(manifest(&full).lines().count(), manifest(&tree).lines().count() + 3);
    assert!(tree.get("hrim_actuator_rotary_servo_msgs/msg/Temperature.msg").is_none());
    assert_eq!(tree.files.len(), full.files.len() - 1);
    let bad = EmitOptions { without: vec!["nope".into()] };
    assert!(matches!(emit_with(&model, &identity(), &bad), Err(EmitError::UnknownGroup(g)) if g == "nope"));
}

#[test]
fn emission_needs_an_instance() {
    let identity = Identity { instance: None, ..identity() };
    assert!(matches!(emit(&builtin_rotary_servo(), &identity), Err(EmitError::IdentityRequired)));
}

#[test]
fn write_tree_guards_existing_files() {
    let dir = tempfile::tempdir().unwrap();
    let tree = emit(&builtin_rotary_servo(), &identity()).unwrap();
    let summary = write_tree(&tree, dir.path(), false).unwrap();
    assert_eq!(summary.files_written, 12);
    assert!(matches!(write_tree(&tree, dir.path(), false), Err(EmitError::WouldOverwrite(_))));
    assert_eq!(write_tree(&tree, dir.path(), true).unwrap(), summary);
}
