//! Parses a model, prints its diagnostics with positions, and prints the
//! canonical form when it is valid. Without an argument a small inline
//! model is used, including one deliberate mistake.
//!
//!     cargo run --example parse_format -- crates/core/catalog/camera.hrim

use hrim::lang::{format_model, parse_model, SourceFile};

const SAMPLE: &str = r#"
model gripper {
  kind: actuator
  @common
  topic goal { direction: subscribed  schema: GoalGripper  obligation: mandatory  category: device_purpose }
  topic state { direction: published schema: StateGripper obligation: optional category: additional_capability }
  message GoalGripper { field width: float64 unit "m" }
  message StateGripper { field width: float64 unit "m"  field holding: bool }
  message SpecsGripper { field max_width: float64 unit "m" }
}
"#;

fn main() {
    let source = match std::env::args().nth(1) {
        Some(path) => SourceFile::read(path.as_ref()).expect("readable model file"),
        None => SourceFile::new("<sample>", SAMPLE),
    };
    let parsed = parse_model(&source);
    let mut diags = parsed.diagnostics.clone();
    if !parsed.has_errors() {
        diags.extend(parsed.unit_diagnostics());
    }
    for d in &diags {
        eprintln!("{}", d.render(source.path()));
    }
    if let Some(model) = parsed.valid_model() {
        print!("{}", format_model(model).expect("valid model formats"));
    }

    // a topic without a direction is reported at the element
    let broken = SAMPLE.replace("direction: subscribed  ", "");
    for d in parse_model(&SourceFile::new("<broken>", &broken)).diagnostics {
        eprintln!("{}", d.render("<broken>"));
    }
}
