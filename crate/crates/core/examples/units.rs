//! Parses unit expressions and prints their SI dimension, then shows the
//! unit check catching a bad field.
//!
//!     cargo run --example units -- "kg*m^2/s^2" "rad/s" "furlong"

use hrim::lang::{parse_model, SourceFile};
use hrim::units::{dimension_of, parse_unit};

fn main() {
    let mut args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() {
        args = ["N*m", "rad/s", "W/V", "celsius", "m/s^2"].map(String::from).to_vec();
    }
    for text in &args {
        match parse_unit(text) {
            Ok(unit) => {
                let dim = dimension_of(&unit);
                let note = if dim.is_dimensionless() { " (dimensionless)" } else { "" };
                println!("{text:<14} {:<14} {dim}{note}", unit.to_string());
            }
            Err(e) => println!("{text:<14} error: {e}"),
        }
    }

    // torque and energy share a dimension; only the spelling differs
    let torque = dimension_of(&parse_unit("N*m").unwrap());
    assert_eq!(torque, dimension_of(&parse_unit("J").unwrap()));

    let model = r#"model probe {
  kind: sensor
  @common
  topic reading { obligation: mandatory category: device_purpose direction: published schema: Reading }
  message Reading {
    field value: float64 unit "parsec"
    field label: string unit "m"
    field raw: int32
  }
  message SpecsProbe { }
}
"#;
    let parsed = parse_model(&SourceFile::new("probe.hrim", model));
    for d in parsed.unit_diagnostics() {
        println!("{}", d.render("probe.hrim"));
    }
}
