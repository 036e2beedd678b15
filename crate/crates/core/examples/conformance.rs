//! Checks the bundled servo descriptors against the rotary servo model and
//! prints each report.
//!
//!     cargo run --example conformance
//!     cargo run --example conformance -- --json path/to/module.hrimd

use std::path::{Path, PathBuf};

use hrim::catalog::builtin_rotary_servo;
use hrim::conformance::check;
use hrim::descriptor::load_descriptor;

fn main() {
    let mut json = false;
    let mut files: Vec<PathBuf> = Vec::new();
    for arg in std::env::args().skip(1) {
        if arg == "--json" {
            json = true;
        } else {
            files.push(arg.into());
        }
    }
    if files.is_empty() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples");
        files = ["servo_vendor_a", "servo_mandatory_only", "servo_missing_power", "servo_partial_temperature"]
            .iter()
            .map(|n| dir.join(format!("{n}.hrimd")))
            .collect();
    }

    let model = builtin_rotary_servo();
    for file in files {
        let descriptor = match load_descriptor(&file) {
            Ok(d) => d,
            Err(e) => {
                eprintln!("{}: {e}", file.display());
                continue;
            }
        };
        let report = check(&descriptor, &model);
        println!("# {} ({})", file.file_name().unwrap().to_string_lossy(), descriptor.identity);
        if json {
            println!("{}", report.to_json());
        } else {
            print!("{}", report.to_text());
        }
    }
}
