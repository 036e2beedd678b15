//! Generates the interface files for the rotary servo and either lists them
//! or writes them under a directory.
//!
//!     cargo run --example generate -- /tmp/servo_out

use hrim::catalog::builtin_rotary_servo;
use hrim::emit::{emit_with, write_tree, EmitOptions};
use hrim::model::Identity;

fn main() {
    let identity = Identity::parse("a0b1", "c2d3", Some("0001")).unwrap();
    let model = builtin_rotary_servo();

    let full = emit_with(&model, &identity, &EmitOptions::default()).unwrap();
    let lean = emit_with(&model, &identity, &EmitOptions { without: vec!["temperature_sensing".into()] }).unwrap();
    println!("{} files, {} without temperature_sensing", full.files.len(), lean.files.len());

    match std::env::args().nth(1) {
        Some(dir) => {
            let summary = write_tree(&full, dir.as_ref(), true).expect("writable output directory");
            println!("wrote {} files ({} bytes) to {dir}", summary.files_written, summary.bytes);
        }
        None => {
            for (path, body) in &full.files {
                println!("== {path}");
                print!("{}", String::from_utf8_lossy(body));
            }
        }
    }
}
