//! Swaps one vendor's servo for another's: first the static verdict, then a
//! replay on the bus whose traces must match once identity is erased.
//!
//!     cargo run --example swap

use std::path::Path;

use hrim::catalog::builtin_rotary_servo;
use hrim::conformance::interchangeable;
use hrim::descriptor::load_descriptor;
use hrim::simbus::{default_swap_steps, swap_and_verify, SimConfig};

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples");
    let load = |name: &str| load_descriptor(&dir.join(name)).expect("bundled descriptor");
    let model = builtin_rotary_servo();
    let a = load("servo_vendor_a.hrimd");
    let b = load("servo_vendor_b.hrimd");
    let lean = load("servo_mandatory_only.hrimd");

    for (label, other) in [("vendor b", &b), ("mandatory-only", &lean)] {
        let verdict = interchangeable(&a, other, &model);
        println!("vendor a <-> {label}: {} ({})", verdict.interchangeable, verdict.explanation);
    }

    let outcome = swap_and_verify(&default_swap_steps(), &a, &b, &model, &SimConfig::default()).unwrap();
    println!("replay: {} records, identical after erasure: {}", outcome.trace_a.len(), outcome.identical);
    for line in outcome.trace_a.iter().take(5) {
        println!("  {line}");
    }
}
