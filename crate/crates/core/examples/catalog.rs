//! Prints the builtin component models in canonical source form.
//!
//!     cargo run --example catalog -- rotary_servo

use hrim::catalog::{builtin, catalog_names};
use hrim::lang::format_model;

fn main() {
    let wanted: Vec<String> = std::env::args().skip(1).collect();
    for name in catalog_names() {
        if !wanted.is_empty() && !wanted.iter().any(|w| w == name) {
            continue;
        }
        let model = builtin(name).expect("catalog name");
        let mandatory = model.elements.iter().filter(|e| e.obligation.label() == 'M').count();
        eprintln!("{name}: {} elements, {mandatory} mandatory", model.elements.len());
        print!("{}", format_model(&model).expect("builtin models are valid"));
    }
}
