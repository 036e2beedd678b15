//! Drives the virtual-time bus directly: two servos, an id request and a
//! probe of the simulation topics. Prints the trace.
//!
//!     cargo run --example simulate -- 7

use hrim::catalog::builtin_rotary_servo;
use hrim::model::{HexToken, Identity};
use hrim::simbus::{trace_text, Bus, SimConfig};

fn main() {
    let seed = std::env::args().nth(1).map_or(0, |s| s.parse().expect("numeric seed"));
    let model = builtin_rotary_servo();
    let mut bus = Bus::new(SimConfig::with_seed(seed)).unwrap();
    let first = Identity::parse("a0b1", "c2d3", Some("0001")).unwrap();
    let second = Identity::parse("ffee", "0c0d", Some("0002")).unwrap();
    bus.spawn(&model, first).unwrap();
    bus.spawn(&model, second).unwrap();

    let mut records = bus.advance(6);
    bus.request_id(HexToken::parse("0001").unwrap()).unwrap();
    records.extend(bus.advance(13));
    bus.probe(HexToken::parse("0002").unwrap(), Some("simulationurdf")).unwrap();
    records.extend(bus.advance(11));

    print!("{}", trace_text(&records));
    if let Some(id) = records.iter().find(|r| r.path.ends_with("/id")) {
        eprintln!("id answered at tick {}:", id.tick);
        for (field, value) in &id.payload {
            eprintln!("  {field} = {value}");
        }
    }
}
