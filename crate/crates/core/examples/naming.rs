//! Renders every naming pattern for one servo, then checks a few names
//! passed on the command line.
//!
//!     cargo run --example naming -- topic hrim_actuator_rotary_servo_0001/Goal

use hrim::model::{DeviceKind, HexToken};
use hrim::naming::{parse, render, validate, NameParts, NamePattern};

fn main() {
    let hex = |s| HexToken::parse(s).unwrap();
    let device = NameParts::device(DeviceKind::Actuator, "rotary_servo");
    let samples = [
        (NamePattern::Package, device.clone().vendor(hex("a0b1")).product(hex("c2d3"))),
        (NamePattern::Node, device.clone().instance(hex("0001"))),
        (NamePattern::Topic, device.clone().instance(hex("0001")).topic("goal")),
        (NamePattern::MessageFile, device.clone().message("GoalRotaryServo")),
        (NamePattern::GenericMessageFile, NameParts::default().message("Power")),
        (NamePattern::ServicePath, device.clone().instance(hex("0001")).service("reset")),
        (NamePattern::ServiceFile, device.clone().service("Reset")),
        (NamePattern::ActionFile, device.clone().action("Sweep")),
        (NamePattern::ParameterTag, NameParts::parameter("max_temperature", "float64", "85.0")),
    ];
    for (pattern, parts) in samples {
        let text = render(pattern, &parts).unwrap();
        assert_eq!(parse(pattern, &text).unwrap(), parts);
        println!("{:<22} {text}", pattern.as_str());
    }

    let args: Vec<String> = std::env::args().skip(1).collect();
    for pair in args.chunks(2) {
        let [pattern, text] = pair else { break };
        let Ok(pattern) = pattern.parse::<NamePattern>() else {
            eprintln!("unknown pattern `{pattern}`");
            continue;
        };
        let (ok, findings) = validate(pattern, text);
        println!("{text}: {}", if ok { "ok" } else { "rejected" });
        for f in findings {
            println!("  {f}");
        }
    }
}
