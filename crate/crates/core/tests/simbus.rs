mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use hrim::catalog::builtin_rotary_servo;
use hrim::model::{Direction, ElementKind, HexToken, Identity};
use hrim::simbus::{trace_text, Bus, SimConfig, SimError};

fn identity(instance: u16) -> Identity {
    Identity::new(HexToken::from_u16(0xa0b1), HexToken::from_u16(0xc2d3), Some(HexToken::from_u16(instance)))
}

fn topic_of(path: &str) -> &str {
    path.rsplit('/').next().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn continuous_topics_fire_at_their_rate(
        common_rate in 1u64..20,
        default_rate in 1u64..20,
        state_rate in prop::option::of(1u64..20),
        ticks in 0u64..200,
    ) {
        let mut rates = BTreeMap::new();
        if let Some(r) = state_rate {
            rates.insert("state".to_string(), r);
        }
        let config = SimConfig { seed: 0, common_rate, default_rate, rates };
        let mut bus = Bus::new(config).unwrap();
        bus.spawn(&builtin_rotary_servo(), identity(1)).unwrap();
        let records = bus.advance(ticks);
        let mut counts: BTreeMap<&str, Vec<u64>> = BTreeMap::new();
        for r in &records {
            counts.entry(topic_of(&r.path)).or_default().push(r.tick);
        }
        let expect = |rate: u64| (1..=ticks).filter(|t| t % rate == 0).collect::<Vec<_>>();
        let got = |topic: &str| counts.get(topic).cloned().unwrap_or_default();
        prop_assert_eq!(got("power"), expect(common_rate));
        prop_assert_eq!(got("status"), expect(common_rate));
        prop_assert_eq!(got("state"), expect(state_rate.unwrap_or(default_rate)));
        prop_assert_eq!(got("temperature"), expect(default_rate));
        for quiet in ["id", "simulation3d", "simulationurdf"] {
            prop_assert!(got(quiet).is_empty(), "{} published", quiet);
        }
        prop_assert_eq!(bus.now(), ticks);
    }

    #[test]
    fn subscribed_topics_are_never_published(seed: u64, ticks in 1u64..120) {
        let mut rng = StdRng::seed_from_u64(seed);
        let model = common::model(&mut rng);
        let subscribed: Vec<&str> = model
            .elements
            .iter()
            .filter(|e| e.kind == ElementKind::Topic && e.direction == Some(Direction::Subscribed))
            .map(|e| e.name.as_str())
            .collect();
        let mut bus = Bus::new(SimConfig::with_seed(seed)).unwrap();
        bus.spawn(&model, identity(1)).unwrap();
        bus.request_id(HexToken::from_u16(1)).unwrap();
        bus.probe(HexToken::from_u16(1), None).unwrap();
        let records = bus.advance(ticks);
        for r in &records {
            prop_assert!(!subscribed.contains(&topic_of(&r.path)), "{} published", r.path);
        }
        prop_assert_eq!(records.iter().filter(|r| topic_of(&r.path) == "id").count(), 1);
    }

    #[test]
    fn same_seed_same_trace(seed: u64, ticks in 1u64..80) {
        let run = || {
            let mut bus = Bus::new(SimConfig::with_seed(seed)).unwrap();
            bus.spawn(&builtin_rotary_servo(), identity(1)).unwrap();
            bus.spawn(&builtin_rotary_servo(), identity(2)).unwrap();
            bus.probe(HexToken::from_u16(2), Some("simulation3d")).unwrap();
            trace_text(&bus.advance(ticks))
        };
        prop_assert_eq!(run(), run());
    }
}

#[test]
fn subscriptions_count_deliveries_from_other_modules() {
    let model = builtin_rotary_servo();
    let mut bus = Bus::new(SimConfig::default()).unwrap();
    bus.spawn(&model, identity(1)).unwrap();
    bus.spawn(&model, identity(2)).unwrap();
    bus.advance(100);
    // goal is subscribed and nobody publishes it
    assert_eq!(bus.delivered(HexToken::from_u16(1)).unwrap(), 0);
}

#[test]
fn bus_errors() {
    let model = builtin_rotary_servo();
    let mut bus = Bus::new(SimConfig::default()).unwrap();
    bus.spawn(&model, identity(1)).unwrap();
    assert_eq!(bus.spawn(&model, identity(1)), Err(SimError::DuplicateIdentity(HexToken::from_u16(1))));
    let no_instance = Identity { instance: None, ..identity(1) };
    assert_eq!(bus.spawn(&model, no_instance), Err(SimError::IdentityRequired));
    assert_eq!(bus.request_id(HexToken::from_u16(9)), Err(SimError::UnknownInstance(HexToken::from_u16(9))));
    assert!(matches!(bus.probe(HexToken::from_u16(1), Some("power")), Err(SimError::NotConsumerGated { .. })));
    let config = SimConfig { rates: BTreeMap::from([("state".into(), 0)]), ..SimConfig::default() };
    assert_eq!(Bus::new(config).err(), Some(SimError::ZeroRate("state".into())));
}
