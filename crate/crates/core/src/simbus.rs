//! A deterministic publish/subscribe bus on virtual time.
//!
//! One tick stands for 10 ms. Nothing here reads the wall clock: a run is a
//! pure function of the seed and the sequence of spawns, probes, requests
//! and advances.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;
use std::hash::Hasher;

use fnv::FnvHasher;

use crate::conformance::interchangeable;
use crate::descriptor::ModuleDescriptor;
use crate::diag::Finding;
use crate::model::{
    validate_model, ComponentModel, Direction, ElementKind, FieldType, HexToken, Identity, Primitive, Schema,
};
use crate::naming::{render, NameParts, NamePattern};

/// How a published topic decides when to emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Policy {
    /// Once per request on `<node>/id/request`.
    OnRequest,
    /// Whenever `tick % rate == 0`.
    Continuous(u64),
    /// Once per consumer attachment.
    ConsumerGated,
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub seed: u64,
    /// Rate of `power` and `status`.
    pub common_rate: u64,
    /// Rate of every other published topic unless overridden.
    pub default_rate: u64,
    /// Per-topic rate overrides, keyed by topic name.
    pub rates: BTreeMap<String, u64>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig { seed: 0, common_rate: 10, default_rate: 5, rates: BTreeMap::new() }
    }
}

impl SimConfig {
    pub fn with_seed(seed: u64) -> Self {
        SimConfig { seed, ..SimConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SimError {
    #[error("instance {0} is already on the bus")]
    DuplicateIdentity(HexToken),
    #[error("model is invalid ({} finding(s))", .0.len())]
    InvalidModel(Vec<Finding>),
    #[error("a spawned module needs an instance id")]
    IdentityRequired,
    #[error("no module with instance {0}")]
    UnknownInstance(HexToken),
    #[error("module {instance} has no consumer-gated topic `{topic}`")]
    NotConsumerGated { instance: HexToken, topic: String },
    #[error("rate for `{0}` must be positive")]
    ZeroRate(String),
    #[error("modules are not interchangeable: {0}")]
    NotInterchangeable(String),
    #[error("line {line}: {message}")]
    Script { line: usize, message: String },
}

/// One publication.
#[derive(Debug, Clone, PartialEq)]
pub struct BusRecord {
    pub tick: u64,
    pub path: String,
    /// Spawn index of the publishing module.
    pub publisher: usize,
    /// Per-module publication sequence number.
    pub seq: u64,
    pub schema: String,
    /// Flattened `field.path = value` pairs in schema order.
    pub payload: Vec<(String, String)>,
}

impl BusRecord {
    /// FNV-1a over the canonical payload text.
    pub fn payload_hash(&self) -> u64 {
        let mut h = FnvHasher::default();
        for (k, v) in &self.payload {
            h.write(k.as_bytes());
            h.write(b"=");
            h.write(v.as_bytes());
            h.write(b"\n");
        }
        h.finish()
    }

    /// `<tick> <path> <schema> <payload-hash>`.
    pub fn trace_line(&self) -> String {
        format!("{} {} {} {:016x}", self.tick, self.path, self.schema, self.payload_hash())
    }
}

pub fn trace_text(records: &[BusRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let _ = writeln!(out, "{}", r.trace_line());
    }
    out
}

#[derive(Debug, Clone)]
struct TopicState {
    name: String,
    path: String,
    schema: String,
    policy: Policy,
    /// Records emitted on this topic so far.
    seq: u64,
}

#[derive(Debug, Clone)]
enum Pending {
    Request,
    Consumer(usize),
}

#[derive(Debug, Clone)]
struct SimModule {
    model: ComponentModel,
    identity: Identity,
    node: String,
    topics: Vec<TopicState>,
    /// Subscribed topic paths.
    sinks: Vec<String>,
    delivered: u64,
    queue: VecDeque<Pending>,
    seq: u64,
}

pub struct Bus {
    config: SimConfig,
    tick: u64,
    modules: Vec<SimModule>,
}

const SIMULATION_TOPICS: [&str; 2] = ["simulation3d", "simulationurdf"];

fn seeded(seed: u64, topic: &str, field: &str, seq: u64) -> u64 {
    let mut h = FnvHasher::default();
    h.write(&seed.to_le_bytes());
    h.write(topic.as_bytes());
    h.write(&[0xff]);
    h.write(field.as_bytes());
    h.write(&[0xff]);
    h.write(&seq.to_le_bytes());
    h.finish()
}

fn scalar(ty: Primitive, h: u64) -> String {
    use Primitive::*;
    match ty {
        Bool => (h & 1 == 1).to_string(),
        Byte | Uint8 | Char => (h % 256).to_string(),
        Uint16 | Uint32 | Uint64 => (h % 10_000).to_string(),
        Int8 => ((h % 256) as i64 - 128).to_string(),
        Int16 | Int32 | Int64 => ((h % 20_000) as i64 - 10_000).to_string(),
        Float32 | Float64 => format!("{:.3}", (h % 100_000) as f64 / 1000.0),
        String => format!("{h:016x}"),
    }
}

impl SimModule {
    fn string_value(&self, topic: &str, field: &str) -> String {
        if topic == "id" {
            let id = &self.identity;
            match field {
                "device_name" => return self.model.device_name.clone(),
                "vendor_id" => return id.vendor.to_string(),
                "product_id" => return id.product.to_string(),
                "instance_id" => return id.instance.map(|i| i.to_string()).unwrap_or_default(),
                "hrim_version" => return "2.0.0".to_string(),
                _ => {}
            }
        }
        format!("{}/{topic}.{field}", self.node)
    }

    fn synthesize(&self, seed: u64, topic: &TopicState) -> Vec<(String, String)> {
        let mut out = Vec::new();
        if let Some(schema) = self.model.resolve_schema(&topic.schema) {
            self.fields(seed, topic, schema, "", 0, &mut out);
        }
        out
    }

    fn fields(&self, seed: u64, topic: &TopicState, schema: &Schema, prefix: &str, depth: usize, out: &mut Vec<(String, String)>) {
        for (section, record) in schema.sections() {
            for field in &record.fields {
                let path = match (prefix.is_empty(), section.is_empty()) {
                    (true, true) => field.name.clone(),
                    (true, false) => format!("{section}.{}", field.name),
                    (false, true) => format!("{prefix}.{}", field.name),
                    (false, false) => format!("{prefix}.{section}.{}", field.name),
                };
                let value = |p: &str, ty: Primitive| match ty {
                    Primitive::String => self.string_value(&topic.name, p),
                    _ if topic.name == "id" && p == "device_kind" => self.model.kind.index().to_string(),
                    _ => scalar(ty, seeded(seed, &topic.name, p, topic.seq)),
                };
                match &field.field_type {
                    FieldType::Primitive { ty } => out.push((path.clone(), value(&path, *ty))),
                    FieldType::Array { elem, len } => {
                        for i in 0..len.unwrap_or(2) {
                            let p = format!("{path}[{i}]");
                            out.push((p.clone(), value(&p, *elem)));
                        }
                    }
                    FieldType::Nested { schema } if depth < 4 => {
                        if let Some(nested) = self.model.resolve_schema(schema) {
                            self.fields(seed, topic, nested, &path, depth + 1, out);
                        }
                    }
                    FieldType::Nested { .. } => {}
                }
            }
        }
    }
}

impl Bus {
    pub fn new(config: SimConfig) -> Result<Self, SimError> {
        if config.common_rate == 0 || config.default_rate == 0 {
            return Err(SimError::ZeroRate("default".into()));
        }
        if let Some((name, _)) = config.rates.iter().find(|(_, r)| **r == 0) {
            return Err(SimError::ZeroRate(name.clone()));
        }
        Ok(Bus { config, tick: 0, modules: Vec::new() })
    }

    /// The last processed tick.
    pub fn now(&self) -> u64 {
        self.tick
    }

    fn policy(&self, topic: &str) -> Policy {
        match topic {
            "id" => Policy::OnRequest,
            t if SIMULATION_TOPICS.contains(&t) => Policy::ConsumerGated,
            t => Policy::Continuous(self.config.rates.get(t).copied().unwrap_or(match t {
                "power" | "status" => self.config.common_rate,
                _ => self.config.default_rate,
            })),
        }
    }

    /// Spawns a module implementing every element of `model`. Returns its
    /// spawn index.
    pub fn spawn(&mut self, model: &ComponentModel, identity: Identity) -> Result<usize, SimError> {
        self.spawn_filtered(model, identity, |_| true)
    }

    /// Spawns a module exposing only the elements `descriptor` claims.
    pub fn spawn_descriptor(&mut self, model: &ComponentModel, descriptor: &ModuleDescriptor) -> Result<usize, SimError> {
        self.spawn_filtered(model, descriptor.identity, |name| descriptor.element(name).is_some())
    }

    fn spawn_filtered(
        &mut self,
        model: &ComponentModel,
        identity: Identity,
        exposes: impl Fn(&str) -> bool,
    ) -> Result<usize, SimError> {
        let findings = validate_model(model);
        if findings.iter().any(Finding::is_error) {
            return Err(SimError::InvalidModel(findings));
        }
        let instance = identity.instance.ok_or(SimError::IdentityRequired)?;
        if self.modules.iter().any(|m| m.identity.instance == Some(instance)) {
            return Err(SimError::DuplicateIdentity(instance));
        }
        let parts = NameParts::device(model.kind, &model.device_name).instance(instance);
        let node = render(NamePattern::Node, &parts).expect("valid model renders");
        let mut topics = Vec::new();
        let mut sinks = Vec::new();
        for element in model.elements.iter().filter(|e| e.kind == ElementKind::Topic && exposes(&e.name)) {
            let path = render(NamePattern::Topic, &parts.clone().topic(&element.name)).expect("valid topic renders");
            match element.direction {
                Some(Direction::Subscribed) => sinks.push(path),
                _ => topics.push(TopicState {
                    name: element.name.clone(),
                    path,
                    schema: element.schema.clone().unwrap_or_default(),
                    policy: self.policy(&element.name),
                    seq: 0,
                }),
            }
        }
        self.modules.push(SimModule {
            model: model.clone(),
            identity,
            node,
            topics,
            sinks,
            delivered: 0,
            queue: VecDeque::new(),
            seq: 0,
        });
        Ok(self.modules.len() - 1)
    }

    fn module_index(&self, instance: HexToken) -> Result<usize, SimError> {
        self.modules
            .iter()
            .position(|m| m.identity.instance == Some(instance))
            .ok_or(SimError::UnknownInstance(instance))
    }

    /// Attaches a consumer to one simulation topic of a module, or to both
    /// when `topic` is `None`. Takes effect on the next tick.
    pub fn probe(&mut self, instance: HexToken, topic: Option<&str>) -> Result<(), SimError> {
        let m = self.module_index(instance)?;
        let module = &mut self.modules[m];
        let targets: Vec<usize> = module
            .topics
            .iter()
            .enumerate()
            .filter(|(_, t)| t.policy == Policy::ConsumerGated && topic.is_none_or(|name| t.name == name))
            .map(|(i, _)| i)
            .collect();
        if targets.is_empty() {
            return Err(SimError::NotConsumerGated { instance, topic: topic.unwrap_or("*").to_string() });
        }
        module.queue.extend(targets.into_iter().map(Pending::Consumer));
        Ok(())
    }

    /// Sends a request on `<node>/id/request`. Answered on the next tick.
    pub fn request_id(&mut self, instance: HexToken) -> Result<(), SimError> {
        let m = self.module_index(instance)?;
        self.modules[m].queue.push_back(Pending::Request);
        Ok(())
    }

    /// Number of records delivered to a module's subscribed topics.
    pub fn delivered(&self, instance: HexToken) -> Result<u64, SimError> {
        Ok(self.modules[self.module_index(instance)?].delivered)
    }

    fn publish(&mut self, m: usize, t: usize, out: &mut Vec<BusRecord>) {
        let seed = self.config.seed;
        let module = &self.modules[m];
        let topic = &module.topics[t];
        let record = BusRecord {
            tick: self.tick,
            path: topic.path.clone(),
            publisher: m,
            seq: module.seq,
            schema: topic.schema.clone(),
            payload: module.synthesize(seed, topic),
        };
        let module = &mut self.modules[m];
        module.topics[t].seq += 1;
        module.seq += 1;
        out.push(record);
    }

    /// Processes the next `ticks` ticks and returns their records in
    /// (tick, spawn index, sequence) order.
    pub fn advance(&mut self, ticks: u64) -> Vec<BusRecord> {
        let mut out = Vec::new();
        for _ in 0..ticks {
            self.tick += 1;
            let start = out.len();
            for m in 0..self.modules.len() {
                while let Some(pending) = self.modules[m].queue.pop_front() {
                    match pending {
                        Pending::Consumer(t) => self.publish(m, t, &mut out),
                        Pending::Request => {
                            if let Some(t) = self.modules[m].topics.iter().position(|t| t.policy == Policy::OnRequest) {
                                self.publish(m, t, &mut out);
                            }
                        }
                    }
                }
                for t in 0..self.modules[m].topics.len() {
                    if let Policy::Continuous(rate) = self.modules[m].topics[t].policy {
                        if self.tick.is_multiple_of(rate) {
                            self.publish(m, t, &mut out);
                        }
                    }
                }
            }
            for record in &out[start..] {
                for module in &mut self.modules {
                    module.delivered += module.sinks.iter().filter(|s| **s == record.path).count() as u64;
                }
            }
        }
        out
    }
}

/// One line of a simulation script.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Directive {
    Spawn { model: String, identity: Identity },
    Probe { instance: HexToken, topic: Option<String> },
    RequestId { instance: HexToken },
    Advance(u64),
}

/// Parses a script: one directive per line, `#` starts a comment.
pub fn parse_script(text: &str) -> Result<Vec<(usize, Directive)>, SimError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| SimError::Script { line, message };
        let hex = |s: &str| HexToken::parse(s).map_err(|e| err(format!("invalid identity token: {e}")));
        let words: Vec<&str> = content.split_whitespace().collect();
        let directive = match words.as_slice() {
            ["spawn", model, vendor, product, instance] => Directive::Spawn {
                model: model.to_string(),
                identity: Identity::new(hex(vendor)?, hex(product)?, Some(hex(instance)?)),
            },
            ["probe", target] => {
                let (instance, topic) = match target.split_once('/') {
                    Some((i, t)) => (i, Some(t.to_string())),
                    None => (*target, None),
                };
                Directive::Probe { instance: hex(instance)?, topic }
            }
            ["request-id", instance] => Directive::RequestId { instance: hex(instance)? },
            ["advance", n] => Directive::Advance(n.parse().map_err(|_| err(format!("invalid tick count `{n}`")))?),
            _ => return Err(err(format!("unrecognized directive `{content}`"))),
        };
        out.push((line, directive));
    }
    Ok(out)
}

/// Runs a parsed script. `load` turns a spawn's model reference into a
/// component model.
pub fn run_script(
    script: &[(usize, Directive)],
    config: SimConfig,
    mut load: impl FnMut(&str) -> Result<ComponentModel, String>,
) -> Result<Vec<BusRecord>, SimError> {
    let mut bus = Bus::new(config)?;
    let mut records = Vec::new();
    for (line, directive) in script {
        let at = |e: SimError| SimError::Script { line: *line, message: e.to_string() };
        match directive {
            Directive::Spawn { model, identity } => {
                let model = load(model).map_err(|message| SimError::Script { line: *line, message })?;
                bus.spawn(&model, *identity).map_err(at)?;
            }
            Directive::Probe { instance, topic } => bus.probe(*instance, topic.as_deref()).map_err(at)?,
            Directive::RequestId { instance } => bus.request_id(*instance).map_err(at)?,
            Directive::Advance(n) => records.extend(bus.advance(*n)),
        }
    }
    Ok(records)
}

/// A step of a swap test, applied to whichever module is under test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Probe(Option<String>),
    RequestId,
    Advance(u64),
}

/// The steps used when none are given: every runtime behavior once.
pub fn default_swap_steps() -> Vec<Step> {
    vec![
        Step::Advance(6),
        Step::RequestId,
        Step::Advance(43),
        Step::Probe(None),
        Step::Advance(51),
    ]
}

/// Drops spawn lines and instance targets from a script.
pub fn steps_from_script(script: &[(usize, Directive)]) -> Vec<Step> {
    script
        .iter()
        .filter_map(|(_, d)| match d {
            Directive::Spawn { .. } => None,
            Directive::Probe { topic, .. } => Some(Step::Probe(topic.clone())),
            Directive::RequestId { .. } => Some(Step::RequestId),
            Directive::Advance(n) => Some(Step::Advance(*n)),
        })
        .collect()
}

/// Trace lines with identity tokens replaced by placeholders.
fn erased_trace(records: &[BusRecord], identity: &Identity) -> Vec<String> {
    let tokens: Vec<(String, &str)> = [
        (Some(identity.vendor), "<vendor>"),
        (Some(identity.product), "<product>"),
        (identity.instance, "<instance>"),
    ]
    .into_iter()
    .filter_map(|(t, label)| t.map(|t| (t.to_string(), label)))
    .collect();
    let erase = |s: &str| tokens.iter().fold(s.to_string(), |acc, (t, label)| acc.replace(t.as_str(), label));
    records
        .iter()
        .map(|r| {
            let erased = BusRecord {
                path: erase(&r.path),
                payload: r.payload.iter().map(|(k, v)| (k.clone(), erase(v))).collect(),
                ..r.clone()
            };
            erased.trace_line()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwapOutcome {
    pub identical: bool,
    /// Identity-erased traces of the two runs.
    pub trace_a: Vec<String>,
    pub trace_b: Vec<String>,
}

fn run_steps(model: &ComponentModel, descriptor: &ModuleDescriptor, steps: &[Step], config: &SimConfig) -> Result<Vec<BusRecord>, SimError> {
    let mut bus = Bus::new(config.clone())?;
    bus.spawn_descriptor(model, descriptor)?;
    let instance = descriptor.identity.instance.ok_or(SimError::IdentityRequired)?;
    let mut records = Vec::new();
    for step in steps {
        match step {
            Step::Probe(topic) => bus.probe(instance, topic.as_deref())?,
            Step::RequestId => bus.request_id(instance)?,
            Step::Advance(n) => records.extend(bus.advance(*n)),
        }
    }
    Ok(records)
}

/// Runs the same steps against a module built from `a` and then from `b`,
/// and compares the traces once identity is erased.
pub fn swap_and_verify(
    steps: &[Step],
    a: &ModuleDescriptor,
    b: &ModuleDescriptor,
    model: &ComponentModel,
    config: &SimConfig,
) -> Result<SwapOutcome, SimError> {
    let verdict = interchangeable(a, b, model);
    if !verdict.interchangeable {
        return Err(SimError::NotInterchangeable(verdict.explanation));
    }
    let trace_a = erased_trace(&run_steps(model, a, steps, config)?, &a.identity);
    let trace_b = erased_trace(&run_steps(model, b, steps, config)?, &b.identity);
    Ok(SwapOutcome { identical: trace_a == trace_b, trace_a, trace_b })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin_rotary_servo;

    fn id(instance: &str) -> Identity {
        Identity::parse("a0b1", "c2d3", Some(instance)).unwrap()
    }

    fn count(records: &[BusRecord], topic: &str) -> usize {
        records.iter().filter(|r| r.path.ends_with(&format!("/{topic}"))).count()
    }

    #[test]
    fn quiet_run_counts() {
        let mut bus = Bus::new(SimConfig::default()).unwrap();
        bus.spawn(&builtin_rotary_servo(), id("0001")).unwrap();
        let records = bus.advance(100);
        for topic in ["id", "simulation3d", "simulationurdf"] {
            assert_eq!(count(&records, topic), 0, "{topic}");
        }
        assert_eq!(count(&records, "power"), 10);
        assert_eq!(count(&records, "status"), 10);
        assert_eq!(count(&records, "goal"), 0);
        assert_eq!(count(&records, "state"), 20);
        assert!(bus.advance(0).is_empty());
    }

    #[test]
    fn probe_and_request_timing() {
        let mut bus = Bus::new(SimConfig::default()).unwrap();
        let instance = HexToken::parse("0001").unwrap();
        bus.spawn(&builtin_rotary_servo(), id("0001")).unwrap();
        let mut records = bus.advance(6);
        bus.request_id(instance).unwrap();
        records.extend(bus.advance(43));
        bus.probe(instance, None).unwrap();
        records.extend(bus.advance(51));
        let ids: Vec<&BusRecord> = records.iter().filter(|r| r.path.ends_with("/id")).collect();
        assert_eq!(ids.len(), 1);
        assert_eq!(ids[0].tick, 7);
        assert!(ids[0].payload.contains(&("vendor_id".into(), "a0b1".into())));
        assert!(ids[0].payload.contains(&("device_kind".into(), "1".into())));
        for topic in SIMULATION_TOPICS {
            let hits: Vec<u64> = records.iter().filter(|r| r.path.ends_with(topic)).map(|r| r.tick).collect();
            assert_eq!(hits, [50]);
        }
    }

    #[test]
    fn spawn_order_within_a_tick() {
        let mut bus = Bus::new(SimConfig::default()).unwrap();
        bus.spawn(&builtin_rotary_servo(), id("0001")).unwrap();
        bus.spawn(&builtin_rotary_servo(), id("0002")).unwrap();
        let power: Vec<(u64, usize)> =
            bus.advance(30).iter().filter(|r| r.path.ends_with("/power")).map(|r| (r.tick, r.publisher)).collect();
        assert_eq!(power, [(10, 0), (10, 1), (20, 0), (20, 1), (30, 0), (30, 1)]);
        assert_eq!(
            bus.spawn(&builtin_rotary_servo(), id("0002")),
            Err(SimError::DuplicateIdentity(HexToken::parse("0002").unwrap()))
        );
    }

    #[test]
    fn errors() {
        let mut bus = Bus::new(SimConfig::default()).unwrap();
        let instance = HexToken::parse("0001").unwrap();
        assert_eq!(bus.request_id(instance), Err(SimError::UnknownInstance(instance)));
        bus.spawn(&builtin_rotary_servo(), id("0001")).unwrap();
        assert!(matches!(bus.probe(instance, Some("power")), Err(SimError::NotConsumerGated { .. })));
        let mut broken = builtin_rotary_servo();
        broken.elements.remove(1);
        assert!(matches!(bus.spawn(&broken, id("0003")), Err(SimError::InvalidModel(_))));
        let mut config = SimConfig::default();
        config.rates.insert("state".into(), 0);
        assert!(Bus::new(config).is_err());
    }

    #[test]
    fn rate_override() {
        let mut config = SimConfig::default();
        config.rates.insert("power".into(), 25);
        let mut bus = Bus::new(config).unwrap();
        bus.spawn(&builtin_rotary_servo(), id("0001")).unwrap();
        assert_eq!(count(&bus.advance(100), "power"), 4);
    }

    #[test]
    fn script_parsing() {
        let script = parse_script("# demo\nspawn rotary_servo a0b1 c2d3 0001\nprobe 0001/simulation3d\nrequest-id 0001\nadvance 5 # go\n").unwrap();
        assert_eq!(script.len(), 4);
        assert_eq!(script[0].0, 2);
        assert!(matches!(&script[1].1, Directive::Probe { topic: Some(t), .. } if t == "simulation3d"));
        assert!(matches!(parse_script("advance x"), Err(SimError::Script { line: 1, .. })));
        assert!(matches!(parse_script("spawn a b c d"), Err(SimError::Script { line: 1, .. })));
        assert!(matches!(parse_script("\n\njump"), Err(SimError::Script { line: 3, .. })));
    }

    #[test]
    fn seeds_change_payloads_not_shape() {
        let run = |seed| {
            let mut bus = Bus::new(SimConfig::with_seed(seed)).unwrap();
            bus.spawn(&builtin_rotary_servo(), id("0001")).unwrap();
            bus.advance(20)
        };
        let (a, b) = (run(0), run(1));
        assert_eq!(a.len(), b.len());
        assert_ne!(trace_text(&a), trace_text(&b));
        assert_eq!(trace_text(&a), trace_text(&run(0)));
    }
}
