// The ten acceptance criteria. Each prints one PASS/FAIL line; the test
// fails at the end if any criterion failed. Lines go straight to stdout so
// they show up without --nocapture.

mod common;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use hrim::catalog::builtin_rotary_servo;
use hrim::cli;
use hrim::conformance::{check, interchangeable};
use hrim::descriptor::load_descriptor;
use hrim::diag::Code;
use hrim::lang::{format_model, parse_model, SourceFile};
use hrim::model::{validate_model, ElementKind, HexToken, Identity, Obligation};
use hrim::naming::{parse, render, validate, NamePattern};
use hrim::simbus::{default_swap_steps, parse_script, steps_from_script, swap_and_verify, Bus, SimConfig};
use hrim::units::{check_units, dimension_of, parse_unit, Dimension, UnitExpr};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn crate_path(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(rel)
}

fn ensure(cond: bool, why: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(why())
    }
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>, Vec<u8>) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("hrim").chain(args.iter().copied());
    let code = cli::run(argv, &mut out, &mut err);
    (code, out, err)
}

fn naming_round_trip() -> Outcome {
    let mut rng = StdRng::seed_from_u64(1);
    let start = Instant::now();
    let mut n = 0;
    for pattern in NamePattern::ALL {
        for _ in 0..1200 {
            let parts = common::name_parts(&mut rng, pattern);
            let text = render(pattern, &parts).map_err(|e| format!("{pattern}: render failed: {e}"))?;
            let back = parse(pattern, &text).map_err(|e| format!("{pattern}: `{text}` failed to parse: {e}"))?;
            ensure(back == parts, || format!("{pattern}: `{text}` parsed to {back:?}"))?;
            n += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(n >= 10_000, || format!("only {n} cases"))?;
    ensure(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    Ok(format!("{n} names over 9 patterns in {:.2}s", elapsed.as_secs_f64()))
}

/// Characters each pattern may contain, written out independently of the
/// library's own alphabet tables.
fn allowed(pattern: NamePattern, c: char) -> bool {
    let lower_digit = c.is_ascii_lowercase() || c.is_ascii_digit();
    match pattern {
        NamePattern::Package | NamePattern::Node => lower_digit || c == '_',
        NamePattern::Topic | NamePattern::ServicePath => lower_digit || c == '_' || c == '/',
        NamePattern::MessageFile | NamePattern::GenericMessageFile | NamePattern::ServiceFile | NamePattern::ActionFile => {
            c.is_ascii_alphanumeric() || "_/.".contains(c)
        }
        NamePattern::ParameterTag => c.is_ascii_alphanumeric() || "_.+- =\"".contains(c),
    }
}

fn naming_mutation_rejection() -> Outcome {
    let mut rng = StdRng::seed_from_u64(2);
    let pool: Vec<char> = (' '..='~').chain(['\t', '\n', 'é', 'Ж', '中', '\u{0}']).collect();
    let mut trials = 0;
    for round in 0..1800 {
        let pattern = NamePattern::ALL[round % NamePattern::ALL.len()];
        let text = render(pattern, &common::name_parts(&mut rng, pattern)).unwrap();
        let chars: Vec<char> = text.chars().collect();
        let at = rng.gen_range(0..chars.len());
        let outside: Vec<char> = pool.iter().copied().filter(|c| !allowed(pattern, *c)).collect();
        let mut mutated = chars.clone();
        mutated[at] = *outside.choose(&mut rng).unwrap();
        let mutated: String = mutated.into_iter().collect();
        let (ok, findings) = validate(pattern, &mutated);
        ensure(!ok, || format!("{pattern}: accepted corrupted `{mutated}` (from `{text}`)"))?;
        ensure(findings.iter().all(|f| f.code == Code::E_NAMING) && !findings.is_empty(), || {
            format!("{pattern}: unexpected findings {findings:?}")
        })?;
        trials += 1;
    }
    Ok(format!("{trials} corruptions rejected, 0 false accepts"))
}

fn parser_round_trip() -> Outcome {
    let mut rng = StdRng::seed_from_u64(3);
    let mut elements = 0;
    for i in 0..1000 {
        let model = common::model(&mut rng);
        elements += model.elements.len();
        let text = format_model(&model).map_err(|e| format!("model {i}: {e}"))?;
        let parsed = parse_model(&SourceFile::new("gen.hrim", &text));
        ensure(parsed.diagnostics.is_empty(), || format!("model {i}: {:?}\n{text}", parsed.diagnostics))?;
        let back = parsed.model.ok_or("no model")?;
        ensure(back == model, || format!("model {i} changed in round trip\n{text}"))?;
        let again = format_model(&back).map_err(|e| e.to_string())?;
        ensure(again == text, || format!("model {i}: second format pass differs"))?;
    }
    Ok(format!("1000 models ({elements} elements) round-trip, formatting idempotent"))
}

fn catalog_fidelity() -> Outcome {
    let source = SourceFile::read(&crate_path("catalog/rotary_servo.hrim")).map_err(|e| e.to_string())?;
    let parsed = parse_model(&source);
    ensure(parsed.diagnostics.is_empty(), || format!("{:?}", parsed.diagnostics))?;
    let model = parsed.model.ok_or("no model")?;
    let mandatory: Vec<&str> =
        model.elements.iter().filter(|e| e.obligation == Obligation::Mandatory).map(|e| e.name.as_str()).collect();
    let optional: Vec<_> = model.elements.iter().filter(|e| e.obligation == Obligation::Optional).collect();
    ensure(mandatory == ["id", "power", "status", "specs", "simulation3d", "simulationurdf", "goal"], || {
        format!("mandatory elements {mandatory:?}")
    })?;
    let optional_topics = optional.iter().filter(|e| e.kind == ElementKind::Topic).count();
    let group_params =
        optional.iter().filter(|e| e.kind == ElementKind::Parameter && e.group.as_deref() == Some("temperature_sensing")).count();
    ensure(optional.len() == 6 && optional_topics == 4 && group_params == 2, || {
        format!("optional: {} ({optional_topics} topics, {group_params} group parameters)", optional.len())
    })?;
    let findings = validate_model(&model);
    ensure(findings.is_empty(), || format!("validate_model: {findings:?}"))?;
    let unit_findings = check_units(&model);
    ensure(unit_findings.is_empty(), || format!("check_units: {unit_findings:?}"))?;
    Ok("7 mandatory + 6 optional (4 topics, 2 group parameters), zero findings".into())
}

fn read_tree(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_string_lossy().replace('\\', "/");
                out.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    out
}

fn generation_determinism() -> Outcome {
    let golden = read_tree(&crate_path("catalog/golden/rotary_servo"));
    ensure(!golden.is_empty(), || "golden tree is missing".into())?;
    let model = crate_path("catalog/rotary_servo.hrim");
    let mut trees = Vec::new();
    for _ in 0..3 {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let out = dir.path().join("tree");
        let args = [
            "gen",
            model.to_str().unwrap(),
            "--vendor",
            "a0b1",
            "--product",
            "c2d3",
            "--instance",
            "0001",
            "--out",
            out.to_str().unwrap(),
        ];
        let (code, _, err) = run_cli(&args);
        ensure(code == 0, || format!("gen exited {code}: {}", String::from_utf8_lossy(&err)))?;
        trees.push(read_tree(&out));
    }
    for (i, tree) in trees.iter().enumerate() {
        let paths: Vec<&String> = tree.keys().collect();
        let golden_paths: Vec<&String> = golden.keys().collect();
        ensure(paths == golden_paths, || format!("run {i}: paths {paths:?} vs golden {golden_paths:?}"))?;
        if let Some(path) = tree.keys().find(|p| tree[*p] != golden[*p]) {
            return Err(format!("run {i}: {path} differs from golden"));
        }
    }
    let bytes: usize = golden.values().map(Vec::len).sum();
    Ok(format!("{} files, {bytes} bytes, identical to golden over 3 runs", golden.len()))
}

fn conformance_matrix() -> Outcome {
    let model = builtin_rotary_servo();
    let expected: [(&str, Option<(Code, &str)>); 4] = [
        ("servo_vendor_a", None),
        ("servo_mandatory_only", None),
        ("servo_missing_power", Some((Code::E_MISSING_MANDATORY, "power"))),
        ("servo_partial_temperature", Some((Code::E_GROUP_PARTIAL, "temperature_sensing"))),
    ];
    let mut summary = Vec::new();
    for (name, want) in expected {
        let d = load_descriptor(&crate_path(&format!("examples/{name}.hrimd"))).map_err(|e| format!("{name}: {e}"))?;
        let report = check(&d, &model);
        let got: Vec<(Code, &str)> = report.findings.iter().map(|f| (f.code, f.subject.as_str())).collect();
        match want {
            None => ensure(report.conformant && got.is_empty(), || format!("{name}: {got:?}"))?,
            Some(finding) => ensure(!report.conformant && got == [finding], || format!("{name}: {got:?}"))?,
        }
        summary.push(if report.conformant { "conformant".to_string() } else { format!("{:?}", got[0].0) });
    }
    Ok(summary.join(", "))
}

fn plug_and_play_swap() -> Outcome {
    let model = builtin_rotary_servo();
    let a = load_descriptor(&crate_path("examples/servo_vendor_a.hrimd")).map_err(|e| e.to_string())?;
    let b = load_descriptor(&crate_path("examples/servo_vendor_b.hrimd")).map_err(|e| e.to_string())?;
    ensure(a.identity.vendor != b.identity.vendor && a.identity.product != b.identity.product, || "same vendor".into())?;
    ensure(a.identity.instance != b.identity.instance, || "same instance".into())?;
    let verdict = interchangeable(&a, &b, &model);
    ensure(verdict.interchangeable, || verdict.explanation.clone())?;

    let script = std::fs::read_to_string(crate_path("examples/servo_swap.script")).map_err(|e| e.to_string())?;
    let scripted = steps_from_script(&parse_script(&script).map_err(|e| e.to_string())?);
    let mut records = 0;
    for steps in [default_swap_steps(), scripted] {
        let outcome = swap_and_verify(&steps, &a, &b, &model, &SimConfig::default()).map_err(|e| e.to_string())?;
        ensure(outcome.identical, || "traces differ after identity erasure".into())?;
        ensure(!outcome.trace_a.is_empty(), || "empty trace".into())?;
        records += outcome.trace_a.len();
    }

    // without erasure the two runs are told apart by identity
    let run = |d: &hrim::descriptor::ModuleDescriptor| {
        let mut bus = Bus::new(SimConfig::default()).unwrap();
        bus.spawn_descriptor(&model, d).unwrap();
        bus.request_id(d.identity.instance.unwrap()).unwrap();
        hrim::simbus::trace_text(&bus.advance(20))
    };
    ensure(run(&a) != run(&b), || "raw traces are identical; erasure is vacuous".into())?;

    let (code, out, _) = run_cli(&[
        "swap",
        crate_path("catalog/rotary_servo.hrim").to_str().unwrap(),
        crate_path("examples/servo_vendor_a.hrimd").to_str().unwrap(),
        crate_path("examples/servo_vendor_b.hrimd").to_str().unwrap(),
    ]);
    ensure(code == 0, || format!("swap exited {code}: {}", String::from_utf8_lossy(&out)))?;
    Ok(format!("verdict true, {records} records identical after identity erasure"))
}

fn runtime_semantics() -> Outcome {
    let model = builtin_rotary_servo();
    let instance = HexToken::parse("0001").unwrap();
    let count = |records: &[hrim::simbus::BusRecord], topic: &str| {
        records.iter().filter(|r| r.path == format!("hrim_actuator_rotary_servo_0001/{topic}")).count()
    };

    let mut bus = Bus::new(SimConfig::default()).unwrap();
    bus.spawn(&model, Identity::new(HexToken::parse("a0b1").unwrap(), HexToken::parse("c2d3").unwrap(), Some(instance)))
        .map_err(|e| e.to_string())?;
    let quiet = bus.advance(100);
    let counts: Vec<usize> =
        ["id", "simulation3d", "simulationurdf", "power", "status"].iter().map(|t| count(&quiet, t)).collect();
    ensure(counts == [0, 0, 0, 10, 10], || format!("quiet counts {counts:?}"))?;

    let mut bus = Bus::new(SimConfig::default()).unwrap();
    bus.spawn(&model, Identity::parse("a0b1", "c2d3", Some("0001")).unwrap()).unwrap();
    let mut records = bus.advance(49);
    bus.probe(instance, None).map_err(|e| e.to_string())?;
    records.extend(bus.advance(51));
    for topic in ["simulation3d", "simulationurdf"] {
        let ticks: Vec<u64> = records.iter().filter(|r| r.path.ends_with(topic)).map(|r| r.tick).collect();
        ensure(ticks == [50], || format!("{topic} at ticks {ticks:?}"))?;
    }

    let mut bus = Bus::new(SimConfig::default()).unwrap();
    bus.spawn(&model, Identity::parse("a0b1", "c2d3", Some("0001")).unwrap()).unwrap();
    let mut records = bus.advance(6);
    bus.request_id(instance).map_err(|e| e.to_string())?;
    records.extend(bus.advance(94));
    let ids: Vec<_> = records.iter().filter(|r| r.path.ends_with("/id")).collect();
    ensure(ids.len() == 1 && ids[0].tick == 7, || format!("id records {:?}", ids.iter().map(|r| r.tick).collect::<Vec<_>>()))?;
    let field = |k: &str| ids[0].payload.iter().find(|(f, _)| f == k).map(|(_, v)| v.as_str());
    ensure(field("vendor_id") == Some("a0b1") && field("instance_id") == Some("0001"), || {
        format!("id payload {:?}", ids[0].payload)
    })?;
    Ok("quiet: 0 id/sim, 10 power, 10 status; probe at 50 -> one each at 50; id request -> one at 7".into())
}

/// SI base-dimension exponents (L, M, T, I, Θ, N, J) of every atom,
/// transcribed from the SI brochure rather than from the library.
fn oracle_dimension(atom: &str) -> [i32; 7] {
    match atom {
        "m" => [1, 0, 0, 0, 0, 0, 0],
        "kg" => [0, 1, 0, 0, 0, 0, 0],
        "s" => [0, 0, 1, 0, 0, 0, 0],
        "A" => [0, 0, 0, 1, 0, 0, 0],
        "K" | "celsius" => [0, 0, 0, 0, 1, 0, 0],
        "mol" => [0, 0, 0, 0, 0, 1, 0],
        "cd" | "lm" => [0, 0, 0, 0, 0, 0, 1],
        "rad" | "sr" | "percent" => [0; 7],
        "Hz" => [0, 0, -1, 0, 0, 0, 0],
        "N" => [1, 1, -2, 0, 0, 0, 0],
        "Pa" => [-1, 1, -2, 0, 0, 0, 0],
        "J" => [2, 1, -2, 0, 0, 0, 0],
        "W" => [2, 1, -3, 0, 0, 0, 0],
        "C" => [0, 0, 1, 1, 0, 0, 0],
        "V" => [2, 1, -3, -1, 0, 0, 0],
        "ohm" => [2, 1, -3, -2, 0, 0, 0],
        "T" => [0, 1, -2, -1, 0, 0, 0],
        "lx" => [-2, 0, 0, 0, 0, 0, 1],
        other => panic!("no oracle entry for {other}"),
    }
}

fn units_algebra() -> Outcome {
    const ATOMS: [&str; 22] = [
        "m", "kg", "s", "A", "K", "celsius", "mol", "cd", "rad", "sr", "Hz", "N", "Pa", "J", "W", "V", "ohm", "C", "T",
        "lm", "lx", "percent",
    ];
    let mut rng = StdRng::seed_from_u64(9);
    let add = |a: [i32; 7], b: [i32; 7], k: i32| std::array::from_fn::<i32, 7, _>(|i| a[i] + k * b[i]);
    let random_expr = |rng: &mut StdRng| {
        let mut text = String::new();
        let mut dim = [0; 7];
        for i in 0..rng.gen_range(1..5) {
            let atom = ATOMS.choose(rng).unwrap();
            let exp = *[1, 1, 2, 3, -1, -2].choose(rng).unwrap();
            let div = i > 0 && rng.gen_bool(0.4);
            if i > 0 {
                text.push(if div { '/' } else { '*' });
            }
            text.push_str(atom);
            if exp != 1 {
                text.push_str(&format!("^{exp}"));
            }
            dim = add(dim, oracle_dimension(atom), if div { -exp } else { exp });
        }
        (text, dim)
    };
    for i in 0..1000 {
        let (ta, da) = random_expr(&mut rng);
        let (tb, db) = random_expr(&mut rng);
        let a = parse_unit(&ta).map_err(|e| format!("{ta}: {e}"))?;
        let b = parse_unit(&tb).map_err(|e| format!("{tb}: {e}"))?;
        ensure(dimension_of(&a).0 == da, || format!("case {i}: dim({ta}) = {} expected {da:?}", dimension_of(&a)))?;
        let product: UnitExpr = &a * &b;
        let quotient: UnitExpr = &a / &b;
        ensure(dimension_of(&product).0 == add(da, db, 1), || format!("case {i}: dim({ta} * {tb})"))?;
        ensure(dimension_of(&quotient).0 == add(da, db, -1), || format!("case {i}: dim({ta} / {tb})"))?;
        let reparsed = parse_unit(&product.to_string()).map_err(|e| e.to_string())?;
        ensure(reparsed == product, || format!("case {i}: `{product}` does not reparse"))?;
    }
    let nm = dimension_of(&parse_unit("N*m").unwrap());
    let rad_s = dimension_of(&parse_unit("rad/s").unwrap());
    ensure(nm == Dimension::new(2, 1, -2, 0, 0, 0, 0), || format!("N*m -> {nm}"))?;
    ensure(rad_s == Dimension::new(0, 0, -1, 0, 0, 0, 0), || format!("rad/s -> {rad_s}"))?;
    Ok(format!("1000 product/quotient pairs homomorphic; N*m = {nm}, rad/s = {rad_s}"))
}

fn simbus_determinism() -> Outcome {
    let script = crate_path("examples/servo_swap.script");
    let script = script.to_str().unwrap();
    let (code, first, err) = run_cli(&["sim", script, "--seed", "0"]);
    ensure(code == 0, || format!("sim exited {code}: {}", String::from_utf8_lossy(&err)))?;
    ensure(!first.is_empty(), || "empty trace".into())?;
    for run in 1..20 {
        let (_, out, _) = run_cli(&["sim", script, "--seed", "0"]);
        ensure(out == first, || format!("run {run} differs"))?;
    }
    let (_, other_seed, _) = run_cli(&["sim", script, "--seed", "1"]);
    ensure(other_seed != first, || "seed has no effect".into())?;
    let lines = first.iter().filter(|b| **b == b'\n').count();
    Ok(format!("20 runs byte-identical ({lines} records)"))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("naming round trip", naming_round_trip),
        ("naming mutation rejection", naming_mutation_rejection),
        ("parser round trip", parser_round_trip),
        ("catalog fidelity", catalog_fidelity),
        ("generation determinism", generation_determinism),
        ("conformance matrix", conformance_matrix),
        ("plug-and-play swap", plug_and_play_swap),
        ("runtime semantics", runtime_semantics),
        ("units algebra", units_algebra),
        ("simbus determinism", simbus_determinism),
    ];
    let mut failed = Vec::new();
    let stdout = std::io::stdout();
    for (i, (name, criterion)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(criterion).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let line = match &outcome {
            Ok(detail) => format!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed.push(*name);
                format!("FAIL {:>2} {name}: {why}", i + 1)
            }
        };
        let _ = writeln!(stdout.lock(), "{line}");
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
