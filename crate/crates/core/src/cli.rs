//! The `hrim` command line. Payload goes to stdout, findings to stderr.
//!
//! Exit codes: 0 success, 1 findings or a negative verdict, 2 usage error,
//! 3 I/O error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::catalog;
use crate::conformance::{check, interchangeable};
use crate::descriptor::{load_descriptor, DescriptorError, ModuleDescriptor};
use crate::diag::Diagnostic;
use crate::emit::{emit_with, write_tree, EmitError, EmitOptions};
use crate::lang::{format_model, parse_model, SourceFile};
use crate::model::{ComponentModel, Identity};
use crate::naming::{validate, NamePattern};
use crate::simbus::{
    default_swap_steps, parse_script, run_script, steps_from_script, swap_and_verify, trace_text, SimConfig, SimError,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FINDINGS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "hrim", version, about = "Component-model compiler and conformance toolkit for robot hardware")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and validate a model, including units.
    Check { file: PathBuf },
    /// Print a model in canonical form.
    Fmt {
        file: PathBuf,
        /// Rewrite the file in place instead of printing.
        #[arg(long)]
        write: bool,
    },
    /// Generate interface files for a model.
    Gen {
        file: PathBuf,
        #[arg(long)]
        vendor: String,
        #[arg(long)]
        product: String,
        #[arg(long)]
        instance: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        force: bool,
        /// Leave an optional group out; repeatable.
        #[arg(long = "without", value_name = "GROUP")]
        without: Vec<String>,
    },
    /// Check a module descriptor against a model.
    Conform {
        model: PathBuf,
        descriptor: PathBuf,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Decide whether two modules can replace each other, and replay a
    /// simulation against both.
    Swap {
        model: PathBuf,
        a: PathBuf,
        b: PathBuf,
        /// Script whose probe/request/advance lines drive the replay.
        #[arg(long)]
        script: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a simulation script and print its trace.
    Sim {
        script: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// List the builtin catalog models.
    List,
    /// Check a string against one naming pattern.
    LintName { pattern: String, text: String },
}

/// A failed command: exit code plus the message for stderr.
struct Fail(i32, String);

type Outcome = Result<i32, Fail>;

fn io_fail(path: &Path, err: impl std::fmt::Display) -> Fail {
    Fail(EXIT_IO, format!("{}: {err}", path.display()))
}

fn read_source(path: &Path) -> Result<SourceFile, Fail> {
    SourceFile::read(path).map_err(|e| io_fail(path, e))
}

fn render_all(diags: &[Diagnostic], path: &str) -> String {
    diags.iter().map(|d| d.render(path) + "\n").collect()
}

/// Parses and validates a model file, units included.
fn load_model(path: &Path) -> Result<ComponentModel, Fail> {
    let source = read_source(path)?;
    let parsed = parse_model(&source);
    let mut diags = parsed.diagnostics.clone();
    if !parsed.has_errors() {
        diags.extend(parsed.unit_diagnostics());
    }
    match parsed.model {
        Some(model) if diags.is_empty() => Ok(model),
        _ => Err(Fail(EXIT_FINDINGS, render_all(&diags, source.path()))),
    }
}

fn load_module(path: &Path) -> Result<ModuleDescriptor, Fail> {
    load_descriptor(path).map_err(|e| match &e {
        DescriptorError::Io { .. } => Fail(EXIT_IO, e.to_string()),
        _ => {
            let mut text = format!("{e}\n");
            text.push_str(&render_all(e.diagnostics(), &path.display().to_string()));
            Fail(EXIT_FINDINGS, text)
        }
    })
}

fn identity(vendor: &str, product: &str, instance: &str) -> Result<Identity, Fail> {
    Identity::parse(vendor, product, Some(instance)).map_err(|e| Fail(EXIT_USAGE, format!("invalid identity: {e}")))
}

fn sim_error(err: SimError) -> Fail {
    Fail(EXIT_FINDINGS, err.to_string())
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let io = |e: std::io::Error| Fail(EXIT_IO, e.to_string());
    match command {
        Command::Check { file } => {
            load_model(&file)?;
            Ok(EXIT_OK)
        }
        Command::Fmt { file, write } => {
            let source = read_source(&file)?;
            let parsed = parse_model(&source);
            let model = match (parsed.valid_model(), parsed.has_errors()) {
                (Some(model), false) => model,
                _ => return Err(Fail(EXIT_FINDINGS, render_all(&parsed.diagnostics, source.path()))),
            };
            let text = format_model(model).map_err(|e| Fail(EXIT_FINDINGS, e.to_string()))?;
            if write {
                if text != source.text() {
                    std::fs::write(&file, &text).map_err(|e| io_fail(&file, e))?;
                }
            } else {
                out.write_all(text.as_bytes()).map_err(io)?;
            }
            Ok(EXIT_OK)
        }
        Command::Gen { file, vendor, product, instance, out: dir, force, without } => {
            let identity = identity(&vendor, &product, &instance)?;
            let model = load_model(&file)?;
            let tree = emit_with(&model, &identity, &EmitOptions { without }).map_err(|e| match e {
                EmitError::UnknownGroup(_) => Fail(EXIT_USAGE, e.to_string()),
                other => Fail(EXIT_FINDINGS, other.to_string()),
            })?;
            let summary = write_tree(&tree, &dir, force).map_err(|e| Fail(EXIT_IO, e.to_string()))?;
            writeln!(out, "wrote {} files ({} bytes) to {}", summary.files_written, summary.bytes, dir.display())
                .map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Conform { model, descriptor, json } => {
            let model = load_model(&model)?;
            let module = load_module(&descriptor)?;
            let report = check(&module, &model);
            let text = if json { report.to_json() + "\n" } else { report.to_text() };
            out.write_all(text.as_bytes()).map_err(io)?;
            Ok(if report.conformant { EXIT_OK } else { EXIT_FINDINGS })
        }
        Command::Swap { model, a, b, script, seed } => {
            let model = load_model(&model)?;
            let (a, b) = (load_module(&a)?, load_module(&b)?);
            let verdict = interchangeable(&a, &b, &model);
            if !verdict.interchangeable {
                writeln!(out, "not interchangeable: {}", verdict.explanation).map_err(io)?;
                return Ok(EXIT_FINDINGS);
            }
            let steps = match script {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).map_err(|e| io_fail(&path, e))?;
                    steps_from_script(&parse_script(&text).map_err(sim_error)?)
                }
                None => default_swap_steps(),
            };
            let outcome = swap_and_verify(&steps, &a, &b, &model, &SimConfig::with_seed(seed)).map_err(sim_error)?;
            writeln!(out, "interchangeable: {}", verdict.explanation).map_err(io)?;
            if outcome.identical {
                writeln!(out, "traces identical after identity erasure ({} records)", outcome.trace_a.len())
                    .map_err(io)?;
                Ok(EXIT_OK)
            } else {
                let at = outcome.trace_a.iter().zip(&outcome.trace_b).position(|(x, y)| x != y);
                let at = at.unwrap_or(outcome.trace_a.len().min(outcome.trace_b.len()));
                writeln!(out, "traces differ at record {at}").map_err(io)?;
                Ok(EXIT_FINDINGS)
            }
        }
        Command::Sim { script, seed } => {
            let text = std::fs::read_to_string(&script).map_err(|e| io_fail(&script, e))?;
            let prefix = |e: SimError| Fail(EXIT_FINDINGS, format!("{}: {e}", script.display()));
            let directives = parse_script(&text).map_err(prefix)?;
            let base = script.parent().map(Path::to_path_buf).unwrap_or_default();
            let records = run_script(&directives, SimConfig::with_seed(seed), |name| {
                if let Some(model) = catalog::builtin(name) {
                    return Ok(model);
                }
                load_model(&base.join(name)).map_err(|Fail(_, msg)| format!("cannot load model `{name}`: {}", msg.trim_end()))
            })
            .map_err(prefix)?;
            out.write_all(trace_text(&records).as_bytes()).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::List => {
            for name in catalog::catalog_names() {
                writeln!(out, "{name}").map_err(io)?;
            }
            Ok(EXIT_OK)
        }
        Command::LintName { pattern, text } => {
            let pattern: NamePattern = pattern.parse().map_err(|_| {
                let names: Vec<&str> = NamePattern::ALL.iter().map(|p| p.as_str()).collect();
                Fail(EXIT_USAGE, format!("unknown pattern `{pattern}`; expected one of {}", names.join(", ")))
            })?;
            let (ok, findings) = validate(pattern, &text);
            if ok {
                writeln!(out, "ok").map_err(io)?;
                return Ok(EXIT_OK);
            }
            for f in findings {
                writeln!(err, "{f}").map_err(io)?;
            }
            Ok(EXIT_FINDINGS)
        }
    }
}

/// Runs the command line given by `args` (program name first) and returns
/// the exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(Fail(code, message)) => {
            let _ = err.write_all(message.as_bytes());
            if !message.is_empty() && !message.ends_with('\n') {
                let _ = err.write_all(b"\n");
            }
            code
        }
    }
}
