//! The command implementations behind the `mashup` binary, usable as a
//! library. Every command returns an [`Outcome`] instead of exiting.

use std::io::IsTerminal;
use std::path::Path;
use std::time::Instant;

use crate::composer::{
    compose, emit_report, parse_manifest, resolve_requires, typecheck_units, FsLoader, LoadedUnit, MashupManifest,
    WovenModel,
};
use crate::contracts::CheckResult;
use crate::diag::{Code, Diagnostic};
use crate::runtime::{
    check_model, load_model, ContractPolicy, Fault, Interpreter, ModelErrorKind, ModelInstance, Trace,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_COMPOSE: i32 = 2;
pub const EXIT_TYPE: i32 = 3;
pub const EXIT_CONTRACT: i32 = 4;
pub const EXIT_FAULT: i32 = 5;

/// Exit code, stdout text and stderr lines of one command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: Vec<String>,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: EXIT_OK,
            stdout,
            stderr: Vec::new(),
        }
    }

    fn fail(code: i32, stderr: Vec<String>) -> Self {
        Outcome {
            code,
            stdout: String::new(),
            stderr,
        }
    }
}

/// Whether diagnostics should carry ANSI color.
pub fn color_enabled() -> bool {
    std::env::var("MASHUP_COLOR").map_or(true, |v| v != "0") && std::io::stderr().is_terminal()
}

fn exit_code_for(code: Code) -> i32 {
    match code {
        Code::SyntaxError | Code::UnitNotFound => EXIT_PARSE,
        Code::TypeError | Code::UnknownFeature | Code::UnknownMethod | Code::ArityMismatch | Code::OverrideError => {
            EXIT_TYPE
        }
        _ => EXIT_COMPOSE,
    }
}

fn diag_failure(diags: &[Diagnostic]) -> Outcome {
    let code = diags
        .iter()
        .map(|d| exit_code_for(d.code))
        .min()
        .unwrap_or(EXIT_COMPOSE);
    let color = color_enabled();
    Outcome::fail(code, diags.iter().map(|d| d.render(color)).collect())
}

/// A composed and type-checked language.
#[derive(Debug, Clone)]
pub struct Language {
    pub manifest: MashupManifest,
    pub units: Vec<LoadedUnit>,
    pub woven: WovenModel,
}

/// Reads a manifest and everything it requires, weaves and type checks.
pub fn load_language(manifest_path: &Path) -> Result<Language, Outcome> {
    let name = manifest_path.to_string_lossy().into_owned();
    let text = std::fs::read_to_string(manifest_path)
        .map_err(|e| Outcome::fail(EXIT_PARSE, vec![format!("{name}: cannot read manifest: {e}")]))?;
    let manifest = parse_manifest(&name, &text).map_err(|d| diag_failure(&[d]))?;
    let dir = manifest_path.parent().map(Path::to_path_buf).unwrap_or_default();
    let units = resolve_requires(&manifest, &dir, &FsLoader).map_err(|d| diag_failure(&d))?;
    let woven = compose(&manifest.package_name, &units).map_err(|d| diag_failure(&d))?;
    let diags = typecheck_units(&units, &woven);
    if !diags.is_empty() {
        return Err(diag_failure(&diags));
    }
    Ok(Language { manifest, units, woven })
}

pub fn read_model(path: &Path, woven: &WovenModel) -> Result<ModelInstance, Outcome> {
    let name = path.to_string_lossy();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Outcome::fail(EXIT_PARSE, vec![format!("{name}: cannot read model: {e}")]))?;
    load_model(&text, woven).map_err(|e| {
        let code = match e.kind {
            ModelErrorKind::Syntax => EXIT_PARSE,
            _ => EXIT_TYPE,
        };
        Outcome::fail(code, vec![format!("{name}: {e}")])
    })
}

pub fn cmd_compose(manifest: &Path) -> Outcome {
    match load_language(manifest) {
        Ok(l) => Outcome::ok(format!(
            "composed {}: {} units, {} classes\n",
            l.woven.package,
            l.units.len(),
            l.woven.classes.len()
        )),
        Err(o) => o,
    }
}

pub fn cmd_emit(manifest: &Path) -> Outcome {
    match load_language(manifest) {
        Ok(l) => Outcome::ok(emit_report(&l.woven)),
        Err(o) => o,
    }
}

/// Invariant check of a whole model.
pub fn cmd_check(manifest: &Path, model: &Path) -> Outcome {
    let lang = match load_language(manifest) {
        Ok(l) => l,
        Err(o) => return o,
    };
    let m = match read_model(model, &lang.woven) {
        Ok(m) => m,
        Err(o) => return o,
    };
    let mut out = String::new();
    let (mut violated, mut errors) = (false, false);
    for r in check_model(&lang.woven, &m) {
        match r {
            CheckResult::Holds => {}
            CheckResult::Violated { name, obj } => {
                violated = true;
                out.push_str(&format!("VIOLATED {name} @ {}\n", m.label(obj)));
            }
            CheckResult::Error { name, obj, fault } => {
                errors = true;
                out.push_str(&format!("ERROR {name} @ {}: {fault}\n", m.label(obj)));
            }
        }
    }
    let code = if violated {
        EXIT_CONTRACT
    } else if errors {
        EXIT_FAULT
    } else {
        EXIT_OK
    };
    Outcome {
        code,
        stdout: out,
        stderr: Vec::new(),
    }
}

fn entry_point(lang: &Language, entry: Option<&str>) -> Result<(String, String), Outcome> {
    let (class, op) = match entry {
        Some(e) => match e.split_once('.') {
            Some((c, o)) if !c.is_empty() && !o.is_empty() => (c.to_string(), o.to_string()),
            _ => {
                return Err(Outcome::fail(
                    EXIT_PARSE,
                    vec![format!("--entry must look like Class.op, got `{e}`")],
                ))
            }
        },
        None => lang.manifest.main.clone().ok_or_else(|| {
            Outcome::fail(
                EXIT_PARSE,
                vec!["no entry point: pass --entry Class.op or add `main` to the manifest".into()],
            )
        })?,
    };
    if lang.woven.signature(&class, &op).is_none() {
        return Err(Outcome::fail(
            EXIT_TYPE,
            vec![format!("entry point `{class}.{op}` does not exist")],
        ));
    }
    Ok((class, op))
}

fn fault_code(f: &Fault) -> i32 {
    if f.is_contract_violation() {
        EXIT_CONTRACT
    } else {
        EXIT_FAULT
    }
}

/// Runs the entry point on every matching root; the trace goes to stdout
/// even when execution stops on a fault.
pub fn execute(
    woven: &WovenModel,
    model: ModelInstance,
    class: &str,
    op: &str,
    policy: ContractPolicy,
) -> (Trace, Result<(), Fault>) {
    let mut it = Interpreter::new(woven, model, policy);
    let r = it.run_entry_point(class, op);
    (it.into_parts().1, r)
}

pub fn cmd_run(manifest: &Path, model: &Path, entry: Option<&str>, policy: ContractPolicy) -> Outcome {
    let lang = match load_language(manifest) {
        Ok(l) => l,
        Err(o) => return o,
    };
    let (class, op) = match entry_point(&lang, entry) {
        Ok(e) => e,
        Err(o) => return o,
    };
    let m = match read_model(model, &lang.woven) {
        Ok(m) => m,
        Err(o) => return o,
    };
    let (trace, r) = execute(&lang.woven, m, &class, &op, policy);
    let mut stdout = String::new();
    for l in trace.lines() {
        stdout.push_str(&l);
        stdout.push('\n');
    }
    match r {
        Ok(()) => Outcome::ok(stdout),
        Err(f) => Outcome {
            code: fault_code(&f),
            stdout,
            stderr: vec![format!("{}: {f}", model.to_string_lossy())],
        },
    }
}

/// Timing summary of repeated runs, in milliseconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchStats {
    pub reps: usize,
    pub mean_ms: f64,
    pub min_ms: f64,
    pub max_ms: f64,
}

/// Runs the entry point `reps` times on fresh copies of `model`, timing
/// execution only.
pub fn bench(
    woven: &WovenModel,
    model: &ModelInstance,
    class: &str,
    op: &str,
    policy: ContractPolicy,
    reps: usize,
) -> Result<BenchStats, Fault> {
    let mut times = Vec::with_capacity(reps);
    for _ in 0..reps.max(1) {
        let copy = model.clone();
        let start = Instant::now();
        let mut it = Interpreter::new(woven, copy, policy);
        it.trace_calls = false;
        it.run_entry_point(class, op)?;
        times.push(start.elapsed().as_secs_f64() * 1000.0);
    }
    let n = times.len();
    Ok(BenchStats {
        reps: n,
        mean_ms: times.iter().sum::<f64>() / n as f64,
        min_ms: times.iter().copied().fold(f64::INFINITY, f64::min),
        max_ms: times.iter().copied().fold(0.0, f64::max),
    })
}

pub fn cmd_bench(manifest: &Path, model: &Path, entry: Option<&str>, policy: ContractPolicy, reps: usize) -> Outcome {
    let lang = match load_language(manifest) {
        Ok(l) => l,
        Err(o) => return o,
    };
    let (class, op) = match entry_point(&lang, entry) {
        Ok(e) => e,
        Err(o) => return o,
    };
    let m = match read_model(model, &lang.woven) {
        Ok(m) => m,
        Err(o) => return o,
    };
    match bench(&lang.woven, &m, &class, &op, policy, reps) {
        Ok(s) => Outcome::ok(format!(
            "model: {} elements\nruns: {}\nmean: {:.3} ms\nmin: {:.3} ms\nmax: {:.3} ms\n",
            m.len(),
            s.reps,
            s.mean_ms,
            s.min_ms,
            s.max_ms
        )),
        Err(f) => Outcome::fail(fault_code(&f), vec![format!("{}: {f}", model.to_string_lossy())]),
    }
}
