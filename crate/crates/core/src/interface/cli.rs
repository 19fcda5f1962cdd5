//! The `policy-lab` command line.
//!
//! Exit codes: `0` success, `1` input or validation error, `2` script
//! runtime error, `3` I/O error.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use crate::dsl::{compile, format_program, parse_source, Diagnostic};
use crate::engine::{
    compare_scenarios, run_scenario, EngineConfig, EngineError, Lever, ScenarioDocument, ScenarioResult, ScriptSource,
};
use crate::interface::service::{self, ServiceState};
use crate::projection::{load_baseline, serialize, ProjectionSeries, Vocabulary};

#[derive(Debug, Parser)]
#[command(name = "policy-lab", version, about = "Design and run plastics policy scenarios")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario against a baseline and write the result CSV.
    Simulate(SimulateArgs),
    /// Lex, parse and check scripts; optionally rewrite them in canonical form.
    Check(CheckArgs),
    /// Compare two scenarios on the same baseline.
    Diff(DiffArgs),
    /// Serve the JSON API (and optionally static UI files).
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct VocabularyArg {
    /// Vocabulary JSON. Defaults to `vocabulary.json` next to the baseline (or scenario).
    #[arg(long)]
    pub vocabulary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub baseline: PathBuf,
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Write per-year diagnostics JSON here.
    #[arg(long)]
    pub diagnostics: Option<PathBuf>,
    #[command(flatten)]
    pub vocab: VocabularyArg,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Check every lever script of a scenario file.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Rewrite files to canonical form.
    #[arg(long)]
    pub fmt: bool,
    /// `.pol` script files.
    pub files: Vec<PathBuf>,
    #[command(flatten)]
    pub vocab: VocabularyArg,
}

#[derive(Debug, Args)]
pub struct DiffArgs {
    #[arg(long)]
    pub baseline: PathBuf,
    /// Exactly two scenario files: A then B.
    #[arg(long = "scenario", num_args = 1, required = true)]
    pub scenarios: Vec<PathBuf>,
    /// Write the cell-wise B - A table here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub vocab: VocabularyArg,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, env = "POLICY_LAB_PORT", default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    #[arg(long)]
    pub baseline: PathBuf,
    #[arg(long, default_value = service::DEFAULT_BASELINE_ID)]
    pub baseline_id: String,
    /// Directory of static files served at `/`.
    #[arg(long = "static")]
    pub static_dir: Option<PathBuf>,
    #[command(flatten)]
    pub vocab: VocabularyArg,
}

/// A failed command: the exit code it maps to and the message for stderr.
#[derive(Debug)]
pub enum Failure {
    Input(String),
    Script(String),
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Input(_) => 1,
            Failure::Script(_) => 2,
            Failure::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Script(m) | Failure::Io(m) => m,
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn vocabulary_path(arg: &VocabularyArg, near: Option<&Path>) -> Result<PathBuf, Failure> {
    if let Some(p) = &arg.vocabulary {
        return Ok(p.clone());
    }
    match near {
        Some(p) => Ok(p.parent().unwrap_or(Path::new(".")).join("vocabulary.json")),
        None => Err(Failure::Input("--vocabulary is required".into())),
    }
}

fn load_vocabulary(path: &Path) -> Result<Arc<Vocabulary>, Failure> {
    let text = read(path)?;
    Vocabulary::from_json(&text)
        .map(Arc::new)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_series(path: &Path, vocab: Arc<Vocabulary>) -> Result<ProjectionSeries, Failure> {
    let text = read(path)?;
    load_baseline(&text, vocab).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

/// Scenario document with scripts inlined, plus where each lever's script came from.
struct LoadedScenario {
    doc: ScenarioDocument,
    origins: BTreeMap<String, String>,
}

fn load_scenario(path: &Path) -> Result<LoadedScenario, Failure> {
    let text = read(path)?;
    let doc = ScenarioDocument::from_json(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut origins = BTreeMap::new();
    for lever in &doc.levers {
        let origin = match &lever.script {
            ScriptSource::Path(p) => base.join(p).display().to_string(),
            ScriptSource::Inline(_) => format!("{} (lever `{}`)", path.display(), lever.id),
        };
        origins.insert(lever.id.clone(), origin);
    }
    let doc = doc.inline_scripts(base).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    Ok(LoadedScenario { doc, origins })
}

fn render_diagnostics(origin: &str, diagnostics: &[Diagnostic]) -> String {
    diagnostics
        .iter()
        .map(|d| format!("{origin}:{}:{}: {}: {}", d.span.line, d.span.column, d.kind, d.message))
        .collect::<Vec<_>>()
        .join("\n")
}

fn engine_failure(err: EngineError, scenario: &Path, origins: &BTreeMap<String, String>) -> Failure {
    let origin = |lever: &str| origins.get(lever).cloned().unwrap_or_else(|| scenario.display().to_string());
    match err {
        EngineError::Script { lever, diagnostics } => Failure::Input(render_diagnostics(&origin(&lever), &diagnostics)),
        EngineError::ScriptRuntime { lever, year, error } => Failure::Script(format!(
            "{}:{}:{}: lever `{lever}` failed in year {year}: {}",
            origin(&lever),
            error.error.span.line,
            error.error.span.column,
            error.error.kind
        )),
        EngineError::ConservationViolated { .. } => Failure::Script(format!("{}: {err}", scenario.display())),
        other => Failure::Input(format!("{}: {other}", scenario.display())),
    }
}

fn run_one(baseline: &ProjectionSeries, scenario_path: &Path) -> Result<ScenarioResult, Failure> {
    let loaded = load_scenario(scenario_path)?;
    let scenario = loaded
        .doc
        .compile(baseline.vocabulary())
        .map_err(|e| engine_failure(e, scenario_path, &loaded.origins))?;
    run_scenario(baseline, &scenario, &EngineConfig::default())
        .map_err(|e| engine_failure(e, scenario_path, &loaded.origins))
}

pub fn cmd_simulate(args: &SimulateArgs, _out: &mut dyn Write) -> Result<(), Failure> {
    let vocab = load_vocabulary(&vocabulary_path(&args.vocab, Some(&args.baseline))?)?;
    let baseline = load_series(&args.baseline, vocab)?;
    let result = run_one(&baseline, &args.scenario)?;
    write(&args.out, &serialize(&result.series))?;
    if let Some(path) = &args.diagnostics {
        write(path, &result.diagnostics_json())?;
    }
    Ok(())
}

pub fn cmd_check(args: &CheckArgs, out: &mut dyn Write) -> Result<(), Failure> {
    if args.scenario.is_none() && args.files.is_empty() {
        return Err(Failure::Input("nothing to check: pass --scenario or .pol files".into()));
    }
    let near = args.scenario.as_deref().or(args.files.first().map(PathBuf::as_path));
    let vocab = load_vocabulary(&vocabulary_path(&args.vocab, near)?)?;

    let mut problems: Vec<String> = Vec::new();
    let mut format_targets: Vec<PathBuf> = args.files.clone();

    for file in &args.files {
        let text = read(file)?;
        if let Err(d) = compile(&text, &file.display().to_string(), &vocab, None) {
            problems.push(render_diagnostics(&file.display().to_string(), &d));
        }
    }

    if let Some(path) = &args.scenario {
        let raw = ScenarioDocument::from_json(&read(path)?)
            .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for lever in &raw.levers {
            if let ScriptSource::Path(p) = &lever.script {
                format_targets.push(base.join(p));
            }
        }
        let loaded = load_scenario(path)?;
        let mut all_levers_ok = true;
        for lever in &loaded.doc.levers {
            let ScriptSource::Inline(script) = &lever.script else { unreachable!("scripts inlined") };
            let built = Lever::new(&lever.id, &lever.display_name, lever.inputs.clone(), script, &lever.description, &vocab);
            if let Err(e) = built {
                all_levers_ok = false;
                problems.push(engine_failure(e, path, &loaded.origins).message().to_string());
            }
        }
        if all_levers_ok {
            if let Err(e) = loaded.doc.compile(&vocab) {
                problems.push(engine_failure(e, path, &loaded.origins).message().to_string());
            }
        }
    }

    if args.fmt {
        for file in &format_targets {
            let text = read(file)?;
            // Files that do not parse are left alone; their errors are reported above.
            if let Ok(program) = parse_source(&text, &file.display().to_string()) {
                let canonical = format_program(&program);
                if canonical != text {
                    write(file, &canonical)?;
                }
            }
        }
    }

    if problems.is_empty() {
        Ok(())
    } else {
        let _ = out;
        Err(Failure::Input(problems.join("\n")))
    }
}

pub fn cmd_diff(args: &DiffArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let [a_path, b_path] = args.scenarios.as_slice() else {
        return Err(Failure::Input(format!("diff takes exactly two --scenario files, got {}", args.scenarios.len())));
    };
    let vocab = load_vocabulary(&vocabulary_path(&args.vocab, Some(&args.baseline))?)?;
    let baseline = load_series(&args.baseline, vocab)?;
    let a = run_one(&baseline, a_path)?;
    let b = run_one(&baseline, b_path)?;
    let cmp = compare_scenarios(&a, &b).map_err(|e| Failure::Input(e.to_string()))?;

    let io = |e: std::io::Error| Failure::Io(e.to_string());
    writeln!(
        out,
        "cumulative_global_mismanaged\ta={}\tb={}\tdelta={}",
        cmp.a.cumulative_global_mismanaged,
        cmp.b.cumulative_global_mismanaged,
        cmp.cumulative_mismanaged_delta()
    )
    .map_err(io)?;
    for (region, fates) in cmp.end_year_fate_deltas() {
        for (fate, delta) in fates {
            writeln!(out, "end_year_fate\t{}\t{region}\t{fate}\tdelta={delta}", cmp.b.end_year).map_err(io)?;
        }
    }
    writeln!(out, "changed_cells\t{}", cmp.deltas.nonzero().count()).map_err(io)?;
    if let Some(path) = &args.out {
        write(path, &cmp.deltas.to_csv())?;
    }
    Ok(())
}

pub fn cmd_serve(args: &ServeArgs) -> Result<(), Failure> {
    let vocab = load_vocabulary(&vocabulary_path(&args.vocab, Some(&args.baseline))?)?;
    let baseline = load_series(&args.baseline, vocab)?;
    let state = Arc::new(ServiceState::new(&args.baseline_id, baseline));
    let app = service::router(state, args.static_dir.clone());
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::Io(e.to_string()))?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind((args.host.as_str(), args.port))
            .await
            .map_err(|e| Failure::Io(format!("bind {}:{}: {e}", args.host, args.port)))?;
        log::info!("listening on {}", listener.local_addr().map_err(|e| Failure::Io(e.to_string()))?);
        service::serve(listener, app).await.map_err(|e| Failure::Io(e.to_string()))
    })
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code; messages go to `out` / `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::Check(a) => cmd_check(a, out),
        Command::Diff(a) => cmd_diff(a, out),
        Command::Serve(a) => cmd_serve(a),
    };
    match result {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "{}", f.message());
            f.exit_code()
        }
    }
}
