//! `xnli`: batch front end over the engine.
//!
//! Every subcommand prints one pretty JSON document with sorted keys on
//! stdout. Failures print `{"error": {"code", "message"}}` on stderr and exit
//! with 1 for bad input or 2 for internal faults.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;
use xnli_core::interpret::EncodingIntent;
use xnli_core::{
    adjust, explain, generate_examples, interpret, load_csv, Adjustment, ChartSpec, Dataset, Interpretation,
    PreferenceStore,
};
use xnli_service::{seed_from_env, Config, SEED_ENV};

#[derive(Parser)]
#[command(name = "xnli", version, about = "Explainable natural-language charts over CSV data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Interpret a query into attributes, tasks and encoding intent.
    Interpret(QueryArgs),
    /// Interpret a query and print chart, provenance trace and hints.
    Explain(QueryArgs),
    /// Apply a widget edit to a chart and print the interaction hints.
    Hint(HintArgs),
    /// Generate validated query examples for a chart.
    Examples(ExamplesArgs),
    /// Run the HTTP session service.
    Serve(ServeArgs),
}

#[derive(Args)]
struct QueryArgs {
    /// CSV file.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    query: String,
    /// Preferred attribute for an ambiguous word, as `word=Attribute`.
    #[arg(long = "prefer", value_name = "WORD=ATTRIBUTE")]
    prefer: Vec<String>,
}

#[derive(Args)]
struct HintArgs {
    #[arg(long)]
    data: PathBuf,
    /// Chart before the edit: a Vega-Lite file or inline JSON. Defaults to
    /// the chart of `--query`.
    #[arg(long)]
    spec: Option<String>,
    /// The edit: a file or inline JSON.
    #[arg(long)]
    adjust: String,
    /// Query the chart came from. Needed for hints that point at query words.
    #[arg(long)]
    query: Option<String>,
    #[arg(long = "prefer", value_name = "WORD=ATTRIBUTE")]
    prefer: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ExamplesArgs {
    #[arg(long)]
    data: PathBuf,
    /// Target chart: a Vega-Lite file or inline JSON.
    #[arg(long)]
    spec: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, env = "XNLI_PORT", default_value_t = 8080)]
    port: u16,
    /// Directory for persisted datasets and sessions; in-memory if omitted.
    #[arg(long)]
    data_dir: Option<PathBuf>,
}

struct Failure {
    code: String,
    message: String,
    internal: bool,
}

impl Failure {
    fn input(code: &str, message: impl Into<String>) -> Failure {
        Failure { code: code.into(), message: message.into(), internal: false }
    }

    fn internal(message: impl Into<String>) -> Failure {
        Failure { code: "Internal".into(), message: message.into(), internal: true }
    }
}

impl From<xnli_core::Error> for Failure {
    fn from(e: xnli_core::Error) -> Failure {
        Failure {
            code: e.code().into(),
            message: e.to_string(),
            internal: matches!(e, xnli_core::Error::InconsistentDelta),
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    // Going through `Value` sorts object keys.
    let v = serde_json::to_value(value).map_err(|e| Failure::internal(e.to_string()))?;
    serde_json::to_string_pretty(&v).map_err(|e| Failure::internal(e.to_string()))
}

fn load_data(path: &PathBuf) -> Result<Dataset, Failure> {
    let file = fs::File::open(path).map_err(|e| Failure::input("Io", format!("{}: {e}", path.display())))?;
    let name = path.file_stem().map_or_else(|| "dataset".into(), |s| s.to_string_lossy().into_owned());
    Ok(load_csv(file, &name)?)
}

/// Reads inline JSON, or the file it names.
fn json_arg(arg: &str) -> Result<serde_json::Value, Failure> {
    let text = if arg.trim_start().starts_with(['{', '[']) {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|e| Failure::input("Io", format!("{arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Failure::input("BadJson", format!("{arg}: {e}")))
}

fn prefs(pairs: &[String]) -> Result<PreferenceStore, Failure> {
    let mut store = PreferenceStore::new();
    for p in pairs {
        let (word, attr) = p
            .split_once('=')
            .ok_or_else(|| Failure::input("BadPreference", format!("expected WORD=ATTRIBUTE, got {p:?}")))?;
        store.set(word.trim(), attr.trim());
    }
    Ok(store)
}

fn spec_arg(arg: &str, ds: &Dataset) -> Result<ChartSpec, Failure> {
    Ok(ChartSpec::from_vega_lite(&json_arg(arg)?)?.conform(ds)?)
}

fn query_data(args: &QueryArgs) -> Result<Dataset, Failure> {
    if args.query.trim().is_empty() {
        return Err(xnli_core::Error::EmptyQuery.into());
    }
    let path = args.data.as_ref().ok_or_else(|| Failure::input("MissingData", "--data is required"))?;
    load_data(path)
}

fn run(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Interpret(args) => {
            let ds = query_data(&args)?;
            to_json(&interpret(&args.query, &ds, &prefs(&args.prefer)?)?)
        }
        Command::Explain(args) => {
            let ds = query_data(&args)?;
            to_json(&explain(&args.query, &ds, &prefs(&args.prefer)?)?)
        }
        Command::Hint(args) => {
            let ds = load_data(&args.data)?;
            let prefs = prefs(&args.prefer)?;
            let adj: Adjustment = serde_json::from_value(json_arg(&args.adjust)?)
                .map_err(|e| Failure::input("BadAdjustment", e.to_string()))?;
            let (interp, spec) = match (&args.query, &args.spec) {
                (Some(q), spec) => {
                    let r = explain(q, &ds, &prefs)?;
                    let spec = match spec {
                        Some(s) => spec_arg(s, &ds)?,
                        None => r.spec,
                    };
                    (r.interp, spec)
                }
                (None, Some(s)) => (bare_interpretation(), spec_arg(s, &ds)?),
                (None, None) => return Err(Failure::input("MissingSpec", "give --spec or --query")),
            };
            to_json(&adjust(&interp, &spec, &adj, &ds, &prefs, args.seed)?)
        }
        Command::Examples(args) => {
            let ds = load_data(&args.data)?;
            let spec = spec_arg(&args.spec, &ds)?;
            to_json(&generate_examples(&spec, &ds, args.seed)?)
        }
        Command::Serve(args) => {
            let filter = tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into());
            tracing_subscriber::fmt().with_env_filter(filter).with_writer(std::io::stderr).init();
            let config = Config { port: args.port, data_dir: args.data_dir, seed_override: seed_from_env() };
            if config.seed_override.is_some() {
                eprintln!("{SEED_ENV} set: example seeds are fixed");
            }
            let rt = tokio::runtime::Runtime::new().map_err(|e| Failure::internal(e.to_string()))?;
            rt.block_on(xnli_service::serve(config)).map_err(|e| Failure::internal(e.to_string()))?;
            Ok(String::new())
        }
    }
}

/// Interpretation of a chart given without a query: nothing was said.
fn bare_interpretation() -> Interpretation {
    Interpretation {
        query: String::new(),
        attribute_refs: Vec::new(),
        tasks: Vec::new(),
        encoding_intent: EncodingIntent::default(),
        unparsed_keywords: Vec::new(),
    }
}

fn fail(f: Failure) -> ExitCode {
    let body = json!({ "error": { "code": f.code, "message": f.message } });
    eprintln!("{}", serde_json::to_string_pretty(&body).unwrap_or_default());
    ExitCode::from(if f.internal { 2 } else { 1 })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(Failure::input("Usage", e.to_string().trim())),
    };
    match run(cli) {
        Ok(out) => {
            if !out.is_empty() {
                // A closed pipe (`xnli ... | head`) is not an error.
                let _ = writeln!(std::io::stdout(), "{out}");
            }
            ExitCode::SUCCESS
        }
        Err(f) => fail(f),
    }
}
