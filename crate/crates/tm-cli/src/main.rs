use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tm_cli::export::{export_behavior, export_dynamic, export_static};
use tm_cli::table::{table_to_csv, table_to_text};
use tm_cli::trace_io::{load_trace, save_trace};
use tm_cli::{color_enabled, render_diagnostic, run_batch};
use tm_core::behavior::{derive_behavior, emit_pa_table};
use tm_core::diag::Diagnostic;
use tm_core::dynamics::{event_trigger_links, run_scenario, SlotState, Trace};
use tm_core::regions::{enumerate_regions, DEFAULT_CAP};
use tm_core::{parse_model, parse_scenario, validate_with, StaticModel};

#[derive(Parser)]
#[command(
    name = "tm",
    version,
    about = "Validate, simulate, and render two-level thimac models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a model and check the well-formedness rules
    Validate {
        file: PathBuf,
        /// Treat V1/V3 warnings as errors
        #[arg(long)]
        strict: bool,
    },
    /// Run a scenario (or a directory of scenarios) over a model
    Simulate(SimulateArgs),
    /// Print the P/A duration table of a saved trace
    Table {
        trace: PathBuf,
        /// Also write the table as CSV
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Derive the behavior graph of a saved trace
    Behavior {
        trace: PathBuf,
        /// Write graph text here instead of stdout
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Export a model as graph-description text
    Render {
        model: PathBuf,
        #[arg(long, value_enum, default_value_t = Level::Static)]
        level: Level,
        /// Slot to render at (dynamic level)
        #[arg(long, required_if_eq("level", "dynamic"))]
        slot: Option<u32>,
        /// Trace supplying the slot state; omitted means full potentiality
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write graph text here instead of stdout
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Enumerate connected induced subdiagrams up to a node budget
    Regions {
        model: PathBuf,
        #[arg(long)]
        max_nodes: usize,
        /// Abort if the enumeration would exceed this many regions
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("input").required(true).multiple(false))]
struct SimulateArgs {
    model: PathBuf,
    /// Scenario file to run
    #[arg(long, group = "input")]
    scenario: Option<PathBuf>,
    /// Run every .tms file in this directory instead
    #[arg(long, group = "input")]
    batch: Option<PathBuf>,
    /// Override the scenario horizon
    #[arg(long)]
    slots: Option<u32>,
    /// Write the trace here instead of stdout
    #[arg(long, conflicts_with = "batch")]
    out: Option<PathBuf>,
    /// Directory for batch traces (one per scenario)
    #[arg(long, requires = "batch", conflicts_with = "scenario")]
    out_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Level {
    Static,
    Dynamic,
}

enum Failure {
    Diagnostics(Vec<Diagnostic>),
    Message(String),
}

impl From<Vec<Diagnostic>> for Failure {
    fn from(diags: Vec<Diagnostic>) -> Self {
        Failure::Diagnostics(diags)
    }
}

impl From<String> for Failure {
    fn from(message: String) -> Self {
        Failure::Message(message)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(Failure::Diagnostics(diags)) => {
            let color = color_enabled();
            for d in &diags {
                eprintln!("{}", render_diagnostic(d, color));
            }
            ExitCode::from(1)
        }
        Err(Failure::Message(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Message(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::Message(format!("{}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<StaticModel, Failure> {
    let text = read_file(path)?;
    parse_model(&text, &path.display().to_string()).map_err(Failure::from)
}

fn load_trace_file(path: &Path) -> Result<Trace, Failure> {
    let text = read_file(path)?;
    load_trace(&text).map_err(|e| Failure::Message(format!("{}: {e}", path.display())))
}

fn emit(text: &str, sink: Option<&PathBuf>) -> Result<(), Failure> {
    match sink {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(command: Command) -> Result<ExitCode, Failure> {
    match command {
        Command::Validate { file, strict } => {
            let model = load_model(&file)?;
            let report = validate_with(&model, strict);
            let color = color_enabled();
            for d in &report.diagnostics {
                eprintln!("{}", render_diagnostic(d, color));
            }
            let errors = report.diagnostics.iter().filter(|d| d.is_error()).count();
            let warnings = report.diagnostics.len() - errors;
            eprintln!(
                "{}: {} error(s), {} warning(s)",
                file.display(),
                errors,
                warnings
            );
            Ok(if report.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Simulate(args) => simulate(args),
        Command::Table { trace, csv } => {
            let trace = load_trace_file(&trace)?;
            let table = emit_pa_table(&trace);
            if let Some(path) = csv {
                write_file(&path, &table_to_csv(&table))?;
            }
            print!("{}", table_to_text(&table));
            Ok(ExitCode::SUCCESS)
        }
        Command::Behavior { trace, dot } => {
            let trace = load_trace_file(&trace)?;
            let graph = derive_behavior(&trace);
            emit(&export_behavior(&trace, &graph), dot.as_ref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Render {
            model,
            level,
            slot,
            trace,
            dot,
        } => {
            let model = load_model(&model)?;
            let text = match level {
                Level::Static => export_static(&model),
                Level::Dynamic => {
                    let slot = slot.expect("clap enforces --slot for dynamic");
                    let state = match trace {
                        Some(path) => {
                            let trace = load_trace_file(&path)?;
                            let keys: Vec<String> =
                                model.events().iter().map(|e| e.key.clone()).collect();
                            if trace.events != keys {
                                return Err(Failure::Message(format!(
                                    "trace events do not match model `{}`",
                                    model.name()
                                )));
                            }
                            if slot < 1 || slot > trace.horizon {
                                return Err(Failure::Message(format!(
                                    "slot {slot} lies outside 1..={}",
                                    trace.horizon
                                )));
                            }
                            trace.slots[(slot - 1) as usize].clone()
                        }
                        None => SlotState::new(
                            slot,
                            vec![tm_core::dynamics::PAState::Potential; model.events().len()],
                            vec![false; model.events().len()],
                        ),
                    };
                    export_dynamic(&model, &state)
                }
            };
            emit(&text, dot.as_ref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Regions {
            model,
            max_nodes,
            cap,
        } => {
            let model = load_model(&model)?;
            let regions = enumerate_regions(&model, max_nodes, cap).map_err(|e| e.to_string())?;
            let mut out = String::new();
            for region in &regions {
                let paths: Vec<String> = region
                    .nodes
                    .iter()
                    .map(|&n| model.action_path(n))
                    .collect();
                out.push_str(&format!("{{{}}}\n", paths.join(", ")));
            }
            print!("{out}");
            eprintln!("{} region(s) with at most {max_nodes} node(s)", regions.len());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn warn_dormant(model: &StaticModel) -> Result<(), Failure> {
    let links = event_trigger_links(model).map_err(|e| e.to_string())?;
    for arc in &links.dormant {
        let a = model.arc(*arc);
        eprintln!(
            "warning: dormant trigger {} -> {} (no event region covers both endpoints)",
            model.action_path(a.src),
            model.action_path(a.dst)
        );
    }
    Ok(())
}

fn simulate(args: SimulateArgs) -> Result<ExitCode, Failure> {
    let model = load_model(&args.model)?;
    warn_dormant(&model)?;
    if let Some(dir) = &args.batch {
        return simulate_batch(&model, dir, args.slots, args.out_dir.as_ref());
    }
    let scenario_path = args.scenario.expect("clap requires an input");
    let text = read_file(&scenario_path)?;
    let script = parse_scenario(
        &text,
        &model,
        &scenario_path.display().to_string(),
        args.slots,
    )?;
    let trace = run_scenario(&model, &script).map_err(|e| e.to_string())?;
    emit(&save_trace(&trace), args.out.as_ref())?;
    Ok(ExitCode::SUCCESS)
}

fn simulate_batch(
    model: &StaticModel,
    dir: &Path,
    slots: Option<u32>,
    out_dir: Option<&PathBuf>,
) -> Result<ExitCode, Failure> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| format!("{}: {e}", dir.display()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "tms"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Failure::Message(format!(
            "{}: no .tms scenarios found",
            dir.display()
        )));
    }
    let mut scripts = Vec::new();
    for path in &paths {
        let text = read_file(path)?;
        scripts.push(parse_scenario(&text, model, &path.display().to_string(), slots)?);
    }
    let traces = run_batch(model, &scripts);
    if let Some(out_dir) = out_dir {
        fs::create_dir_all(out_dir).map_err(|e| format!("{}: {e}", out_dir.display()))?;
    }
    for result in &traces {
        let trace = result.as_ref().map_err(|e| e.to_string())?;
        println!(
            "{}: horizon {} slots, {} firing(s)",
            trace.scenario,
            trace.horizon,
            trace.firings.len()
        );
        if let Some(out_dir) = out_dir {
            write_file(
                &out_dir.join(format!("{}.json", trace.scenario)),
                &save_trace(trace),
            )?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
