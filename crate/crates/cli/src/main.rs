use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use filtration_core::decomposition::GVariant;
use filtration_lab::generate::{generate, Kind};
use filtration_lab::report::{Report, Section};
use filtration_lab::run;
use filtration_lab::scenario::{load_scenario, save_scenario, scenario_text, Scenario, ScenarioError};
use serde_json::json;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

/// Exact verification of random times and enlarged filtrations on finite scenarios.
#[derive(Debug, Parser)]
#[command(name = "filtration-lab", version)]
struct Cli {
    /// Reject unknown keys and treat skipped preconditions as failures.
    #[arg(long, global = true)]
    strict: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Add wall-clock time per section (reports are then no longer reproducible).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Hypotheses satisfied by the random time.
    Classify { scenario: PathBuf },
    /// F- and G-compensators of the default indicator.
    Compensate { scenario: PathBuf },
    /// G-semimartingale decomposition of an F-martingale.
    Decompose {
        scenario: PathBuf,
        #[arg(long, value_parser = parse_variant)]
        variant: GVariant,
        /// Process to decompose; defaults to U, or to the martingale part of G.
        #[arg(long)]
        process: Option<String>,
    },
    /// Random time realizing a given Azéma submartingale.
    Construct {
        scenario: PathBuf,
        #[arg(long = "from-submartingale", value_name = "PROCESS")]
        from_submartingale: String,
        /// Use the optional multiplicative system instead of the predictable one.
        #[arg(long)]
        optional: bool,
        /// Write the realized scenario here.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Canonical extension carrying a time with the scenario's field.
    Extend {
        scenario: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Equivalent measure under which immersion holds.
    Immerse { scenario: PathBuf },
    /// Information drift of the market process.
    InfoDrift { scenario: PathBuf },
    /// Every applicable check, on a file or on generated scenarios.
    VerifyAll {
        scenario: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
    /// Print or write a generated scenario.
    Generate {
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Kind::Random)]
        kind: Kind,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn parse_variant(s: &str) -> Result<GVariant, String> {
    s.parse().map_err(|e: String| {
        let names: Vec<&str> = GVariant::ALL.iter().map(|v| v.as_str()).collect();
        format!("{e}; expected one of {}", names.join(", "))
    })
}

fn configure_threads() {
    if let Some(n) = std::env::var("FILTRATION_LAB_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn write_derived(out: Option<(Section, Option<Scenario>)>, path: Option<&PathBuf>) -> Result<Section, ScenarioError> {
    let (sec, sc) = out.expect("present");
    if let (Some(sc), Some(path)) = (sc, path) {
        save_scenario(&sc, path)?;
    }
    Ok(sec)
}

fn execute(cli: &Cli) -> Result<Option<Report>, ScenarioError> {
    let load = |p: &PathBuf| load_scenario(p, cli.strict);
    let single = |name: &str, f: &dyn Fn() -> Result<Section, ScenarioError>| -> Result<Option<Report>, ScenarioError> {
        let sec = run::with_timing(cli.timing, f)?;
        Ok(Some(Report::new(name, vec![sec])))
    };
    match &cli.command {
        Command::Classify { scenario } => {
            let sc = load(scenario)?;
            single("classify", &|| run::classify(&sc))
        }
        Command::Compensate { scenario } => {
            let sc = load(scenario)?;
            single("compensate", &|| run::compensate(&sc))
        }
        Command::Decompose { scenario, variant, process } => {
            let sc = load(scenario)?;
            single("decompose", &|| run::decompose(&sc, *variant, process.as_deref()))
        }
        Command::Construct { scenario, from_submartingale, optional, output } => {
            let sc = load(scenario)?;
            single("construct", &|| {
                write_derived(Some(run::construct(&sc, from_submartingale, *optional)?), output.as_ref())
            })
        }
        Command::Extend { scenario, output } => {
            let sc = load(scenario)?;
            single("extend", &|| write_derived(Some(run::extend(&sc)?), output.as_ref()))
        }
        Command::Immerse { scenario } => {
            let sc = load(scenario)?;
            single("immerse", &|| run::immerse(&sc))
        }
        Command::InfoDrift { scenario } => {
            let sc = load(scenario)?;
            single("info-drift", &|| run::info_drift(&sc))
        }
        Command::VerifyAll { scenario: Some(path), .. } => {
            let sc = load(path)?;
            let label = path.display().to_string();
            single("verify-all", &|| run::verify_scenario(&sc, label.clone()))
        }
        Command::VerifyAll { scenario: None, seed, count } => {
            configure_threads();
            Ok(Some(run::verify_generated(*seed, *count, cli.timing)))
        }
        Command::Generate { seed, kind, output } => {
            let sc = generate(*kind, *seed);
            match output {
                Some(path) => save_scenario(&sc, path)?,
                None => print!("{}", scenario_text(&sc)),
            }
            Ok(None)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(report)) => {
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report.to_json()).expect("serializable")),
                Format::Text => print!("{}", report.to_text()),
            }
            ExitCode::from(report.exit_code(cli.strict) as u8)
        }
        Err(e) => {
            match cli.format {
                Format::Json => {
                    let (kind, pointer) = match &e {
                        ScenarioError::Parse { .. } => ("parse", None),
                        ScenarioError::Validation { pointer, .. } => ("validation", Some(pointer.clone())),
                        ScenarioError::Io { .. } => ("io", None),
                    };
                    let v = json!({ "error": { "kind": kind, "pointer": pointer, "message": e.to_string() } });
                    println!("{}", serde_json::to_string_pretty(&v).expect("serializable"));
                }
                Format::Text => eprintln!("error: {e}"),
            }
            ExitCode::from(2)
        }
    }
}
