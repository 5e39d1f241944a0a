//! Batch entry point: configure a model, surface, and verification, run it,
//! and emit machine-readable reports.

mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{FileConfig, RunConfig};
use renvol_core::series::LadderSpec;

#[derive(Parser)]
#[command(name = "renvol", version, about = "Renormalized-volume verification workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON configuration file; flags override its entries
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// model name: hyperbolic | round-normal-form | torus | formal-g3
    #[arg(long, global = true)]
    model: Option<String>,
    /// cap latitude parameter t
    #[arg(long, global = true)]
    cap: Option<f64>,
    /// truncation parameter for breakdown runs
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// ladder as eps0,ratio,rungs
    #[arg(long, global = true)]
    ladder: Option<String>,
    /// seed for randomized suites
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// output directory (writes report files instead of stdout)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// output format
    #[arg(long, global = true, default_value = "json")]
    format: String,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Curvature sanity block on a model
    Curvature,
    /// Five-term corner Gauss-Bonnet breakdown at fixed ε
    GaussBonnet,
    /// Renormalized volume of the half region (ladder + fit)
    Renvol,
    /// Residual of the renormalized-volume identity
    Gbrv,
    /// First variation: both sides of the derivative formula
    Vary,
    /// Jacobi problem on the equatorial cap
    Jacobi,
    /// Seeded algebraic-identity and conformal-covariance suites
    Identities,
    /// Renormalized volume across a sweep of cap latitudes
    Sweep,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Curvature => "curvature",
            Command::GaussBonnet => "gauss-bonnet",
            Command::Renvol => "renvol",
            Command::Gbrv => "gbrv",
            Command::Vary => "vary",
            Command::Jacobi => "jacobi",
            Command::Identities => "identities",
            Command::Sweep => "sweep",
        }
    }
}

fn resolve(cli: &Cli) -> Result<RunConfig, String> {
    let file: FileConfig = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
            serde_json::from_str(&text).map_err(|e| format!("invalid config: {e}"))?
        }
        None => FileConfig::default(),
    };
    if let Some(v) = &file.verification {
        if v != cli.command.name() {
            return Err(format!(
                "config requests verification '{v}' but the subcommand is '{}'",
                cli.command.name()
            ));
        }
    }
    let model = cli
        .model
        .clone()
        .or_else(|| file.model.as_ref().map(|m| m.name.clone()))
        .unwrap_or_else(|| "hyperbolic".to_string());
    let known = ["hyperbolic", "round-normal-form", "torus", "formal-g3"];
    if !known.contains(&model.as_str()) {
        return Err(format!("unknown model '{model}' (expected one of {known:?})"));
    }
    let cap = cli
        .cap
        .or_else(|| file.surface.as_ref().and_then(|s| s.cap))
        .unwrap_or(0.0);
    if !(-0.6..=0.6).contains(&cap) {
        return Err(format!("cap latitude {cap} outside the documented range [-0.6, 0.6]"));
    }
    let numeric = file.numeric.unwrap_or_default();
    let epsilon = cli.epsilon.or(numeric.epsilon).unwrap_or(0.1);
    if !(0.01..=0.5).contains(&epsilon) {
        return Err(format!("epsilon {epsilon} outside [0.01, 0.5]"));
    }
    let ladder = match &cli.ladder {
        Some(text) => {
            let parts: Vec<&str> = text.split(',').collect();
            if parts.len() != 3 {
                return Err("--ladder expects eps0,ratio,rungs".to_string());
            }
            let cfg = config::LadderConfig {
                eps0: parts[0].parse().map_err(|e| format!("ladder.eps0: {e}"))?,
                ratio: parts[1].parse().map_err(|e| format!("ladder.ratio: {e}"))?,
                rungs: parts[2].parse().map_err(|e| format!("ladder.rungs: {e}"))?,
            };
            cfg.validate()?
        }
        None => match numeric.ladder {
            Some(cfg) => cfg.validate()?,
            None => LadderSpec::default(),
        },
    };
    let seed = cli.seed.or(file.seed).unwrap_or(7);
    Ok(RunConfig {
        verification: cli.command.name().to_string(),
        model,
        cap,
        epsilon,
        ladder,
        seed,
        tolerances: numeric.tolerances,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match resolve(&cli) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("configuration error: {msg}");
            return ExitCode::from(2);
        }
    };
    let report = match run::run(&cfg) {
        Ok(r) => r,
        Err(renvol_core::Error::Config { detail }) => {
            eprintln!("configuration error: {detail}");
            return ExitCode::from(2);
        }
        Err(e) => {
            // numeric failures become failed checks, not crashes
            let mut doc = run::empty_report(&cfg);
            doc.checks.push(renvol_core::report::CheckLine {
                name: format!("error: {e}"),
                value: f64::NAN,
                tolerance: 0.0,
                pass: false,
            });
            doc.finalize()
        }
    };
    let json = serde_json::to_string_pretty(&report).expect("serializable report");
    let csv = report.to_csv();
    match &cli.out {
        Some(dir) => {
            if let Err(e) = std::fs::create_dir_all(dir) {
                eprintln!("cannot create {}: {e}", dir.display());
                return ExitCode::from(2);
            }
            let write = |name: &str, data: &str| std::fs::write(dir.join(name), data);
            let res = match cli.format.as_str() {
                "json" => write("report.json", &json),
                "csv" => write("report.csv", &csv),
                other => {
                    eprintln!("unknown format '{other}' (expected json or csv)");
                    return ExitCode::from(2);
                }
            };
            if let Err(e) = res {
                eprintln!("write failed: {e}");
                return ExitCode::from(2);
            }
        }
        None => match cli.format.as_str() {
            "json" => println!("{json}"),
            "csv" => print!("{csv}"),
            other => {
                eprintln!("unknown format '{other}' (expected json or csv)");
                return ExitCode::from(2);
            }
        },
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
