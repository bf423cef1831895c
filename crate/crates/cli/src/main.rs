//! `anomalous`: runs the reduction chain and its checks on scenario files.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anomalous_core::pack;
use anomalous_core::pipeline::{run_approx, run_pipeline, run_reduce, run_thresholds, verify_report};
use anomalous_core::scenario::{to_pretty_json, Scenario};
use anomalous_core::suites::run_property_suites;
use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

#[derive(Parser)]
#[command(name = "anomalous", version, about = "Exact morphism approximation and witness transport on scenario files")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Scenario file, or a directory of `*.json` scenarios.
    #[arg(long)]
    scenario: PathBuf,
    /// Overrides the scenario's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the scenario's search budget.
    #[arg(long)]
    budget: Option<u64>,
    /// Writes the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Weighted approximation of every scenario morphism at Q = Q0.
    Approx(Common),
    /// Specialize, translate and project every cloud witness.
    Reduce(Common),
    /// The full chain with transported witnesses and the morphism family.
    Pipeline(Common),
    /// Re-checks a pipeline report from its serialized form.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Existing pipeline report; by default the pipeline is rerun.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Threshold constants and the case of every morphism.
    Thresholds(Common),
    /// Seeded property suites.
    Report(Common),
}

#[derive(Serialize)]
struct Batch {
    schema: &'static str,
    reports: Vec<Value>,
    pass: bool,
}

fn load(common: &Common) -> Result<Vec<Scenario>> {
    let paths = if common.scenario.is_dir() {
        pack::scenario_files(&common.scenario)?
    } else {
        vec![common.scenario.clone()]
    };
    paths
        .iter()
        .map(|p| {
            let mut sc = pack::load_file(p).with_context(|| format!("loading {}", p.display()))?;
            if let Some(s) = common.seed {
                sc.data.params.seed = s;
            }
            if let Some(b) = common.budget {
                sc = sc.with_budget(b);
            }
            Ok(sc)
        })
        .collect()
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn run_one(cmd: &Command, sc: &Scenario, report: Option<&Path>) -> Result<Value> {
    Ok(match cmd {
        Command::Approx(_) => to_value(&run_approx(sc)?),
        Command::Reduce(_) => to_value(&run_reduce(sc)?),
        Command::Pipeline(_) => to_value(&run_pipeline(sc)?),
        Command::Verify { .. } => {
            let text = match report {
                Some(p) => std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
                None => to_pretty_json(&run_pipeline(sc)?),
            };
            to_value(&verify_report(sc, &text)?)
        }
        Command::Thresholds(_) => to_value(&run_thresholds(sc)?),
        Command::Report(_) => to_value(&run_property_suites(sc, sc.data.params.seed)),
    })
}

fn run(cli: &Cli) -> Result<bool> {
    let (common, report) = match &cli.command {
        Command::Approx(c) | Command::Reduce(c) | Command::Pipeline(c) | Command::Thresholds(c) | Command::Report(c) => (c, None),
        Command::Verify { common, report } => (common, report.as_deref()),
    };
    let scenarios = load(common)?;
    if report.is_some() && scenarios.len() != 1 {
        anyhow::bail!("--report needs a single scenario file");
    }
    let mut reports = Vec::new();
    for sc in &scenarios {
        reports.push(run_one(&cli.command, sc, report).with_context(|| format!("scenario {}", sc.name()))?);
    }
    let pass = reports.iter().all(|r| r.get("pass") == Some(&Value::Bool(true)));
    let text = if common.scenario.is_dir() {
        to_pretty_json(&Batch {
            schema: "anomalous-batch/1",
            reports,
            pass,
        })
    } else {
        to_pretty_json(&reports[0])
    };
    match &common.out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
