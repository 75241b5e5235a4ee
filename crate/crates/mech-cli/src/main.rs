use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use mech_scenarios::{lookup, EventRecord, registry, IntegratorKind, Overrides, Run, RunConfig, Scenario, ScenarioError, ScenarioReport};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

#[derive(Parser)]
#[command(name = "mech", version, about = "Run and check dissipative mechanics scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a scenario and write its trajectory as CSV.
    Simulate(RunArgs),
    /// Run a scenario's checks and print a JSON report.
    Check {
        #[command(flatten)]
        run: RunArgs,
        /// Check every registered scenario.
        #[arg(long, conflicts_with = "scenario")]
        all: bool,
    },
    /// Energy against time for the midpoint and RK4 integrators and a reference.
    Compare(RunArgs),
    /// List the registered scenarios.
    List,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long = "t-end")]
    t_end: Option<f64>,
    #[arg(long)]
    integrator: Option<IntegratorKind>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON file of overrides, applied before the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "max-events")]
    max_events: Option<usize>,
    #[arg(long = "min-gap")]
    min_gap: Option<f64>,
    /// Coefficient of restitution.
    #[arg(long)]
    e: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Scenario(e) if e.is_usage() => 2,
            _ => 3,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

impl RunArgs {
    fn overrides(&self) -> Result<Overrides> {
        let base = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
                serde_json::from_str::<Overrides>(&text)
                    .map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))?
            }
            None => Overrides::default(),
        };
        let flags = Overrides {
            dt: self.dt,
            t_end: self.t_end,
            integrator: self.integrator,
            e: self.e,
            max_events: self.max_events,
            min_gap: self.min_gap,
            seed: self.seed,
            params: Default::default(),
        };
        Ok(base.layered(&flags))
    }

    fn scenario(&self) -> Result<&'static Scenario> {
        let id = self.scenario.as_deref().ok_or_else(|| CliError::Usage("--scenario is required".into()))?;
        Ok(lookup(id)?)
    }

    fn resolve(&self) -> Result<(&'static Scenario, RunConfig)> {
        let s = self.scenario()?;
        let cfg = s.resolve(&self.overrides()?)?;
        Ok((s, cfg))
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(fs::File::create(p)?)),
        None => Box::new(io::BufWriter::new(io::stdout())),
    })
}

/// Seventeen significant digits, enough to round-trip any double.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_csv(run: &Run, w: &mut dyn Write) -> Result<()> {
    let traj = &run.trajectory;
    let first = &traj.samples[0];
    let n = first.q.len();
    let mut header = vec!["t".to_string()];
    header.extend((0..n).map(|i| format!("q{i}")));
    header.extend((0..first.m.len()).map(|i| format!("m{i}")));
    if first.z.is_some() {
        header.push("z".into());
    }
    header.push("event".into());
    writeln!(w, "{}", header.join(","))?;
    let mut marks = traj.events.iter().peekable();
    for (k, s) in traj.samples.iter().enumerate() {
        let mut row = vec![num(s.t)];
        row.extend(s.q.iter().chain(&s.m).map(|&x| num(x)));
        if let Some(z) = s.z {
            row.push(num(z));
        }
        let mut label = "";
        while let Some((i, l)) = marks.peek() {
            if *i > k {
                break;
            }
            if *i == k {
                label = l;
            }
            marks.next();
        }
        row.push(label.to_string());
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct FinalState {
    t: f64,
    q: Vec<f64>,
    m: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    z: Option<f64>,
}

#[derive(Serialize)]
struct Summary<'a> {
    scenario: &'a str,
    integrator: &'a str,
    dt: f64,
    t_end: f64,
    samples: usize,
    events: &'a [EventRecord],
    final_state: FinalState,
    runtime_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn simulate(args: &RunArgs) -> Result<()> {
    let (s, cfg) = args.resolve()?;
    let start = Instant::now();
    let (run, failure) = match s.simulate(&cfg) {
        Ok(run) => (run, None),
        Err(e) if e.is_usage() => return Err(e.into()),
        Err(e) => match Run::partial(&e) {
            Some(run) => (run, Some(e)),
            None => return Err(e.into()),
        },
    };
    let mut w = output(args.out.as_deref())?;
    write_csv(&run, &mut *w)?;
    w.flush()?;
    let end = run.trajectory.final_state();
    let summary = Summary {
        scenario: s.id,
        integrator: cfg.integrator.name(),
        dt: cfg.dt,
        t_end: cfg.t_end,
        samples: run.trajectory.samples.len(),
        events: &run.events,
        final_state: FinalState { t: end.t, q: end.q.clone(), m: end.m.clone(), z: end.z },
        runtime_s: start.elapsed().as_secs_f64(),
        error: failure.as_ref().map(|e| e.to_string()),
    };
    let json = serde_json::to_string_pretty(&summary)?;
    // With the CSV on stdout the summary goes to stderr.
    if args.out.is_some() {
        println!("{json}");
    } else {
        eprintln!("{json}");
    }
    match failure {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

fn status_line(r: &ScenarioReport) -> String {
    let failed = r.checks.iter().filter(|c| !c.pass).count();
    match (&r.error, failed) {
        (Some(e), _) => format!("ERROR {}: {e}", r.scenario),
        (None, 0) => format!("PASS  {} ({} checks, {:.2}s)", r.scenario, r.checks.len(), r.runtime_s),
        (None, k) => format!("FAIL  {} ({k} of {} checks failed)", r.scenario, r.checks.len()),
    }
}

fn check(args: &RunArgs, all: bool) -> Result<u8> {
    let reports: Vec<ScenarioReport> = if all {
        let o = args.overrides()?;
        let configs = registry().iter().map(|s| Ok((s, s.resolve(&o)?))).collect::<Result<Vec<_>>>()?;
        configs.par_iter().map(|(s, cfg)| s.run_checks(cfg)).collect()
    } else {
        let (s, cfg) = args.resolve()?;
        vec![s.run_checks(&cfg)]
    };
    let mut w = output(args.out.as_deref())?;
    if all {
        serde_json::to_writer_pretty(&mut w, &reports)?;
    } else {
        serde_json::to_writer_pretty(&mut w, &reports[0])?;
    }
    writeln!(w)?;
    w.flush()?;
    for r in &reports {
        eprintln!("{}", status_line(r));
    }
    Ok(if reports.iter().any(|r| r.error.is_some()) {
        3
    } else if reports.iter().all(ScenarioReport::pass) {
        0
    } else {
        1
    })
}

fn compare(args: &RunArgs) -> Result<()> {
    let (s, cfg) = args.resolve()?;
    if !s.supports_compare() {
        return Err(CliError::Usage(format!("scenario '{}' has no integrator comparison", s.id)));
    }
    let rows = s.compare(&cfg)?;
    let mut w = output(args.out.as_deref())?;
    writeln!(w, "t,E_midpoint,E_rk4,E_reference")?;
    for r in rows {
        writeln!(w, "{}", r.iter().map(|&x| num(x)).collect::<Vec<_>>().join(","))?;
    }
    w.flush()?;
    Ok(())
}

fn list() -> Result<()> {
    for s in registry() {
        let params: Vec<String> = s.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        println!("{:<28} {}  [{}]", s.id, s.summary, params.join(" "));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(a) => simulate(a).map(|_| 0),
        Command::Check { run, all } => check(run, *all),
        Command::Compare(a) => compare(a).map(|_| 0),
        Command::List => list().map(|_| 0),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
