//! `ice-nav`: scenario generation, single trials, batches, aggregation and plots.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use icenav::bench::{
    aggregate, emit_plots, read_records, run_batch, scenario_id, scenario_seed, trajectory_svg, write_summary_csv,
    write_timing_csv, BatchConfig, BatchError, ConfigError, Overlay, TrialRecord,
};
use icenav::ice::{generate_scenario, Scenario};
use icenav::navigator::{run_trial_traced, NavigatorKind};
use icenav::planner::ControlSet;
use icenav::sim::{read_trajectory_log, write_trajectory_log, TrajectorySample};

const RECORDS: &str = "records.jsonl";

#[derive(Parser)]
#[command(name = "ice-nav", version, about = "Ship navigation through broken ice")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write scenario files for each (concentration, trial).
    Generate(Common),
    /// Run one trial and print its record.
    Run {
        #[command(flatten)]
        common: Common,
        /// Scenario file to use instead of generating one.
        #[arg(long)]
        scenario: Option<PathBuf>,
    },
    /// Run every navigator on every scenario, resuming an existing record log.
    Batch(Common),
    /// Rebuild summary.csv and timing.csv from the record log.
    Aggregate(Common),
    /// Render plots from the record log and any saved traces.
    Plot(Common),
    /// Re-render a logged trajectory over its scenario.
    Replay {
        #[command(flatten)]
        common: Common,
        /// Trajectory CSV written by `run` or by a batch with traces enabled.
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        scenario: Option<PathBuf>,
    },
}

/// Flags shared by every verb; each overrides the config file.
#[derive(Args, Default)]
struct Common {
    #[arg(long, env = "ICE_NAV_CONFIG")]
    config: Option<PathBuf>,
    /// Ice concentrations, comma separated.
    #[arg(long, env = "ICE_NAV_CONCENTRATION", value_delimiter = ',')]
    concentration: Vec<f64>,
    /// Trials per concentration.
    #[arg(long, env = "ICE_NAV_TRIALS")]
    trials: Option<usize>,
    /// Base seed; trial `i` uses `seed + i`.
    #[arg(long, env = "ICE_NAV_SEED")]
    seed: Option<u64>,
    /// Navigators, comma separated: lattice, straight, skeleton-proxy.
    #[arg(long, env = "ICE_NAV_NAVIGATOR", value_delimiter = ',')]
    navigator: Vec<NavigatorKind>,
    /// Weight of the collision cost against path length.
    #[arg(long, env = "ICE_NAV_ALPHA")]
    alpha: Option<f64>,
    /// Distance from the ship to the intermediate goal line, meters.
    #[arg(long, env = "ICE_NAV_HORIZON")]
    horizon: Option<f64>,
    /// Simulated seconds between replans.
    #[arg(long, env = "ICE_NAV_REPLAN_DT")]
    replan_dt: Option<f64>,
    #[arg(long, env = "ICE_NAV_OUT_DIR")]
    out_dir: Option<PathBuf>,
    /// Worker threads for batches; 0 uses every core.
    #[arg(long, env = "ICE_NAV_WORKERS")]
    workers: Option<usize>,
    /// Save per-trial trajectories under `<out-dir>/traces`.
    #[arg(long, env = "ICE_NAV_SAVE_TRACES")]
    save_traces: bool,
}

enum Failure {
    /// Bad flags, config or inputs; exit code 2.
    Config(String),
    /// Output could not be written; exit code 1.
    Io(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

fn io(path: &Path) -> impl Fn(std::io::Error) -> Failure + '_ {
    move |e| Failure::Io(format!("{}: {e}", path.display()))
}

impl Common {
    fn resolve(&self) -> Result<BatchConfig, Failure> {
        let mut c = match &self.config {
            Some(p) => BatchConfig::load(p)?,
            None => BatchConfig::default(),
        };
        if !self.concentration.is_empty() {
            c.concentrations = self.concentration.clone();
        }
        if let Some(t) = self.trials {
            c.trials_per_concentration = t;
        }
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if !self.navigator.is_empty() {
            c.navigators = self.navigator.clone();
        }
        if let Some(a) = self.alpha {
            c.navigator.planner.alpha = a;
        }
        if let Some(h) = self.horizon {
            c.navigator.horizon = h;
        }
        if let Some(dt) = self.replan_dt {
            c.navigator.replan_interval = dt;
        }
        if let Some(d) = &self.out_dir {
            c.out_dir = d.clone();
        }
        if let Some(w) = self.workers {
            c.workers = w;
        }
        c.save_traces |= self.save_traces;
        c.validate()?;
        Ok(c)
    }
}

fn control_set(c: &BatchConfig) -> Result<ControlSet, Failure> {
    ControlSet::build(&c.navigator.control_set).map_err(|e| Failure::Config(e.to_string()))
}

fn scenario_for(c: &BatchConfig, concentration: f64, seed: u64) -> Result<Scenario, Failure> {
    generate_scenario(concentration, seed, &c.scenario).map_err(|e| Failure::Config(e.to_string()))
}

fn load_records(c: &BatchConfig) -> Result<Vec<TrialRecord>, Failure> {
    let path = c.out_dir.join(RECORDS);
    let file = File::open(&path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    let (records, _) =
        read_records(BufReader::new(file), true).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    Ok(records)
}

fn write_tables(c: &BatchConfig, records: &[TrialRecord]) -> Result<(), Failure> {
    let rows = aggregate(records);
    for (name, timing) in [("summary.csv", false), ("timing.csv", true)] {
        let path = c.out_dir.join(name);
        let file = BufWriter::new(File::create(&path).map_err(io(&path))?);
        let written = if timing {
            write_timing_csv(&rows, file)
        } else {
            write_summary_csv(&rows, file)
        };
        written.map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn write_trace(path: &Path, samples: &[TrajectorySample]) -> Result<(), Failure> {
    let file = BufWriter::new(File::create(path).map_err(io(path))?);
    write_trajectory_log(samples, file).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn generate(c: &BatchConfig) -> Result<(), Failure> {
    let dir = c.out_dir.join("scenarios");
    std::fs::create_dir_all(&dir).map_err(io(&dir))?;
    for &conc in &c.concentrations {
        for t in 0..c.trials_per_concentration {
            let seed = scenario_seed(c.seed, t);
            let s = scenario_for(c, conc, seed)?;
            let path = dir.join(format!("{}.json", scenario_id(conc, seed)));
            s.write_to(&path)
                .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn run(c: &BatchConfig, scenario: Option<&Path>) -> Result<(), Failure> {
    let s = match scenario {
        Some(p) => Scenario::read_from(p).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?,
        None => scenario_for(c, c.concentrations[0], c.seed)?,
    };
    let id = scenario_id(s.concentration, s.seed);
    let set = control_set(c)?;
    let run_one = |kind: NavigatorKind| {
        run_trial_traced(&s, &c.navigator.with_kind(kind), &set).map_err(|e| Failure::Config(e.to_string()))
    };
    let kind = c.navigators[0];
    let (outcome, trace) = run_one(kind)?;
    let straight_loss = if kind == NavigatorKind::Straight {
        outcome.total_energy_loss
    } else {
        run_one(NavigatorKind::Straight)?.0.total_energy_loss
    };
    let dir = c.out_dir.join("traces");
    std::fs::create_dir_all(&dir).map_err(io(&dir))?;
    write_trace(&dir.join(format!("{id}-{kind}.csv")), &trace.samples)?;
    let record = TrialRecord::new(id, s.concentration, s.seed, s.mean_floe_mass(), outcome, straight_loss);
    println!("{}", record.to_line());
    Ok(())
}

fn batch(c: &BatchConfig) -> Result<(), Failure> {
    std::fs::create_dir_all(&c.out_dir).map_err(io(&c.out_dir))?;
    let path = c.out_dir.join("config.toml");
    std::fs::write(&path, c.to_toml_string()).map_err(io(&path))?;
    let (records, progress) = run_batch(c, &c.out_dir.join(RECORDS)).map_err(|e| match e {
        BatchError::Io(e) => Failure::Io(e.to_string()),
        other => Failure::Config(other.to_string()),
    })?;
    println!(
        "{} scenarios, {} already complete, {} new records",
        progress.scenarios, progress.resumed, progress.new_records
    );
    for (id, why) in &progress.failed {
        eprintln!("trial {id} failed: {why}");
    }
    write_tables(c, &records)
}

/// One overlay per scenario that has saved traces, in record order.
fn overlays(c: &BatchConfig, records: &[TrialRecord]) -> Result<Vec<Overlay>, Failure> {
    let dir = c.out_dir.join("traces");
    let mut out: Vec<Overlay> = Vec::new();
    for r in records {
        let path = dir.join(format!("{}-{}.csv", r.scenario_id, r.navigator));
        if !path.exists() {
            continue;
        }
        let samples = read_trace(&path)?;
        if out.last().is_none_or(|(id, _, _)| *id != r.scenario_id) {
            out.push((
                r.scenario_id.clone(),
                scenario_for(c, r.concentration, r.seed)?,
                Vec::new(),
            ));
        }
        out.last_mut().expect("pushed").2.push((r.navigator, samples));
    }
    Ok(out)
}

fn read_trace(path: &Path) -> Result<Vec<TrajectorySample>, Failure> {
    let file = File::open(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    read_trajectory_log(BufReader::new(file)).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn plot(c: &BatchConfig) -> Result<(), Failure> {
    let mut records = load_records(c)?;
    records.sort_by(|a, b| {
        a.concentration
            .total_cmp(&b.concentration)
            .then(a.seed.cmp(&b.seed))
            .then(a.navigator.cmp(&b.navigator))
    });
    let rows = aggregate(&records);
    let overlays = overlays(c, &records)?;
    let files = emit_plots(&rows, &records, &overlays, &c.out_dir).map_err(|e| Failure::Io(e.to_string()))?;
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn replay(c: &BatchConfig, trace: &Path, scenario: Option<&Path>) -> Result<(), Failure> {
    let samples = read_trace(trace)?;
    let s = match scenario {
        Some(p) => Scenario::read_from(p).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?,
        None => scenario_for(c, c.concentrations[0], c.seed)?,
    };
    std::fs::create_dir_all(&c.out_dir).map_err(io(&c.out_dir))?;
    let stem = trace.file_stem().and_then(|s| s.to_str()).unwrap_or("trace");
    let path = c.out_dir.join(format!("replay_{stem}.svg"));
    std::fs::write(&path, trajectory_svg(&s, &[(c.navigators[0], samples)])).map_err(io(&path))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Generate(common) => common.resolve().and_then(|c| generate(&c)),
        Command::Run { common, scenario } => common.resolve().and_then(|c| run(&c, scenario.as_deref())),
        Command::Batch(common) => common.resolve().and_then(|c| batch(&c)),
        Command::Aggregate(common) => common
            .resolve()
            .and_then(|c| load_records(&c).and_then(|r| write_tables(&c, &r))),
        Command::Plot(common) => common.resolve().and_then(|c| plot(&c)),
        Command::Replay {
            common,
            trace,
            scenario,
        } => common.resolve().and_then(|c| replay(&c, trace, scenario.as_deref())),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
