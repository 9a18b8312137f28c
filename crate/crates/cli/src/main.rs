//! `mgrestore`: run, simulate, validate and plot microgrid restoration studies.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Args, Parser, Subcommand};
use log::info;
use mgrestore::coordinator::{
    compare_alpha_sweep, run_sequential_restoration, RestorationRun, RunError, ScenarioConfig, Termination,
};
use mgrestore::network::{build_network, parse_feeder, FeederDocument, NetworkModel};
use mgrestore::restoration::FrequencyMode;
use mgrestore::transient::{equilibrium_state, simulate_load_step, InverterParams, SimOptions};
use mgrestore_milp::random::{random_milp, InstanceLimits};
use mgrestore_milp::{
    brute_force_milp, build_problem, solve_milp, ConstraintSense, LinearConstraint, MilpOptions, MilpProblem,
    MilpSolution,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use mgrestore_cli::artifacts::{self, RunBundle, SimRow, SweepFile};
use mgrestore_cli::plot::{self, PlotKind};
use mgrestore_cli::validate;

/// Stable process exit codes.
mod code {
    pub const OK: u8 = 0;
    pub const USAGE: u8 = 1;
    pub const INFEASIBLE: u8 = 2;
    pub const INSTABILITY: u8 = 3;
    pub const VALIDATION: u8 = 4;
    pub const ORACLE: u8 = 5;
}

/// Largest binary count `oracle-check` accepts.
const ORACLE_MAX_BINARIES: i64 = 12;

/// Environment variable holding the log filter (e.g. `info`, `mgrestore=debug`).
const LOG_ENV: &str = "MGRESTORE_LOG";

#[derive(Debug, Parser)]
#[command(name = "mgrestore", version, about = "Sequential microgrid restoration with frequency-aware load steps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the stage-by-stage restoration and write the run artifacts.
    Run(RunArgs),
    /// Simulate one load step of a grid-forming inverter.
    Simulate(SimulateArgs),
    /// Check a feeder file or replay the checks over a saved run.
    Validate(ValidateArgs),
    /// Compare branch and bound against brute-force enumeration.
    OracleCheck(OracleArgs),
    /// Run the same scenario for several values of alpha.
    Sweep(SweepArgs),
    /// Render an SVG chart from a saved run or sweep.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    /// Feeder description (JSON).
    #[arg(long)]
    feeder: PathBuf,
    /// Scenario configuration (TOML); defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Drop the frequency constraints (base case).
    #[arg(long, conflicts_with = "alpha")]
    no_freq_constraints: bool,
    /// Rolling-horizon length in steps.
    #[arg(long)]
    horizon: Option<usize>,
    /// P-ω droop gain D_P (rad/s per W) for every microgrid.
    #[arg(long)]
    dp: Option<f64>,
    /// Gain of the load-step update.
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Comma-separated gains.
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.2, 1.0], conflicts_with = "alpha")]
    alphas: Vec<f64>,
    /// Output directory; one sub-directory per gain plus sweep.json.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Inverter parameters (TOML); defaults apply when omitted.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Active-power load step (pu).
    #[arg(long, allow_hyphen_values = true)]
    pstep: f64,
    /// Reactive-power load step (pu).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    qstep: f64,
    /// Simulated time after the step (s).
    #[arg(long, default_value_t = 3.0)]
    duration: f64,
    /// Integration step (s).
    #[arg(long, default_value_t = 1e-4)]
    dt: f64,
    /// Trace output (CSV).
    #[arg(long, default_value = "trace.csv")]
    out: PathBuf,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("target").required(true).args(["feeder", "run"])))]
struct ValidateArgs {
    /// Feeder description to check.
    #[arg(long)]
    feeder: Option<PathBuf>,
    /// Run directory (or its solution.json) to replay.
    #[arg(long)]
    run: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    instances: usize,
    /// Largest number of binaries per instance.
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u8).range(1..=ORACLE_MAX_BINARIES))]
    max_binaries: u8,
    /// Append a row no binary point satisfies to every instance.
    #[arg(long)]
    force_infeasible: bool,
}

#[derive(Debug, Args)]
struct PlotArgs {
    #[arg(long, value_enum)]
    kind: PlotKind,
    /// Run directory, solution.json, or sweep.json for alpha-comparison.
    #[arg(long)]
    input: PathBuf,
    /// SVG output path.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or(LOG_ENV, "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { code::USAGE } else { code::OK });
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Validate(a) => cmd_validate(a),
        Command::OracleCheck(a) => cmd_oracle_check(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Plot(a) => cmd_plot(a),
    };
    match result {
        Ok(c) => ExitCode::from(c),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(code::USAGE)
        }
    }
}

fn load_feeder(path: &Path) -> Result<NetworkModel> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_feeder(&text).with_context(|| format!("loading feeder {}", path.display()))
}

fn load_config(s: &ScenarioArgs) -> Result<ScenarioConfig> {
    let mut cfg = match &s.config {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            ScenarioConfig::from_toml(&text).with_context(|| format!("loading config {}", p.display()))?
        }
        None => ScenarioConfig::default(),
    };
    if let Some(h) = s.horizon {
        cfg.horizon = h;
    }
    if let Some(a) = s.alpha {
        cfg.alpha = a;
    }
    if let Some(dp) = s.dp {
        cfg.inverter.d_p = dp;
        for p in cfg.inverter_by_mg.values_mut() {
            p.d_p = dp;
        }
    }
    if s.no_freq_constraints {
        cfg = cfg.without_frequency_constraints();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn termination_code(run: &RestorationRun) -> u8 {
    match run.termination {
        Termination::Saturated | Termination::MaxStages => code::OK,
        Termination::Infeasible { .. } => code::INFEASIBLE,
        Termination::Instability { .. } => code::INSTABILITY,
    }
}

fn run_scenario(net: &NetworkModel, cfg: &ScenarioConfig) -> Result<RestorationRun> {
    run_sequential_restoration(net, cfg).map_err(|e: RunError| anyhow::Error::new(e).context("restoration run failed"))
}

fn report_termination(run: &RestorationRun) {
    match &run.termination {
        Termination::Infeasible { stage, microgrid, status } => {
            eprintln!("stage {stage}, microgrid {microgrid}: restoration problem {}", status.as_str())
        }
        Termination::Instability { stage, microgrid } => {
            eprintln!("stage {stage}, microgrid {microgrid}: frequency response unstable")
        }
        _ => {}
    }
}

fn cmd_run(a: RunArgs) -> Result<u8> {
    let net = load_feeder(&a.scenario.feeder)?;
    let cfg = load_config(&a.scenario)?;
    info!("running {} with horizon {} and alpha {}", net.document().name, cfg.horizon, cfg.alpha);
    let run = run_scenario(&net, &cfg)?;
    let bundle = RunBundle::new(net.document().clone(), cfg, run);
    artifacts::write_run_dir(&a.out, &bundle)?;
    print!("{}", artifacts::summary_text(&bundle));
    report_termination(&bundle.run);
    Ok(termination_code(&bundle.run))
}

fn cmd_sweep(a: SweepArgs) -> Result<u8> {
    if a.alphas.is_empty() {
        bail!("--alphas needs at least one value");
    }
    let net = load_feeder(&a.scenario.feeder)?;
    let cfg = load_config(&a.scenario)?;
    let runs = compare_alpha_sweep(&net, &cfg, &a.alphas).context("alpha sweep failed")?;
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let mut worst = code::OK;
    let mut summaries: SweepFile = Vec::new();
    println!("{:>8} {:>7} {:>11} {:>12}", "alpha", "stages", "total_kw", "termination");
    for (summary, run) in runs {
        let cfg_a = ScenarioConfig { alpha: summary.alpha, ..cfg.clone() };
        let dir = a.out.join(format!("alpha-{}", summary.alpha));
        artifacts::write_run_dir(&dir, &RunBundle::new(net.document().clone(), cfg_a, run.clone()))?;
        println!(
            "{:>8} {:>7} {:>11.1} {:>12}",
            summary.alpha, summary.stages_to_completion, summary.final_kw, summary.termination
        );
        report_termination(&run);
        worst = worst.max(termination_code(&run));
        summaries.push(summary);
    }
    let path = a.out.join(artifacts::SWEEP_FILE);
    fs::write(&path, artifacts::to_json(&summaries)?).with_context(|| format!("writing {}", path.display()))?;
    Ok(worst)
}

fn cmd_simulate(a: SimulateArgs) -> Result<u8> {
    let params: InverterParams = match &a.params {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            toml::from_str(&text).with_context(|| format!("parsing inverter parameters {}", p.display()))?
        }
        None => InverterParams::default(),
    };
    params.validate().context("invalid inverter parameters")?;
    let opts = SimOptions { dt: a.dt, duration: a.duration };
    let s0 = equilibrium_state(&params, 0.0, 0.0)?;
    let trace = simulate_load_step(&s0, &params, a.pstep, a.qstep, &opts)?;
    let rows: Vec<SimRow> = trace
        .t
        .iter()
        .zip(&trace.f)
        .map(|(&t_s, &f_hz)| SimRow { t_s, f_hz, stable: trace.stable })
        .collect();
    let file = fs::File::create(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    artifacts::write_csv(&rows, std::io::BufWriter::new(file))?;
    println!("nadir {:.4} Hz at t = {:.4} s", trace.f_nadir, trace.t_nadir);
    if trace.stable {
        Ok(code::OK)
    } else {
        eprintln!("trace flagged unstable: frequency left the stability band and the run was cut short");
        Ok(code::INSTABILITY)
    }
}

fn print_findings(findings: &[String]) -> u8 {
    if findings.is_empty() {
        println!("ok");
        code::OK
    } else {
        for f in findings {
            println!("FAIL {f}");
        }
        eprintln!("{} violation(s)", findings.len());
        code::VALIDATION
    }
}

fn cmd_validate(a: ValidateArgs) -> Result<u8> {
    if let Some(path) = a.feeder {
        let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        return Ok(match parse_feeder(&text) {
            Ok(net) => {
                let (bad, info) = validate::feeder_findings(&net);
                println!("{info}");
                print_findings(&bad)
            }
            Err(e) => print_findings(&[e.to_string()]),
        });
    }
    let dir = a.run.expect("clap requires --feeder or --run");
    let bundle = artifacts::read_bundle(&dir)?;
    let doc: FeederDocument = bundle.feeder.clone();
    let net = match build_network(doc) {
        Ok(n) => n,
        Err(e) => return Ok(print_findings(&[format!("embedded feeder: {e}")])),
    };
    println!("{} stages, {:.1} kW restored", bundle.run.stages.len(), bundle.run.final_kw());
    Ok(print_findings(&validate::run_findings(&net, &bundle)))
}

#[derive(Serialize)]
struct Counterexample<'a> {
    seed: u64,
    instance: usize,
    problem: &'a MilpProblem,
    branch_and_bound: &'a MilpSolution,
    brute_force: &'a MilpSolution,
}

fn agree(a: &MilpSolution, b: &MilpSolution) -> bool {
    match (a.has_point(), b.has_point()) {
        (true, true) => (a.objective - b.objective).abs() <= 1e-6,
        (false, false) => a.status == b.status,
        _ => false,
    }
}

/// Add `x0 >= 1.5`, which no binary value of `x0` meets.
fn make_infeasible(p: MilpProblem) -> Result<MilpProblem> {
    let mut rows = p.constraints;
    rows.push(LinearConstraint::new(vec![(0, 1.0)], ConstraintSense::Ge, 1.5, "forced_infeasible"));
    Ok(build_problem(p.variables, rows, p.objective, p.sense)?)
}

fn cmd_oracle_check(a: OracleArgs) -> Result<u8> {
    let limits = InstanceLimits { max_binaries: a.max_binaries as usize, ..InstanceLimits::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let (mut passed, mut infeasible) = (0, 0);
    for k in 0..a.instances {
        let mut p = random_milp(&mut rng, limits);
        if a.force_infeasible {
            p = make_infeasible(p)?;
        }
        let bb = solve_milp(&p, &MilpOptions::default());
        let bf = brute_force_milp(&p)?;
        if !agree(&bb, &bf) {
            let cx = Counterexample { seed: a.seed, instance: k, problem: &p, branch_and_bound: &bb, brute_force: &bf };
            println!("{}", serde_json::to_string_pretty(&cx)?);
            eprintln!("instance {k}: branch and bound disagrees with brute force");
            return Ok(code::ORACLE);
        }
        if !bb.has_point() {
            infeasible += 1;
        }
        passed += 1;
    }
    println!("{passed}/{} instances agree ({infeasible} infeasible)", a.instances);
    Ok(code::OK)
}

fn cmd_plot(a: PlotArgs) -> Result<u8> {
    let svg = match a.kind {
        PlotKind::FrequencyTrace => {
            let b = artifacts::read_bundle(&a.input)?;
            let f_min = (b.config.restoration.frequency_mode != FrequencyMode::Off).then(|| b.config.f_min());
            plot::frequency_trace_svg(&b.run, f_min)
        }
        PlotKind::RestoredLoadBars => plot::restored_load_bars_svg(&artifacts::read_bundle(&a.input)?.run),
        PlotKind::AlphaComparison => {
            let path = if a.input.is_dir() { a.input.join(artifacts::SWEEP_FILE) } else { a.input.clone() };
            plot::alpha_comparison_svg(&artifacts::read_json::<SweepFile>(&path)?)
        }
    };
    if let Some(dir) = a.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(&a.out, svg).with_context(|| format!("writing {}", a.out.display()))?;
    Ok(code::OK)
}
