//! Reading and writing the files of a run directory.

use std::fmt::Write as _;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use anyhow::{Context, Result};
use mgrestore::coordinator::{run_summary, AlphaSummary, RestorationRun, ScenarioConfig, SummaryRow};
use mgrestore::network::FeederDocument;
use mgrestore::restoration::write_stage_csv;
use serde::{Deserialize, Serialize};

pub const SOLUTION_FILE: &str = "solution.json";
pub const STAGES_FILE: &str = "stages.csv";
pub const TRACES_FILE: &str = "traces.csv";
pub const SUMMARY_FILE: &str = "summary.txt";
pub const SWEEP_FILE: &str = "sweep.json";

/// Everything needed to replay a run: the feeder and configuration it used,
/// a per-stage summary, and the full stage results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunBundle {
    pub feeder: FeederDocument,
    pub config: ScenarioConfig,
    pub summary: Vec<SummaryRow>,
    pub run: RestorationRun,
}

impl RunBundle {
    pub fn new(feeder: FeederDocument, config: ScenarioConfig, run: RestorationRun) -> Self {
        RunBundle {
            summary: run_summary(&run),
            feeder,
            config,
            run,
        }
    }
}

/// One sample of a decimated frequency trace in `traces.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub stage: usize,
    pub mg_id: usize,
    pub t_s: f64,
    pub f_hz: f64,
}

/// One sample of a standalone simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimRow {
    pub t_s: f64,
    pub f_hz: f64,
    pub stable: bool,
}

/// One gain of an alpha sweep as stored in `sweep.json`.
pub type SweepFile = Vec<AlphaSummary>;

pub fn trace_rows(run: &RestorationRun) -> Vec<TraceRow> {
    run.stages
        .iter()
        .flat_map(|s| {
            s.microgrids.iter().flat_map(move |m| {
                m.trace.t.iter().zip(&m.trace.f).map(move |(&t_s, &f_hz)| TraceRow {
                    stage: s.stage,
                    mg_id: m.restoration.microgrid,
                    t_s,
                    f_hz,
                })
            })
        })
        .collect()
}

pub fn write_csv<T: Serialize, W: Write>(rows: &[T], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<T: for<'de> Deserialize<'de>, R: Read>(input: R) -> csv::Result<Vec<T>> {
    csv::Reader::from_reader(input).deserialize().collect()
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn summary_text(bundle: &RunBundle) -> String {
    let run = &bundle.run;
    let mut s = String::new();
    let _ = writeln!(s, "feeder        {}", bundle.feeder.name);
    let _ = writeln!(
        s,
        "horizon       {}   alpha {}   delta_f_max {} Hz   mode {:?}",
        bundle.config.horizon, bundle.config.alpha, bundle.config.delta_f_max, bundle.config.restoration.frequency_mode
    );
    let _ = writeln!(s, "termination   {}", run.termination.label());
    let _ = writeln!(s, "stages        {} (load restored through stage {})", run.stages.len(), run.stages_to_completion());
    let _ = writeln!(s, "restored      {:.1} kW", run.final_kw());
    let _ = writeln!(s);
    let _ = writeln!(
        s,
        "{:>5} {:>3} {:>10} {:>10} {:>10} {:>9} {:>9} {:>14} {:>6}",
        "stage", "mg", "step_kw", "total_kw", "nadir_hz", "mls_pu", "bound_pu", "status", "nodes"
    );
    for r in &bundle.summary {
        let bound = r.mls_bound_pu.map_or("-".to_string(), |b| format!("{b:.4}"));
        let _ = writeln!(
            s,
            "{:>5} {:>3} {:>10.2} {:>10.2} {:>10.4} {:>9.4} {:>9} {:>14} {:>6}",
            r.stage, r.mg_id, r.restored_kw, r.cumulative_kw, r.f_nadir_hz, r.mls_pu, bound, r.solver_status, r.nodes
        );
    }
    s
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))
}

/// Write the four artifacts of a run into `dir`, creating it if needed.
pub fn write_run_dir(dir: &Path, bundle: &RunBundle) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    write_file(dir, SOLUTION_FILE, to_json(bundle)?.as_bytes())?;
    let stages: Vec<_> = bundle
        .run
        .stages
        .iter()
        .flat_map(|s| s.microgrids.iter().map(|m| m.restoration.clone()))
        .collect();
    let mut buf = Vec::new();
    write_stage_csv(&stages, &mut buf)?;
    write_file(dir, STAGES_FILE, &buf)?;
    let mut buf = Vec::new();
    write_csv(&trace_rows(&bundle.run), &mut buf)?;
    write_file(dir, TRACES_FILE, &buf)?;
    write_file(dir, SUMMARY_FILE, summary_text(bundle).as_bytes())
}

/// Load `solution.json` from a run directory or from the file itself.
pub fn read_bundle(path: &Path) -> Result<RunBundle> {
    if path.is_dir() {
        read_json(&path.join(SOLUTION_FILE))
    } else {
        read_json(path)
    }
}
