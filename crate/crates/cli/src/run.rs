//! Sweep execution.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use sojourn_core::em_pulse::{delay_decomposition, propagate, DelayReport};
use sojourn_core::first_passage::{evolve_nonhermitian, evolve_project, zeno_scan, LatticeSpec};
use sojourn_core::timescales::{
    sojourn_reflection_closed_form, sojourn_transmission_closed_form, Channel, MethodRegistry,
};

use crate::error::CliError;
use crate::scenario::{EmPulseSection, FirstPassageSection, Format, Kind, Scenario, TimescaleSection};
use crate::table::{format_value, Metadata, ResultTable, Row};

/// Environment variable capping the worker pool.
pub const WORKERS_ENV: &str = "SOJOURN_WORKERS";

const QUANTUM_UNITS: &str = "hbar = 1, 2m = 1; energies and times in natural units";
const LATTICE_UNITS: &str = "times in units of 1/hopping when hopping = 1";
const EM_UNITS: &str = "c = 1; times and frequencies reciprocal";

/// `explicit`, else the environment variable, else every available core.
pub fn worker_count(explicit: Option<usize>) -> usize {
    explicit
        .or_else(|| std::env::var(WORKERS_ENV).ok().and_then(|v| v.trim().parse().ok()))
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Time-domain traces written next to the table.
#[derive(Debug, Clone, PartialEq)]
pub struct Traces {
    pub path: PathBuf,
    pub table: ResultTable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub table: ResultTable,
    pub traces: Option<Traces>,
}

fn metadata(scenario: &Scenario, units: &str) -> Metadata {
    Metadata {
        units: units.into(),
        tool_version: format!("sojourn {}", env!("CARGO_PKG_VERSION")),
        scenario_digest: scenario.digest(),
    }
}

/// Runs the sweep on `workers` threads; rows come back in grid order.
pub fn run(scenario: &Scenario, workers: usize) -> Result<RunOutput, CliError> {
    scenario.validate()?;
    let grid = scenario.sweep.grid()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| CliError::Pool(e.to_string()))?;
    pool.install(|| match scenario.kind {
        Kind::TimescaleSweep => run_timescale(scenario, scenario.timescale.as_ref().unwrap(), &grid),
        Kind::FirstPassage => run_first_passage(scenario, scenario.first_passage.as_ref().unwrap(), &grid),
        Kind::EmPulse => run_em(scenario, scenario.em_pulse.as_ref().unwrap(), &grid),
    })
}

fn fill(mut table: ResultTable, rows: Vec<Row>) -> Result<ResultTable, CliError> {
    for r in rows {
        table.push(r)?;
    }
    Ok(table)
}

fn flag(b: bool) -> Option<f64> {
    Some(if b { 1.0 } else { 0.0 })
}

fn run_timescale(scenario: &Scenario, t: &TimescaleSection, grid: &[f64]) -> Result<RunOutput, CliError> {
    let profile = t.profile.build();
    let registry = match &t.methods {
        Some(m) => MethodRegistry::extended()
            .select(m)
            .map_err(|e| CliError::invalid("timescale.methods", e.to_string()))?,
        None => MethodRegistry::standard(),
    };
    let labels = registry.labels();
    let mut columns = vec!["energy".to_string()];
    columns.extend(labels.iter().map(|l| l.to_string()));
    if t.closed_form {
        columns.push("sojourn_closed_form".into());
    }
    columns.push("evanescent_regime".into());
    columns.push("extrapolated_beyond_paper".into());

    let rows: Vec<Row> = grid
        .par_iter()
        .map(|&e| {
            let report = registry.report(&profile, e, t.channel, &t.derivative);
            let mut values = vec![Some(e)];
            let mut reasons = Vec::new();
            for (label, entry) in &report.entries {
                values.push(entry.value);
                if let Some(r) = &entry.reason {
                    reasons.push(format!("{label}: {r}"));
                }
            }
            if t.closed_form {
                let cf = match t.channel {
                    Channel::Reflection => sojourn_reflection_closed_form(&profile, e),
                    _ => sojourn_transmission_closed_form(&profile, e),
                };
                match cf {
                    Ok(v) => values.push(Some(v)),
                    Err(err) => {
                        values.push(None);
                        reasons.push(format!("sojourn_closed_form: {err}"));
                    }
                }
            }
            values.push(flag(report.flags.evanescent_regime));
            values.push(flag(report.flags.extrapolated_beyond_paper));
            Row {
                values,
                reason: (!reasons.is_empty()).then(|| reasons.join("; ")),
                diagnostics: Some(serde_json::to_value(&report).expect("report serialises")),
            }
        })
        .collect();
    let table = fill(ResultTable::new(columns, metadata(scenario, QUANTUM_UNITS)), rows)?;
    Ok(RunOutput { table, traces: None })
}

fn run_first_passage(scenario: &Scenario, f: &FirstPassageSection, grid: &[f64]) -> Result<RunOutput, CliError> {
    let meta = metadata(scenario, LATTICE_UNITS);
    let table = match scenario.sweep.parameter.as_str() {
        "n" => {
            let steps: Vec<usize> = grid.iter().map(|&v| v as usize).collect();
            let spec = LatticeSpec {
                n_steps: *steps.iter().max().unwrap(),
                ..f.lattice.clone()
            };
            let cols = ["n", "detection", "survival", "bookkeeping"];
            let rows = match evolve_project(&spec) {
                Ok(rec) => steps
                    .iter()
                    .map(|&n| Row {
                        values: vec![
                            Some(n as f64),
                            Some(rec.detection[n - 1]),
                            Some(rec.survival[n - 1]),
                            Some(rec.bookkeeping[n - 1]),
                        ],
                        reason: None,
                        diagnostics: None,
                    })
                    .collect(),
                Err(e) => steps
                    .iter()
                    .map(|&n| failed_row(n as f64, cols.len(), &e.to_string()))
                    .collect(),
            };
            fill(ResultTable::new(strings(&cols), meta), rows)?
        }
        "tau" => {
            let t_fixed = f.t_fixed.unwrap();
            let cols = ["tau", "steps", "survival"];
            let rows = grid
                .par_iter()
                .map(|&tau| match zeno_scan(&f.lattice, &[tau], t_fixed) {
                    Ok(p) => Row {
                        values: vec![Some(tau), Some(p[0].steps as f64), Some(p[0].survival)],
                        reason: None,
                        diagnostics: None,
                    },
                    Err(e) => failed_row(tau, cols.len(), &e.to_string()),
                })
                .collect();
            fill(ResultTable::new(strings(&cols), meta), rows)?
        }
        _ => {
            let cols = ["gamma", "survival", "projective_survival", "max_relative_difference"];
            let projective = evolve_project(&f.lattice);
            let rows = grid
                .par_iter()
                .map(|&g| {
                    let proj = match &projective {
                        Ok(p) => p,
                        Err(e) => return failed_row(g, cols.len(), &e.to_string()),
                    };
                    match evolve_nonhermitian(&f.lattice, g) {
                        Ok(s) => {
                            let worst = s
                                .iter()
                                .zip(&proj.survival)
                                .map(|(a, b)| (a - b).abs() / b)
                                .fold(0.0, f64::max);
                            Row {
                                values: vec![Some(g), s.last().copied(), proj.survival.last().copied(), Some(worst)],
                                reason: None,
                                diagnostics: None,
                            }
                        }
                        Err(e) => failed_row(g, cols.len(), &e.to_string()),
                    }
                })
                .collect();
            fill(ResultTable::new(strings(&cols), meta), rows)?
        }
    };
    Ok(RunOutput { table, traces: None })
}

fn strings(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|c| c.to_string()).collect()
}

fn failed_row(x: f64, width: usize, reason: &str) -> Row {
    let mut values = vec![None; width];
    values[0] = Some(x);
    Row {
        values,
        reason: Some(reason.to_string()),
        diagnostics: None,
    }
}

const EM_COLUMNS: [&str; 13] = [
    "t_in",
    "t_out",
    "delta_t",
    "delta_t_group",
    "delta_t_reshape",
    "residual",
    "relative_residual",
    "evanescent_fraction",
    "transmitted_energy",
    "t_detector",
    "luminal",
    "residual_flagged",
    "propagating",
];

fn em_values(r: &DelayReport) -> Vec<Option<f64>> {
    vec![
        Some(r.t_in),
        Some(r.t_out),
        Some(r.delta_t),
        Some(r.delta_t_group),
        Some(r.delta_t_reshape),
        Some(r.residual),
        Some(r.relative_residual),
        Some(r.evanescent_fraction),
        Some(r.transmitted_energy),
        Some(r.t_detector),
        flag(r.luminal),
        flag(r.residual_flagged),
        flag(r.propagating()),
    ]
}

fn run_em(scenario: &Scenario, e: &EmPulseSection, grid: &[f64]) -> Result<RunOutput, CliError> {
    let param = scenario.sweep.parameter.as_str();
    let mut columns = vec![param.to_string()];
    columns.extend(EM_COLUMNS.iter().map(|c| c.to_string()));
    let rows = grid
        .par_iter()
        .map(|&x| {
            let (mut pulse, mut medium) = (e.pulse, e.medium);
            match param {
                "thickness" => medium.thickness = x,
                "duration" => pulse.duration = x,
                _ => pulse.carrier = x,
            }
            match delay_decomposition(&pulse, &medium) {
                Ok(r) => {
                    let mut values = vec![Some(x)];
                    values.extend(em_values(&r));
                    let mut notes = Vec::new();
                    if r.residual_flagged {
                        notes.push(format!(
                            "decomposition residual {:.3e} above tolerance",
                            r.relative_residual
                        ));
                    }
                    if !r.luminal {
                        let regime = if r.propagating() { "propagating" } else { "evanescent" };
                        notes.push(format!("negative centroid transit ({regime} spectrum)"));
                    }
                    Row {
                        values,
                        reason: (!notes.is_empty()).then(|| notes.join("; ")),
                        diagnostics: Some(serde_json::to_value(r).expect("report serialises")),
                    }
                }
                Err(err) => failed_row(x, columns.len(), &err.to_string()),
            }
        })
        .collect();
    let table = fill(ResultTable::new(columns, metadata(scenario, EM_UNITS)), rows)?;

    let traces = match &e.traces_path {
        Some(path) => {
            let (entry, exit) =
                propagate(&e.pulse, &e.medium).map_err(|err| CliError::invalid("em_pulse", err.to_string()))?;
            let mut t = ResultTable::new(
                strings(&["t", "e_in", "h_in", "e_out", "h_out"]),
                metadata(scenario, EM_UNITS),
            );
            for i in 0..entry.times.len() {
                t.push(Row {
                    values: vec![
                        Some(entry.times[i]),
                        Some(entry.e[i]),
                        Some(entry.h[i]),
                        Some(exit.e[i]),
                        Some(exit.h[i]),
                    ],
                    reason: None,
                    diagnostics: None,
                })?;
            }
            Some(Traces {
                path: path.clone(),
                table: t,
            })
        }
        None => None,
    };
    Ok(RunOutput { table, traces })
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

/// Writes the table (and any mirror or traces) relative to `base`. Returns
/// the paths written.
pub fn write_outputs(scenario: &Scenario, out: &RunOutput, base: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut written = Vec::new();
    let path = resolve(base, &scenario.output.path);
    match scenario.output.format {
        Format::Csv => {
            write(&path, &out.table.to_csv()?)?;
            written.push(path.clone());
            if scenario.output.json_mirror {
                let mut mirror = path.clone().into_os_string();
                mirror.push(".json");
                let mirror = PathBuf::from(mirror);
                write(&mirror, &out.table.to_json())?;
                written.push(mirror);
            }
        }
        Format::Json => {
            write(&path, &out.table.to_json())?;
            written.push(path);
        }
    }
    if let Some(tr) = &out.traces {
        let p = resolve(base, &tr.path);
        write(&p, &tr.table.to_csv()?)?;
        written.push(p);
    }
    Ok(written)
}

/// Short human summary of a finished run.
pub fn summary(out: &RunOutput) -> String {
    let failed = out
        .table
        .rows
        .iter()
        .filter(|r| r.values.iter().any(Option::is_none))
        .count();
    format!(
        "{} rows, {} columns, {} rows with missing values; first row: {}",
        out.table.rows.len(),
        out.table.columns.len(),
        failed,
        out.table
            .rows
            .first()
            .map(|r| r
                .values
                .iter()
                .map(|v| v.map(format_value).unwrap_or_else(|| "-".into()))
                .collect::<Vec<_>>()
                .join(" "))
            .unwrap_or_default()
    )
}
