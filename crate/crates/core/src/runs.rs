//! Batch runs behind the command line: simulate a given schedule, optimize
//! the intervals with the swarm, and report a saved run. Every run writes
//! plain CSV/JSON artifacts into an output directory.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pso::{optimize, OptimizationTrace, OptimizeError, SwarmConfig};
use crate::scenario::Scenario;
use crate::schedule::{
    decode_intervals, net_savings, position_to_intervals, savings_fraction, simulate,
    CleaningSchedule, CostBreakdown, Operation, MAX_INTERVAL,
};

pub const SCHEDULE_CSV: &str = "schedule.csv";
pub const BREAKDOWN_JSON: &str = "breakdown.json";
pub const DUTY_SERIES_CSV: &str = "duty_series.csv";
pub const FITNESS_HISTORY_CSV: &str = "fitness_history.csv";
pub const GBEST_JSON: &str = "gbest.json";

/// Cost breakdowns of the three reference operations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BreakdownTriplet {
    pub clean: CostBreakdown,
    pub fouled: CostBreakdown,
    pub scheduled: CostBreakdown,
}

impl BreakdownTriplet {
    pub fn net_savings(&self) -> f64 {
        net_savings(&self.scheduled, &self.fouled)
    }

    pub fn savings_fraction(&self) -> Result<f64> {
        savings_fraction(&self.scheduled, &self.fouled, &self.clean)
    }
}

/// Monthly actual duty per exchanger under each operation, W.
/// Indexed `[exchanger][month - 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DutySeries {
    pub clean: Vec<Vec<f64>>,
    pub fouled: Vec<Vec<f64>>,
    pub scheduled: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunArtifacts {
    pub gbest_intervals: Vec<u32>,
    pub cleaning_counts: Vec<usize>,
    pub breakdowns: BreakdownTriplet,
    /// Empty for plain simulations.
    pub fitness_history: Vec<f64>,
    pub duty_series: DutySeries,
}

/// Optional replacements for the interval-search swarm settings.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SwarmOverrides {
    pub particles: Option<usize>,
    pub iterations: Option<usize>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub inertia_max: Option<f64>,
    pub inertia_min: Option<f64>,
}

impl SwarmOverrides {
    pub fn apply(&self, config: &mut SwarmConfig) {
        if let Some(v) = self.particles {
            config.particle_count = v;
        }
        if let Some(v) = self.iterations {
            config.iterations = v;
        }
        if let Some(v) = self.c1 {
            config.c1 = v;
        }
        if let Some(v) = self.c2 {
            config.c2 = v;
        }
        if let Some(v) = self.inertia_max {
            config.inertia_max = v;
        }
        if let Some(v) = self.inertia_min {
            config.inertia_min = v;
        }
    }
}

/// Swarm over the interval box `[0, max_interval]^n`, initial velocities in
/// `[0, 1]`.
pub fn interval_swarm_config(exchangers: usize, max_interval: u32, seed: u64) -> SwarmConfig {
    let mut config = SwarmConfig::uniform(exchangers, 0.0, f64::from(max_interval));
    config.velocity_bounds = vec![(0.0, 1.0); exchangers];
    config.seed = seed;
    config
}

/// Searches cleaning intervals minimizing the total cost. Positions are
/// rounded and clamped into `[0, max_interval]` before evaluation.
pub fn optimize_intervals(
    scenario: &Scenario,
    config: &SwarmConfig,
    max_interval: u32,
) -> Result<(Vec<u32>, OptimizationTrace)> {
    let objective = |position: &[f64]| {
        let intervals = position_to_intervals(position, max_interval);
        simulate(scenario, Operation::Intervals(&intervals)).map(|s| s.breakdown.total_j)
    };
    let trace = optimize(objective, config).map_err(|e| match e {
        OptimizeError::Config(c) => Error::Input(c.to_string()),
        OptimizeError::Objective { source, .. } => source,
    })?;
    let intervals = position_to_intervals(&trace.best_position, max_interval);
    Ok((intervals, trace))
}

/// Simulates the clean, never-cleaned and scheduled operations.
pub fn compare_operations(
    scenario: &Scenario,
    intervals: &[u32],
) -> Result<(BreakdownTriplet, DutySeries)> {
    let clean = simulate(scenario, Operation::AlwaysClean)?;
    let never = vec![0; scenario.exchanger_count()];
    let fouled = simulate(scenario, Operation::Intervals(&never))?;
    let scheduled = simulate(scenario, Operation::Intervals(intervals))?;
    Ok((
        BreakdownTriplet {
            clean: clean.breakdown,
            fouled: fouled.breakdown,
            scheduled: scheduled.breakdown,
        },
        DutySeries {
            clean: clean.duties,
            fouled: fouled.duties,
            scheduled: scheduled.duties,
        },
    ))
}

/// Simulates `intervals` and writes `schedule.csv`, `breakdown.json` and
/// `duty_series.csv` into `out`.
pub fn run_simulate(scenario: &Scenario, intervals: &[u32], out: &Path) -> Result<RunArtifacts> {
    if intervals.len() != scenario.exchanger_count() {
        return Err(Error::Input(format!(
            "{} intervals given for {} exchangers",
            intervals.len(),
            scenario.exchanger_count()
        )));
    }
    let schedule = decode_intervals(intervals, scenario.horizon);
    let (breakdowns, duty_series) = compare_operations(scenario, intervals)?;

    create_dir(out)?;
    write_file(&out.join(SCHEDULE_CSV), schedule_csv(scenario, &schedule)?)?;
    write_file(&out.join(BREAKDOWN_JSON), to_json(&out.join(BREAKDOWN_JSON), &breakdowns)?)?;
    write_file(
        &out.join(DUTY_SERIES_CSV),
        duty_series_csv(scenario, &duty_series)?,
    )?;

    Ok(RunArtifacts {
        gbest_intervals: intervals.to_vec(),
        cleaning_counts: schedule.cleaning_counts(),
        breakdowns,
        fitness_history: Vec::new(),
        duty_series,
    })
}

#[derive(Debug, Serialize, Deserialize)]
struct GbestFile {
    seed: u64,
    particles: usize,
    iterations: usize,
    intervals: Vec<u32>,
    cleaning_counts: Vec<usize>,
    position: Vec<f64>,
    best_fitness: f64,
}

/// Optimizes the intervals over `[0, 31]^N`, simulates the best schedule and
/// writes the simulation artifacts plus `fitness_history.csv` and
/// `gbest.json`.
pub fn run_optimize(
    scenario: &Scenario,
    overrides: &SwarmOverrides,
    seed: u64,
    out: &Path,
) -> Result<RunArtifacts> {
    let mut config = interval_swarm_config(scenario.exchanger_count(), MAX_INTERVAL, seed);
    overrides.apply(&mut config);
    let (intervals, trace) = optimize_intervals(scenario, &config, MAX_INTERVAL)?;

    let mut artifacts = run_simulate(scenario, &intervals, out)?;
    artifacts.fitness_history = trace.fitness_history.clone();

    let mut history = csv::Writer::from_writer(Vec::new());
    let path = out.join(FITNESS_HISTORY_CSV);
    let encode = |e: csv::Error| Error::Encode {
        path: path.clone(),
        message: e.to_string(),
    };
    history.write_record(["iteration", "best_fitness"]).map_err(encode)?;
    for (i, f) in trace.fitness_history.iter().enumerate() {
        history
            .write_record([(i + 1).to_string(), f.to_string()])
            .map_err(encode)?;
    }
    write_file(&path, finish_csv(history, &path)?)?;

    let gbest = GbestFile {
        seed,
        particles: config.particle_count,
        iterations: config.iterations,
        cleaning_counts: artifacts.cleaning_counts.clone(),
        intervals,
        position: trace.best_position,
        best_fitness: trace.best_fitness,
    };
    let path = out.join(GBEST_JSON);
    write_file(&path, to_json(&path, &gbest)?)?;
    Ok(artifacts)
}

/// Reads `breakdown.json` from a run directory and renders the summary.
pub fn run_report(dir: &Path) -> Result<String> {
    let path = dir.join(BREAKDOWN_JSON);
    if !path.is_file() {
        return Err(Error::MissingArtifact(path));
    }
    let text = fs::read_to_string(&path).map_err(|source| Error::Io {
        path: path.clone(),
        source,
    })?;
    let triplet: BreakdownTriplet =
        serde_json::from_str(&text).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    render_report(&triplet)
}

/// Cost table of the three operations with net savings and the savings
/// fraction. Money is rounded to whole units here only.
pub fn render_report(triplet: &BreakdownTriplet) -> Result<String> {
    let fraction = triplet.savings_fraction()?;
    let savings = triplet.net_savings();
    let mut s = String::new();
    s.push_str(&format!(
        "{:<10} {:>18} {:>16} {:>16} {:>18}\n",
        "condition", "recovered_energy", "cleaning_cost", "pumping_cost", "total_cost"
    ));
    for (name, b) in [
        ("clean", &triplet.clean),
        ("fouled", &triplet.fouled),
        ("scheduled", &triplet.scheduled),
    ] {
        s.push_str(&format!(
            "{:<10} {:>18} {:>16} {:>16} {:>18}\n",
            name,
            money(b.recovered_energy_value),
            money(b.cleaning_cost_total),
            money(b.pumping_cost_total),
            money(b.total_j),
        ));
    }
    s.push_str(&format!("net savings: {}\n", money(savings)));
    s.push_str(&format!(
        "savings fraction: {:.1}% of maximum potential savings ({})\n",
        100.0 * fraction,
        money(net_savings(&triplet.clean, &triplet.fouled))
    ));
    Ok(s)
}

/// Whole currency units with thousands separators.
pub fn money(value: f64) -> String {
    let rounded = value.round();
    let digits = format!("{:.0}", rounded.abs());
    let mut grouped = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, ch) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i) % 3 == 0 {
            grouped.push(',');
        }
        grouped.push(ch);
    }
    if rounded < 0.0 {
        format!("-{grouped}")
    } else {
        grouped
    }
}

fn schedule_csv(scenario: &Scenario, schedule: &CleaningSchedule) -> Result<Vec<u8>> {
    let path = PathBuf::from(SCHEDULE_CSV);
    let encode = |e: csv::Error| Error::Encode {
        path: path.clone(),
        message: e.to_string(),
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["exchanger".to_string()];
    header.extend((1..=scenario.horizon).map(|t| t.to_string()));
    w.write_record(&header).map_err(encode)?;
    for (n, e) in scenario.exchangers.iter().enumerate() {
        let mut rec = vec![e.id.clone()];
        rec.extend(schedule.row(n).iter().map(|y| y.to_string()));
        w.write_record(&rec).map_err(encode)?;
    }
    finish_csv(w, &path)
}

fn duty_series_csv(scenario: &Scenario, series: &DutySeries) -> Result<Vec<u8>> {
    let path = PathBuf::from(DUTY_SERIES_CSV);
    let encode = |e: csv::Error| Error::Encode {
        path: path.clone(),
        message: e.to_string(),
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["month", "exchanger", "condition", "duty_watts"])
        .map_err(encode)?;
    for t in 1..=scenario.horizon {
        for (n, e) in scenario.exchangers.iter().enumerate() {
            for (condition, duties) in [
                ("clean", &series.clean),
                ("fouled", &series.fouled),
                ("scheduled", &series.scheduled),
            ] {
                w.write_record([
                    t.to_string(),
                    e.id.clone(),
                    condition.to_string(),
                    duties[n][t - 1].to_string(),
                ])
                .map_err(encode)?;
            }
        }
    }
    finish_csv(w, &path)
}

fn finish_csv(w: csv::Writer<Vec<u8>>, path: &Path) -> Result<Vec<u8>> {
    w.into_inner().map_err(|e| Error::Encode {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn to_json<T: Serialize>(path: &Path, value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| Error::Encode {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, bytes: Vec<u8>) -> Result<()> {
    fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
