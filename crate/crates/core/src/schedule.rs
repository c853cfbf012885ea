//! Cleaning schedules and the total-cost objective.
//!
//! A schedule is one integer interval per exchanger: exchanger `n` is cleaned
//! in every month that is a positive multiple of its interval, and interval 0
//! means never. Simulating a schedule runs the network month by month twice,
//! once with the fouled conductances and cleaning bypasses ("actual") and once
//! fully clean ("ideal"), and charges
//!
//! ```text
//! J = Σ_n Σ_t [ C_E·(Q_ideal − Q_actual) + C_cl·(1 − y) + C_p·W_P·y ]
//! ```
//!
//! with energies integrated over the month length. `y = 0` marks a month in
//! which the exchanger is bypassed for cleaning: it draws no pumping power and
//! recovers nothing, so its whole ideal duty counts as lost. Since
//! `Σ Q_ideal` is fixed by the scenario, minimizing `J` is the same as
//! maximizing recovered value net of cleaning and pumping.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fouling::{fouled_ua, resistance_timeline, ResistanceTimeline};
use crate::hen::{solve_network, ExchangerDrive};
use crate::scenario::Scenario;

/// Upper bound of the interval search box, months.
pub const MAX_INTERVAL: u32 = 31;

/// Cleaning intervals and the decoded operating-status matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CleaningSchedule {
    intervals: Vec<u32>,
    /// `operating[n][t-1]`: exchanger `n` runs in month `t`.
    operating: Vec<Vec<bool>>,
}

impl CleaningSchedule {
    pub fn intervals(&self) -> &[u32] {
        &self.intervals
    }

    pub fn horizon(&self) -> usize {
        self.operating.first().map_or(0, Vec::len)
    }

    /// Status `y[n][t]` for 1-based month `t`: 1 operating, 0 cleaning.
    pub fn status(&self, n: usize, t: usize) -> u8 {
        u8::from(self.operating[n][t - 1])
    }

    pub fn is_operating(&self, n: usize, t: usize) -> bool {
        self.operating[n][t - 1]
    }

    /// Cleaning months of exchanger `n`, ascending.
    pub fn clean_steps(&self, n: usize) -> Vec<usize> {
        self.operating[n]
            .iter()
            .enumerate()
            .filter_map(|(i, &on)| (!on).then_some(i + 1))
            .collect()
    }

    pub fn cleaning_counts(&self) -> Vec<usize> {
        self.operating
            .iter()
            .map(|row| row.iter().filter(|&&on| !on).count())
            .collect()
    }

    pub fn total_cleanings(&self) -> usize {
        self.cleaning_counts().iter().sum()
    }

    /// Row `n` of the status matrix as 0/1 values.
    pub fn row(&self, n: usize) -> Vec<u8> {
        self.operating[n].iter().map(|&on| u8::from(on)).collect()
    }
}

/// Expands per-exchanger intervals into the status matrix over `horizon`
/// months.
pub fn decode_intervals(intervals: &[u32], horizon: usize) -> CleaningSchedule {
    let operating = intervals
        .iter()
        .map(|&d| {
            (1..=horizon)
                .map(|t| d == 0 || t % d as usize != 0)
                .collect()
        })
        .collect();
    CleaningSchedule {
        intervals: intervals.to_vec(),
        operating,
    }
}

/// Maps a continuous swarm position onto intervals: round to nearest, then
/// clamp to `[0, max_interval]`.
pub fn position_to_intervals(position: &[f64], max_interval: u32) -> Vec<u32> {
    position
        .iter()
        .map(|&x| {
            let r = x.round();
            if r.is_nan() || r <= 0.0 {
                0
            } else {
                (r as u64).min(u64::from(max_interval)) as u32
            }
        })
        .collect()
}

/// Prices and time step of the cost function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostCoefficients {
    /// Value of recovered heat, $/J.
    #[serde(rename = "energy_price_per_j")]
    pub energy_price: f64,
    /// Default cost of one cleaning action on one exchanger, $.
    #[serde(rename = "cleaning_cost_per_action")]
    pub cleaning_cost_per_action: f64,
    /// Pumping electricity price, $/J.
    #[serde(rename = "pump_energy_price_per_j")]
    pub pump_energy_price: f64,
    /// Length of one schedule step (month), s.
    #[serde(rename = "step_duration_s")]
    pub step_duration: f64,
}

impl CostCoefficients {
    pub fn invalid_field(&self) -> Option<&'static str> {
        let ok = |v: f64| v >= 0.0 && v.is_finite();
        if !ok(self.energy_price) {
            Some("energy_price_per_j")
        } else if !ok(self.cleaning_cost_per_action) {
            Some("cleaning_cost_per_action")
        } else if !ok(self.pump_energy_price) {
            Some("pump_energy_price_per_j")
        } else if !ok(self.step_duration) {
            Some("step_duration_s")
        } else {
            None
        }
    }
}

/// Pumping power drawn by one exchanger, linear in normalized fouling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpingModel {
    /// Power with a clean bundle, W.
    #[serde(rename = "base_power_w")]
    pub base_power: f64,
    /// Extra power at asymptotic fouling, W.
    #[serde(rename = "fouling_power_w")]
    pub fouling_coefficient: f64,
}

impl PumpingModel {
    pub fn invalid_field(&self) -> Option<&'static str> {
        let ok = |v: f64| v >= 0.0 && v.is_finite();
        if !ok(self.base_power) {
            Some("base_power_w")
        } else if !ok(self.fouling_coefficient) {
            Some("fouling_power_w")
        } else {
            None
        }
    }
}

/// Pumping power, W, at fouling resistance `r_f` given the asymptote.
///
/// An exchanger with zero asymptote never fouls and draws base power.
pub fn pumping_power(model: &PumpingModel, r_f: f64, asymptote: f64) -> f64 {
    if asymptote > 0.0 {
        model.base_power + model.fouling_coefficient * (r_f / asymptote)
    } else {
        model.base_power
    }
}

/// Money terms of one simulated horizon.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CostBreakdown {
    /// Σ C_E·Q_actual over the horizon.
    pub recovered_energy_value: f64,
    pub energy_loss_cost: f64,
    pub cleaning_cost_total: f64,
    pub pumping_cost_total: f64,
    pub total_j: f64,
}

impl CostBreakdown {
    /// Builds a breakdown whose total is the sum of the three cost terms.
    pub fn new(
        recovered_energy_value: f64,
        energy_loss_cost: f64,
        cleaning_cost_total: f64,
        pumping_cost_total: f64,
    ) -> Self {
        Self {
            recovered_energy_value,
            energy_loss_cost,
            cleaning_cost_total,
            pumping_cost_total,
            total_j: energy_loss_cost + cleaning_cost_total + pumping_cost_total,
        }
    }

    /// Recovered value net of cleaning and pumping.
    pub fn net_benefit(&self) -> f64 {
        self.recovered_energy_value - self.cleaning_cost_total - self.pumping_cost_total
    }
}

/// How the network is operated over the horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Operation<'a> {
    /// Never fouls, never cleaned.
    AlwaysClean,
    /// Fouls and is cleaned on the given intervals (all zero: never cleaned).
    Intervals(&'a [u32]),
}

/// Full simulation output: the cost breakdown and the monthly actual duties.
#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub breakdown: CostBreakdown,
    /// `duties[n][t-1]`: actual duty of exchanger `n` in month `t`, W.
    pub duties: Vec<Vec<f64>>,
}

/// Simulates the horizon under `operation` and accumulates the cost terms.
pub fn simulate(scenario: &Scenario, operation: Operation<'_>) -> Result<Simulation> {
    let n_ex = scenario.exchanger_count();
    let horizon = scenario.horizon;
    let costs = &scenario.costs;
    let dt = costs.step_duration;
    let positions = scenario.path_positions();

    let (schedule, timelines): (CleaningSchedule, Option<Vec<ResistanceTimeline>>) =
        match operation {
            Operation::AlwaysClean => (decode_intervals(&vec![0; n_ex], horizon), None),
            Operation::Intervals(intervals) => {
                if intervals.len() != n_ex {
                    return Err(Error::Input(format!(
                        "{} intervals given for {} exchangers",
                        intervals.len(),
                        n_ex
                    )));
                }
                let schedule = decode_intervals(intervals, horizon);
                let timelines = scenario
                    .exchangers
                    .iter()
                    .enumerate()
                    .map(|(n, e)| resistance_timeline(&e.fouling, &schedule.clean_steps(n), horizon))
                    .collect();
                (schedule, Some(timelines))
            }
        };

    let mut clean_drives = vec![
        ExchangerDrive {
            ua: 0.0,
            lmtd_correction: 1.0,
            bypassed: false,
        };
        n_ex
    ];
    for (n, e) in scenario.exchangers.iter().enumerate() {
        clean_drives[positions[n]] = ExchangerDrive {
            ua: fouled_ua(&e.geometry, 0.0, 0.0),
            lmtd_correction: e.geometry.lmtd_correction,
            bypassed: false,
        };
    }
    let ideal = solve_network(&scenario.topology, &clean_drives)?;

    let mut recovered = 0.0;
    let mut energy_loss = 0.0;
    let mut cleaning = 0.0;
    let mut pumping = 0.0;
    let mut duties = vec![Vec::with_capacity(horizon); n_ex];
    let mut drives = clean_drives.clone();

    for t in 1..=horizon {
        let actual = match &timelines {
            None => ideal.clone(),
            Some(tls) => {
                for (n, e) in scenario.exchangers.iter().enumerate() {
                    drives[positions[n]] = ExchangerDrive {
                        ua: fouled_ua(&e.geometry, tls[n].at(t), e.shell_fouling),
                        lmtd_correction: e.geometry.lmtd_correction,
                        bypassed: !schedule.is_operating(n, t),
                    };
                }
                solve_network(&scenario.topology, &drives)?
            }
        };
        for (n, e) in scenario.exchangers.iter().enumerate() {
            let pos = positions[n];
            let q_actual = actual[pos].duty;
            let r_f = timelines.as_ref().map_or(0.0, |tls| tls[n].at(t));
            recovered += costs.energy_price * q_actual * dt;
            energy_loss += costs.energy_price * (ideal[pos].duty - q_actual) * dt;
            if schedule.is_operating(n, t) {
                pumping += costs.pump_energy_price
                    * pumping_power(&e.pumping, r_f, e.fouling.asymptote)
                    * dt;
            } else {
                cleaning += scenario.cleaning_cost(n);
            }
            duties[n].push(q_actual);
        }
    }

    Ok(Simulation {
        breakdown: CostBreakdown::new(recovered, energy_loss, cleaning, pumping),
        duties,
    })
}

/// Total cost of cleaning on `intervals` over the scenario horizon.
pub fn evaluate_schedule(scenario: &Scenario, intervals: &[u32]) -> Result<CostBreakdown> {
    simulate(scenario, Operation::Intervals(intervals)).map(|s| s.breakdown)
}

/// Net benefit of `candidate` over `reference`.
pub fn net_savings(candidate: &CostBreakdown, reference: &CostBreakdown) -> f64 {
    candidate.net_benefit() - reference.net_benefit()
}

/// Share of the maximum potential saving (always clean vs never cleaned)
/// realized by `candidate`.
pub fn savings_fraction(
    candidate: &CostBreakdown,
    fouled_ref: &CostBreakdown,
    clean_ref: &CostBreakdown,
) -> Result<f64> {
    let potential = net_savings(clean_ref, fouled_ref);
    if potential.is_nan() || potential <= 0.0 {
        return Err(Error::DegenerateReference(potential));
    }
    Ok(net_savings(candidate, fouled_ref) / potential)
}
