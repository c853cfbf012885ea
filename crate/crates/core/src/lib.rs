//! Cleaning-schedule optimization for fouling heat-exchanger networks.
//!
//! - [`hen`]: closed-form counterflow exchanger and network solve
//! - [`fouling`]: asymptotic fouling with cleaning resets
//! - [`schedule`]: interval decoding and the total-cost objective
//! - [`pso`]: seeded particle-swarm minimizer
//! - [`scenario`], [`runs`]: problem files and the batch commands

pub mod error;
pub mod fouling;
pub mod hen;
pub mod pso;
pub mod runs;
pub mod scenario;
pub mod schedule;

pub use error::{Error, HenError, Result, ScenarioError};
pub use fouling::{effective_ua, fouling_resistance, resistance_timeline, FoulingParams};
pub use hen::{
    exchanger_outlets, lmtd, overall_u, solve_network, ExchangerDrive, ExchangerGeometry,
    ExchangerResult, NetworkTopology, StreamState,
};
pub use pso::{optimize, OptimizationTrace, SwarmConfig};
pub use runs::{run_optimize, run_report, run_simulate, BreakdownTriplet, RunArtifacts};
pub use scenario::{load_scenario, Scenario};
pub use schedule::{
    decode_intervals, evaluate_schedule, net_savings, pumping_power, savings_fraction,
    CleaningSchedule, CostBreakdown, CostCoefficients, PumpingModel,
};
