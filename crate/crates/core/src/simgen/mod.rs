//! Simulated seasonal ordinal processes, Monte-Carlo harnesses and forecast scores.

mod experiment;
mod generate;
mod metrics;

pub use experiment::{
    consistency_experiment, forecasting_experiment, write_consistency_table, write_forecasting_table,
    ConsistencyResult, ForecastingResult, ModelScore, Preset, Process, SimConfig,
};
pub use generate::{simulate, simulate_isolr, simulate_tsolr, sim_origin, SimTrace, DEFAULT_BURN_IN};
pub use metrics::{accuracy, weighted_f1};
