//! Config-driven scenarios producing per-time CSV series.

mod config;
mod run;

pub use config::{
    config_from_csv_header, load_config, parse_config, parse_number, ConfigError, Scenario, ScenarioConfig, Target,
    DAMPED_CHI, DAMPED_DIM, DAMPED_WINDOW, DEFAULT_STEPS, UNDAMPED_CHI, UNDAMPED_COUPLING, UNDAMPED_WINDOW,
};
pub use run::{run_scenario, run_sweep, run_to_file, sweep_jobs, RunError, SweepJob, SweepOutcome};
