//! Parameter sweeps over deadlines, budgets, overheads and price ratios,
//! and the profile-inaccuracy sensitivity study.

mod aggregate;
mod config;
mod io;
mod run;
mod sensitivity;

pub use aggregate::{aggregate_by_ratio, crossover_ratio, summarize, RatioRow, Summary};
pub use config::{Grid, ModelSetup, SweepConfig, SweepPoint, DEFAULT_PRICE_RATIOS};
pub use io::{
    read_fingerprint, read_raw, render_by_ratio, render_raw, render_sensitivity_raw, render_sensitivity_table,
    write_sensitivity, write_sweep, BUDGET_FILE, DEADLINE_FILE, RAW_FILE, SENSITIVITY_FILE, SENSITIVITY_RAW_FILE,
};
pub use run::{evaluate_point, recommend, request_index, run_sweep, Decider, Decision, PolicyRun, SweepResult, POLICIES};
pub use sensitivity::{
    check_error, inject_error, perturb, run_sensitivity, sensitivity_table, Cell, SensitivityRecord, SensitivityRow,
    DEFAULT_ERRORS, MAX_ERROR, MIN_ERROR,
};
