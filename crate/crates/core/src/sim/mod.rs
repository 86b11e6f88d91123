//! Scenario files, Monte Carlo runs, batch pipelines and CSV output.

mod csv;
mod monte_carlo;
mod pipelines;
mod scenario;
mod units;

pub use csv::{
    doppler_csv, gdop_csv, simulate_csv, sweep_csv, trajopt_csv, CsvHeader,
};
pub use monte_carlo::{run_monte_carlo, summarize, RunReport, Summary, TrialRecord, TrialStatus};
pub use pipelines::{
    altitude_sweep, doppler_pipeline, gdop_map, trajopt_pipeline, trajopt_problem, DopplerOutput, DopplerRow, GdopRow,
    SweepRow,
};
pub use scenario::{
    AltitudeSweep, DopplerSpec, GdopMapSpec, MeasurementPlan, MeasurementPlanKind, Scenario, TargetSource,
    TrajOptSpec, UserSpec,
};
pub use units::{normalize_units, Dimension};
