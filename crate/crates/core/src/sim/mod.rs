//! Monte Carlo simulation of the pointwise risk.

pub mod model;
pub mod report;
pub mod risk;
pub mod scenario;

pub use model::{true_regression, DesignSpec, ModelId};
pub use report::{write_calibration_csv, write_json, write_runs_csv};
pub use risk::{
    calibrate_c0, cells_1d, cells_2d, mc_risk, simulate_dataset, CalibrationRow, CalibrationTable, RiskReport,
    RiskSummary, RunRecord, RunStatus, SimulationReport, C0_GRID_1D, C0_GRID_2D,
};
pub use scenario::{BandwidthSpec, EstimatorConfig, Scenario, WarpKind, SCHEMA_VERSION};
