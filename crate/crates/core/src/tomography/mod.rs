//! Simulated projection-noise counts and reconstruction of one- and
//! two-qubit states and of the single-qubit process.

pub mod conditional;
pub mod counts;
pub mod process;
pub mod state;

pub use conditional::{conditional_branch, conditional_process, simulate_conditional_tomography};
pub use counts::{
    derive_seed, read_counts_csv, simulate_conditional_counts, simulate_counts, write_counts_csv, CountRecord,
    Measurable, MeasurementSetting,
};
pub use process::{
    exact_process_tomography, linear_inversion, project_cptp, reconstruct_process, simulate_process_tomography,
    ProcessTomographyRun, TomographyInputSet,
};
pub use state::{joint_from_expectations, reconstruct_state_1q, reconstruct_state_2q, state_from_bloch_estimate, two_qubit_settings};
