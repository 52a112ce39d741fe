//! Experiment configuration, parameter sweeps and CSV/JSON output.

pub mod config;
pub mod output;
pub mod sweep;

pub use config::{
    ExperimentConfig, Mode, OperatorSpec, QuadratureConfig, ResolvedSamples, SampleSizes,
    TrajectoryConfig,
};
pub use output::{
    emit_trajectory, format_g, sweep_csv, trajectory_csv, write_sweep_outputs,
    write_trajectory_outputs,
};
pub use sweep::{
    run_entangled_sweep, run_orthogonality_sweep, run_qubit_sweep, run_sweep, SweepReport,
    SweepResultRow,
};
