//! Full semiclassical reference model: six density-matrix elements per
//! detuning class and cell, coupled to one-dimensional probe propagation.

mod equations;
mod solver;
mod trajectory;

pub use equations::{atom_derivatives, rk4_step, AtomState, ClassRates};
pub use solver::{step_system, CellAverages, EnsembleState, MAX_PHASE_PER_STEP};
pub use trajectory::{
    analyze_trajectory, run_storage_protocol, ExcitationBudget, Snapshot, Trajectory, TrajectoryMetrics, LEAK_LIMIT,
};
