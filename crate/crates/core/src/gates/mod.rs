//! Gate protocols: condensate-controlled CNOT, √SWAP between neighbouring
//! sites, and the readout oscillation.

mod cnot;
mod meanfield;
mod readout;
mod swap;
mod timing;

use serde::Serialize;

pub use cnot::{run_cnot_desk, run_cnot_meanfield, state_fidelity, DeskCnotConfig, Initialization, MeanFieldCnot, MeanFieldCnotConfig};
pub use meanfield::{
    first_crossing, josephson_meanfield, josephson_meanfield_with, oscillation_period, sample_times, trajectory_stats,
    MeanFieldState, TrajectoryStats, TwoModeParams,
};
pub use readout::{readout_signal, ReadoutSignal};
pub use swap::{run_sqrtswap, SqrtSwapGate};
pub use timing::{effective_detuning, gate_timing, GateTiming};

/// Which coupling a pulse drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PulseTarget {
    Omega01,
    Omega12,
    Omega02,
    /// Ω₀₁ and Ω₁₂ together, detuned from the intermediate level.
    TwoPhoton,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Pulse {
    pub target: PulseTarget,
    /// Rabi frequency (rad/s).
    pub amplitude: f64,
    pub detuning: f64,
    /// Seconds.
    pub duration: f64,
    pub site: usize,
}

/// One computational input: control and target qubit values, the expected
/// target output, and the probability of landing on the expected state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruthRow {
    pub control: bool,
    pub target: bool,
    pub target_out: bool,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateResult {
    pub rows: Vec<TruthRow>,
    pub schedule: Vec<Pulse>,
    pub duration: f64,
    /// Worst-case probability over the inputs.
    pub fidelity: f64,
}

impl GateResult {
    pub fn new(rows: Vec<TruthRow>, schedule: Vec<Pulse>) -> Self {
        let duration = schedule.iter().map(|p| p.duration).sum();
        let fidelity = rows.iter().map(|r| r.probability).fold(f64::INFINITY, f64::min);
        GateResult { rows, schedule, duration, fidelity }
    }
}
