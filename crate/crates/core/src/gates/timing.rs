use serde::Serialize;

use crate::error::{Error, Result};

/// Protocol durations (s) from pulse-area bookkeeping: a single-qubit π
/// pulse at rate √N₀Ω₀₁, and each condensate step as the time for the
/// imbalance to move from −|z₀| to +|z₀| at the two-photon rate Ω₀₁Ω₁₂/Δ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GateTiming {
    pub pi_pulse: f64,
    pub bec_step: f64,
    pub cnot_total: f64,
    /// Ω₀₁Ω₁₂/Δ (rad/s).
    pub two_photon_rate: f64,
}

pub fn gate_timing(sqrt_n0_omega01: f64, omega01: f64, omega12: f64, detuning: f64, z0: f64) -> Result<GateTiming> {
    if !(sqrt_n0_omega01 > 0.0 && omega01 > 0.0 && omega12 > 0.0 && detuning != 0.0) {
        return Err(Error::domain("timing needs positive drives and a nonzero detuning"));
    }
    if !(z0.abs() < 1.0) {
        return Err(Error::domain(format!("|z₀| = {} must be below 1", z0.abs())));
    }
    let pi_pulse = std::f64::consts::PI / sqrt_n0_omega01;
    let rate = omega01 * omega12 / detuning.abs();
    let bec_step = 2.0 * z0.abs().asin() / rate;
    Ok(GateTiming { pi_pulse, bec_step, cnot_total: pi_pulse + 2.0 * bec_step, two_photon_rate: rate })
}

/// Detuning for which Ω²/Δ equals the hop coefficient `hop`.
pub fn effective_detuning(omega: f64, hop: f64) -> f64 {
    omega * omega / hop.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pulse_area_arithmetic() {
        let t = gate_timing(100.0, 3.0, 4.0, 12.0, 0.6).unwrap();
        assert!((t.pi_pulse - std::f64::consts::PI / 100.0).abs() < 1e-15);
        assert_eq!(t.two_photon_rate, 1.0);
        assert!((t.bec_step - 2.0 * 0.6f64.asin()).abs() < 1e-15);
        assert!((t.cnot_total - t.pi_pulse - 2.0 * t.bec_step).abs() < 1e-15);
        assert!(gate_timing(1.0, 1.0, 1.0, 0.0, 0.6).is_err());
        assert!(gate_timing(1.0, 1.0, 1.0, 1.0, 1.0).is_err());
    }
}
