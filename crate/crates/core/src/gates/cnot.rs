use nalgebra::Complex;
use serde::Serialize;

use super::meanfield::{josephson_meanfield, oscillation_period, sample_times, MeanFieldState, TwoModeParams};
use super::{GateResult, Pulse, PulseTarget, TruthRow};
use crate::error::{Error, Result};
use crate::hubbard::{build_hamiltonian, find_interference_detuning, fock_energy, josephson_couplings, Drives, FockBasis, FockState, Propagator};

/// Which condensate split the protocol starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum Initialization {
    /// N₀ = N/5: the target flips iff the control is |↑⟩.
    #[default]
    SmallN0,
    /// N₀ = 4N/5: the complementary, anti-controlled gate.
    LargeN0,
}

/// Desk-scale CNOT with idealized interactions: every U equal except U₁₁, so
/// the interference detuning is exactly U₁₁ − U and the condensate levels
/// are degenerate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeskCnotConfig {
    /// Condensate atoms; must be a multiple of 5.
    pub n: u32,
    pub u: f64,
    pub u11: f64,
    /// Ω√N/Δ for the two-photon step.
    pub validity: f64,
    /// Single-qubit drive on the target (rad/s).
    pub omega_target: f64,
    /// 1 for the CNOT; 2 gives areas 2π and 4π (identity check).
    pub area_multiplier: f64,
    pub init: Initialization,
}

impl Default for DeskCnotConfig {
    fn default() -> Self {
        DeskCnotConfig {
            n: 20,
            u: 0.05,
            u11: 1000.0,
            validity: 0.02,
            omega_target: 1.0,
            area_multiplier: 1.0,
            init: Initialization::SmallN0,
        }
    }
}

/// Phase-insensitive overlap |⟨a|b⟩|².
pub fn state_fidelity(a: &[Complex<f64>], b: &[Complex<f64>]) -> f64 {
    a.iter().zip(b).fold(Complex::new(0.0, 0.0), |s, (x, y)| s + x.conj() * y).norm_sqr()
}

fn initial_state(cfg: &DeskCnotConfig, control: bool, target: bool) -> FockState {
    let (small, large) = (cfg.n / 5, 4 * cfg.n / 5);
    let (n0, n2) = match cfg.init {
        Initialization::SmallN0 => (small, large),
        Initialization::LargeN0 => (large, small),
    };
    let t = target as u32;
    FockState::two_site(n0 - t, [control as u32, t], n2 - t)
}

/// Runs the three-step protocol on all four inputs with exact Fock evolution.
pub fn run_cnot_desk(cfg: &DeskCnotConfig) -> Result<GateResult> {
    if cfg.n < 5 || cfg.n % 5 != 0 {
        return Err(Error::Config(format!("condensate number {} must be a positive multiple of 5", cfg.n)));
    }
    let n = cfg.n as f64;
    let mut u = [[cfg.u; 3]; 3];
    u[1][1] = cfg.u11;
    let guess = cfg.u11 - cfg.u;
    let ip = find_interference_detuning(&u, n, 1.0, (0.5 * guess, 1.5 * guess))?;
    let delta = ip.delta;
    let omega = cfg.validity * delta.abs() / n.sqrt();
    let hop = josephson_couplings(&u, n, 0.5 * n, delta, omega)?.j0;
    let t_bec = std::f64::consts::PI / (2.0 * hop.abs());

    let (small, large) = match cfg.init {
        Initialization::SmallN0 => ((cfg.n / 5) as f64, (4 * cfg.n / 5) as f64),
        Initialization::LargeN0 => ((4 * cfg.n / 5) as f64, (cfg.n / 5) as f64),
    };
    let ratio = (large / small).sqrt();
    if (ratio / 2.0 - 1.0).abs() > 0.01 && (ratio * 2.0 - 1.0).abs() > 0.01 {
        return Err(Error::Calibration(format!("branch Rabi ratio {ratio} is not 2")));
    }
    // The smaller-N₀ branch (frozen condensate) gets area π.
    let n0_flip = small.min(large);
    let g_flip = n0_flip.sqrt() * cfg.omega_target;
    let t_flip = cfg.area_multiplier * std::f64::consts::PI / (2.0 * g_flip);
    // Drive at the shifted resonance of the branch that should flip.
    let flip_control = matches!(cfg.init, Initialization::SmallN0);
    let probe = initial_state(cfg, flip_control, false);
    let mut moved = probe;
    moved.n0 -= 1;
    moved.sigma[1] = 1;
    let zero = Drives::default();
    let delta_t = -(fock_energy(&u, &zero, &moved) - fock_energy(&u, &zero, &probe));

    let step1 = Drives { omega01: [omega, 0.0], omega12: [omega, 0.0], omega02: 0.0, delta: [delta, 0.0] };
    let step2 = Drives { omega01: [0.0, cfg.omega_target], omega12: [0.0, 0.0], omega02: 0.0, delta: [0.0, delta_t] };

    let mut rows = Vec::new();
    for (control, target) in [(false, false), (false, true), (true, false), (true, true)] {
        let init = initial_state(cfg, control, target);
        let basis = FockBasis::new(init.total(), 2, 2)?;
        let p1 = Propagator::new(&build_hamiltonian(&basis, &u, &step1)?.matrix)?;
        let p2 = Propagator::new(&build_hamiltonian(&basis, &u, &step2)?.matrix)?;
        let i0 = basis.index_of(&init).ok_or_else(|| Error::numerical("initial state missing from basis"))?;
        let mut psi = crate::hubbard::unit_state(basis.len(), i0);
        psi = p1.evolve(&psi, t_bec)?;
        psi = p2.evolve(&psi, t_flip)?;
        psi = p1.evolve(&psi, t_bec)?;
        let flips = (control == flip_control) && cfg.area_multiplier == 1.0;
        let mut expected = init;
        if flips {
            // A swapped condensate returns the exchanged atom to the |2⟩ mode.
            let mode = if control { &mut expected.n0 } else { &mut expected.n2 };
            if target {
                *mode += 1;
            } else {
                *mode -= 1;
            }
            expected.sigma[1] = !target as u32;
        }
        let ie = basis.index_of(&expected).ok_or_else(|| Error::numerical("expected state missing from basis"))?;
        let want = crate::hubbard::unit_state(basis.len(), ie);
        rows.push(TruthRow {
            control,
            target,
            target_out: target ^ flips,
            probability: state_fidelity(&want, &psi),
        });
    }
    let schedule = vec![
        Pulse { target: PulseTarget::TwoPhoton, amplitude: omega, detuning: delta, duration: t_bec, site: 0 },
        Pulse { target: PulseTarget::Omega01, amplitude: cfg.omega_target, detuning: delta_t, duration: t_flip, site: 1 },
        Pulse { target: PulseTarget::TwoPhoton, amplitude: omega, detuning: delta, duration: t_bec, site: 0 },
    ];
    Ok(GateResult::new(rows, schedule))
}

/// Full-N CNOT from the mean-field condensate model and two-level target
/// rotations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanFieldCnotConfig {
    pub n: f64,
    /// Two-photon drive Ω₀₁ = Ω₁₂ (rad/s).
    pub omega: f64,
    pub delta: f64,
    /// √N₀Ω₀₁ for the target at N₀ = N/5 (rad/s).
    pub target_rate: f64,
    pub init: Initialization,
}

#[derive(Debug, Clone, Serialize)]
pub struct MeanFieldCnot {
    pub result: GateResult,
    /// Half of the measured σ₁ = 0 oscillation period (s).
    pub bec_step: f64,
    pub z_after_step1: [f64; 2],
    pub z_final: [f64; 2],
    pub params: [TwoModeParams; 2],
}

pub fn run_cnot_meanfield(u: &[[f64; 3]; 3], cfg: &MeanFieldCnotConfig) -> Result<MeanFieldCnot> {
    let frac = match cfg.init {
        Initialization::SmallN0 => 0.2,
        Initialization::LargeN0 => 0.8,
    };
    let c = josephson_couplings(u, cfg.n, frac * cfg.n, cfg.delta, cfg.omega)?;
    let p = [
        TwoModeParams::from_interactions(u, cfg.n, c.j0, [0.0; 2], true),
        TwoModeParams::from_interactions(u, cfg.n, c.j1, [0.0; 2], true),
    ];
    let z0 = 2.0 * frac - 1.0;
    // Prepared by a resonant Ω₀₂ rotation, which leaves φ = ±π/2.
    let init = MeanFieldState::new(z0, -p[0].j.signum() * z0.signum() * std::f64::consts::FRAC_PI_2);
    let span = 3.0 * p[0].linear_period();
    let traj = josephson_meanfield(&p[0], init, &sample_times(span, 6000))?;
    let period = oscillation_period(&traj).ok_or_else(|| Error::numerical("no condensate oscillation found"))?;
    let t_step = 0.5 * period;

    let mut z1 = [0.0; 2];
    let mut zf = [0.0; 2];
    for k in 0..2 {
        let a = josephson_meanfield(&p[k], init, &[t_step, 2.0 * t_step])?;
        z1[k] = a[0].z;
        zf[k] = a[1].z;
    }
    // Target rate scales with √N₀ during step 2.
    let n0_during = |k: usize| 0.5 * (1.0 + z1[k]) * cfg.n;
    let g_ref = cfg.target_rate / (frac * cfg.n).sqrt();
    let flip_branch = if frac < 0.5 { 1 } else { 0 };
    let g_flip = n0_during(flip_branch).sqrt() * g_ref;
    let t_flip = std::f64::consts::PI / (2.0 * g_flip);

    let mut rows = Vec::new();
    for (control, target) in [(false, false), (false, true), (true, false), (true, true)] {
        let k = control as usize;
        let g = n0_during(k).sqrt() * g_ref;
        let p_flip = (g * t_flip).sin().powi(2);
        let flips = k == flip_branch;
        let p_qubit = if flips { p_flip } else { 1.0 - p_flip };
        let p_bec = 1.0 - 0.5 * (zf[k] - z0).abs();
        rows.push(TruthRow { control, target, target_out: target ^ flips, probability: p_qubit * p_bec });
    }
    let schedule = vec![
        Pulse { target: PulseTarget::TwoPhoton, amplitude: cfg.omega, detuning: cfg.delta, duration: t_step, site: 0 },
        Pulse { target: PulseTarget::Omega01, amplitude: g_ref, detuning: 0.0, duration: t_flip, site: 1 },
        Pulse { target: PulseTarget::TwoPhoton, amplitude: cfg.omega, detuning: cfg.delta, duration: t_step, site: 0 },
    ];
    Ok(MeanFieldCnot { result: GateResult::new(rows, schedule), bec_step: t_step, z_after_step1: z1, z_final: zf, params: p })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn desk_cnot_truth_table() {
        let r = run_cnot_desk(&DeskCnotConfig::default()).unwrap();
        for row in &r.rows {
            assert!(row.probability > 0.99, "{row:?}");
            assert_eq!(row.target_out, row.target ^ row.control);
        }
        assert!((r.duration - r.schedule.iter().map(|p| p.duration).sum::<f64>()).abs() < 1e-12);
    }

    #[test]
    fn doubled_area_is_identity() {
        let cfg = DeskCnotConfig { area_multiplier: 2.0, ..Default::default() };
        let r = run_cnot_desk(&cfg).unwrap();
        for row in &r.rows {
            assert_eq!(row.target_out, row.target);
            assert!(row.probability > 0.99, "{row:?}");
        }
    }

    #[test]
    fn large_n0_start_is_anti_controlled() {
        let cfg = DeskCnotConfig { init: Initialization::LargeN0, ..Default::default() };
        let r = run_cnot_desk(&cfg).unwrap();
        for row in &r.rows {
            assert_eq!(row.target_out, row.target ^ !row.control);
            assert!(row.probability > 0.99, "{row:?}");
        }
    }

    #[test]
    fn fidelity_ignores_global_phase() {
        let a = vec![Complex::new(0.6, 0.0), Complex::new(0.0, 0.8)];
        let ph = Complex::from_polar(1.0, 1.234);
        let b: Vec<_> = a.iter().map(|x| x * ph).collect();
        assert!((state_fidelity(&a, &b) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bad_condensate_number() {
        let cfg = DeskCnotConfig { n: 12, ..Default::default() };
        assert!(matches!(run_cnot_desk(&cfg), Err(Error::Config(_))));
    }
}
