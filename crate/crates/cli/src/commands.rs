//! One function per subcommand; each writes its artifacts and returns the
//! lines to print.

use std::f64::consts::{FRAC_PI_2, PI};

use becreg_core::gates::{
    gate_timing, josephson_meanfield, readout_signal, run_cnot_desk, run_sqrtswap, sample_times, trajectory_stats,
    DeskCnotConfig, Initialization, MeanFieldState, TruthRow,
};
use becreg_core::hubbard::n0_term_ratio;
use becreg_core::noise::{
    lifetime_budget, loss_curve, sensitivity_report, ExternalLifetimes, SensitivityInputs, SwapSensitivity,
};
use serde::Serialize;

use crate::checks;
use crate::config::ScenarioConfig;
use crate::output::RunWriter;
use crate::pipeline::{self, Derived};

const TWO_PI: f64 = 2.0 * PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    Strict,
    Fast,
}

impl Profile {
    pub fn name(self) -> &'static str {
        match self {
            Profile::Strict => "strict",
            Profile::Fast => "fast",
        }
    }
}

/// What a subcommand produced, beyond its files.
pub struct Outcome {
    pub lines: Vec<String>,
    /// False when `validate` found a failing criterion.
    pub passed: bool,
}

impl Outcome {
    fn ok(lines: Vec<String>) -> Self {
        Outcome { lines, passed: true }
    }
}

fn bit(b: bool) -> &'static str {
    if b {
        "↑"
    } else {
        "↓"
    }
}

#[derive(Serialize)]
struct DerivedCsvRow<'a> {
    quantity: &'a str,
    value: f64,
    unit: &'a str,
    reference: Option<f64>,
    tolerance: String,
    status: &'a str,
}

pub fn derive(cfg: &ScenarioConfig, d: &Derived, out: &mut RunWriter) -> anyhow::Result<Outcome> {
    let rows = pipeline::derive_rows(d);
    let csv: Vec<_> = rows
        .iter()
        .map(|r| DerivedCsvRow {
            quantity: &r.quantity,
            value: r.value,
            unit: &r.unit,
            reference: r.reference,
            tolerance: r.tolerance(),
            status: r.status(),
        })
        .collect();
    out.csv("derived.csv", &csv)?;
    out.json("couplings.json", &d.couplings.report())?;
    let mut lines = vec![format!("derived parameters for N = {} atoms ({} condensed)", cfg.atoms.total, cfg.atoms.condensed)];
    for r in &rows {
        let reference = r.reference.map_or(String::new(), |v| format!("  (reference {v} {}, {})", r.unit, r.tolerance()));
        lines.push(format!("  {:<34} {:>13.6e} {:<13}{} {}", r.quantity, r.value, r.unit, reference, r.status()));
    }
    Ok(Outcome::ok(lines))
}

#[derive(Serialize)]
struct TrajectoryRow {
    t_s: f64,
    z_sigma0: f64,
    phi_sigma0_rad: f64,
    z_sigma1: f64,
    phi_sigma1_rad: f64,
}

#[derive(Serialize)]
struct JosephsonSummary {
    delta_star_rad_s: f64,
    j0_rad_s: f64,
    j1_rad_s: f64,
    ratio_j1_j0: f64,
    lambda_rad_s: f64,
    /// Largest n₀-dependent share of any coupling denominator over the gate.
    n0_term_ratio: f64,
    half_period_s: f64,
    transfer_sigma0: f64,
    drift_sigma1: f64,
    energy_drift: [f64; 2],
}

pub fn josephson(cfg: &ScenarioConfig, d: &Derived, out: &mut RunWriter) -> anyhow::Result<Outcome> {
    let (ip, mf) = pipeline::meanfield_cnot(cfg, d)?;
    let init = initial_state(cfg, mf.params[0].j);
    let times = sample_times(4.0 * mf.bec_step, cfg.tolerances.trajectory_samples);
    let a = josephson_meanfield(&mf.params[0], init, &times)?;
    let b = josephson_meanfield(&mf.params[1], init, &times)?;
    let rows: Vec<_> = times
        .iter()
        .zip(a.iter().zip(&b))
        .map(|(&t, (x, y))| TrajectoryRow { t_s: t, z_sigma0: x.z, phi_sigma0_rad: x.phi, z_sigma1: y.z, phi_sigma1_rad: y.phi })
        .collect();
    let sa = trajectory_stats(&mf.params[0], &a);
    // σ₁ = 1 should stay put; σ₁ = 0 should reach −z₀ at the half period.
    let sb = trajectory_stats(&mf.params[1], &b);
    let summary = JosephsonSummary {
        delta_star_rad_s: ip.delta,
        j0_rad_s: ip.j0,
        j1_rad_s: ip.j1,
        ratio_j1_j0: ip.ratio,
        lambda_rad_s: mf.params[0].lambda,
        n0_term_ratio: n0_term_ratio(&d.u, cfg.atoms.condensed, ip.delta, (0.2 * cfg.atoms.condensed, 0.8 * cfg.atoms.condensed)),
        half_period_s: mf.bec_step,
        transfer_sigma0: step_transfer(init.z, mf.z_after_step1[0]),
        drift_sigma1: sb.drift,
        energy_drift: [sa.energy_drift, sb.energy_drift],
    };
    out.csv("josephson.csv", &rows)?;
    out.json("josephson.json", &summary)?;
    Ok(Outcome::ok(vec![
        format!("interference detuning Δ* = {:.6e} rad/s, J₀ = {:.6e} rad/s, |J₁/J₀| = {:.3e}", ip.delta, ip.j0, ip.ratio),
        format!("σ₁ = 0: half period {:.6e} s, transfer {:.6} of z₀ → −z₀", mf.bec_step, summary.transfer_sigma0),
        format!("σ₁ = 1: max |z − z₀| = {:.3e} (imbalance)", sb.drift),
        format!("n₀-dependent denominator share over the gate: {:.3e} (fraction)", summary.n0_term_ratio),
    ]))
}

/// Fraction of the intended change z₀ → −z₀ reached at imbalance `z`.
pub fn step_transfer(z0: f64, z: f64) -> f64 {
    (z - z0) / (-2.0 * z0)
}

/// Condensate state after the Ω₀₂ preparation pulse.
pub fn initial_state(cfg: &ScenarioConfig, j0: f64) -> MeanFieldState {
    let z0 = if cfg.cnot.large_n0 { 0.6 } else { -0.6 };
    MeanFieldState::new(z0, -j0.signum() * f64::signum(z0) * FRAC_PI_2)
}

#[derive(Serialize)]
struct TruthCsvRow {
    model: &'static str,
    control: u8,
    target: u8,
    target_out: u8,
    probability: f64,
}

fn truth_rows(model: &'static str, rows: &[TruthRow]) -> Vec<TruthCsvRow> {
    rows.iter()
        .map(|r| TruthCsvRow {
            model,
            control: r.control as u8,
            target: r.target as u8,
            target_out: r.target_out as u8,
            probability: r.probability,
        })
        .collect()
}

#[derive(Serialize)]
struct CnotSummary {
    desk: becreg_core::gates::GateResult,
    meanfield: becreg_core::gates::GateResult,
    meanfield_delta_star_rad_s: f64,
    meanfield_bec_step_s: f64,
    timing: becreg_core::gates::GateTiming,
}

pub fn desk_config(cfg: &ScenarioConfig) -> DeskCnotConfig {
    DeskCnotConfig {
        n: cfg.cnot.desk_atoms,
        validity: cfg.cnot.desk_validity,
        init: if cfg.cnot.large_n0 { Initialization::LargeN0 } else { Initialization::SmallN0 },
        ..DeskCnotConfig::default()
    }
}

/// Pulse-area bookkeeping from the configured drive and detuning.
pub fn cnot_timing(cfg: &ScenarioConfig) -> becreg_core::Result<becreg_core::gates::GateTiming> {
    let om = TWO_PI * cfg.cnot.omega_Hz;
    gate_timing(TWO_PI * cfg.cnot.target_rate_Hz, om, om, cfg.cnot.detuning_rad_s, 0.6)
}

pub fn cnot(cfg: &ScenarioConfig, d: &Derived, out: &mut RunWriter) -> anyhow::Result<Outcome> {
    let desk = run_cnot_desk(&desk_config(cfg))?;
    out.mark("desk");
    let (ip, mf) = pipeline::meanfield_cnot(cfg, d)?;
    out.mark("meanfield");
    let timing = cnot_timing(cfg)?;
    let mut rows = truth_rows("desk", &desk.rows);
    rows.extend(truth_rows("meanfield", &mf.result.rows));
    out.csv("cnot_truth_table.csv", &rows)?;
    let mut lines = vec![format!("desk-scale exact CNOT (N = {}): fidelity {:.6}", cfg.cnot.desk_atoms, desk.fidelity)];
    for r in &desk.rows {
        lines.push(format!("  |{}{}⟩ → target {}: p = {:.6}", bit(r.control), bit(r.target), bit(r.target_out), r.probability));
    }
    lines.push(format!(
        "mean-field CNOT (N = {}): fidelity {:.6}, duration {:.6e} s",
        cfg.atoms.condensed, mf.result.fidelity, mf.result.duration
    ));
    lines.push(format!(
        "pulse-area timing: π pulse {:.6e} s, condensate step {:.6e} s, total {:.6e} s",
        timing.pi_pulse, timing.bec_step, timing.cnot_total
    ));
    out.json(
        "cnot.json",
        &CnotSummary { desk, meanfield: mf.result, meanfield_delta_star_rad_s: ip.delta, meanfield_bec_step_s: mf.bec_step, timing },
    )?;
    Ok(Outcome::ok(lines))
}

#[derive(Serialize)]
struct SwapSummary {
    cutoff_quanta: usize,
    oscillator_states: u64,
    u01_rad_s: f64,
    delta_bar_rad_s: f64,
    coupling_rad_s: f64,
    shifted_energies_rad_s: [f64; 2],
    balanced_detunings_rad_s: [f64; 2],
    gate_time_s: f64,
    validity_ratio: f64,
    bare_validity_ratio: f64,
    population_distance: f64,
    conditional_phase_rad: f64,
    double_swap_population: f64,
    completeness: [f64; 2],
    populations: [[f64; 4]; 4],
}

pub fn sqrtswap(cfg: &ScenarioConfig, d: &Derived, out: &mut RunWriter) -> anyhow::Result<Outcome> {
    let cutoff = cfg.sqrtswap.cutoff_quanta;
    let setup = pipeline::swap_setup(cfg, d, cutoff)?;
    out.mark("mode table");
    let h = pipeline::sqrtswap_hamiltonian(&setup, cutoff)?;
    out.mark("mode sum");
    let gate = run_sqrtswap(&h, None);
    let mut populations = [[0.0; 4]; 4];
    for (i, row) in populations.iter_mut().enumerate() {
        for (j, p) in row.iter_mut().enumerate() {
            *p = gate.unitary[(i, j)].norm_sqr();
        }
    }
    let summary = SwapSummary {
        cutoff_quanta: h.cutoff,
        oscillator_states: h.states,
        u01_rad_s: setup.u01,
        delta_bar_rad_s: setup.delta_bar,
        coupling_rad_s: h.coupling,
        shifted_energies_rad_s: h.energies,
        balanced_detunings_rad_s: h.detunings,
        gate_time_s: gate.duration,
        validity_ratio: h.validity_ratio,
        bare_validity_ratio: h.bare_validity_ratio,
        population_distance: gate.population_distance,
        conditional_phase_rad: gate.conditional_phase,
        double_swap_population: gate.double_swap_population,
        completeness: [setup.table.completeness(0, cutoff), setup.table.completeness(1, cutoff)],
        populations,
    };
    out.json("sqrtswap.json", &summary)?;
    let mut lines = vec![
        format!("√SWAP over {} oscillator states (≤ {} quanta)", h.states, h.cutoff),
        format!("  coupling g = {:.6e} rad/s, gate time π/(4|g|) = {:.6e} s", h.coupling, gate.duration),
        format!("  Δ̄ = {:.6e} rad/s, validity max Ω/|Δ̄ − ω̄| = {:.3}", setup.delta_bar, h.validity_ratio),
        format!("  population distance to ideal {:.3e}, conditional phase {:.6} rad", gate.population_distance, gate.conditional_phase),
    ];
    if h.validity_ratio > 0.1 {
        lines.push(format!("  warning: validity ratio {:.3} exceeds 0.1", h.validity_ratio));
    }
    Ok(Outcome::ok(lines))
}

#[derive(Serialize)]
struct ReadoutRow {
    t_s: f64,
    z_control_down: f64,
    z_control_up: f64,
}

#[derive(Serialize)]
struct ReadoutSummary {
    period_s: [Option<f64>; 2],
    amplitude: [f64; 2],
    contrast: f64,
}

pub fn readout(cfg: &ScenarioConfig, d: &Derived, out: &mut RunWriter) -> anyhow::Result<Outcome> {
    let (_, mf) = pipeline::meanfield_cnot(cfg, d)?;
    let init = initial_state(cfg, mf.params[0].j);
    let sig = readout_signal(&mf.params, init, cfg.readout.duration_ms * 1e-3, cfg.readout.samples)?;
    let rows: Vec<_> = (0..sig.times.len())
        .map(|i| ReadoutRow { t_s: sig.times[i], z_control_down: sig.z[0][i], z_control_up: sig.z[1][i] })
        .collect();
    out.csv("readout.csv", &rows)?;
    out.json("readout.json", &ReadoutSummary { period_s: sig.period, amplitude: sig.amplitude, contrast: sig.contrast })?;
    let show = |p: Option<f64>| p.map_or("none".to_string(), |v| format!("{v:.6e} s"));
    Ok(Outcome::ok(vec![
        format!("control |↓⟩: period {}, amplitude {:.6}", show(sig.period[0]), sig.amplitude[0]),
        format!("control |↑⟩: period {}, amplitude {:.3e}", show(sig.period[1]), sig.amplitude[1]),
        if sig.amplitude[1] > 0.0 {
            format!("contrast {:.3e} (dimensionless)", sig.contrast)
        } else {
            "contrast unbounded (control |↑⟩ trace is flat)".to_string()
        },
    ]))
}

#[derive(Serialize)]
struct LossRow {
    eta_atoms: u64,
    p_full: f64,
    p_approx: f64,
}

pub fn loss(cfg: &ScenarioConfig, out: &mut RunWriter) -> anyhow::Result<Outcome> {
    let l = &cfg.loss;
    let curve = loss_curve(l.atoms, l.qubits, l.points)?;
    let rows: Vec<_> = curve.iter().map(|&(eta, p_full, p_approx)| LossRow { eta_atoms: eta, p_full, p_approx }).collect();
    out.csv("loss.csv", &rows)?;
    let worst = curve.iter().map(|r| r.2 - r.1).fold(f64::NEG_INFINITY, f64::max);
    Ok(Outcome::ok(vec![
        format!("loss curve for N = {} atoms, m = {} qubits: {} rows", l.atoms, l.qubits, rows.len()),
        format!("  max (P_approx − P_full) = {worst:.3e} (probability)"),
    ]))
}

#[derive(Serialize)]
struct LifetimeRow<'a> {
    channel: &'a str,
    lifetime_s: f64,
    rate_per_s: f64,
}

#[derive(Serialize)]
struct SensitivityCsvRow<'a> {
    parameter: &'a str,
    nominal: f64,
    uncertainty: f64,
    parameter_unit: &'a str,
    quantity: &'a str,
    propagated: f64,
    unit: &'a str,
    reference: Option<f64>,
    path: &'a str,
}

pub fn budget(cfg: &ScenarioConfig, d: &Derived, out: &mut RunWriter) -> anyhow::Result<Outcome> {
    let b = &cfg.budget;
    let external = ExternalLifetimes {
        momentum_diffusion: b.momentum_diffusion_lifetime_s,
        background: b.background_lifetime_s,
        three_body: b.three_body_lifetime_s,
    };
    let lifetimes = lifetime_budget(&d.trap, external)?;
    let mut rows: Vec<_> = lifetimes
        .channels
        .iter()
        .map(|c| LifetimeRow { channel: &c.name, lifetime_s: c.lifetime, rate_per_s: 1.0 / c.lifetime })
        .collect();
    let combined = lifetimes.combined_lifetime();
    rows.push(LifetimeRow { channel: "combined", lifetime_s: combined, rate_per_s: 1.0 / combined });
    out.csv("lifetimes.csv", &rows)?;
    out.mark("lifetimes");

    let report = sensitivity(cfg, d)?;
    out.mark("sensitivity");
    let srows: Vec<_> = report
        .rows
        .iter()
        .map(|r| SensitivityCsvRow {
            parameter: &r.parameter,
            nominal: r.nominal,
            uncertainty: r.uncertainty,
            parameter_unit: &r.parameter_unit,
            quantity: &r.quantity,
            propagated: r.propagated,
            unit: &r.unit,
            reference: r.reference,
            path: &r.path,
        })
        .collect();
    out.csv("sensitivity.csv", &srows)?;

    let mut lines = vec!["lifetimes:".to_string()];
    for r in &rows {
        lines.push(format!("  {:<28} {:>10.4} s", r.channel, r.lifetime_s));
    }
    lines.push("sensitivities:".into());
    for r in &report.rows {
        let reference = r.reference.map_or(String::new(), |v| format!("  (reference {v:e} {})", r.unit));
        lines.push(format!("  {:<44} ±{:.4e} {}{}", r.quantity, r.propagated, r.unit, reference));
    }
    Ok(Outcome::ok(lines))
}

/// Sensitivity inputs from the configured trap, atom number and noise levels.
pub fn base_sensitivity_inputs<'a>(cfg: &ScenarioConfig, d: &Derived) -> SensitivityInputs<'a> {
    let b = &cfg.budget;
    let mut inp = SensitivityInputs::reference(d.u);
    inp.species = d.species.clone();
    inp.trap = d.trap.clone();
    inp.n = cfg.atoms.condensed;
    inp.single_qubit_rate = TWO_PI * cfg.cnot.target_rate_Hz;
    inp.b_uncertainty = b.field_noise_nT * 1e-9;
    inp.theta_uncertainty = b.theta_noise_deg.to_radians();
    inp.intensity_uncertainty = b.intensity_noise_W_cm2 * 1e4;
    inp.omega02 = b.omega02_rad_s;
    inp
}

/// Sensitivity report with the CNOT, √SWAP and drift rows filled in.
pub fn sensitivity(cfg: &ScenarioConfig, d: &Derived) -> anyhow::Result<becreg_core::noise::SensitivityReport> {
    let ip = pipeline::interference(cfg, d)?;
    let cutoff = cfg.sqrtswap.cutoff_quanta;
    let setup = pipeline::swap_setup(cfg, d, cutoff)?;
    let mut inp = base_sensitivity_inputs(cfg, d);
    inp.cnot = Some(pipeline::meanfield_cnot_config(cfg, &ip));
    inp.swap = Some(SwapSensitivity { table: &setup.table, delta: cfg.sqrtswap.detuning_rad_s, u01: setup.u01, cutoff });
    let sites = pipeline::swap_sites(cfg, d);
    inp.drift = Some((sites[0], d.tf.radius, cfg.budget.drift_fraction * d.lattice.spacing));
    Ok(sensitivity_report(&inp)?)
}

pub fn validate(cfg: &ScenarioConfig, profile: Profile, out: &mut RunWriter) -> anyhow::Result<Outcome> {
    let v = checks::run_all(cfg, profile)?;
    out.mark("checks");
    out.csv("validation.csv", &v.checks)?;
    let mut lines = Vec::new();
    for (criterion, pass) in v.summary() {
        lines.push(format!("criterion {criterion:>2} {:<30} {}", checks::criterion_name(criterion), if pass { "PASS" } else { "FAIL" }));
    }
    for r in v.checks.iter().filter(|r| !r.pass) {
        lines.push(format!("  failed [{}] {}: {:.6e} {} (expected {})", r.criterion, r.check, r.value, r.unit, r.expected));
    }
    for r in v.runtimes.iter().filter(|r| !r.pass()) {
        lines.push(format!("  failed [{}] runtime {:.3} s over budget {} s", r.criterion, r.seconds, r.budget));
    }
    Ok(Outcome { lines, passed: v.passed() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_transfer_endpoints() {
        assert_eq!(step_transfer(-0.6, -0.6), 0.0);
        assert_eq!(step_transfer(-0.6, 0.6), 1.0);
        assert_eq!(step_transfer(0.6, -0.6), 1.0);
    }

    #[test]
    fn initial_state_follows_the_split() {
        let mut cfg = ScenarioConfig::default();
        assert_eq!(initial_state(&cfg, 1.0).z, -0.6);
        cfg.cnot.large_n0 = true;
        assert_eq!(initial_state(&cfg, 1.0).z, 0.6);
    }

    #[test]
    fn loss_writes_only_in_memory() {
        let cfg = ScenarioConfig::default();
        let mut w = RunWriter::in_memory();
        loss(&cfg, &mut w).unwrap();
        assert_eq!(w.outputs().len(), 1);
        assert_eq!(w.outputs()[0].path, "loss.csv");
    }
}
