//! Scenario → physics objects, shared by every subcommand.

use std::f64::consts::PI;

use becreg_core::atomdata::{
    condensation_temperature, thermal_level_occupation, zeeman_splitting, AtomSpecies, CondensateThermodynamics,
    InternalState,
};
use becreg_core::couplings::{ho_mode_couplings, stark_shifted_spectrum, CouplingSet, ModeCouplingTable, StarkDressing};
use becreg_core::gates::{run_cnot_meanfield, Initialization, MeanFieldCnot, MeanFieldCnotConfig};
use becreg_core::hubbard::{balance_detunings, interference_near, InterferencePoint, SqrtSwapHamiltonian};
use becreg_core::modes::{solve_thomas_fermi, solve_wannier, SiteGrid, ThomasFermiState, Wannier1D};
use becreg_core::optics::{fit_harmonic_frequency, Axis, HarmonicFit, LatticeSpec, TrapConfig};
use becreg_core::Result;
use serde::Serialize;

use crate::config::ScenarioConfig;

const TWO_PI: f64 = 2.0 * PI;

/// Everything computed from the optical setup and atom numbers.
#[derive(Debug, Clone)]
pub struct Derived {
    pub species: AtomSpecies,
    pub trap: TrapConfig,
    pub fit: HarmonicFit,
    pub lattice: LatticeSpec,
    pub wannier: Wannier1D,
    pub tf: ThomasFermiState,
    pub thermo: CondensateThermodynamics,
    /// Mean occupation of one first-excited oscillator state.
    pub first_excited: f64,
    /// 1 − T_c(N/5)/T_c(N).
    pub tc_drop: f64,
    pub zeeman_hz: f64,
    /// Qubit site nearest the trap centre.
    pub site: [f64; 3],
    pub couplings: CouplingSet,
    /// Interaction matrix used by the gate models.
    pub u: [[f64; 3]; 3],
}

pub fn derive(cfg: &ScenarioConfig, trap: TrapConfig) -> Result<Derived> {
    let species = trap.species.clone();
    let ket0 = InternalState::ket0();
    let fit = fit_harmonic_frequency(|r| trap.trap_potential(r, &ket0), [0.0; 3], species.mass)?;
    let lattice = trap.lattice_spec(Axis::X, &InternalState::ket1())?;
    let wannier = solve_wannier(lattice.depth, lattice.k_eff, species.mass)?;
    let omega = cfg.trap_omega();
    let tf = solve_thomas_fermi(cfg.atoms.condensed, &species, 0, omega)?;
    let thermo = CondensateThermodynamics::new(cfg.atoms.total, cfg.atoms.temperature_nK * 1e-9, omega)?;
    let first_excited = thermal_level_occupation(omega, cfg.atoms.temperature_nK * 1e-9)?;
    let n0 = cfg.atoms.condensed;
    let tc_drop = 1.0 - condensation_temperature(0.2 * n0, omega)? / condensation_temperature(n0, omega)?;
    let b = trap.b_field.iter().map(|v| v * v).sum::<f64>().sqrt();
    let zeeman_hz = zeeman_splitting(&species, b, &ket0, &InternalState::ket1())?;
    let grid = SiteGrid::new(cfg.lattice.sites_per_axis, lattice.spacing);
    let site = grid.central();
    let couplings = CouplingSet::derive(&species, &tf, &wannier, site)?;
    let u = cfg.couplings.u_override_rad_s.unwrap_or(couplings.u);
    Ok(Derived { species, trap, fit, lattice, wannier, tf, thermo, first_excited, tc_drop, zeeman_hz, site, couplings, u })
}

/// How a derived number is compared with its reference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Check {
    Relative(f64),
    Absolute(f64),
    /// Within this multiplicative factor either way.
    Factor(f64),
    Informational,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub quantity: String,
    pub value: f64,
    pub unit: String,
    pub reference: Option<f64>,
    pub check: Check,
}

impl Row {
    pub fn new(quantity: &str, value: f64, unit: &str, reference: Option<f64>, check: Check) -> Self {
        Row { quantity: quantity.into(), value, unit: unit.into(), reference, check }
    }

    pub fn passes(&self) -> Option<bool> {
        let r = self.reference?;
        let v = self.value;
        match self.check {
            Check::Relative(t) => Some((v / r - 1.0).abs() <= t),
            Check::Absolute(t) => Some((v - r).abs() <= t),
            Check::Factor(f) => Some(v / r <= f && r / v <= f),
            Check::Informational => None,
        }
    }

    pub fn tolerance(&self) -> String {
        match self.check {
            Check::Relative(t) => format!("±{}%", t * 100.0),
            Check::Absolute(t) => format!("±{t:e} {}", self.unit),
            Check::Factor(f) => format!("×{f}"),
            Check::Informational => "-".into(),
        }
    }

    pub fn status(&self) -> &'static str {
        match self.passes() {
            Some(true) => "pass",
            Some(false) => "FAIL",
            None => "-",
        }
    }
}

/// The derived-parameter table with reference values.
pub fn derive_rows(d: &Derived) -> Vec<Row> {
    use Check::*;
    let u = &d.couplings.u;
    let mut rows = vec![
        Row::new("trap frequency ω̄/2π (fit)", d.fit.omega_bar / TWO_PI, "Hz", Some(100.0), Relative(0.05)),
        Row::new("trap anisotropy", d.fit.anisotropy, "fraction", None, Informational),
        Row::new("lattice depth V₀ (|1⟩)", d.lattice.depth, "rad/s", Some(800e3), Relative(0.05)),
        Row::new("lattice spacing d", d.lattice.spacing * 1e9, "nm", Some(532.0), Absolute(1e-6)),
        Row::new("band gap", d.wannier.band_gap, "rad/s", Some(190e3), Relative(0.10)),
        Row::new("tunneling", d.wannier.tunneling, "rad/s", Some(0.09), Factor(2.0)),
        Row::new("U₁₁", u[1][1], "rad/s", Some(13.0e3), Relative(0.10)),
        Row::new("U₀₀", u[0][0], "rad/s", Some(0.0197), Relative(0.10)),
        Row::new("U₂₂", u[2][2], "rad/s", Some(0.0184), Relative(0.10)),
        Row::new("U₀₁", u[0][1], "rad/s", Some(0.0342), Relative(0.10)),
        Row::new("U₁₂", u[1][2], "rad/s", Some(0.0332), Relative(0.10)),
        Row::new("U₀₂", u[0][2], "rad/s", Some(0.0193), Relative(0.10)),
        Row::new("1/η_FC", 1.0 / d.couplings.eta_fc, "dimensionless", Some(364.0), Relative(0.10)),
        Row::new("enhancement √N₀·η_FC", d.couplings.enhancement, "dimensionless", Some(2.30), Relative(0.10)),
        Row::new("Thomas–Fermi radius", d.tf.radius * 1e6, "μm", Some(18.1), Relative(0.05)),
        Row::new("chemical potential", d.tf.mu, "rad/s", None, Informational),
        Row::new("condensation temperature", d.thermo.t_c * 1e9, "nK", None, Informational),
        Row::new("condensate fraction", d.thermo.n_condensed / d.thermo.n_total, "fraction", Some(0.70), Absolute(0.02)),
        Row::new("first-excited-state occupation", d.first_excited, "atoms", Some(62.0), Absolute(2.0)),
        Row::new("T_c drop at N → N/5", d.tc_drop, "fraction", Some(0.415), Absolute(0.001)),
        Row::new("Zeeman |0⟩→|1⟩", d.zeeman_hz, "Hz", Some(3.78e6), Relative(0.01)),
    ];
    rows.push(Row::new("qubit site radius", d.site.iter().map(|x| x * x).sum::<f64>().sqrt() * 1e6, "μm", None, Informational));
    rows
}

/// Interference point of the CNOT bus drive.
pub fn interference(cfg: &ScenarioConfig, d: &Derived) -> Result<InterferencePoint> {
    interference_near(&d.u, cfg.atoms.condensed, TWO_PI * cfg.cnot.omega_Hz, cfg.cnot.detuning_rad_s)
}

pub fn meanfield_cnot_config(cfg: &ScenarioConfig, ip: &InterferencePoint) -> MeanFieldCnotConfig {
    MeanFieldCnotConfig {
        n: cfg.atoms.condensed,
        omega: TWO_PI * cfg.cnot.omega_Hz,
        delta: ip.delta,
        target_rate: TWO_PI * cfg.cnot.target_rate_Hz,
        init: if cfg.cnot.large_n0 { Initialization::LargeN0 } else { Initialization::SmallN0 },
    }
}

pub fn meanfield_cnot(cfg: &ScenarioConfig, d: &Derived) -> Result<(InterferencePoint, MeanFieldCnot)> {
    let ip = interference(cfg, d)?;
    let run = run_cnot_meanfield(&d.u, &meanfield_cnot_config(cfg, &ip))?;
    Ok((ip, run))
}

/// Site positions of the two √SWAP qubits.
pub fn swap_sites(cfg: &ScenarioConfig, d: &Derived) -> [[f64; 3]; 2] {
    let grid = SiteGrid::new(cfg.lattice.sites_per_axis, d.lattice.spacing);
    cfg.sqrtswap.sites.map(|i| grid.position(i))
}

#[derive(Debug, Clone)]
pub struct SwapSetup {
    pub table: ModeCouplingTable,
    /// U₀₁ at the first site (rad/s).
    pub u01: f64,
    /// Δ̄ = Δ + U₀₁N at the first site (rad/s).
    pub delta_bar: f64,
}

/// Mode-coupling table for the configured site pair with `cutoff` quanta,
/// dressed by the Ω₀₂ beam when one is configured.
pub fn swap_setup(cfg: &ScenarioConfig, d: &Derived, cutoff: usize) -> Result<SwapSetup> {
    let sites = swap_sites(cfg, d);
    let g02 = d.species.contact_coupling(0, 2);
    let omega = cfg.trap_omega();
    let bare = ho_mode_couplings(&d.wannier, sites, TWO_PI * cfg.sqrtswap.drive_Hz, omega, d.species.mass, cutoff, &d.tf, g02)?;
    let table = match &cfg.sqrtswap.dressing {
        Some(b) => {
            let dressing = StarkDressing::from_beam(&d.species, b.wavelength_nm * 1e-9, b.power_mW * 1e-3, b.waist_um * 1e-6)?;
            stark_shifted_spectrum(&bare, &dressing, &d.tf)?
        }
        None => bare,
    };
    let u01 = CouplingSet::derive(&d.species, &d.tf, &d.wannier, sites[0])?.u[0][1];
    let delta_bar = cfg.sqrtswap.detuning_rad_s + u01 * cfg.atoms.condensed;
    Ok(SwapSetup { table, u01, delta_bar })
}

/// Balanced effective √SWAP Hamiltonian at `cutoff` quanta.
pub fn sqrtswap_hamiltonian(setup: &SwapSetup, cutoff: usize) -> Result<SqrtSwapHamiltonian> {
    balance_detunings(&setup.table, setup.delta_bar, cutoff, 1e-6)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_scenario_rows_are_filled() {
        let cfg = ScenarioConfig::default();
        let d = derive(&cfg, cfg.trap_config().unwrap()).unwrap();
        let rows = derive_rows(&d);
        assert!(rows.iter().all(|r| r.value.is_finite() && !r.unit.is_empty()));
        let depth = rows.iter().find(|r| r.quantity.starts_with("lattice depth")).unwrap();
        assert_eq!(depth.passes(), Some(true));
    }

    #[test]
    fn check_semantics() {
        let r = Row::new("x", 1.9, "u", Some(1.0), Check::Factor(2.0));
        assert_eq!(r.passes(), Some(true));
        let r = Row::new("x", 2.1, "u", Some(1.0), Check::Factor(2.0));
        assert_eq!(r.passes(), Some(false));
        let r = Row::new("x", 1.04, "u", Some(1.0), Check::Relative(0.05));
        assert_eq!(r.passes(), Some(true));
        assert_eq!(Row::new("x", 1.0, "u", None, Check::Informational).status(), "-");
    }
}
