//! Scenario files: JSON with the unit carried in every key name.
//!
//! `_Hz` keys are ordinary frequencies and get multiplied by 2π on the way in;
//! `_rad_s` keys are angular frequencies and pass through unchanged.
#![allow(non_snake_case)]

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use becreg_core::atomdata::AtomSpecies;
use becreg_core::optics::{angle_for_spacing, Axis, BeamSpec, LatticePair, Prefactor, TrapConfig};
use serde::{Deserialize, Serialize};

const TWO_PI: f64 = 2.0 * PI;

/// A schema or bounds violation, naming the offending key.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError { key: key.into(), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.key.is_empty() {
            write!(f, "invalid config: {}", self.message)
        } else {
            write!(f, "invalid config key `{}`: {}", self.key, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub species: SpeciesConfig,
    pub trap: TrapSection,
    pub lattice: LatticeSection,
    pub field: FieldSection,
    pub atoms: AtomsSection,
    pub couplings: CouplingsSection,
    pub cnot: CnotSection,
    pub sqrtswap: SwapSection,
    pub readout: ReadoutSection,
    pub loss: LossSection,
    pub budget: BudgetSection,
    /// Seeds the random grids used by `validate`.
    pub seed: u64,
    pub tolerances: ToleranceSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpeciesConfig {
    /// s-wave scattering lengths over the working states {|0⟩, |1⟩, |2⟩}.
    pub scattering_nm: [[f64; 3]; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamConfig {
    pub wavelength_nm: f64,
    pub power_mW: f64,
    pub waist_um: [f64; 2],
    pub axis: AxisName,
    #[serde(default)]
    pub polarization: i8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisName {
    X,
    Y,
    Z,
}

impl From<AxisName> for Axis {
    fn from(a: AxisName) -> Axis {
        match a {
            AxisName::X => Axis::X,
            AxisName::Y => Axis::Y,
            AxisName::Z => Axis::Z,
        }
    }
}

impl From<Axis> for AxisName {
    fn from(a: Axis) -> AxisName {
        match a {
            Axis::X => AxisName::X,
            Axis::Y => AxisName::Y,
            Axis::Z => AxisName::Z,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrapSection {
    pub beams: Vec<BeamConfig>,
    /// Trap frequency used by the condensate and oscillator-mode models.
    pub frequency_Hz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatticeSection {
    pub wavelength_nm: f64,
    /// Power per beam, identical for the three pairs.
    pub power_mW: f64,
    pub waist_um: f64,
    pub spacing_nm: f64,
    /// Polarization angle between the two beams of each pair.
    pub theta_deg: f64,
    /// Sites per axis; sites sit at (i − (n−1)/2)·d.
    pub sites_per_axis: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldSection {
    /// Magnitude, directed along (1, 1, 1).
    pub magnitude_G: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AtomsSection {
    /// Atoms loaded, condensed plus thermal.
    pub total: f64,
    /// Condensed atoms used by the gate models.
    pub condensed: f64,
    pub temperature_nK: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CouplingsSection {
    /// Replaces the derived interaction matrix when set.
    pub u_override_rad_s: Option<[[f64; 3]; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CnotSection {
    /// Ω₀₁ = Ω₁₂ for the two-photon bus transfer.
    pub omega_Hz: f64,
    /// Detuning near which the interference point is searched.
    pub detuning_rad_s: f64,
    /// √N₀Ω₀₁ for the target rotation at N₀ = N.
    pub target_rate_Hz: f64,
    /// Start from N₀ = 4N/5 instead of N/5 (anti-controlled gate).
    pub large_n0: bool,
    pub desk_atoms: u32,
    pub desk_validity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DressingConfig {
    pub wavelength_nm: f64,
    pub power_mW: f64,
    pub waist_um: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SwapSection {
    /// Lattice indices of the two qubits.
    pub sites: [[usize; 3]; 2],
    /// Free-space Ω̃₁₂ driving both sites.
    pub drive_Hz: f64,
    /// Bare detuning Δ; the site detuning is Δ + U₀₁N.
    pub detuning_rad_s: f64,
    pub cutoff_quanta: usize,
    /// Ω₀₂ beam dressing the oscillator levels; null disables it.
    pub dressing: Option<DressingConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReadoutSection {
    pub duration_ms: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LossSection {
    pub atoms: u64,
    pub qubits: u64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BudgetSection {
    pub field_noise_nT: f64,
    pub theta_noise_deg: f64,
    pub intensity_noise_W_cm2: f64,
    pub omega02_rad_s: f64,
    /// Lattice drift as a fraction of d.
    pub drift_fraction: f64,
    pub momentum_diffusion_lifetime_s: f64,
    pub background_lifetime_s: f64,
    pub three_body_lifetime_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceSection {
    /// Samples per trajectory in time-series outputs.
    pub trajectory_samples: usize,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            species: SpeciesConfig::default(),
            trap: TrapSection::default(),
            lattice: LatticeSection::default(),
            field: FieldSection::default(),
            atoms: AtomsSection::default(),
            couplings: CouplingsSection::default(),
            cnot: CnotSection::default(),
            sqrtswap: SwapSection::default(),
            readout: ReadoutSection::default(),
            loss: LossSection::default(),
            budget: BudgetSection::default(),
            seed: 7,
            tolerances: ToleranceSection::default(),
        }
    }
}

impl Default for SpeciesConfig {
    fn default() -> Self {
        let a = AtomSpecies::rubidium87().scattering;
        SpeciesConfig { scattering_nm: a.map(|r| r.map(|v| v * 1e9)) }
    }
}

impl Default for TrapSection {
    fn default() -> Self {
        let beams = TrapConfig::reference()
            .trap_beams
            .iter()
            .map(|b| BeamConfig {
                wavelength_nm: b.wavelength * 1e9,
                power_mW: b.power * 1e3,
                waist_um: b.waist.map(|w| w * 1e6),
                axis: b.axis.into(),
                polarization: b.polarization,
            })
            .collect();
        TrapSection { beams, frequency_Hz: 100.0 }
    }
}

impl Default for LatticeSection {
    fn default() -> Self {
        LatticeSection { wavelength_nm: 790.0, power_mW: 67.0, waist_um: 150.0, spacing_nm: 532.0, theta_deg: 90.0, sites_per_axis: 10 }
    }
}

impl Default for FieldSection {
    fn default() -> Self {
        FieldSection { magnitude_G: 5.4 }
    }
}

impl Default for AtomsSection {
    fn default() -> Self {
        AtomsSection { total: 1e6, condensed: 7e5, temperature_nK: 300.0 }
    }
}

impl Default for CnotSection {
    fn default() -> Self {
        CnotSection {
            omega_Hz: 192.0,
            detuning_rad_s: 12.9e3,
            target_rate_Hz: 100.0,
            large_n0: false,
            desk_atoms: 20,
            desk_validity: 0.02,
        }
    }
}

impl Default for DressingConfig {
    fn default() -> Self {
        DressingConfig { wavelength_nm: 532.0, power_mW: 0.2, waist_um: 14.1 }
    }
}

impl Default for SwapSection {
    fn default() -> Self {
        SwapSection {
            sites: [[0, 0, 0], [9, 9, 9]],
            drive_Hz: 11.2e3,
            detuning_rad_s: -2.14e3,
            cutoff_quanta: 700,
            dressing: Some(DressingConfig::default()),
        }
    }
}

impl Default for ReadoutSection {
    fn default() -> Self {
        ReadoutSection { duration_ms: 60.0, samples: 1200 }
    }
}

impl Default for LossSection {
    fn default() -> Self {
        LossSection { atoms: 700_000, qubits: 1000, points: 200 }
    }
}

impl Default for BudgetSection {
    fn default() -> Self {
        BudgetSection {
            field_noise_nT: 4.3,
            theta_noise_deg: 1.2,
            intensity_noise_W_cm2: 0.312,
            omega02_rad_s: 1e3,
            drift_fraction: 0.1,
            momentum_diffusion_lifetime_s: 4.99,
            background_lifetime_s: 5.0,
            three_body_lifetime_s: 18.3,
        }
    }
}

impl Default for ToleranceSection {
    fn default() -> Self {
        ToleranceSection { trajectory_samples: 2000 }
    }
}

fn positive(key: &str, v: f64, unit: &str) -> Result<(), ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(ConfigError::new(key, format!("expected a positive value in {unit}, got {v}")))
    }
}

fn non_negative(key: &str, v: f64, unit: &str) -> Result<(), ConfigError> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(ConfigError::new(key, format!("expected a non-negative value in {unit}, got {v}")))
    }
}

fn finite(key: &str, v: f64, unit: &str) -> Result<(), ConfigError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::new(key, format!("expected a finite value in {unit}, got {v}")))
    }
}

impl ScenarioConfig {
    /// Reads and validates a scenario file.
    pub fn from_path(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| anyhow::anyhow!("reading {}: {e}", path.display()))?;
        Ok(Self::from_json(&text)?)
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: ScenarioConfig = serde_json::from_str(text).map_err(|e| ConfigError::new("", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Canonical JSON; parsing it back gives the same config.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (i, row) in self.species.scattering_nm.iter().enumerate() {
            for (j, &a) in row.iter().enumerate() {
                finite(&format!("species.scattering_nm[{i}][{j}]"), a, "nm")?;
                if a != self.species.scattering_nm[j][i] {
                    return Err(ConfigError::new("species.scattering_nm", "matrix must be symmetric"));
                }
            }
        }
        if self.trap.beams.is_empty() {
            return Err(ConfigError::new("trap.beams", "at least one trap beam is required"));
        }
        for (i, b) in self.trap.beams.iter().enumerate() {
            positive(&format!("trap.beams[{i}].wavelength_nm"), b.wavelength_nm, "nm")?;
            non_negative(&format!("trap.beams[{i}].power_mW"), b.power_mW, "mW")?;
            positive(&format!("trap.beams[{i}].waist_um[0]"), b.waist_um[0], "μm")?;
            positive(&format!("trap.beams[{i}].waist_um[1]"), b.waist_um[1], "μm")?;
            if b.polarization.abs() > 1 {
                return Err(ConfigError::new(format!("trap.beams[{i}].polarization"), "expected -1, 0 or 1"));
            }
        }
        positive("trap.frequency_Hz", self.trap.frequency_Hz, "Hz")?;
        let l = &self.lattice;
        positive("lattice.wavelength_nm", l.wavelength_nm, "nm")?;
        non_negative("lattice.power_mW", l.power_mW, "mW")?;
        positive("lattice.waist_um", l.waist_um, "μm")?;
        positive("lattice.spacing_nm", l.spacing_nm, "nm")?;
        if l.spacing_nm < 0.5 * l.wavelength_nm {
            return Err(ConfigError::new("lattice.spacing_nm", "spacing below half the lattice wavelength"));
        }
        finite("lattice.theta_deg", l.theta_deg, "deg")?;
        if l.sites_per_axis == 0 {
            return Err(ConfigError::new("lattice.sites_per_axis", "expected at least one site"));
        }
        non_negative("field.magnitude_G", self.field.magnitude_G, "G")?;
        let a = &self.atoms;
        positive("atoms.total", a.total, "atoms")?;
        positive("atoms.condensed", a.condensed, "atoms")?;
        if a.condensed > a.total {
            return Err(ConfigError::new("atoms.condensed", "exceeds atoms.total"));
        }
        non_negative("atoms.temperature_nK", a.temperature_nK, "nK")?;
        if let Some(u) = &self.couplings.u_override_rad_s {
            for i in 0..3 {
                for j in 0..3 {
                    finite(&format!("couplings.u_override_rad_s[{i}][{j}]"), u[i][j], "rad/s")?;
                    if u[i][j] != u[j][i] {
                        return Err(ConfigError::new("couplings.u_override_rad_s", "matrix must be symmetric"));
                    }
                }
            }
        }
        let c = &self.cnot;
        positive("cnot.omega_Hz", c.omega_Hz, "Hz")?;
        positive("cnot.detuning_rad_s", c.detuning_rad_s, "rad/s")?;
        positive("cnot.target_rate_Hz", c.target_rate_Hz, "Hz")?;
        if c.desk_atoms < 5 || c.desk_atoms % 5 != 0 {
            return Err(ConfigError::new("cnot.desk_atoms", "expected a positive multiple of 5"));
        }
        positive("cnot.desk_validity", c.desk_validity, "dimensionless")?;
        let s = &self.sqrtswap;
        for (k, site) in s.sites.iter().enumerate() {
            if site.iter().any(|&i| i >= l.sites_per_axis) {
                return Err(ConfigError::new(format!("sqrtswap.sites[{k}]"), "index outside the lattice"));
            }
        }
        if s.sites[0] == s.sites[1] {
            return Err(ConfigError::new("sqrtswap.sites", "the two qubits must differ"));
        }
        non_negative("sqrtswap.drive_Hz", s.drive_Hz, "Hz")?;
        finite("sqrtswap.detuning_rad_s", s.detuning_rad_s, "rad/s")?;
        if s.cutoff_quanta > becreg_core::modes::MAX_QUANTA {
            return Err(ConfigError::new(
                "sqrtswap.cutoff_quanta",
                format!("expected at most {} quanta", becreg_core::modes::MAX_QUANTA),
            ));
        }
        if let Some(d) = &s.dressing {
            positive("sqrtswap.dressing.wavelength_nm", d.wavelength_nm, "nm")?;
            non_negative("sqrtswap.dressing.power_mW", d.power_mW, "mW")?;
            positive("sqrtswap.dressing.waist_um", d.waist_um, "μm")?;
        }
        positive("readout.duration_ms", self.readout.duration_ms, "ms")?;
        if self.readout.samples < 2 {
            return Err(ConfigError::new("readout.samples", "expected at least 2 samples"));
        }
        let lo = &self.loss;
        if lo.atoms < 2 {
            return Err(ConfigError::new("loss.atoms", "expected at least 2 atoms"));
        }
        if lo.qubits == 0 || lo.qubits >= lo.atoms {
            return Err(ConfigError::new("loss.qubits", "expected 1 ≤ qubits < atoms"));
        }
        if lo.points < 2 {
            return Err(ConfigError::new("loss.points", "expected at least 2 points"));
        }
        let b = &self.budget;
        non_negative("budget.field_noise_nT", b.field_noise_nT, "nT")?;
        non_negative("budget.theta_noise_deg", b.theta_noise_deg, "deg")?;
        non_negative("budget.intensity_noise_W_cm2", b.intensity_noise_W_cm2, "W/cm²")?;
        positive("budget.omega02_rad_s", b.omega02_rad_s, "rad/s")?;
        non_negative("budget.drift_fraction", b.drift_fraction, "lattice spacings")?;
        positive("budget.momentum_diffusion_lifetime_s", b.momentum_diffusion_lifetime_s, "s")?;
        positive("budget.background_lifetime_s", b.background_lifetime_s, "s")?;
        positive("budget.three_body_lifetime_s", b.three_body_lifetime_s, "s")?;
        if self.tolerances.trajectory_samples < 2 {
            return Err(ConfigError::new("tolerances.trajectory_samples", "expected at least 2 samples"));
        }
        Ok(())
    }

    pub fn species(&self) -> AtomSpecies {
        let mut s = AtomSpecies::rubidium87();
        s.scattering = self.species.scattering_nm.map(|r| r.map(|v| v * 1e-9));
        s
    }

    /// Optical configuration in SI units.
    pub fn trap_config(&self) -> anyhow::Result<TrapConfig> {
        let l = &self.lattice;
        let phi = angle_for_spacing(l.wavelength_nm * 1e-9, l.spacing_nm * 1e-9)?;
        let pair = |axis| LatticePair {
            wavelength: l.wavelength_nm * 1e-9,
            power: l.power_mW * 1e-3,
            waist: l.waist_um * 1e-6,
            axis,
            phi,
            theta: l.theta_deg.to_radians(),
        };
        let trap_beams = self
            .trap
            .beams
            .iter()
            .map(|b| BeamSpec::new(b.wavelength_nm * 1e-9, b.power_mW * 1e-3, b.waist_um.map(|w| w * 1e-6), b.axis.into(), b.polarization))
            .collect::<Result<Vec<_>, _>>()?;
        let b = self.field.magnitude_G * 1e-4 / 3f64.sqrt();
        let cfg = TrapConfig {
            species: self.species(),
            trap_beams,
            lattice: [pair(Axis::X), pair(Axis::Y), pair(Axis::Z)],
            b_field: [b, b, b],
            prefactor: Prefactor::LineSpecific,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn trap_omega(&self) -> f64 {
        TWO_PI * self.trap.frequency_Hz
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_is_the_reference_scenario() {
        let cfg = ScenarioConfig::from_json("{}").unwrap();
        assert_eq!(cfg, ScenarioConfig::default());
        let trap = cfg.trap_config().unwrap();
        assert_eq!(trap.trap_beams.len(), 2);
        let r = TrapConfig::reference();
        for (a, b) in trap.trap_beams.iter().zip(&r.trap_beams) {
            assert!((a.power - b.power).abs() < 1e-15);
            assert!((a.waist[0] - b.waist[0]).abs() < 1e-18);
        }
        assert!((trap.lattice[0].phi - r.lattice[0].phi).abs() < 1e-12);
        assert!((trap.b_field[0] - r.b_field[0]).abs() < 1e-18);
    }

    #[test]
    fn negative_power_names_the_key() {
        let e = ScenarioConfig::from_json(r#"{"lattice": {"power_mW": -1}}"#).unwrap_err();
        assert_eq!(e.key, "lattice.power_mW");
        assert!(e.to_string().contains("mW"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let e = ScenarioConfig::from_json(r#"{"lattice": {"power": 1}}"#).unwrap_err();
        assert!(e.to_string().contains("power"), "{e}");
        assert!(ScenarioConfig::from_json(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn canonical_form_round_trips() {
        let cfg = ScenarioConfig::from_json(r#"{"atoms": {"total": 2e6}, "seed": 3}"#).unwrap();
        let once = cfg.canonical_json();
        let twice = ScenarioConfig::from_json(&once).unwrap().canonical_json();
        assert_eq!(once, twice);
    }

    #[test]
    fn partial_sections_keep_other_defaults() {
        let cfg = ScenarioConfig::from_json(r#"{"cnot": {"omega_Hz": 150}}"#).unwrap();
        assert_eq!(cfg.cnot.omega_Hz, 150.0);
        assert_eq!(cfg.cnot.detuning_rad_s, 12.9e3);
    }
}
