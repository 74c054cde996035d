//! Physical constants, ⁸⁷Rb species data, Zeeman energies and ideal-gas
//! condensate thermodynamics.
//!
//! Energies are angular frequencies (rad/s) unless a name says `_hz`.

use serde::Serialize;

use crate::error::{Error, Result};

pub const HBAR: f64 = 1.054_571_817e-34;
pub const PLANCK: f64 = 6.626_070_15e-34;
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const BOLTZMANN: f64 = 1.380_649e-23;
pub const BOHR_MAGNETON: f64 = 9.274_010_078_3e-24;
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
/// Riemann ζ(3).
pub const ZETA_3: f64 = 1.202_056_903_159_594_2;
pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Quoted Zeeman anharmonicity at 5.4 G (Hz). Stored, not recomputed: the
/// figure comes from the Breit–Rabi formula, which is outside this model.
pub const ZEEMAN_ANHARMONICITY_REF_HZ: f64 = 13.0e3;

/// One optical transition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Line {
    /// Transition angular frequency (rad/s).
    pub omega: f64,
    /// Natural linewidth (rad/s).
    pub gamma: f64,
    /// Reduced dipole matrix element (C·m).
    pub dipole: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomSpecies {
    pub name: String,
    pub mass: f64,
    pub d1: Line,
    pub d2: Line,
    pub hyperfine_splitting_hz: f64,
    /// Landé factor of the lower (F = I − ½) ground manifold.
    pub g_f_lower: f64,
    /// Landé factor of the upper (F = I + ½) ground manifold.
    pub g_f_upper: f64,
    /// F quantum number of the lower ground manifold.
    pub f_lower: u8,
    /// s-wave scattering lengths (m) over the three working states.
    pub scattering: [[f64; 3]; 3],
}

impl AtomSpecies {
    pub fn rubidium87() -> Self {
        let nm = 1e-9;
        let (a00, a11, a22, a01, a02, a12) = (5.34, 5.31, 5.00, 5.31, 5.23, 5.16);
        AtomSpecies {
            name: "87Rb".into(),
            mass: 1.443_160_648e-25,
            d1: Line {
                omega: TWO_PI * 377.107_463_380e12,
                gamma: TWO_PI * 5.7500e6,
                dipole: 2.537e-29,
            },
            d2: Line {
                omega: TWO_PI * 384.230_484_468_5e12,
                gamma: TWO_PI * 6.0666e6,
                dipole: 3.584e-29,
            },
            hyperfine_splitting_hz: 6.834_682_610_904e9,
            g_f_lower: -0.5,
            g_f_upper: 0.5,
            f_lower: 1,
            scattering: [
                [a00 * nm, a01 * nm, a02 * nm],
                [a01 * nm, a11 * nm, a12 * nm],
                [a02 * nm, a12 * nm, a22 * nm],
            ],
        }
    }

    /// Checks symmetry and positivity of the species data.
    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0) {
            return Err(Error::Config("species mass must be positive".into()));
        }
        for i in 0..3 {
            for j in 0..3 {
                let a = self.scattering[i][j];
                if !(a > 0.0) || !a.is_finite() {
                    return Err(Error::Config(format!("scattering length a{i}{j} must be positive")));
                }
                if a != self.scattering[j][i] {
                    return Err(Error::Config(format!("scattering matrix not symmetric at ({i},{j})")));
                }
            }
        }
        for line in [&self.d1, &self.d2] {
            if !(line.omega > 0.0 && line.gamma > 0.0) {
                return Err(Error::Config("optical line data must be positive".into()));
            }
        }
        Ok(())
    }

    /// Contact coupling g_ij/ħ = 4πħa_ij/m in rad/s·m³.
    pub fn contact_coupling(&self, i: usize, j: usize) -> f64 {
        4.0 * std::f64::consts::PI * HBAR * self.scattering[i][j] / self.mass
    }

    /// Landé factor for a ground-manifold state.
    pub fn g_f(&self, state: &InternalState) -> Result<f64> {
        match state.band {
            Band::Ground if state.f == self.f_lower => Ok(self.g_f_lower),
            Band::Ground if state.f == self.f_lower + 1 => Ok(self.g_f_upper),
            _ => Err(Error::Config(format!("no ground Landé factor for {state:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Band {
    /// 5²S₁/₂
    Ground,
    /// 5²P₁/₂
    ExcitedP12,
}

/// Which of the three model levels a hyperfine state plays.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Role {
    Zero,
    One,
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct InternalState {
    pub f: u8,
    pub m_f: i8,
    pub band: Band,
    pub role: Role,
}

impl InternalState {
    pub fn new(f: u8, m_f: i8, band: Band, role: Role) -> Result<Self> {
        if m_f.unsigned_abs() > f {
            return Err(Error::domain(format!("|m_F| = {} exceeds F = {f}", m_f.unsigned_abs())));
        }
        Ok(InternalState { f, m_f, band, role })
    }

    /// |0⟩ = |F=1, m_F=0⟩
    pub fn ket0() -> Self {
        InternalState { f: 1, m_f: 0, band: Band::Ground, role: Role::Zero }
    }

    /// |1⟩ = |F=1, m_F=−1⟩, the lattice-bound state.
    pub fn ket1() -> Self {
        InternalState { f: 1, m_f: -1, band: Band::Ground, role: Role::One }
    }

    /// |2⟩ = |F=2, m_F=0⟩
    pub fn ket2() -> Self {
        InternalState { f: 2, m_f: 0, band: Band::Ground, role: Role::Two }
    }

    /// |2⟩ variant in the 5²P₁/₂ F=1, m_F=0 level, used for the exchange gate.
    pub fn ket2_excited() -> Self {
        InternalState { f: 1, m_f: 0, band: Band::ExcitedP12, role: Role::Two }
    }
}

/// Linear-Zeeman transition frequency E(to) − E(from) in Hz for field
/// magnitude `b` (T). Crossing into the upper manifold adds the hyperfine
/// splitting.
pub fn zeeman_splitting(species: &AtomSpecies, b: f64, from: &InternalState, to: &InternalState) -> Result<f64> {
    let level = |s: &InternalState| -> Result<f64> {
        let g = species.g_f(s)?;
        let hf = if s.f == species.f_lower { 0.0 } else { species.hyperfine_splitting_hz };
        Ok(hf + g * s.m_f as f64 * BOHR_MAGNETON * b.abs() / PLANCK)
    };
    Ok(level(to)? - level(from)?)
}

/// Ideal-gas condensation temperature in an isotropic harmonic trap (K).
pub fn condensation_temperature(n: f64, omega_bar: f64) -> Result<f64> {
    if !(n >= 1.0) || !(omega_bar > 0.0) {
        return Err(Error::domain("condensation temperature needs N >= 1 and ω > 0"));
    }
    Ok(HBAR * omega_bar / BOLTZMANN * (n / ZETA_3).cbrt())
}

/// Condensate fraction 1 − (T/T_c)³, clamped to [0, 1].
pub fn condensate_fraction(t: f64, t_c: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    (1.0 - (t / t_c).powi(3)).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CondensateThermodynamics {
    pub n_total: f64,
    pub temperature: f64,
    pub omega_bar: f64,
    pub t_c: f64,
    pub n_condensed: f64,
    pub n_thermal: f64,
}

impl CondensateThermodynamics {
    pub fn new(n_total: f64, temperature: f64, omega_bar: f64) -> Result<Self> {
        let t_c = condensation_temperature(n_total, omega_bar)?;
        let n_condensed = n_total * condensate_fraction(temperature, t_c);
        Ok(CondensateThermodynamics {
            n_total,
            temperature,
            omega_bar,
            t_c,
            n_condensed,
            n_thermal: n_total - n_condensed,
        })
    }
}

/// Bose–Einstein occupation of one state `level_energy` (rad/s) above the
/// condensate, with the chemical potential pinned at the ground level.
pub fn thermal_level_occupation(level_energy: f64, t: f64) -> Result<f64> {
    if !(level_energy > 0.0) {
        return Err(Error::domain("level energy must be above the condensate mode"));
    }
    if !(t > 0.0) {
        return Err(Error::domain("temperature must be positive"));
    }
    let x = HBAR * level_energy / (BOLTZMANN * t);
    Ok(1.0 / x.exp_m1())
}

/// Degeneracy-weighted occupation of the isotropic shell with `quanta` ≥ 1.
pub fn thermal_shell_occupation(quanta: u32, omega: f64, t: f64) -> Result<f64> {
    let q = quanta as f64;
    let deg = (q + 1.0) * (q + 2.0) / 2.0;
    Ok(deg * thermal_level_occupation(q * omega, t)?)
}

/// Total thermal population summed over shells 1..=max_quanta.
pub fn thermal_number(omega: f64, t: f64, max_quanta: u32) -> Result<f64> {
    (1..=max_quanta).map(|q| thermal_shell_occupation(q, omega, t)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    const W100: f64 = TWO_PI * 100.0;

    #[test]
    fn zeeman_zero_to_one_at_5p4_gauss() {
        let rb = AtomSpecies::rubidium87();
        let f = zeeman_splitting(&rb, 5.40e-4, &InternalState::ket0(), &InternalState::ket1()).unwrap();
        assert!((f - 3.78e6).abs() / 3.78e6 < 0.01, "{f}");
    }

    #[test]
    fn zeeman_zero_field_and_linearity() {
        let rb = AtomSpecies::rubidium87();
        let (a, b) = (InternalState::ket0(), InternalState::ket1());
        assert_eq!(zeeman_splitting(&rb, 0.0, &a, &b).unwrap(), 0.0);
        let f1 = zeeman_splitting(&rb, 1e-4, &a, &b).unwrap();
        let f2 = zeeman_splitting(&rb, 2e-4, &a, &b).unwrap();
        assert_eq!(f2, 2.0 * f1);
    }

    #[test]
    fn zeeman_field_noise_slope() {
        // g_F μ_B / h ≈ 0.70 MHz/G, so 4.3 nT ≈ 30 Hz
        let rb = AtomSpecies::rubidium87();
        let f = zeeman_splitting(&rb, 4.3e-9, &InternalState::ket0(), &InternalState::ket1()).unwrap();
        let oracle = 0.5 * 9.274_010_078_3e-24 * 4.3e-9 / 6.626_070_15e-34;
        assert!((f - oracle).abs() < 1e-9);
        assert!((f - 30.0).abs() < 0.5);
    }

    #[test]
    fn cross_manifold_includes_hyperfine() {
        let rb = AtomSpecies::rubidium87();
        let f = zeeman_splitting(&rb, 0.0, &InternalState::ket0(), &InternalState::ket2()).unwrap();
        assert_eq!(f, rb.hyperfine_splitting_hz);
        let bad = zeeman_splitting(&rb, 1e-4, &InternalState::ket0(), &InternalState::ket2_excited());
        assert!(matches!(bad, Err(Error::Config(_))));
    }

    #[test]
    fn condensation_temperature_closed_form() {
        let tc = condensation_temperature(1e6, W100).unwrap();
        // (ħω/k_B)(N/ζ3)^{1/3}, independently: 4.7992e-9 K × 94.04
        let oracle = 1.054_571_817e-34 * W100 / 1.380_649e-23 * (1e6f64 / 1.202_056_903_159_594).cbrt();
        assert!((tc - oracle).abs() < 1e-18);
        assert!((tc - 451e-9).abs() < 1e-9, "{tc}");
        let tc8 = condensation_temperature(8e6, W100).unwrap();
        assert!((tc8 / tc - 2.0).abs() < 1e-12);
    }

    #[test]
    fn fraction_at_300nk() {
        let th = CondensateThermodynamics::new(1e6, 300e-9, W100).unwrap();
        assert!((th.n_condensed / th.n_total - 0.70).abs() < 0.02);
        assert_eq!(th.n_condensed + th.n_thermal, th.n_total);
    }

    #[test]
    fn first_excited_occupation() {
        let n = thermal_level_occupation(W100, 300e-9).unwrap();
        assert!((n - 62.0).abs() < 1.0, "{n}");
        assert!(thermal_level_occupation(W100, 1e-12).unwrap() < 1e-100);
        assert!(thermal_level_occupation(0.0, 300e-9).is_err());
    }

    #[test]
    fn coherence_ratio_needs_seven_hundred_thousand() {
        // √(N₀/N_e) ≈ 106 only with N₀ = 7×10⁵; 5×10⁵ gives ≈ 90.
        let ne = thermal_level_occupation(W100, 300e-9).unwrap();
        assert!(((7e5 / ne).sqrt() - 106.0).abs() < 1.5);
        assert!(((5e5 / ne).sqrt() - 106.0).abs() > 10.0);
    }

    #[test]
    fn thermal_sum_recovers_thermal_number() {
        let th = CondensateThermodynamics::new(1e6, 300e-9, W100).unwrap();
        // The shell sum converges slowly: k_BT/ħω ≈ 63, so shells well past
        // 200 still carry weight. A converged cutoff matches the ideal-gas
        // N_th; the 200-shell sum is ~29% short.
        let converged = thermal_number(W100, 300e-9, 2000).unwrap();
        assert!((converged - th.n_thermal).abs() / th.n_thermal < 0.10, "{converged}");
        let short = thermal_number(W100, 300e-9, 200).unwrap();
        assert!((short - th.n_thermal).abs() / th.n_thermal > 0.2);
    }

    #[test]
    fn fraction_edges() {
        assert_eq!(condensate_fraction(0.0, 1e-7), 1.0);
        assert_eq!(condensate_fraction(1e-7, 1e-7), 0.0);
    }

    #[test]
    fn species_validation() {
        let mut rb = AtomSpecies::rubidium87();
        assert!(rb.validate().is_ok());
        rb.scattering[0][1] = 1e-9;
        assert!(rb.validate().is_err());
        assert!(InternalState::new(1, 2, Band::Ground, Role::Zero).is_err());
    }
}
