//! Thomas–Fermi ground state of an isotropic harmonic trap.

use serde::Serialize;

use super::ModeFunction;
use crate::atomdata::{AtomSpecies, HBAR};
use crate::error::{Error, Result};
use crate::numerics::{quad, roots};

/// Below this value of N·a/ā the kinetic energy is no longer negligible.
pub const TF_VALIDITY_THRESHOLD: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThomasFermiState {
    /// Chemical potential (rad/s).
    pub mu: f64,
    pub radius: f64,
    pub n_atoms: f64,
    /// Contact coupling g/ħ (rad/s·m³).
    pub g: f64,
    pub omega: f64,
    pub mass: f64,
    /// N·a/ā; TF needs this ≫ 1.
    pub tf_parameter: f64,
}

/// Thomas–Fermi state of `n` atoms in internal state `state` (0, 1 or 2)
/// in an isotropic trap of frequency `omega` (rad/s).
pub fn solve_thomas_fermi(n: f64, species: &AtomSpecies, state: usize, omega: f64) -> Result<ThomasFermiState> {
    if !(n >= 1.0) || !(omega > 0.0) || state > 2 {
        return Err(Error::domain("Thomas–Fermi solve needs N >= 1, ω > 0 and a valid state"));
    }
    let a = species.scattering[state][state];
    let abar = (HBAR / (species.mass * omega)).sqrt();
    let tf_parameter = n * a / abar;
    if tf_parameter < TF_VALIDITY_THRESHOLD {
        log::warn!("Thomas–Fermi parameter N·a/ā = {tf_parameter:.3} is small; profile is unreliable");
    }
    let mu = 0.5 * omega * (15.0 * tf_parameter).powf(0.4);
    let radius = (2.0 * HBAR * mu / (species.mass * omega * omega)).sqrt();
    Ok(ThomasFermiState {
        mu,
        radius,
        n_atoms: n,
        g: species.contact_coupling(state, state),
        omega,
        mass: species.mass,
        tf_parameter,
    })
}

impl ThomasFermiState {
    pub fn is_valid(&self) -> bool {
        self.tf_parameter >= TF_VALIDITY_THRESHOLD
    }

    fn trap(&self, r2: f64) -> f64 {
        0.5 * self.mass * self.omega * self.omega * r2 / HBAR
    }

    /// Atom density (1/m³) at squared radius `r2`.
    pub fn density_r2(&self, r2: f64) -> f64 {
        ((self.mu - self.trap(r2)) / self.g).max(0.0)
    }

    /// |φ|² at radius `r`, normalized to one.
    pub fn probability_density(&self, r: f64) -> f64 {
        self.density_r2(r * r) / self.n_atoms
    }

    /// |φ(0)|² = 15/(8πR³).
    pub fn peak_probability_density(&self) -> f64 {
        15.0 / (8.0 * std::f64::consts::PI * self.radius.powi(3))
    }

    /// Chemical potential from numerically normalizing the density to N,
    /// independent of the closed form.
    pub fn mu_by_normalization(&self) -> Result<f64> {
        let count = |mu: f64| -> f64 {
            let rmax = (2.0 * HBAR * mu / (self.mass * self.omega * self.omega)).sqrt();
            let rule = quad::gauss_legendre(24).mapped(0.0, rmax);
            let n: f64 = rule.integrate(|r| {
                4.0 * std::f64::consts::PI * r * r * ((mu - self.trap(r * r)) / self.g).max(0.0)
            });
            n - self.n_atoms
        };
        roots::brent(count, 0.1 * self.mu, 10.0 * self.mu, 1e-12)
    }

    /// ∫|φ|⁴ d³r evaluated radially.
    pub fn self_overlap(&self) -> f64 {
        let rule = quad::gauss_legendre(16).mapped(0.0, self.radius);
        rule.integrate(|r| 4.0 * std::f64::consts::PI * r * r * self.probability_density(r).powi(2))
    }
}

impl ModeFunction for ThomasFermiState {
    fn value(&self, r: [f64; 3]) -> f64 {
        (self.density_r2(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]) / self.n_atoms).sqrt()
    }

    fn bounds(&self) -> [[f64; 2]; 3] {
        [[-self.radius, self.radius]; 3]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomdata::TWO_PI;

    fn reference() -> ThomasFermiState {
        solve_thomas_fermi(7e5, &AtomSpecies::rubidium87(), 0, TWO_PI * 100.0).unwrap()
    }

    #[test]
    fn closed_form_radius() {
        // R = ā (15 N a/ā)^{1/5}
        let tf = reference();
        let rb = AtomSpecies::rubidium87();
        let abar = (HBAR / (rb.mass * TWO_PI * 100.0)).sqrt();
        let r = abar * (15.0 * 7e5 * 5.34e-9 / abar).powf(0.2);
        assert!((tf.radius / r - 1.0).abs() < 1e-12);
        assert!((tf.radius - 9.46e-6).abs() < 0.01e-6);
    }

    #[test]
    fn mu_matches_trap_energy_at_radius() {
        let tf = reference();
        assert!((tf.trap(tf.radius * tf.radius) / tf.mu - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normalization_route_agrees() {
        let tf = reference();
        let mu = tf.mu_by_normalization().unwrap();
        assert!((mu / tf.mu - 1.0).abs() < 1e-3);
    }

    #[test]
    fn unit_norm_and_self_overlap() {
        let tf = reference();
        let rule = quad::gauss_legendre(12).mapped(0.0, tf.radius);
        let norm = rule.integrate(|r| 4.0 * std::f64::consts::PI * r * r * tf.probability_density(r));
        assert!((norm - 1.0).abs() < 1e-6);
        let exact = 15.0 / (14.0 * std::f64::consts::PI * tf.radius.powi(3));
        assert!((tf.self_overlap() / exact - 1.0).abs() < 1e-12);
        assert_eq!(tf.value([tf.radius * 1.01, 0.0, 0.0]), 0.0);
    }

    #[test]
    fn small_clouds_are_flagged() {
        let tf = solve_thomas_fermi(2.0, &AtomSpecies::rubidium87(), 0, TWO_PI * 100.0).unwrap();
        assert!(!tf.is_valid());
        assert!(reference().is_valid());
    }
}
