//! Isotropic 3D harmonic-oscillator eigenstates.

use serde::Serialize;

use super::ModeFunction;
use crate::atomdata::HBAR;
use crate::error::{Error, Result};

/// Highest total quanta for which evaluation has been verified stable.
pub const MAX_QUANTA: usize = 4096;

/// Normalized Hermite functions h_0(ξ)..h_nmax(ξ) (unit L² norm in ξ).
///
/// The three-term recurrence runs on a rescaled value so the Gaussian factor
/// is applied once at the end; this keeps large orders finite far into the
/// classically forbidden region.
pub fn hermite_functions(nmax: usize, xi: f64) -> Vec<f64> {
    let mut out = vec![0.0; nmax + 1];
    hermite_functions_into(xi, &mut out);
    out
}

/// As [`hermite_functions`], writing orders 0..out.len() into `out`.
pub fn hermite_functions_into(xi: f64, out: &mut [f64]) {
    const BIG: f64 = 1e150;
    let n = out.len();
    if n == 0 {
        return;
    }
    let mut log_scale = -0.5 * xi * xi;
    let mut p_prev = 0.0;
    let mut p = std::f64::consts::PI.powf(-0.25);
    // Orders computed before a rescale keep their own exponent.
    let mut exps = vec![0.0f64; n];
    out[0] = p;
    exps[0] = log_scale;
    for k in 0..n - 1 {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * xi * p - (kf / (kf + 1.0)).sqrt() * p_prev;
        p_prev = p;
        p = next;
        if p.abs() > BIG {
            p /= BIG;
            p_prev /= BIG;
            log_scale += BIG.ln();
        }
        out[k + 1] = p;
        exps[k + 1] = log_scale;
    }
    for (v, e) in out.iter_mut().zip(&exps) {
        *v = if *v == 0.0 { 0.0 } else { v.signum() * (v.abs().ln() + e).exp() };
    }
}

/// Number of states with total quanta exactly `q`.
pub fn shell_degeneracy(q: u64) -> u64 {
    (q + 1) * (q + 2) / 2
}

/// Number of states with total quanta 0..=q.
pub fn cumulative_state_count(q: u64) -> u64 {
    (q + 1) * (q + 2) * (q + 3) / 6
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HoEigenstate {
    pub n: [usize; 3],
    pub omega: f64,
    /// Oscillator length √(ħ/mω).
    pub length: f64,
}

impl HoEigenstate {
    pub fn new(n: [usize; 3], omega: f64, mass: f64) -> Result<Self> {
        if !(omega > 0.0 && mass > 0.0) {
            return Err(Error::domain("oscillator needs ω > 0 and m > 0"));
        }
        let q = n.iter().sum::<usize>();
        if q > MAX_QUANTA {
            return Err(Error::Capability(format!(
                "total quanta {q} exceeds the verified range {MAX_QUANTA}"
            )));
        }
        Ok(HoEigenstate { n, omega, length: (HBAR / (mass * omega)).sqrt() })
    }

    pub fn quanta(&self) -> usize {
        self.n.iter().sum()
    }

    /// (n_x + n_y + n_z + 3/2)ω in rad/s.
    pub fn energy(&self) -> f64 {
        (self.quanta() as f64 + 1.5) * self.omega
    }

    pub fn parity(&self) -> i32 {
        if self.quanta() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// 1D factor along one axis, in physical units (m^-1/2).
    pub fn axis_value(&self, axis: usize, x: f64) -> f64 {
        let h = hermite_functions(self.n[axis], x / self.length);
        h[self.n[axis]] / self.length.sqrt()
    }
}

impl ModeFunction for HoEigenstate {
    fn value(&self, r: [f64; 3]) -> f64 {
        (0..3).map(|a| self.axis_value(a, r[a])).product()
    }

    fn axis_factor(&self, axis: usize, x: f64) -> Option<f64> {
        Some(self.axis_value(axis, x))
    }

    fn bounds(&self) -> [[f64; 2]; 3] {
        let mut b = [[0.0; 2]; 3];
        for (a, bb) in b.iter_mut().enumerate() {
            let half = ((2 * self.n[a] + 1) as f64).sqrt() * self.length + 8.0 * self.length;
            *bb = [-half, half];
        }
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quad::gauss_hermite;

    #[test]
    fn low_orders_match_closed_forms() {
        let x: f64 = 0.7;
        let h = hermite_functions(3, x);
        let g = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
        assert!((h[0] - g).abs() < 1e-15);
        assert!((h[1] - g * 2f64.sqrt() * x).abs() < 1e-15);
        assert!((h[2] - g * (2.0 * x * x - 1.0) / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn orthonormal_up_to_ten_quanta() {
        // Gauss–Hermite with e^{x²} reweighting is exact for products of order ≤ 10.
        let rule = gauss_hermite(40);
        let tab: Vec<Vec<f64>> = rule.nodes.iter().map(|&x| hermite_functions(10, x)).collect();
        for n in 0..=10 {
            for m in 0..=10 {
                let s: f64 = rule
                    .nodes
                    .iter()
                    .zip(&rule.weights)
                    .zip(&tab)
                    .map(|((&x, &w), h)| w * (x * x).exp() * h[n] * h[m])
                    .sum();
                let want = if n == m { 1.0 } else { 0.0 };
                assert!((s - want).abs() < 1e-8, "({n},{m}) -> {s}");
            }
        }
    }

    #[test]
    fn stays_finite_at_large_order() {
        for &x in &[0.0, 10.0, 40.0, 60.0, 95.0] {
            let h = hermite_functions(MAX_QUANTA, x);
            assert!(h.iter().all(|v| v.is_finite()), "x = {x}");
        }
        // Norm of a high order by trapezoid on a fine grid.
        let n = 2000;
        let dx = 0.005;
        let s: f64 = (-14000..=14000)
            .map(|i| {
                let h = hermite_functions(n, i as f64 * dx);
                h[n] * h[n] * dx
            })
            .sum();
        assert!((s - 1.0).abs() < 1e-6, "{s}");
    }

    #[test]
    fn ground_energy_and_parity() {
        let s = HoEigenstate::new([0, 0, 0], 2.0, 1e-25).unwrap();
        assert_eq!(s.energy(), 3.0);
        let p = HoEigenstate::new([1, 2, 0], 2.0, 1e-25).unwrap();
        assert_eq!(p.parity(), -1);
        let r = [0.3e-6, -0.1e-6, 0.2e-6];
        let v = p.value(r);
        let vi = p.value([-r[0], -r[1], -r[2]]);
        assert!((v + vi).abs() < 1e-12 * v.abs());
    }

    #[test]
    fn capability_limit() {
        assert!(matches!(HoEigenstate::new([MAX_QUANTA, 1, 0], 1.0, 1.0), Err(Error::Capability(_))));
    }

    #[test]
    fn counts() {
        assert_eq!(cumulative_state_count(700), 57_657_951);
        let total: u64 = (0..=700).map(shell_degeneracy).sum();
        assert_eq!(total, cumulative_state_count(700));
    }
}
