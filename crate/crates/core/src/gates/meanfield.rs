use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::ode::{dopri5, Tolerance};

/// Population imbalance z = (n₀ − n₂)/(n₀ + n₂) and relative phase at time t.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanFieldState {
    pub t: f64,
    pub z: f64,
    pub phi: f64,
}

impl MeanFieldState {
    pub fn new(z: f64, phi: f64) -> Self {
        MeanFieldState { t: 0.0, z, phi }
    }

    fn bloch(&self) -> [f64; 3] {
        let r = (1.0 - self.z * self.z).max(0.0).sqrt();
        [r * self.phi.cos(), r * self.phi.sin(), self.z]
    }

    fn from_bloch(t: f64, s: &[f64]) -> Self {
        MeanFieldState { t, z: s[2].clamp(-1.0, 1.0), phi: s[1].atan2(s[0]) }
    }
}

/// Two-mode parameters (rad/s): tunneling J, interaction Λ and bias.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoModeParams {
    pub j: f64,
    pub lambda: f64,
    pub bias: f64,
}

impl TwoModeParams {
    /// From the interaction matrix and condensate number, with the hop
    /// coefficient `hop` of the effective Hamiltonian (J = −hop) and per-atom
    /// level shifts of the two modes. `compensate` removes the bias, as a
    /// two-photon detuning would.
    pub fn from_interactions(u: &[[f64; 3]; 3], n: f64, hop: f64, shifts: [f64; 2], compensate: bool) -> Self {
        let lambda = -0.5 * n * (u[0][0] + u[2][2] - 2.0 * u[0][2]);
        let bias = if compensate { 0.0 } else { -(0.5 * n * (u[0][0] - u[2][2]) + shifts[0] - shifts[1]) };
        TwoModeParams { j: -hop, lambda, bias }
    }

    /// Classical energy Λz²/2 + bias·z − 2J√(1−z²)cos φ.
    pub fn energy(&self, s: &MeanFieldState) -> f64 {
        let b = s.bloch();
        0.5 * self.lambda * s.z * s.z + self.bias * s.z - 2.0 * self.j * b[0]
    }

    /// Scale against which energy drift is measured.
    pub fn energy_scale(&self) -> f64 {
        0.5 * self.lambda.abs() + self.bias.abs() + 2.0 * self.j.abs()
    }

    /// Small-amplitude oscillation period 2π/√(2J(2J + Λ)) about z = 0, φ = 0;
    /// π/|J| when Λ = 0.
    pub fn linear_period(&self) -> f64 {
        let w2 = 2.0 * self.j * (2.0 * self.j + self.lambda);
        2.0 * std::f64::consts::PI / w2.abs().sqrt()
    }
}

/// Integrates the two-mode equations
/// ż = −2J√(1−z²) sin φ, φ̇ = bias + Λz + 2Jz cos φ/√(1−z²),
/// sampled at `times`. The integration runs on the Bloch vector
/// (√(1−z²)cos φ, √(1−z²)sin φ, z), which stays regular at |z| = 1.
pub fn josephson_meanfield(params: &TwoModeParams, initial: MeanFieldState, times: &[f64]) -> Result<Vec<MeanFieldState>> {
    josephson_meanfield_with(params, initial, times, Tolerance::default())
}

pub fn josephson_meanfield_with(
    params: &TwoModeParams,
    initial: MeanFieldState,
    times: &[f64],
    tol: Tolerance,
) -> Result<Vec<MeanFieldState>> {
    if !(initial.z.abs() <= 1.0) {
        return Err(Error::domain(format!("|z₀| = {} exceeds 1", initial.z.abs())));
    }
    if times.windows(2).any(|w| w[1] < w[0]) || times.first().is_some_and(|&t| t < initial.t) {
        return Err(Error::domain("sample times must be increasing and after the start"));
    }
    let p = *params;
    let rhs = move |_t: f64, s: &[f64], ds: &mut [f64]| {
        let w = p.bias + p.lambda * s[2];
        ds[0] = -s[1] * w;
        ds[1] = s[0] * w + 2.0 * p.j * s[2];
        ds[2] = -2.0 * p.j * s[1];
    };
    let ys = dopri5(rhs, initial.t, &initial.bloch(), times, tol)?;
    Ok(ys.iter().zip(times).map(|(y, &t)| MeanFieldState::from_bloch(t, y)).collect())
}

/// Summary of a sampled trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryStats {
    pub z_min: f64,
    pub z_max: f64,
    /// (z_max − z_min)/2: fraction of the population exchanged.
    pub transfer: f64,
    /// max |z − z₀|.
    pub drift: f64,
    /// max |H(t) − H(0)| / energy scale.
    pub energy_drift: f64,
}

pub fn trajectory_stats(params: &TwoModeParams, traj: &[MeanFieldState]) -> TrajectoryStats {
    let z0 = traj.first().map_or(0.0, |s| s.z);
    let e0 = traj.first().map_or(0.0, |s| params.energy(s));
    let scale = params.energy_scale().max(f64::MIN_POSITIVE);
    let (mut lo, mut hi, mut drift, mut de) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64, 0.0f64);
    for s in traj {
        lo = lo.min(s.z);
        hi = hi.max(s.z);
        drift = drift.max((s.z - z0).abs());
        de = de.max((params.energy(s) - e0).abs() / scale);
    }
    TrajectoryStats { z_min: lo, z_max: hi, transfer: 0.5 * (hi - lo), drift, energy_drift: de }
}

/// Mean spacing of successive upward crossings of the midline of z, or None
/// with fewer than two crossings.
pub fn oscillation_period(traj: &[MeanFieldState]) -> Option<f64> {
    let (lo, hi) = traj.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), s| (a.min(s.z), b.max(s.z)));
    if !(hi - lo > 1e-9) {
        return None;
    }
    let mid = 0.5 * (lo + hi);
    let ups: Vec<f64> = traj
        .windows(2)
        .filter(|w| w[0].z < mid && w[1].z >= mid)
        .map(|w| w[0].t + (mid - w[0].z) / (w[1].z - w[0].z) * (w[1].t - w[0].t))
        .collect();
    if ups.len() < 2 {
        return None;
    }
    Some((ups[ups.len() - 1] - ups[0]) / (ups.len() - 1) as f64)
}

/// First time after the start at which z reaches `target`, refined by
/// bisection on the integrator, or None within `t_max`.
pub fn first_crossing(params: &TwoModeParams, initial: MeanFieldState, target: f64, t_max: f64) -> Result<Option<f64>> {
    let samples = 2000;
    let times: Vec<f64> = (1..=samples).map(|i| initial.t + t_max * i as f64 / samples as f64).collect();
    let traj = josephson_meanfield(params, initial, &times)?;
    let side = (initial.z - target).signum();
    let mut prev = initial;
    for s in &traj {
        if (s.z - target).signum() != side {
            let (mut a, mut b) = (prev.t, s.t);
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                let zm = josephson_meanfield(params, initial, &[m])?[0].z;
                if (zm - target).signum() == side {
                    a = m;
                } else {
                    b = m;
                }
            }
            return Ok(Some(0.5 * (a + b)));
        }
        prev = *s;
    }
    Ok(None)
}

/// Evenly spaced sample times on (0, t_end].
pub fn sample_times(t_end: f64, samples: usize) -> Vec<f64> {
    (1..=samples).map(|i| t_end * i as f64 / samples as f64).collect()
}
