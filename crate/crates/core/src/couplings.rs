//! Franck–Condon overlaps: interaction energies U_ij, reduced Rabi
//! frequencies, lattice-site to oscillator-mode couplings Ω_1n and the
//! dressed oscillator spectrum.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::atomdata::{AtomSpecies, EPSILON_0, HBAR, SPEED_OF_LIGHT, TWO_PI};
use crate::error::{Error, Result};
use crate::modes::{
    cumulative_state_count, hermite_functions, shell_degeneracy, ModeFunction, ThomasFermiState, Wannier1D,
    MAX_QUANTA,
};
use crate::numerics::quad::{composite_legendre, Rule};
use crate::optics::Axis;

/// Spatial profile Ω̃(r)/Ω̃ of a drive field.
#[derive(Clone, Default)]
pub enum DriveProfile {
    #[default]
    Flat,
    /// Field amplitude e^{−ρ²/w²}, ρ measured transverse to `axis`.
    AxialGaussian { waist: f64, axis: Axis },
    Tabulated(Arc<dyn Fn([f64; 3]) -> f64 + Send + Sync>),
}

impl fmt::Debug for DriveProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DriveProfile::Flat => write!(f, "Flat"),
            DriveProfile::AxialGaussian { waist, axis } => write!(f, "AxialGaussian({waist:e} m, {axis:?})"),
            DriveProfile::Tabulated(_) => write!(f, "Tabulated"),
        }
    }
}

impl DriveProfile {
    pub fn factor(&self, r: [f64; 3]) -> f64 {
        match self {
            DriveProfile::Flat => 1.0,
            DriveProfile::AxialGaussian { waist, axis } => {
                let rho2: f64 = axis.transverse().iter().map(|&i| r[i] * r[i]).sum();
                (-rho2 / (waist * waist)).exp()
            }
            DriveProfile::Tabulated(f) => f(r),
        }
    }
}

fn intersect(a: [[f64; 2]; 3], b: [[f64; 2]; 3]) -> Option<[[f64; 2]; 3]> {
    let mut out = [[0.0; 2]; 3];
    for i in 0..3 {
        out[i] = [a[i][0].max(b[i][0]), a[i][1].min(b[i][1])];
        if out[i][0] >= out[i][1] {
            return None;
        }
    }
    Some(out)
}

/// Mode values on a tensor grid: per-axis tables for separable modes,
/// pointwise evaluation otherwise.
enum Sampled<'a, M: ModeFunction> {
    Separable([Vec<f64>; 3]),
    Pointwise(&'a M),
}

impl<'a, M: ModeFunction> Sampled<'a, M> {
    fn new(m: &'a M, rules: &[Rule]) -> Self {
        let tab = |a: usize| -> Option<Vec<f64>> { rules[a].nodes.iter().map(|&x| m.axis_factor(a, x)).collect() };
        match (tab(0), tab(1), tab(2)) {
            (Some(x), Some(y), Some(z)) => Sampled::Separable([x, y, z]),
            _ => Sampled::Pointwise(m),
        }
    }

    #[inline]
    fn at(&self, idx: [usize; 3], r: [f64; 3]) -> f64 {
        match self {
            Sampled::Separable(t) => t[0][idx[0]] * t[1][idx[1]] * t[2][idx[2]],
            Sampled::Pointwise(m) => m.value(r),
        }
    }
}

fn tensor_integrate<A, B, F>(a: &A, b: &B, bounds: [[f64; 2]; 3], panels: usize, f: F) -> f64
where
    A: ModeFunction,
    B: ModeFunction,
    F: Fn(f64, f64, [f64; 3]) -> f64 + Sync,
{
    let rules: Vec<Rule> = bounds.iter().map(|b| composite_legendre(b[0], b[1], panels, 16)).collect();
    let sa = Sampled::new(a, &rules);
    let sb = Sampled::new(b, &rules);
    let (sa, sb) = (&sa, &sb);
    let partial: Vec<f64> = (0..rules[0].len())
        .into_par_iter()
        .map(|i| {
            let (x, wx) = (rules[0].nodes[i], rules[0].weights[i]);
            let mut s = 0.0;
            for (j, (&y, &wy)) in rules[1].nodes.iter().zip(&rules[1].weights).enumerate() {
                for (k, (&z, &wz)) in rules[2].nodes.iter().zip(&rules[2].weights).enumerate() {
                    let r = [x, y, z];
                    let va = sa.at([i, j, k], r);
                    if va == 0.0 {
                        continue;
                    }
                    s += wy * wz * f(va, sb.at([i, j, k], r), r);
                }
            }
            wx * s
        })
        .collect();
    partial.iter().sum()
}

/// ∫ a(r) P(r) b(r) d³r by tensor Gauss–Legendre on `panels` panels of 16
/// nodes per axis over the intersection of the supports.
pub fn overlap<A: ModeFunction, B: ModeFunction>(a: &A, b: &B, profile: &DriveProfile, panels: usize) -> f64 {
    match intersect(a.bounds(), b.bounds()) {
        None => 0.0,
        Some(bx) => tensor_integrate(a, b, bx, panels, |va, vb, r| va * profile.factor(r) * vb),
    }
}

/// ∫ |a|²|b|² d³r on the same grid as [`overlap`].
pub fn density_overlap<A: ModeFunction, B: ModeFunction>(a: &A, b: &B, panels: usize) -> f64 {
    match intersect(a.bounds(), b.bounds()) {
        None => 0.0,
        Some(bx) => tensor_integrate(a, b, bx, panels, |va, vb, _| (va * vb).powi(2)),
    }
}

/// Contact interaction energy U = g·∫|ψ_i|²|ψ_j|² (rad/s) for coupling `g`
/// (rad/s·m³). The ½ for identical bosons belongs to the ½U n(n−1) operator
/// form, not to U itself.
pub fn interaction_strength<A: ModeFunction, B: ModeFunction>(a: &A, b: &B, g: f64, panels: usize) -> f64 {
    g * density_overlap(a, b, panels)
}

/// Reduced Rabi frequency Ω = Ω̃·∫ψ_i P ψ_j (rad/s).
pub fn rabi_overlap<A: ModeFunction, B: ModeFunction>(
    a: &A,
    b: &B,
    drive: f64,
    profile: &DriveProfile,
    panels: usize,
) -> f64 {
    drive * overlap(a, b, profile, panels)
}

/// Panels over [−d, d] used for condensate × Wannier integrals.
pub const SITE_PANELS: usize = 4;

/// (∫φ P w, ∫φ² w²) for a Thomas–Fermi mode and a Wannier function at `site`.
pub fn tf_wannier_overlaps(tf: &ThomasFermiState, w: &Wannier1D, site: [f64; 3], profile: &DriveProfile) -> (f64, f64) {
    tf_wannier_overlaps_with(tf, w, site, profile, SITE_PANELS)
}

pub fn tf_wannier_overlaps_with(
    tf: &ThomasFermiState,
    w: &Wannier1D,
    site: [f64; 3],
    profile: &DriveProfile,
    panels: usize,
) -> (f64, f64) {
    let (rule, wv) = w.core_rule(panels);
    let n = rule.len();
    let parts: Vec<(f64, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let x = site[0] + rule.nodes[i];
            let mut amp = 0.0;
            let mut dens = 0.0;
            for j in 0..n {
                let y = site[1] + rule.nodes[j];
                for k in 0..n {
                    let z = site[2] + rule.nodes[k];
                    let wt = rule.weights[j] * rule.weights[k];
                    let ww = wv[j] * wv[k];
                    let p2 = tf.density_r2(x * x + y * y + z * z) / tf.n_atoms;
                    amp += wt * ww * p2.sqrt() * profile.factor([x, y, z]);
                    dens += wt * ww * ww * p2;
                }
            }
            (rule.weights[i] * wv[i] * amp, rule.weights[i] * wv[i] * wv[i] * dens)
        })
        .collect();
    parts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1))
}

/// Derived interaction energies and Franck–Condon factors for one site.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingSet {
    /// U_ij (rad/s) over the internal states {0, 1, 2}.
    pub u: [[f64; 3]; 3],
    /// Ω_ij/Ω̃_ij for a flat drive between the condensate and the site.
    pub eta_fc: f64,
    pub site: [f64; 3],
    pub n_condensed: f64,
    /// √N₀·η_FC.
    pub enhancement: f64,
}

impl CouplingSet {
    /// U values from contact couplings; |0⟩ and |2⟩ share the condensate mode,
    /// |1⟩ occupies the Wannier function at `site`.
    pub fn derive(species: &AtomSpecies, tf: &ThomasFermiState, w: &Wannier1D, site: [f64; 3]) -> Result<Self> {
        let tf_tf = tf.self_overlap();
        let w4 = w.moment(4, 0).powi(3);
        let (eta, tf_w) = tf_wannier_overlaps(tf, w, site, &DriveProfile::Flat);
        if !(eta > 0.0 && eta < 1.0) {
            return Err(Error::numerical(format!("Franck–Condon factor {eta:e} outside (0, 1)")));
        }
        let g = |i, j| species.contact_coupling(i, j);
        let mut u = [[0.0; 3]; 3];
        let set = |u: &mut [[f64; 3]; 3], i: usize, j: usize, v: f64| {
            u[i][j] = v;
            u[j][i] = v;
        };
        set(&mut u, 0, 0, g(0, 0) * tf_tf);
        set(&mut u, 2, 2, g(2, 2) * tf_tf);
        set(&mut u, 0, 2, g(0, 2) * tf_tf);
        set(&mut u, 1, 1, g(1, 1) * w4);
        set(&mut u, 0, 1, g(0, 1) * tf_w);
        set(&mut u, 1, 2, g(1, 2) * tf_w);
        Ok(CouplingSet {
            u,
            eta_fc: eta,
            site,
            n_condensed: tf.n_atoms,
            enhancement: tf.n_atoms.sqrt() * eta,
        })
    }

    /// A coupling set with prescribed U values and no geometry.
    pub fn from_u(u: [[f64; 3]; 3]) -> Result<Self> {
        for i in 0..3 {
            for j in 0..3 {
                if u[i][j] != u[j][i] || !u[i][j].is_finite() {
                    return Err(Error::Config(format!("U matrix not symmetric/finite at ({i},{j})")));
                }
            }
        }
        Ok(CouplingSet { u, eta_fc: f64::NAN, site: [0.0; 3], n_condensed: f64::NAN, enhancement: f64::NAN })
    }

    /// Ensemble-enhanced Rabi frequency √N₀·η_FC·Ω̃ for `n0` condensed atoms.
    pub fn enhanced_rabi(&self, n0: f64, bare: f64) -> f64 {
        n0.sqrt() * self.eta_fc * bare
    }

    pub fn report(&self) -> CouplingReport {
        let pick = |i: usize, j: usize| self.u[i][j];
        let names = ["U00", "U11", "U22", "U01", "U02", "U12"];
        let pairs = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)];
        CouplingReport {
            u: names
                .iter()
                .zip(pairs)
                .map(|(n, (i, j))| UEntry { name: n.to_string(), rad_per_s: pick(i, j), hz: pick(i, j) / TWO_PI })
                .collect(),
            eta_fc: self.eta_fc,
            inverse_eta_fc: 1.0 / self.eta_fc,
            enhancement: self.enhancement,
            site_um: self.site.map(|x| x * 1e6),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct UEntry {
    pub name: String,
    pub rad_per_s: f64,
    pub hz: f64,
}

/// JSON-facing view of a [`CouplingSet`].
#[derive(Debug, Clone, Serialize)]
pub struct CouplingReport {
    pub u: Vec<UEntry>,
    pub eta_fc: f64,
    pub inverse_eta_fc: f64,
    pub enhancement: f64,
    pub site_um: [f64; 3],
}

/// Drive that dresses the oscillator levels of |2⟩ through the condensate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StarkDressing {
    /// Free-space Rabi frequency Ω̃₀₂ (rad/s).
    pub amplitude: f64,
    /// Laser minus transition frequency (rad/s).
    pub detuning: f64,
    /// Field 1/e radius transverse to z.
    pub waist: f64,
    /// Highest per-axis quantum number included.
    pub nmax: usize,
}

impl StarkDressing {
    /// Dressing by a linearly polarized Gaussian beam on the D1 line, using the
    /// isotropic dipole d/√3.
    pub fn from_beam(species: &AtomSpecies, wavelength: f64, power: f64, waist: f64) -> Result<Self> {
        if !(power >= 0.0 && waist > 0.0 && wavelength > 0.0) {
            return Err(Error::Config("dressing beam needs positive waist and wavelength".into()));
        }
        let i0 = 2.0 * power / (std::f64::consts::PI * waist * waist);
        let e0 = (2.0 * i0 / (SPEED_OF_LIGHT * EPSILON_0)).sqrt();
        let amplitude = species.d1.dipole / 3f64.sqrt() * e0 / HBAR;
        let detuning = TWO_PI * SPEED_OF_LIGHT / wavelength - species.d1.omega;
        Ok(StarkDressing { amplitude, detuning, waist, nmax: 140 })
    }
}

/// Second-order level shifts of the even-parity oscillator states.
#[derive(Debug, Clone, Serialize)]
pub struct StarkShifts {
    /// Number of even indices per axis (n = 0, 2, …, 2(k−1)).
    pub k: usize,
    /// Shift (rad/s) indexed by (kx·k + ky)·k + kz; negative lowers the level.
    #[serde(skip)]
    pub values: Vec<f64>,
    /// Overlaps ⟨ψ_n|P|φ⟩ on the same index.
    #[serde(skip)]
    pub overlaps: Vec<f64>,
}

impl StarkShifts {
    pub fn get(&self, n: [usize; 3]) -> f64 {
        if n.iter().any(|&v| v % 2 == 1 || v / 2 >= self.k) {
            return 0.0;
        }
        let k = self.k;
        self.values[(n[0] / 2 * k + n[1] / 2) * k + n[2] / 2]
    }
}

/// Couplings between two lattice sites and every oscillator state up to a
/// total-quanta cutoff, stored as cached 1D overlap factors.
#[derive(Debug, Clone, Serialize)]
pub struct ModeCouplingTable {
    pub cutoff: usize,
    pub omega: f64,
    pub length: f64,
    /// Free-space drive Ω̃₁₂ (rad/s).
    pub drive: f64,
    pub n_condensed: f64,
    pub sites: [[f64; 3]; 2],
    /// ∫ψ_n(x) w(x − s) dx per site and axis, n = 0..=cutoff.
    #[serde(skip)]
    pub axis_overlaps: [[Arc<Vec<f64>>; 3]; 2],
    /// U₀₂^Q·N per total-quanta shell (rad/s).
    pub shell_shift: Vec<f64>,
    #[serde(skip)]
    pub stark: Option<StarkShifts>,
}

/// Cache of 1D overlaps keyed by the exact bit pattern of the coordinate.
#[derive(Default)]
pub struct OverlapCache {
    map: HashMap<u64, Arc<Vec<f64>>>,
}

impl OverlapCache {
    pub fn get_or_compute(&mut self, w: &Wannier1D, s: f64, length: f64, cutoff: usize) -> Arc<Vec<f64>> {
        self.map
            .entry(s.to_bits())
            .or_insert_with(|| Arc::new(axis_overlaps(w, s, length, cutoff)))
            .clone()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// ∫ψ_n(x) w(x − s) dx for n = 0..=cutoff.
pub fn axis_overlaps(w: &Wannier1D, s: f64, length: f64, cutoff: usize) -> Vec<f64> {
    let mut acc = vec![0.0; cutoff + 1];
    let norm = length.sqrt();
    for ((&x, &wt), &v) in w.rule.nodes.iter().zip(&w.rule.weights).zip(&w.values) {
        let h = hermite_functions(cutoff, (s + x) / length);
        let c = wt * v / norm;
        for (a, hn) in acc.iter_mut().zip(&h) {
            *a += c * hn;
        }
    }
    acc
}

/// Σ over states with total quanta ≤ cutoff of Π_l p_l(n_l), by convolving
/// the per-axis weights.
fn shell_convolution(p: [&[f64]; 3], cutoff: usize) -> Vec<f64> {
    let conv = |a: &[f64], b: &[f64]| -> Vec<f64> {
        (0..=cutoff)
            .map(|q| (0..=q).filter(|&i| i < a.len() && q - i < b.len()).map(|i| a[i] * b[q - i]).sum())
            .collect()
    };
    conv(&conv(p[0], p[1]), p[2])
}

/// Radial panels for shell-averaged densities over the condensate.
const SHELL_RADIAL_PANELS: usize = 64;

/// U₀₂^Q·N for each shell Q: the coupling g₀₂ times the overlap of the
/// shell-averaged oscillator density with the condensate density.
///
/// The degenerate shell density is isotropic, so it is evaluated along one
/// axis as Σ_{n_x} ψ_{n_x}(r)² S_{Q−n_x} with S the 2D on-axis shell sum.
pub fn shell_interaction_shifts(tf: &ThomasFermiState, g02: f64, length: f64, cutoff: usize) -> Vec<f64> {
    let h0 = hermite_functions(cutoff, 0.0);
    let p0: Vec<f64> = h0.iter().map(|v| v * v / length).collect();
    let s2: Vec<f64> = (0..=cutoff).map(|m| (0..=m).map(|a| p0[a] * p0[m - a]).sum()).collect();
    let rule = composite_legendre(0.0, tf.radius, SHELL_RADIAL_PANELS, 16);
    let per_node: Vec<Vec<f64>> = rule
        .nodes
        .par_iter()
        .zip(&rule.weights)
        .map(|(&r, &wt)| {
            let h = hermite_functions(cutoff, r / length);
            let px: Vec<f64> = h.iter().map(|v| v * v / length).collect();
            let weight = wt * 4.0 * std::f64::consts::PI * r * r * tf.density_r2(r * r);
            (0..=cutoff)
                .map(|q| weight * (0..=q).map(|nx| px[nx] * s2[q - nx]).sum::<f64>())
                .collect()
        })
        .collect();
    (0..=cutoff)
        .map(|q| {
            let s: f64 = per_node.iter().map(|v| v[q]).sum();
            g02 * s / shell_degeneracy(q as u64) as f64
        })
        .collect()
}

/// Builds the coupling table for two sites.
#[allow(clippy::too_many_arguments)]
pub fn ho_mode_couplings(
    w: &Wannier1D,
    sites: [[f64; 3]; 2],
    drive: f64,
    omega: f64,
    mass: f64,
    cutoff: usize,
    tf: &ThomasFermiState,
    g02: f64,
) -> Result<ModeCouplingTable> {
    if cutoff > MAX_QUANTA {
        return Err(Error::Capability(format!("cutoff {cutoff} exceeds the verified range {MAX_QUANTA}")));
    }
    if !(omega > 0.0 && mass > 0.0) {
        return Err(Error::domain("oscillator needs ω > 0 and m > 0"));
    }
    let length = (HBAR / (mass * omega)).sqrt();
    let mut cache = OverlapCache::default();
    let mut get = |s: f64| cache.get_or_compute(w, s, length, cutoff);
    let axis_overlaps = [
        [get(sites[0][0]), get(sites[0][1]), get(sites[0][2])],
        [get(sites[1][0]), get(sites[1][1]), get(sites[1][2])],
    ];
    let shell_shift = shell_interaction_shifts(tf, g02, length, cutoff);
    Ok(ModeCouplingTable {
        cutoff,
        omega,
        length,
        drive,
        n_condensed: tf.n_atoms,
        sites,
        axis_overlaps,
        shell_shift,
        stark: None,
    })
}

impl ModeCouplingTable {
    pub fn state_count(&self) -> u64 {
        cumulative_state_count(self.cutoff as u64)
    }

    /// Ω_1n for `site` (0 or 1) and state `n` (rad/s).
    pub fn coupling(&self, site: usize, n: [usize; 3]) -> f64 {
        let o = &self.axis_overlaps[site];
        self.drive * o[0][n[0]] * o[1][n[1]] * o[2][n[2]]
    }

    /// ω̄_n = (Q + 3/2)ω + U₀₂^Q N + Stark shift (rad/s).
    pub fn level(&self, n: [usize; 3]) -> f64 {
        let q = n[0] + n[1] + n[2];
        let stark = self.stark.as_ref().map_or(0.0, |s| s.get(n));
        (q as f64 + 1.5) * self.omega + self.shell_shift[q] + stark
    }

    /// Σ_{|n| ≤ cutoff} |∫ψ_n w|² for one site (→ 1 as cutoff → ∞).
    pub fn completeness(&self, site: usize, cutoff: usize) -> f64 {
        let cutoff = cutoff.min(self.cutoff);
        let o = &self.axis_overlaps[site];
        let sq: Vec<Vec<f64>> = o.iter().map(|v| v.iter().map(|x| x * x).collect()).collect();
        shell_convolution([&sq[0], &sq[1], &sq[2]], cutoff).iter().sum()
    }

    /// Visits every state with total quanta ≤ `cutoff`, one shell per task,
    /// and reduces per-shell results in shell order.
    pub fn fold_states<T, F, R>(&self, cutoff: usize, init: T, f: F, reduce: R) -> T
    where
        T: Send + Sync + Clone,
        F: Fn(&mut T, [usize; 3]) + Sync,
        R: Fn(T, T) -> T,
    {
        let cutoff = cutoff.min(self.cutoff);
        let shells: Vec<T> = (0..=cutoff)
            .into_par_iter()
            .map(|q| {
                let mut acc = init.clone();
                for nx in 0..=q {
                    for ny in 0..=q - nx {
                        f(&mut acc, [nx, ny, q - nx - ny]);
                    }
                }
                acc
            })
            .collect();
        shells.into_iter().fold(init, reduce)
    }
}

/// Overlaps c_n = ⟨ψ_n|e^{−ρ²/w²}|φ⟩ for even n up to `nmax` per axis, by a
/// separable transform over the condensate octant.
pub fn dressing_overlaps(tf: &ThomasFermiState, length: f64, waist: f64, nmax: usize, nodes: usize) -> Vec<f64> {
    let k = nmax / 2 + 1;
    let rule = composite_legendre(0.0, tf.radius, nodes.div_ceil(16), 16);
    let m = rule.len();
    // Even Hermite functions at the nodes, with the doubled weight of the octant fold.
    let basis: Vec<Vec<f64>> = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&x, &wt)| {
            let h = hermite_functions(2 * (k - 1), x / length);
            (0..k).map(|i| 2.0 * wt * h[2 * i] / length.sqrt()).collect()
        })
        .collect();
    // Stage 1: contract z.
    let s1: Vec<f64> = (0..m * m)
        .into_par_iter()
        .flat_map_iter(|ij| {
            let (i, j) = (ij / m, ij % m);
            let (x, y) = (rule.nodes[i], rule.nodes[j]);
            let g = (-(x * x + y * y) / (waist * waist)).exp();
            let mut out = vec![0.0; k];
            for (c, bz) in basis.iter().enumerate() {
                let z = rule.nodes[c];
                let f = g * tf.value([x, y, z]);
                if f == 0.0 {
                    continue;
                }
                for (o, b) in out.iter_mut().zip(bz) {
                    *o += f * b;
                }
            }
            out
        })
        .collect();
    // Stage 2: contract y. s2[(i, ky, kz)]
    let s2: Vec<f64> = (0..m)
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut out = vec![0.0; k * k];
            for (j, by) in basis.iter().enumerate() {
                let row = &s1[(i * m + j) * k..(i * m + j + 1) * k];
                for (ky, &b) in by.iter().enumerate() {
                    for (kz, &v) in row.iter().enumerate() {
                        out[ky * k + kz] += b * v;
                    }
                }
            }
            out
        })
        .collect();
    // Stage 3: contract x.
    (0..k)
        .into_par_iter()
        .flat_map_iter(|kx| {
            let mut out = vec![0.0; k * k];
            for (i, bx) in basis.iter().enumerate() {
                let b = bx[kx];
                for (o, v) in out.iter_mut().zip(&s2[i * k * k..(i + 1) * k * k]) {
                    *o += b * v;
                }
            }
            out
        })
        .collect()
}

/// Default transverse node count for [`dressing_overlaps`].
pub const DRESSING_NODES: usize = 160;

/// Returns a copy of `table` with second-order light shifts
/// −N(Ω̃₀₂ c_n)²/δ applied to the even oscillator states.
pub fn stark_shifted_spectrum(
    table: &ModeCouplingTable,
    dressing: &StarkDressing,
    tf: &ThomasFermiState,
) -> Result<ModeCouplingTable> {
    let mut out = table.clone();
    if dressing.amplitude == 0.0 {
        out.stark = None;
        return Ok(out);
    }
    if dressing.detuning == 0.0 {
        return Err(Error::domain("dressing field is resonant"));
    }
    let k = dressing.nmax / 2 + 1;
    let c = dressing_overlaps(tf, table.length, dressing.waist, dressing.nmax, DRESSING_NODES);
    let cmax = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let coupling = table.n_condensed.sqrt() * dressing.amplitude * cmax;
    if coupling > 0.1 * dressing.detuning.abs() {
        return Err(Error::domain(format!(
            "dressing is near resonant: √N·Ω̃·c = {coupling:e} vs detuning {:e}",
            dressing.detuning
        )));
    }
    let scale = table.n_condensed * dressing.amplitude.powi(2) / dressing.detuning;
    out.stark = Some(StarkShifts {
        k,
        values: c.iter().map(|v| -scale * v * v).collect(),
        overlaps: c,
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modes::{solve_thomas_fermi, solve_wannier, HoEigenstate, WannierState};
    use crate::optics::{Axis, TrapConfig};
    use crate::atomdata::InternalState;

    struct Fixture {
        rb: AtomSpecies,
        tf: ThomasFermiState,
        w: Wannier1D,
    }

    fn fixture() -> Fixture {
        let cfg = TrapConfig::reference();
        let spec = cfg.lattice_spec(Axis::X, &InternalState::ket1()).unwrap();
        let rb = AtomSpecies::rubidium87();
        let w = solve_wannier(spec.depth, spec.k_eff, rb.mass).unwrap();
        let tf = solve_thomas_fermi(7e5, &rb, 0, TWO_PI * 100.0).unwrap();
        Fixture { rb, tf, w }
    }

    #[test]
    fn u11_and_tf_u_values() {
        let f = fixture();
        let d = f.w.spacing;
        let c = CouplingSet::derive(&f.rb, &f.tf, &f.w, [0.5 * d; 3]).unwrap();
        assert!((c.u[1][1] / 13.0e3 - 1.0).abs() < 0.10, "{}", c.u[1][1]);
        assert!((c.u[0][0] / 0.0197 - 1.0).abs() < 0.10, "{}", c.u[0][0]);
        // U00 closed form g·15/(14πR³)
        let exact = f.rb.contact_coupling(0, 0) * 15.0 / (14.0 * std::f64::consts::PI * f.tf.radius.powi(3));
        assert!((c.u[0][0] / exact - 1.0).abs() < 1e-10);
        // U01 ≈ g01·|φ(site)|² since w is narrow on the condensate scale.
        let r2 = 3.0 * (0.5 * d).powi(2);
        let approx = f.rb.contact_coupling(0, 1) * f.tf.density_r2(r2) / f.tf.n_atoms;
        assert!((c.u[0][1] / approx - 1.0).abs() < 1e-3);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(c.u[i][j], c.u[j][i]);
                assert!(c.u[i][j] > 0.0);
                if (i, j) != (1, 1) {
                    assert!(c.u[1][1] > 1e5 * c.u[i][j]);
                }
            }
        }
    }

    #[test]
    fn eta_at_central_site_matches_separable_estimate() {
        // φ is nearly constant over a site, so η ≈ φ(s)·(∫w)³.
        let f = fixture();
        let d = f.w.spacing;
        let s = [0.5 * d; 3];
        let c = CouplingSet::derive(&f.rb, &f.tf, &f.w, s).unwrap();
        let int_w = f.w.integrate_with(|_| 1.0);
        let est = (f.tf.density_r2(3.0 * 0.25 * d * d) / f.tf.n_atoms).sqrt() * int_w.powi(3);
        assert!((c.eta_fc / est - 1.0).abs() < 1e-3, "{} vs {}", c.eta_fc, est);
        assert!((1.0 / c.eta_fc / 364.0 - 1.0).abs() < 0.10, "1/{}", 1.0 / c.eta_fc);
        assert!((c.enhancement / 2.30 - 1.0).abs() < 0.10);
    }

    #[test]
    fn eta_decreases_away_from_centre() {
        let f = fixture();
        let grid = crate::modes::SiteGrid::new(10, f.w.spacing);
        let mut pts = Vec::new();
        for i in 5..10 {
            for j in 5..=i {
                for k in 5..=j {
                    let s = grid.position([i, j, k]);
                    let r2: f64 = s.iter().map(|x| x * x).sum();
                    pts.push((r2, tf_wannier_overlaps(&f.tf, &f.w, s, &DriveProfile::Flat).0));
                }
            }
        }
        assert_eq!(pts.len(), 35);
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        for p in pts.windows(2) {
            if p[1].0 > p[0].0 * (1.0 + 1e-9) {
                assert!(p[1].1 < p[0].1, "{:?}", p);
            }
        }
    }

    #[test]
    fn zero_scattering_length_gives_zero_u() {
        let f = fixture();
        let ho = HoEigenstate::new([0, 0, 0], TWO_PI * 100.0, f.rb.mass).unwrap();
        assert_eq!(interaction_strength(&ho, &ho, 0.0, 4), 0.0);
    }

    #[test]
    fn identical_modes_give_bare_rabi() {
        let f = fixture();
        let ho = HoEigenstate::new([1, 0, 2], TWO_PI * 100.0, f.rb.mass).unwrap();
        let om = rabi_overlap(&ho, &ho, 1234.0, &DriveProfile::Flat, 8);
        assert!((om / 1234.0 - 1.0).abs() < 1e-10);
        let ws = WannierState::isotropic(&f.w, [0.0; 3]);
        let om = rabi_overlap(&ws, &ws, 1.0, &DriveProfile::Flat, 16);
        assert!((om - 1.0).abs() < 1e-8, "{om}");
    }

    #[test]
    fn parity_selection_at_origin() {
        let f = fixture();
        let ws = WannierState::isotropic(&f.w, [0.0; 3]);
        let odd = HoEigenstate::new([1, 0, 0], TWO_PI * 100.0, f.rb.mass).unwrap();
        let even = HoEigenstate::new([2, 0, 0], TWO_PI * 100.0, f.rb.mass).unwrap();
        let a = overlap(&odd, &ws, &DriveProfile::Flat, 8);
        let b = overlap(&even, &ws, &DriveProfile::Flat, 8);
        assert!(a.abs() < 1e-12 * b.abs(), "{a} {b}");
        let t = axis_overlaps(&f.w, 0.0, odd.length, 11);
        for n in (1..=11).step_by(2) {
            assert!(t[n].abs() < 1e-12 * t[0].abs());
        }
    }

    #[test]
    fn axis_overlaps_match_generic_quadrature() {
        let f = fixture();
        let d = f.w.spacing;
        let s = [4.5 * d, -2.5 * d, 0.5 * d];
        let ws = WannierState::isotropic(&f.w, s);
        let ho = HoEigenstate::new([3, 1, 4], TWO_PI * 100.0, f.rb.mass).unwrap();
        let direct = overlap(&ho, &ws, &DriveProfile::Flat, 8);
        let sep: f64 = (0..3).map(|a| axis_overlaps(&f.w, s[a], ho.length, 4)[ho.n[a]]).product();
        assert!((direct / sep - 1.0).abs() < 1e-8, "{direct} {sep}");
    }

    #[test]
    fn shell_shift_ground_matches_direct_integral() {
        let f = fixture();
        let length = (HBAR / (f.rb.mass * TWO_PI * 100.0)).sqrt();
        let g02 = f.rb.contact_coupling(0, 2);
        let shifts = shell_interaction_shifts(&f.tf, g02, length, 3);
        let ho = HoEigenstate::new([0, 0, 0], TWO_PI * 100.0, f.rb.mass).unwrap();
        let direct = g02 * f.tf.n_atoms * density_overlap(&ho, &f.tf, 16);
        assert!((shifts[0] / direct - 1.0).abs() < 1e-4, "{} {}", shifts[0], direct);
        // Shell 1 average over its three states.
        let mut avg = 0.0;
        for n in [[1, 0, 0], [0, 1, 0], [0, 0, 1]] {
            let ho = HoEigenstate::new(n, TWO_PI * 100.0, f.rb.mass).unwrap();
            avg += g02 * f.tf.n_atoms * density_overlap(&ho, &f.tf, 16) / 3.0;
        }
        assert!((shifts[1] / avg - 1.0).abs() < 1e-4);
    }

    #[test]
    fn dressing_ground_overlap_matches_direct_integral() {
        let f = fixture();
        let length = (HBAR / (f.rb.mass * TWO_PI * 100.0)).sqrt();
        let c = dressing_overlaps(&f.tf, length, 14.1e-6, 4, DRESSING_NODES);
        let profile = DriveProfile::AxialGaussian { waist: 14.1e-6, axis: Axis::Z };
        for (n, idx) in [([0, 0, 0], 0), ([2, 0, 0], 9), ([0, 2, 4], 5)] {
            let ho = HoEigenstate::new(n, TWO_PI * 100.0, f.rb.mass).unwrap();
            let direct = overlap(&ho, &f.tf, &profile, 24);
            assert!((c[idx] / direct - 1.0).abs() < 1e-3, "{n:?}: {} vs {direct}", c[idx]);
        }
    }

    #[test]
    fn mirror_sites_have_equal_magnitudes() {
        let f = fixture();
        let d = f.w.spacing;
        let s = [4.5 * d; 3];
        let t = ho_mode_couplings(
            &f.w,
            [s, s.map(|x| -x)],
            1.0,
            TWO_PI * 100.0,
            f.rb.mass,
            40,
            &f.tf,
            f.rb.contact_coupling(0, 2),
        )
        .unwrap();
        for n in [[0, 0, 0], [3, 1, 7], [10, 0, 5]] {
            let a = t.coupling(0, n);
            let b = t.coupling(1, n);
            assert!((a.abs() - b.abs()).abs() <= 1e-12 * a.abs());
            let q: usize = n.iter().sum();
            assert_eq!(a.signum() * b.signum(), if q % 2 == 0 { 1.0 } else { -1.0 });
        }
    }

    #[test]
    fn stark_zero_amplitude_is_identity() {
        let f = fixture();
        let d = f.w.spacing;
        let s = [4.5 * d; 3];
        let t = ho_mode_couplings(&f.w, [s, s], 1.0, TWO_PI * 100.0, f.rb.mass, 10, &f.tf, 1e-17).unwrap();
        let dr = StarkDressing { amplitude: 0.0, detuning: 1e15, waist: 14.1e-6, nmax: 10 };
        let u = stark_shifted_spectrum(&t, &dr, &f.tf).unwrap();
        assert_eq!(u.level([2, 0, 0]), t.level([2, 0, 0]));
    }

    #[test]
    fn stark_shift_matches_two_level_diagonalization() {
        let f = fixture();
        let d = f.w.spacing;
        let s = [4.5 * d; 3];
        let t = ho_mode_couplings(&f.w, [s, s], 1.0, TWO_PI * 100.0, f.rb.mass, 20, &f.tf, 1e-17).unwrap();
        let dr = StarkDressing::from_beam(&f.rb, 532e-9, 0.2e-3, 14.1e-6).unwrap();
        let dr = StarkDressing { nmax: 20, ..dr };
        let u = stark_shifted_spectrum(&t, &dr, &f.tf).unwrap();
        let st = u.stark.as_ref().unwrap();
        // Lowest 50 even states: exact eigenvalue of the 2×2 block per level.
        let mut checked = 0;
        'outer: for q in (0..=20).step_by(2) {
            for nx in (0..=q).step_by(2) {
                for ny in (0..=q - nx).step_by(2) {
                    let n = [nx, ny, q - nx - ny];
                    let c = st.overlaps[(nx / 2 * st.k + ny / 2) * st.k + n[2] / 2];
                    let v = f.tf.n_atoms.sqrt() * dr.amplitude * c;
                    let delta = dr.detuning;
                    let exact = 0.5 * delta - (0.25 * delta * delta + v * v).sqrt();
                    let pert = st.get(n);
                    if exact.abs() > 0.0 {
                        assert!((pert / exact - 1.0).abs() < 0.01, "{n:?}");
                    }
                    checked += 1;
                    if checked == 50 {
                        break 'outer;
                    }
                }
            }
        }
        assert_eq!(checked, 50);
        assert!(st.get([0, 0, 0]) < 0.0, "blue dressing lowers the level");
    }

    #[test]
    fn dressing_beam_parameters() {
        let rb = AtomSpecies::rubidium87();
        let dr = StarkDressing::from_beam(&rb, 532e-9, 0.2e-3, 14.1e-6).unwrap();
        assert!((dr.amplitude / 3.05e9 - 1.0).abs() < 0.01, "{}", dr.amplitude);
        assert!((dr.detuning / 1.171e15 - 1.0).abs() < 0.01, "{}", dr.detuning);
    }
}
