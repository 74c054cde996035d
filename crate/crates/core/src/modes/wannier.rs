//! Lowest-band Wannier functions of a separable cubic lattice, from a 1D
//! plane-wave band-structure calculation.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use super::ModeFunction;
use crate::atomdata::HBAR;
use crate::error::{Error, Result};
use crate::numerics::quad::{composite_legendre, Rule};

/// Quasimomentum samples across the Brillouin zone.
pub const DEFAULT_QUASIMOMENTA: usize = 256;
/// Plane waves run over reciprocal vectors −L..=L.
pub const DEFAULT_CUTOFF: usize = 20;
/// Relative change in band energies tolerated when the cutoff grows.
pub const CONVERGENCE_TOL: f64 = 1e-6;

/// Half-width, in lattice periods, of the region where w is tabulated.
const SUPPORT_PERIODS: f64 = 2.0;
const PANELS_PER_PERIOD: usize = 4;
const PANEL_ORDER: usize = 16;

/// Ground and first excited band of V(x) = V₀/2·(1 − cos 2kx).
#[derive(Debug, Clone, Serialize)]
pub struct BandStructure {
    pub depth: f64,
    pub k_eff: f64,
    pub cutoff: usize,
    /// Recoil energy ħk²/2m (rad/s).
    pub recoil: f64,
    pub quasimomenta: Vec<f64>,
    pub band0: Vec<f64>,
    pub band1: Vec<f64>,
    /// Ground-band plane-wave coefficients, one row per quasimomentum.
    #[serde(skip)]
    coeffs: Vec<Vec<f64>>,
}

fn solve_bands(depth: f64, k: f64, mass: f64, cutoff: usize, nq: usize) -> BandStructure {
    let recoil = HBAR * k * k / (2.0 * mass);
    let dim = 2 * cutoff + 1;
    let mut quasimomenta = Vec::with_capacity(nq);
    let mut band0 = Vec::with_capacity(nq);
    let mut band1 = Vec::with_capacity(nq);
    let mut coeffs = Vec::with_capacity(nq);
    for j in 0..nq {
        let q = -k + (j as f64 + 0.5) * 2.0 * k / nq as f64;
        let mut h = DMatrix::<f64>::zeros(dim, dim);
        for a in 0..dim {
            let l = a as f64 - cutoff as f64;
            h[(a, a)] = recoil * (q / k + 2.0 * l).powi(2) + 0.5 * depth;
            if a + 1 < dim {
                h[(a, a + 1)] = -0.25 * depth;
                h[(a + 1, a)] = -0.25 * depth;
            }
        }
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let mut c: Vec<f64> = eig.eigenvectors.column(order[0]).iter().copied().collect();
        // Gauge: make the cell-centre amplitude Σ c_l positive.
        if c.iter().sum::<f64>() < 0.0 {
            c.iter_mut().for_each(|v| *v = -*v);
        }
        quasimomenta.push(q);
        band0.push(eig.eigenvalues[order[0]]);
        band1.push(eig.eigenvalues[order[1]]);
        coeffs.push(c);
    }
    BandStructure { depth, k_eff: k, cutoff, recoil, quasimomenta, band0, band1, coeffs }
}

impl BandStructure {
    /// (max − min of the ground band)/4 (rad/s).
    pub fn tunneling(&self) -> f64 {
        let (lo, hi) = minmax(&self.band0);
        0.25 * (hi - lo)
    }

    /// Minimum over quasimomentum of the band-1 minus band-0 energy (rad/s).
    pub fn band_gap(&self) -> f64 {
        self.band1
            .iter()
            .zip(&self.band0)
            .map(|(a, b)| a - b)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn spacing(&self) -> f64 {
        std::f64::consts::PI / self.k_eff
    }

    /// Direct plane-wave sum for w(x), site at the origin.
    pub fn wannier_value(&self, x: f64) -> f64 {
        let nq = self.quasimomenta.len() as f64;
        let k2 = 2.0 * self.k_eff;
        let mut s = 0.0;
        for (q, c) in self.quasimomenta.iter().zip(&self.coeffs) {
            for (a, cl) in c.iter().enumerate() {
                let l = a as f64 - self.cutoff as f64;
                s += cl * ((q + k2 * l) * x).cos();
            }
        }
        s / (nq * self.spacing().sqrt())
    }
}

fn minmax(v: &[f64]) -> (f64, f64) {
    v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)))
}

/// Real, even ground-band Wannier function tabulated on quadrature nodes.
#[derive(Debug, Clone, Serialize)]
pub struct Wannier1D {
    pub depth: f64,
    pub k_eff: f64,
    pub spacing: f64,
    pub band_gap: f64,
    pub tunneling: f64,
    pub recoil: f64,
    pub cutoff: usize,
    /// Quadrature over [−2d, 2d] about the site.
    #[serde(skip)]
    pub rule: Rule,
    /// w at the rule nodes.
    #[serde(skip)]
    pub values: Vec<f64>,
    #[serde(skip)]
    bands: BandStructure,
}

impl Wannier1D {
    /// Builds a table on `panels_per_period` panels per lattice period.
    pub fn with_resolution(bands: BandStructure, panels_per_period: usize) -> Self {
        let d = bands.spacing();
        let half = SUPPORT_PERIODS * d;
        let panels = (2.0 * SUPPORT_PERIODS) as usize * panels_per_period;
        let rule = composite_legendre(-half, half, panels, PANEL_ORDER);
        let values: Vec<f64> = rule.nodes.iter().map(|&x| bands.wannier_value(x)).collect();
        Wannier1D {
            depth: bands.depth,
            k_eff: bands.k_eff,
            spacing: d,
            band_gap: bands.band_gap(),
            tunneling: bands.tunneling(),
            recoil: bands.recoil,
            cutoff: bands.cutoff,
            rule,
            values,
            bands,
        }
    }

    /// Same band solution tabulated on a different number of panels per period.
    pub fn refined(&self, panels_per_period: usize) -> Self {
        Self::with_resolution(self.bands.clone(), panels_per_period)
    }

    pub fn half_width(&self) -> f64 {
        SUPPORT_PERIODS * self.spacing
    }

    pub fn value(&self, x: f64) -> f64 {
        if x.abs() > self.half_width() {
            return 0.0;
        }
        self.bands.wannier_value(x)
    }

    /// ∫ f(x) w(x) dx over the tabulated support (site at the origin).
    pub fn integrate_with<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.rule
            .nodes
            .iter()
            .zip(&self.rule.weights)
            .zip(&self.values)
            .map(|((&x, &wt), &v)| wt * v * f(x))
            .sum()
    }

    /// Quadrature on [−d, d] with w tabulated at its nodes, for products with
    /// smooth functions where the side lobes beyond one period are negligible.
    pub fn core_rule(&self, panels: usize) -> (Rule, Vec<f64>) {
        let rule = composite_legendre(-self.spacing, self.spacing, panels, PANEL_ORDER);
        let w = rule.nodes.iter().map(|&x| self.bands.wannier_value(x)).collect();
        (rule, w)
    }

    pub fn norm(&self) -> f64 {
        self.moment(2, 0)
    }

    /// ∫ xᵖ wⁿ dx.
    pub fn moment(&self, n: i32, p: i32) -> f64 {
        self.rule
            .nodes
            .iter()
            .zip(&self.rule.weights)
            .zip(&self.values)
            .map(|((&x, &wt), &v)| wt * x.powi(p) * v.powi(n))
            .sum()
    }

    /// Harmonic frequency of a single well, 2√(V₀E_R) (rad/s).
    pub fn site_frequency(&self) -> f64 {
        2.0 * (self.depth * self.recoil).sqrt()
    }

    pub fn bands(&self) -> &BandStructure {
        &self.bands
    }
}

/// Solves the 1D band problem for depth `depth` (rad/s) and wavevector
/// `k_eff`, checking convergence against a larger plane-wave cutoff.
pub fn solve_wannier(depth: f64, k_eff: f64, mass: f64) -> Result<Wannier1D> {
    solve_wannier_with(depth, k_eff, mass, DEFAULT_CUTOFF, DEFAULT_QUASIMOMENTA)
}

pub fn solve_wannier_with(depth: f64, k_eff: f64, mass: f64, cutoff: usize, nq: usize) -> Result<Wannier1D> {
    if !(depth > 0.0) || !(k_eff > 0.0) || !(mass > 0.0) {
        return Err(Error::domain("Wannier solve needs positive depth, wavevector and mass"));
    }
    if cutoff < 15 {
        return Err(Error::Config("plane-wave cutoff must be at least 15".into()));
    }
    let bands = solve_bands(depth, k_eff, mass, cutoff, nq);
    let check = solve_bands(depth, k_eff, mass, cutoff + 5, nq);
    let scale = bands.band1.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for (a, b) in bands.band0.iter().zip(&check.band0).chain(bands.band1.iter().zip(&check.band1)) {
        if (a - b).abs() > CONVERGENCE_TOL * scale {
            return Err(Error::numerical(format!(
                "band energies not converged at cutoff {cutoff}: {a:e} vs {b:e}"
            )));
        }
    }
    Ok(Wannier1D::with_resolution(bands, PANELS_PER_PERIOD))
}

/// Separable 3D Wannier function centred on `site`.
#[derive(Debug, Clone, Serialize)]
pub struct WannierState {
    pub axes: [Wannier1D; 3],
    pub site: [f64; 3],
}

impl WannierState {
    pub fn isotropic(w: &Wannier1D, site: [f64; 3]) -> Self {
        WannierState { axes: [w.clone(), w.clone(), w.clone()], site }
    }

    pub fn band_gap(&self) -> f64 {
        self.axes.iter().map(|a| a.band_gap).fold(f64::INFINITY, f64::min)
    }

    pub fn tunneling(&self) -> f64 {
        self.axes.iter().map(|a| a.tunneling).fold(0.0, f64::max)
    }
}

impl ModeFunction for WannierState {
    fn value(&self, r: [f64; 3]) -> f64 {
        (0..3).map(|a| self.axes[a].value(r[a] - self.site[a])).product()
    }

    fn axis_factor(&self, axis: usize, x: f64) -> Option<f64> {
        Some(self.axes[axis].value(x - self.site[axis]))
    }

    fn bounds(&self) -> [[f64; 2]; 3] {
        let mut b = [[0.0; 2]; 3];
        for a in 0..3 {
            let h = self.axes[a].half_width();
            b[a] = [self.site[a] - h, self.site[a] + h];
        }
        b
    }
}

/// Cubic grid of `n` sites per axis centred on the trap, at (i − (n−1)/2)·d.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SiteGrid {
    pub per_axis: usize,
    pub spacing: f64,
}

impl SiteGrid {
    pub fn new(per_axis: usize, spacing: f64) -> Self {
        SiteGrid { per_axis, spacing }
    }

    pub fn position(&self, idx: [usize; 3]) -> [f64; 3] {
        let c = 0.5 * (self.per_axis as f64 - 1.0);
        [0, 1, 2].map(|a| (idx[a] as f64 - c) * self.spacing)
    }

    /// Site (n−1, n−1, n−1).
    pub fn corner(&self) -> [f64; 3] {
        let n = self.per_axis - 1;
        self.position([n, n, n])
    }

    /// A site closest to the trap centre.
    pub fn central(&self) -> [f64; 3] {
        let n = self.per_axis / 2;
        self.position([n, n, n])
    }

    pub fn positions(&self) -> Vec<[f64; 3]> {
        let n = self.per_axis;
        let mut out = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    out.push(self.position([i, j, k]));
                }
            }
        }
        out
    }

    pub fn half_extent(&self) -> f64 {
        0.5 * (self.per_axis as f64 - 1.0) * self.spacing
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomdata::AtomSpecies;

    fn reference() -> Wannier1D {
        let m = AtomSpecies::rubidium87().mass;
        solve_wannier(7.99e5, std::f64::consts::PI / 532e-9, m).unwrap()
    }

    #[test]
    fn unit_norm_and_centred() {
        let w = reference();
        assert!((w.norm() - 1.0).abs() < 1e-8, "{}", w.norm());
        assert!(w.moment(2, 1).abs() < 1e-12 * w.spacing);
        assert!((w.value(0.1e-6) - w.value(-0.1e-6)).abs() < 1e-9 * w.value(0.0));
    }

    #[test]
    fn gap_and_tunneling_in_expected_range() {
        let w = reference();
        assert!((w.band_gap / 190e3 - 1.0).abs() < 0.10, "{}", w.band_gap);
        let ratio = w.tunneling / 0.09;
        assert!((0.5..2.0).contains(&ratio), "{}", w.tunneling);
        // Gap approaches the site frequency from below in a deep lattice.
        assert!(w.band_gap < w.site_frequency());
        assert!(w.band_gap > 0.9 * w.site_frequency());
    }

    #[test]
    fn deep_lattice_overlaps_site_gaussian() {
        let w = reference();
        let m = AtomSpecies::rubidium87().mass;
        let sigma = (HBAR / (m * w.site_frequency())).sqrt();
        let g = |x: f64| (std::f64::consts::PI * sigma * sigma).powf(-0.25) * (-x * x / (2.0 * sigma * sigma)).exp();
        let ov = w.integrate_with(g);
        assert!(ov > 0.99, "{ov}");
    }

    #[test]
    fn envelope_decays_cell_by_cell() {
        // Side lobes sit on neighbouring sites, so compare per-cell maxima.
        let w = reference();
        let d = w.spacing;
        let cell_max = |n: f64| {
            (0..=200)
                .map(|i| w.value(d * (n - 0.5 + i as f64 / 200.0)).abs())
                .fold(0.0, f64::max)
        };
        let (c0, c1, c2) = (cell_max(0.0), cell_max(1.0), cell_max(2.0));
        assert!(c1 < 1e-3 * c0 && c2 < 1e-3 * c1, "{c0} {c1} {c2}");
    }

    #[test]
    fn shallow_lattice_tunnels_more() {
        let m = AtomSpecies::rubidium87().mass;
        let k = std::f64::consts::PI / 532e-9;
        let deep = solve_wannier(7.99e5, k, m).unwrap();
        let shallow = solve_wannier(1.0e5, k, m).unwrap();
        assert!(shallow.tunneling > 100.0 * deep.tunneling);
    }

    #[test]
    fn rejects_small_cutoff() {
        let m = AtomSpecies::rubidium87().mass;
        assert!(solve_wannier_with(1e5, 1e7, m, 10, 32).is_err());
    }

    #[test]
    fn site_grid_geometry() {
        let g = SiteGrid::new(10, 532e-9);
        assert!((g.corner()[0] - 4.5 * 532e-9).abs() < 1e-18);
        assert!((g.central()[0] - 0.5 * 532e-9).abs() < 1e-18);
        assert_eq!(g.positions().len(), 1000);
    }
}
