//! Far-detuned dipole potentials for the harmonic trap beams and the
//! spin-dependent lattice, plus trap-frequency and lattice-geometry helpers.
//!
//! Potentials are returned as angular frequencies (V/ħ, rad/s).

use serde::Serialize;

use crate::atomdata::{AtomSpecies, InternalState, HBAR, SPEED_OF_LIGHT, TWO_PI};
use crate::error::{Error, Result};

/// Lab axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    /// The two transverse lab axes, in increasing index order.
    pub fn transverse(self) -> [usize; 2] {
        match self {
            Axis::X => [1, 2],
            Axis::Y => [0, 2],
            Axis::Z => [0, 1],
        }
    }

    pub fn unit(self) -> [f64; 3] {
        let mut u = [0.0; 3];
        u[self.index()] = 1.0;
        u
    }
}

/// How the Γ/ω₀³ prefactor is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum Prefactor {
    /// Separate Γ/ω₀³ for each D line.
    #[default]
    LineSpecific,
    /// One shared prefactor (the D2 value) for both lines.
    Single,
}

/// A single astigmatic Gaussian beam focused at `focus`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeamSpec {
    pub wavelength: f64,
    pub power: f64,
    /// 1/e² intensity radii along the two transverse axes (see [`Axis::transverse`]).
    pub waist: [f64; 2],
    pub axis: Axis,
    /// 0 for linear, ±1 for σ± circular polarization.
    pub polarization: i8,
    pub focus: [f64; 3],
}

impl BeamSpec {
    pub fn new(wavelength: f64, power: f64, waist: [f64; 2], axis: Axis, polarization: i8) -> Result<Self> {
        let b = BeamSpec { wavelength, power, waist, axis, polarization, focus: [0.0; 3] };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.wavelength > 0.0) {
            return Err(Error::Config("beam wavelength must be positive".into()));
        }
        if !(self.power >= 0.0) {
            return Err(Error::Config("beam power must be non-negative".into()));
        }
        if !(self.waist[0] > 0.0 && self.waist[1] > 0.0) {
            return Err(Error::Config("beam waists must be positive".into()));
        }
        if self.polarization.abs() > 1 {
            return Err(Error::Config("polarization must be -1, 0 or +1".into()));
        }
        Ok(())
    }

    pub fn peak_intensity(&self) -> f64 {
        2.0 * self.power / (std::f64::consts::PI * self.waist[0] * self.waist[1])
    }

    /// Intensity (W/m²) at `r`, with each transverse waist expanding over its own Rayleigh range.
    pub fn intensity(&self, r: [f64; 3]) -> f64 {
        let z = r[self.axis.index()] - self.focus[self.axis.index()];
        let t = self.axis.transverse();
        let mut amp = 2.0 * self.power / std::f64::consts::PI;
        let mut expo = 0.0;
        for (k, &ax) in t.iter().enumerate() {
            let w0 = self.waist[k];
            let zr = std::f64::consts::PI * w0 * w0 / self.wavelength;
            let w = w0 * (1.0 + (z / zr).powi(2)).sqrt();
            let x = r[ax] - self.focus[ax];
            amp /= w;
            expo -= 2.0 * x * x / (w * w);
        }
        amp * expo.exp()
    }
}

/// Scalar and vector light-shift coefficients (rad/s per W/m²) such that a
/// single beam gives V = (scalar + P·g_F·m_F·vector)·I.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LightShift {
    pub scalar: f64,
    pub vector: f64,
    /// D1 and D2 contributions to the scalar coefficient.
    pub scalar_lines: [f64; 2],
    /// D1 and D2 contributions to the vector coefficient.
    pub vector_lines: [f64; 2],
}

pub fn light_shift(species: &AtomSpecies, wavelength: f64, prefactor: Prefactor) -> Result<LightShift> {
    if !(wavelength > 0.0) {
        return Err(Error::domain("wavelength must be positive"));
    }
    let omega_l = TWO_PI * SPEED_OF_LIGHT / wavelength;
    let d1 = omega_l - species.d1.omega;
    let d2 = omega_l - species.d2.omega;
    for (name, d, g) in [("D1", d1, species.d1.gamma), ("D2", d2, species.d2.gamma)] {
        if d.abs() < 1e3 * g {
            return Err(Error::domain(format!(
                "laser at {:.3} nm is not far detuned from {name} (Δ = {d:e} rad/s)",
                wavelength * 1e9
            )));
        }
    }
    let p2 = species.d2.gamma / species.d2.omega.powi(3);
    let p1 = match prefactor {
        Prefactor::LineSpecific => species.d1.gamma / species.d1.omega.powi(3),
        Prefactor::Single => p2,
    };
    let k = std::f64::consts::PI * SPEED_OF_LIGHT.powi(2) / (2.0 * HBAR);
    let s1 = k * p1 / d1;
    let s2 = k * 2.0 * p2 / d2;
    let v1 = -k * p1 / d1;
    let v2 = k * p2 / d2;
    Ok(LightShift {
        scalar: s1 + s2,
        vector: v1 + v2,
        scalar_lines: [s1, s2],
        vector_lines: [v1, v2],
    })
}

/// Signed detunings ω_L − ω_D1, ω_L − ω_D2 (rad/s).
pub fn detunings(species: &AtomSpecies, wavelength: f64) -> [f64; 2] {
    let omega_l = TWO_PI * SPEED_OF_LIGHT / wavelength;
    [omega_l - species.d1.omega, omega_l - species.d2.omega]
}

fn g_m(species: &AtomSpecies, state: &InternalState) -> Result<f64> {
    if state.m_f == 0 {
        return Ok(0.0);
    }
    Ok(species.g_f(state)? * state.m_f as f64)
}

/// Single-beam dipole potential (rad/s) at `r`.
pub fn dipole_potential(
    species: &AtomSpecies,
    beam: &BeamSpec,
    r: [f64; 3],
    state: &InternalState,
    prefactor: Prefactor,
) -> Result<f64> {
    let ls = light_shift(species, beam.wavelength, prefactor)?;
    let gm = g_m(species, state)?;
    Ok((ls.scalar + beam.polarization as f64 * gm * ls.vector) * beam.intensity(r))
}

/// One retro-reflected lattice beam pair. The standing wave forms along
/// `axis` with effective wavevector k·sin(φ/2).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticePair {
    pub wavelength: f64,
    /// Power per beam (W).
    pub power: f64,
    pub waist: f64,
    pub axis: Axis,
    /// Full angle between the two beams (π for counterpropagating).
    pub phi: f64,
    /// Polarization rotation between the two beams.
    pub theta: f64,
}

impl LatticePair {
    pub fn peak_intensity(&self) -> f64 {
        2.0 * self.power / (std::f64::consts::PI * self.waist * self.waist)
    }

    pub fn geometry(&self) -> Result<LatticeGeometry> {
        lattice_geometry(self.wavelength, self.phi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LatticeGeometry {
    pub k_eff: f64,
    pub spacing: f64,
}

/// Standing-wave geometry for two beams crossing at full angle `phi`.
pub fn lattice_geometry(wavelength: f64, phi: f64) -> Result<LatticeGeometry> {
    if !(phi > 0.0 && phi <= std::f64::consts::PI) || !(wavelength > 0.0) {
        return Err(Error::domain(format!("lattice angle {phi} outside (0, π]")));
    }
    let spacing = wavelength / (2.0 * (0.5 * phi).sin());
    Ok(LatticeGeometry { k_eff: std::f64::consts::PI / spacing, spacing })
}

/// Crossing angle that yields lattice spacing `d`.
pub fn angle_for_spacing(wavelength: f64, d: f64) -> Result<f64> {
    let s = wavelength / (2.0 * d);
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::domain(format!("spacing {d:e} m is below λ/2")));
    }
    Ok(2.0 * s.asin())
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Pair potential (rad/s) along the standing wave, with a Gaussian envelope
/// in the coordinates transverse to the lattice axis.
pub fn lattice_potential(
    species: &AtomSpecies,
    pair: &LatticePair,
    r: [f64; 3],
    state: &InternalState,
    b_field: [f64; 3],
    prefactor: Prefactor,
) -> Result<f64> {
    let ls = light_shift(species, pair.wavelength, prefactor)?;
    let geo = pair.geometry()?;
    let gm = g_m(species, state)?;
    let ax = pair.axis.index();
    let rho2: f64 = pair.axis.transverse().iter().map(|&i| r[i] * r[i]).sum();
    let i0 = pair.peak_intensity() * (-2.0 * rho2 / (pair.waist * pair.waist)).exp();
    let x = r[ax];
    let scalar = 2.0 * ls.scalar * i0 * (1.0 + pair.theta.cos() * (2.0 * geo.k_eff * x).cos());
    let vector = if gm == 0.0 {
        0.0
    } else {
        let bn = dot(b_field, b_field).sqrt();
        if bn == 0.0 {
            return Err(Error::domain("spin-dependent lattice needs a nonzero magnetic field"));
        }
        let proj = dot(pair.axis.unit(), b_field) / bn;
        2.0 * gm * ls.vector * i0 * proj * pair.theta.sin() * (2.0 * geo.k_eff * x).sin()
    };
    Ok(scalar + vector)
}

/// Peak-to-trough depth (rad/s) of one pair at the beam centre.
pub fn lattice_depth(
    species: &AtomSpecies,
    pair: &LatticePair,
    state: &InternalState,
    b_field: [f64; 3],
    prefactor: Prefactor,
) -> Result<f64> {
    let ls = light_shift(species, pair.wavelength, prefactor)?;
    let i0 = pair.peak_intensity();
    let gm = g_m(species, state)?;
    let bn = dot(b_field, b_field).sqrt();
    let proj = if bn > 0.0 { dot(pair.axis.unit(), b_field) / bn } else { 0.0 };
    let a = 2.0 * ls.scalar * i0 * pair.theta.cos();
    let b = 2.0 * gm * ls.vector * i0 * proj * pair.theta.sin();
    Ok(2.0 * a.hypot(b))
}

/// Peak-to-trough depth (rad/s) split into the D1 and D2 contributions,
/// each evaluated as if the other line were absent.
pub fn lattice_depth_by_line(
    species: &AtomSpecies,
    pair: &LatticePair,
    state: &InternalState,
    b_field: [f64; 3],
    prefactor: Prefactor,
) -> Result<[f64; 2]> {
    let ls = light_shift(species, pair.wavelength, prefactor)?;
    let i0 = pair.peak_intensity();
    let gm = g_m(species, state)?;
    let bn = dot(b_field, b_field).sqrt();
    let proj = if bn > 0.0 { dot(pair.axis.unit(), b_field) / bn } else { 0.0 };
    let mut out = [0.0; 2];
    for (k, d) in out.iter_mut().enumerate() {
        let a = 2.0 * ls.scalar_lines[k] * i0 * pair.theta.cos();
        let b = 2.0 * gm * ls.vector_lines[k] * i0 * proj * pair.theta.sin();
        *d = 2.0 * a.hypot(b);
    }
    Ok(out)
}

/// Full optical configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrapConfig {
    pub species: AtomSpecies,
    pub trap_beams: Vec<BeamSpec>,
    pub lattice: [LatticePair; 3],
    /// Magnetic field (T).
    pub b_field: [f64; 3],
    pub prefactor: Prefactor,
}

impl TrapConfig {
    /// The reference ⁸⁷Rb setup: two crossed 808 nm, 100 mW beams and a
    /// 790 nm, 67 mW lattice with 532 nm spacing and a 5.4 G field along (1,1,1).
    pub fn reference() -> Self {
        let um = 1e-6;
        let beam = |waist: [f64; 2], axis| BeamSpec {
            wavelength: 808e-9,
            power: 0.1,
            waist,
            axis,
            polarization: 0,
            focus: [0.0; 3],
        };
        let phi = angle_for_spacing(790e-9, 532e-9).expect("reference spacing is valid");
        let pair = |axis| LatticePair {
            wavelength: 790e-9,
            power: 0.067,
            waist: 150.0 * um,
            axis,
            phi,
            theta: std::f64::consts::FRAC_PI_2,
        };
        let b = 5.4e-4 / 3f64.sqrt();
        TrapConfig {
            species: AtomSpecies::rubidium87(),
            trap_beams: vec![
                beam([120.0 * um, 90.0 * um], Axis::Z),
                beam([132.0 * um, 87.3 * um], Axis::Y),
            ],
            lattice: [pair(Axis::X), pair(Axis::Y), pair(Axis::Z)],
            b_field: [b, b, b],
            prefactor: Prefactor::LineSpecific,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.species.validate()?;
        for b in &self.trap_beams {
            b.validate()?;
        }
        let mut seen = [false; 3];
        for p in &self.lattice {
            if !(p.power >= 0.0 && p.waist > 0.0 && p.wavelength > 0.0) {
                return Err(Error::Config("lattice beams need positive waist/wavelength and non-negative power".into()));
            }
            seen[p.axis.index()] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Config("lattice pairs must span all three axes".into()));
        }
        Ok(())
    }

    /// Harmonic-trap potential (rad/s), the sum of per-beam potentials.
    pub fn trap_potential(&self, r: [f64; 3], state: &InternalState) -> Result<f64> {
        self.trap_beams
            .iter()
            .map(|b| dipole_potential(&self.species, b, r, state, self.prefactor))
            .sum()
    }

    /// Lattice potential (rad/s), the sum of the three pair potentials.
    pub fn lattice_potential(&self, r: [f64; 3], state: &InternalState) -> Result<f64> {
        self.lattice
            .iter()
            .map(|p| lattice_potential(&self.species, p, r, state, self.b_field, self.prefactor))
            .sum()
    }

    /// Depth and geometry of the lattice along `axis` for `state`.
    pub fn lattice_spec(&self, axis: Axis, state: &InternalState) -> Result<LatticeSpec> {
        let pair = self
            .lattice
            .iter()
            .find(|p| p.axis == axis)
            .ok_or_else(|| Error::Config(format!("no lattice pair along {axis:?}")))?;
        let geo = pair.geometry()?;
        Ok(LatticeSpec {
            depth: lattice_depth(&self.species, pair, state, self.b_field, self.prefactor)?,
            k_eff: geo.k_eff,
            spacing: geo.spacing,
        })
    }

    /// Rows of (x, y, z, V₀, V₁, V₂) with potentials in Hz, trap plus lattice.
    pub fn potential_grid(&self, points: &[[f64; 3]]) -> Result<Vec<[f64; 6]>> {
        let states = [InternalState::ket0(), InternalState::ket1(), InternalState::ket2()];
        points
            .iter()
            .map(|&r| {
                let mut row = [r[0], r[1], r[2], 0.0, 0.0, 0.0];
                for (k, s) in states.iter().enumerate() {
                    row[3 + k] = (self.trap_potential(r, s)? + self.lattice_potential(r, s)?) / TWO_PI;
                }
                Ok(row)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LatticeSpec {
    /// Peak-to-trough depth (rad/s).
    pub depth: f64,
    pub k_eff: f64,
    pub spacing: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HarmonicFit {
    pub omega: [f64; 3],
    pub omega_bar: f64,
    /// (max ω − min ω) / ω̄.
    pub anisotropy: f64,
}

/// Finite-difference step used by [`fit_harmonic_frequency`].
pub const HARMONIC_FIT_STEP: f64 = 1e-6;

/// Per-axis harmonic frequencies ω_l = √(∂²V/∂l²·ħ/m) of a potential `v`
/// (rad/s) at `center`, from central differences with step [`HARMONIC_FIT_STEP`].
pub fn fit_harmonic_frequency<F>(v: F, center: [f64; 3], mass: f64) -> Result<HarmonicFit>
where
    F: Fn([f64; 3]) -> Result<f64>,
{
    let h = HARMONIC_FIT_STEP;
    let v0 = v(center)?;
    let mut omega = [0.0; 3];
    for (l, w) in omega.iter_mut().enumerate() {
        let mut rp = center;
        let mut rm = center;
        rp[l] += h;
        rm[l] -= h;
        let curv = (v(rp)? - 2.0 * v0 + v(rm)?) / (h * h);
        if !(curv > 0.0) {
            return Err(Error::numerical(format!("non-positive curvature along axis {l}")));
        }
        *w = (curv * HBAR / mass).sqrt();
    }
    let omega_bar = (omega[0] * omega[1] * omega[2]).cbrt();
    let (lo, hi) = omega.iter().fold((f64::MAX, f64::MIN), |(a, b), &w| (a.min(w), b.max(w)));
    Ok(HarmonicFit { omega, omega_bar, anisotropy: (hi - lo) / omega_bar })
}
