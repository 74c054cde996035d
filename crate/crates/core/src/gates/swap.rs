use nalgebra::{Complex, Matrix4};
use serde::Serialize;

use crate::hubbard::SqrtSwapHamiltonian;

type C = Complex<f64>;

/// Two-qubit propagator in the basis |↓↓⟩, |↓↑⟩, |↑↓⟩, |↑↑⟩ together with
/// its distance from the ideal √SWAP.
#[derive(Debug, Clone, Serialize)]
pub struct SqrtSwapGate {
    #[serde(skip)]
    pub unitary: Matrix4<C>,
    pub duration: f64,
    /// max over matrix elements of ||U_ij|² − |S_ij|²|.
    pub population_distance: f64,
    /// arg(U↑↑U↓↓/det M) relative to the ideal √SWAP, with M the
    /// single-excitation block. Invariant under local Z rotations.
    pub conditional_phase: f64,
    /// |⟨↑↓|U²|↓↑⟩|².
    pub double_swap_population: f64,
    pub mismatch: f64,
}

fn ideal() -> Matrix4<C> {
    let z = C::new(0.0, 0.0);
    let one = C::new(1.0, 0.0);
    let a = C::new(0.5, 0.5);
    let b = C::new(0.5, -0.5);
    Matrix4::new(one, z, z, z, z, a, b, z, z, b, a, z, z, z, z, one)
}

fn invariant(u: &Matrix4<C>) -> C {
    let det = u[(1, 1)] * u[(2, 2)] - u[(1, 2)] * u[(2, 1)];
    u[(0, 0)] * u[(3, 3)] / det
}

/// Evolves the exchange Hamiltonian for `duration`, or the nominal π/(4|g|).
pub fn run_sqrtswap(h: &SqrtSwapHamiltonian, duration: Option<f64>) -> SqrtSwapGate {
    let t = duration.unwrap_or_else(|| h.gate_time());
    let [e0, e1] = h.energies;
    let g = h.coupling;
    // Single-excitation block [[e1, g], [g, e0]] on (|↓↑⟩, |↑↓⟩).
    let mean = 0.5 * (e0 + e1);
    let half = 0.5 * (e1 - e0);
    let w = (half * half + g * g).sqrt();
    let ph = C::from_polar(1.0, -mean * t);
    let (c, s) = ((w * t).cos(), (w * t).sin());
    let (dz, dx) = if w > 0.0 { (half / w, g / w) } else { (0.0, 0.0) };
    let i = C::new(0.0, 1.0);
    let m11 = ph * (c - i * s * dz);
    let m22 = ph * (c + i * s * dz);
    let m12 = ph * (-i * s * dx);
    let z = C::new(0.0, 0.0);
    let u = Matrix4::new(
        C::new(1.0, 0.0), z, z, z,
        z, m11, m12, z,
        z, m12, m22, z,
        z, z, z, C::from_polar(1.0, -(e0 + e1) * t),
    );
    let s_ideal = ideal();
    let population_distance = u
        .iter()
        .zip(s_ideal.iter())
        .map(|(a, b)| (a.norm_sqr() - b.norm_sqr()).abs())
        .fold(0.0, f64::max);
    let conditional_phase = (invariant(&u) / invariant(&s_ideal)).arg();
    let u2 = u * u;
    SqrtSwapGate {
        unitary: u,
        duration: t,
        population_distance,
        conditional_phase,
        double_swap_population: u2[(2, 1)].norm_sqr(),
        mismatch: h.mismatch(),
    }
}
