//! Single-particle spatial modes: Thomas–Fermi condensate, lattice Wannier
//! functions and 3D harmonic-oscillator eigenstates.

pub mod ho;
pub mod tf;
pub mod wannier;

pub use ho::{cumulative_state_count, hermite_functions, shell_degeneracy, HoEigenstate, MAX_QUANTA};
pub use tf::{solve_thomas_fermi, ThomasFermiState};
pub use wannier::{solve_wannier, BandStructure, SiteGrid, Wannier1D, WannierState};

/// A real, unit-normalized spatial mode with bounded support.
pub trait ModeFunction: Sync {
    fn value(&self, r: [f64; 3]) -> f64;

    /// Axis-aligned box outside which the mode is (numerically) zero.
    fn bounds(&self) -> [[f64; 2]; 3];

    /// Per-axis factor f_a(x) when the mode is a product f_x f_y f_z.
    fn axis_factor(&self, _axis: usize, _x: f64) -> Option<f64> {
        None
    }
}
