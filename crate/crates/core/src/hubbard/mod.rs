//! Truncated-Fock Bose–Hubbard model: Hamiltonians, exact propagation,
//! second-order effective Hamiltonians, the two-photon Josephson couplings
//! and the oscillator-mediated exchange coupling.

mod basis;
mod hamiltonian;
mod josephson;
mod sqrtswap;

pub use basis::{is_single_move, single_moves, FockBasis, FockState};
pub use hamiltonian::{
    build_hamiltonian, effective_hamiltonian, evolve, fock_energy, unit_state, Drives, EffectiveHamiltonian,
    HamiltonianMatrix, Propagator, DEGENERACY_EPS, DENSE_DIMENSION_CAP,
};
pub use josephson::{
    find_interference_detuning, interference_detunings, interference_near, josephson_couplings, josephson_poles,
    n0_term_ratio, EffectiveCoupling, InterferencePoint,
};
pub use sqrtswap::{balance_detunings, sqrtswap_effective, SqrtSwapHamiltonian};
