//! Simulation core for a BEC-loaded spin-dependent lattice register.

pub mod atomdata;
pub mod couplings;
pub mod error;
pub mod gates;
pub mod hubbard;
pub mod numerics;
pub mod modes;
pub mod noise;
pub mod optics;

pub use error::{Error, Result};
