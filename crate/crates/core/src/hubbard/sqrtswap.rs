use serde::Serialize;

use crate::couplings::ModeCouplingTable;
use crate::error::{Error, Result};

/// Effective two-qubit exchange Hamiltonian from eliminating the empty
/// oscillator modes of |2⟩ (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SqrtSwapHamiltonian {
    /// Exchange coupling g multiplying σ₊σ′₋ + h.c.
    pub coupling: f64,
    /// Shifted site energies Δ̄ + ΣΩ²/(Δ̄ − ω̄) for the two sites.
    pub energies: [f64; 2],
    pub detunings: [f64; 2],
    /// max Ω_1n/|Δ̄ − ω̄_n| over both sites.
    pub validity_ratio: f64,
    /// The same ratio against undressed levels (Q + 3/2)ω.
    pub bare_validity_ratio: f64,
    pub cutoff: usize,
    pub states: u64,
}

impl SqrtSwapHamiltonian {
    /// |energies[0] − energies[1]|.
    pub fn mismatch(&self) -> f64 {
        (self.energies[0] - self.energies[1]).abs()
    }

    /// Population swing rate 2|g|.
    pub fn effective_rabi(&self) -> f64 {
        2.0 * self.coupling.abs()
    }

    /// Duration of the π/2 exchange pulse, π/(4|g|).
    pub fn gate_time(&self) -> f64 {
        std::f64::consts::PI / (4.0 * self.coupling.abs())
    }
}

#[derive(Clone, Copy, Default)]
struct Sums {
    coupling: f64,
    shift: [f64; 2],
    ratio: f64,
    bare_ratio: f64,
    singular: Option<[usize; 3]>,
}

/// Sums the coupling and both shifts over every oscillator state with total
/// quanta ≤ `cutoff`, using symmetrized second-order denominators.
pub fn sqrtswap_effective(
    table: &ModeCouplingTable,
    delta_bar: f64,
    delta_bar_p: f64,
    cutoff: usize,
) -> Result<SqrtSwapHamiltonian> {
    let db = [delta_bar, delta_bar_p];
    let s = table.fold_states(
        cutoff,
        Sums::default(),
        |acc, n| {
            let o = [table.coupling(0, n), table.coupling(1, n)];
            if o[0] == 0.0 && o[1] == 0.0 {
                return;
            }
            let w = table.level(n);
            let wb = (n[0] + n[1] + n[2]) as f64 * table.omega + 1.5 * table.omega;
            let mut inv = [0.0; 2];
            for k in 0..2 {
                let d = db[k] - w;
                if d.abs() <= 10.0 * f64::EPSILON * db[k].abs().max(w.abs()) {
                    acc.singular.get_or_insert(n);
                    return;
                }
                inv[k] = 1.0 / d;
                acc.shift[k] += o[k] * o[k] * inv[k];
                acc.ratio = acc.ratio.max((o[k] * inv[k]).abs());
                acc.bare_ratio = acc.bare_ratio.max((o[k] / (db[k] - wb)).abs());
            }
            acc.coupling += 0.5 * o[0] * o[1] * (inv[0] + inv[1]);
        },
        |a, b| Sums {
            coupling: a.coupling + b.coupling,
            shift: [a.shift[0] + b.shift[0], a.shift[1] + b.shift[1]],
            ratio: a.ratio.max(b.ratio),
            bare_ratio: a.bare_ratio.max(b.bare_ratio),
            singular: a.singular.or(b.singular),
        },
    );
    if let Some(n) = s.singular {
        return Err(Error::Singularity {
            state: format!("oscillator mode {n:?}"),
            detail: "site detuning coincides with the dressed level".into(),
        });
    }
    if s.ratio > 0.1 {
        log::warn!("√SWAP validity ratio {:.3} exceeds 0.1", s.ratio);
    }
    let cutoff = cutoff.min(table.cutoff);
    Ok(SqrtSwapHamiltonian {
        coupling: s.coupling,
        energies: [delta_bar + s.shift[0], delta_bar_p + s.shift[1]],
        detunings: db,
        validity_ratio: s.ratio,
        bare_validity_ratio: s.bare_ratio,
        cutoff,
        states: crate::modes::cumulative_state_count(cutoff as u64),
    })
}

/// Adjusts Δ̄′ by a secant iteration so both shifted site energies agree,
/// with Δ̄ fixed. Stops when the mismatch is below `rel_tol`·|g|.
pub fn balance_detunings(
    table: &ModeCouplingTable,
    delta_bar: f64,
    cutoff: usize,
    rel_tol: f64,
) -> Result<SqrtSwapHamiltonian> {
    let residual = |dp: f64| -> Result<(f64, SqrtSwapHamiltonian)> {
        let h = sqrtswap_effective(table, delta_bar, dp, cutoff)?;
        Ok((h.energies[1] - h.energies[0], h))
    };
    let mut x0 = delta_bar;
    let (mut f0, mut h) = residual(x0)?;
    if f0.abs() <= rel_tol * h.coupling.abs() {
        return Ok(h);
    }
    let mut x1 = x0 - f0;
    for _ in 0..50 {
        let (f1, h1) = residual(x1)?;
        h = h1;
        if f1.abs() <= rel_tol * h.coupling.abs() {
            return Ok(h);
        }
        if f1 == f0 {
            break;
        }
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        x0 = x1;
        f0 = f1;
        x1 = x2;
    }
    Err(Error::numerical(format!(
        "detuning balance did not converge; mismatch {:e} rad/s vs coupling {:e}",
        h.mismatch(),
        h.coupling
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomdata::{AtomSpecies, InternalState};
    use crate::couplings::ho_mode_couplings;
    use crate::modes::{solve_thomas_fermi, solve_wannier};
    use crate::optics::{Axis, TrapConfig};
    use nalgebra::{DMatrix, SymmetricEigen};

    const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

    fn table(drive: f64, cutoff: usize) -> ModeCouplingTable {
        let cfg = TrapConfig::reference();
        let spec = cfg.lattice_spec(Axis::X, &InternalState::ket1()).unwrap();
        let rb = AtomSpecies::rubidium87();
        let w = solve_wannier(spec.depth, spec.k_eff, rb.mass).unwrap();
        let tf = solve_thomas_fermi(7e5, &rb, 0, TWO_PI * 100.0).unwrap();
        let s = [4.5 * w.spacing; 3];
        ho_mode_couplings(&w, [s, s.map(|x| -x)], drive, TWO_PI * 100.0, rb.mass, cutoff, &tf, rb.contact_coupling(0, 2)).unwrap()
    }

    #[test]
    fn zero_drive_decouples() {
        let t = table(0.0, 20);
        let h = sqrtswap_effective(&t, 19430.0, 19430.0, 20).unwrap();
        assert_eq!(h.coupling, 0.0);
        assert_eq!(h.energies, [19430.0, 19430.0]);
        assert_eq!(h.validity_ratio, 0.0);
    }

    #[test]
    fn matches_exact_single_excitation_spectrum() {
        // Two site levels coupled to every oscillator mode with Q ≤ 6; the
        // splitting of the two levels near Δ̄ is 2|g| at resonance.
        let cutoff = 6;
        let t = table(1.0, cutoff);
        let db = 19430.0;
        let h = sqrtswap_effective(&t, db, db, cutoff).unwrap();
        assert!(h.validity_ratio < 1e-3);
        assert!(h.mismatch() <= 1e-9 * h.coupling.abs());

        let mut modes = Vec::new();
        for q in 0..=cutoff {
            for nx in 0..=q {
                for ny in 0..=q - nx {
                    modes.push([nx, ny, q - nx - ny]);
                }
            }
        }
        let dim = modes.len() + 2;
        let mut m = DMatrix::zeros(dim, dim);
        // Energies measured from Δ̄ to keep the tiny shifts resolvable.
        for (i, &n) in modes.iter().enumerate() {
            m[(i + 2, i + 2)] = t.level(n) - db;
            for k in 0..2 {
                m[(k, i + 2)] = -t.coupling(k, n);
                m[(i + 2, k)] = -t.coupling(k, n);
            }
        }
        let eig = SymmetricEigen::new(m);
        let mut near: Vec<f64> = eig.eigenvalues.iter().copied().filter(|e| e.abs() < 0.5 * t.omega).collect();
        near.sort_by(f64::total_cmp);
        assert_eq!(near.len(), 2);
        let split = near[1] - near[0];
        assert!((split / h.effective_rabi() - 1.0).abs() < 1e-4, "{split} vs {}", h.effective_rabi());
        let mean = db + 0.5 * (near[0] + near[1]);
        assert!((mean - h.energies[0]).abs() < 1e-4 * (h.energies[0] - db).abs(), "{mean} vs {}", h.energies[0]);
    }

    #[test]
    fn balancing_removes_the_mismatch() {
        let t = table(1.0, 20);
        let h0 = sqrtswap_effective(&t, 19430.0, 19000.0, 20).unwrap();
        assert!(h0.mismatch() > 100.0);
        let h = balance_detunings(&t, 19430.0, 20, 1e-6).unwrap();
        assert!(h.mismatch() <= 1e-6 * h.coupling.abs());
        assert_eq!(h.detunings[0], 19430.0);
    }

    #[test]
    fn resonant_detuning_is_singular() {
        let t = table(1.0, 4);
        let w = t.level([0, 0, 0]);
        assert!(matches!(sqrtswap_effective(&t, w, 19430.0, 4), Err(Error::Singularity { .. })));
    }
}
