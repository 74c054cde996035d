use nalgebra::{Complex, DMatrix, DVector};
use serde::Serialize;

use super::basis::{FockBasis, FockState};
use crate::error::{Error, Result};

/// Largest basis handled with dense matrices.
pub const DENSE_DIMENSION_CAP: usize = 10_000;

/// Drive amplitudes and detunings (rad/s), one entry per lattice site.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Drives {
    pub omega01: [f64; 2],
    pub omega12: [f64; 2],
    pub omega02: f64,
    pub delta: [f64; 2],
}

impl Drives {
    pub fn single_site(omega01: f64, omega12: f64, omega02: f64, delta: f64) -> Self {
        Drives { omega01: [omega01, 0.0], omega12: [omega12, 0.0], omega02, delta: [delta, 0.0] }
    }
}

/// Diagonal energy of a Fock state (rad/s).
pub fn fock_energy(u: &[[f64; 3]; 3], drives: &Drives, s: &FockState) -> f64 {
    let n0 = s.n0 as f64;
    let n2 = s.n2 as f64;
    let mut e = 0.5 * u[0][0] * n0 * (n0 - 1.0) + 0.5 * u[2][2] * n2 * (n2 - 1.0) + u[0][2] * n0 * n2;
    for (site, &sg) in s.sigma.iter().enumerate() {
        let sg = sg as f64;
        e += 0.5 * u[1][1] * sg * (sg - 1.0) + u[0][1] * n0 * sg + u[1][2] * n2 * sg + drives.delta[site] * sg;
    }
    e
}

/// Real symmetric Hamiltonian over a Fock basis. With real drive amplitudes
/// the Hermitian matrix has no imaginary part.
#[derive(Debug, Clone)]
pub struct HamiltonianMatrix {
    pub basis: FockBasis,
    pub matrix: DMatrix<f64>,
    pub u: [[f64; 3]; 3],
    pub drives: Drives,
}

/// Builds H over `basis` from the interaction matrix `u` and the drives.
pub fn build_hamiltonian(basis: &FockBasis, u: &[[f64; 3]; 3], drives: &Drives) -> Result<HamiltonianMatrix> {
    let dim = basis.len();
    if dim > DENSE_DIMENSION_CAP {
        return Err(Error::Capability(format!(
            "basis dimension {dim} exceeds {DENSE_DIMENSION_CAP}; use the effective-Hamiltonian path"
        )));
    }
    if basis.sites == 1 && (drives.omega01[1] != 0.0 || drives.omega12[1] != 0.0 || drives.delta[1] != 0.0) {
        return Err(Error::Config("second-site drives given for a single-site basis".into()));
    }
    let mut h = DMatrix::zeros(dim, dim);
    let mut put = |a: usize, t: FockState, v: f64| {
        if v == 0.0 {
            return;
        }
        if let Some(b) = basis.index_of(&t) {
            h[(a, b)] += v;
            h[(b, a)] += v;
        }
    };
    for (a, s) in basis.states().iter().enumerate() {
        let n0 = s.n0 as f64;
        let n2 = s.n2 as f64;
        // Only "raising" moves are visited, so each pair is filled once.
        for site in 0..basis.sites {
            let sg = s.sigma[site] as f64;
            if s.n0 > 0 {
                let mut t = *s;
                t.n0 -= 1;
                t.sigma[site] += 1;
                put(a, t, -drives.omega01[site] * n0.sqrt() * (sg + 1.0).sqrt());
            }
            if s.n2 > 0 {
                let mut t = *s;
                t.n2 -= 1;
                t.sigma[site] += 1;
                put(a, t, -drives.omega12[site] * n2.sqrt() * (sg + 1.0).sqrt());
            }
        }
        if s.n2 > 0 {
            let t = FockState { n0: s.n0 + 1, n2: s.n2 - 1, ..*s };
            put(a, t, -drives.omega02 * (n0 + 1.0).sqrt() * n2.sqrt());
        }
    }
    for (a, s) in basis.states().iter().enumerate() {
        h[(a, a)] = fock_energy(u, drives, s);
    }
    Ok(HamiltonianMatrix { basis: basis.clone(), matrix: h, u: *u, drives: *drives })
}

impl HamiltonianMatrix {
    /// Submatrix over the given basis indices.
    pub fn restrict(&self, idx: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(idx.len(), idx.len(), |i, j| self.matrix[(idx[i], idx[j])])
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.basis.len()).map(|i| self.matrix[(i, i)]).collect()
    }

    /// ‖H − Hᵀ‖_max.
    pub fn asymmetry(&self) -> f64 {
        let m = &self.matrix;
        (m - m.transpose()).amax()
    }
}

/// Second-order effective Hamiltonian over one lattice-occupation manifold.
#[derive(Debug, Clone)]
pub struct EffectiveHamiltonian {
    pub states: Vec<FockState>,
    pub matrix: DMatrix<f64>,
    /// max |V_am|/|E_a − E_m| over manifold states a and outside states m.
    pub validity_ratio: f64,
}

/// Relative size below which an energy denominator counts as zero.
pub const DEGENERACY_EPS: f64 = 1e3 * f64::EPSILON;

/// Projects `h` onto the manifold with lattice occupations `sigma`:
/// PHP + ½ Σ_m V_am V_mb [1/(E_a − E_m) + 1/(E_b − E_m)], with E the diagonal
/// and V the off-diagonal part of H, and m over all basis states outside the
/// manifold.
pub fn effective_hamiltonian(h: &HamiltonianMatrix, sigma: [u32; 2]) -> Result<EffectiveHamiltonian> {
    let p = h.basis.manifold(sigma);
    if p.is_empty() {
        return Err(Error::Config(format!("no basis states with lattice occupation {sigma:?}")));
    }
    let q: Vec<usize> = (0..h.basis.len()).filter(|i| !p.contains(i)).collect();
    let e = h.diagonal();
    let m = &h.matrix;
    // Inverse denominators for every nonzero coupling, with the degeneracy check.
    let mut inv = DMatrix::zeros(p.len(), q.len());
    let mut ratio = 0.0f64;
    for (i, &a) in p.iter().enumerate() {
        for (k, &mm) in q.iter().enumerate() {
            let v = m[(a, mm)];
            if v == 0.0 {
                continue;
            }
            let de = e[a] - e[mm];
            let scale = e[a].abs().max(e[mm].abs());
            if de.abs() <= DEGENERACY_EPS * scale {
                return Err(Error::Singularity {
                    state: h.basis.state(mm).to_string(),
                    detail: format!("degenerate with {} (E = {:e} rad/s)", h.basis.state(a), e[a]),
                });
            }
            inv[(i, k)] = 1.0 / de;
            ratio = ratio.max((v / de).abs());
        }
    }
    if ratio > 0.1 {
        log::warn!("effective Hamiltonian validity ratio {ratio:.3} exceeds 0.1");
    }
    let mut out = DMatrix::zeros(p.len(), p.len());
    for (i, &a) in p.iter().enumerate() {
        for (j, &b) in p.iter().enumerate().skip(i) {
            let mut s = m[(a, b)];
            for (k, &mm) in q.iter().enumerate() {
                let vv = m[(a, mm)] * m[(mm, b)];
                if vv != 0.0 {
                    s += 0.5 * vv * (inv[(i, k)] + inv[(j, k)]);
                }
            }
            out[(i, j)] = s;
            out[(j, i)] = s;
        }
    }
    Ok(EffectiveHamiltonian { states: p.iter().map(|&i| h.basis.state(i)).collect(), matrix: out, validity_ratio: ratio })
}

/// Cached eigendecomposition for repeated propagation exp(−iHt).
///
/// Uses faer's divide-and-conquer solver: nalgebra's implicit-QR routine
/// occasionally fails to converge on the heavily degenerate spectra these
/// Hamiltonians have, returning a decomposition that does not reproduce H.
#[derive(Debug, Clone)]
pub struct Propagator {
    values: DVector<f64>,
    vectors: DMatrix<f64>,
}

impl Propagator {
    pub fn new(h: &DMatrix<f64>) -> Result<Self> {
        if h.nrows() > DENSE_DIMENSION_CAP {
            return Err(Error::Capability(format!(
                "dimension {} exceeds {DENSE_DIMENSION_CAP}; use the effective-Hamiltonian path",
                h.nrows()
            )));
        }
        if !h.iter().all(|v| v.is_finite()) {
            return Err(Error::numerical("Hamiltonian has non-finite entries"));
        }
        let n = h.nrows();
        let m = faer::Mat::<f64>::from_fn(n, n, |i, j| h[(i, j)]);
        let eig = m.selfadjoint_eigendecomposition(faer::Side::Lower);
        let (s, u) = (eig.s().column_vector(), eig.u());
        Ok(Propagator {
            values: DVector::from_fn(n, |i, _| s.read(i)),
            vectors: DMatrix::from_fn(n, n, |i, j| u.read(i, j)),
        })
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.values
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    /// ψ(t) = V e^{−iEt} Vᵀ ψ₀.
    pub fn evolve(&self, psi0: &[Complex<f64>], t: f64) -> Result<Vec<Complex<f64>>> {
        let v = &self.vectors;
        if psi0.len() != v.nrows() {
            return Err(Error::Config(format!("state length {} vs dimension {}", psi0.len(), v.nrows())));
        }
        let norm: f64 = psi0.iter().map(|c| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::domain(format!("initial state has norm² {norm}")));
        }
        let n = v.nrows();
        let mut coeff = vec![Complex::new(0.0, 0.0); n];
        for (k, c) in coeff.iter_mut().enumerate() {
            let mut s = Complex::new(0.0, 0.0);
            for i in 0..n {
                s += psi0[i] * v[(i, k)];
            }
            *c = s * Complex::from_polar(1.0, -self.values[k] * t);
        }
        Ok((0..n)
            .map(|i| (0..n).fold(Complex::new(0.0, 0.0), |s, k| s + coeff[k] * v[(i, k)]))
            .collect())
    }
}

/// One-shot propagation of `psi0` under `h` for time `t` (s).
pub fn evolve(h: &DMatrix<f64>, psi0: &[Complex<f64>], t: f64) -> Result<Vec<Complex<f64>>> {
    Propagator::new(h)?.evolve(psi0, t)
}

/// Basis vector `i` of dimension `n`.
pub fn unit_state(n: usize, i: usize) -> Vec<Complex<f64>> {
    let mut v = vec![Complex::new(0.0, 0.0); n];
    v[i] = Complex::new(1.0, 0.0);
    v
}

#[cfg(test)]
mod tests {
    use super::super::basis::is_single_move;
    use super::*;

    fn u_test() -> [[f64; 3]; 3] {
        [[0.0197, 0.0342, 0.0193], [0.0342, 13.0e3, 0.0332], [0.0193, 0.0332, 0.0184]]
    }

    #[test]
    fn drive_free_is_diagonal_energy() {
        let b = FockBasis::new(5, 1, 2).unwrap();
        let d = Drives::single_site(0.0, 0.0, 0.0, 321.0);
        let h = build_hamiltonian(&b, &u_test(), &d).unwrap();
        for i in 0..b.len() {
            for j in 0..b.len() {
                if i != j {
                    assert_eq!(h.matrix[(i, j)], 0.0);
                }
            }
            let s = b.state(i);
            let (n0, sg, n2) = (s.n0 as f64, s.sigma[0] as f64, s.n2 as f64);
            let u = u_test();
            let want = 0.5 * u[0][0] * n0 * (n0 - 1.0)
                + 0.5 * u[1][1] * sg * (sg - 1.0)
                + 0.5 * u[2][2] * n2 * (n2 - 1.0)
                + u[0][1] * n0 * sg
                + u[1][2] * n2 * sg
                + u[0][2] * n0 * n2
                + 321.0 * sg;
            assert!((h.matrix[(i, i)] - want).abs() <= 1e-12 * want.abs().max(1.0));
        }
    }

    #[test]
    fn selection_rule_and_symmetry() {
        let b = FockBasis::new(5, 2, 2).unwrap();
        let d = Drives { omega01: [3.0, 1.5], omega12: [2.0, 0.7], omega02: 0.4, delta: [10.0, -4.0] };
        let h = build_hamiltonian(&b, &u_test(), &d).unwrap();
        assert_eq!(h.asymmetry(), 0.0);
        for i in 0..b.len() {
            for j in 0..b.len() {
                if i != j && h.matrix[(i, j)] != 0.0 {
                    assert!(is_single_move(&b.state(i), &b.state(j)));
                }
            }
        }
    }

    #[test]
    fn qubit_block_reduces_to_two_level_form() {
        let (n0, n2) = (40u32, 10u32);
        let down = FockState::new(n0, 0, n2);
        let up = FockState::new(n0 - 1, 1, n2);
        let b = FockBasis::from_states(n0 + n2, 1, 1, vec![down, up]).unwrap();
        let delta = 77.0;
        let om = 2.5;
        let h = build_hamiltonian(&b, &u_test(), &Drives::single_site(om, 0.0, 0.0, delta)).unwrap();
        let u = u_test();
        let offset = h.matrix[(1, 1)] - delta;
        let m = &h.matrix;
        let want00 = (u[0][0] - u[0][1]) * (n0 as f64 - 1.0) + (u[0][2] - u[1][2]) * n2 as f64;
        assert!((m[(0, 0)] - offset - want00).abs() < 1e-9);
        assert!((m[(0, 1)] + (n0 as f64).sqrt() * om).abs() < 1e-12);
    }

    #[test]
    fn zero_drive_effective_is_diagonal_restriction() {
        let b = FockBasis::new(6, 1, 2).unwrap();
        let d = Drives::single_site(0.0, 0.0, 0.0, 50.0);
        let h = build_hamiltonian(&b, &u_test(), &d).unwrap();
        let eff = effective_hamiltonian(&h, [0, 0]).unwrap();
        let p = b.manifold([0, 0]);
        assert_eq!(eff.matrix, h.restrict(&p));
    }

    #[test]
    fn degenerate_intermediate_is_an_error() {
        let b = FockBasis::new(2, 1, 1).unwrap();
        let u = [[0.0; 3]; 3];
        let h = build_hamiltonian(&b, &u, &Drives::single_site(1.0, 1.0, 0.0, 0.0)).unwrap();
        assert!(matches!(effective_hamiltonian(&h, [0, 0]), Err(Error::Singularity { .. })));
    }

    #[test]
    fn diagonal_evolution_keeps_populations() {
        let h = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 5.0, -3.0]));
        let s = 1.0 / 3f64.sqrt();
        let psi = vec![Complex::new(s, 0.0); 3];
        let out = evolve(&h, &psi, 0.37).unwrap();
        for (a, b) in out.iter().zip(&psi) {
            assert!((a.norm_sqr() - b.norm_sqr()).abs() < 1e-14);
        }
    }

    #[test]
    fn two_level_rabi_formula() {
        let (g, d) = (3.0, 4.0);
        let h = DMatrix::from_row_slice(2, 2, &[0.0, -g, -g, d]);
        let prop = Propagator::new(&h).unwrap();
        let om = (4.0 * g * g + d * d).sqrt();
        for &t in &[0.1, 0.7, 2.3, 11.0] {
            let psi = prop.evolve(&unit_state(2, 0), t).unwrap();
            let want = 4.0 * g * g / (om * om) * (0.5 * om * t).sin().powi(2);
            assert!((psi[1].norm_sqr() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn norm_preserved_for_long_times() {
        let b = FockBasis::new(8, 1, 2).unwrap();
        let d = Drives::single_site(200.0, 150.0, 30.0, 2e3);
        let h = build_hamiltonian(&b, &u_test(), &d).unwrap();
        let prop = Propagator::new(&h.matrix).unwrap();
        let psi = prop.evolve(&unit_state(b.len(), 3), 0.1).unwrap();
        let n: f64 = psi.iter().map(|c| c.norm_sqr()).sum();
        assert!((n - 1.0).abs() < 1e-12);
    }

    #[test]
    fn propagator_reconstructs_degenerate_spectrum() {
        // Large blocks of exactly degenerate, uncoupled states next to a
        // weakly split two-photon manifold.
        let mut u = [[0.05; 3]; 3];
        u[1][1] = 1000.0;
        let delta = 999.9499999871698;
        let omega = 0.02 * delta / 20f64.sqrt();
        let basis = FockBasis::new(20, 2, 2).unwrap();
        let d = Drives { omega01: [omega, 0.0], omega12: [omega, 0.0], omega02: 0.0, delta: [delta, 0.0] };
        let h = build_hamiltonian(&basis, &u, &d).unwrap();
        let p = Propagator::new(&h.matrix).unwrap();
        let v = p.eigenvectors();
        let rec = v * DMatrix::from_diagonal(p.eigenvalues()) * v.transpose();
        assert!((rec - &h.matrix).amax() < 1e-9 * h.matrix.amax());
    }

    #[test]
    fn dimension_cap() {
        let h = DMatrix::<f64>::zeros(1, 1);
        assert!(Propagator::new(&h).is_ok());
        assert!(FockBasis::new(200, 2, 1).map(|b| build_hamiltonian(&b, &u_test(), &Drives::default())).is_ok());
        let big = FockBasis::new(1200, 2, 2).unwrap();
        assert!(big.len() > DENSE_DIMENSION_CAP);
        assert!(matches!(build_hamiltonian(&big, &u_test(), &Drives::default()), Err(Error::Capability(_))));
    }
}
