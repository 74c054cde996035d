//! Atom-loss combinatorics, the lifetime budget and first-order sensitivity
//! propagation for shot noise and control-field noise.

use num_rational::Ratio;
use serde::Serialize;

use crate::atomdata::{condensation_temperature, zeeman_splitting, AtomSpecies, InternalState, HBAR, TWO_PI};
use crate::couplings::ModeCouplingTable;
use crate::error::{Error, Result};
use crate::gates::{josephson_meanfield, MeanFieldCnotConfig, MeanFieldState, TwoModeParams};
use crate::hubbard::{josephson_couplings, sqrtswap_effective};
use crate::optics::{detunings, lattice_depth, lattice_depth_by_line, Axis, TrapConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LossMode {
    /// 1 − P(N−η, m)/P(N, m), with P(a, m) = a!/(a−m)!.
    Full,
    /// 1 − (1 − η/N)^m.
    Approx,
}

/// N condensate-ensemble atoms, m of them stored in lattice sites, η lost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LossModel {
    pub n: u64,
    pub m: u64,
    pub eta: u64,
}

impl LossModel {
    pub fn new(n: u64, m: u64, eta: u64) -> Result<Self> {
        if eta >= n {
            return Err(Error::domain(format!("loss count η = {eta} must be below N = {n}")));
        }
        if m > n {
            return Err(Error::domain(format!("qubit count m = {m} exceeds N = {n}")));
        }
        Ok(LossModel { n, m, eta })
    }

    pub fn probability(&self, mode: LossMode) -> f64 {
        let (n, m, eta) = (self.n as f64, self.m, self.eta as f64);
        if m == 0 || self.eta == 0 {
            return 0.0;
        }
        match mode {
            LossMode::Full => {
                if self.m > self.n - self.eta {
                    return 1.0;
                }
                // ln Π_j (1 − η/(N − j)), summed with ln_1p to keep tiny
                // probabilities accurate.
                let ln_survive: f64 = (0..m).map(|j| (-eta / (n - j as f64)).ln_1p()).sum();
                -ln_survive.exp_m1()
            }
            LossMode::Approx => -(m as f64 * (-eta / n).ln_1p()).exp_m1(),
        }
    }
}

/// Probability that at least one of η lost atoms held lattice information.
pub fn loss_probability(n: u64, m: u64, eta: u64, mode: LossMode) -> Result<f64> {
    Ok(LossModel::new(n, m, eta)?.probability(mode))
}

pub const BRUTEFORCE_MAX_N: u64 = 10;

/// Exact loss probability by enumerating every ordered assignment of m
/// distinct atoms to the m excited sites and counting those that use any of
/// the atoms in `lost` (a bit mask over 0..n).
pub fn loss_bruteforce_subset(n: u64, m: u64, lost: u32) -> Result<Ratio<u64>> {
    if n > BRUTEFORCE_MAX_N {
        return Err(Error::Capability(format!("enumeration is limited to N ≤ {BRUTEFORCE_MAX_N}, got {n}")));
    }
    if m > n {
        return Err(Error::domain(format!("qubit count m = {m} exceeds N = {n}")));
    }
    fn walk(n: u64, left: u64, used: u32, lost: u32, hit: &mut u64, total: &mut u64) {
        if left == 0 {
            *total += 1;
            if used & lost != 0 {
                *hit += 1;
            }
            return;
        }
        for a in 0..n {
            let bit = 1u32 << a;
            if used & bit == 0 {
                walk(n, left - 1, used | bit, lost, hit, total);
            }
        }
    }
    let (mut hit, mut total) = (0u64, 0u64);
    walk(n, m, 0, lost, &mut hit, &mut total);
    Ok(Ratio::new(hit, total))
}

/// [`loss_bruteforce_subset`] with the first η atoms lost.
pub fn loss_bruteforce_oracle(n: u64, m: u64, eta: u64) -> Result<Ratio<u64>> {
    if eta >= n && n <= BRUTEFORCE_MAX_N {
        return Err(Error::domain(format!("loss count η = {eta} must be below N = {n}")));
    }
    loss_bruteforce_subset(n, m, ((1u64 << eta.min(31)) - 1) as u32)
}

/// Rows (η, P_full, P_approx) over a log-spaced η grid, starting with η = 0.
pub fn loss_curve(n: u64, m: u64, points: usize) -> Result<Vec<(u64, f64, f64)>> {
    let mut etas = vec![0u64];
    let hi = ((n - 1) as f64).ln();
    for i in 0..points {
        let e = (hi * i as f64 / (points.max(2) - 1) as f64).exp().round() as u64;
        if e > *etas.last().unwrap_or(&0) && e < n {
            etas.push(e);
        }
    }
    etas.into_iter()
        .map(|eta| {
            let l = LossModel::new(n, m, eta)?;
            Ok((eta, l.probability(LossMode::Full), l.probability(LossMode::Approx)))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LossChannel {
    pub name: String,
    /// 1/e lifetime (s).
    pub lifetime: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LifetimeBudget {
    pub channels: Vec<LossChannel>,
}

impl LifetimeBudget {
    pub fn combined_rate(&self) -> f64 {
        self.channels.iter().map(|c| 1.0 / c.lifetime).sum()
    }

    pub fn combined_lifetime(&self) -> f64 {
        1.0 / self.combined_rate()
    }
}

/// Lifetimes (s) for the channels that are taken as given rather than
/// computed from the trap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExternalLifetimes {
    pub momentum_diffusion: f64,
    pub background: f64,
    pub three_body: f64,
}

impl Default for ExternalLifetimes {
    fn default() -> Self {
        ExternalLifetimes { momentum_diffusion: 4.99, background: 5.0, three_body: 18.3 }
    }
}

/// Photon-scattering rate (1/s) of a lattice atom in |1⟩: Σ over the D lines
/// of (Γᵢ/|Δᵢ|)·Vᵢ, with Vᵢ the line's share of the peak-to-trough depth of
/// one lattice pair.
pub fn lattice_scattering_rate(cfg: &TrapConfig) -> Result<f64> {
    let pair = cfg
        .lattice
        .iter()
        .find(|p| p.axis == Axis::X)
        .ok_or_else(|| Error::Config("no lattice pair along X".into()))?;
    let depth = lattice_depth_by_line(&cfg.species, pair, &InternalState::ket1(), cfg.b_field, cfg.prefactor)?;
    let d = detunings(&cfg.species, pair.wavelength);
    let gamma = [cfg.species.d1.gamma, cfg.species.d2.gamma];
    Ok((0..2).map(|i| gamma[i] / d[i].abs() * depth[i]).sum())
}

pub fn lifetime_budget(cfg: &TrapConfig, external: ExternalLifetimes) -> Result<LifetimeBudget> {
    let rate = lattice_scattering_rate(cfg)?;
    if !(rate > 0.0) {
        return Err(Error::domain("lattice scattering rate vanishes; check the lattice power"));
    }
    for (name, t) in [
        ("momentum diffusion", external.momentum_diffusion),
        ("background", external.background),
        ("three-body", external.three_body),
    ] {
        if !(t > 0.0) {
            return Err(Error::domain(format!("{name} lifetime must be positive, got {t}")));
        }
    }
    Ok(LifetimeBudget {
        channels: vec![
            LossChannel { name: "lattice photon scattering".into(), lifetime: 1.0 / rate },
            LossChannel { name: "lattice momentum diffusion".into(), lifetime: external.momentum_diffusion },
            LossChannel { name: "background collisions".into(), lifetime: external.background },
            LossChannel { name: "three-body".into(), lifetime: external.three_body },
        ],
    })
}

/// Central difference (f(x+h) − f(x−h))/2h.
pub fn central_difference<F: Fn(f64) -> Result<f64>>(f: F, x: f64, h: f64) -> Result<f64> {
    let d = (f(x + h)? - f(x - h)?) / (2.0 * h);
    if !d.is_finite() {
        return Err(Error::numerical(format!("finite difference at x = {x:e}, h = {h:e} is not finite")));
    }
    Ok(d)
}

/// Largest change |f(x ± δ) − f(x)|. Equals |f′|δ to first order, and stays
/// meaningful where f′ vanishes.
pub fn excursion<F: Fn(f64) -> Result<f64>>(f: F, x: f64, delta: f64) -> Result<f64> {
    let f0 = f(x)?;
    let e = (f(x + delta)? - f0).abs().max((f(x - delta)? - f0).abs());
    if !e.is_finite() {
        return Err(Error::numerical(format!("excursion at x = {x:e} is not finite")));
    }
    Ok(e)
}

/// Single-site qubit transition frequency Δ + (U₀₁ − U₀₀)(N₀ − 1): the
/// diagonal difference between |N₀−1, 1⟩ and |N₀, 0⟩.
pub fn qubit_transition(u: &[[f64; 3]; 3], n0: f64, delta: f64) -> f64 {
    delta + (u[0][1] - u[0][0]) * (n0 - 1.0)
}

/// Collective single-qubit Rabi frequency √N₀·Ω₀₁.
pub fn collective_rabi(omega01: f64, n0: f64) -> f64 {
    n0.sqrt() * omega01
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityRow {
    pub parameter: String,
    pub nominal: f64,
    pub uncertainty: f64,
    pub parameter_unit: String,
    pub quantity: String,
    pub propagated: f64,
    pub unit: String,
    /// How the number was obtained.
    pub path: String,
    /// Quoted comparison value, when one exists.
    pub reference: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityReport {
    pub rows: Vec<SensitivityRow>,
}

impl SensitivityReport {
    pub fn find(&self, quantity: &str) -> Option<&SensitivityRow> {
        self.rows.iter().find(|r| r.quantity == quantity)
    }
}

/// √SWAP inputs for the shot-noise rows.
#[derive(Debug, Clone)]
pub struct SwapSensitivity<'a> {
    pub table: &'a ModeCouplingTable,
    /// Bare two-photon detuning Δ (rad/s); Δ̄ = Δ + U₀₁N.
    pub delta: f64,
    /// U₀₁ at the √SWAP sites (rad/s).
    pub u01: f64,
    pub cutoff: usize,
}

#[derive(Debug, Clone)]
pub struct SensitivityInputs<'a> {
    pub species: AtomSpecies,
    pub trap: TrapConfig,
    pub n: f64,
    /// Interaction matrix at the qubit nearest the trap centre (rad/s).
    pub u: [[f64; 3]; 3],
    /// √N₀Ω₀₁ at N₀ = N (rad/s).
    pub single_qubit_rate: f64,
    pub b_uncertainty: f64,
    pub theta_uncertainty: f64,
    /// Lattice intensity noise (W/m²).
    pub intensity_uncertainty: f64,
    /// Ω₀₂ used to prepare the N/5 split (rad/s).
    pub omega02: f64,
    pub cnot: Option<MeanFieldCnotConfig>,
    pub swap: Option<SwapSensitivity<'a>>,
    /// Site position (m), TF radius (m) and lattice drift (m) for the η_FC row.
    pub drift: Option<([f64; 3], f64, f64)>,
}

impl<'a> SensitivityInputs<'a> {
    pub fn reference(u: [[f64; 3]; 3]) -> Self {
        SensitivityInputs {
            species: AtomSpecies::rubidium87(),
            trap: TrapConfig::reference(),
            n: 7e5,
            u,
            single_qubit_rate: TWO_PI * 100.0,
            b_uncertainty: 4.3e-9,
            theta_uncertainty: std::f64::consts::PI / 150.0,
            intensity_uncertainty: 312e-3 * 1e4,
            omega02: 1e3,
            cnot: None,
            swap: None,
            drift: None,
        }
    }
}

fn row(parameter: &str, nominal: f64, uncertainty: f64, punit: &str, quantity: &str, propagated: f64, unit: &str, path: &str, reference: Option<f64>) -> SensitivityRow {
    SensitivityRow {
        parameter: parameter.into(),
        nominal,
        uncertainty,
        parameter_unit: punit.into(),
        quantity: quantity.into(),
        propagated,
        unit: unit.into(),
        path: path.into(),
        reference,
    }
}

/// Zero-point energy ½ω_site of a |1⟩ site (rad/s) for the lattice along X
/// with polarization angle `theta` and intensity scaled by `scale`.
fn site_zero_point(trap: &TrapConfig, theta: f64, scale: f64) -> Result<f64> {
    let mut pair = trap
        .lattice
        .iter()
        .find(|p| p.axis == Axis::X)
        .cloned()
        .ok_or_else(|| Error::Config("no lattice pair along X".into()))?;
    pair.theta = theta;
    pair.power *= scale;
    let v0 = lattice_depth(&trap.species, &pair, &InternalState::ket1(), trap.b_field, trap.prefactor)?;
    let k = pair.geometry()?.k_eff;
    let recoil = HBAR * k * k / (2.0 * trap.species.mass);
    Ok((v0 * recoil).sqrt())
}

pub fn sensitivity_report(inp: &SensitivityInputs) -> Result<SensitivityReport> {
    let n = inp.n;
    let dn = n.sqrt();
    let mut rows = Vec::new();

    let omega01 = inp.single_qubit_rate / n.sqrt();
    let rabi = excursion(|x| Ok(collective_rabi(omega01, x)), n, dn)?;
    rows.push(row("N", n, dn, "atoms", "single-qubit Rabi frequency", rabi, "rad/s", "√N₀·Ω₀₁ at N₀ = N ± √N", Some(0.376)));

    let trans = excursion(|x| Ok(qubit_transition(&inp.u, x, 0.0)), n, dn)?;
    rows.push(row("N", n, dn, "atoms", "qubit transition frequency (shot noise)", trans, "rad/s", "Δ + (U₀₁ − U₀₀)(N₀ − 1) at N₀ = N ± √N", Some(28.7)));

    let b0 = inp.trap.b_field.iter().map(|b| b * b).sum::<f64>().sqrt();
    let zee = |b: f64| zeeman_splitting(&inp.species, b, &InternalState::ket0(), &InternalState::ket1());
    let db = excursion(zee, b0, inp.b_uncertainty)?;
    rows.push(row("B", b0, inp.b_uncertainty, "T", "qubit Zeeman frequency", db, "Hz", "linear Zeeman |0⟩ → |1⟩", Some(30.0)));

    let theta0 = inp.trap.lattice[0].theta;
    let dtheta = excursion(|t| site_zero_point(&inp.trap, t, 1.0), theta0, inp.theta_uncertainty)?;
    rows.push(row("θ", theta0, inp.theta_uncertainty, "rad", "qubit transition frequency (polarization)", dtheta, "rad/s", "½ω_site with ω_site = 2√(V₀E_R), V₀(θ)", Some(11.2)));

    let pair = &inp.trap.lattice[0];
    let i_peak = pair.peak_intensity();
    let rel = inp.intensity_uncertainty / i_peak;
    let dint = excursion(|s| site_zero_point(&inp.trap, theta0, s), 1.0, rel)?;
    rows.push(row("lattice intensity", i_peak, inp.intensity_uncertainty, "W/m²", "qubit transition frequency (intensity)", dint, "rad/s", "½ω_site with V₀ ∝ I", Some(28.0)));

    let tc = |x: f64| condensation_temperature(x, TWO_PI * 100.0);
    let drop = 1.0 - tc(0.2 * n)? / tc(n)?;
    rows.push(row("N₀", n, 0.8 * n, "atoms", "condensation temperature drop", drop, "fraction", "T_c ∝ N^{1/3} at N → N/5", Some(0.415)));

    // Preparation of the N/5 split by an Ω₀₂ rotation at fixed duration.
    let prep = |x: f64| -> Result<TwoModeParams> { Ok(TwoModeParams::from_interactions(&inp.u, x, -inp.omega02, [0.0; 2], true)) };
    let start = MeanFieldState::new(1.0, 0.0);
    let t_prep = crate::gates::first_crossing(&prep(n)?, start, -0.6, 4.0 * std::f64::consts::PI / inp.omega02)?
        .ok_or_else(|| Error::numerical("Ω₀₂ rotation never reaches the N/5 split"))?;
    let frac = |x: f64| -> Result<f64> { Ok(0.5 * (1.0 + josephson_meanfield(&prep(x)?, start, &[t_prep])?[0].z)) };
    let dprep = excursion(frac, n, dn)?;
    rows.push(row("N", n, dn, "atoms", "CNOT initial fraction N₀/N", dprep, "fraction", "mean-field Ω₀₂ rotation at fixed duration", Some(2.11e-7)));

    if let Some(c) = &inp.cnot {
        let nominal = crate::gates::run_cnot_meanfield(&inp.u, c)?;
        let t_step = nominal.bec_step;
        let frac = |x: f64| -> Result<f64> {
            let k = josephson_couplings(&inp.u, x, 0.2 * x, c.delta, c.omega)?;
            let p = TwoModeParams::from_interactions(&inp.u, x, k.j0, [0.0; 2], true);
            let init = MeanFieldState::new(-0.6, -p.j.signum() * -std::f64::consts::FRAC_PI_2);
            Ok(0.5 * (1.0 + josephson_meanfield(&p, init, &[t_step])?[0].z))
        };
        let d = excursion(frac, n, dn)?;
        rows.push(row("N", n, dn, "atoms", "CNOT step fraction N₀/N", d, "fraction", "mean-field step at the nominal duration", Some(0.0131)));
    }

    if let Some(s) = &inp.swap {
        let shift = excursion(|x| Ok(s.delta + s.u01 * x), n, dn)?;
        rows.push(row("N", n, dn, "atoms", "√SWAP detuning Δ̄", shift, "rad/s", "Δ + U₀₁N", Some(0.03)));
        let g = |x: f64| -> Result<f64> {
            let db = s.delta + s.u01 * x;
            Ok(sqrtswap_effective(s.table, db, db, s.cutoff)?.coupling)
        };
        let g0 = g(n)?;
        let dg = excursion(g, n, dn)? / g0.abs();
        rows.push(row("N", n, dn, "atoms", "√SWAP coupling (relative)", dg, "fraction", "second-order mode sum at Δ̄(N)", Some(1e-4)));
    }

    if let Some((site, radius, drift)) = inp.drift {
        let amp = |dx: f64| -> Result<f64> {
            let r2 = (site[0] + dx).powi(2) + site[1].powi(2) + site[2].powi(2);
            Ok((1.0 - r2 / (radius * radius)).max(0.0).sqrt())
        };
        let a0 = amp(0.0)?;
        if a0 == 0.0 {
            return Err(Error::domain("site lies outside the condensate"));
        }
        let d = excursion(amp, 0.0, drift)? / a0;
        rows.push(row("lattice drift", 0.0, drift, "m", "η_FC (relative)", d, "fraction", "φ(s) ∝ √(1 − r²/R²) at a shifted site", None));
    }

    Ok(SensitivityReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_losses() {
        assert_eq!(loss_probability(100, 10, 0, LossMode::Full).unwrap(), 0.0);
        assert_eq!(loss_probability(100, 0, 5, LossMode::Full).unwrap(), 0.0);
        assert_eq!(loss_probability(100, 0, 5, LossMode::Approx).unwrap(), 0.0);
        assert!(matches!(loss_probability(10, 2, 10, LossMode::Full), Err(Error::Domain(_))));
    }

    #[test]
    fn six_atoms_two_qubits() {
        // 1 − P(4,2)/P(6,2) = 1 − 12/30.
        let p = loss_probability(6, 2, 2, LossMode::Full).unwrap();
        assert!((p - 0.6).abs() < 1e-15);
        assert_eq!(loss_bruteforce_oracle(6, 2, 2).unwrap(), Ratio::new(3, 5));
    }

    #[test]
    fn oracle_matches_exhaustively() {
        for n in 1..=8u64 {
            for m in 0..=n {
                for eta in 0..n {
                    let exact = loss_bruteforce_oracle(n, m, eta).unwrap();
                    let full = loss_probability(n, m, eta, LossMode::Full).unwrap();
                    let e = *exact.numer() as f64 / *exact.denom() as f64;
                    assert!((full - e).abs() < 1e-13, "N={n} m={m} η={eta}: {full} vs {exact}");
                }
            }
        }
    }

    #[test]
    fn oracle_ignores_which_atoms_are_lost() {
        let base = loss_bruteforce_subset(7, 3, 0b11).unwrap();
        for mask in [0b101u32, 0b1000001, 0b110000, 0b10010] {
            assert_eq!(loss_bruteforce_subset(7, 3, mask).unwrap(), base);
        }
    }

    #[test]
    fn every_atom_stored() {
        assert_eq!(loss_bruteforce_oracle(5, 5, 1).unwrap(), Ratio::from_integer(1));
        assert_eq!(loss_probability(5, 5, 1, LossMode::Full).unwrap(), 1.0);
        assert!(matches!(loss_bruteforce_oracle(11, 2, 1), Err(Error::Capability(_))));
    }

    #[test]
    fn approx_closed_form() {
        let p = loss_probability(700_000, 1000, 700, LossMode::Approx).unwrap();
        let want = 1.0 - (1000.0 * (1.0 - 1e-3f64).ln()).exp();
        assert!((p - want).abs() < 1e-12);
        assert!((p - 0.632).abs() < 1e-3);
    }

    #[test]
    fn loss_curve_starts_at_zero() {
        let c = loss_curve(700_000, 1000, 40).unwrap();
        assert_eq!(c[0], (0, 0.0, 0.0));
        assert!(c.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 >= w[0].1));
    }

    #[test]
    fn scattering_lifetime() {
        let cfg = TrapConfig::reference();
        let b = lifetime_budget(&cfg, ExternalLifetimes::default()).unwrap();
        let t = b.channels[0].lifetime;
        assert!((t / 0.522 - 1.0).abs() < 0.2, "{t}");
        let rates: f64 = b.channels.iter().map(|c| 1.0 / c.lifetime).sum();
        assert!((b.combined_rate() - rates).abs() < 1e-15);
        // Four quoted lifetimes in parallel.
        let quoted: f64 = 1.0 / (1.0 / 0.522 + 1.0 / 4.99 + 1.0 / 5.0 + 1.0 / 18.3);
        assert!((quoted - 0.43).abs() < 0.01);
    }

    #[test]
    fn halving_intensity_doubles_scattering_lifetime() {
        let cfg = TrapConfig::reference();
        let mut half = cfg.clone();
        for p in half.lattice.iter_mut() {
            p.power *= 0.5;
        }
        let a = lifetime_budget(&cfg, ExternalLifetimes::default()).unwrap().channels[0].lifetime;
        let b = lifetime_budget(&half, ExternalLifetimes::default()).unwrap().channels[0].lifetime;
        assert!((b / a - 2.0).abs() < 1e-12);
    }

    #[test]
    fn transition_matches_fock_diagonal() {
        use crate::hubbard::{fock_energy, Drives, FockState};
        let u = [[0.0197, 0.0342, 0.0193], [0.0342, 13.0e3, 0.0332], [0.0193, 0.0332, 0.0184]];
        let d = Drives::single_site(0.0, 0.0, 0.0, 125.0);
        for n0 in [5u32, 100, 70_000] {
            let e = fock_energy(&u, &d, &FockState::new(n0 - 1, 1, 0)) - fock_energy(&u, &d, &FockState::new(n0, 0, 0));
            let want = qubit_transition(&u, n0 as f64, 125.0);
            assert!((e - want).abs() < 1e-9 * want.abs().max(1.0), "{e} vs {want}");
        }
    }

    #[test]
    fn rabi_derivative_matches_sqrt_scaling() {
        let (om, n0) = (0.75f64, 7e5f64);
        let fd = central_difference(|x| Ok(collective_rabi(om, x)), n0, n0.sqrt()).unwrap();
        let exact = collective_rabi(om, n0) / (2.0 * n0);
        assert!((fd / exact - 1.0).abs() < 1e-4);
    }

    #[test]
    fn reference_report() {
        let u = [[0.0197, 0.0342, 0.0193], [0.0342, 13.0e3, 0.0332], [0.0193, 0.0332, 0.0184]];
        let r = sensitivity_report(&SensitivityInputs::reference(u)).unwrap();
        let get = |q: &str| r.find(q).unwrap().propagated;
        assert!((get("single-qubit Rabi frequency") - 0.3755).abs() < 1e-3);
        assert!((get("qubit Zeeman frequency") / 30.0 - 1.0).abs() < 0.15);
        assert!((get("qubit transition frequency (shot noise)") - 0.0145 * 7e5f64.sqrt()).abs() < 1e-6);
        assert!((get("condensation temperature drop") - (1.0 - 0.2f64.cbrt())).abs() < 1e-12);
        for row in &r.rows {
            assert!(row.propagated >= 0.0);
            assert!(!row.unit.is_empty());
        }
    }
}
