use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::roots::{brent, sign_changes};

/// A denominator of the form s·Δ + c + n₀·k (rad/s).
#[derive(Debug, Clone, Copy, PartialEq)]
struct Denominator {
    sign: f64,
    constant: f64,
    per_n0: f64,
    weight: f64,
}

impl Denominator {
    fn at(&self, delta: f64, n0: Option<f64>) -> f64 {
        self.sign * delta + self.constant + n0.map_or(0.0, |n| n * self.per_n0)
    }

    /// Δ where the n₀-free form vanishes.
    fn pole(&self) -> f64 {
        -self.constant / self.sign
    }
}

/// Denominators of the σ₁ = 0 hop amplitude, weights relative to Ω².
fn j0_terms(u: &[[f64; 3]; 3], n: f64) -> [Denominator; 2] {
    let (u00, u01, u02, u12, u22) = (u[0][0], u[0][1], u[0][2], u[1][2], u[2][2]);
    [
        Denominator { sign: -1.0, constant: (n - 1.0) * (u02 - u12), per_n0: u00 - u01 - u02 + u12, weight: 0.5 },
        Denominator { sign: -1.0, constant: (n - 1.0) * (u22 - u12), per_n0: u02 - u01 - u22 + u12, weight: 0.5 },
    ]
}

/// Denominators of the σ₁ = 1 hop amplitude: two paths through a doubly
/// occupied site and two through an empty one.
fn j1_terms(u: &[[f64; 3]; 3], n: f64) -> [Denominator; 4] {
    let (u00, u01, u02, u11, u12, u22) = (u[0][0], u[0][1], u[0][2], u[1][1], u[1][2], u[2][2]);
    let h = 0.5 * n;
    [
        Denominator {
            sign: -1.0,
            constant: h * (u00 - u01 + u02 - u12) + u01 - u02 - u11 + u12,
            per_n0: -(u00 - u01 - u02 + u12),
            weight: 1.0,
        },
        Denominator {
            sign: -1.0,
            constant: h * (-u01 + u02 - u12 + u22) - u11 - u22 + 2.0 * u12,
            per_n0: -(u02 - u01 - u22 + u12),
            weight: 1.0,
        },
        Denominator { sign: 1.0, constant: h * (-u00 + u01 - u02 + u12), per_n0: u00 - u01 - u02 + u12, weight: 0.5 },
        Denominator {
            sign: 1.0,
            constant: h * (u01 - u02 + u12 - u22) + u01 - u02 - u12 + u22,
            per_n0: u02 - u01 - u22 + u12,
            weight: 0.5,
        },
    ]
}

fn sum_terms(terms: &[Denominator], delta: f64, n0: Option<f64>, omega: f64) -> Result<f64> {
    let mut s = 0.0;
    for (k, t) in terms.iter().enumerate() {
        let d = t.at(delta, n0);
        let scale = delta.abs().max(t.constant.abs());
        if d.abs() <= super::DEGENERACY_EPS * scale {
            return Err(Error::Singularity {
                state: format!("denominator {k}"),
                detail: format!("vanishes at Δ = {delta:e} rad/s"),
            });
        }
        s += t.weight * omega * omega / d;
    }
    Ok(s)
}

/// Two-photon hop amplitudes for both control states. Each is the
/// coefficient of √((n₀+1)n₂) in the effective matrix element (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EffectiveCoupling {
    pub j0: f64,
    pub j1: f64,
    /// Same amplitudes keeping the n₀-dependent denominator terms, at `n0`.
    pub j0_at_n0: f64,
    pub j1_at_n0: f64,
    pub delta: f64,
    pub n: f64,
    pub n0: f64,
    /// Ω√N/|Δ|.
    pub validity_ratio: f64,
}

/// Evaluates the J₀ (two-term) and J₁ (four-term) closed forms with N the
/// total condensate number, both with and without the n₀ terms.
pub fn josephson_couplings(u: &[[f64; 3]; 3], n: f64, n0: f64, delta: f64, omega: f64) -> Result<EffectiveCoupling> {
    if !(n > 0.0 && n0 >= 0.0 && n0 <= n) {
        return Err(Error::domain(format!("need 0 ≤ n₀ ≤ N, got n₀ = {n0}, N = {n}")));
    }
    let t0 = j0_terms(u, n);
    let t1 = j1_terms(u, n);
    Ok(EffectiveCoupling {
        j0: sum_terms(&t0, delta, None, omega)?,
        j1: sum_terms(&t1, delta, None, omega)?,
        j0_at_n0: sum_terms(&t0, delta, Some(n0), omega)?,
        j1_at_n0: sum_terms(&t1, delta, Some(n0), omega)?,
        delta,
        n,
        n0,
        validity_ratio: omega * n.sqrt() / delta.abs(),
    })
}

/// Largest |n₀·k|/|s·Δ + c| over all six denominators for n₀ in [lo, hi].
pub fn n0_term_ratio(u: &[[f64; 3]; 3], n: f64, delta: f64, n0_range: (f64, f64)) -> f64 {
    let t0 = j0_terms(u, n);
    let t1 = j1_terms(u, n);
    t0.iter()
        .chain(t1.iter())
        .map(|t| {
            let m = n0_range.0.abs().max(n0_range.1.abs());
            (m * t.per_n0).abs() / (t.sign * delta + t.constant).abs()
        })
        .fold(0.0, f64::max)
}

/// Poles of J₀ and J₁ in Δ, ascending.
pub fn josephson_poles(u: &[[f64; 3]; 3], n: f64) -> Vec<f64> {
    let mut p: Vec<f64> = j0_terms(u, n).iter().chain(j1_terms(u, n).iter()).map(|t| t.pole()).collect();
    p.sort_by(f64::total_cmp);
    p
}

/// A detuning where the σ₁ = 1 hop cancels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InterferencePoint {
    pub delta: f64,
    pub j0: f64,
    pub j1: f64,
    /// |J₁/J₀| at `delta`.
    pub ratio: f64,
}

fn j1_of(u: &[[f64; 3]; 3], n: f64, omega: f64) -> impl Fn(f64) -> f64 + '_ {
    let t1 = j1_terms(u, n);
    move |d| t1.iter().map(|t| t.weight * omega * omega / t.at(d, None)).sum()
}

/// Root of J₁(Δ) inside `bracket`, to relative tolerance 1e-10.
pub fn find_interference_detuning(
    u: &[[f64; 3]; 3],
    n: f64,
    omega: f64,
    bracket: (f64, f64),
) -> Result<InterferencePoint> {
    let (a, b) = (bracket.0.min(bracket.1), bracket.0.max(bracket.1));
    if let Some(p) = j1_terms(u, n).iter().map(|t| t.pole()).find(|p| *p >= a && *p <= b) {
        return Err(Error::Singularity {
            state: "J₁".into(),
            detail: format!("pole at Δ = {p:e} rad/s inside [{a:e}, {b:e}]"),
        });
    }
    let delta = brent(j1_of(u, n, omega), a, b, 1e-10)?;
    let c = josephson_couplings(u, n, 0.5 * n, delta, omega)?;
    Ok(InterferencePoint { delta, j0: c.j0, j1: c.j1, ratio: (c.j1 / c.j0).abs() })
}

/// Every zero of J₁ in `range`, found by scanning each pole-free sub-interval.
pub fn interference_detunings(u: &[[f64; 3]; 3], n: f64, omega: f64, range: (f64, f64)) -> Vec<InterferencePoint> {
    let (lo, hi) = (range.0.min(range.1), range.0.max(range.1));
    let mut cuts = vec![lo];
    cuts.extend(josephson_poles(u, n).into_iter().filter(|p| *p > lo && *p < hi));
    cuts.push(hi);
    let f = j1_of(u, n, omega);
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let width = w[1] - w[0];
        // Stay clear of the poles at the interval ends.
        let (a, b) = (w[0] + 1e-9 * width, w[1] - 1e-9 * width);
        for (x0, x1) in sign_changes(&f, a, b, 4000) {
            let (f0, f1) = (f(x0), f(x1));
            // A pole-free interval has no sign flip through infinity, but keep
            // the check cheap and explicit.
            if !(f0.is_finite() && f1.is_finite()) {
                continue;
            }
            if let Ok(p) = find_interference_detuning(u, n, omega, (x0, x1)) {
                out.push(p);
            }
        }
    }
    out
}

/// The zero of J₁ closest to `target` within a decade either side.
pub fn interference_near(u: &[[f64; 3]; 3], n: f64, omega: f64, target: f64) -> Result<InterferencePoint> {
    let range = if target > 0.0 { (0.1 * target, 10.0 * target) } else { (10.0 * target, 0.1 * target) };
    interference_detunings(u, n, omega, range)
        .into_iter()
        .min_by(|a, b| (a.delta - target).abs().total_cmp(&(b.delta - target).abs()))
        .ok_or_else(|| Error::RootNotFound(format!("no J₁ zero within a decade of Δ = {target:e} rad/s")))
}

#[cfg(test)]
mod tests {
    use super::super::basis::{FockBasis, FockState};
    use super::super::hamiltonian::{build_hamiltonian, effective_hamiltonian, Drives};
    use super::*;

    fn rb_u() -> [[f64; 3]; 3] {
        [[0.0197, 0.0342, 0.0193], [0.0342, 13.0e3, 0.0332], [0.0193, 0.0332, 0.0184]]
    }

    #[test]
    fn decouple_at_large_detuning() {
        let u = rb_u();
        let a = josephson_couplings(&u, 7e5, 1.4e5, 1e8, 100.0).unwrap();
        let b = josephson_couplings(&u, 7e5, 1.4e5, 1e9, 100.0).unwrap();
        assert!((a.j0 / b.j0 - 10.0).abs() < 0.01);
        assert!((a.j1 / b.j1 - 10.0).abs() < 0.05);
        assert!(b.j0.abs() < 1e-4);
    }

    #[test]
    fn j0_matches_effective_hamiltonian_element() {
        // σ₁ = 0, two intermediate states; closed form with n₀ terms is exact.
        let u = rb_u();
        let (n0, n2) = (30u32, 50u32);
        let n = (n0 + n2) as f64;
        let (om, delta) = (5.0, 2000.0);
        let a = FockState::new(n0, 0, n2);
        let b = FockState::new(n0 + 1, 0, n2 - 1);
        let basis = FockBasis::neighbourhood(n0 + n2, 1, 2, &[a, b], 1).unwrap();
        let h = build_hamiltonian(&basis, &u, &Drives::single_site(om, om, 0.0, delta)).unwrap();
        let eff = effective_hamiltonian(&h, [0, 0]).unwrap();
        let ia = eff.states.iter().position(|s| *s == a).unwrap();
        let ib = eff.states.iter().position(|s| *s == b).unwrap();
        let elem = eff.matrix[(ia, ib)];
        let c = josephson_couplings(&u, n, n0 as f64, delta, om).unwrap();
        let closed = c.j0_at_n0 * ((n0 + 1) as f64 * n2 as f64).sqrt();
        assert!((elem / closed - 1.0).abs() < 1e-10, "{elem} vs {closed}");
    }

    #[test]
    fn j1_against_effective_hamiltonian_element() {
        let u = rb_u();
        let (n0, n2) = (30u32, 50u32);
        let (om, delta) = (5.0, 2000.0);
        let a = FockState::new(n0, 1, n2);
        let b = FockState::new(n0 + 1, 1, n2 - 1);
        let basis = FockBasis::neighbourhood(n0 + n2 + 1, 1, 2, &[a, b], 1).unwrap();
        let h = build_hamiltonian(&basis, &u, &Drives::single_site(om, om, 0.0, delta)).unwrap();
        let eff = effective_hamiltonian(&h, [1, 0]).unwrap();
        let ia = eff.states.iter().position(|s| *s == a).unwrap();
        let ib = eff.states.iter().position(|s| *s == b).unwrap();
        let elem = eff.matrix[(ia, ib)];
        // The four-term form approximates two of the denominators through N/2;
        // with N = n₀ + n₂ it agrees with the exact element to O(U/Δ).
        let c = josephson_couplings(&u, (n0 + n2) as f64, n0 as f64, delta, om).unwrap();
        let closed = c.j1_at_n0 * ((n0 + 1) as f64 * n2 as f64).sqrt();
        assert!((elem / closed - 1.0).abs() < 1e-4, "{elem} vs {closed}");
    }

    #[test]
    fn sign_flip_of_j1_only() {
        // Idealized U: all equal except U11, so Δ* = U11 − U.
        let mut u = [[0.05; 3]; 3];
        u[1][1] = 1000.0;
        let p = find_interference_detuning(&u, 20.0, 1.0, (500.0, 1500.0)).unwrap();
        assert!((p.delta - (1000.0 - 0.05)).abs() < 1e-6);
        assert!(p.ratio < 1e-3);
        let lo = josephson_couplings(&u, 20.0, 10.0, 0.9 * p.delta, 1.0).unwrap();
        let hi = josephson_couplings(&u, 20.0, 10.0, 1.1 * p.delta, 1.0).unwrap();
        assert!(lo.j1.signum() != hi.j1.signum());
        assert_eq!(lo.j0.signum(), hi.j0.signum());
    }

    #[test]
    fn rubidium_interference_point() {
        let u = rb_u();
        let p = interference_near(&u, 7e5, 2.0 * std::f64::consts::PI * 192.0, 12.9e3).unwrap();
        assert!(p.ratio < 1e-3 && p.j0.abs() > 0.0);
        assert!(p.delta > 1.29e3 && p.delta < 1.29e5, "{}", p.delta);
    }

    #[test]
    fn pole_in_bracket_is_reported() {
        let mut u = [[0.05; 3]; 3];
        u[1][1] = 1000.0;
        // J₁ has a pole at Δ = 0 for this U.
        assert!(matches!(
            find_interference_detuning(&u, 20.0, 1.0, (-10.0, 10.0)),
            Err(Error::Singularity { .. })
        ));
        assert!(matches!(
            find_interference_detuning(&u, 20.0, 1.0, (1.0, 100.0)),
            Err(Error::RootNotFound(_))
        ));
    }
}
