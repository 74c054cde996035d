//! Dormand–Prince 5(4) integrator with PI step control.

use crate::error::{Error, Result};

/// Step-size controller settings.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rtol: 1e-9,
            atol: 1e-12,
            max_steps: 2_000_000,
        }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates `y' = f(t, y)` from `t0`, returning the state at each of the
/// (increasing) `outputs` times. Steps are clipped to land on output times.
pub fn dopri5<F>(f: F, t0: f64, y0: &[f64], outputs: &[f64], tol: Tolerance) -> Result<Vec<Vec<f64>>>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let n = y0.len();
    let mut y = y0.to_vec();
    let mut t = t0;
    let mut k = vec![vec![0.0; n]; 7];
    let mut ytmp = vec![0.0; n];
    let mut ynew = vec![0.0; n];
    let mut out = Vec::with_capacity(outputs.len());
    let span = outputs.last().map_or(0.0, |&e| e - t0);
    let mut h = if span > 0.0 { span * 1e-4 } else { 0.0 };
    let mut err_prev: f64 = 1e-4;
    let mut steps = 0usize;

    f(t, &y, &mut k[0]);
    for &t_out in outputs {
        if t_out < t - 1e-15 * t.abs().max(1.0) {
            return Err(Error::domain("output times must be increasing"));
        }
        while t < t_out {
            steps += 1;
            if steps > tol.max_steps {
                return Err(Error::numerical(format!("dopri5 exceeded {} steps", tol.max_steps)));
            }
            let last = t + h >= t_out;
            let hs = if last { t_out - t } else { h };
            // Row 6 of A holds the fifth-order weights, so stage 7 is f at the new point (FSAL).
            for s in 1..7 {
                for i in 0..n {
                    let mut acc = y[i];
                    for (j, kj) in k.iter().enumerate().take(s) {
                        acc += hs * A[s][j] * kj[i];
                    }
                    ytmp[i] = acc;
                }
                f(t + C[s] * hs, &ytmp, &mut k[s]);
                if s == 6 {
                    ynew.copy_from_slice(&ytmp);
                }
            }
            let mut err: f64 = 0.0;
            for i in 0..n {
                let mut e = 0.0;
                for (s, ks) in k.iter().enumerate() {
                    e += E[s] * ks[i];
                }
                let sc = tol.atol + tol.rtol * y[i].abs().max(ynew[i].abs());
                err += (hs * e / sc).powi(2);
            }
            let err = (err / n as f64).sqrt();
            if !err.is_finite() {
                return Err(Error::numerical("non-finite derivative in dopri5"));
            }
            if err <= 1.0 {
                t += hs;
                y.copy_from_slice(&ynew);
                k.swap(0, 6);
                let fac = 0.9 * err.max(1e-10).powf(-0.7 / 5.0) * err_prev.powf(0.4 / 5.0);
                err_prev = err.max(1e-4);
                if !last || hs >= h {
                    h = hs * fac.clamp(0.2, 5.0);
                }
                if last {
                    t = t_out;
                }
            } else {
                h = hs * (0.9 * err.powf(-0.2)).max(0.2);
            }
            if h < 1e-14 * t.abs().max(span) {
                return Err(Error::numerical(format!("dopri5 step collapsed at t = {t:e}")));
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_energy() {
        let ts: Vec<f64> = (1..=10).map(|i| i as f64 * 10.0).collect();
        let ys = dopri5(
            |_, y, d| {
                d[0] = y[1];
                d[1] = -y[0];
            },
            0.0,
            &[1.0, 0.0],
            &ts,
            Tolerance::default(),
        )
        .unwrap();
        for (t, y) in ts.iter().zip(&ys) {
            assert!((y[0] - t.cos()).abs() < 1e-7, "t={t}");
            let energy = y[0] * y[0] + y[1] * y[1];
            assert!((energy - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn exponential_growth() {
        let ys = dopri5(|_, y, d| d[0] = y[0], 0.0, &[1.0], &[1.0], Tolerance::default()).unwrap();
        assert!((ys[0][0] - std::f64::consts::E).abs() < 1e-8);
    }
}
