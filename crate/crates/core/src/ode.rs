//! Dormand–Prince 5(4) integrator for two-component real systems.

use crate::error::{NlsError, Result};

pub(crate) type State = [f64; 2];

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
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
// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Adaptive stepper; the step size carries over between calls to [`Dopri5::advance`].
pub(crate) struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    h: f64,
}

impl Dopri5 {
    pub fn new(rtol: f64, atol: f64, initial_step: f64) -> Self {
        Self {
            rtol,
            atol,
            h: initial_step,
        }
    }

    /// Integrates `y' = rhs(r, y)` from `r0` to `r1`, landing exactly on `r1`.
    pub fn advance<F>(&mut self, rhs: &F, r0: f64, r1: f64, y: State) -> Result<State>
    where
        F: Fn(f64, &State) -> Result<State>,
    {
        let mut r = r0;
        let mut y = y;
        let mut k1 = rhs(r, &y)?;
        while r < r1 {
            let last = self.h >= r1 - r;
            let h = if last { r1 - r } else { self.h };
            if h <= 1e-14 * r.abs().max(1e-300) {
                return Err(NlsError::Integration {
                    r,
                    reason: "step size underflow".into(),
                });
            }
            let mut k = [[0.0; 2]; 7];
            k[0] = k1;
            for s in 1..7 {
                let mut ys = y;
                for (j, kj) in k.iter().enumerate().take(s) {
                    let a = A[s][j];
                    if a != 0.0 {
                        ys[0] += h * a * kj[0];
                        ys[1] += h * a * kj[1];
                    }
                }
                if s == 6 {
                    // FSAL: stage 7 is evaluated at the proposed solution.
                    k[6] = rhs(r + h, &ys)?;
                    let mut err = 0.0f64;
                    for c in 0..2 {
                        let mut e = 0.0;
                        for (i, ki) in k.iter().enumerate() {
                            e += E[i] * ki[c];
                        }
                        let scale = self.atol + self.rtol * y[c].abs().max(ys[c].abs());
                        err = err.max((h * e).abs() / scale);
                    }
                    if !err.is_finite() {
                        self.h = 0.2 * h;
                        break;
                    }
                    let factor = if err == 0.0 {
                        5.0
                    } else {
                        (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                    };
                    if err <= 1.0 {
                        r = if last { r1 } else { r + h };
                        y = ys;
                        k1 = k[6];
                        if !last || factor < 1.0 {
                            self.h = h * factor;
                        }
                    } else {
                        self.h = h * factor.min(1.0);
                    }
                } else {
                    k[s] = rhs(r + C[s] * h, &ys)?;
                }
            }
        }
        Ok(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_period() {
        let rhs = |_r: f64, y: &State| Ok([y[1], -y[0]]);
        let mut st = Dopri5::new(1e-12, 1e-14, 1e-3);
        let mut y = [1.0, 0.0];
        let n = 100;
        let period = 2.0 * std::f64::consts::PI;
        for i in 0..n {
            let a = period * i as f64 / n as f64;
            let b = period * (i + 1) as f64 / n as f64;
            y = st.advance(&rhs, a, b, y).unwrap();
        }
        assert!((y[0] - 1.0).abs() < 1e-10);
        assert!(y[1].abs() < 1e-10);
    }

    #[test]
    fn exponential_growth() {
        let rhs = |_r: f64, y: &State| Ok([y[0], 2.0 * y[1]]);
        let mut st = Dopri5::new(1e-12, 1e-14, 1e-2);
        let y = st.advance(&rhs, 0.0, 3.0, [1.0, 1.0]).unwrap();
        assert!((y[0] / 3f64.exp() - 1.0).abs() < 1e-10);
        assert!((y[1] / 6f64.exp() - 1.0).abs() < 1e-10);
    }
}
