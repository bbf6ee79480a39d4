//! Pointwise scalar functions built from the exponential nonlinearity
//! `f_mu(u) = (e^{4 pi |u|^2} - 1 - 4 pi mu |u|^2) u`.
//!
//! Every kernel is a real function of `rho = |u|^2` or of `s = 4 pi rho`.
//! Below [`SERIES_THRESHOLD`] each kernel is summed from its Taylor series,
//! whose coefficients are all nonnegative once the cancelling low-order
//! terms are removed, so no digits are lost near the origin. Above the
//! threshold the closed forms lose at most a few bits.

use std::f64::consts::PI;

use crate::error::{NlsError, Result};

/// Largest exponent argument the kernels will evaluate.
pub const EXP_ARG_LIMIT: f64 = 700.0;

/// Switch point between the series branch and the closed-form branch.
pub const SERIES_THRESHOLD: f64 = 1.0;

/// Highest Taylor degree used on the series branch; `1/25!` is below 1e-25.
const SERIES_DEGREE: usize = 24;

/// The two admissible values of the quadratic correction `mu`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mu {
    Zero,
    One,
}

impl Mu {
    pub fn value(self) -> f64 {
        match self {
            Mu::Zero => 0.0,
            Mu::One => 1.0,
        }
    }

    pub fn as_u8(self) -> u8 {
        match self {
            Mu::Zero => 0,
            Mu::One => 1,
        }
    }
}

impl TryFrom<u8> for Mu {
    type Error = NlsError;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            0 => Ok(Mu::Zero),
            1 => Ok(Mu::One),
            other => Err(NlsError::Precondition(format!("mu must be 0 or 1, got {other}"))),
        }
    }
}

impl std::fmt::Display for Mu {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

#[inline]
fn check_arg(s: f64) -> Result<()> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(NlsError::Precondition(format!(
            "kernel argument must be finite and nonnegative, got {s}"
        )));
    }
    if s > EXP_ARG_LIMIT {
        return Err(NlsError::Overflow {
            argument: s,
            limit: EXP_ARG_LIMIT,
        });
    }
    Ok(())
}

/// `sum_{n} w(n) s^n / n!`, accumulated from the highest degree down.
///
/// Terms are dropped once they fall below `1e-17 s^3 / 6`, the smallest
/// leading term of any series used here; weights grow at most like `n^2`.
#[inline]
fn taylor(s: f64, weight: impl Fn(usize) -> f64) -> f64 {
    let floor = 1e-17 * s * s * s / 6.0;
    let mut terms = [0.0f64; SERIES_DEGREE + 1];
    let mut top = SERIES_DEGREE;
    let mut t = 1.0;
    for n in 1..=SERIES_DEGREE {
        t *= s / n as f64;
        terms[n] = t;
        if n >= 3 && t * (n * n) as f64 <= floor {
            top = n;
            break;
        }
    }
    let mut acc = 0.0;
    for n in (1..=top).rev() {
        acc += weight(n) * terms[n];
    }
    acc
}

/// `e^s - 1 - mu s`.
fn multiplier_s(s: f64, mu: Mu) -> f64 {
    let m = mu.value();
    if s < SERIES_THRESHOLD {
        taylor(s, |n| if n == 1 { 1.0 - m } else { 1.0 })
    } else {
        s.exp_m1() - m * s
    }
}

/// `e^s - 1 - s - mu s^2 / 2`.
fn potential_s(s: f64, mu: Mu) -> f64 {
    let m = mu.value();
    if s < SERIES_THRESHOLD {
        taylor(s, |n| match n {
            1 => 0.0,
            2 => 1.0 - m,
            _ => 1.0,
        })
    } else {
        s.exp_m1() - s - 0.5 * m * s * s
    }
}

/// Multiplier `m` with `f_mu(u) = m(|u|^2) u`, i.e. `e^{4 pi rho} - 1 - 4 pi mu rho`.
pub fn multiplier(rho: f64, mu: Mu) -> Result<f64> {
    let s = 4.0 * PI * rho;
    check_arg(s)?;
    Ok(multiplier_s(s, mu))
}

/// Potential density `F_mu = (e^{4 pi rho} - 1 - 4 pi rho - 8 pi^2 mu rho^2) / (8 pi)`.
pub fn big_f(rho: f64, mu: Mu) -> Result<f64> {
    let s = 4.0 * PI * rho;
    check_arg(s)?;
    Ok(potential_s(s, mu) / (8.0 * PI))
}

/// `h_mu(s) = s e^s - e^s + 1 - (mu/2) s^2`; `h_mu(4 pi |u|^2) / (4 pi) = conj(u) f_mu(u) - 2 F_mu(u)`.
pub fn h_kernel(s: f64, mu: Mu) -> Result<f64> {
    check_arg(s)?;
    let m = mu.value();
    Ok(if s < SERIES_THRESHOLD {
        taylor(s, |n| match n {
            1 => 0.0,
            2 => 1.0 - m,
            _ => (n - 1) as f64,
        })
    } else {
        s * s.exp() - s.exp_m1() - 0.5 * m * s * s
    })
}

/// `g_mu(s) = s(e^s - 1 - mu s) - 2(e^s - 1 - s - (mu/2) s^2)`.
///
/// The `mu` terms cancel identically, so the value does not depend on `mu`.
pub fn g_kernel(s: f64, _mu: Mu) -> Result<f64> {
    check_arg(s)?;
    Ok(if s < SERIES_THRESHOLD {
        taylor(s, |n| if n < 3 { 0.0 } else { (n - 2) as f64 })
    } else {
        (s - 2.0) * s.exp_m1() + 2.0 * s
    })
}

/// `4 pi k_1(s) = s^2 e^s / 2 - s e^s + e^s - 1`, shared by `k1_kernel` and `m_kernel`.
fn k1_scaled(s: f64) -> f64 {
    if s < SERIES_THRESHOLD {
        taylor(s, |n| {
            if n < 3 {
                0.0
            } else {
                ((n - 1) * (n - 2)) as f64 / 2.0
            }
        })
    } else {
        s * (0.5 * s - 1.0) * s.exp() + s.exp_m1()
    }
}

/// `k_1(s) = (s^2 e^s / 2 - s e^s + e^s - 1) / (4 pi)`, bounded below by `s^3 / (24 pi)`.
pub fn k1_kernel(s: f64) -> Result<f64> {
    check_arg(s)?;
    Ok(k1_scaled(s) / (4.0 * PI))
}

/// `m(s) = s e^s - e^s - (s^2/2) e^s + 1`, which equals `-4 pi k_1(s)` and is nonpositive.
pub fn m_kernel(s: f64) -> Result<f64> {
    check_arg(s)?;
    Ok(-k1_scaled(s))
}

/// `conj(u) f_mu(u) - 2 F_mu(u)` as a function of `rho = |u|^2`.
pub fn virial_density(rho: f64, mu: Mu) -> Result<f64> {
    Ok(h_kernel(4.0 * PI * rho, mu)? / (4.0 * PI))
}

/// `conj(u) f_mu(u) - 4 F_mu(u)` as a function of `rho = |u|^2`.
pub fn defect_density(rho: f64, mu: Mu) -> Result<f64> {
    Ok(g_kernel(4.0 * PI * rho, mu)? / (4.0 * PI))
}

/// Closed-branch evaluation used to check continuity at the threshold.
#[doc(hidden)]
pub fn closed_branches(s: f64, mu: Mu) -> [f64; 5] {
    let m = mu.value();
    [
        s.exp_m1() - m * s,
        s.exp_m1() - s - 0.5 * m * s * s,
        s * s.exp() - s.exp_m1() - 0.5 * m * s * s,
        (s - 2.0) * s.exp_m1() + 2.0 * s,
        s * (0.5 * s - 1.0) * s.exp() + s.exp_m1(),
    ]
}

/// Series-branch evaluation used to check continuity at the threshold.
#[doc(hidden)]
pub fn series_branches(s: f64, mu: Mu) -> [f64; 5] {
    let m = mu.value();
    [
        taylor(s, |n| if n == 1 { 1.0 - m } else { 1.0 }),
        taylor(s, |n| match n {
            1 => 0.0,
            2 => 1.0 - m,
            _ => 1.0,
        }),
        taylor(s, |n| match n {
            1 => 0.0,
            2 => 1.0 - m,
            _ => (n - 1) as f64,
        }),
        taylor(s, |n| if n < 3 { 0.0 } else { (n - 2) as f64 }),
        taylor(s, |n| {
            if n < 3 {
                0.0
            } else {
                ((n - 1) * (n - 2)) as f64 / 2.0
            }
        }),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn vanishing_at_origin() {
        for mu in [Mu::Zero, Mu::One] {
            assert_eq!(multiplier(0.0, mu).unwrap(), 0.0);
            assert_eq!(big_f(0.0, mu).unwrap(), 0.0);
            assert_eq!(h_kernel(0.0, mu).unwrap(), 0.0);
            assert_eq!(g_kernel(0.0, mu).unwrap(), 0.0);
        }
        assert_eq!(k1_kernel(0.0).unwrap(), 0.0);
        assert_eq!(m_kernel(0.0).unwrap(), 0.0);
    }

    #[test]
    fn closed_form_values() {
        assert!(rel(h_kernel(1.0, Mu::Zero).unwrap(), 1.0) < 1e-15);
        assert!(rel(h_kernel(2.0, Mu::One).unwrap(), E * E - 1.0) < 1e-15);
        assert!(rel(g_kernel(1.0, Mu::One).unwrap(), 3.0 - E) < 1e-14);
        assert!(rel(g_kernel(3.0, Mu::Zero).unwrap(), E.powi(3) + 5.0) < 1e-15);
        assert!(rel(k1_kernel(1.0).unwrap(), (E / 2.0 - 1.0) / (4.0 * PI)) < 1e-14);
        assert!(rel(k1_kernel(2.0).unwrap(), (E * E - 1.0) / (4.0 * PI)) < 1e-15);
        assert!(rel(m_kernel(1.0).unwrap(), 1.0 - E / 2.0) < 1e-14);
        assert!(rel(m_kernel(2.0).unwrap(), 1.0 - E * E) < 1e-15);
    }

    #[test]
    fn mu_difference_of_potential() {
        let rho = 0.05;
        let d = big_f(0.05, Mu::Zero).unwrap() - big_f(0.05, Mu::One).unwrap();
        assert!(rel(d, PI * rho * rho) < 1e-13);
    }

    #[test]
    fn overflow_is_signalled() {
        let rho = 701.0 / (4.0 * PI);
        assert!(matches!(multiplier(rho, Mu::One), Err(NlsError::Overflow { .. })));
        assert!(matches!(k1_kernel(800.0), Err(NlsError::Overflow { .. })));
        assert!(matches!(g_kernel(f64::INFINITY, Mu::Zero), Err(NlsError::Precondition(_))));
        assert!(matches!(h_kernel(-1.0, Mu::Zero), Err(NlsError::Precondition(_))));
        assert!(h_kernel(700.0, Mu::Zero).unwrap().is_finite());
    }

    #[test]
    fn branches_agree_at_threshold() {
        for mu in [Mu::Zero, Mu::One] {
            let a = series_branches(SERIES_THRESHOLD, mu);
            let b = closed_branches(SERIES_THRESHOLD, mu);
            for (x, y) in a.iter().zip(b.iter()) {
                assert!(rel(*x, *y) < 1e-13, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn virial_density_identity() {
        for &rho in &[1e-6, 1e-3, 0.05, 0.2, 1.0, 5.0] {
            for mu in [Mu::Zero, Mu::One] {
                let lhs = rho * multiplier(rho, mu).unwrap() - 2.0 * big_f(rho, mu).unwrap();
                let rhs = virial_density(rho, mu).unwrap();
                assert!(rel(lhs, rhs) < 1e-13 || (lhs - rhs).abs() < 1e-300, "{rho}");
                let lhs4 = rho * multiplier(rho, mu).unwrap() - 4.0 * big_f(rho, mu).unwrap();
                let rhs4 = defect_density(rho, mu).unwrap();
                assert!((lhs4 - rhs4).abs() <= 1e-12 * rhs4.abs().max(rho * multiplier(rho, mu).unwrap()));
            }
        }
    }
}
