//! Scaling family `φ_λ = λ φ(λ·)`, the curve `Φ_μ(λ) = I_μ(φ_λ)/λ²`, invariant-set
//! classification and the Moser–Trudinger probes.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{NlsError, Result};
use crate::functionals::{functionals, k1_integral, moser_integral, FunctionalReport};
use crate::grid::{grad_norm_sq, h1_norm_sq, outer_mass_fraction, Field, Grid2D};
use crate::kernels::{self, Mu};

/// Largest mass fraction allowed beyond `r = L/2` after rescaling.
pub const SUPPORT_TOLERANCE: f64 = 1e-8;
/// Relative width of the dead-band around `P = 0` and `I = 0`.
pub const DEAD_BAND: f64 = 1e-9;
pub const INEQUALITY_SLACK: f64 = 1e-9;

/// Periodic band-limited interpolation kernel for an `n`-point axis, with the
/// Nyquist mode taken as a cosine so that real data stay real.
fn dirichlet(t: f64, n: usize) -> f64 {
    let nf = n as f64;
    let m = (n / 2 - 1) as f64;
    let theta = 2.0 * PI * t / nf;
    let half = 0.5 * theta;
    let s = half.sin();
    let partial = if s.abs() < 1e-15 {
        // t is a multiple of n.
        m
    } else {
        (m * half).sin() * ((m + 1.0) * half).cos() / s
    };
    (1.0 + 2.0 * partial + (PI * t).cos()) / nf
}

/// Interpolation matrix taking samples at the grid to samples at `λ x_i`.
/// Rows whose target falls outside the box are zero.
fn rescale_matrix(grid: &Grid2D, lambda: f64) -> Vec<f64> {
    let n = grid.n();
    let mut k = vec![0.0; n * n];
    for out in 0..n {
        let s = (lambda * grid.coord(out) + grid.half_width()) / grid.dx() - 0.5;
        if s < -0.5 || s > n as f64 - 0.5 {
            // Outside the box the field is taken to vanish, not to repeat.
            continue;
        }
        let nearest = s.round();
        let exact = (s - nearest).abs() < 1e-13 && nearest >= 0.0 && nearest < n as f64;
        for inp in 0..n {
            k[out * n + inp] = if exact {
                if inp == nearest as usize {
                    1.0
                } else {
                    0.0
                }
            } else {
                dirichlet(s - inp as f64, n)
            };
        }
    }
    k
}

/// `λ φ(λ x)` by trigonometric interpolation of the samples.
pub fn rescale(field: &Field, lambda: f64) -> Result<Field> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(NlsError::Precondition(format!("lambda must be positive, got {lambda}")));
    }
    let grid = field.grid();
    let n = grid.n();
    let k = rescale_matrix(grid, lambda);
    let src = field.values();
    // Row-major index is y * n + x: apply K along x, then along y.
    let mut tmp = vec![Complex64::new(0.0, 0.0); n * n];
    for y in 0..n {
        let row = &src[y * n..(y + 1) * n];
        for xo in 0..n {
            let kr = &k[xo * n..(xo + 1) * n];
            let mut acc = Complex64::new(0.0, 0.0);
            for (w, v) in kr.iter().zip(row) {
                acc += v * *w;
            }
            tmp[y * n + xo] = acc;
        }
    }
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for yo in 0..n {
        let kr = &k[yo * n..(yo + 1) * n];
        let dst = &mut out[yo * n..(yo + 1) * n];
        for (yi, w) in kr.iter().enumerate() {
            if *w == 0.0 {
                continue;
            }
            let w = *w * lambda;
            let srow = &tmp[yi * n..(yi + 1) * n];
            for (d, v) in dst.iter_mut().zip(srow) {
                *d += v * w;
            }
        }
    }
    let scaled = Field::new(grid.clone(), out, field.time())?;
    let outside = outer_mass_fraction(&scaled, 0.5 * grid.half_width());
    if outside >= SUPPORT_TOLERANCE {
        return Err(NlsError::SupportViolation { lambda, outside });
    }
    Ok(scaled)
}

fn scaling_error(lambda: f64, err: NlsError) -> NlsError {
    match err {
        NlsError::Overflow { argument, .. } => NlsError::ScalingOverflow { lambda, argument },
        other => other,
    }
}

/// `Φ_μ(0) = ‖∇φ‖² - 2π(1-μ)‖φ‖⁴_{L⁴}`.
pub fn phi_limit(field: &Field, mu: Mu) -> f64 {
    let l4: f64 = field.values().iter().map(|v| v.norm_sqr().powi(2)).sum::<f64>() * field.grid().cell_area();
    grad_norm_sq(field) - 2.0 * PI * (1.0 - mu.value()) * l4
}

/// `Φ_μ(λ) = ‖∇φ‖² - λ⁻⁴ ∫ h_μ(4πλ²|φ|²)/(4π)`, evaluated on the original samples.
pub fn phi_curve(field: &Field, mu: Mu, grad_sq: f64, lambda: f64) -> Result<f64> {
    let l2 = lambda * lambda;
    let mut sum = 0.0;
    for v in field.values() {
        sum += kernels::virial_density(l2 * v.norm_sqr(), mu).map_err(|e| scaling_error(lambda, e))?;
    }
    Ok(grad_sq - sum * field.grid().cell_area() / (l2 * l2))
}

/// Samples of `S`, `P`, `I` along the scaling family.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingCurve {
    pub lambdas: Vec<f64>,
    pub s_values: Vec<f64>,
    pub i_values: Vec<f64>,
    pub p_values: Vec<f64>,
    pub phi0_limit: f64,
}

impl ScalingCurve {
    /// `|dS/d ln λ - I| / max|I|` at the nodes with two neighbours on each side.
    ///
    /// Uses the fourth-order centred difference on the log-uniform nodes.
    pub fn derivative_residuals(&self) -> Vec<(f64, f64)> {
        let n = self.lambdas.len();
        if n < 5 {
            return Vec::new();
        }
        let h = (self.lambdas[n - 1] / self.lambdas[0]).ln() / (n - 1) as f64;
        let scale = self.i_values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let s = &self.s_values;
        (2..n - 2)
            .map(|j| {
                let d = (-s[j + 2] + 8.0 * s[j + 1] - 8.0 * s[j - 1] + s[j - 2]) / (12.0 * h);
                let r = (d - self.i_values[j]).abs();
                (self.lambdas[j], if scale > 0.0 { r / scale } else { r })
            })
            .collect()
    }

    /// `I(φ_λ)/λ²` at every node.
    pub fn phi_values(&self) -> Vec<f64> {
        self.lambdas
            .iter()
            .zip(&self.i_values)
            .map(|(l, i)| i / (l * l))
            .collect()
    }

    /// Whether `I/λ²` strictly decreases, allowing `slack` between neighbours.
    pub fn is_phi_decreasing(&self, slack: f64) -> bool {
        self.phi_values().windows(2).all(|w| w[1] < w[0] + slack)
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# phi0_limit={:e}\nlambda,S,P,I\n", self.phi0_limit);
        for j in 0..self.lambdas.len() {
            out.push_str(&format!(
                "{:e},{:e},{:e},{:e}\n",
                self.lambdas[j], self.s_values[j], self.p_values[j], self.i_values[j]
            ));
        }
        out
    }
}

/// Log-spaced samples of the family on `[range.0, range.1]`.
pub fn scaling_curve(field: &Field, mu: Mu, range: (f64, f64), count: usize) -> Result<ScalingCurve> {
    if field.is_zero() {
        return Err(NlsError::Precondition("scaling curve of the zero field".into()));
    }
    let (a, b) = range;
    if !(a > 0.0 && b > a) || count < 2 {
        return Err(NlsError::Precondition(format!("invalid lambda range [{a}, {b}] with {count} nodes")));
    }
    let step = (b / a).ln() / (count - 1) as f64;
    let mut curve = ScalingCurve {
        lambdas: Vec::with_capacity(count),
        s_values: Vec::with_capacity(count),
        i_values: Vec::with_capacity(count),
        p_values: Vec::with_capacity(count),
        phi0_limit: phi_limit(field, mu),
    };
    for j in 0..count {
        let lambda = if j + 1 == count { b } else { a * (step * j as f64).exp() };
        let scaled = rescale(field, lambda)?;
        let r = functionals(&scaled, mu).map_err(|e| scaling_error(lambda, e))?;
        curve.lambdas.push(lambda);
        curve.s_values.push(r.action);
        curve.i_values.push(r.i_functional);
        curve.p_values.push(r.p_functional);
    }
    Ok(curve)
}

const ROOT_RELATIVE_TOLERANCE: f64 = 1e-12;
const BRACKET_STEPS: usize = 200;

/// The unique `λ > 0` with `I_μ(φ_λ) = 0`, or `None` when `Φ_μ(0) <= 0`.
pub fn find_i_root(field: &Field, mu: Mu) -> Result<Option<f64>> {
    if field.is_zero() {
        return Err(NlsError::Precondition("root of the zero field".into()));
    }
    if phi_limit(field, mu) <= 0.0 {
        return Ok(None);
    }
    let grad = grad_norm_sq(field);
    let phi = |l: f64| phi_curve(field, mu, grad, l);
    let (mut lo, mut hi) = (1.0, 1.0);
    let mut found = false;
    if phi(1.0)? > 0.0 {
        for _ in 0..BRACKET_STEPS {
            hi *= 2.0;
            if phi(hi)? <= 0.0 {
                found = true;
                break;
            }
            lo = hi;
        }
    } else {
        for _ in 0..BRACKET_STEPS {
            lo *= 0.5;
            if phi(lo)? > 0.0 {
                found = true;
                break;
            }
            hi = lo;
        }
    }
    if !found {
        return Ok(None);
    }
    while hi - lo > ROOT_RELATIVE_TOLERANCE * hi {
        let mid = (lo * hi).sqrt();
        if mid <= lo || mid >= hi {
            break;
        }
        if phi(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some((lo * hi).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SetA {
    APlus,
    AMinus,
    OnNehari,
    AboveThreshold,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SetK {
    KPlus,
    KMinus,
    IZero,
    AboveThreshold,
    Zero,
}

impl fmt::Display for SetA {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SetA::APlus => "A_plus",
            SetA::AMinus => "A_minus",
            SetA::OnNehari => "on_nehari",
            SetA::AboveThreshold => "above_threshold",
            SetA::Zero => "zero",
        })
    }
}

impl fmt::Display for SetK {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SetK::KPlus => "K_plus",
            SetK::KMinus => "K_minus",
            SetK::IZero => "i_zero",
            SetK::AboveThreshold => "above_threshold",
            SetK::Zero => "zero",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SetVerdict {
    pub set_a: SetA,
    pub set_k: SetK,
    pub s_value: f64,
    pub p_value: f64,
    pub i_value: f64,
    pub e_value: f64,
    pub threshold: f64,
}

impl SetVerdict {
    /// `(A_plus, K_minus)` or `(A_minus, K_plus)`.
    pub fn is_disagreement(&self) -> bool {
        matches!(
            (self.set_a, self.set_k),
            (SetA::APlus, SetK::KMinus) | (SetA::AMinus, SetK::KPlus)
        )
    }

    /// In the closure of `A⁺`: `A_plus` or the zero field.
    pub fn in_closed_a_plus(&self) -> bool {
        matches!(self.set_a, SetA::APlus | SetA::Zero)
    }
}

impl fmt::Display for SetVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "set_a={} set_k={} s={:e} p={:e} i={:e} e={:e} threshold={:e}",
            self.set_a, self.set_k, self.s_value, self.p_value, self.i_value, self.e_value, self.threshold
        )
    }
}

/// Classifies from an already computed report.
pub fn classify_report(report: &FunctionalReport, is_zero: bool, threshold: f64) -> SetVerdict {
    let s = report.action;
    let (set_a, set_k) = if is_zero {
        (SetA::Zero, SetK::Zero)
    } else if s >= threshold {
        (SetA::AboveThreshold, SetK::AboveThreshold)
    } else {
        let band = DEAD_BAND * s.abs().max(1.0);
        let a = if report.p_functional.abs() < band {
            SetA::OnNehari
        } else if report.p_functional > 0.0 {
            SetA::APlus
        } else {
            SetA::AMinus
        };
        let k = if report.i_functional.abs() < band {
            SetK::IZero
        } else if report.i_functional > 0.0 {
            SetK::KPlus
        } else {
            SetK::KMinus
        };
        (a, k)
    };
    SetVerdict {
        set_a,
        set_k,
        s_value: s,
        p_value: report.p_functional,
        i_value: report.i_functional,
        e_value: report.energy,
        threshold,
    }
}

/// Membership in `A±` (sign of `P`) and `K±` (sign of `I`) below `threshold`.
pub fn classify(field: &Field, mu: Mu, threshold: f64) -> Result<SetVerdict> {
    let report = functionals(field, mu)?;
    Ok(classify_report(&report, field.is_zero(), threshold))
}

/// `min(2(S(Q) - S₁(φ)), ∫ k₁(4π|φ|²))`, checked against `I₁(φ)`.
pub fn coercivity_bound(field: &Field, threshold: f64) -> Result<f64> {
    let v = classify(field, Mu::One, threshold)?;
    if !v.in_closed_a_plus() {
        return Err(NlsError::Precondition(format!(
            "coercivity bound needs a field in the closure of A_plus, got {}",
            v.set_a
        )));
    }
    if v.set_a == SetA::Zero {
        return Ok(0.0);
    }
    let bound = (2.0 * (threshold - v.s_value)).min(k1_integral(field)?);
    if v.i_value < bound - INEQUALITY_SLACK {
        return Err(NlsError::Inequality(format!(
            "I = {:e} below the coercivity bound {:e}",
            v.i_value, bound
        )));
    }
    Ok(bound)
}

/// `2(S_μ(φ) - S(Q))`, checked as an upper bound for `I_μ(φ)`.
pub fn blowup_gap(field: &Field, mu: Mu, threshold: f64) -> Result<f64> {
    let v = classify(field, mu, threshold)?;
    if v.e_value < 0.0 {
        return Err(NlsError::Precondition(format!("energy {:e} is negative", v.e_value)));
    }
    if v.set_k != SetK::KMinus {
        return Err(NlsError::Precondition(format!("field is {}, expected K_minus", v.set_k)));
    }
    let gap = 2.0 * (v.s_value - threshold);
    if v.i_value > gap + INEQUALITY_SLACK {
        return Err(NlsError::Inequality(format!("I = {:e} above the gap {:e}", v.i_value, gap)));
    }
    Ok(gap)
}

/// Gradient norm squared of the second normalization used for the refined check.
pub const REFINED_GRAD_SQ: f64 = 0.9;

/// One member of the truncated-logarithm family.
///
/// `mass`, `grad_sq` and `moser_integral` refer to the copy with `‖u‖_{H¹} = 1`;
/// the `refined_*` fields to the copy with `‖∇u‖² = REFINED_GRAD_SQ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoserMember {
    pub inner_radius: f64,
    pub outer_radius: f64,
    pub mass: f64,
    pub grad_sq: f64,
    pub moser_integral: f64,
    pub refined_mass: f64,
    pub refined_grad_sq: f64,
    pub refined_integral: f64,
}

impl MoserMember {
    /// `‖u‖² / (1 - ‖∇u‖²)` of the gradient-normalized copy.
    pub fn refined_factor(&self) -> f64 {
        self.refined_mass / (1.0 - self.refined_grad_sq)
    }
}

/// Lower bound for the Moser–Trudinger constant with the members that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct KappaEstimate {
    pub kappa: f64,
    pub members: Vec<MoserMember>,
}

impl KappaEstimate {
    /// Members whose gradient-normalized copy violates
    /// `∫(e^{4π|u|²}-1) <= κ(1+1e-6) ‖u‖²/(1-‖∇u‖²)`.
    pub fn refined_violations(&self) -> Vec<MoserMember> {
        let k = self.kappa * (1.0 + 1e-6);
        self.members
            .iter()
            .filter(|m| m.refined_integral > k * m.refined_factor())
            .copied()
            .collect()
    }
}

const MOSER_OUTER: [f64; 4] = [1.0, 1.5, 2.0, 3.0];
const MOSER_SUBSAMPLES: usize = 4;

/// `(ρ, R)` of the `index`-th family member; independent of the family size.
pub fn moser_parameters(index: usize, grid: &Grid2D) -> Vec<(f64, f64)> {
    let outer: Vec<f64> = MOSER_OUTER
        .iter()
        .copied()
        .filter(|r| *r < 0.45 * grid.half_width())
        .collect();
    let mut out = Vec::with_capacity(index);
    let mut level = 1;
    while out.len() < index && !outer.is_empty() {
        for &r in &outer {
            if out.len() == index {
                break;
            }
            out.push((r * (-0.5 * level as f64).exp(), r));
        }
        level += 1;
    }
    out
}

/// `min(1, ln(R/r)/ln(R/ρ))` on `r < R`, averaged over sub-cells.
fn moser_profile(grid: &Grid2D, inner: f64, outer: f64) -> Result<Field> {
    let denom = (outer / inner).ln();
    let shape = |r: f64| {
        if r <= inner {
            1.0
        } else if r >= outer {
            0.0
        } else {
            (outer / r).ln() / denom
        }
    };
    let dx = grid.dx();
    let sub = MOSER_SUBSAMPLES;
    Field::from_fn(grid, |x, y| {
        let mut acc = 0.0;
        for a in 0..sub {
            for b in 0..sub {
                let sx = x + dx * ((a as f64 + 0.5) / sub as f64 - 0.5);
                let sy = y + dx * ((b as f64 + 0.5) / sub as f64 - 0.5);
                acc += shape(sx.hypot(sy));
            }
        }
        Complex64::new(acc / (sub * sub) as f64, 0.0)
    })
}

/// Maximum of `∫(e^{4π|u|²}-1)` over the first `family_size` Moser members with `‖u‖_{H¹} = 1`.
pub fn kappa_probe(family_size: usize, grid: &Grid2D) -> Result<KappaEstimate> {
    if family_size == 0 {
        return Err(NlsError::Precondition("family size must be positive".into()));
    }
    let params = moser_parameters(family_size, grid);
    if params.len() < family_size {
        return Err(NlsError::Precondition("box too small for the Moser family".into()));
    }
    let mut members = Vec::with_capacity(family_size);
    let mut kappa = 0.0f64;
    for (inner, outer) in params {
        if inner < 2.0 * grid.dx() {
            return Err(NlsError::Resolution(format!(
                "Moser member with inner radius {inner} is not resolved by dx = {}",
                grid.dx()
            )));
        }
        let raw = moser_profile(grid, inner, outer)?;
        let norm = h1_norm_sq(&raw).sqrt();
        let u = raw.scaled(1.0 / norm);
        let report = functionals(&u, Mu::Zero)?;
        let value = moser_integral(&u)?;
        kappa = kappa.max(value);
        let v = raw.scaled((REFINED_GRAD_SQ / grad_norm_sq(&raw)).sqrt());
        let refined = functionals(&v, Mu::Zero)?;
        members.push(MoserMember {
            inner_radius: inner,
            outer_radius: outer,
            mass: report.mass,
            grad_sq: report.grad_sq,
            moser_integral: value,
            refined_mass: refined.mass,
            refined_grad_sq: refined.grad_sq,
            refined_integral: moser_integral(&v)?,
        });
    }
    Ok(KappaEstimate { kappa, members })
}

/// `√M / (1 - ‖∇u‖²) < √(π/κ)`.
pub fn small_data_check(field: &Field, kappa: f64) -> Result<bool> {
    let report = functionals(field, Mu::One)?;
    if !(report.grad_sq < 1.0) {
        return Err(NlsError::Precondition(format!(
            "gradient norm squared {} is not below 1",
            report.grad_sq
        )));
    }
    if !(kappa > 0.0) {
        return Err(NlsError::Precondition(format!("kappa must be positive, got {kappa}")));
    }
    Ok(report.mass.sqrt() / (1.0 - report.grad_sq) < (PI / kappa).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, mass};

    fn gaussian(g: &Grid2D, a: f64, w: f64) -> Field {
        Field::from_radial(g, |r| a * (-(r / w).powi(2)).exp()).unwrap()
    }

    #[test]
    fn dirichlet_kernel_interpolates() {
        for n in [16usize, 32] {
            assert!((dirichlet(0.0, n) - 1.0).abs() < 1e-14);
            for j in 1..n {
                assert!(dirichlet(j as f64, n).abs() < 1e-14);
            }
            let total: f64 = (0..n).map(|j| dirichlet(0.3 - j as f64, n)).sum();
            assert!((total - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn rescale_identity_and_laws() {
        let g = make_grid(128, 8.0).unwrap();
        let f = gaussian(&g, 0.3, 1.0);
        assert!(rescale(&f, 1.0).unwrap().sup_distance(&f).unwrap() < 1e-12);
        let f2 = rescale(&f, 2.0).unwrap();
        let m = mass(&f2) / mass(&f);
        assert!((m - 1.0).abs() < 1e-8, "{m}");
        assert!((grad_norm_sq(&f2) / grad_norm_sq(&f) - 4.0).abs() < 4e-6);
        // λ φ(λ x) of a Gaussian is again a Gaussian.
        let exact = gaussian(&g, 0.6, 0.5);
        let d = f2.sup_distance(&exact).unwrap();
        assert!(d < 1e-9, "{d}");
    }

    #[test]
    fn rescale_detects_support_violation() {
        let g = make_grid(32, 4.0).unwrap();
        let f = gaussian(&g, 0.3, 0.7);
        assert!(matches!(rescale(&f, 0.25), Err(NlsError::SupportViolation { .. })));
    }

    #[test]
    fn phi_limit_mu_one_is_gradient() {
        let g = make_grid(64, 8.0).unwrap();
        let f = gaussian(&g, 0.4, 1.2);
        assert_eq!(phi_limit(&f, Mu::One), grad_norm_sq(&f));
    }

    #[test]
    fn classify_zero_and_small() {
        let g = make_grid(64, 8.0).unwrap();
        let z = classify(&Field::zeros(&g), Mu::One, 0.28).unwrap();
        assert_eq!((z.set_a, z.set_k), (SetA::Zero, SetK::Zero));
        let v = classify(&gaussian(&g, 0.01, 1.0), Mu::One, 0.28).unwrap();
        assert_eq!((v.set_a, v.set_k), (SetA::APlus, SetK::KPlus));
        assert!(v.to_string().starts_with("set_a=A_plus set_k=K_plus"));
    }

    #[test]
    fn root_of_negative_phi_limit_is_none() {
        // ‖∇φ‖² = π a² and ‖φ‖⁴₄ = π a⁴ / 4 for a e^{-r²}; negative once a² > 2/π.
        let g = make_grid(64, 8.0).unwrap();
        let f = gaussian(&g, 1.5, 1.0);
        assert!(phi_limit(&f, Mu::Zero) < 0.0);
        assert_eq!(find_i_root(&f, Mu::Zero).unwrap(), None);
    }

    #[test]
    fn moser_parameters_are_nested() {
        let g = make_grid(256, 8.0).unwrap();
        let a = moser_parameters(3, &g);
        let b = moser_parameters(7, &g);
        assert_eq!(&b[..3], &a[..]);
    }

    #[test]
    fn small_data_check_zero_field() {
        let g = make_grid(32, 4.0).unwrap();
        assert!(small_data_check(&Field::zeros(&g), 1.0).unwrap());
    }
}
